use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde_json::json;
use uslsq::algebra::{are_orthogonal, bose_mols, FiniteField};
use uslsq::classify::{catalog, classify, ClassifyOptions, DepthPolicy};
use uslsq::design::{
    canonical_efficiency_factors, delta12_with_resolution, delta3, find_resolution, is_affine_resolvable,
    oa_strength, to_orthogonal_array, BlockDesign, Resolution,
};
use uslsq::isomorph::{design_certificate, has_transposing_automorphism, sls_certificate};
use uslsq::sls::{Axis, SemiLatinSquare};
use uslsq::Error;

use crate::input::{self, Input};
use crate::report::{big, Report};
use crate::{AxisArg, Command, Construct, Derive};

pub fn run(cmd: Command, verbose: bool) -> Result<Report> {
    match cmd {
        Command::Field { q, tables } => field(q, tables),
        Command::Mols { q, out } => mols(q, out.as_deref()),
        Command::Construct(c) => construct(c),
        Command::Verify { file } => verify(&file),
        Command::Eta { file } => {
            let d = input::design(&file)?;
            let mut r = Report::new("eta");
            r.put("params", params(&d)).put("eta", d.eta()?.0);
            Ok(r)
        }
        Command::Spectrum { file } => {
            let d = input::design(&file)?;
            let s = canonical_efficiency_factors(&d)?;
            let mut r = Report::new("spectrum");
            r.put("params", params(&d))
                .put("efficiency_factors", &s.values)
                .put("trace", s.expanded().iter().sum::<f64>());
            Ok(r)
        }
        Command::Dual { file, out } => {
            let d = input::square(&file)?.dual();
            design_report("dual", &d, out.as_deref())
        }
        Command::Underlying { file, out } => {
            let d = input::square(&file)?.underlying_design();
            design_report("underlying", &d, out.as_deref())
        }
        Command::Derive(d) => derive(d),
        Command::ToOa { file, axis, out } => to_oa(&file, axis, out.as_deref()),
        Command::OaStrength { file } => {
            let a = input::orthogonal_array(&file)?;
            let mut r = Report::new("oa-strength");
            r.put("rows", a.n_rows()).put("columns", a.n_cols()).put("symbols", a.s).put("strength", oa_strength(&a)?);
            Ok(r)
        }
        Command::Resolve { file } => resolve(&file),
        Command::Iso { a, b } => iso(&a, &b),
        Command::Aut { file } => aut(&file),
        Command::Cert { file } => cert(&file),
        Command::Classify { n, mu, out, workers, seed_range, min_depth } => {
            let workers = match workers {
                Some(w) => Some(w),
                None => match std::env::var("USLSQ_WORKERS") {
                    Ok(v) => Some(v.parse().with_context(|| format!("USLSQ_WORKERS={v:?} is not a count"))?),
                    Err(_) => None,
                },
            };
            let opts = ClassifyOptions { policy: DepthPolicy { min_depth }, workers, out_dir: out, seed_range };
            let start = Instant::now();
            let run = classify(n, mu, &opts)?;
            if verbose {
                eprintln!("classify({n}, {mu}): {:.2?}", start.elapsed());
            }
            let mut r = Report::new("classify");
            r.put("n", n)
                .put("mu", mu)
                .put("seeds", run.seed_count)
                .put("seeds_done", run.seeds_done)
                .put("solutions", run.solution_count)
                .put("complete", run.complete());
            if run.complete() {
                r.put("classes", run.classes.len());
                if let (Some(a), Some(b)) = (run.classes.first(), run.classes.last()) {
                    r.put("best_eta", &a.eta.0).put("worst_eta", &b.eta.0);
                }
            }
            Ok(r)
        }
        Command::Catalog { dir, entries } => catalog_report(&dir, entries),
    }
}

fn params(d: &BlockDesign) -> serde_json::Value {
    match d.params() {
        Some((v, b, r, k)) => json!({"v": v, "b": b, "r": r, "k": k}),
        None => json!({"v": d.v(), "b": d.b()}),
    }
}

fn design_report(cmd: &str, d: &BlockDesign, out: Option<&Path>) -> Result<Report> {
    if let Some(p) = out {
        input::write_json(p, d)?;
    }
    let mut r = Report::new(cmd);
    r.put("params", params(d)).put("bibd_lambda", d.is_bibd()).put("repeated_blocks", has_repeats(d));
    if out.is_none() {
        r.put("design", d);
    }
    Ok(r)
}

fn has_repeats(d: &BlockDesign) -> bool {
    d.block_multiplicities().iter().any(|&(_, m)| m > 1)
}

fn square_report(cmd: &str, s: &SemiLatinSquare, out: Option<&Path>) -> Result<Report> {
    if let Some(p) = out {
        input::write_json(p, s)?;
    }
    let mut r = Report::new(cmd);
    r.put("n", s.n()).put("k", s.k()).put("v", s.v());
    let u = s.uniformity()?;
    r.put("uniform", u.uniform).put("mu", u.mu);
    if out.is_none() {
        r.put("square", s);
    }
    Ok(r)
}

fn field(q: u64, tables: bool) -> Result<Report> {
    let f = FiniteField::new(q)?;
    let mut r = Report::new("field");
    r.put("order", f.order())
        .put("characteristic", f.characteristic())
        .put("degree", f.degree())
        .put("modulus", f.modulus());
    if tables {
        r.put("add", f.add_table()).put("mul", f.mul_table());
    }
    Ok(r)
}

fn mols(q: u64, out: Option<&Path>) -> Result<Report> {
    let squares = bose_mols(q)?;
    let mut pairs_ok = true;
    for i in 0..squares.len() {
        for j in i + 1..squares.len() {
            pairs_ok &= are_orthogonal(&squares[i], &squares[j])?;
        }
    }
    if let Some(p) = out {
        input::write_json(p, &squares)?;
    }
    let mut r = Report::new("mols");
    r.put("q", q).put("count", squares.len()).put("pairwise_orthogonal", pairs_ok);
    if out.is_none() {
        r.put("squares", &squares);
    }
    if !pairs_ok {
        r.fail();
    }
    Ok(r)
}

fn construct(c: Construct) -> Result<Report> {
    match c {
        Construct::Superpose { files, out } => {
            let mut parts = Vec::new();
            for f in &files {
                match input::read(f)? {
                    Input::Square(raw) => parts.push(SemiLatinSquare::validate(raw.n, raw.k, raw.cells)?),
                    Input::Latin(l) => parts.push(SemiLatinSquare::from_latin(&l)),
                    Input::LatinList(ls) => parts.extend(ls.iter().map(SemiLatinSquare::from_latin)),
                    Input::Design(_) => bail!("{}: cannot superpose a block design", f.display()),
                }
            }
            let s = SemiLatinSquare::superpose(&parts)?;
            square_report("construct superpose", &s, out.as_deref())
        }
        Construct::Inflate { file, s, out } => {
            let sq = input::square(&file)?.inflate(s)?;
            square_report("construct inflate", &sq, out.as_deref())
        }
        Construct::Bars { n, out } => {
            let sq = SemiLatinSquare::bar_s(&bose_mols(n)?)?;
            square_report("construct bars", &sq, out.as_deref())
        }
    }
}

fn verify(path: &Path) -> Result<Report> {
    let mut r = Report::new("verify");
    match input::read(path)? {
        Input::Square(raw) => {
            let (n, k) = (raw.n, raw.k);
            r.put("kind", "semi-latin square").put("n", n).put("k", k);
            match SemiLatinSquare::validate(n, k, raw.cells) {
                Ok(s) => {
                    r.put("valid", true);
                    if n <= 2 {
                        return Ok(r);
                    }
                    let u = s.uniformity()?;
                    r.put("uniform", u.uniform).put("mu", u.mu).put("eta", s.underlying_design().eta()?.0);
                    if let Some(((i, j), (i2, j2), m)) = u.witness {
                        r.put(
                            "witness",
                            format!("cells ({}, {}) and ({}, {}) meet in {m} treatments", i + 1, j + 1, i2 + 1, j2 + 1),
                        );
                        r.fail();
                    }
                }
                Err(Error::NotSemiLatin(v)) => {
                    r.put("valid", false).put("violations", v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
                    r.fail();
                }
                Err(e) => return Err(e.into()),
            }
        }
        Input::Latin(l) => {
            r.put("kind", "latin square").put("n", l.order()).put("valid", true);
        }
        Input::LatinList(ls) => {
            let mut ok = true;
            for i in 0..ls.len() {
                for j in i + 1..ls.len() {
                    ok &= are_orthogonal(&ls[i], &ls[j])?;
                }
            }
            r.put("kind", "latin square list").put("count", ls.len()).put("pairwise_orthogonal", ok);
            if !ok {
                r.fail();
            }
        }
        Input::Design(d) => {
            r.put("kind", "block design").put("params", params(&d)).put("bibd_lambda", d.is_bibd());
            r.put("connected", d.is_connected());
        }
    }
    Ok(r)
}

fn derive(d: Derive) -> Result<Report> {
    let (name, file, out) = match &d {
        Derive::D1 { file, out } => ("derive d1", file, out),
        Derive::D2 { file, out } => ("derive d2", file, out),
        Derive::D3 { file, out } => ("derive d3", file, out),
    };
    let s = input::square(file)?;
    let (design, res) = match d {
        Derive::D1 { .. } => {
            let (d, res) = delta12_with_resolution(&s, Axis::Rows)?;
            (d, Some(res))
        }
        Derive::D2 { .. } => {
            let (d, res) = delta12_with_resolution(&s, Axis::Columns)?;
            (d, Some(res))
        }
        Derive::D3 { .. } => (delta3(&s)?, None),
    };
    let mut r = design_report(name, &design, out.as_deref())?;
    if let Some(res) = res {
        r.put("affine_mu", is_affine_resolvable(&design, &res)?).put("resolution", &res.classes);
    }
    Ok(r)
}

fn affine_source(path: &Path, axis: AxisArg) -> Result<(BlockDesign, Resolution)> {
    match input::read(path)? {
        Input::Design(d) => {
            let res = find_resolution(&d)?.ok_or(Error::NotAffineResolvable)?;
            Ok((d, res))
        }
        Input::Square(raw) => {
            let s = SemiLatinSquare::validate(raw.n, raw.k, raw.cells)?;
            let axis = match axis {
                AxisArg::Rows => Axis::Rows,
                AxisArg::Columns => Axis::Columns,
            };
            Ok(delta12_with_resolution(&s, axis)?)
        }
        _ => bail!("{}: expected a design or a uniform square", path.display()),
    }
}

fn to_oa(path: &Path, axis: AxisArg, out: Option<&Path>) -> Result<Report> {
    let (d, res) = affine_source(path, axis)?;
    let a = to_orthogonal_array(&d, &res)?;
    if let Some(p) = out {
        std::fs::write(p, a.to_string()).with_context(|| format!("cannot write {}", p.display()))?;
    }
    let mut r = Report::new("to-oa");
    r.put("rows", a.n_rows()).put("columns", a.n_cols()).put("symbols", a.s).put("strength", oa_strength(&a)?);
    if out.is_none() {
        r.put("array", a.to_string());
    }
    Ok(r)
}

fn resolve(path: &Path) -> Result<Report> {
    let d = input::design(path)?;
    let mut r = Report::new("resolve");
    r.put("params", params(&d));
    match find_resolution(&d) {
        Ok(Some(res)) => {
            r.put("resolvable", true)
                .put("affine_mu", is_affine_resolvable(&d, &res)?)
                .put("parallel_classes", &res.classes);
        }
        Ok(None) => {
            r.put("resolvable", false);
        }
        Err(Error::InvalidParameter(why)) => {
            r.put("resolvable", false).put("reason", why);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

fn iso(a: &Path, b: &Path) -> Result<Report> {
    let mut r = Report::new("iso");
    match (input::read(a)?, input::read(b)?) {
        (Input::Design(x), Input::Design(y)) => {
            r.put("kind", "block design").put("isomorphic", uslsq::isomorph::designs_are_isomorphic(&x, &y)?);
        }
        (Input::Square(_) | Input::Latin(_), Input::Square(_) | Input::Latin(_)) => {
            let (x, y) = (input::square(a)?, input::square(b)?);
            r.put("kind", "semi-latin square").put("isomorphic", uslsq::isomorph::sls_are_isomorphic(&x, &y)?);
        }
        _ => bail!("iso needs two squares or two designs"),
    }
    Ok(r)
}

fn aut(path: &Path) -> Result<Report> {
    let mut r = Report::new("aut");
    match input::read(path)? {
        Input::Design(d) => {
            r.put("kind", "block design").put("aut_order", big(design_certificate(&d)?.aut_order()));
        }
        _ => {
            let s = input::square(path)?;
            r.put("kind", "semi-latin square")
                .put("aut_order", big(sls_certificate(&s)?.aut_order()))
                .put("dual_aut_order", big(design_certificate(&s.dual())?.aut_order()))
                .put("transposing_automorphism", has_transposing_automorphism(&s)?);
        }
    }
    Ok(r)
}

fn cert(path: &Path) -> Result<Report> {
    let mut r = Report::new("cert");
    let c = match input::read(path)? {
        Input::Design(d) => {
            r.put("kind", "block design");
            design_certificate(&d)?
        }
        _ => {
            r.put("kind", "semi-latin square");
            sls_certificate(&input::square(path)?)?
        }
    };
    r.put("certificate", c.to_hex()).put("aut_order", big(c.aut_order()));
    Ok(r)
}

fn catalog_report(dir: &Path, entries: bool) -> Result<Report> {
    let c = catalog(dir)?;
    let (n, mu) = (c.manifest.n, c.manifest.mu as usize);
    let k = mu * (n - 1);
    let mut r = Report::new("catalog");
    let s = &c.summary;
    r.put("n", n)
        .put("mu", mu)
        .put("summary", format!("{} classes", s.class_count))
        .put("classes", s.class_count)
        .put("best_eta", &s.best_eta)
        .put("next_eta", &s.next_eta)
        .put("worst_eta", &s.worst_eta)
        .put("nontrivial_dual_aut", s.nontrivial_dual_aut)
        .put("max_concurrence_at_most_2", s.max_concurrence_at_most_2)
        .put("full_concurrence_pair", s.full_concurrence_pair)
        .put("full_concurrence_two_pairs", s.full_concurrence_two_pairs)
        .put("transposing_automorphisms", s.transposing_automorphism)
        .put("seeds", c.manifest.seed_count)
        .put("solutions", c.manifest.solution_count)
        .put("underlying_params", json!({"v": n * k, "b": n * n, "r": n, "k": k}))
        .put("delta12_params", json!({"v": n * (k + mu), "b": n * n, "r": n, "k": k + mu}))
        .put("delta3_params", json!({"v": n * n, "b": mu * n * (n + 1), "r": mu * (n + 1), "k": n, "lambda": mu}));
    if entries {
        r.put("entries", &c.entries);
    }
    Ok(r)
}
