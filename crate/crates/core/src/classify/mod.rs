//! Classification of uniform `(n x n)/(mu(n-1))` semi-Latin squares through
//! the block multisets of their duals on the Hamming graph `H(2,n)`.
//!
//! A solution is a multiset of maximum co-cliques of `H(2,n)` covering every
//! non-edge exactly `mu` times. Seeds are orderly-generated partial
//! solutions that are lexicographically minimal in their orbit under
//! `Aut(H(2,n))`; each is extended by exact cover over the blocks that come
//! after its last block, and the solutions are deduplicated by the
//! certificate of the design they form.

mod output;

use std::collections::BTreeMap;
use std::ops::Range;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::design::{BlockDesign, EtaVector};
use crate::error::{Error, Result};
use crate::isomorph::{design_certificate, has_transposing_automorphism, sls_certificate, Certificate};
use crate::sls::SemiLatinSquare;

pub use output::{catalog, Catalog, CatalogSummary, IndexEntry, Manifest};

const MAX_N: usize = 7;

/// The graph on `{0..n}^2` with `(i,j) ~ (i',j')` iff exactly one coordinate agrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HammingGraph {
    n: usize,
}

impl HammingGraph {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=MAX_N).contains(&n) {
            return Err(Error::InvalidParameter(format!("n must be in 2..={MAX_N}, got {n}")));
        }
        Ok(HammingGraph { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.n * self.n
    }

    /// Vertex index of `(i, j)`.
    pub fn vertex(&self, i: usize, j: usize) -> u32 {
        (i * self.n + j) as u32
    }

    pub fn adjacent(&self, a: u32, b: u32) -> bool {
        let n = self.n as u32;
        a != b && (a / n == b / n || a % n == b % n)
    }

    pub fn degree(&self) -> usize {
        2 * (self.n - 1)
    }

    /// Non-adjacent pairs `a < b` in lexicographic order.
    pub fn non_edges(&self) -> Vec<(u32, u32)> {
        let v = self.vertex_count() as u32;
        (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).filter(|&(a, b)| !self.adjacent(a, b)).collect()
    }
}

/// A maximum co-clique of `H(2,n)`: the cells `(i, perm[i])`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CoCliqueBlock {
    pub perm: Vec<u8>,
}

impl CoCliqueBlock {
    pub fn vertices(&self) -> Vec<u32> {
        let n = self.perm.len() as u32;
        self.perm.iter().enumerate().map(|(i, &j)| i as u32 * n + j as u32).collect()
    }
}

/// All `n!` maximum co-cliques in lexicographic order.
pub fn cocliques(n: usize) -> Result<Vec<CoCliqueBlock>> {
    HammingGraph::new(n)?;
    Ok(permutations(n).into_iter().map(|perm| CoCliqueBlock { perm }).collect())
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut p: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

/// `(block index, multiplicity)` pairs with distinct blocks, sorted by block.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PartialSolution {
    pub pairs: Vec<(u32, u32)>,
}

/// A seed and the `(block, largest usable multiplicity)` pairs it may be extended by.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedTask {
    pub index: usize,
    pub n: usize,
    pub partial: PartialSolution,
    pub pool: Vec<(u32, u32)>,
    /// Order of the stabilizer of the seed in `Aut(H(2,n))`.
    pub stabilizer: u64,
}

/// When to stop growing a seed. A partial solution becomes a seed once its
/// stabilizer is trivial and it has at least `min_depth` blocks, or when it
/// is already complete.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DepthPolicy {
    pub min_depth: usize,
}

/// Lookup tables for blocks and non-edges of `H(2,n)`.
pub(crate) struct Tables {
    n: usize,
    perms: Vec<Vec<u8>>,
    inverses: Vec<Vec<u8>>,
    rank: Vec<u32>,
    block_ne: Vec<Vec<u16>>,
    ne_blocks: Vec<Vec<u32>>,
}

impl Tables {
    pub(crate) fn new(n: usize) -> Result<Self> {
        let h = HammingGraph::new(n)?;
        let perms = permutations(n);
        let inverses = perms
            .iter()
            .map(|p| {
                let mut inv = vec![0u8; n];
                for (i, &x) in p.iter().enumerate() {
                    inv[x as usize] = i as u8;
                }
                inv
            })
            .collect();
        let mut rank = vec![u32::MAX; n.pow(n as u32)];
        for (r, p) in perms.iter().enumerate() {
            rank[Self::code(n, p)] = r as u32;
        }
        let nv = h.vertex_count();
        let mut ne_id = vec![u16::MAX; nv * nv];
        let ne = h.non_edges();
        for (id, &(a, b)) in ne.iter().enumerate() {
            ne_id[a as usize * nv + b as usize] = id as u16;
        }
        let mut ne_blocks = vec![Vec::new(); ne.len()];
        let block_ne: Vec<Vec<u16>> = perms
            .iter()
            .map(|p| {
                let mut ids = Vec::new();
                for i in 0..n {
                    for i2 in i + 1..n {
                        let a = i * n + p[i] as usize;
                        let b = i2 * n + p[i2] as usize;
                        ids.push(ne_id[a * nv + b]);
                    }
                }
                ids
            })
            .collect();
        for (bi, ids) in block_ne.iter().enumerate() {
            for &e in ids {
                ne_blocks[e as usize].push(bi as u32);
            }
        }
        Ok(Tables { n, perms, inverses, rank, block_ne, ne_blocks })
    }

    fn code(n: usize, p: &[u8]) -> usize {
        p.iter().rev().fold(0, |acc, &x| acc * n + x as usize)
    }

    fn n_blocks(&self) -> usize {
        self.perms.len()
    }

    fn n_non_edges(&self) -> usize {
        self.ne_blocks.len()
    }

    /// `None` unless `p` is the least image of itself under `Aut(H(2,n))`;
    /// otherwise the order of its stabilizer. `p` must be sorted by block;
    /// pair lists compare by block, then by multiplicity descending.
    fn min_image_stabilizer(&self, p: &[(u32, u32)]) -> Option<u64> {
        let maxm = p.iter().map(|&(_, m)| m).max()?;
        if p[0] != (0, maxm) {
            return None;
        }
        let n = self.n;
        let mut stab = 0;
        let mut rho = vec![vec![0u8; n]; p.len()];
        let mut rho_inv = vec![vec![0u8; n]; p.len()];
        let mut stamp = vec![0u32; self.n_blocks()];
        let mut mult = vec![0u32; self.n_blocks()];
        let mut epoch = 0u32;
        let mut pw = vec![0usize; n];
        for &(beta, m) in p {
            if m != maxm {
                continue;
            }
            // maps sending beta to the identity are x -> a rho a^-1, optionally inverted
            let binv = &self.inverses[beta as usize];
            for (k, &(b, _)) in p.iter().enumerate() {
                let pi = &self.perms[b as usize];
                for x in 0..n {
                    rho[k][x] = binv[pi[x] as usize];
                }
                for x in 0..n {
                    rho_inv[k][rho[k][x] as usize] = x as u8;
                }
            }
            for a in &self.perms {
                for (y, &ay) in a.iter().enumerate() {
                    pw[y] = n.pow(ay as u32);
                }
                for images in [&rho, &rho_inv] {
                    epoch += 1;
                    for (k, &(_, mk)) in p.iter().enumerate() {
                        let r = &images[k];
                        let code: usize = (0..n).map(|y| pw[y] * a[r[y] as usize] as usize).sum();
                        let rank = self.rank[code] as usize;
                        stamp[rank] = epoch;
                        mult[rank] = mk;
                    }
                    let mut r = 0;
                    let mut ord = std::cmp::Ordering::Equal;
                    for &(b, mb) in p {
                        while stamp[r] != epoch {
                            r += 1;
                        }
                        ord = (r as u32).cmp(&b).then(mb.cmp(&mult[r]));
                        if ord.is_ne() {
                            break;
                        }
                        r += 1;
                    }
                    match ord {
                        std::cmp::Ordering::Less => return None,
                        std::cmp::Ordering::Equal => stab += 1,
                        std::cmp::Ordering::Greater => {}
                    }
                }
            }
        }
        Some(stab)
    }

    /// Applies one element of `Aut(H(2,n))` to a block.
    #[cfg(test)]
    fn act(&self, a: &[u8], c: &[u8], transpose: bool, block: u32) -> u32 {
        let n = self.n;
        let pi = &self.perms[block as usize];
        let mut ainv = vec![0u8; n];
        for (i, &x) in a.iter().enumerate() {
            ainv[x as usize] = i as u8;
        }
        let mut sigma: Vec<u8> = (0..n).map(|x| c[pi[ainv[x] as usize] as usize]).collect();
        if transpose {
            let mut inv = vec![0u8; n];
            for (i, &x) in sigma.iter().enumerate() {
                inv[x as usize] = i as u8;
            }
            sigma = inv;
        }
        self.rank[Self::code(n, &sigma)]
    }
}

/// Coverage deficits left by `p`, or `None` if some non-edge is over-covered.
fn deficits(t: &Tables, mu: u32, p: &[(u32, u32)]) -> Option<Vec<u32>> {
    let mut d = vec![mu; t.n_non_edges()];
    for &(b, m) in p {
        for &e in &t.block_ne[b as usize] {
            d[e as usize] = d[e as usize].checked_sub(m)?;
        }
    }
    Some(d)
}

/// Blocks after the last block of `p` with their largest usable
/// multiplicity. A minimal solution starts with a block of its largest
/// multiplicity, so multiplicities are capped by that of `p[0]`.
fn pool_after(t: &Tables, deficit: &[u32], p: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let start = p.last().map_or(0, |&(b, _)| b + 1);
    let most = p.first().map_or(u32::MAX, |&(_, m)| m);
    (start..t.n_blocks() as u32)
        .filter_map(|b| {
            let cap = t.block_ne[b as usize].iter().map(|&e| deficit[e as usize]).min().unwrap_or(0).min(most);
            (cap > 0).then_some((b, cap))
        })
        .collect()
}

fn pool_can_cover(t: &Tables, deficit: &[u32], pool: &[(u32, u32)]) -> bool {
    let mut supply = vec![0u32; deficit.len()];
    for &(b, cap) in pool {
        for &e in &t.block_ne[b as usize] {
            supply[e as usize] += cap;
        }
    }
    supply.iter().zip(deficit).all(|(s, d)| s >= d)
}

fn check_params(n: usize, mu: u32) -> Result<()> {
    if n < 3 || mu < 1 {
        return Err(Error::InvalidParameter(format!("classification needs n >= 3 and mu >= 1 (n={n}, mu={mu})")));
    }
    HammingGraph::new(n).map(|_| ())
}

/// Orderly generation of seeds, in depth-first order.
pub fn seed_phase(n: usize, mu: u32, policy: DepthPolicy) -> Result<Vec<SeedTask>> {
    check_params(n, mu)?;
    let t = Tables::new(n)?;
    let mut out = Vec::new();
    let mut p = Vec::new();
    grow(&t, mu, policy, &mut p, &mut out);
    Ok(out)
}

fn grow(t: &Tables, mu: u32, policy: DepthPolicy, p: &mut Vec<(u32, u32)>, out: &mut Vec<SeedTask>) {
    let start = p.last().map_or(0, |&(b, _)| b + 1);
    for b in start..t.n_blocks() as u32 {
        for m in (1..=mu).rev() {
            p.push((b, m));
            if let Some(deficit) = deficits(t, mu, p) {
                if let Some(stab) = t.min_image_stabilizer(p) {
                    let pool = pool_after(t, &deficit, p);
                    let complete = deficit.iter().all(|&d| d == 0);
                    if complete || (stab == 1 && p.len() >= policy.min_depth) {
                        if complete || pool_can_cover(t, &deficit, &pool) {
                            out.push(SeedTask {
                                index: out.len(),
                                n: t.n,
                                partial: PartialSolution { pairs: p.clone() },
                                pool: if complete { Vec::new() } else { pool },
                                stabilizer: stab,
                            });
                        }
                    } else if pool_can_cover(t, &deficit, &pool) {
                        grow(t, mu, policy, p, out);
                    }
                }
            }
            p.pop();
        }
    }
}

/// Exact-cover state for one seed.
struct Cover<'t> {
    t: &'t Tables,
    mu: u32,
    deficit: Vec<u32>,
    cap: Vec<u32>,
    alive: Vec<bool>,
    alive_count: Vec<u32>,
    chosen: Vec<(u32, u32)>,
    trail: Vec<u32>,
    solutions: Vec<PartialSolution>,
    base: Vec<(u32, u32)>,
}

impl Cover<'_> {
    fn kill(&mut self, b: u32) {
        if std::mem::replace(&mut self.alive[b as usize], false) {
            for &e in &self.t.block_ne[b as usize] {
                self.alive_count[e as usize] -= 1;
            }
            self.trail.push(b);
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let b = self.trail.pop().unwrap();
            self.alive[b as usize] = true;
            for &e in &self.t.block_ne[b as usize] {
                self.alive_count[e as usize] += 1;
            }
        }
    }

    fn search(&mut self) {
        let mut target = None;
        let mut best = u32::MAX;
        for (e, &d) in self.deficit.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let a = self.alive_count[e];
            if a * self.mu < d {
                return;
            }
            if a < best {
                best = a;
                target = Some(e);
            }
        }
        let Some(e) = target else {
            let mut pairs = [self.base.as_slice(), self.chosen.as_slice()].concat();
            pairs.sort_unstable();
            self.solutions.push(PartialSolution { pairs });
            return;
        };
        let mark = self.trail.len();
        let candidates: Vec<u32> =
            self.t.ne_blocks[e].iter().copied().filter(|&b| self.alive[b as usize]).collect();
        for b in candidates {
            let ne = &self.t.block_ne[b as usize];
            let most = ne.iter().map(|&x| self.deficit[x as usize]).min().unwrap().min(self.cap[b as usize]);
            for m in (1..=most).rev() {
                let inner = self.trail.len();
                self.kill(b);
                for &x in ne {
                    self.deficit[x as usize] -= m;
                }
                for &x in ne {
                    if self.deficit[x as usize] == 0 {
                        for &other in &self.t.ne_blocks[x as usize] {
                            self.kill(other);
                        }
                    }
                }
                self.chosen.push((b, m));
                self.search();
                self.chosen.pop();
                for &x in ne {
                    self.deficit[x as usize] += m;
                }
                self.undo_to(inner);
            }
            // later siblings never use b
            self.kill(b);
        }
        self.undo_to(mark);
    }
}

/// All completions of the seed by pool blocks that cover every non-edge
/// exactly `mu` times.
pub fn extend(task: &SeedTask, mu: u32) -> Result<Vec<PartialSolution>> {
    let t = Tables::new(task.n)?;
    extend_with(&t, task, mu)
}

fn extend_with(t: &Tables, task: &SeedTask, mu: u32) -> Result<Vec<PartialSolution>> {
    let deficit = deficits(t, mu, &task.partial.pairs)
        .ok_or_else(|| Error::InvalidParameter("seed covers a non-edge too often".into()))?;
    let mut cap = vec![0u32; t.n_blocks()];
    let mut alive = vec![false; t.n_blocks()];
    for &(b, c) in &task.pool {
        if task.partial.pairs.iter().any(|&(x, _)| x == b) {
            return Err(Error::InvalidParameter(format!("pool block {b} is already in the seed")));
        }
        cap[b as usize] = c.min(mu);
        alive[b as usize] = c > 0;
    }
    let mut alive_count = vec![0u32; t.n_non_edges()];
    for (b, _) in alive.iter().enumerate().filter(|(_, &a)| a) {
        for &e in &t.block_ne[b] {
            alive_count[e as usize] += 1;
        }
    }
    let mut cover = Cover {
        t,
        mu,
        deficit,
        cap,
        alive,
        alive_count,
        chosen: Vec::new(),
        trail: Vec::new(),
        solutions: Vec::new(),
        base: task.partial.pairs.clone(),
    };
    // blocks meeting an already saturated non-edge are unusable
    for e in 0..t.n_non_edges() {
        if cover.deficit[e] == 0 {
            for &b in &t.ne_blocks[e] {
                cover.kill(b);
            }
        }
    }
    cover.search();
    Ok(cover.solutions)
}

/// The block design on the `n^2` cells whose blocks are the solution's co-cliques.
pub fn solution_design(n: usize, sol: &PartialSolution) -> Result<BlockDesign> {
    let t = Tables::new(n)?;
    Ok(design_of(&t, sol))
}

fn design_of(t: &Tables, sol: &PartialSolution) -> BlockDesign {
    let n = t.n;
    let mut blocks = Vec::new();
    for &(b, m) in &sol.pairs {
        let blk: Vec<u32> = t.perms[b as usize].iter().enumerate().map(|(i, &j)| (i * n + j as usize) as u32 + 1).collect();
        for _ in 0..m {
            blocks.push(blk.clone());
        }
    }
    BlockDesign::new_unchecked(n * n, blocks)
}

/// The square whose dual is the solution: treatment `t` is the `t`-th block
/// copy in sorted order and lies in the cells of its co-clique.
pub fn solution_square(n: usize, sol: &PartialSolution) -> Result<SemiLatinSquare> {
    let t = Tables::new(n)?;
    Ok(square_of(&t, sol))
}

fn square_of(t: &Tables, sol: &PartialSolution) -> SemiLatinSquare {
    let n = t.n;
    let mut cells = vec![Vec::new(); n * n];
    let mut treatment = 0u32;
    for &(b, m) in &sol.pairs {
        for _ in 0..m {
            treatment += 1;
            for (i, &j) in t.perms[b as usize].iter().enumerate() {
                cells[i * n + j as usize].push(treatment);
            }
        }
    }
    let k = cells.first().map_or(0, |c| c.len());
    SemiLatinSquare::from_cells_unchecked(n, k, cells)
}

/// One isomorphism class of uniform squares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRep {
    pub square: SemiLatinSquare,
    pub solution: PartialSolution,
    pub eta: EtaVector,
    pub aut_square: u128,
    pub aut_dual: u128,
    pub transposing_automorphism: bool,
    pub certificate: Certificate,
}

/// Work done by one seed: its solution count and the least solution per certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: usize,
    pub solutions: u64,
    pub classes: Vec<(Certificate, PartialSolution)>,
}

#[derive(Debug, Clone, Default)]
pub struct ClassifyOptions {
    pub policy: DepthPolicy,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Directory for checkpoint, index and square files.
    pub out_dir: Option<PathBuf>,
    /// Only these seeds are processed in this run.
    pub seed_range: Option<Range<usize>>,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub n: usize,
    pub mu: u32,
    pub seed_count: usize,
    pub seeds_done: usize,
    pub solution_count: u64,
    /// Empty unless every seed is done.
    pub classes: Vec<ClassRep>,
}

impl Classification {
    pub fn complete(&self) -> bool {
        self.seeds_done == self.seed_count
    }
}

fn run_seed(t: &Tables, task: &SeedTask, mu: u32) -> Result<SeedResult> {
    let sols = extend_with(t, task, mu)?;
    let mut best: BTreeMap<Certificate, PartialSolution> = BTreeMap::new();
    for sol in sols.iter().filter(|s| t.min_image_stabilizer(&s.pairs).is_some()) {
        let cert = design_certificate(&design_of(t, sol))?;
        match best.get_mut(&cert) {
            Some(cur) if *cur <= *sol => {}
            Some(cur) => *cur = sol.clone(),
            None => {
                best.insert(cert, sol.clone());
            }
        }
    }
    Ok(SeedResult { seed: task.index, solutions: sols.len() as u64, classes: best.into_iter().collect() })
}

#[cfg(feature = "parallel")]
fn map_tasks<F>(tasks: &[SeedTask], workers: Option<usize>, f: F) -> Result<Vec<SeedResult>>
where
    F: Fn(&SeedTask) -> Result<SeedResult> + Sync + Send,
{
    use rayon::prelude::*;
    let go = || tasks.par_iter().map(&f).collect::<Result<Vec<_>>>();
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
            .install(go),
        None => go(),
    }
}

#[cfg(not(feature = "parallel"))]
fn map_tasks<F>(tasks: &[SeedTask], _workers: Option<usize>, f: F) -> Result<Vec<SeedResult>>
where
    F: Fn(&SeedTask) -> Result<SeedResult>,
{
    tasks.iter().map(f).collect()
}

/// Merges seed results into sorted class representatives.
fn merge(t: &Tables, mu: u32, results: &[SeedResult]) -> Result<Vec<ClassRep>> {
    let mut best: BTreeMap<&Certificate, &PartialSolution> = BTreeMap::new();
    for r in results {
        for (cert, sol) in &r.classes {
            let e = best.entry(cert).or_insert(sol);
            if sol < *e {
                *e = sol;
            }
        }
    }
    let mut reps = best
        .into_iter()
        .map(|(cert, sol)| {
            let square = square_of(t, sol);
            debug_assert_eq!(square.uniform_mu().ok(), Some(mu as usize));
            Ok(ClassRep {
                eta: square.underlying_design().eta()?,
                aut_square: sls_certificate(&square)?.aut_order(),
                aut_dual: cert.aut_order(),
                transposing_automorphism: has_transposing_automorphism(&square)?,
                certificate: cert.clone(),
                solution: sol.clone(),
                square,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    reps.sort_by(|a, b| a.eta.0.cmp(&b.eta.0).then_with(|| a.certificate.cmp(&b.certificate)));
    Ok(reps)
}

/// Classifies uniform `(n x n)/(mu(n-1))` squares up to isomorphism.
pub fn classify_uniform(n: usize, mu: u32) -> Result<Vec<ClassRep>> {
    Ok(classify(n, mu, &ClassifyOptions::default())?.classes)
}

/// As [`classify_uniform`], with worker, checkpoint and sharding control.
pub fn classify(n: usize, mu: u32, opts: &ClassifyOptions) -> Result<Classification> {
    check_params(n, mu)?;
    let start = std::time::Instant::now();
    let t = Tables::new(n)?;
    let seeds = seed_phase(n, mu, opts.policy)?;
    let range = opts.seed_range.clone().unwrap_or(0..seeds.len());
    if range.start > range.end || range.end > seeds.len() {
        return Err(Error::InvalidParameter(format!(
            "seed range {}..{} outside 0..{}",
            range.start,
            range.end,
            seeds.len()
        )));
    }
    let store = match &opts.out_dir {
        Some(dir) => Some(output::RunDir::open(dir, n, mu, opts.policy, seeds.len())?),
        None => None,
    };
    let mut results: Vec<SeedResult> = store.as_ref().map(|s| s.completed().to_vec()).unwrap_or_default();
    let done: std::collections::BTreeSet<usize> = results.iter().map(|r| r.seed).collect();
    let todo: Vec<SeedTask> = seeds[range].iter().filter(|s| !done.contains(&s.index)).cloned().collect();
    let writer = match &store {
        Some(s) => Some(std::sync::Mutex::new(s.checkpoint_writer()?)),
        None => None,
    };
    let fresh = map_tasks(&todo, opts.workers, |task| {
        let r = run_seed(&t, task, mu)?;
        if let Some(w) = &writer {
            output::append_checkpoint(&mut *w.lock().expect("checkpoint lock"), &r)?;
        }
        Ok(r)
    })?;
    drop(writer);
    results.extend(fresh);
    results.sort_by_key(|r| r.seed);
    let seeds_done = results.len();
    let solution_count = results.iter().map(|r| r.solutions).sum();
    let classes = if seeds_done == seeds.len() { merge(&t, mu, &results)? } else { Vec::new() };
    let out = Classification { n, mu, seed_count: seeds.len(), seeds_done, solution_count, classes };
    if let Some(store) = &store {
        store.finish(&out, opts.policy, start.elapsed().as_secs_f64())?;
    }
    Ok(out)
}
