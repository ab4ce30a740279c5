use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::Value;
use uslsq::algebra::LatinSquare;
use uslsq::design::{BlockDesign, OrthogonalArray};
use uslsq::sls::{RawSquare, SemiLatinSquare};

/// A parsed input file, classified by its JSON keys.
pub enum Input {
    Square(RawSquare),
    Latin(LatinSquare),
    Design(BlockDesign),
    LatinList(Vec<LatinSquare>),
}

pub fn read(path: &Path) -> Result<Input> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))?;
    let parsed = match &value {
        Value::Array(_) => Input::LatinList(serde_json::from_value(value)?),
        Value::Object(m) if m.contains_key("cells") => Input::Square(serde_json::from_value(value)?),
        Value::Object(m) if m.contains_key("grid") => Input::Latin(serde_json::from_value(value)?),
        Value::Object(m) if m.contains_key("blocks") => Input::Design(serde_json::from_value(value)?),
        _ => bail!("{}: expected a square (cells), Latin square (grid) or design (blocks)", path.display()),
    };
    Ok(parsed)
}

pub fn square(path: &Path) -> Result<SemiLatinSquare> {
    match read(path)? {
        Input::Square(raw) => Ok(SemiLatinSquare::validate(raw.n, raw.k, raw.cells)?),
        Input::Latin(l) => Ok(SemiLatinSquare::from_latin(&l)),
        _ => bail!("{}: expected a semi-Latin square", path.display()),
    }
}

/// A design, or the underlying design of a square.
pub fn design(path: &Path) -> Result<BlockDesign> {
    match read(path)? {
        Input::Design(d) => Ok(d),
        Input::Square(raw) => Ok(SemiLatinSquare::validate(raw.n, raw.k, raw.cells)?.underlying_design()),
        Input::Latin(l) => Ok(SemiLatinSquare::from_latin(&l).underlying_design()),
        Input::LatinList(_) => bail!("{}: expected a design or a square", path.display()),
    }
}

pub fn orthogonal_array(path: &Path) -> Result<OrthogonalArray> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(text.parse()?)
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string(value)? + "\n";
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
