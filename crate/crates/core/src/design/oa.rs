use std::fmt;
use std::str::FromStr;

use super::{is_affine_resolvable, BlockDesign, Resolution};
use crate::error::{Error, Result};

/// An `N x r` array over symbols `1..=s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalArray {
    pub s: usize,
    pub rows: Vec<Vec<u32>>,
}

impl OrthogonalArray {
    pub fn new(s: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        let r = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != r) {
            return Err(Error::InvalidParameter("ragged array".into()));
        }
        if let Some(x) = rows.iter().flatten().find(|&&x| x == 0 || x as usize > s) {
            return Err(Error::InvalidParameter(format!("symbol {x} outside 1..={s}")));
        }
        Ok(OrthogonalArray { s, rows })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.rows.first().map_or(0, |x| x.len())
    }

    /// True iff every selection of the given columns shows each tuple equally often.
    pub fn balanced_on(&self, cols: &[usize]) -> bool {
        let cells = self.s.pow(cols.len() as u32);
        if self.n_rows() % cells != 0 {
            return false;
        }
        let mut count = vec![0usize; cells];
        for row in &self.rows {
            let key = cols.iter().fold(0, |acc, &c| acc * self.s + row[c] as usize - 1);
            count[key] += 1;
        }
        let want = self.n_rows() / cells;
        count.iter().all(|&c| c == want)
    }
}

impl fmt::Display for OrthogonalArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.n_rows(), self.n_cols(), self.s)?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for OrthogonalArray {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let bad = |m: &str| Error::InvalidParameter(format!("OA text: {m}"));
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("empty input"))?
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| bad("header is not \"N r s\"")))
            .collect::<Result<_>>()?;
        let [n, r, s] = header[..] else { return Err(bad("header is not \"N r s\"")) };
        let rows: Vec<Vec<u32>> = lines
            .map(|l| l.split_whitespace().map(|x| x.parse().map_err(|_| bad("non-integer entry"))).collect())
            .collect::<Result<_>>()?;
        if rows.len() != n || rows.iter().any(|x| x.len() != r) {
            return Err(bad("row count or width disagrees with header"));
        }
        OrthogonalArray::new(s, rows)
    }
}

/// Rows are treatments, columns are parallel classes; the entry is the
/// 1-based position of the treatment's block within its class. Classes and
/// the blocks inside them are ordered lexicographically by content.
pub fn to_orthogonal_array(d: &BlockDesign, res: &Resolution) -> Result<OrthogonalArray> {
    if is_affine_resolvable(d, res)?.is_none() {
        return Err(Error::NotAffineResolvable);
    }
    let mut classes: Vec<Vec<&Vec<u32>>> =
        res.classes.iter().map(|c| c.iter().map(|&b| &d.blocks()[b]).collect()).collect();
    for c in classes.iter_mut() {
        c.sort();
    }
    classes.sort();
    let s = classes[0].len();
    let mut rows = vec![vec![0u32; classes.len()]; d.v()];
    for (col, class) in classes.iter().enumerate() {
        for (pos, blk) in class.iter().enumerate() {
            for &t in blk.iter() {
                rows[t as usize - 1][col] = pos as u32 + 1;
            }
        }
    }
    OrthogonalArray::new(s, rows)
}

/// Largest `t` such that every `t` columns are balanced; 0 if not even the
/// single columns are.
pub fn oa_strength(a: &OrthogonalArray) -> Result<usize> {
    if a.s == 0 || a.n_rows() % a.s != 0 {
        return Err(Error::InvalidParameter(format!("N={} is not divisible by s={}", a.n_rows(), a.s)));
    }
    let r = a.n_cols();
    let mut strength = 0;
    for t in 1..=r {
        let mut cols: Vec<usize> = (0..t).collect();
        loop {
            if !a.balanced_on(&cols) {
                return Ok(strength);
            }
            // next t-subset in lexicographic order
            let Some(i) = (0..t).rev().find(|&i| cols[i] != i + r - t) else { break };
            cols[i] += 1;
            for j in i + 1..t {
                cols[j] = cols[j - 1] + 1;
            }
        }
        strength = t;
    }
    Ok(strength)
}
