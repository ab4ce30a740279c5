//! Semi-Latin squares and the square-level constructions.
//!
//! An `(n x n)/k` semi-Latin square has `n^2` cells, each holding `k`
//! treatments from `1..=n*k`, such that every treatment occurs exactly once
//! in each row and exactly once in each column. Cells are stored row-major
//! and each cell is kept sorted ascending.

use serde::{Deserialize, Serialize};

use crate::algebra::{are_orthogonal, LatinSquare};
use crate::design::BlockDesign;
use crate::error::{Error, Line, Result, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSquare", into = "RawSquare")]
pub struct SemiLatinSquare {
    n: usize,
    k: usize,
    cells: Vec<Vec<u32>>,
}

/// On-disk form: `{"n": .., "k": .., "cells": [[[..] x n] x n]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawSquare {
    pub n: usize,
    pub k: usize,
    pub cells: Vec<Vec<Vec<u32>>>,
}

impl TryFrom<RawSquare> for SemiLatinSquare {
    type Error = Error;

    fn try_from(raw: RawSquare) -> Result<Self> {
        SemiLatinSquare::validate(raw.n, raw.k, raw.cells)
    }
}

impl From<SemiLatinSquare> for RawSquare {
    fn from(s: SemiLatinSquare) -> Self {
        RawSquare { n: s.n, k: s.k, cells: s.rows().map(|r| r.to_vec()).collect() }
    }
}

/// Result of testing a square for uniformity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub uniform: bool,
    pub mu: Option<usize>,
    /// Two cells in distinct rows and columns (0-based `(row, col)`) and
    /// their intersection size, when the square is not uniform.
    pub witness: Option<((usize, usize), (usize, usize), usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Columns,
}

impl SemiLatinSquare {
    /// Checks the semi-Latin property, reporting every violation found.
    ///
    /// `cells` is indexed `[row][column]`; cell contents may be given in any order.
    pub fn validate(n: usize, k: usize, cells: Vec<Vec<Vec<u32>>>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidParameter(format!("n and k must be positive (n={n}, k={k})")));
        }
        if cells.len() != n || cells.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter(format!("cell array is not {n}x{n}")));
        }
        let v = (n * k) as u32;
        let mut violations = Vec::new();
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in cells.into_iter().enumerate() {
            for (j, mut cell) in row.into_iter().enumerate() {
                if cell.len() != k {
                    violations.push(Violation::CellSize { row: i, col: j, found: cell.len(), expected: k });
                }
                cell.sort_unstable();
                for w in cell.windows(2) {
                    if w[0] == w[1] {
                        violations.push(Violation::RepeatedInCell { row: i, col: j, treatment: w[0] });
                    }
                }
                for &t in &cell {
                    if t == 0 || t > v {
                        violations.push(Violation::OutOfRange { row: i, col: j, treatment: t });
                    }
                }
                flat.push(cell);
            }
        }
        for line in (0..n).map(Line::Row).chain((0..n).map(Line::Column)) {
            let mut count = vec![0u32; v as usize + 1];
            for c in 0..n {
                let idx = match line {
                    Line::Row(i) => i * n + c,
                    Line::Column(j) => c * n + j,
                };
                for &t in &flat[idx] {
                    if t >= 1 && t <= v {
                        count[t as usize] += 1;
                    }
                }
            }
            for t in 1..=v {
                match count[t as usize] {
                    1 => {}
                    0 => violations.push(Violation::Missing { line, treatment: t }),
                    _ => violations.push(Violation::Repeated { line, treatment: t }),
                }
            }
        }
        if violations.is_empty() {
            Ok(SemiLatinSquare { n, k, cells: flat })
        } else {
            Err(Error::NotSemiLatin(violations))
        }
    }

    /// Builds without checking; callers guarantee the invariants.
    pub(crate) fn from_cells_unchecked(n: usize, k: usize, mut cells: Vec<Vec<u32>>) -> Self {
        for c in cells.iter_mut() {
            c.sort_unstable();
        }
        debug_assert!(Self::validate(n, k, cells.chunks(n).map(|r| r.to_vec()).collect()).is_ok());
        SemiLatinSquare { n, k, cells }
    }

    /// Views a Latin square as an `(n x n)/1` square with treatments `1..=n`.
    pub fn from_latin(l: &LatinSquare) -> Self {
        let n = l.order();
        let cells = (0..n * n).map(|c| vec![l.get(c / n, c % n) as u32 + 1]).collect();
        SemiLatinSquare { n, k: 1, cells }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of treatments, `n * k`.
    pub fn v(&self) -> usize {
        self.n * self.k
    }

    pub fn cell(&self, i: usize, j: usize) -> &[u32] {
        &self.cells[i * self.n + j]
    }

    /// All cells, row-major.
    pub fn cells(&self) -> &[Vec<u32>] {
        &self.cells
    }

    pub fn rows(&self) -> std::slice::Chunks<'_, Vec<u32>> {
        self.cells.chunks(self.n)
    }

    /// Cell contents as bitsets over treatments `1..=v` (bit `t-1`).
    pub(crate) fn cell_bits(&self) -> Vec<Vec<u64>> {
        let words = self.v().div_ceil(64);
        self.cells
            .iter()
            .map(|c| {
                let mut b = vec![0u64; words];
                for &t in c {
                    let t = t as usize - 1;
                    b[t / 64] |= 1 << (t % 64);
                }
                b
            })
            .collect()
    }

    pub fn uniformity(&self) -> Result<UniformityReport> {
        let n = self.n;
        if n <= 2 {
            return Err(Error::InvalidParameter(format!("uniformity needs n > 2, got n={n}")));
        }
        let bits = self.cell_bits();
        let meet = |a: usize, b: usize| -> usize {
            bits[a].iter().zip(&bits[b]).map(|(x, y)| (x & y).count_ones() as usize).sum()
        };
        let reference = meet(0, n + 1);
        for a in 0..n * n {
            let (i, j) = (a / n, a % n);
            for b in a + 1..n * n {
                let (i2, j2) = (b / n, b % n);
                if i2 == i || j2 == j {
                    continue;
                }
                let m = meet(a, b);
                if m != reference || m == 0 {
                    return Ok(UniformityReport {
                        uniform: false,
                        mu: None,
                        witness: Some(((i, j), (i2, j2), m)),
                    });
                }
            }
        }
        debug_assert_eq!(self.k, reference * (n - 1));
        Ok(UniformityReport { uniform: true, mu: Some(reference), witness: None })
    }

    /// `mu` if the square is uniform, otherwise `Error::NotUniform`.
    pub fn uniform_mu(&self) -> Result<usize> {
        self.uniformity()?.mu.ok_or(Error::NotUniform)
    }

    /// `s`-fold inflation: treatment `a` becomes `s(a-1)+1 ..= s*a`.
    pub fn inflate(&self, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParameter("inflation factor must be at least 1".into()));
        }
        let s32 = s as u32;
        let cells = self
            .cells
            .iter()
            .map(|c| c.iter().flat_map(|&a| (s32 * (a - 1) + 1)..=(s32 * a)).collect())
            .collect();
        Ok(SemiLatinSquare { n: self.n, k: self.k * s, cells })
    }

    /// Superimposes `parts`, offsetting each part's treatments past those of
    /// the parts before it.
    pub fn superpose(parts: &[SemiLatinSquare]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("nothing to superpose".into()))?;
        let n = first.n;
        if let Some(p) = parts.iter().find(|p| p.n != n) {
            return Err(Error::OrderMismatch(n, p.n));
        }
        let mut cells = vec![Vec::new(); n * n];
        let mut offset = 0u32;
        for p in parts {
            for (dst, src) in cells.iter_mut().zip(&p.cells) {
                dst.extend(src.iter().map(|&t| t + offset));
            }
            offset += p.v() as u32;
        }
        let k = parts.iter().map(|p| p.k).sum();
        Ok(SemiLatinSquare { n, k, cells })
    }

    /// Superposition of Latin squares after the disjoint-offset relabeling.
    pub fn superpose_latin(squares: &[LatinSquare]) -> Result<Self> {
        let parts: Vec<_> = squares.iter().map(Self::from_latin).collect();
        Self::superpose(&parts)
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let cells = (0..n * n).map(|c| self.cells[(c % n) * n + c / n].clone()).collect();
        SemiLatinSquare { n, k: self.k, cells }
    }

    /// Applies row and column permutations (`new[rp[i]][cp[j]] = old[i][j]`)
    /// and a treatment renaming (`t -> tp[t-1]`).
    pub fn permute(&self, rp: &[usize], cp: &[usize], tp: &[u32]) -> Self {
        let n = self.n;
        let mut cells = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in 0..n {
                cells[rp[i] * n + cp[j]] = self.cell(i, j).iter().map(|&t| tp[t as usize - 1]).collect();
            }
        }
        Self::from_cells_unchecked(n, self.k, cells)
    }

    /// The `(nk, n^2, n, k)` design whose blocks are the cells.
    pub fn underlying_design(&self) -> BlockDesign {
        BlockDesign::new_unchecked(self.v(), self.cells.clone())
    }

    /// The `(n^2, nk, k, n)` design on cells: cell `(i, j)` is treatment
    /// `i*n + j + 1` and each treatment of the square gives the block of
    /// cells containing it.
    pub fn dual(&self) -> BlockDesign {
        let mut blocks = vec![Vec::with_capacity(self.n); self.v()];
        for (c, cell) in self.cells.iter().enumerate() {
            for &t in cell {
                blocks[t as usize - 1].push(c as u32 + 1);
            }
        }
        BlockDesign::new_unchecked(self.n * self.n, blocks)
    }

    /// Builds an `((n+1) x (n+1))/(n(n-2))` uniform square with `mu = n - 2`
    /// from `n - 1` mutually orthogonal Latin squares of order `n`.
    ///
    /// Treatments: for square `i < n-2`, symbol `a` and column tag `j` map to
    /// `(i*n + a)*n + j + 1`; for the last square, symbol `g` and copy `t`
    /// map to `(n-2)*n^2 + g*(n-2) + t + 1` (all indices 0-based).
    pub fn bar_s(mols: &[LatinSquare]) -> Result<Self> {
        let n = mols.first().map(|l| l.order()).unwrap_or(0);
        if n < 3 {
            return Err(Error::InvalidParameter(format!("bar_s needs order n >= 3, got {n}")));
        }
        if mols.len() != n - 1 {
            return Err(Error::InvalidParameter(format!(
                "bar_s needs exactly {} squares of order {n}, got {}",
                n - 1,
                mols.len()
            )));
        }
        for (a, l) in mols.iter().enumerate() {
            if l.order() != n {
                return Err(Error::OrderMismatch(n, l.order()));
            }
            for (b, m) in mols.iter().enumerate().skip(a + 1) {
                if !are_orthogonal(l, m)? {
                    return Err(Error::NotOrthogonal(a + 1, b + 1));
                }
            }
        }
        let t_count = n - 2;
        let sym = |i: usize, a: usize, j: usize| ((i * n + a) * n + j + 1) as u32;
        let last = |g: usize, t: usize| (t_count * n * n + g * t_count + t + 1) as u32;
        let big = n + 1;
        let mut cells = vec![Vec::new(); big * big];
        for r in 0..n {
            for c in 0..n {
                let cell = &mut cells[r * big + c];
                for (i, l) in mols[..t_count].iter().enumerate() {
                    let a = l.get(r, c);
                    for j in 0..n {
                        // (a, c) of square i moves to the new row and column
                        if j != c {
                            cell.push(sym(i, a, j));
                        }
                    }
                }
                let g = mols[t_count].get(r, c);
                cell.extend((0..t_count).map(|t| last(g, t)));
                for (i, l) in mols[..t_count].iter().enumerate() {
                    let moved = sym(i, l.get(r, c), c);
                    cells[r * big + n].push(moved);
                    cells[n * big + c].push(moved);
                }
            }
        }
        cells[n * big + n] = (0..n).flat_map(|g| (0..t_count).map(move |t| last(g, t))).collect();
        Ok(Self::from_cells_unchecked(big, n * t_count, cells))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::bose_mols;
    use crate::fixtures;

    fn latin3() -> SemiLatinSquare {
        SemiLatinSquare::from_latin(&bose_mols(3).unwrap()[0])
    }

    #[test]
    fn square_3x3_is_valid_and_uniform() {
        let s = fixtures::square_3x3();
        assert_eq!((s.n(), s.k()), (3, 4));
        let u = s.uniformity().unwrap();
        assert!(u.uniform);
        assert_eq!(u.mu, Some(2));
    }

    #[test]
    fn square_6x6_is_uniform() {
        let m = fixtures::square_6x6();
        assert_eq!((m.n(), m.k()), (6, 10));
        assert_eq!(m.uniformity().unwrap().mu, Some(2));
    }

    #[test]
    fn latin_square_is_valid_not_uniform() {
        let s = latin3();
        assert_eq!(s.k(), 1);
        let u = s.uniformity().unwrap();
        assert!(!u.uniform);
        assert!(u.mu.is_none());
        let (_, _, m) = u.witness.unwrap();
        assert!(m <= 1);
    }

    #[test]
    fn row_violation_reported() {
        let raw: RawSquare = fixtures::square_3x3().into();
        let mut cells = raw.cells;
        cells[0][0] = vec![1, 4, 7, 11];
        let err = SemiLatinSquare::validate(3, 4, cells).unwrap_err();
        let Error::NotSemiLatin(v) = err else { panic!("wrong error") };
        assert!(v.contains(&Violation::Missing { line: Line::Row(0), treatment: 10 }));
        assert!(v.contains(&Violation::Repeated { line: Line::Row(0), treatment: 11 }));
    }

    #[test]
    fn bad_cells_reported() {
        let cells = vec![vec![vec![1, 2], vec![3]], vec![vec![3, 9], vec![1, 2]]];
        let Err(Error::NotSemiLatin(v)) = SemiLatinSquare::validate(2, 2, cells) else { panic!() };
        assert!(v.iter().any(|x| matches!(x, Violation::CellSize { row: 0, col: 1, .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::OutOfRange { treatment: 9, .. })));
    }

    #[test]
    fn uniformity_needs_n_above_two() {
        let s = SemiLatinSquare::validate(2, 1, vec![vec![vec![1], vec![2]], vec![vec![2], vec![1]]]).unwrap();
        assert!(s.uniformity().is_err());
    }

    #[test]
    fn identity_inflation() {
        let s = fixtures::square_3x3();
        assert_eq!(s.inflate(1).unwrap(), s);
        assert!(s.inflate(0).is_err());
    }

    #[test]
    fn inflated_latin_square_not_uniform() {
        let s = latin3().inflate(2).unwrap();
        assert_eq!(s.k(), 2);
        let u = s.uniformity().unwrap();
        assert!(!u.uniform);
        assert!(matches!(u.witness, Some((_, _, 0)) | Some((_, _, 2))));
    }

    #[test]
    fn inflation_scales_mu() {
        let t = SemiLatinSquare::superpose_latin(&bose_mols(4).unwrap()).unwrap();
        assert_eq!(t.uniform_mu().unwrap(), 1);
        for s in 2..4 {
            assert_eq!(t.inflate(s).unwrap().uniform_mu().unwrap(), s);
        }
    }

    #[test]
    fn superposed_mols_are_uniform() {
        let t3 = SemiLatinSquare::superpose_latin(&bose_mols(3).unwrap()).unwrap();
        assert_eq!((t3.n(), t3.k()), (3, 2));
        assert_eq!(t3.uniform_mu().unwrap(), 1);
        let t5 = SemiLatinSquare::superpose_latin(&bose_mols(5).unwrap()).unwrap();
        assert_eq!((t5.n(), t5.k()), (5, 4));
        assert_eq!(t5.uniform_mu().unwrap(), 1);
    }

    #[test]
    fn superposing_a_square_with_itself_is_not_uniform() {
        let l = latin3();
        let s = SemiLatinSquare::superpose(&[l.clone(), l]).unwrap();
        let u = s.uniformity().unwrap();
        assert!(!u.uniform);
    }

    #[test]
    fn superpose_rejects_mismatch() {
        let a = latin3();
        let b = SemiLatinSquare::from_latin(&bose_mols(4).unwrap()[0]);
        assert!(matches!(SemiLatinSquare::superpose(&[a, b]), Err(Error::OrderMismatch(3, 4))));
        assert!(SemiLatinSquare::superpose(&[]).is_err());
    }

    #[test]
    fn transpose_is_involution_and_keeps_uniformity() {
        let s = fixtures::square_3x3();
        let t = s.transpose();
        assert_eq!(t.transpose(), s);
        assert_eq!(t.uniform_mu().unwrap(), 2);
    }

    #[test]
    fn design_parameters() {
        let s = fixtures::square_3x3();
        let d = s.underlying_design();
        assert_eq!(d.params(), Some((12, 9, 3, 4)));
        assert_eq!(s.dual().params(), Some((9, 12, 4, 3)));
        let m = fixtures::square_6x6();
        assert_eq!(m.underlying_design().params(), Some((60, 36, 6, 10)));
        assert_eq!(m.dual().params(), Some((36, 60, 10, 6)));
        assert_eq!(latin3().underlying_design().params(), Some((3, 9, 3, 1)));
    }

    #[test]
    fn dual_of_latin_square_is_symbol_positions() {
        let l = bose_mols(3).unwrap().remove(0);
        let d = SemiLatinSquare::from_latin(&l).dual();
        assert_eq!(d.b(), 3);
        for blk in d.blocks() {
            assert_eq!(blk.len(), 3);
            let sym: Vec<usize> = blk.iter().map(|&c| l.get((c as usize - 1) / 3, (c as usize - 1) % 3)).collect();
            assert!(sym.iter().all(|&x| x == sym[0]));
        }
    }

    #[test]
    fn bar_s_is_uniform_for_several_orders() {
        for q in [3u64, 4, 5, 7, 8] {
            let s = SemiLatinSquare::bar_s(&bose_mols(q).unwrap()).unwrap();
            let n = q as usize;
            assert_eq!((s.n(), s.k()), (n + 1, n * (n - 2)));
            assert_eq!(s.uniform_mu().unwrap(), n - 2, "n={n}");
        }
    }

    #[test]
    fn bar_s_rejects_bad_input() {
        let mut m = bose_mols(5).unwrap();
        assert!(SemiLatinSquare::bar_s(&m[..3]).is_err());
        m[1] = m[0].clone();
        assert!(matches!(SemiLatinSquare::bar_s(&m), Err(Error::NotOrthogonal(1, 2))));
        assert!(SemiLatinSquare::bar_s(&[]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let m = fixtures::square_6x6();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<SemiLatinSquare>(&s).unwrap(), m);
    }
}
