use serde::{Deserialize, Serialize};

use super::BlockDesign;
use crate::error::{Error, Result};

/// Eigenvalues closer than this are reported as one value with multiplicity.
pub const CLUSTER_TOL: f64 = 1e-7;
const SYMMETRY_TOL: f64 = 1e-12;
const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Clustered eigenvalues, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<(f64, usize)>,
    /// Whether the structural zero of the all-one eigenvector is included.
    pub includes_trivial: bool,
}

impl Spectrum {
    pub fn from_values(mut vals: Vec<f64>, includes_trivial: bool) -> Self {
        vals.sort_by(f64::total_cmp);
        let mut values: Vec<(f64, usize)> = Vec::new();
        let mut anchor = f64::NAN;
        for x in vals {
            match values.last_mut() {
                Some((sum, m)) if (x - anchor).abs() <= CLUSTER_TOL => {
                    *sum += x;
                    *m += 1;
                }
                _ => {
                    anchor = x;
                    values.push((x, 1));
                }
            }
        }
        for (sum, m) in values.iter_mut() {
            *sum /= *m as f64;
        }
        Spectrum { values, includes_trivial }
    }

    /// All eigenvalues, repeated by multiplicity, ascending.
    pub fn expanded(&self) -> Vec<f64> {
        self.values.iter().flat_map(|&(x, m)| std::iter::repeat_n(x, m)).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.values.iter().map(|&(_, m)| m).sum()
    }

    /// True if the clustered values match `expected` (value, multiplicity) pairs within `tol`.
    pub fn matches(&self, expected: &[(f64, usize)], tol: f64) -> bool {
        self.values.len() == expected.len()
            && self.values.iter().zip(expected).all(|(&(x, m), &(y, n))| m == n && (x - y).abs() <= tol)
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn sym_eig(mat: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = mat.len();
    if let Some(r) = mat.iter().find(|r| r.len() != n) {
        return Err(Error::LengthMismatch(n, r.len()));
    }
    for i in 0..n {
        for j in i + 1..n {
            if (mat[i][j] - mat[j][i]).abs() > SYMMETRY_TOL {
                return Err(Error::Asymmetric(i, j));
            }
        }
    }
    let mut a: Vec<f64> = mat.iter().flatten().copied().collect();
    let idx = |i: usize, j: usize| i * n + j;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| a[idx(i, j)].powi(2)).sum();
        if off.sqrt() < JACOBI_TOL {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[idx(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// The scaled information matrix `I - Lambda/(rk)`.
pub(crate) fn scaled_information(d: &BlockDesign) -> Result<Vec<Vec<f64>>> {
    let (v, _, r, k) = d.params().ok_or(Error::IrregularDesign)?;
    let lam = d.concurrence_matrix();
    let rk = (r * k) as f64;
    Ok((0..v)
        .map(|a| (0..v).map(|b| if a == b { 1.0 } else { 0.0 } - lam.get(a, b) as f64 / rk).collect())
        .collect())
}

/// Canonical efficiency factors: the spectrum of `F` with the structural
/// zero removed, clamped to `[0, 1]`.
pub fn canonical_efficiency_factors(d: &BlockDesign) -> Result<Spectrum> {
    let mut eig = sym_eig(&scaled_information(d)?)?;
    let zero = eig
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .expect("v >= 1");
    eig.remove(zero);
    for x in eig.iter_mut() {
        *x = x.clamp(0.0, 1.0);
    }
    Ok(Spectrum::from_values(eig, false))
}

/// True iff every ascending prefix sum of `a` is at least that of `b`.
pub fn schur_dominates(a: &Spectrum, b: &Spectrum) -> Result<bool> {
    let (x, y) = (a.expanded(), b.expanded());
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let (mut sx, mut sy) = (0.0, 0.0);
    for (p, q) in x.iter().zip(&y) {
        sx += p;
        sy += q;
        if sx < sy - CLUSTER_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}
