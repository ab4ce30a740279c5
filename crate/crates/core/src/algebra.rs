//! Finite fields GF(q) and the Bose construction of complete MOLS sets.
//!
//! Elements of GF(p^m) are encoded as integers `0..q` whose base-`p` digits
//! are the polynomial coefficients (constant term in the least significant
//! digit). Multiplication reduces modulo the least monic irreducible
//! polynomial of degree `m`, where polynomials are ordered by the integer
//! encoding of their non-leading coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_FIELD_ORDER: u64 = 4096;

/// Table-driven arithmetic in GF(q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    q: usize,
    p: usize,
    m: u32,
    /// Non-leading coefficients of the modulus, constant term first.
    modulus: Vec<usize>,
    add: Vec<u16>,
    mul: Vec<u16>,
}

/// Splits `q` into `(p, m)` with `q = p^m`, `p` prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        // q itself is prime
        return Some((q, 1));
    }
    let mut rest = q;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

fn digits(mut x: usize, p: usize, m: usize) -> Vec<usize> {
    let mut d = vec![0; m];
    for slot in d.iter_mut() {
        *slot = x % p;
        x /= p;
    }
    d
}

fn undigits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo the monic polynomial `x^deg + low` over GF(p).
fn poly_rem(a: &[usize], low: &[usize], p: usize) -> Vec<usize> {
    let deg = low.len();
    let mut r = a.to_vec();
    while r.len() > deg {
        let lead = r.pop().unwrap();
        if lead == 0 {
            continue;
        }
        let shift = r.len() - deg;
        for (i, &c) in low.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - c) * lead) % p;
        }
    }
    r.resize(deg, 0);
    r
}

fn poly_mul(a: &[usize], b: &[usize], p: usize) -> Vec<usize> {
    let mut out = vec![0; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

fn is_irreducible(low: &[usize], p: usize) -> bool {
    let m = low.len();
    // x^m + low has a factor of degree d <= m/2 iff it is reducible.
    for d in 1..=m / 2 {
        for code in 0..p.pow(d as u32) {
            let divisor = digits(code, p, d);
            let mut f = low.to_vec();
            f.push(1);
            if poly_rem(&f, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    /// Builds GF(q) for a prime power `q`.
    pub fn new(q: u64) -> Result<Self> {
        let (p, m) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > MAX_FIELD_ORDER {
            return Err(Error::FieldTooLarge(q));
        }
        let (q, p) = (q as usize, p as usize);
        let md = m as usize;
        let modulus = if m == 1 {
            vec![0]
        } else {
            (0..p.pow(m))
                .map(|code| digits(code, p, md))
                .find(|low| is_irreducible(low, p))
                .expect("an irreducible polynomial of every degree exists")
        };
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q {
            let da = digits(a, p, md);
            for b in 0..q {
                let db = digits(b, p, md);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&sum, p) as u16;
                let prod = if m == 1 {
                    vec![(a * b) % p]
                } else {
                    poly_rem(&poly_mul(&da, &db, p), &modulus, p)
                };
                mul[a * q + b] = undigits(&prod, p) as u16;
            }
        }
        Ok(FiniteField { q, p, m, modulus, add, mul })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Coefficients of the reducing polynomial, constant term first, leading 1 included.
    pub fn modulus(&self) -> Vec<usize> {
        if self.m == 1 {
            return vec![0, 1];
        }
        let mut v = self.modulus.clone();
        v.push(1);
        v
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b] as usize
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b] as usize
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.q).find(|&b| self.add(a, b) == 0).unwrap()
    }

    pub fn inv(&self, a: usize) -> Option<usize> {
        (1..self.q).find(|&b| self.mul(a, b) == 1)
    }

    pub fn add_table(&self) -> Vec<Vec<usize>> {
        self.table(&self.add)
    }

    pub fn mul_table(&self) -> Vec<Vec<usize>> {
        self.table(&self.mul)
    }

    fn table(&self, t: &[u16]) -> Vec<Vec<usize>> {
        t.chunks(self.q).map(|r| r.iter().map(|&x| x as usize).collect()).collect()
    }
}

/// A Latin square over symbols `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLatin", into = "RawLatin")]
pub struct LatinSquare {
    n: usize,
    grid: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawLatin {
    n: usize,
    grid: Vec<Vec<usize>>,
}

impl TryFrom<RawLatin> for LatinSquare {
    type Error = Error;

    fn try_from(raw: RawLatin) -> Result<Self> {
        LatinSquare::new(raw.n, raw.grid)
    }
}

impl From<LatinSquare> for RawLatin {
    fn from(l: LatinSquare) -> Self {
        RawLatin { n: l.n, grid: l.grid }
    }
}

impl LatinSquare {
    pub fn new(n: usize, grid: Vec<Vec<usize>>) -> Result<Self> {
        if grid.len() != n || grid.iter().any(|r| r.len() != n) {
            return Err(Error::NotLatin(format!("grid is not {n}x{n}")));
        }
        for i in 0..n {
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for j in 0..n {
                for (seen, x, what) in [(&mut row, grid[i][j], "row"), (&mut col, grid[j][i], "column")] {
                    if x >= n {
                        return Err(Error::NotLatin(format!("symbol {x} out of range 0..{n}")));
                    }
                    if std::mem::replace(&mut seen[x], true) {
                        return Err(Error::NotLatin(format!("symbol {x} repeated in {what} {}", i + 1)));
                    }
                }
            }
        }
        Ok(LatinSquare { n, grid })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.grid[i][j]
    }

    pub fn grid(&self) -> &[Vec<usize>] {
        &self.grid
    }

    pub fn transpose(&self) -> LatinSquare {
        let grid = (0..self.n).map(|i| (0..self.n).map(|j| self.grid[j][i]).collect()).collect();
        LatinSquare { n: self.n, grid }
    }

    /// Relabels the symbols of each square so that square `a` uses
    /// `a*n + 1 ..= (a+1)*n`; the result is one grid of 1-based symbols per square.
    pub fn disjoint_symbols(squares: &[LatinSquare]) -> Vec<Vec<Vec<u32>>> {
        squares
            .iter()
            .enumerate()
            .map(|(a, l)| {
                let off = (a * l.n) as u32;
                l.grid.iter().map(|r| r.iter().map(|&x| off + x as u32 + 1).collect()).collect()
            })
            .collect()
    }
}

/// True iff superimposing `a` on `b` yields every ordered symbol pair once.
pub fn are_orthogonal(a: &LatinSquare, b: &LatinSquare) -> Result<bool> {
    if a.n != b.n {
        return Err(Error::OrderMismatch(a.n, b.n));
    }
    let n = a.n;
    let mut seen = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            let key = a.grid[i][j] * n + b.grid[i][j];
            if std::mem::replace(&mut seen[key], true) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The `q - 1` squares `L_a(i, j) = a*i + j`, `a` ranging over the nonzero field elements.
pub fn bose_mols(q: u64) -> Result<Vec<LatinSquare>> {
    let field = FiniteField::new(q)?;
    if q < 3 {
        return Err(Error::InvalidParameter(format!("Bose MOLS need q >= 3, got {q}")));
    }
    let n = field.order();
    Ok((1..n)
        .map(|a| {
            let grid = (0..n)
                .map(|i| (0..n).map(|j| field.add(field.mul(a, i), j)).collect())
                .collect();
            LatinSquare { n, grid }
        })
        .collect())
}
