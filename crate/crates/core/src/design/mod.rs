//! Block designs: concurrence, PV aberration, spectra, resolvability and
//! the designs derived from uniform semi-Latin squares.

mod derived;
mod oa;
mod resolution;
mod spectrum;

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use derived::{delta12, delta12_with_resolution, delta3};
pub use oa::{oa_strength, to_orthogonal_array, OrthogonalArray};
pub use resolution::{find_resolution, is_affine_resolvable, Resolution};
pub use spectrum::{canonical_efficiency_factors, schur_dominates, sym_eig, Spectrum, CLUSTER_TOL};

/// A binary block design on treatments `1..=v`.
///
/// Blocks are kept sorted internally and the block list itself is kept in
/// ascending lexicographic order, so repeated blocks are adjacent and two
/// designs with the same block multiset compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDesign", into = "RawDesign")]
pub struct BlockDesign {
    v: usize,
    blocks: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawDesign {
    pub v: usize,
    pub blocks: Vec<Vec<u32>>,
}

impl TryFrom<RawDesign> for BlockDesign {
    type Error = Error;

    fn try_from(raw: RawDesign) -> Result<Self> {
        BlockDesign::new(raw.v, raw.blocks)
    }
}

impl From<BlockDesign> for RawDesign {
    fn from(d: BlockDesign) -> Self {
        RawDesign { v: d.v, blocks: d.blocks }
    }
}

impl BlockDesign {
    pub fn new(v: usize, blocks: Vec<Vec<u32>>) -> Result<Self> {
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::InvalidDesign(format!("block {} is empty", i + 1)));
            }
            if let Some(&t) = b.iter().find(|&&t| t == 0 || t as usize > v) {
                return Err(Error::InvalidDesign(format!("block {} has treatment {t} outside 1..={v}", i + 1)));
            }
            let mut s = b.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidDesign(format!("block {} repeats a treatment", i + 1)));
            }
        }
        Ok(Self::new_unchecked(v, blocks))
    }

    pub(crate) fn new_unchecked(v: usize, mut blocks: Vec<Vec<u32>>) -> Self {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort();
        BlockDesign { v, blocks }
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn b(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    /// Replication of each treatment (index `t - 1`).
    pub fn replications(&self) -> Vec<usize> {
        let mut r = vec![0; self.v];
        for b in &self.blocks {
            for &t in b {
                r[t as usize - 1] += 1;
            }
        }
        r
    }

    /// Common block size, if all blocks have the same size.
    pub fn block_size(&self) -> Option<usize> {
        let k = self.blocks.first()?.len();
        self.blocks.iter().all(|b| b.len() == k).then_some(k)
    }

    /// `(v, b, r, k)` when the design is equireplicate with constant block size.
    pub fn params(&self) -> Option<(usize, usize, usize, usize)> {
        let k = self.block_size()?;
        let reps = self.replications();
        let r = *reps.first()?;
        reps.iter().all(|&x| x == r).then_some((self.v, self.b(), r, k))
    }

    fn regular(&self) -> Result<(usize, usize, usize, usize)> {
        self.params().ok_or(Error::IrregularDesign)
    }

    /// Multiplicity of each distinct block, in block order.
    pub fn block_multiplicities(&self) -> Vec<(Vec<u32>, usize)> {
        let mut out: Vec<(Vec<u32>, usize)> = Vec::new();
        for b in &self.blocks {
            match out.last_mut() {
                Some((last, m)) if last == b => *m += 1,
                _ => out.push((b.clone(), 1)),
            }
        }
        out
    }

    pub fn concurrence_matrix(&self) -> ConcurrenceMatrix {
        let v = self.v;
        let mut data = vec![0u32; v * v];
        for b in &self.blocks {
            for &x in b {
                let row = (x as usize - 1) * v;
                for &y in b {
                    data[row + y as usize - 1] += 1;
                }
            }
        }
        ConcurrenceMatrix { v, data }
    }

    /// Counts of unordered distinct-treatment pairs by concurrence, `0..=r`.
    pub fn eta(&self) -> Result<EtaVector> {
        let (v, _, r, _) = self.regular()?;
        let lam = self.concurrence_matrix();
        let mut eta = vec![0u64; r + 1];
        for a in 0..v {
            for b in a + 1..v {
                eta[lam.get(a, b) as usize] += 1;
            }
        }
        Ok(EtaVector(eta))
    }

    /// Sizes of the intersections of distinct (by position) blocks that meet.
    pub fn nonzero_intersection_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::new();
        for i in 0..self.blocks.len() {
            for j in i + 1..self.blocks.len() {
                let m = intersection_size(&self.blocks[i], &self.blocks[j]);
                if m > 0 {
                    sizes.push(m);
                }
            }
        }
        sizes.sort_unstable();
        sizes.dedup();
        sizes
    }

    /// Recognises a `mu`-fold inflation (`mu >= 2`) by grouping treatments
    /// of full concurrence `r`; returns `mu` and the quotient design on class
    /// representatives, numbered in order of their smallest member.
    pub fn detect_inflation(&self) -> Option<(usize, BlockDesign)> {
        let (v, _, r, _) = self.params()?;
        let lam = self.concurrence_matrix();
        let mut class = vec![usize::MAX; v];
        let mut sizes = Vec::new();
        for a in 0..v {
            if class[a] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            for b in a..v {
                if lam.get(a, b) as usize == r {
                    if class[b] != usize::MAX {
                        return None;
                    }
                    class[b] = id;
                    size += 1;
                }
            }
            sizes.push(size);
        }
        let mu = sizes[0];
        if mu < 2 || sizes.iter().any(|&s| s != mu) {
            return None;
        }
        // full concurrence is transitive, but confirm each class is a clique
        for a in 0..v {
            for b in a + 1..v {
                if (class[a] == class[b]) != (lam.get(a, b) as usize == r) {
                    return None;
                }
            }
        }
        let blocks = self
            .blocks
            .iter()
            .map(|blk| {
                let mut q: Vec<u32> = blk.iter().map(|&t| class[t as usize - 1] as u32 + 1).collect();
                q.dedup();
                q
            })
            .collect();
        Some((mu, BlockDesign::new_unchecked(sizes.len(), blocks)))
    }

    /// `lambda` when the design is a BIBD (`1 < k < v`, constant off-diagonal concurrence).
    pub fn is_bibd(&self) -> Option<usize> {
        let (v, _, _, k) = self.params()?;
        if k <= 1 || k >= v {
            return None;
        }
        let lam = self.concurrence_matrix();
        let l = lam.get(0, 1);
        for a in 0..v {
            for b in a + 1..v {
                if lam.get(a, b) != l {
                    return None;
                }
            }
        }
        Some(l as usize)
    }

    /// Applies a treatment relabeling `t -> perm[t-1]` (values 1-based).
    pub fn relabel(&self, perm: &[u32]) -> BlockDesign {
        let blocks = self.blocks.iter().map(|b| b.iter().map(|&t| perm[t as usize - 1]).collect()).collect();
        BlockDesign::new_unchecked(self.v, blocks)
    }

    /// Incidence-graph connectivity of treatments and blocks.
    pub fn is_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.v).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for b in &self.blocks {
            let a = find(&mut parent, b[0] as usize - 1);
            for &t in &b[1..] {
                let c = find(&mut parent, t as usize - 1);
                parent[c] = a;
            }
        }
        let root = find(&mut parent, 0);
        (0..self.v).all(|x| find(&mut parent, x) == root)
            && (1..=self.v).all(|t| self.blocks.iter().any(|b| b.contains(&(t as u32))))
    }
}

pub(crate) fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Symmetric treatment-by-treatment concurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcurrenceMatrix {
    v: usize,
    data: Vec<u32>,
}

impl ConcurrenceMatrix {
    pub fn v(&self) -> usize {
        self.v
    }

    /// Entry for 0-based treatments `a`, `b`.
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.data[a * self.v + b]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks(self.v)
    }
}

/// `eta_i` = number of unordered distinct-treatment pairs with concurrence `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EtaVector(pub Vec<u64>);

impl EtaVector {
    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest concurrence attained by some pair.
    pub fn max_concurrence(&self) -> usize {
        self.0.iter().rposition(|&x| x > 0).unwrap_or(0)
    }
}

impl fmt::Display for EtaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Lexicographic PV-aberration comparison; smaller is better.
pub fn eta_less(a: &EtaVector, b: &EtaVector) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.0.cmp(&b.0))
}

/// Lower bound `v(v - k - (r-1)(k-mu))/2` on `eta_0` for designs whose
/// distinct non-disjoint blocks all meet in `mu` treatments.
pub fn eta0_lower_bound(v: i64, _b: i64, r: i64, k: i64, mu: i64) -> Ratio<i64> {
    Ratio::new(v * (v - k - (r - 1) * (k - mu)), 2)
}
