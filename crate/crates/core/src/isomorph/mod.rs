//! Certificates, isomorphism tests and automorphism group orders for block
//! designs and semi-Latin squares, via colored-graph encodings.

mod canon;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::design::BlockDesign;
use crate::error::{Error, Result};
use crate::sls::SemiLatinSquare;

pub use canon::{canonical_form, CanonicalForm, ColoredGraph};

/// Canonical byte encoding of a colored graph plus the order of the
/// automorphism group of the encoded object.
///
/// Equality, ordering and hashing look at the bytes only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(with = "hex")]
    bytes: Vec<u8>,
    aut_order: u128,
}

impl Certificate {
    fn from_graph(g: &ColoredGraph) -> Result<Self> {
        let cf = canonical_form(g)?;
        let mut bytes = Vec::new();
        bytes.extend((g.order() as u32).to_le_bytes());
        let classes = g.color_classes();
        bytes.extend((classes.len() as u32).to_le_bytes());
        for (color, size) in classes {
            bytes.extend(color.to_le_bytes());
            bytes.extend(size.to_le_bytes());
        }
        bytes.extend(cf.upper_triangle_bytes());
        Ok(Certificate { bytes, aut_order: cf.group_order })
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn aut_order(&self) -> u128 {
        self.aut_order
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }
}

impl PartialEq for Certificate {
    fn eq(&self, other: &Self) -> bool {
        self.bytes == other.bytes
    }
}

impl Eq for Certificate {}

impl Hash for Certificate {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bytes.hash(state);
    }
}

impl PartialOrd for Certificate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Certificate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bytes.cmp(&other.bytes)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Treatments (color 0) joined to one vertex per distinct block, colored
/// by the block's multiplicity.
pub fn design_graph(d: &BlockDesign) -> ColoredGraph {
    let v = d.v() as u32;
    let distinct = d.block_multiplicities();
    let mut colors = vec![0u32; d.v()];
    colors.extend(distinct.iter().map(|&(_, m)| m as u32));
    let edges: Vec<(u32, u32)> = distinct
        .iter()
        .enumerate()
        .flat_map(|(bi, (blk, _))| blk.iter().map(move |&t| (t - 1, v + bi as u32)))
        .collect();
    ColoredGraph::new(colors, &edges).expect("incidence edges are simple")
}

/// Lines (rows `0..n`, columns `n..2n`), cells, treatments. With
/// `split_lines` rows and columns get different colors, which forbids
/// transposition.
pub fn sls_graph(s: &SemiLatinSquare, split_lines: bool) -> ColoredGraph {
    let n = s.n() as u32;
    let lines = 2 * n;
    let cells = lines + n * n;
    let mut colors: Vec<u32> = (0..lines).map(|l| if split_lines && l >= n { 1 } else { 0 }).collect();
    colors.extend(std::iter::repeat_n(2, (n * n) as usize));
    colors.extend(std::iter::repeat_n(3, s.v()));
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = lines + i * n + j;
            edges.push((i, c));
            edges.push((n + j, c));
            for &t in s.cell(i as usize, j as usize) {
                edges.push((c, cells + t - 1));
            }
        }
    }
    ColoredGraph::new(colors, &edges).expect("square edges are simple")
}

/// Certificate of a block design; its group order counts treatment
/// permutations preserving the block multiset.
pub fn design_certificate(d: &BlockDesign) -> Result<Certificate> {
    Certificate::from_graph(&design_graph(d))
}

/// Certificate of a semi-Latin square under row and column permutations,
/// transposition and treatment renaming.
pub fn sls_certificate(s: &SemiLatinSquare) -> Result<Certificate> {
    Certificate::from_graph(&sls_graph(s, false))
}

pub fn designs_are_isomorphic(a: &BlockDesign, b: &BlockDesign) -> Result<bool> {
    if a.v() != b.v() || a.b() != b.b() {
        return Ok(false);
    }
    Ok(design_certificate(a)? == design_certificate(b)?)
}

pub fn sls_are_isomorphic(s: &SemiLatinSquare, t: &SemiLatinSquare) -> Result<bool> {
    if s.n() != t.n() || s.k() != t.k() {
        return Err(Error::InvalidParameter(format!(
            "cannot compare a ({0}x{0})/{1} square with a ({2}x{2})/{3} square",
            s.n(),
            s.k(),
            t.n(),
            t.k()
        )));
    }
    Ok(sls_certificate(s)? == sls_certificate(t)?)
}

/// Whether some automorphism of `s` maps rows to columns.
pub fn has_transposing_automorphism(s: &SemiLatinSquare) -> Result<bool> {
    let a = Certificate::from_graph(&sls_graph(s, true))?;
    let b = Certificate::from_graph(&sls_graph(&s.transpose(), true))?;
    Ok(a == b)
}

/// Objects with a certificate-bearing encoding.
pub trait Canonical {
    fn certificate(&self) -> Result<Certificate>;
}

impl Canonical for BlockDesign {
    fn certificate(&self) -> Result<Certificate> {
        design_certificate(self)
    }
}

impl Canonical for SemiLatinSquare {
    fn certificate(&self) -> Result<Certificate> {
        sls_certificate(self)
    }
}

/// Order of the automorphism group.
pub fn aut_order<T: Canonical + ?Sized>(x: &T) -> Result<u128> {
    Ok(x.certificate()?.aut_order())
}
