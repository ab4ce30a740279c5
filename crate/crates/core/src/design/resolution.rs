use serde::{Deserialize, Serialize};

use super::{intersection_size, BlockDesign};
use crate::error::{Error, Result};

/// A partition of the block slots of a design into parallel classes.
///
/// Each class lists 0-based indices into [`BlockDesign::blocks`]; repeated
/// blocks are distinct slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub classes: Vec<Vec<usize>>,
}

impl Resolution {
    /// Sorts each class and the class list.
    pub fn normalized(mut classes: Vec<Vec<usize>>) -> Self {
        for c in classes.iter_mut() {
            c.sort_unstable();
        }
        classes.sort();
        Resolution { classes }
    }

    /// Checks that the classes partition the block slots and each class
    /// partitions the treatments.
    pub fn check(&self, d: &BlockDesign) -> Result<()> {
        let mut used = vec![false; d.b()];
        for (ci, class) in self.classes.iter().enumerate() {
            let mut covered = vec![false; d.v()];
            for &bi in class {
                let blk = d.blocks().get(bi).ok_or_else(|| {
                    Error::InvalidResolution(format!("class {} refers to missing block {}", ci + 1, bi))
                })?;
                if std::mem::replace(&mut used[bi], true) {
                    return Err(Error::InvalidResolution(format!("block {} used twice", bi)));
                }
                for &t in blk {
                    if std::mem::replace(&mut covered[t as usize - 1], true) {
                        return Err(Error::InvalidResolution(format!(
                            "class {} covers treatment {t} twice",
                            ci + 1
                        )));
                    }
                }
            }
            if let Some(t) = covered.iter().position(|&c| !c) {
                return Err(Error::InvalidResolution(format!("class {} misses treatment {}", ci + 1, t + 1)));
            }
        }
        if let Some(b) = used.iter().position(|&u| !u) {
            return Err(Error::InvalidResolution(format!("block {b} is in no class")));
        }
        Ok(())
    }
}

/// Searches for a resolution: first all parallel classes over the distinct
/// blocks, then an exact cover of the block multiset by those classes.
pub fn find_resolution(d: &BlockDesign) -> Result<Option<Resolution>> {
    let (v, _, r, k) = d.params().ok_or(Error::IrregularDesign)?;
    if k >= v || r <= 1 || v % k != 0 {
        return Err(Error::InvalidParameter(format!(
            "resolvability needs k < v, r > 1 and k | v (v={v}, r={r}, k={k})"
        )));
    }
    let distinct = d.block_multiplicities();
    let contents: Vec<&[u32]> = distinct.iter().map(|(b, _)| b.as_slice()).collect();
    let classes = parallel_classes(v, &contents);

    let mut need: Vec<usize> = distinct.iter().map(|&(_, m)| m).collect();
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); contents.len()];
    for (ci, class) in classes.iter().enumerate() {
        for &b in class {
            containing[b].push(ci);
        }
    }
    let mut chosen = Vec::new();
    let mut excluded = vec![false; classes.len()];
    if !cover_blocks(&classes, &containing, &mut need, &mut excluded, &mut chosen) {
        return Ok(None);
    }
    // distinct content index -> first slot in d.blocks()
    let mut first_slot = Vec::with_capacity(distinct.len());
    let mut slot = 0;
    for (_, m) in &distinct {
        first_slot.push(slot);
        slot += m;
    }
    let mut next = first_slot.clone();
    let resolved = chosen
        .iter()
        .map(|&ci| {
            classes[ci]
                .iter()
                .map(|&b| {
                    next[b] += 1;
                    next[b] - 1
                })
                .collect()
        })
        .collect();
    Ok(Some(Resolution::normalized(resolved)))
}

/// All sets of distinct blocks partitioning `1..=v`, in lexicographic order
/// of their (ascending) block indices.
fn parallel_classes(v: usize, blocks: &[&[u32]]) -> Vec<Vec<usize>> {
    let mut by_point: Vec<Vec<usize>> = vec![Vec::new(); v];
    for (i, b) in blocks.iter().enumerate() {
        for &t in b.iter() {
            by_point[t as usize - 1].push(i);
        }
    }
    let mut out = Vec::new();
    let mut covered = vec![false; v];
    let mut current = Vec::new();
    fn rec(
        blocks: &[&[u32]],
        by_point: &[Vec<usize>],
        covered: &mut [bool],
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        // most constrained uncovered point
        let mut best: Option<(usize, usize)> = None;
        for p in 0..covered.len() {
            if covered[p] {
                continue;
            }
            let options = by_point[p]
                .iter()
                .filter(|&&b| blocks[b].iter().all(|&t| !covered[t as usize - 1]))
                .count();
            if best.is_none_or(|(_, o)| options < o) {
                best = Some((p, options));
            }
        }
        let Some((p, options)) = best else {
            let mut c = current.clone();
            c.sort_unstable();
            out.push(c);
            return;
        };
        if options == 0 {
            return;
        }
        for &b in &by_point[p] {
            if blocks[b].iter().any(|&t| covered[t as usize - 1]) {
                continue;
            }
            for &t in blocks[b] {
                covered[t as usize - 1] = true;
            }
            current.push(b);
            rec(blocks, by_point, covered, current, out);
            current.pop();
            for &t in blocks[b] {
                covered[t as usize - 1] = false;
            }
        }
    }
    rec(blocks, &by_point, &mut covered, &mut current, &mut out);
    out.sort();
    out
}

fn cover_blocks(
    classes: &[Vec<usize>],
    containing: &[Vec<usize>],
    need: &mut [usize],
    excluded: &mut [bool],
    chosen: &mut Vec<usize>,
) -> bool {
    let usable = |ci: usize, need: &[usize], excluded: &[bool]| !excluded[ci] && classes[ci].iter().all(|&b| need[b] > 0);
    let mut best: Option<(usize, usize)> = None;
    for b in 0..need.len() {
        if need[b] == 0 {
            continue;
        }
        let options = containing[b].iter().filter(|&&ci| usable(ci, need, excluded)).count();
        if best.is_none_or(|(_, o)| options < o) {
            best = Some((b, options));
        }
    }
    let Some((b, _)) = best else { return true };
    let mut newly_excluded = Vec::new();
    let mut found = false;
    for &ci in &containing[b] {
        if !usable(ci, need, excluded) {
            continue;
        }
        for &x in &classes[ci] {
            need[x] -= 1;
        }
        chosen.push(ci);
        if cover_blocks(classes, containing, need, excluded, chosen) {
            found = true;
        } else {
            chosen.pop();
        }
        for &x in &classes[ci] {
            need[x] += 1;
        }
        if found {
            break;
        }
        // later siblings never reuse ci, so each multiset of classes is tried once
        excluded[ci] = true;
        newly_excluded.push(ci);
    }
    for ci in newly_excluded {
        excluded[ci] = false;
    }
    found
}

/// `mu` when blocks from distinct classes always meet in the same positive number of treatments.
pub fn is_affine_resolvable(d: &BlockDesign, res: &Resolution) -> Result<Option<usize>> {
    res.check(d)?;
    let mut mu = None;
    for (ci, a) in res.classes.iter().enumerate() {
        for b in &res.classes[ci + 1..] {
            for &x in a {
                for &y in b {
                    let m = intersection_size(&d.blocks()[x], &d.blocks()[y]);
                    if m == 0 || mu.is_some_and(|mu| mu != m) {
                        return Ok(None);
                    }
                    mu = Some(m);
                }
            }
        }
    }
    Ok(mu)
}
