use std::collections::BTreeSet;

use uslsq::design::BlockDesign;
use uslsq::isomorph::{design_certificate, Certificate};

pub type Solution = Vec<Vec<u32>>;

/// Every multiset of permutation-matrix blocks covering each pair of cells
/// in distinct rows and columns exactly `mu` times. Cells are `i*n + j`.
pub fn naive_solutions(n: usize, mu: u32) -> BTreeSet<Solution> {
    let blocks: Vec<Vec<u32>> = super::permutations(n)
        .into_iter()
        .map(|p| (0..n).map(|i| (i * n + p[i]) as u32).collect())
        .collect();
    let cells = n * n;
    let mut pairs = Vec::new();
    for a in 0..cells {
        for b in a + 1..cells {
            if a / n != b / n && a % n != b % n {
                pairs.push((a as u32, b as u32));
            }
        }
    }
    let covers = |blk: &[u32], (a, b): (u32, u32)| blk.contains(&a) && blk.contains(&b);

    fn go(
        blocks: &[Vec<u32>],
        pairs: &[(u32, u32)],
        covers: &dyn Fn(&[u32], (u32, u32)) -> bool,
        count: &mut Vec<u32>,
        mu: u32,
        chosen: &mut Vec<usize>,
        out: &mut BTreeSet<Solution>,
    ) {
        let Some(e) = (0..pairs.len()).find(|&e| count[e] < mu) else {
            let mut sol: Solution = chosen.iter().map(|&b| blocks[b].clone()).collect();
            sol.sort();
            out.insert(sol);
            return;
        };
        for (bi, blk) in blocks.iter().enumerate() {
            if !covers(blk, pairs[e]) {
                continue;
            }
            let hit: Vec<usize> = (0..pairs.len()).filter(|&x| covers(blk, pairs[x])).collect();
            if hit.iter().any(|&x| count[x] == mu) {
                continue;
            }
            hit.iter().for_each(|&x| count[x] += 1);
            chosen.push(bi);
            go(blocks, pairs, covers, count, mu, chosen, out);
            chosen.pop();
            hit.iter().for_each(|&x| count[x] -= 1);
        }
    }

    let mut out = BTreeSet::new();
    let mut count = vec![0; pairs.len()];
    go(&blocks, &pairs, &covers, &mut count, mu, &mut Vec::new(), &mut out);
    out
}

/// Least image of a solution under row and column permutations and transposition.
pub fn brute_min_image(n: usize, sol: &Solution, perms: &[Vec<usize>]) -> Solution {
    let mut best: Option<Solution> = None;
    for g in perms {
        for h in perms {
            for transpose in [false, true] {
                let map = |c: u32| {
                    let (i, j) = (g[c as usize / n], h[c as usize % n]);
                    let (i, j) = if transpose { (j, i) } else { (i, j) };
                    (i * n + j) as u32
                };
                let mut img: Solution = sol
                    .iter()
                    .map(|b| {
                        let mut x: Vec<u32> = b.iter().map(|&c| map(c)).collect();
                        x.sort_unstable();
                        x
                    })
                    .collect();
                img.sort();
                if best.as_ref().is_none_or(|b| img < *b) {
                    best = Some(img);
                }
            }
        }
    }
    best.unwrap()
}

pub fn certificate(n: usize, sol: &Solution) -> Certificate {
    let blocks = sol.iter().map(|b| b.iter().map(|&c| c + 1).collect()).collect();
    design_certificate(&BlockDesign::new(n * n, blocks).unwrap()).unwrap()
}

/// Certificates of the orbits of all solutions, found without symmetry.
pub fn naive_class_certificates(n: usize, mu: u32) -> BTreeSet<Certificate> {
    let perms = super::permutations(n);
    let classes: BTreeSet<Solution> = naive_solutions(n, mu).iter().map(|s| brute_min_image(n, s, &perms)).collect();
    classes.iter().map(|s| certificate(n, s)).collect()
}
