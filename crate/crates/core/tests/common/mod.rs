#![allow(dead_code)]

pub mod naive;

use rand::seq::SliceRandom;
use rand::Rng;
use uslsq::algebra::LatinSquare;
use uslsq::design::BlockDesign;
use uslsq::sls::SemiLatinSquare;

pub fn shuffled(rng: &mut impl Rng, len: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..len).collect();
    p.shuffle(rng);
    p
}

/// A random isotope of the cyclic Latin square of order `n`.
pub fn random_latin(rng: &mut impl Rng, n: usize) -> LatinSquare {
    let (r, c, s) = (shuffled(rng, n), shuffled(rng, n), shuffled(rng, n));
    let mut grid = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            grid[r[i]][c[j]] = s[(i + j) % n];
        }
    }
    LatinSquare::new(n, grid).unwrap()
}

/// Superposition of `m` random Latin squares; semi-Latin but rarely uniform.
pub fn random_square(rng: &mut impl Rng, n: usize, m: usize) -> SemiLatinSquare {
    let parts: Vec<_> = (0..m).map(|_| random_latin(rng, n)).collect();
    SemiLatinSquare::superpose_latin(&parts).unwrap()
}

/// 1-based treatment relabeling of a design.
pub fn relabel_design(rng: &mut impl Rng, d: &BlockDesign) -> BlockDesign {
    let perm: Vec<u32> = shuffled(rng, d.v()).into_iter().map(|x| x as u32 + 1).collect();
    d.relabel(&perm)
}

/// Random row, column and treatment permutation, transposed half the time.
pub fn random_isomorph(rng: &mut impl Rng, s: &SemiLatinSquare) -> SemiLatinSquare {
    let (rp, cp) = (shuffled(rng, s.n()), shuffled(rng, s.n()));
    let tp: Vec<u32> = shuffled(rng, s.v()).into_iter().map(|x| x as u32 + 1).collect();
    let t = s.permute(&rp, &cp, &tp);
    if rng.gen_bool(0.5) {
        t.transpose()
    } else {
        t
    }
}

/// Concurrence counts by direct pair enumeration over blocks.
pub fn brute_eta(d: &BlockDesign) -> Vec<u64> {
    let v = d.v() as u32;
    let mut counts: Vec<u64> = Vec::new();
    for a in 1..=v {
        for b in a + 1..=v {
            let c = d.blocks().iter().filter(|blk| blk.contains(&a) && blk.contains(&b)).count();
            if counts.len() <= c {
                counts.resize(c + 1, 0);
            }
            counts[c] += 1;
        }
    }
    counts
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Least relabeled block list over every treatment permutation.
pub fn brute_canonical_design(v: usize, blocks: &[Vec<u32>], perms: &[Vec<usize>]) -> Vec<Vec<u32>> {
    perms
        .iter()
        .map(|p| {
            let mut bs: Vec<Vec<u32>> = blocks
                .iter()
                .map(|b| {
                    let mut x: Vec<u32> = b.iter().map(|&t| p[t as usize - 1] as u32 + 1).collect();
                    x.sort_unstable();
                    x
                })
                .collect();
            bs.sort();
            bs
        })
        .min()
        .unwrap_or_else(|| {
            assert_eq!(v, 0);
            Vec::new()
        })
}
