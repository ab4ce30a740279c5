use super::{BlockDesign, Resolution};
use crate::error::Result;
use crate::sls::{Axis, SemiLatinSquare};

/// Adds `mu` new treatments per row (`Axis::Rows`) or per column
/// (`Axis::Columns`) to the underlying design of a uniform square, each
/// incident with exactly the blocks of its line.
///
/// New treatments are numbered `nk + line*mu + t + 1`.
pub fn delta12(s: &SemiLatinSquare, axis: Axis) -> Result<BlockDesign> {
    delta12_with_resolution(s, axis).map(|(d, _)| d)
}

/// As [`delta12`], also returning the resolution by the perpendicular lines.
pub fn delta12_with_resolution(s: &SemiLatinSquare, axis: Axis) -> Result<(BlockDesign, Resolution)> {
    let mu = s.uniform_mu()?;
    let n = s.n();
    let base = s.v() as u32;
    let mut tagged: Vec<(Vec<u32>, usize)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (line, perp) = match axis {
                Axis::Rows => (i, j),
                Axis::Columns => (j, i),
            };
            let mut blk = s.cell(i, j).to_vec();
            blk.extend((0..mu).map(|t| base + (line * mu + t) as u32 + 1));
            blk.sort_unstable();
            tagged.push((blk, perp));
        }
    }
    tagged.sort();
    let mut classes = vec![Vec::new(); n];
    for (slot, (_, perp)) in tagged.iter().enumerate() {
        classes[*perp].push(slot);
    }
    let design = BlockDesign::new_unchecked(s.v() + n * mu, tagged.into_iter().map(|(b, _)| b).collect());
    Ok((design, Resolution::normalized(classes)))
}

/// Dual of the underlying design augmented by `mu` treatments per row and
/// per column: an `(n^2, mu n(n+1), mu(n+1), n, mu)`-BIBD on the cells.
pub fn delta3(s: &SemiLatinSquare) -> Result<BlockDesign> {
    let mu = s.uniform_mu()?;
    let n = s.n();
    let mut blocks = s.dual().blocks().to_vec();
    for line in 0..n {
        let row: Vec<u32> = (0..n).map(|j| (line * n + j) as u32 + 1).collect();
        let col: Vec<u32> = (0..n).map(|i| (i * n + line) as u32 + 1).collect();
        for _ in 0..mu {
            blocks.push(row.clone());
            blocks.push(col.clone());
        }
    }
    Ok(BlockDesign::new_unchecked(n * n, blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::bose_mols;
    use crate::design::{find_resolution, is_affine_resolvable};
    use crate::fixtures;

    #[test]
    fn delta1_of_square_3x3() {
        let s = fixtures::square_3x3();
        let (d, res) = delta12_with_resolution(&s, Axis::Rows).unwrap();
        assert_eq!(d.params(), Some((18, 9, 3, 6)));
        assert_eq!(is_affine_resolvable(&d, &res).unwrap(), Some(2));
        let found = find_resolution(&d).unwrap().unwrap();
        assert_eq!(is_affine_resolvable(&d, &found).unwrap(), Some(2));
    }

    #[test]
    fn new_treatments_stay_in_their_line() {
        let s = fixtures::square_3x3();
        let d = delta12(&s, Axis::Rows).unwrap();
        for blk in d.blocks() {
            let new: Vec<u32> = blk.iter().copied().filter(|&t| t > 12).collect();
            assert_eq!(new.len(), 2);
            assert_eq!((new[0] - 13) / 2, (new[1] - 13) / 2);
        }
    }

    #[test]
    fn delta3_is_bibd() {
        let d = delta3(&fixtures::square_3x3()).unwrap();
        assert_eq!(d.params(), Some((9, 24, 8, 3)));
        assert_eq!(d.is_bibd(), Some(2));
        assert!(d.block_multiplicities().iter().any(|&(_, m)| m > 1));
    }

    #[test]
    fn delta3_of_mols_is_affine_plane() {
        for q in [3u64, 4, 5] {
            let t = SemiLatinSquare::superpose_latin(&bose_mols(q).unwrap()).unwrap();
            let d = delta3(&t).unwrap();
            let n = q as usize;
            assert_eq!(d.params(), Some((n * n, n * (n + 1), n + 1, n)));
            assert_eq!(d.is_bibd(), Some(1));
        }
    }

    #[test]
    fn non_uniform_rejected() {
        let l = SemiLatinSquare::from_latin(&bose_mols(3).unwrap()[0]);
        assert!(delta12(&l, Axis::Rows).is_err());
        assert!(delta3(&l).is_err());
    }
}
