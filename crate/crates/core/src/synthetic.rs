//! Synthetic masks and label maps for demos and tests.

use rand::Rng;

use crate::grid::{BinaryMask, LabelMap};

pub fn disc_mask(width: usize, height: usize, row: f64, col: f64, radius: f64) -> BinaryMask {
    let r2 = radius * radius;
    BinaryMask::from_fn(width, height, |r, c| {
        let (dr, dc) = (r as f64 - row, c as f64 - col);
        dr * dr + dc * dc <= r2
    })
}

/// Two equal discs labeled 1 and 2 whose rims touch at the centre column.
///
/// For `size = 64` the discs have radius 13 and centres at `(32, 19)` and `(32, 45)`.
pub fn two_touching_discs(size: usize) -> LabelMap {
    assert!(size >= 16, "grid too small for two discs");
    let radius = ((size - 12) / 4) as f64;
    let mid = (size / 2) as f64;
    let left = disc_mask(size, size, mid, mid - radius, radius);
    let right = disc_mask(size, size, mid, mid + radius, radius);
    LabelMap::from_fn(size, size, |r, c| {
        if right.is_set(r, c) {
            2
        } else if left.is_set(r, c) {
            1
        } else {
            0
        }
    })
}

/// Union of one to three random discs; never all-foreground or all-background.
pub fn random_blobs<R: Rng + ?Sized>(rng: &mut R, width: usize, height: usize) -> BinaryMask {
    let max_radius = (width.min(height) as f64 / 3.0).max(1.5);
    loop {
        let count = rng.gen_range(1..=3);
        let discs: Vec<(f64, f64, f64)> = (0..count)
            .map(|_| {
                (
                    rng.gen_range(0.0..height as f64),
                    rng.gen_range(0.0..width as f64),
                    rng.gen_range(1.0..max_radius),
                )
            })
            .collect();
        let mask = BinaryMask::from_fn(width, height, |r, c| {
            discs.iter().any(|&(cr, cc, rad)| {
                let (dr, dc) = (r as f64 - cr, c as f64 - cc);
                dr * dr + dc * dc <= rad * rad
            })
        });
        let ones = mask.count_ones();
        if ones > 0 && ones < mask.len() {
            return mask;
        }
    }
}

/// Independent Bernoulli pixels with the given foreground probability.
pub fn random_mask<R: Rng + ?Sized>(
    rng: &mut R,
    width: usize,
    height: usize,
    p_foreground: f64,
) -> BinaryMask {
    BinaryMask::from_fn(width, height, |_, _| rng.gen_bool(p_foreground))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn discs_touch_at_centre() {
        let m = two_touching_discs(64);
        assert_eq!(m.label_ids(), vec![1, 2]);
        assert_eq!(m.get(32, 31), 1);
        assert_eq!(m.get(32, 32), 2);
        assert_eq!(m.get(32, 33), 2);
        assert_eq!(m.get(0, 0), 0);
    }

    #[test]
    fn blobs_are_not_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = random_blobs(&mut rng, 8, 6);
            assert!(m.count_ones() > 0 && m.count_ones() < 48);
        }
    }
}
