//! Marching-squares length of the 1/2-level contour of a binary node mask.

use std::f64::consts::SQRT_2;

/// Contour length in grid units.
///
/// Every 2×2 block of nodes is one cell; its contour segments join midpoints of the cell
/// edges that separate interior from exterior nodes. A single in (or out) corner gives a
/// diagonal of length `1/√2`, a straight split gives `1`, and the two saddle cases give two
/// diagonals whichever way they are resolved.
pub(crate) fn marching_squares_length(mask: &[bool], nx: usize, ny: usize) -> f64 {
    let mut total = 0.0;
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let a = mask[j * nx + i];
            let b = mask[j * nx + i + 1];
            let c = mask[(j + 1) * nx + i + 1];
            let d = mask[(j + 1) * nx + i];
            let count = [a, b, c, d].iter().filter(|&&x| x).count();
            total += match count {
                0 | 4 => 0.0,
                1 | 3 => SQRT_2 / 2.0,
                _ if a == c => SQRT_2,
                _ => 1.0,
            };
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_is_a_diamond() {
        let mut mask = vec![false; 9];
        mask[4] = true;
        assert!((marching_squares_length(&mask, 3, 3) - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn axis_aligned_block() {
        // n×n block: square of side n with four corners cut by a diagonal each.
        let (nx, n) = (10, 6);
        let mut mask = vec![false; nx * nx];
        for j in 2..2 + n {
            for i in 2..2 + n {
                mask[j * nx + i] = true;
            }
        }
        let expected = 4.0 * n as f64 - 4.0 * (1.0 - SQRT_2 / 2.0);
        assert!((marching_squares_length(&mask, nx, nx) - expected).abs() < 1e-12);
    }
}
