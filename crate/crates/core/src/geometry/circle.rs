//! Smallest enclosing circle of a point set (Welzl's algorithm on the convex hull).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type P = [f64; 2];

pub(crate) fn min_enclosing_radius(points: &[P]) -> f64 {
    let mut hull = convex_hull(points);
    // Fixed seed keeps the result reproducible; the expected running time only needs
    // the order to be independent of the input.
    hull.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));
    welzl(&hull).1
}

fn convex_hull(points: &[P]) -> Vec<P> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: P, a: P, b: P| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<P> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<P> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn dist(a: P, b: P) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn contains(c: (P, f64), p: P) -> bool {
    dist(c.0, p) <= c.1 * (1.0 + 1e-12) + 1e-14
}

fn from_two(a: P, b: P) -> (P, f64) {
    let c = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
    (c, dist(a, c))
}

fn from_three(a: P, b: P, c: P) -> (P, f64) {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-300 {
        // collinear: widest pair
        let cands = [from_two(a, b), from_two(a, c), from_two(b, c)];
        return cands
            .into_iter()
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    let center = [a[0] + ux, a[1] + uy];
    (center, (ux * ux + uy * uy).sqrt())
}

/// Iterative move-to-front formulation of Welzl's algorithm.
fn welzl(pts: &[P]) -> (P, f64) {
    if pts.is_empty() {
        return ([0.0, 0.0], 0.0);
    }
    let mut c = (pts[0], 0.0);
    for i in 1..pts.len() {
        if contains(c, pts[i]) {
            continue;
        }
        c = (pts[i], 0.0);
        for j in 0..i {
            if contains(c, pts[j]) {
                continue;
            }
            c = from_two(pts[i], pts[j]);
            for k in 0..j {
                if !contains(c, pts[k]) {
                    c = from_three(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    c
}
