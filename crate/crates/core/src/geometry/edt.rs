//! Exact squared Euclidean distance transform (Felzenszwalb–Huttenlocher), in grid units.

const INF: i64 = i64::MAX / 4;

/// Squared distance from every node to the nearest node with `mask == false`.
pub(crate) fn squared_distance_to_exterior(mask: &[bool], nx: usize, ny: usize) -> Vec<i64> {
    let mut grid: Vec<i64> = mask.iter().map(|&m| if m { INF } else { 0 }).collect();
    let mut line = Vec::with_capacity(nx.max(ny));
    let mut out = vec![0; nx.max(ny)];

    for i in 0..nx {
        line.clear();
        line.extend((0..ny).map(|j| grid[j * nx + i]));
        lower_envelope(&line, &mut out[..ny]);
        for j in 0..ny {
            grid[j * nx + i] = out[j];
        }
    }
    for j in 0..ny {
        line.clear();
        line.extend_from_slice(&grid[j * nx..(j + 1) * nx]);
        lower_envelope(&line, &mut out[..nx]);
        grid[j * nx..(j + 1) * nx].copy_from_slice(&out[..nx]);
    }
    grid
}

/// `out[q] = min_p (q − p)² + f[p]`.
fn lower_envelope(f: &[i64], out: &mut [i64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0f64; n + 1];
    let mut k = 0usize;
    let first = match f.iter().position(|&x| x < INF) {
        Some(p) => p,
        None => {
            out.iter_mut().for_each(|o| *o = INF);
            return;
        }
    };
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let intersect = |q: usize, p: usize| -> f64 {
        let (q2, p2) = ((q * q) as f64, (p * p) as f64);
        ((f[q] as f64 + q2) - (f[p] as f64 + p2)) / (2.0 * (q as f64 - p as f64))
    };
    for q in first + 1..n {
        if f[q] >= INF {
            continue;
        }
        let mut s = intersect(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = intersect(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as i64 - v[k] as i64;
        *o = d * d + f[v[k]];
    }
}
