//! One-dimensional constants: `π_{2,q}`, `λ₁((−1,1);q)` and the profile
//! `−g'' = g^{q−1}` on `(−1,1)`.
//!
//! All solves use the 3-point Laplacian on a uniform grid with `n` cells and a tridiagonal
//! (Thomas) solver.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default cell count for the constants; Richardson extrapolation uses `n` and `2n`.
pub const DEFAULT_CELLS: usize = 1024;

const MIN_CELLS: usize = 256;
const TOL: f64 = 1e-13;

fn check_q(q: f64) -> Result<()> {
    if (1.0..=2.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "q must lie in [1, 2], got {q}"
        )))
    }
}

fn check_cells(n: usize) -> Result<()> {
    if n >= MIN_CELLS {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "need at least {MIN_CELLS} cells, got {n}"
        )))
    }
}

/// Solves the symmetric tridiagonal system with diagonal `diag` and constant off-diagonal
/// `off`.
fn thomas(diag: &[f64], off: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    c[0] = off / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off * c[i - 1];
        c[i] = off / denom;
        d[i] = (rhs[i] - off * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// `−u''` with zero boundary values.
fn neg_second_difference(u: &[f64], h: f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let l = if i > 0 { u[i - 1] } else { 0.0 };
            let r = if i + 1 < n { u[i + 1] } else { 0.0 };
            (2.0 * u[i] - l - r) / (h * h)
        })
        .collect()
}

fn symmetrize(u: &mut [f64]) {
    let n = u.len();
    for i in 0..n / 2 {
        let m = 0.5 * (u[i] + u[n - 1 - i]);
        u[i] = m;
        u[n - 1 - i] = m;
    }
}

fn energy(u: &[f64], h: f64) -> f64 {
    let n = u.len();
    let mut s = u[0] * u[0] + u[n - 1] * u[n - 1];
    for i in 1..n {
        s += (u[i] - u[i - 1]).powi(2);
    }
    s / h
}

fn lq(u: &[f64], q: f64, h: f64) -> f64 {
    u.iter().map(|v| v.abs().powf(q)).sum::<f64>() * h
}

/// Discrete solution on an interval of length `len` with `n` cells.
struct Solve1D {
    lambda: f64,
    /// Solution of `−u'' = u^{q−1}` (torsion function at `q = 1`, L²-normalized
    /// eigenfunction at `q = 2`), interior nodes only.
    values: Vec<f64>,
}

fn solve_interval(q: f64, len: f64, n: usize) -> Result<Solve1D> {
    check_q(q)?;
    let m = n - 1;
    let h = len / n as f64;
    let a = 2.0 / (h * h);
    let off = -1.0 / (h * h);
    let plain = vec![a; m];
    let torsion = thomas(&plain, off, &vec![1.0; m]);
    if q == 1.0 {
        let t = torsion.iter().sum::<f64>() * h;
        return Ok(Solve1D {
            lambda: 1.0 / t,
            values: torsion,
        });
    }
    if q == 2.0 {
        let mut u = torsion;
        let mut lambda = f64::INFINITY;
        for _ in 1..=500 {
            let mut v = thomas(&plain, off, &u);
            symmetrize(&mut v);
            let nv = (v.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
            v.iter_mut().for_each(|x| *x /= nv);
            let new = energy(&v, h);
            u = v;
            if (new - lambda).abs() <= TOL * new {
                return Ok(Solve1D {
                    lambda: new,
                    values: u,
                });
            }
            lambda = new;
        }
        return Err(Error::NoConvergence {
            solver: "1-D inverse iteration",
            iterations: 500,
            residual: f64::NAN,
        });
    }

    let sup = torsion.iter().cloned().fold(0.0, f64::max);
    let mut v: Vec<f64> = torsion.iter().map(|x| x / sup).collect();
    let mut iterations = 0;
    for _ in 0..200 {
        iterations += 1;
        let rhs: Vec<f64> = v.iter().map(|x| x.powf(q - 1.0)).collect();
        let mut z = thomas(&plain, off, &rhs);
        symmetrize(&mut z);
        let zmax = z.iter().cloned().fold(0.0, f64::max);
        let diff = v
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - b / zmax).abs())
            .fold(0.0, f64::max);
        v = z.into_iter().map(|x| x / zmax).collect();
        if diff <= 1e-4 {
            break;
        }
    }
    let av = neg_second_difference(&v, h);
    let mu = v.iter().zip(&av).map(|(a, b)| a * b).sum::<f64>()
        / v.iter().map(|x| x.powf(q)).sum::<f64>();
    let mut residual = f64::INFINITY;
    for _ in 0..100 {
        iterations += 1;
        let av = neg_second_difference(&v, h);
        let r: Vec<f64> = av
            .iter()
            .zip(&v)
            .map(|(a, x)| a - mu * x.powf(q - 1.0))
            .collect();
        let scale = v.iter().map(|x| mu * x.powf(q - 1.0)).fold(0.0, f64::max);
        residual = r.iter().map(|x| x.abs()).fold(0.0, f64::max) / scale;
        if residual <= TOL * 10.0 {
            break;
        }
        let diag: Vec<f64> = v
            .iter()
            .map(|x| a - mu * (q - 1.0) * x.powf(q - 2.0))
            .collect();
        let neg_r: Vec<f64> = r.iter().map(|x| -x).collect();
        let delta = thomas(&diag, off, &neg_r);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = v.iter().zip(&delta).map(|(x, d)| x + t * d).collect();
            if trial.iter().all(|&x| x > 0.0) || t < 1e-6 {
                v = trial;
                break;
            }
            t *= 0.5;
        }
        symmetrize(&mut v);
    }
    if residual > 1e-9 {
        return Err(Error::NoConvergence {
            solver: "1-D Lane-Emden Newton",
            iterations,
            residual,
        });
    }
    let e_v = energy(&v, h);
    let lambda = mu.powf(2.0 / q) * e_v.powf(-(2.0 - q) / q);
    let scale = (-mu.ln() / (2.0 - q)).exp();
    let values = v.into_iter().map(|x| x * scale).collect();
    Ok(Solve1D { lambda, values })
}

fn extrapolated_lambda(q: f64, len: f64, n: usize) -> Result<f64> {
    let coarse = solve_interval(q, len, n)?.lambda;
    let fine = solve_interval(q, len, 2 * n)?.lambda;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `π_{2,q} = λ₁((0,1);q)^{1/2}`, extrapolated from `n` and `2n` cells.
pub fn pi_2q(q: f64, n: usize) -> Result<f64> {
    check_q(q)?;
    check_cells(n)?;
    Ok(extrapolated_lambda(q, 1.0, n)?.sqrt())
}

/// `λ₁((−1,1);q) = π_{2,q}² 2^{−(2+q)/q}`.
pub fn lambda1_interval(q: f64) -> Result<f64> {
    let p = pi_2q(q, DEFAULT_CELLS)?;
    Ok(p * p * 2f64.powf(-(2.0 + q) / q))
}

/// `λ₁((−1,1);q)` by a direct solve on `(−1,1)`, extrapolated from `n` and `2n` cells.
pub fn lambda1_interval_direct(q: f64, n: usize) -> Result<f64> {
    check_q(q)?;
    check_cells(n)?;
    extrapolated_lambda(q, 2.0, n)
}

/// One row of the constants table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConstantsRow {
    pub q: f64,
    pub pi_2q: f64,
    pub lambda1_interval: f64,
}

pub fn constants_row(q: f64) -> Result<ConstantsRow> {
    let p = pi_2q(q, DEFAULT_CELLS)?;
    Ok(ConstantsRow {
        q,
        pi_2q: p,
        lambda1_interval: p * p * 2f64.powf(-(2.0 + q) / q),
    })
}

/// Even positive solution of `−g'' = g^{q−1}` on `(−1,1)` with `g(±1) = 0`.
#[derive(Clone, Debug)]
pub struct Profile1D {
    pub q: f64,
    /// Number of cells; nodes sit at `−1 + k h`, `k = 1, …, n − 1`.
    pub n: usize,
    pub h: f64,
    pub values: Vec<f64>,
}

impl Profile1D {
    pub fn position(&self, k: usize) -> f64 {
        -1.0 + (k + 1) as f64 * self.h
    }

    fn value(&self, k: isize) -> f64 {
        if k < 0 || k as usize >= self.values.len() {
            0.0
        } else {
            self.values[k as usize]
        }
    }

    /// `g` at `τ ∈ [−1, 1]`, piecewise linear.
    pub fn eval(&self, tau: f64) -> f64 {
        let s = ((tau.clamp(-1.0, 1.0) + 1.0) / self.h).min(self.n as f64);
        let c = (s.floor() as isize).min(self.n as isize - 1);
        let frac = s - c as f64;
        (1.0 - frac) * self.value(c - 1) + frac * self.value(c)
    }

    /// `g'` at `τ`, linear interpolation of the cell differences placed at cell midpoints.
    pub fn derivative(&self, tau: f64) -> f64 {
        let slope = |c: isize| -> f64 {
            let c = c.clamp(0, self.n as isize - 1);
            (self.value(c) - self.value(c - 1)) / self.h
        };
        let s = (tau.clamp(-1.0, 1.0) + 1.0) / self.h - 0.5;
        let c = s.floor();
        let frac = s - c;
        let c = c as isize;
        (1.0 - frac) * slope(c) + frac * slope(c + 1)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// `∫_{−1}^{1} |g'|²`.
    pub fn dirichlet_integral(&self) -> f64 {
        energy(&self.values, self.h)
    }

    /// `∫_{−1}^{0} |g'|²` (half of the total, by symmetry).
    pub fn half_dirichlet_integral(&self) -> f64 {
        0.5 * self.dirichlet_integral()
    }

    /// `∫_{−1}^{1} |g|^q`.
    pub fn lq_integral(&self) -> f64 {
        lq(&self.values, self.q, self.h)
    }
}

/// Profile for `q ∈ [1, 2)` on `n ≥ 256` cells (`n` even, so that `τ = 0` is a node).
/// At `q = 1` this is the torsion function `(1 − τ²)/2`.
pub fn solve_g(q: f64, n: usize) -> Result<Profile1D> {
    if !(1.0..2.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "profile needs 1 ≤ q < 2, got {q}"
        )));
    }
    check_cells(n)?;
    let n = n + n % 2;
    let sol = solve_interval(q, 2.0, n)?;
    Ok(Profile1D {
        q,
        n,
        h: 2.0 / n as f64,
        values: sol.values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn thomas_solves_tridiagonal() {
        let diag = vec![4.0, 5.0, 6.0, 7.0];
        let x = thomas(&diag, -1.0, &[1.0, 2.0, 3.0, 4.0]);
        let r = [
            4.0 * x[0] - x[1],
            -x[0] + 5.0 * x[1] - x[2],
            -x[1] + 6.0 * x[2] - x[3],
            -x[2] + 7.0 * x[3],
        ];
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn pi_endpoints() {
        assert!((pi_2q(2.0, 256).unwrap() - PI).abs() < 1e-4);
        assert!((pi_2q(1.0, 256).unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-4);
        assert!(pi_2q(1.5, 100).is_err());
        assert!(pi_2q(2.5, 256).is_err());
    }

    #[test]
    fn pi_is_monotone_in_q() {
        let mut last = f64::INFINITY;
        for k in 0..=10 {
            let q = 1.0 + k as f64 * 0.1;
            let p = pi_2q(q, 256).unwrap();
            assert!(p < last, "q = {q}");
            last = p;
        }
        let mid = pi_2q(1.5, 256).unwrap();
        assert!(mid > PI && mid < 2.0 * 3f64.sqrt());
    }

    #[test]
    fn interval_identity() {
        assert!((lambda1_interval(2.0).unwrap() - PI * PI / 4.0).abs() < 1e-6);
        assert!((lambda1_interval(1.0).unwrap() - 1.5).abs() < 1e-6);
        for q in [1.25, 1.5, 1.75] {
            let direct = lambda1_interval_direct(q, 512).unwrap();
            let identity = lambda1_interval(q).unwrap();
            assert!((direct - identity).abs() / identity < 1e-3, "q = {q}");
        }
    }

    #[test]
    fn profile_identities() {
        for q in [1.25, 1.5, 1.75] {
            let g = solve_g(q, 1024).unwrap();
            let lam = lambda1_interval(q).unwrap();
            let expected = 0.5 * (1.0 / lam).powf(q / (2.0 - q));
            assert!(
                (g.half_dirichlet_integral() - expected).abs() / expected < 1e-3,
                "q = {q}"
            );
            let (e, l) = (g.dirichlet_integral(), g.lq_integral());
            assert!((e - l).abs() / e < 1e-3);
            assert!((g.eval(0.0) - g.max()).abs() < 1e-12);
            assert!(g.derivative(0.0).abs() < 1e-8);
        }
    }

    #[test]
    fn profile_shape() {
        let g = solve_g(1.5, 512).unwrap();
        let n = g.values.len();
        for k in 0..n {
            assert!(g.values[k] > 0.0);
            assert!((g.values[k] - g.values[n - 1 - k]).abs() < 1e-8 * g.max());
        }
        for k in 1..n - 1 {
            assert!(g.values[k - 1] + g.values[k + 1] <= 2.0 * g.values[k] + 1e-15);
        }
        for k in 1..n / 2 {
            assert!(g.values[k] > g.values[k - 1]);
        }
        assert!(g.derivative(-0.5) > 0.0);
        assert!(solve_g(2.0, 512).is_err());
    }

    #[test]
    fn torsion_profile_is_exact() {
        let g = solve_g(1.0, 256).unwrap();
        for k in 0..g.values.len() {
            let t = g.position(k);
            assert!((g.values[k] - (1.0 - t * t) / 2.0).abs() < 1e-12);
        }
        assert!((g.derivative(-0.5) - 0.5).abs() < 1e-12);
    }
}
