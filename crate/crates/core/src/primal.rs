//! Primal solvers for `λ₁(Ω;q)`: torsion (`q = 1`), the sublinear Lane–Emden equation
//! (`1 < q < 2`) and the Dirichlet eigenvalue problem (`q = 2`).

use std::sync::Arc;

use serde::Serialize;

use crate::convex::f_q;
use crate::elliptic::{
    apply_laplacian, cg_iteration_cap, conjugate_gradient, dirichlet_energy, face_gradient,
    neg_laplacian_into, solve_poisson_from, ScalarField,
};
use crate::error::{Error, Result};
use crate::geometry::GridDomain;

/// Default convergence tolerance of the primal solvers.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Result of a primal solve.
#[derive(Clone, Debug)]
pub struct FrequencySolution {
    pub q: f64,
    /// Positive extremal: the torsion function, the Lane–Emden solution, or the
    /// L²-normalized eigenfunction at `q = 2`. Scaled by `e^{-log_scale}` when the
    /// Lane–Emden solution itself is not representable in `f64`.
    pub w: ScalarField,
    /// Natural log of the factor taking `w` to the extremal; zero unless `q` is so close
    /// to 2 that the extremal under- or overflows, in which case `w` has maximum 1.
    pub log_scale: f64,
    pub lambda1: f64,
    /// The same quantity by an independent formula.
    pub lambda1_alt: f64,
    /// `max (2/q)∫|φ|^q − ∫|∇φ|²`; `None` at `q = 2` or when it is not representable.
    pub primal_max: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// JSON record of a [`FrequencySolution`] without the field.
#[derive(Clone, Debug, Serialize)]
pub struct SolutionRecord {
    pub q: f64,
    pub lambda1: f64,
    pub lambda1_alt: f64,
    pub primal_max: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub h: f64,
}

impl FrequencySolution {
    pub fn record(&self) -> SolutionRecord {
        SolutionRecord {
            q: self.q,
            lambda1: self.lambda1,
            lambda1_alt: self.lambda1_alt,
            primal_max: self.primal_max,
            iterations: self.iterations,
            residual: self.residual,
            h: self.w.domain().h(),
        }
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        self.w.domain()
    }

    /// `1/λ₁`, the value certified by the dual side.
    pub fn reciprocal(&self) -> f64 {
        1.0 / self.lambda1
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tolerance must lie in (0, 1), got {tol}"
        )))
    }
}

fn cg_tol(tol: f64) -> f64 {
    (1e-2 * tol).clamp(1e-13, 1e-10)
}

fn check_positive(w: &ScalarField) -> Result<()> {
    match w.values().iter().position(|&v| !(v > 0.0)) {
        Some(node) => Err(Error::NonPositive {
            node,
            value: w.values()[node],
        }),
        None => Ok(()),
    }
}

fn lq_integral(u: &[f64], q: f64, h: f64) -> f64 {
    u.iter().map(|v| v.abs().powf(q)).sum::<f64>() * h * h
}

fn l2_norm(u: &[f64]) -> f64 {
    u.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Discrete Rayleigh quotient `Σ_faces |Du|² h² / (Σ |u|^q h²)^{2/q}`.
pub fn rayleigh(u: &ScalarField, q: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "q must lie in [1, 2], got {q}"
        )));
    }
    let denom = lq_integral(u.values(), q, u.domain().h());
    if denom == 0.0 {
        return Err(Error::InvalidArgument(
            "Rayleigh quotient of the zero field".into(),
        ));
    }
    Ok(dirichlet_energy(u) / denom.powf(2.0 / q))
}

/// Solves `−Δw = 1`; `λ₁(Ω;1) = 1/T` with `T = Σ w h²`.
pub fn solve_torsion(dom: &Arc<GridDomain>, tol: f64) -> Result<FrequencySolution> {
    check_tol(tol)?;
    let one = ScalarField::constant(dom.clone(), 1.0);
    let (w, report) = solve_poisson_from(&one, None, cg_tol(tol))?;
    check_positive(&w)?;
    let t = w.integral();
    let energy = dirichlet_energy(&w);
    Ok(FrequencySolution {
        q: 1.0,
        lambda1: 1.0 / t,
        lambda1_alt: rayleigh(&w, 1.0)?,
        primal_max: Some(2.0 * t - energy),
        iterations: report.iterations,
        residual: report.relative_residual,
        w,
        log_scale: 0.0,
    })
}

/// Inverse power iteration for the smallest Dirichlet eigenvalue.
///
/// `lambda1` is the Rayleigh quotient of the final iterate, `lambda1_alt` the norm ratio
/// `‖u_k‖/‖A⁻¹u_k‖` of the last two iterates. Stops once the Rayleigh quotient changes by
/// at most `tol` (relative) and the eigen-residual `‖Au − λu‖/λ‖u‖` is at most `tol`.
pub fn solve_eigen(dom: &Arc<GridDomain>, tol: f64) -> Result<FrequencySolution> {
    check_tol(tol)?;
    let h = dom.h();
    let normalize = |v: &mut [f64]| {
        let n = l2_norm(v) * h;
        v.iter_mut().for_each(|x| *x /= n);
    };
    let one = ScalarField::constant(dom.clone(), 1.0);
    let (start, _) = solve_poisson_from(&one, None, cg_tol(tol))?;
    let mut u = start.into_values();
    normalize(&mut u);
    let mut lambda_prev = f64::INFINITY;
    let mut lambda = f64::INFINITY;
    let mut tmp = vec![0.0; u.len()];
    let max_iter = 1000;
    let cap = cg_iteration_cap(u.len());
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let mut v: Vec<f64> = if lambda.is_finite() {
            u.iter().map(|x| x / lambda).collect()
        } else {
            vec![0.0; u.len()]
        };
        conjugate_gradient(
            |x, out| neg_laplacian_into(dom, x, out),
            None,
            &u,
            &mut v,
            cg_tol(tol),
            cap,
        )?;
        let lambda_alt = 1.0 / (l2_norm(&v) * h);
        u = v;
        normalize(&mut u);
        if u.iter().sum::<f64>() < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
        neg_laplacian_into(dom, &u, &mut tmp);
        lambda = u.iter().zip(&tmp).map(|(a, b)| a * b).sum::<f64>() * h * h;
        residual = tmp
            .iter()
            .zip(&u)
            .map(|(au, x)| (au - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt()
            * h
            / lambda;
        if (lambda - lambda_prev).abs() <= tol * lambda && residual <= tol {
            let w = ScalarField::new(dom.clone(), u)?;
            check_positive(&w)?;
            return Ok(FrequencySolution {
                q: 2.0,
                lambda1: rayleigh(&w, 2.0)?,
                lambda1_alt: lambda_alt,
                primal_max: None,
                iterations: it,
                residual,
                w,
                log_scale: 0.0,
            });
        }
        lambda_prev = lambda;
    }
    Err(Error::NoConvergence {
        solver: "inverse power iteration",
        iterations: max_iter,
        residual,
    })
}

/// Solves `−Δw = w^{q−1}`, `1 < q < 2`, for the unique positive `w`.
///
/// A normalized fixed-point iteration `v ← (−Δ)⁻¹ v^{q−1} / sup` started from the torsion
/// function fixes the shape and the multiplier `μ` in `−Δv = μ v^{q−1}`; Newton's method
/// then solves that equation for fixed `μ`, using that the Jacobian
/// `−Δ − μ(q−1) diag(v^{q−2})` is a symmetric M-matrix near the solution. Finally
/// `w = μ^{−1/(2−q)} v`. The extremal is stored explicitly, so `q` must stay far enough
/// from 2 for that scale to be representable.
pub fn solve_sublinear(dom: &Arc<GridDomain>, q: f64, tol: f64) -> Result<FrequencySolution> {
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "sublinear solver needs 1 < q < 2, got {q}"
        )));
    }
    check_tol(tol)?;
    let h = dom.h();
    let n = dom.len();
    let cap = cg_iteration_cap(n);
    let lin = cg_tol(tol);

    let one = ScalarField::constant(dom.clone(), 1.0);
    let (torsion, _) = solve_poisson_from(&one, None, lin)?;
    let sup = torsion.sup_norm();
    let mut v: Vec<f64> = torsion.values().iter().map(|x| x / sup).collect();

    // fixed-point phase
    let mut z = vec![0.0; n];
    let mut iterations = 0;
    for _ in 0..60 {
        iterations += 1;
        let rhs: Vec<f64> = v.iter().map(|x| x.powf(q - 1.0)).collect();
        conjugate_gradient(
            |x, out| neg_laplacian_into(dom, x, out),
            None,
            &rhs,
            &mut z,
            lin,
            cap,
        )?;
        let zmax = z.iter().cloned().fold(0.0, f64::max);
        let diff = v
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - b / zmax).abs())
            .fold(0.0, f64::max);
        v.iter_mut().zip(&z).for_each(|(a, b)| *a = b / zmax);
        if diff <= 1e-3 {
            break;
        }
    }
    if v.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Stalled("fixed-point iterate lost positivity".into()));
    }

    // best-fit multiplier for the current shape
    let mut av = vec![0.0; n];
    neg_laplacian_into(dom, &v, &mut av);
    let mu = v.iter().zip(&av).map(|(a, b)| a * b).sum::<f64>()
        / v.iter().map(|x| x.powf(q)).sum::<f64>();

    // Newton phase
    let res_of = |v: &[f64], av: &mut Vec<f64>| -> (Vec<f64>, f64) {
        neg_laplacian_into(dom, v, av);
        let source: Vec<f64> = v.iter().map(|x| mu * x.powf(q - 1.0)).collect();
        let r: Vec<f64> = av.iter().zip(&source).map(|(a, s)| a - s).collect();
        let rel = l2_norm(&r) / l2_norm(&source);
        (r, rel)
    };
    let (mut r, mut residual) = res_of(&v, &mut av);
    let max_newton = 100;
    let mut newton = 0;
    let mut step = f64::INFINITY;
    while !(residual <= tol && step <= tol.sqrt()) {
        if newton == max_newton {
            return Err(Error::NoConvergence {
                solver: "Lane-Emden Newton",
                iterations: newton,
                residual,
            });
        }
        newton += 1;
        let diag_extra: Vec<f64> = v.iter().map(|x| mu * (q - 1.0) * x.powf(q - 2.0)).collect();
        let inv_diag: Vec<f64> = diag_extra
            .iter()
            .map(|d| 1.0 / (4.0 / (h * h) - d).max(1e-300))
            .collect();
        let apply = |x: &[f64], out: &mut [f64]| {
            neg_laplacian_into(dom, x, out);
            out.iter_mut()
                .zip(x)
                .zip(&diag_extra)
                .for_each(|((o, xi), d)| *o -= d * xi);
        };
        let neg_r: Vec<f64> = r.iter().map(|x| -x).collect();
        let mut delta = vec![0.0; n];
        conjugate_gradient(apply, Some(&inv_diag), &neg_r, &mut delta, lin, cap)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = v.iter().zip(&delta).map(|(a, d)| a + t * d).collect();
            if trial.iter().all(|&x| x > 0.0) {
                let (r_new, res_new) = res_of(&trial, &mut av);
                if res_new < residual || t < 1e-3 {
                    let vmax = trial.iter().cloned().fold(0.0, f64::max);
                    step = delta.iter().map(|d| (t * d).abs()).fold(0.0, f64::max) / vmax;
                    v = trial;
                    r = r_new;
                    residual = res_new;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::Stalled(format!(
                "Newton line search failed at residual {residual:.3e}"
            )));
        }
    }
    iterations += newton;

    let v_field = ScalarField::new(dom.clone(), v)?;
    let e_v = dirichlet_energy(&v_field);
    let s_v = lq_integral(v_field.values(), q, h);
    let lambda1 = mu.powf(2.0 / q) * e_v.powf(-(2.0 - q) / q);
    let lambda1_alt = rayleigh(&v_field, q)?;
    let log_c = -mu.ln() / (2.0 - q);
    let scale = log_c.exp();
    let primal_max = (2.0 / q) * (q * log_c + s_v.ln()).exp() - (2.0 * log_c + e_v.ln()).exp();
    let representable = scale.is_normal() && scale.is_finite() && primal_max.is_normal();
    let (w, log_scale, primal_max) = if representable {
        (v_field.map(|x| x * scale), 0.0, Some(primal_max))
    } else {
        let vmax = v_field.max();
        (v_field.map(|x| x / vmax), log_c + vmax.ln(), None)
    };
    check_positive(&w)?;
    Ok(FrequencySolution {
        q,
        w,
        log_scale,
        lambda1,
        lambda1_alt,
        primal_max,
        iterations,
        residual,
    })
}

/// Dispatches on `q`: torsion at 1, eigenvalue at 2, Lane–Emden in between.
pub fn solve(dom: &Arc<GridDomain>, q: f64, tol: f64) -> Result<FrequencySolution> {
    if q == 1.0 {
        solve_torsion(dom, tol)
    } else if q == 2.0 {
        solve_eigen(dom, tol)
    } else if q > 1.0 && q < 2.0 {
        solve_sublinear(dom, q, tol)
    } else {
        Err(Error::InvalidArgument(format!(
            "q must lie in [1, 2], got {q}"
        )))
    }
}

/// Extrapolates `λ(h) = λ + C h^order` from spacings `h` (coarse) and `h/ratio` (fine).
pub fn richardson(coarse: f64, fine: f64, ratio: f64, order: f64) -> f64 {
    let r = ratio.powf(order);
    (r * fine - coarse) / (r - 1.0)
}

/// Stolarsky mean `((x^p − y^p) / (p (x − y)))^{1/(p−1)}` of two nonnegative numbers, `0 < p < 1`.
pub(crate) fn stolarsky_mean(x: f64, y: f64, p: f64) -> f64 {
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    if hi == 0.0 {
        return 0.0;
    }
    if hi - lo <= 1e-6 * hi {
        return 0.5 * (lo + hi);
    }
    ((hi.powf(p) - lo.powf(p)) / (p * (hi - lo))).powf(1.0 / (p - 1.0))
}

/// `(2/q) Σ ψ h² − (1/q²) Σ_faces F_q(ψ̄, Dψ) h²`, with `Dψ` the face difference and `ψ̄`
/// the Stolarsky mean of index `1/q` of its two endpoint values (exterior nodes read as
/// zero). That mean makes the face term equal `q² (Dψ^{1/q})²`, so the functional at
/// `ψ = w^q` is `(2/q) Σ w^q h² − Σ |Dw|² h²` exactly. Returns `+∞` if some face leaves the
/// effective domain of `F_q`.
pub fn hidden_functional(psi: &ScalarField, q: f64) -> Result<f64> {
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "hidden functional needs 1 < q < 2, got {q}"
        )));
    }
    if let Some(node) = psi.values().iter().position(|&v| v < 0.0) {
        return Err(Error::Domain(format!(
            "psi is negative ({:.3e}) at node {node}",
            psi.values()[node]
        )));
    }
    let dom = psi.domain();
    let h = dom.h();
    let grad = face_gradient(psi);
    let val = |k: Option<usize>| k.map_or(0.0, |k| psi.values()[k]);
    let mut penalty = 0.0;
    for (face, &g) in dom.faces().iter().zip(grad.values()) {
        let mean = stolarsky_mean(val(face.lo()), val(face.hi()), 1.0 / q);
        match f_q(q, mean, [g, 0.0]).finite() {
            Some(v) => penalty += v,
            None => return Ok(f64::INFINITY),
        }
    }
    Ok((2.0 / q) * psi.integral() - penalty * h * h / (q * q))
}

/// Residual `−Δw − w^{q−1}` (or `−Δw − 1`, `−ΔU − λU`) relative to the source, in l².
pub fn equation_residual(sol: &FrequencySolution) -> f64 {
    let lap = apply_laplacian(&sol.w);
    let q = sol.q;
    let source: Vec<f64> = sol
        .w
        .values()
        .iter()
        .map(|&x| {
            if q == 2.0 {
                sol.lambda1 * x
            } else {
                x.powf(q - 1.0)
            }
        })
        .collect();
    let r: Vec<f64> = lap
        .values()
        .iter()
        .zip(&source)
        .map(|(a, s)| a - s)
        .collect();
    l2_norm(&r) / l2_norm(&source)
}
