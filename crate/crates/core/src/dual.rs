//! Dual certificates `(f, φ)` with `−div φ + f ≥ 1` and the dual objective built on `G_q`.
//!
//! Pairs live on the staggered grid: `f` on nodes, `φ` as one normal component per cell
//! face. The discrete constraint is the weak form
//!
//! ```text
//! Σ_faces φ_e (Dψ)_e h² + Σ_nodes f ψ h²  ≥  Σ_nodes ψ h²     for all ψ ≥ 0,
//! ```
//!
//! which, tested against single-node hats, is the nodewise inequality
//! `−div φ + f ≥ 1` for the face divergence.
//!
//! The constructed pairs discretize `φ₀ = ∇w / w^{q−1}` and `f₀ = −(q−1)|∇w|²/w^q` (and
//! their `q = 1`, `q = 2` analogues) so that the constraint margin at every node is the
//! relative residual of the discrete Euler–Lagrange equation. Each face contribution to
//! `f` is a nonnegative multiple of the face flux, so `f ≤ 0` and `f` vanishes exactly
//! where `φ` does.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::elliptic::{
    divergence, face_divergence, face_gradient, gradient, FaceField, ScalarField, VectorField,
};
use crate::error::{Error, Result};
use crate::geometry::{Axis, GridDomain};
use crate::primal::FrequencySolution;

/// Boundary layer (in cells) kept out of the `1 < q < 2` objective.
pub const DEFAULT_TRIM: u32 = 2;

/// Boundary layer kept out of the `q = 2` objective: `⌈√(R/h)⌉` cells for inradius `R`.
///
/// The discrete `G_2` overshoots `1/λ₁` by roughly `0.45/d²` at depth `d` (in cells),
/// independently of `h`, so a fixed cell count would never converge; this layer shrinks
/// like `√h` in physical units while its depth in cells grows.
pub fn eigen_trim(dom: &GridDomain) -> u32 {
    let r = dom.summary().inradius;
    ((r / dom.h()).sqrt().ceil() as u32).max(DEFAULT_TRIM)
}

/// Pairs with a feasibility residual at least `−FEASIBILITY_TOL` are accepted.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Number of random bumps in the feasibility test family.
pub const RANDOM_BUMPS: usize = 100;

/// A dual candidate `(f, φ)`.
#[derive(Clone, Debug)]
pub struct DualPair {
    pub q: f64,
    pub f: ScalarField,
    pub phi: FaceField,
    /// Most negative relative margin of the weak constraint over the test family.
    pub feasibility_residual: f64,
    /// Nodes with depth `≤ trim` are excluded from the objective.
    pub trim: u32,
}

impl DualPair {
    /// Assembles a pair and evaluates its feasibility residual.
    pub fn new(q: f64, f: ScalarField, phi: FaceField, trim: u32) -> Result<Self> {
        if !(1.0..=2.0).contains(&q) {
            return Err(Error::InvalidArgument(format!(
                "q must lie in [1, 2], got {q}"
            )));
        }
        if !Arc::ptr_eq(f.domain(), phi.domain()) {
            return Err(Error::DomainMismatch);
        }
        let mut pair = DualPair {
            q,
            f,
            phi,
            feasibility_residual: f64::NAN,
            trim,
        };
        pair.feasibility_residual = feasibility_residual(&pair, 0x5eed);
        Ok(pair)
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        self.f.domain()
    }

    pub fn is_feasible(&self) -> bool {
        self.feasibility_residual >= -FEASIBILITY_TOL
    }

    /// Nodal `φ` (average of the two faces along each axis), for export.
    pub fn phi_nodal(&self) -> VectorField {
        self.phi.to_nodal()
    }

    /// Nodewise margin `−div φ + f − 1`.
    pub fn margin(&self) -> ScalarField {
        let div = face_divergence(&self.phi);
        let values = div
            .values()
            .iter()
            .zip(self.f.values())
            .map(|(d, f)| -d + f - 1.0)
            .collect();
        ScalarField::new(self.domain().clone(), values).expect("same domain")
    }
}

/// Primal and dual values for one `(domain, q, h)`.
#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub q: f64,
    /// `1/λ₁(Ω;q)` from the primal solver.
    pub primal_value: f64,
    pub dual_value: f64,
    /// `dual_value − primal_value`.
    pub gap: f64,
    /// `gap / primal_value`, i.e. `gap · λ₁`.
    pub gap_relative: f64,
    pub feasibility_residual: f64,
    pub h: f64,
}

impl DualityReport {
    /// Whether `|gap_relative|` stays within the budget for this `q` and the pair is feasible.
    pub fn within_budget(&self) -> bool {
        self.feasibility_residual >= -FEASIBILITY_TOL
            && self.gap_relative.abs() <= gap_budget(self.q)
    }
}

/// Relative gap budget: 1% for torsion, 2% for the eigenvalue, 3% in between.
pub fn gap_budget(q: f64) -> f64 {
    if q == 1.0 {
        0.01
    } else if q == 2.0 {
        0.02
    } else {
        0.03
    }
}

/// `k_a(t) = (1 − t^a)/a − (1 − t)` for `a > 0`, `k_0(t) = −ln t − (1 − t)`; convex in `t`,
/// nonnegative, zero only at `t = 1`.
fn face_defect(t: f64, a: f64) -> f64 {
    let e = t - 1.0;
    if e.abs() < 1e-4 {
        return (1.0 - a) * e * e / 2.0 + (1.0 - a) * (a - 2.0) * e * e * e / 6.0;
    }
    if a == 0.0 {
        -t.ln() - (1.0 - t)
    } else {
        (1.0 - t.powf(a)) / a - (1.0 - t)
    }
}

fn face_midpoint(dom: &GridDomain, e: usize) -> [f64; 2] {
    let face = dom.faces()[e];
    let half = 0.5 * dom.h();
    let (k, sign) = match face.lo() {
        Some(k) => (k, 1.0),
        None => (face.hi().expect("face has an interior node"), -1.0),
    };
    let p = dom.position(k);
    match face.axis {
        Axis::X => [p[0] + sign * half, p[1]],
        Axis::Y => [p[0], p[1] + sign * half],
    }
}

/// Samples `v` at face midpoints, keeping the normal component.
pub fn face_field_from_fn(dom: &Arc<GridDomain>, v: impl Fn(f64, f64) -> [f64; 2]) -> FaceField {
    let values = (0..dom.faces().len())
        .map(|e| {
            let m = face_midpoint(dom, e);
            let val = v(m[0], m[1]);
            match dom.faces()[e].axis {
                Axis::X => val[0],
                Axis::Y => val[1],
            }
        })
        .collect();
    FaceField::new(dom.clone(), values).expect("one value per face")
}

/// Builds `φ` and `f` from a positive nodal field `u`, a flux potential `pot(u)` and the
/// defect exponent `a`: `φ_e = κ D(pot(u))_e` on interior faces, `φ_e = κ D(u)_e / m_e` on
/// boundary faces with `m_e = boundary_mean(u_inside)`, and
/// `f_i = −κ Σ_faces (u_i^a k_a(u_j/u_i) or its boundary analogue) / h²`.
fn staggered_pair(
    u: &ScalarField,
    kappa: f64,
    a: f64,
    pot: impl Fn(f64) -> f64,
    boundary_scale: impl Fn(f64) -> f64,
    boundary_defect: f64,
) -> (ScalarField, FaceField) {
    let dom = u.domain().clone();
    let h = dom.h();
    let vals = u.values();
    let phi: Vec<f64> = dom
        .faces()
        .iter()
        .map(|face| match (face.lo(), face.hi()) {
            (Some(lo), Some(hi)) => kappa * (pot(vals[hi]) - pot(vals[lo])) / h,
            (Some(lo), None) => -kappa * boundary_scale(vals[lo]) / h,
            (None, Some(hi)) => kappa * boundary_scale(vals[hi]) / h,
            (None, None) => unreachable!("face without interior node"),
        })
        .collect();
    let weight = |x: f64| if a == 0.0 { 1.0 } else { x.powf(a) };
    let f: Vec<f64> = (0..dom.len())
        .map(|k| {
            let ui = vals[k];
            let sum: f64 = dom
                .neighbors(k)
                .iter()
                .map(|nb| match nb {
                    Some(j) => weight(ui) * face_defect(vals[*j] / ui, a),
                    None => weight(ui) * boundary_defect,
                })
                .sum();
            -kappa * sum / (h * h)
        })
        .collect();
    (
        ScalarField::new(dom.clone(), f).expect("nodal"),
        FaceField::new(dom, phi).expect("faces"),
    )
}

/// Re-chooses the flux through boundary faces, which enters the constraint of a single
/// node only, to minimize `G_q` at that node while keeping `−div φ + f = 1` there.
///
/// With inflow `β` on each of the node's `n_b` boundary faces, interior inflow `D`
/// (already divided by `h`) and interior share `P` of `|φ|²`, `G_q` is minimized by the
/// positive root of `n_b β² + q h (D − 1) β − (q − 1) P = 0`.
fn optimize_boundary_faces(f: &mut ScalarField, phi: &mut FaceField, q: f64) {
    let dom = f.domain().clone();
    let h = dom.h();
    let faces = dom.faces();
    for k in 0..dom.len() {
        let fk = dom.node_faces(k);
        let nb = fk.iter().filter(|&&e| faces[e].is_boundary()).count();
        if nb == 0 {
            continue;
        }
        let (mut d_int, mut p_int) = (0.0, 0.0);
        for (pos, &e) in fk.iter().enumerate() {
            if faces[e].is_boundary() {
                continue;
            }
            let inflow = if pos % 2 == 0 {
                phi.values()[e]
            } else {
                -phi.values()[e]
            };
            d_int += inflow / h;
            p_int += 0.5 * phi.values()[e].powi(2);
        }
        let nbf = nb as f64;
        let b = q * h * (d_int - 1.0);
        let beta = (-b + (b * b + 4.0 * nbf * (q - 1.0) * p_int).sqrt()) / (2.0 * nbf);
        for (pos, &e) in fk.iter().enumerate() {
            if faces[e].is_boundary() {
                phi.values_mut()[e] = if pos % 2 == 0 { beta } else { -beta };
            }
        }
        f.values_mut()[k] = 1.0 - d_int - nbf * beta / h;
    }
}

fn require_positive(w: &ScalarField) -> Result<()> {
    match w.values().iter().position(|&v| !(v > 0.0)) {
        Some(node) => Err(Error::NonPositive {
            node,
            value: w.values()[node],
        }),
        None => Ok(()),
    }
}

/// Torsion pair `φ = Dw`, `f = 0`.
pub fn build_pair_torsion(w: &ScalarField) -> Result<DualPair> {
    let phi = face_gradient(w);
    DualPair::new(1.0, ScalarField::zeros(w.domain().clone()), phi, 0)
}

/// Sub-homogeneous pair from the Lane–Emden solution `w` (`−Δw = w^{q−1}`):
/// `φ = D(w^{2−q})/(2−q)` and the matching `f ≤ 0`.
pub fn build_pair_sub(w: &ScalarField, q: f64) -> Result<DualPair> {
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "sub-homogeneous pair needs 1 < q < 2, got {q}"
        )));
    }
    require_positive(w)?;
    let a = 2.0 - q;
    let (mut f, mut phi) = staggered_pair(
        w,
        1.0,
        a,
        |x| x.powf(a) / a,
        |x| x.powf(a) / a,
        1.0 / a - 1.0,
    );
    optimize_boundary_faces(&mut f, &mut phi, q);
    DualPair::new(q, f, phi, DEFAULT_TRIM)
}

/// Homogeneous pair from the positive eigenfunction `U`: `φ = D(log U)/λ` on interior
/// faces; on boundary faces the logarithmic mean degenerates and the arithmetic mean
/// `U/2` is used instead.
pub fn build_pair_eigen(u: &ScalarField, lambda1: f64) -> Result<DualPair> {
    if !(lambda1 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue must be positive, got {lambda1}"
        )));
    }
    require_positive(u)?;
    let (mut f, mut phi) = staggered_pair(u, 1.0 / lambda1, 0.0, f64::ln, |_| 2.0, 1.0);
    optimize_boundary_faces(&mut f, &mut phi, 2.0);
    let trim = eigen_trim(u.domain());
    DualPair::new(2.0, f, phi, trim)
}

/// Dispatches on the solution's `q`.
pub fn build_pair(sol: &FrequencySolution) -> Result<DualPair> {
    if sol.log_scale != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "q = {} too close to 2: the extremal scale e^{:.1} is not representable",
            sol.q, sol.log_scale
        )));
    }
    if sol.q == 1.0 {
        build_pair_torsion(&sol.w)
    } else if sol.q == 2.0 {
        build_pair_eigen(&sol.w, sol.lambda1)
    } else {
        build_pair_sub(&sol.w, sol.q)
    }
}

/// Nodal `G_q(f, φ)` with `|φ|²` from [`FaceField::nodal_norms_squared`]; `+∞` off the
/// effective domain.
pub fn g_values(pair: &DualPair) -> Vec<f64> {
    let phi2 = pair.phi.nodal_norms_squared();
    let q = pair.q;
    pair.f
        .values()
        .iter()
        .zip(phi2.values())
        .map(|(&f, &p2)| {
            if f < 0.0 {
                p2.powf(q / 2.0) / (-f).powf(q - 1.0)
            } else if p2 == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

/// Objective value of a pair, split by the trusted region (depth `> trim`).
#[derive(Clone, Debug, Serialize)]
pub struct ObjectiveValue {
    /// The reported dual value: trusted nodes, plus for `1 < q < 2` the trimmed layer with
    /// each node's `G_q` replaced by that of its nearest trusted node.
    pub value: f64,
    /// Trusted nodes only.
    pub trusted: f64,
    /// `value − trusted` for `1 < q < 2`; for `q = 2`, the max of `G_2` over the trimmed layer.
    pub remainder: f64,
    /// The objective with every node's own `G_q`, no trimming.
    pub untrimmed: f64,
    /// Trusted nodes where `G_q = +∞`.
    pub infinite_nodes: Vec<usize>,
}

/// For every node, the nearest node of depth `> trim` in the 4-neighbour graph (itself if
/// trusted); `None` if no node is trusted.
fn nearest_trusted(dom: &GridDomain, trim: u32) -> Option<Vec<usize>> {
    let depth = dom.depth();
    let mut owner = vec![usize::MAX; dom.len()];
    let mut queue = std::collections::VecDeque::new();
    for k in 0..dom.len() {
        if depth[k] > trim {
            owner[k] = k;
            queue.push_back(k);
        }
    }
    if queue.is_empty() {
        return None;
    }
    while let Some(k) = queue.pop_front() {
        for j in dom.neighbors(k).into_iter().flatten() {
            if owner[j] == usize::MAX {
                owner[j] = owner[k];
                queue.push_back(j);
            }
        }
    }
    Some(owner)
}

/// The `q`-appropriate dual objective:
///
/// * `q = 1`: `Σ_faces φ² h²` (with `f ≤ 0` required);
/// * `1 < q < 2`: `(q−1)^{2(q−1)/q} (Σ G_q^{2/(2−q)} h²)^{(2−q)/q}`;
/// * `q = 2`: `max G_2` over trusted nodes.
///
/// `G_q` is unbounded-looking on the first grid layers because `φ` and `f` are singular at
/// the boundary while `G_q` is not; the trusted region keeps those layers out of the value.
pub fn dual_objective_detailed(pair: &DualPair) -> ObjectiveValue {
    let dom = pair.domain();
    let depth = dom.depth();
    let h2 = dom.h() * dom.h();
    let q = pair.q;
    if q == 1.0 {
        let infinite_nodes: Vec<usize> = pair
            .f
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &f)| f > 0.0)
            .map(|(k, _)| k)
            .collect();
        let value = if infinite_nodes.is_empty() {
            pair.phi.dot(&pair.phi)
        } else {
            f64::INFINITY
        };
        return ObjectiveValue {
            value,
            trusted: value,
            remainder: 0.0,
            untrimmed: value,
            infinite_nodes,
        };
    }
    let g = g_values(pair);
    let infinite_nodes: Vec<usize> = g
        .iter()
        .enumerate()
        .filter(|(k, v)| v.is_infinite() && depth[*k] > pair.trim)
        .map(|(k, _)| k)
        .collect();
    let owner = nearest_trusted(dom, pair.trim);
    if !infinite_nodes.is_empty() || owner.is_none() {
        let inf = f64::INFINITY;
        return ObjectiveValue {
            value: inf,
            trusted: inf,
            remainder: f64::NAN,
            untrimmed: inf,
            infinite_nodes,
        };
    }
    let owner = owner.expect("checked");
    if q == 2.0 {
        let (mut inside, mut outside) = (0.0f64, 0.0f64);
        for (k, &v) in g.iter().enumerate() {
            if depth[k] > pair.trim {
                inside = inside.max(v);
            } else {
                outside = outside.max(v);
            }
        }
        return ObjectiveValue {
            value: inside,
            trusted: inside,
            remainder: outside,
            untrimmed: inside.max(outside),
            infinite_nodes,
        };
    }
    let p = 2.0 / (2.0 - q);
    let power = |v: f64| {
        if v > 0.0 {
            (p * v.ln()).exp() * h2
        } else {
            0.0
        }
    };
    let (mut inside, mut extrapolated, mut all) = (0.0, 0.0, 0.0);
    for (k, &v) in g.iter().enumerate() {
        all += power(v);
        if depth[k] > pair.trim {
            inside += power(v);
        } else {
            extrapolated += power(g[owner[k]]);
        }
    }
    let c = (q - 1.0).powf(2.0 * (q - 1.0) / q);
    let norm = |s: f64| c * s.powf((2.0 - q) / q);
    let value = norm(inside + extrapolated);
    ObjectiveValue {
        value,
        trusted: norm(inside),
        remainder: value - norm(inside),
        untrimmed: norm(all),
        infinite_nodes,
    }
}

pub fn dual_objective(pair: &DualPair) -> f64 {
    dual_objective_detailed(pair).value
}

/// Weak-form left side `Σ_faces φ_e (Dψ)_e h² + Σ f ψ h²` for a test field given by its
/// nonzero entries.
fn weak_lhs(pair: &DualPair, psi: &[(usize, f64)], dense: Option<&[f64]>) -> f64 {
    let dom = pair.domain();
    let h = dom.h();
    let phi = pair.phi.values();
    let f = pair.f.values();
    let mut total = 0.0;
    match dense {
        Some(values) => {
            for (e, face) in dom.faces().iter().enumerate() {
                let lo = face.lo().map_or(0.0, |k| values[k]);
                let hi = face.hi().map_or(0.0, |k| values[k]);
                total += phi[e] * (hi - lo) * h;
            }
            for (k, v) in values.iter().enumerate() {
                total += f[k] * v * h * h;
            }
        }
        None => {
            for &(k, v) in psi {
                let faces = dom.node_faces(k);
                // ψ = v e_k: Dψ = −v/h on the +x/+y faces of k, +v/h on the −x/−y faces
                total += (phi[faces[0]] - phi[faces[1]] + phi[faces[2]] - phi[faces[3]]) * v * h;
                total += f[k] * v * h * h;
            }
        }
    }
    total
}

/// Most negative relative margin `(lhs(ψ) − Σψh²)/Σψh²` over all single-node hats and
/// [`RANDOM_BUMPS`] random nonnegative Gaussian bumps drawn from `seed`.
pub fn feasibility_residual(pair: &DualPair, seed: u64) -> f64 {
    let dom = pair.domain();
    let h2 = dom.h() * dom.h();
    let mut worst = f64::INFINITY;
    for k in 0..dom.len() {
        let r = (weak_lhs(pair, &[(k, 1.0)], None) - h2) / h2;
        worst = worst.min(r);
    }
    let s = dom.summary();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dom.len();
    for _ in 0..RANDOM_BUMPS {
        let center = dom.position(rng.gen_range(0..n));
        let width = rng.gen_range(0.05..0.5) * s.inradius.max(dom.h());
        let amp = rng.gen_range(0.1..10.0);
        let values: Vec<f64> = dom
            .positions()
            .map(|p| {
                let r2 = (p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2);
                amp * (-r2 / (2.0 * width * width)).exp()
            })
            .collect();
        let mass: f64 = values.iter().sum::<f64>() * h2;
        let r = (weak_lhs(pair, &[], Some(&values)) - mass) / mass;
        worst = worst.min(r);
    }
    worst
}

/// Compares the pair's dual value with `1/λ₁` from the primal solution.
pub fn weak_duality_certificate(sol: &FrequencySolution, pair: &DualPair) -> Result<DualityReport> {
    if !Arc::ptr_eq(sol.domain(), pair.domain()) {
        return Err(Error::DomainMismatch);
    }
    if sol.q != pair.q {
        return Err(Error::InvalidArgument(format!(
            "solution q = {} but pair q = {}",
            sol.q, pair.q
        )));
    }
    let primal = sol.reciprocal();
    let dual = dual_objective(pair);
    Ok(DualityReport {
        q: sol.q,
        primal_value: primal,
        dual_value: dual,
        gap: dual - primal,
        gap_relative: (dual - primal) / primal,
        feasibility_residual: pair.feasibility_residual,
        h: pair.domain().h(),
    })
}

/// Solves, builds the optimal pair and reports the gap.
pub fn certify(
    dom: &Arc<GridDomain>,
    q: f64,
    tol: f64,
) -> Result<(FrequencySolution, DualPair, DualityReport)> {
    let sol = crate::primal::solve(dom, q, tol)?;
    let pair = build_pair(&sol)?;
    let report = weak_duality_certificate(&sol, &pair)?;
    Ok((sol, pair, report))
}

/// The constant-divergence pair `φ = α(x₀ − x)`, `f = 1 − 2α`, with `α = q/2`.
pub fn affine_pair(dom: &Arc<GridDomain>, q: f64, x0: [f64; 2]) -> Result<DualPair> {
    let alpha = q / 2.0;
    let phi = face_field_from_fn(dom, |x, y| [alpha * (x0[0] - x), alpha * (x0[1] - y)]);
    let f = ScalarField::constant(dom.clone(), 1.0 - 2.0 * alpha);
    DualPair::new(q, f, phi, 0)
}

/// A divergence-free face field: the discrete curl of the stream function `s` sampled at
/// cell corners, with `s` cut to zero at corners touching nodes of depth `≤ keep_out`.
pub fn curl_field(dom: &Arc<GridDomain>, keep_out: u32, s: impl Fn(f64, f64) -> f64) -> FaceField {
    let h = dom.h();
    let depth = dom.depth();
    // corner (i, j) sits at node (i, j) + (h/2, h/2)
    let corner = |i: i64, j: i64| -> f64 {
        let around = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
        for (a, b) in around {
            if a < 0 || b < 0 {
                return 0.0;
            }
            match dom.interior_index(a as usize, b as usize) {
                Some(k) if depth[k] > keep_out => {}
                _ => return 0.0,
            }
        }
        let p = dom.node_position(i as usize, j as usize);
        s(p[0] + 0.5 * h, p[1] + 0.5 * h)
    };
    let values = dom
        .faces()
        .iter()
        .map(|face| {
            let (i, j) = match (face.lo(), face.hi()) {
                (Some(k), _) => {
                    let (i, j) = dom.node(k);
                    (i as i64, j as i64)
                }
                (None, Some(k)) => {
                    let (i, j) = dom.node(k);
                    match face.axis {
                        Axis::X => (i as i64 - 1, j as i64),
                        Axis::Y => (i as i64, j as i64 - 1),
                    }
                }
                (None, None) => unreachable!(),
            };
            match face.axis {
                Axis::X => (corner(i, j) - corner(i, j - 1)) / h,
                Axis::Y => -(corner(i, j) - corner(i - 1, j)) / h,
            }
        })
        .collect();
    FaceField::new(dom.clone(), values).expect("faces")
}

/// `pair` with `φ` replaced by `φ + η`; `f` unchanged.
pub fn perturbed(pair: &DualPair, eta: &FaceField) -> Result<DualPair> {
    if !Arc::ptr_eq(pair.domain(), eta.domain()) {
        return Err(Error::DomainMismatch);
    }
    let phi = pair
        .phi
        .values()
        .iter()
        .zip(eta.values())
        .map(|(a, b)| a + b)
        .collect();
    DualPair::new(
        pair.q,
        pair.f.clone(),
        FaceField::new(pair.domain().clone(), phi)?,
        pair.trim,
    )
}

/// The nodal pair `φ = ∇w/w^{q−1}`, `f = −(q−1)|∇w|²/w^q` with the nodal gradient;
/// for `q = 2` pass the eigenfunction and `λ₁` to get `φ = ∇U/(λU)`, `f = −|∇U|²/(λU²)`.
pub fn nodal_formula_pair(
    w: &ScalarField,
    q: f64,
    lambda1: Option<f64>,
) -> Result<(ScalarField, VectorField)> {
    require_positive(w)?;
    let g = gradient(w);
    let dom = w.domain().clone();
    let (scale, power, coef) = if q == 2.0 {
        let l =
            lambda1.ok_or_else(|| Error::InvalidArgument("q = 2 needs the eigenvalue".into()))?;
        (1.0 / l, 1.0, 1.0)
    } else {
        (1.0, q - 1.0, q - 1.0)
    };
    let mut f = Vec::with_capacity(dom.len());
    let mut phi = Vec::with_capacity(dom.len());
    for (gk, &wk) in g.values().iter().zip(w.values()) {
        let g2 = gk[0] * gk[0] + gk[1] * gk[1];
        let inv = 1.0 / wk.powf(power);
        phi.push([scale * gk[0] * inv, scale * gk[1] * inv]);
        f.push(-scale * coef * g2 / wk.powf(power + 1.0));
    }
    Ok((
        ScalarField::new(dom.clone(), f)?,
        VectorField::new(dom, phi)?,
    ))
}

/// `min (div φ − |φ|²)` over nodes of depth `> trim`, with the nodal divergence.
pub fn protter_hersch_lower_bound(phi: &VectorField, trim: u32) -> f64 {
    let div = divergence(phi);
    let depth = phi.domain().depth();
    div.values()
        .iter()
        .zip(phi.values())
        .zip(depth)
        .filter(|(_, &d)| d > trim)
        .map(|((dv, p), _)| dv - (p[0] * p[0] + p[1] * p[1]))
        .fold(f64::INFINITY, f64::min)
}

/// `φ = −∇U/U` with the nodal gradient.
pub fn protter_hersch_field(u: &ScalarField) -> Result<VectorField> {
    require_positive(u)?;
    let g = gradient(u);
    let values = g
        .values()
        .iter()
        .zip(u.values())
        .map(|(gk, &uk)| [-gk[0] / uk, -gk[1] / uk])
        .collect();
    VectorField::new(u.domain().clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primal::{solve_eigen, solve_sublinear, solve_torsion, DEFAULT_TOL};

    fn disk(h: f64) -> Arc<GridDomain> {
        Arc::new(GridDomain::disk(1.0, h).unwrap())
    }

    fn square(h: f64) -> Arc<GridDomain> {
        Arc::new(GridDomain::rectangle(1.0, 1.0, h).unwrap())
    }

    #[test]
    fn face_defect_is_nonnegative_and_smooth() {
        for a in [0.0, 0.25, 0.5, 0.9] {
            for k in 0..200 {
                let t = 0.01 + k as f64 * 0.02;
                assert!(face_defect(t, a) >= 0.0);
            }
            let below = face_defect(1.0 - 1.0001e-4, a);
            let series = face_defect(1.0 - 0.9999e-4, a);
            assert!((below - series).abs() / below < 1e-3);
        }
    }

    #[test]
    fn torsion_pair_is_exact() {
        let d = disk(1.0 / 32.0);
        let sol = solve_torsion(&d, DEFAULT_TOL).unwrap();
        let pair = build_pair_torsion(&sol.w).unwrap();
        assert!(pair.is_feasible(), "{}", pair.feasibility_residual);
        let rep = weak_duality_certificate(&sol, &pair).unwrap();
        assert!(rep.gap_relative.abs() < 1e-8, "{rep:?}");
    }

    #[test]
    fn torsion_curl_perturbation() {
        let d = disk(1.0 / 32.0);
        let sol = solve_torsion(&d, DEFAULT_TOL).unwrap();
        let pair = build_pair_torsion(&sol.w).unwrap();
        let eta = curl_field(&d, 2, |x, y| 0.05 * (-(x * x + y * y) * 8.0).exp());
        let div = face_divergence(&eta);
        assert!(div.sup_norm() < 1e-12);
        let moved = perturbed(&pair, &eta).unwrap();
        assert!(moved.is_feasible());
        assert!(dual_objective(&moved) > dual_objective(&pair) + 1e-6);
    }

    #[test]
    fn infeasible_zero_pair() {
        let d = square(1.0 / 16.0);
        let pair =
            DualPair::new(1.5, ScalarField::zeros(d.clone()), FaceField::zeros(d), 0).unwrap();
        assert!((pair.feasibility_residual + 1.0).abs() < 1e-12);
        assert!(!pair.is_feasible());
    }

    #[test]
    fn sub_pair_margin_is_the_equation_residual() {
        let d = square(1.0 / 32.0);
        let sol = solve_sublinear(&d, 1.5, DEFAULT_TOL).unwrap();
        let pair = build_pair_sub(&sol.w, 1.5).unwrap();
        assert!(pair.margin().sup_norm() < 1e-6);
        assert!(pair.is_feasible(), "{}", pair.feasibility_residual);
        assert!(pair.f.max() <= 0.0);
    }

    #[test]
    fn sub_pair_gap_is_small() {
        let d = disk(1.0 / 32.0);
        for q in [1.25, 1.5, 1.75] {
            let sol = solve_sublinear(&d, q, DEFAULT_TOL).unwrap();
            let pair = build_pair_sub(&sol.w, q).unwrap();
            let rep = weak_duality_certificate(&sol, &pair).unwrap();
            assert!(rep.gap_relative.abs() < 0.05, "{rep:?}");
        }
    }

    #[test]
    fn eigen_pair() {
        let d = disk(1.0 / 32.0);
        let sol = solve_eigen(&d, DEFAULT_TOL).unwrap();
        let pair = build_pair_eigen(&sol.w, sol.lambda1).unwrap();
        assert!(pair.is_feasible(), "{}", pair.feasibility_residual);
        let rep = weak_duality_certificate(&sol, &pair).unwrap();
        assert!(rep.gap_relative.abs() < 0.05, "{rep:?}");
    }

    #[test]
    fn nodal_formula_identities() {
        let d = square(1.0 / 32.0);
        let q = 1.5;
        let sol = solve_sublinear(&d, q, DEFAULT_TOL).unwrap();
        let (f, phi) = nodal_formula_pair(&sol.w, q, None).unwrap();
        let g = gradient(&sol.w);
        for k in 0..d.len() {
            let p = phi.values()[k];
            let gq = (p[0].hypot(p[1])).powf(q) * (-f.values()[k]).powf(1.0 - q);
            let gn = g.values()[k][0].hypot(g.values()[k][1]);
            if gn > 1e-8 {
                let expected = (q - 1.0).powf(1.0 - q) * gn.powf(2.0 - q);
                assert!((gq - expected).abs() / expected < 1e-9);
            }
        }
    }

    #[test]
    fn eigen_nodal_ratio_is_reciprocal_eigenvalue() {
        let d = disk(1.0 / 32.0);
        let sol = solve_eigen(&d, DEFAULT_TOL).unwrap();
        let (f, phi) = nodal_formula_pair(&sol.w, 2.0, Some(sol.lambda1)).unwrap();
        for (p, &fk) in phi.values().iter().zip(f.values()) {
            let p2 = p[0] * p[0] + p[1] * p[1];
            if fk < 0.0 {
                assert!((p2 / -fk * sol.lambda1 - 1.0).abs() < 1e-10);
            } else {
                assert_eq!(p2, 0.0);
            }
        }
    }

    #[test]
    fn affine_pair_is_feasible() {
        let d = square(1.0 / 32.0);
        let pair = affine_pair(&d, 1.5, [0.5, 0.5]).unwrap();
        assert!(pair.margin().sup_norm() < 1e-9);
        assert!(pair.is_feasible());
    }

    #[test]
    fn protter_hersch_trivial_field() {
        let d = disk(1.0 / 16.0);
        assert_eq!(protter_hersch_lower_bound(&VectorField::zeros(d), 0), 0.0);
    }
}
