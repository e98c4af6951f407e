//! Geometric estimates for `λ₁(Ω;q)` and the report that checks them against a computed
//! value.
//!
//! All formulas are for planar domains (`N = 2`). Geometric inputs come from
//! [`GridDomain::summary`], so the bounds refer to the same discrete domain the solvers see.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::GridDomain;
use crate::onedim::{self, Profile1D};
use crate::primal;

/// Relative slack allowed when checking a bound against a computed `λ₁`.
pub const SLACK_TOL: f64 = 0.02;

/// Cell count of the 1-D profile used by the transplant bound.
pub const PROFILE_CELLS: usize = 1024;

fn check_q(q: f64) -> Result<()> {
    if (1.0..=2.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "q must lie in [1, 2], got {q}"
        )))
    }
}

fn require_convex(dom: &GridDomain, name: &str) -> Result<()> {
    if dom.is_convex() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} needs a convex domain")))
    }
}

/// `λ₁` and area of a reference disk.
#[derive(Clone, Copy, Debug)]
pub struct BallReference {
    pub lambda1: f64,
    pub area: f64,
}

impl BallReference {
    /// Solves on the disk with the same area as `dom`, on the same grid spacing.
    pub fn for_domain(dom: &GridDomain, q: f64, tol: f64) -> Result<Self> {
        let radius = (dom.summary().area / std::f64::consts::PI).sqrt();
        let ball = Arc::new(GridDomain::disk(radius, dom.h())?);
        let lambda1 = primal::solve(&ball, q, tol)?.lambda1;
        Ok(BallReference {
            lambda1,
            area: ball.summary().area,
        })
    }
}

/// `λ₁(B;q) (|Ω|/|B|)^{−2/q}`.
pub fn faber_krahn_lower(dom: &GridDomain, q: f64, ball: BallReference) -> Result<f64> {
    check_q(q)?;
    let e = -2.0 / q;
    Ok(ball.lambda1 * (dom.summary().area / ball.area).powf(e))
}

/// `(π_{2,q}/2)² |Ω|^{(q−2)/q} / R²`; convex domains only.
pub fn hersch_makai_lower(dom: &GridDomain, q: f64) -> Result<f64> {
    check_q(q)?;
    require_convex(dom, "the inradius form")?;
    let s = dom.summary();
    let p = onedim::pi_2q(q, onedim::DEFAULT_CELLS)?;
    Ok((p / 2.0).powi(2) * s.area.powf((q - 2.0) / q) / (s.inradius * s.inradius))
}

/// `(π_{2,q}/2)² P^{(q−2)/q} / R^{(q+2)/q}`; convex domains only.
pub fn hersch_makai_perimeter_lower(dom: &GridDomain, q: f64) -> Result<f64> {
    check_q(q)?;
    require_convex(dom, "the perimeter form")?;
    let s = dom.summary();
    let p = onedim::pi_2q(q, onedim::DEFAULT_CELLS)?;
    Ok((p / 2.0).powi(2) * s.perimeter.powf((q - 2.0) / q) / s.inradius.powf((q + 2.0) / q))
}

/// `(π_{2,q}/2)² (P / |Ω|^{1/2+1/q})²`; convex domains only.
pub fn polya_upper(dom: &GridDomain, q: f64) -> Result<f64> {
    check_q(q)?;
    require_convex(dom, "the upper bound")?;
    let s = dom.summary();
    let p = onedim::pi_2q(q, onedim::DEFAULT_CELLS)?;
    Ok((p / 2.0).powi(2) * (s.perimeter / s.area.powf(0.5 + 1.0 / q)).powi(2))
}

/// `(2/q)² 𝓘_{2q/(2−q)}^{−(2−q)/q}`, with the minimal moment over the reference point.
/// At `q = 2` the moment term becomes the circumradius: `1/Γ²`.
pub fn diaz_weinstein_lower(dom: &GridDomain, q: f64) -> Result<f64> {
    check_q(q)?;
    if q == 2.0 {
        let g = dom.summary().circumradius;
        return Ok(1.0 / (g * g));
    }
    let p = 2.0 * q / (2.0 - q);
    let (moment, _) = dom.min_moment(p)?;
    Ok((2.0 / q).powi(2) * moment.powf(-(2.0 - q) / q))
}

/// `(h₁/q)² |Ω|^{−(2−q)/q}` for a caller-supplied Cheeger constant.
pub fn cheeger_lower(dom: &GridDomain, q: f64, h1: f64) -> Result<f64> {
    check_q(q)?;
    if !(h1 > 0.0 && h1.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Cheeger constant must be positive, got {h1}"
        )));
    }
    Ok((h1 / q).powi(2) * dom.summary().area.powf(-(2.0 - q) / q))
}

/// Cheeger constant of a disk of radius `r`.
pub fn cheeger_disk(r: f64) -> f64 {
    2.0 / r
}

/// Cheeger constant of an `a × b` rectangle: the reciprocal of the radius of the quarter
/// circles rounding the corners of the optimal set.
pub fn cheeger_rectangle(a: f64, b: f64) -> f64 {
    let k = 4.0 - std::f64::consts::PI;
    let r = ((a + b) - ((a - b).powi(2) + std::f64::consts::PI * a * b).sqrt()) / k;
    1.0 / r
}

/// Non-certified Cheeger estimate `P/|Ω|` (the whole domain as competitor).
pub fn cheeger_estimate(dom: &GridDomain) -> f64 {
    let s = dom.summary();
    s.perimeter / s.area
}

/// `R² (Σ g'(d/R − 1)² h²)^{(2−q)/q}` as an upper bound for `1/λ₁`, returned as the
/// implied lower bound for `λ₁`. Convex domains only.
pub fn transplant_lower(dom: &GridDomain, q: f64) -> Result<f64> {
    check_q(q)?;
    require_convex(dom, "the transplant bound")?;
    if q == 2.0 {
        let r = dom.summary().inradius;
        return Ok((std::f64::consts::PI / 2.0).powi(2) / (r * r));
    }
    let g = onedim::solve_g(q, PROFILE_CELLS)?;
    Ok(transplant_with(dom, &g))
}

/// Transplant bound with a precomputed profile for `g.q`.
pub fn transplant_with(dom: &GridDomain, g: &Profile1D) -> f64 {
    let q = g.q;
    let r = dom.summary().inradius;
    let h2 = dom.h() * dom.h();
    let integral: f64 = dom
        .distance_field()
        .iter()
        .map(|&d| g.derivative(d / r - 1.0).powi(2))
        .sum::<f64>()
        * h2;
    1.0 / (r * r * integral.powf((2.0 - q) / q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
    /// A heuristic value that certifies nothing.
    Estimate,
}

/// One bound evaluated at one `q`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub q: f64,
    pub name: &'static str,
    pub kind: BoundKind,
    /// `None` when the bound does not apply or could not be evaluated.
    pub value: Option<f64>,
    pub lambda1: Option<f64>,
    /// `None` for estimates and inapplicable rows.
    pub satisfied: Option<bool>,
    /// `λ₁/bound` for lower bounds, `bound/λ₁` for upper bounds.
    pub slack_ratio: Option<f64>,
    pub note: String,
}

impl BoundRow {
    fn new(
        q: f64,
        name: &'static str,
        kind: BoundKind,
        lambda1: Option<f64>,
        value: Result<f64>,
    ) -> Self {
        let mut row = BoundRow {
            q,
            name,
            kind,
            value: None,
            lambda1,
            satisfied: None,
            slack_ratio: None,
            note: String::new(),
        };
        match value {
            Ok(v) => {
                row.value = Some(v);
                if let Some(l) = lambda1 {
                    match kind {
                        BoundKind::Lower => {
                            row.slack_ratio = Some(l / v);
                            row.satisfied = Some(v <= l * (1.0 + SLACK_TOL));
                        }
                        BoundKind::Upper => {
                            row.slack_ratio = Some(v / l);
                            row.satisfied = Some(v >= l * (1.0 - SLACK_TOL));
                        }
                        BoundKind::Estimate => {
                            row.slack_ratio = Some(l / v);
                            row.note = "not a certified bound".into();
                        }
                    }
                }
            }
            Err(Error::Domain(msg)) => row.note = format!("inapplicable: {msg}"),
            Err(e) => row.note = format!("error: {e}"),
        }
        row
    }

    pub fn is_applicable(&self) -> bool {
        self.value.is_some()
    }

    pub fn is_violated(&self) -> bool {
        self.satisfied == Some(false)
    }
}

/// Which Cheeger input to use.
#[derive(Clone, Copy, Debug)]
pub enum CheegerInput {
    /// Exact constant; the row is a certified lower bound.
    Known(f64),
    /// Report the `P/|Ω|` estimate only.
    Estimate,
}

/// All bounds for one domain over a list of `q`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub domain: String,
    pub h: f64,
    pub tolerance: f64,
    pub rows: Vec<BoundRow>,
}

pub const FABER_KRAHN: &str = "faber_krahn";
pub const HERSCH_MAKAI: &str = "hersch_makai";
pub const HERSCH_MAKAI_PERIMETER: &str = "hersch_makai_perimeter";
pub const TRANSPLANT: &str = "transplant";
pub const POLYA: &str = "polya";
pub const DIAZ_WEINSTEIN: &str = "diaz_weinstein";
pub const CHEEGER: &str = "cheeger";
pub const SOLVER: &str = "lambda1";

impl BoundReport {
    pub fn violations(&self) -> Vec<&BoundRow> {
        self.rows.iter().filter(|r| r.is_violated()).collect()
    }

    /// Rows whose solve or evaluation failed outright.
    pub fn errors(&self) -> Vec<&BoundRow> {
        self.rows
            .iter()
            .filter(|r| r.note.starts_with("error"))
            .collect()
    }

    pub fn row(&self, q: f64, name: &str) -> Option<&BoundRow> {
        self.rows.iter().find(|r| r.q == q && r.name == name)
    }

    /// Largest applicable lower bound at `q`.
    pub fn best_lower(&self, q: f64) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.q == q && r.kind == BoundKind::Lower)
            .filter_map(|r| r.value)
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
    }

    /// Checks perimeter form ≤ transplant form and perimeter form ≤ inradius form at every
    /// `q` where all three apply, within the slack tolerance. Returns the failing `q`s.
    pub fn ordering_failures(&self) -> Vec<f64> {
        let mut qs: Vec<f64> = self.rows.iter().map(|r| r.q).collect();
        qs.dedup();
        qs.into_iter()
            .filter(|&q| {
                let v = |n| self.row(q, n).and_then(|r| r.value);
                match (v(HERSCH_MAKAI_PERIMETER), v(TRANSPLANT), v(HERSCH_MAKAI)) {
                    (Some(p), Some(t), Some(i)) => {
                        p > t * (1.0 + SLACK_TOL) || p > i * (1.0 + SLACK_TOL)
                    }
                    _ => false,
                }
            })
            .collect()
    }

    pub fn all_satisfied(&self) -> bool {
        self.violations().is_empty()
            && self.errors().is_empty()
            && self.ordering_failures().is_empty()
    }
}

/// Runs the solver and every bound for each `q`. Failures are recorded in the rows.
pub fn bound_report_with(
    name: &str,
    dom: &Arc<GridDomain>,
    q_list: &[f64],
    cheeger: CheegerInput,
    tol: f64,
) -> BoundReport {
    let mut rows = Vec::new();
    let mut profiles: HashMap<u64, Profile1D> = HashMap::new();
    for &q in q_list {
        let solved = primal::solve(dom, q, tol).map(|s| s.lambda1);
        let lambda1 = solved.as_ref().ok().copied();
        let mut solver_row = BoundRow::new(q, SOLVER, BoundKind::Estimate, None, Ok(0.0));
        solver_row.value = lambda1;
        solver_row.note = match &solved {
            Ok(_) => "computed".into(),
            Err(e) => format!("error: {e}"),
        };
        rows.push(solver_row);

        let fk = BallReference::for_domain(dom, q, tol).and_then(|b| faber_krahn_lower(dom, q, b));
        rows.push(BoundRow::new(q, FABER_KRAHN, BoundKind::Lower, lambda1, fk));
        rows.push(BoundRow::new(
            q,
            DIAZ_WEINSTEIN,
            BoundKind::Lower,
            lambda1,
            diaz_weinstein_lower(dom, q),
        ));
        let ch = match cheeger {
            CheegerInput::Known(h1) => BoundRow::new(
                q,
                CHEEGER,
                BoundKind::Lower,
                lambda1,
                cheeger_lower(dom, q, h1),
            ),
            CheegerInput::Estimate => {
                let mut r = BoundRow::new(
                    q,
                    CHEEGER,
                    BoundKind::Estimate,
                    lambda1,
                    cheeger_lower(dom, q, cheeger_estimate(dom)),
                );
                r.note = "estimate from P/|Ω|; not a certified bound".into();
                r
            }
        };
        rows.push(ch);
        rows.push(BoundRow::new(
            q,
            HERSCH_MAKAI,
            BoundKind::Lower,
            lambda1,
            hersch_makai_lower(dom, q),
        ));
        rows.push(BoundRow::new(
            q,
            HERSCH_MAKAI_PERIMETER,
            BoundKind::Lower,
            lambda1,
            hersch_makai_perimeter_lower(dom, q),
        ));
        let tr = if q < 2.0 && dom.is_convex() {
            let key = q.to_bits();
            let g = match profiles.get(&key) {
                Some(g) => Ok(g),
                None => {
                    onedim::solve_g(q, PROFILE_CELLS).map(|g| &*profiles.entry(key).or_insert(g))
                }
            };
            g.map(|g| transplant_with(dom, g))
        } else {
            transplant_lower(dom, q)
        };
        rows.push(BoundRow::new(q, TRANSPLANT, BoundKind::Lower, lambda1, tr));
        rows.push(BoundRow::new(
            q,
            POLYA,
            BoundKind::Upper,
            lambda1,
            polya_upper(dom, q),
        ));
    }
    BoundReport {
        domain: name.to_string(),
        h: dom.h(),
        tolerance: SLACK_TOL,
        rows,
    }
}

/// [`bound_report_with`] with the Cheeger estimate and the default solver tolerance.
pub fn bound_report(dom: &Arc<GridDomain>, q_list: &[f64]) -> BoundReport {
    bound_report_with(
        "domain",
        dom,
        q_list,
        CheegerInput::Estimate,
        primal::DEFAULT_TOL,
    )
}
