//! The convex integrands `F_q`, `G_q`, the closed-form Legendre–Fenchel conjugate of `F_q`
//! and a sampling oracle for conjugates of black-box functions.
//!
//! ```text
//! F_q(t, x) = |x|² t^{2/q − 2}        t > 0
//!           = 0                       t = 0, x = 0
//!           = +∞                      otherwise
//!
//! G_q(s, ξ) = |ξ|^q / |s|^{q − 1}      s < 0
//!           = 0                       s = 0, ξ = 0
//!           = +∞                      otherwise
//!
//! F*_q(s, ξ) = α_q |ξ|^{2q/(2−q)} |s|^{2(1−q)/(2−q)}     s < 0
//! ```

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A value in `(−∞, +∞]`; never NaN.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Panics on NaN or `−∞`.
    pub fn new(v: f64) -> Self {
        assert!(
            !v.is_nan() && v != f64::NEG_INFINITY,
            "ExtReal cannot hold {v}"
        );
        // Adding zero maps −0 to +0, keeping `==` and `cmp` consistent.
        ExtReal(v + 0.0)
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// Raw `f64`, with `+∞` mapped to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        self.0
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "+inf")
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.finite() {
            Some(v) => s.serialize_f64(v),
            None => s.serialize_str("inf"),
        }
    }
}

fn norm(x: [f64; 2]) -> f64 {
    x[0].hypot(x[1])
}

/// `F_q(t, x)`; meaningful for `1 < q < 2`, and the formula is also evaluated at `q = 1`
/// (`|x|²` for `t > 0`).
pub fn f_q(q: f64, t: f64, x: [f64; 2]) -> ExtReal {
    let x2 = x[0] * x[0] + x[1] * x[1];
    if t > 0.0 {
        ExtReal::new(x2 * t.powf(2.0 / q - 2.0))
    } else if t == 0.0 && x2 == 0.0 {
        ExtReal::ZERO
    } else {
        ExtReal::INFINITY
    }
}

/// `G_q(s, ξ)` for `1 < q ≤ 2`.
pub fn g_q(q: f64, s: f64, xi: [f64; 2]) -> ExtReal {
    let n = norm(xi);
    if s < 0.0 {
        ExtReal::new(n.powf(q) / (-s).powf(q - 1.0))
    } else if s == 0.0 && n == 0.0 {
        ExtReal::ZERO
    } else {
        ExtReal::INFINITY
    }
}

/// The constant in the closed form of `F*_q`.
pub fn alpha_q(q: f64) -> Result<f64> {
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha_q needs 1 < q < 2, got {q}"
        )));
    }
    let e = 2.0 - q;
    Ok(e / (2.0 * q) * ((q - 1.0) / q).powf(2.0 * (q - 1.0) / e) * 0.5f64.powf(q / e))
}

/// Closed-form `F*_q(s, ξ)`.
pub fn f_q_star_closed(q: f64, s: f64, xi: [f64; 2]) -> Result<ExtReal> {
    let a = alpha_q(q)?;
    let n = norm(xi);
    let e = 2.0 - q;
    Ok(if s < 0.0 {
        ExtReal::new(a * n.powf(2.0 * q / e) * (-s).powf(2.0 * (1.0 - q) / e))
    } else if s == 0.0 && n == 0.0 {
        ExtReal::ZERO
    } else {
        ExtReal::INFINITY
    })
}

/// Right-hand side of `((1/2q) F_q)*(s, ξ) = (2−q)/2 · (q−1)^{2(q−1)/(2−q)} · G_q(s, ξ)^{2/(2−q)}`.
pub fn rescaled_conjugate_closed(q: f64, s: f64, xi: [f64; 2]) -> Result<ExtReal> {
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::InvalidArgument(format!("need 1 < q < 2, got {q}")));
    }
    let e = 2.0 - q;
    Ok(match g_q(q, s, xi).finite() {
        Some(g) => ExtReal::new(e / 2.0 * (q - 1.0).powf(2.0 * (q - 1.0) / e) * g.powf(2.0 / e)),
        None => ExtReal::INFINITY,
    })
}

/// Sampling region for [`lf_conjugate_bruteforce`]: `t ∈ [0, t_max]`, `|x| ∈ [0, m_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBox {
    pub t_max: f64,
    pub m_max: f64,
}

impl SearchBox {
    /// `t, m ∈ [0, 10 |ξ| max(1, 1/|s|)]`.
    pub fn default_for(s: f64, xi: [f64; 2]) -> Self {
        let scale = 10.0 * norm(xi).max(1e-3) * (1.0f64).max(1.0 / s.abs().max(1e-300));
        SearchBox {
            t_max: scale,
            m_max: scale,
        }
    }
}

/// Decades covered below the upper end of each axis of the sampling grid.
const DECADES: f64 = 14.0;
const ZOOM_ROUNDS: usize = 12;

fn axis_samples(hi: f64, n: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    v.push(0.0);
    let lo = hi * 10f64.powf(-DECADES);
    for k in 0..n - 1 {
        let frac = k as f64 / (n - 2) as f64;
        v.push(lo * (hi / lo).powf(frac));
    }
    v
}

fn zoom_samples(center: f64, ratio: f64, cap: f64, n: usize) -> Vec<f64> {
    if center == 0.0 {
        return vec![0.0];
    }
    let lo = center / ratio;
    let hi = (center * ratio).min(cap);
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

/// `sup { s t + ⟨ξ, x⟩ − f(t, x) }` estimated on a sample grid over `bx`.
///
/// The search is restricted to `x` parallel to `ξ` (`x = m ξ/|ξ|`, any direction when
/// `ξ = 0`), which is exact for integrands depending on `x` through `|x|` only. Each axis is
/// sampled at `0` and on a logarithmic grid spanning many decades below the box edge; the
/// best sample is then refined by repeatedly resampling a shrinking logarithmic window
/// around it. The result is a lower estimate of a possibly infinite supremum.
pub fn lf_conjugate_bruteforce(
    f: impl Fn(f64, [f64; 2]) -> ExtReal,
    s: f64,
    xi: [f64; 2],
    bx: SearchBox,
    n: usize,
) -> f64 {
    search(f, s, xi, bx, n).0
}

/// Best sample `(value, t, m)` of [`lf_conjugate_bruteforce`].
fn search(
    f: impl Fn(f64, [f64; 2]) -> ExtReal,
    s: f64,
    xi: [f64; 2],
    bx: SearchBox,
    n: usize,
) -> (f64, f64, f64) {
    let n = n.max(64);
    let nxi = norm(xi);
    let dir = if nxi > 0.0 {
        [xi[0] / nxi, xi[1] / nxi]
    } else {
        [1.0, 0.0]
    };
    let eval = |t: f64, m: f64| -> f64 {
        match f(t, [m * dir[0], m * dir[1]]).finite() {
            Some(v) => s * t + nxi * m - v,
            None => f64::NEG_INFINITY,
        }
    };
    let scan = |ts: &[f64], ms: &[f64]| -> (f64, f64, f64) {
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for &t in ts {
            for &m in ms {
                let v = eval(t, m);
                if v > best.0 {
                    best = (v, t, m);
                }
            }
        }
        best
    };

    let ts = axis_samples(bx.t_max, n);
    let ms = axis_samples(bx.m_max, n);
    let (mut best, mut tb, mut mb) = scan(&ts, &ms);
    let mut ratio = 10f64.powf(2.0 * DECADES / (n - 2) as f64);
    let nz = (n / 2).max(32);
    for _ in 0..ZOOM_ROUNDS {
        let tz = zoom_samples(tb, ratio, bx.t_max, nz);
        let mz = zoom_samples(mb, ratio, bx.m_max, nz);
        let (v, t, m) = scan(&tz, &mz);
        if v > best {
            (best, tb, mb) = (v, t, m);
        }
        ratio = ratio.powf(4.0 / (nz - 1) as f64).max(1.0 + 1e-12);
    }
    (best, tb, mb)
}

/// [`lf_conjugate_bruteforce`] starting from [`SearchBox::default_for`]. The box shrinks
/// by `10⁶` while no sample beats the origin although `ξ ≠ 0` (the maximizer sits below
/// the sampled decades), grows by `4` while the value keeps increasing, and is finally
/// re-centred on the best sample. Only meaningful where the supremum is finite (`s < 0`).
pub fn lf_conjugate_adaptive(
    f: impl Fn(f64, [f64; 2]) -> ExtReal + Copy,
    s: f64,
    xi: [f64; 2],
    n: usize,
) -> f64 {
    let mut bx = SearchBox::default_for(s, xi);
    let mut best = search(f, s, xi, bx, n);
    if norm(xi) > 0.0 {
        for _ in 0..40 {
            if best.0 > 0.0 {
                break;
            }
            bx = SearchBox {
                t_max: 1e-6 * bx.t_max,
                m_max: 1e-6 * bx.m_max,
            };
            best = search(f, s, xi, bx, n);
        }
    }
    for _ in 0..200 {
        let bigger = SearchBox {
            t_max: 4.0 * bx.t_max,
            m_max: 4.0 * bx.m_max,
        };
        let cand = search(f, s, xi, bigger, n);
        if cand.0 <= best.0 * (1.0 + 1e-12) + 1e-300 {
            break;
        }
        best = cand;
        bx = bigger;
    }
    let (_, t, m) = best;
    if t > 0.0 && m > 0.0 {
        let centred = SearchBox {
            t_max: 100.0 * t,
            m_max: 100.0 * m,
        };
        let cand = search(f, s, xi, centred, n);
        if cand.0 > best.0 {
            best = cand;
        }
    }
    best.0
}

/// Compares the sampled conjugate of `F_q/(2q)` against its closed form in terms of `G_q`.
/// Returns `(lhs, rhs)` = (oracle, closed form).
pub fn rescaled_conjugate_identity_check(q: f64, s: f64, xi: [f64; 2]) -> Result<(f64, f64)> {
    if !(s < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "identity check needs s < 0, got {s}"
        )));
    }
    let rhs = rescaled_conjugate_closed(q, s, xi)?.as_f64();
    let scaled = move |t: f64, x: [f64; 2]| match f_q(q, t, x).finite() {
        Some(v) => ExtReal::new(v / (2.0 * q)),
        None => ExtReal::INFINITY,
    };
    let lhs = lf_conjugate_adaptive(scaled, s, xi, 96);
    Ok((lhs, rhs))
}

/// One sampled comparison of a brute-force conjugate against its closed form.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConjugateSample {
    pub s: f64,
    pub xi: [f64; 2],
    /// Brute-force value.
    pub lhs: f64,
    /// Closed-form value.
    pub rhs: f64,
    pub relative_error: f64,
}

/// Which conjugate [`conjugate_samples`] checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjugateCheck {
    /// `F*_q` against the `α_q` closed form.
    ClosedForm,
    /// `(F_q/2q)*` against the `G_q` expression.
    Rescaled,
}

/// Draws `n` points with `s ∈ [−3, −0.05)` and `ξ ∈ [−2, 2)²` from a seeded generator and
/// compares both sides at each.
pub fn conjugate_samples(
    q: f64,
    n: usize,
    seed: u64,
    check: ConjugateCheck,
) -> Result<Vec<ConjugateSample>> {
    alpha_q(q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let s = rng.gen_range(-3.0..-0.05);
            let xi = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let (lhs, rhs) = match check {
                ConjugateCheck::ClosedForm => {
                    let f = move |t, x| f_q(q, t, x);
                    (
                        lf_conjugate_adaptive(f, s, xi, 96),
                        f_q_star_closed(q, s, xi)?.as_f64(),
                    )
                }
                ConjugateCheck::Rescaled => rescaled_conjugate_identity_check(q, s, xi)?,
            };
            let relative_error = if rhs == 0.0 {
                lhs.abs()
            } else {
                (lhs - rhs).abs() / rhs.abs()
            };
            Ok(ConjugateSample {
                s,
                xi,
                lhs,
                rhs,
                relative_error,
            })
        })
        .collect()
}
