//! Generalized principal frequencies `λ₁(Ω;q)`, `1 ≤ q ≤ 2`, of rasterized planar domains.
//!
//! The crate computes the sharp constant of the Sobolev embedding `W¹'²₀(Ω) → Lq(Ω)`
//! on a finite-difference grid in two independent ways:
//!
//! * the *primal* route ([`primal`]) solves the torsion problem (`q = 1`), the sublinear
//!   Lane–Emden equation `−Δw = w^{q−1}` (`1 < q < 2`) or the Dirichlet eigenvalue
//!   problem (`q = 2`);
//! * the *dual* route ([`dual`]) builds explicit pairs `(f, φ)` satisfying
//!   `−div φ + f ≥ 1` and evaluates the dual objective built on the integrand `G_q`
//!   from [`convex`], certifying `1/λ₁` from above.
//!
//! [`bounds`] checks the geometric estimates (Faber–Krahn, Hersch–Makai, Pólya,
//! Diaz–Weinstein, Cheeger, distance-function transplant) against the computed values,
//! using the one-dimensional constants from [`onedim`].

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod cli;
pub mod convex;
pub mod dual;
pub mod elliptic;
mod error;
pub mod geometry;
pub mod onedim;
pub mod primal;

pub use error::{Error, Result};
pub use geometry::{GeometricSummary, GridDomain};
