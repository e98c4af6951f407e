//! `λ₁(Ω;q)` across `q ∈ [1, 2]` on the unit square, connecting torsion and eigenvalue.

use std::sync::Arc;

use principal_frequency::primal::{self, DEFAULT_TOL};
use principal_frequency::GridDomain;

fn main() -> principal_frequency::Result<()> {
    let dom = Arc::new(GridDomain::rectangle(1.0, 1.0, 1.0 / 48.0)?);
    println!("{:>5} {:>12} {:>12} {:>10}", "q", "λ₁", "alt", "residual");
    for k in 0..=8 {
        let q = 1.0 + k as f64 / 8.0;
        let sol = primal::solve(&dom, q, DEFAULT_TOL)?;
        println!(
            "{q:>5.3} {:>12.6} {:>12.6} {:>10.2e}",
            sol.lambda1,
            sol.lambda1_alt,
            primal::equation_residual(&sol)
        );
    }
    Ok(())
}
