//! First Dirichlet eigenvalue of the unit disk, with Richardson extrapolation.

use std::sync::Arc;

use principal_frequency::primal::{self, DEFAULT_TOL};
use principal_frequency::GridDomain;

fn main() -> principal_frequency::Result<()> {
    let mut values = Vec::new();
    for n in [32, 64, 128] {
        let dom = Arc::new(GridDomain::disk(1.0, 1.0 / n as f64)?);
        let sol = primal::solve_eigen(&dom, DEFAULT_TOL)?;
        println!(
            "h = 1/{n:<4} λ₁ = {:.6} ({} iterations)",
            sol.lambda1, sol.iterations
        );
        values.push(sol.lambda1);
    }
    // The staircase boundary makes the error first order in h.
    let extrapolated = primal::richardson(values[1], values[2], 2.0, 1.0);
    println!("extrapolated   λ₁ = {extrapolated:.6}");
    println!("j₀,₁²             = 5.783186");
    Ok(())
}
