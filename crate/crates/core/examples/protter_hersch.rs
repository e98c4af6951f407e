//! Lower bound for the disk eigenvalue from the logarithmic gradient of the eigenfunction.

use std::sync::Arc;

use principal_frequency::primal::{self, DEFAULT_TOL};
use principal_frequency::{dual, GridDomain};

fn main() -> principal_frequency::Result<()> {
    let dom = Arc::new(GridDomain::disk(1.0, 1.0 / 64.0)?);
    let sol = primal::solve_eigen(&dom, DEFAULT_TOL)?;
    let phi = dual::protter_hersch_field(&sol.w)?;
    for trim in [2, 4, 8] {
        let lb = dual::protter_hersch_lower_bound(&phi, trim);
        println!(
            "trim {trim}: bound {lb:.5}, λ₁ = {:.5}, ratio {:.4}",
            sol.lambda1,
            lb / sol.lambda1
        );
    }
    Ok(())
}
