//! Long rectangles: `λ₁(Ω_L;q) L^{(2−q)/q}` approaches `π_{2,q}²` and the perimeter form of
//! the inradius bound becomes nearly sharp.

use std::sync::Arc;

use principal_frequency::primal::{self, DEFAULT_TOL};
use principal_frequency::{bounds, onedim, GridDomain};

fn main() -> principal_frequency::Result<()> {
    let q = 1.5;
    let pi = onedim::pi_2q(q, onedim::DEFAULT_CELLS)?;
    println!("π_{{2,q}}² = {:.5}", pi * pi);
    for l in [2.0, 4.0, 8.0, 16.0] {
        let dom = Arc::new(GridDomain::rectangle(l, 1.0, 1.0 / 32.0)?);
        let lam = primal::solve(&dom, q, DEFAULT_TOL)?.lambda1;
        let hm = bounds::hersch_makai_perimeter_lower(&dom, q)?;
        let tr = bounds::transplant_lower(&dom, q)?;
        println!(
            "L = {l:>4}: scaled λ₁ = {:.5}, λ₁/perimeter form = {:.4}, λ₁/transplant = {:.4}",
            lam * l.powf((2.0 - q) / q),
            lam / hm,
            lam / tr
        );
    }
    Ok(())
}
