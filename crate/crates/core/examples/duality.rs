//! Dual certificates on the unit disk: the duality gap shrinks as the grid is refined.

use std::sync::Arc;

use principal_frequency::dual;
use principal_frequency::primal::DEFAULT_TOL;
use principal_frequency::GridDomain;

fn main() -> principal_frequency::Result<()> {
    for q in [1.0, 1.5, 2.0] {
        println!("q = {q} (budget {:.0}%)", 100.0 * dual::gap_budget(q));
        for n in [32, 64, 128] {
            let dom = Arc::new(GridDomain::disk(1.0, 1.0 / n as f64)?);
            let (_, _, rep) = dual::certify(&dom, q, DEFAULT_TOL)?;
            println!(
                "  h = 1/{n:<4} 1/λ₁ = {:.6}  dual = {:.6}  gap = {:+.3}%  feasibility {:.1e}",
                rep.primal_value,
                rep.dual_value,
                100.0 * rep.gap_relative,
                rep.feasibility_residual
            );
        }
    }
    Ok(())
}
