//! One-dimensional constants `π_{2,q}` and the profile used by the transplant bound.

use principal_frequency::onedim;

fn main() -> principal_frequency::Result<()> {
    println!("{:>5} {:>10} {:>12}", "q", "π_{2,q}", "λ₁((−1,1))");
    for k in 0..=10 {
        let row = onedim::constants_row(1.0 + k as f64 / 10.0)?;
        println!(
            "{:>5.2} {:>10.6} {:>12.6}",
            row.q, row.pi_2q, row.lambda1_interval
        );
    }
    let g = onedim::solve_g(1.5, 1024)?;
    println!(
        "q = 1.5: max g = {:.6}, ∫|g'|² = {:.6}, ∫g^q = {:.6}",
        g.max(),
        g.dirichlet_integral(),
        g.lq_integral()
    );
    Ok(())
}
