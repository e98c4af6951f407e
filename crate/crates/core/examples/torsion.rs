//! Torsional rigidity of the unit disk and the unit square on refining grids.
//!
//! ```text
//! cargo run --release --example torsion
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use principal_frequency::primal::{self, DEFAULT_TOL};
use principal_frequency::GridDomain;

fn main() -> principal_frequency::Result<()> {
    println!("{:>8} {:>12} {:>12}", "h", "T(disk)", "T(square)");
    for n in [32, 64, 128] {
        let h = 1.0 / n as f64;
        let disk = Arc::new(GridDomain::disk(1.0, h)?);
        let square = Arc::new(GridDomain::rectangle(1.0, 1.0, h)?);
        let td = primal::solve_torsion(&disk, DEFAULT_TOL)?.reciprocal();
        let ts = primal::solve_torsion(&square, DEFAULT_TOL)?.reciprocal();
        println!("{:>8} {td:>12.6} {ts:>12.6}", format!("1/{n}"));
    }
    println!("{:>8} {:>12.6} {:>12}", "exact", PI / 8.0, "0.035144");
    Ok(())
}
