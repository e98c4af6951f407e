//! Geometric bounds against computed values on a convex and a non-convex domain.

use std::sync::Arc;

use principal_frequency::bounds::{self, CheegerInput};
use principal_frequency::primal::DEFAULT_TOL;
use principal_frequency::GridDomain;

fn main() -> principal_frequency::Result<()> {
    let h = 1.0 / 32.0;
    let cases = [
        (
            "square",
            GridDomain::rectangle(1.0, 1.0, h)?,
            CheegerInput::Known(bounds::cheeger_rectangle(1.0, 1.0)),
        ),
        (
            "L-shape",
            GridDomain::l_shape(1.0, h)?,
            CheegerInput::Estimate,
        ),
    ];
    for (name, dom, cheeger) in cases {
        let rep =
            bounds::bound_report_with(name, &Arc::new(dom), &[1.0, 1.5, 2.0], cheeger, DEFAULT_TOL);
        println!("{name}");
        for r in &rep.rows {
            match (r.value, r.slack_ratio) {
                (Some(v), Some(s)) => {
                    println!("  q = {:<4} {:<24} {v:>10.4} ratio {s:.3}", r.q, r.name)
                }
                (Some(v), None) => println!("  q = {:<4} {:<24} {v:>10.4}", r.q, r.name),
                _ => println!("  q = {:<4} {:<24} {}", r.q, r.name, r.note),
            }
        }
        println!("  all satisfied: {}", rep.all_satisfied());
    }
    Ok(())
}
