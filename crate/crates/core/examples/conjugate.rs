//! Sampled Legendre–Fenchel conjugates of `F_q` against their closed forms.

use principal_frequency::convex::{self, ConjugateCheck};

fn main() -> principal_frequency::Result<()> {
    for q in [1.2, 1.5, 1.8] {
        let a = convex::alpha_q(q)?;
        let closed = convex::conjugate_samples(q, 100, 7, ConjugateCheck::ClosedForm)?;
        let rescaled = convex::conjugate_samples(q, 100, 7, ConjugateCheck::Rescaled)?;
        let worst =
            |v: &[convex::ConjugateSample]| v.iter().map(|s| s.relative_error).fold(0.0, f64::max);
        println!(
            "q = {q}: α_q = {a:.6e}, max error {:.2e} (closed form), {:.2e} (rescaled)",
            worst(&closed),
            worst(&rescaled)
        );
    }
    Ok(())
}
