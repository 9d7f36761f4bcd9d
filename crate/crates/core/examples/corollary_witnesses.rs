//! Stretched tori rule out any bound lambda1+ * area >= c * Vol(S^2).
//!
//! Run: `cargo run --example corollary_witnesses`

use dirac_spectra::degeneration::geometric_range;
use dirac_spectra::exact_spectra::SpinStructure2;
use dirac_spectra::inequality_audit::{ammann_report, corollary1_demo, liyau_floor_report, liyau_laplace_report};

fn main() -> dirac_spectra::Result<()> {
    let a = geometric_range(2.0, 1e6, 200)?;
    let reports = corollary1_demo(SpinStructure2::new(0, 0)?, &a, &[1.0, 0.1, 1e-3, 1e-5])?;
    for r in reports {
        println!("{:?} {:?}: {}", r.verdict, r.witness, r.note.unwrap_or_default());
    }
    for r in [ammann_report(3)?, liyau_floor_report(3)?, liyau_laplace_report(3, 2.0 * std::f64::consts::PI.powi(2))?] {
        println!("{}: {} {} {}", r.check, r.lhs, r.relation.as_str(), r.rhs);
    }
    Ok(())
}
