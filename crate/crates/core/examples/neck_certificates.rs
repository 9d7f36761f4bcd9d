//! Two round bulbs joined by shrinking necks. Each bulb keeps an approximate
//! eigenvalue near 1/c, certified by a cut-off Killing spinor.
//!
//! Run: `cargo run --release --example neck_certificates`

use dirac_spectra::degeneration::neck_sweep;
use dirac_spectra::exact_spectra::SpinStructure2;
use dirac_spectra::warped_dirac::{BulbParams, WarpProfile};

fn main() -> dirac_spectra::Result<()> {
    let template = WarpProfile::bulb_dumbbell(BulbParams {
        c1: 1.0,
        c2: 1.5,
        neck_width: 0.4,
        neck_radius: 0.05,
        smoothing: None,
    })?;
    let radii = [0.05, 0.025, 0.0125];
    let sweep = neck_sweep(&template, &radii, SpinStructure2::new(0, 1)?, 256, 1)?;
    println!("lambda1+ trend as the neck shrinks: {:?}", sweep.lambda1_trend);
    for pt in &sweep.points {
        println!(
            "r = {:<7} lambda1+ = {:.6}  kernel {}  delta {:?}",
            pt.point.parameter, pt.point.lambda1_plus, pt.kernel_dim, pt.delta
        );
        for (c, err) in pt.certificates.iter().zip(&pt.target_errors) {
            println!(
                "   target {:.4}: residual {:.4}  bound {:.4}  nearest {:.6}  |gap| {:.1e}  sound {}",
                c.lambda,
                c.residual,
                c.energy_bound.unwrap_or(f64::NAN),
                c.nearest_eigenvalue,
                err,
                c.sound
            );
        }
    }
    Ok(())
}
