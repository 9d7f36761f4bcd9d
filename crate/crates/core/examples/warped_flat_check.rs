//! The warped solver on a constant profile reproduces the flat torus exactly.
//!
//! Run: `cargo run --release --example warped_flat_check`

use std::f64::consts::PI;

use dirac_spectra::exact_spectra::{torus_lambda1_plus, Lattice2, SpinStructure2};
use dirac_spectra::warped_dirac::{warped_spectrum, WarpProfile};

fn main() -> dirac_spectra::Result<()> {
    let a = 2.0;
    // f = a/(2 pi) on a circle of length 1 is the rectangle with sides 1 and a.
    let profile = WarpProfile::constant(a / (2.0 * PI), 1.0)?;
    let lat = Lattice2::rectangular(a)?;
    for spin in SpinStructure2::all() {
        let r = warped_spectrum(&profile, spin, 64, 6)?;
        let got = r.lambda1_plus().unwrap_or(f64::NAN);
        let want = torus_lambda1_plus(&lat, spin);
        println!(
            "spin ({},{}): discrete {:.12}  exact {:.12}  diff {:.1e}  kernel {}",
            spin.eps1(),
            spin.eps2(),
            got,
            want,
            (got - want).abs(),
            r.kernel_dim()
        );
    }
    Ok(())
}
