//! Dirichlet energy of the logarithmic cut-off on an annulus: -1/ln(delta),
//! checked against adaptive quadrature.
//!
//! Run: `cargo run --example annulus_energy`

use dirac_spectra::rayleigh_certifier::{annulus_energy, log_cutoff, CutoffSpec};

fn main() -> dirac_spectra::Result<()> {
    for d in [1e-1, 1e-2, 1e-4, 1e-8, 1e-16] {
        let e = annulus_energy(d)?;
        println!("delta {d:e}: closed form {:.15}  quadrature {:.15}  gap {:.1e}", e.closed_form, e.quadrature, e.relative_gap());
    }
    let spec = CutoffSpec::new(0.01, 0.0)?;
    for x in [0.005, 0.01, 0.03, 0.1, 0.2] {
        println!("chi({x}) = {:.6}", log_cutoff(x, &spec));
    }
    Ok(())
}
