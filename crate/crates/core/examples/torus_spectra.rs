//! D² spectrum of a flat torus for all four spin structures.
//!
//! Run: `cargo run --example torus_spectra`

use dirac_spectra::exact_spectra::{torus_kernel_dim, torus_lambda1_plus, torus_spectrum, Lattice2, SpinStructure2};

fn main() -> dirac_spectra::Result<()> {
    let lat = Lattice2::new([1.0, 0.0], [0.3, 2.0])?;
    println!("lattice u = {:?}, v = {:?}, area {}", lat.u(), lat.v(), lat.area());
    for spin in SpinStructure2::all() {
        let slice = torus_spectrum(&lat, spin, 120.0)?;
        println!(
            "\nspin ({},{}): kernel {}, lambda1+ = {:.10}",
            spin.eps1(),
            spin.eps2(),
            torus_kernel_dim(&lat, spin),
            torus_lambda1_plus(&lat, spin)
        );
        for level in &slice.entries {
            println!("  {:>14.8}  x{}", level.value, level.multiplicity);
        }
    }
    Ok(())
}
