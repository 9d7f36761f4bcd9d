//! Stretched flat tori: lambda1+ * area decays like 1/a.
//!
//! Run: `cargo run --example stretch_collapse`

use dirac_spectra::degeneration::{geometric_range, stretch_family, trend, write_family_csv};
use dirac_spectra::exact_spectra::SpinStructure2;

fn main() -> dirac_spectra::Result<()> {
    let a = geometric_range(2.0, 1000.0, 8)?;
    for (e1, e2) in [(0, 0), (0, 1), (1, 0)] {
        let spin = SpinStructure2::new(e1, e2)?;
        let family = stretch_family(spin, &a)?;
        let products: Vec<f64> = family.iter().map(|p| p.product).collect();
        println!("spin ({e1},{e2}), trend {:?}", trend(&products, 0.0));
        write_family_csv(&family, std::io::stdout())?;
        println!();
    }
    Ok(())
}
