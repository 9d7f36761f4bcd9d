//! Round-sphere Dirac spectra and the Bär lower bound on 2-spheres.
//!
//! Run: `cargo run --example sphere_baer`

use dirac_spectra::exact_spectra::{sphere_spectrum, sphere_volume};
use dirac_spectra::inequality_audit::baer_check;

fn main() -> dirac_spectra::Result<()> {
    for n in [2, 3, 4] {
        let spec = sphere_spectrum(n, 3)?;
        println!("S^{n}:");
        for l in &spec.levels {
            println!("  k={} D^2={:<6} per-sign mult {:<4} D^2 mult {}", l.k, l.d2_value, l.multiplicity, l.d2_multiplicity);
        }
    }

    // Round sphere of radius r: lambda1 = 1/r^2, area = 4 pi r^2.
    let area = sphere_volume(2)?;
    for r in [0.5, 1.0, 3.0] {
        let report = baer_check(1.0 / (r * r), area * r * r)?;
        println!("radius {r}: lambda1*area = {:.15} {} 4pi -> {:?}", report.lhs, report.relation.as_str(), report.verdict);
    }
    // A product far below 4 pi cannot come from a 2-sphere.
    let report = baer_check(0.5, 4.0)?;
    println!("lambda1 = 0.5, area 4: {:?} ({})", report.verdict, report.note.unwrap_or_default());
    Ok(())
}
