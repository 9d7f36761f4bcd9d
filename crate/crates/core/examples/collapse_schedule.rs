//! Parameters of the collapsing construction for a few p.
//!
//! Run: `cargo run --example collapse_schedule`

use dirac_spectra::degeneration::theorem1_schedule;
use dirac_spectra::exact_spectra::SpinStructure2;

fn main() -> dirac_spectra::Result<()> {
    let spin = SpinStructure2::new(0, 1)?;
    println!("{:>5} {:>10} {:>10} {:>22} {:>8} {:>10}", "p", "L", "epsilon", "interval", "eta", "vol bound");
    for p in [1, 2, 10, 100, 1000] {
        let s = theorem1_schedule(p, 4.0, 2, spin)?;
        println!(
            "{:>5} {:>10.6} {:>10.6} [{:>9.6}, {:>9.6}] {:>8.4} {:>10.6}",
            s.p,
            s.l,
            s.epsilon,
            s.interval[0],
            s.interval[1],
            s.eta.unwrap_or(f64::NAN),
            s.volume_bound
        );
    }
    let s = theorem1_schedule(10, 4.0, 3, SpinStructure2::new(0, 0)?)?;
    println!("\ndimension 3: {}", serde_json::to_string_pretty(&s).unwrap());
    Ok(())
}
