//! Numeric flag values, with π-multiples accepted symbolically.

use std::f64::consts::PI;

use crate::exact_spectra::SpinStructure2;

/// Parses `3.5`, `1e-3`, `pi`, `4pi^2`, `pi^2/4`, `2*pi/3`, `-pi`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let value = match t.find("pi") {
        None => t.parse::<f64>().map_err(|_| format!("not a number: '{s}'"))?,
        Some(at) => {
            let coef = t[..at].trim_end_matches('*');
            let coef = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| format!("bad coefficient in '{s}'"))?,
            };
            let mut rest = &t[at + 2..];
            let mut power = 1i32;
            if let Some(r) = rest.strip_prefix('^') {
                let end = r.find('/').unwrap_or(r.len());
                power = r[..end]
                    .parse::<i32>()
                    .map_err(|_| format!("bad exponent in '{s}'"))?;
                rest = &r[end..];
            }
            let den = match rest {
                "" => 1.0,
                r => match r.strip_prefix('/') {
                    Some(d) => d.parse::<f64>().map_err(|_| format!("bad denominator in '{s}'"))?,
                    None => return Err(format!("unexpected '{r}' in '{s}'")),
                },
            };
            if den == 0.0 {
                return Err(format!("zero denominator in '{s}'"));
            }
            coef * PI.powi(power) / den
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("value must be finite: '{s}'"))
    }
}

/// Comma-separated list of [`parse_real`] values.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_real).collect()
}

/// A comma-separated list flag.
#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

pub fn parse_real_list(s: &str) -> Result<RealList, String> {
    parse_list(s).map(RealList)
}

/// Exactly four reals `ux,uy,vx,vy`.
pub fn parse_lattice(s: &str) -> Result<[f64; 4], String> {
    let v = parse_list(s)?;
    v.try_into()
        .map_err(|v: Vec<f64>| format!("lattice needs 4 values ux,uy,vx,vy, got {}", v.len()))
}

/// `e1,e2` with each flag 0 or 1.
pub fn parse_spin(s: &str) -> Result<SpinStructure2, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("spin needs two flags e1,e2, got '{s}'"));
    }
    let flag = |p: &str| p.parse::<u8>().map_err(|_| format!("spin flags must be 0 or 1, got '{p}'"));
    SpinStructure2::new(flag(parts[0])?, flag(parts[1])?).map_err(|e| e.to_string())
}
