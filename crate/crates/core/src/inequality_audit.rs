//! Arithmetic checks of the Bär, Li–Yau and Ammann bounds, and witnesses
//! against a conformal lower bound for `λ₁⁺(D²)·Area` on stretched tori.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::degeneration::{stretch_family, stretch_product_closed_form};
use crate::error::{Error, Result};
use crate::exact_spectra::{sphere_volume, SpinStructure2};

/// Default relative slack for verdicts.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<=")]
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Informational,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
        }
    }

    /// `holds` iff `lhs ≥ rhs` (resp. `≤`) up to relative slack `rel_tol`.
    pub fn verdict(self, lhs: f64, rhs: f64, rel_tol: f64) -> Verdict {
        let slack = rel_tol * lhs.abs().max(rhs.abs());
        let ok = match self {
            Relation::AtLeast => lhs >= rhs - slack,
            Relation::AtMost => lhs <= rhs + slack,
        };
        if ok {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub verdict: Verdict,
    /// `|lhs − rhs| / max(|lhs|, |rhs|)`.
    pub relative_gap: f64,
    pub inputs: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl AuditReport {
    fn new(check: &str, lhs: f64, rhs: f64, relation: Relation, verdict: Verdict) -> Self {
        let denom = lhs.abs().max(rhs.abs());
        AuditReport {
            check: check.into(),
            lhs,
            rhs,
            relation,
            verdict,
            relative_gap: if denom == 0.0 { 0.0 } else { (lhs - rhs).abs() / denom },
            inputs: BTreeMap::new(),
            witness: None,
            note: None,
            warning: None,
        }
    }

    fn input(mut self, name: &str, value: f64) -> Self {
        self.inputs.insert(name.into(), value);
        self
    }
}

fn check_dim(n: u32) -> Result<()> {
    if n < 2 {
        Err(Error::invalid(format!("dimension must be at least 2, got {n}")))
    } else {
        Ok(())
    }
}

fn check_tol(rel_tol: f64) -> Result<()> {
    if (0.0..1.0).contains(&rel_tol) {
        Ok(())
    } else {
        Err(Error::invalid(format!("relative tolerance must lie in [0, 1), got {rel_tol}")))
    }
}

/// `λ₁(D²)·Area ≥ 4π`, valid on every 2-sphere.
pub fn baer_check(lambda1_d2: f64, area: f64) -> Result<AuditReport> {
    baer_check_with_tol(lambda1_d2, area, DEFAULT_REL_TOL)
}

pub fn baer_check_with_tol(lambda1_d2: f64, area: f64, rel_tol: f64) -> Result<AuditReport> {
    check_tol(rel_tol)?;
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::invalid(format!("area must be positive, got {area}")));
    }
    if !(lambda1_d2 >= 0.0 && lambda1_d2.is_finite()) {
        return Err(Error::invalid(format!(
            "lambda must be nonnegative and finite, got {lambda1_d2}"
        )));
    }
    let lhs = lambda1_d2 * area;
    let rhs = 4.0 * PI;
    let verdict = Relation::AtLeast.verdict(lhs, rhs, rel_tol);
    let mut r = AuditReport::new("baer", lhs, rhs, Relation::AtLeast, verdict)
        .input("lambda", lambda1_d2)
        .input("area", area)
        .input("rel_tol", rel_tol);
    if r.relative_gap <= rel_tol {
        r.note = Some("equality".into());
    } else if verdict == Verdict::Violated {
        r.note = Some("below 4pi: the metric is not a 2-sphere or the input is inconsistent".into());
    }
    Ok(r)
}

/// Lower bound `Vol(Sⁿ, can)` for the conformal volume.
pub fn liyau_floor(n: u32) -> Result<f64> {
    check_dim(n)?;
    sphere_volume(n)
}

/// `(n²/4)·Vol(Sⁿ)^{2/n}`, the value of `λ₁⁺(D²)Vol^{2/n}` on the round sphere.
pub fn ammann_bound(n: u32) -> Result<f64> {
    check_dim(n)?;
    let nf = n as f64;
    Ok(nf * nf / 4.0 * sphere_volume(n)?.powf(2.0 / nf))
}

pub fn liyau_floor_report(n: u32) -> Result<AuditReport> {
    let v = liyau_floor(n)?;
    let mut r = AuditReport::new("liyau_floor", v, v, Relation::AtLeast, Verdict::Informational)
        .input("dim", n as f64);
    r.note = Some("V_c(M, [g]) >= Vol(S^n, can) = rhs".into());
    Ok(r)
}

pub fn ammann_report(n: u32) -> Result<AuditReport> {
    let b = ammann_bound(n)?;
    let nf = n as f64;
    let round = nf * nf / 4.0 * sphere_volume(n)?.powf(2.0 / nf);
    let mut r = AuditReport::new("ammann", round, b, Relation::AtMost, Verdict::Informational)
        .input("dim", n as f64);
    r.note = Some("conformal infimum of lambda1+(D^2) Vol^(2/n) is at most rhs".into());
    Ok(r)
}

/// `n·V_c^{2/n}` for a caller-supplied conformal volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceRhs {
    pub value: f64,
    pub below_floor: bool,
}

pub fn liyau_laplace_rhs(n: u32, vc: f64) -> Result<LaplaceRhs> {
    check_dim(n)?;
    if !(vc > 0.0 && vc.is_finite()) {
        return Err(Error::invalid(format!("conformal volume must be positive, got {vc}")));
    }
    let floor = liyau_floor(n)?;
    Ok(LaplaceRhs {
        value: n as f64 * vc.powf(2.0 / n as f64),
        below_floor: vc < floor * (1.0 - DEFAULT_REL_TOL),
    })
}

pub fn liyau_laplace_report(n: u32, vc: f64) -> Result<AuditReport> {
    let out = liyau_laplace_rhs(n, vc)?;
    let floor = liyau_floor(n)?;
    let rhs = n as f64 * floor.powf(2.0 / n as f64);
    let mut r = AuditReport::new("liyau_laplace", out.value, rhs, Relation::AtLeast, Verdict::Informational)
        .input("dim", n as f64)
        .input("vc", vc);
    r.note = Some("lhs bounds lambda1(Laplace) Vol^(2/n) from above; rhs is its value at the floor".into());
    if out.below_floor {
        r.warning = Some(format!("vc = {vc} is below the floor Vol(S^{n}) = {floor}"));
    }
    Ok(r)
}

/// For each candidate `c`, the smallest swept `a` whose stretched torus has
/// `λ₁⁺·Area < c·Vol(S²)`, which rules out `λ₁⁺·Area ≥ c·V_c` as a bound.
///
/// The verdict refers to the candidate bound: `violated` when a witness was
/// found, `holds` (within the sweep only) otherwise.
pub fn corollary1_demo(
    spin: SpinStructure2,
    a_values: &[f64],
    c_candidates: &[f64],
) -> Result<Vec<AuditReport>> {
    if a_values.is_empty() {
        return Err(Error::invalid("at least one stretch parameter is required"));
    }
    if a_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("stretch parameters must be strictly increasing"));
    }
    if let Some(bad) = c_candidates.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
        return Err(Error::invalid(format!("candidate constants must be positive, got {bad}")));
    }
    let family = stretch_family(spin, a_values)?;
    let floor = liyau_floor(2)?;
    let mut out = Vec::with_capacity(c_candidates.len());
    for &c in c_candidates {
        let threshold = c * floor;
        let hit = family.iter().find(|p| p.product < threshold);
        let mut r = match hit {
            Some(p) => {
                if let Some(cf) = stretch_product_closed_form(spin, p.parameter) {
                    if cf >= threshold {
                        return Err(Error::Numerical(format!(
                            "witness a = {} not confirmed by the closed form",
                            p.parameter
                        )));
                    }
                }
                let mut r = AuditReport::new(
                    "corollary1",
                    p.product,
                    threshold,
                    Relation::AtLeast,
                    Verdict::Violated,
                );
                r.witness = Some(p.parameter);
                r.note = Some(format!("candidate bound fails at a = {}", p.parameter));
                r
            }
            None => {
                let min = family.iter().map(|p| p.product).fold(f64::INFINITY, f64::min);
                let mut r =
                    AuditReport::new("corollary1", min, threshold, Relation::AtLeast, Verdict::Holds);
                r.note = Some("no witness in range".into());
                r
            }
        };
        r = r
            .input("c", c)
            .input("eps1", spin.eps1() as f64)
            .input("eps2", spin.eps2() as f64)
            .input("a_min", a_values[0])
            .input("a_max", *a_values.last().expect("nonempty"));
        out.push(r);
    }
    Ok(out)
}
