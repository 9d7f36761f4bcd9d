//! Degenerating metric families and the collapse schedule.
//!
//! The stretched tori `ℝ²/(ℤ(1,0) ⊕ ℤ(0,a))` have `λ₁⁺(D²)·Area → 0` for the
//! spin structures trivial on the short circle. Dumbbell sweeps pinch a neck
//! between two plateaus and track the spectrum, area and plateau certificates.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_spectra::{torus_lambda1_plus, torus_spectrum, Lattice2, SpinStructure2};
use crate::rayleigh_certifier::{certify_bulb_plateau, Certificate};
use crate::warped_dirac::{warped_spectrum, BulbParams, WarpProfile, WarpShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSource {
    Exact,
    Discrete,
}

impl PointSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointSource::Exact => "exact",
            PointSource::Discrete => "discrete",
        }
    }
}

/// One member of a family: `product = λ₁⁺ · volume^{2/n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyPoint {
    pub parameter: f64,
    pub lambda1_plus: f64,
    pub volume: f64,
    pub product: f64,
    pub source: PointSource,
}

impl FamilyPoint {
    fn surface(parameter: f64, lambda1_plus: f64, area: f64, source: PointSource) -> Self {
        FamilyPoint {
            parameter,
            lambda1_plus,
            volume: area,
            product: lambda1_plus * area,
            source,
        }
    }
}

/// `λ₁⁺ · Area` of the stretched torus by the two-term closed form, for the
/// spin structures trivial on the short circle.
pub fn stretch_product_closed_form(spin: SpinStructure2, a: f64) -> Option<f64> {
    match (spin.eps1(), spin.eps2()) {
        (0, 0) => Some(4.0 * PI * PI / a),
        (0, 1) => Some(PI * PI / a),
        _ => None,
    }
}

/// Exact family `g_a` on `ℤ(1,0) ⊕ ℤ(0,a)`, sorted by `a`.
pub fn stretch_family(spin: SpinStructure2, a_values: &[f64]) -> Result<Vec<FamilyPoint>> {
    if let Some(bad) = a_values.iter().find(|a| !(**a > 1.0 && a.is_finite())) {
        return Err(Error::invalid(format!("stretch parameters must exceed 1, got {bad}")));
    }
    let mut out: Vec<FamilyPoint> = a_values
        .iter()
        .map(|&a| {
            let lat = Lattice2::rectangular(a)?;
            Ok(FamilyPoint::surface(
                a,
                torus_lambda1_plus(&lat, spin),
                lat.area(),
                PointSource::Exact,
            ))
        })
        .collect::<Result<_>>()?;
    out.sort_by(|x, y| x.parameter.total_cmp(&y.parameter));
    Ok(out)
}

/// `n` points from `start` to `end` with constant ratio.
pub fn geometric_range(start: f64, end: f64, steps: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && end > 0.0 && start.is_finite() && end.is_finite()) {
        return Err(Error::invalid("range endpoints must be positive"));
    }
    match steps {
        0 => Err(Error::invalid("steps must be at least 1")),
        1 => Ok(vec![start]),
        _ => {
            let ratio = end / start;
            let last = (steps - 1) as f64;
            Ok((0..steps)
                .map(|k| match k {
                    0 => start,
                    k if k == steps - 1 => end,
                    k => start * ratio.powf(k as f64 / last),
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelMetric {
    /// Unit-area torus `g_{a_p}/a_p`.
    Torus {
        a: f64,
        spin: SpinStructure2,
    },
    /// Dimension ≥ 3: only the existence of the model metric is known.
    Symbolic { description: String },
}

/// Parameters of the collapse argument for one `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub p: u64,
    pub dim: u32,
    pub model_metric: ModelMetric,
    /// `λ₁⁺` of the model metric (for dim ≥ 3 the target value `1/p`).
    #[serde(rename = "L")]
    pub l: f64,
    pub epsilon: f64,
    pub eta: Option<f64>,
    pub eta_advisory: String,
    pub interval: [f64; 2],
    pub base_volume: f64,
    pub volume_bound: f64,
}

/// Schedule with `L = λ₁⁺(g_p) ≤ 1/p`, `ε = L/2`, interval `[L/2, 3L/2]` and
/// volume bound `Vol(M) + 1 + 1/(2p)`.
///
/// For `dim = 2` the model is the unit-area stretched torus with
/// `a_p = 4π²p` (spin (0,0)) or `a_p = π²p` (spin (0,1)); spin structures that
/// are non-trivial on the short circle do not collapse and are rejected.
/// `eta` is half the gap from `L` to the next distinct model eigenvalue; it is
/// advisory because the background spectrum is not known here.
pub fn theorem1_schedule(
    p: u64,
    base_volume: f64,
    dim: u32,
    spin: SpinStructure2,
) -> Result<Schedule> {
    if p == 0 {
        return Err(Error::invalid("p must be at least 1"));
    }
    if !(base_volume >= 0.0 && base_volume.is_finite()) {
        return Err(Error::invalid("base volume must be nonnegative and finite"));
    }
    if dim < 2 {
        return Err(Error::invalid("dimension must be at least 2"));
    }
    let pf = p as f64;
    let volume_bound = base_volume + 1.0 + 1.0 / (2.0 * pf);
    if dim >= 3 {
        let l = 1.0 / pf;
        return Ok(Schedule {
            p,
            dim,
            model_metric: ModelMetric::Symbolic {
                description: format!(
                    "unit-volume metric on S^{dim} with 0 < lambda1+(D^2) <= 1/p (existence only)"
                ),
            },
            l,
            epsilon: l / 2.0,
            eta: None,
            eta_advisory: "no model spectrum available; eta must avoid both spectra".into(),
            interval: [l / 2.0, 1.5 * l],
            base_volume,
            volume_bound,
        });
    }
    let a = match stretch_product_closed_form(spin, 1.0) {
        Some(c) => c * pf,
        None => {
            return Err(Error::invalid(format!(
                "spin structure ({}, {}) is non-trivial on the short circle; stretching does not collapse it",
                spin.eps1(),
                spin.eps2()
            )))
        }
    };
    let lat = Lattice2::rectangular(a)?;
    // unit-area rescaling by 1/√a multiplies D² eigenvalues by a
    let l = a * torus_lambda1_plus(&lat, spin);
    let mut cutoff = 4.0 * l / a;
    let next = loop {
        let slice = torus_spectrum(&lat, spin, cutoff)?;
        if let Some(v) = slice
            .entries
            .iter()
            .map(|e| e.value * a)
            .find(|&v| v > l * (1.0 + 1e-12))
        {
            break v;
        }
        cutoff *= 4.0;
    };
    Ok(Schedule {
        p,
        dim,
        model_metric: ModelMetric::Torus { a, spin },
        l,
        epsilon: l / 2.0,
        eta: Some((next - l) / 2.0),
        eta_advisory: "eta avoids the model spectrum only; the background spectrum is not checked"
            .into(),
        interval: [l / 2.0, 1.5 * l],
        base_volume,
        volume_bound,
    })
}

/// Direction of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    StrictlyIncreasing,
    StrictlyDecreasing,
    Constant,
    Nondecreasing,
    Nonincreasing,
    Mixed,
}

/// Trend of `values`; steps within `rel_tol` (relative) count as ties.
pub fn trend(values: &[f64], rel_tol: f64) -> Trend {
    let (mut up, mut down, mut flat) = (false, false, false);
    for w in values.windows(2) {
        let tol = rel_tol * w[0].abs().max(w[1].abs());
        if w[1] > w[0] + tol {
            up = true;
        } else if w[1] < w[0] - tol {
            down = true;
        } else {
            flat = true;
        }
    }
    match (up, down, flat) {
        (true, true, _) => Trend::Mixed,
        (true, false, false) => Trend::StrictlyIncreasing,
        (true, false, true) => Trend::Nondecreasing,
        (false, true, false) => Trend::StrictlyDecreasing,
        (false, true, true) => Trend::Nonincreasing,
        (false, false, _) => Trend::Constant,
    }
}

/// One radius of a neck sweep.
#[derive(Debug, Clone, Serialize)]
pub struct NeckPoint {
    #[serde(flatten)]
    pub point: FamilyPoint,
    pub profile: WarpProfile,
    pub kernel_dim: usize,
    /// Cut-off scale (bulb dumbbells only: half the neck width).
    pub delta: Option<f64>,
    pub certificates: Vec<Certificate>,
    /// `|λ̃ − λ|` per certificate: distance from the plateau eigenvalue to the
    /// nearest computed eigenvalue.
    pub target_errors: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NeckSweep {
    pub spin: SpinStructure2,
    pub grid_size: usize,
    pub kmax: usize,
    pub points: Vec<NeckPoint>,
    pub lambda1_trend: Trend,
}

impl NeckSweep {
    pub fn family(&self) -> Vec<FamilyPoint> {
        self.points.iter().map(|p| p.point).collect()
    }
}

/// Profile of the sweep at neck radius `r`.
///
/// Tube dumbbells only change the radius. Bulb dumbbells scale the neck width
/// and smoothing with `r`, so the neck stays geometrically similar.
pub fn neck_profile(template: &WarpProfile, r: f64) -> Result<WarpProfile> {
    match template.shape() {
        WarpShape::Dumbbell(_) => template.with_neck_radius(r),
        WarpShape::BulbDumbbell(p) => {
            let k = r / p.neck_radius;
            WarpProfile::bulb_dumbbell(BulbParams {
                neck_radius: r,
                neck_width: p.neck_width * k,
                smoothing: p.smoothing.map(|s| s * k),
                ..*p
            })
        }
        _ => Err(Error::invalid("neck sweeps need a dumbbell or bulb_dumbbell profile")),
    }
}

/// Spectrum, area and (for bulb dumbbells in the spin structures with
/// half-integer θ-modes) plateau certificates at each radius.
///
/// Certificates target the Killing-spinor eigenvalues `+1/c₁` and `+1/c₂` with
/// cut-off scale `δ = w/2`. Output is ordered by decreasing radius.
pub fn neck_sweep(
    template: &WarpProfile,
    radii: &[f64],
    spin: SpinStructure2,
    grid_size: usize,
    kmax: usize,
) -> Result<NeckSweep> {
    if radii.is_empty() {
        return Err(Error::invalid("at least one neck radius is required"));
    }
    if let Some(bad) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::invalid(format!("neck radii must be positive, got {bad}")));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("neck radii must be strictly decreasing"));
    }
    let mut points = Vec::with_capacity(radii.len());
    for &r in radii {
        let profile = neck_profile(template, r)?;
        let spec = warped_spectrum(&profile, spin, grid_size, kmax)?;
        let lambda = spec
            .lambda1_plus()
            .ok_or_else(|| Error::Numerical("no positive eigenvalue computed".into()))?;
        let mut certificates = Vec::new();
        let mut delta = None;
        if let WarpShape::BulbDumbbell(p) = profile.shape() {
            let d = p.neck_width / 2.0;
            delta = Some(d);
            if spin.eps2() == 1 {
                let dirac: Vec<f64> = spec
                    .d2_values
                    .iter()
                    .flat_map(|&v| {
                        let s = v.max(0.0).sqrt();
                        [s, -s]
                    })
                    .collect();
                for bulb in 0..2 {
                    certificates.push(certify_bulb_plateau(
                        &profile,
                        bulb,
                        true,
                        d,
                        spin.eps1() == 1,
                        grid_size,
                        Some(&dirac),
                    )?);
                }
            }
        }
        let target_errors = certificates.iter().map(|c| c.gap()).collect();
        points.push(NeckPoint {
            point: FamilyPoint::surface(r, lambda, spec.area, PointSource::Discrete),
            profile,
            kernel_dim: spec.kernel_dim(),
            delta,
            certificates,
            target_errors,
        });
    }
    let lambdas: Vec<f64> = points.iter().map(|p| p.point.lambda1_plus).collect();
    Ok(NeckSweep {
        spin,
        grid_size,
        kmax,
        lambda1_trend: trend(&lambdas, 1e-9),
        points,
    })
}

/// `x` with 17 significant digits in positional notation.
pub fn format_sig17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.16}", 0.0);
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// CSV table with columns `parameter, lambda1_plus, volume, product, source`.
pub fn write_family_csv<W: Write>(points: &[FamilyPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["parameter", "lambda1_plus", "volume", "product", "source"])?;
    for p in points {
        w.write_record([
            format_sig17(p.parameter),
            format_sig17(p.lambda1_plus),
            format_sig17(p.volume),
            format_sig17(p.product),
            p.source.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warped_dirac::DumbbellParams;

    fn spin(a: u8, b: u8) -> SpinStructure2 {
        SpinStructure2::new(a, b).unwrap()
    }

    #[test]
    fn stretch_examples() {
        let pts = stretch_family(spin(0, 0), &[4.0 * PI * PI]).unwrap();
        assert!((pts[0].product - 1.0).abs() < 1e-12);
        let pts = stretch_family(spin(0, 1), &[100.0]).unwrap();
        assert!((pts[0].product - 0.098_696_044_010_893_6).abs() < 1e-12);
        let pts = stretch_family(spin(0, 0), &[1000.0, 10.0, 100.0]).unwrap();
        assert_eq!(pts.iter().map(|p| p.parameter).collect::<Vec<_>>(), [10.0, 100.0, 1000.0]);
        assert_eq!(trend(&pts.iter().map(|p| p.product).collect::<Vec<_>>(), 0.0), Trend::StrictlyDecreasing);
        for p in &pts {
            assert_eq!(p.product, p.lambda1_plus * p.volume);
            assert_eq!(p.source, PointSource::Exact);
        }
    }

    #[test]
    fn stretch_rejects_small_a() {
        for bad in [1.0, 0.5, -3.0, f64::NAN] {
            assert!(matches!(stretch_family(spin(0, 0), &[10.0, bad]), Err(Error::InvalidInput(_))));
        }
    }

    #[test]
    fn stretch_agrees_with_closed_form() {
        for s in [spin(0, 0), spin(0, 1)] {
            for p in stretch_family(s, &[1.5, 2.0, 7.3, 10.0, 1e3, 1e5]).unwrap() {
                let cf = stretch_product_closed_form(s, p.parameter).unwrap();
                assert!((p.product - cf).abs() <= 1e-12 * cf, "{p:?} vs {cf}");
            }
        }
        assert!(stretch_product_closed_form(spin(1, 0), 3.0).is_none());
    }

    #[test]
    fn geometric_range_endpoints() {
        let r = geometric_range(10.0, 1000.0, 3).unwrap();
        assert_eq!(r[0], 10.0);
        assert_eq!(r[1], 100.0);
        assert_eq!(r[2], 1000.0);
        assert!(geometric_range(10.0, 1000.0, 0).is_err());
    }

    #[test]
    fn schedule_examples() {
        let s = theorem1_schedule(1, 2.5, 2, spin(0, 0)).unwrap();
        match s.model_metric {
            ModelMetric::Torus { a, .. } => assert!((a - 4.0 * PI * PI).abs() < 1e-12),
            _ => panic!(),
        }
        assert!((s.l - 1.0).abs() < 1e-12);
        assert_eq!(s.interval, [s.l / 2.0, 1.5 * s.l]);
        assert_eq!(s.volume_bound, 2.5 + 1.5);
        // next model value is 4L, so η = 3L/2
        assert!((s.eta.unwrap() - 1.5).abs() < 1e-12);

        let s = theorem1_schedule(10, 0.0, 2, spin(0, 1)).unwrap();
        match s.model_metric {
            ModelMetric::Torus { a, .. } => assert!((a - 10.0 * PI * PI).abs() < 1e-12),
            _ => panic!(),
        }
        assert!((s.l - 0.1).abs() < 1e-12);
        assert!((s.interval[0] - 0.05).abs() < 1e-13 && (s.interval[1] - 0.15).abs() < 1e-13);
        // next value (3/2)²·… = 9L
        assert!((s.eta.unwrap() - 0.4).abs() < 1e-12);

        for dim in [2, 3, 7] {
            for p in [1u64, 3, 100] {
                let s = theorem1_schedule(p, 1.25, dim, spin(0, 0)).unwrap();
                assert_eq!(s.volume_bound, 1.25 + 1.0 + 1.0 / (2.0 * p as f64));
                assert!((s.volume_bound - 1.25 - (1.0 + 0.5 / p as f64)).abs() < 1e-15);
                assert!(s.l <= 1.0 / p as f64 * (1.0 + 1e-12));
            }
        }
        assert!(matches!(theorem1_schedule(3, 0.0, 3, spin(1, 1)).unwrap().model_metric, ModelMetric::Symbolic { .. }));
        assert!(theorem1_schedule(0, 0.0, 2, spin(0, 0)).is_err());
        assert!(theorem1_schedule(1, 0.0, 2, spin(1, 0)).is_err());
    }

    #[test]
    fn trend_classification() {
        assert_eq!(trend(&[1.0, 2.0, 3.0], 0.0), Trend::StrictlyIncreasing);
        assert_eq!(trend(&[3.0, 2.0, 2.0], 0.0), Trend::Nonincreasing);
        assert_eq!(trend(&[1.0, 1.0], 0.0), Trend::Constant);
        assert_eq!(trend(&[1.0, 2.0, 1.5], 0.0), Trend::Mixed);
    }

    #[test]
    fn sig17_format() {
        assert_eq!(format_sig17(PI), "3.1415926535897931");
        assert_eq!(format_sig17(1000.0), "1000.0000000000000");
        assert_eq!(format_sig17(0.0), "0.0000000000000000");
        assert!(!format_sig17(1e-20).contains('e'));
        assert!(!format_sig17(3e25).contains('e'));
    }

    #[test]
    fn csv_layout() {
        let pts = stretch_family(spin(0, 0), &[10.0]).unwrap();
        let mut buf = Vec::new();
        write_family_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "parameter,lambda1_plus,volume,product,source");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "10.000000000000000");
        assert_eq!(row[4], "exact");
        assert!((row[3].parse::<f64>().unwrap() - 0.4 * PI * PI).abs() < 1e-15);
    }

    #[test]
    fn unpinched_dumbbell_equals_constant_profile() {
        let c = 0.6;
        let l = 4.0;
        let tube = WarpProfile::dumbbell(
            DumbbellParams { c1: c, c2: c, neck_width: 0.4, neck_radius: 0.1, smoothing: None },
            l,
        )
        .unwrap();
        let sweep = neck_sweep(&tube, &[c], spin(0, 1), 32, 2).unwrap();
        let flat = warped_spectrum(&WarpProfile::constant(c, l).unwrap(), spin(0, 1), 32, 2).unwrap();
        let pinched = warped_spectrum(&sweep.points[0].profile, spin(0, 1), 32, 2).unwrap();
        assert_eq!(pinched.d2_values, flat.d2_values);
        assert_eq!(sweep.points[0].point.lambda1_plus, flat.lambda1_plus().unwrap());
        assert!(sweep.points[0].certificates.is_empty());
    }

    #[test]
    fn sweep_validation() {
        let tube = WarpProfile::dumbbell(
            DumbbellParams { c1: 1.0, c2: 1.0, neck_width: 0.4, neck_radius: 0.1, smoothing: None },
            4.0,
        )
        .unwrap();
        assert!(neck_sweep(&tube, &[0.1, 0.2], spin(0, 0), 16, 1).is_err());
        assert!(neck_sweep(&tube, &[], spin(0, 0), 16, 1).is_err());
        assert!(neck_sweep(&tube, &[0.2, -0.1], spin(0, 0), 16, 1).is_err());
        let flat = WarpProfile::constant(1.0, 1.0).unwrap();
        assert!(neck_sweep(&flat, &[0.1], spin(0, 0), 16, 1).is_err());
    }

    #[test]
    fn bulb_sweep_certificates() {
        let template = WarpProfile::bulb_dumbbell(BulbParams {
            c1: 1.0,
            c2: 1.0,
            neck_width: 0.4,
            neck_radius: 0.05,
            smoothing: None,
        })
        .unwrap();
        let sweep = neck_sweep(&template, &[0.05, 0.025], spin(0, 1), 128, 1).unwrap();
        for pt in &sweep.points {
            assert_eq!(pt.delta, Some(pt.point.parameter * 4.0));
            assert_eq!(pt.certificates.len(), 2);
            assert!(pt.certificates.iter().all(|c| c.sound));
            // area excess over two unit spheres is small and shrinks with the neck
            assert!((pt.point.volume - 8.0 * PI).abs() < 0.2);
        }
        let ex: Vec<f64> = sweep.points.iter().map(|p| (p.point.volume - 8.0 * PI).abs()).collect();
        assert!(ex[1] < ex[0]);
    }
}
