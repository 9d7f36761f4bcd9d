//! Warp functions `f(t) > 0` of warped-product tori `dt² + f(t)²dθ²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Plateau/neck profile with two cylindrical plateaus joined through thin tubes.
///
/// Necks are centred at `t = 0` and `t = L/2`. Within distance `w/2` of a neck
/// centre the radius is `r_neck`; a cubic smoothstep of width `s` rises to the
/// plateau radius (`c1` on `(0, L/2)`, `c2` on `(L/2, L)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DumbbellParams {
    pub c1: f64,
    pub c2: f64,
    pub neck_width: f64,
    pub neck_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
}

impl DumbbellParams {
    pub fn smoothing_width(&self) -> f64 {
        self.smoothing.unwrap_or(self.neck_width / 4.0)
    }
}

/// Two round bulbs (spheres of radii `c1`, `c2`) joined pole-to-pole through
/// two necks, giving a torus of period `π(c1 + c2)`.
///
/// Away from the necks bulb `i` has `f = cᵢ sin(d/cᵢ)`, `d` being the distance
/// to the nearer neck centre; this is the round sphere written in polar
/// coordinates about its poles. For `d < w/2` the profile is replaced by a neck
/// of radius `r_neck`, joined by a C¹ cubic Hermite blend on
/// `[w/2 − s, w/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BulbParams {
    pub c1: f64,
    pub c2: f64,
    pub neck_width: f64,
    pub neck_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
}

impl BulbParams {
    pub fn smoothing_width(&self) -> f64 {
        self.smoothing.unwrap_or(self.neck_width / 4.0)
    }

    pub fn period(&self) -> f64 {
        PI * (self.c1 + self.c2)
    }

    /// Start of bulb 2 (the second neck centre).
    pub fn second_neck(&self) -> f64 {
        PI * self.c1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WarpShape {
    Constant { c: f64 },
    Dumbbell(DumbbellParams),
    BulbDumbbell(BulbParams),
    Sampled { samples: Vec<f64> },
}

/// A validated warp profile over one period `[0, L_t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub struct WarpProfile {
    period: f64,
    shape: WarpShape,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum ProfileRepr {
    Constant { period: f64, parameters: ConstantRepr },
    Dumbbell { period: f64, parameters: DumbbellParams },
    BulbDumbbell { period: f64, parameters: BulbParams },
    Sampled { period: f64, samples: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantRepr {
    c: f64,
}

impl TryFrom<ProfileRepr> for WarpProfile {
    type Error = Error;

    fn try_from(r: ProfileRepr) -> Result<Self> {
        match r {
            ProfileRepr::Constant { period, parameters } => Self::constant(parameters.c, period),
            ProfileRepr::Dumbbell { period, parameters } => Self::dumbbell(parameters, period),
            ProfileRepr::BulbDumbbell { period, parameters } => {
                let p = Self::bulb_dumbbell(parameters)?;
                if (p.period - period).abs() > 1e-12 * p.period {
                    return Err(Error::invalid(format!(
                        "bulb dumbbell period must be π(c1+c2) = {}, got {period}",
                        p.period
                    )));
                }
                // keep the caller's bits for a faithful round trip
                Ok(WarpProfile { period, ..p })
            }
            ProfileRepr::Sampled { period, samples } => Self::sampled(samples, period),
        }
    }
}

impl From<WarpProfile> for ProfileRepr {
    fn from(p: WarpProfile) -> Self {
        let period = p.period;
        match p.shape {
            WarpShape::Constant { c } => ProfileRepr::Constant {
                period,
                parameters: ConstantRepr { c },
            },
            WarpShape::Dumbbell(parameters) => ProfileRepr::Dumbbell { period, parameters },
            WarpShape::BulbDumbbell(parameters) => ProfileRepr::BulbDumbbell { period, parameters },
            WarpShape::Sampled { samples } => ProfileRepr::Sampled { period, samples },
        }
    }
}

fn check_period(period: f64) -> Result<()> {
    if period > 0.0 && period.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("period must be positive and finite"))
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

/// `3x² − 2x³`, clamped to `[0, 1]`.
fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

/// Cubic Hermite interpolant on `[0, 1]` with end values `y0, y1` and end
/// slopes `m0, m1` (already scaled to the unit interval).
fn hermite(x: f64, y0: f64, m0: f64, y1: f64, m1: f64) -> f64 {
    let x2 = x * x;
    let x3 = x2 * x;
    (2.0 * x3 - 3.0 * x2 + 1.0) * y0
        + (x3 - 2.0 * x2 + x) * m0
        + (-2.0 * x3 + 3.0 * x2) * y1
        + (x3 - x2) * m1
}

impl WarpProfile {
    pub fn constant(c: f64, period: f64) -> Result<Self> {
        check_period(period)?;
        check_positive("c", c)?;
        Ok(WarpProfile {
            period,
            shape: WarpShape::Constant { c },
        })
    }

    pub fn dumbbell(p: DumbbellParams, period: f64) -> Result<Self> {
        check_period(period)?;
        check_positive("c1", p.c1)?;
        check_positive("c2", p.c2)?;
        check_positive("neck_radius", p.neck_radius)?;
        check_positive("neck_width", p.neck_width)?;
        let s = p.smoothing_width();
        check_positive("smoothing", s)?;
        if p.neck_width / 2.0 + s > period / 4.0 {
            return Err(Error::invalid(
                "neck_width/2 + smoothing must not exceed a quarter period",
            ));
        }
        Ok(WarpProfile {
            period,
            shape: WarpShape::Dumbbell(p),
        })
    }

    pub fn bulb_dumbbell(p: BulbParams) -> Result<Self> {
        check_positive("c1", p.c1)?;
        check_positive("c2", p.c2)?;
        check_positive("neck_radius", p.neck_radius)?;
        check_positive("neck_width", p.neck_width)?;
        let s = p.smoothing_width();
        check_positive("smoothing", s)?;
        let half = p.neck_width / 2.0;
        if s > half {
            return Err(Error::invalid("smoothing must not exceed neck_width/2"));
        }
        for c in [p.c1, p.c2] {
            if half >= PI * c / 2.0 {
                return Err(Error::invalid("neck_width/2 must stay below a quarter bulb"));
            }
            if p.neck_radius >= c * (half / c).sin() {
                return Err(Error::invalid(
                    "neck_radius must be below the bulb radius at the neck edge",
                ));
            }
        }
        Ok(WarpProfile {
            period: p.period(),
            shape: WarpShape::BulbDumbbell(p),
        })
    }

    pub fn sampled(samples: Vec<f64>, period: f64) -> Result<Self> {
        check_period(period)?;
        if samples.len() < 8 {
            return Err(Error::invalid("sampled profiles need at least 8 samples"));
        }
        if let Some(bad) = samples.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::invalid(format!(
                "profile samples must be positive, found {bad}"
            )));
        }
        Ok(WarpProfile {
            period,
            shape: WarpShape::Sampled { samples },
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn shape(&self) -> &WarpShape {
        &self.shape
    }

    /// Same shape with a different neck radius (dumbbells only).
    pub fn with_neck_radius(&self, r: f64) -> Result<Self> {
        match self.shape {
            WarpShape::Dumbbell(p) => Self::dumbbell(
                DumbbellParams {
                    neck_radius: r,
                    ..p
                },
                self.period,
            ),
            WarpShape::BulbDumbbell(p) => Self::bulb_dumbbell(BulbParams {
                neck_radius: r,
                ..p
            }),
            _ => Err(Error::invalid("only dumbbell profiles have a neck radius")),
        }
    }

    /// Value at `t` for closed-form shapes; sampled profiles use the
    /// trigonometric interpolant of their samples.
    pub fn value_at(&self, t: f64) -> f64 {
        let l = self.period;
        let t = t.rem_euclid(l);
        match &self.shape {
            WarpShape::Constant { c } => *c,
            WarpShape::Dumbbell(p) => {
                let (d, c) = if t < l / 2.0 {
                    (t.min(l / 2.0 - t), p.c1)
                } else {
                    ((t - l / 2.0).min(l - t), p.c2)
                };
                let x = (d - p.neck_width / 2.0) / p.smoothing_width();
                p.neck_radius + (c - p.neck_radius) * smoothstep(x)
            }
            WarpShape::BulbDumbbell(p) => {
                let split = p.second_neck();
                let (d, c) = if t < split {
                    (t.min(split - t), p.c1)
                } else {
                    ((t - split).min(l - t), p.c2)
                };
                bulb_value(d, c, p)
            }
            WarpShape::Sampled { samples } => trig_interpolate(samples, t / l),
        }
    }

    /// Profile values on the uniform grid `t_j = jL/n`.
    pub fn sample(&self, n: usize) -> Result<Vec<f64>> {
        let h = self.period / n as f64;
        let vals: Vec<f64> = match &self.shape {
            WarpShape::Sampled { samples } if samples.len() == n => samples.clone(),
            _ => (0..n).map(|j| self.value_at(j as f64 * h)).collect(),
        };
        if let Some(bad) = vals.iter().find(|x| !(**x > 0.0)) {
            return Err(Error::invalid(format!(
                "profile is not positive on the {n}-point grid (value {bad})"
            )));
        }
        Ok(vals)
    }

    /// Points where the closed form switches between smooth pieces.
    fn breakpoints(&self) -> Vec<f64> {
        let l = self.period;
        let mut b = vec![0.0, l];
        match &self.shape {
            WarpShape::Dumbbell(p) => {
                let (hw, s) = (p.neck_width / 2.0, p.smoothing_width());
                for centre in [0.0, l / 2.0, l] {
                    for off in [-hw - s, -hw, hw, hw + s] {
                        b.push(centre + off);
                    }
                }
            }
            WarpShape::BulbDumbbell(p) => {
                let (hw, s) = (p.neck_width / 2.0, p.smoothing_width());
                for centre in [0.0, p.second_neck(), l] {
                    for off in [-hw, -hw + s, hw - s, hw] {
                        b.push(centre + off);
                    }
                }
                b.push(p.second_neck());
                b.push(p.second_neck() / 2.0);
                b.push(0.5 * (p.second_neck() + l));
            }
            _ => {}
        }
        b.retain(|x| (0.0..=l).contains(x));
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Area `2π∫₀^L f(t) dt` of the warped torus.
    pub fn area(&self) -> Result<f64> {
        let l = self.period;
        match &self.shape {
            WarpShape::Constant { c } => Ok(2.0 * PI * c * l),
            // exact for the trigonometric interpolant
            WarpShape::Sampled { samples } => {
                Ok(2.0 * PI * l * samples.iter().sum::<f64>() / samples.len() as f64)
            }
            _ => Ok(2.0 * PI
                * quadrature::integrate_piecewise(|t| self.value_at(t), &self.breakpoints(), 1e-13)?),
        }
    }

    pub fn max_value(&self) -> f64 {
        match &self.shape {
            WarpShape::Constant { c } => *c,
            WarpShape::Dumbbell(p) => p.c1.max(p.c2).max(p.neck_radius),
            WarpShape::BulbDumbbell(p) => p.c1.max(p.c2),
            WarpShape::Sampled { samples } => samples.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Profile with samples multiplied by `t` over a period multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        check_positive("scale", t)?;
        match &self.shape {
            WarpShape::Constant { c } => Self::constant(c * t, self.period * t),
            WarpShape::Dumbbell(p) => Self::dumbbell(
                DumbbellParams {
                    c1: p.c1 * t,
                    c2: p.c2 * t,
                    neck_width: p.neck_width * t,
                    neck_radius: p.neck_radius * t,
                    smoothing: p.smoothing.map(|s| s * t),
                },
                self.period * t,
            ),
            WarpShape::BulbDumbbell(p) => Self::bulb_dumbbell(BulbParams {
                c1: p.c1 * t,
                c2: p.c2 * t,
                neck_width: p.neck_width * t,
                neck_radius: p.neck_radius * t,
                smoothing: p.smoothing.map(|s| s * t),
            }),
            WarpShape::Sampled { samples } => {
                Self::sampled(samples.iter().map(|x| x * t).collect(), self.period * t)
            }
        }
    }

    pub fn describe(&self) -> String {
        match &self.shape {
            WarpShape::Constant { c } => format!("constant c={c} period={}", self.period),
            WarpShape::Dumbbell(p) => format!(
                "dumbbell c1={} c2={} w={} r_neck={} s={} period={}",
                p.c1,
                p.c2,
                p.neck_width,
                p.neck_radius,
                p.smoothing_width(),
                self.period
            ),
            WarpShape::BulbDumbbell(p) => format!(
                "bulb_dumbbell c1={} c2={} w={} r_neck={} s={} period={}",
                p.c1,
                p.c2,
                p.neck_width,
                p.neck_radius,
                p.smoothing_width(),
                self.period
            ),
            WarpShape::Sampled { samples } => {
                format!("sampled n={} period={}", samples.len(), self.period)
            }
        }
    }
}

/// Bulb profile at distance `d` from the nearer neck centre.
fn bulb_value(d: f64, c: f64, p: &BulbParams) -> f64 {
    let hw = p.neck_width / 2.0;
    let s = p.smoothing_width();
    if d >= hw {
        return c * (d / c).sin();
    }
    let start = hw - s;
    if d <= start {
        return p.neck_radius;
    }
    let y1 = c * (hw / c).sin();
    let m1 = (hw / c).cos() * s;
    hermite((d - start) / s, p.neck_radius, 0.0, y1, m1)
}

/// Trigonometric interpolant of periodic samples at phase `x ∈ [0, 1)`.
fn trig_interpolate(samples: &[f64], x: f64) -> f64 {
    let m = samples.len();
    let half = m / 2;
    let mut acc = 0.0;
    for k in 0..=half {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, &f) in samples.iter().enumerate() {
            let ang = 2.0 * PI * ((k * j) % m) as f64 / m as f64;
            re += f * ang.cos();
            im -= f * ang.sin();
        }
        let weight = if k == 0 || (m.is_multiple_of(2) && k == half) { 1.0 } else { 2.0 };
        let ang = 2.0 * PI * k as f64 * x;
        acc += weight * (re * ang.cos() - im * ang.sin());
    }
    acc / m as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bulbs(r: f64) -> WarpProfile {
        WarpProfile::bulb_dumbbell(BulbParams {
            c1: 1.0,
            c2: 1.0,
            neck_width: 0.2,
            neck_radius: r,
            smoothing: None,
        })
        .unwrap()
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(WarpProfile::constant(0.0, 1.0).is_err());
        assert!(WarpProfile::constant(1.0, -1.0).is_err());
        assert!(WarpProfile::sampled(vec![1.0; 7], 1.0).is_err());
        assert!(WarpProfile::sampled(vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -0.5], 1.0).is_err());
        let p = DumbbellParams {
            c1: 1.0,
            c2: 1.0,
            neck_width: 2.0,
            neck_radius: 0.1,
            smoothing: None,
        };
        assert!(WarpProfile::dumbbell(p, 4.0).is_err());
        assert!(WarpProfile::bulb_dumbbell(BulbParams {
            c1: 1.0,
            c2: 1.0,
            neck_width: 0.2,
            neck_radius: 0.5,
            smoothing: None,
        })
        .is_err());
    }

    #[test]
    fn dumbbell_without_pinch_is_constant() {
        let p = DumbbellParams {
            c1: 0.7,
            c2: 0.7,
            neck_width: 0.2,
            neck_radius: 0.7,
            smoothing: None,
        };
        let prof = WarpProfile::dumbbell(p, 3.0).unwrap();
        assert!(prof.sample(64).unwrap().iter().all(|&x| x == 0.7));
    }

    #[test]
    fn profiles_are_c1() {
        let tube = WarpProfile::dumbbell(
            DumbbellParams {
                c1: 1.0,
                c2: 0.6,
                neck_width: 0.3,
                neck_radius: 0.1,
                smoothing: None,
            },
            4.0,
        )
        .unwrap();
        // A C¹ profile has slope jumps between neighbouring difference
        // quotients of size O(h); a kink would keep them O(1) under refinement.
        let max_jump = |prof: &WarpProfile, n: usize| {
            let v = prof.sample(n).unwrap();
            let h = prof.period() / n as f64;
            let slopes: Vec<f64> = (0..n).map(|j| (v[(j + 1) % n] - v[j]) / h).collect();
            (0..n)
                .map(|j| (slopes[(j + 1) % n] - slopes[j]).abs())
                .fold(0.0, f64::max)
        };
        for prof in [tube, bulbs(0.02)] {
            let coarse = max_jump(&prof, 20_000);
            let fine = max_jump(&prof, 40_000);
            assert!(fine < 0.6 * coarse, "{coarse} -> {fine}");
        }
    }

    #[test]
    fn bulb_matches_sphere_away_from_neck() {
        let p = bulbs(0.02);
        for t in [0.3, 1.0, PI / 2.0, 2.5] {
            assert!((p.value_at(t) - t.sin()).abs() < 1e-15);
            assert!((p.value_at(PI + t) - t.sin()).abs() < 1e-14);
        }
        assert_eq!(p.value_at(0.0), 0.02);
        assert_eq!(p.value_at(PI), 0.02);
    }

    #[test]
    fn area_matches_trapezoid_refinement() {
        // The trapezoid rule converges at O(h²) on C¹ profiles; Richardson
        // extrapolation of two fine grids is an independent check.
        let prof = bulbs(0.05);
        let trap = |n: usize| {
            let v = prof.sample(n).unwrap();
            2.0 * PI * prof.period() * v.iter().sum::<f64>() / n as f64
        };
        let rich = (4.0 * trap(1 << 16) - trap(1 << 15)) / 3.0;
        let area = prof.area().unwrap();
        assert!((area - rich).abs() < 1e-7 * area, "{area} vs {rich}");
        // two unit spheres, up to the O(w·r) change inside the necks
        assert!((area - 8.0 * PI).abs() < 0.05, "{area}");
        let c = WarpProfile::constant(0.5, 2.0).unwrap();
        assert!((c.area().unwrap() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn trig_interpolation_is_exact_on_band_limited_data() {
        let m = 16;
        let f = |x: f64| 1.0 + 0.3 * (2.0 * PI * x).sin() + 0.1 * (6.0 * PI * x).cos();
        let samples: Vec<f64> = (0..m).map(|j| f(j as f64 / m as f64)).collect();
        let prof = WarpProfile::sampled(samples, 2.0).unwrap();
        for x in [0.013, 0.25, 0.61, 0.999] {
            assert!((prof.value_at(2.0 * x) - f(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let profiles = [
            WarpProfile::constant(1.0 / (2.0 * PI), 1.0).unwrap(),
            bulbs(0.0123456789012345),
            WarpProfile::sampled((0..9).map(|j| 1.0 + 0.1 * (j as f64).sin()).collect(), 0.3)
                .unwrap(),
        ];
        for p in profiles {
            let text = serde_json::to_string(&p).unwrap();
            let back: WarpProfile = serde_json::from_str(&text).unwrap();
            assert_eq!(back, p);
            assert_eq!(serde_json::to_string(&back).unwrap(), text);
        }
        let err = serde_json::from_str::<WarpProfile>(
            r#"{"type":"constant","period":1.0,"parameters":{"c":-1.0}}"#,
        );
        assert!(err.is_err());
    }
}
