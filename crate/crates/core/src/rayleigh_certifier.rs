//! Logarithmic cut-offs, annulus energies and residual certificates.
//!
//! A certificate `(λ, ρ)` with `ρ = ‖(A − λ)v‖/‖v‖` guarantees, for Hermitian
//! `A`, an eigenvalue in `[λ − ρ, λ + ρ]`. On bulb dumbbells the trial vector is
//! a round-sphere Killing spinor multiplied by a logarithmic cut-off around each
//! neck, so the residual is controlled by the cut-off's Dirichlet energy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::warped_dirac::{
    build_mode_operator, hermitian_eigenvalues, ModeOperator, WarpProfile, WarpShape,
};

/// Slack allowed on energy bounds for the grid quadrature of the kinked cut-off.
pub const GRID_SLACK: f64 = 0.05;

/// Logarithmic cut-off of scale `delta` around `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffSpec {
    delta: f64,
    center: f64,
}

impl CutoffSpec {
    pub fn new(delta: f64, center: f64) -> Result<Self> {
        check_delta(delta)?;
        if !center.is_finite() {
            return Err(Error::invalid("cut-off centre must be finite"));
        }
        Ok(CutoffSpec { delta, center })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// Inner and outer annulus radii `δ`, `√δ`.
    pub fn annulus(&self) -> (f64, f64) {
        (self.delta, self.delta.sqrt())
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")))
    }
}

/// `0` for `d ≤ δ`, `1` for `d ≥ √δ`, `2 − 2 ln d / ln δ` in between.
pub fn log_cutoff(d: f64, spec: &CutoffSpec) -> f64 {
    let (lo, hi) = spec.annulus();
    if d <= lo {
        0.0
    } else if d >= hi {
        1.0
    } else {
        (2.0 - 2.0 * d.ln() / spec.delta.ln()).clamp(0.0, 1.0)
    }
}

/// `dχ/dd`, zero outside the open annulus.
pub fn log_cutoff_slope(d: f64, spec: &CutoffSpec) -> f64 {
    let (lo, hi) = spec.annulus();
    if d <= lo || d >= hi {
        0.0
    } else {
        -2.0 / (d * spec.delta.ln())
    }
}

/// `∫_δ^{√δ} |χ′(r)|² r dr` in closed form and by adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusEnergy {
    pub delta: f64,
    pub closed_form: f64,
    pub quadrature: f64,
}

impl AnnulusEnergy {
    pub fn relative_gap(&self) -> f64 {
        (self.closed_form - self.quadrature).abs() / self.closed_form
    }
}

pub fn annulus_energy(delta: f64) -> Result<AnnulusEnergy> {
    check_delta(delta)?;
    let l = delta.ln();
    let closed_form = -2.0 / l;
    let integrand = |r: f64| 4.0 / (r * l * l);
    let quad = quadrature::integrate(integrand, delta, delta.sqrt(), 1e-13)?;
    let out = AnnulusEnergy {
        delta,
        closed_form,
        quadrature: quad,
    };
    if out.relative_gap() > 1e-10 {
        return Err(Error::Numerical(format!(
            "annulus quadrature {quad} disagrees with closed form {closed_form}"
        )));
    }
    Ok(out)
}

/// A Hermitian operator that can be applied and fully diagonalised.
pub trait HermitianOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &DVector<Complex64>) -> DVector<Complex64>;
    /// All eigenvalues, ascending.
    fn spectrum(&self) -> Result<Vec<f64>>;
}

impl HermitianOperator for DMatrix<Complex64> {
    fn dim(&self) -> usize {
        self.ncols()
    }

    fn apply(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        self * x
    }

    fn spectrum(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(self)
    }
}

impl HermitianOperator for ModeOperator {
    fn dim(&self) -> usize {
        2 * self.grid_size()
    }

    fn apply(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        ModeOperator::apply(self, x)
    }

    fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(self.dirac_eigenvalues())
    }
}

/// Cut-off energy bookkeeping for a certificate built on a bulb dumbbell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyCheck {
    /// Largest `f(t)/d(t)` over the annuli (metric distortion against a flat disc).
    pub c_disc: f64,
    /// Largest pointwise `|φ|²` of the stored spinor.
    pub sup_phi_sq: f64,
    pub annuli: usize,
    /// Grid quadrature of `∫|χ′|²|ψ|² dt`.
    pub measured: f64,
    /// `annuli · c_disc · sup|φ|² · (−2/ln δ)`.
    pub allowed: f64,
    pub within_slack: bool,
}

/// Claim: the operator has an eigenvalue in `[lambda − residual, lambda + residual]`.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub lambda: f64,
    pub residual: f64,
    pub test_vector_norm: f64,
    pub delta: Option<f64>,
    /// `sqrt(C′ · (−2/ln δ))` with `C′ = 2 · C_disc · sup|φ|² / ‖v‖²`.
    pub energy_bound: Option<f64>,
    pub nearest_eigenvalue: f64,
    pub sound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyCheck>,
    #[serde(skip)]
    pub vector: DVector<Complex64>,
}

impl Certificate {
    /// Residual recomputed from the stored vector.
    pub fn recompute(&self, op: &impl HermitianOperator) -> Result<f64> {
        residual(op, &self.vector, self.lambda)
    }

    /// Distance from `lambda` to the nearest eigenvalue.
    pub fn gap(&self) -> f64 {
        (self.nearest_eigenvalue - self.lambda).abs()
    }

    /// `ρ ≤ energy_bound · sqrt(1 + GRID_SLACK)`, if a bound is attached.
    pub fn within_energy_bound(&self) -> Option<bool> {
        self.energy_bound
            .map(|b| self.residual <= b * (1.0 + GRID_SLACK).sqrt())
    }
}

fn residual(op: &impl HermitianOperator, v: &DVector<Complex64>, lambda: f64) -> Result<f64> {
    if v.len() != op.dim() {
        return Err(Error::invalid(format!(
            "test vector has length {}, operator dimension is {}",
            v.len(),
            op.dim()
        )));
    }
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::invalid("test vector must be nonzero and finite"));
    }
    if !lambda.is_finite() {
        return Err(Error::invalid("target eigenvalue must be finite"));
    }
    Ok((op.apply(v) - v * Complex64::from(lambda)).norm() / norm)
}

/// Residual certificate, checked against the operator's full spectrum.
pub fn certify(
    op: &impl HermitianOperator,
    v: &DVector<Complex64>,
    lambda: f64,
) -> Result<Certificate> {
    let rho = residual(op, v, lambda)?;
    let spectrum = op.spectrum()?;
    certificate_from(rho, v, lambda, &spectrum)
}

/// As [`certify`], with a precomputed spectrum (e.g. the union over all modes).
pub fn certify_against(
    op: &impl HermitianOperator,
    v: &DVector<Complex64>,
    lambda: f64,
    spectrum: &[f64],
) -> Result<Certificate> {
    let rho = residual(op, v, lambda)?;
    certificate_from(rho, v, lambda, spectrum)
}

fn certificate_from(
    rho: f64,
    v: &DVector<Complex64>,
    lambda: f64,
    spectrum: &[f64],
) -> Result<Certificate> {
    let nearest = spectrum
        .iter()
        .copied()
        .min_by(|a, b| (a - lambda).abs().total_cmp(&(b - lambda).abs()))
        .ok_or_else(|| Error::invalid("empty spectrum"))?;
    let tol = 1e-12 * lambda.abs().max(rho).max(1.0);
    Ok(Certificate {
        lambda,
        residual: rho,
        test_vector_norm: v.norm(),
        delta: None,
        energy_bound: None,
        nearest_eigenvalue: nearest,
        sound: (nearest - lambda).abs() <= rho + tol,
        energy: None,
        vector: v.clone(),
    })
}

/// One side of a glued model: eigenvectors of its plateau operator laid out on
/// the glued grid (length `2n`, upper then lower component) and its cut-off
/// sampled on the `n` grid points.
#[derive(Debug, Clone)]
pub struct PlateauSide {
    pub vectors: Vec<DVector<Complex64>>,
    pub cutoff: Vec<f64>,
}

/// Output of [`build_test_spinors`].
#[derive(Debug, Clone)]
pub struct TestSpinors {
    pub vectors: Vec<DVector<Complex64>>,
    /// Side index of each vector.
    pub side: Vec<usize>,
    pub gram: DMatrix<Complex64>,
    pub rank: usize,
    /// Set when the Gram matrix is rank deficient.
    pub warning: Option<String>,
}

/// `Φ(φ₁, …) = Σ χᵢφᵢ`: multiplies every plateau vector by its side's cut-off.
///
/// Cut-off supports must be disjoint on the grid. The Gram matrix of the result
/// is returned with its numerical rank; a short rank is reported as a warning.
pub fn build_test_spinors(sides: &[PlateauSide]) -> Result<TestSpinors> {
    let n = match sides.first() {
        Some(s) => s.cutoff.len(),
        None => return Err(Error::invalid("at least one plateau side is required")),
    };
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (i, side) in sides.iter().enumerate() {
        if side.cutoff.len() != n {
            return Err(Error::invalid("all cut-offs must live on the same grid"));
        }
        if let Some(bad) = side.cutoff.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::invalid(format!("cut-off value {bad} outside [0, 1]")));
        }
        for (j, &c) in side.cutoff.iter().enumerate() {
            if c > 0.0 {
                if let Some(k) = owner[j] {
                    return Err(Error::invalid(format!(
                        "cut-off supports of sides {k} and {i} overlap at grid point {j}"
                    )));
                }
                owner[j] = Some(i);
            }
        }
    }

    let mut vectors = Vec::new();
    let mut side_of = Vec::new();
    for (i, side) in sides.iter().enumerate() {
        for v in &side.vectors {
            if v.len() != 2 * n {
                return Err(Error::invalid(format!(
                    "plateau vector has length {}, expected {}",
                    v.len(),
                    2 * n
                )));
            }
            let w = DVector::from_fn(2 * n, |r, _| v[r] * side.cutoff[r % n]);
            vectors.push(w);
            side_of.push(i);
        }
    }

    let m = vectors.len();
    let gram = DMatrix::from_fn(m, m, |a, b| vectors[a].dotc(&vectors[b]));
    for a in 0..m {
        for b in 0..m {
            if side_of[a] != side_of[b] {
                let scale = vectors[a].norm() * vectors[b].norm();
                if gram[(a, b)].norm() > 1e-12 * scale.max(1.0) {
                    return Err(Error::Numerical(format!(
                        "vectors {a} and {b} from different sides are not orthogonal"
                    )));
                }
            }
        }
    }
    let rank = if m == 0 {
        0
    } else {
        let ev = hermitian_eigenvalues(&gram)?;
        let top = ev.iter().copied().fold(0.0, f64::max);
        ev.iter().filter(|&&x| x > 1e-10 * top).count()
    };
    let warning = (rank < m).then(|| {
        format!("test-spinor Gram matrix has rank {rank} < {m}; the grid may be too coarse")
    });
    Ok(TestSpinors {
        vectors,
        side: side_of,
        gram,
        rank,
        warning,
    })
}

/// Periodic distance between `t` and `center` on a circle of length `period`.
fn circle_distance(t: f64, center: f64, period: f64) -> f64 {
    let d = (t - center).rem_euclid(period);
    d.min(period - d)
}

/// Cut-off on the uniform grid `t_j = jL/n`: the smallest `χ` over the given
/// centres inside `[lo, hi]`, zero outside it.
pub fn grid_cutoff(
    period: f64,
    n: usize,
    specs: &[CutoffSpec],
    region: Option<(f64, f64)>,
) -> Vec<f64> {
    let h = period / n as f64;
    (0..n)
        .map(|j| {
            let t = j as f64 * h;
            if let Some((lo, hi)) = region {
                if t < lo || t > hi {
                    return 0.0;
                }
            }
            specs
                .iter()
                .map(|s| log_cutoff(circle_distance(t, s.center, period), s))
                .fold(1.0, f64::min)
        })
        .collect()
}

fn bulb_geometry(profile: &WarpProfile, bulb: usize) -> Result<(f64, f64, f64)> {
    let p = match profile.shape() {
        WarpShape::BulbDumbbell(p) => p,
        _ => return Err(Error::invalid("plateau spinors need a bulb_dumbbell profile")),
    };
    match bulb {
        0 => Ok((0.0, p.second_neck(), p.c1)),
        1 => Ok((p.second_neck(), profile.period(), p.c2)),
        _ => Err(Error::invalid(format!("bulb index must be 0 or 1, got {bulb}"))),
    }
}

/// Killing spinor of bulb `bulb` in the mode `ν = ½`, eigenvalue `±1/c`.
///
/// In the √f-gauge of the round sphere of radius `c` it reads
/// `(i√f cos(τ/2c), ∓√f sin(τ/2c))` with `τ` the distance from the bulb's first
/// pole, so `|φ|² = 1`. Entries outside the bulb are zero.
pub fn bulb_killing_spinor(
    profile: &WarpProfile,
    bulb: usize,
    positive: bool,
    n: usize,
) -> Result<(f64, DVector<Complex64>)> {
    let (lo, hi, c) = bulb_geometry(profile, bulb)?;
    let h = profile.period() / n as f64;
    let sign = if positive { 1.0 } else { -1.0 };
    let mut x = DVector::zeros(2 * n);
    for j in 0..n {
        let t = j as f64 * h;
        if t < lo || t > hi {
            continue;
        }
        let tau = t - lo;
        let g = (c * (tau / c).sin()).max(0.0).sqrt();
        let half = tau / (2.0 * c);
        x[j] = Complex64::new(0.0, g * half.cos());
        x[n + j] = Complex64::from(-sign * g * half.sin());
    }
    Ok((sign / c, x))
}

/// Cut-off for bulb `bulb`: log cut-offs of scale `delta` about both of its necks.
pub fn bulb_cutoff(profile: &WarpProfile, bulb: usize, delta: f64, n: usize) -> Result<Vec<f64>> {
    let (lo, hi, _) = bulb_geometry(profile, bulb)?;
    let specs = [CutoffSpec::new(delta, lo)?, CutoffSpec::new(delta, hi)?];
    Ok(grid_cutoff(profile.period(), n, &specs, Some((lo, hi))))
}

/// Certificate for the plateau eigenvalue `±1/cᵢ` of bulb `bulb`, tested in
/// the mode `ν = ½` of the glued operator.
///
/// `spectrum` may carry the union of all computed Dirac eigenvalues; otherwise
/// the mode operator is diagonalised.
pub fn certify_bulb_plateau(
    profile: &WarpProfile,
    bulb: usize,
    positive: bool,
    delta: f64,
    eps_t: bool,
    grid_size: usize,
    spectrum: Option<&[f64]>,
) -> Result<Certificate> {
    check_delta(delta)?;
    let (lo, hi, _) = bulb_geometry(profile, bulb)?;
    let p = match profile.shape() {
        WarpShape::BulbDumbbell(p) => *p,
        _ => unreachable!(),
    };
    if delta < p.neck_width / 2.0 {
        return Err(Error::invalid(format!(
            "delta {delta} is below neck_width/2 = {}; the cut-off must vanish on the neck",
            p.neck_width / 2.0
        )));
    }
    if delta.sqrt() >= 0.5 * (hi - lo) {
        return Err(Error::invalid(format!(
            "sqrt(delta) = {} must stay below a quarter bulb",
            delta.sqrt()
        )));
    }
    let op = build_mode_operator(profile, 0.5, eps_t, grid_size)?;
    let n = grid_size;
    let (lambda, phi) = bulb_killing_spinor(profile, bulb, positive, n)?;
    let side = PlateauSide {
        vectors: vec![phi],
        cutoff: bulb_cutoff(profile, bulb, delta, n)?,
    };
    let spinors = build_test_spinors(std::slice::from_ref(&side))?;
    let v = &spinors.vectors[0];
    let mut cert = match spectrum {
        Some(s) => certify_against(&op, v, lambda, s)?,
        None => certify(&op, v, lambda)?,
    };

    let h = profile.period() / n as f64;
    let f = op.profile();
    let sup_phi_sq = (0..n)
        .filter(|&j| v[j].norm() > 0.0 || v[n + j].norm() > 0.0)
        .map(|j| (v[j].norm_sqr() + v[n + j].norm_sqr()) / f[j])
        .fold(0.0, f64::max);
    let specs = [CutoffSpec::new(delta, lo)?, CutoffSpec::new(delta, hi)?];
    let measured: f64 = (0..n)
        .map(|j| {
            let t = j as f64 * h;
            let slope = specs
                .iter()
                .map(|s| log_cutoff_slope(circle_distance(t, s.center, profile.period()), s))
                .fold(0.0, |a: f64, b| a.max(b.abs()));
            slope * slope * (phi_sq(&side.vectors[0], j, n))
        })
        .sum::<f64>()
        * h;
    let c_disc = disc_distortion(profile, &specs, lo, hi);
    let ann = annulus_energy(delta)?.closed_form;
    let annuli = specs.len();
    let allowed = annuli as f64 * c_disc * sup_phi_sq * ann;
    let norm_sq = h * v.norm_squared();
    let c_prime = annuli as f64 * c_disc * sup_phi_sq / norm_sq;
    cert.delta = Some(delta);
    cert.energy_bound = Some((c_prime * ann).sqrt());
    cert.energy = Some(EnergyCheck {
        c_disc,
        sup_phi_sq,
        annuli,
        measured,
        allowed,
        within_slack: measured <= allowed * (1.0 + GRID_SLACK),
    });
    Ok(cert)
}

fn phi_sq(x: &DVector<Complex64>, j: usize, n: usize) -> f64 {
    x[j].norm_sqr() + x[n + j].norm_sqr()
}

/// Largest `f/d` over the annuli about the given neck centres, sampled finely
/// on the inward side of each centre.
fn disc_distortion(profile: &WarpProfile, specs: &[CutoffSpec], lo: f64, hi: f64) -> f64 {
    const SAMPLES: usize = 257;
    let mut worst = 0.0f64;
    for s in specs {
        let (a, b) = s.annulus();
        let inward = if (s.center - lo).abs() <= (s.center - hi).abs() { 1.0 } else { -1.0 };
        for k in 0..SAMPLES {
            // geometric spacing resolves the 1/d weight
            let d = a * (b / a).powf(k as f64 / (SAMPLES - 1) as f64);
            worst = worst.max(profile.value_at(s.center + inward * d) / d);
        }
    }
    worst
}
