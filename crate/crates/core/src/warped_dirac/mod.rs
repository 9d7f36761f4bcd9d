//! Dirac spectra of warped-product tori `dt² + f(t)²dθ²`.
//!
//! Fourier decomposition in `θ` splits the operator into independent 1D
//! first-order systems, one per frequency `ν = k + ε_θ/2`. Each is discretised
//! with Fourier spectral differentiation in `t` (half-integer frequencies for
//! an antiperiodic spin structure in `t`).

mod eigen;
mod mode;
mod profile;

pub use eigen::{eigensolve_hermitian, hermitian_defect, hermitian_eigenvalues, HermitianEigen};
pub use mode::{build_mode_operator, fourier_derivative, ModeOperator, SingularTriples};
pub use profile::{BulbParams, DumbbellParams, WarpProfile, WarpShape};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_spectra::{merge_levels, SpectralLevel, SpinStructure2};

/// Which mode produced a given eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeIndex {
    pub nu: f64,
    /// Position of the singular value within its mode, ascending.
    pub index: usize,
}

/// Discrete spectrum of `D²` on a warped torus.
///
/// Every singular value `σ` of a mode block contributes the Dirac eigenvalues
/// `±σ`, hence the `D²` value `σ²` twice; both copies are listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub d2_values: Vec<f64>,
    pub provenance: Vec<ModeIndex>,
    /// `‖Hx − λx‖` of the unit eigenvector behind each value.
    pub residuals: Vec<f64>,
    /// Largest `|λ|` over all computed Dirac eigenvalues.
    pub spectral_radius: f64,
    pub grid_size: usize,
    pub kmax: usize,
    pub spin: SpinStructure2,
    pub area: f64,
}

impl EigenResult {
    /// Values of `D²` below this are treated as kernel.
    pub fn zero_threshold(&self) -> f64 {
        let s = 1e-9 * self.spectral_radius;
        s * s
    }

    pub fn kernel_dim(&self) -> usize {
        let z = self.zero_threshold();
        self.d2_values.iter().filter(|&&x| x <= z).count()
    }

    pub fn lambda1_plus(&self) -> Option<f64> {
        let z = self.zero_threshold();
        self.d2_values.iter().copied().find(|&x| x > z)
    }

    /// Values grouped into levels (kernel values snapped to zero).
    pub fn levels(&self, cutoff: f64) -> Vec<SpectralLevel> {
        let z = self.zero_threshold();
        merge_levels(
            self.d2_values
                .iter()
                .take_while(|&&x| x <= cutoff)
                .map(|&x| (if x <= z { 0.0 } else { x }, 1)),
        )
    }
}

/// θ-frequencies `ν = k + ε_θ/2` for `k ∈ [−kmax, kmax]`.
pub fn mode_frequencies(spin: SpinStructure2, kmax: usize) -> Vec<f64> {
    let shift = 0.5 * spin.eps2() as f64;
    let k = kmax as i64;
    (-k..=k).map(|k| k as f64 + shift).collect()
}

/// Smallest `kmax` such that the lightest omitted mode has `(ν/max f)²` at least
/// twice `window`.
pub fn default_kmax(profile: &WarpProfile, spin: SpinStructure2, window: f64) -> usize {
    let fmax = profile.max_value();
    let shift = 0.5 * spin.eps2() as f64;
    let mut kmax = 0usize;
    loop {
        // |ν| of the lightest mode outside [−kmax, kmax]
        let omitted = (kmax as f64 + 1.0 - shift).min(kmax as f64 + 1.0 + shift);
        if (omitted / fmax).powi(2) >= 2.0 * window {
            return kmax.max(1);
        }
        kmax += 1;
    }
}

/// Union of the mode spectra for `ν = k + ε_θ/2`, `|k| ≤ kmax`, squared and sorted.
///
/// The spin structure's first flag sets the boundary phase in `t`, the
/// second the one in `θ`. Output is ordered by value and then by mode, so it
/// does not depend on evaluation order.
pub fn warped_spectrum(
    profile: &WarpProfile,
    spin: SpinStructure2,
    grid_size: usize,
    kmax: usize,
) -> Result<EigenResult> {
    if kmax < 1 {
        return Err(Error::invalid("kmax must be at least 1"));
    }
    let mut entries: Vec<(f64, ModeIndex, f64)> = Vec::new();
    let mut radius = 0.0f64;
    // A(−ν) = A(ν)* exactly, so each ±ν pair needs one decomposition.
    let mut solved: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
    for nu in mode_frequencies(spin, kmax) {
        if let Some((_, values, res)) = solved.iter().find(|(m, _, _)| *m == -nu && nu != 0.0) {
            for (i, (&s, &r)) in values.iter().zip(res).enumerate() {
                let idx = ModeIndex { nu, index: i };
                entries.push((s * s, idx, r));
                entries.push((s * s, idx, r));
            }
            continue;
        }
        let op = build_mode_operator(profile, nu, spin.eps1() == 1, grid_size)?;
        let tr = op.singular_triples()?;
        let a = op.block();
        let sigma = DMatrix::from_diagonal(&DVector::from_iterator(
            tr.values.len(),
            tr.values.iter().map(|&s| Complex64::from(s)),
        ));
        let forward = a * &tr.right - &tr.left * &sigma;
        let backward = a.ad_mul(&tr.left) - &tr.right * &sigma;
        let mut res = Vec::with_capacity(tr.values.len());
        for (i, &s) in tr.values.iter().enumerate() {
            let r1 = forward.column(i).norm();
            let r2 = backward.column(i).norm();
            let res_i = ((r1 * r1 + r2 * r2) / 2.0).sqrt();
            res.push(res_i);
            let idx = ModeIndex { nu, index: i };
            entries.push((s * s, idx, res_i));
            entries.push((s * s, idx, res_i));
            radius = radius.max(s);
        }
        solved.push((nu, tr.values, res));
    }
    entries.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.nu.total_cmp(&b.1.nu))
            .then(a.1.index.cmp(&b.1.index))
    });
    let worst = entries.iter().map(|e| e.2).fold(0.0, f64::max);
    if worst > 1e-9 * radius.max(1.0) {
        return Err(Error::Numerical(format!(
            "eigensolver residual {worst:e} exceeds 1e-9 × spectral radius {radius:e}"
        )));
    }
    Ok(EigenResult {
        d2_values: entries.iter().map(|e| e.0).collect(),
        provenance: entries.iter().map(|e| e.1).collect(),
        residuals: entries.iter().map(|e| e.2).collect(),
        spectral_radius: radius,
        grid_size,
        kmax,
        spin,
        area: profile.area()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spin(a: u8, b: u8) -> SpinStructure2 {
        SpinStructure2::new(a, b).unwrap()
    }

    #[test]
    fn constant_profile_closed_form() {
        let c = 0.37;
        let l = 1.3;
        let p = WarpProfile::constant(c, l).unwrap();
        for (nu, anti) in [(0.0, true), (0.7, false), (1.5, true), (-2.0, false)] {
            let op = build_mode_operator(&p, nu, anti, 16).unwrap();
            let eps = anti as i64;
            let ms: Vec<i64> = if anti { (-8..8).collect() } else { (-7..=8).collect() };
            let mut expected: Vec<f64> = ms
                .iter()
                .flat_map(|&m| {
                    let w = PI * (2 * m + eps) as f64 / l;
                    let e = (w * w + (nu / c).powi(2)).sqrt();
                    [e, -e]
                })
                .collect();
            expected.sort_by(f64::total_cmp);
            let got = op.dirac_eigenvalues();
            for (a, b) in got.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-10, "nu={nu}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn antiperiodic_zero_mode_gap() {
        let l = 2.5;
        let p = WarpProfile::constant(0.8, l).unwrap();
        for n in [8, 32] {
            let op = build_mode_operator(&p, 0.0, true, n).unwrap();
            let smallest = op.singular_values()[0];
            assert!((smallest - PI / l).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_mode_has_kernel_for_any_profile() {
        let p = WarpProfile::sampled((0..10).map(|j| 1.0 + 0.4 * (j as f64).sin()).collect(), 1.7)
            .unwrap();
        let op = build_mode_operator(&p, 0.0, false, 20).unwrap();
        let ev = op.dirac_eigenvalues();
        assert!(ev.iter().filter(|x| x.abs() < 1e-10).count() >= 2);
    }

    #[test]
    fn kmax_must_be_positive() {
        let p = WarpProfile::constant(1.0, 1.0).unwrap();
        assert!(warped_spectrum(&p, spin(0, 0), 8, 0).is_err());
    }

    #[test]
    fn default_kmax_covers_window() {
        let p = WarpProfile::constant(0.5, 1.0).unwrap();
        let k = default_kmax(&p, spin(0, 1), 40.0);
        // lightest omitted |ν| = k + ½ must satisfy 4(k+½)² ≥ 80
        assert!(4.0 * (k as f64 + 0.5).powi(2) >= 80.0);
        assert!(4.0 * (k as f64 - 0.5).powi(2) < 80.0);
    }

    #[test]
    fn square_torus_small_grid() {
        let p = WarpProfile::constant(1.0 / (2.0 * PI), 1.0).unwrap();
        let r = warped_spectrum(&p, spin(0, 0), 16, 3).unwrap();
        assert_eq!(r.kernel_dim(), 2);
        assert!((r.lambda1_plus().unwrap() - 4.0 * PI * PI).abs() < 1e-9);
        assert!(r.d2_values.windows(2).all(|w| w[0] <= w[1]));
        let levels = r.levels(4.0 * PI * PI * 1.5);
        assert_eq!(levels[0].multiplicity, 2);
        assert_eq!(levels[1].multiplicity, 8);
    }
}
