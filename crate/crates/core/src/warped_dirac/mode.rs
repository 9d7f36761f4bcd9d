use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::profile::WarpProfile;
use crate::error::{Error, Result};

/// Fourier spectral representation of `−i d/dt` on the uniform `n`-point grid
/// over a period `L`.
///
/// Periodic functions (`antiperiodic == false`) use the integer frequencies
/// `m ∈ {−n/2+1, …, n/2}`, antiperiodic ones the half-integer frequencies
/// `m + ½` for `m ∈ {−n/2, …, n/2−1}`; either way the matrix is Hermitian and
/// its eigenvalues are exactly `2π(m + ε/2)/L`.
pub fn fourier_derivative(n: usize, period: f64, antiperiodic: bool) -> DMatrix<Complex64> {
    let eps = antiperiodic as i64;
    let n_i = n as i64;
    let (lo, hi) = if antiperiodic {
        (-n_i / 2, n_i / 2 - 1)
    } else {
        (-n_i / 2 + 1, n_i / 2)
    };
    // kernel[d] = (1/n) Σ_m ω_m exp(iω_m d h); phases reduced exactly mod 2n
    let kernel: Vec<Complex64> = (0..n_i)
        .map(|d| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in lo..=hi {
                let twice = 2 * m + eps;
                let omega = PI * twice as f64 / period;
                let phase = (twice * d).rem_euclid(2 * n_i);
                let ang = PI * phase as f64 / n as f64;
                acc += Complex64::from_polar(omega, ang);
            }
            acc / n as f64
        })
        .collect();
    DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            Complex64::new(kernel[0].re, 0.0)
        } else if j > k {
            kernel[j - k]
        } else {
            kernel[k - j].conj()
        }
    })
}

/// The Dirac operator of a warped torus restricted to the θ-Fourier mode
/// `e^{iνθ}`, written in the √f-gauge so that the L² measure is `dt`.
///
/// In the chiral splitting `ψ = (ψ₊, ψ₋)` it reads
/// `H = [[0, A], [A*, 0]]` with `A = −i∂_t − iν/f`, i.e.
/// `H = −iσ₁∂_t + σ₂ν/f`. The spectrum is `±` the singular values of `A`.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    nu: f64,
    eps_t: bool,
    period: f64,
    profile: Vec<f64>,
    block: DMatrix<Complex64>,
}

pub fn build_mode_operator(
    profile: &WarpProfile,
    nu: f64,
    eps_t: bool,
    grid_size: usize,
) -> Result<ModeOperator> {
    if grid_size < 8 || !grid_size.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "grid size must be even and at least 8, got {grid_size}"
        )));
    }
    if !nu.is_finite() {
        return Err(Error::invalid("mode frequency must be finite"));
    }
    let f = profile.sample(grid_size)?;
    let mut block = fourier_derivative(grid_size, profile.period(), eps_t);
    for (j, fj) in f.iter().enumerate() {
        block[(j, j)] -= Complex64::new(0.0, nu / fj);
    }
    Ok(ModeOperator {
        nu,
        eps_t,
        period: profile.period(),
        profile: f,
        block,
    })
}

impl ModeOperator {
    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn eps_t(&self) -> bool {
        self.eps_t
    }

    pub fn grid_size(&self) -> usize {
        self.profile.len()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn step(&self) -> f64 {
        self.period / self.grid_size() as f64
    }

    /// Profile samples on the grid.
    pub fn profile(&self) -> &[f64] {
        &self.profile
    }

    /// Off-diagonal block `A`.
    pub fn block(&self) -> &DMatrix<Complex64> {
        &self.block
    }

    /// The full `2N × 2N` Hermitian matrix.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let n = self.grid_size();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, n), (n, n)).copy_from(&self.block);
        m.view_mut((n, 0), (n, n)).copy_from(&self.block.adjoint());
        m
    }

    /// `H x` without forming the full matrix.
    pub fn apply(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        let n = self.grid_size();
        assert_eq!(x.len(), 2 * n, "vector length must be twice the grid size");
        let upper = &self.block * x.rows(n, n);
        let lower = self.block.ad_mul(&x.rows(0, n).into_owned());
        let mut out = DVector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&upper);
        out.rows_mut(n, n).copy_from(&lower);
        out
    }

    /// Frobenius norm of the full operator matrix.
    pub fn norm(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.block.norm()
    }

    /// Singular triples of `A`, values ascending.
    pub fn singular_triples(&self) -> Result<SingularTriples> {
        let svd = self.block.clone().svd(true, true);
        let (u, vt) = match (svd.u, svd.v_t) {
            (Some(u), Some(vt)) => (u, vt),
            _ => return Err(Error::Numerical("SVD did not return singular vectors".into())),
        };
        let n = self.grid_size();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            svd.singular_values[i]
                .total_cmp(&svd.singular_values[j])
                .then(i.cmp(&j))
        });
        let values = order.iter().map(|&i| svd.singular_values[i]).collect();
        let left = DMatrix::from_fn(n, n, |r, c| u[(r, order[c])]);
        let right = DMatrix::from_fn(n, n, |r, c| vt[(order[c], r)].conj());
        Ok(SingularTriples {
            values,
            left,
            right,
        })
    }

    /// Singular values of `A` only, ascending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.block.singular_values().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Eigenvalues of `H`, ascending: `±σᵢ` for every singular value `σᵢ` of `A`.
    pub fn dirac_eigenvalues(&self) -> Vec<f64> {
        let s = self.singular_values();
        let mut v: Vec<f64> = s.iter().map(|x| -x).chain(s.iter().copied()).collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// `A vᵢ = σᵢ uᵢ`, `A* uᵢ = σᵢ vᵢ`.
#[derive(Debug, Clone)]
pub struct SingularTriples {
    pub values: Vec<f64>,
    pub left: DMatrix<Complex64>,
    pub right: DMatrix<Complex64>,
}

impl SingularTriples {
    /// Unit eigenvector `(uᵢ, ±vᵢ)/√2` of `H` for the eigenvalue `±σᵢ`.
    pub fn dirac_vector(&self, i: usize, positive: bool) -> DVector<Complex64> {
        let n = self.left.nrows();
        let mut x = DVector::zeros(2 * n);
        let sign = if positive { 1.0 } else { -1.0 };
        let w = std::f64::consts::FRAC_1_SQRT_2;
        for r in 0..n {
            x[r] = self.left[(r, i)] * w;
            x[n + r] = self.right[(r, i)] * (sign * w);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warped_dirac::eigen::{eigensolve_hermitian, hermitian_defect};

    #[test]
    fn derivative_spectrum_is_exact() {
        for anti in [false, true] {
            let k = fourier_derivative(16, 2.0, anti);
            let e = eigensolve_hermitian(&k).unwrap();
            let mut expected: Vec<f64> = if anti {
                (-8..8).map(|m| PI * (2 * m + 1) as f64 / 2.0).collect()
            } else {
                (-7..=8).map(|m| PI * m as f64).collect()
            };
            expected.sort_by(f64::total_cmp);
            for (a, b) in e.values.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn derivative_of_smooth_function() {
        let n = 32;
        let l = 3.0;
        let k = fourier_derivative(n, l, true);
        // e^{iπt/L} is antiperiodic; −i d/dt gives π/L times itself
        let x = DVector::from_fn(n, |j, _| Complex64::from_polar(1.0, PI * j as f64 / n as f64));
        let y = &k * &x;
        assert!((y - x * Complex64::from(PI / l)).norm() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        let p = WarpProfile::constant(1.0, 1.0).unwrap();
        assert!(build_mode_operator(&p, 0.5, false, 7).is_err());
        assert!(build_mode_operator(&p, 0.5, false, 6).is_err());
        assert!(build_mode_operator(&p, 0.5, false, 9).is_err());
        assert!(build_mode_operator(&p, 0.5, false, 8).is_ok());
    }

    #[test]
    fn full_matrix_is_hermitian_and_apply_agrees() {
        let p = WarpProfile::sampled((0..12).map(|j| 1.0 + 0.2 * (j as f64).cos()).collect(), 2.0)
            .unwrap();
        let op = build_mode_operator(&p, 1.5, true, 24).unwrap();
        let m = op.matrix();
        assert!(hermitian_defect(&m) <= 1e-13);
        let x = DVector::from_fn(48, |j, _| Complex64::new((j as f64).sin(), (j as f64 * 0.3).cos()));
        assert!((op.apply(&x) - &m * &x).norm() < 1e-12 * (&m * &x).norm());
    }

    #[test]
    fn singular_triples_give_dirac_eigenvectors() {
        let p = WarpProfile::sampled((0..16).map(|j| 0.8 + 0.3 * (j as f64 * 0.4).sin()).collect(), 1.0)
            .unwrap();
        let op = build_mode_operator(&p, -0.5, false, 32).unwrap();
        let tr = op.singular_triples().unwrap();
        for i in [0, 5, 31] {
            for pos in [true, false] {
                let x = tr.dirac_vector(i, pos);
                let lam = if pos { tr.values[i] } else { -tr.values[i] };
                let r = (op.apply(&x) - &x * Complex64::from(lam)).norm();
                assert!(r < 1e-10 * op.norm(), "{r}");
            }
        }
    }
}
