use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column `i` belonging to `values[i]`.
    pub vectors: DMatrix<Complex64>,
}

/// Largest `|a_ij − conj(a_ji)|`.
pub fn hermitian_defect(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs(a: &DMatrix<Complex64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Dense Hermitian eigensolver (Householder tridiagonalisation followed by
/// implicit QR, as provided by nalgebra).
///
/// Fails with an invalid-input error on non-square or non-Hermitian input and
/// with a numerical error if some pair misses `‖Av − λv‖ ≤ 1e−9‖A‖`.
pub fn eigensolve_hermitian(a: &DMatrix<Complex64>) -> Result<HermitianEigen> {
    if a.nrows() != a.ncols() {
        return Err(Error::invalid("matrix must be square"));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let scale = max_abs(a).max(1.0);
    if hermitian_defect(a) > 1e-12 * scale {
        return Err(Error::invalid("matrix is not Hermitian"));
    }
    let n = a.nrows();
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let norm_a = a.norm().max(f64::MIN_POSITIVE);
    let av = a * &vectors;
    for (c, &lam) in values.iter().enumerate() {
        let res = (av.column(c) - vectors.column(c) * Complex64::from(lam)).norm();
        if res > 1e-9 * norm_a {
            return Err(Error::Numerical(format!(
                "eigenpair {c} has residual {res:e} (‖A‖ = {norm_a:e})"
            )));
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(a: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::invalid("matrix must be square"));
    }
    if hermitian_defect(a) > 1e-12 * max_abs(a).max(1.0) {
        return Err(Error::invalid("matrix is not Hermitian"));
    }
    let mut v: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_diagonal() {
        let id = DMatrix::<Complex64>::identity(2, 2);
        let e = eigensolve_hermitian(&id).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);

        let d = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e = eigensolve_hermitian(&d).unwrap();
        assert_eq!(e.values, vec![0.0, 2.0]);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)]);
        assert!(matches!(eigensolve_hermitian(&m), Err(Error::InvalidInput(_))));
        let rect = DMatrix::<Complex64>::zeros(2, 3);
        assert!(eigensolve_hermitian(&rect).is_err());
    }

    #[test]
    fn random_hermitian_reconstructs() {
        // small deterministic LCG so the test does not depend on an RNG crate
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let n = 64;
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = c(next(), 0.0);
            for j in i + 1..n {
                let z = c(next(), next());
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        let e = eigensolve_hermitian(&a).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            e.values.iter().map(|&x| c(x, 0.0)),
        ));
        let rebuilt = &e.vectors * lam * e.vectors.adjoint();
        assert!((rebuilt - &a).norm() < 1e-9 * a.norm());
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!((gram - DMatrix::identity(n, n)).norm() < 1e-10);
        // deterministic
        let again = eigensolve_hermitian(&a).unwrap();
        assert_eq!(again.values, e.values);
    }
}
