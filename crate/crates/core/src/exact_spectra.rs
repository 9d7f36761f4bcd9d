//! Closed-form Dirac spectra of flat 2-tori and round spheres.
//!
//! On the flat torus `R²/Γ` with spin structure `ε`, the eigenvalues of `D²`
//! are `4π²|γ* + χ_ε|²` for `γ*` in the dual lattice `Γ*`, where the shift
//! `χ_ε ∈ ½Γ*` is fixed by `exp(2πi⟨χ_ε, γ⟩) = (−1)^{ε(γ)}` on the basis
//! `γ ∈ {u, v}`. Each dual point contributes a two-dimensional eigenspace
//! (the spinor bundle has rank 2).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance under which two squared norms are treated as the same
/// eigenvalue.
pub const MERGE_REL_TOL: f64 = 1e-12;

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

/// Oriented basis `(u, v)` of a rank-2 lattice in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice2 {
    u: [f64; 2],
    v: [f64; 2],
}

impl Lattice2 {
    pub fn new(u: [f64; 2], v: [f64; 2]) -> Result<Self> {
        if !u.iter().chain(v.iter()).all(|x| x.is_finite()) {
            return Err(Error::invalid("lattice vectors must be finite"));
        }
        let det = u[0] * v[1] - u[1] * v[0];
        let scale = norm(u) * norm(v);
        if scale == 0.0 || det.abs() <= 1e-14 * scale {
            return Err(Error::invalid("degenerate lattice"));
        }
        if det < 0.0 {
            return Err(Error::invalid(
                "lattice basis must be positively oriented (det(u|v) > 0)",
            ));
        }
        Ok(Lattice2 { u, v })
    }

    /// The lattice `Z(1,0) ⊕ Z(0,a)`.
    pub fn rectangular(a: f64) -> Result<Self> {
        Self::new([1.0, 0.0], [0.0, a])
    }

    pub fn square() -> Self {
        Lattice2 {
            u: [1.0, 0.0],
            v: [0.0, 1.0],
        }
    }

    pub fn u(&self) -> [f64; 2] {
        self.u
    }

    pub fn v(&self) -> [f64; 2] {
        self.v
    }

    pub fn area(&self) -> f64 {
        self.u[0] * self.v[1] - self.u[1] * self.v[0]
    }

    /// Basis `(u*, v*)` of `Γ*` with `⟨u*, u⟩ = ⟨v*, v⟩ = 1` and `⟨u*, v⟩ = ⟨v*, u⟩ = 0`.
    pub fn dual_basis(&self) -> ([f64; 2], [f64; 2]) {
        let det = self.area();
        let us = [self.v[1] / det, -self.v[0] / det];
        let vs = [-self.u[1] / det, self.u[0] / det];
        (us, vs)
    }

    /// Lattice with both basis vectors multiplied by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid("scale factor must be positive"));
        }
        Self::new(
            [t * self.u[0], t * self.u[1]],
            [t * self.v[0], t * self.v[1]],
        )
    }
}

fn norm(x: [f64; 2]) -> f64 {
    x[0].hypot(x[1])
}

/// One of the four spin structures of a 2-torus: a Z₂ flag per basis vector,
/// `true` meaning the induced covering of that generating circle is non-trivial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinStructure2 {
    eps1: bool,
    eps2: bool,
}

impl SpinStructure2 {
    pub const TRIVIAL: SpinStructure2 = SpinStructure2 {
        eps1: false,
        eps2: false,
    };

    pub fn new(eps1: u8, eps2: u8) -> Result<Self> {
        match (eps1, eps2) {
            (0 | 1, 0 | 1) => Ok(SpinStructure2 {
                eps1: eps1 == 1,
                eps2: eps2 == 1,
            }),
            _ => Err(Error::invalid(format!(
                "spin structure flags must be 0 or 1, got ({eps1},{eps2})"
            ))),
        }
    }

    pub fn from_flags(eps1: bool, eps2: bool) -> Self {
        SpinStructure2 { eps1, eps2 }
    }

    pub fn all() -> [SpinStructure2; 4] {
        [(false, false), (false, true), (true, false), (true, true)]
            .map(|(eps1, eps2)| SpinStructure2 { eps1, eps2 })
    }

    pub fn eps1(&self) -> u8 {
        self.eps1 as u8
    }

    pub fn eps2(&self) -> u8 {
        self.eps2 as u8
    }

    pub fn is_trivial(&self) -> bool {
        !self.eps1 && !self.eps2
    }
}

/// One eigenvalue of `D²` together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralLevel {
    pub value: f64,
    pub multiplicity: u64,
}

/// Where a [`SpectrumSlice`] came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumSource {
    Torus {
        lattice: Lattice2,
        spin: SpinStructure2,
    },
    Warped {
        description: String,
    },
}

/// Eigenvalues of `D²` up to a cutoff, strictly increasing, with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSlice {
    pub entries: Vec<SpectralLevel>,
    pub cutoff: f64,
    pub source: SpectrumSource,
}

impl SpectrumSlice {
    /// Number of eigenvalues (with multiplicity) in the slice.
    pub fn count(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Number of eigenvalues (with multiplicity) `≤ lambda`.
    pub fn count_below(&self, lambda: f64) -> u64 {
        self.entries
            .iter()
            .take_while(|e| e.value <= lambda)
            .map(|e| e.multiplicity)
            .sum()
    }

    pub fn smallest_positive(&self) -> Option<f64> {
        self.entries.iter().find(|e| e.value > 0.0).map(|e| e.value)
    }
}

/// Shift `χ_ε = (ε₁u* + ε₂v*)/2` encoding the spin structure.
pub fn dual_shift(lat: &Lattice2, spin: SpinStructure2) -> [f64; 2] {
    let (us, vs) = lat.dual_basis();
    let (e1, e2) = (0.5 * spin.eps1() as f64, 0.5 * spin.eps2() as f64);
    [e1 * us[0] + e2 * vs[0], e1 * us[1] + e2 * vs[1]]
}

/// A shifted dual-lattice point `(i + ε₁/2)u* + (j + ε₂/2)v*`, tracked by its
/// doubled coordinates so that the zero point is detected exactly.
#[derive(Debug, Clone, Copy)]
struct DualPoint {
    twice: (i64, i64),
    value: f64,
}

/// Every shifted dual point with `4π²|γ* + χ|² ≤ cutoff`.
///
/// The ellipse `{q : |q₁u* + q₂v*|² ≤ R²}` has bounding box `|q₁| ≤ R|u|`,
/// `|q₂| ≤ R|v|` (the inverse of the dual Gram matrix is the Gram matrix of
/// `(u, v)`), so scanning that box is complete.
fn enumerate_dual_points(lat: &Lattice2, spin: SpinStructure2, cutoff: f64) -> Vec<DualPoint> {
    let radius = (cutoff / FOUR_PI_SQ).sqrt();
    let (us, vs) = lat.dual_basis();
    let (e1, e2) = (spin.eps1() as i64, spin.eps2() as i64);
    let range = |len: f64, e: i64| {
        let half = 0.5 * e as f64;
        let lo = (-radius * len - half).floor() as i64 - 1;
        let hi = (radius * len - half).ceil() as i64 + 1;
        lo..=hi
    };
    let mut out = Vec::new();
    for i in range(norm(lat.u), e1) {
        let q1 = i as f64 + 0.5 * e1 as f64;
        for j in range(norm(lat.v), e2) {
            let q2 = j as f64 + 0.5 * e2 as f64;
            let x = q1 * us[0] + q2 * vs[0];
            let y = q1 * us[1] + q2 * vs[1];
            let value = FOUR_PI_SQ * (x * x + y * y);
            if value <= cutoff {
                out.push(DualPoint {
                    twice: (2 * i + e1, 2 * j + e2),
                    value,
                });
            }
        }
    }
    out
}

/// Smallest positive eigenvalue of `D²` on the flat torus `R²/Γ`.
pub fn torus_lambda1_plus(lat: &Lattice2, spin: SpinStructure2) -> f64 {
    let (us, vs) = lat.dual_basis();
    let chi = dual_shift(lat, spin);
    // Any nonzero shifted dual point bounds the minimum from above.
    let upper = [chi, add(chi, us), add(chi, vs)]
        .into_iter()
        .map(|p| FOUR_PI_SQ * (p[0] * p[0] + p[1] * p[1]))
        .filter(|&x| x > 0.0)
        .fold(f64::INFINITY, f64::min);
    enumerate_dual_points(lat, spin, upper * (1.0 + 1e-9))
        .into_iter()
        .filter(|p| p.twice != (0, 0))
        .map(|p| p.value)
        .fold(f64::INFINITY, f64::min)
}

fn add(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

/// Dimension of the space of harmonic spinors: 2 for the trivial spin
/// structure (constant spinors), otherwise 0.
pub fn torus_kernel_dim(_lat: &Lattice2, spin: SpinStructure2) -> u64 {
    // χ ∈ Γ* iff both flags vanish.
    if spin.is_trivial() {
        2
    } else {
        0
    }
}

/// All eigenvalues of `D²` that do not exceed `cutoff`.
pub fn torus_spectrum(lat: &Lattice2, spin: SpinStructure2, cutoff: f64) -> Result<SpectrumSlice> {
    if !(cutoff >= 0.0) || !cutoff.is_finite() {
        return Err(Error::invalid("cutoff must be a finite nonnegative number"));
    }
    let mut values: Vec<f64> = enumerate_dual_points(lat, spin, cutoff)
        .into_iter()
        .map(|p| if p.twice == (0, 0) { 0.0 } else { p.value })
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(SpectrumSlice {
        entries: merge_levels(values.into_iter().map(|v| (v, 2))),
        cutoff,
        source: SpectrumSource::Torus {
            lattice: *lat,
            spin,
        },
    })
}

/// Groups a sorted sequence of `(value, multiplicity)` pairs into levels,
/// joining neighbours within [`MERGE_REL_TOL`] of each other.
pub(crate) fn merge_levels(sorted: impl IntoIterator<Item = (f64, u64)>) -> Vec<SpectralLevel> {
    let mut levels: Vec<SpectralLevel> = Vec::new();
    for (value, mult) in sorted {
        match levels.last_mut() {
            Some(last) if value - last.value <= MERGE_REL_TOL * value.abs() => {
                last.multiplicity += mult;
            }
            _ => levels.push(SpectralLevel {
                value,
                multiplicity: mult,
            }),
        }
    }
    levels
}

/// One eigenvalue level `(n/2 + k)²` of `D²` on the round unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereLevel {
    pub k: u32,
    pub d2_value: f64,
    /// Multiplicity of each of the two Dirac eigenvalues `±(n/2 + k)`:
    /// `2^⌊n/2⌋ · C(k+n−1, k)`.
    pub multiplicity: u64,
    /// Multiplicity of `(n/2 + k)²` as an eigenvalue of `D²` (both signs).
    pub d2_multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereSpec {
    pub dim: u32,
    pub levels: Vec<SphereLevel>,
}

/// Dirac spectrum of the round unit sphere `Sⁿ` for `k = 0..=kmax`.
pub fn sphere_spectrum(n: u32, kmax: u32) -> Result<SphereSpec> {
    if n < 2 {
        return Err(Error::invalid(format!("sphere dimension must be >= 2, got {n}")));
    }
    let fiber = 1u64
        .checked_shl(n / 2)
        .filter(|_| n / 2 < 64)
        .ok_or_else(|| Error::invalid("dimension too large"))?;
    let levels = (0..=kmax)
        .map(|k| {
            let half = 0.5 * n as f64 + k as f64;
            let mult = binomial(k as u64 + n as u64 - 1, k as u64)
                .and_then(|b| b.checked_mul(fiber))
                .ok_or_else(|| Error::invalid("multiplicity overflows u64"))?;
            Ok(SphereLevel {
                k,
                d2_value: half * half,
                multiplicity: mult,
                d2_multiplicity: mult
                    .checked_mul(2)
                    .ok_or_else(|| Error::invalid("multiplicity overflows u64"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SphereSpec { dim: n, levels })
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    u64::try_from(acc).ok()
}

/// Volume of the round unit sphere `Sⁿ ⊂ R^{n+1}`, i.e. `2π^{(n+1)/2}/Γ((n+1)/2)`.
pub fn sphere_volume(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("sphere dimension must be >= 2, got {n}")));
    }
    // Vol(Sⁿ) = 2π/(n−1) · Vol(Sⁿ⁻²), starting from Vol(S⁰) = 2, Vol(S¹) = 2π.
    let mut vol = if n.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut m = n % 2;
    while m < n {
        m += 2;
        vol *= 2.0 * PI / (m - 1) as f64;
    }
    Ok(vol)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force over an index box, independent of the ellipse bounds.
    fn brute_values(lat: &Lattice2, spin: SpinStructure2, reach: i64) -> Vec<f64> {
        let (us, vs) = lat.dual_basis();
        let mut v = Vec::new();
        for i in -reach..=reach {
            for j in -reach..=reach {
                let q1 = i as f64 + 0.5 * spin.eps1() as f64;
                let q2 = j as f64 + 0.5 * spin.eps2() as f64;
                let x = q1 * us[0] + q2 * vs[0];
                let y = q1 * us[1] + q2 * vs[1];
                v.push(FOUR_PI_SQ * (x * x + y * y));
            }
        }
        v.sort_by(f64::total_cmp);
        v
    }

    fn spin(a: u8, b: u8) -> SpinStructure2 {
        SpinStructure2::new(a, b).unwrap()
    }

    #[test]
    fn dual_shift_examples() {
        let lat = Lattice2::rectangular(3.0).unwrap();
        assert_eq!(dual_shift(&lat, spin(0, 0)), [0.0, 0.0]);
        let lat = Lattice2::rectangular(2.0).unwrap();
        assert_eq!(dual_shift(&lat, spin(0, 1)), [0.0, 0.25]);
        assert_eq!(dual_shift(&Lattice2::square(), spin(1, 1)), [0.5, 0.5]);
    }

    #[test]
    fn dual_shift_solves_congruences_on_skew_lattice() {
        let lat = Lattice2::new([1.3, 0.2], [-0.4, 0.9]).unwrap();
        for s in SpinStructure2::all() {
            let chi = dual_shift(&lat, s);
            let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
            assert!((dot(chi, lat.u()) - 0.5 * s.eps1() as f64).abs() < 1e-14);
            assert!((dot(chi, lat.v()) - 0.5 * s.eps2() as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_and_misoriented_lattices_are_rejected() {
        let err = Lattice2::new([1.0, 0.0], [1.0, 0.0]).unwrap_err();
        assert!(err.to_string().contains("degenerate lattice"));
        assert!(Lattice2::new([0.0, 0.0], [1.0, 0.0]).is_err());
        assert!(Lattice2::new([0.0, 1.0], [1.0, 0.0]).is_err());
        assert!(Lattice2::new([f64::NAN, 1.0], [1.0, 0.0]).is_err());
        assert!(SpinStructure2::new(2, 0).is_err());
    }

    #[test]
    fn lambda1_plus_examples() {
        let lat = Lattice2::rectangular(2.0).unwrap();
        assert!((torus_lambda1_plus(&lat, spin(0, 0)) - PI * PI).abs() < 1e-12);
        assert!((torus_lambda1_plus(&lat, spin(0, 1)) - PI * PI / 4.0).abs() < 1e-12);
        // Brute force on |i|,|j| <= 3: the minimum sits at (±½, ±½).
        let sq = Lattice2::square();
        let oracle = brute_values(&sq, spin(1, 1), 3)[0];
        assert!((oracle - 2.0 * PI * PI).abs() < 1e-12);
        assert!((torus_lambda1_plus(&sq, spin(1, 1)) - oracle).abs() < 1e-12);
    }

    #[test]
    fn kernel_dimension() {
        let lat = Lattice2::new([2.0, 0.5], [0.1, 1.0]).unwrap();
        assert_eq!(torus_kernel_dim(&lat, spin(0, 0)), 2);
        assert_eq!(torus_kernel_dim(&lat, spin(0, 1)), 0);
        assert_eq!(torus_kernel_dim(&lat, spin(1, 0)), 0);
        assert_eq!(torus_kernel_dim(&lat, spin(1, 1)), 0);
    }

    #[test]
    fn spectrum_of_a_equals_two_torus() {
        // Brute force on |i|,|j| <= 4 gives 4π²(i² + j²/4) ≤ 50 at
        // (0,0); (0,±1); (±1,0),(0,±2); (±1,±1).
        let lat = Lattice2::rectangular(2.0).unwrap();
        let slice = torus_spectrum(&lat, spin(0, 0), 50.0).unwrap();
        let pi2 = PI * PI;
        let expected = [(0.0, 2), (pi2, 4), (4.0 * pi2, 8), (5.0 * pi2, 8)];
        assert_eq!(slice.entries.len(), expected.len());
        for (e, (v, m)) in slice.entries.iter().zip(expected) {
            assert!((e.value - v).abs() < 1e-12 * v.max(1.0), "{e:?}");
            assert_eq!(e.multiplicity, m);
        }
        let oracle = brute_values(&lat, spin(0, 0), 4);
        assert_eq!(slice.count() as usize, 2 * oracle.iter().filter(|&&x| x <= 50.0).count());
    }

    #[test]
    fn spectrum_small_cutoffs() {
        let lat = Lattice2::rectangular(2.0).unwrap();
        let slice = torus_spectrum(&lat, spin(0, 1), 3.0).unwrap();
        assert_eq!(slice.entries.len(), 1);
        assert!((slice.entries[0].value - PI * PI / 4.0).abs() < 1e-12);
        assert_eq!(slice.entries[0].multiplicity, 4);
        let skew = Lattice2::new([1.0, 0.3], [0.2, 1.7]).unwrap();
        assert!(torus_spectrum(&skew, spin(0, 1), 0.0).unwrap().entries.is_empty());
        assert!(torus_spectrum(&lat, spin(0, 1), -1.0).is_err());
        assert!(torus_spectrum(&lat, spin(0, 1), f64::INFINITY).is_err());
    }

    #[test]
    fn spectrum_matches_brute_force_on_skew_lattice() {
        let lat = Lattice2::new([1.0, 0.0], [0.45, 0.8]).unwrap();
        for s in SpinStructure2::all() {
            let cutoff = 600.0;
            let slice = torus_spectrum(&lat, s, cutoff).unwrap();
            let oracle: Vec<f64> = brute_values(&lat, s, 12)
                .into_iter()
                .filter(|&x| x <= cutoff)
                .collect();
            assert_eq!(slice.count() as usize, 2 * oracle.len(), "{s:?}");
        }
    }

    #[test]
    fn sphere_levels() {
        let s2 = sphere_spectrum(2, 1).unwrap();
        assert_eq!(s2.levels[0].d2_value, 1.0);
        assert_eq!(s2.levels[0].multiplicity, 2);
        assert_eq!(s2.levels[0].d2_multiplicity, 4);
        assert_eq!(s2.levels[1].d2_value, 4.0);
        assert_eq!(s2.levels[1].multiplicity, 4);
        let s3 = sphere_spectrum(3, 0).unwrap();
        assert_eq!(s3.levels[0].d2_value, 2.25);
        assert_eq!(s3.levels[0].multiplicity, 2);
        assert!(sphere_spectrum(1, 3).is_err());
    }

    #[test]
    fn sphere_multiplicity_matches_pascal_recursion() {
        // C(k+n−1, k) via Pascal's rule, independent of the product formula.
        let mut pascal = vec![vec![1u64; 1]; 1];
        for row in 1..40usize {
            let mut next = vec![1u64; row + 1];
            for c in 1..row {
                next[c] = pascal[row - 1][c - 1] + pascal[row - 1][c];
            }
            pascal.push(next);
        }
        for n in 2..12u32 {
            let spec = sphere_spectrum(n, 20).unwrap();
            for lvl in &spec.levels {
                let k = lvl.k as usize;
                let c = pascal[k + n as usize - 1][k];
                assert_eq!(lvl.multiplicity, c << (n / 2));
            }
            assert!(spec.levels.windows(2).all(|w| w[0].d2_value < w[1].d2_value));
        }
    }

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(2).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_volume(3).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_volume(4).unwrap() - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!(sphere_volume(1).is_err());
    }
}
