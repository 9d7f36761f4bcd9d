//! Adaptive Gauss–Kronrod (7/15) integration on finite intervals.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let pair = f(c - h * x) + f(c + h * x);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Integrates `f` over `[a, b]` to relative tolerance `rel_tol`.
///
/// Globally adaptive: the panel with the largest error estimate is bisected
/// until the summed estimate drops below `rel_tol · ∫|f|`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let width = (b - a).abs();
    let (v0, e0) = gk15(&f, a, b);
    let (abs0, _) = gk15(&|x| f(x).abs(), a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { lo: a, hi: b, val: v0, err: e0, abs: abs0.abs() });
    let (mut err, mut scale) = (e0, abs0.abs());
    for _ in 0..MAX_SPLITS {
        if err <= rel_tol * scale.max(f64::MIN_POSITIVE) {
            // sum smallest contributions first
            let mut vals: Vec<f64> = heap.iter().map(|p| p.val).collect();
            vals.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
            return Ok(vals.iter().sum());
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if (worst.hi - worst.lo).abs() < 1e-15 * width || mid == worst.lo || mid == worst.hi {
            break;
        }
        err -= worst.err;
        scale -= worst.abs;
        for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
            let (val, e) = gk15(&f, lo, hi);
            let (abs, _) = gk15(&|x| f(x).abs(), lo, hi);
            err += e;
            scale += abs.abs();
            heap.push(Panel { lo, hi, val, err: e, abs: abs.abs() });
        }
        err = err.max(0.0);
    }
    Err(Error::Numerical("adaptive quadrature did not converge".into()))
}

const MAX_SPLITS: usize = 20_000;

struct Panel {
    lo: f64,
    hi: f64,
    val: f64,
    err: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrates over consecutive intervals of `breaks`; each piece should be smooth.
pub fn integrate_piecewise(f: impl Fn(f64) -> f64, breaks: &[f64], rel_tol: f64) -> Result<f64> {
    breaks
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], rel_tol))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_transcendentals() {
        let v = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, 1e-13).unwrap();
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-12);
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-13).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let v = integrate(|x| 1.0 / x, 1e-6, 1.0, 1e-12).unwrap();
        assert!((v - 1e6f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn piecewise_kink() {
        let v = integrate_piecewise(|x: f64| x.abs(), &[-1.0, 0.0, 3.0], 1e-13).unwrap();
        assert!((v - 5.0).abs() < 1e-13);
    }
}
