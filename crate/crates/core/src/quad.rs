//! Adaptive Gauss–Kronrod quadrature.
//!
//! A global-adaptive G7/K15 scheme: the interval with the largest error
//! estimate is bisected until the summed estimate meets the tolerance.
//! Semi-infinite ranges are mapped onto `[0, 1)` with `x = a + u / (1 - u)`.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Tolerances and subdivision budget.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadOptions {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            max_subdivisions: 4000,
        }
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions::new(1e-13, 1e-12)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error: f64,
    pub evaluations: usize,
}

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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Eight-point Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
pub(crate) const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gk15<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).magnitude())
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    integrate_breaks(&mut f, &[a, b], opts)
}

/// Integrates over consecutive intervals delimited by `breaks`, treating the
/// break points as initial subdivision boundaries.
pub fn integrate_breaks<T, F>(f: &mut F, breaks: &[f64], opts: QuadOptions) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let mut heap = BinaryHeap::new();
    let mut total = T::default();
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (value, error) = gk15(f, w[0], w[1]);
        evaluations += 15;
        total = total + value;
        total_err += error;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let mut subdivisions = heap.len();
    loop {
        if !(total.magnitude().is_finite() && total_err.is_finite()) {
            return Err(Error::Numerical {
                stage: "quadrature",
                detail: format!("non-finite integrand on [{}, {}]", breaks[0], breaks[breaks.len() - 1]),
            });
        }
        if total_err <= opts.abs_tol.max(opts.rel_tol * total.magnitude()) {
            return Ok(QuadResult {
                value: total,
                abs_error: total_err,
                evaluations,
            });
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::Numerical {
                stage: "quadrature",
                detail: format!(
                    "no convergence after {subdivisions} subdivisions: estimate {:e}, error {:e}",
                    total.magnitude(),
                    total_err
                ),
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in floating point; accept what we have.
            return Ok(QuadResult {
                value: total,
                abs_error: total_err,
                evaluations,
            });
        }
        let (lv, le) = gk15(f, worst.a, mid);
        let (rv, re) = gk15(f, mid, worst.b);
        evaluations += 30;
        total = total - worst.value + lv + rv;
        total_err += le + re - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        subdivisions += 1;
    }
}

/// Integrates `f` over `[a, ∞)` through the map `x = a + u / (1 - u)`.
///
/// `breaks` are optional interior points in `x` (each must exceed `a`) that
/// become initial subdivision boundaries, e.g. the location of a peak.
pub fn integrate_to_infinity<T, F>(mut f: F, a: f64, breaks: &[f64], opts: QuadOptions) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let mut mapped = move |u: f64| {
        let one_minus = 1.0 - u;
        let x = a + u / one_minus;
        f(x) * (1.0 / (one_minus * one_minus))
    };
    let mut us = vec![0.0];
    let mut interior: Vec<f64> = breaks
        .iter()
        .filter(|&&x| x > a)
        .map(|&x| (x - a) / (1.0 + x - a))
        .collect();
    interior.sort_by(f64::total_cmp);
    us.extend(interior);
    us.push(1.0);
    integrate_breaks(&mut mapped, &us, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let r = integrate(|x: f64| x.sqrt().recip(), 0.0, 1.0, QuadOptions::new(1e-10, 1e-10)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn semi_infinite_gamma_integral() {
        // ∫ x^2 e^{-x} dx = Γ(3) = 2
        let r = integrate_to_infinity(|x: f64| x * x * (-x).exp(), 0.0, &[2.0], QuadOptions::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn complex_integrand() {
        // ∫_0^π e^{ix} dx = 2i
        let r = integrate(|x: f64| Complex64::from_polar(1.0, x), 0.0, std::f64::consts::PI, QuadOptions::default())
            .unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 0.0,
            max_subdivisions: 3,
        };
        assert!(integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 1.0, opts).is_err());
    }

    #[test]
    fn gauss_legendre_8_integrates_degree_15() {
        let s: f64 = GL8_NODES
            .iter()
            .zip(GL8_WEIGHTS)
            .map(|(&x, w)| w * x.powi(14))
            .sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
    }
}
