//! Independent checks of the environment layer: numerical quadrature of the
//! defining integrals, the exponential-integral form of Y at s = 1, and
//! reference values computed once at 40 digits and frozen here.

use num_complex::Complex64;
use proptest::prelude::*;
use steering_ellipsoids::quad::{integrate_breaks, QuadOptions};
use steering_ellipsoids::spectral::*;

fn env(eta: f64, s: f64, omega_c: f64) -> OhmicSpectralDensity {
    OhmicSpectralDensity::new(eta, s, omega_c).unwrap()
}

/// `E1(x)` for `x > 0`: power series for small arguments, continued fraction otherwise.
fn exp_integral_e1(x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    if x < 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            sum -= term / k as f64;
        }
        -EULER - x.ln() + sum
    } else {
        // Lentz evaluation of e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
        let mut b = x + 1.0;
        let mut c = 1.0 / f64::MIN_POSITIVE;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let a = -(i as f64) * (i as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

#[test]
fn e1_oracle_sanity() {
    assert!((exp_integral_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-15);
    assert!((exp_integral_e1(0.01) - 4.037_929_576_538_114).abs() < 1e-13);
}

#[test]
fn ohmic_self_energy_matches_exponential_integral_form() {
    // For s = 1: Y(E) = 1 − η[ω_c + E e^{−E/ω_c} E1(−E/ω_c)].
    for &(eta, wc) in &[(0.06, 20.0), (0.03, 20.0), (0.2, 10.0)] {
        let e = env(eta, 1.0, wc);
        for &energy in &[-1e-4, -0.01, -0.16, -1.0, -7.5, -40.0] {
            let x = -energy / wc;
            let expect = 1.0 - eta * (wc + energy * (-energy / wc).exp() * exp_integral_e1(x));
            let got = self_energy_y(&e, energy).unwrap();
            assert!((got - expect).abs() < 1e-12, "eta={eta} E={energy}: {got} vs {expect}");
        }
    }
}

#[test]
fn kernel_matches_quadrature_of_defining_integral() {
    let opts = QuadOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-13,
        max_subdivisions: 200_000,
    };
    for s in [0.5, 1.0, 3.0] {
        let e = env(0.06, s, 20.0);
        for k in 0..=50 {
            let t = k as f64;
            // J decays like e^{−ω/ω_c}; truncating at 60 ω_c leaves < 1e−20.
            let top = 60.0 * e.omega_c();
            let mut breaks: Vec<f64> = vec![0.0, 1.0];
            let pieces = 400;
            for i in 1..=pieces {
                breaks.push(1.0 + (top - 1.0) * i as f64 / pieces as f64);
            }
            let mut integrand = |w: f64| j_omega(&e, w).unwrap() * Complex64::from_polar(1.0, -w * t);
            let numeric = integrate_breaks(&mut integrand, &breaks, opts).unwrap().value;
            let closed = kernel_f(&e, t);
            assert!((numeric - closed).norm() <= 1e-8, "s={s} t={t}: {numeric} vs {closed}");
        }
    }
}

#[test]
fn frozen_bound_states() {
    let cases = [
        (0.06, 1.0, -0.158_986_864_452_047_3, 0.833_322_071_716_897_9),
        (0.055, 1.0, -0.078_475_606_282_956_91, 0.819_431_976_884_105_4),
        (0.08, 1.0, -0.475_842_460_781_258_3, 0.842_368_153_517_029_2),
        (0.1, 1.0, -0.780_478_151_441_628_7, 0.838_755_932_570_744_7),
        (0.2, 1.0, -2.156_809_515_836_509, 0.810_962_301_479_790_4),
        (0.1, 0.5, -1.312_365_135_848_958_5, 0.738_568_790_335_986_6),
        (0.04, 3.0, -0.577_507_336_001_258_2, 0.963_420_692_173_671_3),
    ];
    for (eta, s, energy, residue) in cases {
        let e = env(eta, s, 20.0);
        let bs = find_bound_state(&e).unwrap().expect("bound state");
        assert!((bs.energy - energy).abs() < 1e-11, "eta={eta} s={s}: E {}", bs.energy);
        assert!((bs.residue - residue).abs() < 1e-10, "eta={eta} s={s}: Z {}", bs.residue);
        let residual = (self_energy_y(&e, bs.energy).unwrap() - bs.energy).abs();
        assert!(residual <= ROOT_TOL);
    }
}

#[test]
fn frozen_markov_rates() {
    let r = markov_rates(&env(0.06, 1.0, 20.0)).unwrap();
    assert!((r.kappa - 0.179_302_522_313_393_4).abs() < 1e-15);
    assert!((r.delta + 1.335_144_090_239_445_8).abs() < 1e-10, "{}", r.delta);
}

#[test]
fn lamb_shift_for_other_ohmicities_matches_direct_principal_value() {
    // Symmetric excision of a shrinking window, as an independent route.
    for s in [0.5, 3.0] {
        let e = env(0.04, s, 20.0);
        let r = markov_rates(&e).unwrap();
        let opts = QuadOptions::new(1e-14, 1e-14);
        let f = |w: f64| j_omega(&e, w).unwrap() / (1.0 - w);
        let excised = |eps: f64| {
            let mut g = f;
            let left = integrate_breaks(&mut g, &[0.0, 1.0 - eps], opts).unwrap().value;
            let right = integrate_breaks(&mut g, &[1.0 + eps, 2.0, 20.0, 100.0, 2000.0], opts).unwrap().value;
            left + right
        };
        // The excised window leaves errors in ε and ε³; two Richardson levels remove both.
        let e: Vec<f64> = [4e-3, 2e-3, 1e-3].iter().map(|&eps| excised(eps)).collect();
        let r1 = 2.0 * e[1] - e[0];
        let r2 = 2.0 * e[2] - e[1];
        let extrapolated = (8.0 * r2 - r1) / 7.0;
        assert!((r.delta - extrapolated).abs() < 1e-8, "s={s}: {} vs {extrapolated}", r.delta);
    }
}

#[test]
fn residue_does_not_depend_on_quadrature_tolerance() {
    for eta in [0.055, 0.06, 0.1, 0.2] {
        let e = env(eta, 1.0, 20.0);
        let loose = find_bound_state_with(&e, QuadOptions::new(1e-8, 1e-8)).unwrap().unwrap();
        let tight = find_bound_state_with(&e, QuadOptions::new(1e-10, 1e-10)).unwrap().unwrap();
        assert!((loose.residue - tight.residue).abs() < 1e-7);
        let reference = find_bound_state(&e).unwrap().unwrap();
        assert!((tight.residue - reference.residue).abs() < 1e-7);
    }
}

#[test]
fn bound_state_exists_iff_above_threshold() {
    for s in [0.5, 1.0, 3.0] {
        let critical = eta_critical(s, 20.0);
        for k in 0..20 {
            let eta = critical * (0.5 + k as f64 / 19.0);
            if (eta - critical).abs() < 1e-9 * critical {
                continue;
            }
            let found = find_bound_state(&env(eta, s, 20.0)).unwrap();
            assert_eq!(found.is_some(), eta > critical, "s={s} eta={eta}");
        }
    }
}

#[test]
fn bound_energy_decreases_with_coupling() {
    let grid: Vec<f64> = (0..30).map(|k| 0.052 + 0.005 * k as f64).collect();
    let rows = spectrum_scan(1.0, 20.0, &grid).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].bound_state.unwrap().energy < w[0].bound_state.unwrap().energy);
    }
}

proptest! {
    #[test]
    fn self_energy_is_decreasing(
        eta in 0.001f64..0.3,
        s in 0.3f64..3.5,
        e1 in -20.0f64..-1e-3,
        gap in 1e-3f64..5.0,
    ) {
        let e = env(eta, s, 20.0);
        let lower = self_energy_y(&e, e1 - gap).unwrap();
        let upper = self_energy_y(&e, e1).unwrap();
        prop_assert!(lower > upper);
    }

    #[test]
    fn residue_in_unit_interval(eta in 0.051f64..0.5, s in 0.5f64..3.0) {
        let e = env(eta, s, 20.0);
        if let Some(bs) = find_bound_state(&e).unwrap() {
            prop_assert!(bs.residue > 0.0 && bs.residue <= 1.0);
            prop_assert!(bs.energy < 0.0);
        }
    }
}
