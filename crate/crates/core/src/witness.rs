//! Entanglement and EPR-steering diagnostics.
//!
//! Entanglement is measured by the Wootters concurrence. Steering is detected
//! with the three-setting local-uncertainty witness
//!
//! `ΔS_AB = 2 − Σ_i min_α δ²(σ_i ⊗ I + α I ⊗ σ_i) = 2 − Σ_i [δ²(A_i) − Cov_i²/δ²(B_i)]`,
//!
//! where Bob's outcomes are used to predict Alice's; `ΔS_BA` swaps the roles.
//! Positive values certify steering in the labeled direction.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dissipative::EvolvedStateSeries;
use crate::error::{domain, Result};
use crate::spectral::{find_bound_state, OhmicSpectralDensity};
use crate::state::{hermitian_eigenvalues, kron, pauli, pauli_decompose, InitialFamilyParams, PauliForm, TwoQubitDensity};

/// Variances below this are treated as zero in the witness.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Wootters concurrence `max(0, √λ₁ − √λ₂ − √λ₃ − √λ₄)`, with `λ` the
/// eigenvalues of `√ρ ρ̃ √ρ` in decreasing order and
/// `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn concurrence(rho: &TwoQubitDensity) -> f64 {
    let m = rho.entries();
    let [_, sy, _] = pauli();
    let yy = kron(&sy, &sy);
    let tilde = yy * m.conjugate() * yy;
    let eig = SymmetricEigen::new((m + m.adjoint()) * Complex64::new(0.5, 0.0));
    let sqrt_vals = eig.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let root = eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();
    let mut lambdas = hermitian_eigenvalues(&(root * tilde * root)).map(|l| l.max(0.0).sqrt());
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0)
}

/// Direction of a steering test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteeringDirection {
    AToB,
    BToA,
}

/// A witness value. `degenerate` is set when some setting on the predicting
/// side has zero variance, so its compensation coefficient was set to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessValue {
    pub value: f64,
    pub degenerate: bool,
}

/// `δ²(σ_i) = (1 − x_i)(1 + x_i)`.
fn variance(x: f64) -> f64 {
    ((1.0 - x) * (1.0 + x)).max(0.0)
}

fn witness_from_form(pf: &PauliForm, direction: SteeringDirection) -> WitnessValue {
    let (target, helper) = match direction {
        SteeringDirection::AToB => (pf.a(), pf.b()),
        SteeringDirection::BToA => (pf.b(), pf.a()),
    };
    let mut residual = 0.0;
    let mut degenerate = false;
    for i in 0..3 {
        let cov = pf.connected()[(i, i)];
        let helper_var = variance(helper[i]);
        residual += variance(target[i]);
        if helper_var < VARIANCE_FLOOR {
            degenerate = true;
        } else {
            residual -= cov * cov / helper_var;
        }
    }
    WitnessValue {
        value: 2.0 - residual,
        degenerate,
    }
}

/// The three-setting steering witness in the given direction.
pub fn lur_witness(rho: &TwoQubitDensity, direction: SteeringDirection) -> WitnessValue {
    witness_from_form(&pauli_decompose(rho), direction)
}

/// Inputs of the long-time witness formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticWitnessParams {
    params: InitialFamilyParams,
    z_a: f64,
    z_b: f64,
    eb_a: f64,
    eb_b: f64,
}

impl AsymptoticWitnessParams {
    /// `z_j` is the residue on side `j` and `eb_j ≤ 0` its bound energy; a side
    /// without a bound state has `z_j = 0` and `eb_j = 0`.
    pub fn new(params: InitialFamilyParams, z_a: f64, z_b: f64, eb_a: f64, eb_b: f64) -> Result<Self> {
        for (name, z) in [("z_A", z_a), ("z_B", z_b)] {
            if !(0.0..=1.0).contains(&z) {
                return Err(domain(name, z, "residue must lie in [0, 1]"));
            }
        }
        for (name, e, z) in [("E_b^A", eb_a, z_a), ("E_b^B", eb_b, z_b)] {
            if !(e <= 0.0) {
                return Err(domain(name, e, "bound energy must be non-positive"));
            }
            if z == 0.0 && e != 0.0 {
                return Err(domain(name, e, "a side without residue has no bound energy"));
            }
        }
        Ok(AsymptoticWitnessParams {
            params,
            z_a,
            z_b,
            eb_a,
            eb_b,
        })
    }

    /// Reads `Z` and `E_b` off both environments.
    pub fn from_environments(
        params: InitialFamilyParams,
        env_a: &OhmicSpectralDensity,
        env_b: &OhmicSpectralDensity,
    ) -> Result<Self> {
        let split = |bs: Option<crate::spectral::BoundState>| bs.map_or((0.0, 0.0), |b| (b.residue, b.energy));
        let (z_a, eb_a) = split(find_bound_state(env_a)?);
        let (z_b, eb_b) = split(find_bound_state(env_b)?);
        AsymptoticWitnessParams::new(params, z_a, z_b, eb_a, eb_b)
    }

    pub fn params(&self) -> InitialFamilyParams {
        self.params
    }

    pub fn z_a(&self) -> f64 {
        self.z_a
    }

    pub fn z_b(&self) -> f64 {
        self.z_b
    }

    pub fn eb_a(&self) -> f64 {
        self.eb_a
    }

    pub fn eb_b(&self) -> f64 {
        self.eb_b
    }

    fn h_a(&self) -> f64 {
        let (p, theta) = (self.params.p(), self.params.theta());
        let r = self.params.r();
        let (za2, zb2) = (self.z_a * self.z_a, self.z_b * self.z_b);
        let (sin, cos) = theta.sin_cos();
        let (s2, s4) = (sin * sin, sin.powi(4));
        let den = r * (2.0 + r * zb2);
        let h1 = 4.0 * s2 * (zb2 * p * p * cos * cos - 1.0);
        let h2 = 4.0 * za2 * s4 * (2.0 + zb2 * p * p - zb2) / den;
        let h3 = 8.0 * p * za2 * s4 * (2.0 * theta).cos() * (zb2 + p * zb2 - 1.0) / den;
        h1 - h2 - h3
    }

    fn h_b(&self) -> f64 {
        let (p, theta) = (self.params.p(), self.params.theta());
        let (za2, zb2) = (self.z_a * self.z_a, self.z_b * self.z_b);
        let s2 = theta.sin().powi(2);
        let (c2, sin2t) = ((2.0 * theta).cos(), (2.0 * theta).sin());
        let den = 1.0 - za2 * s2;
        let h1 = (zb2 * (1.0 + p * p * c2 * c2) - 2.0) / den;
        let h2 = za2 * p * p * sin2t * sin2t + za2 * (2.0 - zb2 + zb2 * p * p) * s2 / den;
        let h3 = 2.0 * p * (1.0 - zb2 + za2 * (zb2 * (1.0 + p) - 1.0) * s2) * c2 / den;
        h1 + h2 + h3
    }
}

/// `(ΔS_AB, ΔS_BA)` on the long-time orbit, where `c_j → Z_j e^{−iE_b^j t}`.
pub fn asymptotic_witnesses(w: &AsymptoticWitnessParams, t: f64) -> (f64, f64) {
    let (p, theta) = (w.params.p(), w.params.theta());
    let (za2, zb2) = (w.z_a * w.z_a, w.z_b * w.z_b);
    let beat = p * p * (2.0 * (w.eb_a + w.eb_b) * t).cos() * (2.0 * theta).sin().powi(2);
    let ab = if za2 == 0.0 { 0.0 } else { za2 * (w.h_a() + beat * zb2) };
    let ba = if zb2 == 0.0 { 0.0 } else { zb2 * (w.h_b() + beat * za2) };
    (ab, ba)
}

/// Entanglement and steering diagnostics at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessSample {
    pub time: f64,
    pub concurrence: f64,
    pub ds_ab: f64,
    pub ds_ba: f64,
    /// Either witness needed a zero-variance fallback.
    pub degenerate: bool,
}

/// Concurrence and both witnesses at one state.
pub fn witness_sample(time: f64, rho: &TwoQubitDensity) -> WitnessSample {
    let pf = pauli_decompose(rho);
    let ab = witness_from_form(&pf, SteeringDirection::AToB);
    let ba = witness_from_form(&pf, SteeringDirection::BToA);
    WitnessSample {
        time,
        concurrence: concurrence(rho),
        ds_ab: ab.value,
        ds_ba: ba.value,
        degenerate: ab.degenerate || ba.degenerate,
    }
}

/// [`witness_sample`] at every state of a series, in parallel.
pub fn witness_series(series: &EvolvedStateSeries) -> Vec<WitnessSample> {
    series
        .times()
        .par_iter()
        .zip(series.states().par_iter())
        .map(|(&t, rho)| witness_sample(t, rho))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipative::rho_of_t;
    use crate::state::from_initial_family;
    use crate::state::tests::random_state;
    use nalgebra::Matrix2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_8};

    fn x_state_concurrence(rho: &TwoQubitDensity) -> f64 {
        let e = |i: usize, j: usize| rho.element(i, j);
        let a = e(0, 3).norm() - (e(1, 1).re * e(2, 2).re).sqrt();
        let b = e(1, 2).norm() - (e(0, 0).re * e(3, 3).re).sqrt();
        2.0 * a.max(b).max(0.0)
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence(&TwoQubitDensity::bell()) - 1.0).abs() < 1e-12);
        assert_eq!(concurrence(&TwoQubitDensity::maximally_mixed()), 0.0);
        let half = Complex64::new(0.5, 0.0);
        let plus = Matrix2::from_element(half);
        let product = TwoQubitDensity::product(&plus, &TwoQubitDensity::ground().reduced_b());
        assert!(concurrence(&product) < 1e-7);
    }

    #[test]
    fn concurrence_matches_x_state_formula() {
        for (p, theta) in [(0.9, FRAC_PI_8), (0.8, FRAC_PI_3), (0.4, 0.3), (1.0, 0.7)] {
            let params = InitialFamilyParams::new(p, theta).unwrap();
            let rho = from_initial_family(params);
            let c = concurrence(&rho);
            assert!((c - x_state_concurrence(&rho)).abs() < 1e-10, "p={p} theta={theta}");
            for k in 0..20 {
                let x = k as f64 / 19.0;
                let rho = rho_of_t(params, Complex64::from_polar(x, 3.0 * x), Complex64::from_polar(0.8 * x, -x)).unwrap();
                assert!((concurrence(&rho) - x_state_concurrence(&rho)).abs() < 1e-7);
            }
        }
        let rho = from_initial_family(InitialFamilyParams::new(0.9, FRAC_PI_8).unwrap());
        assert!(concurrence(&rho) > 0.0);
    }

    #[test]
    fn witness_examples() {
        for dir in [SteeringDirection::AToB, SteeringDirection::BToA] {
            let bell = lur_witness(&TwoQubitDensity::bell(), dir);
            assert!((bell.value - 2.0).abs() < 1e-12 && !bell.degenerate);
            let mixed = lur_witness(&TwoQubitDensity::maximally_mixed(), dir);
            assert!((mixed.value + 1.0).abs() < 1e-14);
        }
        let ground = lur_witness(&TwoQubitDensity::ground(), SteeringDirection::AToB);
        assert!(ground.degenerate && ground.value <= 0.0);
    }

    #[test]
    fn product_states_do_not_steer() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let rho = random_state(&mut rng);
            let product = TwoQubitDensity::product(&rho.reduced_a(), &rho.reduced_b());
            for dir in [SteeringDirection::AToB, SteeringDirection::BToA] {
                assert!(lur_witness(&product, dir).value <= 1e-12);
            }
        }
    }

    #[test]
    fn witnesses_bounded_and_imply_entanglement() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..300 {
            let rho = random_state(&mut rng);
            let s = witness_sample(0.0, &rho);
            assert!(s.ds_ab <= 2.0 + 1e-10 && s.ds_ba <= 2.0 + 1e-10);
            assert!((0.0..=1.0).contains(&s.concurrence));
            if s.ds_ab > 1e-8 || s.ds_ba > 1e-8 {
                assert!(s.concurrence > 0.0);
            }
        }
    }

    fn asym(p: f64, theta: f64, za: f64, zb: f64, ea: f64, eb: f64) -> AsymptoticWitnessParams {
        AsymptoticWitnessParams::new(InitialFamilyParams::new(p, theta).unwrap(), za, zb, ea, eb).unwrap()
    }

    #[test]
    fn asymptotic_one_sided_limits() {
        for (p, theta) in [(0.8, FRAC_PI_3), (0.9, FRAC_PI_8), (0.3, 1.1)] {
            let r = p * (2.0 * theta).cos() - 1.0;
            let zb: f64 = 0.83;
            let (ab, ba) = asymptotic_witnesses(&asym(p, theta, 0.0, zb, 0.0, -0.16), 12.0);
            assert_eq!(ab, 0.0);
            let z2 = zb * zb;
            assert!((ba - z2 * r * (2.0 - z2 + z2 * p * (2.0 * theta).cos())).abs() < 1e-14);
            assert!(ba < 0.0);

            let za: f64 = 0.83;
            let (ab, ba) = asymptotic_witnesses(&asym(p, theta, za, 0.0, -0.16, 0.0), 12.0);
            let s2 = theta.sin().powi(2);
            assert!((ab - 4.0 * za * za * s2 * (-1.0 + za * za * s2)).abs() < 1e-14);
            assert!(ab <= 0.0 && ba == 0.0);
        }
    }

    #[test]
    fn asymptotic_bell_endpoint() {
        let w = asym(1.0, FRAC_PI_4, 1.0, 1.0, 0.0, 0.0);
        let (ab, ba) = asymptotic_witnesses(&w, 0.0);
        let direct = rho_of_t(w.params(), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        assert!((ab - 2.0).abs() < 1e-12 && (ba - 2.0).abs() < 1e-12);
        assert!((lur_witness(&direct, SteeringDirection::AToB).value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_matches_direct_witness() {
        for (p, theta) in [(0.9, FRAC_PI_8), (0.9, std::f64::consts::PI / 12.0), (0.8, FRAC_PI_3), (0.5, 0.9)] {
            for (za, zb, ea, eb) in [(0.833, 0.833, -0.159, -0.159), (0.81, 0.76, -0.4, -0.08), (0.6, 0.95, -1.0, -0.3)] {
                let w = asym(p, theta, za, zb, ea, eb);
                for k in 0..50 {
                    let t = 300.0 + 4.0 * k as f64;
                    let rho = rho_of_t(
                        w.params(),
                        Complex64::from_polar(za, -ea * t),
                        Complex64::from_polar(zb, -eb * t),
                    )
                    .unwrap();
                    let (ab, ba) = asymptotic_witnesses(&w, t);
                    let d_ab = lur_witness(&rho, SteeringDirection::AToB).value;
                    let d_ba = lur_witness(&rho, SteeringDirection::BToA).value;
                    assert!((ab - d_ab).abs() < 1e-8, "AB p={p} t={t}: {ab} vs {d_ab}");
                    assert!((ba - d_ba).abs() < 1e-8, "BA p={p} t={t}: {ba} vs {d_ba}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_asymptotic_params() {
        let pr = InitialFamilyParams::new(0.8, 1.0).unwrap();
        assert!(AsymptoticWitnessParams::new(pr, 1.2, 0.5, -0.1, -0.1).is_err());
        assert!(AsymptoticWitnessParams::new(pr, 0.5, 0.5, 0.1, -0.1).is_err());
        assert!(AsymptoticWitnessParams::new(pr, 0.0, 0.5, -0.1, -0.1).is_err());
    }
}
