//! Two-qubit state under independent amplitude damping.
//!
//! For the initial family `p|ψ⟩⟨ψ| + (1−p)ρ_A⊗I/2` the state at time `t`
//! depends only on the two amplitudes `c_A(t)`, `c_B(t)`, and [`rho_of_t`]
//! writes it down directly. [`integrate_master_equation`] integrates the
//! time-local master equation instead and serves as an independent check.

use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3, Matrix4};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::amplitude::{rates_at, AmplitudeTrajectory};
use crate::error::{domain, Error, Result};
use crate::geometry::{ellipsoid_of, Party, SteeringEllipsoid};
use crate::state::{kron, pauli_decompose, InitialFamilyParams, TwoQubitDensity, Vec3};

const GG: usize = 0;
const GE: usize = 1;
const EG: usize = 2;
const EE: usize = 3;

/// Amplitudes may exceed 1 by this much (solver error) before being rejected.
const MODULUS_SLACK: f64 = 1e-9;

/// The evolved state for amplitudes `c_A`, `c_B`.
pub fn rho_of_t(params: InitialFamilyParams, c_a: Complex64, c_b: Complex64) -> Result<TwoQubitDensity> {
    if c_a.norm() > 1.0 + MODULUS_SLACK {
        return Err(domain("c_A", c_a.norm(), "amplitude modulus must not exceed 1"));
    }
    if c_b.norm() > 1.0 + MODULUS_SLACK {
        return Err(domain("c_B", c_b.norm(), "amplitude modulus must not exceed 1"));
    }
    let (p, theta) = (params.p(), params.theta());
    let (sin, cos) = theta.sin_cos();
    let sin2 = sin * sin;
    let (na, nb) = (c_a.norm_sqr(), c_b.norm_sqr());
    let d = 0.5 * nb * (-1.0 + p * (2.0 * theta).cos() + (1.0 + p) * na * sin2);

    let mut m = Matrix4::<Complex64>::zeros();
    m[(GG, GG)] = (1.0 - na * sin2 + d).into();
    m[(GE, GE)] = (-d).into();
    m[(EG, EG)] = (-0.5 * na * (-2.0 + (1.0 + p) * nb) * sin2).into();
    m[(EE, EE)] = (0.5 * na * nb * (1.0 + p) * sin2).into();
    let coherence = c_a * c_b * (p * cos * sin);
    m[(EE, GG)] = coherence;
    m[(GG, EE)] = coherence.conj();
    Ok(TwoQubitDensity::from_matrix(m))
}

/// A sampled two-qubit trajectory together with the inputs that produced it.
#[derive(Debug, Clone)]
pub struct EvolvedStateSeries {
    params: InitialFamilyParams,
    traj_a: Arc<AmplitudeTrajectory>,
    traj_b: Arc<AmplitudeTrajectory>,
    times: Vec<f64>,
    states: Vec<TwoQubitDensity>,
    max_hermiticity_defect: f64,
}

impl EvolvedStateSeries {
    pub fn params(&self) -> InitialFamilyParams {
        self.params
    }

    pub fn traj_a(&self) -> &AmplitudeTrajectory {
        &self.traj_a
    }

    pub fn traj_b(&self) -> &AmplitudeTrajectory {
        &self.traj_b
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[TwoQubitDensity] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Largest `‖ρ − ρ†‖` removed by symmetrization; zero for the closed form.
    pub fn max_hermiticity_defect(&self) -> f64 {
        self.max_hermiticity_defect
    }

    /// The state at grid time `t`.
    pub fn state_at(&self, t: f64) -> Option<&TwoQubitDensity> {
        self.traj_a.index_of(t).and_then(|k| self.states.get(k))
    }

    /// Largest element-wise modulus difference against another series on the
    /// shared samples.
    pub fn max_element_difference(&self, other: &EvolvedStateSeries) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| (a.entries() - b.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

fn check_grids(a: &AmplitudeTrajectory, b: &AmplitudeTrajectory) -> Result<()> {
    if (a.dt() - b.dt()).abs() > 1e-12 * a.dt() || a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "A has {} samples at dt {}, B has {} samples at dt {}",
            a.len(),
            a.dt(),
            b.len(),
            b.dt()
        )));
    }
    Ok(())
}

/// Applies [`rho_of_t`] at every grid point, in parallel.
pub fn evolve_series(
    params: InitialFamilyParams,
    traj_a: Arc<AmplitudeTrajectory>,
    traj_b: Arc<AmplitudeTrajectory>,
) -> Result<EvolvedStateSeries> {
    check_grids(&traj_a, &traj_b)?;
    let states = traj_a
        .values()
        .par_iter()
        .zip(traj_b.values().par_iter())
        .map(|(ca, cb)| rho_of_t(params, *ca, *cb))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvolvedStateSeries {
        params,
        times: traj_a.times(),
        traj_a,
        traj_b,
        states,
        max_hermiticity_defect: 0.0,
    })
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Operators entering the generator: `σ_j` and `σ_j†σ_j` for both qubits.
struct Jumps {
    lower: [Matrix4<Complex64>; 2],
    raise: [Matrix4<Complex64>; 2],
    number: [Matrix4<Complex64>; 2],
}

impl Jumps {
    fn new() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::default();
        // |g⟩⟨e| in the (g, e) basis.
        let sigma = Matrix2::new(zero, one, zero, zero);
        let id = Matrix2::identity();
        let lower = [kron(&sigma, &id), kron(&id, &sigma)];
        let raise = [lower[0].adjoint(), lower[1].adjoint()];
        let number = [raise[0] * lower[0], raise[1] * lower[1]];
        Jumps { lower, raise, number }
    }

    /// `Σ_j −iΩ_j[n_j, ρ] + Γ_j(2σ_jρσ_j† − n_jρ − ρn_j)`.
    fn generator(&self, rho: &Matrix4<Complex64>, rates: [(f64, f64); 2]) -> Matrix4<Complex64> {
        let mut out = Matrix4::zeros();
        for (j, &(omega, gamma)) in rates.iter().enumerate() {
            let n_rho = self.number[j] * rho;
            let rho_n = rho * self.number[j];
            out += (n_rho - rho_n) * Complex64::new(0.0, -omega);
            out += (self.lower[j] * rho * self.raise[j] * re(2.0) - n_rho - rho_n) * re(gamma);
        }
        out
    }
}

/// Integrates the time-local master equation with classical RK4 on the
/// amplitude grid up to `t_end` (the whole grid when `None`). Rates at half
/// steps come from the Hermite interpolant of `c`.
pub fn integrate_master_equation(
    params: InitialFamilyParams,
    traj_a: Arc<AmplitudeTrajectory>,
    traj_b: Arc<AmplitudeTrajectory>,
    t_end: Option<f64>,
) -> Result<EvolvedStateSeries> {
    check_grids(&traj_a, &traj_b)?;
    let h = traj_a.dt();
    let last = match t_end {
        Some(t) => ((t / h).round() as usize).min(traj_a.len() - 1),
        None => traj_a.len() - 1,
    };
    let jumps = Jumps::new();
    let rates = |t: f64, last_valid: f64| -> Result<[(f64, f64); 2]> {
        let mut out = [(0.0, 0.0); 2];
        for (slot, traj) in out.iter_mut().zip([&traj_a, &traj_b]) {
            let r = rates_at(traj.value_at(t)?, traj.deriv_at(t)?).ok_or(Error::RateUnavailable {
                time: t,
                last_valid_time: last_valid,
            })?;
            *slot = (r.omega, r.gamma);
        }
        Ok(out)
    };

    let mut rho = *crate::state::from_initial_family(params).entries();
    let mut states = vec![TwoQubitDensity::from_matrix(rho)];
    let mut defect: f64 = 0.0;
    for k in 0..last {
        let t = k as f64 * h;
        let r0 = rates(t, t)?;
        let rm = rates(t + 0.5 * h, t)?;
        let r1 = rates(t + h, t)?;
        let k1 = jumps.generator(&rho, r0);
        let k2 = jumps.generator(&(rho + k1 * re(0.5 * h)), rm);
        let k3 = jumps.generator(&(rho + k2 * re(0.5 * h)), rm);
        let k4 = jumps.generator(&(rho + k3 * re(h)), r1);
        rho += (k1 + k2 * re(2.0) + k3 * re(2.0) + k4) * re(h / 6.0);
        defect = defect.max((rho - rho.adjoint()).norm());
        rho = (rho + rho.adjoint()) * re(0.5);
        states.push(TwoQubitDensity::from_matrix(rho));
    }
    let times = (0..=last).map(|k| k as f64 * h).collect();
    Ok(EvolvedStateSeries {
        params,
        traj_a,
        traj_b,
        times,
        states,
        max_hermiticity_defect: defect,
    })
}

/// Steering ellipsoid of `party` in the long-time state, where `|c_A| → z_a`
/// and `|c_B| → z_b`, from the closed-form semiaxes and center.
///
/// A vanishing partner residue is read as the limit `z → 0⁺`: while the
/// partner keeps any excitation at all, its rare outcomes still steer across
/// a finite ellipsoid, even though at exactly zero the ellipsoid is a point.
pub fn steady_state_qse(party: Party, params: InitialFamilyParams, z_a: f64, z_b: f64) -> Result<SteeringEllipsoid> {
    for (name, z) in [("z_A", z_a), ("z_B", z_b)] {
        if !(0.0..=1.0).contains(&z) {
            return Err(domain(name, z, "residue must lie in [0, 1]"));
        }
    }
    let (p, theta) = (params.p(), params.theta());
    let (sin, cos) = theta.sin_cos();
    let sin2t = (2.0 * theta).sin();
    let r = params.r();
    let (za2, zb2) = (z_a * z_a, z_b * z_b);
    let closed = match party {
        Party::Alice => {
            let den = r * (2.0 + r * zb2);
            (den.abs() > 1e-14).then(|| {
                let lxy = p * (z_a * sin2t).abs() / (-den).sqrt();
                let lz = 4.0 * p * za2 * cos * cos * sin * sin / den.abs();
                let cz = 1.0 + 2.0 * sin * sin * za2 * ((1.0 + p) * (1.0 + r * zb2) - r) / den;
                (lxy, lz, cz)
            })
        }
        Party::Bob => {
            let den = 1.0 - za2 * sin * sin;
            (den > 1e-14).then(|| {
                let lxy = p * (z_b * cos).abs() / den.sqrt();
                let lz = p * zb2 * cos * cos / den;
                let cz = 1.0 - zb2 * (1.0 + p) + p * zb2 * cos * cos / den;
                (lxy, lz, cz)
            })
        }
    };
    match closed {
        Some((lxy, lz, cz)) => {
            let q = Matrix3::from_diagonal(&Vec3::new(lxy * lxy, lxy * lxy, lz * lz));
            Ok(SteeringEllipsoid::from_matrix(Vec3::new(0.0, 0.0, cz), &q, None))
        }
        // The steering party's marginal is pure; use the general construction.
        None => {
            let rho = rho_of_t(params, z_a.into(), z_b.into())?;
            Ok(ellipsoid_of(&pauli_decompose(&rho), party, None))
        }
    }
}
