//! Ohmic-family environments.
//!
//! Each qubit couples to a zero-temperature bosonic bath with spectral
//! density `J(ω) = η ω^s ω_c^{1−s} e^{−ω/ω_c}`. Frequencies are measured in
//! units of the qubit splitting `ω₀ = 1`.

use libm::tgamma;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::quad::{integrate_breaks, integrate_to_infinity, QuadOptions};

/// Qubit transition frequency; it sets the unit of frequency.
pub const OMEGA0: f64 = 1.0;

/// Tolerance on `|Y(E_b) − E_b|` for an accepted bound state.
pub const ROOT_TOL: f64 = 1e-12;

/// Spectral density `J(ω) = η ω^s ω_c^{1−s} e^{−ω/ω_c}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicSpectralDensity {
    eta: f64,
    s: f64,
    omega_c: f64,
}

impl OhmicSpectralDensity {
    pub fn new(eta: f64, s: f64, omega_c: f64) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(domain("eta", eta, "coupling must be finite and non-negative"));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(domain("s", s, "Ohmicity must be positive"));
        }
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(domain("omega_c", omega_c, "cutoff must be positive"));
        }
        Ok(OhmicSpectralDensity { eta, s, omega_c })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    /// The same bath shape with a different coupling.
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        OhmicSpectralDensity::new(eta, self.s, self.omega_c)
    }

    fn prefactor(&self) -> f64 {
        self.eta * self.omega_c.powf(1.0 - self.s)
    }

    fn j_unchecked(&self, omega: f64) -> f64 {
        if omega == 0.0 {
            return 0.0;
        }
        self.prefactor() * omega.powf(self.s) * (-omega / self.omega_c).exp()
    }
}

/// A pole of the qubit's resolvent below the band edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    /// `E_b < 0`, in units of `ω₀`.
    pub energy: f64,
    /// Weight `Z ∈ (0, 1]` of the pole; `|c(t)| → Z` at long times.
    pub residue: f64,
}

/// Born–Markov decay rate and Lamb shift at the qubit frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovRates {
    pub kappa: f64,
    pub delta: f64,
}

/// Evaluates `J(ω)`.
pub fn j_omega(env: &OhmicSpectralDensity, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(domain("omega", omega, "spectral density is defined for omega >= 0"));
    }
    Ok(env.j_unchecked(omega))
}

fn kernel_constants(env: &OhmicSpectralDensity) -> (f64, f64) {
    (env.prefactor() * tgamma(env.s + 1.0), 1.0 / env.omega_c)
}

/// Bath correlation function `f(t) = ∫₀^∞ J(ω) e^{−iωt} dω`, in closed form
/// `η ω_c^{1−s} Γ(s+1) (1/ω_c + it)^{−(s+1)}`.
pub fn kernel_f(env: &OhmicSpectralDensity, t: f64) -> Complex64 {
    let (amp, a) = kernel_constants(env);
    amp * Complex64::new(a, t).powf(-(env.s + 1.0))
}

/// `F(x) = ∫₀^x f(t) dt = (iA/s)[(a + ix)^{−s} − a^{−s}]` with
/// `A = η ω_c^{1−s} Γ(s+1)` and `a = 1/ω_c`.
pub fn kernel_antiderivative(env: &OhmicSpectralDensity, x: f64) -> Complex64 {
    let (amp, a) = kernel_constants(env);
    let s = env.s;
    Complex64::new(0.0, amp / s) * (Complex64::new(a, x).powf(-s) - a.powf(-s))
}

/// Coupling above which a bound state forms, `η_c = ω₀ / (ω_c Γ(s))`.
pub fn eta_critical(s: f64, omega_c: f64) -> f64 {
    OMEGA0 / (omega_c * tgamma(s))
}

/// `Y(0) = ω₀ − η ω_c Γ(s)`, the band-edge limit of [`self_energy_y`].
pub fn self_energy_at_edge(env: &OhmicSpectralDensity) -> f64 {
    OMEGA0 - env.eta * env.omega_c * tgamma(env.s)
}

fn y_opts() -> QuadOptions {
    QuadOptions::new(1e-15, 1e-14)
}

/// `Y(E) = ω₀ − ∫₀^∞ J(ω)/(ω − E) dω` for `E < 0`.
pub fn self_energy_y(env: &OhmicSpectralDensity, energy: f64) -> Result<f64> {
    self_energy_y_with(env, energy, y_opts())
}

fn self_energy_y_with(env: &OhmicSpectralDensity, energy: f64, opts: QuadOptions) -> Result<f64> {
    if !(energy < 0.0) {
        return Err(domain("E", energy, "self-energy is evaluated below the band edge (E < 0)"));
    }
    if env.eta == 0.0 {
        return Ok(OMEGA0);
    }
    // ω = ω_c x turns the integral into η ω_c ∫ x^s e^{−x} / (x + ε) dx, ε = −E/ω_c.
    let eps = -energy / env.omega_c;
    let s = env.s;
    let integral = integrate_to_infinity(|x: f64| x.powf(s) * (-x).exp() / (x + eps), 0.0, &[eps, s.max(1.0)], opts)?;
    Ok(OMEGA0 - env.eta * env.omega_c * integral.value)
}

fn residue_with(env: &OhmicSpectralDensity, energy: f64, opts: QuadOptions) -> Result<f64> {
    let eps = -energy / env.omega_c;
    let s = env.s;
    let integral =
        integrate_to_infinity(|x: f64| x.powf(s) * (-x).exp() / ((x + eps) * (x + eps)), 0.0, &[eps, s.max(1.0)], opts)?;
    Ok(1.0 / (1.0 + env.eta * integral.value))
}

/// Locates the bound state, if any, by bisection on `Y(E) − E`.
pub fn find_bound_state(env: &OhmicSpectralDensity) -> Result<Option<BoundState>> {
    find_bound_state_with(env, y_opts())
}

/// As [`find_bound_state`], with explicit quadrature tolerances.
pub fn find_bound_state_with(env: &OhmicSpectralDensity, opts: QuadOptions) -> Result<Option<BoundState>> {
    let edge = self_energy_at_edge(env);
    if edge >= 0.0 {
        return Ok(None);
    }
    // Y is decreasing, so Y(E) − E is positive at E = Y(0) − ω₀ and negative at 0⁻.
    let mut lo = edge - OMEGA0;
    let mut hi = 0.0_f64;
    let g = |e: f64| self_energy_y_with(env, e, opts).map(|y| y - e);
    let mut best = (lo, g(lo)?);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm.abs() < best.1.abs() {
            best = (mid, gm);
        }
        if gm == 0.0 {
            break;
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (energy, residual) = best;
    if residual.abs() > ROOT_TOL {
        return Err(Error::Numerical {
            stage: "bound-state root",
            detail: format!("residual |Y(E) - E| = {:e} at E = {energy}", residual.abs()),
        });
    }
    let residue = residue_with(env, energy, opts)?;
    Ok(Some(BoundState { energy, residue }))
}

/// `κ = π J(ω₀)` and `Δ = P∫₀^∞ J(ω)/(ω₀ − ω) dω`.
pub fn markov_rates(env: &OhmicSpectralDensity) -> Result<MarkovRates> {
    let j1 = env.j_unchecked(OMEGA0);
    let kappa = std::f64::consts::PI * j1;
    if env.eta == 0.0 {
        return Ok(MarkovRates { kappa, delta: 0.0 });
    }
    // Subtracting J(ω₀) removes the pole on [0, 2ω₀]; the subtracted term's
    // principal value vanishes on that symmetric interval.
    let (s, wc) = (env.s, env.omega_c);
    let log_slope = s / OMEGA0 - 1.0 / wc;
    let d1 = j1 * log_slope;
    let d2 = j1 * (log_slope * log_slope - s / (OMEGA0 * OMEGA0));
    let mut near = |w: f64| {
        let u = w - OMEGA0;
        if u.abs() < 1e-4 {
            -d1 - 0.5 * d2 * u
        } else {
            (env.j_unchecked(w) - j1) / (OMEGA0 - w)
        }
    };
    let opts = QuadOptions::new(1e-14, 1e-13);
    let inner = integrate_breaks(&mut near, &[0.0, OMEGA0, 2.0 * OMEGA0], opts)?;
    let tail = integrate_to_infinity(
        |w: f64| env.j_unchecked(w) / (OMEGA0 - w),
        2.0 * OMEGA0,
        &[(s * wc).max(4.0 * OMEGA0)],
        opts,
    )?;
    Ok(MarkovRates {
        kappa,
        delta: inner.value + tail.value,
    })
}

/// One row of a spectrum scan: the bound-state branch at coupling `eta`. The
/// continuum always occupies `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub eta: f64,
    pub bound_state: Option<BoundState>,
}

/// Evaluates the bound-state branch on a grid of couplings, in parallel.
pub fn spectrum_scan(s: f64, omega_c: f64, eta_grid: &[f64]) -> Result<Vec<SpectrumPoint>> {
    eta_grid
        .par_iter()
        .map(|&eta| {
            let env = OhmicSpectralDensity::new(eta, s, omega_c)?;
            Ok(SpectrumPoint {
                eta,
                bound_state: find_bound_state(&env)?,
            })
        })
        .collect()
}
