//! Excited-state amplitude of a single qubit in its bath.
//!
//! The amplitude obeys `ċ + iω₀c + ∫₀ᵗ f(t−τ) c(τ) dτ = 0` with `c(0) = 1`.
//! Integrating once gives the second-kind Volterra equation
//! `c(t) = 1 − ∫₀ᵗ K(t−τ) c(τ) dτ` with `K(x) = iω₀ + F(x)` and `F` the
//! antiderivative of `f`, which is what the solver discretizes.
//!
//! The scheme is product integration: on every panel `c` is replaced by its
//! cubic Lagrange interpolant through four neighbouring grid values, and the
//! kernel is integrated exactly against each monomial. The moments depend
//! only on the lag, so each step reduces to a discrete convolution and the
//! whole solve is `O(N²)` with fourth-order accuracy.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quad::{GL8_NODES, GL8_WEIGHTS};
use crate::spectral::{find_bound_state, kernel_antiderivative, kernel_f, markov_rates, BoundState, OhmicSpectralDensity, OMEGA0};

/// Below this modulus `ċ/c` is not evaluated.
pub const RATE_FLOOR: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Samples of `c(t)` and `ċ(t)` on the uniform grid `t_k = k·dt`.
#[derive(Debug, Clone)]
pub struct AmplitudeTrajectory {
    dt: f64,
    values: Vec<Complex64>,
    derivs: Vec<Complex64>,
    env: OhmicSpectralDensity,
}

impl AmplitudeTrajectory {
    /// Wraps externally computed samples; `ċ` is estimated by central
    /// differences with one-sided differences at the ends.
    pub fn from_samples(env: OhmicSpectralDensity, dt: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(domain("dt", dt, "time step must be positive"));
        }
        if values.len() < 2 {
            return Err(Error::GridMismatch("a trajectory needs at least two samples".into()));
        }
        let n = values.len();
        let derivs = (0..n)
            .map(|k| match k {
                0 => (values[1] - values[0]) / dt,
                k if k == n - 1 => (values[k] - values[k - 1]) / dt,
                k => (values[k + 1] - values[k - 1]) / (2.0 * dt),
            })
            .collect();
        Ok(AmplitudeTrajectory {
            dt,
            values,
            derivs,
            env,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn env(&self) -> &OhmicSpectralDensity {
        &self.env
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn derivs(&self) -> &[Complex64] {
        &self.derivs
    }

    /// Grid index of `t`, if `t` is a grid point to within `1e−9·dt`.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let x = t / self.dt;
        let k = x.round();
        ((x - k).abs() <= 1e-9 && k >= 0.0 && (k as usize) < self.len()).then_some(k as usize)
    }

    /// `c(t)` by cubic Hermite interpolation between grid points.
    pub fn value_at(&self, t: f64) -> Result<Complex64> {
        self.hermite(t).map(|(v, _)| v)
    }

    /// `ċ(t)` from the same Hermite interpolant.
    pub fn deriv_at(&self, t: f64) -> Result<Complex64> {
        self.hermite(t).map(|(_, d)| d)
    }

    fn hermite(&self, t: f64) -> Result<(Complex64, Complex64)> {
        if let Some(k) = self.index_of(t) {
            return Ok((self.values[k], self.derivs[k]));
        }
        if !(t >= 0.0 && t <= self.t_max()) {
            return Err(domain("t", t, "time lies outside the trajectory"));
        }
        let k = ((t / self.dt).floor() as usize).min(self.len() - 2);
        let h = self.dt;
        let u = (t - self.time(k)) / h;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.derivs[k] * h, self.derivs[k + 1] * h);
        let (u2, u3) = (u * u, u * u * u);
        let value = y0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + m0 * (u3 - 2.0 * u2 + u)
            + y1 * (-2.0 * u3 + 3.0 * u2)
            + m1 * (u3 - u2);
        let slope = (y0 * (6.0 * u2 - 6.0 * u) + m0 * (3.0 * u2 - 4.0 * u + 1.0) + y1 * (-6.0 * u2 + 6.0 * u) + m1 * (3.0 * u2 - 2.0 * u))
            / h;
        Ok((value, slope))
    }
}

/// Solves the amplitude equation on `[0, t_max]` with step `dt`. The grid
/// runs to the first multiple of `dt` at or beyond `t_max`.
pub fn solve_volterra(env: &OhmicSpectralDensity, t_max: f64, dt: f64) -> Result<AmplitudeTrajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(domain("dt", dt, "time step must be positive"));
    }
    if !(t_max >= dt && t_max.is_finite()) {
        return Err(domain("t_max", t_max, "horizon must be at least one time step"));
    }
    let steps = (t_max / dt - 1e-9).ceil() as usize;
    let env_k = *env;
    let (values, derivs) = solve_integrated(
        |x| I * OMEGA0 + kernel_antiderivative(&env_k, x),
        |x| kernel_f(&env_k, x),
        dt,
        steps,
    )?;
    Ok(AmplitudeTrajectory {
        dt,
        values,
        derivs,
        env: *env,
    })
}

/// Largest difference between the solution at `dt` and at `2·dt` on the
/// shared grid points; an a-posteriori estimate of the discretization error
/// at the coarser step.
pub fn convergence_gap(fine: &AmplitudeTrajectory, coarse: &AmplitudeTrajectory) -> Result<f64> {
    let ratio = coarse.dt() / fine.dt();
    let stride = ratio.round() as usize;
    if (ratio - stride as f64).abs() > 1e-9 || stride == 0 {
        return Err(Error::GridMismatch(format!(
            "coarse step {} is not a multiple of fine step {}",
            coarse.dt(),
            fine.dt()
        )));
    }
    Ok(coarse
        .values()
        .iter()
        .enumerate()
        .filter_map(|(k, c)| fine.values().get(k * stride).map(|f| (f - c).norm()))
        .fold(0.0, f64::max))
}

/// Monomial coefficients of the Lagrange basis on `nodes`: entry `[i][q]` is
/// the coefficient of `σ^q` in the polynomial that is 1 at `nodes[i]`.
fn lagrange_monomials(nodes: &[f64]) -> Vec<[f64; 4]> {
    (0..nodes.len())
        .map(|i| {
            let mut poly = [0.0; 4];
            poly[0] = 1.0;
            let mut denom = 1.0;
            for (j, &xj) in nodes.iter().enumerate() {
                if j == i {
                    continue;
                }
                // poly *= (σ − xj)
                for q in (0..4).rev() {
                    let lower = if q > 0 { poly[q - 1] } else { 0.0 };
                    poly[q] = lower - xj * poly[q];
                }
                denom *= nodes[i] - xj;
            }
            poly.map(|c| c / denom)
        })
        .collect()
}

/// A local interpolation rule: node offsets relative to the panel start and
/// their Lagrange coefficients.
struct Stencil {
    offsets: Vec<i64>,
    coef: Vec<[f64; 4]>,
}

impl Stencil {
    fn new(offsets: &[i64]) -> Self {
        let nodes: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
        Stencil {
            offsets: offsets.to_vec(),
            coef: lagrange_monomials(&nodes),
        }
    }

    /// Weights of the stencil nodes for lag `m`.
    fn weights(&self, moments: &[[Complex64; 4]], m: usize) -> [Complex64; 4] {
        let mu = &moments[m];
        let mut w = [Complex64::default(); 4];
        for (wi, coef) in w.iter_mut().zip(&self.coef) {
            *wi = coef.iter().zip(mu).map(|(c, mq)| mq * *c).sum();
        }
        w
    }
}

/// `h ∫₀¹ k((m+1−σ)h) σ^q dσ` for `q = 0..3` and every lag `m < count`.
fn lag_moments(k: &impl Fn(f64) -> Complex64, h: f64, count: usize) -> Vec<[Complex64; 4]> {
    (0..count)
        .map(|m| {
            let mut mu = [Complex64::default(); 4];
            for (&x, &w) in GL8_NODES.iter().zip(&GL8_WEIGHTS) {
                let sigma = 0.5 * (1.0 + x);
                let kv = k((m as f64 + 1.0 - sigma) * h) * (0.5 * w * h);
                let mut p = 1.0;
                for mq in mu.iter_mut() {
                    *mq += kv * p;
                    p *= sigma;
                }
            }
            mu
        })
        .collect()
}

struct Rules {
    first: Stencil,
    interior: Stencil,
    last: Stencil,
}

impl Rules {
    fn new() -> Self {
        Rules {
            first: Stencil::new(&[0, 1, 2, 3]),
            interior: Stencil::new(&[-1, 0, 1, 2]),
            last: Stencil::new(&[-2, -1, 0, 1]),
        }
    }

    /// For `n ≤ 3` every panel uses the single cubic through `c_0..c_3`.
    fn for_panel(&self, k: usize, n: usize) -> &Stencil {
        if k == 0 {
            &self.first
        } else if k == n - 1 && n >= 3 {
            &self.last
        } else {
            &self.interior
        }
    }
}

/// Convolution weights for one kernel: `∫₀^{t_n} k(t_n − τ) c(τ) dτ ≈ Σ_j w_{n,j} c_j`.
struct ProductRule<'a> {
    rules: &'a Rules,
    moments: Vec<[Complex64; 4]>,
    /// Summed interior weight for a node `d` steps behind `t_n`.
    omega: Vec<Complex64>,
}

/// Below this step count every panel is summed directly.
const DIRECT_STEPS: usize = 8;

impl<'a> ProductRule<'a> {
    fn new(rules: &'a Rules, k: &impl Fn(f64) -> Complex64, h: f64, steps: usize) -> Self {
        let moments = lag_moments(k, h, steps + 2);
        let interior: Vec<[Complex64; 4]> = (0..moments.len()).map(|m| rules.interior.weights(&moments, m)).collect();
        let omega = (0..=steps)
            .map(|d| {
                if d < 3 {
                    return Complex64::default();
                }
                (0..4).map(|i| interior[d - 2 + i][i]).sum()
            })
            .collect();
        ProductRule { rules, moments, omega }
    }

    /// Adds the contribution of panel `k` at step `n` for the nodes accepted
    /// by `keep`. Returns the known part and the coefficient of `c_n`.
    fn panel(&self, c: &[Complex64], n: usize, k: usize, keep: impl Fn(usize) -> bool) -> (Complex64, Complex64) {
        let stencil = self.rules.for_panel(k, n);
        let w = stencil.weights(&self.moments, n - 1 - k);
        let mut known = Complex64::default();
        let mut implicit = Complex64::default();
        for (i, &o) in stencil.offsets.iter().enumerate() {
            let j = (k as i64 + o) as usize;
            if !keep(j) {
                continue;
            }
            if j == n {
                implicit += w[i];
            } else {
                known += w[i] * c[j];
            }
        }
        (known, implicit)
    }

    /// Weights `w_{n,0..3}` for the start-up steps `n ≤ 3`, where all panels
    /// share the cubic through `c_0..c_3`.
    fn startup(&self, n: usize) -> [Complex64; 4] {
        let mut out = [Complex64::default(); 4];
        for k in 0..n {
            let stencil = self.rules.for_panel(k, n);
            let w = stencil.weights(&self.moments, n - 1 - k);
            for (i, &o) in stencil.offsets.iter().enumerate() {
                out[(k as i64 + o) as usize] += w[i];
            }
        }
        out
    }

    /// Splits `Σ_j w_{n,j} c_j` into the part from `c_0..c_{n−1}` and the
    /// weight `w_{n,n}`.
    fn split(&self, c: &[Complex64], n: usize) -> (Complex64, Complex64) {
        let mut known = Complex64::default();
        let mut implicit = Complex64::default();
        let mut add = |(a, b): (Complex64, Complex64)| {
            known += a;
            implicit += b;
        };
        debug_assert!(n > 3);
        if n < DIRECT_STEPS {
            for k in 0..n {
                add(self.panel(c, n, k, |_| true));
            }
            return (known, implicit);
        }
        // Nodes 3..=n−3 see only interior panels, whose weights depend on n − j alone.
        let conv: Complex64 = c[3..=n - 3].iter().zip(self.omega[3..=n - 3].iter().rev()).map(|(cj, w)| cj * w).sum();
        add((conv, Complex64::default()));
        add(self.panel(c, n, 0, |_| true));
        add(self.panel(c, n, n - 1, |_| true));
        for k in 1..=3 {
            add(self.panel(c, n, k, |j| j <= 2));
        }
        for k in n - 4..=n - 2 {
            add(self.panel(c, n, k, |j| j >= n - 2));
        }
        (known, implicit)
    }
}

/// Solves `c(t) = 1 − ∫₀ᵗ K(t−τ) c(τ) dτ` on `steps + 1` grid points and
/// returns `c` with `ċ = −K(0)c − ∫₀ᵗ K'(t−τ) c(τ) dτ`.
pub(crate) fn solve_integrated(
    kernel: impl Fn(f64) -> Complex64,
    kernel_deriv: impl Fn(f64) -> Complex64,
    h: f64,
    steps: usize,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let rules = Rules::new();
    let big_k = ProductRule::new(&rules, &kernel, h, steps.max(3));
    let small_f = ProductRule::new(&rules, &kernel_deriv, h, steps.max(3));

    let total = steps.max(3);
    let mut c = Vec::with_capacity(total + 1);
    let mut dc = Vec::with_capacity(total + 1);
    let non_finite = |n: usize| Error::Numerical {
        stage: "volterra",
        detail: format!("non-finite amplitude at step {n} (t = {})", n as f64 * h),
    };

    // Start-up: c_1, c_2, c_3 solve a coupled 3×3 system on one cubic.
    let start: Vec<[Complex64; 4]> = (1..=3).map(|n| big_k.startup(n)).collect();
    let one = Complex64::new(1.0, 0.0);
    let a = Matrix3::from_fn(|r, col| start[r][col + 1] + if r == col { one } else { Complex64::default() });
    let rhs = Vector3::from_fn(|r, _| one - start[r][0]);
    let head = a.lu().solve(&rhs).ok_or_else(|| non_finite(1))?;
    c.push(one);
    c.extend(head.iter());
    for (n, cn) in c.iter().enumerate() {
        if !(cn.re.is_finite() && cn.im.is_finite()) {
            return Err(non_finite(n));
        }
    }
    let k0 = kernel(0.0);
    dc.push(-k0);
    for n in 1..=3 {
        let w = small_f.startup(n);
        let conv: Complex64 = w.iter().zip(&c).map(|(wj, cj)| wj * cj).sum();
        dc.push(-k0 * c[n] - conv);
    }

    for n in 4..=total {
        let (known, implicit) = big_k.split(&c, n);
        let cn = (1.0 - known) / (1.0 + implicit);
        if !(cn.re.is_finite() && cn.im.is_finite()) {
            return Err(non_finite(n));
        }
        c.push(cn);
        let (known_f, implicit_f) = small_f.split(&c, n);
        dc.push(-k0 * cn - known_f - implicit_f * cn);
    }
    c.truncate(steps + 1);
    dc.truncate(steps + 1);
    Ok((c, dc))
}

/// Born–Markov amplitude `e^{−[κ + i(ω₀ + Δ)]t}`.
pub fn markov_amplitude(env: &OhmicSpectralDensity, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(domain("t", t, "time must be non-negative"));
    }
    let r = markov_rates(env)?;
    Ok((-Complex64::new(r.kappa, OMEGA0 + r.delta) * t).exp())
}

/// Long-time form of the amplitude: `Z e^{−iE_b t}` with a bound state, zero
/// without one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticLaw {
    pub bound_state: Option<BoundState>,
}

impl AsymptoticLaw {
    pub fn new(env: &OhmicSpectralDensity) -> Result<Self> {
        Ok(AsymptoticLaw {
            bound_state: find_bound_state(env)?,
        })
    }

    pub fn at(&self, t: f64) -> Complex64 {
        match self.bound_state {
            Some(b) => Complex64::from_polar(b.residue, -b.energy * t),
            None => Complex64::default(),
        }
    }
}

/// [`AsymptoticLaw`] evaluated at a single time.
pub fn asymptotic_amplitude(env: &OhmicSpectralDensity, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(domain("t", t, "time must be non-negative"));
    }
    Ok(AsymptoticLaw::new(env)?.at(t))
}

/// Time-local frequency `Ω = −Im(ċ/c)` and decay rate `Γ = −Re(ċ/c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub omega: f64,
    pub gamma: f64,
}

/// Rates at every grid point, or `None` where `|c|` is below [`RATE_FLOOR`].
pub fn rates_from_amplitude(traj: &AmplitudeTrajectory) -> Vec<Option<Rates>> {
    traj.values()
        .iter()
        .zip(traj.derivs())
        .map(|(c, dc)| rates_at(*c, *dc))
        .collect()
}

pub(crate) fn rates_at(c: Complex64, dc: Complex64) -> Option<Rates> {
    (c.norm() >= RATE_FLOOR).then(|| {
        let ratio = dc / c;
        Rates {
            omega: -ratio.im,
            gamma: -ratio.re,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(eta: f64) -> OhmicSpectralDensity {
        OhmicSpectralDensity::new(eta, 1.0, 20.0).unwrap()
    }

    #[test]
    fn lagrange_basis_reproduces_nodes() {
        let nodes = [-1.0, 0.0, 1.0, 2.0];
        let basis = lagrange_monomials(&nodes);
        for (i, poly) in basis.iter().enumerate() {
            for (j, &x) in nodes.iter().enumerate() {
                let v: f64 = poly.iter().enumerate().map(|(q, c)| c * x.powi(q as i32)).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    /// Exponential memory `f(t) = g² e^{−λt}` has the two-pole solution
    /// `c(t) = Σ_± (p_± + λ) e^{p_± t} / (p_± − p_∓)` with
    /// `p_± = [−(λ + i) ± √((λ − i)² − 4g²)] / 2`.
    fn exponential_memory_exact(g: f64, lambda: f64, t: f64) -> Complex64 {
        let b = Complex64::new(lambda, 1.0);
        let disc = ((Complex64::new(lambda, -1.0)).powi(2) - 4.0 * g * g).sqrt();
        let p1 = (-b + disc) / 2.0;
        let p2 = (-b - disc) / 2.0;
        (p1 + lambda) * (p1 * t).exp() / (p1 - p2) + (p2 + lambda) * (p2 * t).exp() / (p2 - p1)
    }

    fn exponential_memory_solve(g: f64, lambda: f64, h: f64, steps: usize) -> Vec<Complex64> {
        let (c, _) = solve_integrated(
            |x| I + g * g * (1.0 - (-lambda * x).exp()) / lambda,
            |x| Complex64::from(g * g * (-lambda * x).exp()),
            h,
            steps,
        )
        .unwrap();
        c
    }

    #[test]
    fn exponential_memory_solution_and_order() {
        let (g, lambda) = (0.7, 1.3);
        let t_end = 10.0;
        let mut errors = Vec::new();
        for steps in [200usize, 400, 800] {
            let c = exponential_memory_solve(g, lambda, t_end / steps as f64, steps);
            let err = c
                .iter()
                .enumerate()
                .map(|(k, v)| (v - exponential_memory_exact(g, lambda, k as f64 * t_end / steps as f64)).norm())
                .fold(0.0, f64::max);
            errors.push(err);
        }
        assert!(errors[2] < 4e-9, "{errors:?}");
        // Fourth order: halving h cuts the error about sixteenfold.
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 3.5, "observed order {order} from {errors:?}");
        }
    }

    #[test]
    fn derivative_matches_exact_solution() {
        let (g, lambda) = (0.7, 1.3);
        let h = 0.01;
        let (c, dc) = solve_integrated(
            |x| I + g * g * (1.0 - (-lambda * x).exp()) / lambda,
            |x| Complex64::from(g * g * (-lambda * x).exp()),
            h,
            500,
        )
        .unwrap();
        for k in [0, 1, 7, 100, 500] {
            let t = k as f64 * h;
            let eps = 1e-6;
            let exact =
                (exponential_memory_exact(g, lambda, t + eps) - exponential_memory_exact(g, lambda, (t - eps).abs())) / (2.0 * eps);
            if k > 0 {
                assert!((dc[k] - exact).norm() < 1e-7, "k={k}: {} vs {exact}", dc[k]);
            }
            let _ = c[k];
        }
        assert_eq!(dc[0], -I);
    }

    #[test]
    fn free_evolution() {
        let traj = solve_volterra(&env(0.0), 10.0, 0.01).unwrap();
        assert_eq!(traj.values()[0], Complex64::new(1.0, 0.0));
        let last = traj.values()[traj.len() - 1];
        assert!((traj.t_max() - 10.0).abs() < 1e-12);
        assert!((last - Complex64::from_polar(1.0, -10.0)).norm() <= 1e-8);
        for r in rates_from_amplitude(&traj).into_iter().flatten() {
            assert!((r.omega - 1.0).abs() < 1e-6 && r.gamma.abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(solve_volterra(&env(0.06), 10.0, 0.0).is_err());
        assert!(solve_volterra(&env(0.06), 0.001, 0.01).is_err());
    }

    #[test]
    fn trajectory_interpolation() {
        let traj = solve_volterra(&env(0.0), 2.0, 0.05).unwrap();
        for t in [0.013, 0.5, 1.234, 1.99] {
            let v = traj.value_at(t).unwrap();
            assert!((v - Complex64::from_polar(1.0, -t)).norm() < 1e-6);
        }
        assert!(traj.value_at(2.5).is_err());
        assert_eq!(traj.index_of(0.1), Some(2));
        assert_eq!(traj.index_of(0.11), None);
    }

    #[test]
    fn markov_amplitude_examples() {
        let e = env(0.06);
        assert_eq!(markov_amplitude(&e, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        let kappa = markov_rates(&e).unwrap().kappa;
        for t in [0.5, 3.0, 17.0] {
            assert!((markov_amplitude(&e, t).unwrap().norm() - (-kappa * t).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn asymptotic_amplitude_examples() {
        assert_eq!(asymptotic_amplitude(&env(0.03), 12.0).unwrap(), Complex64::default());
        let law = AsymptoticLaw::new(&env(0.06)).unwrap();
        let bs = law.bound_state.unwrap();
        let dt = 0.01;
        for k in 0..50 {
            let a = law.at(k as f64 * dt);
            let b = law.at((k + 1) as f64 * dt);
            assert!((a.norm() - bs.residue).abs() < 1e-14);
            assert!(((b / a).arg() + bs.energy * dt).abs() < 1e-10);
        }
    }

    #[test]
    fn from_samples_differences() {
        let dt = 0.01;
        let values: Vec<Complex64> = (0..200).map(|k| Complex64::from_polar(1.0, -(k as f64) * dt)).collect();
        let traj = AmplitudeTrajectory::from_samples(env(0.0), dt, values).unwrap();
        assert!((traj.derivs()[100] + I * traj.values()[100]).norm() < 1e-4);
        assert!(AmplitudeTrajectory::from_samples(env(0.0), dt, vec![Complex64::default()]).is_err());
    }
}
