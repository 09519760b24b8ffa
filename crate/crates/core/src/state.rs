//! Two-qubit density matrices, the mixed entangled initial family, and the
//! Pauli-basis (Bloch/correlation) decomposition.
//!
//! Basis order is `|gg⟩, |ge⟩, |eg⟩, |ee⟩`, i.e. the flat index of `|a b⟩` is
//! `2a + b` with `g = 0` and `e = 1`. Alice is the first factor. The Bloch
//! convention puts the ground state on the north pole: `σ_z = diag(1, -1)` on
//! `(|g⟩, |e⟩)`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;

use crate::error::{domain, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Hermiticity tolerance of a valid density matrix.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-trace tolerance of a valid density matrix.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue; time-stepped states accrue quadrature error.
pub const PSD_TOL: f64 = -1e-8;

/// The Pauli matrices `σ_x, σ_y, σ_z` in the `(|g⟩, |e⟩)` basis.
pub fn pauli() -> [Matrix2<Complex64>; 3] {
    [
        Matrix2::new(ZERO, ONE, ONE, ZERO),
        Matrix2::new(ZERO, -I, I, ZERO),
        Matrix2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

/// Kronecker product of two single-qubit operators, Alice's first.
pub fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Tr[ρ O] for 4×4 operators.
fn trace_product(rho: &Matrix4<Complex64>, op: &Matrix4<Complex64>) -> Complex64 {
    let mut acc = ZERO;
    for i in 0..4 {
        for j in 0..4 {
            acc += rho[(i, j)] * op[(j, i)];
        }
    }
    acc
}

fn bloch_of(m: &Matrix2<Complex64>) -> Vec3 {
    // Tr[m σ] for a 2×2 operator.
    Vec3::new(
        2.0 * m[(0, 1)].re,
        -2.0 * m[(0, 1)].im,
        (m[(0, 0)] - m[(1, 1)]).re,
    )
}

/// A 4×4 two-qubit density matrix.
///
/// Construction never validates: states along numerically propagated
/// trajectories must stay inspectable, so validity is reported by
/// [`TwoQubitDensity::validate`] instead.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensity {
    entries: Matrix4<Complex64>,
}

impl TwoQubitDensity {
    pub fn from_matrix(entries: Matrix4<Complex64>) -> Self {
        TwoQubitDensity { entries }
    }

    /// `|ψ⟩⟨ψ|` for an amplitude vector in the `gg, ge, eg, ee` order.
    /// The vector is normalized first.
    pub fn from_pure(amplitudes: [Complex64; 4]) -> Self {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<Complex64> = amplitudes.iter().map(|z| z / norm).collect();
        TwoQubitDensity {
            entries: Matrix4::from_fn(|r, c| v[r] * v[c].conj()),
        }
    }

    /// The maximally mixed state `I/4`.
    pub fn maximally_mixed() -> Self {
        TwoQubitDensity {
            entries: Matrix4::identity() * Complex64::new(0.25, 0.0),
        }
    }

    /// `(|gg⟩ + |ee⟩)/√2`.
    pub fn bell() -> Self {
        Self::from_pure([ONE, ZERO, ZERO, ONE])
    }

    /// `|gg⟩⟨gg|`, the fully decayed state.
    pub fn ground() -> Self {
        Self::from_pure([ONE, ZERO, ZERO, ZERO])
    }

    /// `ρ_A ⊗ ρ_B`.
    pub fn product(rho_a: &Matrix2<Complex64>, rho_b: &Matrix2<Complex64>) -> Self {
        TwoQubitDensity {
            entries: kron(rho_a, rho_b),
        }
    }

    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.entries
    }

    /// `⟨row|ρ|col⟩`.
    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Alice's reduced state `Tr_B ρ`.
    pub fn reduced_a(&self) -> Matrix2<Complex64> {
        let m = &self.entries;
        Matrix2::from_fn(|r, c| m[(2 * r, 2 * c)] + m[(2 * r + 1, 2 * c + 1)])
    }

    /// Bob's reduced state `Tr_A ρ`.
    pub fn reduced_b(&self) -> Matrix2<Complex64> {
        let m = &self.entries;
        Matrix2::from_fn(|r, c| m[(r, c)] + m[(r + 2, c + 2)])
    }

    /// Exchanges Alice and Bob.
    pub fn swap_parties(&self) -> Self {
        let perm = [0usize, 2, 1, 3];
        TwoQubitDensity {
            entries: Matrix4::from_fn(|r, c| self.entries[(perm[r], perm[c])]),
        }
    }

    /// Partial transpose on Bob's factor.
    pub fn partial_transpose_b(&self) -> Matrix4<Complex64> {
        Matrix4::from_fn(|r, c| {
            let (a, b) = (r / 2, r % 2);
            let (ap, bp) = (c / 2, c % 2);
            self.entries[(2 * a + bp, 2 * ap + b)]
        })
    }

    /// Conjugation by a local unitary `U_A ⊗ U_B`.
    pub fn local_rotate(&self, u_a: &Matrix2<Complex64>, u_b: &Matrix2<Complex64>) -> Self {
        let u = kron(u_a, u_b);
        TwoQubitDensity {
            entries: u * self.entries * u.adjoint(),
        }
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.entries)
    }

    /// Trace distance `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &TwoQubitDensity) -> f64 {
        let diff = self.entries - other.entries;
        0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>()
    }

    pub fn validate(&self) -> Diagnostics {
        validate(self)
    }
}

/// Ascending eigenvalues of the Hermitian part of a 4×4 matrix.
pub(crate) fn hermitian_eigenvalues(m: &Matrix4<Complex64>) -> [f64; 4] {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let ev = h.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(f64::total_cmp);
    out
}

/// Defects of a candidate density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `max |ρ − ρ†|` over entries.
    pub hermiticity_defect: f64,
    /// `|Tr ρ − 1|`.
    pub trace_defect: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
}

impl Diagnostics {
    /// True when all three defects are within the module tolerances.
    pub fn is_valid(&self) -> bool {
        self.hermiticity_defect <= HERMITIAN_TOL && self.trace_defect <= TRACE_TOL && self.min_eigenvalue >= PSD_TOL
    }
}

/// Reports hermiticity, trace and positivity defects without mutating or
/// rejecting the state.
pub fn validate(rho: &TwoQubitDensity) -> Diagnostics {
    let m = rho.entries();
    let hermiticity_defect = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let trace_defect = (m.trace() - ONE).norm();
    Diagnostics {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue: rho.eigenvalues()[0],
    }
}

/// Local Bloch vectors and correlation matrix of a two-qubit state.
///
/// Besides `a`, `b`, `T` the form carries the connected correlations
/// `T − a bᵀ` and the marginal impurities `1 − |a|²`, `1 − |b|²`. When built
/// by [`pauli_decompose`] these are taken straight from the density matrix
/// (`ρ − ρ_A ⊗ ρ_B` and `4 det ρ_A`), which keeps full relative precision as a
/// marginal approaches a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliForm {
    a: Vec3,
    b: Vec3,
    t: Mat3,
    connected: Mat3,
    impurity_a: f64,
    impurity_b: f64,
}

impl PauliForm {
    pub fn new(a: Vec3, b: Vec3, t: Mat3) -> Self {
        PauliForm {
            connected: t - a * b.transpose(),
            impurity_a: 1.0 - a.norm_squared(),
            impurity_b: 1.0 - b.norm_squared(),
            a,
            b,
            t,
        }
    }

    /// Alice's Bloch vector.
    pub fn a(&self) -> &Vec3 {
        &self.a
    }

    /// Bob's Bloch vector.
    pub fn b(&self) -> &Vec3 {
        &self.b
    }

    /// Correlation matrix `T_mn = Tr[ρ σ_m ⊗ σ_n]`.
    pub fn t(&self) -> &Mat3 {
        &self.t
    }

    /// `T − a bᵀ`.
    pub fn connected(&self) -> &Mat3 {
        &self.connected
    }

    /// `1 − |a|²`.
    pub fn impurity_a(&self) -> f64 {
        self.impurity_a
    }

    /// `1 − |b|²`.
    pub fn impurity_b(&self) -> f64 {
        self.impurity_b
    }

    /// The same state with Alice and Bob exchanged.
    pub fn swapped(&self) -> Self {
        PauliForm {
            a: self.b,
            b: self.a,
            t: self.t.transpose(),
            connected: self.connected.transpose(),
            impurity_a: self.impurity_b,
            impurity_b: self.impurity_a,
        }
    }

    /// `¼(I⊗I + a·σ⊗I + I⊗b·σ + Σ T_mn σ_m⊗σ_n)`.
    pub fn recompose(&self) -> TwoQubitDensity {
        let s = pauli();
        let id = Matrix2::<Complex64>::identity();
        let mut m = Matrix4::<Complex64>::identity();
        for i in 0..3 {
            m += kron(&s[i], &id) * Complex64::from(self.a[i]);
            m += kron(&id, &s[i]) * Complex64::from(self.b[i]);
            for j in 0..3 {
                m += kron(&s[i], &s[j]) * Complex64::from(self.t[(i, j)]);
            }
        }
        TwoQubitDensity::from_matrix(m * Complex64::new(0.25, 0.0))
    }
}

fn det2(m: &Matrix2<Complex64>) -> f64 {
    (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re
}

/// Double-double accumulator built from error-free sums and FMA products.
#[derive(Default, Clone, Copy)]
struct Compensated {
    hi: f64,
    lo: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let s = self.hi + x;
        let bp = s - self.hi;
        let err = (self.hi - (s - bp)) + (x - bp);
        self.hi = s;
        self.lo += err;
    }

    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.add(p);
        self.lo += a.mul_add(b, -p);
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// `Tr(ρ)·ρ − ρ_A⊗ρ_B`, expanded as `Σ_cd ρ_{ab,a'b'}ρ_{cd,cd} − ρ_{ac,a'c}ρ_{db,db'}`
/// and summed in extended precision. Near a pure marginal the result is many
/// orders of magnitude smaller than the entries of ρ; a plain subtraction
/// would lose it to rounding.
fn connected_part(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let idx = |a: usize, b: usize| 2 * a + b;
    Matrix4::from_fn(|row, col| {
        let (a, b) = (row / 2, row % 2);
        let (a2, b2) = (col / 2, col % 2);
        let (mut re, mut im) = (Compensated::default(), Compensated::default());
        let mut accumulate = |x: Complex64, y: Complex64, sign: f64| {
            re.add_product(sign * x.re, y.re);
            re.add_product(-sign * x.im, y.im);
            im.add_product(sign * x.re, y.im);
            im.add_product(sign * x.im, y.re);
        };
        for c in 0..2 {
            for d in 0..2 {
                accumulate(m[(row, col)], m[(idx(c, d), idx(c, d))], 1.0);
                accumulate(m[(idx(a, c), idx(a2, c))], m[(idx(d, b), idx(d, b2))], -1.0);
            }
        }
        Complex64::new(re.value(), im.value())
    })
}

/// `a_m = Tr[ρ σ_m⊗I]`, `b_n = Tr[ρ I⊗σ_n]`, `T_mn = Tr[ρ σ_m⊗σ_n]`.
pub fn pauli_decompose(rho: &TwoQubitDensity) -> PauliForm {
    let s = pauli();
    let m = rho.entries();
    let rho_a = rho.reduced_a();
    let rho_b = rho.reduced_b();
    let a = bloch_of(&rho_a);
    let b = bloch_of(&rho_b);
    let correlated = connected_part(m);
    let t = Mat3::from_fn(|i, j| trace_product(m, &kron(&s[i], &s[j])).re);
    let connected = Mat3::from_fn(|i, j| trace_product(&correlated, &kron(&s[i], &s[j])).re);
    PauliForm {
        a,
        b,
        t,
        connected,
        impurity_a: 4.0 * det2(&rho_a),
        impurity_b: 4.0 * det2(&rho_b),
    }
}

/// Mixing weight and entanglement angle of the initial family
/// `p|ψ(θ)⟩⟨ψ(θ)| + (1 − p) ρ_A ⊗ I/2`, `|ψ(θ)⟩ = cos θ|gg⟩ + sin θ|ee⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialFamilyParams {
    p: f64,
    theta: f64,
}

impl InitialFamilyParams {
    /// Accepts the closed ranges `p ∈ [0, 1]`, `θ ∈ [0, π/2]`.
    pub fn new(p: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain("p", p, "mixing weight must lie in [0, 1]"));
        }
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(domain("theta", theta, "entanglement angle must lie in [0, pi/2]"));
        }
        Ok(InitialFamilyParams { p, theta })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `r = p cos 2θ − 1`, negative except at `p = 1, θ = 0`.
    pub fn r(&self) -> f64 {
        self.p * (2.0 * self.theta).cos() - 1.0
    }
}

/// The initial state of the family.
pub fn from_initial_family(params: InitialFamilyParams) -> TwoQubitDensity {
    let (s, c) = params.theta.sin_cos();
    let p = params.p;
    let psi = TwoQubitDensity::from_pure([Complex64::from(c), ZERO, ZERO, Complex64::from(s)]);
    let rho_a = Matrix2::new(Complex64::from(c * c), ZERO, ZERO, Complex64::from(s * s));
    let noise = kron(&rho_a, &(Matrix2::identity() * Complex64::new(0.5, 0.0)));
    TwoQubitDensity::from_matrix(psi.entries * Complex64::from(p) + noise * Complex64::from(1.0 - p))
}
