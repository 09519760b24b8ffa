//! Quantum steering ellipsoids.
//!
//! When Alice applies a POVM element `e₀(I + e·σ)` to her qubit, Bob is
//! steered to the Bloch vector `(b + Tᵀe)/(1 + a·e)`. Over all `|e| ≤ 1`
//! these vectors fill Bob's steering ellipsoid, with center
//! `(b − Tᵀa)/(1 − |a|²)` and matrix
//! `Q_B = (Tᵀ − b aᵀ)(I + a aᵀ/(1 − |a|²))(T − a bᵀ)/(1 − |a|²)`, whose
//! eigenvalues are the squared semiaxes. Alice's ellipsoid is the mirror image.
//!
//! Everything is evaluated through the connected correlations `T − a bᵀ` and
//! the impurity `1 − |a|²` carried by [`PauliForm`], so nearly-pure marginals
//! do not lose precision.

use nalgebra::SymmetricEigen;

use crate::error::{domain, Error, Result};
use crate::state::{hermitian_eigenvalues, Mat3, PauliForm, TwoQubitDensity, Vec3};

/// Impurity `1 − |x|²` at or below which a steering party's marginal counts as
/// pure. Below it the steered states all coincide with the partner's marginal.
pub const PURE_MARGINAL_FLOOR: f64 = 1e-15;

/// Negative eigenvalues of `Q` down to this magnitude are numerical noise.
const EIGEN_CLAMP: f64 = 1e-12;

/// Semiaxes closer than this are treated as tied when choosing axes.
const TIE_TOL: f64 = 1e-9;

/// Partial-transpose eigenvalue threshold for separability.
pub const PPT_TOL: f64 = -1e-10;

/// One of the two parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Party::Alice => "A",
            Party::Bob => "B",
        }
    }
}

/// A steering ellipsoid inside the Bloch ball.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringEllipsoid {
    pub center: Vec3,
    /// Semiaxis lengths, descending.
    pub semiaxes: Vec3,
    /// Orthonormal columns; column `i` is the direction of `semiaxes[i]`.
    pub axes: Mat3,
    /// Set when the steering party's marginal is pure and the ellipsoid
    /// collapses to the steered party's marginal.
    pub degenerate: bool,
}

impl SteeringEllipsoid {
    /// An ellipsoid collapsed to a single point.
    pub fn point(center: Vec3) -> Self {
        SteeringEllipsoid {
            center,
            semiaxes: Vec3::zeros(),
            axes: Mat3::identity(),
            degenerate: true,
        }
    }

    /// Builds an ellipsoid from a symmetric, positive semidefinite matrix.
    /// Axes in tied eigenspaces are chosen as close as possible to
    /// `reference` (coordinate axes when `None`).
    pub fn from_matrix(center: Vec3, q: &Mat3, reference: Option<&Mat3>) -> Self {
        let eig = SymmetricEigen::new(*q);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let semiaxes = Vec3::from_fn(|i, _| {
            let l = eig.eigenvalues[order[i]];
            debug_assert!(l >= -EIGEN_CLAMP || !l.is_finite() || l > -1e-8, "negative ellipsoid eigenvalue {l}");
            l.max(0.0).sqrt()
        });
        let axes = Mat3::from_fn(|r, c| eig.eigenvectors[(r, order[c])]);
        let mut ell = SteeringEllipsoid {
            center,
            semiaxes,
            axes,
            degenerate: false,
        };
        ell.align_axes(reference.unwrap_or(&Mat3::identity()));
        ell
    }

    /// Re-chooses the axes inside tied eigenspaces to follow `reference`
    /// and flips each axis sign to agree with it. Semiaxes are untouched.
    pub fn align_axes(&mut self, reference: &Mat3) {
        let mut start = 0;
        while start < 3 {
            let mut end = start + 1;
            while end < 3 && (self.semiaxes[start] - self.semiaxes[end]).abs() <= TIE_TOL {
                end += 1;
            }
            if end - start > 1 {
                self.realign_cluster(start, end, reference);
            }
            start = end;
        }
        for c in 0..3 {
            let col = self.axes.column(c).into_owned();
            let best = (0..3)
                .max_by(|&i, &j| {
                    col.dot(&reference.column(i))
                        .abs()
                        .total_cmp(&col.dot(&reference.column(j)).abs())
                })
                .unwrap();
            if col.dot(&reference.column(best)) < 0.0 {
                self.axes.set_column(c, &(-col));
            }
        }
    }

    fn realign_cluster(&mut self, start: usize, end: usize, reference: &Mat3) {
        let mut basis: Vec<Vec3> = (start..end).map(|c| self.axes.column(c).into_owned()).collect();
        let mut chosen: Vec<(usize, Vec3)> = Vec::new();
        let mut used = [false; 3];
        for _ in start..end {
            let project = |v: &Vec3, basis: &[Vec3]| basis.iter().map(|u| u * u.dot(v)).sum::<Vec3>();
            let mut best: Option<(usize, Vec3)> = None;
            for (i, seen) in used.iter().enumerate() {
                if *seen {
                    continue;
                }
                let p = project(&reference.column(i).into_owned(), &basis);
                if best.as_ref().is_none_or(|(_, b)| p.norm() > b.norm()) {
                    best = Some((i, p));
                }
            }
            let (i, p) = best.unwrap();
            used[i] = true;
            let v = if p.norm() > 1e-8 { p.normalize() } else { basis[0] };
            // Remove v from the remaining subspace.
            let mut rest: Vec<Vec3> = Vec::new();
            for u in &basis {
                let mut w = u - v * v.dot(u);
                for r in &rest {
                    w -= r * r.dot(&w);
                }
                if w.norm() > 1e-8 {
                    rest.push(w.normalize());
                }
            }
            basis = rest;
            chosen.push((i, v));
        }
        chosen.sort_by_key(|(i, _)| *i);
        for (k, (_, v)) in chosen.into_iter().enumerate() {
            self.axes.set_column(start + k, &v);
        }
    }

    /// Coordinates of `point` in the ellipsoid frame, `axesᵀ(point − center)`.
    pub fn frame_coordinates(&self, point: &Vec3) -> Vec3 {
        self.axes.transpose() * (point - self.center)
    }

    /// `Σ (y_i / l_i)²` over axes longer than `collapse_floor`, together with
    /// the largest `|y_i|` along the collapsed axes.
    pub fn normalized_radius(&self, point: &Vec3, collapse_floor: f64) -> (f64, f64) {
        let y = self.frame_coordinates(point);
        let mut radius = 0.0;
        let mut off_axis: f64 = 0.0;
        for i in 0..3 {
            if self.semiaxes[i] > collapse_floor {
                radius += (y[i] / self.semiaxes[i]).powi(2);
            } else {
                off_axis = off_axis.max(y[i].abs());
            }
        }
        (radius, off_axis)
    }

    /// Maps a unit vector `u` to the surface point `center + axes·diag(l)·u`.
    pub fn surface_point(&self, u: &Vec3) -> Vec3 {
        self.center + self.axes * self.semiaxes.component_mul(u)
    }

    /// The ellipsoid matrix `axes·diag(l²)·axesᵀ`.
    pub fn matrix(&self) -> Mat3 {
        self.axes * Mat3::from_diagonal(&self.semiaxes.map(|l| l * l)) * self.axes.transpose()
    }
}

/// Bob's steering ellipsoid, generated by Alice's measurements.
pub fn ellipsoid_of_b(pf: &PauliForm) -> SteeringEllipsoid {
    ellipsoid_of_b_aligned(pf, None)
}

/// Alice's steering ellipsoid, generated by Bob's measurements.
pub fn ellipsoid_of_a(pf: &PauliForm) -> SteeringEllipsoid {
    ellipsoid_of_b_aligned(&pf.swapped(), None)
}

/// The steering ellipsoid of `party`, with tied axes following `reference`.
pub fn ellipsoid_of(pf: &PauliForm, party: Party, reference: Option<&Mat3>) -> SteeringEllipsoid {
    match party {
        Party::Alice => ellipsoid_of_b_aligned(&pf.swapped(), reference),
        Party::Bob => ellipsoid_of_b_aligned(pf, reference),
    }
}

fn ellipsoid_of_b_aligned(pf: &PauliForm, reference: Option<&Mat3>) -> SteeringEllipsoid {
    let impurity = pf.impurity_a();
    if impurity <= PURE_MARGINAL_FLOOR {
        return SteeringEllipsoid::point(*pf.b());
    }
    let c = pf.connected();
    let ct_a = c.transpose() * pf.a();
    let center = pf.b() - ct_a / impurity;
    let q = (c.transpose() * c) / impurity + (ct_a * ct_a.transpose()) / (impurity * impurity);
    let q = (q + q.transpose()) * 0.5;
    SteeringEllipsoid::from_matrix(center, &q, reference)
}

/// The Bloch vector the partner is steered to when `measuring` applies the
/// POVM element with direction `e`.
pub fn steered_bloch(pf: &PauliForm, e: &Vec3, measuring: Party) -> Result<Vec3> {
    if e.norm() > 1.0 + 1e-12 {
        return Err(domain("e", e.norm(), "POVM direction must lie in the unit ball"));
    }
    let pf = match measuring {
        Party::Alice => pf.clone(),
        Party::Bob => pf.swapped(),
    };
    let denominator = 1.0 + pf.a().dot(e);
    if denominator <= 1e-12 {
        return Err(Error::SingularMeasurement { denominator });
    }
    // (b + Tᵀe)/(1 + a·e) = b + (T − a bᵀ)ᵀ e / (1 + a·e)
    Ok(pf.b() + pf.connected().transpose() * e / denominator)
}

/// Separability verdict from the partial-transpose test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptVerdict {
    pub separable: bool,
    pub min_eigenvalue: f64,
}

/// Two-qubit separability via positivity of the partial transpose, which for
/// two qubits is equivalent to enclosing the steering ellipsoid in a
/// tetrahedron inscribed in the Bloch sphere.
pub fn is_separable(rho: &TwoQubitDensity) -> PptVerdict {
    let min_eigenvalue = hermitian_eigenvalues(&rho.partial_transpose_b())[0];
    PptVerdict {
        separable: min_eigenvalue >= PPT_TOL,
        min_eigenvalue,
    }
}
