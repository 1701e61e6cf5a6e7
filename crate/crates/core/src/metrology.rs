//! Quantum Fisher information for the two phases `(phi1, phi2)` and the
//! total-variance bounds derived from it.
//!
//! The QFIM is evaluated in the eigenbasis of `rho` as
//! `F_ab = sum_{i,j} 2 Re(<i|d_a rho|j><j|d_b rho|i>) / (l_i + l_j)`, summed
//! over pairs with `l_i + l_j` above the support cutoff. This form needs no
//! eigenvector derivatives and does not depend on the basis chosen inside a
//! degenerate eigenspace.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::teleport::{teleport_operator, InputState};
use crate::tensor::{dagger, hermitian_eig, ComplexMatrix, C64};

/// Central-difference step in radians.
pub const FD_STEP: f64 = 1e-6;
/// Eigenvalues below this are treated as outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-10;
/// Hermiticity required of a finite-difference derivative.
pub const DERIVATIVE_HERMITIAN_TOL: f64 = 1e-9;
/// `bounds` refuses a QFIM whose determinant is at or below this.
pub const SINGULAR_DET: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Phi1,
    Phi2,
}

impl Phase {
    pub const BOTH: [Phase; 2] = [Phase::Phi1, Phase::Phi2];

    /// Basis level whose phase this parameter controls.
    pub fn level(self) -> usize {
        match self {
            Phase::Phi1 => 1,
            Phase::Phi2 => 2,
        }
    }
}

/// A smooth map `(phi1, phi2) -> rho` evaluated around a base point.
pub trait PhaseFamily {
    fn base_point(&self) -> (f64, f64);

    fn rho_at(&self, phi1: f64, phi2: f64) -> ComplexMatrix;

    /// Exact `d rho / d phi` at the base point, when the family knows it.
    fn analytic_derivative(&self, _which: Phase) -> Option<ComplexMatrix> {
        None
    }

    fn rho(&self) -> ComplexMatrix {
        let (a, b) = self.base_point();
        self.rho_at(a, b)
    }
}

/// A family given by a closure.
pub struct FnFamily<F> {
    f: F,
    base: (f64, f64),
}

impl<F: Fn(f64, f64) -> ComplexMatrix> FnFamily<F> {
    pub fn new(f: F, base: (f64, f64)) -> Self {
        Self { f, base }
    }
}

impl<F: Fn(f64, f64) -> ComplexMatrix> PhaseFamily for FnFamily<F> {
    fn base_point(&self) -> (f64, f64) {
        self.base
    }

    fn rho_at(&self, phi1: f64, phi2: f64) -> ComplexMatrix {
        (self.f)(phi1, phi2)
    }
}

/// `rho(phi) = U(phi - base) rho_base U^dagger` with `U = diag(1, e^{i phi1}, e^{i phi2})`.
///
/// Every closed-form output state has this structure, so its derivative is
/// the commutator `i [N_a, rho]` with `N_a = |a><a|`.
#[derive(Debug, Clone)]
pub struct CovariantFamily {
    rho_base: ComplexMatrix,
    base: (f64, f64),
}

impl CovariantFamily {
    pub fn new(rho_base: ComplexMatrix, base: (f64, f64)) -> Self {
        assert_eq!(rho_base.dim(), 3, "phase families act on a qutrit");
        Self { rho_base, base }
    }
}

fn phase_rotation(phi1: f64, phi2: f64) -> ComplexMatrix {
    ComplexMatrix::diag(&[
        C64::new(1.0, 0.0),
        C64::from_polar(1.0, phi1),
        C64::from_polar(1.0, phi2),
    ])
}

impl PhaseFamily for CovariantFamily {
    fn base_point(&self) -> (f64, f64) {
        self.base
    }

    fn rho_at(&self, phi1: f64, phi2: f64) -> ComplexMatrix {
        self.rho_base
            .conjugate_by(&phase_rotation(phi1 - self.base.0, phi2 - self.base.1))
    }

    fn analytic_derivative(&self, which: Phase) -> Option<ComplexMatrix> {
        let a = which.level();
        let rho = &self.rho_base;
        Some(ComplexMatrix::from_fn(3, |j, k| {
            let weight = (j == a) as i32 - (k == a) as i32;
            rho[(j, k)] * C64::new(0.0, weight as f64)
        }))
    }

    fn rho(&self) -> ComplexMatrix {
        self.rho_base.clone()
    }
}

/// Teleports the phase-encoded input through a fixed resource.
#[derive(Debug, Clone)]
pub struct TeleportedFamily {
    input: InputState,
    resource: DensityMatrix,
}

impl TeleportedFamily {
    pub fn new(input: InputState, resource: DensityMatrix) -> Self {
        Self { input, resource }
    }
}

impl PhaseFamily for TeleportedFamily {
    fn base_point(&self) -> (f64, f64) {
        self.input.phases()
    }

    fn rho_at(&self, phi1: f64, phi2: f64) -> ComplexMatrix {
        let input = self.input.with_phases(phi1, phi2);
        teleport_operator(&input.projector(), &self.resource)
            .expect("qutrit input and 9x9 resource")
    }
}

/// Central finite difference of the family at its base point.
pub fn d_rho(family: &dyn PhaseFamily, which: Phase) -> Result<ComplexMatrix> {
    let (phi1, phi2) = family.base_point();
    let (plus, minus) = match which {
        Phase::Phi1 => (
            family.rho_at(phi1 + FD_STEP, phi2),
            family.rho_at(phi1 - FD_STEP, phi2),
        ),
        Phase::Phi2 => (
            family.rho_at(phi1, phi2 + FD_STEP),
            family.rho_at(phi1, phi2 - FD_STEP),
        ),
    };
    let derivative = (&plus - &minus).scale(0.5 / FD_STEP);
    let violation = derivative.hermiticity_violation();
    if violation > DERIVATIVE_HERMITIAN_TOL {
        return Err(Error::NotHermitian { violation });
    }
    Ok(derivative)
}

fn derivative(family: &dyn PhaseFamily, which: Phase) -> Result<ComplexMatrix> {
    match family.analytic_derivative(which) {
        Some(d) => Ok(d),
        None => d_rho(family, which),
    }
}

/// Two-parameter quantum Fisher information matrix (units 1/rad^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qfim2 {
    pub f11: f64,
    pub f12: f64,
    pub f21: f64,
    pub f22: f64,
}

impl Qfim2 {
    pub fn new(f11: f64, f12: f64, f21: f64, f22: f64) -> Self {
        Self { f11, f12, f21, f22 }
    }

    pub fn det(&self) -> f64 {
        self.f11 * self.f22 - self.f12 * self.f21
    }

    pub fn asymmetry(&self) -> f64 {
        (self.f12 - self.f21).abs()
    }

    /// Smaller eigenvalue of the symmetrized matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let off = 0.5 * (self.f12 + self.f21);
        let mean = 0.5 * (self.f11 + self.f22);
        let half_gap = (0.25 * (self.f11 - self.f22).powi(2) + off * off).sqrt();
        mean - half_gap
    }

    pub fn max_abs_diff(&self, other: &Qfim2) -> f64 {
        [
            self.f11 - other.f11,
            self.f12 - other.f12,
            self.f21 - other.f21,
            self.f22 - other.f22,
        ]
        .iter()
        .fold(0.0, |acc: f64, x| acc.max(x.abs()))
    }
}

/// QFIM of the family at its base point.
pub fn qfim(family: &dyn PhaseFamily) -> Result<Qfim2> {
    let rho = family.rho();
    let es = hermitian_eig(&rho)?;
    let v = es.vectors_as_columns();
    let vd = dagger(&v);
    let d1 = &(&vd * &derivative(family, Phase::Phi1)?) * &v;
    let d2 = &(&vd * &derivative(family, Phase::Phi2)?) * &v;

    let lambda: Vec<f64> = es
        .eigenvalues
        .iter()
        .map(|&l| if l < SUPPORT_CUTOFF { 0.0 } else { l })
        .collect();
    let n = rho.dim();
    let mut f = [[0.0f64; 2]; 2];
    for i in 0..n {
        for j in 0..n {
            let denom = lambda[i] + lambda[j];
            if denom < SUPPORT_CUTOFF {
                continue;
            }
            let mats = [&d1, &d2];
            for a in 0..2 {
                for b in 0..2 {
                    f[a][b] += 2.0 * (mats[a][(i, j)] * mats[b][(j, i)]).re / denom;
                }
            }
        }
    }
    Ok(Qfim2::new(f[0][0], f[0][1], f[1][0], f[1][1]))
}

/// Total-variance bounds for two parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    /// Sum of inverse diagonal entries.
    pub delta_ind: f64,
    /// Trace of the inverse.
    pub delta_sim: f64,
    /// `delta_ind / (delta_sim / 2)`
    pub ratio_r: f64,
}

pub fn bounds(f: &Qfim2) -> Result<BoundsReport> {
    let det = f.det();
    if !(det > SINGULAR_DET) {
        return Err(Error::BoundDiverges { det });
    }
    let delta_ind = 1.0 / f.f11 + 1.0 / f.f22;
    let delta_sim = (f.f11 + f.f22) / det;
    Ok(BoundsReport {
        delta_ind,
        delta_sim,
        ratio_r: delta_ind / (delta_sim / 2.0),
    })
}
