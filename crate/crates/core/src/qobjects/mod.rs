//! States, ±1-valued observables, POVMs and the specific constructions used by
//! the Bell test: the partially entangled state `ψ_θ`, the ideal measurements
//! that attain the Bell values, and the extremal qubit POVMs that generate
//! randomness.

mod ideal;
mod povm;

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{eigh, kron, partial_trace, permute_subsystems, CMat, SubsystemShape, C64};
use crate::tol::{HERM_TOL, PSD_TOL};

pub use ideal::{
    beta_of_theta, full_state, ideal_b7, ideal_measurements, ideal_measurements_with, phi_theta,
    phi_theta_ket, psi_theta, psi_theta_ket, psi_theta_pauli, theta_from_beta, AncillaRealization,
    IdealMeasurements,
};
pub use povm::{
    adjusted_tetrahedral, adjusted_tetrahedral_with_phases, bloch_ket, conjugate_povm,
    fix_global_phase, modified_mercedes, near_y_tetrahedral, povm_extremality, povm_validity,
    ExtremalityReport, Povm, ValidityReport, TETRAHEDRAL_PHASES,
};

/// Schmidt angle of `ψ_θ`, restricted to `(0, π/2]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta <= 0.0 || theta > FRAC_PI_2 + 1e-12 {
            return Err(Error::AngleOutOfRange(theta));
        }
        Ok(Angle(theta.min(FRAC_PI_2)))
    }

    /// The maximally entangled case `θ = π/2`.
    pub fn max_entangled() -> Self {
        Angle(FRAC_PI_2)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn beta(self) -> f64 {
        beta_of_theta(self)
    }

    /// `n` points evenly spaced over `(lo, π/2]`, ending at π/2 and excluding `lo`.
    pub fn grid(lo: f64, n: usize) -> Vec<Angle> {
        (1..=n)
            .map(|k| {
                let t = if k == n {
                    FRAC_PI_2
                } else {
                    lo + (FRAC_PI_2 - lo) * k as f64 / n as f64
                };
                Angle(t)
            })
            .collect()
    }
}

impl TryFrom<f64> for Angle {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Angle::new(v)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

/// A density operator together with its tensor-factor layout.
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    rho: CMat,
    shape: SubsystemShape,
}

impl QState {
    /// Validates Hermiticity, positivity (eigenvalues ≥ -1e-10) and unit trace.
    pub fn new(rho: CMat, shape: SubsystemShape) -> Result<Self> {
        if !rho.is_square() || rho.rows() != shape.total() {
            return Err(Error::Dimension(format!(
                "state of size {}x{} with shape {:?}",
                rho.rows(),
                rho.cols(),
                shape.dims
            )));
        }
        let dev = rho.hermitian_deviation();
        if dev > HERM_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > PSD_TOL || tr.im.abs() > PSD_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min_eig = *eigh(&rho)?.values.last().expect("non-empty");
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(QState { rho, shape })
    }

    /// Pure state `|v><v|`; `v` is normalized first.
    pub fn pure(v: &[C64], shape: SubsystemShape) -> Result<Self> {
        let n = crate::matkernel::ket_norm(v);
        if n == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let unit: Vec<C64> = v.iter().map(|z| z / n).collect();
        QState::new(CMat::projector(&unit), shape)
    }

    pub fn rho(&self) -> &CMat {
        &self.rho
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    /// `Tr[op · ρ]` (real part).
    pub fn expect(&self, op: &CMat) -> f64 {
        op.expect(&self.rho)
    }

    /// `ρ ⊗ σ` with concatenated shapes.
    pub fn tensor(&self, other: &QState) -> QState {
        QState {
            rho: kron(&self.rho, &other.rho),
            shape: self.shape.concat(&other.shape),
        }
    }

    /// Reduced state on the subsystems at positions `keep`.
    pub fn marginal(&self, keep: &[usize]) -> Result<QState> {
        let rho = partial_trace(&self.rho, &self.shape, keep)?;
        let mut k = keep.to_vec();
        k.sort_unstable();
        let shape = SubsystemShape {
            dims: k.iter().map(|&i| self.shape.dims[i]).collect(),
            labels: k.iter().map(|&i| self.shape.labels[i].clone()).collect(),
        };
        Ok(QState { rho, shape })
    }

    pub fn permute(&self, order: &[usize]) -> Result<QState> {
        let (rho, shape) = permute_subsystems(&self.rho, &self.shape, order)?;
        Ok(QState { rho, shape })
    }

    /// Smallest eigenvalue, used for full-rank checks.
    pub fn min_eigenvalue(&self) -> f64 {
        *eigh(&self.rho)
            .expect("validated Hermitian")
            .values
            .last()
            .expect("non-empty")
    }
}

/// A Hermitian observable with `O² = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dichotomic {
    op: CMat,
    label: String,
}

impl Dichotomic {
    pub fn new(op: CMat, label: impl Into<String>) -> Result<Self> {
        if !op.is_square() {
            return Err(Error::Dimension("observable must be square".into()));
        }
        let dev = op.hermitian_deviation();
        if dev > HERM_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let sq = op.matmul(&op).max_abs_diff(&CMat::identity(op.rows()));
        if sq > PSD_TOL {
            return Err(Error::Constraint {
                what: "O² = I".into(),
                residual: sq,
            });
        }
        Ok(Dichotomic {
            op,
            label: label.into(),
        })
    }

    pub fn op(&self) -> &CMat {
        &self.op
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.op.rows()
    }

    /// Projector onto the `±1` eigenspace: `(I ± O)/2`.
    pub fn projector(&self, sign: f64) -> CMat {
        (CMat::identity(self.dim()) + self.op.scale_real(sign)).scale_real(0.5)
    }
}
