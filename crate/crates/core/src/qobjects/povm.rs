use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Angle;
use crate::error::{Error, Result};
use crate::matkernel::{c, eigh, null_space_default, singular_values, trace_norm, CMat, C64};
use crate::tol::{PSD_TOL, RANK_ONE_TOL};

/// Azimuthal phases `δ₂, δ₃, δ₄` of the adjusted tetrahedral POVM.
pub const TETRAHEDRAL_PHASES: [f64; 3] = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];

/// A POVM as an ordered list of elements, optionally with rank-one kets
/// (`element = |k><k|`, kets subnormalized).
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<CMat>,
    kets: Option<Vec<Vec<C64>>>,
}

/// Multiplies `v` by the phase that makes its first nonzero amplitude real positive.
pub fn fix_global_phase(v: &mut [C64]) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-14).copied() {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// `√weight` times the pure qubit state with Bloch vector `n` (unit length).
pub fn bloch_ket(weight: f64, n: [f64; 3]) -> Vec<C64> {
    let [nx, ny, nz] = n;
    let r = weight.sqrt();
    let polar = nz.clamp(-1.0, 1.0).acos();
    let rho = nx.hypot(ny);
    // e^{iφ} = (nx + i ny)/ρ, kept exactly real when ny = 0
    let phase = if rho > 0.0 {
        c(nx / rho, ny / rho)
    } else {
        c(1.0, 0.0)
    };
    let mut v = vec![
        c(r * (polar / 2.0).cos(), 0.0),
        phase * (r * (polar / 2.0).sin()),
    ];
    fix_global_phase(&mut v);
    v
}

impl Povm {
    /// Elements are taken as given; use [`povm_validity`] to check them.
    pub fn new(elements: Vec<CMat>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidPovm("no elements".into()));
        };
        let d = first.rows();
        if elements.iter().any(|e| !e.is_square() || e.rows() != d) {
            return Err(Error::Dimension("POVM elements differ in size".into()));
        }
        Ok(Povm {
            elements,
            kets: None,
        })
    }

    /// Rank-one POVM `{|k_a><k_a|}`; ket phases are normalized.
    pub fn from_kets(kets: Vec<Vec<C64>>) -> Result<Self> {
        let mut kets = kets;
        for k in kets.iter_mut() {
            fix_global_phase(k);
        }
        let elements = kets.iter().map(|k| CMat::projector(k)).collect();
        let mut p = Povm::new(elements)?;
        p.kets = Some(kets);
        Ok(p)
    }

    /// Attaches kets after checking `|k><k|` against each element within 1e-10.
    pub fn with_kets(mut self, kets: Vec<Vec<C64>>) -> Result<Self> {
        if kets.len() != self.elements.len() {
            return Err(Error::InvalidPovm(
                "ket count differs from element count".into(),
            ));
        }
        let mut kets = kets;
        for (a, (k, e)) in kets.iter_mut().zip(&self.elements).enumerate() {
            if k.len() != e.rows() {
                return Err(Error::Dimension(format!("ket {a} has wrong length")));
            }
            let r = CMat::projector(k).max_abs_diff(e);
            if r > PSD_TOL {
                return Err(Error::Constraint {
                    what: format!("ket {a} reproduces its element"),
                    residual: r,
                });
            }
            fix_global_phase(k);
        }
        self.kets = Some(kets);
        Ok(self)
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn stored_kets(&self) -> Option<&[Vec<C64>]> {
        self.kets.as_deref()
    }

    /// Rank-one kets: the stored ones, or extracted from the top eigenvector of
    /// each element. Fails if any element has a second eigenvalue above 1e-9.
    pub fn kets(&self) -> Result<Vec<Vec<C64>>> {
        if let Some(k) = &self.kets {
            return Ok(k.clone());
        }
        self.elements
            .iter()
            .enumerate()
            .map(|(a, e)| {
                let eg = eigh(e)?;
                let second = eg.values.get(1).copied().unwrap_or(0.0);
                if second.abs() > RANK_ONE_TOL {
                    return Err(Error::NotRankOne {
                        outcome: a,
                        second_eigenvalue: second,
                    });
                }
                let w = eg.values[0].max(0.0).sqrt();
                let mut v: Vec<C64> = eg.vector(0).into_iter().map(|z| z * w).collect();
                fix_global_phase(&mut v);
                Ok(v)
            })
            .collect()
    }

    /// Outcome probabilities `Tr[E_a ρ]`.
    pub fn probabilities(&self, rho: &CMat) -> Vec<f64> {
        self.elements.iter().map(|e| e.expect(rho)).collect()
    }

    pub fn sum(&self) -> CMat {
        let mut s = CMat::zeros(self.dim(), self.dim());
        for e in &self.elements {
            s += e;
        }
        s
    }
}

/// Positivity and completeness residuals of a POVM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub is_valid: bool,
    /// `max(0, -λ_min)` over all elements.
    pub max_psd_violation: f64,
    /// `‖Σ_a E_a - I‖₁ / d`.
    pub completeness_residual: f64,
}

pub fn povm_validity(p: &Povm) -> ValidityReport {
    let mut psd: f64 = 0.0;
    let mut hermitian = true;
    for e in p.elements() {
        match eigh(e) {
            Ok(eg) => psd = psd.max(-eg.values.last().copied().unwrap_or(0.0)),
            Err(_) => hermitian = false,
        }
    }
    let d = p.dim();
    let completeness = trace_norm(&(p.sum() - CMat::identity(d))) / d as f64;
    ValidityReport {
        is_valid: hermitian && psd <= PSD_TOL && completeness <= PSD_TOL,
        max_psd_violation: psd.max(0.0),
        completeness_residual: completeness,
    }
}

/// Operational extremality criteria for qubit POVMs: rank-one, linearly
/// independent elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub all_rank_one: bool,
    pub linearly_independent: bool,
    pub is_extremal_candidate: bool,
    /// Second-largest eigenvalue of each element.
    pub second_eigenvalues: Vec<f64>,
    /// Smallest singular value of the flattened elements; the distance from
    /// linear dependence.
    pub independence_margin: f64,
}

pub fn povm_extremality(p: &Povm) -> ExtremalityReport {
    let second_eigenvalues: Vec<f64> = p
        .elements()
        .iter()
        .map(|e| {
            eigh(e)
                .map(|eg| eg.values.get(1).copied().unwrap_or(0.0))
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    let all_rank_one = second_eigenvalues.iter().all(|s| s.abs() <= RANK_ONE_TOL);
    let linearly_independent = null_space_default(p.elements())
        .map(|ns| ns.is_empty())
        .unwrap_or(false);

    let d = p.dim();
    let flat = CMat::from_vec(
        d * d,
        p.len(),
        (0..d * d)
            .flat_map(|r| p.elements().iter().map(move |e| e.as_slice()[r]))
            .collect(),
    )
    .expect("consistent shape");
    let sv = singular_values(&flat);
    let independence_margin = if p.len() > d * d {
        0.0
    } else {
        sv.last().copied().unwrap_or(0.0)
    };

    ExtremalityReport {
        all_rank_one,
        linearly_independent,
        is_extremal_candidate: all_rank_one && linearly_independent && povm_validity(p).is_valid,
        second_eigenvalues,
        independence_margin,
    }
}

/// Four-outcome POVM giving uniform outcomes on Alice's marginal of `ψ_θ`.
pub fn adjusted_tetrahedral(theta: Angle) -> Povm {
    adjusted_tetrahedral_with_phases(theta, TETRAHEDRAL_PHASES)
}

/// As [`adjusted_tetrahedral`], with the azimuthal phases `δ₂, δ₃, δ₄` given explicitly.
/// The phases must have vanishing `Σ e^{iδ}` for the result to be complete.
pub fn adjusted_tetrahedral_with_phases(theta: Angle, phases: [f64; 3]) -> Povm {
    let ct = theta.cos();
    let w1 = 1.0 / (2.0 + 2.0 * ct);
    let wa = (3.0 + 4.0 * ct) / (6.0 + 6.0 * ct);
    let cos_g = -1.0 / (3.0 + 4.0 * ct);
    let sin_g = (1.0 - cos_g * cos_g).sqrt();
    let mut kets = vec![bloch_ket(w1, [0.0, 0.0, 1.0])];
    for d in phases {
        kets.push(bloch_ket(wa, [sin_g * d.cos(), sin_g * d.sin(), cos_g]));
    }
    Povm::from_kets(kets).expect("non-empty")
}

/// Three-outcome POVM in the X-Z plane giving uniform outcomes on Bob's marginal of `ψ_θ`.
pub fn modified_mercedes(theta: Angle) -> Povm {
    let ct = theta.cos();
    let w1 = 2.0 / (3.0 + 3.0 * ct);
    let w23 = (2.0 + 3.0 * ct) / (3.0 + 3.0 * ct);
    let mu = 1.0 / (2.0 + 3.0 * ct);
    let s = (1.0 - mu * mu).sqrt();
    Povm::from_kets(vec![
        bloch_ket(w1, [0.0, 0.0, 1.0]),
        bloch_ket(w23, [s, 0.0, -mu]),
        bloch_ket(w23, [-s, 0.0, -mu]),
    ])
    .expect("non-empty")
}

pub(crate) fn near_y_kets(epsilon: f64) -> Vec<Vec<C64>> {
    let y = (1.0 - epsilon * epsilon).sqrt();
    vec![
        bloch_ket(0.5, [0.0, y, epsilon]),
        bloch_ket(0.5, [0.0, y, -epsilon]),
        bloch_ket(0.5, [epsilon, -y, 0.0]),
        bloch_ket(0.5, [-epsilon, -y, 0.0]),
    ]
}

/// Four-outcome POVM whose Bloch vectors sit within `ε` of `±Y`.
/// Extremal for every `ε ∈ (0, 1)`; `ε = 0` collapses pairs of elements and is rejected.
pub fn near_y_tetrahedral(epsilon: f64) -> Result<Povm> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    Povm::from_kets(near_y_kets(epsilon))
}

/// Entrywise complex conjugate of every element (and ket).
pub fn conjugate_povm(p: &Povm) -> Povm {
    let elements = p.elements.iter().map(CMat::conj).collect();
    let kets = p.kets.as_ref().map(|ks| {
        ks.iter()
            .map(|k| {
                let mut v: Vec<C64> = k.iter().map(|z| z.conj()).collect();
                fix_global_phase(&mut v);
                v
            })
            .collect()
    });
    Povm { elements, kets }
}

/// Bloch-form element check used by tests: `(w/2)(I + n·σ)`.
#[cfg(test)]
pub(crate) fn element_from_bloch(w: f64, n: [f64; 3]) -> CMat {
    crate::paulis::bloch_element(w, n)
}
