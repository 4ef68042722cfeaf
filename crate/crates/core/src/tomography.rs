//! Reconstruction of qubit POVMs from their correlations with Pauli settings on
//! `ψ_θ`, and the dilations those correlations cannot rule out.
//!
//! Correlations are `E_{aν} = <α_a ⊗ σ_ν>` for `ν ∈ (I, X, Y, Z)`. Writing
//! `α_a = Σ_μ r_{aμ} σ_μ` gives `E_a = η r_a` with `η_{μν} = <σ_μ ⊗ σ_ν>`,
//! which is invertible for every `θ > 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{c, kron, null_space, partial_trace, CMat, SubsystemShape, C64};
use crate::paulis;
use crate::qobjects::{psi_theta, Angle, Povm};
use crate::tol::{MAX_ETA_CONDITION, NULL_SPACE_TOL};

/// `η_{μν} = <σ_μ ⊗ σ_ν>` on `ψ_θ`, index order `(I, X, Y, Z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaMatrix {
    pub theta: Angle,
    pub entries: [[f64; 4]; 4],
}

impl EtaMatrix {
    pub fn new(theta: Angle) -> Self {
        let (ct, st) = (theta.cos(), theta.sin());
        let mut e = [[0.0; 4]; 4];
        e[0][0] = 1.0;
        e[3][3] = 1.0;
        e[0][3] = ct;
        e[3][0] = ct;
        e[1][1] = st;
        e[2][2] = -st;
        EtaMatrix { theta, entries: e }
    }

    /// The same matrix from sixteen traces against `ψ_θ`.
    pub fn from_traces(theta: Angle) -> Self {
        let psi = psi_theta(theta);
        let basis = paulis::basis();
        let mut e = [[0.0; 4]; 4];
        for (mu, row) in e.iter_mut().enumerate() {
            for (nu, x) in row.iter_mut().enumerate() {
                *x = psi.expect(&kron(&basis[mu], &basis[nu]));
            }
        }
        EtaMatrix { theta, entries: e }
    }

    pub fn max_abs_diff(&self, other: &EtaMatrix) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Block-diagonal determinant: `(1 - cos²θ)(sinθ)(-sinθ) = -sin⁴θ`.
    pub fn det(&self) -> f64 {
        let e = &self.entries;
        (e[0][0] * e[3][3] - e[0][3] * e[3][0]) * e[1][1] * e[2][2]
    }

    /// 2-norm condition number `(1 + cosθ) / min(1 - cosθ, sinθ)`.
    pub fn condition_number(&self) -> f64 {
        let e = &self.entries;
        let c = e[0][3].abs();
        let sv = [1.0 + c, 1.0 - c, e[1][1].abs(), e[2][2].abs()];
        let max = sv.iter().copied().fold(0.0, f64::max);
        let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// Inverse from the `{I, Z}` 2x2 block and the two scalar blocks.
    pub fn inverse(&self) -> Result<[[f64; 4]; 4]> {
        let kappa = self.condition_number();
        if !kappa.is_finite() || kappa > MAX_ETA_CONDITION {
            return Err(Error::IllConditioned { condition: kappa });
        }
        let e = &self.entries;
        let d = e[0][0] * e[3][3] - e[0][3] * e[3][0];
        let mut inv = [[0.0; 4]; 4];
        inv[0][0] = e[3][3] / d;
        inv[3][3] = e[0][0] / d;
        inv[0][3] = -e[0][3] / d;
        inv[3][0] = -e[3][0] / d;
        inv[1][1] = 1.0 / e[1][1];
        inv[2][2] = 1.0 / e[2][2];
        Ok(inv)
    }

    /// Dual operators `σ^ν = Σ_μ (η⁻¹)_{νμ} σ_μ`, so that `α = Σ_ν E_ν σ^ν`.
    pub fn dual_operators(&self) -> Result<[CMat; 4]> {
        let inv = self.inverse()?;
        let basis = paulis::basis();
        Ok(std::array::from_fn(|nu| {
            let mut m = CMat::zeros(2, 2);
            for (mu, s) in basis.iter().enumerate() {
                if inv[nu][mu] != 0.0 {
                    m += &s.scale_real(inv[nu][mu]);
                }
            }
            m
        }))
    }
}

/// Correlations of one outcome with the settings `(I, X, Y, Z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub outcome: usize,
    /// `<α_a ⊗ σ_ν>`, `ν = I, X, Y, Z`.
    pub values: [f64; 4],
}

/// `<α_a ⊗ σ_ν>_{ψ_θ}` for every outcome of a qubit POVM.
pub fn correlations_from_povm(p: &Povm, theta: Angle) -> Result<Vec<CorrelationRow>> {
    if p.dim() != 2 {
        return Err(Error::Dimension(format!(
            "qubit POVM expected, got dimension {}",
            p.dim()
        )));
    }
    let psi = psi_theta(theta);
    let basis = paulis::basis();
    Ok(p.elements()
        .iter()
        .enumerate()
        .map(|(outcome, e)| CorrelationRow {
            outcome,
            values: std::array::from_fn(|nu| psi.expect(&kron(e, &basis[nu]))),
        })
        .collect())
}

/// Inverts [`correlations_from_povm`]. The result is not checked for validity;
/// non-physical data shows up in `povm_validity`.
pub fn reconstruct_povm(rows: &[CorrelationRow], theta: Angle) -> Result<Povm> {
    let duals = EtaMatrix::new(theta).dual_operators()?;
    let elements = rows
        .iter()
        .map(|r| {
            let mut m = CMat::zeros(2, 2);
            for (e, d) in r.values.iter().zip(&duals) {
                m += &d.scale_real(*e);
            }
            m.hermitian_part()
        })
        .collect();
    Povm::new(elements)
}

/// Off-diagonal operators `|α_a><α*_a|` of a rank-one qubit POVM and the
/// coefficient vectors `λ` with `Σ_a λ_a |α_a><α*_a| = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct OffdiagSet {
    pub operators: Vec<CMat>,
    /// Orthonormal basis of admissible coefficient vectors; empty forces `λ = 0`.
    pub null_basis: Vec<Vec<C64>>,
    /// `max_a |Tr[op_a Y]|`.
    pub y_residual: f64,
}

/// `|α><α*|`, written out as `α αᵀ`.
pub fn offdiag_operator(ket: &[C64]) -> CMat {
    let conj: Vec<C64> = ket.iter().map(|z| z.conj()).collect();
    CMat::outer(ket, &conj)
}

pub fn offdiag_set(p: &Povm) -> Result<OffdiagSet> {
    offdiag_set_with_tol(p, NULL_SPACE_TOL)
}

pub fn offdiag_set_with_tol(p: &Povm, tol: f64) -> Result<OffdiagSet> {
    let kets = p.kets()?;
    let operators: Vec<CMat> = kets.iter().map(|k| offdiag_operator(k)).collect();
    let y = paulis::y();
    let y_residual = operators
        .iter()
        .map(|o| o.trace_product(&y).norm())
        .fold(0.0, f64::max);
    let null_basis = null_space(&operators, tol)?;
    Ok(OffdiagSet {
        operators,
        null_basis,
        y_residual,
    })
}

/// `|±> = (|0> ± |1>)/√2`.
pub fn plus_minus() -> (Vec<C64>, Vec<C64>) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)])
}

/// Dilated elements without any admissibility checks; used to exhibit
/// what goes wrong when the constraints are violated.
pub fn dilated_elements(kets: &[Vec<C64>], coeffs: &[C64]) -> Vec<CMat> {
    let (plus, minus) = plus_minus();
    let pp = CMat::projector(&plus);
    let mm = CMat::projector(&minus);
    let pm = CMat::outer(&plus, &minus);
    let mp = CMat::outer(&minus, &plus);
    kets.iter()
        .zip(coeffs)
        .map(|(k, &l)| {
            let a = CMat::projector(k);
            let off = offdiag_operator(k);
            kron(&a, &pp)
                + kron(&a.conj(), &mm)
                + kron(&off.scale(l), &pm)
                + kron(&off.adjoint().scale(l.conj()), &mp)
        })
        .collect()
}

/// The dilation `R_a = α_a⊗|+><+| + α*_a⊗|-><-| + λ_a|α_a><α*_a|⊗|+><-| + h.c.`
/// on `qubit ⊗ ancilla`. Requires `|λ_a| ≤ 1` and `Σ_a λ_a|α_a><α*_a| = 0`.
pub fn build_dilated_povm(p: &Povm, coeffs: &[C64]) -> Result<Povm> {
    if coeffs.len() != p.len() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} outcomes",
            coeffs.len(),
            p.len()
        )));
    }
    if let Some((a, l)) = coeffs
        .iter()
        .enumerate()
        .find(|(_, l)| l.norm() > 1.0 + 1e-12)
    {
        return Err(Error::Constraint {
            what: format!("|λ_{a}| ≤ 1"),
            residual: l.norm() - 1.0,
        });
    }
    let kets = p.kets()?;
    let mut sum = CMat::zeros(2, 2);
    for (k, l) in kets.iter().zip(coeffs) {
        sum += &offdiag_operator(k).scale(*l);
    }
    let residual = sum.max_abs();
    if residual > NULL_SPACE_TOL {
        return Err(Error::Constraint {
            what: "Σ λ_a |α_a><α*_a| = 0".into(),
            residual,
        });
    }
    Povm::new(dilated_elements(&kets, coeffs))
}

/// `max_a |Tr_anc[R_a (I ⊗ |+><+|)] - α_a|`: the dilation reproduces the
/// reference POVM on the `+` branch of the ancilla.
pub fn marginal_residual(dilated: &Povm, reference: &Povm) -> Result<f64> {
    let (plus, _) = plus_minus();
    let proj = kron(&CMat::identity(2), &CMat::projector(&plus));
    let shape = SubsystemShape::unlabelled(&[2, 2]);
    let mut worst: f64 = 0.0;
    for (r, a) in dilated.elements().iter().zip(reference.elements()) {
        let m = partial_trace(&r.matmul(&proj), &shape, &[0])?;
        worst = worst.max(m.max_abs_diff(a));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::eigh;
    use crate::qobjects::{adjusted_tetrahedral, conjugate_povm, modified_mercedes, povm_validity};
    use crate::sample;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn max_elem_diff(p: &Povm, q: &Povm) -> f64 {
        p.elements()
            .iter()
            .zip(q.elements())
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    #[test]
    fn eta_examples() {
        let e = EtaMatrix::new(Angle::max_entangled());
        assert!((e.det() + 1.0).abs() < 1e-15);
        assert!(e.entries[0][3].abs() < 1e-15);

        let e = EtaMatrix::new(Angle::new(PI / 3.0).unwrap());
        assert!((e.entries[0][3] - 0.5).abs() < 1e-15);
        assert!((e.entries[1][1] - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((e.det() + 9.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn eta_closed_form_matches_traces() {
        for a in Angle::grid(0.01, 50) {
            let e = EtaMatrix::new(a);
            assert!(e.max_abs_diff(&EtaMatrix::from_traces(a)) <= 1e-12);
            assert!((e.det() + a.sin().powi(4)).abs() <= 1e-12);
        }
    }

    #[test]
    fn eta_inverse_is_inverse() {
        let e = EtaMatrix::new(Angle::new(0.7).unwrap());
        let inv = e.inverse().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let s: f64 = (0..4).map(|k| e.entries[i][k] * inv[k][j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn tiny_theta_refused() {
        let e = EtaMatrix::new(Angle::new(1e-7).unwrap());
        assert!(e.condition_number() > MAX_ETA_CONDITION);
        assert!(matches!(e.inverse(), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn projective_correlations() {
        let theta = Angle::new(0.9).unwrap();
        let zb = Povm::new(vec![
            CMat::diag_real(&[1.0, 0.0]),
            CMat::diag_real(&[0.0, 1.0]),
        ])
        .unwrap();
        let rows = correlations_from_povm(&zb, theta).unwrap();
        assert!((rows[0].values[0] - (0.45f64).cos().powi(2)).abs() < 1e-15);
        assert!((rows[1].values[0] - (0.45f64).sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn tetrahedral_marginals_uniform() {
        let theta = Angle::new(1.0).unwrap();
        for r in correlations_from_povm(&adjusted_tetrahedral(theta), theta).unwrap() {
            assert!((r.values[0] - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugation_flips_y_column() {
        let theta = Angle::new(1.2).unwrap();
        let p = adjusted_tetrahedral(theta);
        let a = correlations_from_povm(&p, theta).unwrap();
        let b = correlations_from_povm(&conjugate_povm(&p), theta).unwrap();
        let mut y_seen = 0.0f64;
        for (ra, rb) in a.iter().zip(&b) {
            for nu in [0, 1, 3] {
                assert!((ra.values[nu] - rb.values[nu]).abs() < 1e-15);
            }
            assert!((ra.values[2] + rb.values[2]).abs() < 1e-15);
            y_seen = y_seen.max(ra.values[2].abs());
        }
        assert!(y_seen > 0.1);
    }

    #[test]
    fn round_trips() {
        let t = Angle::new(PI / 3.0).unwrap();
        let p = adjusted_tetrahedral(t);
        let q = reconstruct_povm(&correlations_from_povm(&p, t).unwrap(), t).unwrap();
        assert!(max_elem_diff(&p, &q) <= 1e-10);

        let t = Angle::new(0.2).unwrap();
        let p = modified_mercedes(t);
        let q = reconstruct_povm(&correlations_from_povm(&p, t).unwrap(), t).unwrap();
        assert!(max_elem_diff(&p, &q) <= 1e-9);
    }

    #[test]
    fn random_round_trips() {
        let mut rng = sample::rng(11);
        for k in 0..30 {
            let p = sample::random_extremal_povm(&mut rng, 2 + k % 3);
            let t = Angle::new(0.05 + 1.5 * (k as f64) / 30.0).unwrap();
            let q = reconstruct_povm(&correlations_from_povm(&p, t).unwrap(), t).unwrap();
            assert!(max_elem_diff(&p, &q) <= 1e-9);
        }
    }

    #[test]
    fn corrupted_correlations_detected() {
        let t = Angle::new(1.0).unwrap();
        let mut rows = correlations_from_povm(&adjusted_tetrahedral(t), t).unwrap();
        rows[0].values[0] += 0.1;
        let q = reconstruct_povm(&rows, t).unwrap();
        assert!(!povm_validity(&q).is_valid);
    }

    #[test]
    fn offdiag_dichotomy() {
        let t = Angle::new(0.8).unwrap();
        let m = offdiag_set(&modified_mercedes(t)).unwrap();
        assert!(m.null_basis.is_empty());
        assert!(m.y_residual <= 1e-12);

        let tet = offdiag_set(&adjusted_tetrahedral(t)).unwrap();
        assert!(!tet.null_basis.is_empty());
        assert!(tet.y_residual <= 1e-12);
    }

    #[test]
    fn offdiag_rejects_mixed_elements() {
        let p = Povm::new(vec![CMat::identity(2).scale_real(0.5); 2]).unwrap();
        assert!(matches!(offdiag_set(&p), Err(Error::NotRankOne { .. })));
    }

    #[test]
    fn zero_coefficients_give_block_dilation() {
        let t = Angle::new(0.6).unwrap();
        let p = modified_mercedes(t);
        let r = build_dilated_povm(&p, &[c(0.0, 0.0); 3]).unwrap();
        assert!(povm_validity(&r).is_valid);
        assert!(marginal_residual(&r, &p).unwrap() < 1e-15);
        let (plus, minus) = plus_minus();
        for (ra, a) in r.elements().iter().zip(p.elements()) {
            let expect =
                kron(a, &CMat::projector(&plus)) + kron(&a.conj(), &CMat::projector(&minus));
            assert!(ra.max_abs_diff(&expect) < 1e-15);
        }
    }

    #[test]
    fn unit_null_vector_dilation() {
        let t = Angle::new(FRAC_PI_2).unwrap();
        let p = adjusted_tetrahedral(t);
        let set = offdiag_set(&p).unwrap();
        let v = &set.null_basis[0];
        let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let coeffs: Vec<C64> = v.iter().map(|z| z / scale).collect();
        let r = build_dilated_povm(&p, &coeffs).unwrap();
        assert!(povm_validity(&r).is_valid);
        assert!(marginal_residual(&r, &p).unwrap() < 1e-12);

        let kets = p.kets().unwrap();
        let mut singular = false;
        for ((ra, k), l) in r.elements().iter().zip(&kets).zip(&coeffs) {
            let w: f64 = k.iter().map(|z| z.norm_sqr()).sum();
            let ev = eigh(ra).unwrap().values;
            assert!((ev[0] - w * (1.0 + l.norm())).abs() < 1e-12);
            assert!(ev.iter().any(|x| (x - w * (1.0 - l.norm())).abs() < 1e-12));
            singular |= ev[1..].iter().all(|x| x.abs() < 1e-12);
        }
        assert!(singular);

        let over: Vec<C64> = coeffs.iter().map(|z| z * 1.5).collect();
        assert!(matches!(
            build_dilated_povm(&p, &over),
            Err(Error::Constraint { .. })
        ));
        let raw = Povm::new(dilated_elements(&kets, &over)).unwrap();
        let rep = povm_validity(&raw);
        assert!(!rep.is_valid && rep.max_psd_violation > 0.1);
    }

    #[test]
    fn constraint_violation_rejected() {
        let p = adjusted_tetrahedral(Angle::new(1.0).unwrap());
        let coeffs = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            build_dilated_povm(&p, &coeffs),
            Err(Error::Constraint { .. })
        ));
        assert!(build_dilated_povm(&p, &coeffs[..3]).is_err());
    }
}
