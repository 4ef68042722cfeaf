use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{Angle, Dichotomic, QState};
use crate::error::{Error, Result};
use crate::matkernel::{c, kron, CMat, SubsystemShape, C64};
use crate::paulis;

/// `cos(θ/2)|00> + sin(θ/2)|11>`.
pub fn psi_theta_ket(theta: Angle) -> Vec<C64> {
    let h = theta.radians() / 2.0;
    vec![c(h.cos(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h.sin(), 0.0)]
}

/// `sin(θ/2)|01> - cos(θ/2)|10>`, the eigenvector paired with `-` in the Bell operator.
pub fn phi_theta_ket(theta: Angle) -> Vec<C64> {
    let h = theta.radians() / 2.0;
    vec![c(0.0, 0.0), c(h.sin(), 0.0), c(-h.cos(), 0.0), c(0.0, 0.0)]
}

/// `ψ_θ` on `(A, B)`, built as an outer product of the Schmidt form.
pub fn psi_theta(theta: Angle) -> QState {
    QState::pure(&psi_theta_ket(theta), SubsystemShape::qubits_ab()).expect("valid pure state")
}

/// The same projector assembled from its Pauli expansion
/// `[II + cosθ (IZ + ZI) + sinθ (XX - YY) + ZZ]/4`.
pub fn psi_theta_pauli(theta: Angle) -> CMat {
    let (i, x, y, z) = (paulis::id(), paulis::x(), paulis::y(), paulis::z());
    let (ct, st) = (theta.cos(), theta.sin());
    let sum = kron(&i, &i)
        + (kron(&i, &z) + kron(&z, &i)).scale_real(ct)
        + (kron(&x, &x) - kron(&y, &y)).scale_real(st)
        + kron(&z, &z);
    sum.scale_real(0.25)
}

pub fn phi_theta(theta: Angle) -> QState {
    QState::pure(&phi_theta_ket(theta), SubsystemShape::qubits_ab()).expect("valid pure state")
}

/// `β = 2cosθ / √(1 + sin²θ)`.
pub fn beta_of_theta(theta: Angle) -> f64 {
    let (ct, st) = (theta.cos(), theta.sin());
    2.0 * ct / (1.0 + st * st).sqrt()
}

/// Inverts `β(θ)` by bisection; β is strictly decreasing on `(0, π/2]`.
pub fn theta_from_beta(beta: f64) -> Result<Angle> {
    if !(0.0..2.0).contains(&beta) || !beta.is_finite() {
        return Err(Error::BetaOutOfRange(beta));
    }
    if beta == 0.0 {
        return Ok(Angle::max_entangled());
    }
    let f = |t: f64| 2.0 * t.cos() / (1.0 + t.sin().powi(2)).sqrt() - beta;
    let (mut lo, mut hi) = (0.0f64, FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Angle::new(0.5 * (lo + hi))
}

/// Stock realizations of the ancillary state `σ_{A'B'}`, both with `A' = B' = Z`
/// so that `<A' ⊗ B'>_σ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaRealization {
    /// `|00><00|`.
    Pure,
    /// `(|00><00| + |11><11|)/2`.
    Mixed,
}

impl AncillaRealization {
    pub const ALL: [AncillaRealization; 2] = [AncillaRealization::Pure, AncillaRealization::Mixed];

    pub fn sigma(self) -> QState {
        let rho = match self {
            AncillaRealization::Pure => CMat::diag_real(&[1.0, 0.0, 0.0, 0.0]),
            AncillaRealization::Mixed => CMat::diag_real(&[0.5, 0.0, 0.0, 0.5]),
        };
        QState::new(rho, SubsystemShape::new(&[2, 2], &["A'", "B'"]).unwrap())
            .expect("valid ancilla")
    }

    pub fn name(self) -> &'static str {
        match self {
            AncillaRealization::Pure => "pure",
            AncillaRealization::Mixed => "mixed",
        }
    }
}

/// `ψ_θ ⊗ σ_{A'B'}` laid out as `(A, A', B, B')`.
pub fn full_state(theta: Angle, ancilla: AncillaRealization) -> QState {
    psi_theta(theta)
        .tensor(&ancilla.sigma())
        .permute(&[0, 2, 1, 3])
        .expect("static permutation")
}

/// Ideal observables attaining the three Bell values, on `qubit ⊗ ancilla` per side.
#[derive(Clone, Debug)]
pub struct IdealMeasurements {
    pub theta: Angle,
    /// `A₁, A₂, A₃` on `A ⊗ A'`.
    pub alice: Vec<Dichotomic>,
    /// `B₁ … B₆` on `B ⊗ B'`.
    pub bob: Vec<Dichotomic>,
    pub a_prime: Dichotomic,
    pub b_prime: Dichotomic,
    pub ancilla: QState,
}

pub fn ideal_measurements(theta: Angle) -> IdealMeasurements {
    ideal_measurements_with(theta, AncillaRealization::Pure)
}

pub fn ideal_measurements_with(theta: Angle, ancilla: AncillaRealization) -> IdealMeasurements {
    let (i, x, y, z) = (paulis::id(), paulis::x(), paulis::y(), paulis::z());
    let a_prime = paulis::z();
    let b_prime = paulis::z();

    let beta = beta_of_theta(theta);
    let lp = 1.0 + beta * beta / 4.0;
    let lm = 1.0 - beta * beta / 4.0;
    let kp = (lp / 2.0).sqrt();
    let km = (lm / 2.0).sqrt();

    let zi = kron(&z, &i);
    let xi = kron(&x, &i);
    let yb = kron(&y, &b_prime);
    let s2 = std::f64::consts::FRAC_1_SQRT_2;

    let obs = |m: CMat, l: &str| Dichotomic::new(m, l).expect("ideal observable is dichotomic");
    let alice = vec![
        obs(kron(&z, &i), "A1"),
        obs(kron(&x, &i), "A2"),
        obs(kron(&y, &a_prime), "A3"),
    ];
    let bob = vec![
        obs(zi.scale_real(kp) + xi.scale_real(km), "B1"),
        obs(zi.scale_real(kp) - xi.scale_real(km), "B2"),
        obs(zi.scale_real(kp) - yb.scale_real(km), "B3"),
        obs(zi.scale_real(kp) + yb.scale_real(km), "B4"),
        obs((&xi - &yb).scale_real(s2), "B5"),
        obs((&xi + &yb).scale_real(s2), "B6"),
    ];
    IdealMeasurements {
        theta,
        alice,
        bob,
        a_prime: obs(a_prime, "A'"),
        b_prime: obs(b_prime, "B'"),
        ancilla: ancilla.sigma(),
    }
}

/// `B₇ = X ⊗ I`, the extra setting for the projective two-bit scheme.
pub fn ideal_b7() -> Dichotomic {
    Dichotomic::new(kron(&paulis::x(), &paulis::id()), "B7").expect("dichotomic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::partial_trace;
    use std::f64::consts::PI;

    #[test]
    fn psi_at_max_entanglement() {
        let p = psi_theta(Angle::max_entangled());
        assert!((p.rho()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((p.rho()[(0, 3)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn psi_diagonal_at_pi_over_three() {
        let p = psi_theta(Angle::new(PI / 3.0).unwrap());
        assert!((p.rho()[(0, 0)].re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn schmidt_and_pauli_forms_agree() {
        for t in [0.1, 0.7, FRAC_PI_2] {
            let a = Angle::new(t).unwrap();
            let d = psi_theta(a).rho().max_abs_diff(&psi_theta_pauli(a));
            assert!(d <= 1e-12, "θ={t}: {d}");
        }
    }

    #[test]
    fn marginals() {
        for t in [0.2, 0.9, 1.3, FRAC_PI_2] {
            let a = Angle::new(t).unwrap();
            let p = psi_theta(a);
            let h = t / 2.0;
            let expect = CMat::diag_real(&[h.cos().powi(2), h.sin().powi(2)]);
            let ra = partial_trace(p.rho(), p.shape(), &[0]).unwrap();
            let rb = partial_trace(p.rho(), p.shape(), &[1]).unwrap();
            assert!(ra.max_abs_diff(&expect) <= 1e-12);
            assert!(rb.max_abs_diff(&expect) <= 1e-12);
        }
        let ra = psi_theta(Angle::max_entangled()).marginal(&[0]).unwrap();
        assert!(ra.rho().max_abs_diff(&CMat::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn beta_values() {
        assert!(beta_of_theta(Angle::max_entangled()).abs() < 1e-15);
        let b = beta_of_theta(Angle::new(PI / 3.0).unwrap());
        assert!((b - 2.0 / 7f64.sqrt()).abs() < 1e-15);
        assert!((b - 0.7559289).abs() < 1e-7);
        let near0 = beta_of_theta(Angle::new(0.001).unwrap());
        assert!(near0 < 2.0 && near0 > 1.999);
    }

    #[test]
    fn beta_inversion() {
        for t in [0.05, 0.3, 1.0, 1.5, FRAC_PI_2] {
            let a = Angle::new(t).unwrap();
            let back = theta_from_beta(beta_of_theta(a)).unwrap();
            assert!(
                (back.radians() - t).abs() < 1e-12,
                "{t} -> {}",
                back.radians()
            );
        }
        assert!(theta_from_beta(2.0).is_err());
        assert!(theta_from_beta(-0.1).is_err());
    }

    #[test]
    fn ideal_observables() {
        let m = ideal_measurements(Angle::new(0.8).unwrap());
        assert_eq!(m.alice.len(), 3);
        assert_eq!(m.bob.len(), 6);
        for o in m.alice.iter().chain(&m.bob) {
            let sq = o.op().matmul(o.op());
            assert!(sq.max_abs_diff(&CMat::identity(4)) < 1e-10, "{}", o.label());
        }
        let a = &m.alice;
        assert!(a[0].op().anticommutator(a[1].op()).max_abs() < 1e-10);
        assert!(a[0].op().anticommutator(a[2].op()).max_abs() < 1e-10);
    }

    #[test]
    fn b1_at_max_entanglement() {
        let m = ideal_measurements(Angle::max_entangled());
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let expect = kron(&(paulis::z() + paulis::x()).scale_real(s2), &paulis::id());
        assert!(m.bob[0].op().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn ancilla_correlation_is_one() {
        for r in AncillaRealization::ALL {
            let m = ideal_measurements_with(Angle::new(0.5).unwrap(), r);
            let ab = kron(m.a_prime.op(), m.b_prime.op());
            assert!((m.ancilla.expect(&ab) - 1.0).abs() < 1e-15, "{r:?}");
        }
    }

    #[test]
    fn full_state_layout() {
        let s = full_state(Angle::new(0.4).unwrap(), AncillaRealization::Mixed);
        assert_eq!(s.shape().labels, vec!["A", "A'", "B", "B'"]);
        let ab = s.marginal(&[0, 2]).unwrap();
        assert!(
            ab.rho()
                .max_abs_diff(psi_theta(Angle::new(0.4).unwrap()).rho())
                < 1e-15
        );
    }
}
