//! The conjugation attack on schemes where both parties use four-outcome POVMs.
//!
//! Eve prepares the ancilla pair in `χ'_± = (|++> ± |-->)/√2` with equal
//! probability. Both choices reproduce the ideal correlations on average, yet
//! under `χ'_-` one joint outcome can be made impossible, which caps the
//! certifiable randomness below 4 bits. When one side has at most three
//! outcomes the dilation is block diagonal and any ancilla preparation
//! consistent with `<A'⊗B'> = 1` yields the ideal statistics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{c, inner, kron, kron_ket, partial_trace, CMat, SubsystemShape, C64};
use crate::qobjects::{psi_theta, psi_theta_ket, Angle, Povm, QState};
use crate::sample;
use crate::tomography::{build_dilated_povm, offdiag_set, plus_minus};

/// Entries this close to the maximal magnitude count as unit magnitude.
const UNIT_TOL: f64 = 1e-9;

/// `χ'_+` and `χ'_-` on `(A', B')`.
pub fn chi_states() -> (QState, QState) {
    let (p, m) = plus_minus();
    let pp = kron_ket(&p, &p);
    let mm = kron_ket(&m, &m);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let make = |sign: f64| {
        let v: Vec<C64> = pp
            .iter()
            .zip(&mm)
            .map(|(a, b)| (a + b * sign) * s)
            .collect();
        QState::pure(&v, SubsystemShape::new(&[2, 2], &["A'", "B'"]).unwrap()).expect("unit vector")
    };
    (make(1.0), make(-1.0))
}

/// `|+><+| - |-><-|`, the ancilla observable on both sides.
pub fn ancilla_observable() -> CMat {
    crate::paulis::x()
}

/// Which of Eve's two ancilla preparations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// `<α_a β_b|ψ_θ>` with subnormalized kets.
fn amplitudes(alice: &[Vec<C64>], bob: &[Vec<C64>], theta: Angle) -> Vec<Vec<C64>> {
    let psi = psi_theta_ket(theta);
    alice
        .iter()
        .map(|a| bob.iter().map(|b| inner(&kron_ket(a, b), &psi)).collect())
        .collect()
}

/// `P_±(ab) = |A|² ± Re[λ*_a μ*_b A²]` with `A = <α_a β_b|ψ_θ>`.
pub fn closed_form_joint(
    alice: &Povm,
    bob: &Povm,
    lambda: &[C64],
    mu: &[C64],
    theta: Angle,
    branch: Branch,
) -> Result<Vec<Vec<f64>>> {
    if lambda.len() != alice.len() || mu.len() != bob.len() {
        return Err(Error::Dimension(
            "one coefficient per outcome required".into(),
        ));
    }
    let amps = amplitudes(&alice.kets()?, &bob.kets()?, theta);
    Ok(amps
        .iter()
        .zip(lambda)
        .map(|(row, l)| {
            row.iter()
                .zip(mu)
                .map(|(amp, m)| {
                    amp.norm_sqr() + branch.sign() * (l.conj() * m.conj() * amp * amp).re
                })
                .collect()
        })
        .collect())
}

/// `|<α_a β_b|ψ_θ>|²`, the statistics with no attack.
pub fn ideal_joint(alice: &Povm, bob: &Povm, theta: Angle) -> Result<Vec<Vec<f64>>> {
    let psi = psi_theta(theta);
    Ok(alice
        .elements()
        .iter()
        .map(|a| {
            bob.elements()
                .iter()
                .map(|b| psi.expect(&kron(a, b)))
                .collect()
        })
        .collect())
}

/// Eve's attack: dilated POVMs for both sides plus the two ancilla states.
#[derive(Clone, Debug)]
pub struct AttackModel {
    pub theta: Angle,
    pub alice: Povm,
    pub bob: Povm,
    pub lambda: Vec<C64>,
    pub mu: Vec<C64>,
    pub dilated_alice: Povm,
    pub dilated_bob: Povm,
    pub chi_plus: QState,
    pub chi_minus: QState,
    /// Pair whose probability vanishes under `χ'_-`.
    pub target: Option<(usize, usize)>,
}

impl AttackModel {
    /// Dilates both sides with the given coefficients; no target is chosen.
    pub fn with_coefficients(
        theta: Angle,
        alice: Povm,
        bob: Povm,
        lambda: Vec<C64>,
        mu: Vec<C64>,
    ) -> Result<Self> {
        let dilated_alice = build_dilated_povm(&alice, &lambda)?;
        let dilated_bob = build_dilated_povm(&bob, &mu)?;
        let (chi_plus, chi_minus) = chi_states();
        Ok(AttackModel {
            theta,
            alice,
            bob,
            lambda,
            mu,
            dilated_alice,
            dilated_bob,
            chi_plus,
            chi_minus,
            target: None,
        })
    }

    pub fn closed_form(&self, branch: Branch) -> Result<Vec<Vec<f64>>> {
        closed_form_joint(
            &self.alice,
            &self.bob,
            &self.lambda,
            &self.mu,
            self.theta,
            branch,
        )
    }

    pub fn conditional_joint(&self) -> Result<ConditionalJoint> {
        ConditionalJoint::new(
            self.closed_form(Branch::Plus)?,
            self.closed_form(Branch::Minus)?,
        )
    }
}

/// Picks, among the null-space basis vectors, the one with the most entries of
/// maximal magnitude (first wins ties), scaled so that maximum is 1.
fn unit_coefficients(p: &Povm) -> Result<Vec<C64>> {
    let set = offdiag_set(p)?;
    let mut best: Option<(usize, Vec<C64>)> = None;
    for v in &set.null_basis {
        let m = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if m == 0.0 {
            continue;
        }
        let scaled: Vec<C64> = v.iter().map(|z| z / m).collect();
        let units = scaled.iter().filter(|z| z.norm() >= 1.0 - UNIT_TOL).count();
        if best.as_ref().is_none_or(|(u, _)| units > *u) {
            best = Some((units, scaled));
        }
    }
    best.map(|(_, v)| v).ok_or_else(|| {
        Error::DegenerateAttack(format!(
            "{}-outcome POVM admits only zero off-diagonal coefficients",
            p.len()
        ))
    })
}

/// Builds the attack for two four-outcome POVMs, phase-aligned so that the
/// `χ'_-` probability of the best unit-magnitude pair vanishes.
pub fn build_attack(alice: &Povm, bob: &Povm, theta: Angle) -> Result<AttackModel> {
    let mut lambda = unit_coefficients(alice)?;
    let mu = unit_coefficients(bob)?;
    let amps = amplitudes(&alice.kets()?, &bob.kets()?, theta);

    let mut target: Option<((usize, usize), f64)> = None;
    for (a, l) in lambda.iter().enumerate() {
        for (b, m) in mu.iter().enumerate() {
            if l.norm() < 1.0 - UNIT_TOL || m.norm() < 1.0 - UNIT_TOL {
                continue;
            }
            let w = amps[a][b].norm_sqr();
            if target.is_none_or(|(_, best)| w > best) {
                target = Some(((a, b), w));
            }
        }
    }
    let ((ta, tb), weight) = target
        .ok_or_else(|| Error::DegenerateAttack("no pair of unit-magnitude coefficients".into()))?;
    if weight <= 1e-14 {
        return Err(Error::DegenerateAttack(format!(
            "unit-magnitude pairs all have vanishing amplitude (best {weight:.3e})"
        )));
    }

    // λ → λ e^{iφ} turns λ*μ*A² into |λ*μ*A²| = |A|².
    let amp = amps[ta][tb];
    let phase = (lambda[ta].conj() * mu[tb].conj() * amp * amp).arg();
    let rot = C64::from_polar(1.0, phase);
    for l in lambda.iter_mut() {
        *l *= rot;
    }

    let mut model = AttackModel::with_coefficients(theta, alice.clone(), bob.clone(), lambda, mu)?;
    model.target = Some((ta, tb));
    Ok(model)
}

/// `Tr[(R_a ⊗ S_b)(ψ_θ ⊗ χ'_±)]` on the 16-dimensional space ordered `(A, A', B, B')`.
pub fn brute_force_joint(attack: &AttackModel, branch: Branch) -> Result<Vec<Vec<f64>>> {
    let chi = match branch {
        Branch::Plus => &attack.chi_plus,
        Branch::Minus => &attack.chi_minus,
    };
    joint_on_ancilla(attack, chi.rho())
}

/// Joint distribution of the dilated POVMs on `ψ_θ ⊗ σ_{A'B'}`.
pub fn joint_on_ancilla(attack: &AttackModel, sigma: &CMat) -> Result<Vec<Vec<f64>>> {
    if sigma.rows() != 4 {
        return Err(Error::Dimension("two-qubit ancilla state expected".into()));
    }
    let rho = kron(psi_theta(attack.theta).rho(), sigma);
    let shape = SubsystemShape::new(&[2, 2, 2, 2], &["A", "B", "A'", "B'"])?;
    let (rho, _) = crate::matkernel::permute_subsystems(&rho, &shape, &[0, 2, 1, 3])?;
    Ok(attack
        .dilated_alice
        .elements()
        .iter()
        .map(|r| {
            attack
                .dilated_bob
                .elements()
                .iter()
                .map(|s| kron(r, s).expect(&rho))
                .collect()
        })
        .collect())
}

/// Conditional joint tables for Eve's two preparations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalJoint {
    pub p_plus: Vec<Vec<f64>>,
    pub p_minus: Vec<Vec<f64>>,
    pub average: Vec<Vec<f64>>,
    pub guessing_prob: f64,
    pub certified_bits: f64,
}

fn table_max(t: &[Vec<f64>]) -> f64 {
    t.iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

fn check_table(t: &[Vec<f64>]) -> Result<()> {
    let total: f64 = t.iter().flatten().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized { total });
    }
    Ok(())
}

impl ConditionalJoint {
    pub fn new(p_plus: Vec<Vec<f64>>, p_minus: Vec<Vec<f64>>) -> Result<Self> {
        check_table(&p_plus)?;
        check_table(&p_minus)?;
        if p_plus.len() != p_minus.len()
            || p_plus.iter().zip(&p_minus).any(|(a, b)| a.len() != b.len())
        {
            return Err(Error::Dimension(
                "conditional tables differ in shape".into(),
            ));
        }
        let average = p_plus
            .iter()
            .zip(&p_minus)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect())
            .collect();
        let mut cj = ConditionalJoint {
            p_plus,
            p_minus,
            average,
            guessing_prob: 0.0,
            certified_bits: 0.0,
        };
        cj.guessing_prob = guessing_probability(&cj);
        cj.certified_bits = -cj.guessing_prob.log2();
        Ok(cj)
    }

    /// Smallest entry of `P_-`.
    pub fn min_minus(&self) -> f64 {
        self.p_minus
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// `(max P_+ + max P_-)/2`: Eve knows which preparation she made.
pub fn guessing_probability(cj: &ConditionalJoint) -> f64 {
    0.5 * (table_max(&cj.p_plus) + table_max(&cj.p_minus))
}

/// `-log₂[(1/15 + 1/16)/2]`: the best case for the honest parties when one of
/// sixteen outcomes is zeroed in half the rounds.
pub fn randomness_cap() -> f64 {
    -(0.5f64 * (1.0 / 15.0 + 1.0 / 16.0)).log2()
}

/// `-log₂ max_i p_i`. Rejects distributions not summing to 1 within 1e-9 or
/// with entries below -1e-12.
pub fn min_entropy(dist: &[f64]) -> Result<f64> {
    let total: f64 = dist.iter().sum();
    if dist.is_empty() || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Unnormalized { total });
    }
    if let Some(neg) = dist.iter().find(|&&p| p < -1e-12) {
        return Err(Error::InvalidState(format!("negative probability {neg}")));
    }
    let max = dist.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(-max.log2())
}

/// A split of the ancilla state into conditional states known to Eve.
#[derive(Clone, Debug)]
pub struct EveDecomposition {
    pub weights: Vec<f64>,
    /// States on `(A', B')`.
    pub states: Vec<CMat>,
}

impl EveDecomposition {
    /// The two-state ensemble `{χ'_+, χ'_-}` with equal weights.
    pub fn chi_pair() -> Self {
        let (p, m) = chi_states();
        EveDecomposition {
            weights: vec![0.5, 0.5],
            states: vec![p.rho().clone(), m.rho().clone()],
        }
    }

    /// Largest `|<A'⊗B'> - 1|` over the conditional states.
    pub fn ancilla_correlation_residual(&self) -> f64 {
        let ab = kron(&ancilla_observable(), &ancilla_observable());
        self.states
            .iter()
            .map(|s| (s.expect(&ab) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Random ancilla decomposition respecting `<A'⊗B'> = 1`.
///
/// A random state on `span{|++>, |-->}` is purified with a qubit environment
/// that Eve measures: a rank-one measurement in a Haar-random basis when
/// `rank_one`, otherwise the two-outcome effects `{W, I - W}` with `W` having
/// random eigenvalues in `[0, 1]` and a Haar-random eigenbasis.
pub fn sample_eve_decomposition<R: Rng + ?Sized>(rng: &mut R, rank_one: bool) -> EveDecomposition {
    let (p, m) = plus_minus();
    let basis = [kron_ket(&p, &p), kron_ket(&m, &m)];
    let sigma = sample::random_density(rng, 2, 2);
    let eg = crate::matkernel::eigh(&sigma).expect("Hermitian");

    // |Σ> = Σ_k √p_k |s_k>|k>_E with |s_k> the eigenvectors mapped into the span.
    let mut purification = vec![c(0.0, 0.0); 8];
    for k in 0..2 {
        let w = eg.values[k].max(0.0).sqrt();
        let v = eg.vector(k);
        for (j, bj) in basis.iter().enumerate() {
            for (i, z) in bj.iter().enumerate() {
                purification[i * 2 + k] += w * v[j] * z;
            }
        }
    }
    let joint = CMat::projector(&purification);

    let u = sample::haar_unitary(rng, 2);
    let effects: Vec<CMat> = if rank_one {
        (0..2).map(|k| CMat::projector(&u.column_vec(k))).collect()
    } else {
        let d = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
        let w = u.matmul(&CMat::diag_real(&d)).matmul(&u.adjoint());
        vec![w.clone(), CMat::identity(2) - w]
    };

    let shape = SubsystemShape::unlabelled(&[4, 2]);
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for e in effects {
        let cond = partial_trace(&joint.matmul(&kron(&CMat::identity(4), &e)), &shape, &[0])
            .expect("static shape")
            .hermitian_part();
        let w = cond.trace().re;
        if w > 1e-12 {
            weights.push(w);
            states.push(cond.scale_real(1.0 / w));
        }
    }
    EveDecomposition { weights, states }
}

/// Outcome of comparing conditional statistics with the ideal qubit joint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub theta: f64,
    pub decompositions: usize,
    /// `max |P(ab|e) - Tr[(α_a⊗β_b)ψ_θ]|` over decompositions, branches and outcomes.
    pub max_deviation: f64,
    /// Largest `|<A'⊗B'> - 1|` among the conditional ancilla states.
    pub ancilla_residual: f64,
    pub passes: bool,
}

/// Compares the conditional joints of an attack against the ideal statistics
/// for every branch of every decomposition.
pub fn conditional_deviation(
    attack: &AttackModel,
    decompositions: &[EveDecomposition],
    tol: f64,
) -> Result<ReductionReport> {
    let ideal = ideal_joint(&attack.alice, &attack.bob, attack.theta)?;
    let mut max_deviation: f64 = 0.0;
    let mut ancilla_residual: f64 = 0.0;
    for d in decompositions {
        ancilla_residual = ancilla_residual.max(d.ancilla_correlation_residual());
        for s in &d.states {
            let t = joint_on_ancilla(attack, s)?;
            for (r, i) in t.iter().flatten().zip(ideal.iter().flatten()) {
                max_deviation = max_deviation.max((r - i).abs());
            }
        }
    }
    Ok(ReductionReport {
        theta: attack.theta.radians(),
        decompositions: decompositions.len(),
        max_deviation,
        ancilla_residual,
        passes: max_deviation <= tol && ancilla_residual <= tol,
    })
}

/// With Bob limited to three outcomes his dilation is block diagonal, and any
/// admissible `λ` on Alice's side leaves every conditional joint equal to the
/// ideal qubit statistics. `lambda = None` uses the attack's unit-scaled null vector.
pub fn qubit_reduction_check(
    alice: &Povm,
    bob: &Povm,
    theta: Angle,
    lambda: Option<Vec<C64>>,
    decompositions: &[EveDecomposition],
    tol: f64,
) -> Result<ReductionReport> {
    if bob.len() > 3 {
        return Err(Error::InvalidPovm(format!(
            "reduction applies to at most three outcomes on one side, got {}",
            bob.len()
        )));
    }
    let lambda = match lambda {
        Some(l) => l,
        None => unit_coefficients(alice).unwrap_or_else(|_| vec![c(0.0, 0.0); alice.len()]),
    };
    let mu = vec![c(0.0, 0.0); bob.len()];
    let attack = AttackModel::with_coefficients(theta, alice.clone(), bob.clone(), lambda, mu)?;
    conditional_deviation(&attack, decompositions, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qobjects::{adjusted_tetrahedral, modified_mercedes};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn max_table_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    fn uniform(n: usize) -> Vec<Vec<f64>> {
        vec![vec![1.0 / n as f64; 1]; n]
    }

    #[test]
    fn chi_properties() {
        let (p, m) = chi_states();
        assert!(p.rho().trace_product(m.rho()).norm() < 1e-15);
        let half = CMat::identity(2).scale_real(0.5);
        assert!(p.marginal(&[0]).unwrap().rho().max_abs_diff(&half) < 1e-15);
        let ab = kron(&ancilla_observable(), &ancilla_observable());
        assert!((p.expect(&ab) - 1.0).abs() < 1e-15);
        assert!((m.expect(&ab) - 1.0).abs() < 1e-15);
        assert!(EveDecomposition::chi_pair().ancilla_correlation_residual() < 1e-15);
    }

    #[test]
    fn min_entropy_examples() {
        assert!((min_entropy(&[0.25; 4]).unwrap() - 2.0).abs() < 1e-15);
        assert!((min_entropy(&[1.0 / 12.0; 12]).unwrap() - 12f64.log2()).abs() < 1e-12);
        assert_eq!(min_entropy(&[1.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            min_entropy(&[0.5, 0.4]),
            Err(Error::Unnormalized { .. })
        ));
    }

    #[test]
    fn cap_value() {
        let cap = randomness_cap();
        assert!(cap > 3.9526 && cap < 3.9528);
        assert!(cap < 4.0);
        assert!(cap > 12f64.log2());
    }

    #[test]
    fn guessing_examples() {
        let cj = ConditionalJoint::new(uniform(16), uniform(16)).unwrap();
        assert!((cj.guessing_prob - 1.0 / 16.0).abs() < 1e-15);
        assert!((cj.certified_bits - 4.0).abs() < 1e-12);

        let mut minus = vec![vec![1.0 / 15.0]; 16];
        minus[0][0] = 0.0;
        let cj = ConditionalJoint::new(uniform(16), minus).unwrap();
        assert!((cj.certified_bits - randomness_cap()).abs() < 1e-12);
    }

    #[test]
    fn no_attack_is_ideal() {
        let t = Angle::new(0.9).unwrap();
        let a = adjusted_tetrahedral(t);
        let z4 = vec![c(0.0, 0.0); 4];
        let ideal = ideal_joint(&a, &a, t).unwrap();
        for br in [Branch::Plus, Branch::Minus] {
            let cf = closed_form_joint(&a, &a, &z4, &z4, t, br).unwrap();
            assert!(max_table_diff(&cf, &ideal) < 1e-14);
        }
        let model =
            AttackModel::with_coefficients(t, a.clone(), a.clone(), z4.clone(), z4).unwrap();
        let bf = brute_force_joint(&model, Branch::Plus).unwrap();
        assert!(max_table_diff(&bf, &ideal) < 1e-14);
        let cj = model.conditional_joint().unwrap();
        assert!((cj.guessing_prob - table_max(&ideal)).abs() < 1e-15);
    }

    #[test]
    fn real_coefficients_specialize() {
        // Mercedes is real; pair it with itself and real λ, μ.
        let t = Angle::new(0.7).unwrap();
        let m = modified_mercedes(t);
        let l = vec![c(0.3, 0.0), c(-0.8, 0.0), c(0.5, 0.0)];
        let cf = closed_form_joint(&m, &m, &l, &l, t, Branch::Minus).unwrap();
        let ideal = ideal_joint(&m, &m, t).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let expect = ideal[a][b] * (1.0 - l[a].re * l[b].re);
                assert!((cf[a][b] - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn tetrahedral_attack_at_max_entanglement() {
        let t = Angle::max_entangled();
        let p = adjusted_tetrahedral(t);
        let model = build_attack(&p, &p, t).unwrap();
        let cj = model.conditional_joint().unwrap();
        let (ta, tb) = model.target.unwrap();
        assert!(cj.p_minus[ta][tb].abs() <= 1e-10);
        assert!(table_max(&cj.p_minus) >= 1.0 / 15.0 - 1e-12);
        let ideal = ideal_joint(&p, &p, t).unwrap();
        assert!(max_table_diff(&cj.average, &ideal) <= 1e-10);
        for br in [Branch::Plus, Branch::Minus] {
            let bf = brute_force_joint(&model, br).unwrap();
            assert!(max_table_diff(&bf, &model.closed_form(br).unwrap()) <= 1e-10);
            assert!(bf.iter().flatten().all(|&x| x >= -1e-12));
        }
        assert!(cj.certified_bits <= randomness_cap() + 1e-12);
    }

    #[test]
    fn three_outcome_side_is_degenerate() {
        let t = Angle::new(1.0).unwrap();
        let r = build_attack(&adjusted_tetrahedral(t), &modified_mercedes(t), t);
        assert!(matches!(r, Err(Error::DegenerateAttack(_))));
    }

    #[test]
    fn reduction_holds_for_mercedes() {
        let t = Angle::new(1.1).unwrap();
        let mut rng = sample::rng(5);
        let mut decs: Vec<EveDecomposition> = (0..10)
            .map(|k| sample_eve_decomposition(&mut rng, k % 2 == 0))
            .collect();
        decs.push(EveDecomposition::chi_pair());
        let r = qubit_reduction_check(
            &adjusted_tetrahedral(t),
            &modified_mercedes(t),
            t,
            None,
            &decs,
            1e-10,
        )
        .unwrap();
        assert!(r.passes, "{r:?}");
    }

    #[test]
    fn reduction_fails_for_two_tetrahedra() {
        let t = Angle::new(FRAC_PI_2).unwrap();
        let p = adjusted_tetrahedral(t);
        let model = build_attack(&p, &p, t).unwrap();
        let r = conditional_deviation(&model, &[EveDecomposition::chi_pair()], 1e-10).unwrap();
        assert!(r.max_deviation >= 1e-3);
        assert!(!r.passes);
        let bob4 = qubit_reduction_check(&p, &p, t, None, &[], 1e-10);
        assert!(bob4.is_err());
    }

    #[test]
    fn eve_samples_respect_ancilla_correlation() {
        let mut rng = sample::rng(9);
        for k in 0..20 {
            let d = sample_eve_decomposition(&mut rng, k % 2 == 1);
            assert!(d.ancilla_correlation_residual() < 1e-12);
            assert!((d.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn attack_invariants(seed in 0u64..10_000, t in 0.05f64..FRAC_PI_2) {
            let mut rng = sample::rng(seed);
            let theta = Angle::new(t).unwrap();
            let a = sample::random_extremal_povm(&mut rng, 4);
            let b = sample::random_extremal_povm(&mut rng, 4);
            if let Ok(model) = build_attack(&a, &b, theta) {
                let cj = model.conditional_joint().unwrap();
                let ideal = ideal_joint(&a, &b, theta).unwrap();
                prop_assert!(max_table_diff(&cj.average, &ideal) <= 1e-10);
                prop_assert!(cj.min_minus() <= 1e-10);
                prop_assert!(table_max(&cj.p_minus) >= 1.0 / 15.0 - 1e-12);
                let none = ConditionalJoint::new(ideal.clone(), ideal).unwrap();
                prop_assert!(cj.guessing_prob >= none.guessing_prob - 1e-12);
                let bf = brute_force_joint(&model, Branch::Minus).unwrap();
                prop_assert!(max_table_diff(&bf, &cj.p_minus) <= 1e-10);
            }
        }
    }
}
