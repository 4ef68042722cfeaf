//! Bell values `I_β`, `J_β`, `S`, the spectral self-test of the qubit Bell
//! operator, and the projective two-bit randomness scheme.
//!
//! The self-test is checked rather than proven: the ideal constructions must
//! attain the target values, the qubit Bell operator must have the expected
//! spectrum and top eigenvector, and local perturbations of the ideal
//! observables must lower the values.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::adversary::min_entropy;
use crate::error::{Error, Result};
use crate::matkernel::{c, eigh, inner, kron, CMat};
use crate::paulis;
use crate::qobjects::{
    adjusted_tetrahedral, full_state, ideal_b7, ideal_measurements_with, modified_mercedes,
    near_y_tetrahedral, phi_theta, psi_theta, psi_theta_ket, theta_from_beta, AncillaRealization,
    Angle, Dichotomic, QState,
};
use crate::tol::PSD_TOL;

/// State plus Alice's and Bob's observables. Alice's operators act on the
/// first tensor factor of dimension `alice[0].dim()`, Bob's on the rest.
#[derive(Clone, Debug)]
pub struct BellScenario {
    pub state: QState,
    pub alice: Vec<Dichotomic>,
    pub bob: Vec<Dichotomic>,
    pub theta: Angle,
}

impl BellScenario {
    pub fn new(
        state: QState,
        alice: Vec<Dichotomic>,
        bob: Vec<Dichotomic>,
        theta: Angle,
    ) -> Result<Self> {
        let s = BellScenario {
            state,
            alice,
            bob,
            theta,
        };
        s.check()?;
        Ok(s)
    }

    /// Ideal state and observables for `θ`, with the chosen ancilla realization.
    pub fn ideal(theta: Angle, ancilla: AncillaRealization) -> Self {
        let m = ideal_measurements_with(theta, ancilla);
        BellScenario {
            state: full_state(theta, ancilla),
            alice: m.alice,
            bob: m.bob,
            theta,
        }
    }

    fn check(&self) -> Result<()> {
        if self.alice.len() < 3 || self.bob.len() < 6 {
            return Err(Error::Dimension(format!(
                "need ≥3 Alice and ≥6 Bob observables, got {} and {}",
                self.alice.len(),
                self.bob.len()
            )));
        }
        let da = self.alice[0].dim();
        let db = self.bob[0].dim();
        if self.alice.iter().any(|o| o.dim() != da) || self.bob.iter().any(|o| o.dim() != db) {
            return Err(Error::Dimension(
                "observables on one side differ in size".into(),
            ));
        }
        if da * db != self.state.dim() {
            return Err(Error::Dimension(format!(
                "{da} x {db} observables on a state of dimension {}",
                self.state.dim()
            )));
        }
        Ok(())
    }

    fn id_a(&self) -> CMat {
        CMat::identity(self.alice[0].dim())
    }

    fn id_b(&self) -> CMat {
        CMat::identity(self.bob[0].dim())
    }

    /// `<A_x>` (zero-based `x`).
    pub fn alice_marginal(&self, x: usize) -> f64 {
        self.state.expect(&kron(self.alice[x].op(), &self.id_b()))
    }

    /// `<B_y>` (zero-based `y`).
    pub fn bob_marginal(&self, y: usize) -> f64 {
        self.state.expect(&kron(&self.id_a(), self.bob[y].op()))
    }

    /// `<A_x ⊗ B_y>` (zero-based indices).
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        self.state
            .expect(&kron(self.alice[x].op(), self.bob[y].op()))
    }

    /// Replaces Alice's qubit part of observable `x` by `U A U†`, where
    /// `U = exp(-i ζ σ/2) ⊗ I` rotates about the Pauli axis `axis` (0=X, 1=Y, 2=Z).
    pub fn with_rotated_alice(&self, x: usize, axis: usize, zeta: f64) -> Result<Self> {
        let sigma = [paulis::x(), paulis::y(), paulis::z()][axis].clone();
        let u_q =
            paulis::id().scale_real((zeta / 2.0).cos()) - sigma.scale(c(0.0, (zeta / 2.0).sin()));
        let anc = self.alice[x].dim() / 2;
        let u = kron(&u_q, &CMat::identity(anc));
        let rotated = u.matmul(self.alice[x].op()).matmul(&u.adjoint());
        let mut s = self.clone();
        s.alice[x] = Dichotomic::new(rotated.hermitian_part(), format!("A{}(ζ)", x + 1))?;
        Ok(s)
    }
}

/// Ideal values `I_β = J_β = 2√2 √(1 + β²/4)`, `S = 2√2 sinθ`.
pub fn ideal_bell_values(theta: Angle) -> (f64, f64, f64) {
    let beta = theta.beta();
    let ij = 2.0 * SQRT_2 * (1.0 + beta * beta / 4.0).sqrt();
    (ij, ij, 2.0 * SQRT_2 * theta.sin())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellValues {
    pub theta: f64,
    pub beta: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub ideal_i: f64,
    pub ideal_j: f64,
    pub ideal_s: f64,
    /// Absolute differences `|I - I*|, |J - J*|, |S - S*|`.
    pub residuals: [f64; 3],
}

impl BellValues {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Evaluates the three Bell expressions on a scenario and compares them with
/// their ideal values at the scenario's `θ`.
pub fn eval_bell(s: &BellScenario) -> Result<BellValues> {
    s.check()?;
    let beta = s.theta.beta();
    let e = |x: usize, y: usize| s.correlator(x, y);
    // zero-based: A1..A3 -> 0..2, B1..B6 -> 0..5
    let i = beta * s.alice_marginal(0) + e(0, 0) + e(0, 1) + e(1, 0) - e(1, 1);
    let j = beta * s.alice_marginal(0) + e(0, 2) + e(0, 3) + e(2, 2) - e(2, 3);
    let sv = e(1, 4) + e(1, 5) + e(2, 4) - e(2, 5);
    let (ii, ij, is) = ideal_bell_values(s.theta);
    Ok(BellValues {
        theta: s.theta.radians(),
        beta,
        i,
        j,
        s: sv,
        ideal_i: ii,
        ideal_j: ij,
        ideal_s: is,
        residuals: [(i - ii).abs(), (j - ij).abs(), (sv - is).abs()],
    })
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..2.0).contains(&beta) || !beta.is_finite() {
        return Err(Error::BetaOutOfRange(beta));
    }
    Ok(())
}

/// `β Z⊗I + √2√(1+β²/4) Z⊗Z + √2√(1-β²/4) X⊗X`, the qubit Bell operator for
/// the optimal measurements.
pub fn bell_operator_i(beta: f64) -> Result<CMat> {
    check_beta(beta)?;
    let (i, x, z) = (paulis::id(), paulis::x(), paulis::z());
    let q = beta * beta / 4.0;
    Ok(kron(&z, &i).scale_real(beta)
        + kron(&z, &z).scale_real(SQRT_2 * (1.0 + q).sqrt())
        + kron(&x, &x).scale_real(SQRT_2 * (1.0 - q).sqrt()))
}

/// Qubit Bell operator `β Z⊗I + Z⊗(B₁+B₂) + X⊗(B₁-B₂)` with `A₂ = X` and
/// Bob's pair parameterized by the angle `μ`: `B₁±B₂ = 2cos(μ/2)Z, 2sin(μ/2)X`.
fn bell_operator_mu(beta: f64, mu: f64) -> CMat {
    let (i, x, z) = (paulis::id(), paulis::x(), paulis::z());
    kron(&z, &i).scale_real(beta)
        + kron(&z, &z).scale_real(2.0 * (mu / 2.0).cos())
        + kron(&x, &x).scale_real(2.0 * (mu / 2.0).sin())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub beta: f64,
    /// `θ` recovered from `β`.
    pub theta: f64,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// `2√2√(1+β²/4)`.
    pub expected_top: f64,
    /// Max deviation of the spectrum from `(+t, 0, 0, -t)`.
    pub eigenvalue_residual: f64,
    /// `|<ψ_θ|v_top>|²`.
    pub fidelity: f64,
    /// `max|𝓘_β - t(ψ_θ - φ_θ)|`.
    pub spectral_form_residual: f64,
    /// `√((1+β²/4)/2)`.
    pub cos_half_mu: f64,
    /// `cos(μ/2)` at the numerically located maximum of the top eigenvalue over `μ`.
    pub cos_half_mu_numeric: f64,
}

impl SpectralReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.eigenvalue_residual <= tol
            && self.fidelity >= 1.0 - tol
            && self.spectral_form_residual <= tol
    }
}

fn top_eigenvalue(m: &CMat) -> f64 {
    eigh(m).expect("Hermitian by construction").values[0]
}

/// Golden-section search for the `μ ∈ [0, π]` maximizing the top eigenvalue.
fn optimal_mu(beta: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let f = |mu: f64| top_eigenvalue(&bell_operator_mu(beta, mu));
    let (mut a, mut b) = (0.0, std::f64::consts::PI);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-10 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// Spectral self-test of the qubit Bell operator at `β`.
pub fn spectral_selftest(beta: f64) -> Result<SpectralReport> {
    let op = bell_operator_i(beta)?;
    let theta = theta_from_beta(beta)?;
    let eg = eigh(&op)?;
    let t = 2.0 * SQRT_2 * (1.0 + beta * beta / 4.0).sqrt();
    let expected = [t, 0.0, 0.0, -t];
    let eigenvalue_residual = eg
        .values
        .iter()
        .zip(expected)
        .map(|(v, e)| (v - e).abs())
        .fold(0.0, f64::max);
    let fidelity = inner(&psi_theta_ket(theta), &eg.vector(0)).norm_sqr();
    let spectral = (psi_theta(theta).rho() - phi_theta(theta).rho()).scale_real(t);
    let spectral_form_residual = op.max_abs_diff(&spectral);
    Ok(SpectralReport {
        beta,
        theta: theta.radians(),
        eigenvalues: eg.values,
        expected_top: t,
        eigenvalue_residual,
        fidelity,
        spectral_form_residual,
        cos_half_mu: ((1.0 + beta * beta / 4.0) / 2.0).sqrt(),
        cos_half_mu_numeric: (optimal_mu(beta) / 2.0).cos(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct B7Report {
    /// `sinθ Tr[B₇ · ½X⊗σ_B']`.
    pub correlation: f64,
    /// `<A₂ ⊗ B₇>` evaluated directly on `ψ_θ ⊗ (I/d ⊗ σ_B')`.
    pub direct_correlation: f64,
    pub target: f64,
    pub saturates: bool,
    pub is_x_tensor_i: bool,
}

/// Checks whether a candidate `B₇` reaches `<A₂B₇> = sinθ`, and whether that
/// happens exactly when `B₇ = X ⊗ I`. Requires a full-rank `σ_B'`.
pub fn verify_b7_extraction(
    theta: Angle,
    candidate: &Dichotomic,
    sigma_bprime: &QState,
) -> Result<B7Report> {
    let sb = sigma_bprime.rho();
    let db = sb.rows();
    if candidate.dim() != 2 * db {
        return Err(Error::Dimension(format!(
            "B7 of size {} for ancilla of dimension {db}",
            candidate.dim()
        )));
    }
    let min_eig = sigma_bprime.min_eigenvalue();
    if min_eig <= PSD_TOL {
        return Err(Error::RankDeficient {
            min_eigenvalue: min_eig,
        });
    }
    let x = paulis::x();
    let half_x_sigma = kron(&x.scale_real(0.5), sb);
    let correlation = theta.sin() * candidate.op().expect(&half_x_sigma);

    // A₂ = X ⊗ I_A' ignores the A' ancilla, so any σ_{A'B'} with marginal σ_B' will do.
    let sigma_ab = kron(&CMat::identity(2).scale_real(0.5), sb);
    let rho = psi_theta(theta)
        .tensor(&QState::new(
            sigma_ab,
            crate::SubsystemShape::unlabelled(&[2, db]),
        )?)
        .permute(&[0, 2, 1, 3])?;
    let a2 = kron(&x, &CMat::identity(2));
    let direct_correlation = rho.expect(&kron(&a2, candidate.op()));

    let target = theta.sin();
    let x_i = kron(&x, &CMat::identity(db));
    Ok(B7Report {
        correlation,
        direct_correlation,
        target,
        saturates: (correlation - target).abs() <= 1e-10,
        is_x_tensor_i: candidate.op().max_abs_diff(&x_i) <= 1e-10,
    })
}

/// Joint distribution of `A₃` and `B₇` in the order `(++, +-, -+, --)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveJoint {
    pub theta: f64,
    pub ancilla: AncillaRealization,
    pub probs: [f64; 4],
    pub min_entropy_bits: f64,
}

/// `P(ab|37) = ¼<(I + aA₃) ⊗ (I + bB₇)>` on `ψ_θ ⊗ σ_{A'B'}`.
pub fn projective_joint_distribution(
    theta: Angle,
    ancilla: AncillaRealization,
) -> Result<ProjectiveJoint> {
    let m = ideal_measurements_with(theta, ancilla);
    let rho = full_state(theta, ancilla);
    let b7 = ideal_b7();
    let a3 = &m.alice[2];
    let mut probs = [0.0; 4];
    for (k, (a, b)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .into_iter()
        .enumerate()
    {
        probs[k] = rho.expect(&kron(&a3.projector(a), &b7.projector(b)));
    }
    Ok(ProjectiveJoint {
        theta: theta.radians(),
        ancilla,
        probs,
        min_entropy_bits: min_entropy(&probs)?,
    })
}

/// Alice's adjusted tetrahedral POVM on her marginal of `ψ_θ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalPovmReport {
    pub theta: f64,
    pub probs: Vec<f64>,
    pub min_entropy_bits: f64,
}

pub fn local_povm_distribution(theta: Angle) -> Result<LocalPovmReport> {
    let p = adjusted_tetrahedral(theta);
    let rho_a = psi_theta(theta).marginal(&[0])?;
    let probs = p.probabilities(rho_a.rho());
    Ok(LocalPovmReport {
        theta: theta.radians(),
        min_entropy_bits: min_entropy(&probs)?,
        probs,
    })
}

/// Joint statistics of the near-Y tetrahedral POVM (Alice) and the modified
/// Mercedes POVM (Bob) on `ψ_θ`. As `ε → 0` every entry tends to at most 1/12.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalPovmReport {
    pub theta: f64,
    pub epsilon: f64,
    /// 4 x 3, rows indexed by Alice's outcome.
    pub joint: Vec<Vec<f64>>,
    pub max_entry: f64,
    /// `max_entry - 1/12`.
    pub deviation: f64,
    pub min_entropy_bits: f64,
    /// `log₂ 12`, the limiting value.
    pub target_bits: f64,
}

pub fn global_povm_distribution(theta: Angle, epsilon: f64) -> Result<GlobalPovmReport> {
    let alice = near_y_tetrahedral(epsilon)?;
    let bob = modified_mercedes(theta);
    let psi = psi_theta(theta);
    let joint: Vec<Vec<f64>> = alice
        .elements()
        .iter()
        .map(|a| {
            bob.elements()
                .iter()
                .map(|b| psi.expect(&kron(a, b)))
                .collect()
        })
        .collect();
    let flat: Vec<f64> = joint.iter().flatten().copied().collect();
    let max_entry = flat.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(GlobalPovmReport {
        theta: theta.radians(),
        epsilon,
        deviation: max_entry - 1.0 / 12.0,
        min_entropy_bits: min_entropy(&flat)?,
        target_bits: 12f64.log2(),
        max_entry,
        joint,
    })
}
