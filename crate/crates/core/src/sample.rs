//! Seeded random objects for property tests, acceptance runs and the CLI.
//!
//! All samplers draw from a caller-supplied RNG so a seed fully determines a run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matkernel::{c, inner, ket_norm, CMat, C64};
use crate::qobjects::{bloch_ket, Dichotomic, Povm};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector in `C^d`.
pub fn haar_ket<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| gaussian_c(rng)).collect();
    let n = ket_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Haar-random unitary via Gram-Schmidt on a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| gaussian_c(rng)).collect();
        for u in &cols {
            let p = inner(u, &v);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= p * ui;
            }
        }
        let n = ket_norm(&v);
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    let mut u = CMat::zeros(d, d);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE up to scale).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = gaussian_c(rng);
        }
    }
    m.hermitian_part()
}

/// `U diag(±1) U†` with random signs and a Haar `U`.
pub fn random_dichotomic<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Dichotomic {
    let u = haar_unitary(rng, d);
    let signs: Vec<f64> = (0..d)
        .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let op = u.matmul(&CMat::diag_real(&signs)).matmul(&u.adjoint());
    Dichotomic::new(op.hermitian_part(), "random").expect("unitary conjugate of a sign matrix")
}

/// Random density matrix of the given rank: `G G† / Tr`, `G` Ginibre `d x rank`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> CMat {
    let mut g = CMat::zeros(d, rank);
    for i in 0..d {
        for j in 0..rank {
            g[(i, j)] = gaussian_c(rng);
        }
    }
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    m.scale_real(1.0 / t).hermitian_part()
}

fn random_unit3<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return v.map(|x| x / n);
        }
    }
}

/// Solves the 4x4 real system `a w = b` by Gaussian elimination with partial pivoting.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..4 {
            let f = a[r][col] / a[col][col];
            for k in col..4 {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut w = [0.0; 4];
    for r in (0..4).rev() {
        let s: f64 = (r + 1..4).map(|k| a[r][k] * w[k]).sum();
        w[r] = (b[r] - s) / a[r][r];
    }
    Some(w)
}

/// Smallest weight accepted by [`random_extremal_povm`]; keeps the samples away
/// from degenerate (nearly three-outcome) configurations.
pub const MIN_EXTREMAL_WEIGHT: f64 = 0.02;

/// Random extremal rank-one qubit POVM with 2, 3 or 4 outcomes.
///
/// - 2 outcomes: a Haar-random projective measurement.
/// - 3 outcomes: two random Bloch directions with random positive weights;
///   the third direction and weight close the sum, then all weights are scaled
///   so the trace is 2.
/// - 4 outcomes: four Haar-random kets; the positive weights making the sum
///   the identity solve a 4x4 linear system, resampled until all weights
///   exceed [`MIN_EXTREMAL_WEIGHT`].
pub fn random_extremal_povm<R: Rng + ?Sized>(rng: &mut R, outcomes: usize) -> Povm {
    assert!(
        (2..=4).contains(&outcomes),
        "qubit extremal POVMs have 2-4 outcomes"
    );
    match outcomes {
        2 => {
            let n = random_unit3(rng);
            Povm::from_kets(vec![bloch_ket(1.0, n), bloch_ket(1.0, n.map(|x| -x))])
                .expect("non-empty")
        }
        3 => loop {
            let n1 = random_unit3(rng);
            let n2 = random_unit3(rng);
            let w1: f64 = rng.gen_range(0.2..1.0);
            let w2: f64 = rng.gen_range(0.2..1.0);
            let v = [0, 1, 2].map(|k| w1 * n1[k] + w2 * n2[k]);
            let w3 = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if w3 < 0.1 {
                continue;
            }
            let n3 = v.map(|x| -x / w3);
            let s = 2.0 / (w1 + w2 + w3);
            return Povm::from_kets(vec![
                bloch_ket(w1 * s, n1),
                bloch_ket(w2 * s, n2),
                bloch_ket(w3 * s, n3),
            ])
            .expect("non-empty");
        },
        _ => loop {
            let ns: Vec<[f64; 3]> = (0..4).map(|_| random_unit3(rng)).collect();
            // rows: identity weight, then x, y, z Bloch components
            let mut a = [[0.0; 4]; 4];
            for (j, n) in ns.iter().enumerate() {
                a[0][j] = 1.0;
                a[1][j] = n[0];
                a[2][j] = n[1];
                a[3][j] = n[2];
            }
            let Some(w) = solve4(a, [2.0, 0.0, 0.0, 0.0]) else {
                continue;
            };
            if w.iter().any(|&x| x < MIN_EXTREMAL_WEIGHT) {
                continue;
            }
            let kets = ns.iter().zip(w).map(|(n, wi)| bloch_ket(wi, *n)).collect();
            return Povm::from_kets(kets).expect("non-empty");
        },
    }
}
