//! Dense complex matrices and the handful of decompositions the rest of the
//! crate needs: Kronecker products, partial traces, subsystem permutation,
//! Hermitian eigendecomposition, singular values and null spaces.
//!
//! Everything is row-major `Complex64`. Dimensions stay small (at most 64), so
//! nothing here tries to be clever about allocation.

mod cmat;
mod decomp;
mod subsystem;

pub use cmat::{CMat, C64};
pub use decomp::{eigh, null_space, null_space_default, singular_values, trace_norm, Eigh};
pub use subsystem::{partial_trace, permute_subsystems, SubsystemShape};

/// Shorthand for building a complex scalar.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Euclidean norm of a ket.
pub fn ket_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<u|v>` with the first argument conjugated.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Kronecker product of two kets.
pub fn kron_ket(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = CMat::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Left-to-right Kronecker product of a list of factors.
pub fn kron_all<'a, I>(factors: I) -> CMat
where
    I: IntoIterator<Item = &'a CMat>,
{
    factors
        .into_iter()
        .fold(CMat::identity(1), |acc, m| kron(&acc, m))
}
