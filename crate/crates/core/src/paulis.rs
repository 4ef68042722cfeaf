//! Single-qubit Pauli operators.
//!
//! `Z = diag(1, -1)`, `X` swaps the basis states and `Y|0> = i|1>`.

use crate::matkernel::{c, CMat};

pub fn id() -> CMat {
    CMat::identity(2)
}

pub fn x() -> CMat {
    CMat::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn y() -> CMat {
    CMat::from_vec(
        2,
        2,
        vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
    )
    .unwrap()
}

pub fn z() -> CMat {
    CMat::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// `(I, X, Y, Z)`, the index order used for correlation tables.
pub fn basis() -> [CMat; 4] {
    [id(), x(), y(), z()]
}

/// `(I + n·σ)/2` scaled by `weight`.
pub fn bloch_element(weight: f64, n: [f64; 3]) -> CMat {
    let [nx, ny, nz] = n;
    (id() + x().scale_real(nx) + y().scale_real(ny) + z().scale_real(nz)).scale_real(weight / 2.0)
}

/// Bloch coefficients `(r_I, r_X, r_Y, r_Z)` with `m = Σ r_μ σ_μ`, for Hermitian `m`.
pub fn coefficients(m: &CMat) -> [f64; 4] {
    let b = basis();
    [0, 1, 2, 3].map(|k| b[k].trace_product(m).re / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_convention() {
        let ket0 = [c(1.0, 0.0), c(0.0, 0.0)];
        let out = y().apply(&ket0);
        assert_eq!(out, vec![c(0.0, 0.0), c(0.0, 1.0)]);
    }

    #[test]
    fn algebra() {
        let i = id();
        for p in [x(), y(), z()] {
            assert!(p.matmul(&p).max_abs_diff(&i) < 1e-15);
        }
        // XY = iZ
        assert!(x().matmul(&y()).max_abs_diff(&z().scale(c(0.0, 1.0))) < 1e-15);
    }

    #[test]
    fn coefficients_roundtrip() {
        let m = bloch_element(0.7, [0.6, 0.0, 0.8]);
        let r = coefficients(&m);
        assert!((r[0] - 0.35).abs() < 1e-15);
        assert!((r[1] - 0.21).abs() < 1e-15);
        assert!(r[2].abs() < 1e-15);
        assert!((r[3] - 0.28).abs() < 1e-15);
    }
}
