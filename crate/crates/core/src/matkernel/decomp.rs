use nalgebra::{DMatrix, SymmetricEigen, SVD};

use super::{CMat, C64};
use crate::error::{Error, Result};
use crate::tol::{HERM_TOL, NULL_SPACE_TOL};

fn to_na(m: &CMat) -> DMatrix<C64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigh {
    /// Sorted in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMat,
}

impl Eigh {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column_vec(k)
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for j in 0..n {
                scaled[(i, j)] *= self.values[j];
            }
        }
        scaled.matmul(&self.vectors.adjoint())
    }
}

/// Hermitian eigendecomposition. Fails when `max|M - M†| > herm_tol`.
pub fn eigh(m: &CMat) -> Result<Eigh> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigh of {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermitian_deviation();
    if dev > HERM_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = m.rows();
    let eig = SymmetricEigen::new(to_na(&m.hermitian_part()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (new_col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_col)] = eig.eigenvectors[(i, k)];
        }
    }
    Ok(Eigh { values, vectors })
}

/// Singular values, descending.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let svd = SVD::new(to_na(m), false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).iter().sum()
}

/// Orthonormal basis of `{c : Σ_a c_a M_a = 0}`.
///
/// Each matrix is flattened into a column; right singular vectors whose
/// singular value is at most `tol` span the null space. Returns an empty list
/// when the matrices are linearly independent at that threshold.
pub fn null_space(mats: &[CMat], tol: f64) -> Result<Vec<Vec<C64>>> {
    let k = mats.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let (r, c) = (mats[0].rows(), mats[0].cols());
    if mats.iter().any(|m| (m.rows(), m.cols()) != (r, c)) {
        return Err(Error::Dimension(
            "null_space: matrices differ in shape".into(),
        ));
    }
    // Pad with zero rows so the thin SVD still yields a full k x k V.
    let rows = (r * c).max(k);
    let mut a = DMatrix::<C64>::zeros(rows, k);
    for (col, m) in mats.iter().enumerate() {
        for (row, z) in m.as_slice().iter().enumerate() {
            a[(row, col)] = *z;
        }
    }
    let svd = SVD::new(a, false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol {
            basis.push((0..k).map(|j| v_t[(i, j)].conj()).collect());
        }
    }
    Ok(basis)
}

/// [`null_space`] at the crate-wide threshold.
pub fn null_space_default(mats: &[CMat]) -> Result<Vec<Vec<C64>>> {
    null_space(mats, NULL_SPACE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::{c, ket_norm, kron};
    use crate::paulis;

    #[test]
    fn eigh_of_z() {
        let e = eigh(&paulis::z()).unwrap();
        assert_eq!(e.values.len(), 2);
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = CMat::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigh_of_chsh_operator() {
        // √2 (ZZ + XX) has spectrum (2√2, 0, 0, -2√2)
        let op = (kron(&paulis::z(), &paulis::z()) + kron(&paulis::x(), &paulis::x()))
            .scale_real(2f64.sqrt());
        let e = eigh(&op).unwrap();
        let r = 2.0 * 2f64.sqrt();
        let expect = [r, 0.0, 0.0, -r];
        for (v, x) in e.values.iter().zip(expect) {
            assert!((v - x).abs() < 1e-12, "{:?}", e.values);
        }
        assert!(e.reconstruct().max_abs_diff(&op) < 1e-12);
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&CMat::zeros(3, 3)), 0.0);
        assert!((trace_norm(&CMat::diag_real(&[3.0, -4.0])) - 7.0).abs() < 1e-14);
        // ½ X ⊗ I/2
        let op = kron(&paulis::x().scale_real(0.5), &paulis::id().scale_real(0.5));
        assert!((trace_norm(&op) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn null_space_examples() {
        let (i, x, z) = (paulis::id(), paulis::x(), paulis::z());
        assert!(null_space_default(&[i.clone(), x.clone(), z])
            .unwrap()
            .is_empty());
        let ns = null_space_default(&[i.clone(), x.clone(), &i + &x]).unwrap();
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert!((ket_norm(v) - 1.0).abs() < 1e-12);
        // proportional to (1, 1, -1)
        let ratio1 = v[1] / v[0];
        let ratio2 = v[2] / v[0];
        assert!((ratio1 - c(1.0, 0.0)).norm() < 1e-12);
        assert!((ratio2 - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn null_space_more_vectors_than_entries() {
        // five 2x1 columns: null space has dimension 3
        let mats: Vec<CMat> = (0..5)
            .map(|k| CMat::from_real(2, 1, &[k as f64, 1.0 + (k * k) as f64]))
            .collect();
        let ns = null_space_default(&mats).unwrap();
        assert_eq!(ns.len(), 3);
        for v in &ns {
            let mut acc = CMat::zeros(2, 1);
            for (m, cf) in mats.iter().zip(v) {
                acc += &m.scale(*cf);
            }
            assert!(acc.max_abs() < 1e-12);
        }
    }
}
