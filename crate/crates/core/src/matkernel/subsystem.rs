use serde::{Deserialize, Serialize};

use super::CMat;
use crate::error::{Error, Result};

/// Ordered tensor-factor dimensions of a square operator, with one label per factor.
///
/// The crate-wide convention is `(A, A', B, B')`: Alice's qubit, Alice's
/// ancilla, Bob's qubit, Bob's ancilla, nested as `(A ⊗ A') ⊗ (B ⊗ B')`.
/// Any other ordering that shows up (for instance `ψ_θ ⊗ σ_{A'B'}`, which is
/// naturally `(A, B, A', B')`) is moved into place with [`permute_subsystems`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemShape {
    pub dims: Vec<usize>,
    pub labels: Vec<String>,
}

impl SubsystemShape {
    pub fn new<S: AsRef<str>>(dims: &[usize], labels: &[S]) -> Result<Self> {
        if dims.len() != labels.len() {
            return Err(Error::Dimension(format!(
                "{} dims but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::Dimension("zero subsystem dimension".into()));
        }
        Ok(SubsystemShape {
            dims: dims.to_vec(),
            labels: labels.iter().map(|s| s.as_ref().to_string()).collect(),
        })
    }

    /// Unlabelled shape; labels default to `s0, s1, ...`.
    pub fn unlabelled(dims: &[usize]) -> Self {
        SubsystemShape {
            dims: dims.to_vec(),
            labels: (0..dims.len()).map(|i| format!("s{i}")).collect(),
        }
    }

    pub fn single(dim: usize, label: &str) -> Self {
        SubsystemShape {
            dims: vec![dim],
            labels: vec![label.to_string()],
        }
    }

    /// `(A, B)` qubit pair.
    pub fn qubits_ab() -> Self {
        Self::new(&[2, 2], &["A", "B"]).unwrap()
    }

    /// Canonical `(A, A', B, B')` layout.
    pub fn canonical(ancilla_a: usize, ancilla_b: usize) -> Self {
        Self::new(&[2, ancilla_a, 2, ancilla_b], &["A", "A'", "B", "B'"]).unwrap()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Concatenation, as for the shape of `a ⊗ b`.
    pub fn concat(&self, other: &SubsystemShape) -> SubsystemShape {
        let mut dims = self.dims.clone();
        dims.extend(&other.dims);
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        SubsystemShape { dims, labels }
    }

    fn check(&self, m: &CMat) -> Result<()> {
        if !m.is_square() || m.rows() != self.total() {
            return Err(Error::Dimension(format!(
                "shape {:?} (total {}) does not fit a {}x{} matrix",
                self.dims,
                self.total(),
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    fn digits(&self, mut idx: usize, out: &mut [usize]) {
        for k in (0..self.dims.len()).rev() {
            out[k] = idx % self.dims[k];
            idx /= self.dims[k];
        }
    }
}

/// Reduced operator on the subsystems listed in `keep` (in increasing order of
/// position); every other factor is traced out. An empty `keep` yields the 1x1 trace.
pub fn partial_trace(m: &CMat, shape: &SubsystemShape, keep: &[usize]) -> Result<CMat> {
    shape.check(m)?;
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= shape.len()) {
        return Err(Error::Dimension(format!(
            "invalid keep set {keep:?} for {} subsystems",
            shape.len()
        )));
    }
    let n = shape.len();
    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| shape.dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let mut out = CMat::zeros(out_dim, out_dim);
    let mut is_kept = vec![false; n];
    for &k in &keep_sorted {
        is_kept[k] = true;
    }

    let total = shape.total();
    let mut di = vec![0usize; n];
    let mut dj = vec![0usize; n];
    for i in 0..total {
        shape.digits(i, &mut di);
        for j in 0..total {
            shape.digits(j, &mut dj);
            // traced factors must agree
            if (0..n).any(|k| !is_kept[k] && di[k] != dj[k]) {
                continue;
            }
            let mut oi = 0;
            let mut oj = 0;
            for &k in &keep_sorted {
                oi = oi * shape.dims[k] + di[k];
                oj = oj * shape.dims[k] + dj[k];
            }
            out[(oi, oj)] += m[(i, j)];
        }
    }
    Ok(out)
}

/// Reorders tensor factors: factor `j` of the result is factor `order[j]` of the input.
pub fn permute_subsystems(
    m: &CMat,
    shape: &SubsystemShape,
    order: &[usize],
) -> Result<(CMat, SubsystemShape)> {
    shape.check(m)?;
    let n = shape.len();
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::Dimension(format!(
            "permutation {order:?} of {n} factors"
        )));
    }
    for &o in order {
        if o >= n || seen[o] {
            return Err(Error::Dimension(format!("not a permutation: {order:?}")));
        }
        seen[o] = true;
    }
    let new_shape = SubsystemShape {
        dims: order.iter().map(|&o| shape.dims[o]).collect(),
        labels: order.iter().map(|&o| shape.labels[o].clone()).collect(),
    };
    let old_strides = shape.strides();
    let total = shape.total();

    // map[new_index] = old_index
    let mut map = vec![0usize; total];
    let mut digits = vec![0usize; n];
    for (new_idx, slot) in map.iter_mut().enumerate() {
        new_shape.digits(new_idx, &mut digits);
        *slot = digits
            .iter()
            .zip(order)
            .map(|(&d, &o)| d * old_strides[o])
            .sum();
    }
    let mut out = CMat::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out[(i, j)] = m[(map[i], map[j])];
        }
    }
    Ok((out, new_shape))
}
