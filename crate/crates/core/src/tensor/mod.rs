//! Dense tensor semantics of diagrams.
//!
//! Index convention, used everywhere in the crate: a tensor has one index per
//! boundary port, inputs left-to-right followed by outputs left-to-right,
//! stored row-major (the first index is the most significant). A quantum wire
//! of base dimension `d` carries a single index of size `d * d` laid out as
//! `ket * d + bra`.

mod contract;
mod export;

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::C64;

pub use contract::{contract_order, evaluate, evaluate_with_plan, naive_cost, random_plan, ContractionPlan};
pub use export::{parse_columnar, to_columnar};

/// Largest number of entries any tensor (final or intermediate) may hold.
pub const MAX_ENTRIES: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("tensor with {0} entries exceeds the dense limit of 2^20")]
    TooLarge(usize),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("shape mismatch: expected {expected} entries, got {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("invalid contraction plan: {0}")]
    InvalidPlan(String),
    #[error("malformed tensor text at line {line}: {msg}")]
    Format { line: usize, msg: String },
}

pub type TensorResult<T> = Result<T, TensorError>;

/// Which equality a comparison means: exact (within tolerance) or up to a
/// non-zero global scalar.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqualityMode {
    Strict,
    UpToScalar,
}

impl fmt::Display for EqualityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Strict => write!(f, "strict"),
            Self::UpToScalar => write!(f, "up-to-scalar"),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericTolerance {
    pub absolute: f64,
    pub mode: EqualityMode,
}

impl NumericTolerance {
    pub fn strict(absolute: f64) -> Self {
        assert!(absolute > 0.0, "tolerance must be positive");
        Self { absolute, mode: EqualityMode::Strict }
    }

    pub fn up_to_scalar(absolute: f64) -> Self {
        assert!(absolute > 0.0, "tolerance must be positive");
        Self { absolute, mode: EqualityMode::UpToScalar }
    }
}

impl Default for NumericTolerance {
    fn default() -> Self { Self::strict(crate::DEFAULT_TOL) }
}

/// A dense complex tensor with inputs-then-outputs index order.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    n_in: usize,
    data: Vec<C64>,
}

impl Tensor {
    pub fn new(in_shape: &[usize], out_shape: &[usize], data: Vec<C64>) -> TensorResult<Self> {
        let shape: Vec<usize> = in_shape.iter().chain(out_shape).copied().collect();
        let expected = shape.iter().product::<usize>();
        if expected != data.len() {
            return Err(TensorError::ShapeMismatch { expected, found: data.len() });
        }
        if expected > MAX_ENTRIES {
            return Err(TensorError::TooLarge(expected));
        }
        Ok(Self { shape, n_in: in_shape.len(), data })
    }

    pub fn zeros(in_shape: &[usize], out_shape: &[usize]) -> Self {
        let n = in_shape.iter().chain(out_shape).product::<usize>();
        Self::new(in_shape, out_shape, vec![C64::new(0.0, 0.0); n]).expect("size checked by caller")
    }

    pub fn scalar(value: C64) -> Self {
        Self { shape: Vec::new(), n_in: 0, data: vec![value] }
    }

    /// Real-valued constructor, handy for fixtures.
    pub fn from_real(in_shape: &[usize], out_shape: &[usize], data: &[f64]) -> TensorResult<Self> {
        Self::new(in_shape, out_shape, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// A state `0 -> n` from a vector.
    pub fn state(data: Vec<C64>) -> Self {
        let n = data.len();
        Self::new(&[], &[n], data).expect("vector fits")
    }

    /// Wrap an `n x m` matrix (rows = outputs) as a tensor `m -> n`, splitting
    /// the row and column spaces into the given factor shapes.
    pub fn from_matrix(m: &DMatrix<C64>, in_shape: &[usize], out_shape: &[usize]) -> TensorResult<Self> {
        let cols = in_shape.iter().product::<usize>();
        let rows = out_shape.iter().product::<usize>();
        if m.nrows() != rows || m.ncols() != cols {
            return Err(TensorError::ShapeMismatch { expected: rows * cols, found: m.len() });
        }
        let mut data = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                data.push(m[(r, c)]);
            }
        }
        Self::new(in_shape, out_shape, data)
    }

    /// The matrix view: rows index the outputs, columns the inputs.
    pub fn to_matrix(&self) -> DMatrix<C64> {
        let cols = self.in_size();
        let rows = self.out_size();
        DMatrix::from_fn(rows, cols, |r, c| self.data[c * rows + r])
    }

    pub fn shape(&self) -> &[usize] { &self.shape }

    pub fn in_shape(&self) -> &[usize] { &self.shape[..self.n_in] }

    pub fn out_shape(&self) -> &[usize] { &self.shape[self.n_in..] }

    pub fn n_inputs(&self) -> usize { self.n_in }

    pub fn n_outputs(&self) -> usize { self.shape.len() - self.n_in }

    pub fn in_size(&self) -> usize { self.in_shape().iter().product() }

    pub fn out_size(&self) -> usize { self.out_shape().iter().product() }

    pub fn len(&self) -> usize { self.data.len() }

    pub fn is_empty(&self) -> bool { self.data.is_empty() }

    pub fn data(&self) -> &[C64] { &self.data }

    pub fn into_data(self) -> Vec<C64> { self.data }

    /// Entry at a full multi-index (inputs then outputs).
    pub fn get(&self, index: &[usize]) -> C64 {
        self.data[flat_index(&self.shape, index)]
    }

    /// The value of a `0 -> 0` tensor.
    pub fn as_scalar(&self) -> Option<C64> {
        if self.shape.is_empty() { Some(self.data[0]) } else { None }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { shape: self.shape.clone(), n_in: self.n_in, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn conj(&self) -> Self {
        Self { shape: self.shape.clone(), n_in: self.n_in, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    /// Swap the input and output groups, keeping the order inside each group.
    pub fn transpose(&self) -> Self {
        let n_out = self.n_outputs();
        let perm: Vec<usize> = (self.n_in..self.shape.len()).chain(0..self.n_in).collect();
        let mut t = self.permute(&perm);
        t.n_in = n_out;
        t
    }

    pub fn dagger(&self) -> Self { self.transpose().conj() }

    /// Reorder the indices: result index `k` is old index `perm[k]`. The
    /// input/output split is kept at the same position.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.shape.len());
        let new_shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let data = permute_data(&self.data, &self.shape, perm);
        Self { shape: new_shape, n_in: self.n_in, data }
    }

    /// Re-split the index list into a new number of inputs.
    pub fn with_inputs(&self, n_in: usize) -> Self {
        assert!(n_in <= self.shape.len());
        Self { shape: self.shape.clone(), n_in, data: self.data.clone() }
    }

    /// Kronecker product `self ⊗ other`: inputs of self, inputs of other,
    /// outputs of self, outputs of other.
    pub fn kron(&self, other: &Tensor) -> TensorResult<Self> {
        let total = self.len() * other.len();
        if total > MAX_ENTRIES {
            return Err(TensorError::TooLarge(total));
        }
        // Outer product with index order [self..., other...], then move the
        // inputs of `other` in front of the outputs of `self`.
        let mut data = Vec::with_capacity(total);
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        let shape: Vec<usize> = self.shape.iter().chain(&other.shape).copied().collect();
        let ns = self.shape.len();
        let mut perm: Vec<usize> = (0..self.n_in).collect();
        perm.extend(ns..ns + other.n_in);
        perm.extend(self.n_in..ns);
        perm.extend(ns + other.n_in..shape.len());
        let outer = Self { shape, n_in: 0, data };
        let mut t = outer.permute(&perm);
        t.n_in = self.n_in + other.n_in;
        Ok(t)
    }

    pub fn max_abs(&self) -> f64 { self.data.iter().map(|x| x.norm()).fold(0.0, f64::max) }

    pub fn frobenius_norm(&self) -> f64 { self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() }

    /// Largest entrywise deviation; `None` when the shapes differ.
    pub fn max_abs_diff(&self, other: &Tensor) -> Option<f64> {
        if self.shape != other.shape || self.n_in != other.n_in {
            return None;
        }
        Some(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Deviation of `other` from `self` under the given mode. For
    /// [`EqualityMode::UpToScalar`] the scalar is estimated from the entry of
    /// largest magnitude in `self`; `None` when shapes differ or when no
    /// non-zero scalar relates the two.
    pub fn deviation(&self, other: &Tensor, mode: EqualityMode, tol: f64) -> Option<f64> {
        match mode {
            EqualityMode::Strict => self.max_abs_diff(other),
            EqualityMode::UpToScalar => {
                if self.shape != other.shape || self.n_in != other.n_in {
                    return None;
                }
                let (k, pivot) = self
                    .data
                    .iter()
                    .enumerate()
                    .fold((0, 0.0), |acc, (i, x)| if x.norm() > acc.1 { (i, x.norm()) } else { acc });
                if pivot <= tol {
                    // Both must be numerically zero.
                    return Some(other.max_abs().max(self.max_abs()));
                }
                let lambda = other.data[k] / self.data[k];
                if lambda.norm() <= tol {
                    return None;
                }
                Some(self.data.iter().zip(&other.data).map(|(a, b)| (b - lambda * a).norm()).fold(0.0, f64::max))
            }
        }
    }

    pub fn approx_eq(&self, other: &Tensor, tol: NumericTolerance) -> bool {
        self.deviation(other, tol.mode, tol.absolute).is_some_and(|dev| dev <= tol.absolute)
    }
}

/// Deviation between the evaluations of two diagrams with equal boundaries,
/// `None` if no non-zero scalar relates them in up-to-scalar mode.
pub fn numeric_deviation(a: &crate::Diagram, b: &crate::Diagram, tol: NumericTolerance) -> TensorResult<Option<f64>> {
    if a.inputs() != b.inputs() || a.outputs() != b.outputs() {
        return Err(TensorError::BoundaryMismatch(format!(
            "{:?} -> {:?} against {:?} -> {:?}",
            a.inputs(),
            a.outputs(),
            b.inputs(),
            b.outputs()
        )));
    }
    Ok(evaluate(a)?.deviation(&evaluate(b)?, tol.mode, tol.absolute))
}

/// Whether two diagrams evaluate to equal tensors under `tol`.
pub fn numeric_equal(a: &crate::Diagram, b: &crate::Diagram, tol: NumericTolerance) -> TensorResult<bool> {
    Ok(numeric_deviation(a, b, tol)?.is_some_and(|dev| dev <= tol.absolute))
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_columnar(self))
    }
}

pub(crate) fn flat_index(shape: &[usize], index: &[usize]) -> usize {
    debug_assert_eq!(shape.len(), index.len());
    index.iter().zip(shape).fold(0, |acc, (&i, &s)| {
        debug_assert!(i < s);
        acc * s + i
    })
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut st = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        st[k] = st[k + 1] * shape[k + 1];
    }
    st
}

pub(crate) fn permute_data(data: &[C64], shape: &[usize], perm: &[usize]) -> Vec<C64> {
    if perm.iter().enumerate().all(|(k, &p)| k == p) {
        return data.to_vec();
    }
    let old_strides = strides(shape);
    let new_shape: Vec<usize> = perm.iter().map(|&p| shape[p]).collect();
    let src_strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
    let mut out = Vec::with_capacity(data.len());
    let mut idx = vec![0usize; new_shape.len()];
    let mut src = 0usize;
    for _ in 0..data.len() {
        out.push(data[src]);
        // odometer increment over the new index order
        for k in (0..new_shape.len()).rev() {
            idx[k] += 1;
            src += src_strides[k];
            if idx[k] < new_shape[k] {
                break;
            }
            src -= src_strides[k] * new_shape[k];
            idx[k] = 0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 { C64::new(re, 0.0) }

    #[test]
    fn matrix_round_trip() {
        let t = Tensor::from_real(&[2], &[2], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        let m = t.to_matrix();
        // data is [in, out]: entry (in=0,out=1) is 3.0, which is row 1 col 0
        assert_eq!(m[(1, 0)], c(3.0));
        assert_eq!(m[(0, 1)], c(2.0));
        assert_eq!(Tensor::from_matrix(&m, &[2], &[2]).unwrap(), t);
    }

    #[test]
    fn transpose_swaps_groups() {
        let t = Tensor::from_real(&[2], &[3], &[1., 2., 3., 4., 5., 6.]).unwrap();
        let tt = t.transpose();
        assert_eq!(tt.in_shape(), &[3]);
        assert_eq!(tt.to_matrix(), t.to_matrix().transpose());
        assert_eq!(tt.transpose(), t);
    }

    #[test]
    fn kron_matches_matrix_kronecker() {
        let a = Tensor::from_real(&[2], &[2], &[1., 2., 3., 4.]).unwrap();
        let b = Tensor::from_real(&[2], &[2], &[0., 1., 1., 0.]).unwrap();
        let k = a.kron(&b).unwrap();
        assert_eq!(k.to_matrix(), a.to_matrix().kronecker(&b.to_matrix()));
    }

    #[test]
    fn up_to_scalar_detects_proportional() {
        let a = Tensor::from_real(&[], &[2], &[1.0, 2.0]).unwrap();
        let b = a.scale(C64::new(0.0, 3.0));
        assert!(a.approx_eq(&b, NumericTolerance::up_to_scalar(1e-9)));
        assert!(!a.approx_eq(&b, NumericTolerance::strict(1e-9)));
        let z = Tensor::zeros(&[], &[2]);
        // zero is not a non-zero multiple of a
        assert!(!a.approx_eq(&z, NumericTolerance::up_to_scalar(1e-9)));
        assert!(z.approx_eq(&z, NumericTolerance::up_to_scalar(1e-9)));
    }
}
