//! Dense operators on finite registers of qudits.
//!
//! Qudit 0 is the leftmost, most significant tensor factor: a basis index
//! is the mixed-radix number whose first digit belongs to qudit 0.

mod distance;
pub mod linalg;
mod random;

pub use distance::{fidelity, purified_distance, schmidt_coefficients, trace_distance};
pub use linalg::{CMat, CVec};
pub use random::{derive_seed, haar_state, haar_unitary, random_density_matrix, SeededRng};

use crate::error::{Error, Result};
use crate::C64;
use linalg::{hermiticity_residual, matmul, HERMITIAN_TOL};

pub const MAX_DENSE_DIM: usize = 4096;
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HilbertFactorization {
    dims: Vec<usize>,
}

impl HilbertFactorization {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Factorization(format!("local dimension {d} < 2")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total.saturating_mul(d);
            if total > MAX_DENSE_DIM {
                return Err(Error::DimensionCap { dim: dims.iter().fold(1usize, |a, &b| a.saturating_mul(b)), cap: MAX_DENSE_DIM });
            }
        }
        Ok(Self { dims })
    }

    pub fn qudits(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::qudits(n, 2)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }

    pub fn subsystem(&self, idx: &[usize]) -> Result<Self> {
        check_subset(idx, self.len())?;
        Self::new(idx.iter().map(|&i| self.dims[i]).collect())
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for i in (0..self.dims.len()).rev() {
            out[i] = index % self.dims[i];
            index /= self.dims[i];
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// For each basis index of the permuted register, the index in `self`.
    /// Position `p` of the permuted register holds qudit `order[p]`.
    pub fn permutation_map(&self, order: &[usize]) -> Result<Vec<usize>> {
        check_permutation(order, self.len())?;
        let strides = self.strides();
        let new_dims: Vec<usize> = order.iter().map(|&q| self.dims[q]).collect();
        let total = self.total_dim();
        let mut map = vec![0usize; total];
        let mut digits = vec![0usize; order.len()];
        for slot in map.iter_mut() {
            let mut old = 0;
            for (p, &q) in order.iter().enumerate() {
                old += digits[p] * strides[q];
            }
            *slot = old;
            for p in (0..digits.len()).rev() {
                digits[p] += 1;
                if digits[p] < new_dims[p] {
                    break;
                }
                digits[p] = 0;
            }
        }
        Ok(map)
    }

    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.len())?;
        Self::new(order.iter().map(|&q| self.dims[q]).collect())
    }
}

fn check_subset(idx: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in idx {
        if i >= n || seen[i] {
            return Err(Error::Factorization(format!("invalid subsystem index set {idx:?} for {n} qudits")));
        }
        seen[i] = true;
    }
    Ok(())
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::Factorization(format!("ordering {order:?} is not a permutation of {n} qudits")));
    }
    check_subset(order, n)
}

fn complement(keep: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|i| !keep.contains(i)).collect()
}

#[derive(Clone, Debug)]
pub struct DenseOperator {
    fact: HilbertFactorization,
    mat: CMat,
}

impl DenseOperator {
    pub fn new(fact: HilbertFactorization, mat: CMat) -> Result<Self> {
        let d = fact.total_dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Shape(format!("matrix {}x{} does not match dimension {d}", mat.nrows(), mat.ncols())));
        }
        Ok(Self { fact, mat })
    }

    pub fn identity(fact: HilbertFactorization) -> Self {
        let d = fact.total_dim();
        Self { fact, mat: CMat::identity(d, d) }
    }

    pub fn factorization(&self) -> &HilbertFactorization {
        &self.fact
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermiticity_residual(&self.mat) <= tol
    }

    pub fn adjoint(&self) -> Self {
        Self { fact: self.fact.clone(), mat: self.mat.adjoint() }
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Ok(Self { fact: self.fact.concat(&other.fact)?, mat: self.mat.kronecker(&other.mat) })
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.fact != other.fact {
            return Err(Error::Shape("composing operators on different registers".into()));
        }
        Ok(Self { fact: self.fact.clone(), mat: matmul(&self.mat, &other.mat) })
    }

    /// `u * self * u^dagger` for a matrix on the same register.
    pub fn conjugate_by(&self, u: &CMat) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::Shape("conjugating unitary has the wrong size".into()));
        }
        Ok(Self { fact: self.fact.clone(), mat: linalg::sandwich(u, &self.mat) })
    }

    /// Reorders qudits so that position `p` holds old qudit `order[p]`.
    pub fn permute_qudits(&self, order: &[usize]) -> Result<Self> {
        let map = self.fact.permutation_map(order)?;
        let fact = self.fact.permuted(order)?;
        let d = map.len();
        let mat = CMat::from_fn(d, d, |i, j| self.mat[(map[i], map[j])]);
        Ok(Self { fact, mat })
    }

    /// Traces out every qudit not in `keep`; kept qudits stay in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        check_subset(keep, self.fact.len())?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let traced = complement(&keep, self.fact.len());
        let mut order = keep.clone();
        order.extend_from_slice(&traced);
        let map = self.fact.permutation_map(&order)?;
        let kept_fact = self.fact.subsystem(&keep)?;
        let dk = kept_fact.total_dim();
        let dt = map.len() / dk;
        let mut out = CMat::zeros(dk, dk);
        for j in 0..dk {
            for i in 0..dk {
                let mut s = C64::new(0.0, 0.0);
                for t in 0..dt {
                    s += self.mat[(map[i * dt + t], map[j * dt + t])];
                }
                out[(i, j)] = s;
            }
        }
        Ok(Self { fact: kept_fact, mat: out })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { fact: self.fact.clone(), mat: self.mat.scale(s) }
    }
}

/// Positive semidefinite, unit-trace operator.
#[derive(Clone, Debug)]
pub struct DensityMatrix(DenseOperator);

impl DensityMatrix {
    pub fn new(op: DenseOperator) -> Result<Self> {
        let scale = 1.0 + op.mat.norm();
        if !op.is_hermitian(HERMITIAN_TOL * scale) {
            return Err(Error::InvalidState("operator is not Hermitian".into()));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL * scale || tr.im.abs() > TRACE_TOL * scale {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = linalg::herm_eigenvalues(&op.mat).first().copied().unwrap_or(0.0);
        if min < linalg::CLIP_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self(op))
    }

    pub fn from_matrix(fact: HilbertFactorization, mat: CMat) -> Result<Self> {
        Self::new(DenseOperator::new(fact, mat)?)
    }

    /// Wraps an operator the caller constructed to be a state, after
    /// symmetrizing away rounding noise; only Hermiticity is enforced.
    pub(crate) fn assume_valid(op: DenseOperator) -> Self {
        let mat = linalg::hermitize(&op.mat);
        Self(DenseOperator { fact: op.fact, mat })
    }

    pub fn maximally_mixed(fact: HilbertFactorization) -> Self {
        let d = fact.total_dim();
        Self(DenseOperator { fact, mat: CMat::identity(d, d).scale(1.0 / d as f64) })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        Self(DenseOperator { fact: psi.fact.clone(), mat: linalg::outer(&psi.vec, &psi.vec) })
    }

    pub fn operator(&self) -> &DenseOperator {
        &self.0
    }

    pub fn matrix(&self) -> &CMat {
        &self.0.mat
    }

    pub fn factorization(&self) -> &HilbertFactorization {
        &self.0.fact
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        Ok(Self::assume_valid(self.0.partial_trace(keep)?))
    }

    pub fn permute_qudits(&self, order: &[usize]) -> Result<Self> {
        Ok(Self(self.0.permute_qudits(order)?))
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.kron(&other.0)?))
    }

    pub fn conjugate_by_unitary(&self, u: &CMat) -> Result<Self> {
        Ok(Self::assume_valid(self.0.conjugate_by(u)?))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::herm_eigenvalues(&self.0.mat)
    }
}

/// Unit-norm vector on a factorized register.
#[derive(Clone, Debug)]
pub struct StateVector {
    fact: HilbertFactorization,
    vec: CVec,
}

impl StateVector {
    pub fn new(fact: HilbertFactorization, vec: CVec) -> Result<Self> {
        if vec.len() != fact.total_dim() {
            return Err(Error::Shape(format!("vector length {} does not match dimension {}", vec.len(), fact.total_dim())));
        }
        let norm = vec.norm();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("state vector has norm {norm}")));
        }
        Ok(Self { fact, vec })
    }

    pub fn normalized(fact: HilbertFactorization, vec: CVec) -> Result<Self> {
        let norm = vec.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(fact, vec.unscale(norm))
    }

    pub fn basis(fact: HilbertFactorization, index: usize) -> Result<Self> {
        let d = fact.total_dim();
        if index >= d {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range {d}")));
        }
        let mut vec = CVec::zeros(d);
        vec[index] = C64::new(1.0, 0.0);
        Ok(Self { fact, vec })
    }

    /// `sum_i |i>|i> / sqrt(d)` on two copies of `half`.
    pub fn maximally_entangled(half: &HilbertFactorization) -> Result<Self> {
        let fact = half.concat(half)?;
        let d = half.total_dim();
        let mut vec = CVec::zeros(d * d);
        let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        for i in 0..d {
            vec[i * d + i] = amp;
        }
        Ok(Self { fact, vec })
    }

    pub fn factorization(&self) -> &HilbertFactorization {
        &self.fact
    }

    pub fn vector(&self) -> &CVec {
        &self.vec
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Ok(Self { fact: self.fact.concat(&other.fact)?, vec: self.vec.kronecker(&other.vec) })
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    pub fn permute_qudits(&self, order: &[usize]) -> Result<Self> {
        let map = self.fact.permutation_map(order)?;
        Ok(Self { fact: self.fact.permuted(order)?, vec: CVec::from_iterator(map.len(), map.iter().map(|&i| self.vec[i])) })
    }

    /// Reshapes into a `dim(keep) x dim(rest)` matrix, kept qudits ascending.
    pub fn bipartite_matrix(&self, keep: &[usize]) -> Result<CMat> {
        check_subset(keep, self.fact.len())?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let rest = complement(&keep, self.fact.len());
        let mut order = keep.clone();
        order.extend_from_slice(&rest);
        let map = self.fact.permutation_map(&order)?;
        let dk = self.fact.subsystem(&keep)?.total_dim();
        let dr = map.len() / dk;
        Ok(CMat::from_fn(dk, dr, |i, j| self.vec[map[i * dr + j]]))
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = self.bipartite_matrix(keep)?;
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        let fact = self.fact.subsystem(&keep_sorted)?;
        Ok(DensityMatrix::assume_valid(DenseOperator::new(fact, matmul(&m, &m.adjoint()))?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_rejects_bad_input() {
        assert!(HilbertFactorization::new(vec![2, 1]).is_err());
        assert!(matches!(HilbertFactorization::qubits(13), Err(Error::DimensionCap { .. })));
        assert_eq!(HilbertFactorization::qubits(12).unwrap().total_dim(), 4096);
        assert_eq!(HilbertFactorization::new(vec![]).unwrap().total_dim(), 1);
    }

    #[test]
    fn qudit_zero_is_most_significant() {
        let f = HilbertFactorization::new(vec![2, 3]).unwrap();
        assert_eq!(f.index_of(&[1, 0]), 3);
        assert_eq!(f.digits(5), vec![1, 2]);
        let a = StateVector::basis(HilbertFactorization::qubits(1).unwrap(), 1).unwrap();
        let b = StateVector::basis(HilbertFactorization::new(vec![3]).unwrap(), 0).unwrap();
        let ab = a.kron(&b).unwrap();
        assert_eq!(ab.vector()[3], C64::new(1.0, 0.0));
    }

    #[test]
    fn partial_trace_of_product_keeps_factor() {
        let f1 = HilbertFactorization::qubits(1).unwrap();
        let f2 = HilbertFactorization::new(vec![3]).unwrap();
        let a = DensityMatrix::from_pure(&StateVector::basis(f1, 1).unwrap());
        let b = DensityMatrix::maximally_mixed(f2);
        let ab = a.kron(&b).unwrap();
        let back_a = ab.partial_trace(&[0]).unwrap();
        let back_b = ab.partial_trace(&[1]).unwrap();
        assert!(linalg::max_abs_diff(back_a.matrix(), a.matrix()) < 1e-15);
        assert!(linalg::max_abs_diff(back_b.matrix(), b.matrix()) < 1e-15);
        let ba = ab.permute_qudits(&[1, 0]).unwrap();
        assert!(linalg::max_abs_diff(ba.matrix(), &b.matrix().kronecker(a.matrix())) < 1e-15);
    }

    #[test]
    fn vector_reduction_matches_operator_partial_trace() {
        let f = HilbertFactorization::new(vec![2, 3, 2]).unwrap();
        let v = CVec::from_fn(12, |i, _| C64::new(i as f64 + 1.0, (i * i) as f64 % 5.0));
        let psi = StateVector::normalized(f, v).unwrap();
        let rho = psi.to_density();
        for keep in [vec![0], vec![1], vec![0, 2], vec![2, 1]] {
            let a = psi.reduced(&keep).unwrap();
            let b = rho.partial_trace(&keep).unwrap();
            assert!(linalg::max_abs_diff(a.matrix(), b.matrix()) < 1e-14);
        }
    }

    #[test]
    fn density_validation() {
        let f = HilbertFactorization::qubits(1).unwrap();
        let bad = CMat::from_row_slice(2, 2, &[C64::new(1.5, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-0.5, 0.0)]);
        assert!(DensityMatrix::from_matrix(f.clone(), bad).is_err());
        let nonherm = CMat::from_row_slice(2, 2, &[C64::new(0.5, 0.0), C64::new(0.1, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)]);
        assert!(DensityMatrix::from_matrix(f, nonherm).is_err());
    }
}
