//! Random covariant encoders: a commutant unitary applied to the logical
//! state together with a fixed ancilla.

mod covariance;
mod u1;
mod sud;

pub use covariance::{check_covariance, Symmetry};
pub use sud::{ancilla_vectors, sample_sud_unitary, SudCode, SudCodeSpec};
pub use u1::{sample_u1_unitary, U1Code, U1CodeSpec};

use crate::error::{Error, Result};
use crate::symmetry::{HammingSectors, SchurDecomposition};
use crate::tensor::linalg::{herm_eig, matmul, unitarity_residual};
use crate::tensor::{CMat, DenseOperator, DensityMatrix, HilbertFactorization};
use std::sync::{Arc, OnceLock};

#[derive(Clone, Debug)]
pub enum CommutantKind {
    /// Block `j` acts on the Hamming-weight-`j` sector.
    U1(Arc<HammingSectors>),
    /// Block `λ` acts on the multiplicity space `R_λ`.
    SuD(Arc<SchurDecomposition>),
    /// A single dense block with no symmetry; used as a negative control.
    Unrestricted,
}

/// Unitary in the commutant of the symmetry action, stored block-wise.
#[derive(Clone, Debug)]
pub struct CommutantUnitary {
    kind: CommutantKind,
    blocks: Vec<CMat>,
    dense: OnceLock<CMat>,
}

impl CommutantUnitary {
    pub fn from_blocks(kind: CommutantKind, blocks: Vec<CMat>) -> Result<Self> {
        let expected: Vec<usize> = match &kind {
            CommutantKind::U1(h) => (0..=h.n()).map(|j| h.sector_dim(j)).collect(),
            CommutantKind::SuD(s) => s.blocks.iter().map(|b| b.r).collect(),
            CommutantKind::Unrestricted => blocks.first().map(|b| vec![b.nrows()]).unwrap_or_default(),
        };
        if blocks.len() != expected.len() || blocks.iter().zip(&expected).any(|(b, &e)| b.nrows() != e || b.ncols() != e) {
            return Err(Error::Shape("commutant blocks do not match the symmetry structure".into()));
        }
        for b in &blocks {
            if unitarity_residual(b) > 1e-10 {
                return Err(Error::InvalidArgument("commutant block is not unitary".into()));
            }
        }
        Ok(Self { kind, blocks, dense: OnceLock::new() })
    }

    pub fn identity(kind: CommutantKind) -> Result<Self> {
        let dims: Vec<usize> = match &kind {
            CommutantKind::U1(h) => (0..=h.n()).map(|j| h.sector_dim(j)).collect(),
            CommutantKind::SuD(s) => s.blocks.iter().map(|b| b.r).collect(),
            CommutantKind::Unrestricted => {
                return Err(Error::InvalidArgument("identity needs a symmetry structure".into()))
            }
        };
        Self::from_blocks(kind, dims.into_iter().map(|d| CMat::identity(d, d)).collect())
    }

    pub fn unrestricted(u: CMat) -> Result<Self> {
        Self::from_blocks(CommutantKind::Unrestricted, vec![u])
    }

    pub fn kind(&self) -> &CommutantKind {
        &self.kind
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            CommutantKind::U1(h) => h.dim(),
            CommutantKind::SuD(s) => s.dim(),
            CommutantKind::Unrestricted => self.blocks[0].nrows(),
        }
    }

    /// The assembled unitary on the full register, built on first use.
    pub fn dense(&self) -> &CMat {
        self.dense.get_or_init(|| match &self.kind {
            CommutantKind::U1(h) => {
                let mut u = CMat::zeros(h.dim(), h.dim());
                for (j, b) in self.blocks.iter().enumerate() {
                    let s = h.sector(j);
                    for (c, &x) in s.iter().enumerate() {
                        for (r, &y) in s.iter().enumerate() {
                            u[(y, x)] = b[(r, c)];
                        }
                    }
                }
                u
            }
            CommutantKind::SuD(s) => crate::symmetry::assemble_commutant(s, &self.blocks).expect("validated blocks"),
            CommutantKind::Unrestricted => self.blocks[0].clone(),
        })
    }

    /// Applies the unitary to every column of `x` (rows index the register).
    pub fn apply(&self, x: &CMat) -> CMat {
        match &self.kind {
            CommutantKind::U1(h) => {
                let mut out = CMat::zeros(x.nrows(), x.ncols());
                for (j, b) in self.blocks.iter().enumerate() {
                    let s = h.sector(j);
                    let sub = CMat::from_fn(s.len(), x.ncols(), |r, c| x[(s[r], c)]);
                    let img = b * sub;
                    for (r, &y) in s.iter().enumerate() {
                        for c in 0..x.ncols() {
                            out[(y, c)] = img[(r, c)];
                        }
                    }
                }
                out
            }
            _ => matmul(self.dense(), x),
        }
    }
}

/// An encoding map from a logical register into `n` physical qudits.
///
/// Inputs may carry a reference system: the logical-plus-reference pure
/// state is passed as a `logical_dim x ref_dim` matrix, and the encoding
/// returns weighted pure branches as `physical_dim x ref_dim` matrices
/// whose mixture is the encoded state.
pub trait Encoder {
    fn physical(&self) -> &HilbertFactorization;
    fn logical(&self) -> &HilbertFactorization;
    fn symmetry(&self) -> Symmetry;
    fn encode_branches(&self, x: &CMat) -> Result<Vec<(f64, CMat)>>;

    /// Encodes a logical density matrix.
    fn encode(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.factorization() != self.logical() {
            return Err(Error::Shape("input does not live on the logical register".into()));
        }
        let (vals, vecs) = herm_eig(rho.matrix());
        let dim = self.physical().total_dim();
        let mut out = CMat::zeros(dim, dim);
        for (i, &p) in vals.iter().enumerate() {
            if p <= 1e-15 {
                continue;
            }
            let col = CMat::from_column_slice(vecs.nrows(), 1, vecs.column(i).as_slice());
            for (w, y) in self.encode_branches(&col)? {
                out += matmul(&y, &y.adjoint()).scale(p * w);
            }
        }
        Ok(DensityMatrix::assume_valid(DenseOperator::new(self.physical().clone(), out)?))
    }
}
