use crate::error::{Error, Result};
use crate::symmetry::{HammingSectors, SchurDecomposition};
use crate::tensor::linalg::{hermitize, matmul};
use crate::tensor::{haar_unitary, CMat, DenseOperator, DensityMatrix, SeededRng};
use crate::C64;

/// One block `H_l ⊗ H_r` of a decomposition; column `a * r + b` of the
/// isometry is `|a>_l ⊗ |b>_r`.
#[derive(Clone, Debug)]
pub struct DsBlock {
    pub l: usize,
    pub r: usize,
    pub isometry: CMat,
}

/// Orthogonal decomposition `H = ⊕_j H_j^l ⊗ H_j^r` of a register, with the
/// block unitaries acting as `I_l ⊗ U_j` on each block.
#[derive(Clone, Debug)]
pub struct DsDecomposition {
    dim: usize,
    blocks: Vec<DsBlock>,
}

impl DsDecomposition {
    pub fn new(dim: usize, blocks: Vec<DsBlock>) -> Result<Self> {
        let total: usize = blocks.iter().map(|b| b.l * b.r).sum();
        if total != dim {
            return Err(Error::Shape(format!("blocks cover dimension {total}, expected {dim}")));
        }
        if blocks.iter().any(|b| b.isometry.nrows() != dim || b.isometry.ncols() != b.l * b.r) {
            return Err(Error::Shape("block isometry has the wrong shape".into()));
        }
        Ok(Self { dim, blocks })
    }

    /// The whole space as a single block with `l = 1`.
    pub fn trivial(dim: usize) -> Self {
        Self { dim, blocks: vec![DsBlock { l: 1, r: dim, isometry: CMat::identity(dim, dim) }] }
    }

    /// Hamming sectors of `n` qubits: `l_j = 1`, `r_j = C(n, j)`.
    pub fn hamming(n: usize) -> Result<Self> {
        let h = HammingSectors::new(n)?;
        let blocks = (0..=n).map(|j| DsBlock { l: 1, r: h.sector_dim(j), isometry: h.isometry(j) }).collect();
        Self::new(h.dim(), blocks)
    }

    /// Schur–Weyl blocks `L_λ ⊗ R_λ`.
    pub fn schur(s: &SchurDecomposition) -> Result<Self> {
        let blocks = s.blocks.iter().map(|b| DsBlock { l: b.l, r: b.r, isometry: b.isometry.clone() }).collect();
        Self::new(s.dim(), blocks)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[DsBlock] {
        &self.blocks
    }
}

/// A random unitary `⊕_j I_l ⊗ U_j` with Haar-distributed `U_j`.
pub fn random_block_unitary(decomp: &DsDecomposition, rng: &mut SeededRng) -> Result<CMat> {
    let mut u = CMat::zeros(decomp.dim, decomp.dim);
    for b in &decomp.blocks {
        let v = CMat::identity(b.l, b.l).kronecker(&haar_unitary(b.r, rng)?);
        u += matmul(&matmul(&b.isometry, &v), &b.isometry.adjoint());
    }
    Ok(u)
}

fn split_point(rho: &DensityMatrix, dim: usize) -> Result<usize> {
    let mut acc = 1;
    for (i, &d) in rho.factorization().dims().iter().enumerate() {
        if acc == dim {
            return Ok(i);
        }
        acc *= d;
    }
    if acc == dim {
        return Ok(rho.factorization().len());
    }
    Err(Error::Shape(format!("no leading group of qudits has dimension {dim}")))
}

/// `Ψ_avg = ⊕_j Ψ_jj^{A_l R} ⊗ I_j^{A_r} / r_j`, the average of `ρ` over the
/// block unitaries acting on the leading qudits (those spanning `decomp`).
pub fn block_average(rho: &DensityMatrix, decomp: &DsDecomposition) -> Result<DensityMatrix> {
    split_point(rho, decomp.dim)?;
    let m = rho.dim() / decomp.dim;
    let mut out = CMat::zeros(rho.dim(), rho.dim());
    for b in &decomp.blocks {
        let w = b.isometry.kronecker(&CMat::identity(m, m));
        let x = matmul(&matmul(&w.adjoint(), rho.matrix()), &w);
        let (l, r) = (b.l, b.r);
        // trace out the r index of (a, b, ref)
        let y = CMat::from_fn(l * m, l * m, |i, j| {
            let (a, s) = (i / m, i % m);
            let (a2, s2) = (j / m, j % m);
            (0..r).map(|c| x[((a * r + c) * m + s, (a2 * r + c) * m + s2)]).sum::<C64>()
        });
        let z = CMat::from_fn(l * r * m, l * r * m, |i, j| {
            let (a, c, s) = (i / (r * m), (i / m) % r, i % m);
            let (a2, c2, s2) = (j / (r * m), (j / m) % r, j % m);
            if c == c2 {
                y[(a * m + s, a2 * m + s2)] / r as f64
            } else {
                C64::new(0.0, 0.0)
            }
        });
        out += matmul(&matmul(&w, &z), &w.adjoint());
    }
    DensityMatrix::new(DenseOperator::new(rho.factorization().clone(), hermitize(&out))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::U1CodeSpec;
    use crate::erasure::{u1_average_state, ErasurePattern};
    use crate::tensor::linalg::max_abs_diff;
    use crate::tensor::{random_density_matrix, HilbertFactorization, StateVector};

    #[test]
    fn trivial_decomposition_fully_decouples() {
        let mut rng = SeededRng::new(3);
        let rho = random_density_matrix(HilbertFactorization::qubits(3).unwrap(), 3, &mut rng).unwrap();
        let avg = block_average(&rho, &DsDecomposition::trivial(4)).unwrap();
        let reference = rho.partial_trace(&[2]).unwrap();
        let expected = CMat::identity(4, 4).scale(0.25).kronecker(reference.matrix());
        assert!(max_abs_diff(avg.matrix(), &expected) < 1e-12);
    }

    #[test]
    fn idempotent_and_invariant() {
        let mut rng = SeededRng::new(12);
        let decomp = DsDecomposition::hamming(3).unwrap();
        let rho = random_density_matrix(HilbertFactorization::qubits(4).unwrap(), 2, &mut rng).unwrap();
        let avg = block_average(&rho, &decomp).unwrap();
        let again = block_average(&avg, &decomp).unwrap();
        assert!(max_abs_diff(avg.matrix(), again.matrix()) < 1e-12);
        assert!((avg.matrix().trace().re - 1.0).abs() < 1e-12);
        let u = random_block_unitary(&decomp, &mut rng).unwrap().kronecker(&CMat::identity(2, 2));
        let rotated = matmul(&matmul(&u, avg.matrix()), &u.adjoint());
        assert!(max_abs_diff(&rotated, avg.matrix()) < 1e-12);
    }

    #[test]
    fn matches_u1_average_state() {
        let (n, k, alpha) = (5, 1, 2);
        let spec = U1CodeSpec::new(n, k, alpha, 0).unwrap();
        // |Φ>_{A1 R} |ψ_α>_{A2}, ordered as A (n qubits) then R
        let dim = 1usize << n;
        let mut v = crate::tensor::CVec::zeros(dim * 2);
        for x in 0..2 {
            v[spec.embed_index(x) * 2 + x] = C64::new(0.5f64.sqrt(), 0.0);
        }
        let psi = StateVector::new(HilbertFactorization::qubits(n + 1).unwrap(), v).unwrap();
        let avg = block_average(&psi.to_density(), &DsDecomposition::hamming(n).unwrap()).unwrap();
        let pattern = ErasurePattern::new(n, vec![3]).unwrap();
        let env = avg.partial_trace(&[3, n]).unwrap();
        let expected = u1_average_state(&spec, &pattern).unwrap();
        assert!(max_abs_diff(env.matrix(), expected.matrix()) < 1e-12);
    }
}
