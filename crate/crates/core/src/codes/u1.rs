use super::{CommutantKind, CommutantUnitary, Encoder, Symmetry};
use crate::error::{Error, Result};
use crate::symmetry::HammingSectors;
use crate::tensor::{derive_seed, haar_unitary, CMat, HilbertFactorization, SeededRng};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// `k` logical qubits encoded into `n` physical qubits with the ancilla
/// `|1>^{⊗α} |0>^{⊗(n-k-α)}`; logical qubits come first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct U1CodeSpec {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub seed: u64,
}

impl U1CodeSpec {
    pub fn new(n: usize, k: usize, alpha: usize, seed: u64) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::InvalidArgument(format!("need 1 <= k < n, got k = {k}, n = {n}")));
        }
        if alpha > n - k {
            return Err(Error::InvalidArgument(format!("ancilla charge {alpha} exceeds n - k = {}", n - k)));
        }
        HilbertFactorization::qubits(n)?;
        Ok(Self { n, k, alpha, seed })
    }

    /// Basis index of `U^{-1} V|x>`, i.e. of `|x>|ψ_α>`.
    pub fn embed_index(&self, x: usize) -> usize {
        let m = self.n - self.k;
        let ancilla = ((1usize << self.alpha) - 1) << (m - self.alpha);
        (x << m) | ancilla
    }
}

/// Haar-random unitary commuting with the total charge: an independent
/// Haar block on each Hamming sector, block `j` seeded from
/// `(master, "u1", j)` with `master` drawn from `rng`.
pub fn sample_u1_unitary(n: usize, rng: &mut SeededRng) -> Result<CommutantUnitary> {
    let sectors = Arc::new(HammingSectors::new(n)?);
    let master = rng.next_u64();
    let blocks = (0..=n)
        .map(|j| haar_unitary(sectors.sector_dim(j), &mut SeededRng::new(derive_seed(master, "u1", j as u64))))
        .collect::<Result<Vec<CMat>>>()?;
    CommutantUnitary::from_blocks(CommutantKind::U1(sectors), blocks)
}

#[derive(Clone, Debug)]
pub struct U1Code {
    spec: U1CodeSpec,
    unitary: CommutantUnitary,
    physical: HilbertFactorization,
    logical: HilbertFactorization,
}

impl U1Code {
    /// Samples the code unitary from the seed in `spec`.
    pub fn sample(spec: U1CodeSpec) -> Result<Self> {
        let mut rng = SeededRng::new(spec.seed);
        let u = sample_u1_unitary(spec.n, &mut rng)?;
        Self::with_unitary(spec, u)
    }

    pub fn with_unitary(spec: U1CodeSpec, unitary: CommutantUnitary) -> Result<Self> {
        let spec = U1CodeSpec::new(spec.n, spec.k, spec.alpha, spec.seed)?;
        if unitary.dim() != 1 << spec.n {
            return Err(Error::Shape("unitary does not act on n qubits".into()));
        }
        if matches!(unitary.kind(), CommutantKind::SuD(_)) {
            return Err(Error::InvalidArgument("U(1) code needs a charge-commuting unitary".into()));
        }
        Ok(Self { physical: HilbertFactorization::qubits(spec.n)?, logical: HilbertFactorization::qubits(spec.k)?, spec, unitary })
    }

    pub fn identity(spec: U1CodeSpec) -> Result<Self> {
        let u = CommutantUnitary::identity(CommutantKind::U1(Arc::new(HammingSectors::new(spec.n)?)))?;
        Self::with_unitary(spec, u)
    }

    pub fn spec(&self) -> &U1CodeSpec {
        &self.spec
    }

    pub fn unitary(&self) -> &CommutantUnitary {
        &self.unitary
    }
}

impl Encoder for U1Code {
    fn physical(&self) -> &HilbertFactorization {
        &self.physical
    }

    fn logical(&self) -> &HilbertFactorization {
        &self.logical
    }

    fn symmetry(&self) -> Symmetry {
        Symmetry::U1
    }

    fn encode_branches(&self, x: &CMat) -> Result<Vec<(f64, CMat)>> {
        if x.nrows() != 1 << self.spec.k {
            return Err(Error::Shape("input rows must match the logical dimension".into()));
        }
        let mut y = CMat::zeros(1 << self.spec.n, x.ncols());
        for r in 0..x.nrows() {
            let p = self.spec.embed_index(r);
            for c in 0..x.ncols() {
                y[(p, c)] = x[(r, c)];
            }
        }
        Ok(vec![(1.0, self.unitary.apply(&y))])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::{max_abs_diff, unitarity_residual};

    #[test]
    fn spec_validation_and_embedding() {
        assert!(U1CodeSpec::new(4, 0, 1, 0).is_err());
        assert!(U1CodeSpec::new(4, 1, 4, 0).is_err());
        assert!(U1CodeSpec::new(13, 1, 1, 0).is_err());
        let s = U1CodeSpec::new(5, 2, 2, 0).unwrap();
        assert_eq!(s.embed_index(0b10), 0b10_110);
    }

    #[test]
    fn sampled_unitary_is_block_diagonal_and_reproducible() {
        let u = sample_u1_unitary(6, &mut SeededRng::new(4)).unwrap();
        let d = u.dense();
        assert!(unitarity_residual(d) < 1e-10);
        for x in 0..64usize {
            for y in 0..64usize {
                if x.count_ones() != y.count_ones() {
                    assert_eq!(d[(x, y)].norm(), 0.0);
                }
            }
        }
        let v = sample_u1_unitary(6, &mut SeededRng::new(4)).unwrap();
        assert_eq!(d, v.dense());
        let x = CMat::from_fn(64, 3, |i, j| crate::C64::new((i * j) as f64, i as f64 - j as f64));
        assert!(max_abs_diff(&u.apply(&x), &(d * &x)) < 1e-12);
    }
}
