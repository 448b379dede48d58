use super::{CommutantKind, CommutantUnitary, Encoder, Symmetry};
use crate::error::{Error, Result};
use crate::symmetry::{hook_counts, schur_decomposition, Partition, SchurDecomposition};
use crate::tensor::{derive_seed, haar_unitary, CMat, CVec, HilbertFactorization, SeededRng};
use crate::C64;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// One logical qudit encoded into `n` qudits with the ancilla
/// `ρ_λ = (I_{L_λ} / l_λ) ⊗ |ψ_λ><ψ_λ|` on the remaining `n - 1` qudits,
/// `λ ⊢ n - 1`, and `|ψ_λ>` a unit vector of `R_λ` (the first basis vector
/// unless given).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SudCodeSpec {
    pub n: usize,
    pub d: usize,
    pub lambda: Partition,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_lambda: Option<Vec<C64>>,
}

impl SudCodeSpec {
    pub fn new(n: usize, d: usize, lambda: Partition, seed: u64) -> Result<Self> {
        if n < 2 || d < 2 {
            return Err(Error::InvalidArgument("need n >= 2 and d >= 2".into()));
        }
        if lambda.size() != n - 1 {
            return Err(Error::InvalidArgument(format!("{lambda} is not a partition of n - 1 = {}", n - 1)));
        }
        hook_counts(&lambda, d)?;
        HilbertFactorization::qudits(n, d)?;
        Ok(Self { n, d, lambda, seed, psi_lambda: None })
    }

    /// Replaces the multiplicity-space vector; it is normalized on use.
    pub fn with_psi_lambda(mut self, psi: Vec<C64>) -> Result<Self> {
        let r = hook_counts(&self.lambda, self.d)?.r_usize().unwrap_or(usize::MAX);
        if psi.len() != r {
            return Err(Error::Shape(format!("ψ_λ must have r_λ = {r} entries, got {}", psi.len())));
        }
        if psi.iter().map(|z| z.norm_sqr()).sum::<f64>() < 1e-24 {
            return Err(Error::InvalidArgument("ψ_λ must be nonzero".into()));
        }
        self.psi_lambda = Some(psi);
        Ok(self)
    }
}

/// The `l_λ` pure states `|a>_L ⊗ |ψ_λ>` whose uniform mixture is `ρ_λ`.
pub fn ancilla_vectors(spec: &SudCodeSpec, anc: &SchurDecomposition) -> Result<Vec<CVec>> {
    if anc.n != spec.n - 1 || anc.d != spec.d {
        return Err(Error::Shape("ancilla Schur basis has the wrong size".into()));
    }
    let blk = anc.block(&spec.lambda).ok_or_else(|| Error::InvalidArgument("λ missing from Schur basis".into()))?;
    let psi = match &spec.psi_lambda {
        None => {
            let mut v = CVec::zeros(blk.r);
            v[0] = C64::new(1.0, 0.0);
            v
        }
        Some(p) if p.len() == blk.r => CVec::from_column_slice(p).normalize(),
        Some(p) => return Err(Error::Shape(format!("ψ_λ has {} entries, r_λ = {}", p.len(), blk.r))),
    };
    Ok((0..blk.l).map(|a| blk.right_slice(a) * &psi).collect())
}

/// Commutant unitary `⊕_λ I_{l_λ} ⊗ V_λ` with independent Haar blocks;
/// block `b` is seeded from `(master, "sud", b)` with `master` drawn from `rng`.
pub fn sample_sud_unitary(schur: &Arc<SchurDecomposition>, rng: &mut SeededRng) -> Result<CommutantUnitary> {
    let master = rng.next_u64();
    let blocks = schur
        .blocks
        .iter()
        .enumerate()
        .map(|(b, blk)| haar_unitary(blk.r, &mut SeededRng::new(derive_seed(master, "sud", b as u64))))
        .collect::<Result<Vec<CMat>>>()?;
    CommutantUnitary::from_blocks(CommutantKind::SuD(schur.clone()), blocks)
}

#[derive(Clone, Debug)]
pub struct SudCode {
    spec: SudCodeSpec,
    unitary: CommutantUnitary,
    ancilla: Vec<CVec>,
    physical: HilbertFactorization,
    logical: HilbertFactorization,
}

impl SudCode {
    pub fn sample(spec: SudCodeSpec) -> Result<Self> {
        let full = Arc::new(schur_decomposition(spec.n, spec.d)?);
        let anc = schur_decomposition(spec.n - 1, spec.d)?;
        Self::sample_with(spec, &full, &anc)
    }

    /// Samples with precomputed Schur bases for `n` and `n - 1` qudits.
    pub fn sample_with(spec: SudCodeSpec, full: &Arc<SchurDecomposition>, anc: &SchurDecomposition) -> Result<Self> {
        let mut rng = SeededRng::new(spec.seed);
        let u = sample_sud_unitary(full, &mut rng)?;
        Self::with_unitary(spec, u, anc)
    }

    pub fn with_unitary(spec: SudCodeSpec, unitary: CommutantUnitary, anc: &SchurDecomposition) -> Result<Self> {
        let psi = spec.psi_lambda.clone();
        let mut spec = SudCodeSpec::new(spec.n, spec.d, spec.lambda, spec.seed)?;
        if let Some(p) = psi {
            spec = spec.with_psi_lambda(p)?;
        }
        let dim = spec.d.pow(spec.n as u32);
        if unitary.dim() != dim {
            return Err(Error::Shape("unitary does not act on n qudits".into()));
        }
        if matches!(unitary.kind(), CommutantKind::U1(_)) {
            return Err(Error::InvalidArgument("SU(d) code needs a commutant of U^{⊗n}".into()));
        }
        let ancilla = ancilla_vectors(&spec, anc)?;
        Ok(Self {
            physical: HilbertFactorization::qudits(spec.n, spec.d)?,
            logical: HilbertFactorization::qudits(1, spec.d)?,
            spec,
            unitary,
            ancilla,
        })
    }

    pub fn spec(&self) -> &SudCodeSpec {
        &self.spec
    }

    pub fn unitary(&self) -> &CommutantUnitary {
        &self.unitary
    }

    /// Branches `|a>_L ⊗ |ψ_λ>` of the ancilla, each of weight `1/l_λ`.
    pub fn ancilla_branches(&self) -> &[CVec] {
        &self.ancilla
    }
}

impl Encoder for SudCode {
    fn physical(&self) -> &HilbertFactorization {
        &self.physical
    }

    fn logical(&self) -> &HilbertFactorization {
        &self.logical
    }

    fn symmetry(&self) -> Symmetry {
        Symmetry::SuD { d: self.spec.d }
    }

    fn encode_branches(&self, x: &CMat) -> Result<Vec<(f64, CMat)>> {
        if x.nrows() != self.spec.d {
            return Err(Error::Shape("input rows must match the logical dimension".into()));
        }
        let w = 1.0 / self.ancilla.len() as f64;
        Ok(self
            .ancilla
            .iter()
            .map(|psi| {
                let col = CMat::from_column_slice(psi.len(), 1, psi.as_slice());
                (w, self.unitary.apply(&x.kronecker(&col)))
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::{max_abs_diff, unitarity_residual};
    use crate::tensor::DensityMatrix;

    #[test]
    fn ancilla_is_maximally_mixed_on_l() {
        let lam = Partition::new(vec![2, 1]).unwrap();
        let spec = SudCodeSpec::new(4, 2, lam.clone(), 5).unwrap();
        let code = SudCode::sample(spec).unwrap();
        assert!(unitarity_residual(code.unitary().dense()) < 1e-10);
        assert_eq!(code.ancilla_branches().len(), 2);
        let rho = DensityMatrix::maximally_mixed(HilbertFactorization::qudits(1, 2).unwrap());
        let enc = code.encode(&rho).unwrap();
        assert!((enc.matrix().trace().re - 1.0).abs() < 1e-12);
        let again = SudCode::sample(SudCodeSpec::new(4, 2, lam, 5).unwrap()).unwrap();
        assert!(max_abs_diff(code.unitary().dense(), again.unitary().dense()) == 0.0);
    }

    #[test]
    fn spec_validation() {
        let lam = Partition::new(vec![2, 1]).unwrap();
        assert!(SudCodeSpec::new(5, 2, lam.clone(), 0).is_err());
        assert!(SudCodeSpec::new(4, 2, Partition::new(vec![1, 1, 1]).unwrap(), 0).is_err());
        assert!(SudCodeSpec::new(4, 3, lam, 0).is_ok());
    }
}
