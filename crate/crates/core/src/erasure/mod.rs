//! Erasure errors of covariant codes: complementary channels, closed-form
//! symmetry terms and per-code error reports.

mod report;
mod sud;
mod u1;

pub use report::{sampled_code_errors, CodeRef, ErrorReport, ZetaStrategy};
pub use sud::{
    isotypic_marginal, sud_average_env, sud_average_env_closed_form, sud_average_env_general, sud_leading_order,
    sud_lower_bounds, sud_worst_input_channel, sud_worst_input_channel_dense, sud_worst_input_search, WorstInput,
};
pub use u1::{
    u1_average_state, u1_beta, u1_choi_leading_order, u1_choi_symmetry_term, u1_diagonal_symmetry_term, u1_lower_bounds,
    u1_marginal_zeta, u1_worst_leading_order, u1_worst_symmetry_term, SymmetryTermResult,
};

use crate::codes::Encoder;
use crate::error::{Error, Result};
use crate::special::ln_binomial;
use crate::tensor::linalg::{herm_eig, matmul};
use crate::tensor::{CMat, CVec, DenseOperator, DensityMatrix, HilbertFactorization, SeededRng, StateVector};
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Purified,
    Trace,
}

/// The set of erased qudits, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErasurePattern {
    n: usize,
    erased: Vec<usize>,
}

impl ErasurePattern {
    pub fn new(n: usize, mut erased: Vec<usize>) -> Result<Self> {
        erased.sort_unstable();
        erased.dedup();
        if erased.is_empty() {
            return Err(Error::InvalidArgument("an erasure pattern needs at least one qudit".into()));
        }
        if erased.iter().any(|&q| q >= n) {
            return Err(Error::InvalidArgument(format!("erased qudits {erased:?} out of range for n = {n}")));
        }
        Ok(Self { n, erased })
    }

    /// The `t = 0` limit: nothing is erased and the environment is trivial.
    pub fn none(n: usize) -> Self {
        Self { n, erased: Vec::new() }
    }

    /// Erases the first `t` qudits.
    pub fn first(n: usize, t: usize) -> Result<Self> {
        Self::new(n, (0..t).collect())
    }

    /// Erases `t` qudits chosen uniformly at random.
    pub fn random(n: usize, t: usize, rng: &mut SeededRng) -> Result<Self> {
        if t > n {
            return Err(Error::InvalidArgument(format!("cannot erase {t} of {n} qudits")));
        }
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..t {
            let j = i + (rng.uniform() * (n - i) as f64) as usize;
            pool.swap(i, j.min(n - 1));
        }
        Self::new(n, pool[..t].to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.erased.len()
    }

    pub fn erased(&self) -> &[usize] {
        &self.erased
    }

    pub fn kept(&self) -> Vec<usize> {
        (0..self.n).filter(|q| !self.erased.contains(q)).collect()
    }
}

/// Complementary channel of erasure after encoding, stored through its
/// action on logical matrix units: `block(x, x') = Tr_{S∖E}[ℰ(|x><x'|)]`.
#[derive(Clone, Debug)]
pub struct ComplementaryChannel {
    logical_dim: usize,
    env: HilbertFactorization,
    blocks: Vec<CMat>,
}

impl ComplementaryChannel {
    pub fn new(code: &dyn Encoder, pattern: &ErasurePattern) -> Result<Self> {
        let phys = code.physical();
        if pattern.n() != phys.len() {
            return Err(Error::Shape("pattern and code disagree on n".into()));
        }
        let ld = code.logical().total_dim();
        let env = phys.subsystem(pattern.erased())?;
        let mut order = pattern.erased().to_vec();
        order.extend(pattern.kept());
        let map = phys.permutation_map(&order)?;
        let de = env.total_dim();
        let dr = map.len() / de;
        let mut blocks = vec![CMat::zeros(de, de); ld * ld];
        for (w, y) in code.encode_branches(&CMat::identity(ld, ld))? {
            let parts: Vec<CMat> = (0..ld).map(|x| CMat::from_fn(de, dr, |e, s| y[(map[e * dr + s], x)])).collect();
            for x in 0..ld {
                for x2 in 0..ld {
                    blocks[x * ld + x2] += matmul(&parts[x], &parts[x2].adjoint()).scale(w);
                }
            }
        }
        Ok(Self { logical_dim: ld, env, blocks })
    }

    pub fn logical_dim(&self) -> usize {
        self.logical_dim
    }

    pub fn env(&self) -> &HilbertFactorization {
        &self.env
    }

    /// `ρ^{x,x'}` on the environment.
    pub fn block(&self, x: usize, x2: usize) -> &CMat {
        &self.blocks[x * self.logical_dim + x2]
    }

    /// Output on `E ⊗ R` for the pure input `Σ X[x,r] |x>|r>`.
    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        if x.nrows() != self.logical_dim {
            return Err(Error::Shape("input rows must match the logical dimension".into()));
        }
        let (de, m) = (self.env.total_dim(), x.ncols());
        let mut out = CMat::zeros(de * m, de * m);
        for a in 0..self.logical_dim {
            for b in 0..self.logical_dim {
                let blk = self.block(a, b);
                for r in 0..m {
                    for r2 in 0..m {
                        let c = x[(a, r)] * x[(b, r2)].conj();
                        if c == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for e in 0..de {
                            for e2 in 0..de {
                                out[(e * m + r, e2 * m + r2)] += c * blk[(e, e2)];
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

fn split_reference(code: &dyn Encoder, input: &DensityMatrix) -> Result<HilbertFactorization> {
    let ld = code.logical().dims();
    let dims = input.factorization().dims();
    if dims.len() < ld.len() || &dims[..ld.len()] != ld {
        return Err(Error::Shape("input must be logical ⊗ reference with the logical register first".into()));
    }
    HilbertFactorization::new(dims[ld.len()..].to_vec())
}

fn pure_components(input: &DensityMatrix, ld: usize, m: usize) -> Vec<(f64, CMat)> {
    let (vals, vecs) = herm_eig(input.matrix());
    vals.iter()
        .enumerate()
        .filter(|(_, &p)| p > 1e-15)
        .map(|(i, &p)| (p, CMat::from_fn(ld, m, |x, r| vecs[(x * m + r, i)])))
        .collect()
}

/// Environment-reference output `Tr_{S∖E}[(ℰ ⊗ id_R)(ρ)]` on `E ⊗ R`.
pub fn complementary_output(code: &dyn Encoder, pattern: &ErasurePattern, input: &DensityMatrix) -> Result<DensityMatrix> {
    let reference = split_reference(code, input)?;
    let channel = ComplementaryChannel::new(code, pattern)?;
    let (ld, m) = (code.logical().total_dim(), reference.total_dim());
    let de = channel.env().total_dim();
    let mut out = CMat::zeros(de * m, de * m);
    for (p, x) in pure_components(input, ld, m) {
        out += channel.apply(&x)?.scale(p);
    }
    let fact = channel.env().concat(&reference)?;
    Ok(DensityMatrix::assume_valid(DenseOperator::new(fact, out)?))
}

/// Same output computed from the global pure state on `S ⊗ R`.
pub fn complementary_output_dense(code: &dyn Encoder, pattern: &ErasurePattern, input: &DensityMatrix) -> Result<DensityMatrix> {
    let reference = split_reference(code, input)?;
    let phys = code.physical();
    let (ld, m) = (code.logical().total_dim(), reference.total_dim());
    let global = phys.concat(&reference)?;
    let mut keep = pattern.erased().to_vec();
    keep.extend(phys.len()..global.len());
    let mut acc: Option<CMat> = None;
    for (p, x) in pure_components(input, ld, m) {
        for (w, y) in code.encode_branches(&x)? {
            let v = CVec::from_iterator(y.len(), (0..y.nrows()).flat_map(|s| (0..m).map(move |r| (s, r))).map(|(s, r)| y[(s, r)]));
            let red = StateVector::normalized(global.clone(), v)?.reduced(&keep)?;
            let term = red.matrix().scale(p * w);
            acc = Some(match acc {
                Some(a) => a + term,
                None => term,
            });
        }
    }
    let fact = global.subsystem(&keep)?;
    let mat = acc.ok_or_else(|| Error::InvalidState("input has no support".into()))?;
    Ok(DensityMatrix::assume_valid(DenseOperator::new(fact, mat)?))
}

/// Averages a per-`t` quantity over i.i.d. erasures with probability `q`:
/// `Σ_t C(n,t) q^t (1-q)^{n-t} f(t)`.
pub fn iid_erasure_average(n: usize, q: f64, mut f: impl FnMut(usize) -> Result<f64>) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument("erasure probability must lie in [0, 1]".into()));
    }
    let mut total = 0.0;
    for t in 0..=n {
        let lw = ln_binomial(n as i64, t as i64) + t as f64 * q.ln() + (n - t) as f64 * (1.0 - q).ln();
        let w = if lw.is_nan() { if (q == 0.0 && t == 0) || (q == 1.0 && t == n) { 1.0 } else { 0.0 } } else { lw.exp() };
        if w > 1e-300 {
            total += w * f(t)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{U1Code, U1CodeSpec};
    use crate::tensor::linalg::max_abs_diff;
    use crate::tensor::random_density_matrix;

    #[test]
    fn channel_and_dense_paths_agree() {
        let code = U1Code::sample(U1CodeSpec::new(6, 2, 2, 9).unwrap()).unwrap();
        let pattern = ErasurePattern::new(6, vec![1, 4]).unwrap();
        let mut rng = SeededRng::new(4);
        let input = random_density_matrix(HilbertFactorization::qubits(3).unwrap(), 3, &mut rng).unwrap();
        let a = complementary_output(&code, &pattern, &input).unwrap();
        let b = complementary_output_dense(&code, &pattern, &input).unwrap();
        assert_eq!(a.factorization(), b.factorization());
        assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-12);
        assert!((a.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pattern_validation() {
        assert!(ErasurePattern::new(4, vec![]).is_err());
        assert!(ErasurePattern::new(4, vec![4]).is_err());
        assert_eq!(ErasurePattern::new(4, vec![3, 1, 3]).unwrap().erased(), &[1, 3]);
        let mut rng = SeededRng::new(0);
        let p = ErasurePattern::random(10, 3, &mut rng).unwrap();
        assert_eq!(p.t(), 3);
    }

    #[test]
    fn iid_average_of_constant() {
        let v = iid_erasure_average(30, 0.2, |_| Ok(2.0)).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let mean_t = iid_erasure_average(30, 0.2, |t| Ok(t as f64)).unwrap();
        assert!((mean_t - 6.0).abs() < 1e-10);
    }
}
