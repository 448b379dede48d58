use super::{ErasurePattern, Metric};
use crate::codes::U1CodeSpec;
use crate::error::{Error, Result};
use crate::special::{binomial_ratio, ln_binomial};
use crate::tensor::{CMat, DenseOperator, DensityMatrix, HilbertFactorization};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Distance between the averaged environment-reference state of a U(1)
/// code and the product `ζ₀ ⊗ I/2^k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryTermResult {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub alpha: usize,
    pub fidelity: f64,
    pub purified: f64,
    pub trace_dist: f64,
}

impl SymmetryTermResult {
    pub fn value(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Purified => self.purified,
            Metric::Trace => self.trace_dist,
        }
    }
}

fn check(n: usize, k: usize, t: usize, alpha: usize) -> Result<()> {
    if alpha + k > n {
        return Err(Error::InvalidArgument(format!("α + k = {} exceeds n = {n}", alpha + k)));
    }
    if t > n {
        return Err(Error::InvalidArgument(format!("cannot erase {t} of {n} qubits")));
    }
    Ok(())
}

/// `2^{-k} C(k, j)`, evaluated in the log domain.
fn logical_weight(k: usize, j: usize) -> f64 {
    (ln_binomial(k as i64, j as i64) - k as f64 * LN_2).exp()
}

/// Diagonal entry of the averaged environment state for logical weight `j`
/// and environment weight `i`: `C(n-t, j+α-i) / C(n, j+α)`.
fn sector_ratio(n: usize, t: usize, alpha: usize, j: usize, i: usize) -> f64 {
    binomial_ratio(n as i64, (j + alpha) as i64, t as i64, i as i64)
}

/// Weight `β_i` of the marginal environment state `ζ₀ = Σ_i β_i Π_i`:
/// `β_i = 2^{-k} Σ_j C(k,j) C(n-t, j+α-i) / C(n, j+α)`.
pub fn u1_beta(n: usize, k: usize, t: usize, alpha: usize, i: usize) -> Result<f64> {
    check(n, k, t, alpha)?;
    if i > t {
        return Err(Error::InvalidArgument(format!("environment weight {i} exceeds t = {t}")));
    }
    Ok((0..=k).map(|j| logical_weight(k, j) * sector_ratio(n, t, alpha, j, i)).sum())
}

fn betas(n: usize, k: usize, t: usize, alpha: usize) -> Result<Vec<f64>> {
    (0..=t).map(|i| u1_beta(n, k, t, alpha, i)).collect()
}

/// Fidelity pieces between two states that are diagonal in the same basis,
/// given as `(multiplicity weight, p, q)` triples: returns `(1 - F, ½‖p - q‖₁)`.
fn diagonal_gap(terms: impl Iterator<Item = (f64, f64, f64)>) -> (f64, f64) {
    let (mut hell, mut tr) = (0.0, 0.0);
    for (w, p, q) in terms {
        let s = p.sqrt() - q.sqrt();
        hell += w * s * s;
        tr += w * (p - q).abs();
    }
    (0.5 * hell, 0.5 * tr)
}

fn result(n: usize, k: usize, t: usize, alpha: usize, one_minus_f: f64, trace_dist: f64) -> SymmetryTermResult {
    let gap = one_minus_f.max(0.0);
    let fidelity = 1.0 - gap;
    SymmetryTermResult { n, k, t, alpha, fidelity, purified: (gap * (2.0 - gap)).sqrt(), trace_dist }
}

/// Symmetry term for the maximally entangled logical input with the fixed
/// choice `ζ₀`. Both states are diagonal in the weight basis, so the
/// fidelity reduces to `Σ w (√β - √r)²` over `(j, i)` sectors.
pub fn u1_choi_symmetry_term(n: usize, k: usize, t: usize, alpha: usize) -> Result<SymmetryTermResult> {
    check(n, k, t, alpha)?;
    let beta = betas(n, k, t, alpha)?;
    let mut terms = Vec::with_capacity((k + 1) * (t + 1));
    for j in 0..=k {
        let wj = logical_weight(k, j);
        for (i, &b) in beta.iter().enumerate() {
            let w = wj * (ln_binomial(t as i64, i as i64)).exp();
            terms.push((w, b, sector_ratio(n, t, alpha, j, i)));
        }
    }
    let (gap, tr) = diagonal_gap(terms.into_iter());
    Ok(result(n, k, t, alpha, gap, tr))
}

/// `P(ρ^{x,x}_avg, ζ₀)` for a logical basis input of Hamming weight `j`.
pub fn u1_diagonal_symmetry_term(n: usize, k: usize, t: usize, alpha: usize, j: usize) -> Result<SymmetryTermResult> {
    check(n, k, t, alpha)?;
    if j > k {
        return Err(Error::InvalidArgument(format!("logical weight {j} exceeds k = {k}")));
    }
    let beta = betas(n, k, t, alpha)?;
    let terms = beta
        .iter()
        .enumerate()
        .map(|(i, &b)| ((ln_binomial(t as i64, i as i64)).exp(), b, sector_ratio(n, t, alpha, j, i)));
    let (gap, tr) = diagonal_gap(terms);
    Ok(result(n, k, t, alpha, gap, tr))
}

/// Worst case over logical basis inputs of the averaged symmetry term.
pub fn u1_worst_symmetry_term(n: usize, k: usize, t: usize, alpha: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for j in 0..=k {
        worst = worst.max(u1_diagonal_symmetry_term(n, k, t, alpha, j)?.purified);
    }
    Ok(worst)
}

/// `Tr_{n-t} Φ_avg` on `E ⊗ R` (environment qubits first). The state is
/// diagonal; the entry at environment weight `i`, reference weight `j` is
/// `2^{-k} C(n-t, j+α-i) / C(n, j+α)`.
pub fn u1_average_state(spec: &U1CodeSpec, pattern: &ErasurePattern) -> Result<DensityMatrix> {
    if pattern.n() != spec.n {
        return Err(Error::Shape("pattern and code disagree on n".into()));
    }
    let (t, k) = (pattern.t(), spec.k);
    let fact = HilbertFactorization::qubits(t + k)?;
    let dim = fact.total_dim();
    let scale = (-(k as f64) * LN_2).exp();
    let mut m = CMat::zeros(dim, dim);
    for idx in 0..dim {
        let e = idx >> k;
        let x = idx & ((1 << k) - 1);
        let v = scale * sector_ratio(spec.n, t, spec.alpha, x.count_ones() as usize, e.count_ones() as usize);
        m[(idx, idx)] = C64::new(v, 0.0);
    }
    Ok(DensityMatrix::assume_valid(DenseOperator::new(fact, m)?))
}

/// The marginal `ζ₀ = Σ_i β_i Π_i` on `t` environment qubits.
pub fn u1_marginal_zeta(n: usize, k: usize, t: usize, alpha: usize) -> Result<DensityMatrix> {
    let beta = betas(n, k, t, alpha)?;
    let fact = HilbertFactorization::qubits(t)?;
    let dim = fact.total_dim();
    let m = CMat::from_fn(dim, dim, |a, b| if a == b { C64::new(beta[a.count_ones() as usize], 0.0) } else { C64::new(0.0, 0.0) });
    Ok(DensityMatrix::assume_valid(DenseOperator::new(fact, m)?))
}

/// Leading-order Choi error `√(tk) / (4n√(a(1-a)))` with `a = α/n`.
pub fn u1_choi_leading_order(n: usize, k: usize, t: usize, alpha: usize) -> f64 {
    let a = alpha as f64 / n as f64;
    ((t * k) as f64).sqrt() / (4.0 * n as f64 * (a * (1.0 - a)).sqrt())
}

/// Leading-order worst-case error `k√t / (4n√(a(1-a)))`.
pub fn u1_worst_leading_order(n: usize, k: usize, t: usize, alpha: usize) -> f64 {
    let a = alpha as f64 / n as f64;
    k as f64 * (t as f64).sqrt() / (4.0 * n as f64 * (a * (1.0 - a)).sqrt())
}

/// Known lower bounds `(ε_Choi, ε_worst)` for any U(1)-covariant code of
/// `k` logical qubits in `n` physical qubits.
pub fn u1_lower_bounds(n: usize, k: usize) -> (f64, f64) {
    let h = k.div_ceil(2);
    let choi = (ln_binomial(k as i64, h as i64) - k as f64 * LN_2).exp() * h as f64 / n as f64;
    (choi, k as f64 / (2.0 * n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn binom(n: i64, k: i64) -> BigInt {
        if k < 0 || k > n {
            return BigInt::from(0);
        }
        (0..k).fold(BigInt::from(1), |acc, q| acc * (n - q) / (q + 1))
    }

    #[test]
    fn beta_matches_exact_rational_sum() {
        let (n, k, t, alpha) = (4i64, 1i64, 1i64, 2i64);
        for i in 0..=t {
            let mut exact = BigRational::from_integer(BigInt::from(0));
            for j in 0..=k {
                exact += BigRational::new(binom(k, j) * binom(n - t, j + alpha - i), binom(n, j + alpha) * BigInt::from(1 << k));
            }
            let f: f64 = num_traits::ToPrimitive::to_f64(&exact).unwrap();
            let got = u1_beta(4, 1, 1, 2, i as usize).unwrap();
            assert!((got - f).abs() < 1e-15, "i={i}: {got} vs {f}");
        }
        assert_eq!(u1_beta(10, 2, 0, 3, 0).unwrap(), 1.0);
    }

    #[test]
    fn purified_consistent_with_fidelity() {
        let r = u1_choi_symmetry_term(40, 2, 3, 13).unwrap();
        assert!((r.purified - (1.0 - r.fidelity * r.fidelity).sqrt()).abs() < 1e-12);
        assert!(r.trace_dist <= r.purified + 1e-15);
    }

    #[test]
    fn no_erasure_means_no_symmetry_term() {
        let r = u1_choi_symmetry_term(20, 2, 0, 5).unwrap();
        assert_eq!(r.purified, 0.0);
        assert_eq!(u1_worst_symmetry_term(20, 2, 0, 5).unwrap(), 0.0);
    }

    #[test]
    fn leading_order_agreement() {
        let r = u1_choi_symmetry_term(1000, 1, 1, 500).unwrap();
        assert!((r.purified / 5.0e-4 - 1.0).abs() < 0.05);
        let w = u1_worst_symmetry_term(10_000, 2, 1, 5000).unwrap();
        assert!((w / 1.0e-4 - 1.0).abs() < 0.05);
    }

    #[test]
    fn average_state_is_normalized() {
        let spec = U1CodeSpec::new(8, 2, 3, 0).unwrap();
        let rho = u1_average_state(&spec, &ErasurePattern::new(8, vec![2, 5]).unwrap()).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
    }
}
