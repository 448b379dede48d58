use crate::error::{Error, Result};
use crate::special::{big_log2, binary_entropy, ln_factorial, log2_binomial};
use crate::symmetry::{adds_one_box, hook_counts, Partition};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Base-2 logarithms of the multiplicities `l_j` and `r_j` of one block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDims {
    pub log2_l: f64,
    pub log2_r: f64,
}

/// `H_min >= -(2t + k) log₂ d - log₂ max_j l_j / r_j` over the blocks
/// `j` that support the encoded state.
pub fn hmin_general_lower_bound(support: &[BlockDims], t: usize, k: usize, d: usize) -> Result<f64> {
    if support.is_empty() {
        return Err(Error::InvalidArgument("support must contain at least one block".into()));
    }
    if d < 2 {
        return Err(Error::InvalidArgument("local dimension must be at least 2".into()));
    }
    let worst = support.iter().map(|b| b.log2_l - b.log2_r).fold(f64::NEG_INFINITY, f64::max);
    Ok(-((2 * t + k) as f64) * (d as f64).log2() - worst)
}

/// Charge sectors `α..=α+k` of an `[n, k]` U(1) code: `l = 1`, `r = C(n, j)`.
pub fn u1_support_blocks(n: usize, k: usize, alpha: usize) -> Result<Vec<BlockDims>> {
    if alpha + k > n {
        return Err(Error::InvalidArgument(format!("sectors α..α+k = {alpha}..{} exceed n = {n}", alpha + k)));
    }
    Ok((alpha..=alpha + k).map(|j| BlockDims { log2_l: 0.0, log2_r: log2_binomial(n as i64, j as i64) }).collect())
}

/// Irreps `λ'` with `λ ◁ λ'` (at most `d` rows) supporting an SU(d) code.
pub fn sud_support_blocks(lambda: &Partition, d: usize) -> Result<Vec<BlockDims>> {
    adds_one_box(lambda, d)
        .iter()
        .map(|mu| {
            let c = hook_counts(mu, d)?;
            Ok(BlockDims { log2_l: big_log2(&c.l), log2_r: big_log2(&c.r) })
        })
        .collect()
}

/// Closed-form weakening of the U(1) bound using
/// `log₂ C(n, j) >= n H_b(j/n) - log₂(n + 1)`:
/// `n min{H_b(α/n), H_b((α+k)/n)} - (2t + k) - log₂(n + 1)`.
pub fn u1_hmin_lower_bound_explicit(n: usize, k: usize, t: usize, alpha: usize) -> f64 {
    let nf = n as f64;
    let h = binary_entropy(alpha as f64 / nf).min(binary_entropy((alpha + k) as f64 / nf));
    nf * h - (2 * t + k) as f64 - (nf + 1.0).log2()
}

/// Worst-case analogue for a logical basis input of weight `w`:
/// `-log₂[C(2t,t)/C(n, w+α)] >= n H_b((w+α)/n) - 2t - log₂(n+1)`.
pub fn u1_worst_hmin_lower_bound_explicit(n: usize, t: usize, alpha: usize, w: usize) -> f64 {
    let nf = n as f64;
    nf * binary_entropy((w + alpha) as f64 / nf) - 2.0 * t as f64 - (nf + 1.0).log2()
}

fn shannon_bits(parts: &[usize]) -> f64 {
    let n: usize = parts.iter().sum();
    parts.iter().filter(|&&p| p > 0).map(|&p| {
        let q = p as f64 / n as f64;
        -q * q.log2()
    }).sum()
}

/// Closed-form weakening of the SU(d) bound. For every `λ'` adjacent to
/// `λ` it combines `l ≤ ∏ C(λ'_i+d-1, d-1)`,
/// `r ≥ C(n; λ') / ∏ (λ'_i+d)!/(λ'_i! d!)` and the type-class bound
/// `C(n; λ') ≥ 2^{n H(λ'/n)} / (n+1)^d`.
pub fn sud_hmin_lower_bound_explicit(lambda: &Partition, d: usize, t: usize) -> Result<f64> {
    let blocks = adds_one_box(lambda, d);
    if blocks.is_empty() {
        return Err(Error::InvalidArgument(format!("{lambda} has no admissible extension with {d} rows")));
    }
    let n = lambda.size() + 1;
    let ln_fd = ln_factorial(d as u64);
    let mut worst = f64::NEG_INFINITY;
    for mu in &blocks {
        let mut parts = mu.parts().to_vec();
        parts.resize(d, 0);
        let mut log2_l = 0.0;
        let mut log2_poly = 0.0;
        for &p in &parts {
            log2_l += log2_binomial((p + d - 1) as i64, (d - 1) as i64);
            log2_poly += (ln_factorial((p + d) as u64) - ln_factorial(p as u64) - ln_fd) / LN_2;
        }
        let log2_r = n as f64 * shannon_bits(&parts) - d as f64 * ((n + 1) as f64).log2() - log2_poly;
        worst = worst.max(log2_l - log2_r);
    }
    Ok(-((2 * t + 1) as f64) * (d as f64).log2() - worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u1_bound_at_n100() {
        let exact = hmin_general_lower_bound(&u1_support_blocks(100, 1, 50).unwrap(), 1, 1, 2).unwrap();
        let explicit = u1_hmin_lower_bound_explicit(100, 1, 1, 50);
        assert!(explicit >= 90.0, "{explicit}");
        assert!(exact >= explicit);
        assert!((exact - (log2_binomial(100, 51) - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn sud_bound_is_linear_in_n() {
        let small = hmin_general_lower_bound(&sud_support_blocks(&Partition::new(vec![50, 49]).unwrap(), 2).unwrap(), 1, 1, 2).unwrap();
        let large = hmin_general_lower_bound(&sud_support_blocks(&Partition::new(vec![100, 99]).unwrap(), 2).unwrap(), 1, 1, 2).unwrap();
        assert!(small > 0.0);
        assert!(large / small > 1.7 && large / small < 2.3, "{small} {large}");
        let explicit = sud_hmin_lower_bound_explicit(&Partition::new(vec![50, 49]).unwrap(), 2, 1).unwrap();
        assert!(explicit <= small);
    }

    #[test]
    fn explicit_sud_bound_below_exact_for_d3() {
        for parts in [vec![4, 3, 2], vec![10, 5, 2], vec![7]] {
            let lam = Partition::new(parts).unwrap();
            let exact = hmin_general_lower_bound(&sud_support_blocks(&lam, 3).unwrap(), 1, 1, 3).unwrap();
            let explicit = sud_hmin_lower_bound_explicit(&lam, 3, 1).unwrap();
            assert!(explicit <= exact + 1e-9, "{lam}: {explicit} > {exact}");
        }
    }
}
