use super::ErasurePattern;
use crate::codes::{ancilla_vectors, SudCodeSpec};
use crate::error::{Error, Result};
use crate::symmetry::{hook_counts, lr_coefficient, partitions, permutation_average, schur_projector, Partition, SchurDecomposition};
use crate::tensor::linalg::{herm_eig, herm_eigenvalues, kron, outer};
use crate::tensor::{CMat, CVec, DenseOperator, DensityMatrix, HilbertFactorization, SeededRng, StateVector};
use crate::C64;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

fn max_entangled_projector(d: usize) -> Result<CMat> {
    let phi = StateVector::maximally_entangled(&HilbertFactorization::qudits(1, d)?)?;
    Ok(outer(phi.vector(), phi.vector()))
}

/// Closed form `Tr_{n-1} Φ_avg = (1/n)|φ̂><φ̂| + ((n-1)/n) I/d ⊗ I/d` on
/// `E ⊗ R`, independent of λ.
pub fn sud_average_env_closed_form(n: usize, d: usize) -> Result<DensityMatrix> {
    if n < 2 || d < 2 {
        return Err(Error::InvalidArgument("need n >= 2 and d >= 2".into()));
    }
    let fact = HilbertFactorization::qudits(2, d)?;
    let dd = (d * d) as f64;
    let mut m = max_entangled_projector(d)?.scale(1.0 / n as f64);
    for i in 0..d * d {
        m[(i, i)] += C64::new((n - 1) as f64 / (n as f64 * dd), 0.0);
    }
    Ok(DensityMatrix::assume_valid(DenseOperator::new(fact, m)?))
}

/// Environment-reference state of the averaged code, computed exactly as
/// the S_n group average of `φ̂ ⊗ ρ_λ` followed by the partial trace onto
/// the erased qudits. Output ordering is `E ⊗ R`.
pub fn sud_average_env(spec: &SudCodeSpec, anc: &SchurDecomposition, pattern: &ErasurePattern) -> Result<DensityMatrix> {
    let (n, d) = (spec.n, spec.d);
    if pattern.n() != n {
        return Err(Error::Shape("pattern and code disagree on n".into()));
    }
    let branches = ancilla_vectors(spec, anc)?;
    let l = branches.len() as f64;
    let mut rho_anc = CMat::zeros(branches[0].len(), branches[0].len());
    for b in &branches {
        rho_anc += outer(b, b).scale(1.0 / l);
    }
    let phys = HilbertFactorization::qudits(n, d)?;
    let env = phys.subsystem(pattern.erased())?;
    let de = env.total_dim();
    let mut out = CMat::zeros(de * d, de * d);
    for r in 0..d {
        for r2 in 0..d {
            let mut unit = CMat::zeros(d, d);
            unit[(r, r2)] = C64::new(1.0 / d as f64, 0.0);
            let avg = permutation_average(&kron(&unit, &rho_anc), n, d)?;
            let block = DenseOperator::new(phys.clone(), avg)?.partial_trace(pattern.erased())?;
            for e in 0..de {
                for e2 in 0..de {
                    out[(e * d + r, e2 * d + r2)] = block.matrix()[(e, e2)];
                }
            }
        }
    }
    let fact = env.concat(&HilbertFactorization::qudits(1, d)?)?;
    Ok(DensityMatrix::assume_valid(DenseOperator::new(fact, out)?))
}

/// Marginal of `Π_λ / (l_λ r_λ)` on `m` of its `|λ|` qudits, from the
/// Littlewood–Richardson rule:
/// `(1/r_λ) Σ_{μ ⊢ m, ν ⊢ |λ|-m} c^λ_{μν} (r_ν / l_μ) Π_μ`.
pub fn isotypic_marginal(lambda: &Partition, d: usize, m: usize) -> Result<CMat> {
    let total = lambda.size();
    if m > total {
        return Err(Error::InvalidArgument(format!("cannot keep {m} of {total} qudits")));
    }
    let r_lambda = hook_counts(lambda, total.max(d))?.r_f64();
    let dim = d.pow(m as u32);
    let mut out = CMat::zeros(dim, dim);
    if m == 0 {
        out[(0, 0)] = C64::new(1.0, 0.0);
        return Ok(out);
    }
    for mu in partitions(m, d) {
        let l_mu = hook_counts(&mu, d)?.l_f64();
        let mut weight = 0.0;
        for nu in partitions(total - m, total - m) {
            let c = lr_coefficient(&mu, &nu, lambda);
            if c > 0 {
                weight += c as f64 * hook_counts(&nu, nu.size().max(1))?.r_f64();
            }
        }
        if weight > 0.0 {
            out += schur_projector(&mu, d)?.scale(weight / (r_lambda * l_mu));
        }
    }
    Ok(out)
}

/// `Tr_{n-t} Φ_avg` on `E ⊗ R` for `t` erased qudits:
/// `(1/n) Σ_{j ∈ E} φ̂_{jR} ⊗ Q_{t-1} + ((n-t)/n) Q_t ⊗ I/d`, with `Q_m` the
/// isotypic marginal of the ancilla on `m` qudits.
pub fn sud_average_env_general(n: usize, d: usize, lambda: &Partition, t: usize) -> Result<DensityMatrix> {
    if lambda.size() + 1 != n {
        return Err(Error::InvalidArgument(format!("{lambda} is not a partition of n - 1")));
    }
    if t == 0 || t > n {
        return Err(Error::InvalidArgument(format!("cannot erase {t} of {n} qudits")));
    }
    let fact = HilbertFactorization::qudits(t + 1, d)?;
    let dim = fact.total_dim();
    let mut out = CMat::zeros(dim, dim);
    if t < n {
        let q_t = isotypic_marginal(lambda, d, t)?;
        out += kron(&q_t, &CMat::identity(d, d)).scale((n - t) as f64 / (n as f64 * d as f64));
    }
    let q_rest = isotypic_marginal(lambda, d, t - 1)?;
    let phi = max_entangled_projector(d)?;
    let local = kron(&phi, &q_rest);
    let local_fact = HilbertFactorization::qudits(t + 1, d)?;
    let op = DenseOperator::new(local_fact, local)?;
    for j in 0..t {
        // local order is (j, R, others); canonical order is (0..t, R)
        let order: Vec<usize> = (0..=t)
            .map(|p| match p {
                p if p == t => 1,
                p if p == j => 0,
                p if p < j => p + 2,
                p => p + 1,
            })
            .collect();
        out += op.permute_qudits(&order)?.matrix().scale(1.0 / n as f64);
    }
    Ok(DensityMatrix::assume_valid(DenseOperator::new(fact, out)?))
}

/// Purified distance between `𝒞(ψ) = ψ/n + ((n-1)/n) I/d ⊗ ψ_R` and
/// `I/d ⊗ ψ_R` for the input with Schmidt probabilities `p`.
///
/// Evaluated exactly: off the `|ii>` subspace the spectrum is explicit, and
/// on it the problem reduces to `Tr √M` for a `d x d` matrix
/// `M = (n-1)/(n d²) diag(p²) + (1/(n d)) p pᵀ`.
pub fn sud_worst_input_channel(p: &[f64], n: usize) -> Result<f64> {
    check_simplex(p)?;
    if n < 1 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    Ok(epsilon_from_fidelity(channel_fidelity(p, n)))
}

fn check_simplex(p: &[f64]) -> Result<()> {
    if p.len() < 2 || p.iter().any(|&x| x < 0.0 || !x.is_finite()) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("p must be a probability vector of length >= 2".into()));
    }
    Ok(())
}

fn epsilon_from_fidelity(f: f64) -> f64 {
    let f = f.clamp(0.0, 1.0);
    ((1.0 - f) * (1.0 + f)).sqrt()
}

fn reduced_matrix(p: &[f64], n: usize) -> CMat {
    let d = p.len();
    let nf = n as f64;
    let c = (nf - 1.0) / (nf * (d * d) as f64);
    CMat::from_fn(d, d, |i, j| {
        let mut v = p[i] * p[j] / (nf * d as f64);
        if i == j {
            v += c * p[i] * p[i];
        }
        C64::new(v, 0.0)
    })
}

fn channel_fidelity(p: &[f64], n: usize) -> f64 {
    let d = p.len() as f64;
    let nf = n as f64;
    let off = ((nf - 1.0) / nf).sqrt() * (d - 1.0) / d;
    let on: f64 = herm_eigenvalues(&reduced_matrix(p, n)).iter().map(|v| v.max(0.0).sqrt()).sum();
    off + on
}

/// Gradient of the channel fidelity with respect to `p`.
fn channel_fidelity_grad(p: &[f64], n: usize) -> Vec<f64> {
    let d = p.len();
    let nf = n as f64;
    let c = (nf - 1.0) / (nf * (d * d) as f64);
    let (vals, vecs) = herm_eig(&reduced_matrix(p, n));
    let inv_sqrt = CMat::from_fn(d, d, |i, j| {
        (0..d)
            .filter(|&a| vals[a] > 1e-300)
            .map(|a| vecs[(i, a)] * vecs[(j, a)].conj() / vals[a].sqrt())
            .sum::<C64>()
    });
    let u = CVec::from_iterator(d, p.iter().map(|&x| C64::new(x / (d as f64).sqrt(), 0.0)));
    let gu = &inv_sqrt * &u;
    (0..d).map(|k| c * p[k] * inv_sqrt[(k, k)].re + gu[k].re / (nf * (d as f64).sqrt())).collect()
}

/// Dense evaluation of the same quantity from the `d² x d²` operators.
pub fn sud_worst_input_channel_dense(p: &[f64], n: usize) -> Result<f64> {
    check_simplex(p)?;
    let d = p.len();
    let fact = HilbertFactorization::qudits(2, d)?;
    let mut psi = CVec::zeros(d * d);
    for (i, &pi) in p.iter().enumerate() {
        psi[i * d + i] = C64::new(pi.sqrt(), 0.0);
    }
    let rho_r = CMat::from_fn(d, d, |i, j| if i == j { C64::new(p[i], 0.0) } else { C64::new(0.0, 0.0) });
    let mixed = kron(&CMat::identity(d, d).scale(1.0 / d as f64), &rho_r);
    let out = outer(&psi, &psi).scale(1.0 / n as f64) + mixed.scale((n - 1) as f64 / n as f64);
    let a = DensityMatrix::assume_valid(DenseOperator::new(fact.clone(), out)?);
    let b = DensityMatrix::assume_valid(DenseOperator::new(fact, mixed)?);
    crate::tensor::purified_distance(&a, &b)
}

/// Result of the simplex search for the worst Schmidt vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstInput {
    pub p: Vec<f64>,
    pub epsilon: f64,
    pub iterations: usize,
}

/// Maximizes [`sud_worst_input_channel`] over the probability simplex by
/// projected gradient ascent with an exact line search on the directional
/// derivative, restarted from `starts` random interior points.
pub fn sud_worst_input_search(d: usize, n: usize, starts: usize, rng: &mut SeededRng) -> Result<WorstInput> {
    if d < 2 || starts == 0 {
        return Err(Error::InvalidArgument("need d >= 2 and at least one start".into()));
    }
    let mut best: Option<WorstInput> = None;
    for _ in 0..starts {
        let mut p: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect::<Vec<f64>>();
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= s);
        let (p, iterations) = descend_fidelity(p, n);
        let epsilon = epsilon_from_fidelity(channel_fidelity(&p, n));
        if best.as_ref().map_or(true, |b| epsilon > b.epsilon) {
            best = Some(WorstInput { p, epsilon, iterations });
        }
    }
    Ok(best.expect("at least one start"))
}

fn descend_fidelity(mut p: Vec<f64>, n: usize) -> (Vec<f64>, usize) {
    let d = p.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    for it in 0..2000 {
        let g = channel_fidelity_grad(&p, n);
        let free: Vec<usize> = (0..d).filter(|&k| p[k] > 1e-15).collect();
        let mean = free.iter().map(|&k| g[k]).sum::<f64>() / free.len() as f64;
        let mut dir = vec![0.0; d];
        for &k in &free {
            dir[k] = mean - g[k];
        }
        let dnorm = dir.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let gmax = g.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if dnorm.is_nan() || dnorm <= 1e-15 * gmax {
            return (p, it);
        }
        let s_max = (0..d).filter(|&k| dir[k] < 0.0).map(|k| p[k] / -dir[k]).fold(f64::INFINITY, f64::min);
        let slope = |s: f64| {
            let q: Vec<f64> = p.iter().zip(&dir).map(|(a, b)| (a + s * b).max(0.0)).collect();
            // centre the gradient: dir sums to zero only up to rounding
            let g = channel_fidelity_grad(&q, n);
            let gm = free.iter().map(|&k| g[k]).sum::<f64>() / free.len() as f64;
            let centred: Vec<f64> = g.iter().map(|x| x - gm).collect();
            dot(&centred, &dir)
        };
        let hi_cap = 0.99 * s_max;
        let step = if slope(hi_cap) <= 0.0 {
            hi_cap
        } else {
            let (mut lo, mut hi) = (0.0, hi_cap);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if slope(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-16 * hi_cap {
                    break;
                }
            }
            0.5 * (lo + hi)
        };
        let prev = p.clone();
        let f_prev = channel_fidelity(&prev, n);
        let mut step = step;
        loop {
            for k in 0..d {
                p[k] = (prev[k] + step * dir[k]).max(0.0);
            }
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= s);
            if channel_fidelity(&p, n) <= f_prev + 1e-15 {
                break;
            }
            step *= 0.5;
            if step * dnorm < 1e-16 {
                return (prev, it);
            }
        }
        let moved = p.iter().zip(&prev).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        if moved < 1e-15 {
            return (p, it + 1);
        }
    }
    (p, 2000)
}

/// Leading-order SU(d) Choi and worst-case error `√(d² - 1) / (2n)`.
pub fn sud_leading_order(n: usize, d: usize) -> f64 {
    (((d * d) - 1) as f64).sqrt() / (2.0 * n as f64)
}

/// Known lower bounds `(ε_Choi, ε_worst) = (1/(dn), 1/(2n))`.
pub fn sud_lower_bounds(n: usize, d: usize) -> (f64, f64) {
    (1.0 / (d * n) as f64, 1.0 / (2 * n) as f64)
}
