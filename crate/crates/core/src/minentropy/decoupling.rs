use super::{decoupling_rhs, u1_kappa_bounds};
use crate::codes::{CommutantUnitary, U1Code, U1CodeSpec};
use crate::erasure::{u1_average_state, ComplementaryChannel, ErasurePattern};
use crate::error::Result;
use crate::tensor::linalg::trace_norm;
use crate::tensor::{derive_seed, haar_unitary, CMat, SeededRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Monte Carlo estimate of `E_U ‖Tr_{n-t}[U(Ψ)U†] - Tr_{n-t}Φ_avg‖₁` for the
/// maximally entangled logical input, next to the decoupling bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecouplingStats {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub alpha: usize,
    pub samples: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_error: f64,
    /// `-log₂ κ`, a lower bound on `H_min(A*|RE)_Λ`.
    pub hmin_lower: f64,
    /// `2^{-hmin_lower/2} = √κ`.
    pub rhs: f64,
    /// Fraction of sampled codes whose own trace norm is below `rhs`.
    pub fraction_below: f64,
}

impl DecouplingStats {
    /// Mean within three standard errors of the bound.
    pub fn holds(&self) -> bool {
        self.mean <= self.rhs + 3.0 * self.std_error
    }
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn maximally_entangled_input(k: usize) -> CMat {
    let d = 1usize << k;
    CMat::identity(d, d).unscale((d as f64).sqrt())
}

fn collect((n, k, t, alpha): (usize, usize, usize, usize), seed: u64, norms: Vec<f64>) -> Result<DecouplingStats> {
    let (hmin_lower, _) = u1_kappa_bounds(n, k, t, alpha)?;
    let rhs = decoupling_rhs(hmin_lower);
    let (mean, std_error) = mean_and_stderr(&norms);
    let fraction_below = norms.iter().filter(|&&x| x <= rhs).count() as f64 / norms.len().max(1) as f64;
    Ok(DecouplingStats { n, k, t, alpha, samples: norms.len(), seed, mean, std_error, hmin_lower, rhs, fraction_below })
}

/// Samples `samples` U(1) codes (code `s` seeded from `(seed, "decoupling", s)`)
/// and erases the first `t` qubits.
pub fn u1_decoupling_experiment(n: usize, k: usize, t: usize, alpha: usize, samples: usize, seed: u64) -> Result<DecouplingStats> {
    let pattern = ErasurePattern::first(n, t)?;
    let spec = U1CodeSpec::new(n, k, alpha, seed)?;
    let avg = u1_average_state(&spec, &pattern)?;
    let input = maximally_entangled_input(k);
    let norms = (0..samples)
        .into_par_iter()
        .map(|s| {
            let code = U1Code::sample(U1CodeSpec::new(n, k, alpha, derive_seed(seed, "decoupling", s as u64))?)?;
            let out = ComplementaryChannel::new(&code, &pattern)?.apply(&input)?;
            Ok(trace_norm(&(out - avg.matrix())))
        })
        .collect::<Result<Vec<f64>>>()?;
    collect((n, k, t, alpha), seed, norms)
}

/// Same experiment with unrestricted Haar unitaries on all `n` qubits, whose
/// average output is maximally mixed on `E ⊗ R`. The reported bound is the
/// one of the symmetric code with the same parameters.
pub fn haar_decoupling_control(n: usize, k: usize, t: usize, alpha: usize, samples: usize, seed: u64) -> Result<DecouplingStats> {
    let pattern = ErasurePattern::first(n, t)?;
    let input = maximally_entangled_input(k);
    let dim = 1usize << (t + k);
    let avg = CMat::identity(dim, dim).unscale(dim as f64);
    let norms = (0..samples)
        .into_par_iter()
        .map(|s| {
            let code_seed = derive_seed(seed, "haar-control", s as u64);
            let u = haar_unitary(1 << n, &mut SeededRng::new(code_seed))?;
            let code = U1Code::with_unitary(U1CodeSpec::new(n, k, alpha, code_seed)?, CommutantUnitary::unrestricted(u)?)?;
            let out = ComplementaryChannel::new(&code, &pattern)?.apply(&input)?;
            Ok(trace_norm(&(out - &avg)))
        })
        .collect::<Result<Vec<f64>>>()?;
    collect((n, k, t, alpha), seed, norms)
}
