use super::sud::{sud_average_env_general, sud_lower_bounds};
use super::u1::{u1_average_state, u1_lower_bounds};
use super::{ComplementaryChannel, ErasurePattern};
use crate::codes::{Encoder, Symmetry, SudCode, U1Code};
use crate::error::{Error, Result};
use crate::tensor::linalg::{herm_fn, hermitize, kron, matmul, trace_norm};
use crate::tensor::{derive_seed, fidelity, purified_distance, CMat, DenseOperator, DensityMatrix, HilbertFactorization, SeededRng};
use crate::C64;
use serde::{Deserialize, Serialize};

/// A sampled code of either symmetry.
#[derive(Clone, Copy, Debug)]
pub enum CodeRef<'a> {
    U1(&'a U1Code),
    SuD(&'a SudCode),
}

impl<'a> From<&'a U1Code> for CodeRef<'a> {
    fn from(c: &'a U1Code) -> Self {
        CodeRef::U1(c)
    }
}

impl<'a> From<&'a SudCode> for CodeRef<'a> {
    fn from(c: &'a SudCode) -> Self {
        CodeRef::SuD(c)
    }
}

impl CodeRef<'_> {
    fn encoder(&self) -> &dyn Encoder {
        match self {
            CodeRef::U1(c) => *c,
            CodeRef::SuD(c) => *c,
        }
    }

    fn seed(&self) -> u64 {
        match self {
            CodeRef::U1(c) => c.spec().seed,
            CodeRef::SuD(c) => c.spec().seed,
        }
    }
}

/// How the environment reference state `ζ` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaStrategy {
    /// Environment marginal of the averaged state.
    Marginal,
    MaximallyMixed,
    /// Starts from the marginal and applies fidelity-increasing
    /// geometric-mean updates against the sampled code's output.
    Iterative,
}

/// Error bounds of one sampled code under one erasure pattern.
///
/// All distances are purified distances with a fixed `ζ`, so
/// `eps_choi_upper` and `eps_worst_upper` are upper bounds on the code's
/// errors; `eps_choi_upper <= decoupling_term + symmetry_term` holds by the
/// triangle inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub symmetry: Symmetry,
    pub seed: u64,
    pub n: usize,
    pub t: usize,
    pub zeta: ZetaStrategy,
    /// `P(ρ_U, I/d_L ⊗ ζ)` for the maximally entangled input.
    pub eps_choi_upper: f64,
    /// `P(ρ_U, Φ_avg)`.
    pub decoupling_term: f64,
    /// `‖ρ_U - Φ_avg‖₁`.
    pub decoupling_trace_norm: f64,
    /// `√(2‖ρ_U - Φ_avg‖₁)`, the trace-norm form of the decoupling term.
    pub decoupling_bound: f64,
    /// `P(Φ_avg, I/d_L ⊗ ζ)`.
    pub symmetry_term: f64,
    /// `max_x P(ρ^{x,x}, ζ)`.
    pub worst_diagonal: f64,
    /// `max_{x≠x'} ‖ρ^{x,x'}‖₁`.
    pub worst_offdiagonal: f64,
    /// U(1): `worst_diagonal + d_L √worst_offdiagonal`. SU(d): the largest
    /// `P` found by a multi-start search over pure inputs.
    pub eps_worst_upper: f64,
    pub choi_lower_bound: f64,
    pub worst_lower_bound: f64,
}

impl ErrorReport {
    /// `decoupling_term + symmetry_term - eps_choi_upper`, non-negative up
    /// to rounding.
    pub fn triangle_slack(&self) -> f64 {
        self.decoupling_term + self.symmetry_term - self.eps_choi_upper
    }
}

fn density(fact: &HilbertFactorization, m: CMat) -> Result<DensityMatrix> {
    Ok(DensityMatrix::assume_valid(DenseOperator::new(fact.clone(), m)?))
}

fn trace_out_reference(m: &CMat, de: usize, dr: usize) -> CMat {
    CMat::from_fn(de, de, |e, e2| (0..dr).map(|r| m[(e * dr + r, e2 * dr + r)]).sum())
}

fn geometric_mean(sigma: &CMat, rho: &CMat) -> CMat {
    let scale = sigma.norm().max(1e-300);
    let half = herm_fn(sigma, |v| v.max(0.0).sqrt());
    let inv_half = herm_fn(sigma, |v| if v > 1e-14 * scale { 1.0 / v.sqrt() } else { 0.0 });
    let inner = herm_fn(&matmul(&matmul(&inv_half, rho), &inv_half), |v| v.max(0.0).sqrt());
    matmul(&matmul(&half, &inner), &half)
}

fn refine_zeta(rho: &DensityMatrix, zeta0: CMat, de: usize, dr: usize) -> Result<CMat> {
    let fact = rho.factorization().clone();
    let mixed_r = CMat::identity(dr, dr).scale(1.0 / dr as f64);
    let score = |z: &CMat| -> Result<f64> { fidelity(rho, &density(&fact, kron(z, &mixed_r))?) };
    let mut best = zeta0.clone();
    let mut best_f = score(&zeta0)?;
    let (mut z, mut prev) = (zeta0, best_f);
    for _ in 0..200 {
        let g = geometric_mean(&kron(&z, &mixed_r), rho.matrix());
        let mut next = hermitize(&trace_out_reference(&g, de, dr));
        let tr = next.trace().re;
        if tr.is_nan() || tr <= 0.0 {
            break;
        }
        next.unscale_mut(tr);
        let f = score(&next)?;
        if f > best_f {
            best_f = f;
            best = next.clone();
        }
        if (f - prev).abs() < 1e-9 {
            break;
        }
        prev = f;
        z = next;
    }
    Ok(best)
}

fn reference_state(x: &CMat) -> CMat {
    CMat::from_fn(x.ncols(), x.ncols(), |r, r2| (0..x.nrows()).map(|a| x[(a, r)] * x[(a, r2)].conj()).sum())
}

fn input_distance(ch: &ComplementaryChannel, zeta: &CMat, fact: &HilbertFactorization, x: &CMat) -> Result<f64> {
    let x = x.unscale(x.norm());
    let out = density(fact, ch.apply(&x)?)?;
    let target = density(fact, kron(zeta, &reference_state(&x)))?;
    purified_distance(&out, &target)
}

/// Multi-start finite-difference ascent of `P(out(ψ), ζ ⊗ ψ_R)` over pure
/// inputs `ψ = Σ X[x,r] |x>|r>`.
fn worst_input_search(ch: &ComplementaryChannel, zeta: &CMat, starts: usize, rng: &mut SeededRng) -> Result<f64> {
    let ld = ch.logical_dim();
    let fact = ch.env().concat(&HilbertFactorization::new(vec![ld])?)?;
    let f = |x: &CMat| input_distance(ch, zeta, &fact, x);
    let mut best: f64 = 0.0;
    for s in 0..starts {
        let mut x = if s == 0 {
            CMat::identity(ld, ld)
        } else {
            CMat::from_fn(ld, ld, |_, _| rng.complex_normal())
        };
        x.unscale_mut(x.norm());
        let mut val = f(&x)?;
        let mut step = 0.5;
        let h = 1e-6;
        for _ in 0..200 {
            let mut grad = CMat::zeros(ld, ld);
            for i in 0..ld {
                for j in 0..ld {
                    for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                        let mut xp = x.clone();
                        let mut xm = x.clone();
                        xp[(i, j)] += unit * h;
                        xm[(i, j)] -= unit * h;
                        grad[(i, j)] += unit * ((f(&xp)? - f(&xm)?) / (2.0 * h));
                    }
                }
            }
            let gn2 = grad.norm_squared();
            if gn2 < 1e-20 {
                break;
            }
            let mut accepted = false;
            while step > 1e-10 {
                let mut cand = &x + grad.scale(step);
                cand.unscale_mut(cand.norm());
                let cv = f(&cand)?;
                if cv > val + 1e-4 * step * gn2 {
                    let gain = cv - val;
                    x = cand;
                    val = cv;
                    step *= 2.0;
                    accepted = gain > 1e-13;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        best = best.max(val);
    }
    Ok(best)
}

/// Error report for a sampled code under the given erasure pattern.
pub fn sampled_code_errors(code: CodeRef<'_>, pattern: &ErasurePattern, strategy: ZetaStrategy) -> Result<ErrorReport> {
    let enc = code.encoder();
    let n = enc.physical().len();
    let ld = enc.logical().total_dim();
    let ch = ComplementaryChannel::new(enc, pattern)?;
    let de = ch.env().total_dim();
    let reference = enc.logical().clone();
    let fact = ch.env().concat(&reference)?;
    let rho_u = density(&fact, ch.apply(&CMat::identity(ld, ld).scale(1.0 / (ld as f64).sqrt()))?)?;
    let avg = match code {
        CodeRef::U1(c) => u1_average_state(c.spec(), pattern)?,
        CodeRef::SuD(c) => {
            let s = c.spec();
            if pattern.t() == 0 {
                DensityMatrix::maximally_mixed(reference.clone())
            } else {
                sud_average_env_general(s.n, s.d, &s.lambda, pattern.t())?
            }
        }
    };
    if avg.factorization() != &fact {
        return Err(Error::Shape("average state and code output live on different registers".into()));
    }
    let marginal = hermitize(&trace_out_reference(avg.matrix(), de, ld));
    let zeta = match strategy {
        ZetaStrategy::Marginal => marginal,
        ZetaStrategy::MaximallyMixed => CMat::identity(de, de).scale(1.0 / de as f64),
        ZetaStrategy::Iterative => refine_zeta(&rho_u, marginal, de, ld)?,
    };
    let target = density(&fact, kron(&zeta, &CMat::identity(ld, ld).scale(1.0 / ld as f64)))?;
    let decoupling_term = purified_distance(&rho_u, &avg)?;
    let decoupling_trace_norm = trace_norm(&(rho_u.matrix() - avg.matrix()));
    let symmetry_term = purified_distance(&avg, &target)?;
    let eps_choi_upper = purified_distance(&rho_u, &target)?;

    let zeta_state = density(ch.env(), zeta.clone())?;
    let mut worst_diagonal: f64 = 0.0;
    let mut worst_offdiagonal: f64 = 0.0;
    for x in 0..ld {
        let rho_xx = density(ch.env(), ch.block(x, x).clone())?;
        worst_diagonal = worst_diagonal.max(purified_distance(&rho_xx, &zeta_state)?);
        for x2 in 0..ld {
            if x2 != x {
                worst_offdiagonal = worst_offdiagonal.max(trace_norm(ch.block(x, x2)));
            }
        }
    }
    let (symmetry, (choi_lower_bound, worst_lower_bound), eps_worst_upper) = match code {
        CodeRef::U1(c) => {
            let bound = worst_diagonal + ld as f64 * worst_offdiagonal.sqrt();
            (Symmetry::U1, u1_lower_bounds(n, c.spec().k), bound)
        }
        CodeRef::SuD(c) => {
            let mut rng = SeededRng::new(derive_seed(c.spec().seed, "worst-input", pattern.t() as u64));
            let found = if pattern.t() == 0 { 0.0 } else { worst_input_search(&ch, &zeta, 16, &mut rng)? };
            (Symmetry::SuD { d: c.spec().d }, sud_lower_bounds(n, c.spec().d), found.max(eps_choi_upper))
        }
    };
    Ok(ErrorReport {
        symmetry,
        seed: code.seed(),
        n,
        t: pattern.t(),
        zeta: strategy,
        eps_choi_upper,
        decoupling_term,
        decoupling_trace_norm,
        decoupling_bound: (2.0 * decoupling_trace_norm).sqrt(),
        symmetry_term,
        worst_diagonal,
        worst_offdiagonal,
        eps_worst_upper,
        choi_lower_bound,
        worst_lower_bound,
    })
}
