use super::output::Check;
use crate::error::Result;
use crate::minentropy::{
    assemble_structured, factor_operator_distance, first_principles_choi_factors, hmin_norm_bounds, hmin_pure, hmin_sdp,
    structured_sandwich, u1_lambda_choi,
};
use crate::tensor::linalg::outer;
use crate::tensor::{derive_seed, haar_state, random_density_matrix, CMat, HilbertFactorization, SeededRng};
use crate::C64;
use rand::Rng;

const PURE_TOL: f64 = 1e-6;
const SANDWICH_TOL: f64 = 1e-6;
const LAMBDA_TOL: f64 = 1e-10;

/// Random `(p, q)` with `p q <= 16`.
fn random_dims(rng: &mut SeededRng) -> (usize, usize) {
    loop {
        let p = rng.random_range(2..=8);
        let q = rng.random_range(2..=8);
        if p * q <= 16 {
            return (p, q);
        }
    }
}

/// Pure-state formula against the SDP; one check per state.
pub fn pure_state_checks(count: usize, seed: u64) -> Result<Vec<Check>> {
    (0..count)
        .map(|s| {
            let mut rng = SeededRng::new(derive_seed(seed, "oracle-pure", s as u64));
            let (p, q) = random_dims(&mut rng);
            let psi = haar_state(HilbertFactorization::new(vec![p, q])?, &mut rng)?;
            let exact = hmin_pure(&psi, &[0])?;
            let sdp = hmin_sdp(&outer(psi.vector(), psi.vector()), p, q)?.hmin();
            Ok(Check::within(format!("pure-{s}-{p}x{q}"), "hmin-pure-vs-sdp", sdp, exact, PURE_TOL))
        })
        .collect()
}

/// Operator-norm bracket around the SDP value for random mixed states.
pub fn norm_bound_checks(count: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::with_capacity(2 * count);
    for s in 0..count {
        let mut rng = SeededRng::new(derive_seed(seed, "oracle-mixed", s as u64));
        let (p, q) = random_dims(&mut rng);
        let rank = rng.random_range(1..=p * q);
        let rho = random_density_matrix(HilbertFactorization::new(vec![p, q])?, rank, &mut rng)?;
        let (lo, hi) = hmin_norm_bounds(rho.matrix(), p, q)?;
        let h = hmin_sdp(rho.matrix(), p, q)?.hmin();
        out.push(Check::at_least(format!("mixed-{s}-lower"), "hmin-norm-bracket", h + SANDWICH_TOL, lo));
        out.push(Check::at_most(format!("mixed-{s}-upper"), "hmin-norm-bracket", h - SANDWICH_TOL, hi));
    }
    Ok(out)
}

/// `Σ_i Π_i ⊗ ρ_i` states: `(1/m) Σ s_i <= s <= Σ s_i`.
pub fn structured_checks(count: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::with_capacity(2 * count);
    for s in 0..count {
        let mut rng = SeededRng::new(derive_seed(seed, "oracle-structured", s as u64));
        let m = rng.random_range(2..=4);
        let (p2, q) = (2, 2);
        let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let projectors: Vec<CMat> = (0..m)
            .map(|i| {
                let mut p = CMat::zeros(m, m);
                p[(i, i)] = C64::new(1.0, 0.0);
                p
            })
            .collect();
        let parts: Vec<CMat> = weights
            .iter()
            .map(|w| {
                let rank = rng.random_range(1..=p2 * q);
                Ok(random_density_matrix(HilbertFactorization::new(vec![p2, q])?, rank, &mut rng)?.matrix().scale(w / total))
            })
            .collect::<Result<_>>()?;
        let full = assemble_structured(&projectors, &parts)?;
        let sol = hmin_sdp(&full, m * p2, q)?;
        let value = 0.5 * (sol.primal + sol.dual);
        let (lo, hi, _) = structured_sandwich(&parts, p2, q)?;
        let tol = SANDWICH_TOL * hi;
        out.push(Check::at_least(format!("structured-{s}-lower"), "block-sandwich", value + tol, lo));
        out.push(Check::at_most(format!("structured-{s}-upper"), "block-sandwich", value - tol, hi));
    }
    Ok(out)
}

/// Structured U(1) `Λ` against the state built from its definition.
pub fn lambda_equality_check(n: usize, k: usize, t: usize, alpha: usize) -> Result<Check> {
    let v = u1_lambda_choi(n, k, t, alpha)?.full_factors()?;
    let w = first_principles_choi_factors(n, k, t, alpha)?;
    let dist = factor_operator_distance(&v, &w)?;
    Ok(Check::at_most(format!("lambda-({n},{k},{t},{alpha})"), "structured-lambda", dist, LAMBDA_TOL))
}

/// `-log₂ κ <= H_min <= -log₂ κ + log₂ m` against the SDP optimum.
pub fn kappa_sandwich_checks(n: usize, k: usize, t: usize, alpha: usize) -> Result<Vec<Check>> {
    let lambda = u1_lambda_choi(n, k, t, alpha)?;
    let (lo, hi) = lambda.hmin_bounds()?;
    let h = lambda.sdp()?.hmin();
    let name = format!("kappa-({n},{k},{t},{alpha})");
    Ok(vec![
        Check::at_least(format!("{name}-lower"), "kappa-sandwich", h + SANDWICH_TOL, lo),
        Check::at_most(format!("{name}-upper"), "kappa-sandwich", h - SANDWICH_TOL, hi),
    ])
}

/// The full oracle suite with `pure`, `mixed` and `structured` random
/// states and the fixed `Λ` and `κ` instances.
pub fn minentropy_oracle_suite(pure: usize, mixed: usize, structured: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = pure_state_checks(pure, seed)?;
    out.extend(norm_bound_checks(mixed, seed)?);
    out.extend(structured_checks(structured, seed)?);
    out.push(lambda_equality_check(4, 1, 1, 1)?);
    out.push(lambda_equality_check(6, 1, 1, 2)?);
    out.extend(kappa_sandwich_checks(6, 1, 1, 3)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let checks = minentropy_oracle_suite(3, 3, 2, 1).unwrap();
        for c in &checks {
            assert!(c.pass, "{c:?}");
        }
        assert_eq!(checks.len(), 3 + 6 + 4 + 2 + 2);
    }
}
