//! Conditional min-entropy: the pure-state formula, operator-norm bounds,
//! an SDP oracle, exact `Λ` states for U(1) codes and the partial-decoupling
//! right-hand side.

mod bounds;
mod decomp;
mod decoupling;
mod lambda;
mod sdp;

pub use bounds::{
    hmin_general_lower_bound, sud_hmin_lower_bound_explicit, sud_support_blocks, u1_hmin_lower_bound_explicit,
    u1_support_blocks, u1_worst_hmin_lower_bound_explicit, BlockDims,
};
pub use decomp::{block_average, random_block_unitary, DsBlock, DsDecomposition};
pub use decoupling::{haar_decoupling_control, u1_decoupling_experiment, DecouplingStats};
pub use lambda::{
    factor_operator_distance, first_principles_choi_factors, u1_chi, u1_chi_bounds, u1_kappa, u1_kappa_bounds,
    u1_lambda_choi, u1_lambda_worst, u1_log2_kappa, u1_worst_bounds, LambdaBlock, LambdaLayout, StructuredU1Lambda,
    WorstCaseInput,
};
pub use sdp::{hmin_sdp, SdpSolution, SDP_MAX_DIM};

use crate::error::{Error, Result};
use crate::tensor::linalg::{herm_eigenvalues, hermitize, kron};
use crate::tensor::{schmidt_coefficients, CMat, StateVector};

/// `H_min(P|Q) = -2 log₂ Σ_i α_i` for a pure state with Schmidt
/// coefficients `α_i` across the cut (`cut` lists the qudits of `P`).
pub fn hmin_pure(psi: &StateVector, cut: &[usize]) -> Result<f64> {
    let s: f64 = schmidt_coefficients(psi, cut)?.iter().sum();
    Ok(-2.0 * s.log2())
}

/// Optimal value `s = 2^{-H_min}` of the pure-state SDP for the vector
/// `v` on `P ⊗ Q` (`P` first); `v` need not be normalized.
pub fn pure_sdp_value(v: &[crate::C64], p: usize, q: usize) -> Result<f64> {
    if v.len() != p * q {
        return Err(Error::Shape(format!("vector of length {} is not {p}x{q}", v.len())));
    }
    let m = CMat::from_fn(p, q, |a, b| v[a * q + b]);
    let s: f64 = crate::tensor::linalg::singular_values(&m).iter().sum();
    Ok(s * s)
}

/// `(-log₂‖ρ‖∞ - log₂ dim Q, -log₂‖ρ‖∞)`, which brackets `H_min(P|Q)`.
pub fn hmin_norm_bounds(rho: &CMat, p: usize, q: usize) -> Result<(f64, f64)> {
    if rho.nrows() != p * q || rho.ncols() != p * q {
        return Err(Error::Shape(format!("operator is {}x{}, expected {}", rho.nrows(), rho.ncols(), p * q)));
    }
    let top = herm_eigenvalues(&hermitize(rho)).into_iter().fold(f64::MIN, f64::max);
    if top <= 0.0 {
        return Err(Error::InvalidState("operator has no positive part".into()));
    }
    let upper = -top.log2();
    Ok((upper - (q as f64).log2(), upper))
}

/// `2^{-H_min/2}`, the partial-decoupling bound on the expected trace norm.
pub fn decoupling_rhs(hmin: f64) -> f64 {
    (-0.5 * hmin).exp2()
}

/// `Σ_i Π_i ⊗ ρ_i` on `(P₁ ⊗ P₂) ⊗ Q`, with `Π_i` mutually orthogonal
/// projectors on `P₁` and each `ρ_i` on `P₂ ⊗ Q`.
pub fn assemble_structured(projectors: &[CMat], parts: &[CMat]) -> Result<CMat> {
    if projectors.len() != parts.len() || parts.is_empty() {
        return Err(Error::Shape("need one projector per block".into()));
    }
    let p1 = projectors[0].nrows();
    let inner = parts[0].nrows();
    if projectors.iter().any(|p| p.nrows() != p1 || p.ncols() != p1) || parts.iter().any(|r| r.nrows() != inner || r.ncols() != inner) {
        return Err(Error::Shape("blocks have inconsistent shapes".into()));
    }
    let mut out = CMat::zeros(p1 * inner, p1 * inner);
    for (p, r) in projectors.iter().zip(parts) {
        out += kron(p, r);
    }
    Ok(out)
}

/// Block optima `s_i` of a structured state and the resulting bracket
/// `(1/m) Σ s_i <= s <= Σ s_i`, returned as `(lower, upper, s_i)`.
pub fn structured_sandwich(parts: &[CMat], p2: usize, q: usize) -> Result<(f64, f64, Vec<f64>)> {
    let s: Vec<f64> = parts.iter().map(|r| hmin_sdp(r, p2, q).map(|x| 0.5 * (x.primal + x.dual))).collect::<Result<_>>()?;
    let total: f64 = s.iter().sum();
    Ok((total / s.len() as f64, total, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::outer;
    use crate::tensor::{haar_state, random_density_matrix, CVec, HilbertFactorization, SeededRng};
    use crate::C64;

    #[test]
    fn pure_formula_examples() {
        let bell = StateVector::maximally_entangled(&HilbertFactorization::qubits(1).unwrap()).unwrap();
        assert!((hmin_pure(&bell, &[0]).unwrap() + 1.0).abs() < 1e-12);
        let prod = StateVector::basis(HilbertFactorization::qubits(2).unwrap(), 1).unwrap();
        assert!(hmin_pure(&prod, &[0]).unwrap().abs() < 1e-12);
        let v = CVec::from_vec(vec![C64::new(0.8f64.sqrt(), 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.2f64.sqrt(), 0.0)]);
        let psi = StateVector::new(HilbertFactorization::qubits(2).unwrap(), v).unwrap();
        assert!((hmin_pure(&psi, &[0]).unwrap() + 0.847996).abs() < 1e-6);
    }

    #[test]
    fn sdp_matches_pure_formula() {
        let mut rng = SeededRng::new(31);
        for (p, q) in [(2, 3), (3, 2), (2, 2), (4, 4)] {
            let psi = haar_state(HilbertFactorization::new(vec![p, q]).unwrap(), &mut rng).unwrap();
            let rho = outer(psi.vector(), psi.vector());
            let s = hmin_sdp(&rho, p, q).unwrap();
            assert!(s.gap() < 1e-6 && s.gap() > -1e-9, "{s:?}");
            assert!((s.hmin() - hmin_pure(&psi, &[0]).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn norm_bounds_examples_and_sandwich() {
        let (lo, hi) = hmin_norm_bounds(&CMat::identity(4, 4).scale(0.25), 2, 2).unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
        let mut rng = SeededRng::new(5);
        for rank in 1..4 {
            let rho = random_density_matrix(HilbertFactorization::new(vec![3, 2]).unwrap(), rank, &mut rng).unwrap();
            let (lo, hi) = hmin_norm_bounds(rho.matrix(), 3, 2).unwrap();
            let h = hmin_sdp(rho.matrix(), 3, 2).unwrap().hmin();
            assert!(lo - 1e-6 <= h && h <= hi + 1e-6, "{lo} {h} {hi}");
        }
    }

    #[test]
    fn decoupling_rhs_at_zero() {
        assert_eq!(decoupling_rhs(0.0), 1.0);
        assert!((decoupling_rhs(4.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pure_value_helper_matches_sdp() {
        let mut rng = SeededRng::new(8);
        let psi = haar_state(HilbertFactorization::new(vec![3, 2]).unwrap(), &mut rng).unwrap();
        let s = pure_sdp_value(psi.vector().as_slice(), 3, 2).unwrap();
        let h = hmin_pure(&psi, &[0]).unwrap();
        assert!((s.log2() + h).abs() < 1e-10);
    }

    #[test]
    fn structured_sandwich_holds() {
        let mut rng = SeededRng::new(77);
        let projectors: Vec<CMat> = (0..3)
            .map(|i| {
                let mut p = CMat::zeros(3, 3);
                p[(i, i)] = C64::new(1.0, 0.0);
                p
            })
            .collect();
        let parts: Vec<CMat> = (0..3)
            .map(|_| random_density_matrix(HilbertFactorization::new(vec![2, 2]).unwrap(), 2, &mut rng).unwrap().matrix().scale(1.0 / 3.0))
            .collect();
        let full = assemble_structured(&projectors, &parts).unwrap();
        let s = hmin_sdp(&full, 6, 2).unwrap();
        let (lo, hi, _) = structured_sandwich(&parts, 2, 2).unwrap();
        let mid = 0.5 * (s.primal + s.dual);
        assert!(lo - 1e-7 <= mid && mid <= hi + 1e-7, "{lo} {mid} {hi}");
    }
}
