use crate::error::{Error, Result};
use crate::tensor::linalg::{herm_eigenvalues, hermiticity_residual, hermitize, solve, HERMITIAN_TOL};
use crate::tensor::CMat;
use crate::C64;
use serde::{Deserialize, Serialize};

/// Largest total dimension `dim P · dim Q` accepted by [`hmin_sdp`].
pub const SDP_MAX_DIM: usize = 64;

/// Primal and dual optimum of `inf Tr σ s.t. I ⊗ σ >= ρ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpSolution {
    /// `Tr σ` of a strictly feasible σ.
    pub primal: f64,
    /// `<ρ, y>` of a dual-feasible `y` (`y >= 0`, `Tr_P y <= I`).
    pub dual: f64,
    pub newton_steps: usize,
}

impl SdpSolution {
    pub fn gap(&self) -> f64 {
        self.primal - self.dual
    }

    /// `H_min(P|Q) = -log₂ s`, taking `s` as the midpoint of the bracket.
    pub fn hmin(&self) -> f64 {
        -(0.5 * (self.primal + self.dual)).log2()
    }
}

fn partial_trace_p(m: &CMat, p: usize, q: usize) -> CMat {
    CMat::from_fn(q, q, |x, y| (0..p).map(|c| m[(c * q + x, c * q + y)]).sum())
}

fn lift(sigma: &CMat, p: usize) -> CMat {
    CMat::identity(p, p).kronecker(sigma)
}

/// Inverse of a Hermitian positive definite matrix, or `None` if it is not.
fn pd_inverse(z: &CMat) -> Option<CMat> {
    let chol = z.clone().cholesky()?;
    Some(chol.inverse())
}

fn is_feasible(sigma: &CMat, rho: &CMat, p: usize) -> bool {
    (lift(sigma, p) - rho).cholesky().is_some()
}

/// Newton operator `Δ ↦ Tr_P[M (I ⊗ Δ) M]` with `M = Z^{-1}`, as a `q² x q²`
/// matrix on row-major `vec(Δ)`.
fn newton_matrix(m: &CMat, p: usize, q: usize) -> CMat {
    let mut l = CMat::zeros(q * q, q * q);
    for x in 0..q {
        for y in 0..q {
            for u in 0..q {
                for v in 0..q {
                    let mut s = C64::new(0.0, 0.0);
                    for c in 0..p {
                        for c2 in 0..p {
                            s += m[(c * q + x, c2 * q + u)] * m[(c2 * q + v, c * q + y)];
                        }
                    }
                    l[(x * q + y, u * q + v)] = s;
                }
            }
        }
    }
    l
}

/// Conditional min-entropy SDP for `ρ` on `P ⊗ Q` (`P` first), solved by a
/// primal log-barrier method with Newton centering steps and certified by
/// the dual point `y = Z^{-1}/t`, rescaled so that `Tr_P y <= I`.
pub fn hmin_sdp(rho: &CMat, p: usize, q: usize) -> Result<SdpSolution> {
    let dim = p * q;
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::Shape(format!("operator is {}x{}, expected {dim}x{dim}", rho.nrows(), rho.ncols())));
    }
    if dim > SDP_MAX_DIM {
        return Err(Error::DimensionCap { dim, cap: SDP_MAX_DIM });
    }
    let scale = rho.norm();
    if scale == 0.0 {
        return Err(Error::InvalidState("operator is zero".into()));
    }
    if hermiticity_residual(rho) > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::InvalidState("operator is not Hermitian".into()));
    }
    let vals = herm_eigenvalues(rho);
    let top = vals.iter().cloned().fold(f64::MIN, f64::max);
    if vals.iter().any(|&v| v < -1e-10 * top.max(1.0)) {
        return Err(Error::InvalidState("operator is not positive semidefinite".into()));
    }
    // work with ρ / ||ρ||_∞ and rescale at the end
    let rho_n = hermitize(rho).unscale(top);
    let mut sigma = CMat::identity(q, q).scale(2.0);
    let mut t = 1.0;
    let mut steps = 0;
    let barrier_weight = dim as f64;
    loop {
        for _ in 0..100 {
            let z = lift(&sigma, p) - &rho_n;
            let m = pd_inverse(&z).ok_or_else(|| Error::Numerical("lost strict feasibility".into()))?;
            let grad = CMat::identity(q, q).scale(t) - partial_trace_p(&m, p, q);
            let rhs = CMat::from_fn(q * q, 1, |i, _| -grad[(i / q, i % q)]);
            let sol = solve(&newton_matrix(&m, p, q), &rhs)?;
            let delta = hermitize(&CMat::from_fn(q, q, |x, y| sol[(x * q + y, 0)]));
            let decrement: f64 = -(grad.adjoint() * &delta).trace().re;
            steps += 1;
            // the Newton decrement is affine invariant, so a fixed threshold works at every t
            if decrement < 1e-12 {
                break;
            }
            // damped Newton step: for a self-concordant barrier 1/(1+λ) stays feasible
            // and decreases the objective, without comparing function values
            let lambda = decrement.sqrt();
            let mut s = if lambda > 0.25 { 1.0 / (1.0 + lambda) } else { 1.0 };
            loop {
                let cand = &sigma + delta.scale(s);
                if is_feasible(&cand, &rho_n, p) {
                    sigma = cand;
                    break;
                }
                s *= 0.5;
                if s < 1e-14 {
                    return Err(Error::Numerical("Newton step cannot keep strict feasibility".into()));
                }
            }
        }
        let primal = sigma.trace().re;
        if barrier_weight / t < 1e-8 * primal || t > 1e14 {
            break;
        }
        t *= 8.0;
    }
    let z = lift(&sigma, p) - &rho_n;
    let m = pd_inverse(&z).ok_or_else(|| Error::Numerical("lost strict feasibility".into()))?;
    let y = hermitize(&m.unscale(t));
    let cap = herm_eigenvalues(&partial_trace_p(&y, p, q)).into_iter().fold(f64::MIN, f64::max);
    let y = y.unscale(cap.max(f64::MIN_POSITIVE));
    let dual = (rho_n.adjoint() * &y).trace().re;
    let primal = sigma.trace().re;
    Ok(SdpSolution { primal: primal * top, dual: dual * top, newton_steps: steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::outer;
    use crate::tensor::CVec;

    #[test]
    fn maximally_entangled_pair() {
        let v = CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unscale(2f64.sqrt());
        let s = hmin_sdp(&outer(&v, &v), 2, 2).unwrap();
        assert!((s.hmin() + 1.0).abs() < 1e-7, "{s:?}");
        assert!(s.gap().abs() < 1e-7);
    }

    #[test]
    fn maximally_mixed_pair() {
        let s = hmin_sdp(&CMat::identity(4, 4).scale(0.25), 2, 2).unwrap();
        assert!((s.hmin() - 1.0).abs() < 1e-7, "{s:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut m = CMat::identity(4, 4);
        m[(0, 0)] = C64::new(-1.0, 0.0);
        assert!(matches!(hmin_sdp(&m, 2, 2), Err(Error::InvalidState(_))));
        assert!(matches!(hmin_sdp(&CMat::identity(81, 81), 9, 9), Err(Error::DimensionCap { .. })));
    }
}
