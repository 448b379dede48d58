use super::linalg::{self, matmul, sqrt_psd};
use super::{DensityMatrix, StateVector};
use crate::error::{Error, Result};

fn same_register(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.factorization() != sigma.factorization() {
        return Err(Error::Shape("states live on different registers".into()));
    }
    Ok(())
}

/// Root fidelity `|| sqrt(rho) sqrt(sigma) ||_1`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_register(rho, sigma)?;
    let f = linalg::trace_norm(&matmul(&sqrt_psd(rho.matrix())?, &sqrt_psd(sigma.matrix())?));
    Ok(f.clamp(0.0, 1.0))
}

pub fn purified_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    Ok(((1.0 - f) * (1.0 + f)).max(0.0).sqrt())
}

pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_register(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5 * linalg::trace_norm(&diff))
}

/// Schmidt coefficients across `cut | rest`, in descending order.
pub fn schmidt_coefficients(psi: &StateVector, cut: &[usize]) -> Result<Vec<f64>> {
    let m = psi.bipartite_matrix(cut)?;
    Ok(linalg::singular_values(&m))
}

#[cfg(test)]
mod tests {
    use super::super::{random_density_matrix, HilbertFactorization, SeededRng};
    use super::*;

    #[test]
    fn fidelity_identity_and_orthogonality() {
        let f = HilbertFactorization::qubits(2).unwrap();
        let a = StateVector::basis(f.clone(), 0).unwrap().to_density();
        let b = StateVector::basis(f.clone(), 3).unwrap().to_density();
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&a, &b).unwrap() < 1e-12);
        assert!((purified_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = SeededRng::new(3);
        let r = random_density_matrix(f, 4, &mut rng).unwrap();
        assert!(purified_distance(&r, &r).unwrap() < 1e-6);
    }

    #[test]
    fn product_state_schmidt() {
        let f = HilbertFactorization::qubits(3).unwrap();
        let psi = StateVector::basis(f, 5).unwrap();
        let s = schmidt_coefficients(&psi, &[0]).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-14 && s[1].abs() < 1e-14);
    }
}
