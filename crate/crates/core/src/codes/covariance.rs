use super::Encoder;
use crate::error::Result;
use crate::symmetry::{charge_phases, tensor_power};
use crate::tensor::linalg::{max_abs_diff, CMat};
use crate::tensor::{haar_unitary, random_density_matrix, DensityMatrix, SeededRng};
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    U1,
    SuD { d: usize },
}

fn diag_conjugate(m: &CMat, phases: &[C64]) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| phases[i] * m[(i, j)] * phases[j].conj())
}

/// Largest entrywise violation of `E(g ρ g^†) = G E(ρ) G^†` over `trials`
/// random logical states and random group elements.
pub fn check_covariance(code: &dyn Encoder, trials: usize, rng: &mut SeededRng) -> Result<f64> {
    let n = code.physical().len();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let rho = random_density_matrix(code.logical().clone(), code.logical().total_dim(), rng)?;
        let (logical_rho, physical) = match code.symmetry() {
            Symmetry::U1 => {
                let theta = 2.0 * std::f64::consts::PI * rng.uniform();
                let k = code.logical().len();
                let rotated = diag_conjugate(rho.matrix(), &charge_phases(k, theta));
                let enc = code.encode(&rho)?;
                (rotated, diag_conjugate(enc.matrix(), &charge_phases(n, theta)))
            }
            Symmetry::SuD { d } => {
                let mut u = haar_unitary(d, rng)?;
                let det = u.determinant();
                let fix = C64::from_polar(1.0, -det.arg() / d as f64);
                u *= fix;
                let big = tensor_power(&u, n)?;
                let rotated = &u * rho.matrix() * u.adjoint();
                let enc = code.encode(&rho)?;
                (rotated, &big * enc.matrix() * big.adjoint())
            }
        };
        let lhs = code.encode(&DensityMatrix::from_matrix(code.logical().clone(), logical_rho)?)?;
        worst = worst.max(max_abs_diff(lhs.matrix(), &physical));
    }
    Ok(worst)
}
