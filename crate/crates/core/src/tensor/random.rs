use super::linalg::{matmul, qr_with_diag, CMat, CVec};
use super::{DenseOperator, DensityMatrix, HilbertFactorization, StateVector, MAX_DENSE_DIM};
use crate::error::{Error, Result};
use crate::C64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

/// ChaCha20 stream seeded by a single `u64`; the only randomness source in
/// the crate, so every result is reproducible from its seed.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: ChaCha20Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream identified by `(tag, index)`.
    pub fn child(&self, tag: &str, index: u64) -> Self {
        Self::new(derive_seed(self.seed, tag, index))
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Complex Gaussian with independent `N(0, 1/2)` components.
    pub fn complex_normal(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.normal() * s, self.normal() * s)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Sub-seed for `(master, tag, index)`; distinct tags or indices give
/// statistically independent streams.
pub fn derive_seed(master: u64, tag: &str, index: u64) -> u64 {
    let tag_hash = tag.bytes().fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01B3));
    splitmix64(splitmix64(splitmix64(master) ^ tag_hash) ^ index)
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary(dim: usize, rng: &mut SeededRng) -> Result<CMat> {
    if dim == 0 {
        return Err(Error::InvalidArgument("unitary dimension must be positive".into()));
    }
    if dim > MAX_DENSE_DIM {
        return Err(Error::DimensionCap { dim, cap: MAX_DENSE_DIM });
    }
    let g = CMat::from_fn(dim, dim, |_, _| rng.complex_normal());
    let (mut q, diag) = qr_with_diag(&g);
    for (c, r) in diag.iter().enumerate() {
        let n = r.norm();
        let phase = if n > 0.0 { r / n } else { C64::new(1.0, 0.0) };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    Ok(q)
}

pub fn haar_state(fact: HilbertFactorization, rng: &mut SeededRng) -> Result<StateVector> {
    let d = fact.total_dim();
    let v = CVec::from_fn(d, |_, _| rng.complex_normal());
    StateVector::normalized(fact, v)
}

/// Random density matrix of the given rank from a Ginibre ensemble.
pub fn random_density_matrix(fact: HilbertFactorization, rank: usize, rng: &mut SeededRng) -> Result<DensityMatrix> {
    let d = fact.total_dim();
    if rank == 0 || rank > d {
        return Err(Error::InvalidArgument(format!("rank {rank} not in 1..={d}")));
    }
    let g = CMat::from_fn(d, rank, |_, _| rng.complex_normal());
    let mut m = matmul(&g, &g.adjoint());
    let tr = m.trace().re;
    m.unscale_mut(tr);
    Ok(DensityMatrix::assume_valid(DenseOperator::new(fact, m)?))
}

#[cfg(test)]
mod tests {
    use super::super::linalg::unitarity_residual;
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        assert_ne!(derive_seed(1, "u1", 0), derive_seed(1, "u1", 1));
        assert_ne!(derive_seed(1, "u1", 0), derive_seed(1, "sud", 0));
        assert_eq!(SeededRng::new(9).child("x", 3).seed(), derive_seed(9, "x", 3));
    }

    #[test]
    fn haar_is_unitary_and_reproducible() {
        for dim in [1, 2, 7, 100] {
            let u = haar_unitary(dim, &mut SeededRng::new(5)).unwrap();
            assert!(unitarity_residual(&u) < 1e-10);
            let v = haar_unitary(dim, &mut SeededRng::new(5)).unwrap();
            assert_eq!(u, v);
        }
        assert!(matches!(haar_unitary(4097, &mut SeededRng::new(0)), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn haar_first_moment_is_maximally_mixed() {
        let mut rng = SeededRng::new(11);
        let mut acc = CMat::zeros(4, 4);
        let samples = 10_000;
        for _ in 0..samples {
            let u = haar_unitary(4, &mut rng).unwrap();
            let col = u.column(0);
            acc += col * col.adjoint();
        }
        acc.unscale_mut(samples as f64);
        let target = CMat::identity(4, 4).scale(0.25);
        assert!(super::super::linalg::max_abs_diff(&acc, &target) < 0.02);
    }

    #[test]
    fn haar_trace_second_moment_is_one() {
        // E|Tr U|^2 = 1 for Haar measure on U(d); an unphased QR sampler
        // is biased on this statistic.
        let mut rng = SeededRng::new(12);
        let fixed = haar_unitary(3, &mut SeededRng::new(99)).unwrap();
        let samples = 20_000;
        let (mut m, mut ml) = (0.0, 0.0);
        for _ in 0..samples {
            let u = haar_unitary(3, &mut rng).unwrap();
            m += u.trace().norm_sqr();
            ml += (&fixed * &u).trace().norm_sqr();
        }
        m /= samples as f64;
        ml /= samples as f64;
        assert!((m - 1.0).abs() < 0.05, "{m}");
        assert!((ml - 1.0).abs() < 0.05, "{ml}");
    }

    #[test]
    fn random_density_is_valid() {
        let f = HilbertFactorization::qubits(3).unwrap();
        let rho = random_density_matrix(f, 3, &mut SeededRng::new(1)).unwrap();
        DensityMatrix::new(rho.operator().clone()).unwrap();
        let ev = rho.eigenvalues();
        assert!(ev[..5].iter().all(|v| v.abs() < 1e-12));
    }
}
