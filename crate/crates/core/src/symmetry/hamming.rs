use crate::error::{Error, Result};
use crate::special::binomial_u128;
use crate::tensor::{CMat, MAX_DENSE_DIM};
use crate::C64;

/// Charge sectors of `n` qubits under `Q = sum_i |1><1|_i`: sector `j`
/// holds the computational basis states of Hamming weight `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HammingSectors {
    n: usize,
    sectors: Vec<Vec<usize>>,
}

impl HammingSectors {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n >= usize::BITS as usize || (1usize << n) > MAX_DENSE_DIM {
            return Err(Error::DimensionCap { dim: 1usize.checked_shl(n as u32).unwrap_or(usize::MAX), cap: MAX_DENSE_DIM });
        }
        let mut sectors = vec![Vec::new(); n + 1];
        for x in 0..(1usize << n) {
            sectors[x.count_ones() as usize].push(x);
        }
        Ok(Self { n, sectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Basis indices of weight `j`, ascending.
    pub fn sector(&self, j: usize) -> &[usize] {
        &self.sectors[j]
    }

    pub fn sector_dim(&self, j: usize) -> usize {
        binomial_u128(self.n as u64, j as u64) as usize
    }

    pub fn projector(&self, j: usize) -> CMat {
        let mut p = CMat::zeros(self.dim(), self.dim());
        for &x in &self.sectors[j] {
            p[(x, x)] = C64::new(1.0, 0.0);
        }
        p
    }

    /// Isometry onto sector `j`, columns ordered like [`Self::sector`].
    pub fn isometry(&self, j: usize) -> CMat {
        let s = &self.sectors[j];
        let mut w = CMat::zeros(self.dim(), s.len());
        for (c, &x) in s.iter().enumerate() {
            w[(x, c)] = C64::new(1.0, 0.0);
        }
        w
    }
}

/// Diagonal of `e^{-i θ Q}` on `n` qubits.
pub fn charge_phases(n: usize, theta: f64) -> Vec<C64> {
    (0..(1usize << n)).map(|x| C64::from_polar(1.0, -theta * x.count_ones() as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sectors_partition_the_basis() {
        let h = HammingSectors::new(6).unwrap();
        let total: usize = (0..=6).map(|j| h.sector(j).len()).sum();
        assert_eq!(total, 64);
        for j in 0..=6 {
            assert_eq!(h.sector(j).len(), h.sector_dim(j));
        }
        assert!(HammingSectors::new(13).is_err());
        let p = h.projector(2);
        assert!((p.trace().re - 15.0).abs() < 1e-14);
    }
}
