use crate::error::{Error, Result};
use crate::tensor::{CMat, CVec, MAX_DENSE_DIM};
use crate::C64;

/// Largest `n` for which operators built from S_n sums are formed.
pub const GROUP_CAP: usize = 8;

/// Permutation of `0..n`, stored as the image of each point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidArgument(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(a, b);
        Self(v)
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Self(inv)
    }

    pub fn sign(&self) -> i32 {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut sign = 1;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }
}

/// Every permutation of `0..n` in lexicographic order of images.
pub fn all_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n > GROUP_CAP {
        return Err(Error::GroupCap { n, cap: GROUP_CAP });
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation(cur.clone()));
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    Ok(out)
}

/// All permutations of the given subset of points, as full permutations.
pub(crate) fn subgroup_on(points: &[usize], n: usize) -> Result<Vec<Permutation>> {
    let local = all_permutations(points.len())?;
    Ok(local
        .into_iter()
        .map(|p| {
            let mut v: Vec<usize> = (0..n).collect();
            for (a, &pa) in points.iter().zip(p.images()) {
                v[*a] = points[pa];
            }
            Permutation(v)
        })
        .collect())
}

pub(crate) fn check_register(n: usize, d: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim.saturating_mul(d);
        if dim > MAX_DENSE_DIM {
            return Err(Error::DimensionCap { dim: d.saturating_pow(n as u32), cap: MAX_DENSE_DIM });
        }
    }
    Ok(dim)
}

/// Basis map of the qudit permutation that moves qudit `q` to position
/// `pi(q)`: `map[x]` is the index of `O_pi |x>`.
pub fn permutation_index_map(pi: &Permutation, d: usize) -> Result<Vec<usize>> {
    let n = pi.len();
    let dim = check_register(n, d)?;
    let weights: Vec<usize> = (0..n).map(|p| d.pow((n - 1 - p) as u32)).collect();
    let target: Vec<usize> = (0..n).map(|q| weights[pi.apply(q)]).collect();
    let mut map = vec![0; dim];
    let mut digits = vec![0usize; n];
    for slot in map.iter_mut() {
        *slot = digits.iter().zip(&target).map(|(x, w)| x * w).sum();
        for p in (0..n).rev() {
            digits[p] += 1;
            if digits[p] < d {
                break;
            }
            digits[p] = 0;
        }
    }
    Ok(map)
}

/// Dense `O_pi` on `(C^d)^{⊗n}`; satisfies `O_pi O_sigma = O_{pi ∘ sigma}`.
pub fn permutation_operator(pi: &Permutation, d: usize) -> Result<CMat> {
    let map = permutation_index_map(pi, d)?;
    let dim = map.len();
    let mut m = CMat::zeros(dim, dim);
    for (x, &y) in map.iter().enumerate() {
        m[(y, x)] = C64::new(1.0, 0.0);
    }
    Ok(m)
}

pub fn permute_vector(v: &CVec, map: &[usize]) -> CVec {
    let mut out = CVec::zeros(v.len());
    for (x, &y) in map.iter().enumerate() {
        out[y] = v[x];
    }
    out
}

/// Adds `O M O^dagger` into `acc` for the basis map of `O`.
pub(crate) fn add_conjugated(acc: &mut CMat, m: &CMat, map: &[usize]) {
    let dim = map.len();
    for b in 0..dim {
        let fb = map[b];
        for a in 0..dim {
            acc[(map[a], fb)] += m[(a, b)];
        }
    }
}

/// Group average `(1/n!) sum_pi O_pi M O_pi^dagger` over S_n.
///
/// Uses the coset factorization `S_m = ⋃_i (i m) S_{m-1}`, so the cost is
/// `O(n^2 dim^2)` rather than `O(n! dim^2)`.
pub fn permutation_average(m: &CMat, n: usize, d: usize) -> Result<CMat> {
    if n > GROUP_CAP {
        return Err(Error::GroupCap { n, cap: GROUP_CAP });
    }
    let dim = check_register(n, d)?;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::Shape(format!("operator is {}x{}, register has dimension {dim}", m.nrows(), m.ncols())));
    }
    let mut cur = m.clone();
    for top in 1..n {
        let mut acc = cur.clone();
        for i in 0..top {
            let map = permutation_index_map(&Permutation::transposition(n, i, top), d)?;
            add_conjugated(&mut acc, &cur, &map);
        }
        acc.unscale_mut((top + 1) as f64);
        cur = acc;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::max_abs_diff;
    use crate::tensor::SeededRng;

    #[test]
    fn enumeration_and_signs() {
        let p = all_permutations(4).unwrap();
        assert_eq!(p.len(), 24);
        assert_eq!(p.iter().map(|x| x.sign()).sum::<i32>(), 0);
        assert!(matches!(all_permutations(9), Err(Error::GroupCap { .. })));
        assert_eq!(Permutation::transposition(3, 0, 2).sign(), -1);
    }

    #[test]
    fn operator_is_a_homomorphism() {
        let perms = all_permutations(3).unwrap();
        for a in &perms {
            for b in &perms {
                let lhs = permutation_operator(a, 2).unwrap() * permutation_operator(b, 2).unwrap();
                let rhs = permutation_operator(&a.compose(b), 2).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn operator_moves_qudit_to_image_position() {
        // pi = (0 -> 1, 1 -> 2, 2 -> 0) sends |a b c> to |c a b>.
        let pi = Permutation::new(vec![1, 2, 0]).unwrap();
        let map = permutation_index_map(&pi, 3).unwrap();
        let idx = |a: usize, b: usize, c: usize| a * 9 + b * 3 + c;
        assert_eq!(map[idx(1, 2, 0)], idx(0, 1, 2));
    }

    #[test]
    fn coset_average_matches_brute_force() {
        let mut rng = SeededRng::new(3);
        for (n, d) in [(2usize, 3usize), (3, 2), (4, 2), (5, 2)] {
            let dim = d.pow(n as u32);
            let m = CMat::from_fn(dim, dim, |_, _| rng.complex_normal());
            let fast = permutation_average(&m, n, d).unwrap();
            let perms = all_permutations(n).unwrap();
            let mut slow = CMat::zeros(dim, dim);
            for p in &perms {
                let o = permutation_operator(p, d).unwrap();
                slow += &o * &m * o.adjoint();
            }
            slow.unscale_mut(perms.len() as f64);
            assert!(max_abs_diff(&fast, &slow) < 1e-12, "n={n} d={d}");
        }
    }

    #[test]
    fn average_cap() {
        let m = CMat::zeros(512, 512);
        assert!(matches!(permutation_average(&m, 9, 2), Err(Error::GroupCap { .. })));
    }
}
