use super::partition::Partition;
use crate::error::{Error, Result};
use crate::special::big_to_f64;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

/// Irrep dimensions attached to a Young diagram: `r` for the symmetric
/// group (standard tableaux) and `l` for U(d) (semistandard tableaux).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauCounts {
    pub r: BigUint,
    pub l: BigUint,
}

impl TableauCounts {
    pub fn r_f64(&self) -> f64 {
        big_to_f64(&self.r)
    }

    pub fn l_f64(&self) -> f64 {
        big_to_f64(&self.l)
    }

    pub fn r_usize(&self) -> Option<usize> {
        self.r.to_usize()
    }

    pub fn l_usize(&self) -> Option<usize> {
        self.l.to_usize()
    }
}

pub fn hook_length(lambda: &Partition, i: usize, j: usize) -> usize {
    let conj = lambda.conjugate();
    lambda.part(i) - j + conj.part(j) - i - 1
}

/// Hook-length and hook-content formulas in exact integer arithmetic.
pub fn hook_counts(lambda: &Partition, d: usize) -> Result<TableauCounts> {
    if d == 0 {
        return Err(Error::InvalidArgument("local dimension must be positive".into()));
    }
    if lambda.rows() > d {
        return Err(Error::InvalidArgument(format!("{lambda} has more than {d} rows, so l = 0")));
    }
    let conj = lambda.conjugate();
    let mut hooks = BigUint::one();
    let mut contents = BigUint::one();
    for (i, j) in lambda.cells() {
        hooks *= lambda.part(i) - j + conj.part(j) - i - 1;
        contents *= d + j - i;
    }
    let n_fact = crate::special::factorial_big(lambda.size() as u64);
    Ok(TableauCounts { r: &n_fact / &hooks, l: &contents / &hooks })
}

/// Standard Young tableau with entries `0..n`, stored row by row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tableau {
    shape: Partition,
    rows: Vec<Vec<usize>>,
}

impl Tableau {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let shape = Partition::new(rows.iter().map(|r| r.len()).collect())?;
        let n = shape.size();
        let mut seen = vec![false; n];
        for &e in rows.iter().flatten() {
            if e >= n || seen[e] {
                return Err(Error::InvalidArgument("tableau entries must be a permutation of 0..n".into()));
            }
            seen[e] = true;
        }
        let t = Self { shape, rows };
        if !t.is_standard() {
            return Err(Error::InvalidArgument("tableau is not standard".into()));
        }
        Ok(t)
    }

    /// Row-reading tableau: first row holds `0..lambda_1`, and so on.
    pub fn row_reading(shape: &Partition) -> Self {
        let mut next = 0;
        let rows = shape
            .parts()
            .iter()
            .map(|&p| {
                let r: Vec<usize> = (next..next + p).collect();
                next += p;
                r
            })
            .collect();
        Self { shape: shape.clone(), rows }
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn columns(&self) -> Vec<Vec<usize>> {
        let width = self.shape.part(0);
        (0..width).map(|j| self.rows.iter().filter(|r| r.len() > j).map(|r| r[j]).collect()).collect()
    }

    pub fn reading_word(&self) -> Vec<usize> {
        self.rows.iter().flatten().copied().collect()
    }

    fn is_standard(&self) -> bool {
        let rows_ok = self.rows.iter().all(|r| r.windows(2).all(|w| w[0] < w[1]));
        let cols_ok = self.columns().iter().all(|c| c.windows(2).all(|w| w[0] < w[1]));
        rows_ok && cols_ok
    }

    /// The permutation `pi` with `pi(self[c]) = other[c]` for every cell `c`.
    pub fn relabeling_to(&self, other: &Tableau) -> Vec<usize> {
        let n = self.shape.size();
        let mut pi = vec![0; n];
        for (a, b) in self.reading_word().into_iter().zip(other.reading_word()) {
            pi[a] = b;
        }
        pi
    }
}

/// All standard tableaux of the given shape, sorted by reading word.
pub fn standard_tableaux(shape: &Partition) -> Vec<Tableau> {
    fn rec(shape: &Partition, rows: &mut Vec<Vec<usize>>, next: usize, out: &mut Vec<Tableau>) {
        if next == shape.size() {
            out.push(Tableau { shape: shape.clone(), rows: rows.clone() });
            return;
        }
        for i in 0..shape.rows() {
            let len = rows[i].len();
            let above_ok = i == 0 || rows[i - 1].len() > len;
            if len < shape.part(i) && above_ok {
                rows[i].push(next);
                rec(shape, rows, next + 1, out);
                rows[i].pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut rows = vec![Vec::new(); shape.rows()];
    rec(shape, &mut rows, 0, &mut out);
    out.sort_by_key(|t| t.reading_word());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::partition::partitions;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn hook_counts_examples() {
        let c = hook_counts(&p(&[2, 1]), 2).unwrap();
        assert_eq!((c.r_usize(), c.l_usize()), (Some(2), Some(2)));
        let c = hook_counts(&p(&[3, 2]), 3).unwrap();
        assert_eq!((c.r_usize(), c.l_usize()), (Some(5), Some(15)));
        assert!(hook_counts(&p(&[1, 1, 1]), 2).is_err());
    }

    #[test]
    fn hook_counts_sum_rules() {
        for n in 1..=8usize {
            let fact = crate::special::factorial_big(n as u64);
            let total: BigUint = partitions(n, n).iter().map(|l| {
                let c = hook_counts(l, n).unwrap();
                &c.r * &c.r
            }).sum();
            assert_eq!(total, fact);
            for d in 1..=4usize {
                let dim: BigUint = partitions(n, d).iter().map(|l| {
                    let c = hook_counts(l, d).unwrap();
                    &c.r * &c.l
                }).sum();
                assert_eq!(dim, BigUint::from(d).pow(n as u32));
            }
        }
    }

    #[test]
    fn enumerated_tableaux_match_hook_formula() {
        for n in 1..=7 {
            for l in partitions(n, n) {
                let t = standard_tableaux(&l);
                assert_eq!(BigUint::from(t.len()), hook_counts(&l, n).unwrap().r);
                assert_eq!(t[0], Tableau::row_reading(&l));
            }
        }
    }

    #[test]
    fn relabeling_maps_tableaux() {
        let l = p(&[2, 1]);
        let ts = standard_tableaux(&l);
        let pi = ts[0].relabeling_to(&ts[1]);
        let mapped: Vec<Vec<usize>> = ts[0].rows().iter().map(|r| r.iter().map(|&e| pi[e]).collect()).collect();
        assert_eq!(mapped, ts[1].rows());
        assert!(Tableau::new(vec![vec![1, 0]]).is_err());
    }
}
