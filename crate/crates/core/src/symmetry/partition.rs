use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Integer partition with strictly positive, non-increasing parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::InvalidArgument(format!("{parts:?} is not a partition")));
        }
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn rows(&self) -> usize {
        self.0.len()
    }

    pub fn part(&self, i: usize) -> usize {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Self {
        let cols = self.part(0);
        Self((0..cols).map(|j| self.0.iter().filter(|&&p| p > j).count()).collect())
    }

    pub fn contains(&self, other: &Self) -> bool {
        other.rows() <= self.rows() && other.0.iter().enumerate().all(|(i, &p)| p <= self.0[i])
    }

    /// Cells `(row, col)` in row-major order.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        self.0.iter().enumerate().flat_map(|(i, &p)| (0..p).map(move |j| (i, j))).collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// All partitions of `n` with at most `max_rows` rows, descending
/// lexicographic order.
pub fn partitions(n: usize, max_rows: usize) -> Vec<Partition> {
    fn rec(rem: usize, max_part: usize, rows_left: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if rows_left == 0 {
            return;
        }
        for p in (1..=rem.min(max_part)).rev() {
            cur.push(p);
            rec(rem - p, p, rows_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, max_rows, &mut Vec::new(), &mut out);
    out
}

/// Partitions obtained from `lambda` by adding one box, keeping at most
/// `d_cap` rows.
pub fn adds_one_box(lambda: &Partition, d_cap: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    for i in 0..=lambda.rows() {
        if i >= d_cap {
            break;
        }
        let ok = i == 0 || lambda.part(i - 1) > lambda.part(i);
        if ok {
            let mut parts = lambda.0.clone();
            if i == parts.len() {
                parts.push(1);
            } else {
                parts[i] += 1;
            }
            out.push(Partition(parts));
        }
    }
    out
}
