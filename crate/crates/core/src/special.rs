//! Combinatorial helpers that stay accurate far beyond the range of `u64`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use std::sync::OnceLock;

const TABLE: usize = 1024;

fn ln_fact_table() -> &'static [f64] {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = vec![0.0; TABLE];
        for i in 1..TABLE {
            t[i] = t[i - 1] + (i as f64).ln();
        }
        t
    })
}

/// Natural log of `n!`: tabulated below 1024, Stirling series above.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE {
        return ln_fact_table()[n as usize];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// Natural log of the binomial coefficient; `-inf` outside the support.
pub fn ln_binomial(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return f64::NEG_INFINITY;
    }
    let (n, k) = (n as u64, k as u64);
    let k = k.min(n - k);
    if k < 32 {
        let mut s = 0.0;
        for r in 0..k {
            s += ((n - r) as f64 / (k - r) as f64).ln();
        }
        return s;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Natural log of `(Σ k_i)! / Π k_i!`.
pub fn ln_multinomial(ks: &[u64]) -> f64 {
    let n: u64 = ks.iter().sum();
    ln_factorial(n) - ks.iter().map(|&k| ln_factorial(k)).sum::<f64>()
}

pub fn log2_binomial(n: i64, k: i64) -> f64 {
    ln_binomial(n, k) / std::f64::consts::LN_2
}

/// Binomial coefficient as `f64`; zero outside the support.
pub fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    if n <= 60 {
        return binomial_u128(n as u64, k as u64) as f64;
    }
    ln_binomial(n, k).exp()
}

pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for r in 0..k {
        acc = acc * (n - r) as u128 / (r + 1) as u128;
    }
    acc
}

pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for r in 0..k {
        acc *= n - r;
        acc /= r + 1;
    }
    acc
}

pub fn factorial_big(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `C(n - t, m - i) / C(n, m)` as a product of `t` ratios of order one.
///
/// Written as `m^(i) (n-m)^(t-i) / n^(t)` with falling factorials, so the
/// relative error stays within a few ulps even for `n` in the millions.
pub fn binomial_ratio(n: i64, m: i64, t: i64, i: i64) -> f64 {
    if i < 0 || i > t || m < 0 || m > n || t > n {
        return 0.0;
    }
    if m - i < 0 || m - i > n - t {
        return 0.0;
    }
    let mut r = 1.0;
    for q in 0..i {
        r *= (m - q) as f64 / (n - q) as f64;
    }
    for q in 0..(t - i) {
        r *= (n - m - q) as f64 / (n - i - q) as f64;
    }
    r
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

pub fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Base-2 log of a big integer without overflowing `f64`.
pub fn big_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return big_to_f64(x).log2();
    }
    let shift = bits - 900;
    big_to_f64(&(x >> shift)).log2() + shift as f64
}
