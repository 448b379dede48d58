//! Dense complex linear algebra on `nalgebra` matrices, with the cubic
//! kernels routed through `faer` once matrices get large.

use crate::error::{Error, Result};
use crate::C64;
use nalgebra::{DMatrix, DVector};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const CLIP_FLOOR: f64 = -1e-10;

const FAER_THRESHOLD: usize = 96;

pub(crate) fn to_faer(m: &CMat) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub(crate) fn from_faer(m: faer::MatRef<'_, C64>) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    if a.nrows().min(a.ncols()).min(b.ncols()) < FAER_THRESHOLD {
        return a * b;
    }
    let p = to_faer(a) * to_faer(b);
    from_faer(p.as_ref())
}

/// `a * b * a^dagger`.
pub fn sandwich(a: &CMat, b: &CMat) -> CMat {
    matmul(&matmul(a, b), &a.adjoint())
}

/// Householder QR; returns `(Q, diag(R))`.
pub fn qr_with_diag(m: &CMat) -> (CMat, Vec<C64>) {
    let f = to_faer(m);
    let qr = f.qr();
    let r = qr.R();
    let k = m.nrows().min(m.ncols());
    let diag = (0..k).map(|i| r[(i, i)]).collect();
    let q = qr.compute_thin_Q();
    (from_faer(q.as_ref()), diag)
}

pub fn hermiticity_residual(m: &CMat) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..=j.min(m.nrows() - 1) {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn herm_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let h = hermitize(m);
    let (vals, vecs) = if n >= FAER_THRESHOLD {
        let f = to_faer(&h);
        let eig = f
            .self_adjoint_eigen(faer::Side::Lower)
            .expect("self-adjoint eigensolver did not converge");
        let s = eig.S();
        let vals: Vec<f64> = (0..n).map(|i| s[i].re).collect();
        (vals, from_faer(eig.U()))
    } else {
        let eig = h.symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect::<Vec<f64>>(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = CMat::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    (sorted_vals, sorted_vecs)
}

pub fn herm_eigenvalues(m: &CMat) -> Vec<f64> {
    herm_eig(m).0
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn herm_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = herm_eig(m);
    let n = m.nrows();
    let mut scaled = vecs.clone();
    for (c, &v) in vals.iter().enumerate() {
        let fv = f(v);
        for r in 0..n {
            scaled[(r, c)] *= fv;
        }
    }
    matmul(&scaled, &vecs.adjoint())
}

/// Square root of a positive semidefinite matrix; eigenvalues in
/// `[CLIP_FLOOR, 0)` are clipped, anything more negative is an error.
/// Eigenvalues within rounding noise of zero map to zero, so that noise
/// is not amplified by the square root.
pub fn sqrt_psd(m: &CMat) -> Result<CMat> {
    let (vals, vecs) = herm_eig(m);
    let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if let Some(v) = vals.iter().find(|v| **v < CLIP_FLOOR * scale) {
        return Err(Error::Numerical(format!("matrix square root of non-PSD input (eigenvalue {v:.3e})")));
    }
    let n = m.nrows();
    let noise = 4.0 * n as f64 * f64::EPSILON * scale;
    let mut scaled = vecs.clone();
    for (c, &v) in vals.iter().enumerate() {
        let s = if v <= noise { 0.0 } else { v.sqrt() };
        for r in 0..n {
            scaled[(r, c)] *= s;
        }
    }
    Ok(matmul(&scaled, &vecs.adjoint()))
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = if m.nrows().min(m.ncols()) >= FAER_THRESHOLD {
        to_faer(m).singular_values().expect("svd did not converge")
    } else {
        m.clone().singular_values().iter().copied().collect()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Schatten 1-norm; uses the spectrum for Hermitian input.
pub fn trace_norm(m: &CMat) -> f64 {
    if m.is_square() && hermiticity_residual(m) <= HERMITIAN_TOL * (1.0 + m.norm()) {
        herm_eigenvalues(m).iter().map(|v| v.abs()).sum()
    } else {
        singular_values(m).iter().sum()
    }
}

pub fn operator_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().sum()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

pub fn unitarity_residual(u: &CMat) -> f64 {
    max_abs_diff(&matmul(&u.adjoint(), u), &identity(u.ncols()))
}

/// Solves `a x = b` for square `a`.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Numerical("singular linear system".into()))
}

pub fn outer(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> CMat {
        let mut s = seed;
        CMat::from_fn(n, n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            C64::new(a, b)
        })
    }

    #[test]
    fn matmul_paths_agree() {
        let a = sample(130, 1);
        let b = sample(130, 2);
        assert!(max_abs_diff(&matmul(&a, &b), &(&a * &b)) < 1e-11);
    }

    #[test]
    fn eig_reconstructs_both_paths() {
        for n in [5, 120] {
            let a = sample(n, 3);
            let h = &a + a.adjoint();
            let (vals, vecs) = herm_eig(&h);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            let d = CMat::from_diagonal(&CVec::from_iterator(n, vals.iter().map(|v| C64::new(*v, 0.0))));
            let back = matmul(&matmul(&vecs, &d), &vecs.adjoint());
            assert!(max_abs_diff(&back, &h) < 1e-10);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let a = sample(6, 4);
        let p = &a * a.adjoint();
        let s = sqrt_psd(&p).unwrap();
        assert!(max_abs_diff(&(&s * &s), &p) < 1e-12);
        assert!(sqrt_psd(&(-p)).is_err());
    }

    #[test]
    fn qr_factors() {
        let a = sample(100, 5);
        let (q, d) = qr_with_diag(&a);
        assert!(unitarity_residual(&q) < 1e-12);
        assert_eq!(d.len(), 100);
    }

    #[test]
    fn trace_norm_of_rank_one_non_hermitian() {
        let u = CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let v = CVec::from_vec(vec![C64::new(0.0, 0.0), C64::new(0.0, 2.0)]);
        assert!((trace_norm(&outer(&u, &v)) - 2.0).abs() < 1e-14);
    }
}
