use super::{hmin_sdp, pure_sdp_value, SdpSolution};
use crate::error::{Error, Result};
use crate::special::{binomial, ln_binomial};
use crate::tensor::linalg::{matmul, max_abs_diff, qr_with_diag};
use crate::tensor::{CMat, CVec};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Largest `2n + k + t` for which the full-register `Λ` is materialized.
const FULL_REGISTER_CAP: usize = 16;
/// Largest qubit count of the compressed `P₂ ⊗ Q` block register.
const BLOCK_REGISTER_CAP: usize = 12;

/// Logical input of the worst-case `Λ`: a basis state `|x>` or
/// `(|x> + phase |x'>)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum WorstCaseInput {
    Basis(usize),
    Superposition { x: usize, xprime: usize, phase: C64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LambdaLayout {
    /// Block vectors on `(Ā₁ ⊗ A₁) ⊗ (E ⊗ R)`.
    Choi,
    /// Block vectors on `(A₁ ⊗ Ā₁) ⊗ E`.
    Worst(WorstCaseInput),
}

/// `Π_i^{(n-t)} ⊗ |v_i><v_i|`, with `multiplicity = rank Π_i = C(n-t, i)`.
#[derive(Clone, Debug)]
pub struct LambdaBlock {
    pub i: usize,
    pub multiplicity: f64,
    pub vector: CVec,
}

/// `Λ = Σ_i Π_i^{(n-t)} ⊗ |v_i><v_i|` for a U(1) code under erasure of `t`
/// qubits. The pure ancilla factor on `A₂` is dropped: it does not change
/// the min-entropy.
#[derive(Clone, Debug)]
pub struct StructuredU1Lambda {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub alpha: usize,
    pub layout: LambdaLayout,
    p2_dim: usize,
    q_dim: usize,
    blocks: Vec<LambdaBlock>,
}

fn check_params(n: usize, k: usize, t: usize, alpha: usize) -> Result<()> {
    if alpha + k > n || t > n {
        return Err(Error::InvalidArgument(format!("invalid (n, k, t, α) = ({n}, {k}, {t}, {alpha})")));
    }
    Ok(())
}

fn weight(x: usize) -> usize {
    x.count_ones() as usize
}

impl StructuredU1Lambda {
    pub fn blocks(&self) -> &[LambdaBlock] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// `(dim P₂, dim Q)` of the block vectors.
    pub fn block_shape(&self) -> (usize, usize) {
        (self.p2_dim, self.q_dim)
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.multiplicity * b.vector.norm_squared()).sum()
    }

    /// Pure-state optima `s_i = (Σ Schmidt coefficients)²` of each block.
    pub fn block_values(&self) -> Result<Vec<f64>> {
        self.blocks.iter().map(|b| pure_sdp_value(b.vector.as_slice(), self.p2_dim, self.q_dim)).collect()
    }

    /// `κ = Σ_i s_i`.
    pub fn kappa(&self) -> Result<f64> {
        Ok(self.block_values()?.iter().sum())
    }

    /// `(-log₂ κ, -log₂(κ/m))` with `m` the number of blocks.
    pub fn hmin_bounds(&self) -> Result<(f64, f64)> {
        let kappa = self.kappa()?;
        Ok((-kappa.log2(), -(kappa / self.blocks.len() as f64).log2()))
    }

    /// `Σ_i |i><i| ⊗ |v_i><v_i|` on `(blocks ⊗ P₂) ⊗ Q`. Replacing each `Π_i`
    /// by a rank-one projector leaves the min-entropy SDP unchanged, since
    /// the constraint `I ⊗ σ >= Λ` splits into one constraint per block.
    pub fn compressed(&self) -> (CMat, usize, usize) {
        let inner = self.p2_dim * self.q_dim;
        let m = self.blocks.len();
        let mut out = CMat::zeros(m * inner, m * inner);
        for (c, b) in self.blocks.iter().enumerate() {
            let blk = &b.vector * b.vector.adjoint();
            out.view_mut((c * inner, c * inner), (inner, inner)).copy_from(&blk);
        }
        (out, m * self.p2_dim, self.q_dim)
    }

    pub fn sdp(&self) -> Result<SdpSolution> {
        let (rho, p, q) = self.compressed();
        hmin_sdp(&rho, p, q)
    }

    /// Factor vectors of `Λ` on the full register `A ⊗ Ā ⊗ R ⊗ E`: one column
    /// `|b>_{Ā₂} ⊗ |Γ_i>` per basis state `b` of weight `i`, so that
    /// `Λ = V V†`. Only available for the Choi layout.
    pub fn full_factors(&self) -> Result<CMat> {
        if self.layout != LambdaLayout::Choi {
            return Err(Error::InvalidArgument("full-register factors exist for the Choi layout only".into()));
        }
        let (n, k, t, alpha) = (self.n, self.k, self.t, self.alpha);
        if 2 * n + k + t > FULL_REGISTER_CAP {
            return Err(Error::DimensionCap { dim: 1 << (2 * n + k + t).min(62), cap: 1 << FULL_REGISTER_CAP });
        }
        let dim = 1usize << (2 * n + k + t);
        let anc = ((1usize << alpha) - 1) << (n - k - alpha);
        let cols: Vec<(usize, usize)> = self
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(c, blk)| (0..1usize << (n - t)).filter(move |&b| weight(b) == blk.i).map(move |b| (c, b)))
            .collect();
        let mut v = CMat::zeros(dim, cols.len());
        let (mk, mt) = ((1usize << k) - 1, (1usize << t) - 1);
        for (col, &(c, b)) in cols.iter().enumerate() {
            let gamma = &self.blocks[c].vector;
            for (idx, amp) in gamma.iter().enumerate() {
                if *amp == C64::new(0.0, 0.0) {
                    continue;
                }
                let (p2, q) = (idx / self.q_dim, idx % self.q_dim);
                let (abar1, a1) = (p2 >> k, p2 & mk);
                let (e, r) = (q >> k, q & mk);
                debug_assert!(e <= mt);
                let a = (a1 << (n - k)) | anc;
                let abar = (abar1 << (n - t)) | b;
                let full = (((a << n) | abar) << k | r) << t | e;
                v[(full, col)] = *amp;
            }
        }
        Ok(v)
    }
}

/// `|φ^{(m)}_w>`-weighted amplitude of `|v>|v>` with `|v| = w`.
fn sector_pair_amp(m: usize, w: usize) -> f64 {
    1.0 / binomial(m as i64, w as i64).sqrt()
}

/// Exact `Λ` for the Choi input: `|Γ_i> = Σ_j |γ_{j,i}>` with
/// `|γ_{j,i}> = √(C(t,j-i) C(k,j-α) / (2^k C(n,j))) |φ^{(t)}_{j-i}>|φ^{(k)}_{j-α}>`.
pub fn u1_lambda_choi(n: usize, k: usize, t: usize, alpha: usize) -> Result<StructuredU1Lambda> {
    check_params(n, k, t, alpha)?;
    if 2 * (t + k) > BLOCK_REGISTER_CAP {
        return Err(Error::DimensionCap { dim: 1 << (2 * (t + k)).min(62), cap: 1 << BLOCK_REGISTER_CAP });
    }
    let (p2_dim, q_dim) = (1usize << (t + k), 1usize << (t + k));
    let mut blocks = Vec::new();
    for i in 0..=(n - t) {
        let mut v = CVec::zeros(p2_dim * q_dim);
        for j in alpha..=alpha + k {
            if j < i || j - i > t {
                continue;
            }
            let (we, wr) = (j - i, j - alpha);
            let c = (binomial(t as i64, we as i64) * binomial(k as i64, wr as i64)
                / ((1u64 << k) as f64 * binomial(n as i64, j as i64)))
                .sqrt();
            let amp = c * sector_pair_amp(t, we) * sector_pair_amp(k, wr);
            for e in (0..1usize << t).filter(|&e| weight(e) == we) {
                for r in (0..1usize << k).filter(|&r| weight(r) == wr) {
                    let p2 = (e << k) | r;
                    let q = (e << k) | r;
                    v[p2 * q_dim + q] += C64::new(amp, 0.0);
                }
            }
        }
        if v.norm() > 0.0 {
            blocks.push(LambdaBlock { i, multiplicity: binomial((n - t) as i64, i as i64), vector: v });
        }
    }
    Ok(StructuredU1Lambda { n, k, t, alpha, layout: LambdaLayout::Choi, p2_dim, q_dim, blocks })
}

fn gamma_x(n: usize, k: usize, t: usize, alpha: usize, x: usize, i: usize) -> CVec {
    let (p2_dim, q_dim) = (1usize << (k + t), 1usize << t);
    let mut v = CVec::zeros(p2_dim * q_dim);
    let j = weight(x) + alpha;
    if j < i || j - i > t {
        return v;
    }
    let m = j - i;
    let amp = (binomial(t as i64, m as i64) / binomial(n as i64, j as i64)).sqrt() * sector_pair_amp(t, m);
    for e in (0..1usize << t).filter(|&e| weight(e) == m) {
        v[((x << t) | e) * q_dim + e] = C64::new(amp, 0.0);
    }
    v
}

/// Exact `Λ` for a logical basis input or a superposition of two:
/// `|γ_{x,i}> = √(C(t,|x|+α-i)/C(n,|x|+α)) |x>|φ^{(t)}_{|x|+α-i}>`.
pub fn u1_lambda_worst(n: usize, k: usize, t: usize, alpha: usize, input: WorstCaseInput) -> Result<StructuredU1Lambda> {
    check_params(n, k, t, alpha)?;
    if k + 2 * t > BLOCK_REGISTER_CAP {
        return Err(Error::DimensionCap { dim: 1 << (k + 2 * t).min(62), cap: 1 << BLOCK_REGISTER_CAP });
    }
    let xs: Vec<(usize, C64)> = match input {
        WorstCaseInput::Basis(x) => vec![(x, C64::new(1.0, 0.0))],
        WorstCaseInput::Superposition { x, xprime, phase } => {
            if x == xprime || (phase.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument("superposition needs distinct inputs and a unit phase".into()));
            }
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vec![(x, C64::new(s, 0.0)), (xprime, phase * s)]
        }
    };
    if xs.iter().any(|&(x, _)| x >= 1 << k) {
        return Err(Error::InvalidArgument(format!("logical input out of range for k = {k}")));
    }
    let mut blocks = Vec::new();
    for i in 0..=(n - t) {
        let mut v = CVec::zeros(1 << (k + 2 * t));
        for &(x, c) in &xs {
            v += gamma_x(n, k, t, alpha, x, i) * c;
        }
        if v.norm() > 0.0 {
            blocks.push(LambdaBlock { i, multiplicity: binomial((n - t) as i64, i as i64), vector: v });
        }
    }
    Ok(StructuredU1Lambda { n, k, t, alpha, layout: LambdaLayout::Worst(input), p2_dim: 1 << (k + t), q_dim: 1 << t, blocks })
}

fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.into_iter().filter(|x| x.is_finite()).collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Natural-log inner sums `ln Σ_j C(t,j-i)C(k,j-α)/√(2^k C(n,j))` for every
/// block `i` that exists.
fn ln_kappa_terms(n: usize, k: usize, t: usize, alpha: usize) -> Vec<f64> {
    let (ni, ki, ti) = (n as i64, k as i64, t as i64);
    let lo = alpha.saturating_sub(t);
    let hi = (alpha + k).min(n - t);
    (lo..=hi)
        .map(|i| {
            log_sum_exp((alpha..=alpha + k).map(|j| {
                let j = j as i64;
                ln_binomial(ti, j - i as i64) + ln_binomial(ki, j - alpha as i64) - 0.5 * (ki as f64 * LN_2 + ln_binomial(ni, j))
            }))
        })
        .filter(|s| s.is_finite())
        .collect()
}

/// `log₂ κ` evaluated in the log domain, valid for very large `n`.
pub fn u1_log2_kappa(n: usize, k: usize, t: usize, alpha: usize) -> Result<f64> {
    check_params(n, k, t, alpha)?;
    Ok(log_sum_exp(ln_kappa_terms(n, k, t, alpha).iter().map(|s| 2.0 * s)) / LN_2)
}

/// `κ = Σ_i (Σ_j C(t,j-i) C(k,j-α) / √(2^k C(n,j)))²`.
pub fn u1_kappa(n: usize, k: usize, t: usize, alpha: usize) -> Result<f64> {
    Ok(u1_log2_kappa(n, k, t, alpha)?.exp2())
}

/// `(-log₂ κ, -log₂(κ/m))`, bracketing `H_min(A*|RE)_Λ` for the Choi input;
/// `m <= k + t + 1` is the number of nonzero blocks.
pub fn u1_kappa_bounds(n: usize, k: usize, t: usize, alpha: usize) -> Result<(f64, f64)> {
    let lk = u1_log2_kappa(n, k, t, alpha)?;
    let m = ln_kappa_terms(n, k, t, alpha).len() as f64;
    Ok((-lk, -lk + m.log2()))
}

/// `(-log₂ D, -log₂ D + log₂(t+1))` with `D = Σ_i C(t, w+α-i)² / C(n, w+α)`
/// for a basis input of weight `w`; `D = C(2t,t)/C(n,w+α)` whenever all
/// `t + 1` blocks exist.
pub fn u1_worst_bounds(n: usize, t: usize, alpha: usize, w: usize) -> Result<(f64, f64)> {
    check_params(n, w, t, alpha)?;
    let j = w + alpha;
    let terms: Vec<f64> = (0..=(n - t))
        .filter(|&i| i <= j && j - i <= t)
        .map(|i| 2.0 * ln_binomial(t as i64, (j - i) as i64))
        .collect();
    let log2_d = (log_sum_exp(terms.iter().cloned()) - ln_binomial(n as i64, j as i64)) / LN_2;
    Ok((-log2_d, -log2_d + ((t + 1) as f64).log2()))
}

/// `χ = Σ_i (C(t,|x|+α-i)/√C(n,|x|+α) + C(t,|x'|+α-i)/√C(n,|x'|+α))²`.
pub fn u1_chi(n: usize, t: usize, alpha: usize, wx: usize, wxp: usize) -> Result<f64> {
    check_params(n, wx.max(wxp), t, alpha)?;
    let term = |w: usize, i: usize| -> f64 {
        let j = w + alpha;
        if i > j || j - i > t {
            return 0.0;
        }
        binomial(t as i64, (j - i) as i64) / binomial(n as i64, j as i64).sqrt()
    };
    Ok((0..=(n - t)).map(|i| (term(wx, i) + term(wxp, i)).powi(2)).sum())
}

/// `(-log₂(χ/2), -log₂(χ/(2(t+1))))` for the inputs `(|x> ± |x'>)/√2`.
pub fn u1_chi_bounds(n: usize, t: usize, alpha: usize, wx: usize, wxp: usize) -> Result<(f64, f64)> {
    let chi = u1_chi(n, t, alpha, wx, wxp)?;
    Ok((-(chi / 2.0).log2(), -(chi / (2.0 * (t + 1) as f64)).log2()))
}

fn permute_qubits(v: &CVec, nq: usize, order: &[usize]) -> CVec {
    // new position p holds old qubit order[p]
    let mut out = CVec::zeros(v.len());
    for (idx, amp) in v.iter().enumerate() {
        let mut new = 0usize;
        for (p, &q) in order.iter().enumerate() {
            let bit = (idx >> (nq - 1 - q)) & 1;
            new |= bit << (nq - 1 - p);
        }
        out[new] = *amp;
    }
    out
}

fn max_entangled(m: usize) -> CVec {
    let d = 1usize << m;
    let mut v = CVec::zeros(d * d);
    for x in 0..d {
        v[x * d + x] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    v
}

/// Factor vectors of `Ξ(Ψ ⊗ τ)Ξ†` built directly from the definitions:
/// `Ψ = Φ^{A₁R} ⊗ ψ_α`, `τ = Φ^{Ā₁E} ⊗ I/2^{n-t}` and
/// `Ξ = ⊕_j √(2^n / C(n,j)) Π_j^A ⊗ Π_j^Ā`, on `A ⊗ Ā ⊗ R ⊗ E`.
pub fn first_principles_choi_factors(n: usize, k: usize, t: usize, alpha: usize) -> Result<CMat> {
    check_params(n, k, t, alpha)?;
    let nq = 2 * n + k + t;
    if nq > FULL_REGISTER_CAP {
        return Err(Error::DimensionCap { dim: 1 << nq.min(62), cap: 1 << FULL_REGISTER_CAP });
    }
    let mut ancilla = CVec::zeros(1 << (n - k));
    ancilla[((1usize << alpha) - 1) << (n - k - alpha)] = C64::new(1.0, 0.0);
    // (A₁, R, A₂) ⊗ (Ā₁, E) ⊗ Ā₂
    let psi = max_entangled(k).kronecker(&ancilla);
    let tau_pair = max_entangled(t);
    // target order A₁ A₂ Ā₁ Ā₂ R E
    let (a1, r, a2) = (0, k, 2 * k);
    let (ab1, e) = (n + k, n + k + t);
    let ab2 = n + k + 2 * t;
    let mut order: Vec<usize> = (a1..a1 + k).collect();
    order.extend(a2..a2 + n - k);
    order.extend(ab1..ab1 + t);
    order.extend(ab2..ab2 + n - t);
    order.extend(r..r + k);
    order.extend(e..e + t);
    let scale = 1.0 / ((1u64 << (n - t)) as f64).sqrt();
    let mut cols = Vec::with_capacity(1 << (n - t));
    for b in 0..1usize << (n - t) {
        let mut basis = CVec::zeros(1 << (n - t));
        basis[b] = C64::new(scale, 0.0);
        let v = permute_qubits(&psi.kronecker(&tau_pair).kronecker(&basis), nq, &order);
        let xi = CVec::from_iterator(
            v.len(),
            v.iter().enumerate().map(|(idx, amp)| {
                let a = idx >> (n + k + t);
                let abar = (idx >> (k + t)) & ((1 << n) - 1);
                if weight(a) == weight(abar) {
                    amp * (((1u64 << n) as f64) / binomial(n as i64, weight(a) as i64)).sqrt()
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        );
        cols.push(xi);
    }
    Ok(CMat::from_columns(&cols))
}

/// Max entrywise difference between `V V†` and `W W†`, evaluated in an
/// orthonormal basis of the joint column span.
pub fn factor_operator_distance(v: &CMat, w: &CMat) -> Result<f64> {
    if v.nrows() != w.nrows() {
        return Err(Error::Shape("factors act on different spaces".into()));
    }
    let joint = CMat::from_fn(v.nrows(), v.ncols() + w.ncols(), |i, j| if j < v.ncols() { v[(i, j)] } else { w[(i, j - v.ncols())] });
    let (q, _) = qr_with_diag(&joint);
    let pv = matmul(&q.adjoint(), v);
    let pw = matmul(&q.adjoint(), w);
    Ok(max_abs_diff(&matmul(&pv, &pv.adjoint()), &matmul(&pw, &pw.adjoint())))
}
