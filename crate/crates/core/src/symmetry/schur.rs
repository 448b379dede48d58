use super::partition::{partitions, Partition};
use super::permutation::{check_register, permutation_index_map, permute_vector, GROUP_CAP};
use super::tableau::{hook_counts, standard_tableaux, Tableau};
use super::young::young_symmetrizer;
use crate::error::{Error, Result};
use crate::special::{big_to_f64, factorial_big};
use crate::tensor::linalg::matmul;
use crate::tensor::{CMat, CVec};
use crate::C64;

/// One isotypic block of `(C^d)^{⊗n} ≅ ⊕_λ L_λ ⊗ R_λ`.
///
/// The isometry has `l * r` columns; column `a * r + b` is the basis vector
/// `|a>_L ⊗ |b>_R`, so `U^{⊗n}` acts as `U_λ ⊗ I_r` and permutations act as
/// `I_l ⊗ π_λ` in this basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurBlock {
    pub lambda: Partition,
    pub l: usize,
    pub r: usize,
    pub isometry: CMat,
}

impl SchurBlock {
    pub fn projector(&self) -> CMat {
        matmul(&self.isometry, &self.isometry.adjoint())
    }

    /// The isometry restricted to one fixed `L`-basis vector, `dim x r`.
    pub fn right_slice(&self, a: usize) -> CMat {
        self.isometry.columns(a * self.r, self.r).into_owned()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchurDecomposition {
    pub n: usize,
    pub d: usize,
    pub blocks: Vec<SchurBlock>,
}

impl SchurDecomposition {
    pub fn dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn block(&self, lambda: &Partition) -> Option<&SchurBlock> {
        self.blocks.iter().find(|b| &b.lambda == lambda)
    }
}

fn gram_schmidt_columns(m: &CMat, want: usize) -> Result<Vec<CVec>> {
    let scale = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut basis: Vec<CVec> = Vec::with_capacity(want);
    for col in m.column_iter() {
        if basis.len() == want {
            break;
        }
        let mut v: CVec = col.into_owned();
        for _ in 0..2 {
            for u in &basis {
                let c = u.dotc(&v);
                v -= u * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 * scale.max(1.0) {
            basis.push(v.unscale(norm));
        }
    }
    if basis.len() != want {
        return Err(Error::Numerical(format!("found {} of {want} image vectors", basis.len())));
    }
    Ok(basis)
}

/// `C = (L^†)^{-1}` for `G = L L^†`, so that `C^† G C = I`.
fn inverse_cholesky_factor(g: &CMat) -> Result<CMat> {
    let chol = g.clone().cholesky().ok_or_else(|| Error::Numerical("Gram matrix not positive definite".into()))?;
    let lt = chol.l().adjoint();
    lt.try_inverse().ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))
}

fn build_block(lambda: &Partition, d: usize) -> Result<SchurBlock> {
    let n = lambda.size();
    let counts = hook_counts(lambda, d)?;
    let (l, r) = (
        counts.l_usize().ok_or_else(|| Error::Numerical("l overflow".into()))?,
        counts.r_usize().ok_or_else(|| Error::Numerical("r overflow".into()))?,
    );
    let t0 = Tableau::row_reading(lambda);
    let norm = r as f64 / big_to_f64(&factorial_big(n as u64));
    let p0 = young_symmetrizer(&t0, d)?.scale(norm);
    let u = gram_schmidt_columns(&p0, l)?;
    let maps: Vec<Vec<usize>> = standard_tableaux(lambda)
        .iter()
        .map(|tb| {
            let pi = super::permutation::Permutation::new(t0.relabeling_to(tb))?;
            permutation_index_map(&pi, d)
        })
        .collect::<Result<_>>()?;
    debug_assert_eq!(maps.len(), r);
    let dim = d.pow(n as u32);
    let orbit = |ua: &CVec| -> CMat {
        let mut x = CMat::zeros(dim, r);
        for (b, map) in maps.iter().enumerate() {
            x.set_column(b, &permute_vector(ua, map));
        }
        x
    };
    let x0 = orbit(&u[0]);
    let mut c = inverse_cholesky_factor(&(x0.adjoint() * &x0))?;
    let w0 = &x0 * &c;
    let refine = inverse_cholesky_factor(&(w0.adjoint() * &w0))?;
    c = &c * refine;
    let mut isometry = CMat::zeros(dim, l * r);
    for (a, ua) in u.iter().enumerate() {
        let wa = orbit(ua) * &c;
        isometry.columns_mut(a * r, r).copy_from(&wa);
    }
    Ok(SchurBlock { lambda: lambda.clone(), l, r, isometry })
}

/// Explicit Schur–Weyl basis for `n` qudits of dimension `d`, one block per
/// partition with at most `d` rows, in descending lexicographic order.
pub fn schur_decomposition(n: usize, d: usize) -> Result<SchurDecomposition> {
    if n == 0 || d < 2 {
        return Err(Error::InvalidArgument("need n >= 1 and d >= 2".into()));
    }
    if n > GROUP_CAP {
        return Err(Error::GroupCap { n, cap: GROUP_CAP });
    }
    check_register(n, d)?;
    let blocks = partitions(n, d).iter().map(|lam| build_block(lam, d)).collect::<Result<_>>()?;
    Ok(SchurDecomposition { n, d, blocks })
}

/// Lifts block operators to the full space: `sum_λ W_λ (I_l ⊗ V_λ) W_λ^†`.
pub fn assemble_commutant(schur: &SchurDecomposition, blocks: &[CMat]) -> Result<CMat> {
    if blocks.len() != schur.blocks.len() {
        return Err(Error::Shape("one block operator per Schur block required".into()));
    }
    let dim = schur.dim();
    let mut out = CMat::zeros(dim, dim);
    for (blk, v) in schur.blocks.iter().zip(blocks) {
        if v.nrows() != blk.r || v.ncols() != blk.r {
            return Err(Error::Shape(format!("block for {} must be {}x{}", blk.lambda, blk.r, blk.r)));
        }
        let lifted = CMat::identity(blk.l, blk.l).kronecker(v);
        out += matmul(&matmul(&blk.isometry, &lifted), &blk.isometry.adjoint());
    }
    Ok(out)
}

/// `U^{⊗n}` as a dense matrix.
pub fn tensor_power(u: &CMat, n: usize) -> Result<CMat> {
    check_register(n, u.nrows())?;
    let mut out = CMat::from_element(1, 1, C64::new(1.0, 0.0));
    for _ in 0..n {
        out = out.kronecker(u);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::permutation::{permutation_operator, Permutation};
    use crate::symmetry::young::schur_projector;
    use crate::tensor::linalg::{max_abs_diff, unitarity_residual};
    use crate::tensor::{haar_unitary, SeededRng};

    /// Checks `m` has the form `A ⊗ I_r` (or `I_l ⊗ B` when `left` is false).
    fn factor_residual(m: &CMat, l: usize, r: usize, left: bool) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..l {
            for a2 in 0..l {
                for b in 0..r {
                    for b2 in 0..r {
                        let v = m[(a * r + b, a2 * r + b2)];
                        let expect = if left {
                            if b == b2 { m[(a * r, a2 * r)] } else { C64::new(0.0, 0.0) }
                        } else if a == a2 {
                            m[(b, b2)]
                        } else {
                            C64::new(0.0, 0.0)
                        };
                        worst = worst.max((v - expect).norm());
                    }
                }
            }
        }
        worst
    }

    #[test]
    fn schur_weyl_structure() {
        let mut rng = SeededRng::new(8);
        for (n, d) in [(2, 2), (3, 2), (3, 3), (4, 2), (5, 2), (4, 3)] {
            let s = schur_decomposition(n, d).unwrap();
            let dim = s.dim();
            let mut total = CMat::zeros(dim, dim);
            let u = haar_unitary(d, &mut rng).unwrap();
            let un = tensor_power(&u, n).unwrap();
            let pi = Permutation::new((0..n).map(|i| (i + 1) % n).collect()).unwrap();
            let op = permutation_operator(&pi, d).unwrap();
            for blk in &s.blocks {
                let w = &blk.isometry;
                assert!(unitarity_residual(w) < 1e-10, "({n},{d}) {}", blk.lambda);
                assert!(max_abs_diff(&blk.projector(), &schur_projector(&blk.lambda, d).unwrap()) < 1e-10);
                total += blk.projector();
                let a = w.adjoint() * &un * w;
                assert!(factor_residual(&a, blk.l, blk.r, true) < 1e-10);
                let b = w.adjoint() * &op * w;
                assert!(factor_residual(&b, blk.l, blk.r, false) < 1e-10);
            }
            assert!(max_abs_diff(&total, &CMat::identity(dim, dim)) < 1e-10);
        }
    }

    #[test]
    fn commutant_assembly_commutes_with_tensor_powers() {
        let s = schur_decomposition(4, 2).unwrap();
        let mut rng = SeededRng::new(2);
        let blocks: Vec<CMat> = s.blocks.iter().map(|b| haar_unitary(b.r, &mut rng).unwrap()).collect();
        let v = assemble_commutant(&s, &blocks).unwrap();
        assert!(unitarity_residual(&v) < 1e-10);
        let un = tensor_power(&haar_unitary(2, &mut rng).unwrap(), 4).unwrap();
        assert!(max_abs_diff(&(&v * &un), &(&un * &v)) < 1e-10);
    }

    #[test]
    fn caps() {
        assert!(matches!(schur_decomposition(9, 2), Err(Error::GroupCap { .. })));
        assert!(matches!(schur_decomposition(8, 3), Err(Error::DimensionCap { .. })));
    }
}
