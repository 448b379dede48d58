use super::partition::Partition;
use super::permutation::{check_register, permutation_average, permutation_index_map, subgroup_on, Permutation, GROUP_CAP};
use super::tableau::{hook_counts, Tableau};
use crate::error::{Error, Result};
use crate::special::factorial_big;
use crate::special::big_to_f64;
use crate::tensor::linalg::matmul;
use crate::tensor::CMat;
use crate::C64;

/// Direct product of the full symmetric groups on each block of points.
fn product_group(blocks: &[Vec<usize>], n: usize) -> Result<Vec<Permutation>> {
    let mut acc = vec![Permutation::identity(n)];
    for b in blocks.iter().filter(|b| b.len() > 1) {
        let g = subgroup_on(b, n)?;
        acc = acc.iter().flat_map(|a| g.iter().map(move |p| a.compose(p))).collect();
    }
    Ok(acc)
}

fn group_sum(group: &[Permutation], d: usize, signed: bool) -> Result<CMat> {
    let dim = check_register(group[0].len(), d)?;
    let mut m = CMat::zeros(dim, dim);
    for p in group {
        let s = if signed { p.sign() as f64 } else { 1.0 };
        let map = permutation_index_map(p, d)?;
        for (x, &y) in map.iter().enumerate() {
            m[(y, x)] += C64::new(s, 0.0);
        }
    }
    Ok(m)
}

/// Row symmetrizer `r_T`, column antisymmetrizer `c_T`.
pub fn row_and_column_sums(t: &Tableau, d: usize) -> Result<(CMat, CMat)> {
    let n = t.shape().size();
    if n > GROUP_CAP {
        return Err(Error::GroupCap { n, cap: GROUP_CAP });
    }
    let rows = product_group(t.rows(), n)?;
    let cols = product_group(&t.columns(), n)?;
    Ok((group_sum(&rows, d, false)?, group_sum(&cols, d, true)?))
}

/// Young symmetrizer `e_T = r_T c_T` on `(C^d)^{⊗n}`.
pub fn young_symmetrizer(t: &Tableau, d: usize) -> Result<CMat> {
    let (r, c) = row_and_column_sums(t, d)?;
    Ok(matmul(&r, &c))
}

/// Isotypic projector `Π_λ = (r_λ^2 / n!) · avg_π O_π e_T O_π^†`; zero when
/// λ has more than `d` rows.
pub fn schur_projector(lambda: &Partition, d: usize) -> Result<CMat> {
    let n = lambda.size();
    if n > GROUP_CAP {
        return Err(Error::GroupCap { n, cap: GROUP_CAP });
    }
    let dim = check_register(n, d)?;
    if lambda.rows() > d {
        return Ok(CMat::zeros(dim, dim));
    }
    let r = hook_counts(lambda, d)?.r_f64();
    let e = young_symmetrizer(&Tableau::row_reading(lambda), d)?;
    let avg = permutation_average(&e, n, d)?;
    Ok(avg.scale(r * r / big_to_f64(&factorial_big(n as u64))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::partition::partitions;
    use crate::symmetry::tableau::standard_tableaux;
    use crate::tensor::linalg::max_abs_diff;

    #[test]
    fn normalized_symmetrizers_are_idempotent() {
        for n in 1..=5usize {
            let fact = big_to_f64(&factorial_big(n as u64));
            for l in partitions(n, n) {
                let r = hook_counts(&l, n).unwrap().r_f64();
                for t in standard_tableaux(&l) {
                    let p = young_symmetrizer(&t, 2).unwrap().scale(r / fact);
                    assert!(max_abs_diff(&(&p * &p), &p) < 1e-10, "{l}");
                }
            }
        }
    }

    #[test]
    fn projectors_resolve_identity() {
        for (n, d) in [(3usize, 2usize), (3, 3), (4, 2), (5, 2)] {
            let dim = d.pow(n as u32);
            let mut sum = CMat::zeros(dim, dim);
            let ls = partitions(n, n);
            let ps: Vec<CMat> = ls.iter().map(|l| schur_projector(l, d).unwrap()).collect();
            for (l, p) in ls.iter().zip(&ps) {
                sum += p;
                let tr = p.trace().re;
                let expect = hook_counts(l, d).map(|c| c.r_f64() * c.l_f64()).unwrap_or(0.0);
                assert!((tr - expect).abs() < 1e-9);
                assert!(max_abs_diff(p, &p.adjoint()) < 1e-12);
            }
            assert!(max_abs_diff(&sum, &CMat::identity(dim, dim)) < 1e-10);
            for i in 0..ps.len() {
                for j in 0..ps.len() {
                    if i != j {
                        assert!((&ps[i] * &ps[j]).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn symmetric_projector_for_two_qubits() {
        let p = schur_projector(&Partition::new(vec![2]).unwrap(), 2).unwrap();
        assert!((p[(1, 2)].re - 0.5).abs() < 1e-14 && (p[(0, 0)].re - 1.0).abs() < 1e-14);
    }
}
