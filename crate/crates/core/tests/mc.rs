//! Monte Carlo checks of averaged states and sampler invariances.

use covqec::codes::{sample_u1_unitary, CommutantKind, CommutantUnitary, SudCode, SudCodeSpec, U1Code, U1CodeSpec};
use covqec::erasure::{
    sampled_code_errors, sud_average_env, u1_average_state, ComplementaryChannel, ErasurePattern, ZetaStrategy,
};
use covqec::minentropy::{haar_decoupling_control, u1_decoupling_experiment};
use covqec::symmetry::{schur_decomposition, Partition};
use covqec::tensor::linalg::{max_abs_diff, trace_norm};
use covqec::tensor::{derive_seed, CMat, SeededRng};
use covqec::C64;
use std::sync::Arc;

fn entangled(d: usize) -> CMat {
    CMat::identity(d, d).unscale((d as f64).sqrt())
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Largest entrywise gap between the sample mean and `target`, in units of
/// the entry's standard error (absolute floor 1e-12).
fn max_z(samples: &[CMat], target: &CMat) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().fold(CMat::zeros(target.nrows(), target.ncols()), |a, s| a + s).unscale(n);
    let mut worst: f64 = 0.0;
    for i in 0..target.nrows() {
        for j in 0..target.ncols() {
            let var = samples.iter().map(|s| (s[(i, j)] - mean[(i, j)]).norm_sqr()).sum::<f64>() / (n - 1.0);
            let se = (var / n).sqrt().max(1e-12);
            worst = worst.max((mean[(i, j)] - target[(i, j)]).norm() / se);
        }
    }
    worst
}

#[test]
fn u1_average_state_matches_sampled_codes() {
    let (n, k, alpha, t) = (5, 1, 2, 2);
    let pattern = ErasurePattern::first(n, t).unwrap();
    let target = u1_average_state(&U1CodeSpec::new(n, k, alpha, 0).unwrap(), &pattern).unwrap();
    let outputs: Vec<CMat> = (0..1000)
        .map(|s| {
            let code = U1Code::sample(U1CodeSpec::new(n, k, alpha, derive_seed(3, "mc-avg", s)).unwrap()).unwrap();
            ComplementaryChannel::new(&code, &pattern).unwrap().apply(&entangled(2)).unwrap()
        })
        .collect();
    let z = max_z(&outputs, target.matrix());
    assert!(z < 5.0, "largest deviation {z:.2} standard errors");
}

#[test]
fn sud_average_state_matches_sampled_codes() {
    let (n, d) = (4, 2);
    let lambda = Partition::new(vec![2, 1]).unwrap();
    let full = Arc::new(schur_decomposition(n, d).unwrap());
    let anc = schur_decomposition(n - 1, d).unwrap();
    let pattern = ErasurePattern::first(n, 1).unwrap();
    let spec = SudCodeSpec::new(n, d, lambda.clone(), 0).unwrap();
    let target = sud_average_env(&spec, &anc, &pattern).unwrap();
    let outputs: Vec<CMat> = (0..400)
        .map(|s| {
            let spec = SudCodeSpec::new(n, d, lambda.clone(), derive_seed(4, "mc-sud", s)).unwrap();
            let code = SudCode::sample_with(spec, &full, &anc).unwrap();
            ComplementaryChannel::new(&code, &pattern).unwrap().apply(&entangled(d)).unwrap()
        })
        .collect();
    let z = max_z(&outputs, target.matrix());
    assert!(z < 5.0, "largest deviation {z:.2} standard errors");
    let reference = target.partial_trace(&[1]).unwrap();
    assert!(max_abs_diff(reference.matrix(), &CMat::identity(d, d).unscale(d as f64)) < 1e-12);
}

#[test]
fn u1_errors_do_not_depend_on_the_erased_positions() {
    let (n, k, alpha, t) = (6, 1, 3, 2);
    let first = ErasurePattern::first(n, t).unwrap();
    let last = ErasurePattern::new(n, vec![3, 5]).unwrap();
    let collect = |pattern: &ErasurePattern, tag: &str| -> Vec<f64> {
        (0..300)
            .map(|s| {
                let code = U1Code::sample(U1CodeSpec::new(n, k, alpha, derive_seed(5, tag, s)).unwrap()).unwrap();
                sampled_code_errors((&code).into(), pattern, ZetaStrategy::Marginal).unwrap().eps_choi_upper
            })
            .collect()
    };
    let (ma, sa) = mean_and_stderr(&collect(&first, "a"));
    let (mb, sb) = mean_and_stderr(&collect(&last, "b"));
    assert!((ma - mb).abs() < 3.0 * (sa * sa + sb * sb).sqrt(), "{ma} vs {mb}");
}

#[test]
fn sampler_is_invariant_under_a_fixed_commutant_unitary() {
    let (n, k, alpha, t) = (6, 1, 2, 1);
    let pattern = ErasurePattern::first(n, t).unwrap();
    let avg = u1_average_state(&U1CodeSpec::new(n, k, alpha, 0).unwrap(), &pattern).unwrap();
    let fixed = sample_u1_unitary(n, &mut SeededRng::new(99)).unwrap();
    let norms = |shift: bool, tag: &str| -> Vec<f64> {
        (0..400)
            .map(|s| {
                let seed = derive_seed(6, tag, s);
                let u = sample_u1_unitary(n, &mut SeededRng::new(seed)).unwrap();
                let u = if shift {
                    let blocks = u.blocks().iter().zip(fixed.blocks()).map(|(a, b)| a * b).collect();
                    let CommutantKind::U1(h) = u.kind() else { unreachable!() };
                    CommutantUnitary::from_blocks(CommutantKind::U1(h.clone()), blocks).unwrap()
                } else {
                    u
                };
                let code = U1Code::with_unitary(U1CodeSpec::new(n, k, alpha, seed).unwrap(), u).unwrap();
                let out = ComplementaryChannel::new(&code, &pattern).unwrap().apply(&entangled(2)).unwrap();
                trace_norm(&(out - avg.matrix()))
            })
            .collect()
    };
    let (ma, sa) = mean_and_stderr(&norms(false, "plain"));
    let (mb, sb) = mean_and_stderr(&norms(true, "shifted"));
    assert!((ma - mb).abs() < 3.0 * (sa * sa + sb * sb).sqrt(), "{ma} vs {mb}");
}

#[test]
fn identity_code_outputs_are_products() {
    let (n, k, alpha) = (5, 1, 2);
    let code = U1Code::identity(U1CodeSpec::new(n, k, alpha, 0).unwrap()).unwrap();
    // Erasing the logical qubit hands the environment half of the Bell pair.
    let out = ComplementaryChannel::new(&code, &ErasurePattern::first(n, 1).unwrap()).unwrap().apply(&entangled(2)).unwrap();
    let mut bell = CMat::zeros(4, 4);
    for (a, b) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        bell[(a, b)] = C64::new(0.5, 0.0);
    }
    assert!(max_abs_diff(&out, &bell) < 1e-12);
    // Erasing an ancilla qubit in |1> leaves |1><1| ⊗ I/2.
    let out = ComplementaryChannel::new(&code, &ErasurePattern::new(n, vec![1]).unwrap()).unwrap().apply(&entangled(2)).unwrap();
    let mut expected = CMat::zeros(4, 4);
    expected[(2, 2)] = C64::new(0.5, 0.0);
    expected[(3, 3)] = C64::new(0.5, 0.0);
    assert!(max_abs_diff(&out, &expected) < 1e-12);
}

#[test]
fn decoupling_bound_holds_at_eight_qubits_and_haar_decouples_better() {
    let sym = u1_decoupling_experiment(8, 1, 1, 4, 500, 17).unwrap();
    assert!(sym.holds(), "{} > {} + 3·{}", sym.mean, sym.rhs, sym.std_error);
    let haar = haar_decoupling_control(8, 1, 1, 4, 200, 17).unwrap();
    assert!(haar.mean + 3.0 * haar.std_error < sym.mean, "{} vs {}", haar.mean, sym.mean);
}
