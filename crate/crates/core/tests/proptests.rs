use covqec::codes::{Encoder, U1Code, U1CodeSpec};
use covqec::container::{decode_u1_code, encode_u1_code};
use covqec::erasure::{
    sampled_code_errors, u1_average_state, u1_beta, u1_choi_symmetry_term, u1_lower_bounds, u1_worst_symmetry_term,
    ErasurePattern, ZetaStrategy,
};
use covqec::special::{big_log2, binary_entropy, binomial_big, log2_binomial};
use covqec::tensor::linalg::{max_abs_diff, trace_norm, unitarity_residual};
use covqec::tensor::{
    fidelity, haar_unitary, purified_distance, random_density_matrix, trace_distance, DensityMatrix, HilbertFactorization,
    SeededRng,
};
use proptest::prelude::*;
use rand::Rng;

fn register() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 1..=3)
}

fn state(dims: &[usize], seed: u64) -> DensityMatrix {
    let fact = HilbertFactorization::new(dims.to_vec()).unwrap();
    let mut rng = SeededRng::new(seed);
    let rank = rng.random_range(1..=fact.total_dim());
    random_density_matrix(fact, rank, &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn purified_distance_brackets(dims in register(), a in any::<u64>(), b in any::<u64>()) {
        let (rho, sigma) = (state(&dims, a), state(&dims, b));
        let p = purified_distance(&rho, &sigma).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        let norm = trace_norm(&(rho.matrix() - sigma.matrix()));
        prop_assert!(0.5 * norm <= p + 1e-9);
        prop_assert!(p <= (2.0 * norm).sqrt() + 1e-9);
        prop_assert!((p - (1.0 - f * f).max(0.0).sqrt()).abs() < 1e-12);
        prop_assert!((trace_distance(&rho, &sigma).unwrap() - 0.5 * norm).abs() < 1e-12);
    }

    #[test]
    fn purified_distance_triangle(dims in register(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (state(&dims, a), state(&dims, b), state(&dims, c));
        let direct = purified_distance(&x, &z).unwrap();
        let via = purified_distance(&x, &y).unwrap() + purified_distance(&y, &z).unwrap();
        prop_assert!(direct <= via + 1e-9);
    }

    #[test]
    fn partial_trace_yields_states(dims in register(), seed in any::<u64>(), mask in 1u32..8) {
        let rho = state(&dims, seed);
        let keep: Vec<usize> = (0..dims.len()).filter(|i| mask & (1 << i) != 0).collect();
        prop_assume!(!keep.is_empty());
        let reduced = rho.partial_trace(&keep).unwrap();
        prop_assert!(DensityMatrix::new(reduced.operator().clone()).is_ok());
        let expected: usize = keep.iter().map(|&i| dims[i]).product();
        prop_assert_eq!(reduced.dim(), expected);
    }

    #[test]
    fn haar_unitaries_are_unitary(dim in 1usize..=64, seed in any::<u64>()) {
        let u = haar_unitary(dim, &mut SeededRng::new(seed)).unwrap();
        prop_assert!(unitarity_residual(&u) < 1e-10);
        let again = haar_unitary(dim, &mut SeededRng::new(seed)).unwrap();
        prop_assert_eq!(u, again);
    }

    #[test]
    fn log_binomial_matches_exact(n in 0u64..3000, frac in 0.0f64..=1.0) {
        let k = (frac * n as f64).round() as u64;
        let exact = big_log2(&binomial_big(n, k));
        let approx = log2_binomial(n as i64, k as i64);
        prop_assert!((approx - exact).abs() <= 1e-12 * exact.max(1.0), "n={} k={} {} vs {}", n, k, approx, exact);
    }

    #[test]
    fn binary_entropy_symmetric(p in 0.0f64..=1.0) {
        let h = binary_entropy(p);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&h));
        prop_assert!((h - binary_entropy(1.0 - p)).abs() < 1e-12);
    }

    #[test]
    fn u1_symmetry_term_consistent(n in 8usize..400, k in 1usize..=3, t in 1usize..=3, frac in 0.05f64..0.95) {
        let alpha = ((frac * (n - k) as f64) as usize).max(1);
        let r = u1_choi_symmetry_term(n, k, t, alpha).unwrap();
        prop_assert!((r.purified - (1.0 - r.fidelity * r.fidelity).max(0.0).sqrt()).abs() < 1e-12);
        prop_assert!(r.trace_dist <= r.purified + 1e-12);
        let beta_mass: f64 = (0..=t).map(|i| covqec::special::binomial(t as i64, i as i64) * u1_beta(n, k, t, alpha, i).unwrap()).sum();
        prop_assert!((beta_mass - 1.0).abs() < 1e-10);
        let (choi_lb, worst_lb) = u1_lower_bounds(n, k);
        if t == 1 {
            prop_assert!(u1_worst_symmetry_term(n, k, t, alpha).unwrap() >= worst_lb - 1e-12);
            prop_assert!(r.purified >= choi_lb - 1e-12);
        }
    }

    #[test]
    fn worst_symmetry_term_grows_with_k(n in 50usize..2000, t in 1usize..=3, a in 0.2f64..0.8) {
        let mut prev = 0.0;
        for k in 1..=4 {
            let alpha = (a * n as f64) as usize;
            let w = u1_worst_symmetry_term(n, k, t, alpha.min(n - k)).unwrap();
            prop_assert!(w >= prev - 1e-12, "k={} {} < {}", k, w, prev);
            prev = w;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sampled_u1_reports_satisfy_triangle(n in 4usize..=7, k in 1usize..=2, t in 1usize..=2, seed in any::<u64>()) {
        let alpha = (n - k) / 2;
        let code = U1Code::sample(U1CodeSpec::new(n, k, alpha, seed).unwrap()).unwrap();
        let pattern = ErasurePattern::random(n, t, &mut SeededRng::new(seed ^ 1)).unwrap();
        let report = sampled_code_errors((&code).into(), &pattern, ZetaStrategy::Marginal).unwrap();
        prop_assert!(report.triangle_slack() >= -1e-12);
        prop_assert!(report.eps_worst_upper >= k as f64 / (2 * n) as f64 - 1e-12);
        let avg = u1_average_state(code.spec(), &pattern).unwrap();
        prop_assert!(DensityMatrix::new(avg.operator().clone()).is_ok());
    }

    #[test]
    fn u1_encoder_is_isometric(n in 3usize..=7, seed in any::<u64>()) {
        let code = U1Code::sample(U1CodeSpec::new(n, 1, 1, seed).unwrap()).unwrap();
        let mut rng = SeededRng::new(seed);
        let rho = random_density_matrix(code.logical().clone(), 2, &mut rng).unwrap();
        let enc = code.encode(&rho).unwrap();
        prop_assert!(DensityMatrix::new(enc.operator().clone()).is_ok());
        let mut a = rho.eigenvalues();
        let mut b: Vec<f64> = enc.eigenvalues().into_iter().rev().take(2).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn u1_code_container_roundtrip(n in 2usize..=8, seed in any::<u64>()) {
        let code = U1Code::sample(U1CodeSpec::new(n, 1, n / 2, seed).unwrap()).unwrap();
        let back = decode_u1_code(&encode_u1_code(&code)).unwrap();
        prop_assert_eq!(back.spec(), code.spec());
        prop_assert_eq!(max_abs_diff(back.unitary().dense(), code.unitary().dense()), 0.0);
    }
}
