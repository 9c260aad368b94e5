use cren::linalg::{partial_trace, random_isometry, BipartiteDims, Subsystem};
use cren::measures::{
    cren_isotropic, cren_pure, cren_werner, f_function, g_function, negativity, pure_negativity,
};
use cren::states::{
    fidelity_param, isotropic_state, random_density, random_density_from_rng, random_pure,
    rng_from_seed, schmidt_decompose, twirl_isotropic, twirl_werner, werner_param, werner_state,
};
use proptest::prelude::*;

fn dims_strategy() -> impl Strategy<Value = BipartiteDims> {
    (1usize..=4, 1usize..=4).prop_map(|(a, b)| BipartiteDims::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pure_closed_form_matches_partial_transpose(dims in dims_strategy(), seed in any::<u64>()) {
        let psi = random_pure(dims, seed);
        let closed = cren_pure(&psi).unwrap().value;
        let pt = negativity(&psi.projector()).unwrap().value;
        prop_assert!((closed - pt).abs() <= 1e-9, "{closed} vs {pt}");
    }

    #[test]
    fn pure_negativity_is_f_of_marginal(dims in dims_strategy(), seed in any::<u64>()) {
        let psi = random_pure(dims, seed);
        let d = dims.min_dim();
        prop_assume!(d >= 2);
        let mu = schmidt_decompose(&psi).probabilities;
        let traced = if dims.a <= dims.b { Subsystem::B } else { Subsystem::A };
        let marginal = partial_trace(psi.projector().matrix(), dims, traced).unwrap();
        let via_f = f_function(&marginal, d).unwrap();
        let sum_sqrt: f64 = mu.iter().map(|m| m.sqrt()).sum();
        let via_g = (sum_sqrt * sum_sqrt - 1.0) / (d as f64 - 1.0);
        let direct = pure_negativity(&mu).unwrap().value;
        prop_assert!((via_f - direct).abs() <= 1e-10);
        prop_assert!((via_g - direct).abs() <= 1e-10);
    }

    #[test]
    fn g_is_concave(n in 2usize..=5, seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let dims = BipartiteDims::new(1, n).unwrap();
        let mut rng = rng_from_seed(seed);
        let a = random_density_from_rng(dims, n, &mut rng).unwrap();
        let b = random_density_from_rng(dims, 1 + seed as usize % n, &mut rng).unwrap();
        let mix = a.mix(&b, lambda).unwrap();
        let lhs = g_function(mix.matrix()).unwrap();
        let rhs = lambda * g_function(a.matrix()).unwrap()
            + (1.0 - lambda) * g_function(b.matrix()).unwrap();
        prop_assert!(lhs - rhs >= -1e-9);
    }

    #[test]
    fn f_is_unitarily_invariant(n in 2usize..=4, seed in any::<u64>()) {
        let dims = BipartiteDims::new(1, n).unwrap();
        let mut rng = rng_from_seed(seed);
        let rho = random_density_from_rng(dims, n, &mut rng).unwrap();
        let u = random_isometry(n, n, &mut rng);
        let rotated = &(&u * rho.matrix()) * &u.adjoint();
        let a = f_function(rho.matrix(), n).unwrap();
        let b = f_function(&rotated, n).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn negativity_is_local_unitary_invariant(
        dims in dims_strategy(),
        rank in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let rank = rank.min(dims.total());
        let rho = random_density(dims, rank, seed).unwrap();
        let mut rng = rng_from_seed(seed ^ 0x5555);
        let ua = random_isometry(dims.a, dims.a, &mut rng);
        let ub = random_isometry(dims.b, dims.b, &mut rng);
        let rotated = rho.conjugate_local(&ua, &ub).unwrap();
        let a = negativity(&rho).unwrap().value;
        let b = negativity(&rotated).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn twirls_are_idempotent(d in 2usize..=4, seed in any::<u64>()) {
        let dims = BipartiteDims::square(d).unwrap();
        let rho = random_density(dims, 1 + seed as usize % (d * d), seed).unwrap();
        let iso = twirl_isotropic(&rho).unwrap();
        let iso2 = twirl_isotropic(&iso).unwrap();
        prop_assert!(iso.matrix().max_abs_diff(iso2.matrix()) <= 1e-12);
        prop_assert!((fidelity_param(&iso).unwrap() - fidelity_param(&rho).unwrap()).abs() <= 1e-12);
        let wer = twirl_werner(&rho).unwrap();
        let wer2 = twirl_werner(&wer).unwrap();
        prop_assert!(wer.matrix().max_abs_diff(wer2.matrix()) <= 1e-12);
        prop_assert!((werner_param(&wer).unwrap() - werner_param(&rho).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn family_parameters_round_trip(d in 2usize..=4, p in 0.0f64..=1.0) {
        let iso = isotropic_state(p, d).unwrap();
        prop_assert!((fidelity_param(&iso).unwrap() - p).abs() <= 1e-12);
        let wer = werner_state(p, d).unwrap();
        prop_assert!((werner_param(&wer).unwrap() - p).abs() <= 1e-12);
    }

    #[test]
    fn closed_forms_bound_negativity(d in 2usize..=4, p in 0.0f64..=1.0) {
        let iso = negativity(&isotropic_state(p, d).unwrap()).unwrap().value;
        prop_assert!((cren_isotropic(p, d).unwrap().value - iso).abs() <= 1e-10);
        let wer = negativity(&werner_state(p, d).unwrap()).unwrap().value;
        prop_assert!(cren_werner(p, d).unwrap().value >= wer - 1e-10);
    }
}
