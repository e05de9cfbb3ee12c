use lightcone_heun::angular::{angular_pair, angular_residual, jacobi_inner_product};
use lightcone_heun::conformance::series_integrator_gap;
use lightcone_heun::heun_family::{
    alpha_termination_degree, heun_eval, origin_coefficients, BiconfluentParams,
    DoubleConfluentParams, HeunParams,
};
use lightcone_heun::lightcone_model::{
    cornell_epsilon, cornell_heun_map, effective_potential, energy_of_epsilon, epsilon_of_energy,
    kratzer_epsilon, kratzer_identity_residual, Channel, MapForm, PotentialSpec,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cornell_levels_terminate_at_their_own_degree(
        a in -1.0..1.0f64, b in 0.1..3.0f64, m in 0.0..2.0f64, ell in 0usize..4, n in 0usize..8,
    ) {
        let l = ell as f64 + 0.5;
        let eps = cornell_epsilon(a, b, n, l).unwrap();
        let p: HeunParams = cornell_heun_map(a, b, m, l, eps, MapForm::Corrected).params.into();
        prop_assert_eq!(alpha_termination_degree(&p), Some(n));
    }

    #[test]
    fn cornell_epsilon_grows_with_n(a in -1.0..1.0f64, b in 0.1..3.0f64, n in 0usize..10) {
        let lo = cornell_epsilon(a, b, n, 0.5).unwrap();
        let hi = cornell_epsilon(a, b, n + 1, 0.5).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn kratzer_identity_holds(d in -0.9..0.45f64, m in 0.1..3.0f64, n in 0usize..8) {
        let eps = kratzer_epsilon(d, m, n).unwrap();
        prop_assert!(kratzer_identity_residual(d, m, n, eps).abs() < 1e-12);
        prop_assert!(eps <= m);
        prop_assert!(kratzer_epsilon(d, m, n + 1).unwrap() >= eps);
    }

    #[test]
    fn energy_round_trip(a in -1.0..1.0f64, b in 0.1..3.0f64, m in 0.0..2.0f64, eps in 0.0..5.0f64) {
        let pot = PotentialSpec::Cornell { a, b };
        let e = energy_of_epsilon(&pot, m, eps).unwrap();
        let back = epsilon_of_energy(&pot, m, e).unwrap();
        prop_assert!((back - eps).abs() < 1e-9 * (1.0 + eps));
    }

    #[test]
    fn minus_channel_shifts_lambda(c in 0.1..2.0f64, d in -1.0..1.0f64, lambda in 1.5..4.0f64, r in 0.05..10.0f64) {
        let pot = PotentialSpec::Kratzer { c, d };
        let minus = effective_potential(&pot, 1.0, lambda, Channel::Minus).unwrap();
        let plus = effective_potential(&pot, 1.0, lambda - 1.0, Channel::Plus).unwrap();
        prop_assert!((minus(r) - plus(r)).abs() <= 1e-12 * minus(r).abs().max(1.0));
    }

    // x -> s x maps (gamma, delta, eps, alpha, q) to (gamma, s delta, s^2 eps, s^2 alpha, s q).
    #[test]
    fn termination_degree_is_scale_invariant(
        gamma in 0.5..4.0f64, delta in -2.0..2.0f64, eps in 0.1..2.0f64, q in -2.0..2.0f64,
        n in 0usize..10, s in 0.2..5.0f64,
    ) {
        let p = BiconfluentParams { gamma, delta, epsilon: -eps, alpha: n as f64 * eps, q };
        let scaled = BiconfluentParams {
            gamma,
            delta: s * delta,
            epsilon: -s * s * eps,
            alpha: s * s * n as f64 * eps,
            q: s * q,
        };
        prop_assert_eq!(alpha_termination_degree(&p.into()), Some(n));
        prop_assert_eq!(alpha_termination_degree(&scaled.into()), Some(n));
    }

    #[test]
    fn series_matches_integrator(
        gamma in 0.5..4.0f64, delta in -2.0..2.0f64, epsilon in -2.0..0.5f64,
        alpha in -3.0..3.0f64, q in -3.0..3.0f64,
    ) {
        let p: HeunParams = BiconfluentParams { gamma, delta, epsilon, alpha, q }.into();
        prop_assert!(series_integrator_gap(&p).unwrap() < 1e-8);
    }

    #[test]
    fn double_confluent_formal_recurrence(
        gamma in 0.5..3.0f64, delta in -2.0..2.0f64, epsilon in -2.0..2.0f64,
        alpha in -2.0..2.0f64, q in -2.0..2.0f64,
    ) {
        let p: HeunParams = DoubleConfluentParams { gamma, delta, epsilon, alpha, q }.into();
        let c = origin_coefficients(&p, 12).unwrap();
        let mut golden = vec![1.0, q / gamma];
        for k in 1..11 {
            let kf = k as f64;
            let next = (-(kf * (kf - 1.0) + delta * kf - q) * golden[k]
                - (alpha + epsilon * (kf - 1.0)) * golden[k - 1])
                / (gamma * (kf + 1.0));
            golden.push(next);
        }
        for (a, b) in c.iter().zip(&golden) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{} vs {}", a, b);
        }
    }

    #[test]
    fn jacobi_orthogonality(n in 0usize..6, k in 0usize..6, ia in 0usize..3, ib in 0usize..3) {
        prop_assume!(n != k);
        let (a, b) = (ia as f64 - 0.5, ib as f64 - 0.5);
        let ip = jacobi_inner_product(n, k, a, b, 64);
        let nn = jacobi_inner_product(n, n, a, b, 64);
        let kk = jacobi_inner_product(k, k, a, b, 64);
        prop_assert!(ip.abs() < 1e-12 * (nn * kk).sqrt());
    }

    #[test]
    fn angular_identity_at_random_angles(
        n in 0usize..5, ell in 0usize..5, thetas in prop::collection::vec(0.05..3.09f64, 1..20),
    ) {
        let rep = angular_residual(n, ell, &thetas, None).unwrap();
        prop_assert!(rep.max_residual() < 1e-10);
    }

    // T1 and T2 carry swapped Jacobi indices, and P^(a,b)(-x) = (-1)^n P^(b,a)(x).
    #[test]
    fn angular_reflection(n in 0usize..6, ell in 0usize..5, theta in 0.01..3.13f64) {
        let (t1, t2) = angular_pair(n, ell);
        let lhs = t1.eval(std::f64::consts::PI - theta);
        let rhs = if n % 2 == 0 { 1.0 } else { -1.0 } * t2.eval(theta);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-3), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn evaluation_is_deterministic(
        gamma in 0.5..4.0f64, delta in -2.0..2.0f64, epsilon in -2.0..0.5f64,
        alpha in -3.0..3.0f64, q in -3.0..3.0f64, x in 0.0..3.0f64,
    ) {
        let p: HeunParams = BiconfluentParams { gamma, delta, epsilon, alpha, q }.into();
        prop_assert_eq!(heun_eval(&p, x).unwrap().to_bits(), heun_eval(&p, x).unwrap().to_bits());
    }
}
