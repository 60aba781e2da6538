use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcpop::chebexp::{truncation_bound, validate_exp};
use qcpop::linalg::{anti_hermiticity_defect, spectral_norm, unitarity_defect};
use qcpop::magnus::{magnus_omega, simplex_integral_coefficient, simplex_monomial_integral, ControlAnsatz};
use qcpop::objective::PopProblem;
use qcpop::oracle::propagate;
use qcpop::poly::{monomials_up_to, CMatrix, MatrixPoly, RealPoly, Vars, PRUNE_THRESHOLD};
use qcpop::popsolve::{build_relaxation, multistart};
use qcpop::systems::transmon_three_level;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn random_matrix_poly(rng: &mut ChaCha8Rng, vars: &Vars, n: usize, degree: u32, terms: usize) -> MatrixPoly {
    let basis = monomials_up_to(vars.len(), degree);
    let pieces: Vec<_> = (0..terms)
        .map(|_| (basis[rng.random_range(0..basis.len())], random_matrix(rng, n)))
        .collect();
    MatrixPoly::from_terms(vars, n, n, pieces).unwrap()
}

fn random_real_poly(rng: &mut ChaCha8Rng, vars: &Vars, degree: u32, terms: usize, scale: f64) -> RealPoly {
    let basis = monomials_up_to(vars.len(), degree);
    RealPoly::from_terms(
        vars,
        (0..terms).map(|_| (basis[rng.random_range(0..basis.len())], scale * rng.random_range(-1.0..1.0))),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn magnus_exponent_is_anti_hermitian_with_bounded_degree(
        x in prop::array::uniform3(-1.0f64..1.0),
        t in 0.05f64..1.0,
        n in 1usize..=3,
    ) {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(3, t).unwrap();
        let omega = magnus_omega(&sys, &ansatz, n).unwrap().omega;
        let max_degree = if n == 3 { 2 } else { 1 };
        prop_assert!(omega.degree() <= max_degree);
        let value = omega.evaluate(&x).unwrap();
        prop_assert!(anti_hermiticity_defect(&value) < 1e-10);
    }

    #[test]
    fn symbolic_horizon_agrees_with_fixed(
        x in prop::array::uniform2(-1.0f64..1.0),
        t in 0.05f64..1.0,
    ) {
        let sys = transmon_three_level();
        let fixed = magnus_omega(&sys, &ControlAnsatz::fixed(2, t).unwrap(), 3).unwrap().omega;
        let symbolic = magnus_omega(&sys, &ControlAnsatz::symbolic(2).unwrap(), 3).unwrap().omega;
        let a = fixed.evaluate(&x).unwrap();
        let b = symbolic.evaluate(&[x[0], x[1], t]).unwrap();
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn simplex_integrals_match_closed_form(a in prop::collection::vec(0u32..5, 1..=3), t in 0.1f64..2.0) {
        let (c, p) = simplex_integral_coefficient(&a).unwrap();
        prop_assert_eq!(p, a.iter().sum::<u32>() + a.len() as u32);
        let direct = simplex_monomial_integral(&a, t).unwrap();
        prop_assert!((direct - c * t.powi(p as i32)).abs() <= 1e-15 * direct.abs().max(1.0));
    }

    #[test]
    fn oracle_is_unitary(x in prop::array::uniform3(-1.0f64..1.0)) {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(3, 0.5).unwrap();
        let u = propagate(&sys, &ansatz, &x, 500).unwrap().u;
        prop_assert!(unitarity_defect(&u) < 1e-9);
    }

    #[test]
    fn chebyshev_error_within_truncation_bound(seed in 0u64..10_000, radius in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_matrix(&mut rng, 3);
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let omega = &h * Complex64::new(0.0, radius / spectral_norm(&h));
        let check = validate_exp(&omega, 5);
        prop_assert!(!check.radius_warning);
        prop_assert!(check.error <= 3f64.sqrt() * truncation_bound(5) * (1.0 + 1e-9));
    }

    #[test]
    fn frobenius_square_evaluates_to_the_norm(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = Vars::numbered("x", 2).unwrap();
        let m = random_matrix_poly(&mut rng, &vars, 2, 3, 5);
        let f = m.frobenius_square().unwrap();
        let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let direct = m.evaluate(&x).unwrap().norm_squared();
        prop_assert!((f.evaluate(&x).unwrap() - direct).abs() <= 1e-10 * direct.max(1.0));
        prop_assert!(f.evaluate(&x).unwrap() >= -1e-10);
    }

    #[test]
    fn products_respect_the_prune_threshold(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = Vars::numbered("x", 3).unwrap();
        let a = random_real_poly(&mut rng, &vars, 3, 8, 1e-7);
        let b = random_real_poly(&mut rng, &vars, 3, 8, 1e-7);
        let p = a.mul(&b).unwrap();
        prop_assert!(p.terms().all(|(_, c)| c.abs() >= PRUNE_THRESHOLD));
        prop_assert!(p.degree() <= a.degree() + b.degree());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn relaxation_bounds_the_objective_on_the_ball(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = Vars::numbered("x", 2).unwrap();
        let f = random_real_poly(&mut rng, &vars, 4, 10, 1.0);
        let ball = RealPoly::constant(&vars, 1.0).sub(&qcpop::objective::squared_norm(&vars, &[0, 1])).unwrap();
        let prob = PopProblem::new(f, vec![ball]).unwrap().with_box_radius(1.0);
        let sol = build_relaxation(&prob, 2).unwrap().solve().unwrap();
        for _ in 0..50 {
            let r = rng.random_range(0.0f64..1.0).sqrt();
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            let x = [r * a.cos(), r * a.sin()];
            prop_assert!(sol.lower_bound <= prob.value(&x).unwrap() + 1e-6);
        }
    }

    #[test]
    fn multistart_depends_only_on_the_seed(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = Vars::numbered("x", 2).unwrap();
        let sq = qcpop::objective::squared_norm(&vars, &[0, 1]);
        let f = random_real_poly(&mut rng, &vars, 3, 6, 1.0).add(&sq.mul(&sq).unwrap()).unwrap();
        let prob = PopProblem::unconstrained(f);
        let a = multistart(&prob, 6, seed, 200).unwrap();
        let b = multistart(&prob, 6, seed, 200).unwrap();
        prop_assert_eq!(a, b);
    }
}
