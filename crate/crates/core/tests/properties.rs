use midrange_core::random::{random_diagonal_spd, random_invertible, random_spd, seeded};
use midrange_core::*;
use proptest::prelude::*;

fn spd_pair(seed: u64, n: usize) -> (SpdMatrix, SpdMatrix) {
    let mut rng = seeded(seed);
    (
        random_spd(&mut rng, n).unwrap(),
        random_spd(&mut rng, n).unwrap(),
    )
}

fn ensemble(seed: u64, n: usize, count: usize) -> Vec<SpdMatrix> {
    let mut rng = seeded(seed);
    (0..count)
        .map(|_| random_spd(&mut rng, n).unwrap())
        .collect()
}

fn thompson(a: &SpdMatrix, b: &SpdMatrix) -> f64 {
    dist(a, b, MetricKind::Thompson).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn thompson_is_a_metric(seed in any::<u64>(), n in 1usize..6) {
        let ys = ensemble(seed, n, 3);
        let (a, b, c) = (&ys[0], &ys[1], &ys[2]);
        prop_assert!(thompson(a, a) == 0.0);
        prop_assert!((thompson(a, b) - thompson(b, a)).abs() <= 1e-9);
        prop_assert!(thompson(a, c) <= thompson(a, b) + thompson(b, c) + 1e-9);
    }

    #[test]
    fn distances_are_affine_invariant(seed in any::<u64>(), n in 1usize..6, p in 1.0f64..8.0) {
        let (a, b) = spd_pair(seed, n);
        let x = random_invertible(&mut seeded(seed ^ 1), n);
        let (ax, bx) = (a.congruence(&x).unwrap(), b.congruence(&x).unwrap());
        for kind in [MetricKind::Thompson, MetricKind::Riemannian, MetricKind::p_norm(p).unwrap()] {
            let d = dist(&a, &b, kind).unwrap();
            prop_assert!((dist(&ax, &bx, kind).unwrap() - d).abs() <= 1e-7 * d.max(1.0));
        }
    }

    #[test]
    fn thompson_is_the_largest_log_eigenvalue(seed in any::<u64>(), n in 1usize..6) {
        let (a, b) = spd_pair(seed, n);
        let spectrum = gen_eig_all(&a, &b).unwrap();
        let expected = spectrum.iter().map(|x| x.ln().abs()).fold(0.0, f64::max);
        prop_assert!((thompson(&a, &b) - expected).abs() <= 1e-9);
        // λ_max(BA⁻¹) = 1 / λ_min(AB⁻¹)
        let (lo_ab, _) = gen_eig_extremes(&b, &a).unwrap();
        prop_assert!((spectrum[0] * lo_ab - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn midpoints_halve_the_distance(seed in any::<u64>(), n in 1usize..7) {
        let (a, b) = spd_pair(seed, n);
        for m in [star_midpoint(&a, &b).unwrap(), geometric_mean(&a, &b).unwrap(), diamond_midpoint(&a, &b).unwrap()] {
            let check = check_midpoint(&a, &b, &m, MetricKind::Thompson, 1e-7).unwrap();
            prop_assert!(check.is_midpoint, "{check:?}");
        }
        let gm = geometric_mean(&a, &b).unwrap();
        prop_assert!(check_midpoint(&a, &b, &gm, MetricKind::Riemannian, 1e-7).unwrap().is_midpoint);
    }

    #[test]
    fn geodesics_hit_their_endpoints(seed in any::<u64>(), n in 1usize..6) {
        let (a, b) = spd_pair(seed, n);
        for kind in [GeodesicKind::Riemannian, GeodesicKind::Nussbaum] {
            let start = geodesic_point(&a, &b, 0.0, kind).unwrap();
            let end = geodesic_point(&a, &b, 1.0, kind).unwrap();
            prop_assert!(start.as_sym().max_abs_diff(a.as_sym()) <= 1e-9 * a.lambda_max().unwrap());
            prop_assert!(end.as_sym().max_abs_diff(b.as_sym()) <= 1e-9 * b.lambda_max().unwrap());
        }
    }

    #[test]
    fn star_midpoint_of_identity_has_closed_form_spectrum(seed in any::<u64>(), n in 1usize..7) {
        let sigma = random_spd(&mut seeded(seed), n).unwrap();
        let star = star_midpoint(&SpdMatrix::identity(n), &sigma).unwrap();
        let expected = star_eigenvalues_identity(&sigma).unwrap();
        for (got, want) in star.spectrum().unwrap().iter().zip(&expected) {
            prop_assert!((got - want).abs() <= 1e-9 * want);
        }
    }

    #[test]
    fn diamond_midpoint_is_proportional_to_the_sum(seed in any::<u64>(), n in 1usize..6) {
        let (a, b) = spd_pair(seed, n);
        let m = diamond_midpoint(&a, &b).unwrap();
        let sum = a.as_sym().add(b.as_sym());
        let ratio = m.matrix()[(0, 0)] / sum.matrix()[(0, 0)];
        prop_assert!(m.as_sym().max_abs_diff(&sum.scale(ratio)) <= 1e-12 * sum.frobenius_norm());
    }

    #[test]
    fn vector_midrange_is_the_coordinatewise_log_center(
        logs in proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, 3), 1..7),
    ) {
        let ys: Vec<PositiveVector> =
            logs.iter().map(|l| PositiveVector::new(l.iter().map(|v| v.exp()).collect()).unwrap()).collect();
        let v = vector_midrange(&ys).unwrap();
        let worst = ys.iter().map(|y| v.x.log_sup_dist(y)).fold(0.0, f64::max);
        prop_assert!((worst - v.cost).abs() <= 1e-12);
        prop_assert!((v.cost - v.lower_bound).abs() <= 1e-12);
        for k in 0..3 {
            let (lo, hi) = logs.iter().map(|l| l[k]).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
            prop_assert!((v.x.as_slice()[k].ln() - 0.5 * (lo + hi)).abs() <= 1e-12);
        }
    }

    #[test]
    fn bounds_are_affine_invariant_and_sandwiched(seed in any::<u64>(), n in 1usize..5, count in 1usize..7) {
        let ys = ensemble(seed, n, count);
        let x = random_invertible(&mut seeded(seed ^ 2), n);
        let moved: Vec<SpdMatrix> = ys.iter().map(|y| y.congruence(&x).unwrap()).collect();
        let (b, bm) = (bounds(&ys).unwrap(), bounds(&moved).unwrap());
        prop_assert!((b.lower - bm.lower).abs() <= 1e-7 && (b.upper - bm.upper).abs() <= 1e-7);
        prop_assert!(b.lower <= b.upper + 1e-12 && b.upper <= 2.0 * b.lower + 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solution_certifies_its_cost(seed in any::<u64>(), n in 1usize..4, count in 1usize..6) {
        let ys = ensemble(seed, n, count);
        let s = solve(&MidrangeProblem::new(ys.clone(), SolverOptions::default()).unwrap()).unwrap();
        prop_assert!((certificate_cost(&s.x_star, &ys).unwrap() - s.t_star).abs() <= 1e-9);
        prop_assert!(s.lower_bound <= s.bracket.0 + 1e-12);
        prop_assert!(s.bracket.0 <= s.t_star && s.t_star <= s.upper_bound + 1e-12);
    }

    #[test]
    fn solution_moves_with_a_common_congruence(seed in any::<u64>(), n in 1usize..4, count in 3usize..6) {
        // diagonal ensembles attain the bound, so both costs are exact
        let mut rng = seeded(seed);
        let ys: Vec<SpdMatrix> = (0..count).map(|_| random_diagonal_spd(&mut rng, n).unwrap()).collect();
        let x = random_invertible(&mut rng, n);
        let moved: Vec<SpdMatrix> = ys.iter().map(|y| y.congruence(&x).unwrap()).collect();
        let options = SolverOptions::default();
        let s = solve(&MidrangeProblem::new(ys.clone(), options).unwrap()).unwrap();
        let sm = solve(&MidrangeProblem::new(moved.clone(), options).unwrap()).unwrap();
        prop_assert!(s.converged && sm.converged);
        prop_assert!((s.t_star - sm.t_star).abs() <= options.tol_t);
        // the moved solution of the original problem is optimal for the moved one
        let carried = s.x_star.congruence(&x).unwrap();
        prop_assert!((certificate_cost(&carried, &moved).unwrap() - sm.t_star).abs() <= 1e-6);
    }

    #[test]
    fn feasibility_accepts_every_certified_radius(seed in any::<u64>(), n in 1usize..4, count in 2usize..6) {
        let ys = ensemble(seed, n, count);
        let b = bounds(&ys).unwrap();
        let report = feasibility(&ys, b.upper, &SolverOptions::default()).unwrap();
        prop_assert_eq!(report.verdict, Verdict::Feasible);
        let x = report.x.unwrap();
        prop_assert!(certificate_cost(&x, &ys).unwrap() <= b.upper + 1e-6);
        let below = feasibility(&ys, (b.lower - 1e-3).max(0.0), &SolverOptions::default()).unwrap();
        if b.lower > 1e-3 {
            prop_assert!(below.proven_infeasible());
        }
    }
}
