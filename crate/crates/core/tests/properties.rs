use grassmann_newton::costs::RayleighCost;
use grassmann_newton::grassmann::{chart, distance, geodesic, random_projector, tangent_project, ChartId, Projector};
use grassmann_newton::lagrange::{lg_chart, random_lag_projector};
use grassmann_newton::linalg::{det, exp_skew_pair, qr_positive, sym_eig};
use grassmann_newton::newton::{algorithm1_step, newton_step_generic, NewtonConfig};
use grassmann_newton::solvers::{solve_lyapunov, solve_sylvester};
use grassmann_newton::{random, Matrix32, Matrix64 as M, OrthoFrame32, Projector32};
use proptest::prelude::*;

fn gr_dims() -> impl Strategy<Value = (usize, usize)> {
    (2usize..9).prop_flat_map(|n| (Just(n), 1..n))
}

fn param(seed: u64, rows: usize, cols: usize, norm: f64) -> M {
    let z: M = random::gaussian(&mut random::rng(seed), rows, cols);
    z.scale(norm / z.norm_fro())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qr_positive_is_unique((rows, cols) in (1usize..7).prop_flat_map(|c| (c..8, Just(c))), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let q0: M = random::special_orthogonal(&mut rng, rows);
        let mut r0 = M::zeros(rows, cols);
        for i in 0..cols {
            r0[(i, i)] = 0.5 + (i as f64 + 1.0) / cols as f64;
            for j in i + 1..cols {
                r0[(i, j)] = ((seed >> (j % 60)) & 3) as f64 * 0.25 - 0.4;
            }
        }
        let f = qr_positive(&q0.matmul(&r0)).unwrap();
        prop_assert!((&f.r - &r0).max_abs() < 1e-10);
        prop_assert!((&f.q.block(0, 0, rows, cols) - &q0.block(0, 0, rows, cols)).max_abs() < 1e-10);
        prop_assert!(f.q.orthogonality_residual() < 1e-12);
    }

    #[test]
    fn exp_skew_pair_is_a_one_parameter_subgroup((m, k) in (1usize..5, 1usize..5), seed in any::<u64>(), s in -1.5f64..1.5, t in -1.5f64..1.5) {
        let z = param(seed, m, k, 1.0);
        let g = exp_skew_pair(&z.scale(s));
        prop_assert!(g.orthogonality_residual() < 1e-12);
        prop_assert!((det(&g) - 1.0).abs() < 1e-10);
        let product = g.matmul(&exp_skew_pair(&z.scale(t)));
        prop_assert!((&product - &exp_skew_pair(&z.scale(s + t))).max_abs() < 1e-12);
    }

    #[test]
    fn tangent_projection_is_an_orthogonal_projection((n, m) in gr_dims(), seed in any::<u64>()) {
        let (p, _) = random_projector::<f64>(n, m, seed).unwrap();
        let mut rng = random::rng(seed ^ 1);
        let (x, y): (M, M) = (random::symmetric(&mut rng, n), random::symmetric(&mut rng, n));
        let px = tangent_project(&p, &x).unwrap();
        prop_assert!((&tangent_project(&p, &px).unwrap() - &px).max_abs() < 1e-10);
        prop_assert!((px.inner(&y) - x.inner(&tangent_project(&p, &y).unwrap())).abs() < 1e-10);
        // tangent vectors anticommute with 2P − I
        let s = &p.matrix().scale(2.0) - &M::identity(n);
        prop_assert!((&s.matmul(&px) + &px.matmul(&s)).max_abs() < 1e-10);
    }

    #[test]
    fn metric_is_the_commutator_metric((n, m) in gr_dims(), seed in any::<u64>()) {
        let (p, frame) = random_projector::<f64>(n, m, seed).unwrap();
        let (z1, z2) = (param(seed ^ 2, m, n - m, 1.0), param(seed ^ 3, m, n - m, 1.0));
        let (x1, x2) = (frame.tangent(&z1).unwrap(), frame.tangent(&z2).unwrap());
        let (o1, o2) = (x1.commutator(p.matrix()), x2.commutator(p.matrix()));
        prop_assert!((x1.inner(&x2) - o1.inner(&o2)).abs() < 1e-10);
        prop_assert!((x1.inner(&x2) - 2.0 * z1.inner(&z2)).abs() < 1e-10);
    }

    #[test]
    fn distance_is_a_metric((n, m) in gr_dims(), seed in any::<u64>()) {
        let p = random_projector::<f64>(n, m, seed).unwrap().0;
        let q = random_projector::<f64>(n, m, seed.wrapping_add(1)).unwrap().0;
        let r = random_projector::<f64>(n, m, seed.wrapping_add(2)).unwrap().0;
        let (pq, qp) = (distance(&p, &q).unwrap(), distance(&q, &p).unwrap());
        prop_assert!((pq - qp).abs() < 1e-10);
        prop_assert!(distance(&p, &p).unwrap() < 1e-7);
        prop_assert!(pq <= distance(&p, &r).unwrap() + distance(&r, &q).unwrap() + 1e-9);
    }

    #[test]
    fn short_geodesics_are_minimizing((n, m) in gr_dims(), seed in any::<u64>(), len in 0.01f64..1.5) {
        let (p, frame) = random_projector::<f64>(n, m, seed).unwrap();
        // ‖Z‖_F < π/2 keeps every principal angle below π/2
        let xi = frame.tangent(&param(seed ^ 4, m, n - m, len)).unwrap();
        let q = geodesic(&p, &xi, 1.0).unwrap();
        prop_assert!((distance(&p, &q).unwrap() - xi.norm_fro()).abs() < 1e-9);
    }

    #[test]
    fn charts_land_on_the_manifold((n, m) in gr_dims(), seed in any::<u64>(), len in 0.0f64..3.0) {
        let (_, frame) = random_projector::<f64>(n, m, seed).unwrap();
        let z = param(seed ^ 5, m, n - m, len.max(1e-3));
        for id in ChartId::ALL {
            let q = chart(&frame, id, &z).unwrap();
            prop_assert!(q.idempotence_residual() < 1e-10);
            prop_assert!(q.trace_residual().abs() < 1e-10);
            prop_assert!(frame.push(id, &z).unwrap().orthogonality_residual() < 1e-12);
        }
    }

    #[test]
    fn lagrangian_charts_stay_lagrangian(half in 1usize..5, seed in any::<u64>(), len in 0.0f64..3.0) {
        let (_, frame) = random_lag_projector::<f64>(half, seed).unwrap();
        let z: M = random::symmetric(&mut random::rng(seed ^ 6), half);
        let z = z.scale(len.max(1e-3) / z.norm_fro().max(1e-300));
        for id in ChartId::ALL {
            let q = lg_chart(&frame, id, &z).unwrap();
            prop_assert!(q.lagrangian_residual() < 1e-10);
            prop_assert!(frame.push(id, &z).unwrap().symplecticity_residual() < 1e-10);
        }
    }

    #[test]
    fn lyapunov_solution_is_symmetric(m in 1usize..7, seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let a = &random::symmetric::<f64, _>(&mut rng, m) + &M::identity(m).scale(5.0);
        let c: M = random::symmetric(&mut rng, m);
        let z = solve_lyapunov(&a, &c).unwrap();
        prop_assert!(z.symmetry_residual() < 1e-12);
        prop_assert!((&(&a.matmul(&z) + &z.matmul(&a)) - &c).max_abs() < 1e-10);
    }

    #[test]
    fn sylvester_residual_vanishes((m, k) in (1usize..6, 1usize..6), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let a11 = &random::symmetric::<f64, _>(&mut rng, m) + &M::identity(m).scale(6.0);
        let a22: M = random::symmetric(&mut rng, k);
        let c: M = random::gaussian(&mut rng, m, k);
        let z = solve_sylvester(&a11, &a22, &c).unwrap();
        prop_assert!((&(&a11.matmul(&z) - &z.matmul(&a22)) - &c).max_abs() < 1e-10);
    }

    #[test]
    fn eigenprojectors_are_fixed_points((n, m) in gr_dims(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let q: M = random::special_orthogonal(&mut rng, n);
        let values: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
        let a = q.matmul(&M::diag(&values)).matmul_tr(&q).symmetrized();
        let eig = sym_eig(&a).unwrap();
        let frame = grassmann_newton::grassmann::OrthoFrame::from_basis(&eig.vectors.block(0, 0, n, m)).unwrap();
        let step = algorithm1_step(&a, &frame).unwrap();
        prop_assert!(step.step_norm < 1e-10);
        prop_assert!((step.frame.projector().matrix() - frame.projector().matrix()).max_abs() < 1e-10);
    }

    #[test]
    fn generic_step_specializes((n, m) in gr_dims(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let cost = RayleighCost::new(random::symmetric::<f64, _>(&mut rng, n)).unwrap();
        let (_, frame) = random_projector::<f64>(n, m, seed ^ 7).unwrap();
        let special = algorithm1_step(cost.matrix(), &frame);
        let generic = newton_step_generic(&cost, &frame, &NewtonConfig::default());
        if let (Ok(s), Ok(g)) = (special, generic) {
            let diff = (s.frame.projector().matrix() - g.frame.projector().matrix()).max_abs();
            // agreement is limited by the conditioning of the Newton system
            prop_assert!(diff < 1e-6 * (1.0 + s.step_norm).powi(2), "diff {diff:e}");
        }
    }

    #[test]
    fn single_precision_aliases((n, m) in gr_dims(), seed in any::<u64>()) {
        let (p, frame): (Projector32, OrthoFrame32) = random_projector(n, m, seed).unwrap();
        prop_assert!(p.idempotence_residual() < 1e-5);
        let z: Matrix32 = random::gaussian(&mut random::rng(seed), m, n - m);
        let q = chart(&frame, ChartId::Qr, &z.scale(0.1)).unwrap();
        prop_assert!(q.idempotence_residual() < 1e-5);
        let dist = distance(&p, &Projector::new(q.matrix().clone(), m).unwrap()).unwrap();
        prop_assert!(dist.is_finite());
    }
}
