use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use riemann_accel::constants::Regime;
use riemann_accel::exec::{map_range, Execution};
use riemann_accel::objective::{half_squared_distance, make_ill_conditioned, Objective};
use riemann_accel::optimizer::{rgd_step, sirnag_increment, sirnag_step, OptimizerState, SirnagOption};
use riemann_accel::{Manifold, ManifoldSpec};

fn space(which: u8) -> Manifold {
    match which % 3 {
        0 => Manifold::new(ManifoldSpec::euclidean(4, 4.0)).unwrap(),
        1 => Manifold::new(ManifoldSpec::sphere(3, 1.0, 2.8)).unwrap(),
        _ => Manifold::new(ManifoldSpec::hyperboloid(3, -1.0, 3.0)).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn log_inverts_exp(which in 0u8..3, seed in any::<u64>(), r in 0.0f64..1.4) {
        let m = space(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = m.random_point_with(&m.origin(), r, &mut rng).unwrap();
        let y = m.random_point_with(&m.origin(), 1.4, &mut rng).unwrap();
        let l = m.log(&x, &y).unwrap();
        prop_assert!(m.distance(&m.exp(&x, &l).unwrap(), &y) < 1e-9);
        prop_assert!((m.norm(&l) - m.distance(&x, &y)).abs() < 1e-10);
        prop_assert!((m.distance(&x, &y) - m.distance(&y, &x)).abs() < 1e-12);
    }

    #[test]
    fn transport_is_an_isometry(which in 0u8..3, seed in any::<u64>(), s in 0.1f64..3.0) {
        let m = space(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = m.random_point_with(&m.origin(), 1.4, &mut rng).unwrap();
        let y = m.random_point_with(&m.origin(), 1.4, &mut rng).unwrap();
        let u = m.random_unit_tangent(&x, &mut rng).scaled(s);
        let w = m.random_unit_tangent(&x, &mut rng);
        let tu = m.transport(&x, &y, &u).unwrap();
        let tw = m.transport(&x, &y, &w).unwrap();
        prop_assert_eq!(tu.base(), &y);
        prop_assert!(m.tangency_residual(&tu) < 1e-10);
        prop_assert!((m.norm(&tu) - s).abs() < 1e-10);
        prop_assert!((m.metric(&tu, &tw).unwrap() - m.metric(&u, &w).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn projection_is_idempotent(which in 0u8..3, seed in any::<u64>()) {
        let m = space(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = m.random_point_with(&m.origin(), 1.4, &mut rng).unwrap();
        let w = riemann_accel::Vector::from_fn(m.ambient_dim(), |i, _| (i as f64 + seed as f64 * 1e-19).sin());
        let p = m.project(&x, &w);
        prop_assert!(m.tangency_residual(&p) < 1e-12);
        let pp = m.project(&x, p.vec());
        prop_assert!((pp.vec() - p.vec()).amax() < 1e-12);
    }

    #[test]
    fn random_points_stay_in_their_ball(which in 0u8..3, seed in any::<u64>(), r in 0.0f64..1.4) {
        let m = space(which);
        let c = m.origin();
        let x = m.random_point(&c, r, seed).unwrap();
        prop_assert!(m.distance(&c, &x) <= r + 1e-12);
        prop_assert_eq!(x, m.random_point(&c, r, seed).unwrap());
    }

    #[test]
    fn sirnag_velocity_is_based_and_isometric(
        which in 0u8..3, seed in any::<u64>(), h in 0.01f64..0.5, beta in 0.0f64..1.0, opt2 in any::<bool>()
    ) {
        let m = space(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = m.random_point_with(&m.origin(), 0.7, &mut rng).unwrap();
        let f = half_squared_distance(&m, &p).unwrap();
        let x = m.random_point_with(&m.origin(), 0.7, &mut rng).unwrap();
        let v = m.random_unit_tangent(&x, &mut rng).scaled(0.5);
        let state = OptimizerState { k: 1, x, v };
        let option = if opt2 { SirnagOption::II } else { SirnagOption::I };
        let a = sirnag_increment(&f, &state, h, beta, option).unwrap();
        let next = sirnag_step(&f, &state, h, beta, option).unwrap();
        prop_assert_eq!(next.v.base(), &next.x);
        prop_assert!(m.tangency_residual(&next.v) < 1e-10);
        prop_assert!(m.drift(&next.x) < 1e-10);
        prop_assert!((m.norm(&next.v) - m.norm(&a)).abs() < 1e-10);
    }

    #[test]
    fn small_rgd_steps_decrease_the_distance(which in 0u8..3, seed in any::<u64>(), eta in 0.01f64..0.7) {
        let m = space(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = m.random_point_with(&m.origin(), 0.7, &mut rng).unwrap();
        let f = half_squared_distance(&m, &p).unwrap();
        let x = m.random_point_with(&m.origin(), 0.7, &mut rng).unwrap();
        let y = rgd_step(&f, &x, eta).unwrap();
        // ½d² has gradient -log, so a step moves a fraction η along the geodesic.
        prop_assert!((m.distance(&y, &p) - (1.0 - eta) * m.distance(&x, &p)).abs() < 1e-9);
        prop_assert!(f.value(&y) <= f.value(&x) + 1e-15);
    }

    #[test]
    fn generated_matrices_are_symmetric_with_the_requested_condition(
        m in 2usize..24, cond in 1.0f64..1e3, seed in any::<u64>()
    ) {
        let q = make_ill_conditioned(m, cond, seed).unwrap();
        prop_assert_eq!(&q, &q.transpose());
        let ev = nalgebra::SymmetricEigen::new(q).eigenvalues;
        prop_assert!((ev.max() / ev.min() - cond).abs() <= 1e-8 * cond);
    }

    #[test]
    fn parallel_and_sequential_maps_agree(n in 0usize..500, seed in any::<u64>()) {
        let f = |i: usize| (seed.wrapping_mul(i as u64 + 1) as f64).sqrt();
        prop_assert_eq!(map_range(Execution::Sequential, n, f), map_range(Execution::Parallel, n, f));
    }

    #[test]
    fn strongly_convex_schedule_stays_in_unit_interval(h in 1e-4f64..0.3, zeta in 1.0f64..3.0) {
        let b = riemann_accel::constants::beta_schedule(Regime::StronglyConvex { mu: 1.0 }, 5, h, zeta);
        prop_assert!(b < 1.0);
        prop_assert_eq!(riemann_accel::constants::schedule_in_range(Regime::StronglyConvex { mu: 1.0 }, h, zeta), b > 0.0);
    }
}

#[test]
fn gradients_vanish_at_the_minimiser() {
    for w in 0..3 {
        let m = space(w);
        let p = m.random_point(&m.origin(), 1.0, 3).unwrap();
        let f = half_squared_distance(&m, &p).unwrap();
        let xs = f.metadata().minimizer.clone().unwrap();
        assert!(m.norm(&f.gradient(&xs).unwrap()) < 1e-9);
    }
}
