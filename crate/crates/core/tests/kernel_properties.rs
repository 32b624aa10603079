use proptest::prelude::*;
use saddle_core::doubly_radial::{
    j_kernel, kbar, verify_kernel_inequality, DoublyRadialPoint, QuadratureRule, DEFAULT_ORDER,
};
use saddle_core::kernels::{
    abcd_coefficients, abcd_inequalities, check_sqrt_convexity, convex_quad_oracle, geometric_grid, ConvexityVerdict,
    RadialKernel, CONVEXITY_TOL,
};

fn outer_point() -> impl Strategy<Value = DoublyRadialPoint> {
    (-2.0f64..1.5, 0.01f64..0.99).prop_map(|(lr, frac)| {
        let r = 10f64.powf(lr);
        let phi = frac * std::f64::consts::FRAC_PI_4;
        DoublyRadialPoint { s: r * phi.cos(), t: r * phi.sin() }
    })
}

fn separated(p: &DoublyRadialPoint, q: &DoublyRadialPoint, factor: f64) -> bool {
    let d = (p.s - q.s).hypot(p.t - q.t);
    d >= factor * (p.norm() + q.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fractional_kernels_are_strictly_convex(gamma in 0.01f64..0.99, m in 1usize..4) {
        let k = RadialKernel::fractional(m, gamma, 1.0).unwrap();
        let grid = geometric_grid(1e-3, 1e3, 128);
        let rep = check_sqrt_convexity(&k, &grid, CONVEXITY_TOL).unwrap();
        prop_assert_eq!(rep.verdict, ConvexityVerdict::StrictlyConvex);
    }

    #[test]
    fn sampled_positivity_for_fractional_kernels(gamma in 0.05f64..0.95, seed in any::<u64>()) {
        let k = RadialKernel::fractional(1, gamma, 1.0).unwrap();
        let rule = QuadratureRule::new(1, DEFAULT_ORDER).unwrap();
        let rep = verify_kernel_inequality(&k, seed, 200, &rule).unwrap();
        prop_assert_eq!(rep.violations, 0);
        prop_assert!(rep.min_gap > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn j_is_symmetric_m1(p in outer_point(), q in outer_point(), gamma in 0.05f64..0.95) {
        prop_assume!(p != q);
        let k = RadialKernel::fractional(1, gamma, 1.0).unwrap();
        let rule = QuadratureRule::new(1, DEFAULT_ORDER).unwrap();
        let a = j_kernel(&k, &p, &q, &rule).unwrap();
        let b = j_kernel(&k, &q, &p, &rule).unwrap();
        prop_assert!(((a - b) / a).abs() <= 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn abcd_lemma_holds(
        alpha in 0.0f64..5.0,
        beta_frac in -1.0f64..=1.0,
        sx in 1e-6f64..5.0,
        tx_frac in 0.0f64..1.0,
        sy in 1e-6f64..5.0,
        ty_frac in 0.0f64..1.0,
    ) {
        let (a, b, c, d) = abcd_coefficients(alpha, beta_frac * alpha, sx, tx_frac * sx, sy, ty_frac * sy).unwrap();
        let rep = abcd_inequalities(a, b, c, d);
        prop_assert!(rep.dominance && rep.sum_inequality);
    }

    #[test]
    fn abcd_equality_forces_vanishing_coefficients(
        alpha_pick in 0usize..3,
        beta_pick in 0usize..4,
        alpha_raw in 0.1f64..3.0,
        beta_raw in -1.0f64..1.0,
        sx in 0.1f64..3.0,
        tx_pick in 0usize..2,
        sy in 0.1f64..3.0,
        ty_pick in 0usize..2,
        tx_frac in 0.05f64..0.95,
        ty_frac in 0.05f64..0.95,
    ) {
        // Degenerate sampler: zero coefficients, |beta| = alpha and points on
        // the s-axis are all drawn often, so set equality is hit regularly.
        let alpha = [0.0, alpha_raw, 1.0][alpha_pick];
        let beta = [0.0, alpha, -alpha, beta_raw * alpha][beta_pick];
        let tx = [0.0, tx_frac * sx][tx_pick];
        let ty = [0.0, ty_frac * sy][ty_pick];
        let (a, b, c, d) = abcd_coefficients(alpha, beta, sx, tx, sy, ty).unwrap();
        let (a, b, c, d) = (a.abs(), b.abs(), c.abs(), d.abs());
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12;
        let set_equal = (close(a, b) && close(d, c)) || (close(a, c) && close(d, b));
        if set_equal {
            prop_assert!(alpha.abs() <= 1e-12 && beta.abs() <= 1e-12, "alpha {} beta {}", alpha, beta);
        }
    }

    #[test]
    fn convex_quad_oracle_accepts_lemma_inputs(
        b in 0.0f64..3.0,
        c in 0.0f64..3.0,
        d in 0.0f64..3.0,
        extra in 1e-6f64..1.0,
        family in 0usize..4,
        w in prop::array::uniform3(0.0f64..1.0),
    ) {
        let a = b.max(c).max(d).max(b + c - d) + extra;
        let ok = match family {
            0 => convex_quad_oracle(|x| x * x, a, b, c, d),
            1 => convex_quad_oracle(f64::exp, a, b, c, d),
            2 => convex_quad_oracle(|x| x.powi(4), a, b, c, d),
            _ => convex_quad_oracle(|x| w[0] * x * x + w[1] * x.exp() + w[2] * x.powi(4), a, b, c, d),
        };
        prop_assert!(matches!(ok, Ok(true)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn j_is_symmetric_m2(p in outer_point(), q in outer_point()) {
        prop_assume!(separated(&p, &q, 0.05));
        let k = RadialKernel::fractional(2, 0.5, 1.0).unwrap();
        let rule = QuadratureRule::new(2, DEFAULT_ORDER).unwrap();
        let a = j_kernel(&k, &p, &q, &rule).unwrap();
        let b = j_kernel(&k, &q, &p, &rule).unwrap();
        prop_assert!(((a - b) / a).abs() <= 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn kbar_is_star_invariant(p in outer_point(), q in outer_point(), m in 1usize..3) {
        prop_assume!(separated(&p, &q, 0.05));
        let k = RadialKernel::fractional(m, 0.5, 1.0).unwrap();
        let rule = QuadratureRule::new(m, DEFAULT_ORDER).unwrap();
        let a = kbar(&k, &p, &q, &rule).unwrap();
        let b = kbar(&k, &p.star(), &q.star(), &rule).unwrap();
        prop_assert!(((a - b) / a).abs() <= 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn doubling_the_order_is_stable_when_separated(p in outer_point(), q in outer_point()) {
        prop_assume!(separated(&p, &q, 0.1));
        let k = RadialKernel::fractional(2, 0.5, 1.0).unwrap();
        let base = j_kernel(&k, &p, &q, &QuadratureRule::new(2, DEFAULT_ORDER).unwrap()).unwrap();
        let doubled = j_kernel(&k, &p, &q, &QuadratureRule::new(2, 2 * DEFAULT_ORDER).unwrap()).unwrap();
        prop_assert!(((base - doubled) / doubled).abs() < 1e-8);
    }
}
