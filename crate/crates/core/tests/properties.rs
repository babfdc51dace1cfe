use proptest::prelude::*;
use regionlab_core::region::evaluate_bounds_literal;
use regionlab_core::signal::GAMMA_MAX;
use regionlab_core::*;

fn channel() -> impl Strategy<Value = ChannelParams> {
    (0.0..10.0, 0.0..10.0, 0.0..10.0, 0.0..4.0, 0.0..4.0).prop_map(|(p1, p2, p3, c21, c12)| ChannelParams {
        p1,
        p2,
        p3,
        c21,
        c12,
    })
}

fn coding() -> impl Strategy<Value = CodingParams> {
    (
        0.0..=1.0,
        0.0..=1.0,
        0.0..=1.0,
        0.0..=1.0,
        0.0..=1.0,
        0.0..=GAMMA_MAX,
        0.0..=GAMMA_MAX,
    )
        .prop_map(|(alpha, beta, lam1, lam2, lam3, gamma1, gamma2)| CodingParams {
            alpha,
            beta,
            lam1,
            lam2,
            lam3,
            gamma1,
            gamma2,
        })
}

fn system() -> impl Strategy<Value = SignalSystem> {
    (channel(), coding()).prop_map(|(ch, cp)| build_system(ch, cp).unwrap())
}

/// Three disjoint sets, the first two nonempty.
fn triple() -> impl Strategy<Value = (VarSet, VarSet, VarSet)> {
    prop::collection::vec(0usize..4, Var::COUNT)
        .prop_map(|slots| {
            let mut sets = [VarSet::EMPTY; 3];
            for (v, k) in Var::ALL.into_iter().zip(slots) {
                if k < 3 {
                    sets[k] = sets[k].with(v);
                }
            }
            (sets[0], sets[1], sets[2])
        })
        .prop_filter("x and y nonempty", |(x, y, _)| !x.is_empty() && !y.is_empty())
}

fn same(a: f64, b: f64, tol: f64) -> bool {
    (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cmi_is_symmetric_and_nonnegative(sys in system(), (x, y, z) in triple()) {
        let a = cmi(&sys, x, y, z).unwrap();
        let b = cmi(&sys, y, x, z).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!(same(a, b, 1e-9), "{a} vs {b}");
    }

    #[test]
    fn chain_rule(sys in system(), (x, y, z) in triple(), pick in any::<u16>()) {
        let y1 = VarSet::from_bits(y.bits() & pick);
        let y2 = VarSet::from_bits(y.bits() & !pick);
        prop_assume!(!y1.is_empty() && !y2.is_empty());
        let whole = cmi(&sys, x, y, z).unwrap();
        let parts = cmi(&sys, x, y1, z).unwrap() + cmi(&sys, x, y2, y1 | z).unwrap();
        prop_assert!(same(whole, parts, 1e-9), "{whole} vs {parts}");
    }

    #[test]
    fn scaling_a_variable_changes_nothing(
        sys in system(),
        (x, y, z) in triple(),
        v in 0usize..Var::COUNT,
        factor in prop_oneof![0.01..100.0, -100.0..-0.01],
    ) {
        let scaled = sys.scale_variable(Var::ALL[v], factor);
        let a = cmi(&sys, x, y, z).unwrap();
        let b = cmi(&scaled, x, y, z).unwrap();
        prop_assert!(same(a, b, 1e-8), "{a} vs {b}");
    }

    #[test]
    fn covariance_is_psd_and_powers_are_met(ch in channel(), cp in coding()) {
        let sys = build_system(ch, cp).unwrap();
        prop_assert!((sys.variance(Var::X1) - ch.p1).abs() <= 1e-9 * (1.0 + ch.p1));
        prop_assert!((sys.variance(Var::X2) - ch.p2).abs() <= 1e-9 * (1.0 + ch.p2));
        prop_assert!((sys.variance(Var::X3) - ch.p3).abs() <= 1e-9 * (1.0 + ch.p3));
        let m = sys.covariance_of(&Var::ALL);
        let eig = m.clone().symmetric_eigen().eigenvalues;
        let scale = m.diagonal().max().max(1.0);
        prop_assert!(eig.iter().all(|&e| e >= -1e-9 * scale), "{eig:?}");
    }

    #[test]
    fn bounds_are_finite_and_moderate(sys in system()) {
        let rb = evaluate_bounds(&sys).unwrap();
        for k in 4..=13 {
            prop_assert!(rb.b(k).is_finite() && rb.b(k).abs() < 30.0, "b{k} = {}", rb.b(k));
        }
        prop_assert_eq!(rb.b(4), 0.0);
    }

    #[test]
    fn expanded_and_literal_bounds_agree(sys in system()) {
        let a = evaluate_bounds(&sys).unwrap();
        let b = evaluate_bounds_literal(&sys).unwrap();
        for k in 4..=13 {
            if b.b(k).is_finite() {
                prop_assert!((a.b(k) - b.b(k)).abs() <= 1e-7, "b{k}: {} vs {}", a.b(k), b.b(k));
            }
        }
    }

    #[test]
    fn projected_frontiers_are_well_formed(bounds in prop::array::uniform10(-0.5f64..5.0)) {
        let rb = RateBounds::new(bounds);
        let f = project_polytope(&rb);
        prop_assert!(f.is_well_formed());
        if bounds.iter().all(|&b| b >= 0.0) {
            prop_assert!(!f.is_empty());
        } else {
            prop_assert!(f.is_empty());
        }
        for p in &f.points {
            let Certificate::Split(x) = p.cert else { panic!("missing certificate") };
            prop_assert!(RatePolytope::from_bounds(&rb).contains(&x));
            prop_assert!((x[0] + x[1] - p.rate.r1).abs() < 1e-9 && (x[2] + x[3] - p.rate.r2).abs() < 1e-9);
        }
    }

    #[test]
    fn hull_matches_brute_force(pts in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 100)) {
        let points: Vec<FrontierPoint> = pts.iter().map(|&(a, b)| FrontierPoint::bare(a, b)).collect();
        let hull = convex_hull_upper(points.clone());
        prop_assert!(hull.is_well_formed());

        // Every input lies in the region.
        for p in &points {
            prop_assert!(hull.contains(&convex_hull_upper(vec![*p]), 1e-9));
        }
        // Every vertex is an input point that no segment between two other
        // inputs weakly dominates.
        let dominated_by_segment = |v: (f64, f64), a: (f64, f64), b: (f64, f64)| {
            // Portion of [a, b] with r1 >= v.r1, then check its best r2.
            let (lo, hi) = if a.0 <= b.0 { (a, b) } else { (b, a) };
            if hi.0 < v.0 - 1e-12 {
                return false;
            }
            let r2_at = if lo.0 >= v.0 || hi.0 == lo.0 {
                lo.1.max(hi.1)
            } else {
                let t = (v.0 - lo.0) / (hi.0 - lo.0);
                (lo.1 + t * (hi.1 - lo.1)).max(hi.1)
            };
            r2_at >= v.1 - 1e-12
        };
        for v in hull.pairs() {
            prop_assert!(pts.contains(&v));
            let others: Vec<(f64, f64)> = pts.iter().copied().filter(|&p| p != v).collect();
            for (i, &a) in others.iter().enumerate() {
                for &b in &others[i..] {
                    prop_assert!(!dominated_by_segment(v, a, b), "{v:?} under [{a:?}, {b:?}]");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    // Every term with U or W also has T on the same side or in the condition,
    // so their T components drop out.
    #[test]
    fn relay_components_of_u_and_w_do_not_matter(ch in channel(), cp in coding(), l2 in 0.0..=1.0, l3 in 0.0..=1.0) {
        let a = evaluate_bounds(&build_system(ch, cp).unwrap()).unwrap();
        let moved = CodingParams { lam2: l2, lam3: l3, ..cp };
        let b = evaluate_bounds(&build_system(ch, moved).unwrap()).unwrap();
        for k in 4..=13 {
            prop_assert!(same(a.b(k), b.b(k), 1e-8), "b{k}: {} vs {}", a.b(k), b.b(k));
        }
    }
}
