//! Property tests for the structural invariants: exact mass arithmetic,
//! lossless serialization, operator inequalities, and the closed-form
//! surface's shape constraints.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sparse_bellman_core::closedform::{
    bellman_b, bellman_m, envelope_phi, limit_surface_inf, limit_surface_zero, weak_norm_constant,
    BellmanPoint,
};
use sparse_bellman_core::operators::{
    apply_maximal, apply_power_mean, apply_sparse_power, level_set_fraction, weak_quotient,
};
use sparse_bellman_core::{CarlesonSequence, NodeId, StepFunction};

fn carleson(depth: u32, seed: u64) -> CarlesonSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CarlesonSequence::random(depth, 0.5, &mut rng)
}

fn step_function(depth: u32) -> impl Strategy<Value = StepFunction> {
    prop::collection::vec(0.0..4.0f64, 1usize << depth)
        .prop_map(move |values| StepFunction::new(depth, values).expect("nonnegative"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn carleson_json_round_trip(depth in 2u32..=6, seed in any::<u64>()) {
        let seq = carleson(depth, seed);
        let text = serde_json::to_string(&seq).unwrap();
        let back: CarlesonSequence = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, seq);
    }

    #[test]
    fn step_function_json_round_trip(f in step_function(4)) {
        let text = serde_json::to_string(&f).unwrap();
        let back: StepFunction = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn mass_recursion_and_counting(depth in 2u32..=6, seed in any::<u64>()) {
        let seq = carleson(depth, seed);
        let root = NodeId::root();
        // exact recursion at the root
        let left = seq.carleson_mass(&root.left_child()).unwrap();
        let right = seq.carleson_mass(&root.right_child()).unwrap();
        let own = if seq.is_selected(&root) { 1.0 } else { 0.0 };
        prop_assert_eq!(seq.carleson_mass(&root).unwrap(), own + 0.5 * (left + right));
        // the counting function averages to the root mass, exactly
        prop_assert_eq!(seq.counting_function().mean(), seq.carleson_mass(&root).unwrap());
    }

    #[test]
    fn generations_partition_selection(depth in 2u32..=6, seed in any::<u64>()) {
        let seq = carleson(depth, seed);
        let generations = seq.sparse_generations();
        let mut seen: Vec<NodeId> = generations.iter().flatten().copied().collect();
        seen.sort();
        let mut expected = seq.selected_nodes();
        expected.sort();
        prop_assert_eq!(seen, expected);
        // members of one generation are pairwise disjoint
        for generation in &generations {
            for (i, a) in generation.iter().enumerate() {
                for b in &generation[i + 1..] {
                    prop_assert!(!a.contains(b) && !b.contains(a));
                }
            }
        }
    }

    #[test]
    fn clearing_bits_preserves_carleson(depth in 2u32..=5, seed in any::<u64>()) {
        let seq = carleson(depth, seed);
        for node in seq.selected_nodes() {
            prop_assert!(seq.with_bit_cleared(&node).is_two_carleson());
        }
    }

    #[test]
    fn operator_homogeneity_and_chain(
        seed in any::<u64>(),
        f in step_function(4),
        c in 0.1..10.0f64,
        p in 1.0..4.0f64,
    ) {
        let seq = carleson(4, seed);
        // homogeneity of the r-power form
        let scaled = f.map(|v| c * v).unwrap();
        let lhs = apply_sparse_power(&seq, &scaled, p).unwrap();
        let rhs = apply_sparse_power(&seq, &f, p).unwrap();
        let factor = c.powf(p);
        for (l, r0) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((l - factor * r0).abs() <= 1e-10 * (factor * r0).abs().max(1.0));
        }
        // Hölder chain with the maximal operator below everything
        let a_p = apply_sparse_power(&seq, &f, p).unwrap().root(p);
        let f_pow = f.map(|v| v.powf(p)).unwrap();
        let mid = apply_sparse_power(&seq, &f_pow, 1.0).unwrap();
        let q = apply_power_mean(&seq, &f, p).unwrap();
        let sup = apply_maximal(&seq, &f).unwrap();
        for (((ap, m), qv), s) in
            a_p.values().iter().zip(mid.values()).zip(q.values()).zip(sup.values())
        {
            let m_root = m.powf(1.0 / p);
            prop_assert!(*ap <= m_root + 1e-10);
            prop_assert!(m_root <= qv + 1e-10);
            prop_assert!(*s <= ap + 1e-10);
        }
    }

    #[test]
    fn operator_monotone_in_f(seed in any::<u64>(), f in step_function(3), bump in 0usize..8, extra in 0.1..2.0f64) {
        let seq = carleson(3, seed);
        let mut values = f.leaf_values().to_vec();
        values[bump] += extra;
        let bigger = StepFunction::new(3, values).unwrap();
        for r in [0.5, 1.0, 2.0] {
            let small = apply_sparse_power(&seq, &f, r).unwrap();
            let large = apply_sparse_power(&seq, &bigger, r).unwrap();
            for (s, l) in small.values().iter().zip(large.values()) {
                prop_assert!(l >= s);
            }
        }
    }

    #[test]
    fn output_vanishes_off_generation_zero(seed in any::<u64>(), f in step_function(4)) {
        let seq = carleson(4, seed);
        let out = apply_sparse_power(&seq, &f, 1.0).unwrap();
        let generations = seq.sparse_generations();
        let leaves = 1usize << 4;
        for leaf in 0..leaves {
            let id = NodeId::new(4, leaf as u64).unwrap();
            let covered = generations
                .first()
                .map(|g0| g0.iter().any(|k| k.contains(&id)))
                .unwrap_or(false);
            if !covered {
                prop_assert_eq!(out.values()[leaf], 0.0);
            }
        }
    }

    #[test]
    fn weak_quotient_bounded_by_sharp_constant(
        seed in any::<u64>(),
        f in step_function(4),
        r in 0.3..4.0f64,
        lambda in 0.01..50.0f64,
    ) {
        let seq = carleson(4, seed);
        prop_assume!(f.mean() > 0.0);
        let q = weak_quotient(&seq, &f, r, lambda).unwrap();
        prop_assert!(q <= weak_norm_constant(r).unwrap() + 1e-9);
    }

    #[test]
    fn level_set_fraction_is_monotone_in_lambda(seed in any::<u64>(), f in step_function(3)) {
        let seq = carleson(3, seed);
        let out = apply_sparse_power(&seq, &f, 1.0).unwrap();
        let mut prev = 1.0;
        for i in 0..30 {
            let lambda = i as f64 * 0.2;
            let frac = level_set_fraction(&out, lambda);
            prop_assert!(frac <= prev);
            prev = frac;
        }
    }

    #[test]
    fn surface_shape_constraints(
        r in 0.2..6.0f64,
        omega in 0.0..3.0f64,
        a in 0.0..=2.0f64,
        d_omega in 0.0..0.5f64,
        d_a in 0.0..0.2f64,
    ) {
        let m = bellman_m(r, omega, a).unwrap();
        prop_assert!((0.0..=1.0).contains(&m));
        // sandwiched between the limit surfaces
        prop_assert!(m >= limit_surface_inf(omega, a) - 1e-12);
        prop_assert!(m <= limit_surface_zero(omega, a) + 1e-12);
        // nondecreasing in ω and in A
        prop_assert!(bellman_m(r, omega + d_omega, a).unwrap() >= m - 1e-12);
        let a2 = (a + d_a).min(2.0);
        prop_assert!(bellman_m(r, omega, a2).unwrap() >= m - 1e-12);
        // dominated by the envelope on ω ≤ A
        if omega <= a {
            prop_assert!(envelope_phi(r, omega, a).unwrap() >= m - 1e-12);
        }
    }

    #[test]
    fn surface_midpoint_concavity(
        r in 0.2..6.0f64,
        w1 in 0.0..3.0f64,
        a1 in 0.0..=2.0f64,
        w2 in 0.0..3.0f64,
        a2 in 0.0..=2.0f64,
    ) {
        let lhs = bellman_m(r, 0.5 * (w1 + w2), 0.5 * (a1 + a2)).unwrap();
        let rhs = 0.5 * (bellman_m(r, w1, a1).unwrap() + bellman_m(r, w2, a2).unwrap());
        prop_assert!(lhs >= rhs - 1e-11);
    }

    #[test]
    fn full_function_homogeneity(
        r in 0.3..4.0f64,
        x in 0.0..5.0f64,
        a in 0.0..=2.0f64,
        lambda in 0.001..100.0f64,
        c in 0.05..20.0f64,
    ) {
        let p1 = BellmanPoint::new(x, a, lambda).unwrap();
        let p2 = BellmanPoint::new(c * x, a, c.powf(r) * lambda).unwrap();
        let b1 = bellman_b(r, &p1).unwrap();
        let b2 = bellman_b(r, &p2).unwrap();
        prop_assert!((b1 - b2).abs() <= 1e-11, "B({x},{a},{lambda}) = {b1} vs {b2}");
    }
}
