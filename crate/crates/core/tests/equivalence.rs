//! Cross-checks of every solver against the brute-force oracles.

use b2tsp::exact::solve_kalmanson_exact;
use b2tsp::instance::{generate_instance, GenMode};
use b2tsp::kalmanson::{is_kalmanson, master_tour_length};
use b2tsp::ks::{ks_multi, ks_solve};
use b2tsp::oracle::{brute_force_2tsp, brute_force_vrp2, optimal_tour_length, BRUTE_FORCE_VRP2_CAP};
use b2tsp::sliding::{disassemble, placements, WindowConfig};
use b2tsp::tour::validate_sequence;
use b2tsp::vrp2::{expand_route, solve_vrp2_exact, to_vrp2, Pin, DEFAULT_EXACT_CAP};
use b2tsp::Instance;

/// Every `(n, fixed count, p)` with a non-empty window for small sizes.
fn small_instances(mode: GenMode, ns: std::ops::RangeInclusive<usize>, seeds: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for n in ns {
        for fixed in 1..=n.min(4) {
            for seed in 0..seeds {
                let base = generate_instance(n, fixed, seed * 31 + n as u64, mode).unwrap();
                for p in 0..3 {
                    if let Ok(inst) = base.with_p(p) {
                        out.push(inst);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn master_tour_is_optimal_on_convex_points() {
    for n in 4..=9 {
        for seed in 0..5 {
            let inst = generate_instance(n, 1, seed, GenMode::KalmansonConvex).unwrap();
            assert!(is_kalmanson(inst.matrix(), 0.0));
            assert_eq!(
                master_tour_length(inst.matrix()),
                optimal_tour_length(inst.matrix()).unwrap()
            );
        }
    }
}

#[test]
fn exact_dp_upper_bounds_any_matrix() {
    for inst in small_instances(GenMode::UniformSquare, 4..=8, 2) {
        let dp = solve_kalmanson_exact(&inst).unwrap();
        assert_eq!(validate_sequence(&dp.sequence, &inst), Ok(()));
        assert!(dp.length >= brute_force_2tsp(&inst).unwrap().length);
    }
}

#[test]
fn exact_dp_is_monotone_in_p() {
    for seed in 0..10 {
        let inst = generate_instance(10, 3, seed, GenMode::KalmansonConvex).unwrap();
        let mut prev = f64::INFINITY;
        for p in 0..8 {
            if let Ok(i) = inst.with_p(p) {
                let len = solve_kalmanson_exact(&i).unwrap().length;
                assert!(len <= prev);
                prev = len;
            }
        }
    }
}

#[test]
fn ks_is_bounded_by_the_optimum() {
    for inst in small_instances(GenMode::UniformSquare, 5..=9, 1) {
        let best = ks_multi(&inst).unwrap();
        assert_eq!(validate_sequence(&best.sequence, &inst), Ok(()));
        assert!(best.length <= ks_solve(&inst, 0).unwrap().length);
        assert!(best.length >= brute_force_2tsp(&inst).unwrap().length);
    }
}

#[test]
fn vrp2_dp_matches_the_oracle() {
    for inst in small_instances(GenMode::UniformSquare, 4..=8, 2) {
        let v = to_vrp2(&inst);
        let sol = solve_vrp2_exact(&v, DEFAULT_EXACT_CAP).unwrap();
        assert!(sol.is_feasible(&v));
        let q = expand_route(&sol, &v);
        assert_eq!(validate_sequence(&q, &inst), Ok(()));
        let len = q.length(inst.matrix());
        assert!((len - sol.value).abs() <= 1e-9 * (1.0 + len));
        assert_eq!(len, brute_force_2tsp(&inst).unwrap().length);

        let sep = sol.separator_position();
        for (pos, &(c, _)) in sol.route.iter().enumerate() {
            match v.pins()[c] {
                Pin::First => assert!(pos < sep),
                Pin::Second => assert!(pos > sep),
                Pin::Free => {}
            }
        }
    }
}

#[test]
fn oracles_agree_with_each_other() {
    for inst in small_instances(GenMode::UniformSquare, 4..=8, 1) {
        let v = to_vrp2(&inst);
        if v.customers().len() > BRUTE_FORCE_VRP2_CAP {
            continue;
        }
        let a = brute_force_2tsp(&inst).unwrap().length;
        let b = brute_force_vrp2(&v).unwrap().value;
        assert!((a - b).abs() <= 1e-9 * (1.0 + a));
    }
}

#[test]
fn window_instances_match_their_oracle() {
    for seed in 0..6 {
        let inst = generate_instance(14, 3, seed, GenMode::UniformSquare).unwrap();
        let q = ks_solve(&inst, seed as usize).unwrap().sequence;
        let (k1, k2) = (q.tour1().len(), q.tour2().len());
        for (a, b) in placements(k1, k2, 1, 2) {
            let v = disassemble(
                &q,
                WindowConfig {
                    s: 1,
                    l: 2,
                    s1_start: a,
                    s2_start: b,
                },
                &inst,
            )
            .unwrap();
            assert_eq!(v.entity_count(), 8);
            let dp = solve_vrp2_exact(&v, DEFAULT_EXACT_CAP).unwrap();
            let bf = brute_force_vrp2(&v).unwrap();
            assert!((dp.value - bf.value).abs() <= 1e-9 * (1.0 + bf.value));
            assert!(dp.value <= q.length(inst.matrix()) * (1.0 + 1e-12));

            let out = expand_route(&dp, &v);
            let mut before = q.nodes().to_vec();
            let mut after = out.nodes().to_vec();
            before.sort_unstable();
            after.sort_unstable();
            assert_eq!(before, after);
            assert_eq!(validate_sequence(&out, &inst), Ok(()));
        }
    }
}
