mod common;

use common::{brute_force_best, brute_force_greedy, random_instances};
use proptest::prelude::*;
use ptrack::greedy::greedy_tuples;
use ptrack::lattice::{build_pairs, CostFn};
use ptrack::lpsolve::{build_problem, extract_paths, solve, solve_simplex, track_lp};
use ptrack::{Error, Lattice};

fn instance() -> impl Strategy<Value = (Vec<usize>, Vec<Vec<Vec<f64>>>, usize, f64)> {
    (prop::collection::vec(1usize..=4, 2..=4), 1usize..=3, 0.2f64..=1.5).prop_flat_map(|(sizes, l, delta)| {
        let tables: Vec<_> = sizes
            .windows(2)
            .map(|w| prop::collection::vec(prop::collection::vec(0.0f64..1.0, w[1]), w[0]))
            .collect();
        (Just(sizes), tables, Just(l), Just(delta))
    })
}

/// The oracle with connections above `delta` removed.
fn thresholded(costs: &[Vec<Vec<f64>>], delta: f64) -> Vec<Vec<Vec<f64>>> {
    costs
        .iter()
        .map(|t| t.iter().map(|r| r.iter().map(|&c| if c <= delta { c } else { f64::INFINITY }).collect()).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn lp_matches_enumeration((sizes, costs, l, delta) in instance()) {
        let lat = Lattice::placeholder(&sizes);
        let d = CostFn::Custom { costs: costs.clone() };
        let best = brute_force_best(&lat, &thresholded(&costs, delta), l).filter(|c| c.is_finite());
        match (track_lp(&lat, &d, delta, l), best) {
            (Ok(ps), Some(best)) => {
                prop_assert!((ps.total_cost() - best).abs() < 1e-9);
                prop_assert_eq!(ps.len(), l);
                ps.validate(&lat, &d).unwrap();
            }
            (Err(Error::Infeasible { requested, achievable, .. }), None) => {
                prop_assert_eq!(requested, l);
                prop_assert!(achievable < l);
            }
            (got, want) => prop_assert!(false, "solver {:?} oracle {:?}", got, want),
        }
    }

    #[test]
    fn greedy_never_beats_lp((sizes, costs, l, _delta) in instance()) {
        let lat = Lattice::placeholder(&sizes);
        let d = CostFn::Custom { costs: costs.clone() };
        let g = greedy_tuples(&lat, &d, l, f64::INFINITY, 0, sizes.len()).unwrap();
        if g.tuples.len() == l {
            let expect = brute_force_greedy(&lat, &costs, l).unwrap();
            prop_assert!((g.total_cost() - expect).abs() < 1e-12);
            let lp = track_lp(&lat, &d, f64::INFINITY, l).unwrap();
            prop_assert!(lp.total_cost() <= g.total_cost() + 1e-12);
        }
    }

    #[test]
    fn simplex_and_flow_agree((sizes, costs, l, delta) in instance()) {
        let lat = Lattice::placeholder(&sizes);
        let d = CostFn::Custom { costs };
        let ps = build_pairs(&lat, &d, delta);
        let p = build_problem(&ps, &lat, l).unwrap();
        match (solve(&p), solve_simplex(&p)) {
            (Ok(a), Ok(b)) => {
                prop_assert!((a.objective - b.objective).abs() < 1e-9);
                p.check_integral(&b.x).unwrap();
            }
            (Err(Error::Infeasible { .. }), Err(Error::Infeasible { .. })) => {}
            (a, b) => prop_assert!(false, "flow {:?} simplex {:?}", a, b),
        }
    }
}

#[test]
fn extraction_ignores_column_order() {
    for (n, inst) in random_instances(60, 99).iter().enumerate() {
        let d = inst.cost_fn();
        let ps = build_pairs(&inst.lat, &d, f64::INFINITY);
        let Ok(base) = track_lp(&inst.lat, &d, f64::INFINITY, inst.n_paths) else { continue };
        let order: Vec<usize> = (0..ps.len()).rev().collect();
        let shuffled = ps.permuted(&order);
        let p = build_problem(&shuffled, &inst.lat, inst.n_paths).unwrap();
        let sol = solve(&p).unwrap();
        let again = extract_paths(&sol.x, &p, &shuffled, &inst.lat).unwrap();
        assert!((again.total_cost() - base.total_cost()).abs() < 1e-12, "instance {n}");
        // the optimum is unique for continuous random costs
        assert_eq!(again.paths, base.paths, "instance {n}");
    }
}
