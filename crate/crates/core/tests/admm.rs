mod common;

use rand::Rng;
use randprox::admm::{consensus_disagreement, gossip_edge_step, sync_admm_step, AdmmState};
use randprox::baselines::DgdState;
use randprox::operators::{decompose, gs_hat_apply, DouglasRachford, FixedPointOperator};
use randprox::topology::{edge_cover, full_cover, ComponentCover};
use randprox::{CostFunction, Error, Point, Problem};

fn assert_close(a: &AdmmState, b: &AdmmState, tol: f64) {
    assert!(a.lambda.max_abs_diff(&b.lambda).unwrap() <= tol);
    assert!(common::max_abs_diff(&a.zbar, &b.zbar) <= tol);
}

fn random_problems(seed: u64) -> Vec<Problem> {
    let mut rng = common::rng(seed);
    let mut out = Vec::new();
    for _ in 0..6 {
        let n = rng.random_range(2..=7);
        let graph = common::random_connected_graph(&mut rng, n, n);
        let dim = rng.random_range(1..=2);
        let costs = common::random_mixed(&mut rng, n, dim);
        // Overlapping triples along a random ordering, padded with the full set.
        let mut sets: Vec<Vec<usize>> = (0..n.saturating_sub(2))
            .map(|i| vec![i, i + 1, i + 2])
            .collect();
        sets.push((0..n).collect());
        let covers = [
            edge_cover(&graph).unwrap(),
            full_cover(&graph),
            ComponentCover::new(n, sets).unwrap(),
        ];
        for cover in covers {
            out.push(Problem::new(graph.clone(), cover, costs.clone(), dim).unwrap());
        }
    }
    out
}

#[test]
fn async_step_is_a_gauss_seidel_step_of_the_resolvent() {
    let mut rng = common::rng(1);
    for problem in random_problems(1) {
        let rho = rng.random_range(0.2..4.0);
        let op = DouglasRachford::new(&problem, rho).unwrap();
        for _ in 0..10 {
            let state = common::random_state(&mut rng, &problem, rho);
            let l = rng.random_range(0..problem.num_components());
            let mut next = state.clone();
            next.async_step(&problem, l, rho).unwrap();
            let zeta = gs_hat_apply(&op, l, &state.lift(rho).unwrap()).unwrap();
            let expected = decompose(&zeta, rho, problem.cover()).unwrap();
            assert_close(
                &next,
                &AdmmState::from_dual(expected, state.x.clone()),
                1e-10,
            );
        }
    }
}

#[test]
fn sync_step_is_a_resolvent_step() {
    let mut rng = common::rng(2);
    for problem in random_problems(2) {
        let rho = rng.random_range(0.2..4.0);
        let op = DouglasRachford::new(&problem, rho).unwrap();
        let state = common::random_state(&mut rng, &problem, rho);
        let next = sync_admm_step(&state, &problem, rho).unwrap();
        let zeta = op.apply(&state.lift(rho).unwrap()).unwrap();
        let expected = decompose(&zeta, rho, problem.cover()).unwrap();
        assert_close(
            &next,
            &AdmmState::from_dual(expected, state.x.clone()),
            1e-10,
        );
        let primal = op.primal(&state.lift(rho).unwrap()).unwrap();
        assert!(common::max_abs_diff(&next.x, &primal) <= 1e-10);
        assert_eq!(next.primal_updates, problem.num_vertices() as u64);
    }
}

#[test]
fn gossip_matches_async_on_the_edge_cover() {
    let mut rng = common::rng(3);
    let problem = common::g5_problem(common::random_quadratics(&mut rng, 5, 1), 1, false);
    let rho = 1.3;
    let mut by_component = AdmmState::zeros(&problem);
    let mut by_pair = AdmmState::zeros(&problem);
    let edges = problem.graph().edges().to_vec();
    for _ in 0..100 {
        let l = rng.random_range(0..edges.len());
        let (v, w) = edges[l];
        let (v, w) = if rng.random_bool(0.5) { (v, w) } else { (w, v) };
        by_component.async_step(&problem, l, rho).unwrap();
        by_pair = gossip_edge_step(&by_pair, (v, w), &problem, rho).unwrap();
        assert_close(&by_component, &by_pair, 1e-12);
        assert!(common::max_abs_diff(&by_component.x, &by_pair.x) <= 1e-12);
        assert_eq!(by_component.primal_updates, by_pair.primal_updates);
    }
}

#[test]
fn gossip_rejects_non_edges_and_other_covers() {
    let problem = common::g5_defaults();
    let state = AdmmState::zeros(&problem);
    let err = gossip_edge_step(&state, (0, 3), &problem, 1.0).unwrap_err();
    assert!(matches!(err, Error::NotAnEdge { v: 1, w: 4 }));
    let full = problem.with_cover(full_cover(problem.graph())).unwrap();
    let err = gossip_edge_step(&AdmmState::zeros(&full), (0, 1), &full, 1.0).unwrap_err();
    assert_eq!(err.code(), "INVALID_COVER");
}

#[test]
fn async_step_touches_only_the_active_component() {
    let mut rng = common::rng(4);
    for problem in random_problems(4) {
        let rho = 0.7;
        let mut state = common::random_state(&mut rng, &problem, rho);
        for _ in 0..20 {
            let l = rng.random_range(0..problem.num_components());
            let shadow = state.clone();
            state.async_step(&problem, l, rho).unwrap();
            let members = problem.cover().component(l);
            for v in 0..problem.num_vertices() {
                if !members.contains(&v) {
                    assert_eq!(state.x[v], shadow.x[v]);
                }
            }
            for m in (0..problem.num_components()).filter(|&m| m != l) {
                assert_eq!(state.zbar[m], shadow.zbar[m]);
                assert_eq!(state.lambda.block(m), shadow.lambda.block(m));
            }
        }
    }
}

#[test]
fn sync_admm_reaches_consensus_on_the_minimizer() {
    let mut rng = common::rng(5);
    for _ in 0..5 {
        let problem = common::g5_problem(common::random_quadratics(&mut rng, 5, 2), 2, false);
        let mut state = AdmmState::zeros(&problem);
        for _ in 0..3000 {
            state.sync_step(&problem, 1.0).unwrap();
        }
        let xstar = problem.minimizer().unwrap();
        assert!(consensus_disagreement(&state.x) <= 1e-5);
        for x in &state.x {
            assert!(x.distance_sq(&xstar).sqrt() <= 1e-6);
        }
    }
}

#[test]
fn gossip_averaging_with_zero_costs_stays_in_the_hull() {
    let mut rng = common::rng(6);
    let graph = common::g5();
    let problem = Problem::new(
        graph.clone(),
        edge_cover(&graph).unwrap(),
        vec![CostFunction::Zero; 5],
        1,
    )
    .unwrap();
    let x0: Vec<Point> = (0..5)
        .map(|_| Point::from(rng.random_range(-10.0..10.0)))
        .collect();
    let (lo, hi) = x0.iter().fold((f64::MAX, f64::MIN), |(lo, hi), p| {
        (lo.min(p[0]), hi.max(p[0]))
    });
    let mean: f64 = x0.iter().map(|p| p[0]).sum::<f64>() / 5.0;
    let mut state = DgdState::new(x0, 0.5).unwrap();
    for _ in 0..3000 {
        let (v, w) = graph.edges()[rng.random_range(0..graph.edges().len())];
        state.step(&problem, v, w).unwrap();
        for p in &state.x {
            assert!(p[0] >= lo - 1e-12 && p[0] <= hi + 1e-12);
        }
        let sum: f64 = state.x.iter().map(|p| p[0]).sum();
        assert!((sum / 5.0 - mean).abs() <= 1e-9);
    }
    assert!(consensus_disagreement(&state.x) <= 1e-6);
    assert_eq!(state.primal_updates, 6000);
}

#[test]
fn dgd_rejects_nonsmooth_points() {
    let graph = common::g5();
    let mut costs = vec![CostFunction::Zero; 5];
    costs[1] = CostFunction::absolute_value(0.0).unwrap();
    let problem = Problem::new(graph.clone(), edge_cover(&graph).unwrap(), costs, 1).unwrap();
    let mut state = DgdState::zeros(&problem, 0.5).unwrap();
    assert!(matches!(
        state.step(&problem, 0, 1),
        Err(Error::NonsmoothAtPoint { vertex: 2 })
    ));
    assert_eq!(state.k, 0);
}

#[test]
fn duals_stay_mean_zero_with_nonsmooth_costs() {
    let mut rng = common::rng(7);
    for problem in random_problems(7) {
        let mut state = AdmmState::zeros(&problem);
        for step in 0..200 {
            if step % 10 == 0 {
                state.sync_step(&problem, 0.9).unwrap();
            } else {
                let l = rng.random_range(0..problem.num_components());
                state.async_step(&problem, l, 0.9).unwrap();
            }
            assert!(state.max_dual_block_sum() <= 1e-10);
        }
    }
}

#[test]
fn async_step_reads_only_the_neighborhood_of_the_component() {
    let mut rng = common::rng(8);
    for problem in random_problems(8) {
        let rho = 1.1;
        let cover = problem.cover();
        for _ in 0..10 {
            let state = common::random_state(&mut rng, &problem, rho);
            let l = rng.random_range(0..problem.num_components());
            let members = cover.component(l);
            let readable = |m: usize, w: usize| {
                members
                    .iter()
                    .any(|&v| v == w && cover.sigma(v).contains(&m))
            };
            let read_blocks: Vec<usize> = members.iter().flat_map(|&v| cover.sigma(v)).collect();

            let mut scrambled = state.clone();
            for x in scrambled.x.iter_mut() {
                *x = common::random_point(&mut rng, problem.dim(), 50.0);
            }
            for m in 0..problem.num_components() {
                if !read_blocks.contains(&m) {
                    scrambled.zbar[m] = common::random_point(&mut rng, problem.dim(), 50.0);
                }
                for (pos, &w) in cover.component(m).iter().enumerate() {
                    if !readable(m, w) {
                        for e in scrambled.lambda.entry_mut(m, pos) {
                            *e = rng.random_range(-50.0..50.0);
                        }
                    }
                }
            }

            let mut a = state.clone();
            let mut b = scrambled;
            a.async_step(&problem, l, rho).unwrap();
            b.async_step(&problem, l, rho).unwrap();
            for &v in members {
                assert_eq!(a.x[v], b.x[v]);
            }
            assert_eq!(a.zbar[l], b.zbar[l]);
            assert_eq!(a.lambda.block(l), b.lambda.block(l));
        }
    }
}

/// Reference gossip-DGD step with an explicit global counter.
fn reference_dgd(x: &mut [f64], c: &[f64], v: usize, w: usize, k: u64, gamma0: f64) {
    let gamma = gamma0 / (k as f64).sqrt();
    // f_u(y) = (y - c_u)^2 has gradient 2 (y - c_u).
    let yv = x[v] - gamma * 2.0 * (x[v] - c[v]);
    let yw = x[w] - gamma * 2.0 * (x[w] - c[w]);
    x[v] = (yv + yw) / 2.0;
    x[w] = x[v];
}

#[test]
fn dgd_uses_one_shared_step_counter() {
    let mut rng = common::rng(9);
    let problem = common::g5_defaults();
    let c: Vec<f64> = (1..=5).map(f64::from).collect();
    let mut state = DgdState::zeros(&problem, 0.5).unwrap();
    let mut reference = vec![0.0; 5];
    let edges = problem.graph().edges().to_vec();
    for k in 1..=500 {
        let (v, w) = edges[rng.random_range(0..edges.len())];
        state.step(&problem, v, w).unwrap();
        reference_dgd(&mut reference, &c, v, w, k, 0.5);
        assert_eq!(state.k, k);
        for (x, r) in state.x.iter().zip(&reference) {
            assert!((x[0] - r).abs() <= 1e-12);
        }
    }
}

#[test]
fn zero_cost_gossip_converges_from_random_starts() {
    let graph = common::g5();
    let problem = Problem::new(
        graph.clone(),
        edge_cover(&graph).unwrap(),
        vec![CostFunction::Zero; 5],
        2,
    )
    .unwrap();
    for seed in 0..10 {
        let mut rng = common::rng(100 + seed);
        let x0: Vec<Point> = (0..5)
            .map(|_| common::random_point(&mut rng, 2, 10.0))
            .collect();
        let mut state = DgdState::new(x0.clone(), 0.5).unwrap();
        for _ in 0..4000 {
            let (v, w) = graph.edges()[rng.random_range(0..graph.edges().len())];
            state.step(&problem, v, w).unwrap();
        }
        assert!(consensus_disagreement(&state.x) <= 1e-6);
        for i in 0..2 {
            let lo = x0.iter().map(|p| p[i]).fold(f64::MAX, f64::min);
            let hi = x0.iter().map(|p| p[i]).fold(f64::MIN, f64::max);
            assert!(state.x.iter().all(|p| p[i] >= lo && p[i] <= hi));
        }
    }
}
