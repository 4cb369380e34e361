mod common;

use randprox::harness::ActivationProcess;
use randprox::operators::{
    decompose, gs_hat_apply, lift, proximal_point_iterate, random_gs_iterate, BlockVector,
    DouglasRachford, FixedPointOperator, IdentityOperator,
};
use randprox::topology::full_cover;

fn instance(seed: u64, dim: usize, full: bool) -> randprox::Problem {
    let mut rng = common::rng(seed);
    common::g5_problem(common::random_quadratics(&mut rng, 5, dim), dim, full)
}

#[test]
fn decompose_then_compose_reconstructs() {
    let mut rng = common::rng(1);
    for dim in [1, 3] {
        let problem = instance(1, dim, false);
        for rho in [0.3, 1.0, 7.0] {
            for _ in 0..50 {
                let zeta = common::random_zeta(&mut rng, problem.cover(), dim, 10.0);
                let pair = decompose(&zeta, rho, problem.cover()).unwrap();
                assert!(pair.compose(rho).unwrap().max_abs_diff(&zeta).unwrap() <= 1e-12);
                for l in 0..pair.lambda.num_blocks() {
                    let block = pair.lambda.block(l);
                    for i in 0..dim {
                        let s: f64 = block.iter().skip(i).step_by(dim).sum();
                        assert!(s.abs() <= 1e-12);
                    }
                }
                let again = decompose(
                    &lift(&pair.lambda, &pair.zbar, rho).unwrap(),
                    rho,
                    problem.cover(),
                )
                .unwrap();
                assert!(again.lambda.max_abs_diff(&pair.lambda).unwrap() <= 1e-12);
                assert!(common::max_abs_diff(&again.zbar, &pair.zbar) <= 1e-12);
            }
        }
    }
}

#[test]
fn block_evaluation_matches_full_application() {
    let mut rng = common::rng(2);
    for (seed, full) in [(3, false), (4, true)] {
        let problem = instance(seed, 2, full);
        let op = DouglasRachford::new(&problem, 1.5).unwrap();
        for _ in 0..50 {
            let zeta = common::random_zeta(&mut rng, problem.cover(), 2, 5.0);
            let whole = op.apply(&zeta).unwrap();
            for l in 0..op.num_blocks() {
                assert_eq!(op.apply_block(l, &zeta).unwrap(), whole.block(l));
                let hat = gs_hat_apply(&op, l, &zeta).unwrap();
                for m in 0..op.num_blocks() {
                    let expected = if m == l {
                        whole.block(m)
                    } else {
                        zeta.block(m)
                    };
                    assert_eq!(hat.block(m), expected);
                }
            }
        }
    }
}

/// `<S a - S b, a - b> >= ||S a - S b||^2`.
fn firm_gap(op: &DouglasRachford, a: &BlockVector, b: &BlockVector) -> (f64, f64) {
    let sa = op.apply(a).unwrap();
    let sb = op.apply(b).unwrap();
    let ds = sa.sub(&sb).unwrap();
    let dz = a.sub(b).unwrap();
    (ds.dot(&dz).unwrap() - ds.norm_sq(), dz.norm_sq())
}

#[test]
fn resolvent_is_firmly_nonexpansive_with_mixed_costs() {
    let mut rng = common::rng(5);
    for dim in [1, 2] {
        let costs = common::random_mixed(&mut rng, 5, dim);
        for full in [false, true] {
            let problem = common::g5_problem(costs.clone(), dim, full);
            let op = DouglasRachford::new(&problem, 0.8).unwrap();
            for _ in 0..200 {
                let a = common::random_zeta(&mut rng, problem.cover(), dim, 8.0);
                let b = common::random_zeta(&mut rng, problem.cover(), dim, 8.0);
                let (gap, scale) = firm_gap(&op, &a, &b);
                assert!(gap >= -1e-8 * (1.0 + scale), "gap {gap}");
            }
        }
    }
}

#[test]
fn fixed_point_yields_the_minimizer() {
    for seed in 0..5 {
        for full in [false, true] {
            let problem = instance(20 + seed, 2, full);
            let op = DouglasRachford::new(&problem, 1.0).unwrap();
            let zeta = proximal_point_iterate(&op, &BlockVector::zeros(problem.cover(), 2), 10_000)
                .unwrap();
            assert!(op.apply(&zeta).unwrap().max_abs_diff(&zeta).unwrap() <= 1e-9);
            let xstar = problem.minimizer().unwrap();
            for x in op.primal(&zeta).unwrap() {
                assert!(x.distance_sq(&xstar).sqrt() <= 1e-6, "{x:?} vs {xstar:?}");
            }
            let pair = decompose(&zeta, 1.0, problem.cover()).unwrap();
            for z in &pair.zbar {
                assert!(z.distance_sq(&xstar).sqrt() <= 1e-6);
            }
        }
    }
}

#[test]
fn single_component_gauss_seidel_is_proximal_point() {
    let problem = common::g5_problem(instance(9, 1, true).costs().to_vec(), 1, true);
    assert_eq!(problem.cover(), &full_cover(problem.graph()));
    let op = DouglasRachford::new(&problem, 2.0).unwrap();
    let zeta0 = common::random_zeta(&mut common::rng(9), problem.cover(), 1, 3.0);
    let trajectory =
        random_gs_iterate(&op, &zeta0, &ActivationProcess::uniform(1).unwrap(), 40, 0).unwrap();
    assert_eq!(trajectory.len(), 41);
    for (k, zeta) in trajectory.iter().enumerate() {
        let reference = proximal_point_iterate(&op, &zeta0, k).unwrap();
        assert!(zeta.max_abs_diff(&reference).unwrap() <= 1e-12);
    }
}

#[test]
fn identity_trajectory_is_constant() {
    let problem = instance(10, 2, false);
    let op = IdentityOperator {
        blocks: problem.num_components(),
    };
    let zeta0 = common::random_zeta(&mut common::rng(10), problem.cover(), 2, 3.0);
    let law = ActivationProcess::uniform(problem.num_components()).unwrap();
    for zeta in random_gs_iterate(&op, &zeta0, &law, 100, 3).unwrap() {
        assert_eq!(zeta, zeta0);
    }
}

#[test]
fn gauss_seidel_on_defaults_reaches_three() {
    let problem = common::g5_defaults();
    let op = DouglasRachford::new(&problem, 1.0).unwrap();
    let law = ActivationProcess::uniform(problem.num_components()).unwrap();
    let trajectory =
        random_gs_iterate(&op, &BlockVector::zeros(problem.cover(), 1), &law, 5000, 42).unwrap();
    let pair = decompose(trajectory.last().unwrap(), 1.0, problem.cover()).unwrap();
    for z in pair.zbar {
        assert!((z[0] - 3.0).abs() <= 1e-5, "{z:?}");
    }
}

/// For `zeta* = S zeta*`, one randomized block step decreases
/// `sum_l p_l^{-1} ||zeta_l - zeta*_l||^2` in expectation by at least
/// `||S zeta - zeta||^2`. The expectation is a finite sum over blocks.
#[test]
fn weighted_distance_decreases_in_expectation() {
    let mut rng = common::rng(12);
    let problem = common::g5_defaults();
    let op = DouglasRachford::new(&problem, 1.0).unwrap();
    let star =
        proximal_point_iterate(&op, &BlockVector::zeros(problem.cover(), 1), 10_000).unwrap();
    let law = [0.1, 0.3, 0.2, 0.25, 0.15];
    for _ in 0..100 {
        let zeta = common::random_zeta(&mut rng, problem.cover(), 1, 6.0);
        let before = zeta.sub(&star).unwrap().weighted_norm_sq(&law).unwrap();
        let expected_after: f64 = (0..law.len())
            .map(|l| {
                law[l]
                    * gs_hat_apply(&op, l, &zeta)
                        .unwrap()
                        .sub(&star)
                        .unwrap()
                        .weighted_norm_sq(&law)
                        .unwrap()
            })
            .sum();
        let step = op.apply(&zeta).unwrap().sub(&zeta).unwrap().norm_sq();
        assert!(
            expected_after - before <= -step + 1e-6,
            "{expected_after} {before} {step}"
        );
    }
}
