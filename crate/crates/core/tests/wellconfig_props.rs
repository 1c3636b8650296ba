mod common;

use common::*;
use matcons_core::numerics::{subspace_family_independent, SubspaceBasis, Vector};
use matcons_core::simulator::{consensus_error, local_agreement_residual};
use matcons_core::wellconfig::{
    cycle_criterion, is_well_configured_ordered, is_well_configured_via_intersection,
    lifted_incidence,
};
use matcons_core::{incidence_matrix, is_well_configured, DirectedGraph, DEFAULT_RANK_TOL};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

const TOL: f64 = DEFAULT_RANK_TOL;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn kernel_and_intersection_verdicts_agree(seed in any::<u64>(), m in 2usize..7, n in 1usize..5, extra in 0usize..6) {
        let mut r = rng(seed);
        let g = random_weakly_connected(&mut r, m, extra);
        let w = random_weights(&mut r, &g, n);
        let kernel = is_well_configured(&w, TOL).unwrap();
        let meet = is_well_configured_via_intersection(&w, TOL).unwrap();
        prop_assert_eq!(kernel.well_configured, meet);

        // Independent oracle: nullity of the hand-assembled C Jbar'.
        let op = naive_disagreement(&w);
        let nullity = m * n - ge_rank(&op, 1e-9);
        prop_assert_eq!(nullity, kernel.kernel_dim);
        prop_assert_eq!(nullity == n, kernel.well_configured);
    }

    #[test]
    fn verdict_ignores_arc_order(seed in any::<u64>(), m in 2usize..7, n in 1usize..4, extra in 0usize..6) {
        let mut r = rng(seed);
        let g = random_weakly_connected(&mut r, m, extra);
        let w = random_weights(&mut r, &g, n);
        let mut order: Vec<usize> = (0..g.arc_count()).collect();
        order.shuffle(&mut r);
        let base = is_well_configured(&w, TOL).unwrap();
        let shuffled = is_well_configured_ordered(&w, &order, TOL).unwrap();
        prop_assert_eq!(base.well_configured, shuffled.well_configured);
        prop_assert_eq!(base.kernel_dim, shuffled.kernel_dim);
    }

    #[test]
    fn witness_is_local_agreement_without_consensus(seed in any::<u64>(), m in 2usize..6, n in 1usize..4) {
        let mut r = rng(seed);
        let g = random_weakly_connected(&mut r, m, 2);
        let w = random_weights(&mut r, &g, n);
        let v = is_well_configured(&w, TOL).unwrap();
        match v.witness {
            Some(x) => {
                prop_assert!(!v.well_configured);
                prop_assert!(local_agreement_residual(&w, &x) < 1e-9);
                prop_assert!(consensus_error(&x, n) > 1e-3);
            }
            None => prop_assert!(v.well_configured),
        }
    }

    #[test]
    fn independence_matches_elimination_oracle(seed in any::<u64>(), n in 1usize..6, members in 1usize..5) {
        let mut r = rng(seed);
        let mut raw: Vec<Vec<Vector>> = Vec::new();
        for _ in 0..members {
            let k = r.gen_range(0..=n.min(3));
            let mut vs: Vec<Vector> = Vec::new();
            for _ in 0..k {
                // Sometimes reuse a direction from an earlier member.
                let v = match raw.iter().flatten().collect::<Vec<_>>().as_slice() {
                    prev if !prev.is_empty() && r.gen_bool(0.3) => prev[r.gen_range(0..prev.len())].clone() * 2.0,
                    _ => random_state(&mut r, n),
                };
                vs.push(v);
            }
            raw.push(vs);
        }
        let family: Vec<SubspaceBasis> = raw.iter().map(|vs| SubspaceBasis::span_of_vectors(n, vs, TOL)).collect();
        let as_matrix = |vs: &[&Vector]| {
            matcons_core::Matrix::from_fn(n, vs.len(), |i, j| vs[j][i])
        };
        let member_ranks: usize = raw.iter().map(|vs| ge_rank(&as_matrix(&vs.iter().collect::<Vec<_>>()), 1e-9)).sum();
        let all: Vec<&Vector> = raw.iter().flatten().collect();
        let joint = ge_rank(&as_matrix(&all), 1e-9);
        prop_assert_eq!(subspace_family_independent(&family, TOL).unwrap(), joint == member_ranks);
    }

    #[test]
    fn incidence_matches_entrywise_definition(seed in any::<u64>(), m in 2usize..8, extra in 0usize..8) {
        let mut r = rng(seed);
        let g = random_weakly_connected(&mut r, m, extra);
        prop_assert_eq!(incidence_matrix(&g), naive_incidence(&g));
        let lifted = lifted_incidence(&g, 2);
        prop_assert_eq!(lifted.shape(), (2 * m, 2 * g.arc_count()));
        // Columns of J sum to zero.
        for c in 0..g.arc_count() {
            prop_assert_eq!(incidence_matrix(&g).column(c).sum(), 0.0);
        }
    }
}

#[test]
fn cycle_criterion_matches_verifier_on_random_cycles() {
    let mut r = rng(7);
    for m in 2..=5 {
        for n in 2..=4 {
            for _ in 0..20 {
                let g = DirectedGraph::cycle(m).unwrap();
                let w = random_weights(&mut r, &g, n);
                let brute = is_well_configured(&w, TOL).unwrap().well_configured;
                let via_cycle = cycle_criterion(&w.kernels(TOL), TOL).unwrap();
                assert_eq!(brute, via_cycle, "m={m} n={n} {w:?}");
            }
        }
    }
}
