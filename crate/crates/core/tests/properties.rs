mod common;

use gentle_core::algebra::{coloring_from_gentle, is_gentle, monochromatic_ideal, ColoredQuiver};
use gentle_core::matching::enumerate_irreducible_walks;
use gentle_core::oracle::{
    random_colored_quiver, random_partition_map, random_system, verify_si_equations,
};
use gentle_core::peg::{build_peg, extract_matching_system, ComponentKind, Peg, PegExtract};
use gentle_core::rank::{is_rank_sequence, maximal_rank_sequences, DimensionVector, RankSequence};
use gentle_core::si::{f_lambda, lambda_from_uy, roundtrip_uy, si_membership, PartitionMap};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quiver_and_beta(seed: u64) -> (ColoredQuiver, DimensionVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cq = random_colored_quiver(&mut rng, 5, 3);
    let beta = DimensionVector(
        (0..cq.quiver().vertex_count())
            .map(|_| rng.gen_range(0..=3))
            .collect(),
    );
    (cq, beta)
}

/// Every rank sequence in the box `r(a) ≤ min(β_tail, β_head)`.
fn all_rank_sequences(cq: &ColoredQuiver, beta: &DimensionVector) -> Vec<RankSequence> {
    let q = cq.quiver();
    let bound: Vec<usize> = q
        .arrows()
        .iter()
        .map(|a| beta.at(a.tail).min(beta.at(a.head)))
        .collect();
    let mut out = Vec::new();
    let mut r = vec![0; bound.len()];
    loop {
        let rs = RankSequence(r.clone());
        if is_rank_sequence(cq, beta, &rs).unwrap() {
            out.push(rs);
        }
        let Some(j) = (0..r.len()).rev().find(|&j| r[j] < bound[j]) else {
            break;
        };
        r[j] += 1;
        for x in r.iter_mut().skip(j + 1) {
            *x = 0;
        }
    }
    out
}

/// Members of the semigroup: sums of a few generators.
fn member(ex: &PegExtract, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let ws = enumerate_irreducible_walks(&ex.system).unwrap();
    let mut u = vec![0; ex.system.num_vars()];
    for g in &ws.generators {
        let k = rng.gen_range(0..=2);
        for (x, y) in u.iter_mut().zip(&g.vector) {
            *x += k * y;
        }
    }
    u
}

fn running_pipeline() -> (Peg, PegExtract) {
    let peg = build_peg(
        &common::running(),
        &common::running_beta(),
        &common::running_ranks(),
    )
    .unwrap();
    let ex = extract_matching_system(&peg).unwrap();
    (peg, ex)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maximal_ranks_dominate(seed in any::<u64>()) {
        let (cq, beta) = quiver_and_beta(seed);
        let all = all_rank_sequences(&cq, &beta);
        let max = maximal_rank_sequences(&cq, &beta).unwrap();
        let brute: Vec<&RankSequence> = all
            .iter()
            .filter(|&r| !all.iter().any(|s| s != r && r.le(s)))
            .collect();
        prop_assert_eq!(brute.len(), max.len());
        for m in &max {
            prop_assert!(brute.contains(&m));
        }
        for r in &all {
            prop_assert!(max.iter().any(|m| r.le(m)));
        }
    }

    #[test]
    fn coloring_ideal_is_gentle_and_recovers_coloring(seed in any::<u64>()) {
        let (cq, _) = quiver_and_beta(seed);
        let q = cq.quiver();
        let ideal = monochromatic_ideal(q, cq.coloring());
        prop_assert!(is_gentle(q, &ideal).ok);
        let back = coloring_from_gentle(q, &ideal).unwrap();
        prop_assert_eq!(&monochromatic_ideal(q, &back), &ideal);
        for (b, a) in ideal.iter() {
            prop_assert_eq!(cq.coloring().color(a), cq.coloring().color(b));
            prop_assert_eq!(q.arrow(a).head, q.arrow(b).tail);
        }
    }

    #[test]
    fn walk_generators_are_members(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, 4, 8);
        let ws = enumerate_irreducible_walks(&sys).unwrap();
        for g in &ws.generators {
            prop_assert!(sys.is_member(&g.vector).unwrap());
        }
    }

    #[test]
    fn membership_agrees_with_literal_equations(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (peg, ex) = running_pipeline();
        let cq = peg.colored_quiver();
        let beta = peg.beta();
        // Random maps are almost never members; λ_{u,y} always is, and a
        // one-box perturbation of it usually is not.
        let random = random_partition_map(&mut rng, &peg.ranks().0, 3);
        let u = member(&ex, &mut rng);
        let y: Vec<u32> = ex.bands.iter().map(|_| rng.gen_range(0..=2)).collect();
        let built = lambda_from_uy(&peg, &ex, &u, &y).unwrap();
        let mut perturbed = built.clone();
        let a = rng.gen_range(0..perturbed.parts.len());
        perturbed.parts[a][0] += 1;
        for lambda in [&random, &built, &perturbed] {
            let m = si_membership(cq, beta, lambda).unwrap();
            prop_assert_eq!(m.weight().is_some(), verify_si_equations(cq, beta, lambda));
        }
        prop_assert!(si_membership(cq, beta, &built).unwrap().weight().is_some());
    }

    #[test]
    fn roundtrip_and_additivity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (peg, ex) = running_pipeline();
        let cq = peg.colored_quiver();
        let draw = |rng: &mut ChaCha8Rng| {
            let u = member(&ex, rng);
            let y: Vec<u32> = ex.bands.iter().map(|_| rng.gen_range(0..=3)).collect();
            (u, y)
        };
        let (u1, y1) = draw(&mut rng);
        let (u2, y2) = draw(&mut rng);
        let l1 = lambda_from_uy(&peg, &ex, &u1, &y1).unwrap();
        let l2 = lambda_from_uy(&peg, &ex, &u2, &y2).unwrap();
        prop_assert_eq!(roundtrip_uy(&peg, &ex, &l1).unwrap(), (u1.clone(), y1.clone()));
        let add = |a: &[u32], b: &[u32]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<u32>>();
        let l12 = lambda_from_uy(&peg, &ex, &add(&u1, &u2), &add(&y1, &y2)).unwrap();
        let sum = PartitionMap {
            parts: l1.parts.iter().zip(&l2.parts).map(|(p, q)| add(p, q)).collect(),
        };
        prop_assert_eq!(&l12, &sum);
        let w = |l: &PartitionMap| si_membership(cq, peg.beta(), l).unwrap().weight().unwrap().sigma.clone();
        let (w1, w2, w12) = (w(&l1), w(&l2), w(&l12));
        for x in 0..w12.len() {
            prop_assert_eq!(w12[x], w1[x] + w2[x]);
        }
    }

    #[test]
    fn f_lambda_constant_on_components(seed in any::<u64>()) {
        let (cq, beta) = quiver_and_beta(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
        for r in maximal_rank_sequences(&cq, &beta).unwrap().into_iter().take(3) {
            let peg = build_peg(&cq, &beta, &r).unwrap();
            let ex = extract_matching_system(&peg).unwrap();
            let u = member(&ex, &mut rng);
            let y: Vec<u32> = ex.bands.iter().map(|_| rng.gen_range(0..=2)).collect();
            let lambda = lambda_from_uy(&peg, &ex, &u, &y).unwrap();
            prop_assert!(lambda.is_partition());
            for comp in &ex.components {
                let vals: Vec<i64> = comp.roots.iter().map(|&a| f_lambda(&peg, &lambda, a).unwrap()).collect();
                prop_assert!(vals.iter().all(|&v| v == vals[0]));
                if comp.roots.iter().any(|&a| !cq.is_coupled(peg.root(a).vertex)) {
                    prop_assert_eq!(vals[0], 0);
                }
            }
            prop_assert!(si_membership(&cq, &beta, &lambda).unwrap().weight().is_some());
        }
    }

    #[test]
    fn peg_structure(seed in any::<u64>()) {
        let (cq, beta) = quiver_and_beta(seed);
        for r in maximal_rank_sequences(&cq, &beta).unwrap().into_iter().take(3) {
            let peg = build_peg(&cq, &beta, &r).unwrap();
            let ex = extract_matching_system(&peg).unwrap();
            prop_assert!(ex.system.validate().ok);
            for comp in &ex.components {
                match comp.kind {
                    ComponentKind::Band => prop_assert_eq!(comp.roots.len() % 2, 0),
                    ComponentKind::String => {
                        let (e, f) = comp.endpoints().unwrap();
                        prop_assert_eq!(peg.theta(e).unwrap(), f);
                        prop_assert_eq!(peg.theta(f).unwrap(), e);
                    }
                    ComponentKind::Isolated => prop_assert_eq!(peg.degree(comp.roots[0]), 0),
                }
                for w in comp.roots.windows(2) {
                    let joined = peg.vertex_partner(w[0]) == Some(w[1])
                        || peg.colored_partner(w[0]).map(|p| p.0) == Some(w[1]);
                    prop_assert!(joined);
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = member(&ex, &mut rng);
            for comp in ex.components.iter().filter(|c| c.kind == ComponentKind::String) {
                let (e, f) = comp.endpoints().unwrap();
                let (ce, cf) = (peg.classify(e), peg.classify(f));
                let side = |s: &[usize]| s.iter().map(|&a| u[a]).sum::<u32>();
                prop_assert_eq!(side(ce.side()), side(cf.side()));
            }
        }
    }
}
