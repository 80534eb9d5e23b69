mod common;

use gentle_core::oracle::{random_colored_quiver, verify_si_equations};
use gentle_core::peg::{build_peg, extract_matching_system};
use gentle_core::rank::{maximal_rank_sequences, DimensionVector};
use gentle_core::si::{lambda_from_uy, roundtrip_uy, PartitionMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Weakly decreasing sequences of length `n` with parts at most `max`.
fn partitions(n: usize, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=max {
        for mut rest in partitions(n - 1, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every partition map with parts at most `max`, or `None` past `limit`.
fn all_maps(r: &[usize], max: u32, limit: usize) -> Option<Vec<PartitionMap>> {
    let per: Vec<Vec<Vec<u32>>> = r.iter().map(|&n| partitions(n, max)).collect();
    if per.iter().map(Vec::len).product::<usize>() > limit {
        return None;
    }
    let mut acc = vec![Vec::new()];
    for choices in per {
        acc = acc
            .into_iter()
            .flat_map(|base: Vec<Vec<u32>>| {
                choices.iter().map(move |c| {
                    let mut b = base.clone();
                    b.push(c.clone());
                    b
                })
            })
            .collect();
    }
    Some(
        acc.into_iter()
            .map(|parts| PartitionMap { parts })
            .collect(),
    )
}

/// Λ_SI read from the weight equations equals the image of (u, y).
#[test]
fn weight_equations_match_the_semigroup_image() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    let mut members = 0;
    for _ in 0..40 {
        let cq = random_colored_quiver(&mut rng, 4, 3);
        let beta = DimensionVector(
            (0..cq.quiver().vertex_count())
                .map(|_| rng.gen_range(1..=3))
                .collect(),
        );
        for r in maximal_rank_sequences(&cq, &beta)
            .unwrap()
            .into_iter()
            .take(2)
        {
            let Some(maps) = all_maps(&r.0, 2, 20_000) else {
                continue;
            };
            let peg = build_peg(&cq, &beta, &r).unwrap();
            let ex = extract_matching_system(&peg).unwrap();
            for lambda in maps {
                checked += 1;
                let literal = verify_si_equations(&cq, &beta, &lambda);
                let image = roundtrip_uy(&peg, &ex, &lambda)
                    .ok()
                    .filter(|(u, _)| ex.system.is_member(u).unwrap())
                    .and_then(|(u, y)| lambda_from_uy(&peg, &ex, &u, &y).ok())
                    .is_some_and(|back| back == lambda);
                assert_eq!(literal, image, "{lambda:?} at r = {:?}", r.0);
                members += literal as usize;
            }
        }
    }
    assert!(
        checked > 1000 && members > 50,
        "{checked} maps, {members} members"
    );
}

#[test]
fn running_example_image_is_member() {
    let peg = build_peg(
        &common::running(),
        &common::running_beta(),
        &common::running_ranks(),
    )
    .unwrap();
    let ex = extract_matching_system(&peg).unwrap();
    let maps = all_maps(&common::running_ranks().0, 1, 1 << 20).unwrap();
    for lambda in maps {
        let literal = verify_si_equations(peg.colored_quiver(), peg.beta(), &lambda);
        let image = roundtrip_uy(&peg, &ex, &lambda)
            .ok()
            .filter(|(u, _)| ex.system.is_member(u).unwrap())
            .and_then(|(u, y)| lambda_from_uy(&peg, &ex, &u, &y).ok())
            .is_some_and(|back| back == lambda);
        assert_eq!(literal, image, "{lambda:?}");
    }
}
