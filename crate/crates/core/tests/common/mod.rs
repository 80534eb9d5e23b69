#![allow(dead_code)]

use gentle_core::algebra::{ColoredQuiver, Coloring, Quiver};
use gentle_core::rank::{DimensionVector, RankSequence};

pub fn quiver(vs: &[&str], arrows: &[(&str, &str, &str)]) -> Quiver {
    Quiver::new(
        vs.iter().map(|s| s.to_string()),
        arrows
            .iter()
            .map(|(a, t, h)| (a.to_string(), t.to_string(), h.to_string())),
    )
    .unwrap()
}

/// Seven arrows on five vertices in three colors.
pub fn running() -> ColoredQuiver {
    let q = quiver(
        &["1", "2", "3", "4", "5"],
        &[
            ("a1", "1", "2"),
            ("b1", "1", "2"),
            ("a2", "2", "3"),
            ("b2", "2", "4"),
            ("c1", "3", "4"),
            ("b3", "4", "5"),
            ("c2", "4", "5"),
        ],
    );
    let c = Coloring::from_labels(&q, &['a', 'b', 'a', 'b', 'c', 'b', 'c']).unwrap();
    ColoredQuiver::new(q, c).unwrap()
}

pub fn running_beta() -> DimensionVector {
    DimensionVector(vec![2, 6, 2, 4, 2])
}

pub fn running_ranks() -> RankSequence {
    RankSequence(vec![2; 7])
}
