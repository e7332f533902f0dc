//! Fixed workloads for the criterion benches.

use bmdl::generate::{GenConfig, Generator};
use bmdl::{parse_sequent, Sequent};

/// Named sequents: the axiom instances, the boxed Śyena sequent and a few
/// underivable ones.
pub fn named() -> Vec<(&'static str, Sequent)> {
    [
        ("axiom1", "|- [](p -> q) & O(p / r) -> O(q / r)"),
        ("axiom2", "|- [](q -> ~p) -> ~(O(p / r) & O(q / r))"),
        ("axiom3", "|- []((q -> r) & (r -> q)) & O(p / q) -> O(p / r)"),
        ("s4-4", "|- []p -> [][]p"),
        ("syena", "[](he -> hrm), [](sy -> he), []O(~hrm / true), []O(sy / dhe) |- false"),
        ("obligation", "|- O(p / q)"),
        ("mixed", "O(p / r), [](p -> q) |- O(p & q / r)"),
    ]
    .into_iter()
    .map(|(name, text)| (name, parse_sequent(text).expect("workload parses")))
    .collect()
}

/// `count` seeded random sequents of the given size.
pub fn random(seed: u64, size: usize, count: usize) -> Vec<Sequent> {
    let mut g = Generator::new(seed, GenConfig::default());
    (0..count).map(|_| g.sequent(size)).collect()
}
