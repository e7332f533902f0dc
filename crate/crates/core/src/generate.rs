//! Seeded random formulas and sequents, and the scaling report built on
//! them.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::formula::{Formula, Sequent};
use crate::search::{prove, SearchConfig, SearchError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    /// Atoms are drawn from `p0 .. p{atoms-1}`.
    pub atoms: usize,
    pub max_modal_depth: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            atoms: 4,
            max_modal_depth: 3,
        }
    }
}

/// Deterministic stream of formulas for a given seed and configuration.
pub struct Generator {
    rng: ChaCha8Rng,
    atoms: Vec<Formula>,
    max_modal_depth: usize,
}

impl Generator {
    pub fn new(seed: u64, cfg: GenConfig) -> Generator {
        assert!(cfg.atoms > 0, "at least one atom");
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            atoms: (0..cfg.atoms).map(|i| Formula::atom(&format!("p{i}"))).collect(),
            max_modal_depth: cfg.max_modal_depth,
        }
    }

    fn leaf(&mut self) -> Formula {
        if self.rng.gen_ratio(1, 12) {
            Formula::Bottom
        } else {
            self.atoms.choose(&mut self.rng).expect("atoms").clone()
        }
    }

    /// A formula with exactly `size` syntax-tree nodes (at least one).
    pub fn formula(&mut self, size: usize) -> Formula {
        let depth = self.max_modal_depth;
        self.formula_within(size.max(1), depth)
    }

    fn formula_within(&mut self, size: usize, modal: usize) -> Formula {
        if size == 1 {
            return self.leaf();
        }
        let binary = size >= 3;
        let mut choices: Vec<u8> = vec![0];
        if modal > 0 {
            choices.push(1);
        }
        if binary {
            choices.extend([2, 3, 4]);
            if modal > 0 {
                choices.push(5);
            }
        }
        let split = |rng: &mut ChaCha8Rng| rng.gen_range(1..size - 1);
        match *choices.choose(&mut self.rng).expect("choices") {
            0 => Formula::neg(self.formula_within(size - 1, modal)),
            1 => Formula::boxed(self.formula_within(size - 1, modal - 1)),
            c => {
                let l = split(&mut self.rng);
                let inner = if c == 5 { modal - 1 } else { modal };
                let a = self.formula_within(l, inner);
                let b = self.formula_within(size - 1 - l, inner);
                match c {
                    2 => Formula::and(a, b),
                    3 => Formula::or(a, b),
                    4 => Formula::imp(a, b),
                    _ => Formula::obl(a, b),
                }
            }
        }
    }

    /// A sequent of one to four formulas whose sizes add up to roughly
    /// `size`.
    pub fn sequent(&mut self, size: usize) -> Sequent {
        let size = size.max(1);
        let parts = self.rng.gen_range(1..=4usize).min(size);
        let mut sizes = vec![1; parts];
        for _ in parts..size {
            let i = self.rng.gen_range(0..parts);
            sizes[i] += 1;
        }
        let mut s = Sequent::default();
        for n in sizes {
            let f = self.formula(n);
            if self.rng.gen_bool(0.5) {
                s.ante.push(f);
            } else {
                s.succ.push(f);
            }
        }
        s
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> Option<&'a T> {
        items.choose(&mut self.rng)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub seed: u64,
    pub buckets: Vec<usize>,
    pub samples: usize,
    pub budget: usize,
    pub generator: GenConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: 0,
            buckets: vec![5, 10, 15, 20],
            samples: 100,
            budget: crate::search::DEFAULT_BUDGET,
            generator: GenConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub size: usize,
    pub samples: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub inconclusive: usize,
    pub median_visited: usize,
    pub max_visited: usize,
    pub median_micros: u128,
    pub total_millis: u128,
}

fn median<T: Copy + Ord>(mut xs: Vec<T>) -> Option<T> {
    xs.sort_unstable();
    xs.get(xs.len() / 2).copied()
}

/// Runs the search on `samples` random sequents per size bucket.
pub fn bench(cfg: &BenchConfig) -> Vec<BenchRow> {
    let mut gen = Generator::new(cfg.seed, cfg.generator);
    let search = SearchConfig::with_budget(cfg.budget);
    cfg.buckets
        .iter()
        .map(|&size| {
            let mut row = BenchRow {
                size,
                samples: cfg.samples,
                accepted: 0,
                rejected: 0,
                inconclusive: 0,
                median_visited: 0,
                max_visited: 0,
                median_micros: 0,
                total_millis: 0,
            };
            let mut visited = Vec::new();
            let mut micros = Vec::new();
            let start = Instant::now();
            for _ in 0..cfg.samples {
                let s = gen.sequent(size);
                let t = Instant::now();
                let out = prove(&s, search);
                micros.push(t.elapsed().as_micros());
                match out {
                    Ok(o) => {
                        visited.push(o.trace().visited);
                        if o.is_accepted() {
                            row.accepted += 1;
                        } else {
                            row.rejected += 1;
                        }
                    }
                    Err(SearchError::BudgetExhausted { budget }) => {
                        visited.push(budget);
                        row.inconclusive += 1;
                    }
                }
            }
            row.total_millis = start.elapsed().as_millis();
            row.max_visited = visited.iter().copied().max().unwrap_or(0);
            row.median_visited = median(visited).unwrap_or(0);
            row.median_micros = median(micros).unwrap_or(0);
            row
        })
        .collect()
}
