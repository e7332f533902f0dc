//! Helpers shared by the integration tests: a model evaluator written
//! directly against the definitions and a generator of small random m-models.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use bmdl::{Formula, MModel, Sequent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Worlds = BTreeSet<usize>;

/// Largest `R[w] \ base` whose supersets are enumerated when checking
/// condition 5.
const ENUMERATION_LIMIT: usize = 14;

/// A model evaluated straight from the definitions: `(X, Y) ∈ η(w)` iff
/// some generator `(B, Y)` of `w` has `B ⊆ X ⊆ R[w]`.
pub struct Explicit {
    pub n: usize,
    pub acc: Vec<Worlds>,
    pub gens: Vec<Vec<(Worlds, Worlds)>>,
    pub val: Vec<BTreeSet<String>>,
}

fn supersets_within(base: &Worlds, within: &Worlds) -> Vec<Worlds> {
    let free: Vec<usize> = within.difference(base).copied().collect();
    (0..1u32 << free.len())
        .map(|mask| {
            let mut x = base.clone();
            x.extend(free.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, w)| *w));
            x
        })
        .collect()
}

impl Explicit {
    pub fn of(m: &MModel) -> Explicit {
        let n = m.len();
        let acc: Vec<Worlds> = (0..n).map(|w| m.accessible(w).ones().collect()).collect();
        let gens = (0..n)
            .map(|w| {
                m.generators(w)
                    .iter()
                    .map(|g| (g.base.ones().collect(), g.cond.ones().collect()))
                    .collect()
            })
            .collect();
        let val = (0..n)
            .map(|w| m.valuation(w).iter().map(|a| a.to_string()).collect())
            .collect();
        Explicit { n, acc, gens, val }
    }

    pub fn in_eta(&self, w: usize, x: &Worlds, y: &Worlds) -> bool {
        x.is_subset(&self.acc[w]) && self.gens[w].iter().any(|(b, c)| b.is_subset(x) && c == y)
    }

    /// Conditions 1, 2, 4 and 5 by brute force; `None` when some `R[w]` is
    /// too large to enumerate.
    pub fn is_m_frame(&self) -> Option<bool> {
        for w in 0..self.n {
            if !self.acc[w].contains(&w) {
                return Some(false);
            }
            for v in &self.acc[w] {
                if !self.acc[*v].is_subset(&self.acc[w]) {
                    return Some(false);
                }
            }
            for (b, c) in &self.gens[w] {
                if !b.is_subset(&self.acc[w]) || !c.is_subset(&self.acc[w]) || b.is_empty() {
                    return Some(false);
                }
                if self.acc[w].len() - b.len() > ENUMERATION_LIMIT {
                    return None;
                }
                for x in supersets_within(b, &self.acc[w]) {
                    let co: Worlds = self.acc[w].difference(&x).copied().collect();
                    if self.in_eta(w, &co, c) {
                        return Some(false);
                    }
                }
            }
        }
        Some(true)
    }

    fn extension(&self, w: usize, f: &Formula) -> Worlds {
        self.acc[w].iter().copied().filter(|v| self.holds(*v, f)).collect()
    }

    pub fn holds(&self, w: usize, f: &Formula) -> bool {
        match f {
            Formula::Atom(a) => self.val[w].contains(&**a),
            Formula::Bottom => false,
            Formula::Neg(g) => !self.holds(w, g),
            Formula::And(l, r) => self.holds(w, l) && self.holds(w, r),
            Formula::Or(l, r) => self.holds(w, l) || self.holds(w, r),
            Formula::Imp(l, r) => !self.holds(w, l) || self.holds(w, r),
            Formula::Box(g) => self.acc[w].iter().all(|v| self.holds(*v, g)),
            Formula::Obl(b, c) => self.in_eta(w, &self.extension(w, b), &self.extension(w, c)),
        }
    }

    pub fn satisfies(&self, w: usize, s: &Sequent) -> bool {
        !s.ante.iter().all(|f| self.holds(w, f)) || s.succ.iter().any(|f| self.holds(w, f))
    }

    pub fn valid(&self, s: &Sequent) -> bool {
        (0..self.n).all(|w| self.satisfies(w, s))
    }
}

fn name(w: usize) -> String {
    format!("w{w}")
}

fn random_subset(rng: &mut ChaCha8Rng, of: &Worlds) -> Vec<String> {
    of.iter().filter(|_| rng.gen_bool(0.5)).map(|w| name(*w)).collect()
}

/// A random model on at most `max_worlds` worlds over atoms `p0..p3`.
/// Neither frame condition 4 nor 5 is guaranteed.
pub fn random_model(seed: u64, max_worlds: usize) -> MModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_worlds);
    let mut reach: Vec<Worlds> = (0..n).map(|w| [w].into()).collect();
    for w in 0..n {
        for v in 0..n {
            if rng.gen_ratio(1, 3) {
                reach[w].insert(v);
            }
        }
    }
    for k in 0..n {
        for w in 0..n {
            if reach[w].contains(&k) {
                let row = reach[k].clone();
                reach[w].extend(row);
            }
        }
    }
    let worlds: Vec<String> = (0..n).map(name).collect();
    let acc: Vec<(String, String)> = (0..n)
        .flat_map(|w| reach[w].iter().map(move |v| (name(w), name(*v))))
        .collect();
    let mut eta = BTreeMap::new();
    for w in 0..n {
        let k = rng.gen_range(0..=3);
        let gens: Vec<_> = (0..k)
            .map(|_| (random_subset(&mut rng, &reach[w]), random_subset(&mut rng, &reach[w])))
            .collect();
        eta.insert(name(w), gens);
    }
    let mut val = BTreeMap::new();
    for w in 0..n {
        let atoms: Vec<String> = (0..4).filter(|_| rng.gen_bool(0.5)).map(|i| format!("p{i}")).collect();
        val.insert(name(w), atoms);
    }
    MModel::new(worlds, &acc, &eta, &val).expect("well-formed model")
}

/// Random models that the explicit oracle accepts as m-models.
pub fn random_m_models(seed: u64, count: usize, max_worlds: usize) -> Vec<(MModel, Explicit)> {
    let mut out = Vec::new();
    let mut s = seed;
    while out.len() < count {
        let m = random_model(s, max_worlds);
        s += 1;
        let e = Explicit::of(&m);
        if e.is_m_frame() == Some(true) {
            out.push((m, e));
        }
    }
    out
}

use bmdl::generate::Generator;

/// `s` with one extra random formula on a random side.
pub fn weaken(g: &mut Generator, s: &Sequent) -> Sequent {
    let size = 1 + g.below(6);
    let f = g.formula(size);
    let mut out = s.clone();
    if g.below(2) == 0 {
        out.ante.push(f);
    } else {
        out.succ.push(f);
    }
    out
}

/// `s` with one of its formulas repeated, or `None` for the empty sequent.
pub fn duplicate(g: &mut Generator, s: &Sequent) -> Option<Sequent> {
    let total = s.ante.len() + s.succ.len();
    if total == 0 {
        return None;
    }
    let i = g.below(total);
    let mut out = s.clone();
    if i < s.ante.len() {
        out.ante.push(s.ante[i].clone());
    } else {
        out.succ.push(s.succ[i - s.ante.len()].clone());
    }
    Some(out)
}

/// The premisses `Γ ⊢ Δ, φ` and `φ, Π ⊢ Σ` and conclusion
/// `Γ, Π ⊢ Δ, Σ` of a cut on `φ`.
pub fn cut_triple(g: &mut Generator, size: usize) -> (Sequent, Sequent, Sequent) {
    let k = 1 + g.below(5);
    let phi = g.formula(k);
    let left = g.sequent(size);
    let right = g.sequent(size);
    let mut a = left.clone();
    a.succ.push(phi.clone());
    let mut b = right.clone();
    b.ante.insert(0, phi);
    let mut c = left;
    c.ante.extend(right.ante);
    c.succ.extend(right.succ);
    (a, b, c)
}
