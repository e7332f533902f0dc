//! Finite m-models: reflexive-transitive Kripke frames with a neighbourhood
//! map over accessible worlds, and model checking via truth sets.
//!
//! Neighbourhoods are stored intensionally as generators `(base, cond)`.
//! A generator at `w` stands for every pair `(X, cond)` with
//! `base ⊆ X ⊆ R[w]`, so upward closure in the first coordinate holds by
//! construction and the (exponentially large) extension is never built.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::derivation::interpretation;
use crate::formula::{Formula, Sequent};

pub type WorldSet = FixedBitSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub base: WorldSet,
    pub cond: WorldSet,
}

#[derive(Clone, Debug)]
pub struct MModel {
    names: Vec<String>,
    index: HashMap<String, usize>,
    /// `acc[w]` is `R[w]`.
    acc: Vec<WorldSet>,
    nbhd: Vec<Vec<Generator>>,
    val: Vec<BTreeSet<Arc<str>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("a model needs at least one world")]
    Empty,
    #[error("malformed model: {0}")]
    Malformed(String),
}

/// The first frame condition found violated, with witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameViolation {
    NotReflexive { world: String },
    NotTransitive { w: String, v: String, u: String },
    /// Condition 2: a component leaves `R[w]`.
    OutsideAccessible { world: String, x: Vec<String>, y: Vec<String> },
    /// Condition 3, only reachable through extensional import.
    NotUpwardClosed { world: String, x: Vec<String>, y: Vec<String> },
    /// Condition 4: `(∅, Y) ∈ η(w)`.
    EmptyFirst { world: String, y: Vec<String> },
    /// Condition 5: both `(X, Y)` and `(R[w] \ X, Y)` are in `η(w)`.
    Complement { world: String, x: Vec<String>, y: Vec<String> },
}

impl FrameViolation {
    pub fn condition(&self) -> u8 {
        match self {
            FrameViolation::NotReflexive { .. } | FrameViolation::NotTransitive { .. } => 1,
            FrameViolation::OutsideAccessible { .. } => 2,
            FrameViolation::NotUpwardClosed { .. } => 3,
            FrameViolation::EmptyFirst { .. } => 4,
            FrameViolation::Complement { .. } => 5,
        }
    }
}

impl fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &[String]| format!("{{{}}}", s.join(", "));
        match self {
            FrameViolation::NotReflexive { world } => write!(f, "condition 1: R is not reflexive at {world}"),
            FrameViolation::NotTransitive { w, v, u } => {
                write!(f, "condition 1: {w} R {v} and {v} R {u} but not {w} R {u}")
            }
            FrameViolation::OutsideAccessible { world, x, y } => write!(
                f,
                "condition 2: ({}, {}) in eta({world}) is not below R[{world}]",
                set(x),
                set(y)
            ),
            FrameViolation::NotUpwardClosed { world, x, y } => write!(
                f,
                "condition 3: eta({world}) lacks ({}, {})",
                set(x),
                set(y)
            ),
            FrameViolation::EmptyFirst { world, y } => {
                write!(f, "condition 4: (∅, {}) in eta({world})", set(y))
            }
            FrameViolation::Complement { world, x, y } => write!(
                f,
                "condition 5: ({}, {}) and its complement below R[{world}] are both in eta({world})",
                set(x),
                set(y)
            ),
        }
    }
}

impl MModel {
    /// Builds a model from named worlds, an accessibility edge list,
    /// generators per world and a valuation. Missing entries default to
    /// empty; the frame conditions are not checked here.
    pub fn new(
        worlds: Vec<String>,
        acc: &[(String, String)],
        eta: &BTreeMap<String, Vec<(Vec<String>, Vec<String>)>>,
        val: &BTreeMap<String, Vec<String>>,
    ) -> Result<MModel, ModelError> {
        if worlds.is_empty() {
            return Err(ModelError::Empty);
        }
        let n = worlds.len();
        let mut index = HashMap::new();
        for (i, w) in worlds.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        let lookup = |w: &String| index.get(w).copied().ok_or_else(|| ModelError::UnknownWorld(w.clone()));
        let set_of = |ws: &[String]| -> Result<WorldSet, ModelError> {
            let mut s = WorldSet::with_capacity(n);
            for w in ws {
                s.insert(lookup(w)?);
            }
            Ok(s)
        };
        let mut rel = vec![WorldSet::with_capacity(n); n];
        for (w, v) in acc {
            rel[lookup(w)?].insert(lookup(v)?);
        }
        let mut nbhd = vec![Vec::new(); n];
        for (w, gens) in eta {
            let i = lookup(w)?;
            for (base, cond) in gens {
                nbhd[i].push(Generator {
                    base: set_of(base)?,
                    cond: set_of(cond)?,
                });
            }
        }
        let mut valuation = vec![BTreeSet::new(); n];
        for (w, atoms) in val {
            let i = lookup(w)?;
            valuation[i] = atoms.iter().map(|a| Arc::from(a.as_str())).collect();
        }
        Ok(MModel {
            names: worlds,
            index,
            acc: rel,
            nbhd,
            val: valuation,
        })
    }

    /// Model with index-addressed worlds, used by the countermodel builder.
    pub(crate) fn from_parts(
        names: Vec<String>,
        acc: Vec<WorldSet>,
        nbhd: Vec<Vec<Generator>>,
        val: Vec<BTreeSet<Arc<str>>>,
    ) -> MModel {
        let index = names.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        MModel {
            names,
            index,
            acc,
            nbhd,
            val,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn world_names(&self) -> &[String] {
        &self.names
    }

    pub fn world(&self, name: &str) -> Result<usize, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
    }

    pub fn name(&self, w: usize) -> &str {
        &self.names[w]
    }

    pub fn accessible(&self, w: usize) -> &WorldSet {
        &self.acc[w]
    }

    pub fn generators(&self, w: usize) -> &[Generator] {
        &self.nbhd[w]
    }

    pub fn valuation(&self, w: usize) -> &BTreeSet<Arc<str>> {
        &self.val[w]
    }

    pub fn names_of(&self, s: &WorldSet) -> Vec<String> {
        s.ones().map(|i| self.names[i].clone()).collect()
    }

    fn full(&self) -> WorldSet {
        let mut s = WorldSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    /// Replaces R by its reflexive-transitive closure.
    pub fn close_reflexive_transitive(&mut self) {
        let n = self.len();
        for w in 0..n {
            self.acc[w].insert(w);
        }
        // Warshall over bit rows.
        for k in 0..n {
            let row_k = self.acc[k].clone();
            for w in 0..n {
                if self.acc[w].contains(k) {
                    self.acc[w].union_with(&row_k);
                }
            }
        }
    }

    /// Checks the five m-frame conditions and returns the first violation.
    pub fn validate_frame(&self) -> Result<(), FrameViolation> {
        let n = self.len();
        for w in 0..n {
            if !self.acc[w].contains(w) {
                return Err(FrameViolation::NotReflexive {
                    world: self.names[w].clone(),
                });
            }
        }
        for w in 0..n {
            for v in self.acc[w].ones() {
                if let Some(u) = self.acc[v].difference(&self.acc[w]).next() {
                    return Err(FrameViolation::NotTransitive {
                        w: self.names[w].clone(),
                        v: self.names[v].clone(),
                        u: self.names[u].clone(),
                    });
                }
            }
        }
        for w in 0..n {
            let r = &self.acc[w];
            for g in &self.nbhd[w] {
                if !g.base.is_subset(r) || !g.cond.is_subset(r) {
                    return Err(FrameViolation::OutsideAccessible {
                        world: self.names[w].clone(),
                        x: self.names_of(&g.base),
                        y: self.names_of(&g.cond),
                    });
                }
            }
            for g in &self.nbhd[w] {
                if g.base.is_clear() {
                    return Err(FrameViolation::EmptyFirst {
                        world: self.names[w].clone(),
                        y: self.names_of(&g.cond),
                    });
                }
            }
            // (X, Y) and (R[w] \ X, Y) both present iff two generators with
            // equal cond have disjoint bases; X = R[w] \ base2 is a witness.
            for (i, g1) in self.nbhd[w].iter().enumerate() {
                for g2 in &self.nbhd[w][i..] {
                    if g1.cond == g2.cond && g1.base.is_disjoint(&g2.base) {
                        let mut x = r.clone();
                        x.difference_with(&g2.base);
                        return Err(FrameViolation::Complement {
                            world: self.names[w].clone(),
                            x: self.names_of(&x),
                            y: self.names_of(&g1.cond),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether `(x, y) ∈ η(w)` under the generator reading.
    pub fn in_neighbourhood(&self, w: usize, x: &WorldSet, y: &WorldSet) -> bool {
        x.is_subset(&self.acc[w])
            && self.nbhd[w]
                .iter()
                .any(|g| g.base.is_subset(x) && g.cond == *y)
    }

    /// The set of worlds where `f` holds. Atoms absent from the valuation
    /// are false everywhere.
    pub fn truth_set(&self, f: &Formula) -> WorldSet {
        let n = self.len();
        match f {
            Formula::Atom(a) => {
                let mut s = WorldSet::with_capacity(n);
                for w in 0..n {
                    if self.val[w].contains(a) {
                        s.insert(w);
                    }
                }
                s
            }
            Formula::Bottom => WorldSet::with_capacity(n),
            Formula::Neg(g) => {
                let mut s = self.truth_set(g);
                s.toggle_range(..);
                s
            }
            Formula::And(l, r) => {
                let mut s = self.truth_set(l);
                s.intersect_with(&self.truth_set(r));
                s
            }
            Formula::Or(l, r) => {
                let mut s = self.truth_set(l);
                s.union_with(&self.truth_set(r));
                s
            }
            Formula::Imp(l, r) => {
                let mut s = self.truth_set(l);
                s.toggle_range(..);
                s.union_with(&self.truth_set(r));
                s
            }
            Formula::Box(g) => {
                let inner = self.truth_set(g);
                let mut s = WorldSet::with_capacity(n);
                for w in 0..n {
                    if self.acc[w].is_subset(&inner) {
                        s.insert(w);
                    }
                }
                s
            }
            Formula::Obl(body, cond) => {
                let tb = self.truth_set(body);
                let tc = self.truth_set(cond);
                let mut s = WorldSet::with_capacity(n);
                for w in 0..n {
                    let mut x = tb.clone();
                    x.intersect_with(&self.acc[w]);
                    let mut y = tc.clone();
                    y.intersect_with(&self.acc[w]);
                    if self.in_neighbourhood(w, &x, &y) {
                        s.insert(w);
                    }
                }
                s
            }
        }
    }

    /// Atoms of `f` that no world's valuation mentions.
    pub fn unknown_atoms(&self, f: &Formula) -> Vec<String> {
        let mut atoms = BTreeSet::new();
        f.atoms_into(&mut atoms);
        atoms
            .into_iter()
            .filter(|a| !self.val.iter().any(|v| v.contains(a)))
            .map(|a| a.to_string())
            .collect()
    }

    pub fn holds_at(&self, w: usize, f: &Formula) -> bool {
        self.truth_set(f).contains(w)
    }

    pub fn holds(&self, world: &str, f: &Formula) -> Result<bool, ModelError> {
        let w = self.world(world)?;
        Ok(self.holds_at(w, f))
    }

    /// Truth of the sequent's interpretation at a world.
    pub fn check_sequent_at(&self, world: &str, s: &Sequent) -> Result<bool, ModelError> {
        self.holds(world, &interpretation(s))
    }

    pub fn is_valid(&self, f: &Formula) -> bool {
        self.truth_set(f) == self.full()
    }
}

/// Model JSON: `{worlds, acc: [[w, v]], eta: {w: [{base, cond}]}, val: {w: [atoms]}}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModelJson {
    pub worlds: Vec<String>,
    #[serde(default)]
    pub acc: Vec<(String, String)>,
    #[serde(default)]
    pub eta: BTreeMap<String, Vec<GeneratorJson>>,
    #[serde(default)]
    pub val: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeneratorJson {
    pub base: Vec<String>,
    pub cond: Vec<String>,
}

impl ModelJson {
    pub fn into_model(self) -> Result<MModel, ModelError> {
        let eta = self
            .eta
            .into_iter()
            .map(|(w, gs)| (w, gs.into_iter().map(|g| (g.base, g.cond)).collect()))
            .collect();
        MModel::new(self.worlds, &self.acc, &eta, &self.val)
    }
}

impl From<&MModel> for ModelJson {
    fn from(m: &MModel) -> Self {
        let mut acc = Vec::new();
        let mut eta = BTreeMap::new();
        let mut val = BTreeMap::new();
        for w in 0..m.len() {
            for v in m.acc[w].ones() {
                acc.push((m.names[w].clone(), m.names[v].clone()));
            }
            if !m.nbhd[w].is_empty() {
                eta.insert(
                    m.names[w].clone(),
                    m.nbhd[w]
                        .iter()
                        .map(|g| GeneratorJson {
                            base: m.names_of(&g.base),
                            cond: m.names_of(&g.cond),
                        })
                        .collect(),
                );
            }
            if !m.val[w].is_empty() {
                val.insert(m.names[w].clone(), m.val[w].iter().map(|a| a.to_string()).collect());
            }
        }
        ModelJson {
            worlds: m.names.clone(),
            acc,
            eta,
            val,
        }
    }
}

impl MModel {
    pub fn from_json_str(text: &str) -> Result<MModel, ModelError> {
        let j: ModelJson = serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))?;
        j.into_model()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ModelJson::from(self)).expect("model serializes")
    }

    /// Replaces the neighbourhoods by generators read off explicit pair
    /// lists: per condition, the minimal first components. Fails with a
    /// condition-3 violation when the list is not upward closed below
    /// `R[w]` (checked by enumeration, so keep `R[w]` small).
    pub fn set_extensional_neighbourhoods(
        &mut self,
        pairs: &BTreeMap<String, Vec<(Vec<String>, Vec<String>)>>,
    ) -> Result<Result<(), FrameViolation>, ModelError> {
        let n = self.len();
        for (w, list) in pairs {
            let wi = self.world(w)?;
            let mut explicit: Vec<(WorldSet, WorldSet)> = Vec::new();
            for (x, y) in list {
                let mut xs = WorldSet::with_capacity(n);
                for a in x {
                    xs.insert(self.world(a)?);
                }
                let mut ys = WorldSet::with_capacity(n);
                for a in y {
                    ys.insert(self.world(a)?);
                }
                if !explicit.contains(&(xs.clone(), ys.clone())) {
                    explicit.push((xs, ys));
                }
            }
            let mut gens: Vec<Generator> = Vec::new();
            for (x, y) in &explicit {
                let dominated = explicit
                    .iter()
                    .any(|(x2, y2)| y2 == y && x2 != x && x2.is_subset(x));
                if !dominated {
                    gens.push(Generator {
                        base: x.clone(),
                        cond: y.clone(),
                    });
                }
            }
            let r = self.acc[wi].clone();
            for g in &gens {
                let free: Vec<usize> = r.difference(&g.base).collect();
                if free.len() > 20 {
                    return Err(ModelError::Malformed(format!(
                        "extensional neighbourhood at {w} too large to check"
                    )));
                }
                for mask in 0u64..(1u64 << free.len()) {
                    let mut x = g.base.clone();
                    for (bit, &v) in free.iter().enumerate() {
                        if mask >> bit & 1 == 1 {
                            x.insert(v);
                        }
                    }
                    if !explicit.iter().any(|(x2, y2)| *x2 == x && *y2 == g.cond) {
                        return Ok(Err(FrameViolation::NotUpwardClosed {
                            world: w.clone(),
                            x: self.names_of(&x),
                            y: self.names_of(&g.cond),
                        }));
                    }
                }
            }
            self.nbhd[wi] = gens;
        }
        Ok(Ok(()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn names(ws: &[&str]) -> Vec<String> {
        ws.iter().map(|s| s.to_string()).collect()
    }

    fn single_world(gens: Vec<(Vec<String>, Vec<String>)>) -> MModel {
        let eta = BTreeMap::from([("w".to_string(), gens)]);
        MModel::new(
            names(&["w"]),
            &[("w".into(), "w".into())],
            &eta,
            &BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn empty_base_violates_condition_four() {
        let m = single_world(vec![(vec![], names(&["w"]))]);
        assert_eq!(m.validate_frame().unwrap_err().condition(), 4);
    }

    #[test]
    fn disjoint_bases_with_same_condition_violate_condition_five() {
        let all = names(&["a", "b", "c"]);
        let acc: Vec<(String, String)> = all
            .iter()
            .flat_map(|w| all.iter().map(move |v| (w.clone(), v.clone())))
            .collect();
        let eta = BTreeMap::from([(
            "a".to_string(),
            vec![(names(&["a"]), names(&["c"])), (names(&["b"]), names(&["c"]))],
        )]);
        let m = MModel::new(all.clone(), &acc, &eta, &BTreeMap::new()).unwrap();
        let v = m.validate_frame().unwrap_err();
        assert_eq!(v.condition(), 5);
        // Brute force: find X with (X, C) and (R[a] \ X, C) both denoted.
        let w = m.world("a").unwrap();
        let r = m.accessible(w).clone();
        let mut c = WorldSet::with_capacity(3);
        c.insert(m.world("c").unwrap());
        let mut witnesses = 0;
        for mask in 0u32..8 {
            let mut x = WorldSet::with_capacity(3);
            for i in 0..3 {
                if mask >> i & 1 == 1 {
                    x.insert(i);
                }
            }
            let mut comp = r.clone();
            comp.difference_with(&x);
            if m.in_neighbourhood(w, &x, &c) && m.in_neighbourhood(w, &comp, &c) {
                witnesses += 1;
            }
        }
        assert!(witnesses > 0);
        let FrameViolation::Complement { x, .. } = v else { panic!() };
        assert_eq!(x, names(&["a", "c"]));
    }

    #[test]
    fn reflexivity_and_transitivity() {
        let m = MModel::new(
            names(&["a", "b"]),
            &[("a".into(), "b".into())],
            &BTreeMap::new(),
            &BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(m.validate_frame().unwrap_err().condition(), 1);
        let mut m = m;
        m.close_reflexive_transitive();
        assert_eq!(m.validate_frame(), Ok(()));
        assert!(!m.accessible(1).contains(0));
    }

    #[test]
    fn connectives_and_unknown_atoms() {
        let m = single_world(vec![(names(&["w"]), names(&["w"]))]);
        let bot = Formula::Bottom;
        assert!(m.truth_set(&bot).is_clear());
        assert!(m.is_valid(&parse_formula("true").unwrap()));
        assert!(m.holds("w", &parse_formula("O(true / true)").unwrap()).unwrap());
        assert!(!m.holds("w", &parse_formula("O(false / true)").unwrap()).unwrap());
        let f = parse_formula("~q").unwrap();
        assert!(m.holds("w", &f).unwrap());
        assert_eq!(m.unknown_atoms(&f), vec!["q".to_string()]);
        assert_eq!(m.holds("nope", &f), Err(ModelError::UnknownWorld("nope".into())));
    }

    #[test]
    fn extensional_import() {
        let mut m = single_world(vec![]);
        let ok = BTreeMap::from([("w".to_string(), vec![(names(&["w"]), names(&["w"]))])]);
        assert_eq!(m.set_extensional_neighbourhoods(&ok).unwrap(), Ok(()));
        assert_eq!(m.generators(0).len(), 1);

        let all = names(&["a", "b"]);
        let acc: Vec<(String, String)> = all
            .iter()
            .flat_map(|w| all.iter().map(move |v| (w.clone(), v.clone())))
            .collect();
        let mut m = MModel::new(all, &acc, &BTreeMap::new(), &BTreeMap::new()).unwrap();
        let missing = BTreeMap::from([("a".to_string(), vec![(names(&["a"]), names(&["a"]))])]);
        let r = m.set_extensional_neighbourhoods(&missing).unwrap();
        assert_eq!(r.unwrap_err().condition(), 3);
        let closed = BTreeMap::from([(
            "a".to_string(),
            vec![
                (names(&["a"]), names(&["a"])),
                (names(&["a", "b"]), names(&["a"])),
            ],
        )]);
        assert_eq!(m.set_extensional_neighbourhoods(&closed).unwrap(), Ok(()));
        assert_eq!(m.generators(0).len(), 1);
    }

    #[test]
    fn json_round_trip() {
        let m = single_world(vec![(names(&["w"]), names(&["w"]))]);
        let text = m.to_json().to_string();
        let back = MModel::from_json_str(&text).unwrap();
        assert_eq!(ModelJson::from(&back), ModelJson::from(&m));
    }
}
