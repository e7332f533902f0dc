//! Countermodels from rejecting search runs.
//!
//! Worlds are the *states* of the run: rejected nodes at which no
//! two-premiss static application remains. A rejected node that still has
//! such applications is represented by the state reached by repeatedly
//! following the failed premiss of its first one. A state's successors are
//! the states representing the failed premiss of each transitional
//! application, where a loop-rejected premiss points back at the ancestor
//! that subsumed it. Valuation, accessibility and neighbourhoods are then
//! read off the sequents of the states.
//!
//! The obligation clause needs every state accessible from a state with
//! `O(φ/ψ)` in its antecedent to contain `ψ` on one side. When the run
//! leaves such a condition open the search is repeated, splitting on the
//! open conditions, until none remain.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::calculus::RuleClass;
use crate::formula::{Formula, Sequent, SetSequent};
use crate::search::{search_splitting, History, PremissOutcome, SearchConfig, SearchError, SearchNode, SearchTree, Verdict};
use crate::semantics::{FrameViolation, Generator, MModel, WorldSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Side {
    Ante,
    Succ,
}

/// A formula whose truth value disagrees with the side it sits on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditFailure {
    pub world: String,
    pub formula: Formula,
    pub side: Side,
}

impl fmt::Display for AuditFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (side, value) = match self.side {
            Side::Ante => ("antecedent", "false"),
            Side::Succ => ("succedent", "true"),
        };
        write!(f, "{} in the {side} of {} is {value} there", self.formula, self.world)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub frame: Result<(), FrameViolation>,
    pub audit: Result<(), AuditFailure>,
    /// `check_sequent_at(model, root, goal)`; a countermodel needs `false`.
    pub goal_holds_at_root: bool,
}

impl Certificate {
    pub fn certified(&self) -> bool {
        self.frame.is_ok() && self.audit.is_ok() && !self.goal_holds_at_root
    }
}

#[derive(Clone, Debug)]
pub struct WorldRecord {
    pub id: String,
    /// History of the state node, root first.
    pub history: Vec<SetSequent>,
}

impl WorldRecord {
    pub fn sequent(&self) -> &SetSequent {
        self.history.last().expect("histories are nonempty")
    }
}

#[derive(Clone, Debug)]
pub struct CounterModelResult {
    pub model: MModel,
    pub root: String,
    pub goal: Sequent,
    /// Indexed like the model's worlds.
    pub worlds: Vec<WorldRecord>,
    pub certificate: Certificate,
    /// Conditions the final run split on; empty when the given run was used
    /// as is.
    pub splits: BTreeSet<Formula>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CountermodelError {
    #[error("the search accepted the sequent; there is no countermodel")]
    Accepted,
    #[error("the run starts from a nonempty history prefix")]
    Prefixed,
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("internal error: {0}")]
    Internal(String),
}

type Path<'a> = Vec<&'a SearchNode>;

fn failed_premiss(outcomes: &[PremissOutcome]) -> Option<&PremissOutcome> {
    outcomes.iter().find(|p| !p.accepted() && !matches!(p, PremissOutcome::Skipped))
}

/// Follows first static attempts down to a state.
fn state_of(mut path: Path<'_>) -> Result<Path<'_>, CountermodelError> {
    loop {
        let node = *path.last().expect("paths are nonempty");
        let first_static = node
            .attempts
            .iter()
            .find(|a| a.application.rule.class() != RuleClass::Transitional);
        let Some(attempt) = first_static else {
            return Ok(path);
        };
        match failed_premiss(&attempt.premisses) {
            Some(PremissOutcome::Explored(child)) => path.push(child),
            _ => {
                return Err(CountermodelError::Internal(
                    "static application without an explored failed premiss".into(),
                ))
            }
        }
    }
}

fn world_id(history: &[SetSequent]) -> String {
    let mut h = Sha256::new();
    for s in history {
        h.update(s.to_string().as_bytes());
        h.update(b"\n");
    }
    let digest = h.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("h{}", &hex[..8])
}

fn closure(edges: &[Vec<usize>]) -> Vec<WorldSet> {
    let n = edges.len();
    let mut acc = vec![WorldSet::with_capacity(n); n];
    for (w, targets) in edges.iter().enumerate() {
        acc[w].insert(w);
        for &v in targets {
            acc[w].insert(v);
        }
    }
    for k in 0..n {
        let row = acc[k].clone();
        for w in 0..n {
            if acc[w].contains(k) {
                acc[w].union_with(&row);
            }
        }
    }
    acc
}

/// Conditions of antecedent obligations left open at an accessible state.
fn open_conditions(sk: &Skeleton, acc: &[WorldSet]) -> BTreeSet<Formula> {
    let states: Vec<&SetSequent> = sk.histories.iter().map(|h| h.last().expect("nonempty")).collect();
    let mut out = BTreeSet::new();
    for (w, s) in states.iter().enumerate() {
        for f in &s.ante {
            if let Formula::Obl(_, c) = f {
                if acc[w]
                    .ones()
                    .any(|v| !states[v].ante.contains(&**c) && !states[v].succ.contains(&**c))
                {
                    out.insert((**c).clone());
                }
            }
        }
    }
    out
}

struct Skeleton {
    histories: Vec<Vec<SetSequent>>,
    edges: Vec<Vec<usize>>,
}

fn skeleton<'a>(tree: &'a SearchTree) -> Result<Skeleton, CountermodelError> {
    let mut index: HashMap<Vec<SetSequent>, usize> = HashMap::new();
    let mut paths: Vec<Path<'a>> = Vec::new();
    let mut histories = Vec::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut intern = |path: Path<'a>,
                      paths: &mut Vec<Path<'a>>,
                      histories: &mut Vec<Vec<SetSequent>>,
                      edges: &mut Vec<Vec<usize>>|
     -> usize {
        let history: Vec<SetSequent> = path.iter().map(|n| n.sequent.clone()).collect();
        *index.entry(history.clone()).or_insert_with(|| {
            paths.push(path);
            histories.push(history);
            edges.push(Vec::new());
            paths.len() - 1
        })
    };
    let root = state_of(vec![&tree.root])?;
    intern(root, &mut paths, &mut histories, &mut edges);
    let mut next = 0;
    while next < paths.len() {
        let path = paths[next].clone();
        let node = *path.last().expect("paths are nonempty");
        for attempt in &node.attempts {
            if attempt.application.rule.class() != RuleClass::Transitional {
                continue;
            }
            let target = match failed_premiss(&attempt.premisses) {
                Some(PremissOutcome::Explored(child)) => {
                    let mut p = path.clone();
                    p.push(child);
                    p
                }
                Some(PremissOutcome::LoopRejected { ancestor_len }) => path[..*ancestor_len].to_vec(),
                _ => {
                    return Err(CountermodelError::Internal(
                        "transitional application without a failed premiss".into(),
                    ))
                }
            };
            let w = intern(state_of(target)?, &mut paths, &mut histories, &mut edges);
            if !edges[next].contains(&w) {
                edges[next].push(w);
            }
        }
        next += 1;
    }
    Ok(Skeleton { histories, edges })
}

fn assemble(goal: Sequent, splits: BTreeSet<Formula>, sk: Skeleton, acc: Vec<WorldSet>) -> CounterModelResult {
    let n = sk.histories.len();
    let states: Vec<&SetSequent> = sk.histories.iter().map(|h| h.last().expect("nonempty")).collect();
    let mut ids: Vec<String> = Vec::with_capacity(n);
    for h in &sk.histories {
        let base = world_id(h);
        let mut id = base.clone();
        let mut k = 1;
        while ids.contains(&id) {
            k += 1;
            id = format!("{base}-{k}");
        }
        ids.push(id);
    }
    let val = states
        .iter()
        .map(|s| {
            s.ante
                .iter()
                .filter_map(|f| match f {
                    Formula::Atom(a) => Some(a.clone()),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let syntactic = |f: &Formula| {
        let mut s = WorldSet::with_capacity(n);
        for (w, st) in states.iter().enumerate() {
            if st.ante.contains(f) {
                s.insert(w);
            }
        }
        s
    };
    let mut nbhd = vec![Vec::new(); n];
    for (w, st) in states.iter().enumerate() {
        let r = &acc[w];
        for f in &st.ante {
            if let Formula::Obl(body, cond) = f {
                let mut base = syntactic(body);
                base.intersect_with(r);
                let mut c = syntactic(cond);
                c.intersect_with(r);
                let g = Generator { base, cond: c };
                if !nbhd[w].contains(&g) {
                    nbhd[w].push(g);
                }
            }
        }
    }
    let model = MModel::from_parts(ids.clone(), acc, nbhd, val);
    let worlds: Vec<WorldRecord> = ids
        .iter()
        .zip(sk.histories)
        .map(|(id, history)| WorldRecord { id: id.clone(), history })
        .collect();
    let mut result = CounterModelResult {
        root: ids[0].clone(),
        model,
        goal,
        worlds,
        certificate: Certificate {
            frame: Ok(()),
            audit: Ok(()),
            goal_holds_at_root: true,
        },
        splits,
    };
    result.certificate = certify(&result);
    result
}

fn certify(r: &CounterModelResult) -> Certificate {
    Certificate {
        frame: r.model.validate_frame(),
        audit: truth_lemma_audit(r),
        goal_holds_at_root: r
            .model
            .check_sequent_at(&r.root, &r.goal)
            .expect("root is a world of the model"),
    }
}

/// Checks that every state's antecedent formulas hold at it and every
/// succedent formula fails, reporting the first violation.
pub fn truth_lemma_audit(r: &CounterModelResult) -> Result<(), AuditFailure> {
    for (w, rec) in r.worlds.iter().enumerate() {
        let s = rec.sequent();
        for f in &s.ante {
            if !r.model.holds_at(w, f) {
                return Err(AuditFailure {
                    world: rec.id.clone(),
                    formula: f.clone(),
                    side: Side::Ante,
                });
            }
        }
        for f in &s.succ {
            if r.model.holds_at(w, f) {
                return Err(AuditFailure {
                    world: rec.id.clone(),
                    formula: f.clone(),
                    side: Side::Succ,
                });
            }
        }
    }
    Ok(())
}

/// Builds and certifies a countermodel from a rejecting run. Succeeds only
/// with a certified model; anything else is reported as an error.
pub fn build(tree: &SearchTree) -> Result<CounterModelResult, CountermodelError> {
    if tree.root.accepted {
        return Err(CountermodelError::Accepted);
    }
    if !tree.prefix.is_empty() {
        return Err(CountermodelError::Prefixed);
    }
    let goal = tree.root.input.to_sequent();
    let config = SearchConfig {
        static_loop_check: false,
        ..tree.config
    };
    let mut rerun: Option<SearchTree> = None;
    let mut splits = tree.splits.clone();
    if tree.config.static_loop_check {
        rerun = Some(rerun_search(tree, config, splits.clone())?);
    }
    loop {
        let current = rerun.as_ref().unwrap_or(tree);
        let sk = skeleton(current)?;
        let acc = closure(&sk.edges);
        let open = open_conditions(&sk, &acc);
        if open.is_empty() {
            let used = if rerun.is_some() { splits } else { BTreeSet::new() };
            return finish(assemble(goal, used, sk, acc));
        }
        let before = splits.len();
        splits.extend(open);
        if splits.len() == before {
            return Err(CountermodelError::Internal("split conditions remain open".into()));
        }
        rerun = Some(rerun_search(tree, config, splits.clone())?);
    }
}

fn rerun_search(tree: &SearchTree, config: SearchConfig, splits: BTreeSet<Formula>) -> Result<SearchTree, CountermodelError> {
    let out = search_splitting(&History::singleton(tree.root.input.clone()), config, splits)?;
    if out.verdict == Verdict::Accepted {
        return Err(CountermodelError::Internal(
            "a run with splits accepted a rejected sequent".into(),
        ));
    }
    Ok(out.trace)
}

fn finish(r: CounterModelResult) -> Result<CounterModelResult, CountermodelError> {
    let c = &r.certificate;
    if let Err(v) = &c.frame {
        return Err(CountermodelError::Internal(format!("constructed frame invalid: {v}")));
    }
    if let Err(a) = &c.audit {
        return Err(CountermodelError::Internal(format!("truth lemma fails: {a}")));
    }
    if c.goal_holds_at_root {
        return Err(CountermodelError::Internal("goal holds at the root".into()));
    }
    Ok(r)
}

impl CounterModelResult {
    /// Model JSON extended with `root`, `goal`, `certified` and a
    /// `histories` table mapping world ids to their sequent lists.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.model.to_json();
        let histories: BTreeMap<&str, Vec<String>> = self
            .worlds
            .iter()
            .map(|w| (w.id.as_str(), w.history.iter().map(|s| s.to_string()).collect()))
            .collect();
        let obj = v.as_object_mut().expect("model JSON is an object");
        obj.insert("root".into(), json!(self.root));
        obj.insert("goal".into(), json!(self.goal.to_string()));
        obj.insert("certified".into(), json!(self.certificate.certified()));
        obj.insert("histories".into(), json!(histories));
        v
    }

    /// Adjacency list and generator table.
    pub fn render(&self) -> String {
        let m = &self.model;
        let mut out = format!("root {}\ngoal {}\n", self.root, self.goal);
        for w in 0..m.len() {
            let atoms: Vec<&str> = m.valuation(w).iter().map(|a| &**a).collect();
            out.push_str(&format!(
                "{}  val {{{}}}  R -> {}\n",
                m.name(w),
                atoms.join(", "),
                m.names_of(m.accessible(w)).join(" ")
            ));
            for g in m.generators(w) {
                out.push_str(&format!(
                    "    eta base {{{}}} cond {{{}}}\n",
                    m.names_of(&g.base).join(", "),
                    m.names_of(&g.cond).join(", ")
                ));
            }
        }
        out
    }
}
