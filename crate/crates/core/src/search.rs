//! Backward proof search with history-based loop checking.
//!
//! A history is the list of (saturated) sequents on the current branch. The
//! search saturates the last sequent under the one-premiss static rules,
//! closes it if it is initial, and otherwise tries every two-premiss static
//! application followed by every transitional one. Premisses of
//! transitional applications that are subsumed by some sequent already on
//! the history are rejected without recursion; this is what makes the
//! search terminate even though boxed formulas are copied upwards forever.

use std::collections::BTreeSet;

use crate::calculus::{self, CalculusConfig, RuleApplication, RuleClass, RuleId};
use crate::derivation::{schema_premisses, Derivation};
use crate::formula::{to_set_sequent, Formula, Sequent, SetSequent};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of visited histories before giving up.
    pub budget: usize,
    pub calculus: CalculusConfig,
    /// Also loop-check premisses of two-premiss static rules.
    pub static_loop_check: bool,
    /// Try every two-premiss static application and then every transitional
    /// one, even after a static application has failed. Off by default:
    /// static rules are invertible, so the first failed static application
    /// already refutes the node and only nodes without static applications
    /// need transitional attempts. Verdicts are the same either way.
    pub exhaustive_static: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: DEFAULT_BUDGET,
            calculus: CalculusConfig::default(),
            static_loop_check: false,
            exhaustive_static: false,
        }
    }
}

impl SearchConfig {
    pub fn with_budget(budget: usize) -> SearchConfig {
        SearchConfig {
            budget,
            ..SearchConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("search budget of {budget} histories exhausted; verdict inconclusive")]
    BudgetExhausted { budget: usize },
}

/// A list of set-based sequents; the last entry is the current sequent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct History {
    entries: Vec<SetSequent>,
}

impl History {
    pub fn new(entries: Vec<SetSequent>) -> Option<History> {
        if entries.is_empty() {
            None
        } else {
            Some(History { entries })
        }
    }

    pub fn singleton(s: SetSequent) -> History {
        History { entries: vec![s] }
    }

    pub fn entries(&self) -> &[SetSequent] {
        &self.entries
    }

    pub fn last(&self) -> &SetSequent {
        self.entries.last().expect("histories are nonempty")
    }

    /// `self ⊑ other`: `self` is a prefix of `other`.
    pub fn is_prefix_of(&self, other: &History) -> bool {
        self.entries.len() <= other.entries.len()
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a == b)
    }

    pub fn extended(&self, s: SetSequent) -> History {
        let mut entries = self.entries.clone();
        entries.push(s);
        History { entries }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationStep {
    pub rule: RuleId,
    pub principal: Formula,
}

#[derive(Clone, Debug)]
pub enum PremissOutcome {
    Explored(Box<SearchNode>),
    /// Subsumed by the last sequent of the history prefix of this length.
    LoopRejected { ancestor_len: usize },
    /// Not visited because an earlier premiss of the application failed.
    Skipped,
}

impl PremissOutcome {
    pub fn accepted(&self) -> bool {
        matches!(self, PremissOutcome::Explored(n) if n.accepted)
    }
}

#[derive(Clone, Debug)]
pub struct Attempt {
    pub application: RuleApplication,
    pub premisses: Vec<PremissOutcome>,
    pub accepted: bool,
}

/// One visited history. `input` is the sequent the history was extended
/// with; `sequent` is its saturation, which replaces it on the history.
#[derive(Clone, Debug)]
pub struct SearchNode {
    pub input: SetSequent,
    pub steps: Vec<SaturationStep>,
    pub sequent: SetSequent,
    pub accepted: bool,
    pub closure: Option<RuleApplication>,
    /// Applications in the order tried; an accepted node ends with its
    /// single accepted attempt.
    pub attempts: Vec<Attempt>,
}

impl SearchNode {
    pub fn accepted_attempt(&self) -> Option<&Attempt> {
        self.attempts.iter().find(|a| a.accepted)
    }

    pub fn count(&self) -> usize {
        1 + self
            .attempts
            .iter()
            .flat_map(|a| &a.premisses)
            .map(|p| match p {
                PremissOutcome::Explored(n) => n.count(),
                _ => 0,
            })
            .sum::<usize>()
    }
}

#[derive(Clone, Debug)]
pub struct SearchTree {
    /// History entries preceding the root node (empty for a fresh search).
    pub prefix: Vec<SetSequent>,
    pub root: SearchNode,
    pub visited: usize,
    pub config: SearchConfig,
    /// Formulas every state was split on; see [`search_splitting`].
    pub splits: BTreeSet<Formula>,
}

impl SearchTree {
    pub fn accepted(&self) -> bool {
        self.root.accepted
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    pub trace: SearchTree,
}

/// Closes `s` under the one-premiss static rules, recording each step.
pub fn saturate_with_steps(s: &SetSequent) -> (SetSequent, Vec<SaturationStep>) {
    let mut current = s.clone();
    let mut steps = Vec::new();
    while let Some(app) = calculus::static_one(&current).into_iter().next() {
        steps.push(SaturationStep {
            rule: app.rule,
            principal: app.principal[0].clone(),
        });
        current = app.premisses.into_iter().next().expect("one premiss");
    }
    (current, steps)
}

/// Least superset of `s` closed under backward NegL, NegR, AndL, OrR, ImpR
/// and T.
pub fn saturate(s: &SetSequent) -> SetSequent {
    saturate_with_steps(s).0
}

fn splits_of(s: &SetSequent, splits: &BTreeSet<Formula>) -> Vec<RuleApplication> {
    splits
        .iter()
        .filter(|c| !s.ante.contains(*c) && !s.succ.contains(*c))
        .map(|c| {
            let mut left = s.clone();
            left.succ.insert(c.clone());
            let mut right = s.clone();
            right.ante.insert(c.clone());
            RuleApplication {
                rule: RuleId::Cut,
                principal: vec![c.clone()],
                premisses: vec![left, right],
            }
        })
        .collect()
}

struct Searcher {
    config: SearchConfig,
    splits: BTreeSet<Formula>,
    visited: usize,
    history: Vec<SetSequent>,
}

impl Searcher {
    fn loop_witness(&self, premiss: &SetSequent) -> Option<usize> {
        self.history
            .iter()
            .position(|h| premiss.subsumed_by(h))
            .map(|i| i + 1)
    }

    fn try_application(
        &mut self,
        app: RuleApplication,
        loop_check: bool,
    ) -> Result<Attempt, SearchError> {
        let mut premisses = Vec::with_capacity(app.premisses.len());
        let mut failed = false;
        for p in &app.premisses {
            if failed {
                premisses.push(PremissOutcome::Skipped);
                continue;
            }
            if loop_check {
                if let Some(ancestor_len) = self.loop_witness(p) {
                    premisses.push(PremissOutcome::LoopRejected { ancestor_len });
                    failed = true;
                    continue;
                }
            }
            let child = self.visit(p.clone())?;
            failed = !child.accepted;
            premisses.push(PremissOutcome::Explored(Box::new(child)));
        }
        Ok(Attempt {
            application: app,
            premisses,
            accepted: !failed,
        })
    }

    fn visit(&mut self, input: SetSequent) -> Result<SearchNode, SearchError> {
        self.visited += 1;
        if self.visited > self.config.budget {
            return Err(SearchError::BudgetExhausted {
                budget: self.config.budget,
            });
        }
        let (sequent, steps) = saturate_with_steps(&input);
        let mut node = SearchNode {
            input,
            steps,
            sequent,
            accepted: false,
            closure: None,
            attempts: Vec::new(),
        };
        if let Some(closure) = calculus::initial_closure(&node.sequent, self.config.calculus) {
            node.closure = Some(closure);
            node.accepted = true;
            return Ok(node);
        }
        self.history.push(node.sequent.clone());
        let result = self.expand(&mut node);
        self.history.pop();
        result.map(|()| node)
    }

    fn expand(&mut self, node: &mut SearchNode) -> Result<(), SearchError> {
        let mut statics = calculus::static_two(&node.sequent);
        statics.extend(splits_of(&node.sequent, &self.splits));
        for app in statics {
            let attempt = self.try_application(app, self.config.static_loop_check)?;
            let accepted = attempt.accepted;
            node.attempts.push(attempt);
            if accepted {
                node.accepted = true;
                return Ok(());
            }
            if !self.config.exhaustive_static {
                return Ok(());
            }
        }
        for app in calculus::transitional(&node.sequent) {
            let attempt = self.try_application(app, true)?;
            let accepted = attempt.accepted;
            node.attempts.push(attempt);
            if accepted {
                node.accepted = true;
                return Ok(());
            }
        }
        Ok(())
    }
}

// Deep branches recurse once per history entry; run on a roomy stack.
const SEARCH_STACK: usize = 256 * 1024 * 1024;

/// Runs the search on a history. The last entry is the sequent to decide;
/// earlier entries only take part in loop checking.
pub fn search(history: &History, config: SearchConfig) -> Result<SearchOutcome, SearchError> {
    search_splitting(history, config, BTreeSet::new())
}

/// Like [`search`], but every node that contains none of `ψ` on either
/// side is additionally split into `Γ ⊢ Δ, ψ` and `ψ, Γ ⊢ Δ`, for each `ψ`
/// in `splits`, as a further two-premiss static application. Sound (the
/// split is a cut), so verdicts do not change; rejecting runs then decide
/// every split formula at every state, which the countermodel builder
/// needs for obligation conditions.
pub fn search_splitting(
    history: &History,
    config: SearchConfig,
    splits: BTreeSet<Formula>,
) -> Result<SearchOutcome, SearchError> {
    let prefix = history.entries[..history.entries.len() - 1].to_vec();
    let input = history.last().clone();
    let run = move || {
        let mut searcher = Searcher {
            config,
            splits,
            visited: 0,
            history: prefix.clone(),
        };
        let root = searcher.visit(input)?;
        let verdict = if root.accepted {
            Verdict::Accepted
        } else {
            Verdict::Rejected
        };
        Ok(SearchOutcome {
            verdict,
            trace: SearchTree {
                prefix,
                root,
                visited: searcher.visited,
                config,
                splits: searcher.splits,
            },
        })
    };
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(SEARCH_STACK)
            .spawn_scoped(scope, run)
            .expect("spawn search thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

#[derive(Clone, Debug)]
pub enum ProveOutcome {
    Accepted { derivation: Derivation, trace: SearchTree },
    Rejected(SearchTree),
}

impl ProveOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, ProveOutcome::Accepted { .. })
    }

    pub fn trace(&self) -> &SearchTree {
        match self {
            ProveOutcome::Accepted { trace, .. } => trace,
            ProveOutcome::Rejected(trace) => trace,
        }
    }
}

/// Decides a multiset sequent; an accepted run is turned into a derivation
/// that uses the multiset rules plus weakening where set-based premisses
/// dropped duplicate occurrences.
pub fn prove(s: &Sequent, config: SearchConfig) -> Result<ProveOutcome, SearchError> {
    let outcome = search(&History::singleton(to_set_sequent(s)), config)?;
    let trace = outcome.trace;
    if trace.root.accepted {
        let derivation = weaken_to(s, derive(&trace.root));
        Ok(ProveOutcome::Accepted { derivation, trace })
    } else {
        Ok(ProveOutcome::Rejected(trace))
    }
}

/// Covers the duplicate occurrences in `target` with explicit weakening
/// over a derivation of its deduplicated form.
pub fn weaken_to(target: &Sequent, d: Derivation) -> Derivation {
    let extras = |side: &[Formula], have: &[Formula]| -> Vec<Formula> {
        let mut rest = have.to_vec();
        let mut out = Vec::new();
        for f in side {
            match rest.iter().position(|g| g == f) {
                Some(i) => {
                    rest.remove(i);
                }
                None => out.push(f.clone()),
            }
        }
        out
    };
    let extra_left = extras(&target.ante, &d.conclusion.ante);
    let extra_right = extras(&target.succ, &d.conclusion.succ);
    let mut d = d;
    if !extra_left.is_empty() {
        let conclusion = Sequent::new(
            d.conclusion.ante.iter().chain(&extra_left).cloned().collect(),
            d.conclusion.succ.clone(),
        );
        d = Derivation::node(conclusion, RuleId::WeakL, extra_left, vec![d]);
    }
    if !extra_right.is_empty() {
        let conclusion = Sequent::new(
            d.conclusion.ante.clone(),
            d.conclusion.succ.iter().chain(&extra_right).cloned().collect(),
        );
        d = Derivation::node(conclusion, RuleId::WeakR, extra_right, vec![d]);
    }
    d
}

/// Derivation of `node.input`, following the accepting choices.
fn derive(node: &SearchNode) -> Derivation {
    debug_assert!(node.accepted);
    derive_from(node, 0, node.input.to_sequent())
}

fn derive_from(node: &SearchNode, step: usize, conclusion: Sequent) -> Derivation {
    if let Some(s) = node.steps.get(step) {
        let premiss = schema_premisses(&conclusion, s.rule, std::slice::from_ref(&s.principal))
            .expect("saturation step matches its schema")
            .pop()
            .expect("one premiss");
        let next = to_set_sequent(&premiss).to_sequent();
        let child = derive_from(node, step + 1, next);
        return Derivation::node(conclusion, s.rule, vec![s.principal.clone()], vec![weaken_to(&premiss, child)]);
    }
    if let Some(closure) = &node.closure {
        return Derivation::leaf(conclusion, closure.rule, closure.principal.clone());
    }
    let attempt = node.accepted_attempt().expect("accepted node has an accepted attempt");
    let app = &attempt.application;
    debug_assert_ne!(app.rule, RuleId::Cut, "splits only occur in rejecting runs");
    debug_assert!(matches!(
        app.rule.class(),
        RuleClass::StaticTwo | RuleClass::Transitional
    ));
    let premisses =
        schema_premisses(&conclusion, app.rule, &app.principal).expect("application matches its schema");
    let children = premisses
        .iter()
        .zip(&attempt.premisses)
        .map(|(premiss, outcome)| {
            let PremissOutcome::Explored(child) = outcome else {
                unreachable!("accepted applications explore every premiss")
            };
            debug_assert_eq!(to_set_sequent(premiss), child.input);
            weaken_to(premiss, derive(child))
        })
        .collect();
    Derivation::node(conclusion, app.rule, app.principal.clone(), children)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::check_derivation;
    use crate::parser::parse_sequent;

    fn set(text: &str) -> SetSequent {
        to_set_sequent(&parse_sequent(text).unwrap())
    }

    fn accepts(text: &str) -> bool {
        prove(&parse_sequent(text).unwrap(), SearchConfig::default())
            .unwrap()
            .is_accepted()
    }

    #[test]
    fn saturation_examples() {
        assert_eq!(saturate(&set("p & q |-")), set("p & q, p, q |-"));
        assert_eq!(saturate(&set("[]p |-")), set("[]p, p |-"));
        assert_eq!(saturate(&set("|- p -> q")), set("p |- p -> q, q"));
    }

    #[test]
    fn saturation_is_order_independent() {
        let s = set("[](a & b), ~c |- d | ~e, f -> g");
        let mut reversed = s.clone();
        while let Some(app) = calculus::static_one(&reversed).pop() {
            reversed = app.premisses[0].clone();
        }
        assert_eq!(reversed, saturate(&s));
    }

    #[test]
    fn search_examples() {
        assert!(accepts("|- [](q -> ~p) -> ~(O(p/r) & O(q/r))"));
        assert!(!accepts("|- false"));
        assert!(accepts("p |- p"));
        assert!(!accepts("[](he -> hrm), [](sy -> he), []O(~hrm/true), []O(sy/dhe) |- false"));
        assert!(!accepts("|- O(p/q)"));
    }

    #[test]
    fn impossible_obligation_derivation_uses_d1() {
        let out = prove(&parse_sequent("|- O(bot/t) -> false").unwrap(), SearchConfig::default()).unwrap();
        let ProveOutcome::Accepted { derivation, .. } = out else {
            panic!("expected acceptance")
        };
        assert_eq!(check_derivation(&derivation, &[]), Ok(()));
        assert!(derivation.uses(RuleId::D1));
        assert!(derivation.uses(RuleId::BottomL));
    }

    #[test]
    fn duplicates_are_weakened_in() {
        let s = parse_sequent("p, p |- p, q").unwrap();
        let ProveOutcome::Accepted { derivation, .. } = prove(&s, SearchConfig::default()).unwrap() else {
            panic!()
        };
        assert_eq!(derivation.conclusion, s);
        assert_eq!(check_derivation(&derivation, &[]), Ok(()));
    }

    #[test]
    fn budget_exhaustion_is_not_rejection() {
        let s = parse_sequent("[](he -> hrm), [](sy -> he), []O(~hrm/true), []O(sy/dhe) |- false").unwrap();
        assert_eq!(
            prove(&s, SearchConfig::with_budget(3)).unwrap_err(),
            SearchError::BudgetExhausted { budget: 3 }
        );
    }

    #[test]
    fn loop_check_uses_any_prefix() {
        // T puts []p on the right; every Four premiss reintroduces it.
        let out = search(&History::singleton(set("[]~[]p |-")), SearchConfig::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Rejected);
        fn has_loop(n: &SearchNode) -> bool {
            n.attempts.iter().flat_map(|a| &a.premisses).any(|p| match p {
                PremissOutcome::LoopRejected { .. } => true,
                PremissOutcome::Explored(c) => has_loop(c),
                PremissOutcome::Skipped => false,
            })
        }
        assert!(has_loop(&out.trace.root));
    }

    #[test]
    fn history_prefix_order() {
        let a = History::singleton(set("p |-"));
        let b = a.extended(set("q |-"));
        assert!(a.is_prefix_of(&b));
        assert!(b.is_prefix_of(&b));
        assert!(!b.is_prefix_of(&a));
        assert!(History::new(vec![]).is_none());
    }

    #[test]
    fn prefixed_history_takes_part_in_loop_checks() {
        // The only Four premiss is subsumed by the prefix entry.
        let h = History::new(vec![set("[]p |- q"), set("[]p |- []q")]).unwrap();
        let out = search(&h, SearchConfig::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Rejected);
        let four = &out.trace.root.attempts[0];
        assert!(matches!(four.premisses[0], PremissOutcome::LoopRejected { ancestor_len: 1 }));
    }

    #[test]
    fn static_loop_check_agrees() {
        let cfg = SearchConfig {
            static_loop_check: true,
            ..SearchConfig::default()
        };
        for text in [
            "|- [](p -> q) -> ([]p -> []q)",
            "p | q, ~p |- q",
            "|- O(p/q)",
            "[](a -> b), O(a/c) |- O(b/c)",
        ] {
            let s = parse_sequent(text).unwrap();
            assert_eq!(
                prove(&s, cfg).unwrap().is_accepted(),
                prove(&s, SearchConfig::default()).unwrap().is_accepted(),
                "{text}"
            );
        }
    }

    #[test]
    fn exhaustive_static_agrees() {
        let cfg = SearchConfig {
            exhaustive_static: true,
            ..SearchConfig::default()
        };
        for text in [
            "|- [](p -> q) -> ([]p -> []q)",
            "p | q, p -> r |- r & q",
            "|- O(p/q) | O(~p/q)",
            "O(p/q), O(r/q) |- O(p & r/q), p | ~p",
        ] {
            let s = parse_sequent(text).unwrap();
            assert_eq!(
                prove(&s, cfg).unwrap().is_accepted(),
                prove(&s, SearchConfig::default()).unwrap().is_accepted(),
                "{text}"
            );
        }
    }
}
