//! Derivability from assumptions and outer consistency.
//!
//! A sequent follows from a set of assumptions `𝒜` exactly when
//! `□𝒜, Γ ⊢ Δ` is derivable without assumptions, so both questions reduce
//! to a single cut-free search.

use std::collections::BTreeSet;

use crate::calculus::RuleId;
use crate::countermodel::{build, CounterModelResult, CountermodelError};
use crate::derivation::Derivation;
use crate::formula::{Formula, Sequent};
use crate::search::{prove, ProveOutcome, SearchConfig, SearchError};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssumptionSet {
    formulas: BTreeSet<Formula>,
}

impl AssumptionSet {
    pub fn new<I: IntoIterator<Item = Formula>>(formulas: I) -> AssumptionSet {
        AssumptionSet {
            formulas: formulas.into_iter().collect(),
        }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.formulas.iter()
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn with(&self, f: Formula) -> AssumptionSet {
        let mut out = self.clone();
        out.formulas.insert(f);
        out
    }

    pub fn boxed(&self) -> Vec<Formula> {
        self.formulas.iter().cloned().map(Formula::boxed).collect()
    }

    /// The assumption sequents `⊢ φ`.
    pub fn sequents(&self) -> Vec<Sequent> {
        self.formulas
            .iter()
            .map(|f| Sequent::new(vec![], vec![f.clone()]))
            .collect()
    }

    /// `□𝒜, Γ ⊢ Δ`.
    pub fn reduce(&self, goal: &Sequent) -> Sequent {
        let mut ante = self.boxed();
        ante.extend(goal.ante.iter().cloned());
        Sequent::new(ante, goal.succ.clone())
    }
}

#[derive(Clone, Debug)]
pub enum Derivability {
    /// A derivation of `□𝒜, Γ ⊢ Δ`.
    Accepted(Derivation),
    /// A certified model whose root satisfies `□𝒜, Γ` and falsifies `Δ`.
    Rejected(Box<CounterModelResult>),
}

#[derive(Clone, Debug)]
pub enum Consistency {
    Consistent(Box<CounterModelResult>),
    /// A derivation of `□𝒜 ⊢ ⊥`.
    Inconsistent(Derivation),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConsistencyError {
    #[error(transparent)]
    Inconclusive(SearchError),
    #[error(transparent)]
    Countermodel(CountermodelError),
}

impl From<CountermodelError> for ConsistencyError {
    fn from(e: CountermodelError) -> Self {
        match e {
            CountermodelError::Search(s) => ConsistencyError::Inconclusive(s),
            other => ConsistencyError::Countermodel(other),
        }
    }
}

pub fn derives(a: &AssumptionSet, goal: &Sequent, config: SearchConfig) -> Result<Derivability, ConsistencyError> {
    let reduced = a.reduce(goal);
    match prove(&reduced, config).map_err(ConsistencyError::Inconclusive)? {
        ProveOutcome::Accepted { derivation, .. } => Ok(Derivability::Accepted(derivation)),
        ProveOutcome::Rejected(trace) => Ok(Derivability::Rejected(Box::new(build(&trace)?))),
    }
}

pub fn outer_consistent(a: &AssumptionSet, config: SearchConfig) -> Result<Consistency, ConsistencyError> {
    let falsum = Sequent::new(vec![], vec![Formula::Bottom]);
    Ok(match derives(a, &falsum, config)? {
        Derivability::Accepted(d) => Consistency::Inconsistent(d),
        Derivability::Rejected(m) => Consistency::Consistent(m),
    })
}

/// Turns a derivation of `□𝒜, Γ ⊢ Δ` into one of `Γ ⊢ Δ` from the
/// assumption sequents `⊢ φ`: each `□φ` is obtained by Four over the
/// assumption and cut away. Check the result with
/// `check_derivation(&d, &a.sequents())`.
pub fn from_assumptions(a: &AssumptionSet, goal: &Sequent, boxed: Derivation) -> Derivation {
    let mut current = boxed;
    let mut ante = a.reduce(goal).ante;
    for f in a.formulas() {
        let b = Formula::boxed(f.clone());
        let i = ante.iter().position(|g| *g == b).expect("boxed assumption present");
        ante.remove(i);
        let assumption = Derivation::assumption(Sequent::new(vec![], vec![f.clone()]), f.to_string());
        let lifted = Derivation::node(
            Sequent::new(vec![], vec![b.clone()]),
            RuleId::Four,
            vec![b.clone()],
            vec![assumption],
        );
        current = Derivation::node(
            Sequent::new(ante.clone(), goal.succ.clone()),
            RuleId::Cut,
            vec![b],
            vec![lifted, current],
        );
    }
    current
}

/// Every assumption holds at every world accessible from the root.
pub fn assumptions_hold_throughout(a: &AssumptionSet, m: &CounterModelResult) -> bool {
    let root = m.model.world(&m.root).expect("root is a world");
    m.model
        .accessible(root)
        .ones()
        .all(|w| a.formulas().all(|f| m.model.holds_at(w, f)))
}
