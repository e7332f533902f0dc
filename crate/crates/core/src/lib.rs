//! Decision procedure for basic Mimamsa deontic logic: S4 necessity plus a
//! dyadic obligation operator `O(φ/ψ)`.
//!
//! The crate decides derivability in a cut-free sequent calculus by
//! backward search with loop checking, turns accepting runs into
//! derivations that an independent kernel re-checks, and turns rejecting
//! runs into finite neighbourhood models falsifying the sequent.

pub mod calculus;
pub mod consistency;
pub mod corpus;
pub mod countermodel;
pub mod derivation;
pub mod formula;
pub mod generate;
pub mod parser;
pub mod search;
pub mod semantics;

pub use calculus::{applications, is_initial, CalculusConfig, RuleApplication, RuleId};
pub use consistency::{derives, outer_consistent, AssumptionSet, Consistency, Derivability};
pub use countermodel::{build, truth_lemma_audit, CounterModelResult, CountermodelError};
pub use derivation::{check_derivation, interpretation, Derivation, KernelError};
pub use formula::{boxed_part, subformulas, to_set_sequent, Formula, Sequent, SetSequent};
pub use parser::{parse_formula, parse_problem, parse_sequent, print_formula, ParseError, ProblemFile};
pub use search::{prove, saturate, search, History, ProveOutcome, SearchConfig, SearchError, SearchTree};
pub use semantics::{FrameViolation, MModel, ModelError};
