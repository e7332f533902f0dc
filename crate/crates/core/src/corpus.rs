//! Runner for the bundled corpus: a directory with a `manifest.json`
//! listing sequents, assumption sets, models and derivations together with
//! their expected outcomes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calculus::RuleId;
use crate::consistency::{outer_consistent, AssumptionSet, Consistency};
use crate::countermodel::build;
use crate::derivation::{check_derivation, Derivation};
use crate::formula::Sequent;
use crate::parser::{parse_formula, parse_problem, parse_sequent, ParseError};
use crate::search::{prove, ProveOutcome, SearchConfig};
use crate::semantics::MModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    Sequent,
    AssumptionSet,
    Model,
    Derivation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Derivable,
    Underivable,
    Consistent,
    Inconsistent,
    ValidFrame,
    Checked,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoldsAt {
    pub world: String,
    pub formula: String,
    pub value: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    pub kind: EntryKind,
    pub file: String,
    pub expected: Expected,
    /// Model entries: truth values at named worlds.
    #[serde(default)]
    pub holds: Vec<HoldsAt>,
    /// Consistent assumption sets: formulas that must hold at the root.
    #[serde(default)]
    pub holds_at_root: Vec<String>,
    /// Derivable sequents: rules the derivation must use.
    #[serde(default)]
    pub rules: Vec<String>,
    /// Derivation entries: assumption sequents the leaves may use.
    #[serde(default)]
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub entries: Vec<CorpusEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub entries: Vec<EntryReport>,
}

impl CorpusReport {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| !e.passed).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

impl fmt::Display for CorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let mark = if e.passed { "ok  " } else { "FAIL" };
            writeln!(f, "{mark} {:<20} {}", e.id, e.detail)?;
        }
        write!(f, "{} entries, {} failed", self.entries.len(), self.failures())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("bad manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

/// Reads a `.seq` file: one sequent, `#` comments and blank lines ignored.
pub fn parse_sequent_file(text: &str) -> Result<Sequent, ParseError> {
    let body: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .filter(|l| !l.trim().is_empty())
        .collect();
    parse_sequent(&body.join(" "))
}

pub fn load_manifest(dir: &Path) -> Result<Manifest, CorpusError> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|source| CorpusError::Io { path, source })?;
    Ok(serde_json::from_str(&text)?)
}

/// Runs every entry; failures are collected, never fatal.
pub fn run_corpus(dir: &Path, config: SearchConfig) -> Result<CorpusReport, CorpusError> {
    let manifest = load_manifest(dir)?;
    let entries = manifest
        .entries
        .iter()
        .map(|e| {
            let (passed, detail) = match run_entry(dir, e, config) {
                Ok(detail) => (true, detail),
                Err(detail) => (false, detail),
            };
            EntryReport {
                id: e.id.clone(),
                passed,
                detail,
            }
        })
        .collect();
    Ok(CorpusReport { entries })
}

fn run_entry(dir: &Path, e: &CorpusEntry, config: SearchConfig) -> Result<String, String> {
    let path = dir.join(&e.file);
    let text = fs::read_to_string(&path).map_err(|err| format!("cannot read {}: {err}", path.display()))?;
    match (e.kind, e.expected) {
        (EntryKind::Sequent, Expected::Derivable | Expected::Underivable) => sequent_entry(e, &text, config),
        (EntryKind::AssumptionSet, Expected::Consistent | Expected::Inconsistent) => {
            assumption_entry(e, &text, config)
        }
        (EntryKind::Model, Expected::ValidFrame) => model_entry(e, &text),
        (EntryKind::Derivation, Expected::Checked) => derivation_entry(e, &text),
        (kind, expected) => Err(format!("{kind:?} entries cannot be expected {expected:?}")),
    }
}

fn sequent_entry(e: &CorpusEntry, text: &str, config: SearchConfig) -> Result<String, String> {
    let s = parse_sequent_file(text).map_err(|err| err.to_string())?;
    match prove(&s, config).map_err(|err| err.to_string())? {
        ProveOutcome::Accepted { derivation, trace } => {
            if e.expected != Expected::Derivable {
                return Err("derivable, expected underivable".into());
            }
            check_derivation(&derivation, &[]).map_err(|err| format!("kernel: {err}"))?;
            for r in &e.rules {
                let rule = r.parse::<RuleId>()?;
                if !derivation.uses(rule) {
                    return Err(format!("derivation does not use {rule}"));
                }
            }
            Ok(format!("derivable ({} histories, {} nodes)", trace.visited, derivation.size()))
        }
        ProveOutcome::Rejected(trace) => {
            if e.expected != Expected::Underivable {
                return Err("underivable, expected derivable".into());
            }
            let m = build(&trace).map_err(|err| err.to_string())?;
            Ok(format!("underivable (countermodel with {} worlds)", m.model.len()))
        }
    }
}

fn assumption_entry(e: &CorpusEntry, text: &str, config: SearchConfig) -> Result<String, String> {
    let problem = parse_problem(text).map_err(|err| err.to_string())?;
    let a = AssumptionSet::new(problem.assumptions);
    match outer_consistent(&a, config).map_err(|err| err.to_string())? {
        Consistency::Consistent(m) => {
            if e.expected != Expected::Consistent {
                return Err("consistent, expected inconsistent".into());
            }
            for f in &e.holds_at_root {
                let f = parse_formula(f).map_err(|err| err.to_string())?;
                if !m.model.holds(&m.root, &f).map_err(|err| err.to_string())? {
                    return Err(format!("{f} fails at the root"));
                }
            }
            Ok(format!("consistent (countermodel with {} worlds)", m.model.len()))
        }
        Consistency::Inconsistent(d) => {
            if e.expected != Expected::Inconsistent {
                return Err("inconsistent, expected consistent".into());
            }
            check_derivation(&d, &[]).map_err(|err| format!("kernel: {err}"))?;
            Ok(format!("inconsistent ({} nodes)", d.size()))
        }
    }
}

fn model_entry(e: &CorpusEntry, text: &str) -> Result<String, String> {
    let m = MModel::from_json_str(text).map_err(|err| err.to_string())?;
    m.validate_frame().map_err(|v| v.to_string())?;
    for h in &e.holds {
        let f = parse_formula(&h.formula).map_err(|err| err.to_string())?;
        let got = m.holds(&h.world, &f).map_err(|err| err.to_string())?;
        if got != h.value {
            return Err(format!("{} at {} is {got}", h.formula, h.world));
        }
    }
    Ok(format!("valid frame, {} truth values", e.holds.len()))
}

fn derivation_entry(e: &CorpusEntry, text: &str) -> Result<String, String> {
    let d = Derivation::from_json_str(text).map_err(|err| err.to_string())?;
    let assumptions = e
        .assumptions
        .iter()
        .map(|s| parse_sequent(s).map_err(|err| err.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    check_derivation(&d, &assumptions).map_err(|err| format!("kernel: {err}"))?;
    Ok(format!("checked ({} nodes)", d.size()))
}
