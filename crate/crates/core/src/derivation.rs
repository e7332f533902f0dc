//! Derivation trees and the independent checker for them.
//!
//! The checker works on multiset sequents and knows every rule of the
//! calculus plus the structural rules (weakening, contraction, cut) and
//! assumption leaves. It shares no code with the proof search except the
//! formula type, so every derivation the search emits is re-validated from
//! scratch.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calculus::RuleId;
use crate::formula::{Formula, Sequent};
use crate::parser::{parse_formula, parse_sequent, print_formula, print_sequent, ParseError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub rule: RuleId,
    pub principal: Vec<Formula>,
    pub children: Vec<Derivation>,
    /// Set on `Assumption` leaves.
    pub assumption_tag: Option<String>,
}

impl Derivation {
    pub fn leaf(conclusion: Sequent, rule: RuleId, principal: Vec<Formula>) -> Derivation {
        Derivation {
            conclusion,
            rule,
            principal,
            children: vec![],
            assumption_tag: None,
        }
    }

    pub fn node(
        conclusion: Sequent,
        rule: RuleId,
        principal: Vec<Formula>,
        children: Vec<Derivation>,
    ) -> Derivation {
        Derivation {
            conclusion,
            rule,
            principal,
            children,
            assumption_tag: None,
        }
    }

    pub fn assumption(conclusion: Sequent, tag: impl Into<String>) -> Derivation {
        Derivation {
            conclusion,
            rule: RuleId::Assumption,
            principal: vec![],
            children: vec![],
            assumption_tag: Some(tag.into()),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Derivation::depth).max().unwrap_or(0)
    }

    /// Every rule used, in pre-order.
    pub fn rules(&self) -> Vec<RuleId> {
        let mut out = vec![self.rule];
        for c in &self.children {
            out.extend(c.rules());
        }
        out
    }

    pub fn uses(&self, rule: RuleId) -> bool {
        self.rule == rule || self.children.iter().any(|c| c.uses(rule))
    }

    /// Indented rule tree, conclusion first.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, indent: usize, out: &mut String) {
        out.push_str(&"  ".repeat(indent));
        out.push_str(&format!("[{}] {}\n", self.rule, print_sequent(&self.conclusion)));
        for c in &self.children {
            c.render_into(indent + 1, out);
        }
    }
}

/// `∧ante → ∨succ`, right-nested, with `true` / `false` for empty sides.
pub fn interpretation(s: &Sequent) -> Formula {
    let conj = s
        .ante
        .iter()
        .rev()
        .cloned()
        .reduce(|acc, f| Formula::and(f, acc))
        .unwrap_or_else(Formula::top);
    let disj = s
        .succ
        .iter()
        .rev()
        .cloned()
        .reduce(|acc, f| Formula::or(f, acc))
        .unwrap_or(Formula::Bottom);
    Formula::imp(conj, disj)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid {rule} step at node {path:?}: {reason}")]
pub struct KernelError {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub rule: RuleId,
    pub reason: String,
}

fn count(side: &[Formula], f: &Formula) -> usize {
    side.iter().filter(|g| *g == f).count()
}

fn ms_eq(a: &[Formula], b: &[Formula]) -> bool {
    let mut x: Vec<&Formula> = a.iter().collect();
    let mut y: Vec<&Formula> = b.iter().collect();
    x.sort();
    y.sort();
    x == y
}

fn remove_all(side: &[Formula], removed: &[Formula]) -> Option<Vec<Formula>> {
    let mut out = side.to_vec();
    for f in removed {
        let i = out.iter().position(|g| g == f)?;
        out.remove(i);
    }
    Some(out)
}

fn plus(side: &[Formula], extra: &[&Formula]) -> Vec<Formula> {
    let mut out = side.to_vec();
    out.extend(extra.iter().map(|f| (*f).clone()));
    out
}

fn boxed_multiset(side: &[Formula]) -> Vec<Formula> {
    side.iter().filter(|f| f.is_box()).cloned().collect()
}

/// The premisses a logical rule instance must have, given its conclusion
/// and principal formulas. Static rules copy the principal formula.
pub fn schema_premisses(
    conclusion: &Sequent,
    rule: RuleId,
    principal: &[Formula],
) -> Result<Vec<Sequent>, String> {
    let (g, d) = (&conclusion.ante, &conclusion.succ);
    let one = || -> Result<&Formula, String> {
        match principal {
            [f] => Ok(f),
            _ => Err(format!("expected one principal formula, got {}", principal.len())),
        }
    };
    let in_ante = |f: &Formula| -> Result<(), String> {
        if g.contains(f) {
            Ok(())
        } else {
            Err(format!("principal `{}` not in antecedent", print_formula(f)))
        }
    };
    let in_succ = |f: &Formula| -> Result<(), String> {
        if d.contains(f) {
            Ok(())
        } else {
            Err(format!("principal `{}` not in succedent", print_formula(f)))
        }
    };
    let shape = |f: &Formula| format!("principal `{}` has the wrong shape for {rule}", print_formula(f));
    let s = |ante: Vec<Formula>, succ: Vec<Formula>| Sequent { ante, succ };
    let boxed = boxed_multiset(g);
    use RuleId::*;
    let out = match rule {
        Init => {
            let f = one()?;
            in_ante(f)?;
            in_succ(f)?;
            vec![]
        }
        BottomL => {
            let f = one()?;
            if *f != Formula::Bottom {
                return Err(shape(f));
            }
            in_ante(f)?;
            vec![]
        }
        NegL => {
            let f = one()?;
            in_ante(f)?;
            let Formula::Neg(a) = f else { return Err(shape(f)) };
            vec![s(g.clone(), plus(d, &[a]))]
        }
        NegR => {
            let f = one()?;
            in_succ(f)?;
            let Formula::Neg(a) = f else { return Err(shape(f)) };
            vec![s(plus(g, &[a]), d.clone())]
        }
        AndL => {
            let f = one()?;
            in_ante(f)?;
            let Formula::And(a, b) = f else { return Err(shape(f)) };
            vec![s(plus(g, &[a, b]), d.clone())]
        }
        AndR => {
            let f = one()?;
            in_succ(f)?;
            let Formula::And(a, b) = f else { return Err(shape(f)) };
            vec![s(g.clone(), plus(d, &[a])), s(g.clone(), plus(d, &[b]))]
        }
        OrL => {
            let f = one()?;
            in_ante(f)?;
            let Formula::Or(a, b) = f else { return Err(shape(f)) };
            vec![s(plus(g, &[a]), d.clone()), s(plus(g, &[b]), d.clone())]
        }
        OrR => {
            let f = one()?;
            in_succ(f)?;
            let Formula::Or(a, b) = f else { return Err(shape(f)) };
            vec![s(g.clone(), plus(d, &[a, b]))]
        }
        ImpL => {
            let f = one()?;
            in_ante(f)?;
            let Formula::Imp(a, b) = f else { return Err(shape(f)) };
            vec![s(g.clone(), plus(d, &[a])), s(plus(g, &[b]), d.clone())]
        }
        ImpR => {
            let f = one()?;
            in_succ(f)?;
            let Formula::Imp(a, b) = f else { return Err(shape(f)) };
            vec![s(plus(g, &[a]), plus(d, &[b]))]
        }
        T => {
            let f = one()?;
            in_ante(f)?;
            let Formula::Box(a) = f else { return Err(shape(f)) };
            vec![s(plus(g, &[a]), d.clone())]
        }
        Four => {
            let f = one()?;
            in_succ(f)?;
            let Formula::Box(a) = f else { return Err(shape(f)) };
            vec![s(boxed, vec![(**a).clone()])]
        }
        D1 => {
            let f = one()?;
            in_ante(f)?;
            let Formula::Obl(body, _) = f else { return Err(shape(f)) };
            vec![s(plus(&boxed, &[body]), vec![])]
        }
        D2 => {
            let [o1, o2] = principal else {
                return Err(format!("D2 needs two principal formulas, got {}", principal.len()));
            };
            let need = if o1 == o2 { 2 } else { 1 };
            if count(g, o1) < need || count(g, o2) < need {
                return Err("principal obligations not in antecedent".into());
            }
            let (Formula::Obl(b1, c1), Formula::Obl(b2, c2)) = (o1, o2) else {
                return Err(shape(o1));
            };
            vec![
                s(plus(&boxed, &[b1, b2]), vec![]),
                s(plus(&boxed, &[c1]), vec![(**c2).clone()]),
                s(plus(&boxed, &[c2]), vec![(**c1).clone()]),
            ]
        }
        Mon => {
            let [o1, o2] = principal else {
                return Err(format!("Mon needs two principal formulas, got {}", principal.len()));
            };
            in_ante(o1)?;
            in_succ(o2)?;
            let (Formula::Obl(b1, c1), Formula::Obl(b2, c2)) = (o1, o2) else {
                return Err(shape(o1));
            };
            vec![
                s(plus(&boxed, &[b1]), vec![(**b2).clone()]),
                s(plus(&boxed, &[c1]), vec![(**c2).clone()]),
                s(plus(&boxed, &[c2]), vec![(**c1).clone()]),
            ]
        }
        Cut | WeakL | WeakR | ConL | ConR | Assumption => {
            return Err(format!("{rule} is not a logical rule"))
        }
    };
    Ok(out)
}

fn check_structural(d: &Derivation, assumptions: &[Sequent]) -> Result<(), String> {
    let c = &d.conclusion;
    let arity = |n: usize| -> Result<(), String> {
        if d.children.len() == n {
            Ok(())
        } else {
            Err(format!("expected {n} premisses, found {}", d.children.len()))
        }
    };
    match d.rule {
        RuleId::Assumption => {
            arity(0)?;
            if assumptions.iter().any(|a| a.same_multisets(c)) {
                Ok(())
            } else {
                Err(format!("`{}` is not an assumption", print_sequent(c)))
            }
        }
        RuleId::WeakL | RuleId::WeakR => {
            arity(1)?;
            if d.principal.is_empty() {
                return Err("weakening needs at least one principal formula".into());
            }
            let left = d.rule == RuleId::WeakL;
            let (side, other) = if left { (&c.ante, &c.succ) } else { (&c.succ, &c.ante) };
            let rest = remove_all(side, &d.principal).ok_or("weakened formulas not in conclusion")?;
            let p = &d.children[0].conclusion;
            let (pside, pother) = if left { (&p.ante, &p.succ) } else { (&p.succ, &p.ante) };
            if ms_eq(&rest, pside) && ms_eq(other, pother) {
                Ok(())
            } else {
                Err("premiss is not the conclusion minus the weakened formulas".into())
            }
        }
        RuleId::ConL | RuleId::ConR => {
            arity(1)?;
            let [f] = d.principal.as_slice() else {
                return Err("contraction needs exactly one principal formula".into());
            };
            let left = d.rule == RuleId::ConL;
            let (side, other) = if left { (&c.ante, &c.succ) } else { (&c.succ, &c.ante) };
            if !side.contains(f) {
                return Err("contracted formula not in conclusion".into());
            }
            let p = &d.children[0].conclusion;
            let (pside, pother) = if left { (&p.ante, &p.succ) } else { (&p.succ, &p.ante) };
            if ms_eq(&plus(side, &[f]), pside) && ms_eq(other, pother) {
                Ok(())
            } else {
                Err("premiss is not the conclusion with the formula duplicated".into())
            }
        }
        RuleId::Cut => {
            arity(2)?;
            let [f] = d.principal.as_slice() else {
                return Err("cut needs exactly one cut formula".into());
            };
            let (p1, p2) = (&d.children[0].conclusion, &d.children[1].conclusion);
            let rest_succ = remove_all(&p1.succ, std::slice::from_ref(f))
                .ok_or("cut formula missing from left premiss succedent")?;
            let rest_ante = remove_all(&p2.ante, std::slice::from_ref(f))
                .ok_or("cut formula missing from right premiss antecedent")?;
            let ante: Vec<Formula> = p1.ante.iter().chain(rest_ante.iter()).cloned().collect();
            let succ: Vec<Formula> = rest_succ.iter().chain(p2.succ.iter()).cloned().collect();
            if ms_eq(&ante, &c.ante) && ms_eq(&succ, &c.succ) {
                Ok(())
            } else {
                Err("conclusion does not combine the premiss contexts".into())
            }
        }
        _ => unreachable!(),
    }
}

fn check_node(d: &Derivation, assumptions: &[Sequent], path: &mut Vec<usize>) -> Result<(), KernelError> {
    let fail = |path: &Vec<usize>, reason: String| KernelError {
        path: path.clone(),
        rule: d.rule,
        reason,
    };
    if d.rule.class() == crate::calculus::RuleClass::Structural {
        check_structural(d, assumptions).map_err(|r| fail(path, r))?;
    } else {
        let expected = schema_premisses(&d.conclusion, d.rule, &d.principal).map_err(|r| fail(path, r))?;
        if expected.len() != d.children.len() {
            return Err(fail(
                path,
                format!("expected {} premisses, found {}", expected.len(), d.children.len()),
            ));
        }
        for (i, (want, child)) in expected.iter().zip(&d.children).enumerate() {
            if !want.same_multisets(&child.conclusion) {
                return Err(fail(
                    path,
                    format!(
                        "premiss {} is `{}`, schema requires `{}`",
                        i + 1,
                        print_sequent(&child.conclusion),
                        print_sequent(want)
                    ),
                ));
            }
        }
    }
    for (i, child) in d.children.iter().enumerate() {
        path.push(i);
        check_node(child, assumptions, path)?;
        path.pop();
    }
    Ok(())
}

/// Checks that every node is an exact instance of its rule and that every
/// assumption leaf is one of `assumptions`.
pub fn check_derivation(d: &Derivation, assumptions: &[Sequent]) -> Result<(), KernelError> {
    check_node(d, assumptions, &mut Vec::new())
}

/// JSON shape: `{rule, principal: [formula], conclusion: sequent, children}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DerivationJson {
    pub rule: String,
    #[serde(default)]
    pub principal: Vec<String>,
    pub conclusion: String,
    #[serde(default)]
    pub children: Vec<DerivationJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assumption: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum DerivationFormatError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Rule(String),
    #[error("in `{text}`: {source}")]
    Syntax { text: String, source: ParseError },
}

impl From<&Derivation> for DerivationJson {
    fn from(d: &Derivation) -> Self {
        DerivationJson {
            rule: d.rule.name().to_string(),
            principal: d.principal.iter().map(print_formula).collect(),
            conclusion: print_sequent(&d.conclusion),
            children: d.children.iter().map(DerivationJson::from).collect(),
            assumption: d.assumption_tag.clone(),
        }
    }
}

impl TryFrom<&DerivationJson> for Derivation {
    type Error = DerivationFormatError;

    fn try_from(j: &DerivationJson) -> Result<Self, Self::Error> {
        let rule = j.rule.parse::<RuleId>().map_err(DerivationFormatError::Rule)?;
        let conclusion = parse_sequent(&j.conclusion).map_err(|source| DerivationFormatError::Syntax {
            text: j.conclusion.clone(),
            source,
        })?;
        let principal = j
            .principal
            .iter()
            .map(|p| {
                parse_formula(p).map_err(|source| DerivationFormatError::Syntax {
                    text: p.clone(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let children = j
            .children
            .iter()
            .map(Derivation::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Derivation {
            conclusion,
            rule,
            principal,
            children,
            assumption_tag: j.assumption.clone(),
        })
    }
}

impl Derivation {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DerivationJson::from(self)).expect("derivation serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Derivation, DerivationFormatError> {
        let j: DerivationJson = serde_json::from_str(text)?;
        Derivation::try_from(&j)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Sequent {
        parse_sequent(text).unwrap()
    }
    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    fn falsum_obligation() -> Derivation {
        Derivation::node(
            s("|- ~O(false/t)"),
            RuleId::NegR,
            vec![f("~O(false/t)")],
            vec![Derivation::node(
                s("O(false/t) |- ~O(false/t)"),
                RuleId::D1,
                vec![f("O(false/t)")],
                vec![Derivation::leaf(s("false |-"), RuleId::BottomL, vec![Formula::Bottom])],
            )],
        )
    }

    #[test]
    fn accepts_impossible_obligation_derivation() {
        assert_eq!(check_derivation(&falsum_obligation(), &[]), Ok(()));
    }

    #[test]
    fn d1_must_keep_boxed_context() {
        let bad = Derivation::node(
            s("[]r, O(p/q) |-"),
            RuleId::D1,
            vec![f("O(p/q)")],
            vec![Derivation::leaf(s("p |-"), RuleId::Init, vec![f("p")])],
        );
        let err = check_derivation(&bad, &[]).unwrap_err();
        assert_eq!(err.path, Vec::<usize>::new());
        assert_eq!(err.rule, RuleId::D1);
        assert!(err.reason.contains("premiss 1"));
    }

    #[test]
    fn error_path_points_at_failing_node() {
        let mut d = falsum_obligation();
        d.children[0].children[0].conclusion = s("p |-");
        let err = check_derivation(&d, &[]).unwrap_err();
        // The D1 node sees the wrong premiss before the leaf is visited.
        assert_eq!(err.path, vec![0]);
    }

    #[test]
    fn structural_rules() {
        let init = Derivation::leaf(s("p |- p"), RuleId::Init, vec![f("p")]);
        let weak = Derivation::node(s("p, q |- p"), RuleId::WeakL, vec![f("q")], vec![init.clone()]);
        assert_eq!(check_derivation(&weak, &[]), Ok(()));
        let con = Derivation::node(
            s("p |- p"),
            RuleId::ConL,
            vec![f("p")],
            vec![Derivation::leaf(s("p, p |- p"), RuleId::Init, vec![f("p")])],
        );
        assert_eq!(check_derivation(&con, &[]), Ok(()));
        let cut = Derivation::node(
            s("q |- r"),
            RuleId::Cut,
            vec![f("p")],
            vec![
                Derivation::assumption(s("q |- p"), "a1"),
                Derivation::assumption(s("p |- r"), "a2"),
            ],
        );
        assert_eq!(check_derivation(&cut, &[s("q |- p"), s("p |- r")]), Ok(()));
        assert!(check_derivation(&cut, &[s("q |- p")]).is_err());
    }

    #[test]
    fn interpretation_conventions() {
        assert_eq!(interpretation(&s("p, q |- r")), f("p & q -> r"));
        assert_eq!(interpretation(&s("|-")), f("true -> false"));
        assert_eq!(interpretation(&s("|- p, q")), f("true -> p | q"));
        assert_eq!(interpretation(&s("a, b, c |-")), f("a & (b & c) -> false"));
    }

    #[test]
    fn json_round_trip() {
        let d = falsum_obligation();
        let text = d.to_json().to_string();
        assert_eq!(Derivation::from_json_str(&text).unwrap(), d);
        assert!(Derivation::from_json_str(r#"{"rule":"Nope","conclusion":"|-"}"#).is_err());
    }
}
