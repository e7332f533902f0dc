//! The rules of the calculus and their backward application to set-based
//! sequents.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::formula::{boxed_part, Formula, SetSequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    Init,
    BottomL,
    NegL,
    NegR,
    AndL,
    AndR,
    OrL,
    OrR,
    ImpL,
    ImpR,
    T,
    Four,
    Mon,
    D1,
    D2,
    // Checker-only rules below; never produced by `applications`.
    Cut,
    WeakL,
    WeakR,
    ConL,
    ConR,
    Assumption,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleClass {
    ZeroPremiss,
    StaticOne,
    StaticTwo,
    Transitional,
    Structural,
}

impl RuleId {
    pub const ALL: [RuleId; 21] = [
        RuleId::Init,
        RuleId::BottomL,
        RuleId::NegL,
        RuleId::NegR,
        RuleId::AndL,
        RuleId::AndR,
        RuleId::OrL,
        RuleId::OrR,
        RuleId::ImpL,
        RuleId::ImpR,
        RuleId::T,
        RuleId::Four,
        RuleId::Mon,
        RuleId::D1,
        RuleId::D2,
        RuleId::Cut,
        RuleId::WeakL,
        RuleId::WeakR,
        RuleId::ConL,
        RuleId::ConR,
        RuleId::Assumption,
    ];

    pub fn class(self) -> RuleClass {
        use RuleId::*;
        match self {
            Init | BottomL => RuleClass::ZeroPremiss,
            NegL | NegR | AndL | OrR | ImpR | T => RuleClass::StaticOne,
            AndR | OrL | ImpL => RuleClass::StaticTwo,
            Four | Mon | D1 | D2 => RuleClass::Transitional,
            Cut | WeakL | WeakR | ConL | ConR | Assumption => RuleClass::Structural,
        }
    }

    pub fn name(self) -> &'static str {
        use RuleId::*;
        match self {
            Init => "Init",
            BottomL => "BottomL",
            NegL => "NegL",
            NegR => "NegR",
            AndL => "AndL",
            AndR => "AndR",
            OrL => "OrL",
            OrR => "OrR",
            ImpL => "ImpL",
            ImpR => "ImpR",
            T => "T",
            Four => "Four",
            Mon => "Mon",
            D1 => "D1",
            D2 => "D2",
            Cut => "Cut",
            WeakL => "WeakL",
            WeakR => "WeakR",
            ConL => "ConL",
            ConR => "ConR",
            Assumption => "Assumption",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .iter()
            .copied()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

/// One backward application of a rule: the principal formula(s) in the
/// conclusion and the resulting premisses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: RuleId,
    pub principal: Vec<Formula>,
    pub premisses: Vec<SetSequent>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CalculusConfig {
    /// Restrict `Init` to shared atoms.
    pub atomic_init: bool,
}

/// Zero-premiss closure of a sequent, if any.
pub fn initial_closure(s: &SetSequent, cfg: CalculusConfig) -> Option<RuleApplication> {
    if s.ante.contains(&Formula::Bottom) {
        return Some(RuleApplication {
            rule: RuleId::BottomL,
            principal: vec![Formula::Bottom],
            premisses: vec![],
        });
    }
    s.ante
        .intersection(&s.succ)
        .find(|f| !cfg.atomic_init || matches!(f, Formula::Atom(_)))
        .map(|f| RuleApplication {
            rule: RuleId::Init,
            principal: vec![f.clone()],
            premisses: vec![],
        })
}

pub fn is_initial(s: &SetSequent) -> bool {
    initial_closure(s, CalculusConfig::default()).is_some()
}

fn with(set: &BTreeSet<Formula>, extra: &[&Formula]) -> BTreeSet<Formula> {
    let mut out = set.clone();
    for f in extra {
        out.insert((*f).clone());
    }
    out
}

fn premiss(ante: BTreeSet<Formula>, succ: BTreeSet<Formula>) -> SetSequent {
    SetSequent { ante, succ }
}

/// One-premiss static applications (NegL, NegR, AndL, OrR, ImpR, T) whose
/// premiss differs from the conclusion.
pub fn static_one(s: &SetSequent) -> Vec<RuleApplication> {
    let mut out = Vec::new();
    let mut push = |rule, principal: &Formula, p: SetSequent| {
        if p != *s {
            out.push(RuleApplication {
                rule,
                principal: vec![principal.clone()],
                premisses: vec![p],
            });
        }
    };
    for f in &s.ante {
        match f {
            Formula::Neg(a) => push(RuleId::NegL, f, premiss(s.ante.clone(), with(&s.succ, &[a]))),
            Formula::And(a, b) => push(RuleId::AndL, f, premiss(with(&s.ante, &[a, b]), s.succ.clone())),
            Formula::Box(a) => push(RuleId::T, f, premiss(with(&s.ante, &[a]), s.succ.clone())),
            _ => {}
        }
    }
    for f in &s.succ {
        match f {
            Formula::Neg(a) => push(RuleId::NegR, f, premiss(with(&s.ante, &[a]), s.succ.clone())),
            Formula::Or(a, b) => push(RuleId::OrR, f, premiss(s.ante.clone(), with(&s.succ, &[a, b]))),
            Formula::Imp(a, b) => push(RuleId::ImpR, f, premiss(with(&s.ante, &[a]), with(&s.succ, &[b]))),
            _ => {}
        }
    }
    out
}

/// Two-premiss static applications (AndR, OrL, ImpL). An application is
/// kept only when neither premiss equals the conclusion: a premiss equal to
/// the conclusion can never contribute to a derivation of it.
pub fn static_two(s: &SetSequent) -> Vec<RuleApplication> {
    let mut out = Vec::new();
    let mut push = |rule, principal: &Formula, p1: SetSequent, p2: SetSequent| {
        if p1 != *s && p2 != *s {
            out.push(RuleApplication {
                rule,
                principal: vec![principal.clone()],
                premisses: vec![p1, p2],
            });
        }
    };
    for f in &s.ante {
        match f {
            Formula::Or(a, b) => push(
                RuleId::OrL,
                f,
                premiss(with(&s.ante, &[a]), s.succ.clone()),
                premiss(with(&s.ante, &[b]), s.succ.clone()),
            ),
            Formula::Imp(a, b) => push(
                RuleId::ImpL,
                f,
                premiss(s.ante.clone(), with(&s.succ, &[a])),
                premiss(with(&s.ante, &[b]), s.succ.clone()),
            ),
            _ => {}
        }
    }
    for f in &s.succ {
        if let Formula::And(a, b) = f {
            push(
                RuleId::AndR,
                f,
                premiss(s.ante.clone(), with(&s.succ, &[a])),
                premiss(s.ante.clone(), with(&s.succ, &[b])),
            );
        }
    }
    out
}

/// Transitional applications in search order: D1, D2, Mon, Four.
pub fn transitional(s: &SetSequent) -> Vec<RuleApplication> {
    let boxed = boxed_part(&s.ante);
    let obligations: Vec<(&Formula, &Formula, &Formula)> = s
        .ante
        .iter()
        .filter_map(|f| match f {
            Formula::Obl(b, c) => Some((f, &**b, &**c)),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    for &(o, body, _) in &obligations {
        out.push(RuleApplication {
            rule: RuleId::D1,
            principal: vec![o.clone()],
            premisses: vec![premiss(with(&boxed, &[body]), BTreeSet::new())],
        });
    }
    for (i, &(o1, b1, c1)) in obligations.iter().enumerate() {
        for &(o2, b2, c2) in &obligations[i + 1..] {
            out.push(RuleApplication {
                rule: RuleId::D2,
                principal: vec![o1.clone(), o2.clone()],
                premisses: vec![
                    premiss(with(&boxed, &[b1, b2]), BTreeSet::new()),
                    premiss(with(&boxed, &[c1]), BTreeSet::from([c2.clone()])),
                    premiss(with(&boxed, &[c2]), BTreeSet::from([c1.clone()])),
                ],
            });
        }
    }
    for &(o, body, cond) in &obligations {
        for g in &s.succ {
            if let Formula::Obl(body2, cond2) = g {
                out.push(RuleApplication {
                    rule: RuleId::Mon,
                    principal: vec![o.clone(), g.clone()],
                    premisses: vec![
                        premiss(with(&boxed, &[body]), BTreeSet::from([(**body2).clone()])),
                        premiss(with(&boxed, &[cond]), BTreeSet::from([(**cond2).clone()])),
                        premiss(with(&boxed, &[cond2]), BTreeSet::from([cond.clone()])),
                    ],
                });
            }
        }
    }
    for g in &s.succ {
        if let Formula::Box(a) = g {
            out.push(RuleApplication {
                rule: RuleId::Four,
                principal: vec![g.clone()],
                premisses: vec![premiss(boxed.clone(), BTreeSet::from([(**a).clone()]))],
            });
        }
    }
    out
}

/// Every backward rule application to `s`: one-premiss static, two-premiss
/// static, then transitional. Zero-premiss closures are reported by
/// [`initial_closure`]; checker-only rules are never enumerated.
pub fn applications(s: &SetSequent) -> Vec<RuleApplication> {
    let mut out = static_one(s);
    out.extend(static_two(s));
    out.extend(transitional(s));
    out
}
