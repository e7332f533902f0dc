//! Formulas, multiset sequents and set-based sequents.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// A formula of the language: classical connectives, the unary necessity
/// operator `[]` and the dyadic obligation `O(body / cond)`.
///
/// Children are reference counted so that the heavy copying done by the
/// proof search (every rule copies its context) stays cheap.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Arc<str>),
    Bottom,
    Neg(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Box(Arc<Formula>),
    Obl(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Arc::from(name))
    }

    /// `true` is sugar for `~false`.
    pub fn top() -> Formula {
        Formula::Neg(Arc::new(Formula::Bottom))
    }

    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Arc::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Arc::new(l), Arc::new(r))
    }

    pub fn boxed(f: Formula) -> Formula {
        Formula::Box(Arc::new(f))
    }

    pub fn obl(body: Formula, cond: Formula) -> Formula {
        Formula::Obl(Arc::new(body), Arc::new(cond))
    }

    pub fn is_box(&self) -> bool {
        matches!(self, Formula::Box(_))
    }

    pub fn is_obl(&self) -> bool {
        matches!(self, Formula::Obl(..))
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 1,
            Formula::Neg(f) | Formula::Box(f) => 1 + f.size(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Obl(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    /// Nesting depth of `[]` and `O(·/·)`.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::Neg(f) => f.modal_depth(),
            Formula::Box(f) => 1 + f.modal_depth(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.modal_depth().max(r.modal_depth())
            }
            Formula::Obl(l, r) => 1 + l.modal_depth().max(r.modal_depth()),
        }
    }

    /// Collects the atom names occurring in the formula.
    pub fn atoms_into(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Bottom => {}
            Formula::Neg(f) | Formula::Box(f) => f.atoms_into(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Obl(l, r) => {
                l.atoms_into(out);
                r.atoms_into(out);
            }
        }
    }

    fn subformulas_into(&self, out: &mut BTreeSet<Formula>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Formula::Atom(_) | Formula::Bottom => {}
            Formula::Neg(f) | Formula::Box(f) => f.subformulas_into(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Obl(l, r) => {
                l.subformulas_into(out);
                r.subformulas_into(out);
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_formula(self))
    }
}

/// The formula itself together with all of its proper subformulas.
pub fn subformulas(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    f.subformulas_into(&mut out);
    out
}

/// Keeps exactly the formulas of the form `[]φ` (boxes are retained).
pub fn boxed_part<'a, I>(formulas: I) -> BTreeSet<Formula>
where
    I: IntoIterator<Item = &'a Formula>,
{
    formulas.into_iter().filter(|f| f.is_box()).cloned().collect()
}

/// A two-sided sequent over multisets, read as `∧ante → ∨succ`.
#[derive(Clone, Debug, Default)]
pub struct Sequent {
    pub ante: Vec<Formula>,
    pub succ: Vec<Formula>,
}

impl Sequent {
    pub fn new(ante: Vec<Formula>, succ: Vec<Formula>) -> Sequent {
        Sequent { ante, succ }
    }

    fn sorted(side: &[Formula]) -> Vec<&Formula> {
        let mut v: Vec<&Formula> = side.iter().collect();
        v.sort();
        v
    }

    /// Multiset equality of both sides.
    pub fn same_multisets(&self, other: &Sequent) -> bool {
        Self::sorted(&self.ante) == Self::sorted(&other.ante)
            && Self::sorted(&self.succ) == Self::sorted(&other.succ)
    }
}

impl PartialEq for Sequent {
    fn eq(&self, other: &Self) -> bool {
        self.same_multisets(other)
    }
}

impl Eq for Sequent {}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_sequent(self))
    }
}

/// A sequent over sets of formulas; the form the proof search works on.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetSequent {
    pub ante: BTreeSet<Formula>,
    pub succ: BTreeSet<Formula>,
}

impl SetSequent {
    pub fn new<A, S>(ante: A, succ: S) -> SetSequent
    where
        A: IntoIterator<Item = Formula>,
        S: IntoIterator<Item = Formula>,
    {
        SetSequent {
            ante: ante.into_iter().collect(),
            succ: succ.into_iter().collect(),
        }
    }

    /// `self ⊆ other` on both sides.
    pub fn subsumed_by(&self, other: &SetSequent) -> bool {
        self.ante.is_subset(&other.ante) && self.succ.is_subset(&other.succ)
    }

    pub fn to_sequent(&self) -> Sequent {
        Sequent {
            ante: self.ante.iter().cloned().collect(),
            succ: self.succ.iter().cloned().collect(),
        }
    }

    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        for f in self.ante.iter().chain(self.succ.iter()) {
            f.subformulas_into(&mut out);
        }
        out
    }
}

impl fmt::Display for SetSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_sequent().fmt(f)
    }
}

impl From<&Sequent> for SetSequent {
    fn from(s: &Sequent) -> Self {
        to_set_sequent(s)
    }
}

/// Collapses duplicates on each side.
pub fn to_set_sequent(s: &Sequent) -> SetSequent {
    SetSequent::new(s.ante.iter().cloned(), s.succ.iter().cloned())
}
