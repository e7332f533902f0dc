mod common;

use bmdl::generate::{GenConfig, Generator};
use bmdl::{interpretation, parse_formula, prove, Formula, SearchConfig, Sequent};
use common::{random_m_models, random_model, Explicit};
use proptest::prelude::*;

fn instantiate(schema: &str, parts: &[Formula]) -> Formula {
    let mut f = parse_formula(schema).unwrap();
    for (i, p) in parts.iter().enumerate() {
        f = substitute(&f, &format!("x{i}"), p);
    }
    f
}

fn substitute(f: &Formula, atom: &str, by: &Formula) -> Formula {
    let go = |g: &Formula| substitute(g, atom, by);
    match f {
        Formula::Atom(a) if &**a == atom => by.clone(),
        Formula::Atom(_) | Formula::Bottom => f.clone(),
        Formula::Neg(g) => Formula::neg(go(g)),
        Formula::And(l, r) => Formula::and(go(l), go(r)),
        Formula::Or(l, r) => Formula::or(go(l), go(r)),
        Formula::Imp(l, r) => Formula::imp(go(l), go(r)),
        Formula::Box(g) => Formula::boxed(go(g)),
        Formula::Obl(b, c) => Formula::obl(go(b), go(c)),
    }
}

const SCHEMAS: [&str; 6] = [
    "[](x0 -> x1) & O(x0 / x2) -> O(x1 / x2)",
    "[](x1 -> ~x0) -> ~(O(x0 / x2) & O(x1 / x2))",
    "[]((x1 -> x2) & (x2 -> x1)) & O(x0 / x1) -> O(x0 / x2)",
    "[](x0 -> x1) -> ([]x0 -> []x1)",
    "[]x0 -> x0",
    "[]x0 -> [][]x0",
];

#[test]
fn validate_frame_agrees_with_explicit_conditions() {
    let mut valid = 0;
    for seed in 0..400 {
        let m = random_model(seed, 4);
        let e = Explicit::of(&m);
        assert_eq!(Some(m.validate_frame().is_ok()), e.is_m_frame(), "seed {seed}");
        valid += m.validate_frame().is_ok() as usize;
    }
    assert!(valid > 50, "only {valid} valid frames");
}

#[test]
fn evaluator_agrees_with_explicit_neighbourhoods() {
    let mut g = Generator::new(11, GenConfig::default());
    for (m, e) in random_m_models(1000, 60, 4) {
        for _ in 0..20 {
            let size = 1 + g.below(12);
            let f = g.formula(size);
            for w in 0..m.len() {
                assert_eq!(m.holds_at(w, &f), e.holds(w, &f), "{f} at w{w}");
            }
        }
    }
}

#[test]
fn schemas_hold_on_m_models() {
    let mut g = Generator::new(5, GenConfig::default());
    for (_, e) in random_m_models(2000, 80, 4) {
        for schema in SCHEMAS {
            let parts: Vec<Formula> = (0..3).map(|_| { let k = 1 + g.below(4); g.formula(k) }).collect();
            let f = instantiate(schema, &parts);
            assert!(e.valid(&Sequent::new(vec![], vec![f.clone()])), "{f}");
        }
    }
}

#[test]
fn no_conflicting_obligations() {
    let mut g = Generator::new(9, GenConfig::default());
    for (_, e) in random_m_models(3000, 80, 4) {
        let a = { let k = 1 + g.below(5); g.formula(k) };
        let c = { let k = 1 + g.below(3); g.formula(k) };
        let both = Formula::and(Formula::obl(a.clone(), c.clone()), Formula::obl(Formula::neg(a), c));
        assert!((0..e.n).all(|w| !e.holds(w, &both)), "{both}");
    }
}

#[test]
fn derivable_sequents_are_valid() {
    let models = random_m_models(4000, 40, 4);
    let mut g = Generator::new(21, GenConfig::default());
    let mut accepted = 0;
    while accepted < 60 {
        let s = { let k = 3 + g.below(10); g.sequent(k) };
        if prove(&s, SearchConfig::default()).unwrap().is_accepted() {
            accepted += 1;
            for (m, e) in &models {
                assert!(e.valid(&s), "{s} fails in an m-model");
                assert!(m.is_valid(&interpretation(&s)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn countermodels_falsify_at_root(seed in any::<u64>()) {
        let mut g = Generator::new(seed, GenConfig::default());
        let s = { let k = 2 + g.below(10); g.sequent(k) };
        let out = prove(&s, SearchConfig::default()).unwrap();
        if !out.is_accepted() {
            let r = bmdl::build(out.trace()).unwrap();
            let e = Explicit::of(&r.model);
            prop_assert_ne!(e.is_m_frame(), Some(false));
            let root = r.model.world(&r.root).unwrap();
            prop_assert!(!e.satisfies(root, &s));
        }
    }
}
