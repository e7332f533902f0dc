use bmdl::parser::print_sequent;
use bmdl::{parse_formula, parse_sequent, print_formula, Formula, Sequent};
use proptest::prelude::*;

fn atom() -> impl Strategy<Value = Formula> {
    "[a-z][a-zA-Z0-9_]{0,4}"
        .prop_filter("keyword", |s| !matches!(s.as_str(), "true" | "false" | "top" | "bot"))
        .prop_map(|s| Formula::atom(&s))
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![4 => atom(), 1 => Just(Formula::Bottom)];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::neg),
            inner.clone().prop_map(Formula::boxed),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::obl(a, b)),
        ]
    })
}

proptest! {
    #[test]
    fn formulas_round_trip(f in formula()) {
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn sequents_round_trip(
        ante in prop::collection::vec(formula(), 0..4),
        succ in prop::collection::vec(formula(), 0..4),
    ) {
        let s = Sequent::new(ante, succ);
        prop_assert_eq!(parse_sequent(&print_sequent(&s)).unwrap(), s);
    }

    #[test]
    fn printing_is_stable(f in formula()) {
        let once = print_formula(&f);
        let twice = print_formula(&parse_formula(&once).unwrap());
        prop_assert_eq!(once, twice);
    }
}

#[test]
fn implication_associates_right() {
    assert_eq!(parse_formula("p -> q -> r").unwrap(), parse_formula("p -> (q -> r)").unwrap());
}

#[test]
fn aliases() {
    assert_eq!(parse_formula("bot").unwrap(), Formula::Bottom);
    assert_eq!(parse_formula("top").unwrap(), Formula::top());
    assert_eq!(parse_formula("O(bot/t)").unwrap(), Formula::obl(Formula::Bottom, Formula::atom("t")));
}

#[test]
fn errors_carry_positions() {
    let e = parse_formula("p & & q").unwrap_err();
    assert_eq!((e.line, e.column), (1, 5), "{e}");
}
