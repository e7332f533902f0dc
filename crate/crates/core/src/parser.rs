//! Concrete syntax for formulas, sequents and problem files.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! formula := disj ( "->" formula )?          right associative
//! disj    := conj ( "|" conj )*              left associative
//! conj    := unary ( "&" unary )*            left associative
//! unary   := "~" unary | "[]" unary | primary
//! primary := atom | "true" | "false" | "top" | "bot"
//!          | "O" "(" formula "/" formula ")" | "(" formula ")"
//! sequent := list? "|-" list?                list := formula ("," formula)*
//! ```
//!
//! Atoms match `[a-z][a-zA-Z0-9_]*`, minus the four constant keywords.

use std::fmt;

use crate::formula::{Formula, Sequent};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at {}:{}: expected {}, found {}",
            self.line,
            self.column,
            self.expected.join(" or "),
            self.found
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Obl,
    Not,
    And,
    Or,
    Imp,
    Nec,
    LParen,
    RParen,
    Slash,
    Comma,
    Turnstile,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Obl => "`O`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Imp => "`->`".into(),
            Tok::Nec => "`[]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str, first_line: usize) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (first_line, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let two = |n: char| chars.get(i + 1) == Some(&n);
        let (tok, len) = match c {
            '~' => (Tok::Not, 1),
            '&' => (Tok::And, 1),
            '|' if two('-') => (Tok::Turnstile, 2),
            '|' => (Tok::Or, 1),
            '-' if two('>') => (Tok::Imp, 2),
            '[' if two(']') => (Tok::Nec, 2),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '/' => (Tok::Slash, 1),
            ',' => (Tok::Comma, 1),
            'O' if !chars
                .get(i + 1)
                .is_some_and(|n| n.is_ascii_alphanumeric() || *n == '_') =>
            {
                (Tok::Obl, 1)
            }
            'a'..='z' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "true" | "top" => Tok::True,
                    "false" | "bot" => Tok::False,
                    _ => Tok::Ident(word),
                };
                (tok, j - i)
            }
            _ => {
                return Err(ParseError {
                    line: tl,
                    column: tc,
                    expected: vec!["a formula token".into()],
                    found: format!("character `{c}`"),
                })
            }
        };
        out.push(Spanned {
            tok,
            line: tl,
            column: tc,
        });
        i += len;
        col += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(text: &str, first_line: usize) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(text, first_line)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            column: s.column,
            expected: expected.iter().map(|e| e.to_string()).collect(),
            found: s.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Imp {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            Tok::Nec => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::atom(&name))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::top())
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::Obl => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let body = self.formula()?;
                self.expect(Tok::Slash, "`/`")?;
                let cond = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::obl(body, cond))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(self.error(&["atom", "`true`", "`false`", "`~`", "`[]`", "`O`", "`(`"])),
        }
    }

    fn formula_list(&mut self, stop: &Tok) -> Result<Vec<Formula>, ParseError> {
        let mut out = Vec::new();
        if self.peek() == stop {
            return Ok(out);
        }
        out.push(self.formula()?);
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.formula()?);
        }
        Ok(out)
    }

    fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let ante = self.formula_list(&Tok::Turnstile)?;
        if *self.peek() != Tok::Turnstile {
            return Err(self.error(&["`,`", "`|-`"]));
        }
        self.bump();
        let succ = self.formula_list(&Tok::Eof)?;
        Ok(Sequent { ante, succ })
    }

    fn finish(&mut self, what: &[&str]) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(what))
        }
    }
}

fn parse_formula_at(text: &str, line: usize) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, line)?;
    let f = p.formula()?;
    p.finish(&["end of input", "`&`", "`|`", "`->`"])?;
    Ok(f)
}

fn parse_sequent_at(text: &str, line: usize) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(text, line)?;
    let s = p.sequent()?;
    p.finish(&["end of input", "`,`"])?;
    Ok(s)
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_at(text, 1)
}

/// Parses `Γ |- Δ`; duplicates are preserved.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    parse_sequent_at(text, 1)
}

// Binding strength used by the printer.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Box(_) => 4,
        Formula::Neg(inner) if **inner != Formula::Bottom => 4,
        _ => 5,
    }
}

fn write_formula(f: &Formula, out: &mut String) {
    let wrap = |g: &Formula, paren: bool, out: &mut String| {
        if paren {
            out.push('(');
            write_formula(g, out);
            out.push(')');
        } else {
            write_formula(g, out);
        }
    };
    match f {
        Formula::Atom(a) => out.push_str(a),
        Formula::Bottom => out.push_str("false"),
        Formula::Neg(g) if **g == Formula::Bottom => out.push_str("true"),
        Formula::Neg(g) => {
            out.push('~');
            wrap(g, prec(g) < 4, out);
        }
        Formula::Box(g) => {
            out.push_str("[]");
            wrap(g, prec(g) < 4, out);
        }
        Formula::And(l, r) => {
            wrap(l, prec(l) < 3, out);
            out.push_str(" & ");
            wrap(r, prec(r) <= 3, out);
        }
        Formula::Or(l, r) => {
            wrap(l, prec(l) < 2, out);
            out.push_str(" | ");
            wrap(r, prec(r) <= 2, out);
        }
        Formula::Imp(l, r) => {
            wrap(l, prec(l) <= 1, out);
            out.push_str(" -> ");
            wrap(r, prec(r) < 1, out);
        }
        Formula::Obl(b, c) => {
            out.push_str("O(");
            write_formula(b, out);
            out.push_str(" / ");
            write_formula(c, out);
            out.push(')');
        }
    }
}

/// Minimal-parenthesis rendering; reparses to an equal formula.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

pub fn print_sequent(s: &Sequent) -> String {
    let side = |fs: &[Formula]| fs.iter().map(print_formula).collect::<Vec<_>>().join(", ");
    match (s.ante.is_empty(), s.succ.is_empty()) {
        (true, true) => "|-".to_string(),
        (true, false) => format!("|- {}", side(&s.succ)),
        (false, true) => format!("{} |-", side(&s.ante)),
        (false, false) => format!("{} |- {}", side(&s.ante), side(&s.succ)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Prove,
    Consistency,
    Countermodel,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prove" => Ok(Mode::Prove),
            "consistency" => Ok(Mode::Consistency),
            "countermodel" => Ok(Mode::Countermodel),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// A line-oriented problem file: `assume`, `goal` and `mode` directives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    /// Duplicates collapsed; first occurrence order kept.
    pub assumptions: Vec<Formula>,
    pub goal: Option<Sequent>,
    pub mode: Mode,
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let mut assumptions: Vec<Formula> = Vec::new();
    let mut goal = None;
    let mut mode = None;
    for (idx, raw) in text.split('\n').enumerate() {
        let lineno = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let offset = line.len() - trimmed.len();
        let (keyword, rest) = match trimmed.find(char::is_whitespace) {
            Some(i) => (&trimmed[..i], &trimmed[i..]),
            None => (trimmed, ""),
        };
        // Keep columns meaningful by padding the payload back to its position.
        let payload = format!("{}{}", " ".repeat(offset + keyword.len()), rest);
        let bad_keyword = || ParseError {
            line: lineno,
            column: offset + 1,
            expected: vec!["`assume`".into(), "`goal`".into(), "`mode`".into()],
            found: format!("`{keyword}`"),
        };
        match keyword {
            "assume" => {
                let f = parse_formula_at(&payload, lineno)?;
                if !assumptions.contains(&f) {
                    assumptions.push(f);
                }
            }
            "goal" => goal = Some(parse_sequent_at(&payload, lineno)?),
            "mode" => {
                let m = rest.trim().parse::<Mode>().map_err(|_| ParseError {
                    line: lineno,
                    column: offset + keyword.len() + 2,
                    expected: vec!["`prove`".into(), "`consistency`".into(), "`countermodel`".into()],
                    found: format!("`{}`", rest.trim()),
                })?;
                mode = Some(m);
            }
            _ => return Err(bad_keyword()),
        }
    }
    let mode = mode.unwrap_or(if goal.is_some() {
        Mode::Prove
    } else {
        Mode::Consistency
    });
    Ok(ProblemFile {
        assumptions,
        goal,
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn unconditional_obligation_uses_top_sugar() {
        let f = parse_formula("O(~hrm / true)").unwrap();
        assert_eq!(f, Formula::obl(Formula::neg(a("hrm")), Formula::top()));
    }

    #[test]
    fn box_and_implication() {
        assert_eq!(
            parse_formula("[](p -> q)").unwrap(),
            Formula::boxed(Formula::imp(a("p"), a("q")))
        );
        assert_eq!(
            parse_formula("p -> q -> r").unwrap(),
            Formula::imp(a("p"), Formula::imp(a("q"), a("r")))
        );
    }

    #[test]
    fn precedence_levels() {
        let f = parse_formula("~p & q | r -> s").unwrap();
        let expect = Formula::imp(
            Formula::or(Formula::and(Formula::neg(a("p")), a("q")), a("r")),
            a("s"),
        );
        assert_eq!(f, expect);
        assert_eq!(
            parse_formula("p & q & r").unwrap(),
            Formula::and(Formula::and(a("p"), a("q")), a("r"))
        );
        assert_eq!(
            parse_formula("[]~[]p").unwrap(),
            Formula::boxed(Formula::neg(Formula::boxed(a("p"))))
        );
    }

    #[test]
    fn sequents() {
        let s = parse_sequent("p, p |- q").unwrap();
        assert_eq!(s.ante, vec![a("p"), a("p")]);
        assert_eq!(s.succ, vec![a("q")]);
        let s = parse_sequent("|- false").unwrap();
        assert!(s.ante.is_empty());
        assert_eq!(s.succ, vec![Formula::Bottom]);
        let s = parse_sequent("O(bot/t) |-").unwrap();
        assert_eq!(s.ante, vec![Formula::obl(Formula::Bottom, a("t"))]);
        assert!(s.succ.is_empty());
        let s = parse_sequent("|-").unwrap();
        assert!(s.ante.is_empty() && s.succ.is_empty());
    }

    #[test]
    fn printing() {
        assert_eq!(print_formula(&Formula::obl(a("sy"), a("dhe"))), "O(sy / dhe)");
        assert_eq!(print_formula(&Formula::top()), "true");
        assert_eq!(
            print_formula(&Formula::imp(Formula::boxed(a("p")), a("p"))),
            "[]p -> p"
        );
        assert_eq!(
            print_formula(&Formula::imp(Formula::imp(a("p"), a("q")), a("r"))),
            "(p -> q) -> r"
        );
        assert_eq!(print_formula(&Formula::neg(Formula::top())), "~true");
        assert_eq!(
            print_formula(&Formula::and(a("p"), Formula::and(a("q"), a("r")))),
            "p & (q & r)"
        );
    }

    #[test]
    fn error_positions() {
        let e = parse_formula("p &").unwrap_err();
        assert_eq!((e.line, e.column), (1, 4));
        assert!(e.found.contains("end of input"));
        let e = parse_formula("O(p q)").unwrap_err();
        assert_eq!(e.column, 5);
        assert_eq!(e.expected, vec!["`/`".to_string()]);
        let e = parse_formula("P").unwrap_err();
        assert_eq!(e.column, 1);
        assert!(parse_sequent("p q |- r").is_err());
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(
            parse_formula("  O( p/q )->[] r").unwrap(),
            parse_formula("O(p / q) -> []r").unwrap()
        );
    }

    #[test]
    fn problem_files() {
        let text = "# the example\r\nassume he -> hrm\r\nassume he -> hrm\nassume O(~hrm/true)  # A\n\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.assumptions.len(), 2);
        assert_eq!(p.mode, Mode::Consistency);
        assert!(p.goal.is_none());

        let p = parse_problem("assume p\ngoal |- []p\n").unwrap();
        assert_eq!(p.mode, Mode::Prove);
        let p = parse_problem("goal |- p\nmode countermodel").unwrap();
        assert_eq!(p.mode, Mode::Countermodel);

        let e = parse_problem("assume p\nassume p &\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 11));
        let e = parse_problem("assert p").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        assert!(parse_problem("mode maybe").is_err());
    }
}
