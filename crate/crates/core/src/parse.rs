//! Text format: one constraint per line,
//!
//! ```text
//! # comment
//! x3 + x7 <= 5
//! -x0 <= 2
//! x1 - x2 <= -1
//! ```
//!
//! Whitespace between tokens is optional. The variable count is one more
//! than the largest index mentioned.

use thiserror::Error;

use crate::constraint::{OctConstraint, Sign};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("coefficient {0} is not -1, 0 or +1")]
    Coefficient(String),
    #[error("binary constraint mentions x{0} twice")]
    RepeatedVariable(usize),
    #[error("number {0} out of range")]
    OutOfRange(String),
    #[error("unexpected trailing input")]
    Trailing,
}

/// A parsed constraint file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct System<T> {
    pub vars: usize,
    pub constraints: Vec<OctConstraint<T>>,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.text[..self.pos].chars().count() + 1,
            kind,
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> &'a str {
        let rest = &self.text[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    /// `x<k>`, possibly preceded by a (rejected) numeric coefficient.
    fn variable(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let coefficient = self.digits();
        if !coefficient.is_empty() {
            self.skip_ws();
            if self.peek() == Some('x') {
                self.pos = start;
                return Err(self.error(ParseErrorKind::Coefficient(coefficient.to_owned())));
            }
            self.pos = start;
            return Err(self.error(ParseErrorKind::Expected("a variable x<k>")));
        }
        if !self.eat("x") {
            return Err(self.error(ParseErrorKind::Expected("a variable x<k>")));
        }
        let at = self.pos;
        let index = self.digits();
        if index.is_empty() {
            return Err(self.error(ParseErrorKind::Expected("a variable index after 'x'")));
        }
        index.parse().map_err(|_| {
            self.pos = at;
            self.error(ParseErrorKind::OutOfRange(index.to_owned()))
        })
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let negative = self.eat("-");
        self.skip_ws();
        let digits = self.digits();
        if digits.is_empty() {
            self.pos = start;
            return Err(self.error(ParseErrorKind::Expected("an integer bound")));
        }
        let text = if negative { format!("-{digits}") } else { digits.to_owned() };
        text.parse().map_err(|_| {
            self.pos = start;
            self.error(ParseErrorKind::OutOfRange(text))
        })
    }
}

fn parse_line<T: Scalar>(text: &str, line: usize) -> Result<OctConstraint<T>, ParseError> {
    let mut cur = Cursor { text, pos: 0, line };
    let first_sign = if cur.eat("-") {
        Sign::Minus
    } else {
        cur.eat("+");
        Sign::Plus
    };
    let first_at = cur.pos;
    let first = cur.variable()?;

    cur.skip_ws();
    let second = match cur.peek() {
        Some('+') | Some('-') => {
            let sign = if cur.eat("+") { Sign::Plus } else { cur.eat("-"); Sign::Minus };
            let at = cur.pos;
            let var = cur.variable()?;
            Some((sign, var, at))
        }
        _ => None,
    };

    if !cur.eat("<=") {
        return Err(cur.error(ParseErrorKind::Expected("'<='")));
    }
    let bound_at = cur.pos;
    let bound = cur.integer()?;
    cur.skip_ws();
    if cur.pos != text.len() {
        return Err(cur.error(ParseErrorKind::Trailing));
    }
    let bound = T::from_i64(bound).ok_or_else(|| {
        cur.pos = bound_at;
        cur.error(ParseErrorKind::OutOfRange(bound.to_string()))
    })?;

    match second {
        None => Ok(OctConstraint::unary(first_sign, first, bound)),
        Some((sign, var, at)) => OctConstraint::binary(first_sign, first, sign, var, bound).map_err(|_| {
            cur.pos = at.max(first_at);
            cur.error(ParseErrorKind::RepeatedVariable(var))
        }),
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Parses a single constraint such as `x3 + x7 <= 5`.
pub fn parse_constraint<T: Scalar>(line: &str) -> Result<OctConstraint<T>, ParseError> {
    parse_line(strip_comment(line).trim_end(), 1)
}

/// Parses a whole constraint file, skipping blank lines and comments.
pub fn parse_system<T: Scalar>(text: &str) -> Result<System<T>, ParseError> {
    let mut constraints = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = strip_comment(raw).trim_end();
        if body.trim().is_empty() {
            continue;
        }
        constraints.push(parse_line(body, idx + 1)?);
    }
    let vars = constraints
        .iter()
        .map(|c: &OctConstraint<T>| c.max_var() + 1)
        .max()
        .unwrap_or(0);
    Ok(System { vars, constraints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::Term;
    use proptest::prelude::*;

    fn parse(s: &str) -> Result<OctConstraint<i64>, ParseError> {
        parse_constraint(s)
    }

    #[test]
    fn binary_sum() {
        let c = parse("x3 + x7 <= 5").unwrap();
        assert_eq!(c, OctConstraint::binary(Sign::Plus, 3, Sign::Plus, 7, 5).unwrap());
    }

    #[test]
    fn negated_unary() {
        let c = parse("-x0 <= 2").unwrap();
        assert_eq!(c, OctConstraint::unary(Sign::Minus, 0, 2));
    }

    #[test]
    fn reorders_variables() {
        let c = parse("-x7 + x3 <= -4").unwrap();
        assert_eq!(c.first(), Term::new(Sign::Plus, 3));
        assert_eq!(c.second(), Some(Term::new(Sign::Minus, 7)));
        assert_eq!(*c.bound(), -4);
    }

    #[test]
    fn compact_spacing() {
        assert_eq!(parse("x0-x1<=-1").unwrap().to_string(), "x0 - x1 <= -1");
        assert_eq!(parse("  x2   <=   9   # trailing").unwrap().to_string(), "x2 <= 9");
    }

    #[test]
    fn rejects_non_unit_coefficient() {
        let err = parse("2x0 + x1 <= 3").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Coefficient("2".into()));
        assert_eq!((err.line, err.column), (1, 1));

        let err = parse("x0 + 3 x1 <= 3").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Coefficient("3".into()));
        assert_eq!(err.column, 6);
    }

    #[test]
    fn rejects_repeated_variable() {
        let err = parse("x4 - x4 <= 0").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::RepeatedVariable(4));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert_eq!(parse("x0 < 3").unwrap_err().kind, ParseErrorKind::Expected("'<='"));
        assert_eq!(parse("x0 <= ").unwrap_err().kind, ParseErrorKind::Expected("an integer bound"));
        assert_eq!(parse("y0 <= 1").unwrap_err().kind, ParseErrorKind::Expected("a variable x<k>"));
        assert_eq!(parse("x0 <= 1 2").unwrap_err().kind, ParseErrorKind::Trailing);
        assert_eq!(parse("x <= 1").unwrap_err().column, 2);
        assert!(matches!(
            parse("x0 <= 99999999999999999999").unwrap_err().kind,
            ParseErrorKind::OutOfRange(_)
        ));
        assert!(matches!(
            parse_constraint::<i32>("x0 <= 5000000000").unwrap_err().kind,
            ParseErrorKind::OutOfRange(_)
        ));
    }

    #[test]
    fn system_skips_comments_and_blanks() {
        let text = "# header\n\nx0 + x1 <= 3\n   \nx0 - x3 <= 0 # note\n";
        let sys = parse_system::<i64>(text).unwrap();
        assert_eq!(sys.vars, 4);
        assert_eq!(sys.constraints.len(), 2);
        assert_eq!(parse_system::<i64>("").unwrap().vars, 0);
    }

    #[test]
    fn system_reports_line_numbers() {
        let err = parse_system::<i64>("x0 <= 1\n\nx1 +  <= 2\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.column, 7);
        assert_eq!(err.to_string(), "line 3, column 7: expected a variable x<k>");
    }

    proptest! {
        #[test]
        fn display_parses_back(a in any::<bool>(), i in 0usize..20, b in prop::option::of((any::<bool>(), 0usize..20)), d in -1000i64..1000) {
            let s = |p: bool| if p { Sign::Plus } else { Sign::Minus };
            let c = match b {
                Some((b, j)) if j != i => OctConstraint::binary(s(a), i, s(b), j, d).unwrap(),
                _ => OctConstraint::unary(s(a), i, d),
            };
            prop_assert_eq!(parse(&c.to_string()).unwrap(), c);
        }
    }
}
