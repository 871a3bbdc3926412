//! Set expressions.
//!
//! ```text
//! expr   := inter ('|' inter)*
//! inter  := trans ('&' trans)*
//! trans  := scaled (('+' | '-') int)*
//! scaled := int '*' scaled | atom
//! atom   := int | '{' [int (',' int)*] '}' | 'geo(' int ',' int ',' int ',' int ')'
//!         | 'ap(' int ',' int ')' | '(' expr ')'
//! ```
//!
//! A bare integer denotes a singleton. Translation binds looser than scaling,
//! so `3*A+1` is `(3*A)+1`.

use std::fmt;

use num_bigint::BigInt;
use thinlab_core::symbolic::{SymbolicError, SymbolicSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    /// The message followed by the input with a caret under the offending column.
    pub fn render(&self, input: &str) -> String {
        let col = input[..self.position.min(input.len())].chars().count();
        format!("{}\n  {}\n  {}^", self, input, " ".repeat(col))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at column {}: {}",
            self.position + 1,
            self.message
        )
    }
}

impl std::error::Error for ParseError {}

pub fn parse(input: &str, base: u32) -> Result<SymbolicSet, ParseError> {
    SymbolicSet::empty(base).map_err(|e| ParseError {
        position: 0,
        message: e.to_string(),
    })?;
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
        base,
    };
    let set = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(set)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    base: u32,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.into(),
        }
    }

    fn at(&self, start: usize) -> impl Fn(SymbolicError) -> ParseError {
        move |e| ParseError {
            position: start,
            message: e.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn starts_int(&mut self) -> bool {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => true,
            Some(b'-') => self.src.get(self.pos + 1).is_some_and(u8::is_ascii_digit),
            _ => false,
        }
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return Err(self.error("expected an integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(text.parse().expect("digits"))
    }

    fn expr(&mut self) -> Result<SymbolicSet, ParseError> {
        let mut acc = self.inter()?;
        while self.peek() == Some(b'|') {
            let start = self.pos;
            self.pos += 1;
            let rhs = self.inter()?;
            acc = acc.union(&rhs).map_err(self.at(start))?;
        }
        Ok(acc)
    }

    fn inter(&mut self) -> Result<SymbolicSet, ParseError> {
        let mut acc = self.trans()?;
        while self.peek() == Some(b'&') {
            let start = self.pos;
            self.pos += 1;
            let rhs = self.trans()?;
            acc = acc.intersect(&rhs).map_err(self.at(start))?;
        }
        Ok(acc)
    }

    fn trans(&mut self) -> Result<SymbolicSet, ParseError> {
        let mut acc = self.scaled()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.translate(&self.int()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.translate(&-self.int()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn scaled(&mut self) -> Result<SymbolicSet, ParseError> {
        if self.starts_int() {
            let start = self.pos;
            let k = self.int()?;
            if self.eat(b'*') {
                let inner = self.scaled()?;
                return inner.scale(&k).map_err(self.at(start));
            }
            return SymbolicSet::finite(self.base, [k]).map_err(self.at(start));
        }
        self.atom()
    }

    fn args(&mut self, n: usize) -> Result<Vec<BigInt>, ParseError> {
        self.expect(b'(')?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                self.expect(b',')?;
            }
            out.push(self.int()?);
        }
        self.expect(b')')?;
        Ok(out)
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        if rest.starts_with(word.as_bytes()) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn atom(&mut self) -> Result<SymbolicSet, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'{') => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.eat(b'}') {
                    loop {
                        items.push(self.int()?);
                        if self.eat(b'}') {
                            break;
                        }
                        self.expect(b',')?;
                    }
                }
                SymbolicSet::finite(self.base, items).map_err(self.at(start))
            }
            _ if self.keyword("geo") => {
                let a = self.args(4)?;
                let n0 = u64::try_from(&a[3]).map_err(|_| ParseError {
                    position: start,
                    message: format!("start index {} must be a nonnegative integer", a[3]),
                })?;
                SymbolicSet::geo(self.base, a[0].clone(), a[1].clone(), a[2].clone(), n0)
                    .map_err(self.at(start))
            }
            _ if self.keyword("ap") => {
                let a = self.args(2)?;
                SymbolicSet::ap(self.base, a[0].clone(), a[1].clone()).map_err(self.at(start))
            }
            Some(_) => Err(self.error("expected a set expression")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SymbolicSet {
        parse(s, 2).unwrap()
    }

    #[test]
    fn atoms() {
        assert_eq!(p("{3, 1,2}"), SymbolicSet::finite(2, [1, 2, 3]).unwrap());
        assert_eq!(p("{}"), SymbolicSet::empty(2).unwrap());
        assert_eq!(p("7"), SymbolicSet::finite(2, [7]).unwrap());
        assert_eq!(p("geo(2,1,0,0)"), SymbolicSet::geo(2, 2, 1, 0, 0).unwrap());
        assert_eq!(p("ap(2,0)"), SymbolicSet::ap(2, 2, 0).unwrap());
    }

    #[test]
    fn precedence() {
        let g = SymbolicSet::geo(2, 2, 1, 0, 0).unwrap();
        let h = g.scale(&BigInt::from(3)).unwrap();
        assert_eq!(p("3*geo(2,1,0,0)+1"), h.translate(&BigInt::from(1)));
        assert_eq!(
            p("3*geo(2,1,0,0) | (3*geo(2,1,0,0)+1)"),
            h.union(&h.translate(&BigInt::from(1))).unwrap()
        );
        assert_eq!(
            p("{1,2} | {3} & {3,4}"),
            SymbolicSet::finite(2, [1, 2, 3]).unwrap()
        );
        assert_eq!(
            p("({1,2} | {3}) & {3,4}"),
            SymbolicSet::finite(2, [3]).unwrap()
        );
        assert_eq!(p("{5} - 2 + -1"), SymbolicSet::finite(2, [2]).unwrap());
        assert_eq!(p("-2*{1} - 3"), SymbolicSet::finite(2, [-5]).unwrap());
        assert_eq!(p("2*3*{1}"), SymbolicSet::finite(2, [6]).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("geo(2,1,0", 2).unwrap_err();
        assert_eq!(e.position, 9);
        assert!(e.render("geo(2,1,0").ends_with("         ^"));
        assert_eq!(parse("{1,2} |", 2).unwrap_err().position, 7);
        assert_eq!(parse("{1,,2}", 2).unwrap_err().position, 3);
        assert_eq!(parse("{1} {2}", 2).unwrap_err().position, 4);
        assert_eq!(parse("0*{1}", 2).unwrap_err().position, 0);
        assert_eq!(parse("{1} | geo(3,1,0,0)", 2).unwrap_err().position, 6);
        assert!(parse("ap(0,1)", 2).is_err());
        assert!(parse("geo(2,1,0,-1)", 2).is_err());
    }

    #[test]
    fn canonical_prints_reparse() {
        for s in [
            "geo(2,1,0,0)",
            "3*geo(2,1,0,0) | (3*geo(2,1,0,0)+1)",
            "geo(4,-3,5,2) | {1,-9} | ap(6,1) | ap(4,0)",
            "geo(2,1,0,0) & ap(3,1)",
            "{}",
        ] {
            let a = p(s);
            assert_eq!(p(&a.to_string()), a, "{s}");
        }
    }
}
