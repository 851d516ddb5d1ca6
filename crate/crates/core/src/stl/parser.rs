//! Text syntax for the supported STL fragment.
//!
//! ```text
//! formula := clause ("&" clause)*
//! clause  := "F" ival atom | "G" ival atom
//!          | "F" ival "G" ival atom | "G" ival "F" ival atom
//!          | atom "U" ival atom
//! ival    := "[" num "," num "]"
//! atom    := "!"? ident | "(" ident ("&" ident)+ ")"
//! ```
//!
//! Interval bounds are seconds and must be multiples of the sampling period.
//! `a U[I] b` is rewritten to `G[I] a & F[I] b`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::formula::{AtomicProp, Formula, SubTask};
use super::TickInterval;
use crate::geometry::{Region, Workspace};
use crate::math;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormulaError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown region `{name}` at position {position}")]
    UnknownRegion { name: String, position: usize },
    #[error("nesting beyond the supported fragment at position {position}")]
    Nesting { position: usize },
    #[error("regions `{name}` do not intersect")]
    EmptyIntersection { name: String },
    #[error("interval endpoint {value} s at position {position} is not a multiple of the sampling period {tau} s")]
    NotGridAligned { value: f64, tau: f64, position: usize },
    #[error("interval at position {position} has lower bound above upper bound")]
    InvertedInterval { position: usize },
    #[error("nested sub-tasks `{first}` and `{second}` have overlapping application intervals")]
    OverlappingNested { first: String, second: String },
    #[error("formula has zero time horizon")]
    ZeroHorizon,
    #[error("sampling period must be positive and finite")]
    BadTau,
}

/// Parses `text` against the regions of `ws` with sampling period `tau`.
pub fn parse_formula(text: &str, ws: &Workspace, tau: f64) -> Result<Formula, FormulaError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(FormulaError::BadTau);
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, ws, tau };
    let mut subtasks = Vec::new();
    p.clause(&mut subtasks)?;
    loop {
        p.skip_ws();
        if p.pos >= p.src.len() {
            break;
        }
        p.expect(b'&')?;
        p.clause(&mut subtasks)?;
    }
    let formula = Formula { tau, subtasks };
    if let Err((i, j)) = formula.check_nested_disjoint() {
        return Err(FormulaError::OverlappingNested {
            first: formula.subtasks[i].display(tau).to_string(),
            second: formula.subtasks[j].display(tau).to_string(),
        });
    }
    if formula.horizon() == 0 {
        return Err(FormulaError::ZeroHorizon);
    }
    Ok(formula)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ws: &'a Workspace,
    tau: f64,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax { position: self.pos, message: message.into() })
    }

    fn expect(&mut self, c: u8) -> Result<(), FormulaError> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            Some(got) => self.syntax(alloc::format!("expected `{}`, found `{}`", c as char, got as char)),
            None => self.syntax(alloc::format!("expected `{}`, found end of input", c as char)),
        }
    }

    /// A temporal keyword is `F`, `G` or `U` directly followed by `[`.
    fn peek_operator(&mut self) -> Option<u8> {
        let c = self.peek()?;
        if !matches!(c, b'F' | b'G' | b'U') {
            return None;
        }
        let mut i = self.pos + 1;
        while i < self.src.len() && self.src[i].is_ascii_whitespace() {
            i += 1;
        }
        (self.src.get(i) == Some(&b'[')).then_some(c)
    }

    fn clause(&mut self, out: &mut Vec<SubTask>) -> Result<(), FormulaError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek_operator() {
            Some(op @ (b'F' | b'G')) => {
                self.pos += 1;
                let outer = self.interval()?;
                match self.peek_operator() {
                    Some(op2 @ (b'F' | b'G')) if op2 != op => {
                        self.pos += 1;
                        let inner = self.interval()?;
                        if self.peek_operator().is_some() {
                            return Err(FormulaError::Nesting { position: self.pos });
                        }
                        let prop = self.atom()?;
                        out.push(if op == b'F' {
                            SubTask::eventually_always(outer, inner, prop)
                        } else {
                            SubTask::always_eventually(outer, inner, prop)
                        });
                    }
                    Some(b'U') => return self.syntax("`U` needs an atom on its left"),
                    Some(_) => return Err(FormulaError::Nesting { position: self.pos }),
                    None => {
                        let prop = self.atom()?;
                        out.push(if op == b'F' {
                            SubTask::eventually(outer, prop)
                        } else {
                            SubTask::always(outer, prop)
                        });
                    }
                }
            }
            Some(_) => return self.syntax("`U` needs an atom on its left"),
            None => {
                let lhs = self.atom()?;
                if self.peek_operator() != Some(b'U') {
                    self.pos = start;
                    return self.syntax("expected `F[..]`, `G[..]` or `<atom> U[..] <atom>`");
                }
                self.pos += 1;
                let iv = self.interval()?;
                if self.peek_operator().is_some() {
                    return Err(FormulaError::Nesting { position: self.pos });
                }
                let rhs = self.atom()?;
                out.push(SubTask::always(iv, lhs));
                out.push(SubTask::eventually(iv, rhs));
            }
        }
        Ok(())
    }

    fn interval(&mut self) -> Result<TickInterval, FormulaError> {
        let at = {
            self.skip_ws();
            self.pos
        };
        self.expect(b'[')?;
        let lo = self.ticks()?;
        self.expect(b',')?;
        let hi = self.ticks()?;
        self.expect(b']')?;
        TickInterval::try_new(lo, hi).ok_or(FormulaError::InvertedInterval { position: at })
    }

    fn ticks(&mut self) -> Result<i64, FormulaError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let value: f64 = match text.parse() {
            Ok(v) if !text.is_empty() => v,
            _ => {
                self.pos = start;
                return self.syntax("expected a non-negative number");
            }
        };
        let ratio = value / self.tau;
        let ticks = math::round(ratio);
        if math::abs(ratio - ticks) > 1e-9 * ratio.max(1.0) {
            return Err(FormulaError::NotGridAligned { value, tau: self.tau, position: start });
        }
        Ok(ticks as i64)
    }

    fn ident(&mut self) -> Result<(String, usize), FormulaError> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {}
            _ => return self.syntax("expected a region name"),
        }
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("").to_string();
        Ok((name, start))
    }

    fn lookup(&self, name: &str, position: usize) -> Result<Region, FormulaError> {
        self.ws
            .region(name)
            .cloned()
            .ok_or_else(|| FormulaError::UnknownRegion { name: name.to_string(), position })
    }

    fn atom(&mut self) -> Result<AtomicProp, FormulaError> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                let (name, at) = self.ident()?;
                Ok(AtomicProp::negative(self.lookup(&name, at)?))
            }
            Some(b'(') => {
                self.pos += 1;
                let mut parts = alloc::vec![self.ident()?];
                while self.peek() == Some(b'&') {
                    self.pos += 1;
                    parts.push(self.ident()?);
                }
                self.expect(b')')?;
                if parts.len() < 2 {
                    return self.syntax("a parenthesised atom needs at least two regions");
                }
                let name = parts.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join("&");
                if let Some(r) = self.ws.region(&name) {
                    return Ok(AtomicProp::positive(r.clone()));
                }
                let mut bounds = self.lookup(&parts[0].0, parts[0].1)?.bounds;
                for (n, at) in &parts[1..] {
                    let r = self.lookup(n, *at)?;
                    bounds = match bounds.intersection(&r.bounds) {
                        Some(b) if b.is_proper() => b,
                        _ => return Err(FormulaError::EmptyIntersection { name }),
                    };
                }
                Ok(AtomicProp::positive(Region::new(name, bounds)))
            }
            _ => {
                let (name, at) = self.ident()?;
                Ok(AtomicProp::positive(self.lookup(&name, at)?))
            }
        }
    }
}
