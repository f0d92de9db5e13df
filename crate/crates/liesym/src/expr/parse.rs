//! Expression parser.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?            // right-associative
//! atom   := integer | ident suffix? call? | '(' expr ')'
//! suffix := '\''+ | '@' '[' integer (',' integer)* ']'
//! call   := '(' expr (',' expr)* ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)` and `2^-3`
//! parses. Identifiers resolve as: `t` the time variable; `x`/`x1`/`x2`
//! space variables; `u` and `u_<idx>` jet coordinates (the index lists `t`
//! and axis-tagged `x` letters, time first: `u_t`, `u_x`, `u_xx`, `u_tx1`,
//! `u_x1x2`, ...); `exp`, `log`, `sin`, `cos` applied to one argument; any
//! other identifier followed by `(` an opaque function application; anything
//! else a free parameter. Primes (`D'`) mark derivatives of one-argument
//! opaque functions; `f@[1,0]` gives the derivative multi-index of a
//! multi-argument one.

use super::{Elem, Expr, JetIndex, Symbol};
use crate::{Error, Result};

pub fn parse(input: &str) -> Result<Expr> {
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e.normalize())
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    terms.push(self.term()?.neg());
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.unary()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    factors.push(self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    factors.push(Expr::pow(d, Expr::num(-1)));
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Mul(factors)
        })
    }

    fn unary(&mut self) -> Result<Expr> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.unary()?;
            return Ok(Expr::pow(base, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.err("expected a number, identifier, or `(`")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let n: num_bigint::BigInt = s
            .parse()
            .map_err(|_| self.err("invalid integer literal"))?;
        Ok(Expr::Num(super::Rat::from(n)))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .to_string();

        // Derivative suffix: primes or an explicit multi-index.
        let mut primes = 0u8;
        while self.peek() == Some(b'\'') {
            self.pos += 1;
            primes += 1;
        }
        let mut multi: Option<Vec<u8>> = None;
        if primes == 0 && self.peek() == Some(b'@') {
            self.pos += 1;
            self.expect(b'[')?;
            let mut idx = Vec::new();
            loop {
                self.skip_ws();
                let d = self.small_uint()?;
                idx.push(d);
                if !self.eat(b',') {
                    break;
                }
            }
            self.expect(b']')?;
            multi = Some(idx);
        }

        let has_call = {
            let save = self.pos;
            let is = self.eat(b'(');
            if is {
                self.pos = save;
            }
            is
        };

        if has_call {
            self.expect(b'(')?;
            let mut args = vec![self.expr()?];
            while self.eat(b',') {
                args.push(self.expr()?);
            }
            self.expect(b')')?;

            if let Some(f) = Elem::from_name(&name) {
                if primes > 0 || multi.is_some() {
                    return Err(self.err("elementary functions take no derivative suffix"));
                }
                if args.len() != 1 {
                    return Err(self.err("elementary functions take one argument"));
                }
                return Ok(Expr::fun(f, args.pop().unwrap()));
            }

            let deriv = match multi {
                Some(idx) => {
                    if idx.len() != args.len() {
                        return Err(self.err("derivative multi-index arity mismatch"));
                    }
                    idx
                }
                None => {
                    if primes > 0 && args.len() != 1 {
                        return Err(self.err("prime derivatives need a one-argument function"));
                    }
                    let mut d = vec![0; args.len()];
                    if primes > 0 {
                        d[0] = primes;
                    }
                    d
                }
            };
            return Ok(Expr::call_deriv(&name, deriv, args));
        }

        if primes > 0 || multi.is_some() {
            return Err(self.err("derivative suffix requires a function application"));
        }
        self.resolve_name(&name)
    }

    fn small_uint(&mut self) -> Result<u8> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("derivative order too large"))
    }

    fn resolve_name(&self, name: &str) -> Result<Expr> {
        match name {
            "t" => return Ok(Expr::t()),
            "x" | "x1" => return Ok(Expr::x(0)),
            "x2" => return Ok(Expr::x(1)),
            "u" => return Ok(Expr::u()),
            _ => {}
        }
        if let Some(suffix) = name.strip_prefix("u_") {
            return self
                .parse_jet_suffix(suffix)
                .ok_or_else(|| self.err(&format!("invalid jet coordinate `{name}`")));
        }
        Ok(Expr::param(name))
    }

    fn parse_jet_suffix(&self, suffix: &str) -> Option<Expr> {
        let mut idx = JetIndex::U;
        let mut chars = suffix.chars().peekable();
        let mut seen_x = false;
        while let Some(c) = chars.next() {
            match c {
                't' => {
                    if seen_x {
                        return None; // canonical order lists t first
                    }
                    idx.dt += 1;
                }
                'x' => {
                    seen_x = true;
                    let axis = match chars.peek() {
                        Some('1') => {
                            chars.next();
                            0
                        }
                        Some('2') => {
                            chars.next();
                            1
                        }
                        _ => 0,
                    };
                    idx.dx[axis] += 1;
                }
                _ => return None,
            }
        }
        if idx.order() == 0 || idx.order() > 2 {
            return None;
        }
        // Mixed-axis order must be canonical: x1 before x2.
        Some(Expr::Sym(Symbol::Jet(idx)))
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn parses_jet_names() {
        assert_eq!(parse("u_t").unwrap(), Expr::jet(1, 0, 0));
        assert_eq!(parse("u_x").unwrap(), Expr::jet(0, 1, 0));
        assert_eq!(parse("u_xx").unwrap(), Expr::jet(0, 2, 0));
        assert_eq!(parse("u_x1x2").unwrap(), Expr::jet(0, 1, 1));
        assert_eq!(parse("u_tx1").unwrap(), Expr::jet(1, 1, 0));
        assert!(parse("u_xt").is_err());
        assert!(parse("u_xxx").is_err());
    }

    #[test]
    fn precedence_and_unary_minus() {
        // -x^2 is -(x^2)
        let e = parse("-x^2").unwrap();
        let want = Expr::powi(Expr::x(0), 2).neg().normalize();
        assert_eq!(e, want);
        // 2^-2 folds to 1/4
        assert_eq!(parse("2^-2").unwrap(), Expr::ratio(1, 4));
        // right associativity: 2^3^2 = 512
        assert_eq!(parse("2^3^2").unwrap(), Expr::num(512));
    }

    #[test]
    fn division_makes_rationals() {
        assert_eq!(parse("3/6").unwrap(), Expr::ratio(1, 2));
    }

    #[test]
    fn opaque_calls_and_derivatives() {
        let e = parse("D'(u_x)").unwrap();
        assert_eq!(
            e,
            Expr::call_deriv("D", vec![1], vec![Expr::jet(0, 1, 0)])
        );
        let e = parse("f@[1,0](u, t)").unwrap();
        assert_eq!(
            e,
            Expr::call_deriv("f", vec![1, 0], vec![Expr::u(), Expr::t()])
        );
        assert!(parse("f@[1](u, t)").is_err());
    }

    #[test]
    fn elementary_functions() {
        assert_eq!(parse("exp(0)").unwrap(), Expr::one());
        assert_eq!(parse("cos(0)").unwrap(), Expr::one());
        assert!(parse("exp'(t)").is_err());
    }

    #[test]
    fn parameters_fall_through() {
        assert_eq!(parse("W").unwrap(), Expr::param("W"));
        assert_eq!(parse("lambda").unwrap(), Expr::param("lambda"));
        assert_eq!(parse("eps1").unwrap(), Expr::param("eps1"));
    }

    #[test]
    fn rejects_trailing_garbage() {
        assert!(parse("x + ").is_err());
        assert!(parse("x )").is_err());
    }
}
