//! Text rendering. `Display` output re-parses to an equal expression, so
//! reports and round-trip tests can use it directly.

use super::{Expr, JetIndex, Symbol};
use num_traits::{One, Signed};
use std::fmt::{self, Display, Write};

// Precedence contexts, loosest to tightest.
const CTX_ADD: u8 = 0;
const CTX_MUL: u8 = 1;
const CTX_POW: u8 = 2;

impl Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self, CTX_ADD);
        f.write_str(&s)
    }
}

fn write_expr(out: &mut String, e: &Expr, ctx: u8) {
    match e {
        Expr::Num(r) => {
            let neg = r.is_negative();
            let frac = !r.is_integer();
            let needs = (neg && ctx >= CTX_POW) || (frac && ctx >= CTX_MUL);
            if needs {
                out.push('(');
            }
            if frac {
                let _ = write!(out, "{}/{}", r.numer(), r.denom());
            } else {
                let _ = write!(out, "{}", r.numer());
            }
            if needs {
                out.push(')');
            }
        }
        Expr::Sym(s) => out.push_str(&sym_name(s)),
        Expr::Add(ts) => {
            let needs = ctx > CTX_ADD;
            if needs {
                out.push('(');
            }
            for (i, t) in ts.iter().enumerate() {
                if i > 0 {
                    // Fold a leading negative coefficient into the sign.
                    if let Some(pos) = negated(t) {
                        out.push_str(" - ");
                        write_expr(out, &pos, CTX_MUL);
                        continue;
                    }
                    out.push_str(" + ");
                }
                write_expr(out, t, CTX_MUL);
            }
            if needs {
                out.push(')');
            }
        }
        Expr::Mul(fs) => {
            let needs = ctx > CTX_MUL;
            if needs {
                out.push('(');
            }
            let mut first = true;
            for t in fs {
                if !first {
                    out.push('*');
                }
                first = false;
                write_expr(out, t, CTX_POW);
            }
            if needs {
                out.push(')');
            }
        }
        Expr::Pow(b, ex) => {
            // Power chains are right-associative; parenthesize any base that
            // is not atomic and any exponent that would not re-parse.
            match b.as_ref() {
                Expr::Sym(_) | Expr::Fun(_, _) | Expr::Call(_) => write_expr(out, b, CTX_POW),
                Expr::Num(r) if r.is_integer() && !r.is_negative() => {
                    write_expr(out, b, CTX_POW)
                }
                _ => {
                    out.push('(');
                    write_expr(out, b, CTX_ADD);
                    out.push(')');
                }
            }
            out.push('^');
            match ex.as_ref() {
                Expr::Sym(_) => write_expr(out, ex, CTX_POW),
                Expr::Num(r) if r.is_integer() => {
                    if r.is_negative() {
                        let _ = write!(out, "-{}", r.numer().magnitude());
                    } else {
                        let _ = write!(out, "{}", r.numer());
                    }
                }
                _ => {
                    out.push('(');
                    write_expr(out, ex, CTX_ADD);
                    out.push(')');
                }
            }
        }
        Expr::Fun(g, a) => {
            out.push_str(g.name());
            out.push('(');
            write_expr(out, a, CTX_ADD);
            out.push(')');
        }
        Expr::Call(c) => {
            out.push_str(&c.name);
            let total: u32 = c.deriv.iter().map(|&d| d as u32).sum();
            if total > 0 {
                if c.deriv.len() == 1 && c.deriv[0] <= 3 {
                    for _ in 0..c.deriv[0] {
                        out.push('\'');
                    }
                } else {
                    out.push_str("@[");
                    for (i, d) in c.deriv.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        let _ = write!(out, "{d}");
                    }
                    out.push(']');
                }
            }
            out.push('(');
            for (i, a) in c.args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a, CTX_ADD);
            }
            out.push(')');
        }
    }
}

/// If `t` is a product with a negative leading coefficient, return its
/// negation for sign-folded sum rendering.
fn negated(t: &Expr) -> Option<Expr> {
    match t {
        Expr::Num(r) if r.is_negative() => Some(Expr::Num(-r.clone())),
        Expr::Mul(fs) => match fs.first() {
            Some(Expr::Num(r)) if r.is_negative() => {
                let mut fs = fs.clone();
                let nr = -r.clone();
                if nr.is_one() && fs.len() > 1 {
                    fs.remove(0);
                } else {
                    fs[0] = Expr::Num(nr);
                }
                Some(if fs.len() == 1 {
                    fs.pop().unwrap()
                } else {
                    Expr::Mul(fs)
                })
            }
            _ => None,
        },
        _ => None,
    }
}

fn sym_name(s: &Symbol) -> String {
    match s {
        Symbol::Time => "t".to_string(),
        Symbol::Space(0) => "x".to_string(),
        Symbol::Space(i) => format!("x{}", i + 1),
        Symbol::Param(p) => p.to_string(),
        Symbol::Jet(j) => jet_name(j),
    }
}

fn jet_name(j: &JetIndex) -> String {
    if j.order() == 0 {
        return "u".to_string();
    }
    let mut s = String::from("u_");
    for _ in 0..j.dt {
        s.push('t');
    }
    if j.dx[1] == 0 {
        for _ in 0..j.dx[0] {
            s.push('x');
        }
    } else {
        for _ in 0..j.dx[0] {
            s.push_str("x1");
        }
        for _ in 0..j.dx[1] {
            s.push_str("x2");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn roundtrip(src: &str) {
        let e = parse(src).unwrap();
        let back = parse(&e.to_string()).unwrap();
        assert_eq!(e, back, "round trip failed for `{src}` -> `{e}`");
    }

    #[test]
    fn roundtrips() {
        for src in [
            "u_t - D(u_x)*u_xx - Q(u)",
            "(2*k+1)*u_x^(2*k)*u_xx",
            "exp(-3*t)*(u^3 - 3*u)",
            "1/2 + x^(1/2)",
            "f@[1,2](u, t) + D''(u_x)",
            "u_x1x2 + u_tx1 - u_x2^2",
            "-x^2 - 1/3",
            "lambda*(x^2 + 1)^-1",
        ] {
            roundtrip(src);
        }
    }

    #[test]
    fn jet_names_render_canonically() {
        assert_eq!(Expr::jet(0, 2, 0).to_string(), "u_xx");
        assert_eq!(Expr::jet(1, 1, 0).to_string(), "u_tx");
        assert_eq!(Expr::jet(0, 1, 1).to_string(), "u_x1x2");
        assert_eq!(Expr::jet(0, 0, 2).to_string(), "u_x2x2");
    }

    #[test]
    fn sign_folding_in_sums() {
        let e = parse("a - 2*b").unwrap();
        assert_eq!(e.to_string(), "a - 2*b");
    }
}
