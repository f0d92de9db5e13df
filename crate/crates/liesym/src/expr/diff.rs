//! Partial and total differentiation.

use super::{Direction, Elem, Expr, Opaque, Symbol};
use crate::{Error, Result};

impl Expr {
    /// Partial derivative with respect to one symbol. Other symbols are
    /// treated as independent; jet coordinates in particular do not
    /// differentiate through each other (that is [`total_derivative`]'s job).
    pub fn diff(&self, s: &Symbol) -> Expr {
        self.diff_raw(s).normalize()
    }

    fn diff_raw(&self, s: &Symbol) -> Expr {
        match self {
            Expr::Num(_) => Expr::zero(),
            Expr::Sym(s2) => {
                if s2 == s {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Add(ts) => Expr::Add(ts.iter().map(|t| t.diff_raw(s)).collect()),
            Expr::Mul(fs) => {
                let mut terms = Vec::with_capacity(fs.len());
                for (i, f) in fs.iter().enumerate() {
                    let mut prod = vec![f.diff_raw(s)];
                    for (j, g) in fs.iter().enumerate() {
                        if j != i {
                            prod.push(g.clone());
                        }
                    }
                    terms.push(Expr::Mul(prod));
                }
                Expr::Add(terms)
            }
            Expr::Pow(b, e) => {
                if !e.contains(s) {
                    // Power rule: e * b^(e-1) * b'.
                    Expr::mul(vec![
                        (**e).clone(),
                        Expr::pow((**b).clone(), Expr::sub((**e).clone(), Expr::one())),
                        b.diff_raw(s),
                    ])
                } else {
                    // d(b^e) = b^e * (e' log b + e b'/b).
                    Expr::mul2(
                        Expr::pow((**b).clone(), (**e).clone()),
                        Expr::add2(
                            Expr::mul2(e.diff_raw(s), Expr::log((**b).clone())),
                            Expr::mul(vec![
                                (**e).clone(),
                                b.diff_raw(s),
                                Expr::powi((**b).clone(), -1),
                            ]),
                        ),
                    )
                }
            }
            Expr::Fun(f, a) => {
                let da = a.diff_raw(s);
                let outer = match f {
                    Elem::Exp => Expr::exp((**a).clone()),
                    Elem::Log => Expr::powi((**a).clone(), -1),
                    Elem::Sin => Expr::cos((**a).clone()),
                    Elem::Cos => Expr::sin((**a).clone()).neg(),
                };
                Expr::mul2(outer, da)
            }
            Expr::Call(c) => {
                let mut terms = Vec::new();
                for (i, a) in c.args.iter().enumerate() {
                    let da = a.diff_raw(s);
                    if da.is_zero_literal() {
                        continue;
                    }
                    let mut deriv = c.deriv.clone();
                    deriv[i] += 1;
                    terms.push(Expr::mul2(
                        Expr::Call(Opaque {
                            name: c.name.clone(),
                            deriv,
                            args: c.args.clone(),
                        }),
                        da,
                    ));
                }
                if terms.is_empty() {
                    Expr::zero()
                } else {
                    Expr::Add(terms)
                }
            }
        }
    }
}

/// Total derivative along a base direction on second-order jet space:
/// `D_a = d/da + sum_J u_{J+a} d/d(u_J)` over the jet coordinates actually
/// present. Fails with [`Error::OrderOverflow`] when the expression depends
/// on a second-order coordinate, since its derivative would leave the space.
pub fn total_derivative(e: &Expr, dir: Direction) -> Result<Expr> {
    let base = match dir {
        Direction::T => Symbol::Time,
        Direction::X(i) => Symbol::Space(i),
    };
    let mut terms = vec![e.diff(&base)];
    for s in e.free_symbols() {
        let j = match s {
            Symbol::Jet(j) => j,
            _ => continue,
        };
        let partial = e.diff(&Symbol::Jet(j));
        if partial.is_zero_literal() {
            continue;
        }
        let bumped = j.bump(dir).ok_or_else(|| Error::OrderOverflow {
            coord: Expr::Sym(Symbol::Jet(j)).to_string(),
        })?;
        terms.push(Expr::mul2(partial, Expr::Sym(Symbol::Jet(bumped))));
    }
    Ok(Expr::Add(terms).normalize())
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn polynomial_rules() {
        let x = Symbol::Space(0);
        let e = parse("x^3 + 2*x").unwrap();
        assert_eq!(e.diff(&x), parse("3*x^2 + 2").unwrap());
    }

    #[test]
    fn symbolic_exponent_uses_general_rule() {
        let x = Symbol::Space(0);
        let e = parse("x^k").unwrap();
        // d/dx x^k = k x^(k-1)
        assert_eq!(e.diff(&x), parse("k*x^(k-1)").unwrap());
        // exponent depending on x takes the log form
        let e = parse("a^x").unwrap();
        assert_eq!(e.diff(&x), parse("a^x*log(a)").unwrap());
    }

    #[test]
    fn elementary_chain_rule() {
        let t = Symbol::Time;
        let e = parse("exp(-2*t)").unwrap();
        assert_eq!(e.diff(&t), parse("-2*exp(-2*t)").unwrap());
        let e = parse("log(t^2)").unwrap();
        assert_eq!(e.diff(&t), parse("2*t^-1").unwrap());
        let e = parse("sin(t)*cos(t)").unwrap();
        assert_eq!(e.diff(&t), parse("cos(t)^2 - sin(t)^2").unwrap());
    }

    #[test]
    fn opaque_chain_rule() {
        let x = Symbol::Space(0);
        let e = parse("D(u_x)").unwrap();
        // No x dependence through the argument at the partial level.
        assert_eq!(e.diff(&x), Expr::zero());
        let e = parse("D(x^2)").unwrap();
        assert_eq!(e.diff(&x), parse("2*x*D'(x^2)").unwrap());
    }

    #[test]
    fn total_derivative_promotes_jets() {
        // D_x (t*u) = t*u_x
        let e = parse("t*u").unwrap();
        let d = total_derivative(&e, Direction::X(0)).unwrap();
        assert_eq!(d, parse("t*u_x").unwrap());
        // D_t (u_x) = u_tx
        let e = parse("u_x").unwrap();
        let d = total_derivative(&e, Direction::T).unwrap();
        assert_eq!(d, parse("u_tx").unwrap());
        // D(u_x) chain-rules through the argument: D_x D(u_x) = D'(u_x)*u_xx
        let e = parse("D(u_x)").unwrap();
        let d = total_derivative(&e, Direction::X(0)).unwrap();
        assert_eq!(d, parse("D'(u_x)*u_xx").unwrap());
    }

    #[test]
    fn total_derivative_order_cap() {
        let e = parse("u_xx").unwrap();
        assert!(total_derivative(&e, Direction::X(0)).is_err());
    }
}
