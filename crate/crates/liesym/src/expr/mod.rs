//! Symbolic expression kernel.
//!
//! Expressions are immutable trees over exact rational scalars, symbols
//! (base variables, jet coordinates, parameters), n-ary sums and products,
//! powers, the elementary functions `exp/log/sin/cos`, and opaque function
//! applications annotated with a partial-derivative multi-index.
//!
//! All operations are pure: they take `&Expr` and return new normalized
//! expressions, so values are safe to share across threads.

mod diff;
mod eval;
mod normalize;
mod parse;
mod render;
mod sampler;

pub use diff::total_derivative;
pub use eval::{eval_f64, eval_rat, ExactEnv, FloatEnv};
pub use parse::parse;
pub use sampler::{is_zero, SamplerConfig, Witness, ZeroReport};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeSet;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Integer-valued rational.
pub fn rat(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Rational `n/d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Float view of a rational, exact to one ulp.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A base-variable direction on jet space: time or one of the space axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    T,
    X(u8),
}

/// Derivative multi-index of the dependent variable, total order <= 2.
/// Mixed derivatives are stored once; `dx` is indexed by space axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetIndex {
    pub dt: u8,
    pub dx: [u8; 2],
}

impl JetIndex {
    pub const U: JetIndex = JetIndex { dt: 0, dx: [0, 0] };

    pub fn of(dt: u8, dx1: u8, dx2: u8) -> Self {
        JetIndex { dt, dx: [dx1, dx2] }
    }

    pub fn order(&self) -> u8 {
        self.dt + self.dx[0] + self.dx[1]
    }

    /// Increment along a direction; `None` once the order would exceed 2.
    pub fn bump(&self, dir: Direction) -> Option<JetIndex> {
        if self.order() >= 2 {
            return None;
        }
        let mut j = *self;
        match dir {
            Direction::T => j.dt += 1,
            Direction::X(i) => j.dx[i as usize] += 1,
        }
        Some(j)
    }
}

/// A symbol: base variable, jet coordinate, or free parameter.
///
/// Parameter symbols also stand in for classification constants
/// (`k`, `m`, `lambda`, `eps1`, ...) and for the gradient-square slot `W`
/// used by two-dimensional diffusivities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Time,
    Space(u8),
    Jet(JetIndex),
    Param(Box<str>),
}

impl Symbol {
    pub fn param(name: &str) -> Symbol {
        Symbol::Param(name.into())
    }

    pub fn u() -> Symbol {
        Symbol::Jet(JetIndex::U)
    }

    pub fn jet(dt: u8, dx1: u8, dx2: u8) -> Symbol {
        Symbol::Jet(JetIndex::of(dt, dx1, dx2))
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Symbol::Jet(_))
    }
}

/// Elementary unary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Exp,
    Log,
    Sin,
    Cos,
}

impl Elem {
    pub fn name(&self) -> &'static str {
        match self {
            Elem::Exp => "exp",
            Elem::Log => "log",
            Elem::Sin => "sin",
            Elem::Cos => "cos",
        }
    }

    pub fn from_name(s: &str) -> Option<Elem> {
        match s {
            "exp" => Some(Elem::Exp),
            "log" => Some(Elem::Log),
            "sin" => Some(Elem::Sin),
            "cos" => Some(Elem::Cos),
            _ => None,
        }
    }
}

/// Opaque function application `f(args...)` with a partial-derivative
/// multi-index over the argument slots. `D(u_x)` with `deriv = [1]` is
/// `D'(u_x)`; sampled values of distinct multi-indices are independent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Opaque {
    pub name: Box<str>,
    pub deriv: Vec<u8>,
    pub args: Vec<Expr>,
}

/// Symbolic expression tree. Construct via the helper methods and the
/// parser; keep trees normalized through [`Expr::normalize`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Num(Rat),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Fun(Elem, Box<Expr>),
    Call(Opaque),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(Rat::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Rat::one())
    }

    pub fn num(n: i64) -> Expr {
        Expr::Num(rat(n))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::Num(ratio(n, d))
    }

    pub fn sym(s: Symbol) -> Expr {
        Expr::Sym(s)
    }

    pub fn param(name: &str) -> Expr {
        Expr::Sym(Symbol::param(name))
    }

    pub fn t() -> Expr {
        Expr::Sym(Symbol::Time)
    }

    pub fn x(i: u8) -> Expr {
        Expr::Sym(Symbol::Space(i))
    }

    pub fn u() -> Expr {
        Expr::Sym(Symbol::u())
    }

    pub fn jet(dt: u8, dx1: u8, dx2: u8) -> Expr {
        Expr::Sym(Symbol::jet(dt, dx1, dx2))
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        Expr::Add(terms)
    }

    pub fn add2(a: Expr, b: Expr) -> Expr {
        Expr::Add(vec![a, b])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Add(vec![a, b.neg()])
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        Expr::Mul(factors)
    }

    pub fn mul2(a: Expr, b: Expr) -> Expr {
        Expr::Mul(vec![a, b])
    }

    pub fn neg(self) -> Expr {
        Expr::Mul(vec![Expr::num(-1), self])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Mul(vec![a, Expr::Pow(Box::new(b), Box::new(Expr::num(-1)))])
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        Expr::Pow(Box::new(base), Box::new(exponent))
    }

    pub fn powi(base: Expr, n: i64) -> Expr {
        Expr::pow(base, Expr::num(n))
    }

    pub fn powr(base: Expr, r: Rat) -> Expr {
        Expr::pow(base, Expr::Num(r))
    }

    pub fn fun(f: Elem, arg: Expr) -> Expr {
        Expr::Fun(f, Box::new(arg))
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::fun(Elem::Exp, arg)
    }

    pub fn log(arg: Expr) -> Expr {
        Expr::fun(Elem::Log, arg)
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::fun(Elem::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::fun(Elem::Cos, arg)
    }

    pub fn call(name: &str, args: Vec<Expr>) -> Expr {
        let deriv = vec![0; args.len()];
        Expr::Call(Opaque {
            name: name.into(),
            deriv,
            args,
        })
    }

    pub fn call_deriv(name: &str, deriv: Vec<u8>, args: Vec<Expr>) -> Expr {
        assert_eq!(deriv.len(), args.len());
        Expr::Call(Opaque {
            name: name.into(),
            deriv,
            args,
        })
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_one())
    }

    pub fn as_num(&self) -> Option<&Rat> {
        match self {
            Expr::Num(r) => Some(r),
            _ => None,
        }
    }

    /// Integer value of a literal exponent, if it is one.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Expr::Num(r) if r.is_integer() => r.numer().to_i64(),
            _ => None,
        }
    }

    /// Collect all free symbols in the tree (opaque names are not symbols).
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Add(ts) | Expr::Mul(ts) => {
                for t in ts {
                    t.collect_symbols(out);
                }
            }
            Expr::Pow(b, e) => {
                b.collect_symbols(out);
                e.collect_symbols(out);
            }
            Expr::Fun(_, a) => a.collect_symbols(out),
            Expr::Call(c) => {
                for a in &c.args {
                    a.collect_symbols(out);
                }
            }
        }
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Sym(s2) => s2 == s,
            Expr::Add(ts) | Expr::Mul(ts) => ts.iter().any(|t| t.contains(s)),
            Expr::Pow(b, e) => b.contains(s) || e.contains(s),
            Expr::Fun(_, a) => a.contains(s),
            Expr::Call(c) => c.args.iter().any(|a| a.contains(s)),
        }
    }

    /// True when the tree contains an elementary function, an opaque call,
    /// or a power with a non-integer exponent, forcing float evaluation in
    /// identity tests.
    pub fn needs_float(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Sym(_) => false,
            Expr::Add(ts) | Expr::Mul(ts) => ts.iter().any(|t| t.needs_float()),
            Expr::Pow(b, e) => e.as_integer().is_none() || b.needs_float() || e.needs_float(),
            Expr::Fun(_, _) | Expr::Call(_) => true,
        }
    }

    /// Simultaneous substitution of symbols by expressions; the result is
    /// normalized. Substituted expressions are not re-scanned, so the
    /// bindings are treated as acyclic.
    pub fn substitute(&self, bindings: &std::collections::BTreeMap<Symbol, Expr>) -> Expr {
        self.substitute_raw(bindings).normalize()
    }

    fn substitute_raw(&self, bindings: &std::collections::BTreeMap<Symbol, Expr>) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Sym(s) => bindings.get(s).cloned().unwrap_or_else(|| self.clone()),
            Expr::Add(ts) => Expr::Add(ts.iter().map(|t| t.substitute_raw(bindings)).collect()),
            Expr::Mul(ts) => Expr::Mul(ts.iter().map(|t| t.substitute_raw(bindings)).collect()),
            Expr::Pow(b, e) => Expr::pow(b.substitute_raw(bindings), e.substitute_raw(bindings)),
            Expr::Fun(f, a) => Expr::fun(*f, a.substitute_raw(bindings)),
            Expr::Call(c) => Expr::Call(Opaque {
                name: c.name.clone(),
                deriv: c.deriv.clone(),
                args: c.args.iter().map(|a| a.substitute_raw(bindings)).collect(),
            }),
        }
    }

    /// Substitute a single symbol.
    pub fn subst(&self, s: &Symbol, value: &Expr) -> Expr {
        let mut m = std::collections::BTreeMap::new();
        m.insert(s.clone(), value.clone());
        self.substitute(&m)
    }
}

/// Jet space: base variables `(t, x_1..x_n)`, the dependent variable `u`,
/// and its derivative coordinates up to total order 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JetSpace {
    pub dim: u8,
}

impl JetSpace {
    pub fn new(dim: u8) -> JetSpace {
        assert!(dim == 1 || dim == 2, "space dimension must be 1 or 2");
        JetSpace { dim }
    }

    pub fn directions(&self) -> Vec<Direction> {
        let mut v = vec![Direction::T];
        for i in 0..self.dim {
            v.push(Direction::X(i));
        }
        v
    }

    pub fn space_directions(&self) -> Vec<Direction> {
        (0..self.dim).map(Direction::X).collect()
    }

    /// All jet indices of total order 1..=2 on this space.
    pub fn jet_indices(&self) -> Vec<JetIndex> {
        let mut out = Vec::new();
        let nx = self.dim as usize;
        for dt in 0..=2u8 {
            for dx1 in 0..=2u8 {
                for dx2 in 0..=2u8 {
                    if nx < 2 && dx2 > 0 {
                        continue;
                    }
                    let j = JetIndex::of(dt, dx1, dx2);
                    let o = j.order();
                    if o >= 1 && o <= 2 {
                        out.push(j);
                    }
                }
            }
        }
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_index_bump_caps_order() {
        let j = JetIndex::of(0, 1, 0);
        assert_eq!(j.bump(Direction::X(0)), Some(JetIndex::of(0, 2, 0)));
        assert_eq!(JetIndex::of(0, 2, 0).bump(Direction::T), None);
    }

    #[test]
    fn free_symbols_walks_everything() {
        let e = Expr::add2(
            Expr::mul2(Expr::t(), Expr::u()),
            Expr::pow(Expr::param("k"), Expr::x(0)),
        );
        let syms = e.free_symbols();
        assert!(syms.contains(&Symbol::Time));
        assert!(syms.contains(&Symbol::u()));
        assert!(syms.contains(&Symbol::param("k")));
        assert!(syms.contains(&Symbol::Space(0)));
    }
}
