//! Canonical normalization.
//!
//! The normal form is a flattened sum of monomials: each monomial is a
//! product `[coefficient, factor, factor, ...]` with sorted factors, powers
//! carrying neither exponent 0 nor 1, and exponential factors merged
//! (`exp(a)*exp(b) -> exp(a+b)`, `exp(c*log(b)) -> b^c`). Products
//! distribute over sums and small integer powers of sums expand, so
//! normalization is idempotent and structural equality is a useful (though
//! incomplete) identity check; the complete check is randomized evaluation
//! in [`super::is_zero`].
//!
//! Power rewrites (`(b^p)^q -> b^(p*q)`, `(a*b)^e -> a^e * b^e`,
//! `log(b^e) -> e*log(b)`) assume symbols range over the positive orthant,
//! matching the sampler's default ranges; jet coordinates are kept away
//! from singular sets by the same convention.

use super::{Elem, Expr, Opaque, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

impl Expr {
    /// Canonical normal form. Idempotent: `e.normalize().normalize()`
    /// is structurally equal to `e.normalize()`.
    pub fn normalize(&self) -> Expr {
        norm(self.clone())
    }
}

fn rat_pow(r: &Rat, n: i64) -> Rat {
    let m = n.unsigned_abs() as u32;
    let num = r.numer().pow(m);
    let den = r.denom().pow(m);
    if n >= 0 {
        Rat::new(num, den)
    } else {
        Rat::new(den, num)
    }
}

fn norm(e: Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Sym(_) => e,
        Expr::Add(ts) => {
            let ts: Vec<Expr> = ts.into_iter().map(norm).collect();
            collect_sum(ts)
        }
        Expr::Mul(fs) => {
            let fs: Vec<Expr> = fs.into_iter().map(norm).collect();
            norm_mul(fs)
        }
        Expr::Pow(b, ex) => norm_pow(norm(*b), norm(*ex)),
        Expr::Fun(f, a) => norm_fun(f, norm(*a)),
        Expr::Call(c) => Expr::Call(Opaque {
            name: c.name,
            deriv: c.deriv,
            args: c.args.into_iter().map(norm).collect(),
        }),
    }
}

/// Sum of normalized terms: flatten, split into (coefficient, monomial),
/// merge like monomials, rebuild sorted.
fn collect_sum(terms: Vec<Expr>) -> Expr {
    let mut flat = Vec::with_capacity(terms.len());
    for t in terms {
        if let Expr::Add(inner) = t {
            flat.extend(inner);
        } else {
            flat.push(t);
        }
    }
    let mut acc: BTreeMap<Expr, Rat> = BTreeMap::new();
    for t in flat {
        let (c, mono) = split_term(t);
        if c.is_zero() {
            continue;
        }
        let entry = acc.entry(mono).or_insert_with(Rat::zero);
        *entry += c;
    }
    let mut out = Vec::new();
    for (mono, c) in acc {
        if c.is_zero() {
            continue;
        }
        out.push(rebuild_term(c, mono));
    }
    out.sort();
    match out.len() {
        0 => Expr::zero(),
        1 => out.into_iter().next().unwrap(),
        _ => Expr::Add(out),
    }
}

/// Split a normalized non-Add term into (rational coefficient, monomial).
/// The monomial for a pure number is `1`.
fn split_term(t: Expr) -> (Rat, Expr) {
    match t {
        Expr::Num(r) => (r, Expr::one()),
        Expr::Mul(fs) => {
            if let Some(Expr::Num(_)) = fs.first() {
                let mut it = fs.into_iter();
                let c = match it.next() {
                    Some(Expr::Num(r)) => r,
                    _ => unreachable!(),
                };
                let rest: Vec<Expr> = it.collect();
                let mono = match rest.len() {
                    0 => Expr::one(),
                    1 => rest.into_iter().next().unwrap(),
                    _ => Expr::Mul(rest),
                };
                (c, mono)
            } else {
                (Rat::one(), Expr::Mul(fs))
            }
        }
        other => (Rat::one(), other),
    }
}

fn rebuild_term(c: Rat, mono: Expr) -> Expr {
    if mono.is_one_literal() {
        return Expr::Num(c);
    }
    if c.is_one() {
        return mono;
    }
    let mut fs = vec![Expr::Num(c)];
    if let Expr::Mul(inner) = mono {
        fs.extend(inner);
    } else {
        fs.push(mono);
    }
    Expr::Mul(fs)
}

/// Product of normalized factors. Distributes over sums, merges powers of
/// equal bases, folds numeric factors, and combines exponentials.
fn norm_mul(factors: Vec<Expr>) -> Expr {
    let mut flat = Vec::with_capacity(factors.len());
    for f in factors {
        if let Expr::Mul(inner) = f {
            flat.extend(inner);
        } else {
            flat.push(f);
        }
    }
    if flat.iter().any(|f| matches!(f, Expr::Add(_))) {
        // Distribute: the product of sums becomes a sum of products.
        let mut products: Vec<Vec<Expr>> = vec![Vec::new()];
        for f in flat {
            match f {
                Expr::Add(ts) => {
                    let mut next = Vec::with_capacity(products.len() * ts.len());
                    for p in &products {
                        for t in &ts {
                            let mut q = p.clone();
                            q.push(t.clone());
                            next.push(q);
                        }
                    }
                    products = next;
                }
                other => {
                    for p in &mut products {
                        p.push(other.clone());
                    }
                }
            }
        }
        let terms: Vec<Expr> = products.into_iter().map(norm_mul).collect();
        return collect_sum(terms);
    }
    combine_factors(flat)
}

/// Combine a flat, Add-free, Mul-free factor list.
fn combine_factors(factors: Vec<Expr>) -> Expr {
    let mut coeff = Rat::one();
    let mut bases: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    let mut exp_args: Vec<Expr> = Vec::new();

    let mut queue = factors;
    while let Some(f) = queue.pop() {
        match f {
            Expr::Num(r) => {
                if r.is_zero() {
                    return Expr::zero();
                }
                coeff *= r;
            }
            Expr::Fun(Elem::Exp, a) => exp_args.push(*a),
            Expr::Pow(b, e) => match *b {
                Expr::Fun(Elem::Exp, a) => {
                    exp_args.push(norm_mul(vec![*a, *e]));
                }
                base => bases.entry(base).or_default().push(*e),
            },
            Expr::Mul(inner) => queue.extend(inner),
            other => bases.entry(other).or_default().push(Expr::one()),
        }
    }

    // Merged exponential factor, if any.
    if !exp_args.is_empty() {
        let arg = collect_sum(exp_args);
        let efs = norm_exp(arg);
        // The rewrite may produce powers (from exp(c*log b)); fold them in.
        let mut redo: Vec<Expr> = Vec::new();
        for ef in efs {
            if !ef.is_one_literal() {
                redo.push(ef);
            }
        }
        if !redo.is_empty() {
            // Re-enter with the merged exponential plus the other factors.
            let mut all: Vec<Expr> = vec![Expr::Num(coeff)];
            for (base, exps) in bases {
                let ex = collect_sum(exps);
                all.push(norm_pow(base, ex));
            }
            all.extend(redo);
            return combine_simple(all);
        }
    }

    let mut out: Vec<Expr> = Vec::new();
    for (base, exps) in bases {
        let ex = collect_sum(exps);
        match pow_or_fold(base, ex, &mut coeff) {
            Some(f) => out.push(f),
            None => {}
        }
    }
    finish_mul(coeff, out)
}

/// Like `combine_factors`, but assumes exponential merging already ran;
/// only folds numbers and merges equal bases.
fn combine_simple(factors: Vec<Expr>) -> Expr {
    let mut coeff = Rat::one();
    let mut bases: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    let mut plain: Vec<Expr> = Vec::new();
    for f in factors {
        match f {
            Expr::Num(r) => {
                if r.is_zero() {
                    return Expr::zero();
                }
                coeff *= r;
            }
            Expr::Pow(b, e) => bases.entry(*b).or_default().push(*e),
            Expr::Fun(Elem::Exp, a) => plain.push(Expr::Fun(Elem::Exp, a)),
            Expr::Mul(inner) => {
                for g in inner {
                    match g {
                        Expr::Num(r) => coeff *= r,
                        Expr::Pow(b, e) => bases.entry(*b).or_default().push(*e),
                        other => bases.entry(other).or_default().push(Expr::one()),
                    }
                }
            }
            other => bases.entry(other).or_default().push(Expr::one()),
        }
    }
    let mut out = plain;
    for (base, exps) in bases {
        let ex = collect_sum(exps);
        if let Some(f) = pow_or_fold(base, ex, &mut coeff) {
            out.push(f);
        }
    }
    finish_mul(coeff, out)
}

/// Build `base^exponent` as a product factor, folding numeric powers into
/// the running coefficient. Returns `None` when the factor is 1.
fn pow_or_fold(base: Expr, exponent: Expr, coeff: &mut Rat) -> Option<Expr> {
    if exponent.is_zero_literal() {
        return None;
    }
    if let (Expr::Num(b), Some(n)) = (&base, exponent.as_integer()) {
        *coeff *= rat_pow(b, n);
        return None;
    }
    if exponent.is_one_literal() {
        return Some(base);
    }
    Some(Expr::Pow(Box::new(base), Box::new(exponent)))
}

fn finish_mul(coeff: Rat, mut factors: Vec<Expr>) -> Expr {
    if coeff.is_zero() {
        return Expr::zero();
    }
    factors.sort();
    if factors.is_empty() {
        return Expr::Num(coeff);
    }
    if coeff.is_one() {
        if factors.len() == 1 {
            return factors.into_iter().next().unwrap();
        }
        return Expr::Mul(factors);
    }
    let mut out = vec![Expr::Num(coeff)];
    out.extend(factors);
    Expr::Mul(out)
}

/// Rewrite `exp(arg)` (arg normalized) as a list of product factors.
fn norm_exp(arg: Expr) -> Vec<Expr> {
    match arg {
        Expr::Num(r) if r.is_zero() => vec![Expr::one()],
        Expr::Add(ts) => {
            let mut out = Vec::new();
            for t in ts {
                out.extend(norm_exp(t));
            }
            out
        }
        Expr::Fun(Elem::Log, b) => vec![*b],
        Expr::Mul(fs) => {
            // exp(c * log(b) * rest) -> b^(c*rest) when exactly one log
            // factor appears with unit exponent.
            let logs: Vec<usize> = fs
                .iter()
                .enumerate()
                .filter(|(_, f)| matches!(f, Expr::Fun(Elem::Log, _)))
                .map(|(i, _)| i)
                .collect();
            if logs.len() == 1 {
                let mut fs = fs;
                let logf = fs.remove(logs[0]);
                let b = match logf {
                    Expr::Fun(Elem::Log, b) => *b,
                    _ => unreachable!(),
                };
                let rest = norm_mul(fs);
                return vec![norm_pow(b, rest)];
            }
            vec![Expr::Fun(Elem::Exp, Box::new(Expr::Mul(fs)))]
        }
        other => vec![Expr::Fun(Elem::Exp, Box::new(other))],
    }
}

/// Normalize a power of normalized parts.
fn norm_pow(base: Expr, exponent: Expr) -> Expr {
    if exponent.is_zero_literal() {
        return Expr::one();
    }
    if exponent.is_one_literal() {
        return base;
    }
    match base {
        Expr::Num(b) => {
            if b.is_one() {
                return Expr::one();
            }
            if b.is_zero() {
                return Expr::zero();
            }
            if let Some(n) = exponent.as_integer() {
                if n.unsigned_abs() <= 64 {
                    return Expr::Num(rat_pow(&b, n));
                }
            }
            // Pull perfect negations apart is not needed; keep symbolic.
            Expr::Pow(Box::new(Expr::Num(b)), Box::new(exponent))
        }
        Expr::Fun(Elem::Exp, a) => {
            let merged = norm_mul(vec![*a, exponent]);
            norm_mul(norm_exp(merged))
        }
        Expr::Pow(b2, e2) => {
            let merged = norm_mul(vec![*e2, exponent]);
            norm_pow(*b2, merged)
        }
        Expr::Mul(fs) => {
            let parts: Vec<Expr> = fs
                .into_iter()
                .map(|f| norm_pow(f, exponent.clone()))
                .collect();
            norm_mul(parts)
        }
        Expr::Add(ts) => {
            if let Some(n) = exponent.as_integer() {
                if (2..=6).contains(&n) {
                    let b = Expr::Add(ts);
                    let copies = vec![b; n as usize];
                    return norm_mul(copies);
                }
                if (-6..=-2).contains(&n) {
                    let b = Expr::Add(ts);
                    let copies = vec![b; (-n) as usize];
                    let expanded = norm_mul(copies);
                    return norm_pow(expanded, Expr::num(-1));
                }
            }
            Expr::Pow(Box::new(Expr::Add(ts)), Box::new(exponent))
        }
        other => Expr::Pow(Box::new(other), Box::new(exponent)),
    }
}

fn norm_fun(f: Elem, arg: Expr) -> Expr {
    match f {
        Elem::Exp => norm_mul(norm_exp(arg)),
        Elem::Log => match arg {
            Expr::Num(r) if r.is_one() => Expr::zero(),
            Expr::Fun(Elem::Exp, a) => *a,
            Expr::Pow(b, e) => norm_mul(vec![*e, norm_fun(Elem::Log, *b)]),
            Expr::Mul(fs) => {
                let terms: Vec<Expr> = fs.into_iter().map(|x| norm_fun(Elem::Log, x)).collect();
                collect_sum(terms)
            }
            other => Expr::Fun(Elem::Log, Box::new(other)),
        },
        Elem::Sin => {
            if arg.is_zero_literal() {
                Expr::zero()
            } else {
                Expr::Fun(Elem::Sin, Box::new(arg))
            }
        }
        Elem::Cos => {
            if arg.is_zero_literal() {
                Expr::one()
            } else {
                Expr::Fun(Elem::Cos, Box::new(arg))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn n(e: Expr) -> Expr {
        e.normalize()
    }

    #[test]
    fn folds_constants() {
        assert_eq!(n(Expr::add2(Expr::num(2), Expr::num(3))), Expr::num(5));
        assert_eq!(n(Expr::mul2(Expr::num(2), Expr::num(3))), Expr::num(6));
        assert_eq!(n(Expr::powi(Expr::num(2), -2)), Expr::ratio(1, 4));
    }

    #[test]
    fn collects_like_terms() {
        let x = Expr::param("x");
        let e = Expr::add(vec![x.clone(), Expr::mul2(Expr::num(2), x.clone())]);
        assert_eq!(n(e), n(Expr::mul2(Expr::num(3), x)));
    }

    #[test]
    fn cancels_to_zero() {
        let x = Expr::param("x");
        let e = Expr::sub(
            Expr::mul2(x.clone(), x.clone()),
            Expr::powi(x.clone(), 2),
        );
        assert_eq!(n(e), Expr::zero());
    }

    #[test]
    fn merges_powers_of_a_base() {
        let x = Expr::param("x");
        let e = Expr::mul2(Expr::powi(x.clone(), 2), Expr::powi(x.clone(), 3));
        assert_eq!(n(e), Expr::powi(Expr::param("x"), 5).normalize());
    }

    #[test]
    fn drops_trivial_exponents() {
        let x = Expr::param("x");
        assert_eq!(n(Expr::powi(x.clone(), 1)), x.clone());
        assert_eq!(n(Expr::powi(x, 0)), Expr::one());
    }

    #[test]
    fn merges_exponentials() {
        let t = Expr::t();
        let e = Expr::mul2(
            Expr::exp(t.clone()),
            Expr::exp(Expr::mul2(Expr::num(-1), t.clone())),
        );
        assert_eq!(n(e), Expr::one());
    }

    #[test]
    fn exp_of_log_is_power() {
        let x = Expr::param("x");
        let k = Expr::param("k");
        let e = Expr::exp(Expr::mul2(k.clone(), Expr::log(x.clone())));
        assert_eq!(n(e), n(Expr::pow(x, k)));
    }

    #[test]
    fn nested_powers_collapse() {
        let t = Expr::t();
        let e = Expr::pow(
            Expr::powr(t.clone(), crate::expr::ratio(-1, 2)),
            Expr::num(3).into(),
        );
        assert_eq!(n(e), n(Expr::powr(t, crate::expr::ratio(-3, 2))));
    }

    #[test]
    fn distributes_products_over_sums() {
        let a = Expr::param("a");
        let b = Expr::param("b");
        let e = Expr::mul2(
            Expr::add2(a.clone(), b.clone()),
            Expr::sub(a.clone(), b.clone()),
        );
        let want = Expr::sub(Expr::powi(a, 2), Expr::powi(b, 2));
        assert_eq!(n(e), n(want));
    }

    #[test]
    fn idempotent_on_assorted_trees() {
        let exprs = vec![
            Expr::add(vec![
                Expr::mul2(Expr::num(3), Expr::param("x")),
                Expr::pow(Expr::param("x"), Expr::param("k")),
                Expr::exp(Expr::mul2(Expr::num(2), Expr::t())),
            ]),
            Expr::div(Expr::one(), Expr::add2(Expr::param("x"), Expr::num(1))),
            Expr::pow(
                Expr::add2(Expr::param("x"), Expr::param("y")),
                Expr::num(3).into(),
            ),
            Expr::log(Expr::mul2(Expr::param("x"), Expr::param("y"))),
        ];
        for e in exprs {
            let once = e.normalize();
            assert_eq!(once.normalize(), once, "not idempotent: {e:?}");
        }
    }
}
