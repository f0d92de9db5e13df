//! Numeric evaluation over exact rationals and floats.
//!
//! The exact path handles polynomial/rational expressions only (integer
//! exponents, no elementary functions, no opaque calls). The float path
//! handles everything; opaque calls are looked up in, or sampled into, a
//! value cache keyed by `(name, derivative multi-index, argument values)`,
//! so repeated occurrences of the same application evaluate consistently
//! while distinct derivatives stay independent.

use super::{rat_to_f64, Elem, Expr, Rat, Symbol};
use crate::{Error, Result};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};

/// Symbol bindings for exact evaluation.
#[derive(Clone, Debug, Default)]
pub struct ExactEnv {
    pub syms: BTreeMap<Symbol, Rat>,
}

impl ExactEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, s: Symbol, v: Rat) {
        self.syms.insert(s, v);
    }
}

/// Cache key for an opaque function value: name, derivative multi-index,
/// and the bit patterns of the evaluated arguments.
type OpaqueKey = (Box<str>, Vec<u8>, Vec<u64>);

/// Symbol bindings for float evaluation, with an opaque-value cache.
///
/// With a sampler attached (see [`FloatEnv::with_opaque_sampler`]), unseen
/// opaque applications draw a fresh uniform value; without one they are an
/// error.
#[derive(Clone, Debug, Default)]
pub struct FloatEnv {
    pub syms: BTreeMap<Symbol, f64>,
    cache: HashMap<OpaqueKey, f64>,
    sampler: Option<(ChaCha8Rng, f64, f64)>,
}

impl FloatEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, s: Symbol, v: f64) {
        self.syms.insert(s, v);
    }

    /// Attach a deterministic sampler for opaque function values, drawing
    /// uniformly from `[lo, hi]`.
    pub fn with_opaque_sampler(mut self, rng: ChaCha8Rng, lo: f64, hi: f64) -> Self {
        self.sampler = Some((rng, lo, hi));
        self
    }

    /// Pin the value of a specific opaque application.
    pub fn pin_opaque(&mut self, name: &str, deriv: Vec<u8>, args: &[f64], value: f64) {
        let key = (name.into(), deriv, args.iter().map(|a| a.to_bits()).collect());
        self.cache.insert(key, value);
    }

    fn opaque_value(&mut self, name: &str, deriv: &[u8], args: &[f64]) -> Result<f64> {
        let key: OpaqueKey = (
            name.into(),
            deriv.to_vec(),
            args.iter().map(|a| a.to_bits()).collect(),
        );
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        match &mut self.sampler {
            Some((rng, lo, hi)) => {
                let v = rng.gen_range(*lo..=*hi);
                self.cache.insert(key, v);
                Ok(v)
            }
            None => Err(Error::Domain(format!(
                "no value bound for opaque function `{name}`"
            ))),
        }
    }
}

/// Exact rational evaluation. Fails on unbound symbols, non-integer
/// exponents, elementary functions, and opaque calls.
pub fn eval_rat(e: &Expr, env: &ExactEnv) -> Result<Rat> {
    match e {
        Expr::Num(r) => Ok(r.clone()),
        Expr::Sym(s) => env
            .syms
            .get(s)
            .cloned()
            .ok_or_else(|| Error::Domain(format!("unbound symbol `{}`", Expr::Sym(s.clone())))),
        Expr::Add(ts) => {
            let mut acc = Rat::zero();
            for t in ts {
                acc += eval_rat(t, env)?;
            }
            Ok(acc)
        }
        Expr::Mul(fs) => {
            let mut acc = Rat::one();
            for f in fs {
                acc *= eval_rat(f, env)?;
                if acc.is_zero() {
                    // Still validate the remaining factors' domains.
                    continue;
                }
            }
            Ok(acc)
        }
        Expr::Pow(b, ex) => {
            let ev = eval_rat(ex, env)?;
            if !ev.is_integer() {
                return Err(Error::Domain(
                    "non-integer exponent in exact evaluation".to_string(),
                ));
            }
            let n = ev
                .numer()
                .to_i64()
                .ok_or_else(|| Error::Domain("exponent overflow".to_string()))?;
            let bv = eval_rat(b, env)?;
            if bv.is_zero() && n < 0 {
                return Err(Error::Domain("zero to a negative power".to_string()));
            }
            let m = n.unsigned_abs() as u32;
            let num = bv.numer().pow(m);
            let den = bv.denom().pow(m);
            Ok(if n >= 0 {
                Rat::new(num, den)
            } else {
                Rat::new(den, num)
            })
        }
        Expr::Fun(f, _) => Err(Error::Domain(format!(
            "`{}` has no exact evaluation",
            f.name()
        ))),
        Expr::Call(c) => Err(Error::Domain(format!(
            "opaque function `{}` has no exact evaluation",
            c.name
        ))),
    }
}

/// Float evaluation. Fails on unbound symbols and genuine domain errors
/// (log of a non-positive value, fractional power of a negative value,
/// division by zero); any non-finite intermediate is reported as a domain
/// error so samplers can retry at a different point.
pub fn eval_f64(e: &Expr, env: &mut FloatEnv) -> Result<f64> {
    let v = eval_f64_inner(e, env)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain("non-finite result".to_string()))
    }
}

fn eval_f64_inner(e: &Expr, env: &mut FloatEnv) -> Result<f64> {
    match e {
        Expr::Num(r) => Ok(rat_to_f64(r)),
        Expr::Sym(s) => env
            .syms
            .get(s)
            .copied()
            .ok_or_else(|| Error::Domain(format!("unbound symbol `{}`", Expr::Sym(s.clone())))),
        Expr::Add(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += eval_f64_inner(t, env)?;
            }
            Ok(acc)
        }
        Expr::Mul(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= eval_f64_inner(f, env)?;
            }
            Ok(acc)
        }
        Expr::Pow(b, ex) => {
            let bv = eval_f64_inner(b, env)?;
            let ev = eval_f64_inner(ex, env)?;
            pow_f64(bv, ev)
        }
        Expr::Fun(f, a) => {
            let av = eval_f64_inner(a, env)?;
            match f {
                Elem::Exp => Ok(av.exp()),
                Elem::Log => {
                    if av > 0.0 {
                        Ok(av.ln())
                    } else {
                        Err(Error::Domain(format!("log of non-positive value {av}")))
                    }
                }
                Elem::Sin => Ok(av.sin()),
                Elem::Cos => Ok(av.cos()),
            }
        }
        Expr::Call(c) => {
            let mut args = Vec::with_capacity(c.args.len());
            for a in &c.args {
                args.push(eval_f64_inner(a, env)?);
            }
            env.opaque_value(&c.name, &c.deriv, &args)
        }
    }
}

fn pow_f64(b: f64, e: f64) -> Result<f64> {
    if b > 0.0 {
        return Ok(b.powf(e));
    }
    // Negative or zero base: only integer exponents are defined.
    if e.fract() == 0.0 && e.abs() < 1e15 {
        if b == 0.0 && e < 0.0 {
            return Err(Error::Domain("zero to a negative power".to_string()));
        }
        return Ok(b.powi(e as i32));
    }
    Err(Error::Domain(format!(
        "fractional power {e} of non-positive base {b}"
    )))
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn exact_matches_float_on_rational_trees() {
        let e = parse("(x^2 - 1/3)*t + u_x^-2").unwrap();
        let mut ex = ExactEnv::new();
        ex.set(Symbol::Space(0), super::super::ratio(3, 2));
        ex.set(Symbol::Time, super::super::ratio(1, 2));
        ex.set(Symbol::jet(0, 1, 0), super::super::rat(2));
        let mut fl = FloatEnv::new();
        for (s, v) in &ex.syms {
            fl.set(s.clone(), rat_to_f64(v));
        }
        let rv = rat_to_f64(&eval_rat(&e, &ex).unwrap());
        let fv = eval_f64(&e, &mut fl).unwrap();
        assert!((rv - fv).abs() < 1e-12);
    }

    #[test]
    fn exact_rejects_elementary_functions() {
        let e = parse("exp(t)").unwrap();
        let mut ex = ExactEnv::new();
        ex.set(Symbol::Time, super::super::rat(1));
        assert!(eval_rat(&e, &ex).is_err());
    }

    #[test]
    fn opaque_values_are_cached_per_application() {
        let e = parse("D(u_x) - D(u_x)").unwrap();
        // Normalization already cancels this; evaluate the unnormalized tree.
        let raw = Expr::sub(
            Expr::call("D", vec![Expr::jet(0, 1, 0)]),
            Expr::call("D", vec![Expr::jet(0, 1, 0)]),
        );
        let rng = ChaCha8Rng::seed_from_u64(7);
        let mut env = FloatEnv::new().with_opaque_sampler(rng, 0.5, 2.0);
        env.set(Symbol::jet(0, 1, 0), 1.25);
        assert_eq!(eval_f64(&raw, &mut env).unwrap(), 0.0);
        assert_eq!(eval_f64(&e, &mut env).unwrap(), 0.0);
    }

    #[test]
    fn distinct_derivatives_are_independent() {
        let d0 = parse("D(u_x)").unwrap();
        let d1 = parse("D'(u_x)").unwrap();
        let rng = ChaCha8Rng::seed_from_u64(7);
        let mut env = FloatEnv::new().with_opaque_sampler(rng, 0.5, 2.0);
        env.set(Symbol::jet(0, 1, 0), 1.25);
        let a = eval_f64(&d0, &mut env).unwrap();
        let b = eval_f64(&d1, &mut env).unwrap();
        assert_ne!(a, b);
        // Re-evaluation hits the cache.
        assert_eq!(eval_f64(&d0, &mut env).unwrap(), a);
    }

    #[test]
    fn domain_errors() {
        let mut env = FloatEnv::new();
        env.set(Symbol::Space(0), -1.0);
        assert!(eval_f64(&parse("log(x)").unwrap(), &mut env).is_err());
        assert!(eval_f64(&parse("x^(1/2)").unwrap(), &mut env).is_err());
        assert_eq!(eval_f64(&parse("x^3").unwrap(), &mut env).unwrap(), -1.0);
    }
}
