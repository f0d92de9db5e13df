//! Vector fields on second-order jet space.
//!
//! A point-symmetry generator `X = xi0 d/dt + xi_i d/dx_i + eta d/du` has
//! components depending on `(t, x, u)` only. Its second prolongation extends
//! it to the derivative coordinates through the recursion
//!
//! ```text
//! rho_a   = D_a(eta)   - sum_b D_a(xi^b) u_b
//! sig_ab  = D_b(rho_a) - sum_c D_b(xi^c) u_ac
//! ```
//!
//! with `D_a` the total derivative along base direction `a`.

use crate::expr::{total_derivative, Direction, Expr, FloatEnv, JetIndex, JetSpace, Symbol};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// A point vector field on `(t, x, u)` space.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub space: JetSpace,
    /// Coefficient of `d/dt`.
    pub xi_t: Expr,
    /// Coefficients of `d/dx_i`, one per space axis.
    pub xi_x: Vec<Expr>,
    /// Coefficient of `d/du`.
    pub eta: Expr,
}

impl VectorField {
    /// Build a field, normalizing components and rejecting any dependence
    /// on derivative coordinates (a point field lives on the base space).
    pub fn new(space: JetSpace, xi_t: Expr, xi_x: Vec<Expr>, eta: Expr) -> Result<VectorField> {
        if xi_x.len() != space.dim as usize {
            return Err(Error::InvalidParameter(format!(
                "expected {} space components, got {}",
                space.dim,
                xi_x.len()
            )));
        }
        let field = VectorField {
            space,
            xi_t: xi_t.normalize(),
            xi_x: xi_x.into_iter().map(|e| e.normalize()).collect(),
            eta: eta.normalize(),
        };
        for c in field.components() {
            for s in c.free_symbols() {
                if let Symbol::Jet(j) = s {
                    if j.order() > 0 {
                        return Err(Error::InvalidParameter(format!(
                            "point field component `{c}` depends on derivative coordinate"
                        )));
                    }
                }
            }
        }
        Ok(field)
    }

    /// One-dimensional field.
    pub fn new_1d(xi_t: Expr, xi_x: Expr, eta: Expr) -> Result<VectorField> {
        VectorField::new(JetSpace::new(1), xi_t, vec![xi_x], eta)
    }

    pub fn components(&self) -> Vec<&Expr> {
        let mut v = vec![&self.xi_t];
        v.extend(self.xi_x.iter());
        v.push(&self.eta);
        v
    }

    fn xi(&self, dir: Direction) -> &Expr {
        match dir {
            Direction::T => &self.xi_t,
            Direction::X(i) => &self.xi_x[i as usize],
        }
    }

    /// Substitute symbols (typically classification parameters) in all
    /// components.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> VectorField {
        VectorField {
            space: self.space,
            xi_t: self.xi_t.substitute(bindings),
            xi_x: self.xi_x.iter().map(|e| e.substitute(bindings)).collect(),
            eta: self.eta.substitute(bindings),
        }
    }

    /// Componentwise linear combination `a*self + b*other`.
    pub fn linear_combination(&self, a: &Expr, other: &VectorField, b: &Expr) -> VectorField {
        assert_eq!(self.space, other.space);
        let mix = |p: &Expr, q: &Expr| {
            Expr::add2(Expr::mul2(a.clone(), p.clone()), Expr::mul2(b.clone(), q.clone()))
                .normalize()
        };
        VectorField {
            space: self.space,
            xi_t: mix(&self.xi_t, &other.xi_t),
            xi_x: self
                .xi_x
                .iter()
                .zip(&other.xi_x)
                .map(|(p, q)| mix(p, q))
                .collect(),
            eta: mix(&self.eta, &other.eta),
        }
    }

    /// Apply the field as a first-order operator to a function of
    /// `(t, x, u)`.
    pub fn apply0(&self, f: &Expr) -> Expr {
        let mut terms = vec![
            Expr::mul2(self.xi_t.clone(), f.diff(&Symbol::Time)),
            Expr::mul2(self.eta.clone(), f.diff(&Symbol::u())),
        ];
        for (i, xi) in self.xi_x.iter().enumerate() {
            terms.push(Expr::mul2(xi.clone(), f.diff(&Symbol::Space(i as u8))));
        }
        Expr::Add(terms).normalize()
    }

    /// Lie bracket `[X, Y]`, again a point field.
    pub fn commutator(&self, other: &VectorField) -> Result<VectorField> {
        assert_eq!(self.space, other.space);
        let xi_t = Expr::sub(self.apply0(&other.xi_t), other.apply0(&self.xi_t));
        let xi_x = (0..self.space.dim as usize)
            .map(|i| Expr::sub(self.apply0(&other.xi_x[i]), other.apply0(&self.xi_x[i])))
            .collect();
        let eta = Expr::sub(self.apply0(&other.eta), other.apply0(&self.eta));
        VectorField::new(self.space, xi_t, xi_x, eta)
    }

    /// Second prolongation of the field.
    pub fn prolong2(&self) -> Result<ProlongedField> {
        let mut coeffs: BTreeMap<JetIndex, Expr> = BTreeMap::new();
        let dirs = self.space.directions();
        // First order.
        for &a in &dirs {
            let mut terms = vec![total_derivative(&self.eta, a)?];
            for &b in &dirs {
                let ub = Expr::Sym(Symbol::Jet(JetIndex::U.bump(b).unwrap()));
                terms.push(Expr::mul2(total_derivative(self.xi(b), a)?, ub).neg());
            }
            let j = JetIndex::U.bump(a).unwrap();
            coeffs.insert(j, Expr::Add(terms).normalize());
        }
        // Second order, from the first-order coefficients.
        for &a in &dirs {
            let ja = JetIndex::U.bump(a).unwrap();
            let rho_a = coeffs[&ja].clone();
            for &b in &dirs {
                let jab = match ja.bump(b) {
                    Some(j) => j,
                    None => unreachable!(),
                };
                if coeffs.contains_key(&jab) {
                    continue;
                }
                let mut terms = vec![total_derivative(&rho_a, b)?];
                for &c in &dirs {
                    let jac = JetIndex::U.bump(a).unwrap().bump(c).unwrap();
                    let uac = Expr::Sym(Symbol::Jet(jac));
                    terms.push(Expr::mul2(total_derivative(self.xi(c), b)?, uac).neg());
                }
                coeffs.insert(jab, Expr::Add(terms).normalize());
            }
        }
        Ok(ProlongedField {
            base: self.clone(),
            coeffs,
        })
    }

    /// Flow the base point `(t, x.., u)` along the field for parameter
    /// `eps`, with classic fourth-order Runge-Kutta over fixed substeps.
    /// Components must be numeric after the flow binds `(t, x, u)`; free
    /// parameters must be substituted out first.
    pub fn flow(&self, start: &[f64], eps: f64) -> Result<Vec<f64>> {
        let n = self.space.dim as usize + 2;
        if start.len() != n {
            return Err(Error::InvalidParameter(format!(
                "flow state needs {n} components"
            )));
        }
        const BOUND: f64 = 1e8;
        let steps = (64.0 * eps.abs()).ceil().max(1.0) as usize;
        let h = eps / steps as f64;
        let mut y = start.to_vec();
        let rhs = |y: &[f64]| -> Result<Vec<f64>> {
            let mut env = FloatEnv::new();
            env.set(Symbol::Time, y[0]);
            for i in 0..self.space.dim {
                env.set(Symbol::Space(i), y[1 + i as usize]);
            }
            env.set(Symbol::u(), y[n - 1]);
            let mut out = Vec::with_capacity(n);
            out.push(crate::expr::eval_f64(&self.xi_t, &mut env)?);
            for xi in &self.xi_x {
                out.push(crate::expr::eval_f64(xi, &mut env)?);
            }
            out.push(crate::expr::eval_f64(&self.eta, &mut env)?);
            Ok(out)
        };
        for s in 0..steps {
            let k1 = rhs(&y)?;
            let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
            let k2 = rhs(&y2)?;
            let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
            let k3 = rhs(&y3)?;
            let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
            let k4 = rhs(&y4)?;
            for i in 0..n {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !norm.is_finite() || norm > BOUND {
                return Err(Error::Blowup {
                    eps: (s + 1) as f64 * h,
                    bound: BOUND,
                });
            }
        }
        Ok(y)
    }
}

/// A second prolongation: the base field plus one coefficient per
/// derivative coordinate of order 1 and 2.
#[derive(Clone, Debug)]
pub struct ProlongedField {
    pub base: VectorField,
    pub coeffs: BTreeMap<JetIndex, Expr>,
}

impl ProlongedField {
    /// Coefficient attached to `d/d(u_J)`.
    pub fn coeff(&self, j: JetIndex) -> &Expr {
        &self.coeffs[&j]
    }

    /// Apply the prolonged operator `X^(2)` to a jet-space function.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut terms = vec![self.base.apply0(f)];
        for (j, c) in &self.coeffs {
            let p = f.diff(&Symbol::Jet(*j));
            if !p.is_zero_literal() {
                terms.push(Expr::mul2(c.clone(), p));
            }
        }
        Expr::Add(terms).normalize()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn field_1d(xi_t: &str, xi_x: &str, eta: &str) -> VectorField {
        VectorField::new_1d(
            parse(xi_t).unwrap(),
            parse(xi_x).unwrap(),
            parse(eta).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_jet_dependent_components() {
        let r = VectorField::new_1d(Expr::zero(), parse("u_x").unwrap(), Expr::zero());
        assert!(r.is_err());
    }

    #[test]
    fn prolongation_of_scaling_field() {
        // X = 2t d/dt + x d/dx (+ 0 d/du): rho_x = -u_x, sig_xx = -2 u_xx.
        let f = field_1d("2*t", "x", "0");
        let p = f.prolong2().unwrap();
        assert_eq!(p.coeff(JetIndex::of(0, 1, 0)), &parse("-u_x").unwrap());
        assert_eq!(p.coeff(JetIndex::of(0, 2, 0)), &parse("-2*u_xx").unwrap());
        assert_eq!(p.coeff(JetIndex::of(1, 0, 0)), &parse("-2*u_t").unwrap());
    }

    #[test]
    fn prolongation_with_u_dependence() {
        // X = u d/dx: rho_x = -u_x^2, textbook example of the nonlinear term.
        let f = field_1d("0", "u", "0");
        let p = f.prolong2().unwrap();
        assert_eq!(p.coeff(JetIndex::of(0, 1, 0)), &parse("-u_x^2").unwrap());
        // sig_xx = -3 u_x u_xx
        assert_eq!(
            p.coeff(JetIndex::of(0, 2, 0)),
            &parse("-3*u_x*u_xx").unwrap()
        );
    }

    #[test]
    fn commutator_of_translations_vanishes() {
        let a = field_1d("1", "0", "0");
        let b = field_1d("0", "1", "0");
        let c = a.commutator(&b).unwrap();
        assert!(c.xi_t.is_zero_literal() && c.eta.is_zero_literal());
        assert!(c.xi_x[0].is_zero_literal());
    }

    #[test]
    fn commutator_translation_scaling() {
        // [d/dt, 2t d/dt + x d/dx] = 2 d/dt.
        let a = field_1d("1", "0", "0");
        let b = field_1d("2*t", "x", "0");
        let c = a.commutator(&b).unwrap();
        assert_eq!(c.xi_t, Expr::num(2));
        assert!(c.xi_x[0].is_zero_literal());
    }

    #[test]
    fn flow_of_translation_and_scaling() {
        let f = field_1d("1", "0", "0");
        let y = f.flow(&[0.0, 1.0, 2.0], 0.5).unwrap();
        assert!((y[0] - 0.5).abs() < 1e-12 && y[1] == 1.0 && y[2] == 2.0);

        // x d/dx flows x -> x e^eps.
        let f = field_1d("0", "x", "0");
        let y = f.flow(&[0.0, 1.0, 2.0], 1.0).unwrap();
        assert!((y[1] - 1.0f64.exp()).abs() < 1e-8, "{}", y[1]);
    }

    #[test]
    fn flow_blowup_detection() {
        // u^2 d/du blows up in finite parameter from u = 1 (at eps = 1).
        let f = field_1d("0", "0", "u^2");
        assert!(matches!(
            f.flow(&[0.0, 0.0, 1.0], 2.0),
            Err(Error::Blowup { .. })
        ));
    }
}
