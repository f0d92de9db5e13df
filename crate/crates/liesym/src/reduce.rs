//! Symmetry reductions of the source-free two-dimensional power-law
//! equation `u_t = div(|grad u|^2k grad u)`: the radial reduction, its
//! four inequivalent ODE reductions, closed-form exact solutions, and the
//! hodograph linearizations.
//!
//! Reduced ODEs are machine-derived by substituting each ansatz into the
//! radial equation and clearing the common factor; the conventionally
//! printed forms are kept alongside as cross-checks. One printed form
//! (the log-time similarity case) is missing an `omega` factor on its
//! third term; the derived form is stored, and it is the one consistent
//! with the closed-form Bernoulli solution.

use crate::expr::{
    is_zero, rat, rat_to_f64, Expr, FloatEnv, Rat, SamplerConfig, Symbol, ZeroReport,
};
use crate::jet::VectorField;
use crate::pde::{invariance_expression_for_rhs, PdeSpec};
use crate::{Error, Result};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[cfg(test)]
fn p(src: &str) -> Expr {
    crate::expr::parse(src).expect("reduction template parses")
}

fn omega_sym() -> Symbol {
    Symbol::param("omega")
}

fn omega() -> Expr {
    Expr::param("omega")
}

/// `phi` and its derivatives applied to an argument.
fn phi(d: u8, arg: &Expr) -> Expr {
    Expr::call_deriv("phi", vec![d], vec![arg.clone()])
}

/// Right side of the radially reduced equation in one-dimensional jet
/// coordinates, with `x` standing for the radius:
/// `U_r^(2k+1)/r + (2k+1) U_r^2k U_rr` on the `U_r > 0` branch.
pub fn radial_rhs(k: &Expr, positive_branch: bool) -> Expr {
    let two_k = Expr::mul2(Expr::num(2), k.clone());
    let e1 = Expr::add2(two_k.clone(), Expr::one());
    let ux = if positive_branch {
        Expr::jet(0, 1, 0)
    } else {
        Expr::jet(0, 1, 0).neg()
    };
    let first = Expr::mul2(Expr::pow(ux.clone(), e1.clone()), Expr::powi(Expr::x(0), -1));
    let first = if positive_branch { first } else { first.neg() };
    Expr::add2(
        first,
        Expr::mul(vec![e1, Expr::pow(ux, two_k), Expr::jet(0, 2, 0)]),
    )
    .normalize()
}

/// The radially reduced equation for one fixed exponent.
#[derive(Clone, Debug)]
pub struct RadialPde {
    pub k: Rat,
    pub positive_branch: bool,
    /// Right side in 1-D jet coordinates, `x` standing for the radius.
    pub rhs: Expr,
}

fn reject_k(k: &Rat, excluded: &[Rat]) -> Result<()> {
    if excluded.contains(k) {
        return Err(Error::InvalidParameter(format!(
            "exponent k = {k} is excluded (the reduced equation degenerates)"
        )));
    }
    Ok(())
}

/// Radial reduction of the two-dimensional equation under
/// `u = U(t, r), r = sqrt(x1^2 + x2^2)`. Excluded: `k = 0` (linear) and
/// `k = -1/2` (the equation degenerates to a linear ODE).
pub fn radial_reduce(k: &Rat) -> Result<RadialPde> {
    radial_reduce_branch(k, true)
}

/// Same with the `U_r < 0` branch exposed behind a sign flag.
pub fn radial_reduce_branch(k: &Rat, positive_branch: bool) -> Result<RadialPde> {
    reject_k(k, &[rat(0), Rat::new((-1).into(), 2.into())])?;
    Ok(RadialPde {
        k: k.clone(),
        positive_branch,
        rhs: radial_rhs(&Expr::Num(k.clone()), positive_branch),
    })
}

/// Symbolic witness that the radial ansatz maps the two-dimensional
/// residual to the radial residual: both sides are built independently
/// (the left by substituting the chain-rule jets of `U(t, r(x1, x2))`
/// into the two-dimensional right side, the right by substituting
/// `r = sqrt(x1^2 + x2^2)` into the radial right side) and compared.
/// The exponent stays symbolic.
pub fn radial_reduction_witness(cfg: &SamplerConfig) -> Result<ZeroReport> {
    let kx = Expr::param("k");
    let r = Expr::powr(
        Expr::add2(Expr::powi(Expr::x(0), 2), Expr::powi(Expr::x(1), 2)),
        Rat::new(1.into(), 2.into()),
    );
    let cap_u = Expr::call("U", vec![Expr::t(), r.clone()]);
    let x1 = Symbol::Space(0);
    let x2 = Symbol::Space(1);
    let u1 = cap_u.diff(&x1);
    let u2 = cap_u.diff(&x2);
    let mut bind = BTreeMap::new();
    bind.insert(Symbol::u(), cap_u.clone());
    bind.insert(Symbol::jet(0, 1, 0), u1.clone());
    bind.insert(Symbol::jet(0, 0, 1), u2.clone());
    bind.insert(Symbol::jet(0, 2, 0), u1.diff(&x1));
    bind.insert(Symbol::jet(0, 1, 1), u1.diff(&x2));
    bind.insert(Symbol::jet(0, 0, 2), u2.diff(&x2));
    let planar = PdeSpec::divergence_2d(
        Expr::pow(Expr::sym(crate::pde::omega_slot()), kx.clone()),
        Expr::zero(),
    );
    let lhs = planar.rhs().substitute(&bind);

    let mut jet_bind = BTreeMap::new();
    jet_bind.insert(
        Symbol::jet(0, 1, 0),
        Expr::call_deriv("U", vec![0, 1], vec![Expr::t(), Expr::x(0)]),
    );
    jet_bind.insert(
        Symbol::jet(0, 2, 0),
        Expr::call_deriv("U", vec![0, 2], vec![Expr::t(), Expr::x(0)]),
    );
    let radial = radial_rhs(&kx, true)
        .substitute(&jet_bind)
        .subst(&x1, &r);
    is_zero(&Expr::sub(lhs, radial), cfg)
}

/// The four generators admitted by the radial equation: the `U`-shift,
/// the time shift, and the two dilations.
pub fn radial_symmetries(k: &Rat) -> Vec<VectorField> {
    let kn = Expr::Num(k.clone());
    let kp1 = Expr::Num(k + rat(1));
    let mk = |xi_t: Expr, xi_x: Expr, eta: Expr| {
        VectorField::new_1d(xi_t, xi_x, eta).expect("radial generator is a point field")
    };
    vec![
        mk(Expr::zero(), Expr::zero(), Expr::one()),
        mk(Expr::one(), Expr::zero(), Expr::zero()),
        mk(
            Expr::mul(vec![Expr::num(2), kp1.clone(), Expr::t()]),
            Expr::x(0),
            Expr::zero(),
        ),
        mk(
            Expr::zero(),
            Expr::mul2(kn, Expr::x(0)),
            Expr::mul2(kp1, Expr::u()),
        ),
    ]
}

/// Randomized invariance check of a point field against the radial
/// equation.
pub fn check_radial_invariance(
    radial: &RadialPde,
    field: &VectorField,
    cfg: &SamplerConfig,
) -> Result<ZeroReport> {
    let e = invariance_expression_for_rhs(&radial.rhs, field)?;
    is_zero(&e, cfg)
}

/// The four inequivalent ODE reductions of the radial equation, plus the
/// separable subcase of the exponential one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ReductionCaseId {
    /// Time shift alone: stationary radial profile `U = phi(r)`.
    I,
    /// Parabolic dilation plus a `U`-shift: log-time similarity.
    Ii,
    /// Second dilation plus a time shift: exponential similarity.
    Iii,
    /// The `lambda = 0` subcase of the exponential reduction: separable
    /// ansatz `U = r^((k+1)/k) phi(t)`.
    IiiLambdaZero,
    /// Combination of the two dilations: power-law similarity.
    Iv,
}

impl ReductionCaseId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReductionCaseId::I => "i",
            ReductionCaseId::Ii => "ii",
            ReductionCaseId::Iii => "iii",
            ReductionCaseId::IiiLambdaZero => "iii-lambda0",
            ReductionCaseId::Iv => "iv",
        }
    }

    pub fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" => Ok(ReductionCaseId::I),
            "ii" => Ok(ReductionCaseId::Ii),
            "iii" => Ok(ReductionCaseId::Iii),
            "iii-lambda0" => Ok(ReductionCaseId::IiiLambdaZero),
            "iv" => Ok(ReductionCaseId::Iv),
            other => Err(Error::InvalidParameter(format!(
                "unknown reduction case `{other}` (expected i, ii, iii, iii-lambda0, iv)"
            ))),
        }
    }
}

impl fmt::Display for ReductionCaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fully instantiated reduction: ansatz, similarity variable, and the
/// machine-derived ODE.
#[derive(Clone, Debug)]
pub struct ReductionCase {
    pub id: ReductionCaseId,
    pub k: Rat,
    pub lambda: Rat,
    /// `U` as an expression in `t`, `x` (the radius), and `phi`.
    pub ansatz_u: Expr,
    /// Similarity variable as an expression in `t` and `x` (for the
    /// separable subcase it is `t` itself).
    pub omega_def: Expr,
    /// The machine-derived ODE left side in `omega`, `phi`, `phi'`,
    /// `phi''` (vanishes on solutions).
    pub ode: Expr,
    /// Conventionally printed form of the same ODE.
    pub printed: Expr,
    /// Factor clearing the common `t`-power/exponential from the
    /// substituted residual.
    clearing_factor: Expr,
    /// Whether substituting the ansatz reproduces the stored ODE.
    pub derivation_ok: bool,
    /// Whether the derived ODE equals the printed form.
    pub matches_printed: bool,
}

fn num(r: &Rat) -> Expr {
    Expr::Num(r.clone())
}

/// Build one reduction case and run the symbolic derivation check: the
/// ansatz is substituted into the radial equation and the cleared
/// residual is compared against the stored ODE at the given parameters.
pub fn reduce_to_ode(
    id: ReductionCaseId,
    k: &Rat,
    lambda: &Rat,
    cfg: &SamplerConfig,
) -> Result<ReductionCase> {
    reject_k(k, &[rat(0), rat(-1), Rat::new((-1).into(), 2.into())])?;
    let needs_lambda = matches!(id, ReductionCaseId::Iii | ReductionCaseId::Iv);
    if needs_lambda && lambda.is_zero() {
        return Err(Error::InvalidParameter(format!(
            "case {id} requires lambda != 0"
        )));
    }

    let ln = num(lambda);
    let two_k = k * rat(2);
    let kp1 = k + rat(1);
    let w = omega();
    let ph = phi(0, &w);
    let ph1 = phi(1, &w);
    let ph2 = phi(2, &w);
    // Shared second-order skeleton (2k+1) phi'' + phi'/omega.
    let head = Expr::add2(
        Expr::mul2(num(&(&two_k + rat(1))), ph2.clone()),
        Expr::mul2(Expr::powi(w.clone(), -1), ph1.clone()),
    );

    let (ansatz_u, omega_def, ode, printed, clearing_factor) = match id {
        ReductionCaseId::I => {
            // U = phi(r): (omega^-1) phi'^(2k+1) + (2k+1) phi'^2k phi''.
            let ode = Expr::add2(
                Expr::mul2(
                    Expr::powi(w.clone(), -1),
                    Expr::powr(ph1.clone(), &two_k + rat(1)),
                ),
                Expr::mul(vec![
                    num(&(&two_k + rat(1))),
                    Expr::powr(ph1.clone(), two_k.clone()),
                    ph2.clone(),
                ]),
            );
            let om = Expr::x(0);
            (phi(0, &om), om, ode.clone(), ode, Expr::num(-1))
        }
        ReductionCaseId::Ii => {
            // U = (lambda/(2(k+1))) log t + phi(omega),
            // omega = r t^(-1/(2(k+1))).
            let s = Rat::new(1.into(), 2.into()) / &kp1;
            let om = Expr::mul2(Expr::x(0), Expr::powr(Expr::t(), -&s));
            let ansatz = Expr::add2(
                Expr::mul(vec![num(lambda), Expr::ratio(1, 2), Expr::powi(num(&kp1), -1), Expr::log(Expr::t())]),
                phi(0, &om),
            );
            let half_kp1 = Expr::mul2(Expr::ratio(1, 2), Expr::powi(num(&kp1), -1));
            let ode = Expr::add(vec![
                head.clone(),
                Expr::mul(vec![
                    half_kp1.clone(),
                    w.clone(),
                    Expr::powr(ph1.clone(), rat(1) - &two_k),
                ]),
                Expr::mul(vec![
                    half_kp1.clone(),
                    ln.clone(),
                    Expr::powr(ph1.clone(), -&two_k),
                ])
                .neg(),
            ]);
            // The printed form lacks the omega factor on the third term.
            let printed = Expr::add(vec![
                head.clone(),
                Expr::mul(vec![
                    half_kp1.clone(),
                    Expr::powr(ph1.clone(), rat(1) - &two_k),
                ]),
                Expr::mul(vec![half_kp1, ln.clone(), Expr::powr(ph1.clone(), -&two_k)]).neg(),
            ]);
            let factor = Expr::mul(vec![
                Expr::num(-1),
                Expr::t(),
                Expr::powr(phi(1, &om), -&two_k),
            ]);
            (ansatz, om, ode, printed, factor)
        }
        ReductionCaseId::Iii => {
            // U = e^((k+1)t/lambda) phi(omega), omega = r e^(-kt/lambda).
            let rate = Expr::mul2(num(&(&kp1 / lambda)), Expr::t());
            let om = Expr::mul2(
                Expr::x(0),
                Expr::exp(Expr::mul2(num(&(-(k / lambda))), Expr::t())),
            );
            let ansatz = Expr::mul2(Expr::exp(rate.clone()), phi(0, &om));
            let ode = Expr::add(vec![
                head.clone(),
                Expr::mul(vec![
                    num(&(k / lambda)),
                    w.clone(),
                    Expr::powr(ph1.clone(), rat(1) - &two_k),
                ]),
                Expr::mul(vec![
                    num(&(&kp1 / lambda)),
                    ph.clone(),
                    Expr::powr(ph1.clone(), -&two_k),
                ])
                .neg(),
            ]);
            let factor = Expr::mul(vec![
                Expr::num(-1),
                Expr::exp(rate.neg()),
                Expr::powr(phi(1, &om), -&two_k),
            ]);
            (ansatz, om, ode.clone(), ode, factor)
        }
        ReductionCaseId::IiiLambdaZero => {
            // U = r^((k+1)/k) phi(t): phi' = A phi^(1+2k) with
            // A = ((3k+1)/k)((k+1)/k)^(1+2k).
            let c = &kp1 / k;
            let e = &two_k + rat(1);
            let a = separable_rate(k)?;
            let om = Expr::t();
            let ansatz = Expr::mul2(Expr::powr(Expr::x(0), c), phi(0, &om));
            let ode = Expr::sub(
                ph1.clone(),
                Expr::mul2(Expr::Num(a), Expr::powr(ph.clone(), e)),
            );
            let factor = Expr::powr(Expr::x(0), -(&kp1 / k));
            (ansatz, om, ode.clone(), ode, factor)
        }
        ReductionCaseId::Iv => {
            // U = t^(lambda/2) phi(omega), omega = r t^(-gamma),
            // gamma = (1 + lambda k)/(2(k+1)).
            let gamma = (rat(1) + lambda * k) / (&kp1 * rat(2));
            let om = Expr::mul2(Expr::x(0), Expr::powr(Expr::t(), -&gamma));
            let ansatz = Expr::mul2(
                Expr::powr(Expr::t(), lambda / rat(2)),
                phi(0, &om),
            );
            let ode = Expr::add(vec![
                head.clone(),
                Expr::mul(vec![
                    num(&gamma),
                    w.clone(),
                    Expr::powr(ph1.clone(), rat(1) - &two_k),
                ]),
                Expr::mul(vec![
                    num(&(lambda / rat(2))),
                    ph.clone(),
                    Expr::powr(ph1.clone(), -&two_k),
                ])
                .neg(),
            ]);
            let factor = Expr::mul(vec![
                Expr::num(-1),
                Expr::powr(Expr::t(), rat(1) - lambda / rat(2)),
                Expr::powr(phi(1, &om), -&two_k),
            ]);
            (ansatz, om, ode.clone(), ode, factor)
        }
    };

    let mut case = ReductionCase {
        id,
        k: k.clone(),
        lambda: lambda.clone(),
        ansatz_u,
        omega_def,
        ode,
        printed,
        clearing_factor,
        derivation_ok: false,
        matches_printed: false,
    };
    case.derivation_ok = case.derivation_check(cfg)?.is_zero;
    case.matches_printed = is_zero(&Expr::sub(case.ode.clone(), case.printed.clone()), cfg)?.is_zero;
    Ok(case)
}

impl ReductionCase {
    /// Substitute the ansatz into the radial equation, clear the common
    /// factor, and compare with the stored ODE.
    pub fn derivation_check(&self, cfg: &SamplerConfig) -> Result<ZeroReport> {
        let x = Symbol::Space(0);
        let ux = self.ansatz_u.diff(&x);
        let uxx = ux.diff(&x);
        let mut bind = BTreeMap::new();
        bind.insert(Symbol::jet(0, 1, 0), ux);
        bind.insert(Symbol::jet(0, 2, 0), uxx);
        let rhs = radial_rhs(&num(&self.k), true).substitute(&bind);
        let residual = Expr::sub(self.ansatz_u.diff(&Symbol::Time), rhs);
        let cleared = Expr::mul2(residual, self.clearing_factor.clone());
        let target = self.ode.subst(&omega_sym(), &self.omega_def);
        is_zero(&Expr::sub(cleared, target), cfg)
    }

    /// Order of the reduced ODE.
    pub fn order(&self) -> u8 {
        match self.id {
            ReductionCaseId::IiiLambdaZero => 1,
            _ => 2,
        }
    }

    /// Solve the ODE for its top derivative at a numeric state. The
    /// stored ODE is linear in the top derivative, so two evaluations
    /// recover slope and offset.
    pub fn eval_top_derivative(&self, omega: f64, phi_v: f64, dphi: f64) -> Result<f64> {
        let top = self.order();
        let eval_at = |guess: f64| -> Result<f64> {
            let mut env = FloatEnv::new();
            env.set(omega_sym(), omega);
            env.pin_opaque("phi", vec![0], &[omega], phi_v);
            if top == 2 {
                env.pin_opaque("phi", vec![1], &[omega], dphi);
                env.pin_opaque("phi", vec![2], &[omega], guess);
            } else {
                env.pin_opaque("phi", vec![1], &[omega], guess);
            }
            crate::expr::eval_f64(&self.ode, &mut env)
        };
        let at0 = eval_at(0.0)?;
        let at1 = eval_at(1.0)?;
        let slope = at1 - at0;
        if slope.abs() < 1e-14 {
            return Err(Error::Domain(
                "reduced ODE is singular in its top derivative here".to_string(),
            ));
        }
        Ok(-at0 / slope)
    }
}

/// Growth constant `A = ((3k+1)/k)((k+1)/k)^(1+2k)` of the separable
/// subcase. Exact when the exponent is an integer; rejected when the base
/// is negative with a fractional exponent.
pub fn separable_rate(k: &Rat) -> Result<Rat> {
    let c = (k + rat(1)) / k;
    let e = k * rat(2) + rat(1);
    if !e.is_integer() {
        return Err(Error::InvalidParameter(format!(
            "separable subcase needs an integer exponent 1 + 2k, got {e}"
        )));
    }
    let n = e
        .numer()
        .to_i64()
        .ok_or_else(|| Error::Domain("exponent overflow".to_string()))?;
    let m = n.unsigned_abs() as u32;
    let pow = if n >= 0 {
        Rat::new(c.numer().pow(m), c.denom().pow(m))
    } else {
        Rat::new(c.denom().pow(m), c.numer().pow(m))
    };
    Ok((k * rat(3) + rat(1)) / k * pow)
}

/// Adaptive Simpson quadrature with absolute tolerance.
fn simpson<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn rule<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64) -> Result<(f64, f64, f64, f64)> {
        let m = 0.5 * (a + b);
        let fa = f(a)?;
        let fm = f(m)?;
        let fb = f(b)?;
        Ok((fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb)))
    }
    fn refine<F: Fn(f64) -> Result<f64>>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 {
            return Err(Error::Domain(
                "quadrature failed to converge".to_string(),
            ));
        }
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(refine(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1)?
            + refine(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    let (fa, fm, fb, whole) = rule(f, a, b)?;
    refine(f, a, b, fa, fm, fb, whole, tol, 40)
}

const QUAD_TOL: f64 = 1e-10;

/// Closed-form solution of the log-time similarity ODE with
/// `lambda = 0`: after the substitution `z = (phi')^2k` that equation is
/// linear, giving `phi' = ((-k omega^2 + C1 omega^(-2k/(2k+1)))
/// / (2(k+1)(3k+1)))^(1/(2k))`; `phi` is recovered by quadrature, cached
/// on a fixed mesh over the construction interval.
#[derive(Clone, Debug)]
pub struct BernoulliSolution {
    pub k: Rat,
    pub c1: Rat,
    lo: f64,
    hi: f64,
    mesh: Vec<f64>,
    cum: Vec<f64>,
}

/// Construct the quadrature-backed evaluator on `[lo, hi]`.
pub fn bernoulli_closed_form(k: &Rat, c1: &Rat, lo: f64, hi: f64) -> Result<BernoulliSolution> {
    reject_k(
        k,
        &[
            rat(0),
            rat(-1),
            Rat::new((-1).into(), 2.into()),
            Rat::new((-1).into(), 3.into()),
        ],
    )?;
    if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
        return Err(Error::InvalidParameter(
            "quadrature interval must satisfy 0 < lo < hi".to_string(),
        ));
    }
    let mut sol = BernoulliSolution {
        k: k.clone(),
        c1: c1.clone(),
        lo,
        hi,
        mesh: Vec::new(),
        cum: Vec::new(),
    };
    let n = 64usize;
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    sol.mesh.push(lo);
    sol.cum.push(0.0);
    for i in 1..=n {
        let a = lo + (i - 1) as f64 * h;
        let b = lo + i as f64 * h;
        acc += simpson(&|w| sol.integrand(w), a, b, QUAD_TOL)?;
        sol.mesh.push(b);
        sol.cum.push(acc);
    }
    Ok(sol)
}

impl BernoulliSolution {
    /// `phi'(omega)`; errors when the radicand is not positive.
    pub fn integrand(&self, w: f64) -> Result<f64> {
        let k = rat_to_f64(&self.k);
        let c1 = rat_to_f64(&self.c1);
        if w <= 0.0 {
            return Err(Error::Domain("similarity variable must be positive".to_string()));
        }
        let radicand =
            (-k * w * w + c1 * w.powf(-2.0 * k / (2.0 * k + 1.0))) / (2.0 * (k + 1.0) * (3.0 * k + 1.0));
        if !(radicand > 0.0 && radicand.is_finite()) {
            return Err(Error::Domain(format!(
                "radicand {radicand:.3e} is not positive at omega = {w}"
            )));
        }
        Ok(radicand.powf(1.0 / (2.0 * k)))
    }

    /// `phi(omega) = integral + C2`, using the cached mesh.
    pub fn phi(&self, w: f64, c2: f64) -> Result<f64> {
        if !(self.lo <= w && w <= self.hi) {
            return Err(Error::Domain(format!(
                "omega = {w} outside the constructed interval [{}, {}]",
                self.lo, self.hi
            )));
        }
        let i = self
            .mesh
            .partition_point(|m| *m <= w)
            .saturating_sub(1);
        let tail = simpson(&|x| self.integrand(x), self.mesh[i], w, QUAD_TOL)?;
        Ok(self.cum[i] + tail + c2)
    }
}

/// Symbolic check that `z = -k omega^2/(2(k+1)(3k+1))
/// + C1 omega^(-2k/(2k+1))` solves the linearised first-order equation
/// `z' + (2k/(2k+1)) z/omega + k omega/((k+1)(2k+1)) = 0` with `C1` kept
/// symbolic.
pub fn bernoulli_linear_check(k: &Rat, cfg: &SamplerConfig) -> Result<ZeroReport> {
    let w = omega();
    let kp1 = k + rat(1);
    let tkp1 = k * rat(2) + rat(1);
    let z = Expr::add2(
        Expr::mul(vec![
            num(&(-(k.clone()) / (&kp1 * (k * rat(3) + rat(1)) * rat(2)))),
            Expr::powi(w.clone(), 2),
        ]),
        Expr::mul2(
            Expr::param("C1"),
            Expr::powr(w.clone(), -(k * rat(2)) / &tkp1),
        ),
    );
    let lhs = Expr::add(vec![
        z.diff(&omega_sym()),
        Expr::mul(vec![
            num(&(k * rat(2) / &tkp1)),
            z,
            Expr::powi(w.clone(), -1),
        ]),
        Expr::mul2(num(&(k / (&kp1 * &tkp1))), w.clone()),
    ]);
    is_zero(&lhs, cfg)
}

/// Symbolic check that the quadrature integrand satisfies the
/// first-order form of the corrected log-time similarity ODE with
/// `lambda = 0`: `(2k+1) y' + y/omega + omega y^(1-2k)/(2(k+1)) = 0`.
pub fn bernoulli_first_order_check(k: &Rat, c1: &Rat, cfg: &SamplerConfig) -> Result<ZeroReport> {
    let w = omega();
    let kp1 = k + rat(1);
    let tkp1 = k * rat(2) + rat(1);
    let radicand = Expr::mul2(
        Expr::add2(
            Expr::mul2(num(&-k.clone()), Expr::powi(w.clone(), 2)),
            Expr::mul2(num(c1), Expr::powr(w.clone(), -(k * rat(2)) / &tkp1)),
        ),
        Expr::powi(num(&(&kp1 * (k * rat(3) + rat(1)) * rat(2))), -1),
    );
    let y = Expr::powr(radicand, Rat::new(1.into(), 2.into()) / k);
    let lhs = Expr::add(vec![
        Expr::mul2(num(&tkp1), y.diff(&omega_sym())),
        Expr::mul2(y.clone(), Expr::powi(w.clone(), -1)),
        Expr::mul(vec![
            num(&(Rat::new(1.into(), 2.into()) / &kp1)),
            w.clone(),
            Expr::powr(y, rat(1) - k * rat(2)),
        ]),
    ]);
    is_zero(&lhs, cfg)
}

/// Integrate the machine-derived log-time ODE (`lambda = 0`) with the
/// adaptive Runge-Kutta integrator from closed-form initial data at
/// `omega = 1` and return the largest deviation from the
/// quadrature-backed closed form at the checkpoints of `[1, 2]`.
pub fn bernoulli_vs_integration(
    k: &Rat,
    c1: &Rat,
    cfg: &SamplerConfig,
    ode_tol: f64,
) -> Result<f64> {
    let case = reduce_to_ode(ReductionCaseId::Ii, k, &rat(0), cfg)?;
    let quad = bernoulli_closed_form(k, c1, 0.9, 2.1)?;
    let rhs = |w: f64, y: &[f64]| -> Result<Vec<f64>> {
        Ok(vec![y[1], case.eval_top_derivative(w, y[0], y[1])?])
    };
    let mut y = vec![quad.phi(1.0, 0.0)?, quad.integrand(1.0)?];
    let mut worst: f64 = 0.0;
    let n = 16usize;
    for i in 0..n {
        let a = 1.0 + i as f64 / n as f64;
        let b = 1.0 + (i + 1) as f64 / n as f64;
        let traj = crate::numerics::integrate_ode(&rhs, &y, (a, b), ode_tol)?;
        if let Some(d) = &traj.diagnostic {
            return Err(Error::Domain(format!("integration stopped early: {d}")));
        }
        y = traj.end().1.to_vec();
        worst = worst.max((y[0] - quad.phi(b, 0.0)?).abs());
    }
    Ok(worst)
}

/// Which exponent the time factor of the inverse-root family carries.
/// Composing the similarity ansatz with the reduced-ODE solution yields
/// `e^(-4t/(3 lambda))`; the conventionally printed solution shows
/// `e^(-2t/(3 lambda))`. Both are exposed so a finite-difference residual
/// oracle can adjudicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExponentVariant {
    Derived,
    Printed,
}

/// A closed-form exact solution of the two-dimensional power-law
/// equation, evaluated as `u(t, r)`.
#[derive(Clone, Debug)]
pub enum ExactSolution {
    /// Two-parameter family from the Bernoulli quadrature:
    /// `u = phi(omega) + C2, omega = t^(-1/(2(k+1))) r`.
    RadialQuadrature {
        quad: BernoulliSolution,
        c2: f64,
    },
    /// `k = -1/3` family `u = s 2 / sqrt(C2 e^(a t/(3 lambda))
    /// - 2 (3 lambda)^-3 r^4)` with `a = -4` (derived) or `-2` (printed).
    InverseRoot {
        lambda: Rat,
        c2: f64,
        sign: f64,
        variant: ExponentVariant,
    },
    /// Separable solution `u = r^((k+1)/k) (phi0^(-2k) - 2kA t)^(-1/(2k))`.
    SeparablePower { k: Rat, phi0: f64 },
}

/// Family names accepted by [`exact_solution`].
pub const FAMILIES: [&str; 3] = ["radial-quadrature", "inverse-root", "separable-power"];

/// Parameters for one exact-solution family.
#[derive(Clone, Debug, Default)]
pub struct FamilyParams {
    pub k: Option<Rat>,
    pub lambda: Option<Rat>,
    pub c1: Option<Rat>,
    pub c2: Option<f64>,
    pub phi0: Option<f64>,
    pub sign: f64,
    pub variant: Option<ExponentVariant>,
    /// Quadrature interval for the radial-quadrature family.
    pub omega_range: Option<(f64, f64)>,
}

/// Build an exact solution by family name.
pub fn exact_solution(family: &str, params: &FamilyParams) -> Result<ExactSolution> {
    let missing = |what: &str| Error::InvalidParameter(format!("family needs parameter {what}"));
    match family {
        "radial-quadrature" => {
            let k = params.k.clone().ok_or_else(|| missing("k"))?;
            let c1 = params.c1.clone().unwrap_or_else(|| rat(0));
            let (lo, hi) = params.omega_range.unwrap_or((0.5, 4.0));
            Ok(ExactSolution::RadialQuadrature {
                quad: bernoulli_closed_form(&k, &c1, lo, hi)?,
                c2: params.c2.unwrap_or(0.0),
            })
        }
        "inverse-root" => {
            let lambda = params.lambda.clone().ok_or_else(|| missing("lambda"))?;
            if lambda.is_zero() {
                return Err(Error::InvalidParameter("lambda must be nonzero".to_string()));
            }
            Ok(ExactSolution::InverseRoot {
                lambda,
                c2: params.c2.unwrap_or(1.0),
                sign: if params.sign < 0.0 { -1.0 } else { 1.0 },
                variant: params.variant.unwrap_or(ExponentVariant::Derived),
            })
        }
        "separable-power" => {
            let k = params.k.clone().ok_or_else(|| missing("k"))?;
            separable_rate(&k)?;
            let phi0 = params.phi0.unwrap_or(0.1);
            if phi0 <= 0.0 {
                return Err(Error::InvalidParameter("phi0 must be positive".to_string()));
            }
            Ok(ExactSolution::SeparablePower { k, phi0 })
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown family `{other}` (expected one of {FAMILIES:?})"
        ))),
    }
}

impl ExactSolution {
    /// Exponent of the solution's diffusivity power law.
    pub fn k(&self) -> Rat {
        match self {
            ExactSolution::RadialQuadrature { quad, .. } => quad.k.clone(),
            ExactSolution::InverseRoot { .. } => Rat::new((-1).into(), 3.into()),
            ExactSolution::SeparablePower { k, .. } => k.clone(),
        }
    }

    /// Evaluate `u(t, r)`; errors outside the positivity domain.
    pub fn eval(&self, t: f64, r: f64) -> Result<f64> {
        match self {
            ExactSolution::RadialQuadrature { quad, c2 } => {
                if t <= 0.0 {
                    return Err(Error::Domain("time must be positive".to_string()));
                }
                let k = rat_to_f64(&quad.k);
                let w = t.powf(-1.0 / (2.0 * (k + 1.0))) * r;
                quad.phi(w, *c2)
            }
            ExactSolution::InverseRoot {
                lambda,
                c2,
                sign,
                variant,
            } => {
                let l = rat_to_f64(lambda);
                let a = match variant {
                    ExponentVariant::Derived => -4.0,
                    ExponentVariant::Printed => -2.0,
                };
                let radicand = c2 * (a * t / (3.0 * l)).exp() - 2.0 * (3.0 * l).powi(-3) * r.powi(4);
                if radicand <= 0.0 {
                    return Err(Error::Domain(format!(
                        "radicand {radicand:.3e} is not positive at (t, r) = ({t}, {r})"
                    )));
                }
                Ok(sign * 2.0 / radicand.sqrt())
            }
            ExactSolution::SeparablePower { k, phi0 } => {
                let kf = rat_to_f64(k);
                let a = rat_to_f64(&separable_rate(k)?);
                let base = phi0.powf(-2.0 * kf) - 2.0 * kf * a * t;
                if base <= 0.0 {
                    return Err(Error::Domain(format!(
                        "separable profile left its domain at t = {t}"
                    )));
                }
                if r <= 0.0 {
                    return Err(Error::Domain("radius must be positive".to_string()));
                }
                Ok(r.powf((kf + 1.0) / kf) * base.powf(-1.0 / (2.0 * kf)))
            }
        }
    }
}

/// Export a sampled profile as delimited text with columns `t r u`.
pub fn export_profile(sol: &ExactSolution, ts: &[f64], rs: &[f64]) -> Result<String> {
    let mut out = String::from("t\tr\tu\n");
    for &t in ts {
        for &r in rs {
            let u = sol.eval(t, r)?;
            out.push_str(&format!("{t}\t{r}\t{u}\n"));
        }
    }
    Ok(out)
}

/// First-integral check of the inverse-root family: the profile
/// `phi = 2 / sqrt(C2 - 2 (3 lambda)^-3 omega^4)` satisfies
/// `omega (phi')^(1/3) = omega^2 phi / (3 lambda)`. `lambda` must be
/// positive so the cube root stays real.
pub fn inverse_root_first_integral(lambda: &Rat, c2: &Rat, cfg: &SamplerConfig) -> Result<ZeroReport> {
    if !lambda.is_positive() {
        return Err(Error::InvalidParameter(
            "first-integral check needs lambda > 0".to_string(),
        ));
    }
    let w = omega();
    let a = rat(2) / (lambda * rat(3) * (lambda * rat(3)) * (lambda * rat(3)));
    let radicand = Expr::sub(num(c2), Expr::mul2(num(&a), Expr::powi(w.clone(), 4)));
    let ph = Expr::mul2(Expr::num(2), Expr::powr(radicand, Rat::new((-1).into(), 2.into())));
    let third = Rat::new(1.into(), 3.into());
    let lhs = Expr::mul2(w.clone(), Expr::powr(ph.diff(&omega_sym()), third));
    let rhs = Expr::mul(vec![
        Expr::powi(w.clone(), 2),
        ph,
        Expr::powi(num(&(lambda * rat(3))), -1),
    ]);
    is_zero(&Expr::sub(lhs, rhs), cfg)
}

/// The one-dimensional hodograph linearization: for
/// `u_t = u_x^-2 u_xx + Q(u)`, swapping the roles of `x` and `u` by
/// `x = w(t, u)` turns the equation into the linear
/// `w_t = w_uu - Q(u) w_u`.
#[derive(Clone, Debug)]
pub struct Hodograph1d {
    pub q: Expr,
    pub nonlinear: PdeSpec,
}

pub fn hodograph_1d(q: &Expr) -> Hodograph1d {
    Hodograph1d {
        q: q.clone(),
        nonlinear: PdeSpec::gradient_1d(Expr::powi(Expr::jet(0, 1, 0), -2), q.clone()),
    }
}

impl Hodograph1d {
    /// Left side of the linear target equation for a candidate `w(t, u)`.
    pub fn linear_residual(&self, w: &Expr) -> Expr {
        let u = Symbol::u();
        Expr::add(vec![
            w.diff(&Symbol::Time),
            w.diff(&u).diff(&u).neg(),
            Expr::mul2(self.q.clone(), w.diff(&u)),
        ])
        .normalize()
    }

    /// Nonlinear residual after substituting the implicit-function jets
    /// of `x = w(t, u)`:
    /// `u_t = -w_t/w_u, u_x = 1/w_u, u_xx = -w_uu/w_u^3`.
    pub fn nonlinear_residual_via(&self, w: &Expr) -> Expr {
        let u = Symbol::u();
        let wt = w.diff(&Symbol::Time);
        let wu = w.diff(&u);
        let wuu = wu.diff(&u);
        let mut bind = BTreeMap::new();
        bind.insert(
            Symbol::jet(1, 0, 0),
            Expr::mul2(wt, Expr::powi(wu.clone(), -1)).neg(),
        );
        bind.insert(Symbol::jet(0, 1, 0), Expr::powi(wu.clone(), -1));
        bind.insert(
            Symbol::jet(0, 2, 0),
            Expr::mul2(wuu, Expr::powi(wu, -3)).neg(),
        );
        self.nonlinear.residual().substitute(&bind)
    }

    /// Check a closed-form profile: `w` must solve the linear equation,
    /// and the implicit inverse must annihilate the nonlinear residual.
    pub fn check_profile(&self, w: &Expr, cfg: &SamplerConfig) -> Result<bool> {
        Ok(is_zero(&self.linear_residual(w), cfg)?.is_zero
            && is_zero(&self.nonlinear_residual_via(w), cfg)?.is_zero)
    }

    /// Generic chain-rule witness with an opaque `w`: the substituted
    /// nonlinear residual equals `-(linear residual)/w_u` identically.
    pub fn identity_witness(&self, cfg: &SamplerConfig) -> Result<ZeroReport> {
        let w = Expr::call("w", vec![Expr::t(), Expr::u()]);
        let wu = w.diff(&Symbol::u());
        let lhs = self.nonlinear_residual_via(&w);
        let rhs = Expr::mul2(self.linear_residual(&w), Expr::powi(wu, -1)).neg();
        is_zero(&Expr::sub(lhs, rhs), cfg)
    }

    /// Numerically invert `x = w(t, u)` on a grid by bisection. The
    /// profile must be strictly monotone in `u` over `u_range`.
    pub fn invert_profile(
        &self,
        w: &Expr,
        t: f64,
        xs: &[f64],
        u_range: (f64, f64),
    ) -> Result<Vec<f64>> {
        let (ulo, uhi) = u_range;
        let eval_w = |u: f64| -> Result<f64> {
            let mut env = FloatEnv::new();
            env.set(Symbol::Time, t);
            env.set(Symbol::u(), u);
            crate::expr::eval_f64(w, &mut env)
        };
        // Monotonicity scan.
        let n = 64;
        let mut prev = eval_w(ulo)?;
        let mut increasing = None;
        for i in 1..=n {
            let u = ulo + (uhi - ulo) * i as f64 / n as f64;
            let v = eval_w(u)?;
            let step_up = v > prev;
            if v == prev {
                return Err(Error::NonMonotone);
            }
            match increasing {
                None => increasing = Some(step_up),
                Some(dir) if dir != step_up => return Err(Error::NonMonotone),
                _ => {}
            }
            prev = v;
        }
        let inc = increasing.ok_or(Error::NonMonotone)?;
        let wlo = eval_w(ulo)?;
        let whi = eval_w(uhi)?;
        let mut out = Vec::with_capacity(xs.len());
        for &x in xs {
            let (mut a, mut b) = (ulo, uhi);
            let inside = if inc { wlo <= x && x <= whi } else { whi <= x && x <= wlo };
            if !inside {
                return Err(Error::Domain(format!(
                    "x = {x} outside the profile's range at t = {t}"
                )));
            }
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let v = eval_w(m)?;
                if (v < x) == inc {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        Ok(out)
    }
}

/// Chain-rule witness of the radial hodograph map for the `k = -1`
/// radial equation `U_t = U_r^-1/r - U_r^-2 U_rr`: under `r = sqrt(V)`,
/// `U = z` with opaque `V(t, z)`, the substituted residual equals
/// `-(V_t + V_zz)/V_z`, so solutions of the backward heat equation
/// `V_t = -V_zz` with `V > 0` map to radial solutions.
pub fn radial_hodograph_identity(cfg: &SamplerConfig) -> Result<ZeroReport> {
    let v = Expr::call("V", vec![Expr::t(), Expr::u()]);
    let vt = v.diff(&Symbol::Time);
    let vz = v.diff(&Symbol::u());
    let vzz = vz.diff(&Symbol::u());
    let x = Expr::x(0);
    let ur = Expr::mul(vec![Expr::num(2), x.clone(), Expr::powi(vz.clone(), -1)]);
    let urr = Expr::mul2(
        Expr::sub(
            Expr::num(2),
            Expr::mul2(vzz.clone(), Expr::powi(ur.clone(), 2)),
        ),
        Expr::powi(vz.clone(), -1),
    );
    let ut = Expr::mul2(vt.clone(), Expr::powi(vz.clone(), -1)).neg();
    let mut bind = BTreeMap::new();
    bind.insert(Symbol::jet(1, 0, 0), ut);
    bind.insert(Symbol::jet(0, 1, 0), ur);
    bind.insert(Symbol::jet(0, 2, 0), urr);
    let residual = Expr::sub(Expr::jet(1, 0, 0), radial_rhs(&Expr::num(-1), true))
        .substitute(&bind)
        .subst(
            &Symbol::Space(0),
            &Expr::powr(v.clone(), Rat::new(1.into(), 2.into())),
        );
    let expected = Expr::mul2(
        Expr::add2(vt, vzz),
        Expr::powi(vz, -1),
    )
    .neg();
    is_zero(&Expr::sub(residual, expected), cfg)
}

/// Closed-form radial solution obtained from `V = e^t sin z`:
/// `U(t, r) = asin(r^2 e^-t)` on `0 < r^2 e^-t < 1`.
pub fn radial_hodograph_solution(t: f64, r: f64) -> Result<f64> {
    let arg = r * r * (-t).exp();
    if !(0.0 < arg && arg < 1.0) {
        return Err(Error::Domain(format!(
            "r^2 e^-t = {arg} outside (0, 1)"
        )));
    }
    Ok(arg.asin())
}
