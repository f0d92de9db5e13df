//! Reaction-diffusion equations with gradient-dependent diffusivity.
//!
//! The one-dimensional class is `u_t = D(u_x) u_xx + Q(u)` (or the
//! divergence form `u_t = (D(u_x) u_x)_x + Q(u)`); the two-dimensional
//! class is `u_t = div(D(W) grad u) + Q(u)` with `W = |grad u|^2`. The
//! diffusivity is stored as an expression in a slot symbol (`u_x` for one
//! dimension, the parameter `W` for two) and the source as an expression
//! in `u`; both may be opaque calls for family-level computations.
//!
//! This module provides the invariance condition for point symmetries, the
//! split into determining equations, the closed-form solutions of the
//! diffusivity ODE the split leads to, and the equivalence/form-preserving
//! transformation engine.

use crate::expr::{
    is_zero, rat, Expr, JetSpace, Rat, SamplerConfig, Symbol, ZeroReport,
};
use crate::jet::VectorField;
use crate::{Error, Result};
use num_traits::Zero;
use std::collections::BTreeMap;

/// How the spatial operator is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdeForm {
    /// `D(u_x) u_xx` (one dimension only).
    GradientProduct,
    /// `div(D grad u)`, expanded.
    Divergence,
}

/// The gradient-square slot symbol used by two-dimensional diffusivities.
pub fn omega_slot() -> Symbol {
    Symbol::param("W")
}

/// One equation of the class, given by its diffusivity and source.
#[derive(Clone, Debug, PartialEq)]
pub struct PdeSpec {
    pub space: JetSpace,
    pub form: PdeForm,
    /// Expression in `u_x` (one dimension) or in the slot `W` (two).
    pub diffusivity: Expr,
    /// Expression in `u`.
    pub source: Expr,
}

impl PdeSpec {
    /// `u_t = D(u_x) u_xx + Q(u)`.
    pub fn gradient_1d(diffusivity: Expr, source: Expr) -> PdeSpec {
        PdeSpec {
            space: JetSpace::new(1),
            form: PdeForm::GradientProduct,
            diffusivity: diffusivity.normalize(),
            source: source.normalize(),
        }
    }

    /// `u_t = (D(u_x) u_x)_x + Q(u)`.
    pub fn divergence_1d(diffusivity: Expr, source: Expr) -> PdeSpec {
        PdeSpec {
            space: JetSpace::new(1),
            form: PdeForm::Divergence,
            diffusivity: diffusivity.normalize(),
            source: source.normalize(),
        }
    }

    /// `u_t = div(D(W) grad u) + Q(u)` with `W = |grad u|^2`.
    pub fn divergence_2d(diffusivity: Expr, source: Expr) -> PdeSpec {
        PdeSpec {
            space: JetSpace::new(2),
            form: PdeForm::Divergence,
            diffusivity: diffusivity.normalize(),
            source: source.normalize(),
        }
    }

    /// Family-level one-dimensional equation with opaque `D(u_x)`, `Q(u)`.
    pub fn opaque_1d() -> PdeSpec {
        PdeSpec::gradient_1d(
            Expr::call("D", vec![Expr::jet(0, 1, 0)]),
            Expr::call("Q", vec![Expr::u()]),
        )
    }

    /// Family-level two-dimensional equation with opaque `D(W)`, `Q(u)`.
    pub fn opaque_2d() -> PdeSpec {
        PdeSpec::divergence_2d(
            Expr::call("D", vec![Expr::param("W")]),
            Expr::call("Q", vec![Expr::u()]),
        )
    }

    /// Right side of the equation, fully expanded in jet coordinates.
    /// The slot `W` is eliminated so only genuine jet coordinates remain.
    pub fn rhs(&self) -> Expr {
        match (self.space.dim, self.form) {
            (1, PdeForm::GradientProduct) => Expr::add2(
                Expr::mul2(self.diffusivity.clone(), Expr::jet(0, 2, 0)),
                self.source.clone(),
            )
            .normalize(),
            (1, PdeForm::Divergence) => {
                // (D(u_x) u_x)_x = (D + u_x D') u_xx.
                let ux = Symbol::jet(0, 1, 0);
                let dprime = self.diffusivity.diff(&ux);
                Expr::add(vec![
                    Expr::mul2(self.diffusivity.clone(), Expr::jet(0, 2, 0)),
                    Expr::mul(vec![
                        Expr::Sym(ux),
                        dprime,
                        Expr::jet(0, 2, 0),
                    ]),
                    self.source.clone(),
                ])
                .normalize()
            }
            (2, PdeForm::Divergence) => {
                // div(D grad u) = D Lap u
                //   + 2 D' (u_1^2 u_11 + 2 u_1 u_2 u_12 + u_2^2 u_22).
                let w = omega_slot();
                let omega = Expr::add2(
                    Expr::powi(Expr::jet(0, 1, 0), 2),
                    Expr::powi(Expr::jet(0, 0, 1), 2),
                );
                let mut bind = BTreeMap::new();
                bind.insert(w.clone(), omega);
                let d = self.diffusivity.substitute(&bind);
                let dprime = self.diffusivity.diff(&w).substitute(&bind);
                let lap = Expr::add2(Expr::jet(0, 2, 0), Expr::jet(0, 0, 2));
                let aniso = Expr::add(vec![
                    Expr::mul(vec![
                        Expr::powi(Expr::jet(0, 1, 0), 2),
                        Expr::jet(0, 2, 0),
                    ]),
                    Expr::mul(vec![
                        Expr::num(2),
                        Expr::jet(0, 1, 0),
                        Expr::jet(0, 0, 1),
                        Expr::jet(0, 1, 1),
                    ]),
                    Expr::mul(vec![
                        Expr::powi(Expr::jet(0, 0, 1), 2),
                        Expr::jet(0, 0, 2),
                    ]),
                ]);
                Expr::add(vec![
                    Expr::mul2(d, lap),
                    Expr::mul(vec![Expr::num(2), dprime, aniso]),
                    self.source.clone(),
                ])
                .normalize()
            }
            _ => unreachable!("gradient-product form is one-dimensional"),
        }
    }

    /// Defining function `F = u_t - RHS` of the solution manifold.
    pub fn residual(&self) -> Expr {
        Expr::sub(Expr::jet(1, 0, 0), self.rhs()).normalize()
    }
}

/// `X^(2) F` restricted to the solution manifold (`u_t` replaced by the
/// right side). Requires the time component of `X` to depend on `t` only,
/// which guarantees no `u_tx`/`u_tt` coordinates survive the substitution.
pub fn invariance_expression(pde: &PdeSpec, field: &VectorField) -> Result<Expr> {
    if field.space != pde.space {
        return Err(Error::InvalidParameter(
            "field and equation live on different jet spaces".to_string(),
        ));
    }
    invariance_expression_for_rhs(&pde.rhs(), field)
}

/// Same construction for an evolution equation `u_t = rhs` given directly
/// by its right side, which may depend on the space variables explicitly
/// (as radially reduced equations do).
pub fn invariance_expression_for_rhs(rhs: &Expr, field: &VectorField) -> Result<Expr> {
    for s in field.xi_t.free_symbols() {
        match s {
            Symbol::Time | Symbol::Param(_) => {}
            other => {
                return Err(Error::InvalidParameter(format!(
                    "time component must depend on t only, found `{}`",
                    Expr::Sym(other)
                )))
            }
        }
    }
    let f = Expr::sub(Expr::jet(1, 0, 0), rhs.clone()).normalize();
    let applied = field.prolong2()?.apply(&f);
    let mut bind = BTreeMap::new();
    bind.insert(Symbol::jet(1, 0, 0), rhs.clone());
    let on_manifold = applied.substitute(&bind);
    for s in on_manifold.free_symbols() {
        if let Symbol::Jet(j) = s {
            if j.dt > 0 {
                return Err(Error::InvalidParameter(format!(
                    "time-derivative coordinate `{}` survived the manifold substitution",
                    Expr::Sym(Symbol::Jet(j))
                )));
            }
        }
    }
    Ok(on_manifold)
}

/// Randomized check that a field generates a point symmetry of the
/// equation.
pub fn check_invariance(
    pde: &PdeSpec,
    field: &VectorField,
    cfg: &SamplerConfig,
) -> Result<ZeroReport> {
    let e = invariance_expression(pde, field)?;
    is_zero(&e, cfg)
}

/// The two determining equations of the one-dimensional family: the
/// coefficient of `u_xx` in the invariance expression and the `u_xx`-free
/// remainder, both negated so they match the conventional printed signs.
#[derive(Clone, Debug)]
pub struct DeterminingSystem {
    pub coeff_uxx: Expr,
    pub remainder: Expr,
}

/// Split the invariance expression by collecting in `u_xx`. The input must
/// be one-dimensional; the expression must be linear in `u_xx` (anything
/// else signals an implementation bug upstream).
pub fn determining_system(pde: &PdeSpec, field: &VectorField) -> Result<DeterminingSystem> {
    if pde.space.dim != 1 {
        return Err(Error::InvalidParameter(
            "determining-system extraction is one-dimensional".to_string(),
        ));
    }
    let e = invariance_expression(pde, field)?;
    let uxx = Symbol::jet(0, 2, 0);
    let a = e.diff(&uxx);
    if !a.diff(&uxx).is_zero_literal() {
        return Err(Error::NotLinear("u_xx".to_string()));
    }
    let b = Expr::sub(e, Expr::mul2(a.clone(), Expr::Sym(uxx))).normalize();
    Ok(DeterminingSystem {
        coeff_uxx: a.neg().normalize(),
        remainder: b.neg().normalize(),
    })
}

/// Conventionally printed forms of the two determining equations for the
/// generic point field on the opaque one-dimensional family, in the same
/// sign convention as [`determining_system`]. The second equation is the
/// single-sum reading of the conventional display, whose line break
/// leaves a dangling plus sign.
pub fn printed_determining_forms() -> (Expr, Expr) {
    let coeff = crate::expr::parse(
        "(eta@[0,1,0](t,x,u) + (eta@[0,0,1](t,x,u) - xi1@[0,1,0](t,x,u))*u_x \
          - xi1@[0,0,1](t,x,u)*u_x^2)*D'(u_x) \
         + (xi0'(t) - 2*xi1@[0,1,0](t,x,u) - 2*xi1@[0,0,1](t,x,u)*u_x)*D(u_x)",
    )
    .expect("printed coefficient form parses");
    let remainder = crate::expr::parse(
        "-eta@[1,0,0](t,x,u) + (xi0'(t) - eta@[0,0,1](t,x,u))*Q(u) \
         + eta(t,x,u)*Q'(u) \
         + (xi1@[1,0,0](t,x,u) + xi1@[0,0,1](t,x,u)*Q(u))*u_x \
         + (eta@[0,2,0](t,x,u) + (2*eta@[0,1,1](t,x,u) - xi1@[0,2,0](t,x,u))*u_x \
            + (eta@[0,0,2](t,x,u) - 2*xi1@[0,1,1](t,x,u))*u_x^2 \
            - xi1@[0,0,2](t,x,u)*u_x^3)*D(u_x)",
    )
    .expect("printed remainder form parses");
    (coeff, remainder)
}

/// Generic point field with opaque components `xi0(t)`, `xi1(t,x,u)`,
/// `eta(t,x,u)` for family-level determining equations.
pub fn generic_point_field_1d() -> VectorField {
    let args = vec![Expr::t(), Expr::x(0), Expr::u()];
    VectorField::new_1d(
        Expr::call("xi0", vec![Expr::t()]),
        Expr::call("xi1", args.clone()),
        Expr::call("eta", args),
    )
    .expect("generic components are point functions")
}

/// General solution of the diffusivity ODE
/// `(e0 + e1 u_x - e2 u_x^2) D' + (e3 - 2 e2 u_x) D = 0`
/// produced by the determining system for power-type symmetry ansatz.
#[derive(Clone, Debug, PartialEq)]
pub enum DFormula {
    /// All coefficients vanish: any diffusivity works.
    Arbitrary,
    /// Only `e3` nonzero: forces `D = 0`, no admissible diffusivity.
    Degenerate,
    /// Closed form with the free constant `C`.
    Closed(Expr),
    /// Irreducible quadrature: `(log D)' = log_derivative(u_x)`.
    Quadrature { log_derivative: Expr },
}

impl DFormula {
    /// Residual of the defining ODE for a candidate diffusivity, as an
    /// expression in `u_x` (and `C`): zero iff the candidate solves it.
    pub fn ode_residual(e: &[Rat; 4], d: &Expr) -> Expr {
        let ux = Expr::jet(0, 1, 0);
        let lead = Expr::add(vec![
            Expr::Num(e[0].clone()),
            Expr::mul2(Expr::Num(e[1].clone()), ux.clone()),
            Expr::mul2(Expr::Num(-e[2].clone()), Expr::powi(ux.clone(), 2)),
        ]);
        let tail = Expr::sub(
            Expr::Num(e[3].clone()),
            Expr::mul(vec![Expr::num(2), Expr::Num(e[2].clone()), ux]),
        );
        Expr::add2(
            Expr::mul2(lead, d.diff(&Symbol::jet(0, 1, 0))),
            Expr::mul2(tail, d.clone()),
        )
        .normalize()
    }
}

/// Solve the diffusivity ODE by branch dispatch on the coefficients.
pub fn solve_coefficient_ode(e: &[Rat; 4]) -> DFormula {
    let ux = Expr::jet(0, 1, 0);
    let c = Expr::param("C");
    let [e0, e1, e2, e3] = e.clone();
    if e2.is_zero() && e1.is_zero() && e0.is_zero() {
        return if e3.is_zero() {
            DFormula::Arbitrary
        } else {
            DFormula::Degenerate
        };
    }
    if e2.is_zero() {
        if !e1.is_zero() {
            // D = C (u_x + e0/e1)^(-e3/e1).
            let shift = Expr::add2(ux, Expr::Num(e0 / &e1));
            let expo = Expr::Num(-e3 / &e1);
            return DFormula::Closed(Expr::mul2(c, Expr::pow(shift, expo)).normalize());
        }
        // e0 != 0: D = C exp(-(e3/e0) u_x).
        let rate = Expr::Num(-e3 / &e0);
        return DFormula::Closed(Expr::mul2(c, Expr::exp(Expr::mul2(rate, ux))).normalize());
    }
    if e0.is_zero() && e1.is_zero() {
        // D = C u_x^-2 exp(-(e3/e2) u_x^-1).
        let rate = Expr::Num(-e3 / &e2);
        return DFormula::Closed(
            Expr::mul(vec![
                c,
                Expr::powi(ux.clone(), -2),
                Expr::exp(Expr::mul2(rate, Expr::powi(ux, -1))),
            ])
            .normalize(),
        );
    }
    // General case: keep (log D)' as an unevaluated quadrature node.
    let numer = Expr::sub(
        Expr::mul(vec![Expr::num(2), Expr::Num(e2.clone()), ux.clone()]),
        Expr::Num(e3),
    );
    let denom = Expr::add(vec![
        Expr::Num(e0),
        Expr::mul2(Expr::Num(e1), ux.clone()),
        Expr::mul2(Expr::Num(-e2), Expr::powi(ux, 2)),
    ]);
    DFormula::Quadrature {
        log_derivative: Expr::div(numer, denom).normalize(),
    }
}

/// A continuous equivalence transformation, with discrete reflections
/// folded into the signs of the scale parameters. Shifts of the base
/// variables and the planar rotation are recorded but act trivially on
/// the coefficient pair since the equations are autonomous and isotropic.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivTransform {
    pub alpha: Rat,
    pub beta: Rat,
    pub gamma: Rat,
    /// Shifts of `t`, `x1`, `x2`, `u`.
    pub shifts: [Rat; 4],
    /// Rotation angle in the plane (two dimensions only).
    pub rotation: f64,
}

impl EquivTransform {
    pub fn scaling(alpha: Rat, beta: Rat, gamma: Rat) -> Result<EquivTransform> {
        if alpha.is_zero() || beta.is_zero() || gamma.is_zero() {
            return Err(Error::InvalidParameter(
                "equivalence scales must all be nonzero".to_string(),
            ));
        }
        Ok(EquivTransform {
            alpha,
            beta,
            gamma,
            shifts: [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()],
            rotation: 0.0,
        })
    }

    pub fn identity() -> EquivTransform {
        EquivTransform::scaling(rat(1), rat(1), rat(1)).unwrap()
    }

    /// `t -> -t`, acting on the coefficients as `D -> -D`, `Q -> -Q`.
    pub fn t_reflection() -> EquivTransform {
        EquivTransform::scaling(rat(-1), rat(1), rat(1)).unwrap()
    }

    /// Composition `self after other`: scales multiply, shifts and
    /// rotations add (after rescaling by the outer transform).
    pub fn compose(&self, other: &EquivTransform) -> EquivTransform {
        let mut shifts = self.shifts.clone();
        shifts[0] = &self.alpha * &other.shifts[0] + &self.shifts[0];
        shifts[1] = &self.beta * &other.shifts[1] + &self.shifts[1];
        shifts[2] = &self.beta * &other.shifts[2] + &self.shifts[2];
        shifts[3] = &self.gamma * &other.shifts[3] + &self.shifts[3];
        EquivTransform {
            alpha: &self.alpha * &other.alpha,
            beta: &self.beta * &other.beta,
            gamma: &self.gamma * &other.gamma,
            shifts,
            rotation: self.rotation + other.rotation,
        }
    }

    fn d_factor(&self) -> Rat {
        &(&self.beta * &self.beta) / &self.alpha
    }

    fn q_factor(&self) -> Rat {
        &self.gamma / &self.alpha
    }
}

/// Transform an equation by an equivalence transformation:
/// `D -> (beta^2/alpha) D`, `Q -> (gamma/alpha) Q`.
pub fn apply_equivalence(pde: &PdeSpec, g: &EquivTransform) -> Result<PdeSpec> {
    if g.alpha.is_zero() || g.beta.is_zero() || g.gamma.is_zero() {
        return Err(Error::InvalidParameter(
            "equivalence scales must all be nonzero".to_string(),
        ));
    }
    Ok(PdeSpec {
        space: pde.space,
        form: pde.form,
        diffusivity: Expr::mul2(Expr::Num(g.d_factor()), pde.diffusivity.clone()).normalize(),
        source: Expr::mul2(Expr::Num(g.q_factor()), pde.source.clone()).normalize(),
    })
}

/// Form-preserving changes of variables that fall outside the equivalence
/// group but keep the equation inside the class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormMap {
    /// `u -> u - q t`, removing a constant source (any dimension).
    RemoveConstantSource,
    /// For power-law diffusivity of degree `k`: rescale time to
    /// `tau = e^(c eps2 k t)/(c eps2 k)` (`c` = 1 or 2 by dimension) and
    /// set `w = e^(-eps2 t) u`. The target source is recomputed and must
    /// come out autonomous.
    ExponentialRescale,
}

/// A form-preserving map applied to a concrete source equation.
#[derive(Clone, Debug)]
pub struct FormPreserving {
    pub target: PdeSpec,
    /// New time as a function of the old `t`.
    pub new_time: Expr,
    /// New dependent variable as a function of `(t, u)`.
    pub new_u: Expr,
    /// Target jet coordinates in terms of source coordinates (and `t`).
    pub jet_bindings: BTreeMap<Symbol, Expr>,
    /// Factor `c(t)` with `target residual . bindings = c * source residual`.
    pub conformal: Expr,
}

/// Degree of a pure power-law diffusivity in its slot symbol (with an
/// optional numeric coefficient); anything else is rejected.
fn power_law_degree(diffusivity: &Expr, slot: &Symbol) -> Result<Expr> {
    let d = diffusivity.normalize();
    let core = match &d {
        Expr::Mul(fs) if fs.len() == 2 && matches!(fs[0], Expr::Num(_)) => &fs[1],
        other => other,
    };
    match core {
        Expr::Sym(s) if s == slot => Ok(Expr::one()),
        Expr::Pow(b, e) => match b.as_ref() {
            Expr::Sym(s) if s == slot && !e.contains(slot) => Ok((**e).clone()),
            _ => Err(Error::InvalidParameter(
                "diffusivity is not a power law in its slot".to_string(),
            )),
        },
        _ => Err(Error::InvalidParameter(
            "diffusivity is not a power law in its slot".to_string(),
        )),
    }
}

/// Apply a form-preserving map. `eps2` is the sign/rate parameter of the
/// exponential rescale (unused by the constant-source map).
pub fn apply_form_preserving(
    pde: &PdeSpec,
    map: FormMap,
    eps2: &Expr,
) -> Result<FormPreserving> {
    match map {
        FormMap::RemoveConstantSource => {
            if pde.source.contains(&Symbol::u()) {
                return Err(Error::InvalidParameter(
                    "source must be constant in u".to_string(),
                ));
            }
            let q = pde.source.clone();
            let target = PdeSpec {
                source: Expr::zero(),
                ..pde.clone()
            };
            let mut jet_bindings = BTreeMap::new();
            jet_bindings.insert(
                Symbol::u(),
                Expr::sub(Expr::u(), Expr::mul2(q.clone(), Expr::t())),
            );
            jet_bindings.insert(
                Symbol::jet(1, 0, 0),
                Expr::sub(Expr::jet(1, 0, 0), q.clone()),
            );
            Ok(FormPreserving {
                target,
                new_time: Expr::t(),
                new_u: Expr::sub(Expr::u(), Expr::mul2(q, Expr::t())),
                jet_bindings,
                conformal: Expr::one(),
            })
        }
        FormMap::ExponentialRescale => {
            let dim = pde.space.dim;
            let slot = if dim == 1 {
                Symbol::jet(0, 1, 0)
            } else {
                omega_slot()
            };
            let k = power_law_degree(&pde.diffusivity, &slot)?;
            if k.is_zero_literal() {
                return Err(Error::InvalidParameter(
                    "exponential rescale needs a nonzero power-law degree".to_string(),
                ));
            }
            // Gradient scale: u_x picks up e^(eps2 t); W picks up its
            // square. The time-rescale degree is k (1-D) or 2k (2-D), and
            // the source factor is e^(-eps2 (k+1) t) resp. e^(-eps2(2k+1)t).
            let c = if dim == 1 { 1 } else { 2 };
            let rate = Expr::mul(vec![Expr::num(c), eps2.clone(), k.clone()]).normalize();
            // tau = e^(rate t)/rate.
            let new_time = Expr::div(
                Expr::exp(Expr::mul2(rate.clone(), Expr::t())),
                rate.clone(),
            )
            .normalize();
            let scale = Expr::exp(Expr::mul2(eps2.clone(), Expr::t()));
            let inv_scale = Expr::exp(Expr::mul2(eps2.clone(), Expr::t()).neg());
            // Target source in the new dependent variable (written as u):
            // e^(-eps2 t) e^(-rate t) (Q(e^(eps2 t) u) - eps2 e^(eps2 t) u).
            let mut bind = BTreeMap::new();
            bind.insert(Symbol::u(), Expr::mul2(scale.clone(), Expr::u()));
            let q_scaled = pde.source.substitute(&bind);
            let new_source = Expr::mul(vec![
                inv_scale.clone(),
                Expr::exp(Expr::mul2(rate.clone(), Expr::t()).neg()),
                Expr::sub(
                    q_scaled,
                    Expr::mul(vec![eps2.clone(), scale.clone(), Expr::u()]),
                ),
            ])
            .normalize();
            if new_source.contains(&Symbol::Time) {
                return Err(Error::InvalidParameter(
                    "source does not transform autonomously under the rescale".to_string(),
                ));
            }
            let target = PdeSpec {
                source: new_source,
                ..pde.clone()
            };
            // Jet bindings: every pure space derivative and u itself scale
            // by e^(-eps2 t); the time derivative picks up the chain-rule
            // factor dt/dtau = e^(-rate t) and the product-rule shift.
            let mut jet_bindings = BTreeMap::new();
            let mut scaled = vec![Symbol::u()];
            for j in pde.space.jet_indices() {
                if j.dt == 0 {
                    scaled.push(Symbol::Jet(j));
                }
            }
            for s in scaled {
                jet_bindings.insert(
                    s.clone(),
                    Expr::mul2(inv_scale.clone(), Expr::Sym(s)).normalize(),
                );
            }
            let conformal = Expr::mul2(
                inv_scale.clone(),
                Expr::exp(Expr::mul2(rate.clone(), Expr::t()).neg()),
            )
            .normalize();
            jet_bindings.insert(
                Symbol::jet(1, 0, 0),
                Expr::mul2(
                    conformal.clone(),
                    Expr::sub(
                        Expr::jet(1, 0, 0),
                        Expr::mul2(eps2.clone(), Expr::u()),
                    ),
                )
                .normalize(),
            );
            Ok(FormPreserving {
                target,
                new_time,
                new_u: Expr::mul2(inv_scale, Expr::u()).normalize(),
                jet_bindings,
                conformal,
            })
        }
    }
}

/// Verify a form-preserving map by symbolic pullback: substitute the jet
/// bindings into the target residual and compare with the conformal factor
/// times the source residual.
pub fn verify_form_preserving(
    source: &PdeSpec,
    fp: &FormPreserving,
    cfg: &SamplerConfig,
) -> Result<ZeroReport> {
    let pulled = fp.target.residual().substitute(&fp.jet_bindings);
    let expected = Expr::mul2(fp.conformal.clone(), source.residual()).normalize();
    is_zero(&Expr::sub(pulled, expected), cfg)
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

    fn zero(e: &Expr) -> bool {
        is_zero(e, &SamplerConfig::seeded(11)).unwrap().is_zero
    }

    #[test]
    fn rhs_assembly() {
        let pde = PdeSpec::gradient_1d(parse("u_x^k").unwrap(), Expr::zero());
        assert_eq!(pde.residual(), parse("u_t - u_x^k*u_xx").unwrap());

        let pde = PdeSpec::opaque_1d();
        assert_eq!(
            pde.residual(),
            parse("u_t - D(u_x)*u_xx - Q(u)").unwrap()
        );

        // n=2, D = W: expanded divergence form.
        let pde = PdeSpec::divergence_2d(parse("W").unwrap(), Expr::zero());
        let want = parse(
            "u_t - (u_x1^2 + u_x2^2)*(u_x1x1 + u_x2x2) \
             - 2*(u_x1^2*u_x1x1 + 2*u_x1*u_x2*u_x1x2 + u_x2^2*u_x2x2)",
        )
        .unwrap();
        assert!(zero(&Expr::sub(pde.residual(), want)));
    }

    #[test]
    fn divergence_1d_expands_product_rule() {
        let pde = PdeSpec::divergence_1d(parse("u_x^2").unwrap(), Expr::zero());
        // (u_x^2 u_x)_x = 3 u_x^2 u_xx.
        assert_eq!(pde.rhs(), parse("3*u_x^2*u_xx").unwrap());
    }

    #[test]
    fn autonomy_makes_translations_symmetries() {
        for pde in [PdeSpec::opaque_1d(), PdeSpec::opaque_2d()] {
            let dim = pde.space.dim as usize;
            let mut fields = vec![VectorField::new(
                pde.space,
                Expr::one(),
                vec![Expr::zero(); dim],
                Expr::zero(),
            )
            .unwrap()];
            for i in 0..dim {
                let mut xi = vec![Expr::zero(); dim];
                xi[i] = Expr::one();
                fields.push(VectorField::new(pde.space, Expr::zero(), xi, Expr::zero()).unwrap());
            }
            for f in fields {
                let e = invariance_expression(&pde, &f).unwrap();
                assert!(e.is_zero_literal(), "translation residual: {e}");
            }
        }
    }

    #[test]
    fn rotation_is_principal_in_2d() {
        let pde = PdeSpec::opaque_2d();
        let rot = VectorField::new(
            pde.space,
            Expr::zero(),
            vec![parse("-x2").unwrap(), parse("x1").unwrap()],
            Expr::zero(),
        )
        .unwrap();
        let e = invariance_expression(&pde, &rot).unwrap();
        assert!(zero(&e), "rotation residual: {e}");
    }

    #[test]
    fn exponential_shift_symmetry_of_linear_source() {
        // Opaque D, Q = u admits X = e^t d/du.
        let pde = PdeSpec::gradient_1d(
            Expr::call("D", vec![Expr::jet(0, 1, 0)]),
            Expr::u(),
        );
        let f = field_1d("0", "0", "exp(t)");
        let e = invariance_expression(&pde, &f).unwrap();
        assert!(e.is_zero_literal(), "residual: {e}");
    }

    #[test]
    fn non_symmetry_yields_nonzero_expression() {
        let pde = PdeSpec::gradient_1d(parse("u_x").unwrap(), Expr::zero());
        let f = field_1d("0", "0", "u");
        let e = invariance_expression(&pde, &f).unwrap();
        assert!(!zero(&e));
    }

    #[test]
    fn invariance_rejects_space_dependent_time_component() {
        let pde = PdeSpec::opaque_1d();
        let f = field_1d("x", "0", "0");
        assert!(invariance_expression(&pde, &f).is_err());
    }

    #[test]
    fn invariance_is_linear_in_the_field() {
        let pde = PdeSpec::gradient_1d(parse("u_x^3").unwrap(), parse("u^2").unwrap());
        let f = field_1d("t", "x^2", "u*x");
        let g = field_1d("t^2", "x*u", "u^2");
        let (a, b) = (parse("2").unwrap(), parse("-3").unwrap());
        let combo = VectorField::new_1d(
            Expr::add2(
                Expr::mul2(a.clone(), f.xi_t.clone()),
                Expr::mul2(b.clone(), g.xi_t.clone()),
            ),
            Expr::add2(
                Expr::mul2(a.clone(), f.xi_x[0].clone()),
                Expr::mul2(b.clone(), g.xi_x[0].clone()),
            ),
            Expr::add2(
                Expr::mul2(a.clone(), f.eta.clone()),
                Expr::mul2(b.clone(), g.eta.clone()),
            ),
        )
        .unwrap();
        let lhs = invariance_expression(&pde, &combo).unwrap();
        let rhs = Expr::add2(
            Expr::mul2(a, invariance_expression(&pde, &f).unwrap()),
            Expr::mul2(b, invariance_expression(&pde, &g).unwrap()),
        );
        assert!(zero(&Expr::sub(lhs, rhs)));
    }

    #[test]
    fn determining_system_matches_conventional_split() {
        let pde = PdeSpec::opaque_1d();
        let field = generic_point_field_1d();
        let sys = determining_system(&pde, &field).unwrap();
        // Coefficient of u_xx:
        // (eta_x + (eta_u - xi1_x) u_x - xi1_u u_x^2) D'
        //   + (xi0' - 2 xi1_x - 2 xi1_u u_x) D.
        let want_a = parse(
            "(eta@[0,1,0](t,x,u) + (eta@[0,0,1](t,x,u) - xi1@[0,1,0](t,x,u))*u_x \
              - xi1@[0,0,1](t,x,u)*u_x^2)*D'(u_x) \
             + (xi0'(t) - 2*xi1@[0,1,0](t,x,u) - 2*xi1@[0,0,1](t,x,u)*u_x)*D(u_x)",
        )
        .unwrap();
        assert!(
            zero(&Expr::sub(sys.coeff_uxx.clone(), want_a)),
            "coefficient mismatch: {}",
            sys.coeff_uxx
        );
        // Time translation satisfies both determining equations.
        let f = field_1d("1", "0", "0");
        let sys = determining_system(&pde, &f).unwrap();
        assert!(sys.coeff_uxx.is_zero_literal());
        assert!(sys.remainder.is_zero_literal());
    }

    #[test]
    fn coefficient_ode_branches() {
        use crate::expr::ratio;
        // (0, 1, 0, -k): here with k = 3 -> C u_x^3.
        let e = [rat(0), rat(1), rat(0), rat(-3)];
        match solve_coefficient_ode(&e) {
            DFormula::Closed(d) => {
                assert_eq!(d, parse("C*u_x^3").unwrap());
                assert!(zero(&DFormula::ode_residual(&e, &d)));
            }
            other => panic!("wrong branch: {other:?}"),
        }
        // (2, 0, 0, 4) -> C exp(-2 u_x).
        let e = [rat(2), rat(0), rat(0), rat(4)];
        match solve_coefficient_ode(&e) {
            DFormula::Closed(d) => {
                assert_eq!(d, parse("C*exp(-2*u_x)").unwrap());
                assert!(zero(&DFormula::ode_residual(&e, &d)));
            }
            other => panic!("wrong branch: {other:?}"),
        }
        // (0, 0, e2, e3) -> C u_x^-2 exp(-(e3/e2)/u_x).
        let e = [rat(0), rat(0), rat(2), rat(3)];
        match solve_coefficient_ode(&e) {
            DFormula::Closed(d) => {
                assert_eq!(d, parse("C*u_x^-2*exp(-(3/2)*u_x^-1)").unwrap());
                assert!(zero(&DFormula::ode_residual(&e, &d)));
            }
            other => panic!("wrong branch: {other:?}"),
        }
        // Fractional shift branch: (1, 2, 0, 1) -> C (u_x + 1/2)^(-1/2).
        let e = [rat(1), rat(2), rat(0), rat(1)];
        match solve_coefficient_ode(&e) {
            DFormula::Closed(d) => {
                let want = Expr::mul2(
                    Expr::param("C"),
                    Expr::powr(parse("u_x + 1/2").unwrap(), ratio(-1, 2)),
                )
                .normalize();
                assert_eq!(d, want);
                assert!(zero(&DFormula::ode_residual(&e, &d)));
            }
            other => panic!("wrong branch: {other:?}"),
        }
        // Sentinels.
        assert_eq!(
            solve_coefficient_ode(&[rat(0), rat(0), rat(0), rat(0)]),
            DFormula::Arbitrary
        );
        assert_eq!(
            solve_coefficient_ode(&[rat(0), rat(0), rat(0), rat(5)]),
            DFormula::Degenerate
        );
        // General quadrature branch keeps (log D)'.
        let e = [rat(1), rat(0), rat(1), rat(0)];
        match solve_coefficient_ode(&e) {
            DFormula::Quadrature { log_derivative } => {
                let want = parse("2*u_x/(1 - u_x^2)").unwrap();
                assert!(zero(&Expr::sub(log_derivative, want)));
            }
            other => panic!("wrong branch: {other:?}"),
        }
    }

    #[test]
    fn equivalence_acts_on_coefficients() {
        let pde = PdeSpec::gradient_1d(parse("u_x").unwrap(), parse("2*u^2").unwrap());
        let g = EquivTransform::scaling(rat(4), rat(2), rat(2)).unwrap();
        let out = apply_equivalence(&pde, &g).unwrap();
        assert_eq!(out.diffusivity, parse("u_x").unwrap());
        assert_eq!(out.source, parse("u^2").unwrap());

        assert_eq!(
            apply_equivalence(&pde, &EquivTransform::identity()).unwrap(),
            pde
        );
        let refl = apply_equivalence(&pde, &EquivTransform::t_reflection()).unwrap();
        assert_eq!(refl.diffusivity, parse("-u_x").unwrap());
        assert_eq!(refl.source, parse("-2*u^2").unwrap());
        assert!(EquivTransform::scaling(rat(0), rat(1), rat(1)).is_err());
    }

    #[test]
    fn equivalence_is_a_group_action() {
        let pde = PdeSpec::gradient_1d(parse("u_x^3").unwrap(), parse("u^2 + u").unwrap());
        let g1 = EquivTransform::scaling(rat(2), rat(3), rat(5)).unwrap();
        let g2 = EquivTransform::scaling(rat(-1), rat(2), rat(7)).unwrap();
        let seq = apply_equivalence(&apply_equivalence(&pde, &g1).unwrap(), &g2).unwrap();
        let joint = apply_equivalence(&pde, &g2.compose(&g1)).unwrap();
        assert_eq!(seq, joint);
    }

    #[test]
    fn constant_source_removal() {
        let pde = PdeSpec::gradient_1d(
            Expr::call("D", vec![Expr::jet(0, 1, 0)]),
            parse("3").unwrap(),
        );
        let fp = apply_form_preserving(&pde, FormMap::RemoveConstantSource, &Expr::zero())
            .unwrap();
        assert!(fp.target.source.is_zero_literal());
        let r = verify_form_preserving(&pde, &fp, &SamplerConfig::seeded(13)).unwrap();
        assert!(r.is_zero, "{r:?}");

        let with_u = PdeSpec::gradient_1d(parse("u_x").unwrap(), parse("u").unwrap());
        assert!(
            apply_form_preserving(&with_u, FormMap::RemoveConstantSource, &Expr::zero()).is_err()
        );
    }

    #[test]
    fn exponential_rescale_1d() {
        // D = u_x^k, Q = eps1 u^(k+1) + eps2 u maps to D = u_x^k,
        // Q = eps1 u^(k+1).
        let pde = PdeSpec::gradient_1d(
            parse("u_x^k").unwrap(),
            parse("eps1*u^(k+1) + eps2*u").unwrap(),
        );
        let eps2 = Expr::param("eps2");
        let fp = apply_form_preserving(&pde, FormMap::ExponentialRescale, &eps2).unwrap();
        assert_eq!(fp.target.source, parse("eps1*u^(k+1)").unwrap());
        let r = verify_form_preserving(&pde, &fp, &SamplerConfig::seeded(17)).unwrap();
        assert!(r.is_zero, "{r:?}");

        // Pure linear source maps to the source-free equation.
        let pde = PdeSpec::gradient_1d(parse("u_x^k").unwrap(), parse("eps2*u").unwrap());
        let fp = apply_form_preserving(&pde, FormMap::ExponentialRescale, &eps2).unwrap();
        assert!(fp.target.source.is_zero_literal());

        // Incompatible source is rejected.
        let pde = PdeSpec::gradient_1d(parse("u_x^k").unwrap(), parse("u^3").unwrap());
        assert!(apply_form_preserving(&pde, FormMap::ExponentialRescale, &eps2).is_err());
        // Non-power-law diffusivity is rejected.
        let pde = PdeSpec::gradient_1d(parse("exp(u_x)").unwrap(), parse("eps2*u").unwrap());
        assert!(apply_form_preserving(&pde, FormMap::ExponentialRescale, &eps2).is_err());
    }

    #[test]
    fn exponential_rescale_2d() {
        // D = W^k, Q = eps1 u^(2k+1) + eps2 u maps to Q = eps1 u^(2k+1).
        let pde = PdeSpec::divergence_2d(
            parse("W^k").unwrap(),
            parse("eps1*u^(2*k+1) + eps2*u").unwrap(),
        );
        let eps2 = Expr::param("eps2");
        let fp = apply_form_preserving(&pde, FormMap::ExponentialRescale, &eps2).unwrap();
        assert_eq!(fp.target.source, parse("eps1*u^(2*k+1)").unwrap());
        let r = verify_form_preserving(&pde, &fp, &SamplerConfig::seeded(19)).unwrap();
        assert!(r.is_zero, "{r:?}");
    }
}
