//! Machine-readable catalog of the classified symmetry cases and the
//! verification driver.
//!
//! Tables:
//!
//! - `T1`: the one-dimensional class `u_t = D(u_x) u_xx + Q(u)` with
//!   `D != u_x^-2` (ten rows).
//! - `T2`: the two-dimensional class `u_t = div(D(W) grad u) + Q(u)` with
//!   `D != W^-1` (nine rows).
//! - `T3`: the special two-dimensional diffusivity `D = W^-1` (four rows).
//! - `principal-1d`, `principal-2d`: the symmetries admitted for arbitrary
//!   `(D, Q)`.
//! - `principal-noQ`: the source-free two-dimensional class with arbitrary
//!   diffusivity (six generators).
//! - `power-law-noQ`: the source-free two-dimensional class with `D = W^k`,
//!   whose algebra gains a seventh, scaling generator.
//!
//! Each case carries pinned parameter sample sets so verification runs are
//! reproducible; the driver checks every generator at every sample, runs a
//! perturbed-generator negative control, and can check that the generator
//! set closes under commutators.

use crate::expr::{
    is_zero, rat, ratio, Expr, FloatEnv, JetSpace, Rat, SamplerConfig, Symbol,
};
use crate::jet::VectorField;
use crate::pde::{check_invariance, PdeSpec};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Identifier of a classified case: a table name and a 1-based row.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CaseId {
    pub table: String,
    pub row: u8,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.table, self.row)
    }
}

/// One classified case: an equation template with symbolic parameters, its
/// admitted generators, and the pinned parameter samples.
#[derive(Clone, Debug)]
pub struct SymmetryCase {
    pub id: CaseId,
    /// Equation with parameters (`k`, `m`, `lambda`, `gamma`, `eps1`,
    /// `eps2`) left symbolic.
    pub pde: PdeSpec,
    /// Generators admitted by every equation of the class.
    pub principal: Vec<VectorField>,
    /// Extra generators specific to this case.
    pub extensions: Vec<VectorField>,
    /// Valid parameter assignments (already filtered by the case
    /// constraints); empty map for parameter-free cases.
    pub assignments: Vec<BTreeMap<Symbol, Rat>>,
    /// Dimension of the full algebra.
    pub expected_dim: usize,
    /// Perturbation added to a generator's `u`-component for the negative
    /// control (`1`, or `x` where `d/du` itself is a symmetry).
    pub control_shift: Expr,
}

impl SymmetryCase {
    /// Principal generators followed by the case extensions.
    pub fn generators(&self) -> Vec<VectorField> {
        let mut v = self.principal.clone();
        v.extend(self.extensions.iter().cloned());
        v
    }
}

fn p(src: &str) -> Expr {
    crate::expr::parse(src).expect("catalog template parses")
}

fn f1(xi_t: &str, xi_x: &str, eta: &str) -> VectorField {
    VectorField::new_1d(p(xi_t), p(xi_x), p(eta)).expect("catalog generator is a point field")
}

fn f2(xi_t: &str, xi_x1: &str, xi_x2: &str, eta: &str) -> VectorField {
    VectorField::new(JetSpace::new(2), p(xi_t), vec![p(xi_x1), p(xi_x2)], p(eta))
        .expect("catalog generator is a point field")
}

fn principal_1d() -> Vec<VectorField> {
    vec![f1("1", "0", "0"), f1("0", "1", "0")]
}

fn principal_2d() -> Vec<VectorField> {
    vec![
        f2("1", "0", "0", "0"),
        f2("0", "1", "0", "0"),
        f2("0", "0", "1", "0"),
        f2("0", "x2", "-x1", "0"),
    ]
}

const SIGNS: [i64; 2] = [1, -1];

/// Pinned sample sets.
fn k_samples(excl: &[Rat]) -> Vec<Rat> {
    [rat(-3), ratio(-1, 3), ratio(1, 2), rat(2), rat(3)]
        .into_iter()
        .filter(|k| !excl.contains(k))
        .collect()
}

fn m_samples() -> Vec<Rat> {
    vec![rat(-2), rat(3), ratio(1, 2)]
}

fn lambda_samples() -> Vec<Rat> {
    vec![rat(-2), rat(1), rat(3)]
}

fn gamma_samples() -> Vec<Rat> {
    vec![rat(-1), ratio(1, 2), rat(2)]
}

/// Cross product of per-parameter sample sets, filtered by a constraint.
fn assignments(
    axes: &[(&str, Vec<Rat>)],
    constraint: impl Fn(&BTreeMap<Symbol, Rat>) -> bool,
) -> Vec<BTreeMap<Symbol, Rat>> {
    let mut out = vec![BTreeMap::new()];
    for (name, vals) in axes {
        let mut next = Vec::with_capacity(out.len() * vals.len());
        for base in &out {
            for v in vals {
                let mut m = base.clone();
                m.insert(Symbol::param(name), v.clone());
                next.push(m);
            }
        }
        out = next;
    }
    out.into_iter().filter(|m| constraint(m)).collect()
}

fn eps_axes() -> Vec<(&'static str, Vec<Rat>)> {
    vec![("eps1", SIGNS.map(rat).to_vec())]
}

fn sign_product_is(m: &BTreeMap<Symbol, Rat>, want: i64) -> bool {
    let a = &m[&Symbol::param("eps1")];
    let b = &m[&Symbol::param("eps2")];
    a * b == rat(want)
}

/// The one-dimensional classification table (`D != u_x^-2`).
fn table1() -> Vec<SymmetryCase> {
    let any = |n| CaseId {
        table: "T1".to_string(),
        row: n,
    };
    let opaque_d = Expr::call("D", vec![Expr::jet(0, 1, 0)]);
    let no_constraint = |_: &BTreeMap<Symbol, Rat>| true;
    let mut rows = Vec::new();

    // 1. arbitrary D, Q = u^-1, X3 = 2t d/dt + x d/dx + u d/du.
    rows.push(SymmetryCase {
        id: any(1),
        pde: PdeSpec::gradient_1d(opaque_d.clone(), p("u^-1")),
        principal: principal_1d(),
        extensions: vec![f1("2*t", "x", "u")],
        assignments: assignments(&[], no_constraint),
        expected_dim: 3,
        control_shift: Expr::one(),
    });
    // 2. arbitrary D, Q = u, X3 = e^t d/du.
    rows.push(SymmetryCase {
        id: any(2),
        pde: PdeSpec::gradient_1d(opaque_d.clone(), p("u")),
        principal: principal_1d(),
        extensions: vec![f1("0", "0", "exp(t)")],
        assignments: assignments(&[], no_constraint),
        expected_dim: 3,
        control_shift: Expr::one(),
    });
    // 3. D = u_x^k, Q = eps1 e^-u.
    rows.push(SymmetryCase {
        id: any(3),
        pde: PdeSpec::gradient_1d(p("u_x^k"), p("eps1*exp(-u)")),
        principal: principal_1d(),
        extensions: vec![f1("(k+2)*t", "x", "k+2")],
        assignments: assignments(
            &[("k", k_samples(&[])), ("eps1", SIGNS.map(rat).to_vec())],
            no_constraint,
        ),
        expected_dim: 3,
        control_shift: Expr::one(),
    });
    // 4. D = u_x^k, Q = eps1 u^m, m != 1, 2.
    rows.push(SymmetryCase {
        id: any(4),
        pde: PdeSpec::gradient_1d(p("u_x^k"), p("eps1*u^m")),
        principal: principal_1d(),
        extensions: vec![f1("(1-m)*t", "(k+1-m)/(k+2)*x", "u")],
        assignments: assignments(
            &[
                ("k", k_samples(&[])),
                ("m", m_samples()),
                ("eps1", SIGNS.map(rat).to_vec()),
            ],
            no_constraint,
        ),
        expected_dim: 3,
        control_shift: Expr::one(),
    });
    // 5. D = u_x^k, Q = eps1 u^(k+1) + eps2 u, k != +-1.
    rows.push(SymmetryCase {
        id: any(5),
        pde: PdeSpec::gradient_1d(p("u_x^k"), p("eps1*u^(k+1) + eps2*u")),
        principal: principal_1d(),
        extensions: vec![f1("exp(-k*eps2*t)", "0", "eps2*exp(-k*eps2*t)*u")],
        assignments: assignments(
            &[
                ("k", k_samples(&[rat(1), rat(-1)])),
                ("eps1", SIGNS.map(rat).to_vec()),
                ("eps2", SIGNS.map(rat).to_vec()),
            ],
            no_constraint,
        ),
        expected_dim: 3,
        control_shift: Expr::one(),
    });
    // 6. D = 1/(u_x + gamma), Q = eps1 u (the reading consistent with the
    // generators; see `table1_row6_readings`), gamma != 0.
    rows.push(SymmetryCase {
        id: any(6),
        pde: PdeSpec::gradient_1d(p("(u_x+gamma)^-1"), p("eps1*u")),
        principal: principal_1d(),
        extensions: vec![
            f1("0", "0", "exp(eps1*t)"),
            f1("exp(eps1*t)", "0", "eps1*exp(eps1*t)*(u + gamma*x)"),
        ],
        assignments: assignments(
            &[
                ("gamma", gamma_samples()),
                ("eps1", SIGNS.map(rat).to_vec()),
            ],
            no_constraint,
        ),
        expected_dim: 4,
        control_shift: Expr::one(),
    });
    // 7. D = u_x, Q = eps1 u^2.
    rows.push(SymmetryCase {
        id: any(7),
        pde: PdeSpec::gradient_1d(p("u_x"), p("eps1*u^2")),
        principal: principal_1d(),
        extensions: vec![
            f1("t", "0", "-u"),
            f1("t^2", "0", "-(2*t*u + eps1)"),
        ],
        assignments: assignments(&eps_axes(), no_constraint),
        expected_dim: 4,
        control_shift: Expr::one(),
    });
    // 8. D = u_x, Q = eps1 u^2 + eps2, eps1 eps2 = -1.
    rows.push(SymmetryCase {
        id: any(8),
        pde: PdeSpec::gradient_1d(p("u_x"), p("eps1*u^2 + eps2")),
        principal: principal_1d(),
        extensions: vec![
            f1("exp(-2*t)", "0", "2*exp(-2*t)*(u - eps1)"),
            f1("exp(2*t)", "0", "-2*exp(2*t)*(u + eps1)"),
        ],
        assignments: assignments(
            &[
                ("eps1", SIGNS.map(rat).to_vec()),
                ("eps2", SIGNS.map(rat).to_vec()),
            ],
            |m| sign_product_is(m, -1),
        ),
        expected_dim: 4,
        control_shift: Expr::one(),
    });
    // 9. D = u_x, Q = eps1 u^2 + eps2, eps1 eps2 = 1.
    rows.push(SymmetryCase {
        id: any(9),
        pde: PdeSpec::gradient_1d(p("u_x"), p("eps1*u^2 + eps2")),
        principal: principal_1d(),
        extensions: vec![
            f1(
                "cos(2*t)",
                "0",
                "2*(sin(2*t)*u + eps1*cos(2*t))",
            ),
            f1(
                "sin(2*t)",
                "0",
                "-2*(cos(2*t)*u - eps1*sin(2*t))",
            ),
        ],
        assignments: assignments(
            &[
                ("eps1", SIGNS.map(rat).to_vec()),
                ("eps2", SIGNS.map(rat).to_vec()),
            ],
            |m| sign_product_is(m, 1),
        ),
        expected_dim: 4,
        control_shift: Expr::one(),
    });
    // 10. D = u_x^k, Q = eps2 u.
    rows.push(SymmetryCase {
        id: any(10),
        pde: PdeSpec::gradient_1d(p("u_x^k"), p("eps2*u")),
        principal: principal_1d(),
        extensions: vec![
            f1("0", "x", "(1 + 2/k)*u"),
            f1("exp(-k*eps2*t)", "0", "eps2*exp(-k*eps2*t)*u"),
            f1("0", "0", "exp(eps2*t)"),
        ],
        assignments: assignments(
            &[("k", k_samples(&[])), ("eps2", SIGNS.map(rat).to_vec())],
            no_constraint,
        ),
        expected_dim: 5,
        control_shift: Expr::one(),
    });
    rows
}

/// The two-dimensional classification table (`D != W^-1`).
fn table2() -> Vec<SymmetryCase> {
    let any = |n| CaseId {
        table: "T2".to_string(),
        row: n,
    };
    let opaque_d = Expr::call("D", vec![Expr::param("W")]);
    let no_constraint = |_: &BTreeMap<Symbol, Rat>| true;
    let scaling = |coeff: &str, ucoeff: &str| {
        f2(
            "0",
            &format!("({coeff})*x1"),
            &format!("({coeff})*x2"),
            ucoeff,
        )
    };
    let mut rows = Vec::new();

    // 1. arbitrary D, Q = u^-1.
    rows.push(SymmetryCase {
        id: any(1),
        pde: PdeSpec::divergence_2d(opaque_d.clone(), p("u^-1")),
        principal: principal_2d(),
        extensions: vec![f2("2*t", "x1", "x2", "u")],
        assignments: assignments(&[], no_constraint),
        expected_dim: 5,
        control_shift: Expr::one(),
    });
    // 2. arbitrary D, Q = u.
    rows.push(SymmetryCase {
        id: any(2),
        pde: PdeSpec::divergence_2d(opaque_d.clone(), p("u")),
        principal: principal_2d(),
        extensions: vec![f2("0", "0", "0", "exp(t)")],
        assignments: assignments(&[], no_constraint),
        expected_dim: 5,
        control_shift: Expr::one(),
    });
    // 3. D = W^k, Q = eps1 e^-u (k != -1 since D != W^-1).
    rows.push(SymmetryCase {
        id: any(3),
        pde: PdeSpec::divergence_2d(p("W^k"), p("eps1*exp(-u)")),
        principal: principal_2d(),
        extensions: vec![f2("2*(k+1)*t", "x1", "x2", "2*(k+1)")],
        assignments: assignments(
            &[("k", k_samples(&[])), ("eps1", SIGNS.map(rat).to_vec())],
            no_constraint,
        ),
        expected_dim: 5,
        control_shift: Expr::one(),
    });
    // 4. D = W^k, Q = eps1 u^m, m != 0, 1, 2. The shared denominator
    // m - 2k - 1 + k(m+1) factors as (k+1)(m-1).
    rows.push(SymmetryCase {
        id: any(4),
        pde: PdeSpec::divergence_2d(p("W^k"), p("eps1*u^m")),
        principal: principal_2d(),
        extensions: vec![f2(
            "2*t",
            "(m-2*k-1)/((k+1)*(m-1))*x1",
            "(m-2*k-1)/((k+1)*(m-1))*x2",
            "-2*(k+1)/((k+1)*(m-1))*u",
        )],
        assignments: assignments(
            &[
                ("k", k_samples(&[])),
                ("m", m_samples()),
                ("eps1", SIGNS.map(rat).to_vec()),
            ],
            no_constraint,
        ),
        expected_dim: 5,
        control_shift: Expr::one(),
    });
    // 5. D = W^k, Q = eps1 u^(2k+1) + eps2 u, k != +-1/2.
    rows.push(SymmetryCase {
        id: any(5),
        pde: PdeSpec::divergence_2d(p("W^k"), p("eps1*u^(2*k+1) + eps2*u")),
        principal: principal_2d(),
        extensions: vec![f2(
            "exp(-2*k*eps2*t)",
            "0",
            "0",
            "eps2*exp(-2*k*eps2*t)*u",
        )],
        assignments: assignments(
            &[
                ("k", k_samples(&[ratio(1, 2), ratio(-1, 2)])),
                ("eps1", SIGNS.map(rat).to_vec()),
                ("eps2", SIGNS.map(rat).to_vec()),
            ],
            no_constraint,
        ),
        expected_dim: 5,
        control_shift: Expr::one(),
    });
    // 6. D = W^(1/2), Q = eps1 u^2.
    rows.push(SymmetryCase {
        id: any(6),
        pde: PdeSpec::divergence_2d(Expr::powr(p("W"), ratio(1, 2)), p("eps1*u^2")),
        principal: principal_2d(),
        extensions: vec![
            f2("t", "0", "0", "-u"),
            f2("t^2", "0", "0", "-(2*t*u + eps1)"),
        ],
        assignments: assignments(&eps_axes(), no_constraint),
        expected_dim: 6,
        control_shift: Expr::one(),
    });
    // 7. D = W^(1/2), Q = eps1 u^2 + eps2, eps1 eps2 = -1.
    rows.push(SymmetryCase {
        id: any(7),
        pde: PdeSpec::divergence_2d(Expr::powr(p("W"), ratio(1, 2)), p("eps1*u^2 + eps2")),
        principal: principal_2d(),
        extensions: vec![
            f2("exp(-2*t)", "0", "0", "2*exp(-2*t)*(u - eps1)"),
            f2("exp(2*t)", "0", "0", "-2*exp(2*t)*(u + eps1)"),
        ],
        assignments: assignments(
            &[
                ("eps1", SIGNS.map(rat).to_vec()),
                ("eps2", SIGNS.map(rat).to_vec()),
            ],
            |m| sign_product_is(m, -1),
        ),
        expected_dim: 6,
        control_shift: Expr::one(),
    });
    // 8. D = W^(1/2), Q = eps1 u^2 + eps2, eps1 eps2 = 1.
    rows.push(SymmetryCase {
        id: any(8),
        pde: PdeSpec::divergence_2d(Expr::powr(p("W"), ratio(1, 2)), p("eps1*u^2 + eps2")),
        principal: principal_2d(),
        extensions: vec![
            f2("cos(2*t)", "0", "0", "2*(sin(2*t)*u + eps1*cos(2*t))"),
            f2("sin(2*t)", "0", "0", "-2*(cos(2*t)*u - eps1*sin(2*t))"),
        ],
        assignments: assignments(
            &[
                ("eps1", SIGNS.map(rat).to_vec()),
                ("eps2", SIGNS.map(rat).to_vec()),
            ],
            |m| sign_product_is(m, 1),
        ),
        expected_dim: 6,
        control_shift: Expr::one(),
    });
    // 9. D = W^k, Q = eps2 u.
    rows.push(SymmetryCase {
        id: any(9),
        pde: PdeSpec::divergence_2d(p("W^k"), p("eps2*u")),
        principal: principal_2d(),
        extensions: vec![
            scaling("1", "(1 + 1/k)*u"),
            f2("exp(-2*k*eps2*t)", "0", "0", "eps2*exp(-2*k*eps2*t)*u"),
            f2("0", "0", "0", "exp(eps2*t)"),
        ],
        assignments: assignments(
            &[("k", k_samples(&[])), ("eps2", SIGNS.map(rat).to_vec())],
            no_constraint,
        ),
        expected_dim: 7,
        control_shift: Expr::one(),
    });
    rows
}

/// The special two-dimensional diffusivity `D = W^-1`.
fn table3() -> Vec<SymmetryCase> {
    let any = |n| CaseId {
        table: "T3".to_string(),
        row: n,
    };
    let d = p("W^-1");
    let no_constraint = |_: &BTreeMap<Symbol, Rat>| true;
    let space_scaling = f2("0", "x1", "x2", "0");
    let mut rows = Vec::new();

    // 1. arbitrary (non-constant) Q.
    rows.push(SymmetryCase {
        id: any(1),
        pde: PdeSpec::divergence_2d(d.clone(), Expr::call("Q", vec![Expr::u()])),
        principal: principal_2d(),
        extensions: vec![space_scaling.clone()],
        assignments: assignments(&[], no_constraint),
        expected_dim: 5,
        control_shift: Expr::one(),
    });
    // 2. Q = lambda u^-1 + eps2 u.
    rows.push(SymmetryCase {
        id: any(2),
        pde: PdeSpec::divergence_2d(d.clone(), p("lambda*u^-1 + eps2*u")),
        principal: principal_2d(),
        extensions: vec![
            space_scaling.clone(),
            f2("exp(2*eps2*t)", "0", "0", "eps2*exp(2*eps2*t)*u"),
        ],
        assignments: assignments(
            &[
                ("lambda", lambda_samples()),
                ("eps2", SIGNS.map(rat).to_vec()),
            ],
            no_constraint,
        ),
        expected_dim: 6,
        control_shift: Expr::one(),
    });
    // 3. Q = lambda u^-1.
    rows.push(SymmetryCase {
        id: any(3),
        pde: PdeSpec::divergence_2d(d.clone(), p("lambda*u^-1")),
        principal: principal_2d(),
        extensions: vec![space_scaling.clone(), f2("2*t", "0", "0", "u")],
        assignments: assignments(&[("lambda", lambda_samples())], no_constraint),
        expected_dim: 6,
        control_shift: Expr::one(),
    });
    // 4. Q = lambda u.
    rows.push(SymmetryCase {
        id: any(4),
        pde: PdeSpec::divergence_2d(d, p("lambda*u")),
        principal: principal_2d(),
        extensions: vec![
            space_scaling,
            f2("exp(2*lambda*t)", "0", "0", "lambda*exp(2*lambda*t)*u"),
            f2("0", "0", "0", "exp(lambda*t)"),
        ],
        assignments: assignments(&[("lambda", lambda_samples())], no_constraint),
        expected_dim: 7,
        control_shift: Expr::one(),
    });
    rows
}

fn principal_cases() -> Vec<SymmetryCase> {
    let no_constraint = |_: &BTreeMap<Symbol, Rat>| true;
    vec![
        SymmetryCase {
            id: CaseId {
                table: "principal-1d".to_string(),
                row: 1,
            },
            pde: PdeSpec::opaque_1d(),
            principal: principal_1d(),
            extensions: vec![],
            assignments: assignments(&[], no_constraint),
            expected_dim: 2,
            control_shift: Expr::one(),
        },
        SymmetryCase {
            id: CaseId {
                table: "principal-2d".to_string(),
                row: 1,
            },
            pde: PdeSpec::opaque_2d(),
            principal: principal_2d(),
            extensions: vec![],
            assignments: assignments(&[], no_constraint),
            expected_dim: 4,
            control_shift: Expr::one(),
        },
    ]
}

/// Source-free two-dimensional class with arbitrary diffusivity: the
/// principal algebra gains `d/du` and the parabolic scaling.
fn principal_no_source() -> SymmetryCase {
    let no_constraint = |_: &BTreeMap<Symbol, Rat>| true;
    let mut principal = principal_2d();
    principal.push(f2("0", "0", "0", "1"));
    principal.push(f2("2*t", "x1", "x2", "u"));
    SymmetryCase {
        id: CaseId {
            table: "principal-noQ".to_string(),
            row: 1,
        },
        pde: PdeSpec::divergence_2d(Expr::call("D", vec![Expr::param("W")]), Expr::zero()),
        principal,
        extensions: vec![],
        assignments: assignments(&[], no_constraint),
        expected_dim: 6,
        // d/du is itself a symmetry here, so perturb by x instead.
        control_shift: Expr::x(0),
    }
}

/// Source-free two-dimensional class with `D = W^k`: one extra scaling.
fn power_law_no_source() -> SymmetryCase {
    let no_constraint = |_: &BTreeMap<Symbol, Rat>| true;
    let base = principal_no_source();
    SymmetryCase {
        id: CaseId {
            table: "power-law-noQ".to_string(),
            row: 1,
        },
        pde: PdeSpec::divergence_2d(p("W^k"), Expr::zero()),
        principal: base.principal,
        extensions: vec![f2("2*k*t", "0", "0", "-u")],
        assignments: assignments(&[("k", k_samples(&[]))], no_constraint),
        expected_dim: 7,
        control_shift: Expr::x(0),
    }
}

/// All cases of one table.
pub fn cases(table: &str) -> Result<Vec<SymmetryCase>> {
    match table {
        "T1" => Ok(table1()),
        "T2" => Ok(table2()),
        "T3" => Ok(table3()),
        "principal-1d" => Ok(vec![principal_cases().remove(0)]),
        "principal-2d" => Ok(vec![principal_cases().remove(1)]),
        "principal-noQ" => Ok(vec![principal_no_source()]),
        "power-law-noQ" => Ok(vec![power_law_no_source()]),
        other => Err(Error::InvalidParameter(format!("unknown table `{other}`"))),
    }
}

/// Every known table id, in report order.
pub const TABLES: [&str; 7] = [
    "T1",
    "T2",
    "T3",
    "principal-1d",
    "principal-2d",
    "principal-noQ",
    "power-law-noQ",
];

/// Verification result for one parameter assignment of a case.
#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    /// Parameter values as exact rational strings.
    pub assignment: BTreeMap<String, String>,
    /// Largest scaled residual per generator (0 for exact verdicts).
    pub generator_residuals: Vec<f64>,
    pub pass: bool,
}

/// Verification result for one case.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub case_id: String,
    pub seed: u64,
    pub samples: Vec<SampleReport>,
    /// Scaled residual of the perturbed-generator control.
    pub control_residual: f64,
    /// Whether the control was correctly rejected.
    pub control_rejected: bool,
    pub pass: bool,
}

fn assignment_strings(a: &BTreeMap<Symbol, Rat>) -> BTreeMap<String, String> {
    a.iter()
        .map(|(s, v)| (Expr::Sym(s.clone()).to_string(), v.to_string()))
        .collect()
}

fn bind_exprs(a: &BTreeMap<Symbol, Rat>) -> BTreeMap<Symbol, Expr> {
    a.iter()
        .map(|(s, v)| (s.clone(), Expr::Num(v.clone())))
        .collect()
}

/// Negative-control floor: a perturbed generator must leave a scaled
/// residual above this at some sample point.
pub const CONTROL_FLOOR: f64 = 1e-3;

/// Check every generator of a case at every pinned parameter assignment,
/// then run the perturbed-generator negative control.
pub fn verify_case(case: &SymmetryCase, cfg: &SamplerConfig) -> Result<VerificationReport> {
    let mut samples = Vec::new();
    let mut all_pass = true;
    for a in &case.assignments {
        let bind = bind_exprs(a);
        let pde = PdeSpec {
            space: case.pde.space,
            form: case.pde.form,
            diffusivity: case.pde.diffusivity.substitute(&bind),
            source: case.pde.source.substitute(&bind),
        };
        let mut residuals = Vec::new();
        let mut pass = true;
        for g in case.generators() {
            let g = g.substitute(&bind);
            let r = check_invariance(&pde, &g, cfg)?;
            residuals.push(if r.is_zero { r.max_residual } else { f64::NAN });
            pass &= r.is_zero;
        }
        all_pass &= pass;
        samples.push(SampleReport {
            assignment: assignment_strings(a),
            generator_residuals: residuals,
            pass,
        });
    }

    // Negative control at the first assignment: shift the u-component of
    // the last generator and demand the check rejects it.
    let a = case
        .assignments
        .first()
        .expect("every case has at least one assignment");
    let bind = bind_exprs(a);
    let pde = PdeSpec {
        space: case.pde.space,
        form: case.pde.form,
        diffusivity: case.pde.diffusivity.substitute(&bind),
        source: case.pde.source.substitute(&bind),
    };
    let base = case
        .generators()
        .last()
        .expect("every case has generators")
        .substitute(&bind);
    let perturbed = VectorField::new(
        base.space,
        base.xi_t.clone(),
        base.xi_x.clone(),
        Expr::add2(base.eta.clone(), case.control_shift.clone()),
    )?;
    let mut control_cfg = cfg.clone();
    control_cfg.tol = CONTROL_FLOOR;
    let control = check_invariance(&pde, &perturbed, &control_cfg)?;
    let control_residual = match &control.witness {
        Some(w) => w.value.abs(),
        None => control.max_residual,
    };
    let control_rejected = !control.is_zero;

    Ok(VerificationReport {
        case_id: case.id.to_string(),
        seed: cfg.seed,
        samples,
        control_residual,
        control_rejected,
        pass: all_pass && control_rejected,
    })
}

/// The two candidate source readings for row 6 of the one-dimensional
/// table, whose printed source and generators disagree about the sign
/// parameter. Returns `(reading, passes for every sign)` pairs.
pub fn table1_row6_readings(cfg: &SamplerConfig) -> Result<Vec<(String, bool)>> {
    let case = &table1()[5];
    let mut out = Vec::new();
    for (label, q) in [("u", p("u")), ("eps1*u", p("eps1*u"))] {
        let mut ok = true;
        for a in &case.assignments {
            let bind = bind_exprs(a);
            let pde = PdeSpec::gradient_1d(case.pde.diffusivity.substitute(&bind), q.substitute(&bind));
            for g in &case.extensions {
                let r = check_invariance(&pde, &g.substitute(&bind), cfg)?;
                ok &= r.is_zero;
            }
        }
        out.push((label.to_string(), ok));
    }
    Ok(out)
}

/// Report of the infinite-family check for the hodograph-linearizable
/// diffusivity `D = u_x^-2`.
#[derive(Clone, Debug, Serialize)]
pub struct LinearizableFamilyReport {
    pub profiles: usize,
    pub pass: bool,
}

/// For `u_t = u_x^-2 u_xx + Q(u)`, every solution `w(t, u)` of the linear
/// equation `w_t = w_uu - Q(u) w_u` yields the symmetry `X = w d/dx`.
/// Each profile is first checked against its own linear equation, then the
/// invariance of the nonlinear equation is verified.
pub fn verify_linearizable_family(
    q: &Expr,
    w_profiles: &[Expr],
    cfg: &SamplerConfig,
) -> Result<LinearizableFamilyReport> {
    let u = Symbol::u();
    let pde = PdeSpec::gradient_1d(Expr::powi(Expr::jet(0, 1, 0), -2), q.clone());
    for w in w_profiles {
        let linear = Expr::add(vec![
            w.diff(&Symbol::Time),
            w.diff(&u).diff(&u).neg(),
            Expr::mul2(q.clone(), w.diff(&u)),
        ]);
        let r = is_zero(&linear, cfg)?;
        if !r.is_zero {
            return Err(Error::InvalidParameter(format!(
                "profile `{w}` does not satisfy its linear equation"
            )));
        }
        let field = VectorField::new_1d(Expr::zero(), w.clone(), Expr::zero())?;
        let r = check_invariance(&pde, &field, cfg)?;
        if !r.is_zero {
            return Ok(LinearizableFamilyReport {
                profiles: w_profiles.len(),
                pass: false,
            });
        }
    }
    Ok(LinearizableFamilyReport {
        profiles: w_profiles.len(),
        pass: true,
    })
}

/// Built-in linear-equation profiles for the linearizable family:
/// polynomial solutions for `Q = 0` and decaying Hermite-style solutions
/// for `Q = u`.
pub fn linearizable_profiles() -> Vec<(Expr, Vec<Expr>)> {
    vec![
        (
            Expr::zero(),
            vec![p("u"), p("u^2 + 2*t"), p("u^3 + 6*t*u")],
        ),
        (
            p("u"),
            vec![
                p("exp(-t)*u"),
                p("exp(-2*t)*(u^2 - 1)"),
                p("exp(-3*t)*(u^3 - 3*u)"),
            ],
        ),
    ]
}

/// Result of the commutator-closure check for one case.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    pub case_id: String,
    /// Structure constants per generator pair `(i, j)` with `i < j`,
    /// as exact rational strings.
    pub brackets: Vec<(usize, usize, Vec<String>)>,
    pub closed: bool,
}

/// Best rational approximation with denominator at most `max_den`.
fn rationalize(x: f64, max_den: i64) -> Option<Rat> {
    let mut best: Option<(f64, Rat)> = None;
    for q in 1..=max_den {
        let p = (x * q as f64).round();
        if p.abs() > 1e15 {
            continue;
        }
        let err = (x - p / q as f64).abs();
        let cand = ratio(p as i64, q);
        match &best {
            Some((e, _)) if *e <= err => {}
            _ => best = Some((err, cand)),
        }
    }
    let (err, r) = best?;
    if err < 1e-6 {
        Some(r)
    } else {
        None
    }
}

/// Check that the case's generator set closes under commutators at its
/// first parameter assignment. Structure constants are fitted numerically
/// by least squares, reconstructed as rationals, and confirmed
/// symbolically.
pub fn verify_algebra_structure(case: &SymmetryCase, cfg: &SamplerConfig) -> Result<AlgebraReport> {
    let a = case
        .assignments
        .first()
        .expect("every case has at least one assignment");
    let bind = bind_exprs(a);
    let gens: Vec<VectorField> = case
        .generators()
        .iter()
        .map(|g| g.substitute(&bind))
        .collect();
    let n = gens.len();
    let dim = case.pde.space.dim as usize;
    let ncomp = dim + 2;

    // Sample points for the least-squares fit.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xa1eb);
    let npts = 8 * n.max(4);
    let mut points = Vec::with_capacity(npts);
    for _ in 0..npts {
        let mut env = FloatEnv::new();
        env.set(Symbol::Time, rng.gen_range(0.5..2.0));
        for i in 0..dim {
            env.set(Symbol::Space(i as u8), rng.gen_range(0.5..2.0));
        }
        env.set(Symbol::u(), rng.gen_range(0.5..2.0));
        points.push(env);
    }
    let eval_field = |f: &VectorField, envs: &mut [FloatEnv]| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(envs.len() * ncomp);
        for env in envs.iter_mut() {
            for c in f.components() {
                out.push(crate::expr::eval_f64(c, env)?);
            }
        }
        Ok(out)
    };
    let mut basis = Vec::with_capacity(n);
    for g in &gens {
        basis.push(eval_field(g, &mut points)?);
    }

    let mut brackets = Vec::new();
    let mut closed = true;
    for i in 0..n {
        for j in (i + 1)..n {
            let c = gens[i].commutator(&gens[j])?;
            let b = eval_field(&c, &mut points)?;
            let coeffs = least_squares(&basis, &b);
            // Rational reconstruction and symbolic confirmation.
            let mut exact = Vec::with_capacity(n);
            let mut ok = true;
            for v in &coeffs {
                match rationalize(*v, 64) {
                    Some(r) => exact.push(r),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let mut combo = VectorField::new(
                    c.space,
                    Expr::zero(),
                    vec![Expr::zero(); dim],
                    Expr::zero(),
                )?;
                for (g, r) in gens.iter().zip(&exact) {
                    combo =
                        combo.linear_combination(&Expr::one(), g, &Expr::Num(r.clone()));
                }
                for (lhs, rhs) in c.components().into_iter().zip(combo.components()) {
                    let diff = Expr::sub(lhs.clone(), rhs.clone());
                    if !is_zero(&diff, cfg)?.is_zero {
                        ok = false;
                        break;
                    }
                }
            }
            closed &= ok;
            brackets.push((
                i,
                j,
                exact.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            ));
        }
    }
    Ok(AlgebraReport {
        case_id: case.id.to_string(),
        brackets,
        closed,
    })
}

/// Least squares via normal equations with Gaussian elimination; the
/// generator sets are small and well separated at random points.
fn least_squares(basis: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = basis.len();
    let mut ata = vec![vec![0.0; n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            ata[i][j] = basis[i].iter().zip(&basis[j]).map(|(x, y)| x * y).sum();
        }
        ata[i][n] = basis[i].iter().zip(b).map(|(x, y)| x * y).sum();
    }
    // Elimination with partial pivoting.
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| ata[a][col].abs().total_cmp(&ata[b][col].abs()))
            .unwrap();
        ata.swap(col, piv);
        let d = ata[col][col];
        if d.abs() < 1e-12 {
            continue;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = ata[row][col] / d;
            for k in col..=n {
                ata[row][k] -= f * ata[col][k];
            }
        }
    }
    (0..n)
        .map(|i| {
            if ata[i][i].abs() < 1e-12 {
                0.0
            } else {
                ata[i][n] / ata[i][i]
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shapes() {
        assert_eq!(cases("T1").unwrap().len(), 10);
        assert_eq!(cases("T2").unwrap().len(), 9);
        assert_eq!(cases("T3").unwrap().len(), 4);
        assert!(cases("T4").is_err());
        for t in TABLES {
            for c in cases(t).unwrap() {
                assert_eq!(
                    c.principal.len() + c.extensions.len(),
                    c.expected_dim,
                    "{}",
                    c.id
                );
                assert!(!c.assignments.is_empty(), "{}", c.id);
            }
        }
    }

    #[test]
    fn eps_constraints_filter_assignments() {
        let t1 = cases("T1").unwrap();
        // Row 8: eps1 eps2 = -1 leaves two of four combinations.
        assert_eq!(t1[7].assignments.len(), 2);
        assert_eq!(t1[8].assignments.len(), 2);
        // Row 5 excludes k = +-1 (not in the pinned set anyway).
        assert_eq!(t1[4].assignments.len(), 5 * 2 * 2);
    }

    #[test]
    fn spot_verify_t1_rows() {
        let t1 = cases("T1").unwrap();
        for idx in [1, 6] {
            let r = verify_case(&t1[idx], &SamplerConfig::seeded(42)).unwrap();
            assert!(r.pass, "row {}: {r:?}", idx + 1);
        }
    }

    #[test]
    fn spot_verify_t2_row8_and_t3_row3() {
        let t2 = cases("T2").unwrap();
        let r = verify_case(&t2[7], &SamplerConfig::seeded(42)).unwrap();
        assert!(r.pass, "{r:?}");
        let t3 = cases("T3").unwrap();
        let r = verify_case(&t3[2], &SamplerConfig::seeded(42)).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn principal_algebras_pass_with_opaque_coefficients() {
        for t in ["principal-1d", "principal-2d", "principal-noQ"] {
            let c = cases(t).unwrap().remove(0);
            let r = verify_case(&c, &SamplerConfig::seeded(7)).unwrap();
            assert!(r.pass, "{t}: {r:?}");
        }
    }

    #[test]
    fn row6_reading_with_sign_parameter_passes() {
        let readings = table1_row6_readings(&SamplerConfig::seeded(3)).unwrap();
        let by_label: BTreeMap<_, _> = readings.into_iter().collect();
        assert!(by_label["eps1*u"]);
    }

    #[test]
    fn linearizable_family_profiles_pass() {
        for (q, ws) in linearizable_profiles() {
            let r = verify_linearizable_family(&q, &ws, &SamplerConfig::seeded(5)).unwrap();
            assert!(r.pass, "Q = {q}");
        }
        // A profile failing its own linear equation is rejected up front.
        let bad = vec![p("u^2")];
        assert!(
            verify_linearizable_family(&Expr::zero(), &bad, &SamplerConfig::seeded(5)).is_err()
        );
    }

    #[test]
    fn algebra_closure_for_no_source_cases() {
        let c = cases("principal-noQ").unwrap().remove(0);
        let r = verify_algebra_structure(&c, &SamplerConfig::seeded(9)).unwrap();
        assert!(r.closed, "{r:?}");
        let c = cases("power-law-noQ").unwrap().remove(0);
        let r = verify_algebra_structure(&c, &SamplerConfig::seeded(9)).unwrap();
        assert!(r.closed, "{r:?}");
    }

    #[test]
    fn known_structure_constants() {
        // In the source-free algebra, [d/dt, parabolic scaling] = 2 d/dt
        // and the translation pair commutes.
        let c = cases("principal-noQ").unwrap().remove(0);
        let r = verify_algebra_structure(&c, &SamplerConfig::seeded(9)).unwrap();
        // Generators: t-shift, x1-shift, x2-shift, rotation, u-shift,
        // scaling (indices 0..6).
        let find = |i, j| {
            r.brackets
                .iter()
                .find(|(a, b, _)| (*a, *b) == (i, j))
                .unwrap()
                .2
                .clone()
        };
        let c01 = find(0, 5);
        assert_eq!(c01[0], "2");
        assert!(c01[1..].iter().all(|s| s == "0"));
        let c04 = find(0, 4);
        assert!(c04.iter().all(|s| s == "0"));
    }
}
