//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion does. Tolerances are pinned here and
//! are not meant to be loosened.

use std::collections::BTreeMap;
use std::time::Instant;

use liesym::catalog::{
    cases, linearizable_profiles, verify_case, verify_linearizable_family, CONTROL_FLOOR,
};
use liesym::expr::{is_zero, parse, rat, ratio, Expr, Rat, SamplerConfig, Symbol};
use liesym::jet::VectorField;
use liesym::numerics::{
    pde_residual_fd, perona_malik_filter, rhs_residual_fd, step_edge_image, DiffusivityModel,
    ResidualWindow,
};
use liesym::pde::{
    apply_form_preserving, check_invariance, determining_system, generic_point_field_1d,
    printed_determining_forms, verify_form_preserving, FormMap, PdeSpec,
};
use liesym::reduce::{
    bernoulli_vs_integration, exact_solution, hodograph_1d, inverse_root_first_integral,
    radial_hodograph_identity, radial_hodograph_solution, radial_rhs, reduce_to_ode,
    ExponentVariant, FamilyParams, ReductionCaseId,
};
use liesym::Result;

const SEED: u64 = 7;
const RATIO_BAND: std::ops::RangeInclusive<f64> = 3.5..=4.5;
const GRID: f64 = 0.02;

fn cfg() -> SamplerConfig {
    // 100 jet points per identity, float tolerance 1e-9.
    let c = SamplerConfig::seeded(SEED);
    assert_eq!(c.samples, 100);
    assert_eq!(c.tol, 1e-9);
    c
}

fn p(src: &str) -> Expr {
    parse(src).unwrap()
}

fn bind_k(k: &Rat) -> BTreeMap<Symbol, Expr> {
    let mut b = BTreeMap::new();
    b.insert(Symbol::param("k"), Expr::Num(k.clone()));
    b
}

/// Criteria 1 and 3 share one sweep over the classification tables.
struct Sweep {
    rows_ok: bool,
    invariance_ok: bool,
    param_coverage_ok: bool,
    controls_ok: bool,
    rows: usize,
    elapsed_s: f64,
}

fn run_sweep() -> Result<Sweep> {
    let cfg = cfg();
    let start = Instant::now();
    let mut s = Sweep {
        rows_ok: true,
        invariance_ok: true,
        param_coverage_ok: true,
        controls_ok: true,
        rows: 0,
        elapsed_s: 0.0,
    };
    for (table, want) in [("T1", 10usize), ("T2", 9), ("T3", 4)] {
        let cs = cases(table)?;
        s.rows_ok &= cs.len() == want;
        for case in &cs {
            // At least 3 sampled values for every continuous parameter
            // (sign parameters only take the two values +-1).
            let mut values: BTreeMap<&Symbol, Vec<&Rat>> = BTreeMap::new();
            for a in &case.assignments {
                for (sym, v) in a {
                    let e = values.entry(sym).or_default();
                    if !e.contains(&v) {
                        e.push(v);
                    }
                }
            }
            for (sym, vals) in &values {
                let sign_only = vals.iter().all(|v| **v == rat(1) || **v == rat(-1));
                if !sign_only && vals.len() < 3 {
                    eprintln!("{}: parameter {sym:?} has {} samples", case.id, vals.len());
                    s.param_coverage_ok = false;
                }
            }
            let r = verify_case(case, &cfg)?;
            let inv = r.samples.iter().all(|sr| sr.pass);
            if !inv {
                eprintln!("{}: invariance check failed", r.case_id);
            }
            s.invariance_ok &= inv;
            if !(r.control_rejected && r.control_residual > CONTROL_FLOOR) {
                eprintln!("{}: negative control not rejected", r.case_id);
                s.controls_ok = false;
            }
            s.rows += 1;
        }
    }
    s.elapsed_s = start.elapsed().as_secs_f64();
    Ok(s)
}

fn c2_principal_algebras() -> Result<(bool, String)> {
    let cfg = cfg();
    let mut pass = true;
    for table in ["principal-1d", "principal-2d", "principal-noQ"] {
        let case = &cases(table)?[0];
        let r = verify_case(case, &cfg)?;
        pass &= r.pass;
    }
    // The extra scaling of the source-free power law holds at sampled k...
    let case = &cases("power-law-noQ")?[0];
    for k in [rat(-3), ratio(1, 2), rat(2)] {
        let b = bind_k(&k);
        let pde = PdeSpec {
            diffusivity: case.pde.diffusivity.substitute(&b),
            source: case.pde.source.substitute(&b),
            ..case.pde.clone()
        };
        let x7 = case.extensions[0].substitute(&b);
        pass &= check_invariance(&pde, &x7, &cfg)?.is_zero;
    }
    // ...and fails for an exponential diffusivity, confirming that the
    // extension is specific to power laws.
    let pde = PdeSpec::divergence_2d(p("exp(-W)"), Expr::zero());
    let x7 = VectorField::new(pde.space, p("2*t"), vec![Expr::zero(), Expr::zero()], p("-u"))?;
    let r = check_invariance(&pde, &x7, &cfg)?;
    let residual = r.witness.as_ref().map(|w| w.value.abs()).unwrap_or(r.max_residual);
    pass &= !r.is_zero && residual > 1e-3;
    Ok((
        pass,
        format!("power-law scaling rejected for exp diffusivity with residual {residual:.2e} > 1e-3"),
    ))
}

fn c4_determining_system() -> Result<(bool, String)> {
    let cfg = cfg();
    let sys = determining_system(&PdeSpec::opaque_1d(), &generic_point_field_1d())?;
    let (coeff, remainder) = printed_determining_forms();
    let ra = is_zero(&Expr::sub(sys.coeff_uxx.clone(), coeff), &cfg)?;
    let rb = is_zero(&Expr::sub(sys.remainder.clone(), remainder), &cfg)?;
    let pass = ra.is_zero && ra.exact && rb.is_zero && rb.exact;
    Ok((
        pass,
        "coefficient and remainder match on the exact path; remainder read as a single sum"
            .to_string(),
    ))
}

fn c5_linearizable_family() -> Result<(bool, String)> {
    let cfg = cfg();
    let mut pass = true;
    let mut profiles = 0;
    for (q, ws) in linearizable_profiles() {
        let rep = verify_linearizable_family(&q, &ws, &cfg)?;
        pass &= rep.pass && rep.profiles == 3;
        profiles += rep.profiles;
    }
    // Invert one profile per source term and push the inverse through the
    // finite-difference residual oracle.
    let h0 = hodograph_1d(&Expr::zero());
    let w0 = p("u^2 + 2*t");
    let f0 = |t: f64, x: &[f64]| Ok(h0.invert_profile(&w0, t, &[x[0]], (0.0, 3.0))?[0]);
    let win0 = ResidualWindow {
        t: (0.05, 0.2),
        x: [(0.6, 1.4), (0.0, 0.0)],
        n: 8,
    };
    let r0 = pde_residual_fd(&f0, &h0.nonlinear, &win0, GRID)?;
    pass &= RATIO_BAND.contains(&r0.ratio);

    let h1 = hodograph_1d(&Expr::u());
    let w1 = p("exp(-t)*u");
    let f1 = |t: f64, x: &[f64]| Ok(h1.invert_profile(&w1, t, &[x[0]], (0.0, 4.0))?[0]);
    let win1 = ResidualWindow {
        t: (0.1, 0.4),
        x: [(0.4, 1.2), (0.0, 0.0)],
        n: 8,
    };
    let r1 = pde_residual_fd(&f1, &h1.nonlinear, &win1, GRID)?;
    pass &= RATIO_BAND.contains(&r1.ratio);
    Ok((
        pass,
        format!(
            "{profiles} profiles verified; inverted-solution oracle ratios {:.2} and {:.2}",
            r0.ratio, r1.ratio
        ),
    ))
}

fn c6_reductions() -> Result<(bool, String)> {
    let cfg = cfg();
    let mut pass = true;
    let (k, lambda) = (rat(2), rat(3));
    for id in [
        ReductionCaseId::I,
        ReductionCaseId::Ii,
        ReductionCaseId::Iii,
        ReductionCaseId::IiiLambdaZero,
        ReductionCaseId::Iv,
    ] {
        let rc = reduce_to_ode(id, &k, &lambda, &cfg)?;
        pass &= rc.derivation_ok;
        // The log-time similarity ODE is printed with a missing omega
        // factor; every other case must agree with its printed form.
        pass &= rc.matches_printed == (id != ReductionCaseId::Ii);
    }
    let mut worst: f64 = 0.0;
    for (k, c1) in [(rat(-2), rat(0)), (ratio(1, 2), rat(8)), (rat(2), rat(32))] {
        let dev = bernoulli_vs_integration(&k, &c1, &cfg, 1e-9)?;
        pass &= dev <= 1e-6;
        worst = worst.max(dev);
    }
    Ok((
        pass,
        format!("log-time discrepancy detected; closed form vs integration within {worst:.1e} <= 1e-6"),
    ))
}

fn c7_exact_solutions() -> Result<(bool, String)> {
    let cfg = cfg();
    let mut pass = true;
    // Quadrature family at k = -2 with vanishing first constant.
    let mut params = FamilyParams {
        sign: 1.0,
        ..Default::default()
    };
    params.k = Some(rat(-2));
    params.omega_range = Some((0.4, 4.0));
    let sol = exact_solution("radial-quadrature", &params)?;
    let rhs = radial_rhs(&Expr::Num(sol.k()), true);
    let win = ResidualWindow {
        t: (1.0, 1.5),
        x: [(0.6, 2.4), (0.0, 0.0)],
        n: 10,
    };
    let rq = rhs_residual_fd(&|t, x: &[f64]| sol.eval(t, x[0]), &rhs, &win, GRID)?;
    pass &= RATIO_BAND.contains(&rq.ratio);

    // Inverse-root family: first integral, then exponent adjudication.
    let fi = inverse_root_first_integral(&rat(1), &rat(40), &cfg)?;
    pass &= fi.is_zero && fi.max_residual <= 1e-9;

    let mut params = FamilyParams {
        sign: 1.0,
        ..Default::default()
    };
    params.lambda = Some(rat(1));
    params.c2 = Some(40.0);
    let rhs = radial_rhs(&Expr::ratio(-1, 3), true);
    let win = ResidualWindow {
        t: (0.1, 0.5),
        x: [(0.4, 1.4), (0.0, 0.0)],
        n: 10,
    };
    let mut ratios = Vec::new();
    for variant in [ExponentVariant::Derived, ExponentVariant::Printed] {
        params.variant = Some(variant);
        let sol = exact_solution("inverse-root", &params)?;
        let r = rhs_residual_fd(&|t, x: &[f64]| sol.eval(t, x[0]), &rhs, &win, GRID)?;
        match variant {
            ExponentVariant::Derived => pass &= RATIO_BAND.contains(&r.ratio),
            // The printed time exponent leaves an h-independent defect.
            ExponentVariant::Printed => pass &= r.ratio < 2.0 && r.fine > 1e-3,
        }
        ratios.push(r.ratio);
    }
    Ok((
        pass,
        format!(
            "quadrature ratio {:.2}; first integral within 1e-9; Derived exponent passes \
             (ratio {:.2}) while Printed stalls (ratio {:.2})",
            rq.ratio, ratios[0], ratios[1]
        ),
    ))
}

fn c8_hodograph() -> Result<(bool, String)> {
    let cfg = cfg();
    let mut pass = true;
    let h = hodograph_1d(&Expr::u());
    pass &= h.identity_witness(&cfg)?.is_zero;
    let win = ResidualWindow {
        t: (0.1, 0.4),
        x: [(0.4, 1.2), (0.0, 0.0)],
        n: 8,
    };
    let r1 = pde_residual_fd(&|t: f64, x: &[f64]| Ok(t.exp() * x[0]), &h.nonlinear, &win, GRID)?;
    pass &= RATIO_BAND.contains(&r1.ratio);

    pass &= radial_hodograph_identity(&cfg)?.is_zero;
    let rhs = radial_rhs(&Expr::num(-1), true);
    let win = ResidualWindow {
        t: (0.5, 1.0),
        x: [(0.3, 1.0), (0.0, 0.0)],
        n: 8,
    };
    let r2 = rhs_residual_fd(
        &|t, x: &[f64]| radial_hodograph_solution(t, x[0]),
        &rhs,
        &win,
        GRID,
    )?;
    pass &= RATIO_BAND.contains(&r2.ratio);
    Ok((
        pass,
        format!("oracle ratios {:.2} (gradient form) and {:.2} (radial)", r1.ratio, r2.ratio),
    ))
}

fn c9_form_preserving() -> Result<(bool, String)> {
    let cfg = cfg();
    let mut pass = true;
    // The exponential rescale strips the linear source term, sending the
    // power-law row with Q = eps1 u^(k+1) + eps2 u to the pure-power row
    // with exponent m = k + 1.
    for k in [rat(-3), ratio(1, 2), rat(2)] {
        let b = bind_k(&k);
        let pde = PdeSpec::gradient_1d(
            p("u_x^k").substitute(&b),
            p("eps1*u^(k+1) + eps2*u").substitute(&b),
        );
        let fp = apply_form_preserving(&pde, FormMap::ExponentialRescale, &Expr::param("eps2"))?;
        let want = p("eps1*u^(k+1)").substitute(&b);
        pass &= is_zero(&Expr::sub(fp.target.source.clone(), want), &cfg)?.is_zero;
        pass &= verify_form_preserving(&pde, &fp, &cfg)?.is_zero;
    }
    // Two-dimensional D = W^-1: the same map sends Q = lambda u^-1 + eps2 u
    // to Q = lambda u^-1, and Q = lambda u to the source-free equation.
    let pde = PdeSpec::divergence_2d(p("W^-1"), p("lambda*u^-1 + eps2*u"));
    let fp = apply_form_preserving(&pde, FormMap::ExponentialRescale, &Expr::param("eps2"))?;
    pass &= is_zero(&Expr::sub(fp.target.source.clone(), p("lambda*u^-1")), &cfg)?.is_zero;
    pass &= verify_form_preserving(&pde, &fp, &cfg)?.is_zero;

    let pde = PdeSpec::divergence_2d(p("W^-1"), p("lambda*u"));
    let fp = apply_form_preserving(&pde, FormMap::ExponentialRescale, &Expr::param("lambda"))?;
    pass &= fp.target.source.is_zero_literal();
    pass &= verify_form_preserving(&pde, &fp, &cfg)?.is_zero;
    Ok((
        pass,
        "pullback residual zero at k in {-3, 1/2, 2} and for both inverse-law mappings".to_string(),
    ))
}

fn c10_numerics_hygiene() -> Result<(bool, String)> {
    let mut pass = true;
    // Heat-equation oracle on a known solution.
    let heat = PdeSpec::gradient_1d(Expr::one(), Expr::zero());
    let win = ResidualWindow {
        t: (0.1, 0.4),
        x: [(0.4, 1.2), (0.0, 0.0)],
        n: 8,
    };
    let r = pde_residual_fd(
        &|t: f64, x: &[f64]| Ok((-t).exp() * x[0].cos()),
        &heat,
        &win,
        0.05,
    )?;
    pass &= RATIO_BAND.contains(&r.ratio);

    // Conservation and maximum principle for both filter models.
    let img = step_edge_image(64, 10.0, 200.0)?;
    let mut drift: f64 = 0.0;
    for model in [DiffusivityModel::Exponential, DiffusivityModel::Rational] {
        let (_, stats) = perona_malik_filter(&img, model, 0.01, 0.5, 0.4)?;
        pass &= stats.relative_mass_drift <= 1e-10 && stats.max_principle_ok;
        drift = drift.max(stats.relative_mass_drift);
    }
    Ok((
        pass,
        format!(
            "heat oracle ratio {:.2}; filter mass drift {drift:.1e} <= 1e-10, maximum principle holds",
            r.ratio
        ),
    ))
}

#[test]
fn acceptance_criteria() {
    let mut results: Vec<(String, bool, String)> = Vec::new();
    let push = |results: &mut Vec<(String, bool, String)>,
                    id: &str,
                    out: Result<(bool, String)>| {
        let (pass, detail) = out.unwrap_or_else(|e| (false, format!("error: {e}")));
        results.push((id.to_string(), pass, detail));
    };

    let sweep = run_sweep().unwrap();
    results.push((
        "1 table-coverage".to_string(),
        sweep.rows_ok && sweep.invariance_ok && sweep.param_coverage_ok && sweep.elapsed_s < 300.0,
        format!(
            "{} rows verified, residual tol 1e-9 at 100 points per generator, {:.0} s",
            sweep.rows, sweep.elapsed_s
        ),
    ));
    push(&mut results, "2 principal-algebras", c2_principal_algebras());
    results.push((
        "3 negative-controls".to_string(),
        sweep.controls_ok,
        format!("perturbed generator rejected with witness > {CONTROL_FLOOR:.0e} on all {} rows", sweep.rows),
    ));
    push(&mut results, "4 determining-system", c4_determining_system());
    push(&mut results, "5 linearizable-family", c5_linearizable_family());
    push(&mut results, "6 reductions", c6_reductions());
    push(&mut results, "7 exact-solutions", c7_exact_solutions());
    push(&mut results, "8 hodograph", c8_hodograph());
    push(&mut results, "9 form-preserving-maps", c9_form_preserving());
    push(&mut results, "10 numerics-hygiene", c10_numerics_hygiene());

    let mut failed = Vec::new();
    for (id, pass, detail) in &results {
        let tag = if *pass { "PASS" } else { "FAIL" };
        println!("{tag}  {id}: {detail}");
        if !pass {
            failed.push(id.clone());
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
