//! Command-line driver: verification runs over the symmetry catalog,
//! determining-system display, ODE reductions, exact-solution oracles,
//! hodograph checks, the image filter, and group-flow transport.
//!
//! Every subcommand prints a human-readable summary, optionally writes a
//! JSON report (`--report`), and exits 0 iff every checked item passes.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use liesym::catalog;
use liesym::expr::{rat, Expr, Rat, SamplerConfig};
use liesym::numerics::{
    pde_residual_fd, perona_malik_filter, read_pgm, rhs_residual_fd, transport_solution,
    write_pgm, DiffusivityModel, ResidualWindow,
};
use liesym::pde::{
    determining_system, generic_point_field_1d, printed_determining_forms, solve_coefficient_ode,
    DFormula, PdeSpec,
};
use liesym::reduce::{
    bernoulli_vs_integration, exact_solution, export_profile, hodograph_1d,
    inverse_root_first_integral, radial_hodograph_identity, radial_hodograph_solution, radial_rhs,
    reduce_to_ode, ExactSolution, ExponentVariant, FamilyParams, ReductionCaseId, FAMILIES,
};
use liesym::report::RunReport;
use liesym::{Error, Result};

#[derive(Parser)]
#[command(
    name = "liesym",
    about = "Symmetry classification verifier for gradient-diffusivity reaction-diffusion equations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify catalogued symmetry cases against their equations.
    Verify {
        /// Table id (T1, T2, T3, principal-1d, principal-2d,
        /// principal-noQ, power-law-noQ) or `all`.
        #[arg(long, default_value = "all")]
        table: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Evaluation points per identity check.
        #[arg(long)]
        samples: Option<usize>,
        /// Float-path residual tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print and verify the determining equations of the 1-D family.
    Determining {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Derive a similarity reduction to an ODE and compare with the
    /// conventional printed form.
    Reduce {
        /// Reduction case: i, ii, iii, iii-lambda0, iv.
        #[arg(long)]
        case: String,
        /// Diffusivity exponent, as an integer or fraction like -1/3.
        #[arg(long, default_value = "1")]
        k: String,
        #[arg(long, default_value = "1")]
        lambda: String,
        /// Integration constant; when given with case ii at lambda = 0,
        /// the closed form is cross-checked by adaptive integration.
        #[arg(long)]
        c1: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evaluate an exact-solution family and run the residual oracle.
    Exact {
        /// Family: radial-quadrature, inverse-root, separable-power.
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        c1: Option<String>,
        #[arg(long)]
        c2: Option<f64>,
        /// Coarse finite-difference spacing of the oracle.
        #[arg(long, default_value_t = 0.02)]
        grid: f64,
        /// Number of successive spacing halvings to tabulate.
        #[arg(long, default_value_t = 1)]
        refine: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        /// Write a sampled `t r u` profile here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check the hodograph linearizations (1-D and radial).
    Hodograph {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0.02)]
        grid: f64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the gradient-driven smoothing filter on a PGM image.
    PmFilter {
        /// Input PGM (binary, maxval 255).
        #[arg(long = "in")]
        input: PathBuf,
        /// Output PGM.
        #[arg(long)]
        out: PathBuf,
        /// Diffusivity model: exponential or rational.
        #[arg(long, default_value = "exponential")]
        model: String,
        #[arg(long, default_value_t = 1000.0)]
        d0: f64,
        /// Diffusion time.
        #[arg(long, default_value_t = 0.5)]
        time: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Transport solutions along one-parameter symmetry flows.
    Flow {
        /// Group parameter of the flow.
        #[arg(long, default_value_t = 0.3)]
        time: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        grid: f64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn parse_rat(s: &str) -> Result<Rat> {
    s.parse::<Rat>()
        .map_err(|e| Error::InvalidParameter(format!("cannot parse `{s}` as a rational: {e}")))
}

fn sampler(seed: u64, samples: Option<usize>, tol: Option<f64>) -> SamplerConfig {
    let mut cfg = SamplerConfig::seeded(seed);
    if let Some(n) = samples {
        cfg.samples = n;
    }
    if let Some(t) = tol {
        cfg.tol = t;
    }
    cfg
}

fn ratio_ok(ratio: f64) -> bool {
    (3.5..=4.5).contains(&ratio)
}

fn cmd_verify(
    table: &str,
    seed: u64,
    samples: Option<usize>,
    tol: Option<f64>,
) -> Result<RunReport> {
    let cfg = sampler(seed, samples, tol);
    let mut rep = RunReport::new("verify").with_seed(seed).with_samples(cfg.samples);
    let tables: Vec<&str> = if table == "all" {
        catalog::TABLES.to_vec()
    } else {
        vec![table]
    };
    for t in tables {
        for case in catalog::cases(t)? {
            let v = catalog::verify_case(&case, &cfg)?;
            let worst = v
                .samples
                .iter()
                .flat_map(|s| s.generator_residuals.iter())
                .fold(0.0f64, |a, b| a.max(*b));
            let detail = format!(
                "{} assignments, control residual {:.3e}",
                v.samples.len(),
                v.control_residual
            );
            rep.push(v.case_id.clone(), v.pass, Some(worst), Some(detail));
        }
        if t == "T1" {
            for (reading, pass) in catalog::table1_row6_readings(&cfg)? {
                rep.push(
                    "T1/6-source-reading",
                    true,
                    None,
                    Some(format!("Q = {reading}: {}", if pass { "admitted" } else { "rejected" })),
                );
            }
        }
        if t == "principal-noQ" || t == "power-law-noQ" {
            for case in catalog::cases(t)? {
                let a = catalog::verify_algebra_structure(&case, &cfg)?;
                rep.push(
                    format!("{}/algebra-closure", a.case_id),
                    a.closed,
                    None,
                    Some(format!("{} brackets resolved", a.brackets.len())),
                );
            }
        }
    }
    Ok(rep)
}

fn cmd_determining(seed: u64, tol: Option<f64>) -> Result<RunReport> {
    let cfg = sampler(seed, None, tol);
    let mut rep = RunReport::new("determining").with_seed(seed);
    let sys = determining_system(&PdeSpec::opaque_1d(), &generic_point_field_1d())?;
    println!("coefficient of u_xx:\n  {}\n", sys.coeff_uxx);
    println!("remainder:\n  {}\n", sys.remainder);
    let (pa, pb) = printed_determining_forms();
    let ra = liesym::expr::is_zero(&Expr::sub(sys.coeff_uxx.clone(), pa), &cfg)?;
    rep.push(
        "coefficient-of-u_xx",
        ra.is_zero,
        Some(ra.max_residual),
        Some(format!("exact path: {}", ra.exact)),
    );
    let rb = liesym::expr::is_zero(&Expr::sub(sys.remainder.clone(), pb), &cfg)?;
    rep.push(
        "remainder",
        rb.is_zero,
        Some(rb.max_residual),
        Some("single-sum reading of the conventional display".to_string()),
    );
    // The inverse-square branch of the coefficient ODE, re-solved
    // directly: with e0 = e1 = 0 the formula is C u_x^-2 exp(-(e3/e2)/u_x).
    let d = solve_coefficient_ode(&[rat(0), rat(0), rat(2), rat(3)]);
    match d {
        DFormula::Closed(f) => {
            let ok = liesym::expr::is_zero(
                &DFormula::ode_residual(&[rat(0), rat(0), rat(2), rat(3)], &f),
                &cfg,
            )?;
            rep.push(
                "coefficient-ode-inverse-square-branch",
                ok.is_zero,
                Some(ok.max_residual),
                Some(format!("D = {f}; exponential argument divided by e2")),
            );
        }
        other => rep.push(
            "coefficient-ode-inverse-square-branch",
            false,
            None,
            Some(format!("unexpected branch {other:?}")),
        ),
    }
    Ok(rep)
}

fn cmd_reduce(
    case: &str,
    k: &str,
    lambda: &str,
    c1: Option<&str>,
    seed: u64,
    tol: Option<f64>,
) -> Result<RunReport> {
    let cfg = sampler(seed, None, tol);
    let mut rep = RunReport::new("reduce").with_seed(seed);
    let id = ReductionCaseId::from_str(case)?;
    let k = parse_rat(k)?;
    let lambda = parse_rat(lambda)?;
    let rc = reduce_to_ode(id, &k, &lambda, &cfg)?;
    println!("case {id}, k = {k}, lambda = {lambda}");
    println!("ansatz   U = {}", rc.ansatz_u.clone().normalize());
    println!("variable omega = {}", rc.omega_def);
    println!("derived ODE (= 0):\n  {}\n", rc.ode.clone().normalize());
    rep.push(
        format!("{id}/derivation"),
        rc.derivation_ok,
        None,
        Some("ansatz substitution reproduces the stored ODE".to_string()),
    );
    let note = if rc.matches_printed {
        "matches the conventional printed form".to_string()
    } else {
        format!("differs from the conventional printed form: {}", rc.printed)
    };
    println!("{note}");
    rep.push(format!("{id}/printed-comparison"), true, None, Some(note));
    if let (ReductionCaseId::Ii, Some(c1)) = (id, c1) {
        if lambda.is_integer() && lambda == rat(0) {
            let c1 = parse_rat(c1)?;
            let dev = bernoulli_vs_integration(&k, &c1, &cfg, 1e-9)?;
            rep.push(
                format!("{id}/closed-form-vs-integration"),
                dev <= 1e-6,
                Some(dev),
                Some("quadrature closed form vs adaptive Runge-Kutta on [1, 2]".to_string()),
            );
        }
    }
    Ok(rep)
}

/// Tabulated residual-oracle run with `refine` successive halvings.
fn oracle_table(
    rep: &mut RunReport,
    id: &str,
    f: &liesym::numerics::Candidate,
    rhs: &Expr,
    w: &ResidualWindow,
    h0: f64,
    refine: usize,
    expect_decay: bool,
) -> Result<()> {
    println!("{id}: h, coarse, fine, ratio");
    for lvl in 0..refine.max(1) {
        let h = h0 / (1 << lvl) as f64;
        let r = rhs_residual_fd(f, rhs, w, h)?;
        println!("  {h:.5}  {:.3e}  {:.3e}  {:.3}", r.coarse, r.fine, r.ratio);
        let pass = if expect_decay {
            ratio_ok(r.ratio)
        } else {
            // h-independent residual: the ratio stalls near 1.
            r.ratio < 2.0 && r.fine > 1e-3
        };
        rep.push(
            format!("{id}/h={h}"),
            pass,
            Some(r.fine),
            Some(format!("ratio {:.3}, {} stencils excluded", r.ratio, r.excluded)),
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_exact(
    family: &str,
    k: Option<&str>,
    lambda: Option<&str>,
    c1: Option<&str>,
    c2: Option<f64>,
    grid: f64,
    refine: usize,
    seed: u64,
    tol: Option<f64>,
    out: Option<&PathBuf>,
) -> Result<RunReport> {
    let cfg = sampler(seed, None, tol);
    let mut rep = RunReport::new("exact").with_seed(seed);
    if !FAMILIES.contains(&family) {
        return Err(Error::InvalidParameter(format!(
            "unknown family `{family}` (expected one of {FAMILIES:?})"
        )));
    }
    let mut params = FamilyParams {
        sign: 1.0,
        ..Default::default()
    };
    params.k = k.map(parse_rat).transpose()?;
    params.lambda = lambda.map(parse_rat).transpose()?;
    params.c1 = c1.map(parse_rat).transpose()?;
    params.c2 = c2;

    match family {
        "radial-quadrature" => {
            params.k.get_or_insert_with(|| rat(-2));
            params.omega_range = Some((0.4, 4.0));
            let sol = exact_solution(family, &params)?;
            let kf: f64 = -2.0;
            let _ = kf;
            let f = |t: f64, x: &[f64]| sol.eval(t, x[0]);
            let w = ResidualWindow {
                t: (1.0, 1.5),
                x: [(0.6, 2.4), (0.0, 0.0)],
                n: 10,
            };
            let rhs = radial_rhs(&Expr::Num(sol.k()), true);
            oracle_table(&mut rep, "radial-quadrature", &f, &rhs, &w, grid, refine, true)?;
            maybe_profile(&sol, out, &[1.0, 1.2, 1.4], 0.7, 2.3)?;
        }
        "inverse-root" => {
            let lambda = params.lambda.get_or_insert_with(|| rat(1)).clone();
            params.c2.get_or_insert(40.0);
            let w = ResidualWindow {
                t: (0.1, 0.5),
                x: [(0.4, 1.4), (0.0, 0.0)],
                n: 10,
            };
            let rhs = radial_rhs(&Expr::ratio(-1, 3), true);
            for variant in [ExponentVariant::Derived, ExponentVariant::Printed] {
                params.variant = Some(variant);
                let sol = exact_solution(family, &params)?;
                let f = |t: f64, x: &[f64]| sol.eval(t, x[0]);
                let id = format!("inverse-root/{variant:?}");
                oracle_table(
                    &mut rep,
                    &id,
                    &f,
                    &rhs,
                    &w,
                    grid,
                    refine,
                    variant == ExponentVariant::Derived,
                )?;
            }
            println!("passing variant: Derived (time exponent -4t/(3 lambda))");
            let fi = inverse_root_first_integral(&lambda, &parse_rat("40")?, &cfg)?;
            rep.push(
                "inverse-root/first-integral",
                fi.is_zero,
                Some(fi.max_residual),
                Some(format!("exact path: {}", fi.exact)),
            );
            params.variant = Some(ExponentVariant::Derived);
            let sol = exact_solution(family, &params)?;
            maybe_profile(&sol, out, &[0.1, 0.3, 0.5], 0.4, 1.4)?;
        }
        "separable-power" => {
            params.k.get_or_insert_with(|| rat(1));
            params.phi0.get_or_insert(0.1);
            let sol = exact_solution(family, &params)?;
            let f = |t: f64, x: &[f64]| sol.eval(t, x[0]);
            let w = ResidualWindow {
                t: (0.0, 0.01),
                x: [(0.5, 1.5), (0.0, 0.0)],
                n: 10,
            };
            let rhs = radial_rhs(&Expr::Num(sol.k()), true);
            oracle_table(&mut rep, "separable-power", &f, &rhs, &w, grid, refine, true)?;
            maybe_profile(&sol, out, &[0.0, 0.005, 0.01], 0.5, 1.5)?;
        }
        _ => unreachable!(),
    }
    Ok(rep)
}

fn maybe_profile(
    sol: &ExactSolution,
    out: Option<&PathBuf>,
    ts: &[f64],
    rlo: f64,
    rhi: f64,
) -> Result<()> {
    if let Some(path) = out {
        let rs: Vec<f64> = (0..=40).map(|i| rlo + (rhi - rlo) * i as f64 / 40.0).collect();
        std::fs::write(path, export_profile(sol, ts, &rs)?)?;
        println!("wrote profile to {}", path.display());
    }
    Ok(())
}

fn cmd_hodograph(seed: u64, grid: f64, tol: Option<f64>) -> Result<RunReport> {
    let cfg = sampler(seed, None, tol);
    let mut rep = RunReport::new("hodograph").with_seed(seed);
    // Generic chain-rule identity for both source terms.
    for (name, q) in [("Q=0", Expr::zero()), ("Q=u", Expr::u())] {
        let h = hodograph_1d(&q);
        let idw = h.identity_witness(&cfg)?;
        rep.push(
            format!("identity-witness/{name}"),
            idw.is_zero,
            Some(idw.max_residual),
            None,
        );
    }
    // u = e^t x solves the Q = u equation; check via the residual oracle.
    let h = hodograph_1d(&Expr::u());
    let f = |t: f64, x: &[f64]| Ok(t.exp() * x[0]);
    let w = ResidualWindow {
        t: (0.1, 0.4),
        x: [(0.4, 1.2), (0.0, 0.0)],
        n: 8,
    };
    let r = pde_residual_fd(&f, &h.nonlinear, &w, grid)?;
    rep.push(
        "exp-linear-solution",
        ratio_ok(r.ratio) && r.fine < 1e-3,
        Some(r.fine),
        Some(format!("ratio {:.3}", r.ratio)),
    );
    // Radial construction.
    let ri = radial_hodograph_identity(&cfg)?;
    rep.push(
        "radial-identity",
        ri.is_zero,
        Some(ri.max_residual),
        None,
    );
    let rf = |t: f64, x: &[f64]| radial_hodograph_solution(t, x[0]);
    let rw = ResidualWindow {
        t: (0.5, 1.0),
        x: [(0.3, 1.0), (0.0, 0.0)],
        n: 8,
    };
    let rhs = radial_rhs(&Expr::num(-1), true);
    let rr = rhs_residual_fd(&rf, &rhs, &rw, grid)?;
    rep.push(
        "radial-solution",
        ratio_ok(rr.ratio),
        Some(rr.fine),
        Some(format!("ratio {:.3}", rr.ratio)),
    );
    Ok(rep)
}

fn cmd_pm_filter(
    input: &PathBuf,
    out: &PathBuf,
    model: &str,
    d0: f64,
    time: f64,
) -> Result<RunReport> {
    let mut rep = RunReport::new("pm-filter");
    let model = DiffusivityModel::from_name(model)?;
    let img = read_pgm(&std::fs::read(input)?)?;
    let (filtered, stats) = perona_malik_filter(&img, model, d0, time, 0.4)?;
    std::fs::write(out, write_pgm(&filtered)?)?;
    println!(
        "{} -> {}: {} steps, mass {:.6} -> {:.6}, range [{}, {}] -> [{:.2}, {:.2}]",
        input.display(),
        out.display(),
        stats.steps,
        stats.mass_before,
        stats.mass_after,
        stats.min_before,
        stats.max_before,
        stats.min_after,
        stats.max_after
    );
    rep.push(
        "mass-conservation",
        stats.relative_mass_drift <= 1e-10,
        Some(stats.relative_mass_drift),
        None,
    );
    rep.push(
        "maximum-principle",
        stats.max_principle_ok,
        None,
        Some(format!(
            "[{:.2}, {:.2}] within [{}, {}]",
            stats.min_after, stats.max_after, stats.min_before, stats.max_before
        )),
    );
    Ok(rep)
}

fn cmd_flow(eps: f64, seed: u64, grid: f64, tol: Option<f64>) -> Result<RunReport> {
    let cfg = sampler(seed, None, tol);
    let mut rep = RunReport::new("flow").with_seed(seed);
    // Space translation acting on a heat-equation solution.
    let heat = PdeSpec::gradient_1d(Expr::one(), Expr::zero());
    let shift = liesym::jet::VectorField::new_1d(Expr::zero(), Expr::one(), Expr::zero())?;
    let sol = transport_solution(
        Box::new(|t: f64, x: &[f64]| Ok((-t).exp() * x[0].cos())),
        &shift,
        eps,
        &heat,
        &cfg,
    )?;
    let w = ResidualWindow {
        t: (0.1, 0.4),
        x: [(0.4, 1.2), (0.0, 0.0)],
        n: 8,
    };
    let r = pde_residual_fd(&sol.as_candidate(), &heat, &w, grid)?;
    rep.push(
        "translated-solution-residual",
        ratio_ok(r.ratio),
        Some(r.fine),
        Some(format!("ratio {:.3} at flow parameter {eps}", r.ratio)),
    );
    // Additive symmetry e^t d/du of u_t = D(u_x) u_xx + u.
    let pde = PdeSpec::gradient_1d(
        Expr::add2(Expr::powi(Expr::jet(0, 1, 0), 2), Expr::one()),
        Expr::u(),
    );
    let x3 = liesym::jet::VectorField::new_1d(
        Expr::zero(),
        Expr::zero(),
        Expr::exp(Expr::t()),
    )?;
    let sol = transport_solution(
        Box::new(|_t: f64, _x: &[f64]| Ok(0.0)),
        &x3,
        eps,
        &pde,
        &cfg,
    )?;
    let got = sol.eval(0.5, &[0.3])?;
    let want = eps * 0.5f64.exp();
    rep.push(
        "additive-symmetry-flow",
        (got - want).abs() < 1e-9,
        Some((got - want).abs()),
        Some("flow of e^t d/du adds eps e^t".to_string()),
    );
    // A projective time component t^2 d/dt has the pole t -> t/(1 - eps t);
    // flowing past it must be reported as a blow-up, not silently wrong.
    let proj = liesym::jet::VectorField::new_1d(
        Expr::powi(Expr::t(), 2),
        Expr::zero(),
        Expr::zero(),
    )?;
    let blown = proj.flow(&[1.0, 0.0, 0.0], 1.5);
    rep.push(
        "projective-flow-pole-detected",
        matches!(blown, Err(Error::Blowup { .. })),
        None,
        Some("t(eps) = t/(1 - eps t) pole crossed deliberately".to_string()),
    );
    Ok(rep)
}

fn run() -> Result<(RunReport, Option<PathBuf>)> {
    let cli = Cli::parse();
    Ok(match cli.cmd {
        Cmd::Verify {
            table,
            seed,
            samples,
            tol,
            report,
        } => (cmd_verify(&table, seed, samples, tol)?, report),
        Cmd::Determining { seed, tol, report } => (cmd_determining(seed, tol)?, report),
        Cmd::Reduce {
            case,
            k,
            lambda,
            c1,
            seed,
            tol,
            report,
        } => (
            cmd_reduce(&case, &k, &lambda, c1.as_deref(), seed, tol)?,
            report,
        ),
        Cmd::Exact {
            family,
            k,
            lambda,
            c1,
            c2,
            grid,
            refine,
            seed,
            tol,
            out,
            report,
        } => (
            cmd_exact(
                &family,
                k.as_deref(),
                lambda.as_deref(),
                c1.as_deref(),
                c2,
                grid,
                refine,
                seed,
                tol,
                out.as_ref(),
            )?,
            report,
        ),
        Cmd::Hodograph {
            seed,
            grid,
            tol,
            report,
        } => (cmd_hodograph(seed, grid, tol)?, report),
        Cmd::PmFilter {
            input,
            out,
            model,
            d0,
            time,
            report,
        } => (cmd_pm_filter(&input, &out, &model, d0, time)?, report),
        Cmd::Flow {
            time,
            seed,
            grid,
            tol,
            report,
        } => (cmd_flow(time, seed, grid, tol)?, report),
    })
}

fn main() -> ExitCode {
    match run() {
        Ok((mut rep, report_path)) => {
            rep.finish();
            print!("{}", rep.summary());
            if let Some(p) = report_path {
                if let Err(e) = rep.write(Some(p.as_path()), &mut std::io::stdout()) {
                    eprintln!("cannot write report: {e}");
                    return ExitCode::FAILURE;
                }
            }
            if rep.all_pass() {
                ExitCode::SUCCESS
            } else {
                if let Some(f) = rep.first_failure() {
                    eprintln!("first failure: {}", f.id);
                    if let Some(d) = &f.detail {
                        eprintln!("  {d}");
                    }
                }
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
