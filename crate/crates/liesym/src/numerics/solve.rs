//! Explicit finite-difference solvers: centered second-order space,
//! first-order forward time, with the step restriction recomputed from
//! the current maximum effective diffusivity.

use super::{Boundary, GridField};
use crate::expr::{eval_f64, rat_to_f64, Expr, FloatEnv, Symbol};
use crate::pde::{omega_slot, PdeForm, PdeSpec};
use crate::reduce::RadialPde;
use crate::{Error, Result};

/// Result of a forward solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub field: GridField,
    pub steps: usize,
    /// Whether the gradient clamp for negative-exponent diffusivities
    /// ever activated.
    pub clamp_activated: bool,
}

/// Floor applied to the squared-gradient argument of the diffusivity so
/// negative exponents stay finite.
const OMEGA_FLOOR: f64 = 1e-12;
const MAX_STEPS: usize = 20_000_000;

fn compile_1d(e: &Expr) -> impl Fn(f64) -> Result<f64> + '_ {
    move |ux: f64| {
        let mut env = FloatEnv::new();
        env.set(Symbol::jet(0, 1, 0), ux);
        eval_f64(e, &mut env)
    }
}

fn compile_u(e: &Expr) -> impl Fn(f64) -> Result<f64> + '_ {
    move |u: f64| {
        let mut env = FloatEnv::new();
        env.set(Symbol::u(), u);
        eval_f64(e, &mut env)
    }
}

fn compile_omega(e: &Expr) -> impl Fn(f64) -> Result<f64> + '_ {
    move |w: f64| {
        let mut env = FloatEnv::new();
        env.set(omega_slot(), w);
        eval_f64(e, &mut env)
    }
}

fn check_inputs(init: &GridField, dim: usize, t_end: f64, safety: f64) -> Result<()> {
    if init.dim != dim {
        return Err(Error::InvalidParameter(format!(
            "initial data must be {dim}-dimensional"
        )));
    }
    if t_end < init.t {
        return Err(Error::InvalidParameter(
            "solver runs forward in time".to_string(),
        ));
    }
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(Error::InvalidParameter(
            "safety factor must lie in (0, 1]".to_string(),
        ));
    }
    Ok(())
}

/// Forward solve of the one-dimensional class. The gradient-product form
/// uses the pointwise stencil `D(u_x) u_xx + Q(u)`; the divergence form
/// uses face fluxes `D(s) s` so zero-flux boundaries conserve mass.
pub fn solve_pde_1d(
    pde: &PdeSpec,
    init: &GridField,
    t_end: f64,
    safety: f64,
) -> Result<SolveReport> {
    check_inputs(init, 1, t_end, safety)?;
    let d = compile_1d(&pde.diffusivity);
    let q = compile_u(&pde.source);
    let n = init.shape[0];
    let h = init.h[0];
    let mut u = init.values.clone();
    let mut t = init.t;
    let mut steps = 0usize;
    let mut clamped = false;
    let dprime = pde.diffusivity.diff(&Symbol::jet(0, 1, 0));
    let dp = compile_1d(&dprime);

    while t < t_end {
        // Effective diffusivity bound for the step restriction.
        let mut dmax: f64 = 0.0;
        let mut grad = vec![0.0; n];
        for i in 1..n - 1 {
            grad[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
        }
        grad[0] = grad[1];
        grad[n - 1] = grad[n - 2];
        for i in 0..n {
            let mut g = grad[i];
            if g.abs() < OMEGA_FLOOR {
                g = OMEGA_FLOOR.copysign(if g == 0.0 { 1.0 } else { g });
                clamped = true;
            }
            let deff = match pde.form {
                PdeForm::GradientProduct => d(g)?,
                PdeForm::Divergence => d(g)? + g * dp(g)?,
            };
            if !deff.is_finite() {
                return Err(Error::StepCollapse("diffusivity is not finite".to_string()));
            }
            dmax = dmax.max(deff.abs());
        }
        let dt = (safety * h * h / dmax.max(1e-30)).min(t_end - t);
        if dt <= 0.0 || !dt.is_finite() || (t_end - init.t) / dt > MAX_STEPS as f64 {
            return Err(Error::StepCollapse(format!("admissible step {dt:.3e} cannot reach t_end within the step budget")));
        }
        let mut next = u.clone();
        match pde.form {
            PdeForm::GradientProduct => {
                for i in 1..n - 1 {
                    let mut g = (u[i + 1] - u[i - 1]) / (2.0 * h);
                    if g.abs() < OMEGA_FLOOR {
                        g = OMEGA_FLOOR.copysign(if g == 0.0 { 1.0 } else { g });
                        clamped = true;
                    }
                    let lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
                    next[i] = u[i] + dt * (d(g)? * lap + q(u[i])?);
                }
                match init.boundary {
                    Boundary::NeumannZeroFlux => {
                        // Mirror ghosts: u[-1] = u[1].
                        let g = OMEGA_FLOOR;
                        let lap0 = (2.0 * u[1] - 2.0 * u[0]) / (h * h);
                        let lapn = (2.0 * u[n - 2] - 2.0 * u[n - 1]) / (h * h);
                        next[0] = u[0] + dt * (d(g)? * lap0 + q(u[0])?);
                        next[n - 1] = u[n - 1] + dt * (d(g)? * lapn + q(u[n - 1])?);
                    }
                    Boundary::DirichletFixed => {}
                }
            }
            PdeForm::Divergence => {
                // Face fluxes F_{i+1/2} = D(s) s with s the face slope.
                let mut flux = vec![0.0; n - 1];
                for (i, f) in flux.iter_mut().enumerate() {
                    let mut s = (u[i + 1] - u[i]) / h;
                    if s.abs() < OMEGA_FLOOR {
                        s = OMEGA_FLOOR.copysign(if s == 0.0 { 1.0 } else { s });
                        clamped = true;
                    }
                    *f = d(s)? * s;
                }
                for i in 1..n - 1 {
                    next[i] = u[i] + dt * ((flux[i] - flux[i - 1]) / h + q(u[i])?);
                }
                match init.boundary {
                    Boundary::NeumannZeroFlux => {
                        // Half control volumes at the ends.
                        next[0] = u[0] + dt * (2.0 * flux[0] / h + q(u[0])?);
                        next[n - 1] = u[n - 1] + dt * (-2.0 * flux[n - 2] / h + q(u[n - 1])?);
                    }
                    Boundary::DirichletFixed => {}
                }
            }
        }
        u = next;
        t += dt;
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepCollapse("step budget exhausted".to_string()));
        }
    }
    Ok(SolveReport {
        field: GridField {
            t,
            values: u,
            ..init.clone()
        },
        steps,
        clamp_activated: clamped,
    })
}

/// Forward solve of the two-dimensional divergence class
/// `u_t = div(D(|grad u|^2) grad u) + Q(u)` in conservative face-flux
/// form.
pub fn solve_pde_2d(
    pde: &PdeSpec,
    init: &GridField,
    t_end: f64,
    safety: f64,
) -> Result<SolveReport> {
    check_inputs(init, 2, t_end, safety)?;
    let d = compile_omega(&pde.diffusivity);
    let q = compile_u(&pde.source);
    solve_flux_2d(&d, &q, init, t_end, safety)
}

/// Two-dimensional conservative solver over closures `D(omega)` (with
/// `omega` the squared gradient) and `Q(u)`.
pub fn solve_flux_2d(
    d: &dyn Fn(f64) -> Result<f64>,
    q: &dyn Fn(f64) -> Result<f64>,
    init: &GridField,
    t_end: f64,
    safety: f64,
) -> Result<SolveReport> {
    let (nx, ny) = (init.shape[0], init.shape[1]);
    let (hx, hy) = (init.h[0], init.h[1]);
    let mut u = init.values.clone();
    let mut t = init.t;
    let mut steps = 0usize;
    let mut clamped = false;
    let idx = |ix: usize, iy: usize| iy * nx + ix;

    while t < t_end {
        // x-faces between (ix, iy) and (ix+1, iy).
        let mut fx = vec![0.0; (nx - 1) * ny];
        let mut fy = vec![0.0; nx * (ny - 1)];
        let mut dmax: f64 = 0.0;
        for iy in 0..ny {
            for ix in 0..nx - 1 {
                let sx = (u[idx(ix + 1, iy)] - u[idx(ix, iy)]) / hx;
                // Tangential slope averaged over the four surrounding
                // differences (mirrored at the boundary).
                let up = |i: usize, j: usize| u[idx(i, j.min(ny - 1))];
                let dn = |i: usize, j: isize| u[idx(i, j.max(0) as usize)];
                let sy = ((up(ix, iy + 1) - dn(ix, iy as isize - 1))
                    + (up(ix + 1, iy + 1) - dn(ix + 1, iy as isize - 1)))
                    / (2.0 * 2.0 * hy);
                let mut w = sx * sx + sy * sy;
                if w < OMEGA_FLOOR {
                    w = OMEGA_FLOOR;
                    clamped = true;
                }
                let dv = d(w)?;
                if !dv.is_finite() {
                    return Err(Error::StepCollapse("diffusivity is not finite".to_string()));
                }
                dmax = dmax.max(dv.abs());
                fx[iy * (nx - 1) + ix] = dv * sx;
            }
        }
        for iy in 0..ny - 1 {
            for ix in 0..nx {
                let sy = (u[idx(ix, iy + 1)] - u[idx(ix, iy)]) / hy;
                let rt = |i: usize, j: usize| u[idx(i.min(nx - 1), j)];
                let lt = |i: isize, j: usize| u[idx(i.max(0) as usize, j)];
                let sx = ((rt(ix + 1, iy) - lt(ix as isize - 1, iy))
                    + (rt(ix + 1, iy + 1) - lt(ix as isize - 1, iy + 1)))
                    / (2.0 * 2.0 * hx);
                let mut w = sx * sx + sy * sy;
                if w < OMEGA_FLOOR {
                    w = OMEGA_FLOOR;
                    clamped = true;
                }
                let dv = d(w)?;
                if !dv.is_finite() {
                    return Err(Error::StepCollapse("diffusivity is not finite".to_string()));
                }
                dmax = dmax.max(dv.abs());
                fy[iy * nx + ix] = dv * sy;
            }
        }
        let hmin = hx.min(hy);
        let dt = (safety * hmin * hmin / (4.0 * dmax.max(1e-30))).min(t_end - t);
        if dt <= 0.0 || !dt.is_finite() || (t_end - init.t) / dt > MAX_STEPS as f64 {
            return Err(Error::StepCollapse(format!("admissible step {dt:.3e} cannot reach t_end within the step budget")));
        }
        let mut next = u.clone();
        for iy in 0..ny {
            for ix in 0..nx {
                if init.boundary == Boundary::DirichletFixed
                    && (ix == 0 || iy == 0 || ix == nx - 1 || iy == ny - 1)
                {
                    continue;
                }
                // Zero-flux: missing boundary faces contribute nothing,
                // and boundary nodes own half control volumes.
                let fe = if ix < nx - 1 { fx[iy * (nx - 1) + ix] } else { 0.0 };
                let fw = if ix > 0 { fx[iy * (nx - 1) + ix - 1] } else { 0.0 };
                let fn_ = if iy < ny - 1 { fy[iy * nx + ix] } else { 0.0 };
                let fs = if iy > 0 { fy[(iy - 1) * nx + ix] } else { 0.0 };
                let cx = if ix == 0 || ix == nx - 1 { 0.5 * hx } else { hx };
                let cy = if iy == 0 || iy == ny - 1 { 0.5 * hy } else { hy };
                let div = (fe - fw) / cx + (fn_ - fs) / cy;
                next[idx(ix, iy)] = u[idx(ix, iy)] + dt * (div + q(u[idx(ix, iy)])?);
            }
        }
        u = next;
        t += dt;
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepCollapse("step budget exhausted".to_string()));
        }
    }
    Ok(SolveReport {
        field: GridField {
            t,
            values: u,
            ..init.clone()
        },
        steps,
        clamp_activated: clamped,
    })
}

/// Forward solve of a general one-dimensional evolution
/// `u_t = rhs(t, x, u, u_x, u_xx)` given by an expression; used for the
/// radially reduced equation, whose right side depends on the radius.
/// Boundaries are held fixed (Dirichlet) unless the field says Neumann.
pub fn solve_evolution_1d(
    rhs: &Expr,
    init: &GridField,
    t_end: f64,
    safety: f64,
    dmax_hint: f64,
) -> Result<SolveReport> {
    check_inputs(init, 1, t_end, safety)?;
    let n = init.shape[0];
    let h = init.h[0];
    let mut u = init.values.clone();
    let mut t = init.t;
    let mut steps = 0usize;
    let eval = |t: f64, x: f64, u0: f64, ux: f64, uxx: f64| -> Result<f64> {
        let mut env = FloatEnv::new();
        env.set(Symbol::Time, t);
        env.set(Symbol::Space(0), x);
        env.set(Symbol::u(), u0);
        env.set(Symbol::jet(0, 1, 0), ux);
        env.set(Symbol::jet(0, 2, 0), uxx);
        eval_f64(rhs, &mut env)
    };
    while t < t_end {
        let dt = (safety * h * h / dmax_hint.max(1e-30)).min(t_end - t);
        let mut next = u.clone();
        for i in 1..n - 1 {
            let ux = (u[i + 1] - u[i - 1]) / (2.0 * h);
            let uxx = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
            next[i] = u[i] + dt * eval(t, init.x(0, i), u[i], ux, uxx)?;
        }
        if init.boundary == Boundary::NeumannZeroFlux {
            let uxx0 = (2.0 * u[1] - 2.0 * u[0]) / (h * h);
            let uxxn = (2.0 * u[n - 2] - 2.0 * u[n - 1]) / (h * h);
            next[0] = u[0] + dt * eval(t, init.x(0, 0), u[0], 0.0, uxx0)?;
            next[n - 1] = u[n - 1] + dt * eval(t, init.x(0, n - 1), u[n - 1], 0.0, uxxn)?;
        }
        u = next;
        t += dt;
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepCollapse("step budget exhausted".to_string()));
        }
    }
    Ok(SolveReport {
        field: GridField {
            t,
            values: u,
            ..init.clone()
        },
        steps,
        clamp_activated: false,
    })
}

/// Conservative solve of the radially reduced equation
/// `U_t = (1/r)(r U_r^(2k+1))_r` in flux form. The `r = 0` axis uses the
/// symmetric ghost-point convention (zero slope, so the axis update
/// integrates the flux over the first half cell); fixtures should keep
/// `r >= r0 > 0` where accuracy matters.
pub fn solve_radial(
    radial: &RadialPde,
    init: &GridField,
    t_end: f64,
    safety: f64,
) -> Result<SolveReport> {
    check_inputs(init, 1, t_end, safety)?;
    let k = rat_to_f64(&radial.k);
    let e = 2.0 * k + 1.0;
    let n = init.shape[0];
    let h = init.h[0];
    let r0 = init.origin[0];
    let mut u = init.values.clone();
    let mut t = init.t;
    let mut steps = 0usize;
    let mut clamped = false;
    // Odd extension |s|^2k s of the flux, which agrees with both slope
    // branches of the one-dimensional form where they apply.
    let flux_of = |s: f64, clamped: &mut bool| -> Result<f64> {
        let mut a = s.abs();
        if a < OMEGA_FLOOR {
            a = OMEGA_FLOOR;
            *clamped = true;
        }
        Ok(s.signum() * a.powf(e))
    };
    while t < t_end {
        let mut dmax: f64 = 0.0;
        let mut flux = vec![0.0; n - 1];
        for (i, f) in flux.iter_mut().enumerate() {
            let s = (u[i + 1] - u[i]) / h;
            *f = flux_of(s, &mut clamped)?;
            let deff = e * (s.abs().max(OMEGA_FLOOR)).powf(e - 1.0);
            if !deff.is_finite() {
                return Err(Error::StepCollapse("effective diffusivity is not finite".to_string()));
            }
            dmax = dmax.max(deff);
        }
        let dt = (safety * h * h / dmax.max(1e-30)).min(t_end - t);
        if dt <= 0.0 || (t_end - init.t) / dt > MAX_STEPS as f64 {
            return Err(Error::StepCollapse(format!("admissible step {dt:.3e} cannot reach t_end within the step budget")));
        }
        let mut next = u.clone();
        for i in 1..n - 1 {
            let r = r0 + i as f64 * h;
            let rp = r + 0.5 * h;
            let rm = r - 0.5 * h;
            next[i] = u[i] + dt * (rp * flux[i] - rm * flux[i - 1]) / (r * h);
        }
        if init.boundary == Boundary::NeumannZeroFlux {
            if r0 == 0.0 {
                // Axis control volume [0, h/2]: d/dt (u0 h^2/8) = (h/2) F.
                next[0] = u[0] + dt * 4.0 * flux[0] / h;
            } else {
                // Half cell [r0, r0 + h/2].
                next[0] =
                    u[0] + dt * (r0 + 0.5 * h) * flux[0] / ((r0 + 0.25 * h) * 0.5 * h);
            }
            let rn = r0 + (n - 1) as f64 * h;
            next[n - 1] =
                u[n - 1] - dt * (rn - 0.5 * h) * flux[n - 2] / ((rn - 0.25 * h) * 0.5 * h);
        }
        u = next;
        t += dt;
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepCollapse("step budget exhausted".to_string()));
        }
    }
    Ok(SolveReport {
        field: GridField {
            t,
            values: u,
            ..init.clone()
        },
        steps,
        clamp_activated: clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{rat, Expr};
    use crate::reduce::radial_reduce;

    fn heat_1d() -> PdeSpec {
        PdeSpec::gradient_1d(Expr::one(), Expr::zero())
    }

    #[test]
    fn heat_oracle_refinement_ratio() {
        // u = e^-t cos x on [0, pi] with zero flux.
        let run = |n: usize| -> f64 {
            let h = std::f64::consts::PI / (n - 1) as f64;
            let init = GridField::from_fn_1d(0.0, h, n, 0.0, Boundary::NeumannZeroFlux, |x| x.cos())
                .unwrap();
            let out = solve_pde_1d(&heat_1d(), &init, 0.25, 0.4).unwrap();
            let mut err: f64 = 0.0;
            for i in 0..n {
                let exact = (-0.25f64).exp() * out.field.x(0, i).cos();
                err = err.max((out.field.values[i] - exact).abs());
            }
            err
        };
        let coarse = run(33);
        let fine = run(65);
        let ratio = coarse / fine;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn heat_oracle_2d() {
        let run = |n: usize| -> f64 {
            let h = std::f64::consts::PI / (n - 1) as f64;
            let init = GridField::from_fn_2d(
                [0.0, 0.0],
                [h, h],
                [n, n],
                0.0,
                Boundary::NeumannZeroFlux,
                |x, y| x.cos() * y.cos(),
            )
            .unwrap();
            let pde = PdeSpec::divergence_2d(Expr::one(), Expr::zero());
            let out = solve_pde_2d(&pde, &init, 0.1, 0.4).unwrap();
            let mut err: f64 = 0.0;
            for iy in 0..n {
                for ix in 0..n {
                    let exact =
                        (-0.2f64).exp() * out.field.x(0, ix).cos() * out.field.x(1, iy).cos();
                    err = err.max((out.field.at(ix, iy) - exact).abs());
                }
            }
            err
        };
        let coarse = run(17);
        let fine = run(33);
        let ratio = coarse / fine;
        assert!((3.3..=4.7).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn constant_data_is_a_fixed_point() {
        let init =
            GridField::from_fn_2d([0.0, 0.0], [0.1, 0.1], [9, 9], 0.0, Boundary::NeumannZeroFlux, |_, _| {
                3.25
            })
            .unwrap();
        let pde = PdeSpec::divergence_2d(
            Expr::pow(Expr::sym(omega_slot()), Expr::num(2)),
            Expr::zero(),
        );
        let out = solve_pde_2d(&pde, &init, 0.3, 0.4).unwrap();
        for v in &out.field.values {
            assert!((v - 3.25).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_conserved_under_zero_flux() {
        let init = GridField::from_fn_2d(
            [-1.0, -1.0],
            [0.1, 0.1],
            [21, 21],
            0.0,
            Boundary::NeumannZeroFlux,
            |x, y| (-(x * x + y * y) * 3.0).exp(),
        )
        .unwrap();
        let pde = PdeSpec::divergence_2d(Expr::sym(omega_slot()), Expr::zero());
        let out = solve_pde_2d(&pde, &init, 0.05, 0.4).unwrap();
        let m0 = init.mass();
        assert!((out.field.mass() - m0).abs() <= 1e-10 * m0.abs());
        // Maximum principle.
        let (lo0, hi0) = init.min_max();
        let (lo, hi) = out.field.min_max();
        assert!(lo >= lo0 - 1e-12 && hi <= hi0 + 1e-12);
    }

    #[test]
    fn radial_solver_matches_2d_solver() {
        // Radially symmetric hump, D = omega (k = 1), zero source.
        let k = rat(1);
        let prof = |r: f64| (-r * r).exp();
        let n2 = 61;
        let init2 = GridField::from_fn_2d(
            [-3.0, -3.0],
            [6.0 / (n2 - 1) as f64, 6.0 / (n2 - 1) as f64],
            [n2, n2],
            0.0,
            Boundary::NeumannZeroFlux,
            |x, y| prof((x * x + y * y).sqrt()),
        )
        .unwrap();
        let pde = PdeSpec::divergence_2d(Expr::sym(omega_slot()), Expr::zero());
        let t_end = 0.05;
        let out2 = solve_pde_2d(&pde, &init2, t_end, 0.4).unwrap();

        let radial = radial_reduce(&k).unwrap();
        let n1 = 241;
        let h1 = 4.0 / (n1 - 1) as f64;
        let init1 =
            GridField::from_fn_1d(0.0, h1, n1, 0.0, Boundary::NeumannZeroFlux, prof).unwrap();
        let out1 = solve_radial(&radial, &init1, t_end, 0.4).unwrap();

        // Compare on the inner region away from the square boundary.
        let mut worst: f64 = 0.0;
        for iy in 0..n2 {
            for ix in 0..n2 {
                let x = out2.field.x(0, ix);
                let y = out2.field.x(1, iy);
                let r = (x * x + y * y).sqrt();
                if r > 2.0 {
                    continue;
                }
                let s = r / h1;
                let i = (s.floor() as usize).min(n1 - 2);
                let a = s - i as f64;
                let want = out1.field.values[i] * (1.0 - a) + out1.field.values[i + 1] * a;
                worst = worst.max((out2.field.at(ix, iy) - want).abs());
            }
        }
        assert!(worst < 5e-3, "max radial mismatch {worst}");
    }

    #[test]
    fn evolution_solver_handles_explicit_x() {
        // u_t = u_xx + 0*x on a Dirichlet strip reproduces plain heat.
        let rhs = crate::expr::parse("u_xx").unwrap();
        let n = 41;
        let h = std::f64::consts::PI / (n - 1) as f64;
        let init = GridField::from_fn_1d(0.0, h, n, 0.0, Boundary::DirichletFixed, |x| x.sin())
            .unwrap();
        let out = solve_evolution_1d(&rhs, &init, 0.1, 0.4, 1.0).unwrap();
        for i in 0..n {
            let exact = (-0.1f64).exp() * out.field.x(0, i).sin();
            // Dirichlet ends are pinned at sin(0) = sin(pi) = 0 anyway.
            assert!((out.field.values[i] - exact).abs() < 2e-3);
        }
    }

    #[test]
    fn step_collapse_reported() {
        // Negative-exponent diffusivity on flat data: the clamp makes
        // D = u_x^-2 about 1e24, collapsing the admissible step.
        let pde = PdeSpec::gradient_1d(Expr::powi(Expr::jet(0, 1, 0), -2), Expr::zero());
        let init =
            GridField::from_fn_1d(0.0, 0.1, 31, 0.0, Boundary::DirichletFixed, |_| 1.0).unwrap();
        assert!(matches!(
            solve_pde_1d(&pde, &init, 0.5, 0.4),
            Err(Error::StepCollapse(_))
        ));
    }
}
