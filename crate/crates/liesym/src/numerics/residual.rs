//! Finite-difference residual oracle for candidate exact solutions, and
//! group-flow transport of solutions.

use super::GridField;
use crate::expr::{eval_f64, Expr, FloatEnv, SamplerConfig, Symbol};
use crate::jet::VectorField;
use crate::pde::{check_invariance, PdeSpec};
use crate::{Error, Result};
use serde::Serialize;

/// A candidate solution evaluated pointwise; errors mark domain
/// violations and exclude the stencil from the statistic.
pub type Candidate<'a> = dyn Fn(f64, &[f64]) -> Result<f64> + 'a;

/// Sampling window of the residual oracle.
#[derive(Clone, Copy, Debug)]
pub struct ResidualWindow {
    pub t: (f64, f64),
    /// Per-axis spatial ranges (second entry unused in one dimension).
    pub x: [(f64, f64); 2],
    /// Interior sample count per axis.
    pub n: usize,
}

/// Max interior residual at two grid spacings.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub h: f64,
    pub coarse: f64,
    pub fine: f64,
    /// `coarse / fine`; approaches 4 for a true solution.
    pub ratio: f64,
    /// Points dropped because the candidate left its domain.
    pub excluded: usize,
}

fn fd_jets(
    f: &Candidate,
    dim: usize,
    t: f64,
    x: &[f64],
    h: f64,
) -> Result<Vec<(Symbol, f64)>> {
    let at = |dt: f64, dx: [f64; 2]| -> Result<f64> {
        let p: Vec<f64> = (0..dim).map(|a| x[a] + dx[a]).collect();
        f(t + dt, &p)
    };
    let c = at(0.0, [0.0, 0.0])?;
    let mut out = vec![(Symbol::u(), c)];
    out.push((
        Symbol::jet(1, 0, 0),
        (at(h, [0.0, 0.0])? - at(-h, [0.0, 0.0])?) / (2.0 * h),
    ));
    let xp = at(0.0, [h, 0.0])?;
    let xm = at(0.0, [-h, 0.0])?;
    out.push((Symbol::jet(0, 1, 0), (xp - xm) / (2.0 * h)));
    out.push((Symbol::jet(0, 2, 0), (xp - 2.0 * c + xm) / (h * h)));
    if dim == 2 {
        let yp = at(0.0, [0.0, h])?;
        let ym = at(0.0, [0.0, -h])?;
        out.push((Symbol::jet(0, 0, 1), (yp - ym) / (2.0 * h)));
        out.push((Symbol::jet(0, 0, 2), (yp - 2.0 * c + ym) / (h * h)));
        let pp = at(0.0, [h, h])?;
        let pm = at(0.0, [h, -h])?;
        let mp = at(0.0, [-h, h])?;
        let mm = at(0.0, [-h, -h])?;
        out.push((Symbol::jet(0, 1, 1), (pp - pm - mp + mm) / (4.0 * h * h)));
    }
    Ok(out)
}

fn max_residual(
    f: &Candidate,
    pde: &PdeSpec,
    w: &ResidualWindow,
    h: f64,
    excluded: &mut usize,
) -> Result<f64> {
    let dim = pde.space.dim as usize;
    let residual = pde.residual();
    let n = w.n.max(2);
    let mut worst: f64 = 0.0;
    let mut any = false;
    let lin = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
    let ny = if dim == 2 { n } else { 1 };
    for it in 0..n {
        let t = lin(w.t.0, w.t.1, it);
        for iy in 0..ny {
            for ix in 0..n {
                let mut x = vec![lin(w.x[0].0, w.x[0].1, ix)];
                if dim == 2 {
                    x.push(lin(w.x[1].0, w.x[1].1, iy));
                }
                match fd_jets(f, dim, t, &x, h) {
                    Ok(jets) => {
                        let mut env = FloatEnv::new();
                        env.set(Symbol::Time, t);
                        for a in 0..dim {
                            env.set(Symbol::Space(a as u8), x[a]);
                        }
                        for (s, v) in jets {
                            env.set(s, v);
                        }
                        worst = worst.max(eval_f64(&residual, &mut env)?.abs());
                        any = true;
                    }
                    Err(_) => *excluded += 1,
                }
            }
        }
    }
    if !any {
        return Err(Error::Domain(
            "candidate left its domain at every sample point".to_string(),
        ));
    }
    Ok(worst)
}

/// Evaluate the centered-difference residual of a candidate at spacings
/// `h` and `h/2`; interior points only, domain-violating stencils
/// excluded and counted.
pub fn pde_residual_fd(
    f: &Candidate,
    pde: &PdeSpec,
    w: &ResidualWindow,
    h: f64,
) -> Result<ResidualReport> {
    let mut excluded = 0;
    let coarse = max_residual(f, pde, w, h, &mut excluded)?;
    let fine = max_residual(f, pde, w, h / 2.0, &mut excluded)?;
    Ok(ResidualReport {
        h,
        coarse,
        fine,
        ratio: if fine > 0.0 { coarse / fine } else { f64::INFINITY },
        excluded,
    })
}

/// Same oracle against an arbitrary right side `u_t = rhs(t, x, jets)`
/// (used for the radially reduced equation).
pub fn rhs_residual_fd(
    f: &Candidate,
    rhs: &Expr,
    w: &ResidualWindow,
    h: f64,
) -> Result<ResidualReport> {
    let mut excluded = 0;
    let mut run = |h: f64| -> Result<f64> {
        let n = w.n.max(2);
        let mut worst: f64 = 0.0;
        let lin = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
        let mut any = false;
        for it in 0..n {
            let t = lin(w.t.0, w.t.1, it);
            for ix in 0..n {
                let x = [lin(w.x[0].0, w.x[0].1, ix)];
                match fd_jets(f, 1, t, &x, h) {
                    Ok(jets) => {
                        let mut env = FloatEnv::new();
                        env.set(Symbol::Time, t);
                        env.set(Symbol::Space(0), x[0]);
                        let mut ut = 0.0;
                        for (s, v) in jets {
                            if s == Symbol::jet(1, 0, 0) {
                                ut = v;
                            } else {
                                env.set(s, v);
                            }
                        }
                        worst = worst.max((ut - eval_f64(rhs, &mut env)?).abs());
                        any = true;
                    }
                    Err(_) => excluded += 1,
                }
            }
        }
        if !any {
            return Err(Error::Domain(
                "candidate left its domain at every sample point".to_string(),
            ));
        }
        Ok(worst)
    };
    let coarse = run(h)?;
    let fine = run(h / 2.0)?;
    Ok(ResidualReport {
        h,
        coarse,
        fine,
        ratio: if fine > 0.0 { coarse / fine } else { f64::INFINITY },
        excluded,
    })
}

/// Transport a solution along an admitted symmetry: the transported
/// field at `p` is found by flowing `p` backward, sampling the original
/// solution there, and flowing the full `(t, x, u)` state forward. The
/// field is checked to be admitted first, and its space components must
/// not depend on `u` (so base points flow autonomously).
pub struct TransportedSolution<'a> {
    field: VectorField,
    eps: f64,
    inner: Box<Candidate<'a>>,
}

pub fn transport_solution<'a>(
    u0: Box<Candidate<'a>>,
    field: &VectorField,
    eps: f64,
    pde: &PdeSpec,
    cfg: &SamplerConfig,
) -> Result<TransportedSolution<'a>> {
    let r = check_invariance(pde, field, cfg)?;
    if !r.is_zero {
        return Err(Error::InvalidParameter(
            "the field is not an admitted symmetry of this equation".to_string(),
        ));
    }
    let u = Symbol::u();
    if field.xi_t.contains(&u) || field.xi_x.iter().any(|xi| xi.contains(&u)) {
        return Err(Error::InvalidParameter(
            "transport needs base components independent of u".to_string(),
        ));
    }
    Ok(TransportedSolution {
        field: field.clone(),
        eps,
        inner: u0,
    })
}

impl TransportedSolution<'_> {
    pub fn eval(&self, t: f64, x: &[f64]) -> Result<f64> {
        let dim = self.field.space.dim as usize;
        if x.len() != dim {
            return Err(Error::InvalidParameter("point dimension mismatch".to_string()));
        }
        let mut state = Vec::with_capacity(dim + 2);
        state.push(t);
        state.extend_from_slice(x);
        state.push(0.0); // dummy; base components ignore u
        let back = self.field.flow(&state, -self.eps)?;
        let u0 = (self.inner)(back[0], &back[1..=dim])?;
        let mut fwd_state = back;
        fwd_state[dim + 1] = u0;
        let fwd = self.field.flow(&fwd_state, self.eps)?;
        Ok(fwd[dim + 1])
    }

    pub fn as_candidate(&self) -> impl Fn(f64, &[f64]) -> Result<f64> + '_ {
        move |t, x| self.eval(t, x)
    }
}

/// Convenience: wrap a grid field with bilinear interpolation so solver
/// output can feed the residual oracle or be transported.
pub fn grid_candidate(g: &GridField) -> impl Fn(&[f64]) -> Result<f64> + '_ {
    move |x: &[f64]| {
        let locate = |axis: usize, v: f64| -> Result<(usize, f64)> {
            let s = (v - g.origin[axis]) / g.h[axis];
            if s < 0.0 || s > (g.shape[axis] - 1) as f64 {
                return Err(Error::Domain(format!("point outside the grid on axis {axis}")));
            }
            let i = (s.floor() as usize).min(g.shape[axis] - 2);
            Ok((i, s - i as f64))
        };
        if g.dim == 1 {
            let (i, a) = locate(0, x[0])?;
            Ok(g.values[i] * (1.0 - a) + g.values[i + 1] * a)
        } else {
            let (i, a) = locate(0, x[0])?;
            let (j, b) = locate(1, x[1])?;
            Ok(g.at(i, j) * (1.0 - a) * (1.0 - b)
                + g.at(i + 1, j) * a * (1.0 - b)
                + g.at(i, j + 1) * (1.0 - a) * b
                + g.at(i + 1, j + 1) * a * b)
        }
    }
}
