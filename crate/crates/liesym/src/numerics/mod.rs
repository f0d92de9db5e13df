//! Finite-difference and ODE oracles: explicit solvers for the 1-D and
//! 2-D equation classes, residual evaluation of candidate exact
//! solutions, group-flow transport of solutions, and the gradient-driven
//! image filter.

mod filter;
mod ode;
mod pgm;
mod residual;
mod solve;

pub use filter::{
    midline_edge_gradient, perona_malik_filter, step_edge_image, DiffusivityModel, FilterReport,
};
pub use ode::{integrate_ode, Trajectory};
pub use pgm::{read_pgm, write_pgm};
pub use residual::{
    grid_candidate, pde_residual_fd, rhs_residual_fd, transport_solution, Candidate,
    ResidualReport, ResidualWindow, TransportedSolution,
};
pub use solve::{
    solve_evolution_1d, solve_flux_2d, solve_pde_1d, solve_pde_2d, solve_radial, SolveReport,
};

use crate::{Error, Result};

/// Boundary handling of a grid solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Zero normal flux (mirror ghost points).
    NeumannZeroFlux,
    /// Boundary values held at their initial data.
    DirichletFixed,
}

/// Uniformly spaced field values at one time level.
#[derive(Clone, Debug)]
pub struct GridField {
    pub dim: usize,
    /// Spacing per axis (second entry unused in one dimension).
    pub h: [f64; 2],
    /// Coordinate of the first node per axis.
    pub origin: [f64; 2],
    /// Node counts per axis (second entry 1 in one dimension).
    pub shape: [usize; 2],
    pub t: f64,
    /// Row-major values, `values[iy * shape[0] + ix]`.
    pub values: Vec<f64>,
    pub boundary: Boundary,
}

impl GridField {
    fn validate(&self) -> Result<()> {
        for a in 0..self.dim {
            if !(self.h[a] > 0.0) {
                return Err(Error::InvalidParameter("grid spacing must be positive".to_string()));
            }
            if self.shape[a] < 3 {
                return Err(Error::InvalidParameter("grid needs at least 3 nodes per axis".to_string()));
            }
        }
        let expect = if self.dim == 1 { self.shape[0] } else { self.shape[0] * self.shape[1] };
        if self.values.len() != expect {
            return Err(Error::InvalidParameter(format!(
                "value array has {} entries, expected {expect}",
                self.values.len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("grid values must be finite".to_string()));
        }
        Ok(())
    }

    pub fn new_1d(
        origin: f64,
        h: f64,
        values: Vec<f64>,
        t: f64,
        boundary: Boundary,
    ) -> Result<GridField> {
        let g = GridField {
            dim: 1,
            h: [h, 0.0],
            origin: [origin, 0.0],
            shape: [values.len(), 1],
            t,
            values,
            boundary,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_fn_1d(
        origin: f64,
        h: f64,
        n: usize,
        t: f64,
        boundary: Boundary,
        f: impl Fn(f64) -> f64,
    ) -> Result<GridField> {
        let values = (0..n).map(|i| f(origin + i as f64 * h)).collect();
        GridField::new_1d(origin, h, values, t, boundary)
    }

    pub fn new_2d(
        origin: [f64; 2],
        h: [f64; 2],
        shape: [usize; 2],
        values: Vec<f64>,
        t: f64,
        boundary: Boundary,
    ) -> Result<GridField> {
        let g = GridField {
            dim: 2,
            h,
            origin,
            shape,
            t,
            values,
            boundary,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_fn_2d(
        origin: [f64; 2],
        h: [f64; 2],
        shape: [usize; 2],
        t: f64,
        boundary: Boundary,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<GridField> {
        let mut values = Vec::with_capacity(shape[0] * shape[1]);
        for iy in 0..shape[1] {
            for ix in 0..shape[0] {
                values.push(f(
                    origin[0] + ix as f64 * h[0],
                    origin[1] + iy as f64 * h[1],
                ));
            }
        }
        GridField::new_2d(origin, h, shape, values, t, boundary)
    }

    pub fn x(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.h[axis]
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.shape[0] + ix]
    }

    /// Total mass by the trapezoid rule (boundary nodes carry half
    /// weight, corners a quarter). This is the discrete invariant of the
    /// zero-flux solvers.
    pub fn mass(&self) -> f64 {
        let wt = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        if self.dim == 1 {
            let n = self.shape[0];
            self.values
                .iter()
                .enumerate()
                .map(|(i, v)| wt(i, n) * v)
                .sum::<f64>()
                * self.h[0]
        } else {
            let (nx, ny) = (self.shape[0], self.shape[1]);
            let mut s = 0.0;
            for iy in 0..ny {
                for ix in 0..nx {
                    s += wt(ix, nx) * wt(iy, ny) * self.at(ix, iy);
                }
            }
            s * self.h[0] * self.h[1]
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    /// Largest absolute deviation from another field on the same grid.
    pub fn max_diff(&self, other: &GridField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
