//! Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)).

use crate::{Error, Result};

/// Accepted samples of an ODE integration.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// `(abscissa, state)` at every accepted step, initial point included.
    pub samples: Vec<(f64, Vec<f64>)>,
    /// Local error estimate of each accepted step.
    pub errors: Vec<f64>,
    /// Set when integration stopped early (step-size underflow near a
    /// singularity); the samples up to that point are still valid.
    pub diagnostic: Option<String>,
}

impl Trajectory {
    pub fn end(&self) -> (f64, &[f64]) {
        let (t, y) = self.samples.last().expect("trajectory is never empty");
        (*t, y)
    }

    /// Linear interpolation between accepted samples.
    pub fn interpolate(&self, t: f64) -> Result<Vec<f64>> {
        let first = self.samples.first().unwrap().0;
        let last = self.samples.last().unwrap().0;
        let (lo, hi) = (first.min(last), first.max(last));
        if !(lo <= t && t <= hi) {
            return Err(Error::Domain(format!(
                "t = {t} outside the integrated range [{lo}, {hi}]"
            )));
        }
        let i = self
            .samples
            .windows(2)
            .position(|w| (w[0].0 <= t && t <= w[1].0) || (w[1].0 <= t && t <= w[0].0))
            .expect("bracketing interval exists");
        let (t0, y0) = &self.samples[i];
        let (t1, y1) = &self.samples[i + 1];
        let a = if t1 == t0 { 0.0 } else { (t - t0) / (t1 - t0) };
        Ok(y0
            .iter()
            .zip(y1)
            .map(|(u, v)| u + a * (v - u))
            .collect())
    }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `y' = rhs(t, y)` from `range.0` to `range.1` with local
/// tolerance `tol` (used both absolutely and relatively). Step-size
/// underflow returns the partial trajectory with a diagnostic instead of
/// an error.
pub fn integrate_ode(
    rhs: &dyn Fn(f64, &[f64]) -> Result<Vec<f64>>,
    y0: &[f64],
    range: (f64, f64),
    tol: f64,
) -> Result<Trajectory> {
    let (t0, t1) = range;
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    if span == 0.0 {
        return Ok(Trajectory {
            samples: vec![(t0, y0.to_vec())],
            errors: vec![],
            diagnostic: None,
        });
    }
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = dir * (span / 100.0).min(0.1).max(1e-8);
    let mut traj = Trajectory {
        samples: vec![(t0, y0.to_vec())],
        errors: vec![],
        diagnostic: None,
    };
    let mut k0 = rhs(t, &y)?;
    if k0.len() != n {
        return Err(Error::InvalidParameter("rhs dimension mismatch".to_string()));
    }
    let h_floor = span * 1e-14;
    for _ in 0..2_000_000 {
        if (t1 - t) * dir <= 0.0 {
            return Ok(traj);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let mut ks: Vec<Vec<f64>> = Vec::with_capacity(7);
        ks.push(k0.clone());
        let mut failed = false;
        for s in 0..6 {
            let mut ys = y.clone();
            for (j, kj) in ks.iter().enumerate() {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..n {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            match rhs(t + h * [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0][s], &ys) {
                Ok(k) => ks.push(k),
                Err(_) => {
                    failed = true;
                    break;
                }
            }
        }
        let err = if failed {
            f64::INFINITY
        } else {
            let mut e: f64 = 0.0;
            for i in 0..n {
                let mut y5 = y[i];
                let mut y4 = y[i];
                for (s, ks) in ks.iter().enumerate() {
                    y5 += h * B5[s] * ks[i];
                    y4 += h * B4[s] * ks[i];
                }
                let scale = 1.0f64.max(y[i].abs());
                e = e.max((y5 - y4).abs() / scale);
            }
            e
        };
        if err <= tol {
            for i in 0..n {
                for (s, ks) in ks.iter().enumerate() {
                    y[i] += h * B5[s] * ks[i];
                }
            }
            t += h;
            traj.samples.push((t, y.clone()));
            traj.errors.push(err);
            // First-same-as-last property of the pair.
            k0 = match rhs(t, &y) {
                Ok(k) => k,
                Err(e) => {
                    traj.diagnostic = Some(format!("rhs failed after t = {t}: {e}"));
                    return Ok(traj);
                }
            };
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * (tol / err).powf(0.2)).min(5.0)
            };
            h *= grow.max(0.2);
        } else {
            let shrink = if err.is_finite() {
                (0.9 * (tol / err).powf(0.2)).max(0.1)
            } else {
                0.5
            };
            h *= shrink;
            if h.abs() < h_floor {
                traj.diagnostic = Some(format!("step size underflow at t = {t}"));
                return Ok(traj);
            }
        }
    }
    Err(Error::StepCollapse(
        "adaptive integrator exhausted its step budget".to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_to_tolerance() {
        let traj = integrate_ode(
            &|_, y| Ok(vec![y[0]]),
            &[1.0],
            (0.0, 1.0),
            1e-9,
        )
        .unwrap();
        let (t, y) = traj.end();
        assert_eq!(t, 1.0);
        assert!((y[0] - std::f64::consts::E).abs() < 1e-8, "{}", y[0]);
        assert!(traj.diagnostic.is_none());
        assert!(traj.errors.iter().all(|e| *e <= 1e-9));
        assert!(traj
            .samples
            .windows(2)
            .all(|w| w[1].0 > w[0].0));
    }

    #[test]
    fn singular_rhs_gives_partial_trajectory() {
        // y' = 1/(1 - t) blows up at t = 1.
        let traj = integrate_ode(
            &|t, _| {
                let d = 1.0 - t;
                if d <= 0.0 {
                    return Err(crate::Error::Domain("singular".to_string()));
                }
                Ok(vec![1.0 / d])
            },
            &[0.0],
            (0.0, 2.0),
            1e-9,
        )
        .unwrap();
        assert!(traj.diagnostic.is_some());
        let (t, _) = traj.end();
        assert!(t < 1.0 + 1e-6);
    }

    #[test]
    fn interpolation_and_backward_integration() {
        let traj = integrate_ode(&|_, y| Ok(vec![-y[0]]), &[1.0], (0.0, 2.0), 1e-10).unwrap();
        let y = traj.interpolate(1.0).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-4);
        assert!(traj.interpolate(3.0).is_err());
        let back = integrate_ode(&|_, y| Ok(vec![y[0]]), &[1.0], (1.0, 0.0), 1e-10).unwrap();
        assert!((back.end().1[0] - (-1.0f64).exp()).abs() < 1e-8);
    }
}
