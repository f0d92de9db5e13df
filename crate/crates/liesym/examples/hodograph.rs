//! Hodograph linearization of the D = u_x^-2 equation: the generic
//! chain-rule identity, closed-form profiles, grid inversion, and the
//! radial variant built from the backward heat equation.

use liesym::expr::{parse, Expr, SamplerConfig};
use liesym::numerics::{pde_residual_fd, rhs_residual_fd, ResidualWindow};
use liesym::reduce::{hodograph_1d, radial_hodograph_identity, radial_hodograph_solution, radial_rhs};

fn main() -> liesym::Result<()> {
    let cfg = SamplerConfig::seeded(3);

    // Swapping x and u turns u_t = u_x^-2 u_xx + Q(u) into the linear
    // w_t = w_uu - Q w_u, identically in an opaque w(t, u).
    let h = hodograph_1d(&Expr::u());
    let idw = h.identity_witness(&cfg)?;
    println!("chain-rule identity (Q = u): {}", idw.is_zero);
    assert!(idw.is_zero);

    // w = e^-t u solves the linear side; its inverse u = e^t x solves the
    // nonlinear side. Check both symbolically and with the FD oracle.
    let w_profile = parse("exp(-t)*u").unwrap();
    assert!(h.check_profile(&w_profile, &cfg)?);
    let win = ResidualWindow {
        t: (0.1, 0.4),
        x: [(0.4, 1.2), (0.0, 0.0)],
        n: 8,
    };
    let r = pde_residual_fd(&|t: f64, x: &[f64]| Ok(t.exp() * x[0]), &h.nonlinear, &win, 0.02)?;
    println!("u = e^t x: oracle ratio {:.3}", r.ratio);
    assert!((3.5..=4.5).contains(&r.ratio));

    // Grid inversion of the linear profile reproduces the same solution.
    let us = h.invert_profile(&w_profile, 0.2, &[0.3, 0.5, 0.7], (0.0, 2.0))?;
    for (x, u) in [0.3, 0.5, 0.7].iter().zip(&us) {
        assert!((u - 0.2f64.exp() * x).abs() < 1e-9);
    }
    println!("grid inversion agrees with the closed form");

    // Radial analogue: r = sqrt(V), U = z maps backward-heat solutions
    // to the k = -1 radial equation; V = e^t sin z gives
    // U = asin(r^2 e^-t).
    let ri = radial_hodograph_identity(&cfg)?;
    assert!(ri.is_zero);
    let rhs = radial_rhs(&Expr::num(-1), true);
    let win = ResidualWindow {
        t: (0.5, 1.0),
        x: [(0.3, 1.0), (0.0, 0.0)],
        n: 8,
    };
    let r = rhs_residual_fd(&|t, x: &[f64]| radial_hodograph_solution(t, x[0]), &rhs, &win, 0.02)?;
    println!("radial construction: oracle ratio {:.3}", r.ratio);
    assert!((3.5..=4.5).contains(&r.ratio));
    Ok(())
}
