//! Transport solutions along one-parameter symmetry flows and check the
//! transported fields still solve their equations.

use liesym::expr::{parse, Expr, SamplerConfig};
use liesym::jet::VectorField;
use liesym::numerics::{pde_residual_fd, transport_solution, ResidualWindow};
use liesym::pde::PdeSpec;
use liesym::{Error, Result};

fn main() -> Result<()> {
    let cfg = SamplerConfig::seeded(4);
    let win = ResidualWindow {
        t: (0.1, 0.4),
        x: [(0.4, 1.2), (0.0, 0.0)],
        n: 8,
    };

    // Space translation on a heat-equation solution.
    let heat = PdeSpec::gradient_1d(Expr::one(), Expr::zero());
    let shift = VectorField::new_1d(Expr::zero(), Expr::one(), Expr::zero())?;
    let moved = transport_solution(
        Box::new(|t: f64, x: &[f64]| Ok((-t).exp() * x[0].cos())),
        &shift,
        0.3,
        &heat,
        &cfg,
    )?;
    let r = pde_residual_fd(&moved.as_candidate(), &heat, &win, 0.05)?;
    println!("translated solution: oracle ratio {:.3}", r.ratio);
    assert!((3.5..=4.5).contains(&r.ratio));

    // The additive symmetry e^t d/du of u_t = D(u_x) u_xx + u shifts any
    // solution by eps e^t; here transport is exact to machine precision.
    let pde = PdeSpec::gradient_1d(parse("u_x^2 + 1").unwrap(), Expr::u());
    let x3 = VectorField::new_1d(Expr::zero(), Expr::zero(), parse("exp(t)").unwrap())?;
    let lifted = transport_solution(Box::new(|_, _: &[f64]| Ok(0.0)), &x3, 0.25, &pde, &cfg)?;
    let got = lifted.eval(0.4, &[0.7])?;
    assert!((got - 0.25 * 0.4f64.exp()).abs() < 1e-9);
    println!("additive flow adds eps e^t exactly");

    // Transport refuses fields that are not symmetries of the equation.
    let not_a_symmetry = VectorField::new_1d(Expr::zero(), Expr::zero(), Expr::one())?;
    assert!(transport_solution(
        Box::new(|_, _: &[f64]| Ok(0.0)),
        &not_a_symmetry,
        0.1,
        &PdeSpec::gradient_1d(Expr::one(), Expr::u()),
        &cfg
    )
    .is_err());
    println!("non-symmetry rejected");

    // A projective time component has a finite-time pole; the flow
    // reports blow-up instead of integrating through it.
    let proj = VectorField::new_1d(parse("t^2").unwrap(), Expr::zero(), Expr::zero())?;
    match proj.flow(&[1.0, 0.0, 0.0], 1.5) {
        Err(Error::Blowup { eps, .. }) => println!("pole detected at eps = {eps:.3}"),
        other => panic!("expected blow-up, got {other:?}"),
    }
    Ok(())
}
