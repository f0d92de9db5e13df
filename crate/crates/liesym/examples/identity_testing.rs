//! The symbolic kernel underneath everything: exact-rational expressions
//! with differentiation, substitution, and randomized zero-testing.

use liesym::expr::{is_zero, parse, Expr, SamplerConfig, Symbol};

fn main() -> liesym::Result<()> {
    let cfg = SamplerConfig::seeded(1);

    // Polynomial identities go through the exact rational path.
    let lhs = parse("(u + u_x)^3").unwrap();
    let rhs = parse("u^3 + 3*u^2*u_x + 3*u*u_x^2 + u_x^3").unwrap();
    let r = is_zero(&Expr::sub(lhs, rhs), &cfg)?;
    println!("binomial cube: zero = {}, exact path = {}", r.is_zero, r.exact);
    assert!(r.is_zero && r.exact);

    // Transcendental identities fall back to float sampling with a
    // cancellation-scaled residual.
    let e = parse("sin(t)^2 + cos(t)^2 - 1").unwrap();
    let r = is_zero(&e, &cfg)?;
    println!("pythagorean: zero = {}, exact path = {}", r.is_zero, r.exact);
    assert!(r.is_zero && !r.exact);

    // Opaque functions differentiate by the chain rule; the same opaque
    // value is reused wherever the same call appears.
    let f = parse("D(u_x)*u_x").unwrap();
    let df = f.diff(&Symbol::jet(0, 1, 0));
    println!("d/du_x [D(u_x) u_x] = {df}");
    let want = parse("D'(u_x)*u_x + D(u_x)").unwrap();
    assert!(is_zero(&Expr::sub(df, want), &cfg)?.is_zero);

    // A non-identity is rejected with a witness point.
    let r = is_zero(&parse("u_x^2 - u_x").unwrap(), &cfg)?;
    println!("non-identity rejected: {}", !r.is_zero);
    assert!(!r.is_zero);
    assert!(r.witness.is_some());
    Ok(())
}
