//! Verify every catalogued symmetry case, then corrupt a generator to
//! show the negative control firing.

use liesym::catalog::{cases, verify_case, TABLES};
use liesym::expr::SamplerConfig;

fn main() -> liesym::Result<()> {
    let cfg = SamplerConfig::seeded(42);
    for table in TABLES {
        for case in cases(table)? {
            let v = verify_case(&case, &cfg)?;
            println!(
                "{}: {} ({} parameter assignments, control residual {:.2e})",
                v.case_id,
                if v.pass { "ok" } else { "FAILED" },
                v.samples.len(),
                v.control_residual
            );
            assert!(v.pass);
            assert!(v.control_rejected, "negative control must be rejected");
        }
    }

    // A perturbed generator is not a symmetry: the check reports a
    // nonzero witness instead of silently passing.
    let case = &cases("T1")?[0];
    let mut broken = case.clone();
    let bent = &broken.extensions[0];
    broken.extensions[0] = liesym::jet::VectorField::new_1d(
        bent.xi_t.clone(),
        bent.xi_x[0].clone(),
        liesym::expr::Expr::add2(bent.eta.clone(), liesym::expr::Expr::x(0)),
    )?;
    let v = verify_case(&broken, &cfg)?;
    println!("corrupted {}: pass = {}", v.case_id, v.pass);
    assert!(!v.pass);
    Ok(())
}
