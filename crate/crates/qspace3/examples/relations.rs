//! Builds truncated representations and checks the algebra on their
//! interior states.
//!
//! `cargo run --example relations`

use qspace3::repspace::{
    build_joint, build_l_basis, build_t_orb, commutator_scale, r0_from_z0, verify_relations, window_tk, RelationSet,
};
use qspace3::QContext;

/// Returns the largest relative residual over all families.
pub fn run_example() -> qspace3::Result<f64> {
    let ctx = QContext::new(1.5)?;
    let window = window_tk(40, 40, 3)?;
    let torb = build_t_orb(&window, &ctx)?;
    let joint = build_joint(0, 1.0, 1, &window, &ctx)?;
    let lbasis = build_l_basis(0, r0_from_z0(1.0, &ctx), 40, 3, &ctx)?;

    let report = verify_relations(&[&torb, &joint, &lbasis], RelationSet::All, 1e-10)?;
    for r in report.results.iter().filter(|r| r.family == joint.kind) {
        println!("{:<55} {:.2e}", r.relation, r.max_residual);
    }
    println!("{} relations, max residual {:.2e}, pass = {}", report.results.len(), report.max_residual, report.pass);
    println!("[X-, X+] / X3^2 = {:.15} (lambda = {:.15})", commutator_scale(&joint)?, ctx.lambda());
    Ok(report.max_residual)
}

fn main() -> qspace3::Result<()> {
    run_example().map(|_| ())
}
