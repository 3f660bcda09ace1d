//! Orthonormality and completeness of the weighted functions on the
//! two-sided q-lattice.
//!
//! `cargo run --example orthonormality`

use qspace3::basistrans::{completeness_check, completeness_pairs, CompletenessForm};
use qspace3::qspecial::orthonormality_matrix;
use qspace3::QContext;

/// Returns `(orthonormality defect, completeness defect)`.
pub fn run_example() -> qspace3::Result<(f64, f64)> {
    let ctx = QContext::new(1.5)?;
    let mut ortho: f64 = 0.0;
    for m in 0..=3 {
        let g = orthonormality_matrix(6, m, &ctx, -60)?;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                ortho = ortho.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        println!(
            "m = {m}: Gram matrix of l = {m}..6, diagonal {:?}",
            g.iter().enumerate().map(|(i, r)| format!("{:.3}", r[i])).collect::<Vec<_>>()
        );
    }
    println!("max |G - I| = {ortho:.2e}");

    let pairs = completeness_pairs(CompletenessForm::X3, 1, 4);
    let mut last = 0.0;
    for l_max in [10, 20, 40] {
        let r = completeness_check(CompletenessForm::X3, 1, &pairs, l_max, &ctx)?;
        println!("completeness over {} pairs, l_max = {l_max}: max defect {:.2e}", pairs.len(), r.max_defect);
        last = r.max_defect;
    }
    Ok((ortho, last))
}

fn main() -> qspace3::Result<()> {
    run_example().map(|_| ())
}
