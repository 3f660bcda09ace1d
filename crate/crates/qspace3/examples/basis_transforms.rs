//! Coefficient tables between the tensor, angular momentum and X3 bases,
//! written as CSV.
//!
//! `cargo run --example basis_transforms`

use qspace3::basistrans::{build_transform, Direction, TransformSpec};
use qspace3::QContext;

/// Returns the largest certification defect of the two tables.
pub fn run_example() -> qspace3::Result<f64> {
    let ctx = QContext::new(1.5)?;
    let mut worst: f64 = 0.0;
    for (direction, depth) in [(Direction::MtkToLm, 40), (Direction::LmToX3, 12)] {
        let spec = TransformSpec { direction, m: 1, big_m: 0, r0: 1.5, l_max: 24, depth };
        let t = build_transform(&spec, &ctx)?;
        println!(
            "{direction:?}: {} x {} table, isometry defect {:.1e}, eigen defect {:.1e}",
            t.row_labels.len(),
            t.col_labels.len(),
            t.isometry_defect,
            t.eigen_defect
        );
        worst = worst.max(t.isometry_defect).max(t.eigen_defect);
        let mut csv = Vec::new();
        t.write_csv(&mut csv)?;
        let text = String::from_utf8_lossy(&csv);
        for line in text.lines().take(4) {
            println!("  {line}");
        }
    }
    Ok(worst)
}

fn main() -> qspace3::Result<()> {
    run_example().map(|_| ())
}
