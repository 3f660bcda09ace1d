//! Spectra of the Casimir at fixed m and of X3 in the angular momentum basis.
//!
//! `cargo run --example spectra`

use qspace3::repspace::spectrum::{t2_spectrum, x3_l_spectrum};
use qspace3::QContext;

/// Returns `(T² max rel err, X³ max rel err)` over checked levels.
pub fn run_example() -> qspace3::Result<(f64, f64)> {
    let ctx = QContext::new(1.5)?;
    let t2 = t2_spectrum(1, 60, 40, 30, &ctx)?;
    for lv in t2.levels.iter().take(5) {
        println!("T2, m = 1, l = {:2}: {:.12e}  exact {:.12e}", lv.label, lv.computed, lv.exact);
    }
    println!("T2: {} levels checked, max rel err {:.1e}", t2.checked_levels, t2.max_rel_err);

    let x3 = x3_l_spectrum(0, 1.5, 0, 40, &ctx)?;
    for lv in x3.levels.iter().filter(|l| l.sigma > 0).take(5) {
        println!("X3, nu = {:3}: {:.12e}  exact {:.12e}", lv.label, lv.computed, lv.exact);
    }
    println!("X3: {} levels checked, max rel err {:.1e}", x3.checked_levels, x3.max_rel_err);
    Ok((t2.max_rel_err, x3.max_rel_err))
}

fn main() -> qspace3::Result<()> {
    run_example().map(|_| ())
}
