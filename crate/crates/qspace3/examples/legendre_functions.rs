//! q-deformed associated Legendre functions: closed forms, the lattice
//! weight and the three-term recurrence.
//!
//! `cargo run --example legendre_functions`

use qspace3::qspecial::{check_recurrence_at, low_degree_closed_form, p_lm, p_tilde_at, QPoint};
use qspace3::QContext;

/// Returns the largest deviation from the closed forms over the sample.
pub fn run_example() -> qspace3::Result<f64> {
    let ctx = QContext::new(1.5)?;
    let mut worst: f64 = 0.0;
    println!(" l  m      x          P            closed form");
    for (l, m) in [(0, 0), (1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (3, 1)] {
        for x in [-0.7, 0.2, 0.9] {
            let p = p_lm(l, m, x, &ctx)?;
            let cf = low_degree_closed_form(l, m, x, &ctx).expect("l <= 3, m <= 1");
            worst = worst.max((p - cf).abs() / cf.abs().max(1e-300));
            println!("{l:2} {m:2} {x:6.2}  {p:+.12e}  {cf:+.12e}");
        }
    }

    // On the lattice ±q^{2(n-m-1)} the weighted functions are exact in
    // multiprecision even where the polynomial sum cancels heavily.
    let (l, m) = (6, 2);
    for n in [0, -5, -20] {
        let x = QPoint::lattice(n, m, 1);
        println!(
            "P~^{m}_{l}(q^{}) = {:+.12e}, recurrence residual {:.1e}",
            x.qpow,
            p_tilde_at(l, m, x, &ctx)?,
            check_recurrence_at(l, m, x, &ctx)?
        );
    }
    Ok(worst)
}

fn main() -> qspace3::Result<()> {
    let worst = run_example()?;
    println!("max relative deviation from closed forms: {worst:.1e}");
    Ok(())
}
