//! Orbital angular momentum as a coproduct, and spin addition.
//!
//! `cargo run --example coproduct`

use qspace3::repspace::{
    add_spin, build_k_orbital, build_t_generic, build_t_orb, build_t_special, coproduct, coproduct_term_scale, group_like_defect,
    window_1d, window_tk, CoproductVariant,
};
use qspace3::QContext;

/// Returns the largest entrywise difference between the β-coproduct and the
/// direct construction, relative to the entries or, where the coproduct terms
/// cancel, to the size of those terms.
pub fn run_example() -> qspace3::Result<f64> {
    let ctx = QContext::new(1.5)?;
    let t = build_t_special(&window_1d("m_t", -30, 0, 3)?, &ctx)?;
    let k = build_k_orbital(&window_1d("m_k", 0, 30, 3)?, &ctx)?;
    let beta = coproduct(&t, &k, CoproductVariant::Beta)?;
    let direct = build_t_orb(&window_tk(30, 30, 3)?, &ctx)?;

    let mut worst: f64 = 0.0;
    for key in ["T3", "T+", "T-", "tau"] {
        let scale = coproduct_term_scale(&t, &k, key)?;
        let d = beta.op(key)?.matrix.max_rel_diff_scaled(&direct.op(key)?.matrix, &scale);
        println!("{key:>4}: max relative difference {d:.2e}");
        worst = worst.max(d);
    }
    println!(
        "d = {:?} (lambda d_1 d_2 = {:?})",
        beta.param("d"),
        t.param("d").zip(k.param("d")).map(|(a, b)| ctx.lambda() * a * b)
    );
    println!("tau group-like defect: {:.2e}", group_like_defect(&beta)?);

    // The standard rule refuses a negative tau_1.
    match coproduct(&t, &k, CoproductVariant::Standard) {
        Err(e) => println!("standard coproduct of (t, K): {e}"),
        Ok(_) => println!("standard coproduct of (t, K) unexpectedly succeeded"),
    }

    // Spin 1/2: the finite representation with d = 1/lambda, m_bar = 1/2.
    let spin = build_t_generic(1.0 / ctx.lambda(), 0.5, &window_1d("dm", -1, 0, 2)?, &ctx)?;
    let total = add_spin(&direct, &spin)?;
    println!("orbital + spin 1/2: {} states", total.dim());
    Ok(worst)
}

fn main() -> qspace3::Result<()> {
    run_example().map(|_| ())
}
