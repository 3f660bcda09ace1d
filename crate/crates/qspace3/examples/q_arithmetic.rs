//! q-numbers, q-binomials, Pochhammer symbols and the Jackson integral.
//!
//! `cargo run --example q_arithmetic`

use qspace3::qarith::{jackson_integral, qbinomial_sym, qnum_sym, qpochhammer, qpochhammer_inf};
use qspace3::QContext;

/// Returns the Jackson integral of `x²` over `[0, 1]`, which is `1/(1 + q⁻¹ + q⁻²)`.
pub fn run_example() -> qspace3::Result<f64> {
    let ctx = QContext::new(1.5)?;
    println!("q = {}, lambda = {}", ctx.q(), ctx.lambda());
    for a in [1.0, 2.0, 2.5, 5.0] {
        println!("[{a}] = {:.15}", qnum_sym(a, &ctx));
    }
    println!("[5 choose 2] = {:.15}", qbinomial_sym(5, 2, &ctx));

    let p = 1.0 / (ctx.q() * ctx.q());
    println!("(p; p)_4   = {:.15}", qpochhammer(p, p, 4));
    println!("(p; p)_inf = {:.15}", qpochhammer_inf(p, p, &ctx)?);

    let integral = jackson_integral(|x| x * x, 1.0, &ctx)?;
    let qi = 1.0 / ctx.q();
    println!("int_0^1 x^2 d_q x = {integral:.15} (closed form {:.15})", 1.0 / (1.0 + qi + qi * qi));

    // Near q = 1 the q-numbers approach ordinary numbers.
    let near = QContext::new(1.0 + 1e-4)?;
    println!("[7] at q = 1 + 1e-4: {:.10}", qnum_sym(7.0, &near));
    Ok(integral)
}

fn main() -> qspace3::Result<()> {
    run_example().map(|_| ())
}
