//! q-arithmetic primitives.
//!
//! - [`QContext`] carries the deformation parameter `q > 1` and the tolerance policy.
//! - Symmetric q-numbers, q-factorials and q-binomials.
//! - Finite and infinite q-Pochhammer symbols.
//! - Basic hypergeometric series `rφs` in a base `0 < base < 1`.
//! - The Jackson integral over `[0, a]`.
//!
//! Series with cancellation (the terminating ones in particular) are summed in
//! multiprecision with a working precision chosen from the observed
//! cancellation, then rounded to `f64`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::real::{round_bits, Mp, MAX_BITS};

/// Environment variable that selects the precision policy.
pub const PRECISION_ENV: &str = "QSPACE3_PRECISION";

/// Floor on the working precision of the multiprecision kernels.
///
/// Kernels always raise precision when cancellation demands it; `Extended`
/// only raises the floor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl Precision {
    pub fn parse(s: &str) -> Result<Precision> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(Error::Config(format!("{PRECISION_ENV} must be 'double' or 'extended', got '{other}'"))),
        }
    }

    /// Target accuracy in bits for values handed back from multiprecision kernels.
    pub fn target_bits(self) -> usize {
        match self {
            Precision::Double => 64,
            Precision::Extended => 128,
        }
    }
}

/// Deformation parameter and numerical policy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QContext {
    q: f64,
    lambda: f64,
    tol_rel: f64,
    tail_eps: f64,
    max_terms: usize,
    precision: Precision,
}

impl QContext {
    /// Context with default tolerances (`tol_rel = 1e-10`, `tail_eps = 1e-18`,
    /// `max_terms = 20000`).
    pub fn new(q: f64) -> Result<QContext> {
        if !q.is_finite() || q <= 1.0 {
            return Err(Error::Config(format!("q must be a finite number > 1, got {q}")));
        }
        // q - 1/q loses digits for q near 1; 2 sinh(ln q) does not.
        let lambda = 2.0 * q.ln().sinh();
        Ok(QContext { q, lambda, tol_rel: 1e-10, tail_eps: 1e-18, max_terms: 20_000, precision: Precision::Double })
    }

    /// Like [`QContext::new`] but honours `QSPACE3_PRECISION`.
    pub fn from_env(q: f64) -> Result<QContext> {
        let ctx = QContext::new(q)?;
        match std::env::var(PRECISION_ENV) {
            Ok(v) => Ok(ctx.with_precision(Precision::parse(&v)?)),
            Err(_) => Ok(ctx),
        }
    }

    pub fn with_tolerances(mut self, tol_rel: f64, tail_eps: f64) -> Result<QContext> {
        if !(tail_eps > 0.0 && tail_eps < tol_rel && tol_rel < 1.0) {
            return Err(Error::Config(format!("need 0 < tail_eps < tol_rel < 1, got tail_eps={tail_eps}, tol_rel={tol_rel}")));
        }
        self.tol_rel = tol_rel;
        self.tail_eps = tail_eps;
        Ok(self)
    }

    /// Sets `tol_rel`, shrinking `tail_eps` if needed to keep `tail_eps < tol_rel`.
    pub fn with_tol(self, tol_rel: f64) -> Result<QContext> {
        let tail = self.tail_eps.min(tol_rel * 1e-8);
        self.with_tolerances(tol_rel, tail)
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Result<QContext> {
        if max_terms < 64 {
            return Err(Error::Config(format!("max_terms must be >= 64, got {max_terms}")));
        }
        self.max_terms = max_terms;
        Ok(self)
    }

    pub fn with_precision(mut self, precision: Precision) -> QContext {
        self.precision = precision;
        self
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `λ = q − q⁻¹`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn tol_rel(&self) -> f64 {
        self.tol_rel
    }

    pub fn tail_eps(&self) -> f64 {
        self.tail_eps
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// `q^n` for integer `n`.
    pub fn qpow(&self, n: i64) -> f64 {
        self.q.powi(n as i32)
    }

    /// Returned when the lattice spacing is close to collapsing (q < 1.05).
    pub fn conditioning_warning(&self) -> Option<String> {
        (self.q < 1.05).then(|| format!("q = {} is close to 1: lattice spacing collapses and results lose digits", self.q))
    }
}

/// Symmetric q-number `[a] = (q^a − q^{−a})/(q − q^{−1})` for real `a`.
pub fn qnum_sym(a: f64, ctx: &QContext) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let h = ctx.q.ln();
    (a * h).sinh() / h.sinh()
}

/// `[n]!` = `[1][2]…[n]`.
pub fn qfactorial_sym(n: i64, ctx: &QContext) -> Result<f64> {
    if n < 0 {
        return Err(domain(format!("q-factorial of negative integer {n}")));
    }
    Ok((1..=n).map(|k| qnum_sym(k as f64, ctx)).product())
}

/// Symmetric q-binomial; zero when `n < k` or either argument is negative.
pub fn qbinomial_sym(n: i64, k: i64, ctx: &QContext) -> f64 {
    if n < 0 || k < 0 || n < k {
        return 0.0;
    }
    let k = k.min(n - k);
    // The telescoped ratio avoids overflowing the factorials.
    (1..=k).map(|j| qnum_sym((n - k + j) as f64, ctx) / qnum_sym(j as f64, ctx)).product()
}

/// `(a; base)_k = ∏_{n<k} (1 − a baseⁿ)`.
pub fn qpochhammer(a: f64, base: f64, k: usize) -> f64 {
    let mut prod = 1.0;
    let mut ab = a;
    for _ in 0..k {
        prod *= 1.0 - ab;
        ab *= base;
    }
    prod
}

/// `(a₁, …, a_r; base)_k` as the product of single-parameter symbols.
pub fn qpochhammer_multi(a: &[f64], base: f64, k: usize) -> f64 {
    a.iter().map(|&ai| qpochhammer(ai, base, k)).product()
}

/// `(a; base)_∞` for `|base| < 1`, truncated once `|a baseⁿ| < tail_eps`.
pub fn qpochhammer_inf(a: f64, base: f64, ctx: &QContext) -> Result<f64> {
    if base.abs() >= 1.0 {
        return Err(domain(format!("infinite q-Pochhammer needs |base| < 1, got {base}")));
    }
    let mut prod = 1.0;
    let mut ab = a;
    for _ in 0..ctx.max_terms {
        if ab.abs() < ctx.tail_eps {
            return Ok(prod);
        }
        prod *= 1.0 - ab;
        if prod == 0.0 {
            return Ok(0.0);
        }
        ab *= base;
    }
    Err(Error::Precision(format!("(a; base)_inf did not converge in {} factors", ctx.max_terms)))
}

/// Multiprecision `(a; base)_∞`, converged to about `2^-bits` relative.
pub(crate) fn qpochhammer_inf_mp(a: &Mp, base: &Mp, bits: usize) -> Result<Mp> {
    let mut prod = Mp::one(bits);
    let mut ab = a.with_bits(bits);
    let stop = -(bits as f64) - 8.0;
    for _ in 0..1_000_000 {
        if ab.is_zero() || ab.log2_abs() < stop {
            return Ok(prod);
        }
        prod = &prod * &(prod.lift(1.0) - &ab);
        ab = &ab * base;
    }
    Err(Error::Precision("multiprecision infinite product did not converge".into()))
}

/// `[n]` for integer `n` in multiprecision.
pub(crate) fn qnum_mp(n: i64, q: &Mp) -> Mp {
    if n == 0 {
        return q.lift(0.0);
    }
    let qi = q.lift(1.0) / q;
    (q.powi(n) - qi.powi(n)) / (q - &qi)
}

/// Value of a basic hypergeometric series together with its truncation data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesSum {
    pub value: f64,
    /// Number of terms summed.
    pub terms: usize,
    /// Bound on the neglected tail (zero for terminating series).
    pub tail_bound: f64,
    /// Working precision, in bits, of the accepted evaluation.
    pub bits: usize,
}

/// Basic hypergeometric series `rφs(upper; lower | base; x)`.
///
/// Each term carries `[(−1)^k base^{k(k−1)/2}]^{1+s−r}`. An upper parameter
/// equal to `base^{−n}` terminates the series after `n` steps; the parameter
/// is snapped to the exact power so that the dropped terms vanish exactly.
pub fn basic_hypergeometric(upper: &[f64], lower: &[f64], base: f64, x: f64, ctx: &QContext) -> Result<f64> {
    basic_hypergeometric_sum(upper, lower, base, x, ctx).map(|s| s.value)
}

/// As [`basic_hypergeometric`], also reporting terms used and tail bound.
pub fn basic_hypergeometric_sum(upper: &[f64], lower: &[f64], base: f64, x: f64, ctx: &QContext) -> Result<SeriesSum> {
    if !(base > 0.0 && base < 1.0) {
        return Err(domain(format!("basic hypergeometric series needs 0 < base < 1, got {base}")));
    }
    if upper.iter().chain(lower).chain([&x]).any(|v| !v.is_finite()) {
        return Err(domain("non-finite series parameter"));
    }
    let spec = HyperSpec::classify(upper, lower, base)?;
    let target = ctx.precision.target_bits();
    let mut bits = target + 64;
    loop {
        let bm = Mp::from_f64(base, bits);
        let up: Vec<Mp> = upper
            .iter()
            .enumerate()
            .map(|(i, &a)| match spec.snapped.get(&i) {
                Some(&n) => bm.powi(-(n as i64)),
                None => Mp::from_f64(a, bits),
            })
            .collect();
        let lo: Vec<Mp> = lower.iter().map(|&b| Mp::from_f64(b, bits)).collect();
        let xm = Mp::from_f64(x, bits);
        let r = hyper_mp(&up, &lo, &bm, &xm, spec.terminate, bits, ctx)?;
        if let Some(v) = crate::qspecial::accept_sum(&r.sum, r.max_log2, bits, target) {
            return Ok(SeriesSum { value: v.to_f64(), terms: r.terms, tail_bound: r.tail_bound, bits });
        }
        let cancel = r.max_log2 - r.sum.log2_abs();
        let need = round_bits(cancel.min(r.max_log2 + (target + 256) as f64) + (target + 64) as f64);
        if need.max(bits + 64) > MAX_BITS {
            return Err(Error::Precision(format!("series cancellation of {cancel:.0} bits exceeds the precision cap")));
        }
        bits = need.max(bits + 64);
        continue;
    }
}

struct HyperSpec {
    terminate: Option<usize>,
    snapped: std::collections::HashMap<usize, usize>,
}

/// Integer `n ≥ 0` with `v ≈ base^{−n}`, if any.
fn base_power_index(v: f64, base: f64) -> Option<usize> {
    if v <= 0.0 {
        return None;
    }
    let n = -(v.ln() / base.ln());
    let r = n.round();
    if !(0.0..=1e6).contains(&r) {
        return None;
    }
    let exact = base.powf(-r);
    ((v - exact).abs() <= 1e-12 * exact).then_some(r as usize)
}

impl HyperSpec {
    fn classify(upper: &[f64], lower: &[f64], base: f64) -> Result<HyperSpec> {
        let mut snapped = std::collections::HashMap::new();
        let mut terminate: Option<usize> = None;
        for (i, &a) in upper.iter().enumerate() {
            if let Some(n) = base_power_index(a, base) {
                snapped.insert(i, n);
                terminate = Some(terminate.map_or(n, |t| t.min(n)));
            }
        }
        for &b in lower {
            if let Some(n) = base_power_index(b, base) {
                // (b; base)_k vanishes from k = n + 1 on.
                if terminate.is_none_or(|t| n < t) {
                    return Err(Error::Pole(format!(
                        "lower parameter {b} = base^-{n} makes a denominator vanish before termination"
                    )));
                }
            }
        }
        Ok(HyperSpec { terminate, snapped })
    }
}

struct HyperEval {
    sum: Mp,
    max_log2: f64,
    terms: usize,
    tail_bound: f64,
}

fn hyper_mp(
    upper: &[Mp],
    lower: &[Mp],
    base: &Mp,
    x: &Mp,
    terminate: Option<usize>,
    bits: usize,
    ctx: &QContext,
) -> Result<HyperEval> {
    let r = upper.len() as i64;
    let s = lower.len() as i64;
    let e = 1 + s - r;
    let one = Mp::one(bits);
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut max_log2 = 0.0f64;
    let mut bk = one.clone(); // base^k
    let limit = terminate.unwrap_or(ctx.max_terms);
    let stop_log2 = ctx.tail_eps.log2() - 2.0;
    let mut k = 0usize;
    while k < limit {
        let mut ratio = x.clone();
        for a in upper {
            ratio = ratio * (&one - &(a * &bk));
        }
        for b in lower {
            ratio = ratio / (&one - &(b * &bk));
        }
        let bk1 = &bk * base;
        ratio = ratio / (&one - &bk1);
        if e != 0 {
            // [(−1)^k base^{k(k−1)/2}]^e advances by (−base^k)^e.
            ratio = ratio * (-&bk).powi(e);
        }
        term = term * &ratio;
        sum = &sum + &term;
        k += 1;
        let tl = term.log2_abs();
        max_log2 = max_log2.max(tl);
        bk = bk1;
        if terminate.is_none() {
            let rl = ratio.log2_abs();
            if rl < 0.0 && tl - sum.log2_abs() < stop_log2 {
                let rho = 2f64.powf(rl);
                let tail = 2f64.powf(tl) * rho / (1.0 - rho);
                return Ok(HyperEval { sum, max_log2, terms: k + 1, tail_bound: tail });
            }
        }
    }
    if terminate.is_none() {
        return Err(Error::Precision(format!("basic hypergeometric series did not converge in {} terms", ctx.max_terms)));
    }
    Ok(HyperEval { sum, max_log2, terms: k + 1, tail_bound: 0.0 })
}

/// Jackson integral `∫₀^a f d_q x = (1 − q⁻¹) Σ_{ν≥0} a q^{−ν} f(a q^{−ν})`.
pub fn jackson_integral<F: Fn(f64) -> f64>(f: F, a: f64, ctx: &QContext) -> Result<f64> {
    if a == 0.0 {
        return Ok(0.0);
    }
    let qi = 1.0 / ctx.q;
    let mut sum = 0.0;
    let mut point = a;
    for nu in 0..ctx.max_terms {
        let term = point * f(point);
        if !term.is_finite() {
            return Err(domain(format!("integrand is not finite at x = {point}")));
        }
        sum += term;
        // An isolated zero of f must not end the sum early.
        if term.abs() <= ctx.tail_eps * sum.abs() && (term != 0.0 || nu >= 64) {
            return Ok((1.0 - qi) * sum);
        }
        point *= qi;
    }
    Err(Error::Precision(format!("Jackson integral did not converge in {} terms", ctx.max_terms)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    #[test]
    fn context_rejects_bad_q_and_tolerances() {
        assert!(QContext::new(1.0).is_err());
        assert!(QContext::new(0.5).is_err());
        assert!(QContext::new(f64::NAN).is_err());
        let c = ctx(1.5);
        assert!(c.clone().with_tolerances(1e-10, 1e-9).is_err());
        assert!(c.clone().with_tolerances(1.5, 1e-9).is_err());
        assert!(c.clone().with_max_terms(10).is_err());
        assert!((c.lambda() - (1.5 - 1.0 / 1.5)).abs() < 1e-16);
    }

    #[test]
    fn qnum_examples() {
        let c = ctx(2.0);
        assert_eq!(qnum_sym(0.0, &c), 0.0);
        assert!((qnum_sym(1.0, &c) - 1.0).abs() < 1e-15);
        assert!((qnum_sym(2.0, &c) - 2.5).abs() < 1e-14);
        assert!((qnum_sym(3.0, &c) - 5.25).abs() < 1e-14);
    }

    #[test]
    fn factorial_and_binomial_examples() {
        let c = ctx(2.0);
        assert_eq!(qfactorial_sym(0, &c).unwrap(), 1.0);
        assert!((qfactorial_sym(1, &c).unwrap() - 1.0).abs() < 1e-15);
        assert!((qfactorial_sym(3, &c).unwrap() - 13.125).abs() < 1e-12);
        assert!(qfactorial_sym(-1, &c).is_err());
        assert!((qbinomial_sym(5, 0, &c) - 1.0).abs() < 1e-15);
        assert_eq!(qbinomial_sym(1, 3, &c), 0.0);
        assert_eq!(qbinomial_sym(-2, 1, &c), 0.0);
        assert!((qbinomial_sym(2, 1, &c) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(qpochhammer(0.3, 0.5, 0), 1.0);
        assert_eq!(qpochhammer(1.0, 0.7, 3), 0.0);
        assert!((qpochhammer(0.5, 0.25, 2) - 0.4375).abs() < 1e-16);
        assert!((qpochhammer_multi(&[0.5, 0.5], 0.25, 2) - 0.4375 * 0.4375).abs() < 1e-16);
        let c = ctx(1.5);
        assert_eq!(qpochhammer_inf(0.0, 0.5, &c).unwrap(), 1.0);
        assert_eq!(qpochhammer_inf(1.0, 0.5, &c).unwrap(), 0.0);
        assert!(qpochhammer_inf(0.5, 1.0, &c).is_err());
        let b = 1.5f64.powi(-4);
        let long = qpochhammer(b, b, c.max_terms());
        assert!((qpochhammer_inf(b, b, &c).unwrap() - long).abs() < c.tail_eps() * 10.0);
    }

    #[test]
    fn hypergeometric_trivial_cases() {
        let c = ctx(1.5);
        let b: f64 = 1.0 / 1.5;
        assert_eq!(basic_hypergeometric(&[0.3, 0.2, 5.0], &[0.1, 0.7], b, 0.0, &c).unwrap(), 1.0);
        assert_eq!(basic_hypergeometric(&[1.0, 0.2, 5.0], &[0.1, 0.7], b, 0.9, &c).unwrap(), 1.0);
    }

    #[test]
    fn hypergeometric_geometric_series() {
        // 1φ0(0; ; b; x) = 1/(x; b)_∞ by the q-binomial theorem.
        let c = ctx(1.5);
        let b: f64 = 1.0 / 1.5;
        let x = 0.3;
        let s = basic_hypergeometric_sum(&[0.0], &[], b, x, &c).unwrap();
        let exact = 1.0 / qpochhammer_inf(x, b, &c).unwrap();
        assert!((s.value - exact).abs() < 1e-14 * exact);
        assert!(s.tail_bound < 1e-15);
    }

    #[test]
    fn hypergeometric_pole_detected() {
        let c = ctx(1.5);
        let b: f64 = 1.0 / 1.5;
        // Lower parameter base^-1 kills (b; base)_2 while the series runs to k = 3.
        let err = basic_hypergeometric(&[b.powi(-3)], &[b.powi(-1)], b, 0.5, &c).unwrap_err();
        assert!(matches!(err, Error::Pole(_)));
        assert!(basic_hypergeometric(&[0.5], &[], 1.5, 0.5, &c).is_err());
    }

    #[test]
    fn jackson_examples() {
        let c = ctx(2.0);
        assert!((jackson_integral(|_| 1.0, 1.0, &c).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(jackson_integral(|_| 1.0, 0.0, &c).unwrap(), 0.0);
        assert!((jackson_integral(|x| x, 1.0, &c).unwrap() - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn precision_parse() {
        assert_eq!(Precision::parse("Extended").unwrap(), Precision::Extended);
        assert!(Precision::parse("quad").is_err());
    }
}
