//! Big q-Jacobi polynomials and the weighted q-Legendre functions `P̃ᵐₗ`.
//!
//! With `p = q⁻²` and `n = l − m`,
//!
//! ```text
//! Pᵐₗ(x) = Σ_{k=0}^{n} (−1)^k q^{−k(m+1)} (x; p)_k / (−p^{m+1}; p)_k
//!          · [n, k] [l+m+k, k] / [m+k, k]
//! P̃ᵐₗ(x) = wᵐₗ(x) Pᵐₗ(x),   wᵐₗ(x)² = (x² q^{4m}; q⁻⁴)_m / hₗₘ
//! hₗₘ   = p^{m+1}(1−p) · (p, p^{2m+2}, −1, −p; p)_∞ / (p^{2m+2}; p²)_∞²
//!          · (1−p^{2m+1})/(1−p^{2l+1}) · (p; p)_n/(p^{2m+1}; p)_n · p^{2mn + n(n−1)/2 + 2n}
//! ```
//!
//! The alternating sum loses roughly `l²/2 · log2 q` bits at lattice points,
//! so it is always evaluated in multiprecision with the working precision
//! raised until the observed cancellation leaves the requested accuracy.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{domain, Error, Result};
use crate::qarith::{basic_hypergeometric, qnum_mp, qpochhammer_inf_mp, QContext};
use crate::real::{round_bits, Mp, MAX_BITS};

type CoeffKey = (u64, i64, i64, usize);
type Cache<K, V> = RwLock<HashMap<K, V>>;

fn coeff_cache() -> &'static RwLock<HashMap<CoeffKey, Arc<Vec<Mp>>>> {
    static CACHE: OnceLock<RwLock<HashMap<CoeffKey, Arc<Vec<Mp>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Working precision that last sufficed for `(q, l, m)`; later calls start there.
fn bits_hint() -> &'static Cache<(u64, i64, i64), usize> {
    static CACHE: OnceLock<Cache<(u64, i64, i64), usize>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Rounds up to the next `2^k` or `3·2^(k−1)`, so that nearby precisions
/// share cached coefficients.
fn bits_bucket(bits: usize) -> usize {
    let mut b = 128;
    while b < bits {
        b = if b.is_power_of_two() { b / 2 * 3 } else { b / 3 * 4 };
    }
    b
}

fn prefactor_cache() -> &'static Cache<(u64, i64, usize), Arc<Mp>> {
    static CACHE: OnceLock<Cache<(u64, i64, usize), Arc<Mp>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// x-independent coefficients `t_k` of the explicit sum, so that
/// `Pᵐₗ(x) = Σ t_k (x; q⁻²)_k`.
fn plm_coeffs(q: f64, l: i64, m: i64, bits: usize) -> Arc<Vec<Mp>> {
    let key = (q.to_bits(), l, m, bits);
    if let Some(c) = coeff_cache().read().expect("cache lock").get(&key) {
        return c.clone();
    }
    let qm = Mp::from_f64(q, bits);
    let n = l - m;
    let qn: Vec<Mp> = (0..=(2 * l + 2)).map(|j| qnum_mp(j, &qm)).collect();
    let one = qm.lift(1.0);
    let p = &one / &(&qm * &qm);
    let step = -(one.clone() / qm.powi(m + 1)); // −q^{−(m+1)}
    let mut sign_pow = one.clone();
    let mut denom = one.clone(); // (−p^{m+1}; p)_k
    let mut pj = p.powi(m + 1); // p^{m+1+j}
    let mut out = Vec::with_capacity((n + 1) as usize);
    // b_k = [n, k] [l+m+k, k] / [m+k, k], built from b_{k−1}.
    let mut b = one.clone();
    for k in 0..=n {
        if k > 0 {
            sign_pow = sign_pow * &step;
            denom = denom * (&one + &pj);
            pj = pj * &p;
            let u = k as usize;
            b = b * &qn[(n - k + 1) as usize] * &qn[(l + m) as usize + u] / (&qn[u] * &qn[m as usize + u]);
        }
        out.push(&sign_pow * &b / &denom);
    }
    let arc = Arc::new(out);
    coeff_cache().write().expect("cache lock").insert(key, arc.clone());
    arc
}

/// Accepts a sum of terms bounded by `2^max_log2` computed at `bits` when it
/// carries `target` correct bits, or when it is indistinguishable from zero
/// to `target + 256` bits absolute (exact zeros such as odd polynomials at 0).
pub(crate) fn accept_sum(sum: &Mp, max_log2: f64, bits: usize, target: usize) -> Option<Mp> {
    accept_sum_scaled(sum, max_log2, bits, target, 0.0)
}

/// [`accept_sum`] for a sum that will be multiplied by `2^scale_log2`: the
/// zero test is then made on the product.
pub(crate) fn accept_sum_scaled(sum: &Mp, max_log2: f64, bits: usize, target: usize, scale_log2: f64) -> Option<Mp> {
    let err_log2 = max_log2 - bits as f64 + 8.0;
    if !sum.is_zero() && sum.log2_abs() - err_log2 >= (target + 8) as f64 {
        return Some(sum.with_bits(target));
    }
    if err_log2 + scale_log2 < -((target + 256) as f64) && (sum.is_zero() || sum.log2_abs() < err_log2 + 8.0) {
        return Some(Mp::zero(target));
    }
    None
}

/// An argument `x = c · q^k` held exactly, so that lattice points and their
/// `q^{±2}` shifts can be promoted to any working precision without first
/// being rounded to `f64`. Near the lattice the functions are the result of
/// heavy cancellation and a one-ulp error in `x` would be amplified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QPoint {
    pub coeff: f64,
    pub qpow: i64,
}

impl QPoint {
    pub fn new(coeff: f64, qpow: i64) -> QPoint {
        QPoint { coeff, qpow }
    }

    /// Lattice point `σ q^{2(n−m−1)}`.
    pub fn lattice(n: i64, m: i64, sigma: i32) -> QPoint {
        QPoint::new(if sigma < 0 { -1.0 } else { 1.0 }, 2 * (n - m - 1))
    }

    /// The point times `q^k`.
    pub fn shifted(self, k: i64) -> QPoint {
        QPoint::new(self.coeff, self.qpow + k)
    }

    pub fn to_mp(self, q: f64, bits: usize) -> Mp {
        let c = Mp::from_f64(self.coeff, bits);
        if self.qpow == 0 {
            c
        } else {
            c * Mp::from_f64(q, bits).powi(self.qpow)
        }
    }

    pub fn to_f64(self, q: f64) -> f64 {
        self.coeff * q.powi(self.qpow as i32)
    }
}

impl From<f64> for QPoint {
    fn from(x: f64) -> QPoint {
        QPoint::new(x, 0)
    }
}

/// `Pᵐₗ(x)` accurate to about `target` bits.
pub fn p_lm_mp(l: i64, m: i64, x: QPoint, q: f64, target: usize) -> Result<Mp> {
    p_lm_mp_scaled(l, m, x, q, target, 0.0)
}

/// [`p_lm_mp`] for a value about to be multiplied by `2^scale_log2`.
fn p_lm_mp_scaled(l: i64, m: i64, x: QPoint, q: f64, target: usize, scale_log2: f64) -> Result<Mp> {
    if m < 0 {
        return Err(domain(format!("P^m_l is defined for m >= 0 only, got m = {m}")));
    }
    if l < m {
        return Ok(Mp::zero(target));
    }
    let hint_key = (q.to_bits(), l, m);
    let hint = bits_hint().read().expect("cache lock").get(&hint_key).copied().unwrap_or(0);
    let mut bits = bits_bucket((target + 64).max(hint));
    loop {
        let t = plm_coeffs(q, l, m, bits);
        let xb = x.to_mp(q, bits);
        let one = Mp::one(bits);
        let qm = Mp::from_f64(q, bits);
        let p = &one / &(&qm * &qm);
        let mut poch = one.clone();
        let mut pk = one.clone();
        let mut sum = t[0].clone();
        let mut max_log2 = sum.log2_abs();
        for tk in t.iter().skip(1) {
            poch = poch * (&one - &(&xb * &pk));
            pk = pk * &p;
            let term = tk * &poch;
            max_log2 = max_log2.max(term.log2_abs());
            sum = sum + term;
        }
        match accept_sum_scaled(&sum, max_log2, bits, target, scale_log2) {
            Some(v) => {
                if bits > hint {
                    bits_hint().write().expect("cache lock").insert(hint_key, bits);
                }
                return Ok(v);
            }
            None => {
                let cancel = max_log2 - sum.log2_abs();
                let floor = max_log2 + scale_log2.max(0.0) + (target + 256) as f64;
                let need = bits_bucket(round_bits(cancel.min(floor) + (target + 64) as f64).max(bits + 64));
                if need > MAX_BITS {
                    return Err(Error::Precision(format!(
                        "P^{m}_{l} loses {cancel:.0} bits to cancellation, beyond the {MAX_BITS}-bit cap"
                    )));
                }
                bits = need;
            }
        }
    }
}

/// `Pᵐₗ(x)` from the explicit finite sum; zero when `l < m`.
pub fn p_lm(l: i64, m: i64, x: f64, ctx: &QContext) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("non-finite argument"));
    }
    let target = ctx.precision().target_bits();
    p_lm_mp(l, m, x.into(), ctx.q(), target).map(|v| v.to_f64())
}

/// Big q-Jacobi polynomial `P_n(x; a, b, c; base)` with `base = q⁻¹`.
pub fn big_q_jacobi(n: i64, x: f64, a: f64, b: f64, c: f64, ctx: &QContext) -> Result<f64> {
    big_q_jacobi_base(n, x, a, b, c, 1.0 / ctx.q(), ctx)
}

/// Big q-Jacobi polynomial in an explicit base `0 < base < 1`:
/// `3φ2(base^{−n}, ab·base^{n+1}, x; a·base, c·base | base; base)`.
pub fn big_q_jacobi_base(n: i64, x: f64, a: f64, b: f64, c: f64, base: f64, ctx: &QContext) -> Result<f64> {
    if n < 0 {
        return Err(domain(format!("polynomial degree must be >= 0, got {n}")));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let upper = [base.powi(-(n as i32)), a * b * base.powi(n as i32 + 1), x];
    let lower = [a * base, c * base];
    basic_hypergeometric(&upper, &lower, base, base, ctx)
}

/// `C_m = p^{m+1}(1−p)(1−p^{2m+1}) (p, p^{2m+2}, −1, −p; p)_∞ / (p^{2m+2}; p²)_∞²`.
fn weight_prefactor(q: f64, m: i64, bits: usize) -> Result<Arc<Mp>> {
    let key = (q.to_bits(), m, bits);
    if let Some(c) = prefactor_cache().read().expect("cache lock").get(&key) {
        return Ok(c.clone());
    }
    let qm = Mp::from_f64(q, bits);
    let one = qm.lift(1.0);
    let p = &one / &(&qm * &qm);
    let p2 = &p * &p;
    let p2m2 = p.powi(2 * m + 2);
    let num = qpochhammer_inf_mp(&p, &p, bits)?
        * qpochhammer_inf_mp(&p2m2, &p, bits)?
        * qpochhammer_inf_mp(&(-&one), &p, bits)?
        * qpochhammer_inf_mp(&(-&p), &p, bits)?;
    let den = qpochhammer_inf_mp(&p2m2, &p2, bits)?;
    let c = p.powi(m + 1) * (&one - &p) * (&one - &p.powi(2 * m + 1)) * num / (&den * &den);
    let arc = Arc::new(c);
    prefactor_cache().write().expect("cache lock").insert(key, arc.clone());
    Ok(arc)
}

/// Radicands above this negative threshold are treated as rounding noise.
const RADICAND_CLAMP: f64 = -1e-14;

/// `(x² q^{4m}; q⁻⁴)_m = ∏_{i=1}^{m} (1 − x² q^{4i})`, clamped at the support edge.
fn support_factor(m: i64, x: &Mp, qm: &Mp) -> Result<Mp> {
    let one = qm.lift(1.0);
    let x2 = x * x;
    let q4 = qm.powi(4);
    let mut qi = one.clone();
    let mut prod = one.clone();
    for _ in 0..m {
        qi = qi * &q4;
        let f = &one - &(&x2 * &qi);
        // Within rounding of the support edge the factor is zero.
        if f.to_f64().abs() <= -RADICAND_CLAMP {
            return Ok(one.lift(0.0));
        }
        prod = prod * f;
    }
    if prod.is_negative() {
        return Err(domain(format!("x = {:e} lies outside the support of the weight for m = {m}", x.to_f64())));
    }
    Ok(prod)
}

/// Weight `wᵐₗ(x)` in multiprecision.
pub fn weight_mp(l: i64, m: i64, x: QPoint, q: f64, bits: usize) -> Result<Mp> {
    if m < 0 || l < m {
        return Err(domain(format!("weight needs 0 <= m <= l, got l = {l}, m = {m}")));
    }
    let bits = round_bits(bits as f64);
    let qm = Mp::from_f64(q, bits);
    let xb = x.to_mp(q, bits);
    let w2x = support_factor(m, &xb, &qm)?;
    let one = qm.lift(1.0);
    let p = &one / &(&qm * &qm);
    let n = l - m;
    // (p^{2m+1}; p)_n / (p; p)_n
    let mut ratio = one.clone();
    let mut a = p.powi(2 * m + 1);
    let mut b = p.clone();
    for _ in 0..n {
        ratio = ratio * (&one - &a) / (&one - &b);
        a = a * &p;
        b = b * &p;
    }
    let expo = 2 * m * n + n * (n - 1) / 2 + 2 * n;
    let inv_h = (&one - &p.powi(2 * l + 1)) * ratio / p.powi(expo) / &*weight_prefactor(q, m, bits)?;
    Ok((w2x * inv_h).sqrt().with_bits(bits))
}

/// Weight `wᵐₗ(x) ≥ 0`; domain error outside the support.
pub fn weight_w(l: i64, m: i64, x: f64, ctx: &QContext) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("non-finite argument"));
    }
    let bits = ctx.precision().target_bits() + 32;
    weight_mp(l, m, x.into(), ctx.q(), bits).map(|v| v.to_f64())
}

/// `P̃ᵐₗ(x) = wᵐₗ(x) Pᵐₗ(x)` in multiprecision.
pub fn p_tilde_mp(l: i64, m: i64, x: QPoint, q: f64, target: usize) -> Result<Mp> {
    if m < 0 {
        return Err(domain(format!("P~^m_l is defined for m >= 0 only, got m = {m}")));
    }
    if l < m {
        return Ok(Mp::zero(target));
    }
    let w = weight_mp(l, m, x, q, target + 32)?;
    if w.is_zero() {
        return Ok(Mp::zero(target));
    }
    let p = p_lm_mp_scaled(l, m, x, q, target + 16, w.log2_abs())?;
    Ok((w * p).with_bits(target))
}

/// `P̃ᵐₗ(x)`; zero when `l < m`.
pub fn p_tilde(l: i64, m: i64, x: f64, ctx: &QContext) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("non-finite argument"));
    }
    p_tilde_at(l, m, x.into(), ctx)
}

/// `P̃ᵐₗ` at an exactly held point.
pub fn p_tilde_at(l: i64, m: i64, x: QPoint, ctx: &QContext) -> Result<f64> {
    if !x.coeff.is_finite() {
        return Err(domain("non-finite argument"));
    }
    let target = ctx.precision().target_bits();
    p_tilde_mp(l, m, x, ctx.q(), target).map(|v| v.to_f64())
}

/// Closed forms of `Pᵐₗ` for `l ≤ 3`, `m ≤ 1`; `None` elsewhere.
pub fn low_degree_closed_form(l: i64, m: i64, x: f64, ctx: &QContext) -> Option<f64> {
    let q = ctx.q();
    let b = |a: i64| crate::qarith::qnum_sym(a as f64, ctx);
    match (l, m) {
        (0, 0) | (1, 1) => Some(1.0),
        (1, 0) | (2, 1) => Some(x),
        (2, 0) => Some((b(3) * x * x - q.powi(-2)) / (q * b(2))),
        (3, 0) => Some(x / (q.powi(5) * b(2)) * (b(5) * q * q * x * x - b(3))),
        (3, 1) => Some((q.powi(4) * b(5) * x * x - 1.0) / (q.powi(5) * b(4))),
        _ => None,
    }
}

/// Lattice point `σ q^{2(n−m−1)}`.
pub fn lattice_point(n: i64, m: i64, sigma: i32, q: f64) -> f64 {
    let s = if sigma < 0 { -1.0 } else { 1.0 };
    s * q.powi((2 * (n - m - 1)) as i32)
}

/// Residual of the three-term recurrence
/// `x q^{m+1} P̃ₗ = A P̃ₗ₊₁ + B P̃ₗ₋₁`, as `|LHS − RHS| / max(1, |LHS|)`.
pub fn check_recurrence(l: i64, m: i64, x: f64, ctx: &QContext) -> Result<f64> {
    check_recurrence_at(l, m, x.into(), ctx)
}

/// [`check_recurrence`] at an exactly held point.
pub fn check_recurrence_at(l: i64, m: i64, x: QPoint, ctx: &QContext) -> Result<f64> {
    if m < 0 || l < m {
        return Err(domain(format!("recurrence needs 0 <= m <= l, got l = {l}, m = {m}")));
    }
    let qn = |a: i64| crate::qarith::qnum_sym(a as f64, ctx);
    let lhs = x.to_f64(ctx.q()) * ctx.qpow(m + 1) * p_tilde_at(l, m, x, ctx)?;
    let up = ((qn(l - m + 1) * qn(l + m + 1)) / (qn(2 * l + 1) * qn(2 * l + 3))).sqrt();
    let down = ((qn(l + m) * qn(l - m)) / (qn(2 * l + 1) * qn(2 * l - 1))).max(0.0).sqrt();
    let mut rhs = up * p_tilde_at(l + 1, m, x, ctx)?;
    if down != 0.0 {
        rhs += down * p_tilde_at(l - 1, m, x, ctx)?;
    }
    Ok((lhs - rhs).abs() / lhs.abs().max(1.0))
}

/// Residual of the q-difference equation
///
/// ```text
/// ((q^{2l+1} + q^{−2l−1}) q⁻¹ x² − (q²+1) q^{−2(m+2)}) P̃(x)
///   = −q^{−2(m+1)} √((x²−1)(x²q^{4m}−1)) P̃(xq⁻²) − √((x²−q^{−4(m+1)})(x²−q⁻⁴)) P̃(xq²)
/// ```
///
/// normalised by the largest of the three terms.
pub fn check_difference(l: i64, m: i64, x: f64, ctx: &QContext) -> Result<f64> {
    check_difference_at(l, m, x.into(), ctx)
}

/// [`check_difference`] at an exactly held point.
pub fn check_difference_at(l: i64, m: i64, xp: QPoint, ctx: &QContext) -> Result<f64> {
    if m < 0 || l < m {
        return Err(domain(format!("difference equation needs 0 <= m <= l, got l = {l}, m = {m}")));
    }
    let q = ctx.q();
    let x = xp.to_f64(q);
    let x2 = x * x;
    let coef0 = (q.powi((2 * l + 1) as i32) + q.powi(-(2 * l + 1) as i32)) / q * x2 - (q * q + 1.0) * q.powi(-2 * (m as i32 + 2));
    let lhs = coef0 * p_tilde_at(l, m, xp, ctx)?;
    let mi = m as i32;
    let rad_down = clamp_radicand(edge_gap(x2, 1.0) * edge_gap(x2 * q.powi(4 * mi), 1.0));
    let rad_up = clamp_radicand(edge_gap(x2, q.powi(-4 * (mi + 1))) * edge_gap(x2, q.powi(-4)));
    let mut r1 = 0.0;
    if rad_down > 0.0 {
        r1 = -q.powi(-2 * (m as i32 + 1)) * rad_down.sqrt() * p_tilde_at(l, m, xp.shifted(-2), ctx)?;
    }
    let mut r2 = 0.0;
    if rad_up > 0.0 {
        r2 = -rad_up.sqrt() * p_tilde_at(l, m, xp.shifted(2), ctx)?;
    }
    let scale = lhs.abs().max(r1.abs()).max(r2.abs()).max(f64::MIN_POSITIVE);
    Ok((lhs - r1 - r2).abs() / scale)
}

/// `a − b`, or exactly zero when the two agree to rounding (lattice edges).
fn edge_gap(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d.abs() <= 1e-14 * a.abs().max(b.abs()) {
        0.0
    } else {
        d
    }
}

fn clamp_radicand(r: f64) -> f64 {
    if (RADICAND_CLAMP..0.0).contains(&r) {
        0.0
    } else {
        r
    }
}

/// `(1−q⁻²) Σ_σ Σ_{n=n_min}^{0} q^{2(n−m−1)} P̃ᵐₗ(σ q^{2(n−m−1)}) P̃ᵐₗ′(σ q^{2(n−m−1)})`.
///
/// Summed from the deepest (smallest) terms upwards.
pub fn orthonormality_sum(l: i64, lp: i64, m: i64, ctx: &QContext, n_min: i64) -> Result<f64> {
    if m < 0 {
        return Err(domain(format!("orthonormality needs m >= 0, got {m}")));
    }
    if n_min > 0 {
        return Err(domain(format!("n_min must be <= 0, got {n_min}")));
    }
    let q = ctx.q();
    let mut sum = 0.0;
    for n in n_min..=0 {
        for sigma in [1, -1] {
            let x = QPoint::lattice(n, m, sigma);
            sum += x.to_f64(q).abs() * p_tilde_at(l, m, x, ctx)? * p_tilde_at(lp, m, x, ctx)?;
        }
    }
    Ok((1.0 - 1.0 / (q * q)) * sum)
}

/// All [`orthonormality_sum`]s for `m ≤ l, l′ ≤ l_max`, entry `[l − m][l′ − m]`.
/// Each `P̃` value is computed once.
pub fn orthonormality_matrix(l_max: i64, m: i64, ctx: &QContext, n_min: i64) -> Result<Vec<Vec<f64>>> {
    if m < 0 || l_max < m {
        return Err(domain(format!("orthonormality needs 0 <= m <= l_max, got m = {m}, l_max = {l_max}")));
    }
    if n_min > 0 {
        return Err(domain(format!("n_min must be <= 0, got {n_min}")));
    }
    let q = ctx.q();
    let points: Vec<QPoint> = (n_min..=0).flat_map(|n| [1, -1].map(|s| QPoint::lattice(n, m, s))).collect();
    let mut table = Vec::new();
    for l in m..=l_max {
        table.push(points.iter().map(|&x| p_tilde_at(l, m, x, ctx)).collect::<Result<Vec<f64>>>()?);
    }
    let k = table.len();
    let mut out = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let mut sum = 0.0;
            for (p, x) in points.iter().enumerate() {
                sum += x.to_f64(q).abs() * table[i][p] * table[j][p];
            }
            out[i][j] = (1.0 - 1.0 / (q * q)) * sum;
            out[j][i] = out[i][j];
        }
    }
    Ok(out)
}

/// `(1−q⁻²) Σ_{l=0}^{l_max} q^{ν+ν′−2} P̃^{|m|}ₗ(σ q^{2(ν−1)}) P̃^{|m|}ₗ(σ′ q^{2(ν′−1)})`.
///
/// Both arguments must lie on the support of `P̃^{|m|}`, i.e. `ν, ν′ ≤ −|m|`.
pub fn completeness_sum(nu: i64, nup: i64, sigma: i32, sigmap: i32, m: i64, ctx: &QContext, l_max: i64) -> Result<f64> {
    let am = m.abs();
    if nu > -am || nup > -am {
        return Err(domain(format!("completeness needs nu, nu' <= -|m| = {}, got nu = {nu}, nu' = {nup}", -am)));
    }
    if l_max < am {
        return Err(Error::Coverage(format!("l_max = {l_max} is below |m| = {am}")));
    }
    let q = ctx.q();
    let x = QPoint::lattice(nu, 0, sigma);
    let xp = QPoint::lattice(nup, 0, sigmap);
    let mut sum = 0.0;
    for l in (am..=l_max).rev() {
        sum += p_tilde_at(l, am, x, ctx)? * p_tilde_at(l, am, xp, ctx)?;
    }
    Ok((1.0 - 1.0 / (q * q)) * q.powi((nu + nup - 2) as i32) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    #[test]
    fn plm_examples() {
        let c = ctx(2.0);
        assert!((p_lm(1, 1, 0.37, &c).unwrap() - 1.0).abs() < 1e-15);
        assert!((p_lm(2, 0, 1.0, &c).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(p_lm(1, 3, 0.2, &c).unwrap(), 0.0);
        assert!(p_lm(1, -1, 0.2, &c).is_err());
    }

    #[test]
    fn plm_equals_big_q_jacobi_specialisation() {
        let c = ctx(1.5);
        let c2 = ctx(1.5 * 1.5);
        for (l, m) in [(1, 0), (3, 0), (4, 1), (6, 2), (5, 5)] {
            let a = 1.5f64.powi(-2 * m as i32);
            for x in [0.3, -0.71, 1.5f64.powi(-6)] {
                let direct = p_lm(l, m, x, &c).unwrap();
                let via = big_q_jacobi(l - m, x, a, a, -a, &c2).unwrap();
                assert!((direct - via).abs() <= 1e-12 * direct.abs().max(1.0), "l={l} m={m} x={x}: {direct} vs {via}");
            }
        }
    }

    #[test]
    fn plm_is_exact_deep_in_the_lattice() {
        // f64 summation of the same series is off by many orders here.
        let c = ctx(2.0);
        let x = lattice_point(-3, 0, 1, 2.0);
        let v = p_lm(8, 0, x, &c).unwrap();
        let again = p_lm_mp(8, 0, x.into(), 2.0, 200).unwrap().to_f64();
        assert!((v - again).abs() <= 1e-15 * again.abs());
    }

    #[test]
    fn weight_m0_is_constant_in_x() {
        let c = ctx(1.5);
        let a = weight_w(3, 0, 0.2, &c).unwrap();
        let b = weight_w(3, 0, -0.9, &c).unwrap();
        assert!((a - b).abs() < 1e-15 * a);
    }

    #[test]
    fn weight_outside_support_is_domain_error() {
        let c = ctx(1.5);
        assert!(matches!(weight_w(2, 1, 0.9, &c), Err(Error::Domain(_))));
        assert!(matches!(p_tilde(2, 1, 0.9, &c), Err(Error::Domain(_))));
        // At the edge of the support the weight vanishes.
        assert_eq!(weight_w(2, 1, 1.5f64.powi(-2), &c).unwrap(), 0.0);
    }

    #[test]
    fn difference_equation_at_top_of_lattice() {
        let c = ctx(1.5);
        for m in 0..4 {
            for l in m..m + 4 {
                for sigma in [1, -1] {
                    let x = lattice_point(0, m, sigma, 1.5);
                    assert!(check_difference(l, m, x, &c).unwrap() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn completeness_rejects_points_off_support() {
        let c = ctx(1.5);
        assert!(completeness_sum(0, 0, 1, 1, 1, &c, 10).is_err());
        assert!(completeness_sum(-1, -1, 1, 1, 1, &c, 10).is_ok());
        assert!(matches!(completeness_sum(-2, -2, 1, 1, 3, &c, 2), Err(Error::Domain(_)) | Err(Error::Coverage(_))));
    }
}
