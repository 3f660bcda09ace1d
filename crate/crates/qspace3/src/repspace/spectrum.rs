//! Spectra of `T²_orb` at fixed `m` and of `X³` in the `|M, l, m⟩` basis.
//!
//! At fixed `m` the Casimir is a Jacobi matrix in `m_t`,
//!
//! ```text
//! D(m_t)       = (q²+1)(q^{2m+2−4m_t} − 1) / λ²
//! O(m_t, m_t−1) = q^{2m+1} √((q^{−4(m_t−1)} − 1)(q^{−4(m_t−1)} − q^{−4m})) / λ²
//! ```
//!
//! whose entries grow like `q^{−4m_t}`. Cutting it at `m_t = −N` yields
//! spurious low eigenvalues. The `σ = ±1` copies are instead glued at their
//! deep ends: the doubled matrix `[d, rev(d)]` gets the coupling `δ/2`
//! between the two bottom rows and `δ/2` on both bottom diagonals, with
//! `δ = −O(−N, −N−1)/q`. Symmetric vectors then see the closure `δ`,
//! antisymmetric ones the plain cut, and together they reproduce each
//! `q[l][l+1]`, `l ≥ |m|`, once.

use serde::Serialize;

use crate::basistrans::{t2_block_entries, t2_eigenvalue, x3_eigenvalue, x3_level_residual, x3_top_level, X3_LEVEL_TOL};
use crate::error::{Error, Result};
use crate::qarith::QContext;
use crate::real::{round_bits, Mp};
use crate::repspace::l_basis_x3_coupling;
use crate::tridiag::SymTridiag;

/// Relative accuracy requested from the bisection.
const EIGEN_REL_TOL: f64 = 1e-13;

/// One eigenvalue compared with its closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumLevel {
    /// `l` for `T²`, `ν` for `X³`.
    pub label: i64,
    pub sigma: i32,
    pub computed: f64,
    pub exact: f64,
    pub rel_err: f64,
    /// Whether the level enters the pass/fail decision.
    pub checked: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub observable: String,
    pub q: f64,
    pub m: i64,
    pub levels: Vec<SpectrumLevel>,
    /// Largest `rel_err` over checked levels.
    pub max_rel_err: f64,
    pub checked_levels: usize,
}

impl SpectrumReport {
    fn new(observable: &str, q: f64, m: i64, levels: Vec<SpectrumLevel>) -> SpectrumReport {
        let checked: Vec<&SpectrumLevel> = levels.iter().filter(|l| l.checked).collect();
        let max_rel_err = checked.iter().fold(0.0f64, |w, l| w.max(l.rel_err));
        SpectrumReport { observable: observable.into(), q, m, checked_levels: checked.len(), levels, max_rel_err }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.checked_levels > 0 && self.max_rel_err < tol
    }
}

/// Working precision for a block reaching `m_t = −depth`.
fn block_bits(m: i64, depth: i64, q: f64) -> usize {
    round_bits(53.0 + ((4 * depth + 2 * m.abs() + 8) as f64) * q.log2() + 128.0)
}

/// The plain cut of the `T²_orb` block, rows `m_t = min(0, m), …, −depth`.
pub fn t2_block(m: i64, depth: i64, ctx: &QContext) -> Result<SymTridiag<Mp>> {
    let top = m.min(0);
    if depth < 1 || -depth > top {
        return Err(Error::Coverage(format!("depth {depth} does not reach below m_t = {top}")));
    }
    let qm = Mp::from_f64(ctx.q(), block_bits(m, depth, ctx.q()));
    let rows: Vec<(Mp, Mp)> = (-depth..=top).rev().map(|mt| t2_block_entries(m, mt, &qm)).collect();
    let diag = rows.iter().map(|r| r.0.clone()).collect();
    let off = rows[..rows.len() - 1].iter().map(|r| r.1.clone()).collect();
    SymTridiag::new(diag, off)
}

/// The glued `σ = ±1` block described in the module docs.
pub fn t2_block_glued(m: i64, depth: i64, ctx: &QContext) -> Result<SymTridiag<Mp>> {
    let plain = t2_block(m, depth, ctx)?;
    let qm = plain.diag()[0].lift(ctx.q());
    let below = t2_block_entries(m, -depth, &qm).1;
    let half_delta = -(below / &qm) / &qm.lift(2.0);
    let n = plain.dim();
    let mut diag: Vec<Mp> = plain.diag().to_vec();
    diag.extend(plain.diag().iter().rev().cloned());
    let mut off: Vec<Mp> = plain.off().to_vec();
    off.push(half_delta.clone());
    off.extend(plain.off().iter().rev().cloned());
    diag[n - 1] = &diag[n - 1] + &half_delta;
    diag[n] = &diag[n] + &half_delta;
    SymTridiag::new(diag, off)
}

/// Eigenvalues of the glued `T²_orb` block against `q[l][l+1]` for
/// `|m| ≤ l ≤ l_max`; levels `l ≤ check_up_to` are checked.
pub fn t2_spectrum(m: i64, depth: i64, l_max: i64, check_up_to: i64, ctx: &QContext) -> Result<SpectrumReport> {
    let am = m.abs();
    if l_max < am {
        return Err(Error::Coverage(format!("l_max = {l_max} is below |m| = {am}")));
    }
    let block = t2_block_glued(m, depth, ctx)?;
    let count = (l_max - am + 1) as usize;
    if count > block.dim() {
        return Err(Error::Coverage(format!("block of dimension {} cannot hold {count} levels", block.dim())));
    }
    let mut levels = Vec::with_capacity(count);
    for k in 0..count {
        let l = am + k as i64;
        let computed = block.eigenvalue(k, EIGEN_REL_TOL)?;
        let exact = t2_eigenvalue(l, ctx);
        levels.push(SpectrumLevel {
            label: l,
            sigma: 0,
            computed,
            exact,
            rel_err: (computed - exact).abs() / exact.abs().max(1.0),
            checked: l <= check_up_to,
        });
    }
    Ok(SpectrumReport::new("t2", ctx.q(), m, levels))
}

/// The fixed-`m` block of `X³` in the `|M, l, m⟩` basis, `|m| ≤ l ≤ l_max`.
pub fn x3_l_block(big_m: i64, r0: f64, m: i64, l_max: i64, ctx: &QContext) -> Result<SymTridiag<f64>> {
    let am = m.abs();
    if l_max < am {
        return Err(Error::Coverage(format!("l_max = {l_max} is below |m| = {am}")));
    }
    let off = (am..l_max).map(|l| l_basis_x3_coupling(big_m, r0, l, m, ctx)).collect();
    SymTridiag::new(vec![0.0; (l_max - am + 1) as usize], off)
}

/// Eigenvalues of the truncated `X³` block against `σ r₀ q^{2ν−1}` for the
/// `⌊dim/2⌋` highest levels `ν ≤ M + min(0, m)` of each sign. A level is
/// checked when the exact eigenvector cut at `l_max` has relative residual
/// at most [`X3_LEVEL_TOL`]; that bound places an eigenvalue of the block
/// within the same relative distance, and the nearest one is reported. Deep
/// in the spectrum the truncation adds spurious eigenvalues between the true
/// levels, so counting from the top does not identify them.
pub fn x3_l_spectrum(big_m: i64, r0: f64, m: i64, l_max: i64, ctx: &QContext) -> Result<SpectrumReport> {
    let block = x3_l_block(big_m, r0, m, l_max, ctx)?;
    let n = block.dim();
    let top = x3_top_level(big_m, m);
    let mut levels = Vec::new();
    for k in 0..n / 2 {
        let nu = top - k as i64;
        for sigma in [1, -1] {
            let exact = x3_eigenvalue(r0, nu, sigma, ctx);
            let computed = nearest_eigenvalue(&block, exact)?;
            let residual = x3_level_residual(big_m, r0, m, l_max, nu, sigma, ctx)?;
            levels.push(SpectrumLevel {
                label: nu,
                sigma,
                computed,
                exact,
                rel_err: (computed - exact).abs() / exact.abs(),
                checked: residual <= X3_LEVEL_TOL,
            });
        }
    }
    Ok(SpectrumReport::new("x3", ctx.q(), m, levels))
}

fn nearest_eigenvalue(block: &SymTridiag<f64>, z: f64) -> Result<f64> {
    let below = block.sturm_count(z);
    let mut best: Option<f64> = None;
    for k in [below.checked_sub(1), Some(below)].into_iter().flatten() {
        if k < block.dim() {
            let e = block.eigenvalue(k, EIGEN_REL_TOL)?;
            if best.is_none_or(|b| (e - z).abs() < (b - z).abs()) {
                best = Some(e);
            }
        }
    }
    best.ok_or_else(|| Error::Structural("empty block".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glued_block_is_symmetric_doubling() {
        let ctx = QContext::new(1.5).unwrap();
        let g = t2_block_glued(0, 5, &ctx).unwrap();
        assert_eq!(g.dim(), 12);
        let d = g.diag();
        assert_eq!(d[0], d[11]);
        assert_eq!(d[5], d[6]);
    }

    #[test]
    fn low_t2_levels_at_moderate_depth() {
        let ctx = QContext::new(1.5).unwrap();
        let r = t2_spectrum(0, 40, 6, 6, &ctx).unwrap();
        assert!(r.passes(1e-6), "{:?}", r.levels);
    }

    #[test]
    fn top_x3_levels() {
        let ctx = QContext::new(1.5).unwrap();
        let r = x3_l_spectrum(0, 1.0, 0, 30, &ctx).unwrap();
        assert!(r.checked_levels >= 10);
        assert!(r.passes(1e-6), "{:?}", r.levels);
    }
}
