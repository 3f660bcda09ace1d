//! Constructors for the representation families.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{checked_sqrt, sqrt_gap, Axis, Basis, FamilyKind, RepFamily, RepWindow, Sparse};
use crate::error::{domain, Error, Result};
use crate::qarith::{qnum_sym, QContext};

fn family(kind: FamilyKind, window: RepWindow, basis: Basis, ctx: &QContext) -> RepFamily {
    RepFamily {
        kind,
        params: BTreeMap::new(),
        ops: BTreeMap::new(),
        window,
        basis: Arc::new(basis),
        m_values: None,
        ctx: ctx.clone(),
    }
}

/// Triplets for a ladder operator acting as `A|s⟩ = Σ c |s + shift⟩`.
fn ladder(basis: &Basis, mut coeff: impl FnMut(&[i64]) -> Result<Vec<(Vec<i64>, f64)>>) -> Result<Sparse> {
    let mut t = Vec::new();
    for (j, l) in basis.labels().iter().enumerate() {
        for (shift, c) in coeff(l)? {
            if c == 0.0 {
                continue;
            }
            let target: Vec<i64> = l.iter().zip(&shift).map(|(a, b)| a + b).collect();
            if let Some(i) = basis.index_of(&target) {
                t.push((i, j, c));
            }
        }
    }
    Ok(Sparse::from_triplets(basis.len(), t))
}

fn diag_of(basis: &Basis, f: impl Fn(&[i64]) -> f64) -> Sparse {
    Sparse::diag(&basis.labels().iter().map(|l| f(l)).collect::<Vec<_>>())
}

fn expect_axes(window: &RepWindow, names: &[&str]) -> Result<()> {
    let got: Vec<&str> = window.axes.iter().map(|a| a.name.as_str()).collect();
    if got != names {
        return Err(Error::Config(format!("window axes {got:?} do not match the expected {names:?}")));
    }
    Ok(())
}

/// `q^a − 1` without cancellation for small `a ln q`.
fn qpow_m1(q: f64, a: f64) -> f64 {
    (a * q.ln()).exp_m1()
}

/// One-axis window `[lo, hi]`.
pub fn window_1d(name: &str, lo: i64, hi: i64, margin: i64) -> Result<RepWindow> {
    RepWindow::new(vec![Axis::new(name, lo, hi, false, false)], margin)
}

/// Finite-dimensional (`d = 1/λ`) or infinite-dimensional (`d ≤ 0`) family
/// with `T³|m⟩ = (1/λ − d q^{−4m})|m⟩`, labelled by `dm = m − m̄ ≤ 0`.
///
/// The window has one axis `dm`; for `d = 1/λ` it is replaced by the full
/// range `[−2m̄, 0]`.
pub fn build_t_generic(d: f64, m_bar: f64, window: &RepWindow, ctx: &QContext) -> Result<RepFamily> {
    expect_axes(window, &["dm"])?;
    let q = ctx.q();
    let lam = ctx.lambda();
    let mut w = window.clone();
    if d > 0.0 {
        if (d * lam - 1.0).abs() > 1e-12 {
            return Err(Error::InadmissibleParameters(format!("d = {d} > 0 is admissible only as d = 1/lambda = {}", 1.0 / lam)));
        }
        let two = 2.0 * m_bar;
        if m_bar < 0.0 || (two - two.round()).abs() > 1e-12 {
            return Err(Error::InadmissibleParameters(format!(
                "finite-dimensional representations need an integer or half-integer m_bar >= 0, got {m_bar}"
            )));
        }
        let n = two.round() as i64;
        w.axes[0] = Axis::new("dm", -n, 0, true, true);
    } else {
        let a = &mut w.axes[0];
        if a.hi > 0 {
            return Err(domain(format!("labels above m_bar do not exist, window reaches dm = {}", a.hi)));
        }
        a.hi_physical = a.hi == 0;
    }
    let basis = Basis::from_window(&w, |_| true);
    let m_of = |l: &[i64]| m_bar + l[0] as f64;
    // c*c(m) = (q^{2(m̄−m)} − 1)(1 − λ d q^{−2(m+m̄+1)}) / (λ² q²)
    let cc = |m: f64| -> Result<f64> {
        let a = qpow_m1(q, 2.0 * (m_bar - m));
        let b = if d > 0.0 { -qpow_m1(q, -2.0 * (m + m_bar + 1.0)) } else { 1.0 - lam * d * q.powf(-2.0 * (m + m_bar + 1.0)) };
        let r = a * b / (lam * lam * q * q);
        if r.abs() <= 1e-14 * (a.abs() * b.abs() / (lam * lam * q * q)).max(f64::MIN_POSITIVE) {
            return Ok(0.0);
        }
        checked_sqrt(r, "T+ matrix element")
    };
    let tp = ladder(&basis, |l| Ok(vec![(vec![1], cc(m_of(l))?)]))?;
    let tm = ladder(&basis, |l| Ok(vec![(vec![-1], q * q * cc(m_of(l) - 1.0)?)]))?;
    let mut fam = family(FamilyKind::TGeneric, w, basis, ctx);
    let b = fam.basis.clone();
    fam.insert("T3", diag_of(&b, |l| 1.0 / lam - d * q.powf(-4.0 * m_of(l))), vec![vec![0]]);
    fam.insert("T+", tp, vec![vec![1]]);
    fam.insert("T-", tm, vec![vec![-1]]);
    fam.insert("tau", diag_of(&b, |l| lam * d * q.powf(-4.0 * m_of(l))), vec![vec![0]]);
    fam.params.insert("d".into(), d);
    fam.params.insert("m_bar".into(), m_bar);
    if d != 0.0 {
        fam.m_values = Some(b.labels().iter().map(|l| m_of(l)).collect());
    }
    Ok(fam)
}

/// The `t` algebra representation on `|m_t⟩`, `m_t ≤ 0`, with
/// `d_t = −q²/λ` and `m̄_t = 0`. Window axis `m_t`.
pub fn build_t_special(window: &RepWindow, ctx: &QContext) -> Result<RepFamily> {
    expect_axes(window, &["m_t"])?;
    let mut w = window.clone();
    if w.axes[0].hi > 0 {
        return Err(domain(format!("m_t must be <= 0, window reaches m_t = {}", w.axes[0].hi)));
    }
    w.axes[0].hi_physical = w.axes[0].hi == 0;
    let q = ctx.q();
    let lam = ctx.lambda();
    let basis = Basis::from_window(&w, |_| true);
    let tp = ladder(&basis, |l| {
        let mt = l[0] as f64;
        Ok(vec![(vec![1], checked_sqrt(qpow_m1(q, -4.0 * mt), "t+")? / (lam * q))])
    })?;
    let tm = ladder(&basis, |l| {
        let mt = l[0] as f64;
        Ok(vec![(vec![-1], q / lam * checked_sqrt(qpow_m1(q, -4.0 * (mt - 1.0)), "t-")?)])
    })?;
    let mut fam = family(FamilyKind::TSpecial, w, basis, ctx);
    let b = fam.basis.clone();
    fam.insert("T3", diag_of(&b, |l| (1.0 + q * q * q.powi(-4 * l[0] as i32)) / lam), vec![vec![0]]);
    fam.insert("T+", tp, vec![vec![1]]);
    fam.insert("T-", tm, vec![vec![-1]]);
    fam.insert("tau", diag_of(&b, |l| -q * q * q.powi(-4 * l[0] as i32)), vec![vec![0]]);
    fam.params.insert("d".into(), -q * q / lam);
    fam.params.insert("m_bar".into(), 0.0);
    fam.m_values = Some(b.labels().iter().map(|l| l[0] as f64).collect());
    Ok(fam)
}

/// Homogeneous coordinates `X R⁻¹` on `|m_t⟩`; `sign` picks one of the two
/// inequivalent representations. `R2` is the identity in these units.
pub fn build_x_over_r(sign: i32, window: &RepWindow, ctx: &QContext) -> Result<RepFamily> {
    expect_axes(window, &["m_t"])?;
    let mut w = window.clone();
    if w.axes[0].hi > 0 {
        return Err(domain(format!("m_t must be <= 0, window reaches m_t = {}", w.axes[0].hi)));
    }
    w.axes[0].hi_physical = w.axes[0].hi == 0;
    let s = if sign < 0 { -1.0 } else { 1.0 };
    let q = ctx.q();
    let k = 1.0 / (1.0 + q * q).sqrt();
    let basis = Basis::from_window(&w, |_| true);
    let xp = ladder(&basis, |l| {
        let mt = l[0] as f64;
        Ok(vec![(vec![1], -s * q * k * checked_sqrt(-qpow_m1(q, 4.0 * mt), "X+ R^-1")?)])
    })?;
    let xm = ladder(&basis, |l| {
        let mt = l[0] as f64;
        Ok(vec![(vec![-1], s * k * checked_sqrt(-qpow_m1(q, 4.0 * (mt - 1.0)), "X- R^-1")?)])
    })?;
    let mut fam = family(FamilyKind::XOverR, w, basis, ctx);
    let b = fam.basis.clone();
    fam.insert("X3", diag_of(&b, |l| s * q.powi(2 * l[0] as i32 - 1)), vec![vec![0]]);
    fam.insert("X+", xp, vec![vec![1]]);
    fam.insert("X-", xm, vec![vec![-1]]);
    fam.insert("R2", Sparse::identity(b.len()), vec![vec![0]]);
    fam.params.insert("sign".into(), s);
    Ok(fam)
}

/// `κ(x) = 1/(q²λ²) − α x + d_k x² / (λ q⁴)`, zero within rounding.
fn kappa(x: f64, d_k: f64, alpha: f64, q: f64, lam: f64) -> f64 {
    let a = 1.0 / (q * q * lam * lam);
    let b = alpha * x;
    let c = d_k * x * x / (lam * q.powi(4));
    let v = a - b + c;
    if v.abs() <= 1e-13 * (a.abs() + b.abs() + c.abs()) {
        0.0
    } else {
        v
    }
}

/// The `K` algebra representation with `K⁺|m⟩ = √κ(q^{−2m}) |m+1⟩`,
/// `K⁻|m⟩ = −q² √κ(q^{−2(m−1)}) |m−1⟩`, `m = m0 + m_k`. Window axis `m_k`.
/// Edges where `κ` vanishes are physical.
pub fn build_k_generic(d_k: f64, alpha: f64, m0: f64, window: &RepWindow, ctx: &QContext) -> Result<RepFamily> {
    expect_axes(window, &["m_k"])?;
    let q = ctx.q();
    let lam = ctx.lambda();
    let kap = |m: f64| kappa(q.powf(-2.0 * m), d_k, alpha, q, lam);
    let mut w = window.clone();
    let (lo, hi) = (w.axes[0].lo, w.axes[0].hi);
    for n in lo..hi {
        let v = kap(m0 + n as f64);
        if v < 0.0 {
            return Err(Error::Window(format!("kappa(q^(-2m)) = {v:e} < 0 at m = {}", m0 + n as f64)));
        }
    }
    w.axes[0].lo_physical = kap(m0 + lo as f64 - 1.0) == 0.0;
    w.axes[0].hi_physical = kap(m0 + hi as f64) == 0.0;
    let basis = Basis::from_window(&w, |_| true);
    let kp = ladder(&basis, |l| Ok(vec![(vec![1], checked_sqrt(kap(m0 + l[0] as f64), "K+")?)]))?;
    let km = ladder(&basis, |l| Ok(vec![(vec![-1], -q * q * checked_sqrt(kap(m0 + l[0] as f64 - 1.0), "K-")?)]))?;
    let mut fam = family(FamilyKind::KGeneric, w, basis, ctx);
    let b = fam.basis.clone();
    fam.insert("K3", diag_of(&b, |l| 1.0 / lam - d_k * q.powf(-4.0 * (m0 + l[0] as f64))), vec![vec![0]]);
    fam.insert("K+", kp, vec![vec![1]]);
    fam.insert("K-", km, vec![vec![-1]]);
    fam.insert("tau", diag_of(&b, |l| lam * d_k * q.powf(-4.0 * (m0 + l[0] as f64))), vec![vec![0]]);
    fam.params.insert("d".into(), d_k);
    fam.params.insert("alpha".into(), alpha);
    fam.params.insert("m0".into(), m0);
    fam.m_values = Some(b.labels().iter().map(|l| m0 + l[0] as f64).collect());
    Ok(fam)
}

/// The `K` representation entering orbital angular momentum:
/// `d_k = −1/(λq²)`, lowest weight `m_k = 0`. Window axis `m_k`, `m_k ≥ 0`.
pub fn build_k_orbital(window: &RepWindow, ctx: &QContext) -> Result<RepFamily> {
    expect_axes(window, &["m_k"])?;
    if window.axes[0].lo < 0 {
        return Err(domain(format!("m_k must be >= 0, window reaches m_k = {}", window.axes[0].lo)));
    }
    let mut w = window.clone();
    w.axes[0].lo_physical = w.axes[0].lo == 0;
    let q = ctx.q();
    let lam = ctx.lambda();
    let basis = Basis::from_window(&w, |_| true);
    let kp = ladder(&basis, |l| {
        let mk = l[0] as f64;
        Ok(vec![(vec![1], checked_sqrt(-qpow_m1(q, -4.0 * (mk + 1.0)), "K+")? / (q * lam))])
    })?;
    let km = ladder(&basis, |l| {
        let mk = l[0] as f64;
        Ok(vec![(vec![-1], -q / lam * checked_sqrt(-qpow_m1(q, -4.0 * mk), "K-")?)])
    })?;
    let mut fam = family(FamilyKind::KOrbital, w, basis, ctx);
    let b = fam.basis.clone();
    fam.insert("K3", diag_of(&b, |l| (1.0 + q.powi(-2 - 4 * l[0] as i32)) / lam), vec![vec![0]]);
    fam.insert("K+", kp, vec![vec![1]]);
    fam.insert("K-", km, vec![vec![-1]]);
    fam.insert("tau", diag_of(&b, |l| -q.powi(-2 - 4 * l[0] as i32)), vec![vec![0]]);
    fam.params.insert("d".into(), -1.0 / (lam * q * q));
    fam.params.insert("alpha".into(), 0.0);
    fam.params.insert("m0".into(), 0.0);
    fam.m_values = Some(b.labels().iter().map(|l| l[0] as f64).collect());
    Ok(fam)
}

fn check_tk_window(window: &RepWindow) -> Result<RepWindow> {
    expect_axes(window, &["m_t", "m_k"])?;
    let mut w = window.clone();
    if w.axes[0].hi > 0 {
        return Err(domain(format!("m_t must be <= 0, window reaches m_t = {}", w.axes[0].hi)));
    }
    if w.axes[1].lo < 0 {
        return Err(domain(format!("m_k must be >= 0, window reaches m_k = {}", w.axes[1].lo)));
    }
    w.axes[0].hi_physical = w.axes[0].hi == 0;
    w.axes[1].lo_physical = w.axes[1].lo == 0;
    Ok(w)
}

/// Orbital angular momentum on `|m_t, m_k⟩`. Window axes `m_t`, `m_k`.
pub fn build_t_orb(window: &RepWindow, ctx: &QContext) -> Result<RepFamily> {
    let w = check_tk_window(window)?;
    let q = ctx.q();
    let lam = ctx.lambda();
    let basis = Basis::from_window(&w, |_| true);
    let tp = ladder(&basis, |l| {
        let (mt, mk) = (l[0] as f64, l[1] as f64);
        Ok(vec![
            (vec![1, 0], checked_sqrt(qpow_m1(q, -4.0 * mt), "T+")? / (lam * q)),
            (vec![0, 1], q.powf(-2.0 * mt) / lam * checked_sqrt(-qpow_m1(q, -4.0 * (mk + 1.0)), "T+")?),
        ])
    })?;
    let tm = ladder(&basis, |l| {
        let (mt, mk) = (l[0] as f64, l[1] as f64);
        Ok(vec![
            (vec![-1, 0], q / lam * checked_sqrt(qpow_m1(q, -4.0 * (mt - 1.0)), "T-")?),
            (vec![0, -1], q * q / lam * q.powf(-2.0 * mt) * checked_sqrt(-qpow_m1(q, -4.0 * mk), "T-")?),
        ])
    })?;
    let mut fam = family(FamilyKind::TOrbTensor, w, basis, ctx);
    let b = fam.basis.clone();
    let m = |l: &[i64]| (l[0] + l[1]) as f64;
    fam.insert("T3", diag_of(&b, |l| -qpow_m1(q, -4.0 * m(l)) / lam), vec![vec![0, 0]]);
    fam.insert("T+", tp, vec![vec![1, 0], vec![0, 1]]);
    fam.insert("T-", tm, vec![vec![-1, 0], vec![0, -1]]);
    fam.insert("tau", diag_of(&b, |l| q.powf(-4.0 * m(l))), vec![vec![0, 0]]);
    fam.params.insert("d".into(), 1.0 / lam);
    fam.m_values = Some(b.labels().iter().map(|l| m(l)).collect());
    Ok(fam)
}

/// `r₀` of the `|M, l, m⟩` basis for a given `z₀`: `r₀ = q z₀`.
pub fn r0_from_z0(z0: f64, ctx: &QContext) -> f64 {
    ctx.q() * z0
}

pub fn z0_from_r0(r0: f64, ctx: &QContext) -> f64 {
    r0 / ctx.q()
}

/// Joint representation of `X`, `R²` and `T_orb` on `|M, ν, m⟩` with
/// `ν = m_t + M`, `m = m_t + m_k`. Window axes `m_t`, `m_k`; the sign of
/// `z₀` is replaced by `sigma`.
pub fn build_joint(big_m: i64, z0: f64, sigma: i32, window: &RepWindow, ctx: &QContext) -> Result<RepFamily> {
    let w = check_tk_window(window)?;
    if !(z0.is_finite() && z0 != 0.0) {
        return Err(domain(format!("z0 must be finite and nonzero, got {z0}")));
    }
    let q = ctx.q();
    let lam = ctx.lambda();
    let z = if sigma < 0 { -z0.abs() } else { z0.abs() };
    let s1 = (1.0 + q * q).sqrt();
    let bm = big_m as f64;
    let basis = Basis::from_window(&w, |_| true);
    let nu = |l: &[i64]| (l[0] + big_m) as f64;
    let m = |l: &[i64]| (l[0] + l[1]) as f64;
    let xp = ladder(&basis, |l| {
        let r = sqrt_gap(q.powf(4.0 * bm), q.powf(4.0 * nu(l)), "X+")?;
        Ok(vec![(vec![1, 0], -q * q * z / s1 * r)])
    })?;
    let xm = ladder(&basis, |l| {
        let r = sqrt_gap(q.powf(4.0 * bm), q.powf(4.0 * (nu(l) - 1.0)), "X-")?;
        Ok(vec![(vec![-1, 0], q * z / s1 * r)])
    })?;
    let tp = ladder(&basis, |l| {
        let (n, mm) = (nu(l), m(l));
        Ok(vec![
            (vec![1, 0], checked_sqrt(qpow_m1(q, 4.0 * (bm - n)), "T+")? / (q * q - 1.0)),
            (vec![0, 1], sqrt_gap(q.powf(4.0 * (bm - n)), q.powf(-4.0 * (mm + 1.0)), "T+")? / lam),
        ])
    })?;
    let tm = ladder(&basis, |l| {
        let (n, mm) = (nu(l), m(l));
        Ok(vec![
            (vec![-1, 0], q * q / (q * q - 1.0) * checked_sqrt(qpow_m1(q, 4.0 * (bm - n + 1.0)), "T-")?),
            (vec![0, -1], q * q / lam * sqrt_gap(q.powf(4.0 * (bm - n)), q.powf(-4.0 * mm), "T-")?),
        ])
    })?;
    let mut fam = family(FamilyKind::XTRJoint, w, basis, ctx);
    let b = fam.basis.clone();
    fam.insert("X3", diag_of(&b, |l| z * q.powf(2.0 * nu(l))), vec![vec![0, 0]]);
    fam.insert("X+", xp, vec![vec![1, 0]]);
    fam.insert("X-", xm, vec![vec![-1, 0]]);
    fam.insert("R2", diag_of(&b, |_| q.powf(4.0 * bm + 2.0) * z0 * z0), vec![vec![0, 0]]);
    fam.insert("T3", diag_of(&b, |l| -qpow_m1(q, -4.0 * m(l)) / lam), vec![vec![0, 0]]);
    fam.insert("T+", tp, vec![vec![1, 0], vec![0, 1]]);
    fam.insert("T-", tm, vec![vec![-1, 0], vec![0, -1]]);
    fam.insert("tau", diag_of(&b, |l| q.powf(-4.0 * m(l))), vec![vec![0, 0]]);
    fam.params.insert("M".into(), bm);
    fam.params.insert("z0".into(), z0.abs());
    fam.params.insert("sigma".into(), if sigma < 0 { -1.0 } else { 1.0 });
    fam.params.insert("d".into(), 1.0 / lam);
    fam.m_values = Some(b.labels().iter().map(|l| m(l)).collect());
    Ok(fam)
}

/// `⟨M, l+1, m| X³ |M, l, m⟩ = r₀ q^{2M+m} √([l+m+1][l−m+1] / ([2l+1][2l+3]))`.
pub fn l_basis_x3_coupling(big_m: i64, r0: f64, l: i64, m: i64, ctx: &QContext) -> f64 {
    let b = |a: i64| qnum_sym(a as f64, ctx);
    let num = b(l + m + 1) * b(l - m + 1);
    if num <= 0.0 {
        return 0.0;
    }
    r0 * ctx.qpow(2 * big_m + m) * (num / (b(2 * l + 1) * b(2 * l + 3))).sqrt()
}

/// The basis `|M, l, m⟩` diagonalising `T²_orb`, `T³_orb` and `R²`, with
/// `0 ≤ l ≤ l_max`, `|m| ≤ l`, and the coordinates acting as ladder operators in `l`.
pub fn build_l_basis(big_m: i64, r0: f64, l_max: i64, margin: i64, ctx: &QContext) -> Result<RepFamily> {
    if l_max < 0 {
        return Err(Error::Config(format!("l_max must be >= 0, got {l_max}")));
    }
    let w = RepWindow::new(vec![Axis::new("l", 0, l_max, true, false), Axis::new("m", -l_max, l_max, true, true)], margin)?;
    let q = ctx.q();
    let lam = ctx.lambda();
    let b = |a: i64| qnum_sym(a as f64, ctx);
    let basis = Basis::from_window(&w, |l| l[1].abs() <= l[0]);
    let pre = |m: i64| r0 * q.powi((2 * big_m + m) as i32);
    let ratio = |num: f64, den: f64| if num <= 0.0 { 0.0 } else { (num / den).sqrt() };
    let x3 = ladder(&basis, |lab| {
        let (l, m) = (lab[0], lab[1]);
        Ok(vec![
            (vec![1, 0], l_basis_x3_coupling(big_m, r0, l, m, ctx)),
            (vec![-1, 0], if l > 0 { l_basis_x3_coupling(big_m, r0, l - 1, m, ctx) } else { 0.0 }),
        ])
    })?;
    let xp = ladder(&basis, |lab| {
        let (l, m) = (lab[0], lab[1]);
        Ok(vec![
            (vec![1, 1], pre(m) * q.powi(-l as i32) * ratio(b(l + m + 1) * b(l + m + 2), b(2) * b(2 * l + 1) * b(2 * l + 3))),
            (vec![-1, 1], -pre(m) * q.powi(l as i32 + 1) * ratio(b(l - m) * b(l - m - 1), b(2) * b(2 * l + 1) * b(2 * l - 1))),
        ])
    })?;
    let xm = ladder(&basis, |lab| {
        let (l, m) = (lab[0], lab[1]);
        Ok(vec![
            (vec![1, -1], pre(m) * q.powi(l as i32) * ratio(b(l - m + 1) * b(l - m + 2), b(2) * b(2 * l + 1) * b(2 * l + 3))),
            (
                vec![-1, -1],
                -pre(m) * q.powi(-(l as i32) - 1) * ratio(b(l + m) * b(l + m - 1), b(2) * b(2 * l + 1) * b(2 * l - 1)),
            ),
        ])
    })?;
    let mut fam = family(FamilyKind::LBasis, w, basis, ctx);
    let bs = fam.basis.clone();
    fam.insert("T2", diag_of(&bs, |l| q * b(l[0]) * b(l[0] + 1)), vec![vec![0, 0]]);
    fam.insert("T3", diag_of(&bs, |l| -qpow_m1(q, -4.0 * l[1] as f64) / lam), vec![vec![0, 0]]);
    fam.insert("tau", diag_of(&bs, |l| q.powf(-4.0 * l[1] as f64)), vec![vec![0, 0]]);
    fam.insert("X3", x3, vec![vec![1, 0], vec![-1, 0]]);
    fam.insert("X+", xp, vec![vec![1, 1], vec![-1, 1]]);
    fam.insert("X-", xm, vec![vec![1, -1], vec![-1, -1]]);
    fam.insert("R2", diag_of(&bs, |_| r0 * r0 * q.powf(4.0 * big_m as f64)), vec![vec![0, 0]]);
    fam.params.insert("M".into(), big_m as f64);
    fam.params.insert("r0".into(), r0);
    fam.params.insert("l_max".into(), l_max as f64);
    fam.params.insert("d".into(), 1.0 / lam);
    fam.m_values = Some(bs.labels().iter().map(|l| l[1] as f64).collect());
    Ok(fam)
}

/// Window over `m_t ∈ [−depth, 0]`, `m_k ∈ [0, width]`.
pub fn window_tk(depth: i64, width: i64, margin: i64) -> Result<RepWindow> {
    RepWindow::new(vec![Axis::new("m_t", -depth, 0, false, true), Axis::new("m_k", 0, width, true, false)], margin)
}
