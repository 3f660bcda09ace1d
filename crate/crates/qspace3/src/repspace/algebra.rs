//! Casimir, orbital `L` operators and the two comultiplication rules.

use std::sync::Arc;

use super::{FamilyKind, LabeledOperator, RepFamily, Sparse};
use crate::error::{domain, Error, Result};

/// How [`casimir`] treats families whose `τ` is not positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CasimirMode {
    /// Build the matrix; requires `τ > 0` on every state.
    Matrix,
    /// Return the fixed value `−(1+q²)/λ²` of the `t` and orbital `K`
    /// representations, whose `τ` is negative.
    Scalar,
}

/// `T±₁ ⊗ 1 + τ₁^{1/2} ⊗ T±₂` or `T±₁ ⊗ 1 ± (−τ₁)^{1/2} ⊗ T±₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoproductVariant {
    Standard,
    Beta,
}

/// `"T"` or `"K"`, whichever generators the family carries.
pub(crate) fn generator_prefix(f: &RepFamily) -> Result<&'static str> {
    for p in ["T", "K"] {
        if ["3", "+", "-"].iter().all(|s| f.ops.contains_key(&format!("{p}{s}"))) {
            return Ok(p);
        }
    }
    Err(Error::Structural(format!("family {:?} carries neither T nor K generators", f.kind)))
}

fn tau_diag(f: &RepFamily) -> Result<Vec<f64>> {
    Ok(f.op("tau")?.diagonal())
}

fn positive_tau(f: &RepFamily, what: &str) -> Result<Vec<f64>> {
    let tau = tau_diag(f)?;
    if let Some(t) = tau.iter().find(|&&t| t <= 0.0) {
        return Err(domain(format!("{what} needs tau > 0, found eigenvalue {t:e} in {:?}", f.kind)));
    }
    Ok(tau)
}

fn pair_shifts(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    for x in a {
        for y in b {
            let s: Vec<i64> = x.iter().zip(y).map(|(u, v)| u + v).collect();
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    out
}

/// `τ^{−1/2} T⁺T⁻` and its shift signature.
fn tau_inv_half_tptm(f: &RepFamily, p: &str, tau: &[f64]) -> Result<(Sparse, Vec<Vec<i64>>)> {
    let tp = f.op(&format!("{p}+"))?;
    let tm = f.op(&format!("{p}-"))?;
    let inv_half = Sparse::diag(&tau.iter().map(|t| 1.0 / t.sqrt()).collect::<Vec<_>>());
    Ok((inv_half.mul(&tp.matrix.mul(&tm.matrix)), pair_shifts(&tp.shifts, &tm.shifts)))
}

/// `T² = (q²/λ²) τ^{1/2} + (1/λ²) τ^{−1/2} + τ^{−1/2} T⁺T⁻ − (1+q²)/λ²`.
///
/// The diagonal part is evaluated as `(q²s − 1)(s − 1)/(s λ²)`, `s = τ^{1/2}`,
/// which avoids cancellation near `s = 1`.
pub fn casimir(family: &RepFamily, mode: CasimirMode) -> Result<LabeledOperator> {
    let q = family.ctx.q();
    let lam = family.ctx.lambda();
    let zero_shift = vec![0; family.basis.axes.len()];
    if mode == CasimirMode::Scalar {
        if !matches!(family.kind, FamilyKind::TSpecial | FamilyKind::KOrbital) {
            return Err(domain(format!("no fixed Casimir value is assigned to {:?}", family.kind)));
        }
        let v = -(1.0 + q * q) / (lam * lam);
        return Ok(LabeledOperator::new("T2", family.basis.clone(), Sparse::diag(&vec![v; family.dim()]), vec![zero_shift]));
    }
    let p = generator_prefix(family)?;
    let tau = positive_tau(family, "the Casimir matrix")?;
    let lq = q.ln();
    let d: Vec<f64> = tau
        .iter()
        .map(|t| {
            let ls = 0.5 * t.ln();
            (2.0 * lq + ls).exp_m1() * ls.exp_m1() / (ls.exp() * lam * lam)
        })
        .collect();
    let (tt, mut shifts) = tau_inv_half_tptm(family, p, &tau)?;
    if !shifts.contains(&zero_shift) {
        shifts.push(zero_shift);
    }
    Ok(LabeledOperator::new("T2", family.basis.clone(), Sparse::diag(&d).add_scaled(&tt, 1.0), shifts))
}

/// `L⁺ = τ^{−1/2}T⁺ / (q²√(1+q²))`, `L⁻ = −τ^{−1/2}T⁻ / (q³√(1+q²))` and
/// `L³ = −(q² (τ^{−1/2} − τ^{1/2})/λ − λ τ^{−1/2}T⁺T⁻) / (q³(1+q²))`,
/// the last being the Casimir form rewritten without cancellation.
pub fn l_operators(family: &RepFamily) -> Result<Vec<LabeledOperator>> {
    let q = family.ctx.q();
    let lam = family.ctx.lambda();
    let p = generator_prefix(family)?;
    let tau = positive_tau(family, "the L operators")?;
    let tp = family.op(&format!("{p}+"))?;
    let tm = family.op(&format!("{p}-"))?;
    let inv_half = Sparse::diag(&tau.iter().map(|t| 1.0 / t.sqrt()).collect::<Vec<_>>());
    let s1 = (1.0 + q * q).sqrt();
    let lp = inv_half.mul(&tp.matrix).scale(1.0 / (q * q * s1));
    let lm = inv_half.mul(&tm.matrix).scale(-1.0 / (q.powi(3) * s1));
    // τ^{−1/2} − τ^{1/2} = −2 sinh(ln τ / 2)
    let gap: Vec<f64> = tau.iter().map(|t| -2.0 * (0.5 * t.ln()).sinh()).collect();
    let (tt, mut shifts) = tau_inv_half_tptm(family, p, &tau)?;
    let zero_shift = vec![0; family.basis.axes.len()];
    if !shifts.contains(&zero_shift) {
        shifts.push(zero_shift);
    }
    let l3 = Sparse::diag(&gap).scale(q * q / lam).add_scaled(&tt, -lam).scale(-1.0 / (q.powi(3) * (1.0 + q * q)));
    Ok(vec![
        LabeledOperator::new("L+", family.basis.clone(), lp, tp.shifts.clone()),
        LabeledOperator::new("L-", family.basis.clone(), lm, tm.shifts.clone()),
        LabeledOperator::new("L3", family.basis.clone(), l3, shifts),
    ])
}

fn lift_shifts(a: &[Vec<i64>], width: usize, first: bool) -> Vec<Vec<i64>> {
    a.iter()
        .map(|s| {
            let z = vec![0; width];
            if first {
                s.iter().chain(&z).copied().collect()
            } else {
                z.iter().chain(s).copied().collect()
            }
        })
        .collect()
}

/// Tensor product representation on `rep1 ⊗ rep2`.
///
/// `T³ = T³₁ ⊗ 1 + τ₁ ⊗ T³₂`, `τ = τ₁ ⊗ τ₂` and `d = λ d₁ d₂`. The
/// standard rule needs `τ₁ > 0`, the β rule `τ₁ < 0`, so that the square
/// roots are hermitean. Operators of `rep1` other than its generators
/// (coordinates, radius) are carried along as `A ⊗ 1`.
pub fn coproduct(rep1: &RepFamily, rep2: &RepFamily, variant: CoproductVariant) -> Result<RepFamily> {
    if (rep1.ctx.q() - rep2.ctx.q()).abs() > 0.0 {
        return Err(Error::Structural("coproduct factors use different q".into()));
    }
    let p1 = generator_prefix(rep1)?;
    let p2 = generator_prefix(rep2)?;
    let tau1 = tau_diag(rep1)?;
    let tau2 = tau_diag(rep2)?;
    let (root, sign_minus) = match variant {
        CoproductVariant::Standard => {
            if let Some(t) = tau1.iter().find(|&&t| t <= 0.0) {
                return Err(domain(format!("the standard coproduct needs tau_1 > 0 (tau^(1/2) hermitean), found {t:e}")));
            }
            (tau1.iter().map(|t| t.sqrt()).collect::<Vec<_>>(), 1.0)
        }
        CoproductVariant::Beta => {
            if let Some(t) = tau1.iter().find(|&&t| t >= 0.0) {
                return Err(domain(format!("the beta coproduct needs tau_1 < 0 ((-tau)^(1/2) hermitean), found {t:e}")));
            }
            (tau1.iter().map(|t| (-t).sqrt()).collect::<Vec<_>>(), -1.0)
        }
    };
    let n2 = rep2.dim();
    let w1 = rep1.basis.axes.len();
    let w2 = rep2.basis.axes.len();
    let i2 = Sparse::identity(n2);
    let root = Sparse::diag(&root);
    let t1 = Sparse::diag(&tau1);
    let g1 = |s: &str| rep1.op(&format!("{p1}{s}"));
    let g2 = |s: &str| rep2.op(&format!("{p2}{s}"));
    let basis = Arc::new(rep1.basis.product(&rep2.basis));
    let mut out = RepFamily {
        kind: FamilyKind::Coproduct,
        params: Default::default(),
        ops: Default::default(),
        window: rep1.window.product(&rep2.window),
        basis,
        m_values: None,
        ctx: rep1.ctx.clone(),
    };
    let both = |a: &LabeledOperator, b: &LabeledOperator| {
        let mut s = lift_shifts(&a.shifts, w2, true);
        for x in lift_shifts(&b.shifts, w1, false) {
            if !s.contains(&x) {
                s.push(x);
            }
        }
        s
    };
    let t3 = g1("3")?.matrix.kron(&i2).add_scaled(&t1.kron(&g2("3")?.matrix), 1.0);
    out.insert("T3", t3, vec![vec![0; w1 + w2]]);
    let tp = g1("+")?.matrix.kron(&i2).add_scaled(&root.kron(&g2("+")?.matrix), 1.0);
    out.insert("T+", tp, both(g1("+")?, g2("+")?));
    let tm = g1("-")?.matrix.kron(&i2).add_scaled(&root.kron(&g2("-")?.matrix), sign_minus);
    out.insert("T-", tm, both(g1("-")?, g2("-")?));
    out.insert("tau", t1.kron(&Sparse::diag(&tau2)), vec![vec![0; w1 + w2]]);
    for (k, op) in &rep1.ops {
        if k.starts_with(p1) || k == "tau" {
            continue;
        }
        out.insert(k, op.matrix.kron(&i2), lift_shifts(&op.shifts, w2, true));
    }
    let lam = rep1.ctx.lambda();
    if let (Some(d1), Some(d2)) = (rep1.param("d"), rep2.param("d")) {
        out.params.insert("d".into(), lam * d1 * d2);
    }
    out.params.insert("beta".into(), if variant == CoproductVariant::Beta { 1.0 } else { 0.0 });
    if let (Some(m1), Some(m2)) = (&rep1.m_values, &rep2.m_values) {
        out.m_values = Some(m1.iter().flat_map(|a| m2.iter().map(move |b| a + b)).collect());
    }
    Ok(out)
}

/// Entrywise sum of the magnitudes of the terms [`coproduct`] adds up for
/// `key` (`"T3"`, `"T+"`, `"T-"` or `"tau"`). Entries of the coproduct that
/// cancel to near zero are accurate relative to this scale only.
pub fn coproduct_term_scale(rep1: &RepFamily, rep2: &RepFamily, key: &str) -> Result<Sparse> {
    let p1 = generator_prefix(rep1)?;
    let p2 = generator_prefix(rep2)?;
    let tau1 = tau_diag(rep1)?;
    let root = Sparse::diag(&tau1.iter().map(|t| t.abs().sqrt()).collect::<Vec<_>>());
    let i2 = Sparse::identity(rep2.dim());
    let abs = |f: &RepFamily, k: String| f.op(&k).map(|o| o.matrix.abs());
    Ok(match key {
        "tau" => abs(rep1, "tau".into())?.kron(&abs(rep2, "tau".into())?),
        "T3" => {
            abs(rep1, format!("{p1}3"))?.kron(&i2).add_scaled(&Sparse::diag(&tau1).abs().kron(&abs(rep2, format!("{p2}3"))?), 1.0)
        }
        "T+" | "T-" => {
            let s = &key[1..];
            abs(rep1, format!("{p1}{s}"))?.kron(&i2).add_scaled(&root.kron(&abs(rep2, format!("{p2}{s}"))?), 1.0)
        }
        _ => return Err(Error::Structural(format!("no coproduct rule for {key:?}"))),
    })
}

/// Adds a finite-dimensional spin representation to orbital angular
/// momentum with the standard rule.
pub fn add_spin(orb: &RepFamily, spin: &RepFamily) -> Result<RepFamily> {
    let lam = spin.ctx.lambda();
    let finite = spin.kind == FamilyKind::TGeneric && spin.param("d").is_some_and(|d| (d * lam - 1.0).abs() < 1e-12);
    if !finite {
        return Err(Error::InadmissibleParameters(format!(
            "spin must be a finite-dimensional T representation (d = 1/lambda), got {:?}",
            spin.kind
        )));
    }
    let mut out = coproduct(orb, spin, CoproductVariant::Standard)?;
    out.kind = FamilyKind::SpinAdded;
    if let Some(j) = spin.param("m_bar") {
        out.params.insert("spin".into(), j);
    }
    Ok(out)
}

/// Largest relative deviation of `τ` from `λ d q^{−4m}` over all states.
pub fn group_like_defect(family: &RepFamily) -> Result<f64> {
    let d = family.param("d").ok_or_else(|| Error::Structural(format!("family {:?} has no parameter d", family.kind)))?;
    let m = family
        .m_values
        .as_ref()
        .ok_or_else(|| Error::Structural(format!("family {:?} has no magnetic quantum numbers", family.kind)))?;
    let lam = family.ctx.lambda();
    let q = family.ctx.q();
    let tau = tau_diag(family)?;
    Ok(tau
        .iter()
        .zip(m)
        .map(|(t, m)| {
            let e = lam * d * q.powf(-4.0 * m);
            (t - e).abs() / e.abs()
        })
        .fold(0.0, f64::max))
}
