//! Basis changes that diagonalise `T²_orb` on `|m_t, m_k, σ⟩` and `X³` on
//! `|M, l, m⟩`, with isometry, eigen-reproduction and completeness checks.
//!
//! ```text
//! c^{m_t,σ}_{l,m}   = √(1−q⁻²) q^{m_t−1−m} P̃ᵐₗ(σ q^{2(m_t−m−1)})        m ≥ 0
//!                   = √(1−q⁻²) q^{m_t−1}   P̃^{|m|}ₗ(σ q^{2(m_t−1)})      m < 0
//! d^{ν,σ}_{M,l,m}   = c^{ν−M,σ}_{l,m},        X³ eigenvalue z = σ r₀ q^{2ν−1}
//! ```

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;
use serde_json::json;

use crate::error::{domain, Error, Result};
use crate::qarith::{qnum_sym, QContext};
use crate::qspecial::{p_tilde_at, p_tilde_mp, QPoint};
use crate::real::{round_bits, Mp};
use crate::repspace::l_basis_x3_coupling;

/// JSON schema tag shared by every machine-readable report.
pub const SCHEMA: &str = "qspace3/1";

/// Relative eigen-residual below which an `X³` level counts as resolved by
/// an `l ≤ l_max` truncation.
pub const X3_LEVEL_TOL: f64 = 1e-9;

fn argument(l: i64, m: i64, m_t: i64, sigma: i32) -> Option<(i64, QPoint, i64)> {
    if m_t > m.min(0) || l < m.abs() {
        return None;
    }
    if m >= 0 {
        Some((m, QPoint::lattice(m_t, m, sigma), m_t - 1 - m))
    } else {
        Some((-m, QPoint::lattice(m_t, 0, sigma), m_t - 1))
    }
}

/// `c^{m_t,σ}_{l,m}`; zero outside `m_t ≤ min(0, m)`, `l ≥ |m|`.
pub fn c_coeff(l: i64, m: i64, m_t: i64, sigma: i32, ctx: &QContext) -> Result<f64> {
    let Some((am, x, e)) = argument(l, m, m_t, sigma) else {
        return Ok(0.0);
    };
    let q = ctx.q();
    Ok((1.0 - 1.0 / (q * q)).sqrt() * ctx.qpow(e) * p_tilde_at(l, am, x, ctx)?)
}

/// [`c_coeff`] to `bits` bits.
pub fn c_coeff_mp(l: i64, m: i64, m_t: i64, sigma: i32, q: f64, bits: usize) -> Result<Mp> {
    let Some((am, x, e)) = argument(l, m, m_t, sigma) else {
        return Ok(Mp::zero(bits));
    };
    let qm = Mp::from_f64(q, bits + 32);
    let one = qm.lift(1.0);
    let pre = (&one - &(&one / &(&qm * &qm))).sqrt() * qm.powi(e);
    Ok((pre * p_tilde_mp(l, am, x, q, bits + 32)?).with_bits(bits))
}

/// `d^{ν,σ}_{M,l,m}`; requires `ν ≤ M` and `m ≥ ν − M`.
pub fn d_coeff(big_m: i64, l: i64, m: i64, nu: i64, sigma: i32, ctx: &QContext) -> Result<f64> {
    if nu > big_m || m < nu - big_m {
        return Err(domain(format!("X3 eigenvectors need nu <= M and m >= nu - M, got M = {big_m}, m = {m}, nu = {nu}")));
    }
    c_coeff(l, m, nu - big_m, sigma, ctx)
}

/// `X³` eigenvalue `σ r₀ q^{2ν−1}`.
pub fn x3_eigenvalue(r0: f64, nu: i64, sigma: i32, ctx: &QContext) -> f64 {
    f64::from(sigma.signum()) * r0 * ctx.qpow(2 * nu - 1)
}

/// `T²` eigenvalue `q[l][l+1]`.
pub fn t2_eigenvalue(l: i64, ctx: &QContext) -> f64 {
    ctx.q() * qnum_sym(l as f64, ctx) * qnum_sym((l + 1) as f64, ctx)
}

/// Highest `X³` level `ν = M + min(0, m)` in the fixed-`m` block.
pub fn x3_top_level(big_m: i64, m: i64) -> i64 {
    big_m + m.min(0)
}

/// How well the truncation `l ≤ l_max` resolves the level `(ν, σ)`: the
/// relative residual `‖A d − z d‖ / (|z| ‖d‖)` of the exact eigenvector cut
/// at `l_max`. Some eigenvalue of the truncated block lies within this
/// relative distance of `z`.
pub fn x3_level_residual(big_m: i64, r0: f64, m: i64, l_max: i64, nu: i64, sigma: i32, ctx: &QContext) -> Result<f64> {
    let mut norm2 = 0.0;
    for l in m.abs()..=l_max {
        norm2 += d_coeff(big_m, l, m, nu, sigma, ctx)?.powi(2);
    }
    let spill = l_basis_x3_coupling(big_m, r0, l_max, m, ctx) * d_coeff(big_m, l_max + 1, m, nu, sigma, ctx)?;
    Ok(spill.abs() / (norm2.sqrt() * x3_eigenvalue(r0, nu, sigma, ctx).abs()))
}

/// Which basis change a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Rows `(σ, m_t)`, columns `l`: eigenvectors of `T²_orb` at fixed `m`.
    MtkToLm,
    /// Rows `l`, columns `(σ, ν)`: eigenvectors of `X³` at fixed `M`, `m`.
    LmToX3,
}

impl Direction {
    pub fn parse(s: &str) -> Result<Direction> {
        match s {
            "1" | "mtk_to_lm" => Ok(Direction::MtkToLm),
            "2" | "lm_to_x3" => Ok(Direction::LmToX3),
            _ => Err(Error::Config(format!("unknown transform direction {s:?}, expected 1 or 2"))),
        }
    }
}

/// Parameters of [`build_transform`].
#[derive(Clone, Debug, Serialize)]
pub struct TransformSpec {
    pub direction: Direction,
    pub m: i64,
    /// `M` (direction 2 only).
    pub big_m: i64,
    pub r0: f64,
    /// Largest `l`: column range for direction 1, row range for direction 2.
    pub l_max: i64,
    /// `m_t` depth for direction 1, number of `ν` levels per sign for direction 2.
    pub depth: i64,
}

/// Dense coefficient matrix of a basis change plus its certification.
#[derive(Clone, Debug, Serialize)]
pub struct TransformTable {
    pub spec: TransformSpec,
    pub q: f64,
    pub row_axes: Vec<String>,
    pub row_labels: Vec<Vec<i64>>,
    pub col_axes: Vec<String>,
    pub col_labels: Vec<Vec<i64>>,
    /// `coefficients[row][col]`.
    pub coefficients: Vec<Vec<f64>>,
    /// Columns that enter the defects (all columns for direction 1).
    pub interior_cols: Vec<bool>,
    /// `max |UᵀU − I|` over interior columns.
    pub isometry_defect: f64,
    /// The same Gram defect with the `σ = −1` half dropped (direction 1) or
    /// the `σ = −1` columns dropped (direction 2).
    pub single_sigma_defect: f64,
    /// `max |UᵀAU − diag(E)| / max(|E|, |E′|)` over interior column pairs.
    pub eigen_defect: f64,
}

fn gram_defect(u: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, &i) in cols.iter().enumerate() {
        for &j in &cols[a..] {
            let g: f64 = rows.iter().map(|&r| u[r][i] * u[r][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// Assembles the coefficient table for `spec` and certifies it.
pub fn build_transform(spec: &TransformSpec, ctx: &QContext) -> Result<TransformTable> {
    if spec.depth < 1 {
        return Err(Error::Config(format!("depth must be >= 1, got {}", spec.depth)));
    }
    if spec.l_max < spec.m.abs() {
        return Err(Error::Coverage(format!("l_max = {} is below |m| = {}", spec.l_max, spec.m.abs())));
    }
    match spec.direction {
        Direction::MtkToLm => build_direction1(spec, ctx),
        Direction::LmToX3 => build_direction2(spec, ctx),
    }
}

fn build_direction1(spec: &TransformSpec, ctx: &QContext) -> Result<TransformTable> {
    let m = spec.m;
    let top = m.min(0);
    let bottom = -spec.depth;
    if bottom > top {
        return Err(Error::Coverage(format!("depth {} does not reach below m_t = {top}", spec.depth)));
    }
    let mut rows = Vec::new();
    for sigma in [1i64, -1] {
        for mt in (bottom..=top).rev() {
            rows.push(vec![sigma, mt]);
        }
    }
    let ls: Vec<i64> = (m.abs()..=spec.l_max).collect();
    let mut u = vec![vec![0.0; ls.len()]; rows.len()];
    for (r, lab) in rows.iter().enumerate() {
        for (c, &l) in ls.iter().enumerate() {
            u[r][c] = c_coeff(l, m, lab[1], lab[0] as i32, ctx)?;
        }
    }
    let all_rows: Vec<usize> = (0..rows.len()).collect();
    let plus_rows: Vec<usize> = (0..rows.len()).filter(|&r| rows[r][0] == 1).collect();
    let cols: Vec<usize> = (0..ls.len()).collect();
    let eigen_defect = t2_congruence_defect(m, &ls, bottom, ctx)?;
    Ok(TransformTable {
        spec: spec.clone(),
        q: ctx.q(),
        row_axes: vec!["sigma".into(), "m_t".into()],
        row_labels: rows,
        col_axes: vec!["l".into()],
        col_labels: ls.iter().map(|&l| vec![l]).collect(),
        isometry_defect: gram_defect(&u, &all_rows, &cols),
        single_sigma_defect: gram_defect(&u, &plus_rows, &cols),
        coefficients: u,
        interior_cols: vec![true; ls.len()],
        eigen_defect,
    })
}

/// `T²_orb` block at fixed `m` in the tensor basis, row `m_t`:
/// diagonal and coupling to `m_t − 1`, in multiprecision.
pub(crate) fn t2_block_entries(m: i64, m_t: i64, qm: &Mp) -> (Mp, Mp) {
    let one = qm.lift(1.0);
    let q2 = qm * qm;
    let lam2 = {
        let lam = qm - &(&one / qm);
        &lam * &lam
    };
    let diag = (&q2 + &one) * (qm.powi(2 * m + 2 - 4 * m_t) - &one) / &lam2;
    let a = qm.powi(-4 * (m_t - 1));
    let rad = (&a - &one) * (&a - &qm.powi(-4 * m));
    let off = if rad.is_negative() || rad.is_zero() { qm.lift(0.0) } else { qm.powi(2 * m + 1) * rad.sqrt() / &lam2 };
    (diag, off)
}

/// Congruence `UᵀAU` of the doubled `T²_orb` block with the coefficient
/// columns. Rows `m_t ≥ bottom` of `A` are applied exactly, including their
/// coupling to `bottom − 1`. The tensor basis carries the phase `(−1)^{m_t}`
/// relative to the `c` coefficients.
fn t2_congruence_defect(m: i64, ls: &[i64], bottom: i64, ctx: &QContext) -> Result<f64> {
    let q = ctx.q();
    let top = m.min(0);
    let bits = round_bits(64.0 + 53.0 + ((4 * (top - bottom + 1) + 2 * m.abs() + 8) as f64) * q.log2() + 64.0);
    let qm = Mp::from_f64(q, bits);
    let n = (top - bottom + 2) as usize;
    let phase = |mt: i64| if mt.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    // v[σ][l][k]: phased coefficient at m_t = top − k, one extra row below.
    let mut v = Vec::new();
    for sigma in [1, -1] {
        let mut per_l = Vec::new();
        for &l in ls {
            let mut col = Vec::with_capacity(n);
            for k in 0..n as i64 {
                let mt = top - k;
                let c = c_coeff_mp(l, m, mt, sigma, q, bits)?;
                col.push(if phase(mt) < 0.0 { -c } else { c });
            }
            per_l.push(col);
        }
        v.push(per_l);
    }
    let entries: Vec<(Mp, Mp)> = (0..n as i64).map(|k| t2_block_entries(m, top - k, &qm)).collect();
    let mut worst: f64 = 0.0;
    for (j, &lj) in ls.iter().enumerate() {
        // A u_j on rows m_t ∈ [bottom, top], both σ copies.
        let mut au = Vec::new();
        for vs in &v {
            let col = &vs[j];
            let mut out = Vec::with_capacity(n - 1);
            for k in 0..n - 1 {
                let (d, off_down) = &entries[k];
                let mut acc = d * &col[k] + off_down * &col[k + 1];
                if k > 0 {
                    acc = acc + &entries[k - 1].1 * &col[k - 1];
                }
                out.push(acc);
            }
            au.push(out);
        }
        for (i, &li) in ls.iter().enumerate() {
            let mut g = qm.lift(0.0);
            for s in 0..2 {
                for k in 0..n - 1 {
                    g = g + &v[s][i][k] * &au[s][k];
                }
            }
            let ei = t2_eigenvalue(li, ctx);
            let ej = t2_eigenvalue(lj, ctx);
            let target = if i == j { ej } else { 0.0 };
            worst = worst.max((g.to_f64() - target).abs() / ei.abs().max(ej.abs()).max(1.0));
        }
    }
    Ok(worst)
}

fn build_direction2(spec: &TransformSpec, ctx: &QContext) -> Result<TransformTable> {
    let (m, big_m, r0) = (spec.m, spec.big_m, spec.r0);
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(domain(format!("r0 must be positive, got {r0}")));
    }
    let top = x3_top_level(big_m, m);
    let ls: Vec<i64> = (m.abs()..=spec.l_max).collect();
    let mut cols = Vec::new();
    for sigma in [1i64, -1] {
        for k in 0..spec.depth {
            cols.push(vec![sigma, top - k]);
        }
    }
    let mut u = vec![vec![0.0; cols.len()]; ls.len()];
    for (r, &l) in ls.iter().enumerate() {
        for (c, lab) in cols.iter().enumerate() {
            u[r][c] = d_coeff(big_m, l, m, lab[1], lab[0] as i32, ctx)?;
        }
    }
    let mut interior = Vec::with_capacity(cols.len());
    for lab in &cols {
        interior.push(x3_level_residual(big_m, r0, m, spec.l_max, lab[1], lab[0] as i32, ctx)? <= X3_LEVEL_TOL);
    }
    let rows: Vec<usize> = (0..ls.len()).collect();
    let icols: Vec<usize> = (0..cols.len()).filter(|&c| interior[c]).collect();
    let plus_cols: Vec<usize> = icols.iter().copied().filter(|&c| cols[c][0] == 1).collect();
    // X³ restricted to the block is tridiagonal in l with zero diagonal.
    let coupling: Vec<f64> = ls.iter().map(|&l| l_basis_x3_coupling(big_m, r0, l, m, ctx)).collect();
    let mut eigen_defect: f64 = 0.0;
    for &j in &icols {
        let au: Vec<f64> = (0..ls.len())
            .map(|r| {
                let mut s = 0.0;
                if r > 0 {
                    s += coupling[r - 1] * u[r - 1][j];
                }
                if r + 1 < ls.len() {
                    s += coupling[r] * u[r + 1][j];
                }
                s
            })
            .collect();
        let zj = x3_eigenvalue(r0, cols[j][1], cols[j][0] as i32, ctx);
        for &i in &icols {
            let g: f64 = (0..ls.len()).map(|r| u[r][i] * au[r]).sum();
            let zi = x3_eigenvalue(r0, cols[i][1], cols[i][0] as i32, ctx);
            let target = if i == j { zj } else { 0.0 };
            eigen_defect = eigen_defect.max((g - target).abs() / zi.abs().max(zj.abs()));
        }
    }
    Ok(TransformTable {
        spec: spec.clone(),
        q: ctx.q(),
        row_axes: vec!["l".into()],
        row_labels: ls.iter().map(|&l| vec![l]).collect(),
        col_axes: vec!["sigma".into(), "nu".into()],
        col_labels: cols,
        isometry_defect: gram_defect(&u, &rows, &icols),
        single_sigma_defect: gram_defect(&u, &rows, &plus_cols),
        coefficients: u,
        interior_cols: interior,
        eigen_defect,
    })
}

impl TransformTable {
    /// One line per coefficient: row labels, column labels, value with 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = self.row_axes.iter().map(|a| format!("row_{a}")).collect();
        header.extend(self.col_axes.iter().map(|a| format!("col_{a}")));
        header.push("coefficient".into());
        w.write_record(&header).map_err(csv_err)?;
        for (r, rl) in self.row_labels.iter().enumerate() {
            for (c, cl) in self.col_labels.iter().enumerate() {
                let mut rec: Vec<String> = rl.iter().chain(cl).map(|v| v.to_string()).collect();
                rec.push(format_sig17(self.coefficients[r][c]));
                w.write_record(&rec).map_err(csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": SCHEMA,
            "kind": "transform",
            "direction": self.spec.direction,
            "q": self.q,
            "m": self.spec.m,
            "M": self.spec.big_m,
            "r0": self.spec.r0,
            "l_max": self.spec.l_max,
            "depth": self.spec.depth,
            "row_axes": self.row_axes,
            "row_labels": self.row_labels,
            "col_axes": self.col_axes,
            "col_labels": self.col_labels,
            "interior_cols": self.interior_cols,
            "coefficients": self.coefficients,
            "isometry_defect": self.isometry_defect,
            "single_sigma_defect": self.single_sigma_defect,
            "eigen_defect": self.eigen_defect,
        })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// `x` with 17 significant digits.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// One sampled completeness pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletenessSample {
    /// `(m_t, σ)` or `(ν, σ)` of the first argument.
    pub a: (i64, i32),
    pub b: (i64, i32),
    pub sum: f64,
    pub expected: f64,
    pub defect: f64,
}

/// Completeness at one truncation.
#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    /// `"tensor"` for `Σ_l c c′` or `"x3"` for the `X³` form in `ν`.
    pub form: String,
    pub m: i64,
    pub q: f64,
    pub l_max: i64,
    pub samples: Vec<CompletenessSample>,
    pub max_defect: f64,
}

/// Two `(index, σ)` labels of a completeness sample.
pub type LabelPair = ((i64, i32), (i64, i32));

/// Which completeness relation to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompletenessForm {
    /// `Σ_l c^{m_t,σ}_{l,m} c^{m_t′,σ′}_{l,m} = δδ`, `m_t, m_t′ ≤ min(0, m)`.
    Tensor,
    /// `(1−q⁻²) Σ_l q^{ν+ν′−2} P̃(σ q^{2(ν−1)}) P̃(σ′ q^{2(ν′−1)}) = δδ`, `ν, ν′ ≤ −|m|`.
    X3,
}

/// Default sample of index pairs: all pairs of the `depth` highest labels
/// on both signs, including the diagonal.
pub fn completeness_pairs(form: CompletenessForm, m: i64, depth: i64) -> Vec<LabelPair> {
    let top = match form {
        CompletenessForm::Tensor => m.min(0),
        CompletenessForm::X3 => -m.abs(),
    };
    let pts: Vec<(i64, i32)> = [1, -1].iter().flat_map(|&s| (0..depth).map(move |k| (top - k, s))).collect();
    let mut out = Vec::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i..] {
            out.push((*a, *b));
        }
    }
    out
}

/// Evaluates the truncated completeness sums at `l_max` over `pairs`.
pub fn completeness_check(
    form: CompletenessForm,
    m: i64,
    pairs: &[LabelPair],
    l_max: i64,
    ctx: &QContext,
) -> Result<CompletenessReport> {
    if l_max < m.abs() {
        return Err(Error::Coverage(format!("l_max = {l_max} is below |m| = {}", m.abs())));
    }
    let am = m.abs();
    let top = match form {
        CompletenessForm::Tensor => m.min(0),
        CompletenessForm::X3 => -am,
    };
    // Each point's coefficients over l are computed once and shared by its pairs.
    let mut columns: HashMap<(i64, i32), Vec<f64>> = HashMap::new();
    for &(a, b) in pairs {
        for p in [a, b] {
            if p.0 > top {
                return Err(match form {
                    CompletenessForm::Tensor => domain(format!("m_t must be <= min(0, m) = {top}")),
                    CompletenessForm::X3 => domain(format!("completeness needs nu <= -|m| = {top}, got {}", p.0)),
                });
            }
            if columns.contains_key(&p) {
                continue;
            }
            let col = (am..=l_max)
                .map(|l| match form {
                    CompletenessForm::Tensor => c_coeff(l, m, p.0, p.1, ctx),
                    CompletenessForm::X3 => p_tilde_at(l, am, QPoint::lattice(p.0, 0, p.1), ctx),
                })
                .collect::<Result<Vec<f64>>>()?;
            columns.insert(p, col);
        }
    }
    let q = ctx.q();
    let mut samples = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        let (ca, cb) = (&columns[&a], &columns[&b]);
        let mut sum = 0.0;
        for k in (0..ca.len()).rev() {
            sum += ca[k] * cb[k];
        }
        if form == CompletenessForm::X3 {
            sum *= (1.0 - 1.0 / (q * q)) * q.powi((a.0 + b.0 - 2) as i32);
        }
        let expected = if a == b { 1.0 } else { 0.0 };
        samples.push(CompletenessSample { a, b, sum, expected, defect: (sum - expected).abs() });
    }
    let max_defect = samples.iter().fold(0.0f64, |w, s| w.max(s.defect));
    Ok(CompletenessReport {
        form: match form {
            CompletenessForm::Tensor => "tensor".into(),
            CompletenessForm::X3 => "x3".into(),
        },
        m,
        q: ctx.q(),
        l_max,
        samples,
        max_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    #[test]
    fn support_conditions() {
        let c = ctx(1.5);
        assert_eq!(c_coeff(1, 2, -3, 1, &c).unwrap(), 0.0);
        assert_eq!(c_coeff(3, 1, 1, 1, &c).unwrap(), 0.0);
        assert_eq!(c_coeff(3, -2, -1, 1, &c).unwrap(), 0.0);
        assert!(d_coeff(0, 2, 0, 1, 1, &c).is_err());
        assert!(d_coeff(0, 3, -2, -1, 1, &c).is_err());
    }

    #[test]
    fn multiprecision_agrees_with_double() {
        let c = ctx(1.4);
        let a = c_coeff(2, 1, -3, 1, &c).unwrap();
        let b = c_coeff_mp(2, 1, -3, 1, 1.4, 200).unwrap().to_f64();
        assert!((a - b).abs() <= 1e-15 * a.abs());
    }

    #[test]
    fn sig17_round_trips() {
        for x in [0.1, -1.0 / 3.0, 6.02214076e23, 1e-300] {
            assert_eq!(format_sig17(x).parse::<f64>().unwrap(), x);
        }
    }
}
