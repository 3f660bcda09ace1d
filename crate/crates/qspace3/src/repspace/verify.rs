//! Interior residuals of the defining relations.
//!
//! A relation is a list of terms `Σ cₖ Aₖ₁ Aₖ₂ … = 0`. For every matrix
//! entry with interior row and column the residual is
//! `|Σ terms| / Σ |terms|`; the relation's residual is the largest of these.
//! Operator names resolve against the family plus a few derived diagonal
//! operators: `1`, `A^T`, `X3^-1`, `tau^1/2`, `tau^-1/2`, `(-tau)^1/2`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{FamilyKind, RepFamily, Sparse};
use crate::basistrans::SCHEMA;
use crate::error::{domain, Error, Result};

/// A relation name with its `(coefficient, operator product)` terms.
type NamedTerms<'a> = (&'a str, &'a [(f64, &'a [&'a str])]);

/// Groups of relations selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationSet {
    /// Coordinate algebra.
    X,
    /// Radius formula and centrality.
    Radius,
    /// Angular momentum algebra, `τ = 1 − λT³` and Casimir centrality.
    T,
    /// The `K` algebra.
    K,
    /// Action of `T` on the coordinates.
    Module,
    /// Commutation of `τ` with coordinates and generators.
    Tau,
    /// Conjugation identities as adjoint relations.
    Conj,
    /// `L ∘ X = 0`.
    OrbitalConstraint,
    /// Constraints on the `t` algebra and its expression in coordinates.
    TConstraints,
    All,
}

impl RelationSet {
    pub fn parse(s: &str) -> Result<RelationSet> {
        Ok(match s {
            "x" => RelationSet::X,
            "radius" => RelationSet::Radius,
            "t" => RelationSet::T,
            "k" => RelationSet::K,
            "module" => RelationSet::Module,
            "tau" => RelationSet::Tau,
            "conj" => RelationSet::Conj,
            "orbital-constraint" => RelationSet::OrbitalConstraint,
            "t-constraints" => RelationSet::TConstraints,
            "all" => RelationSet::All,
            "torb" => RelationSet::T,
            _ => return Err(Error::Config(format!("unknown relation set {s:?}"))),
        })
    }

    fn includes(self, other: RelationSet) -> bool {
        self == RelationSet::All || self == other
    }
}

/// `Σ coeff · product(ops) = 0`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    pub set: RelationSet,
    pub terms: Vec<(f64, Vec<String>)>,
}

impl Relation {
    fn new(set: RelationSet, name: &str, terms: &[(f64, &[&str])]) -> Relation {
        Relation {
            name: name.into(),
            set,
            terms: terms.iter().map(|(c, ops)| (*c, ops.iter().map(|s| s.to_string()).collect())).collect(),
        }
    }

    /// Base operator names the relation needs from the family.
    fn needs(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (_, ops) in &self.terms {
            for o in ops {
                let base = base_name(o);
                if base != "1" && !out.contains(&base) {
                    out.push(base);
                }
            }
        }
        out
    }
}

fn base_name(key: &str) -> String {
    if let Some(b) = key.strip_suffix("^T") {
        return b.to_string();
    }
    match key {
        "X3^-1" => "X3".into(),
        "tau^1/2" | "tau^-1/2" | "(-tau)^1/2" | "(-tau)^-1/2" => "tau".into(),
        _ => key.to_string(),
    }
}

/// Result for one relation on one family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationResult {
    pub relation: String,
    pub family: FamilyKind,
    pub window: String,
    pub q: f64,
    pub max_residual: f64,
    pub interior_states: usize,
    pub entries_checked: usize,
    pub pass: bool,
}

/// All relation results of one run.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub q: f64,
    pub tol: f64,
    pub results: Vec<RelationResult>,
    pub max_residual: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialises")
    }
}

/// Relations of `set` that apply to `family`.
pub fn relations_for(family: &RepFamily, set: RelationSet) -> Vec<Relation> {
    let q = family.ctx.q();
    let lam = family.ctx.lambda();
    let s1 = (1.0 + q * q).sqrt();
    let tau_sign = family.op("tau").ok().map(|t| {
        let d = t.diagonal();
        if d.iter().all(|&v| v > 0.0) {
            1
        } else if d.iter().all(|&v| v < 0.0) {
            -1
        } else {
            0
        }
    });
    let mut all = Vec::new();
    use RelationSet as S;
    if set.includes(S::X) {
        all.push(Relation::new(S::X, "X3 X+ - q^2 X+ X3 = 0", &[(1.0, &["X3", "X+"]), (-q * q, &["X+", "X3"])]));
        all.push(Relation::new(S::X, "X3 X- - q^-2 X- X3 = 0", &[(1.0, &["X3", "X-"]), (-1.0 / (q * q), &["X-", "X3"])]));
        all.push(Relation::new(
            S::X,
            "X- X+ - X+ X- = lambda X3 X3",
            &[(1.0, &["X-", "X+"]), (-1.0, &["X+", "X-"]), (-lam, &["X3", "X3"])],
        ));
    }
    if set.includes(S::Radius) {
        all.push(Relation::new(
            S::Radius,
            "R2 = X3 X3 - q X+ X- - q^-1 X- X+",
            &[(1.0, &["R2"]), (-1.0, &["X3", "X3"]), (q, &["X+", "X-"]), (1.0 / q, &["X-", "X+"])],
        ));
        for a in ["X3", "X+", "X-", "T3", "T+", "T-"] {
            let name = format!("R2 {a} - {a} R2 = 0");
            all.push(Relation::new(S::Radius, &name, &[(1.0, &["R2", a]), (-1.0, &[a, "R2"])]));
        }
    }
    for p in ["T", "K"] {
        let this = if p == "T" { S::T } else { S::K };
        if !set.includes(this) {
            continue;
        }
        let (g3, gp, gm) = (format!("{p}3"), format!("{p}+"), format!("{p}-"));
        let (g3, gp, gm) = (g3.as_str(), gp.as_str(), gm.as_str());
        all.push(Relation::new(
            this,
            &format!("q^-1 {p}+ {p}- - q {p}- {p}+ = {p}3"),
            &[(1.0 / q, &[gp, gm]), (-q, &[gm, gp]), (-1.0, &[g3])],
        ));
        all.push(Relation::new(
            this,
            &format!("q^2 {p}3 {p}+ - q^-2 {p}+ {p}3 = (q + q^-1) {p}+"),
            &[(q * q, &[g3, gp]), (-1.0 / (q * q), &[gp, g3]), (-(q + 1.0 / q), &[gp])],
        ));
        all.push(Relation::new(
            this,
            &format!("q^2 {p}- {p}3 - q^-2 {p}3 {p}- = (q + q^-1) {p}-"),
            &[(q * q, &[gm, g3]), (-1.0 / (q * q), &[g3, gm]), (-(q + 1.0 / q), &[gm])],
        ));
        all.push(Relation::new(this, &format!("tau = 1 - lambda {p}3"), &[(1.0, &["tau"]), (-1.0, &["1"]), (lam, &[g3])]));
        if tau_sign == Some(1) {
            for a in [g3, gp, gm] {
                all.push(Relation::new(
                    this,
                    &format!("{p}^2 {a} - {a} {p}^2 = 0"),
                    &[
                        (q * q / (lam * lam), &["tau^1/2", a]),
                        (-q * q / (lam * lam), &[a, "tau^1/2"]),
                        (1.0 / (lam * lam), &["tau^-1/2", a]),
                        (-1.0 / (lam * lam), &[a, "tau^-1/2"]),
                        (1.0, &["tau^-1/2", gp, gm, a]),
                        (-1.0, &[a, "tau^-1/2", gp, gm]),
                    ],
                ));
            }
        }
        if p == "K" && family.kind == FamilyKind::KOrbital {
            all.push(Relation::new(
                this,
                "K+ K- = -(1 + q^2 tau)/lambda^2",
                &[(lam * lam, &["K+", "K-"]), (1.0, &["1"]), (q * q, &["tau"])],
            ));
            all.push(Relation::new(
                this,
                "K- K+ = -(1 + q^-2 tau)/lambda^2",
                &[(lam * lam, &["K-", "K+"]), (1.0, &["1"]), (1.0 / (q * q), &["tau"])],
            ));
        }
    }
    if set.includes(S::Module) {
        let m: [NamedTerms; 9] = [
            ("T3 X3 = X3 T3", &[(1.0, &["T3", "X3"]), (-1.0, &["X3", "T3"])]),
            (
                "T3 X+ = q^-4 X+ T3 + q^-1 (1 + q^-2) X+",
                &[(1.0, &["T3", "X+"]), (-q.powi(-4), &["X+", "T3"]), (-(1.0 + q.powi(-2)) / q, &["X+"])],
            ),
            (
                "T3 X- = q^4 X- T3 - q (1 + q^2) X-",
                &[(1.0, &["T3", "X-"]), (-q.powi(4), &["X-", "T3"]), (q * (1.0 + q * q), &["X-"])],
            ),
            ("T+ X3 = X3 T+ + q^-2 sqrt(1+q^2) X+", &[(1.0, &["T+", "X3"]), (-1.0, &["X3", "T+"]), (-s1 / (q * q), &["X+"])]),
            ("T+ X+ = q^-2 X+ T+", &[(1.0, &["T+", "X+"]), (-1.0 / (q * q), &["X+", "T+"])]),
            ("T+ X- = q^2 X- T+ + q^-1 sqrt(1+q^2) X3", &[(1.0, &["T+", "X-"]), (-q * q, &["X-", "T+"]), (-s1 / q, &["X3"])]),
            ("T- X3 = X3 T- + q sqrt(1+q^2) X-", &[(1.0, &["T-", "X3"]), (-1.0, &["X3", "T-"]), (-q * s1, &["X-"])]),
            ("T- X+ = q^-2 X+ T- + sqrt(1+q^2) X3", &[(1.0, &["T-", "X+"]), (-1.0 / (q * q), &["X+", "T-"]), (-s1, &["X3"])]),
            ("T- X- = q^2 X- T-", &[(1.0, &["T-", "X-"]), (-q * q, &["X-", "T-"])]),
        ];
        for (name, terms) in m {
            all.push(Relation::new(S::Module, name, terms));
        }
    }
    if set.includes(S::Tau) {
        for (a, f) in [("X3", 1.0), ("X+", q.powi(-4)), ("X-", q.powi(4)), ("T3", 1.0), ("T+", q.powi(-4)), ("T-", q.powi(4))] {
            let name = match f {
                1.0 => format!("tau {a} = {a} tau"),
                x if x < 1.0 => format!("tau {a} = q^-4 {a} tau"),
                _ => format!("tau {a} = q^4 {a} tau"),
            };
            all.push(Relation::new(S::Tau, &name, &[(1.0, &["tau", a]), (-f, &[a, "tau"])]));
        }
    }
    if set.includes(S::Conj) {
        all.push(Relation::new(S::Conj, "X- = -q^-1 X+^T", &[(1.0, &["X-"]), (1.0 / q, &["X+^T"])]));
        all.push(Relation::new(S::Conj, "X3 = X3^T", &[(1.0, &["X3"]), (-1.0, &["X3^T"])]));
        all.push(Relation::new(S::Conj, "T- = q^2 T+^T", &[(1.0, &["T-"]), (-q * q, &["T+^T"])]));
        all.push(Relation::new(S::Conj, "T3 = T3^T", &[(1.0, &["T3"]), (-1.0, &["T3^T"])]));
        all.push(Relation::new(S::Conj, "K- = -q^2 K+^T", &[(1.0, &["K-"]), (q * q, &["K+^T"])]));
        all.push(Relation::new(S::Conj, "K3 = K3^T", &[(1.0, &["K3"]), (-1.0, &["K3^T"])]));
        all.push(Relation::new(
            S::Conj,
            "R2 = q^2 X3^T X3 + (1 + q^-2) X+^T X+",
            &[(1.0, &["R2"]), (-q * q, &["X3^T", "X3"]), (-(1.0 + 1.0 / (q * q)), &["X+^T", "X+"])],
        ));
    }
    if set.includes(S::OrbitalConstraint) && tau_sign == Some(1) {
        let c0 = -1.0 / (lam * q * (1.0 + q * q));
        let c1 = lam / (q.powi(3) * (1.0 + q * q));
        all.push(Relation::new(
            S::OrbitalConstraint,
            "L3 X3 - q L+ X- - q^-1 L- X+ = 0",
            &[
                (c0, &["tau^-1/2", "X3"]),
                (-c0, &["tau^1/2", "X3"]),
                (c1, &["tau^-1/2", "T+", "T-", "X3"]),
                (-1.0 / (q * s1), &["tau^-1/2", "T+", "X-"]),
                (1.0 / (q.powi(4) * s1), &["tau^-1/2", "T-", "X+"]),
            ],
        ));
    }
    if set.includes(S::TConstraints) && family.kind == FamilyKind::TSpecial {
        all.push(Relation::new(
            S::TConstraints,
            "T+ T- = -(1 + q^2 tau)/lambda^2",
            &[(lam * lam, &["T+", "T-"]), (1.0, &["1"]), (q * q, &["tau"])],
        ));
        all.push(Relation::new(
            S::TConstraints,
            "T- T+ = -(1 + q^-2 tau)/lambda^2",
            &[(lam * lam, &["T-", "T+"]), (1.0, &["1"]), (1.0 / (q * q), &["tau"])],
        ));
        all.push(Relation::new(S::TConstraints, "tau = -R2 X3^-1 X3^-1", &[(1.0, &["tau"]), (1.0, &["R2", "X3^-1", "X3^-1"])]));
        all.push(Relation::new(
            S::TConstraints,
            "T+ = -(1/(lambda q^3)) sqrt(1+q^2) X+ X3^-1",
            &[(1.0, &["T+"]), (s1 / (lam * q.powi(3)), &["X+", "X3^-1"])],
        ));
        all.push(Relation::new(
            S::TConstraints,
            "T- = (q^2/lambda) sqrt(1+q^2) X- X3^-1",
            &[(1.0, &["T-"]), (-q * q * s1 / lam, &["X-", "X3^-1"])],
        ));
        all.push(Relation::new(
            S::TConstraints,
            "T3 = (1 + R2 X3^-1 X3^-1)/lambda",
            &[(lam, &["T3"]), (-1.0, &["1"]), (-1.0, &["R2", "X3^-1", "X3^-1"])],
        ));
    }
    all.retain(|r| r.needs().iter().all(|k| family.ops.contains_key(k)));
    all
}

/// Resolves operator names, caching derived ones.
struct Resolver<'a> {
    family: &'a RepFamily,
    cache: HashMap<String, Sparse>,
}

impl<'a> Resolver<'a> {
    fn get(&mut self, key: &str) -> Result<Sparse> {
        if let Some(m) = self.cache.get(key) {
            return Ok(m.clone());
        }
        let f = self.family;
        let m = if key == "1" {
            Sparse::identity(f.dim())
        } else if let Some(b) = key.strip_suffix("^T") {
            f.op(b)?.matrix.transpose()
        } else {
            let diag_map = |src: &str, g: &dyn Fn(f64) -> Option<f64>| -> Result<Sparse> {
                let d = f.op(src)?.diagonal();
                let mut out = Vec::with_capacity(d.len());
                for v in d {
                    out.push(g(v).ok_or_else(|| domain(format!("{key} is not real or finite on {:?}", f.kind)))?);
                }
                Ok(Sparse::diag(&out))
            };
            match key {
                "X3^-1" => diag_map("X3", &|v| (v != 0.0).then(|| 1.0 / v))?,
                "tau^1/2" => diag_map("tau", &|v| (v > 0.0).then(|| v.sqrt()))?,
                "tau^-1/2" => diag_map("tau", &|v| (v > 0.0).then(|| 1.0 / v.sqrt()))?,
                "(-tau)^1/2" => diag_map("tau", &|v| (v < 0.0).then(|| (-v).sqrt()))?,
                "(-tau)^-1/2" => diag_map("tau", &|v| (v < 0.0).then(|| 1.0 / (-v).sqrt()))?,
                _ => f.op(key)?.matrix.clone(),
            }
        };
        self.cache.insert(key.to_string(), m.clone());
        Ok(m)
    }
}

fn evaluate(family: &RepFamily, rel: &Relation, res: &mut Resolver) -> Result<(f64, usize)> {
    let interior = family.interior_mask();
    // entry -> (signed sum, absolute sum)
    let mut acc: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
    for (c, ops) in &rel.terms {
        let mut m = res.get(&ops[0])?;
        for o in &ops[1..] {
            m = m.mul(&res.get(o)?);
        }
        for (r, col, v) in m.entries() {
            if interior[r] && interior[col] {
                let e = acc.entry((r, col)).or_insert((0.0, 0.0));
                e.0 += c * v;
                e.1 += (c * v).abs();
            }
        }
    }
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for (s, a) in acc.values() {
        if *a > 0.0 {
            worst = worst.max(s.abs() / a);
            n += 1;
        }
    }
    Ok((worst, n))
}

/// Checks every relation of `set` that applies to each family.
///
/// Errors when a family's operators do not share its basis or when no
/// relation of the set applies to any family.
pub fn verify_relations(families: &[&RepFamily], set: RelationSet, tol: f64) -> Result<VerificationReport> {
    let mut results = Vec::new();
    let mut q = f64::NAN;
    for fam in families {
        for op in fam.ops.values() {
            if op.basis != fam.basis && *op.basis != *fam.basis {
                return Err(Error::Structural(format!("operator {} does not share the family basis", op.name)));
            }
        }
        q = fam.ctx.q();
        let interior_states = fam.interior_mask().iter().filter(|&&b| b).count();
        let mut res = Resolver { family: fam, cache: HashMap::new() };
        for rel in relations_for(fam, set) {
            let (r, n) = evaluate(fam, &rel, &mut res)?;
            results.push(RelationResult {
                relation: rel.name.clone(),
                family: fam.kind,
                window: fam.window.describe(),
                q: fam.ctx.q(),
                max_residual: r,
                interior_states,
                entries_checked: n,
                pass: r < tol && n > 0,
            });
        }
    }
    if results.is_empty() {
        return Err(Error::Structural(format!("no relation of set {set:?} applies to the given families")));
    }
    let max_residual = results.iter().fold(0.0f64, |w, r| w.max(r.max_residual));
    let pass = results.iter().all(|r| r.pass);
    Ok(VerificationReport { schema: SCHEMA, q, tol, results, max_residual, pass })
}

/// `max |[X⁻, X⁺]| / max |X³X³|` over interior entries, which equals `λ`
/// when the coordinate algebra holds.
pub fn commutator_scale(family: &RepFamily) -> Result<f64> {
    let mut res = Resolver { family, cache: HashMap::new() };
    let interior = family.interior_mask();
    let xm = res.get("X-")?;
    let xp = res.get("X+")?;
    let x3 = res.get("X3")?;
    let comm = xm.mul(&xp).add_scaled(&xp.mul(&xm), -1.0);
    let sq = x3.mul(&x3);
    let max_int =
        |m: &Sparse| m.entries().filter(|&(r, c, _)| interior[r] && interior[c]).fold(0.0f64, |w, (_, _, v)| w.max(v.abs()));
    let den = max_int(&sq);
    if den == 0.0 {
        return Err(domain("X3 X3 vanishes on the interior"));
    }
    Ok(max_int(&comm) / den)
}
