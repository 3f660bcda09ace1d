//! Truncated matrix representations of the coordinate, angular momentum and
//! auxiliary algebras, and checks of their defining relations.
//!
//! Every family lives on a rectangular window of integer labels. A window
//! edge is either physical (the representation itself stops there, e.g.
//! `m_t ≤ 0`) or a truncation edge. Ladder operators simply drop states
//! outside the window, so degree-2 relations are exact only on interior
//! states, those at least `interior_margin` steps from every truncation edge.

mod algebra;
mod build;
mod sparse;
pub mod spectrum;
mod verify;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qarith::QContext;

pub use algebra::{
    add_spin, casimir, coproduct, coproduct_term_scale, group_like_defect, l_operators, CasimirMode, CoproductVariant,
};
pub use build::{
    build_joint, build_k_generic, build_k_orbital, build_l_basis, build_t_generic, build_t_orb, build_t_special, build_x_over_r,
    l_basis_x3_coupling, r0_from_z0, window_1d, window_tk, z0_from_r0,
};
pub use sparse::Sparse;
pub use verify::{commutator_scale, relations_for, verify_relations, Relation, RelationResult, RelationSet, VerificationReport};

/// Radicands in `[RADICAND_CLAMP, 0)` are rounding noise and taken as zero.
pub const RADICAND_CLAMP: f64 = -1e-14;

/// One label axis of a window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    /// The lower edge is a property of the representation, not a truncation.
    pub lo_physical: bool,
    pub hi_physical: bool,
}

impl Axis {
    pub fn new(name: &str, lo: i64, hi: i64, lo_physical: bool, hi_physical: bool) -> Axis {
        Axis { name: name.to_string(), lo, hi, lo_physical, hi_physical }
    }
}

/// Truncation ranges for the label lattice of a family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepWindow {
    pub axes: Vec<Axis>,
    pub interior_margin: i64,
}

impl RepWindow {
    pub fn new(axes: Vec<Axis>, interior_margin: i64) -> Result<RepWindow> {
        if interior_margin < 2 {
            return Err(Error::Config(format!("interior margin must be >= 2, got {interior_margin}")));
        }
        for a in &axes {
            if a.lo > a.hi {
                return Err(Error::Config(format!("empty range for {}: [{}, {}]", a.name, a.lo, a.hi)));
            }
        }
        Ok(RepWindow { axes, interior_margin })
    }

    pub fn contains(&self, label: &[i64]) -> bool {
        self.axes.iter().zip(label).all(|(a, &v)| a.lo <= v && v <= a.hi)
    }

    /// At least `interior_margin` steps from every truncation edge.
    pub fn is_interior(&self, label: &[i64]) -> bool {
        let k = self.interior_margin;
        self.axes.iter().zip(label).all(|(a, &v)| (a.lo_physical || v - a.lo >= k) && (a.hi_physical || a.hi - v >= k))
    }

    /// Product window, axes of `self` first.
    pub fn product(&self, other: &RepWindow) -> RepWindow {
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        RepWindow { axes, interior_margin: self.interior_margin.max(other.interior_margin) }
    }

    /// Compact human-readable description, e.g. `m_t∈[-40,0] m_k∈[0,40]`.
    pub fn describe(&self) -> String {
        self.axes.iter().map(|a| format!("{}∈[{},{}]", a.name, a.lo, a.hi)).collect::<Vec<_>>().join(" ")
    }
}

/// Ordered list of basis labels, one integer per window axis.
#[derive(Debug, PartialEq)]
pub struct Basis {
    pub axes: Vec<String>,
    labels: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
}

impl Basis {
    pub fn new(axes: Vec<String>, labels: Vec<Vec<i64>>) -> Basis {
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Basis { axes, labels, index }
    }

    /// All labels of a rectangular window in row-major order, filtered.
    pub fn from_window(window: &RepWindow, keep: impl Fn(&[i64]) -> bool) -> Basis {
        let mut labels: Vec<Vec<i64>> = vec![vec![]];
        for a in &window.axes {
            labels = labels
                .into_iter()
                .flat_map(|l| {
                    (a.lo..=a.hi).map(move |v| {
                        let mut n = l.clone();
                        n.push(v);
                        n
                    })
                })
                .collect();
        }
        labels.retain(|l| keep(l));
        Basis::new(window.axes.iter().map(|a| a.name.clone()).collect(), labels)
    }

    pub fn product(&self, other: &Basis) -> Basis {
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        let mut labels = Vec::with_capacity(self.len() * other.len());
        for a in &self.labels {
            for b in &other.labels {
                let mut l = a.clone();
                l.extend_from_slice(b);
                labels.push(l);
            }
        }
        Basis::new(axes, labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &[i64] {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[Vec<i64>] {
        &self.labels
    }

    pub fn index_of(&self, label: &[i64]) -> Option<usize> {
        self.index.get(label).copied()
    }
}

/// A named operator on a family basis. Matrix elements are read off ket
/// relations: `A|s⟩ = Σ c |s'⟩` stores `c` at `(row = s', col = s)`.
#[derive(Clone, Debug)]
pub struct LabeledOperator {
    pub name: String,
    pub basis: Arc<Basis>,
    pub matrix: Sparse,
    /// Allowed label differences `row − col` of nonzero entries.
    pub shifts: Vec<Vec<i64>>,
}

impl LabeledOperator {
    pub fn new(name: &str, basis: Arc<Basis>, matrix: Sparse, shifts: Vec<Vec<i64>>) -> LabeledOperator {
        LabeledOperator { name: name.to_string(), basis, matrix, shifts }
    }

    /// Entry `⟨row|A|col⟩` by label.
    pub fn get(&self, row: &[i64], col: &[i64]) -> f64 {
        match (self.basis.index_of(row), self.basis.index_of(col)) {
            (Some(r), Some(c)) => self.matrix.get(r, c),
            _ => 0.0,
        }
    }

    /// Nonzero entries whose label difference is not a declared shift.
    pub fn band_violations(&self) -> usize {
        self.matrix
            .entries()
            .filter(|&(r, c, v)| {
                let d: Vec<i64> = self.basis.label(r).iter().zip(self.basis.label(c)).map(|(a, b)| a - b).collect();
                v != 0.0 && !self.shifts.contains(&d)
            })
            .count()
    }

    /// Diagonal of a diagonal operator.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.basis.len()).map(|i| self.matrix.get(i, i)).collect()
    }
}

/// Which construction produced a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    TGeneric,
    TSpecial,
    KGeneric,
    KOrbital,
    XOverR,
    TOrbTensor,
    #[serde(rename = "xtr_joint")]
    XTRJoint,
    LBasis,
    Coproduct,
    SpinAdded,
}

/// Operators sharing one basis, with the parameters that produced them.
#[derive(Clone, Debug)]
pub struct RepFamily {
    pub kind: FamilyKind,
    pub params: BTreeMap<String, f64>,
    pub ops: BTreeMap<String, LabeledOperator>,
    pub window: RepWindow,
    pub basis: Arc<Basis>,
    /// Magnetic quantum number per state, with `τ = λ d q^{−4m}`.
    pub m_values: Option<Vec<f64>>,
    pub ctx: QContext,
}

impl RepFamily {
    pub fn op(&self, key: &str) -> Result<&LabeledOperator> {
        self.ops.get(key).ok_or_else(|| Error::Structural(format!("family {:?} has no operator {key}", self.kind)))
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn interior_mask(&self) -> Vec<bool> {
        self.basis.labels().iter().map(|l| self.window.is_interior(l)).collect()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Adds the operators of `other`, which must share this basis.
    pub fn merge(mut self, other: &RepFamily) -> Result<RepFamily> {
        if *self.basis != *other.basis {
            return Err(Error::Structural(format!("cannot merge {:?} into {:?}: the bases differ", other.kind, self.kind)));
        }
        for (k, v) in &other.ops {
            self.ops.entry(k.clone()).or_insert_with(|| v.clone());
        }
        for (k, v) in &other.params {
            self.params.entry(k.clone()).or_insert(*v);
        }
        Ok(self)
    }

    pub(crate) fn insert(&mut self, key: &str, matrix: Sparse, shifts: Vec<Vec<i64>>) {
        self.ops.insert(key.to_string(), LabeledOperator::new(key, self.basis.clone(), matrix, shifts));
    }
}

/// `√r` with rounding noise below zero clamped; a window error for genuinely
/// negative radicands.
pub(crate) fn checked_sqrt(r: f64, what: &str) -> Result<f64> {
    if r >= 0.0 {
        Ok(r.sqrt())
    } else if r >= RADICAND_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::Window(format!("negative radicand {r:e} in {what}")))
    }
}

/// `√(a − b)` for nearly equal positive `a`, `b`, exactly zero at coincidence.
pub(crate) fn sqrt_gap(a: f64, b: f64, what: &str) -> Result<f64> {
    let d = a - b;
    if d.abs() <= 1e-14 * a.abs().max(b.abs()) {
        return Ok(0.0);
    }
    checked_sqrt(d, what)
}
