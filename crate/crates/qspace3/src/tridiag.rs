//! Symmetric tridiagonal eigenvalues by Sturm bisection.
//!
//! The pivots of the `LDLᵀ` factorisation of `A − x` count the eigenvalues
//! below `x`. Running the count in [`Mp`](crate::real::Mp) keeps it exact
//! enough for matrices whose entries span hundreds of orders of magnitude.
//! Bisection splits at geometric means while the bracket spans more than a
//! factor two, so tiny eigenvalues come out with full relative accuracy.

use crate::error::{Error, Result};
use crate::real::Real;

/// Scale below which bisection works in absolute rather than relative terms.
const ABS_FLOOR: f64 = 1e-280;

/// Zero when the interval straddles it, the geometric mean when the ends
/// differ by more than a factor two, the midpoint otherwise.
fn split_point(lo: f64, hi: f64) -> f64 {
    if lo < 0.0 && hi > 0.0 {
        return 0.0;
    }
    let (a, b, sign) = if lo >= 0.0 { (lo, hi, 1.0) } else { (-hi, -lo, -1.0) };
    let a = a.max(ABS_FLOOR);
    if b > 2.0 * a {
        sign * (a.sqrt() * b.sqrt())
    } else {
        0.5 * (lo + hi)
    }
}

#[derive(Clone, Debug)]
pub struct SymTridiag<R: Real> {
    diag: Vec<R>,
    off: Vec<R>,
}

impl<R: Real> SymTridiag<R> {
    /// `off[i]` couples rows `i` and `i + 1`.
    pub fn new(diag: Vec<R>, off: Vec<R>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Structural(format!(
                "tridiagonal matrix needs n >= 1 diagonal and n - 1 off-diagonal entries, got {} and {}",
                diag.len(),
                off.len()
            )));
        }
        Ok(SymTridiag { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[R] {
        &self.diag
    }

    pub fn off(&self) -> &[R] {
        &self.off
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let xr = self.diag[0].lift(x);
        let tiny = self.diag[0].lift(1e-300);
        let zero = self.diag[0].lift(0.0);
        let mut count = 0;
        let mut piv = self.diag[0].clone() - &xr;
        if piv < zero {
            count += 1;
        }
        for i in 1..self.diag.len() {
            if piv == zero {
                piv = tiny.clone() * &(self.off[i - 1].abs() + &tiny);
            }
            let e2 = self.off[i - 1].clone() * &self.off[i - 1];
            piv = (self.diag[i].clone() - &xr) - e2 / &piv;
            if piv < zero {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].to_f64().abs();
            }
            if i + 1 < n {
                r += self.off[i].to_f64().abs();
            }
            let d = self.diag[i].to_f64();
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        let pad = 1e-12 * lo.abs().max(hi.abs()).max(ABS_FLOOR);
        (lo - pad, hi + pad)
    }

    /// The `k`-th smallest eigenvalue (0-based), to relative accuracy `rel_tol`
    /// (absolute below `1e-280`).
    pub fn eigenvalue(&self, k: usize, rel_tol: f64) -> Result<f64> {
        if k >= self.dim() {
            return Err(Error::Structural(format!("eigenvalue index {k} out of range for dimension {}", self.dim())));
        }
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..4000 {
            if hi - lo <= rel_tol * lo.abs().max(hi.abs()) || hi - lo <= ABS_FLOOR {
                break;
            }
            let mid = split_point(lo, hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Eigenvalues `k` in `range`, ascending.
    pub fn eigenvalues(&self, range: std::ops::Range<usize>, rel_tol: f64) -> Result<Vec<f64>> {
        range.map(|k| self.eigenvalue(k, rel_tol)).collect()
    }

    /// The matrix rounded to `f64`.
    pub fn to_f64(&self) -> SymTridiag<f64> {
        SymTridiag { diag: self.diag.iter().map(|v| v.to_f64()).collect(), off: self.off.iter().map(|v| v.to_f64()).collect() }
    }
}

impl SymTridiag<f64> {
    /// `A v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Unit eigenvector for the eigenvalue estimate `e` by inverse iteration.
    pub fn eigenvector(&self, e: f64) -> Vec<f64> {
        let n = self.dim();
        let scale = self.gershgorin().1.abs().max(self.gershgorin().0.abs()).max(f64::MIN_POSITIVE);
        let shift = e + 1e-14 * e.abs().max(1e-300 * scale);
        // Deterministic start that is not orthogonal to any eigenvector in practice.
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.7).sin()).collect();
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    /// `‖A v − e v‖ / (‖v‖ · max(|e|, 1))`.
    pub fn residual(&self, e: f64, v: &[f64]) -> f64 {
        let av = self.apply(v);
        let r = av.iter().zip(v).map(|(a, x)| (a - e * x).powi(2)).sum::<f64>().sqrt();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        r / (nv * e.abs().max(1.0))
    }

    /// Solves `(A − s) x = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, s: f64, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        if n == 1 {
            let d = self.diag[0] - s;
            return vec![b[0] / if d == 0.0 { 1e-300 } else { d }];
        }
        // Rows carry (sub, diag, sup, sup2) after pivoting.
        let mut a: Vec<[f64; 3]> = (0..n)
            .map(|i| [if i > 0 { self.off[i - 1] } else { 0.0 }, self.diag[i] - s, if i + 1 < n { self.off[i] } else { 0.0 }])
            .collect();
        let mut u = vec![[0.0f64; 3]; n]; // upper factor: u[i] = (diag, sup, sup2)
        let mut rhs = b.to_vec();
        let mut cur = [a[0][1], a[0][2], 0.0];
        for i in 0..n - 1 {
            let next = [a[i + 1][0], a[i + 1][1], a[i + 1][2]];
            if cur[0].abs() >= next[0].abs() {
                let piv = if cur[0] == 0.0 { 1e-300 } else { cur[0] };
                let f = next[0] / piv;
                u[i] = [piv, cur[1], cur[2]];
                rhs[i + 1] -= f * rhs[i];
                cur = [next[1] - f * cur[1], next[2] - f * cur[2], 0.0];
            } else {
                let f = cur[0] / next[0];
                u[i] = [next[0], next[1], next[2]];
                let ri = rhs[i];
                rhs[i] = rhs[i + 1];
                rhs[i + 1] = ri - f * rhs[i];
                cur = [cur[1] - f * next[1], cur[2] - f * next[2], 0.0];
            }
            a[i + 1] = [0.0, 0.0, 0.0];
        }
        u[n - 1] = [if cur[0] == 0.0 { 1e-300 } else { cur[0] }, 0.0, 0.0];
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = rhs[i];
            if i + 1 < n {
                v -= u[i][1] * x[i + 1];
            }
            if i + 2 < n {
                v -= u[i][2] * x[i + 2];
            }
            x[i] = v / u[i][0];
        }
        x
    }
}
