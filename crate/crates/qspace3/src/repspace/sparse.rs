use std::collections::BTreeMap;

/// Square sparse matrix stored by columns, each column sorted by row.
#[derive(Clone, Debug, PartialEq)]
pub struct Sparse {
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
}

impl Sparse {
    pub fn zeros(n: usize) -> Sparse {
        Sparse { n, cols: vec![Vec::new(); n] }
    }

    pub fn identity(n: usize) -> Sparse {
        Sparse::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Sparse {
        Sparse { n: d.len(), cols: d.iter().enumerate().map(|(i, &v)| if v != 0.0 { vec![(i, v)] } else { vec![] }).collect() }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Sparse {
        let mut cols: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (r, c, v) in triplets {
            *cols[c].entry(r).or_insert(0.0) += v;
        }
        Sparse { n, cols: cols.into_iter().map(|m| m.into_iter().filter(|&(_, v)| v != 0.0).collect()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        match self.cols[c].binary_search_by_key(&r, |&(i, _)| i) {
            Ok(k) => self.cols[c][k].1,
            Err(_) => 0.0,
        }
    }

    /// `(row, col, value)` in column order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.cols.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn scale(&self, s: f64) -> Sparse {
        Sparse { n: self.n, cols: self.cols.iter().map(|c| c.iter().map(|&(r, v)| (r, v * s)).collect()).collect() }
    }

    pub fn transpose(&self) -> Sparse {
        Sparse::from_triplets(self.n, self.entries().map(|(r, c, v)| (c, r, v)))
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &Sparse) -> Sparse {
        assert_eq!(self.n, rhs.n, "dimension mismatch in sparse product");
        let mut cols = Vec::with_capacity(self.n);
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for col in &rhs.cols {
            acc.clear();
            for &(k, b) in col {
                for &(r, a) in &self.cols[k] {
                    *acc.entry(r).or_insert(0.0) += a * b;
                }
            }
            cols.push(acc.iter().map(|(&r, &v)| (r, v)).collect());
        }
        Sparse { n: self.n, cols }
    }

    /// `self + s · rhs`.
    pub fn add_scaled(&self, rhs: &Sparse, s: f64) -> Sparse {
        Sparse::from_triplets(self.n, self.entries().chain(rhs.entries().map(|(r, c, v)| (r, c, v * s))))
    }

    /// Applies `f` to the diagonal of a diagonal matrix.
    pub fn map_diag(&self, f: impl Fn(f64) -> f64) -> Sparse {
        let d: Vec<f64> = (0..self.n).map(|i| f(self.get(i, i))).collect();
        Sparse::diag(&d)
    }

    /// Kronecker product `self ⊗ rhs` with row-major label order.
    pub fn kron(&self, rhs: &Sparse) -> Sparse {
        let n = self.n * rhs.n;
        let mut t = Vec::with_capacity(self.nnz() * rhs.nnz());
        for (r1, c1, a) in self.entries() {
            for (r2, c2, b) in rhs.entries() {
                t.push((r1 * rhs.n + r2, c1 * rhs.n + c2, a * b));
            }
        }
        Sparse::from_triplets(n, t)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().fold(0.0, |m, (_, _, v)| m.max(v.abs()))
    }

    /// Entrywise absolute value.
    pub fn abs(&self) -> Sparse {
        Sparse { n: self.n, cols: self.cols.iter().map(|c| c.iter().map(|&(r, v)| (r, v.abs())).collect()).collect() }
    }

    /// Largest `|a − b| / max(|a|, |b|, s)` with `s` the matching entry of
    /// `scale`, over entries nonzero in either matrix.
    pub fn max_rel_diff_scaled(&self, other: &Sparse, scale: &Sparse) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch in comparison");
        let mut w: f64 = 0.0;
        for (r, c, _) in self.entries().chain(other.entries()) {
            let (x, y) = (self.get(r, c), other.get(r, c));
            if x != y {
                w = w.max((x - y).abs() / x.abs().max(y.abs()).max(scale.get(r, c)));
            }
        }
        w
    }

    /// Largest `|a − b| / max(|a|, |b|)` over entries nonzero in either.
    pub fn max_rel_diff(&self, other: &Sparse) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch in comparison");
        let mut w: f64 = 0.0;
        for (r, c, _) in self.entries().chain(other.entries()) {
            let (x, y) = (self.get(r, c), other.get(r, c));
            w = w.max((x - y).abs() / x.abs().max(y.abs()));
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = Sparse::from_triplets(3, [(0, 1, 2.0), (1, 2, 3.0)]);
        let b = a.mul(&a);
        assert_eq!(b.get(0, 2), 6.0);
        assert_eq!(b.nnz(), 1);
        assert_eq!(a.transpose().get(1, 0), 2.0);
        let k = Sparse::identity(2).kron(&a);
        assert_eq!(k.get(3, 4), 2.0);
        assert_eq!(a.add_scaled(&a, -1.0).nnz(), 0);
        assert_eq!(a.max_rel_diff(&a.scale(1.5)), 1.0 / 3.0);
        assert_eq!(a.max_rel_diff(&Sparse::zeros(3)), 1.0);
    }
}
