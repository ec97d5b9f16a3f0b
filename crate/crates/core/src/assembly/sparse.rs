use crate::C64;

/// Square complex matrix in compressed sparse row form with sorted columns.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Zero matrix with the given sorted, duplicate-free row patterns.
    pub fn from_pattern(rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        for r in rows {
            debug_assert!(r.windows(2).all(|w| w[0] < w[1]));
            cols.extend(r);
            row_ptr.push(cols.len());
        }
        let values = vec![C64::new(0.0, 0.0); cols.len()];
        CsrMatrix {
            n,
            row_ptr,
            cols,
            values,
        }
    }

    /// Matrix from `(row, col, value)` triplets; duplicates are summed in
    /// input order.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, C64)]) -> Self {
        let mut rows = vec![Vec::new(); n];
        for &(r, c, _) in triplets {
            rows[r].push(c);
        }
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
        }
        let mut m = Self::from_pattern(rows);
        for &(r, c, v) in triplets {
            m.add(r, c, v);
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::from_pattern((0..n).map(|i| vec![i]).collect());
        m.values.fill(C64::new(1.0, 0.0));
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[C64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.cols[span.clone()], &self.values[span])
    }

    fn position(&self, r: usize, c: usize) -> Option<usize> {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .binary_search(&c)
            .ok()
            .map(|p| span.start + p)
    }

    /// Entry `(r, c)`, zero outside the pattern.
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.position(r, c)
            .map(|p| self.values[p])
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Adds to an entry of the pattern.
    ///
    /// # Panics
    /// If `(r, c)` is outside the pattern.
    pub fn add(&mut self, r: usize, c: usize, v: C64) {
        let p = self
            .position(r, c)
            .unwrap_or_else(|| panic!("entry ({r}, {c}) outside sparsity pattern"));
        self.values[p] += v;
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter()
                    .zip(vals)
                    .fold(C64::new(0.0, 0.0), |acc, (&c, v)| acc + v * x[c])
            })
            .collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(c, r)).norm());
            }
        }
        worst
    }

    /// Largest imaginary part.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    /// Rows and columns `keep` (ascending), renumbered consecutively.
    pub fn submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut new_index = vec![usize::MAX; self.n];
        for (i, &k) in keep.iter().enumerate() {
            new_index[k] = i;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        for &r in keep {
            let (rc, rv) = self.row(r);
            for (&c, &v) in rc.iter().zip(rv) {
                if new_index[c] != usize::MAX {
                    cols.push(new_index[c]);
                    values.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix {
            n: keep.len(),
            row_ptr,
            cols,
            values,
        }
    }

    /// All entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            out.extend(cols.iter().zip(vals).map(|(&c, &v)| (r, c, v)));
        }
        out
    }

    pub(crate) fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub(crate) fn row_range(&self, r: usize) -> std::ops::Range<usize> {
        self.row_ptr[r]..self.row_ptr[r + 1]
    }

    pub(crate) fn cols(&self) -> &[usize] {
        &self.cols
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let one = C64::new(1.0, 0.0);
        let m = CsrMatrix::from_triplets(2, &[(0, 1, one), (0, 1, one), (1, 0, one * 2.0)]);
        assert_eq!(m.get(0, 1), one * 2.0);
        assert_eq!(m.get(1, 1), C64::new(0.0, 0.0));
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.max_asymmetry(), 0.0);
        assert_eq!(m.matvec(&[one, one]), vec![one * 2.0, one * 2.0]);
    }

    #[test]
    fn submatrix_keeps_selected_block() {
        let t: Vec<_> = (0..3)
            .flat_map(|r| (0..3).map(move |c| (r, c, C64::new((3 * r + c) as f64, 0.0))))
            .collect();
        let m = CsrMatrix::from_triplets(3, &t);
        let s = m.submatrix(&[0, 2]);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.get(1, 0), C64::new(6.0, 0.0));
        assert_eq!(s.get(1, 1), C64::new(8.0, 0.0));
    }
}
