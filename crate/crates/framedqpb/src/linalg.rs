//! Exact linear algebra over `Q(i)`: reduced row echelon form, solving and
//! nullspaces. Sizes here are tiny (tens of rows), so plain Gaussian
//! elimination with exact arithmetic is enough.

use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..self.cols {
                    self.data.swap(row * self.cols + j, p * self.cols + j);
                }
            }
            let inv = self.at(row, col).inv().expect("pivot nonzero");
            for j in col..self.cols {
                let v = self.at(row, j) * &inv;
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let factor = self.at(r, col).clone();
                    for j in col..self.cols {
                        let v = self.at(r, j) - &(&factor * self.at(row, j));
                        self.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Rank via a working copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Solves `A x = b`; returns a particular solution (free variables zero),
    /// or `None` when inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the constant column: inconsistent
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (r, &col) in pivots.iter().enumerate() {
            x[col] = aug.at(r, self.cols).clone();
        }
        Some(x)
    }

    /// Basis of the nullspace of `A`.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::new();
        for &f in &free {
            let mut v = vec![Scalar::zero(); self.cols];
            v[f] = Scalar::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m.at(r, f);
            }
            basis.push(v);
        }
        basis
    }

    /// Whether `v` lies in the row span of `self`.
    pub fn row_span_contains(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.cols);
        let mut m = self.clone();
        let base_rank = m.rref().len();
        let mut ext = Matrix::zero(self.rows + 1, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                ext.set(i, j, self.at(i, j).clone());
            }
        }
        for (j, val) in v.iter().enumerate() {
            ext.set(self.rows, j, val.clone());
        }
        ext.rank() == base_rank
    }

    /// Whether two row spans coincide.
    pub fn same_row_span(&self, other: &Matrix) -> bool {
        assert_eq!(self.cols, other.cols);
        let ra = self.rank();
        let rb = other.rank();
        if ra != rb {
            return false;
        }
        let mut stacked = Matrix::zero(self.rows + other.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                stacked.set(i, j, self.at(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..self.cols {
                stacked.set(self.rows + i, j, other.at(i, j).clone());
            }
        }
        stacked.rank() == ra
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn solves_small_system() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let a = Matrix::from_rows(vec![vec![s(1), s(1)], vec![s(1), s(-1)]]);
        let x = a.solve(&[s(3), s(1)]).unwrap();
        assert_eq!(x, vec![s(2), s(1)]);
    }

    #[test]
    fn detects_inconsistency() {
        let a = Matrix::from_rows(vec![vec![s(1), s(1)], vec![s(2), s(2)]]);
        assert!(a.solve(&[s(1), s(3)]).is_none());
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = Matrix::from_rows(vec![vec![s(1), s(2)], vec![s(2), s(4)]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        // A·v = 0
        let v = &ns[0];
        let dot = &(v[0].clone() * s(1)) + &(v[1].clone() * s(2));
        assert!(dot.is_zero());
    }

    #[test]
    fn span_comparison() {
        let a = Matrix::from_rows(vec![vec![s(1), s(0), s(1)], vec![s(0), s(1), s(1)]]);
        let b = Matrix::from_rows(vec![vec![s(1), s(1), s(2)], vec![s(1), s(-1), s(0)]]);
        assert!(a.same_row_span(&b));
        assert!(a.row_span_contains(&[s(2), s(3), s(5)]));
        assert!(!a.row_span_contains(&[s(0), s(0), s(1)]));
    }

    #[test]
    fn complex_pivoting() {
        let i = Scalar::i();
        // (1, -i) = -i·(i, 1): dependent rows over Q(i)
        let a = Matrix::from_rows(vec![vec![i.clone(), s(1)], vec![s(1), -&i]]);
        assert_eq!(a.rank(), 1);
        let b = Matrix::from_rows(vec![vec![i.clone(), s(1)], vec![s(1), i.clone()]]);
        assert_eq!(b.rank(), 2);
    }
}
