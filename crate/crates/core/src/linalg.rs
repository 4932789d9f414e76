//! Dense linear algebra over a field, enough for nullspace extraction and
//! determinants. Row-major storage.

use crate::ring::Field;

#[derive(Clone, Debug)]
pub struct Matrix<F: Field> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F::Elem>,
}

impl<F: Field> Matrix<F> {
    pub fn zero(field: &F, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: F::Elem) {
        self.data[r * self.cols + c] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self, field: &F) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let piv = (r..self.rows).find(|&i| !field.is_zero(self.at(i, c)));
            let piv = match piv {
                Some(p) => p,
                None => continue,
            };
            self.swap_rows(r, piv);
            let inv = field.inv(self.at(r, c)).expect("pivot must be a unit");
            for k in c..self.cols {
                let v = field.mul(self.at(r, k), &inv);
                self.set(r, k, v);
            }
            for i in 0..self.rows {
                if i != r && !field.is_zero(self.at(i, c)) {
                    let factor = self.at(i, c).clone();
                    for k in c..self.cols {
                        let v = field.sub(self.at(i, k), &field.mul(&factor, self.at(r, k)));
                        self.set(i, k, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Basis of the right nullspace, one vector per free column, in column
    /// order. Deterministic for a given matrix.
    pub fn nullspace(mut self, field: &F) -> Vec<Vec<F::Elem>> {
        let pivots = self.rref(field);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![field.zero(); self.cols];
            v[free] = field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(self.at(row, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant by elimination; consumes the matrix.
    pub fn det(mut self, field: &F) -> F::Elem {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut det = field.one();
        for c in 0..n {
            let piv = (c..n).find(|&i| !field.is_zero(self.at(i, c)));
            let piv = match piv {
                Some(p) => p,
                None => return field.zero(),
            };
            if piv != c {
                self.swap_rows(c, piv);
                det = field.neg(&det);
            }
            let d = self.at(c, c).clone();
            det = field.mul(&det, &d);
            let inv = field.inv(&d).expect("pivot must be a unit");
            for i in (c + 1)..n {
                if field.is_zero(self.at(i, c)) {
                    continue;
                }
                let factor = field.mul(self.at(i, c), &inv);
                for k in c..n {
                    let v = field.sub(self.at(i, k), &field.mul(&factor, self.at(c, k)));
                    self.set(i, k, v);
                }
            }
        }
        det
    }

    pub fn mul_vec(&self, field: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = field.zero();
                for c in 0..self.cols {
                    field.mul_add_assign(&mut acc, self.at(r, c), &v[c]);
                }
                acc
            })
            .collect()
    }
}
