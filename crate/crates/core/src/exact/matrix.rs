use std::fmt;

use thiserror::Error;

use super::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: matrix is {n}x{n}, vector has length {len}")]
    DimensionMismatch { n: usize, len: usize },
}

/// Square matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<F> {
    n: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![F::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    /// Builds a matrix from rows. Panics if the rows do not form a square.
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix rows must have length {n}");
            data.extend(r);
        }
        Matrix { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F) {
        self.data[i * self.n + j] = x;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul_vec(&self, x: &[F]) -> Result<Vec<F>, LinalgError> {
        if x.len() != self.n {
            return Err(LinalgError::DimensionMismatch { n: self.n, len: x.len() });
        }
        Ok((0..self.n)
            .map(|i| {
                (0..self.n).fold(F::zero(), |acc, j| acc + self.get(i, j).clone() * x[j].clone())
            })
            .collect())
    }

    /// The leading `k × k` block.
    pub fn leading(&self, k: usize) -> Self {
        Self::from_fn(k, |i, j| self.get(i, j).clone())
    }

    /// Principal submatrix on the given index set, in the given order.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]).clone())
    }

    /// Exact determinant by Gaussian elimination (1 for the empty matrix).
    pub fn det(&self) -> F {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = F::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return F::zero();
            };
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                }
                det = -det;
            }
            let pivot = a[col * n + col].clone();
            det = det * pivot.clone();
            for r in col + 1..n {
                if a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone() / pivot.clone();
                for j in col..n {
                    let v = a[col * n + j].clone() * f.clone();
                    a[r * n + j] = a[r * n + j].clone() - v;
                }
            }
        }
        det
    }

    /// Solves `M x = b` exactly.
    pub fn solve(&self, b: &[F]) -> Result<Vec<F>, LinalgError> {
        let n = self.n;
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch { n, len: b.len() });
        }
        let w = n + 1;
        let mut a: Vec<F> = Vec::with_capacity(n * w);
        for i in 0..n {
            a.extend(self.data[i * n..(i + 1) * n].iter().cloned());
            a.push(b[i].clone());
        }
        for col in 0..n {
            let p = (col..n)
                .find(|&r| !a[r * w + col].is_zero())
                .ok_or(LinalgError::SingularMatrix)?;
            if p != col {
                for j in 0..w {
                    a.swap(p * w + j, col * w + j);
                }
            }
            let pivot = a[col * w + col].clone();
            for j in col..w {
                a[col * w + j] = a[col * w + j].clone() / pivot.clone();
            }
            for r in 0..n {
                if r == col || a[r * w + col].is_zero() {
                    continue;
                }
                let f = a[r * w + col].clone();
                for j in col..w {
                    let v = a[col * w + j].clone() * f.clone();
                    a[r * w + j] = a[r * w + j].clone() - v;
                }
            }
        }
        Ok((0..n).map(|i| a[i * w + n].clone()).collect())
    }

    /// Sylvester's criterion: leading minors alternate in sign, starting negative.
    pub fn is_negative_definite(&self) -> Result<bool, LinalgError> {
        if !self.is_symmetric() {
            return Err(LinalgError::NotSymmetric);
        }
        for k in 1..=self.n {
            let d = self.leading(k).det();
            let ok = if k % 2 == 1 { d.is_negative() } else { d.is_positive() };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        f.debug_struct("Matrix").field("n", &self.n).field("rows", &rows).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};
    use crate::Rational;

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect())
    }

    #[test]
    fn det_small() {
        assert_eq!(m(&[&[-2]]).det(), qi(-2));
        assert_eq!(m(&[&[-2, 1], &[1, -5]]).det(), qi(9));
        assert_eq!(Matrix::<Rational>::zeros(0).det(), qi(1));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), qi(-1));
    }

    #[test]
    fn solve_small() {
        assert_eq!(m(&[&[-3]]).solve(&[qi(-1)]).unwrap(), vec![q(1, 3)]);
        let b = vec![q(3, 4), qi(-2), qi(5)];
        assert_eq!(Matrix::identity(3).solve(&b).unwrap(), b);
        assert_eq!(
            m(&[&[-3, 1], &[1, -2]]).solve(&[qi(1), qi(0)]).unwrap(),
            vec![q(-2, 5), q(-1, 5)]
        );
        assert_eq!(m(&[&[-1, 1], &[1, -1]]).solve(&[qi(1), qi(0)]), Err(LinalgError::SingularMatrix));
    }

    #[test]
    fn definiteness() {
        assert!(m(&[&[-2]]).is_negative_definite().unwrap());
        assert!(!m(&[&[-1, 1], &[1, -1]]).is_negative_definite().unwrap());
        assert_eq!(m(&[&[-2, 1], &[0, -2]]).is_negative_definite(), Err(LinalgError::NotSymmetric));
    }
}
