//! Dense complex matrices and LU factorization with partial pivoting.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Numerical(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `P A = L U` with unit-diagonal `L`, both factors packed in one matrix.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    lu: ComplexMatrix,
    /// Row `i` of `P A` is row `perm[i]` of `A`.
    perm: Vec<usize>,
}

impl LuFactorization {
    /// Factors `a`. A pivot smaller than `1e-14·‖A‖_∞` is reported as
    /// [`Error::Singular`] with its elimination index.
    pub fn new(a: ComplexMatrix) -> Result<Self> {
        let n = a.dim();
        if n == 0 {
            return Err(Error::Empty("matrix"));
        }
        let threshold = 1e-14 * a.norm_inf();
        let mut lu = a;
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, magnitude) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if !(magnitude > threshold) {
                return Err(Error::Singular {
                    index: k,
                    magnitude,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }

            let pivot = lu[(k, k)];
            let (upper, lower) = lu.data.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n + k + 1..(k + 1) * n];
            for row in lower.chunks_exact_mut(n) {
                let factor = row[k] / pivot;
                row[k] = factor;
                if factor.re == 0.0 && factor.im == 0.0 {
                    continue;
                }
                for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *x -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.dim()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: Complex64 = row[..i].iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: Complex64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(u, y)| u * y)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        // A^H = U^H L^H P, so solve U^H w = b, then L^H v = w, then x = P^T v.
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut w = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let u = self.lu[(k, i)].conj();
                let wk = w[k];
                w[i] -= u * wk;
            }
            w[i] /= self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let l = self.lu[(k, i)].conj();
                let wk = w[k];
                w[i] -= l * wk;
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }

    /// Power-iteration estimate of `‖A^{-1}‖₂` on `A^{-H} A^{-1}`.
    ///
    /// Runs at most `max_iter` rounds and stops once the estimate changes by
    /// less than `rel_tol` relative.
    pub fn inverse_norm_estimate(&self, max_iter: usize, rel_tol: f64) -> f64 {
        let n = self.dim();
        let start = 1.0 / (n as f64).sqrt();
        let mut x = vec![Complex64::new(start, 0.0); n];
        let mut estimate = 0.0;
        for _ in 0..max_iter.max(1) {
            let y = self.solve(&x);
            let next = norm2(&y);
            let z = self.solve_adjoint(&y);
            let zn = norm2(&z);
            let converged = estimate > 0.0 && ((next - estimate) / next).abs() < rel_tol;
            estimate = next;
            if converged || zn == 0.0 {
                break;
            }
            x = z.iter().map(|v| v / zn).collect();
        }
        estimate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> ComplexMatrix {
        ComplexMatrix::from_rows(
            3,
            vec![
                c(0.0, 1.0),
                c(2.0, 0.0),
                c(1.0, -1.0),
                c(4.0, 0.0),
                c(1.0, 1.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(0.0, -3.0),
                c(2.0, 2.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn solves_and_adjoint_solves() {
        let a = sample();
        let b = vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)];
        let lu = LuFactorization::new(a.clone()).unwrap();
        let x = lu.solve(&b);
        let r: Vec<_> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm2(&r) < 1e-14);

        let ah = {
            let mut t = a.transpose();
            for z in t.data.iter_mut() {
                *z = z.conj();
            }
            t
        };
        let y = lu.solve_adjoint(&b);
        let r: Vec<_> = ah.matvec(&y).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm2(&r) < 1e-14);
    }

    #[test]
    fn singular_matrix_reports_index() {
        let a =
            ComplexMatrix::from_rows(2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)])
                .unwrap();
        match LuFactorization::new(a) {
            Err(Error::Singular { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn inverse_norm_of_diagonal() {
        let mut a = ComplexMatrix::identity(4);
        a[(2, 2)] = c(0.0, 0.25);
        let lu = LuFactorization::new(a).unwrap();
        let est = lu.inverse_norm_estimate(50, 1e-12);
        assert!((est - 4.0).abs() < 1e-6, "{est}");
        let id = LuFactorization::new(ComplexMatrix::identity(5)).unwrap();
        assert!((id.inverse_norm_estimate(20, 1e-3) - 1.0).abs() < 1e-15);
    }
}
