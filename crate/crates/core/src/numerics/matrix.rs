//! Small dense complex matrices.
//!
//! Everything in the link runs on matrices no larger than a handful of
//! antennas, so the representation is a plain row-major `Vec` and the
//! operations are straightforward triple loops. Received vectors are
//! column matrices (`cols == 1`).

use num_complex::Complex64;

use crate::{Error, Result};

/// Pivot magnitudes below this are treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

/// Inversion is capped at this dimension; the link never exceeds it.
pub const MAX_INVERSION_DIM: usize = 16;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// All-zero matrix. Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from a row-major slice, validating length and finiteness.
    pub fn from_slice(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if !entries.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite("matrix entry"));
        }
        Ok(Self {
            rows,
            cols,
            data: entries.to_vec(),
        })
    }

    /// Column vector from a slice.
    pub fn column(entries: &[Complex64]) -> Result<Self> {
        Self::from_slice(entries.len(), 1, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&c| c * s).collect(),
        }
    }

    /// Frobenius inner product `trace(self^H * rhs)`.
    pub fn herm_inner(&self, rhs: &Self) -> Result<Complex64> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| a.conj() * b)
            .sum())
    }

    /// Squared Frobenius norm.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Maximum elementwise absolute difference to another matrix of the
    /// same shape.
    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Inverts a square matrix by Gauss-Jordan elimination with partial
/// pivoting. Dimension is capped at [`MAX_INVERSION_DIM`]; a pivot below
/// [`SINGULARITY_THRESHOLD`] reports the matrix as singular.
pub fn gauss_jordan_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "inverse of non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if n > MAX_INVERSION_DIM {
        return Err(Error::Domain {
            name: "matrix dimension",
            value: n as f64,
            expected: "<= 16",
        });
    }

    let mut work = a.clone();
    let mut inv = ComplexMatrix::identity(n);

    for col in 0..n {
        // pick the largest remaining pivot in this column
        let mut pivot_row = col;
        let mut pivot_mag = work.get(col, col).norm();
        for r in (col + 1)..n {
            let mag = work.get(r, col).norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag < SINGULARITY_THRESHOLD {
            return Err(Error::SingularMatrix(pivot_mag));
        }
        if pivot_row != col {
            for j in 0..n {
                let (x, y) = (work.get(col, j), work.get(pivot_row, j));
                work.set(col, j, y);
                work.set(pivot_row, j, x);
                let (x, y) = (inv.get(col, j), inv.get(pivot_row, j));
                inv.set(col, j, y);
                inv.set(pivot_row, j, x);
            }
        }

        let pivot = work.get(col, col);
        for j in 0..n {
            work.set(col, j, work.get(col, j) / pivot);
            inv.set(col, j, inv.get(col, j) / pivot);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = work.get(r, col);
            if factor == Complex64::ZERO {
                continue;
            }
            for j in 0..n {
                let w = work.get(r, j) - factor * work.get(col, j);
                work.set(r, j, w);
                let v = inv.get(r, j) - factor * inv.get(col, j);
                inv.set(r, j, v);
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{complex_gaussian_matrix, seeded_rng};

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_inverts_to_itself() {
        let eye = ComplexMatrix::identity(4);
        let inv = gauss_jordan_inverse(&eye).unwrap();
        assert_eq!(inv.max_abs_diff(&eye).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_inverse() {
        let mut d = ComplexMatrix::zeros(2, 2);
        d.set(0, 0, cx(2.0, 0.0));
        d.set(1, 1, cx(4.0, 0.0));
        let inv = gauss_jordan_inverse(&d).unwrap();
        assert_eq!(inv.get(0, 0), cx(0.5, 0.0));
        assert_eq!(inv.get(1, 1), cx(0.25, 0.0));
        assert_eq!(inv.get(0, 1), Complex64::ZERO);
    }

    #[test]
    fn random_inverse_residual() {
        let mut rng = seeded_rng(11);
        for _ in 0..20 {
            let a = complex_gaussian_matrix(4, 4, 1.0, &mut rng).unwrap();
            // shift the diagonal to keep the draw well conditioned
            let a = a.add(&ComplexMatrix::identity(4).scale(3.0)).unwrap();
            let inv = gauss_jordan_inverse(&a).unwrap();
            let residual = a.mul(&inv).unwrap();
            let gap = residual.max_abs_diff(&ComplexMatrix::identity(4)).unwrap();
            assert!(gap < 1e-10, "residual {gap:.3e}");
        }
    }

    #[test]
    fn double_inverse_returns_original() {
        let mut rng = seeded_rng(12);
        for n in [2usize, 4, 8] {
            let a = complex_gaussian_matrix(n, n, 1.0, &mut rng)
                .unwrap()
                .add(&ComplexMatrix::identity(n).scale(3.0))
                .unwrap();
            let back = gauss_jordan_inverse(&gauss_jordan_inverse(&a).unwrap()).unwrap();
            assert!(back.max_abs_diff(&a).unwrap() < 1e-8);
        }
    }

    #[test]
    fn singular_matrix_detected() {
        let mut s = ComplexMatrix::zeros(2, 2);
        s.set(0, 0, cx(1.0, 0.0));
        s.set(0, 1, cx(2.0, 0.0));
        s.set(1, 0, cx(2.0, 0.0));
        s.set(1, 1, cx(4.0, 0.0));
        assert!(matches!(
            gauss_jordan_inverse(&s),
            Err(Error::SingularMatrix(_))
        ));
    }

    #[test]
    fn inversion_dimension_cap() {
        let big = ComplexMatrix::identity(17);
        assert!(matches!(
            gauss_jordan_inverse(&big),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn hermitian_involution_is_exact() {
        let mut rng = seeded_rng(13);
        let a = complex_gaussian_matrix(3, 5, 1.0, &mut rng).unwrap();
        assert_eq!(a.hermitian().hermitian(), a);
    }

    #[test]
    fn herm_inner_matches_trace_of_product() {
        let mut rng = seeded_rng(14);
        let a = complex_gaussian_matrix(4, 3, 1.0, &mut rng).unwrap();
        let b = complex_gaussian_matrix(4, 3, 1.0, &mut rng).unwrap();
        let product = a.hermitian().mul(&b).unwrap();
        let trace: Complex64 = (0..3).map(|i| product.get(i, i)).sum();
        let inner = a.herm_inner(&b).unwrap();
        assert!((trace - inner).norm() < 1e-12);
    }

    #[test]
    fn mul_rejects_mismatched_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn from_slice_rejects_non_finite() {
        let bad = [cx(1.0, 0.0), cx(f64::NAN, 0.0)];
        assert!(ComplexMatrix::from_slice(1, 2, &bad).is_err());
    }
}
