//! Dense complex matrices and vectors.
//!
//! Dimensions stay at or below `2 * 2^L` for the lattice sizes handled here,
//! so everything is row-major dense storage.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{normalize, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vector<T: Real> {
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn diag(entries: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension {
                op: "from_row_major",
                detail: format!("{rows}x{cols} needs {} entries, got {}", rows * cols, data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex<T>; N]; N]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self { rows: N, cols: N, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn try_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension {
                op: "matmul",
                detail: format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in row.iter().enumerate() {
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &Vector<T>) -> Result<Vector<T>> {
        if self.cols != v.dim() {
            return Err(Error::Dimension {
                op: "matvec",
                detail: format!("{}x{} times vector of dim {}", self.rows, self.cols, v.dim()),
            });
        }
        let data = (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(&v.data)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect();
        Ok(Vector { data })
    }

    /// Row vector times matrix, `bra . m`, without conjugation.
    pub fn vecmat(&self, bra: &Vector<T>) -> Result<Vector<T>> {
        if self.rows != bra.dim() {
            return Err(Error::Dimension {
                op: "vecmat",
                detail: format!("vector of dim {} times {}x{}", bra.dim(), self.rows, self.cols),
            });
        }
        let mut data = vec![Complex::new(T::zero(), T::zero()); self.cols];
        for (i, &b) in bra.data.iter().enumerate() {
            for (o, &a) in data.iter_mut().zip(&self.data[i * self.cols..(i + 1) * self.cols]) {
                *o = *o + b * a;
            }
        }
        Ok(Vector { data })
    }

    pub fn inverse_2x2(&self) -> Option<Self> {
        if self.rows != 2 || self.cols != 2 {
            return None;
        }
        let [a, b, c, d] = [self.data[0], self.data[1], self.data[2], self.data[3]];
        let det = a * d - b * c;
        if det.norm() == T::zero() {
            return None;
        }
        Some(Self {
            rows: 2,
            cols: 2,
            data: vec![d / det, -b / det, -c / det, a / det],
        })
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Panics on mismatched dimensions; use [`Matrix::try_matmul`] for a checked product.
impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_matmul(rhs).expect("matrix product dimensions")
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum dimensions");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference dimensions");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> Vector<T> {
    pub fn new(data: Vec<Complex<T>>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![Complex::new(T::zero(), T::zero()); dim],
        }
    }

    /// Unit vector `e_k` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = Complex::new(T::one(), T::zero());
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn axpy(&mut self, s: Complex<T>, other: &Self) {
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + s * b;
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }
}

impl<T: Real> Index<usize> for Vector<T> {
    type Output = Complex<T>;
    fn index(&self, i: usize) -> &Complex<T> {
        &self.data[i]
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Dimension {
            op: "kron",
            detail: format!("empty operand ({}x{} ⊗ {}x{})", a.rows, a.cols, b.rows, b.cols),
        });
    }
    Ok(kron_unchecked(a, b))
}

pub(crate) fn kron_unchecked<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = Matrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let s = a[(i, j)];
            if s.re == T::zero() && s.im == T::zero() {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Bilinear matrix element `bra . (m . ket)`; no complex conjugation.
pub fn matrix_element<T: Real>(bra: &Vector<T>, m: &Matrix<T>, ket: &Vector<T>) -> Result<Complex<T>> {
    if bra.dim() != m.rows() || ket.dim() != m.cols() {
        return Err(Error::Dimension {
            op: "matrix_element",
            detail: format!("bra {} / matrix {}x{} / ket {}", bra.dim(), m.rows(), m.cols(), ket.dim()),
        });
    }
    let mk = m.matvec(ket)?;
    Ok(bra.data.iter().zip(&mk.data).map(|(&a, &b)| a * b).sum())
}

/// Normalized residual of a matrix identity `Σ lhs = Σ rhs`: the largest
/// entry of the difference over the summed entry scales of every term.
pub fn relation_residual<T: Real>(lhs: &[&Matrix<T>], rhs: &[&Matrix<T>]) -> T {
    let first = lhs.first().or(rhs.first()).expect("at least one term");
    let mut diff = Matrix::zeros(first.rows, first.cols);
    for m in lhs {
        diff = &diff + m;
    }
    for m in rhs {
        diff = &diff - m;
    }
    let scale: T = lhs.iter().chain(rhs).map(|m| m.max_abs()).sum();
    normalize(diff.max_abs(), scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type M = Matrix<f64>;

    fn c(re: f64) -> Complex<f64> {
        cx(re, 0.0)
    }

    #[test]
    fn kron_identities() {
        let i2 = M::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), M::identity(4));
        let q = cx(1.3, 0.2);
        let d = M::diag(&[q, q.inv()]);
        let k = kron(&d, &i2).unwrap();
        let want = [q, q, q.inv(), q.inv()];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(k[(i, i)], *w);
        }
    }

    #[test]
    fn kron_rejects_empty() {
        let e = M::zeros(0, 0);
        assert!(matches!(kron(&e, &M::identity(2)), Err(Error::Dimension { .. })));
    }

    #[test]
    fn kron_matches_index_formula() {
        // X^- ⊗ K with the quantum-group generators at a complex q.
        let q = cx(0.8, 0.3);
        let xm = M::from_rows([[c(0.0), c(0.0)], [c(1.0), c(0.0)]]);
        let kk = M::diag(&[q, q.inv()]);
        let k = kron(&xm, &kk).unwrap();
        for row in 0..4 {
            for col in 0..4 {
                let (i, kr) = (row / 2, row % 2);
                let (j, kc) = (col / 2, col % 2);
                let xm_ij = if i == 1 && j == 0 { c(1.0) } else { c(0.0) };
                let k_ij = if kr == kc {
                    if kr == 0 { q } else { q.inv() }
                } else {
                    c(0.0)
                };
                assert_eq!(k[(row, col)], xm_ij * k_ij);
            }
        }
    }

    #[test]
    fn matrix_element_basics() {
        let i2 = M::identity(2);
        let e1 = Vector::basis(2, 0);
        let e2 = Vector::basis(2, 1);
        assert_eq!(matrix_element(&e1, &i2, &e1).unwrap(), c(1.0));
        assert_eq!(matrix_element(&e1, &i2, &e2).unwrap(), c(0.0));
        let e3 = Vector::<f64>::basis(3, 0);
        assert!(matrix_element(&e3, &i2, &e1).is_err());
    }

    #[test]
    fn matrix_element_is_bilinear() {
        let bra = Vector::new(vec![cx(0.0, 1.0), c(0.0)]);
        let m = M::identity(2);
        let ket = Vector::new(vec![cx(0.0, 1.0), c(0.0)]);
        // i * i = -1; a sesquilinear pairing would give +1.
        assert_eq!(matrix_element(&bra, &m, &ket).unwrap(), c(-1.0));
    }

    #[test]
    fn checked_products_report_mismatch() {
        let a = M::zeros(2, 3);
        let b = M::zeros(2, 3);
        assert!(a.try_matmul(&b).is_err());
        assert!(a.matvec(&Vector::zeros(2)).is_err());
        assert!(M::from_row_major(2, 2, vec![c(1.0); 3]).is_err());
    }
}
