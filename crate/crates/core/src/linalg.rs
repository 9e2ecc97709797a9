//! Dense complex matrix helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Largest dimension accepted by the dense eigensolver.
pub const MAX_DENSE_DIM: usize = 5000;

/// Hermiticity tolerance for eigensolver input.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Ascending eigenvalues with eigenvectors as matching columns.
#[derive(Debug, Clone)]
pub struct Eigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> Eigen<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn spectral_range(&self) -> T {
        match (self.values.first(), self.values.last()) {
            (Some(&lo), Some(&hi)) => hi - lo,
            _ => T::zero(),
        }
    }
}

pub fn adjoint<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    a.transpose().map(|z| z.conj())
}

pub fn max_abs<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
}

/// Euclidean norm of a complex column.
pub fn vnorm<T: Real>(v: &DVector<Complex<T>>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

pub fn frobenius<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// `‖A − A†‖_max`.
pub fn hermiticity_defect<T: Real>(a: &CMatrix<T>) -> T {
    max_abs(&(a - adjoint(a)))
}

/// `‖V†V − I‖_max`.
pub fn unitarity_defect<T: Real>(v: &CMatrix<T>) -> T {
    let n = v.ncols();
    max_abs(&(adjoint(v) * v - CMatrix::<T>::identity(n, n)))
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen<T: Real>(a: &CMatrix<T>) -> Result<Eigen<T>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension {
            expected: n,
            actual: a.ncols(),
        });
    }
    if n > MAX_DENSE_DIM {
        return Err(Error::validation(
            "dimension",
            format!("{n} exceeds the dense eigensolver limit {MAX_DENSE_DIM}"),
        ));
    }
    let defect = hermiticity_defect(a);
    if !(defect < T::tol(HERMITIAN_TOL)) {
        return Err(Error::validation(
            "operator",
            format!("not Hermitian (‖A − A†‖_max = {defect})"),
        ));
    }
    if n == 0 {
        return Ok(Eigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    // Exact Hermitian part so the solver never sees rounding asymmetry.
    let half = Complex::new(T::lit(0.5), T::zero());
    let sym = (a + adjoint(a)).map(|z| z * half);
    let (values, vectors) = T::hermitian_eigen(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[x].partial_cmp(&values[y]).expect("finite eigenvalues"));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = CMatrix::from_fn(n, n, |r, col| vectors[(r, order[col])]);
    Ok(Eigen {
        values: sorted_values,
        vectors: sorted_vectors,
    })
}

/// Indices `[start, end)` of clusters of (near-)equal sorted values.
///
/// Neighbouring values closer than `gap` fall into the same cluster.
pub fn degenerate_clusters<T: Real>(sorted: &[T], gap: T) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=sorted.len() {
        if k == sorted.len() || sorted[k] - sorted[k - 1] >= gap {
            if k > start {
                out.push((start, k));
            }
            start = k;
        }
    }
    out
}
