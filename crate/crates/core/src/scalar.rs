//! Scalar abstraction shared by every module.
//!
//! All physics code is written against [`Real`], which is implemented for
//! `f32` and `f64`. Complex amplitudes are `Complex<T>` from `num-complex`.

use std::fmt::{Debug, Display};

use nalgebra::DMatrix;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub use num_complex::Complex;

/// Real floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + NumAssign + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Machine-size tolerance used when no explicit one is given.
    const DEFAULT_TOL: f64;

    /// Full eigendecomposition of a dense Hermitian matrix.
    ///
    /// Eigenvalues are returned unsorted together with the matrix whose
    /// columns are the matching orthonormal eigenvectors.
    fn hermitian_eigen(a: DMatrix<Complex<Self>>) -> (Vec<Self>, DMatrix<Complex<Self>>);

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Tolerance `x`, floored at the precision of the scalar type.
    fn tol(x: f64) -> Self {
        Self::lit(x.max(Self::DEFAULT_TOL))
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

fn nalgebra_hermitian_eigen<T: nalgebra::RealField + Copy>(a: DMatrix<Complex<T>>) -> (Vec<T>, DMatrix<Complex<T>>) {
    let eig = nalgebra::linalg::SymmetricEigen::new(a);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

impl Real for f64 {
    const DEFAULT_TOL: f64 = 1e-12;

    fn hermitian_eigen(a: DMatrix<Complex<f64>>) -> (Vec<f64>, DMatrix<Complex<f64>>) {
        nalgebra_hermitian_eigen(a)
    }
}

impl Real for f32 {
    const DEFAULT_TOL: f64 = 1e-5;

    fn hermitian_eigen(a: DMatrix<Complex<f32>>) -> (Vec<f32>, DMatrix<Complex<f32>>) {
        nalgebra_hermitian_eigen(a)
    }
}

pub(crate) fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Levi-Civita symbol for indices in `0..3`.
pub fn levi_civita(a: usize, b: usize, g: usize) -> i32 {
    match (a, b, g) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}
