//! 2×2 complex spin matrices: Pauli matrices, SU(2) rotations about an
//! axis, and the single-link time-reversal test.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{c, cr, Complex, Real};

/// A 2×2 complex matrix acting on the spin index (↑ = 0, ↓ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMatrix<T: Real> {
    pub entries: [[Complex<T>; 2]; 2],
}

impl<T: Real> SpinMatrix<T> {
    pub fn new(entries: [[Complex<T>; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn zero() -> Self {
        Self::scalar(Complex::new(T::zero(), T::zero()))
    }

    pub fn identity() -> Self {
        Self::scalar(cr(T::one()))
    }

    /// `z · I`.
    pub fn scalar(z: Complex<T>) -> Self {
        let o = Complex::new(T::zero(), T::zero());
        Self::new([[z, o], [o, z]])
    }

    /// Pauli matrix σ^α with α ∈ {0: x, 1: y, 2: z}.
    pub fn pauli(alpha: usize) -> Self {
        let (z, o, i) = (cr(T::zero()), cr(T::one()), c(T::zero(), T::one()));
        match alpha {
            0 => Self::new([[z, o], [o, z]]),
            1 => Self::new([[z, -i], [i, z]]),
            2 => Self::new([[o, z], [z, -o]]),
            _ => panic!("Pauli index {alpha} out of range 0..3"),
        }
    }

    pub fn sigma_x() -> Self {
        Self::pauli(0)
    }

    pub fn sigma_y() -> Self {
        Self::pauli(1)
    }

    pub fn sigma_z() -> Self {
        Self::pauli(2)
    }

    #[inline]
    pub fn get(&self, r: usize, col: usize) -> Complex<T> {
        self.entries[r][col]
    }

    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self::new([[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let e = &self.entries;
        Self::new([[f(e[0][0]), f(e[0][1])], [f(e[1][0]), f(e[1][1])]])
    }

    pub fn scale(&self, z: Complex<T>) -> Self {
        self.map(|w| w * z)
    }

    pub fn trace(&self) -> Complex<T> {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn det(&self) -> Complex<T> {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    /// Largest entrywise modulus.
    pub fn max_norm(&self) -> T {
        self.entries
            .iter()
            .flatten()
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).max_norm()
    }

    /// `‖M†M − I‖_max`.
    pub fn unitarity_defect(&self) -> T {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    /// Decomposes an SU(2) matrix as `exp(i θ/2 n̂·σ)` with θ ∈ [0, 2π].
    ///
    /// Returns `None` when the matrix is not in SU(2) within `tol`.
    pub fn to_axis_angle(&self, tol: T) -> Option<LinkRotation<T>> {
        if self.unitarity_defect() > tol || (self.det() - cr(T::one())).norm() > tol {
            return None;
        }
        let e = &self.entries;
        let two = T::lit(2.0);
        let cos_half = (e[0][0] + e[1][1]).re / two;
        let nz = (e[0][0] - e[1][1]).im / two;
        let nx = (e[0][1] + e[1][0]).im / two;
        let ny = (e[0][1] - e[1][0]).re / two;
        let sin_half = (nx * nx + ny * ny + nz * nz).sqrt();
        let half = sin_half.atan2(cos_half);
        let axis = if sin_half > T::epsilon() {
            [nx / sin_half, ny / sin_half, nz / sin_half]
        } else {
            [T::zero(), T::zero(), T::one()]
        };
        Some(LinkRotation {
            theta: two * half,
            axis,
        })
    }
}

impl<T: Real> Mul for SpinMatrix<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        let mut out = [[cr(T::zero()); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (col, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][col] + a[r][1] * b[1][col];
            }
        }
        Self::new(out)
    }
}

impl<T: Real> Add for SpinMatrix<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self::new([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl<T: Real> Sub for SpinMatrix<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Neg for SpinMatrix<T> {
    type Output = Self;

    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

/// Rotation angle θ (radians) about a unit axis n̂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkRotation<T: Real> {
    pub theta: T,
    pub axis: [T; 3],
}

impl<T: Real> LinkRotation<T> {
    /// Validated constructor: ‖axis‖ = 1 within 1e−12 (f64) and
    /// θ ∈ (−2π, 2π].
    pub fn new(theta: T, axis: [T; 3]) -> Result<Self> {
        let norm = axis.iter().fold(T::zero(), |acc, &a| acc + a * a).sqrt();
        if !norm.is_finite() || (norm - T::one()).abs() > T::lit(T::DEFAULT_TOL) {
            return Err(Error::validation(
                "axis",
                format!("rotation axis must have unit norm, got norm {norm}"),
            ));
        }
        let two_pi = T::TAU();
        if !theta.is_finite() || theta <= -two_pi || theta > two_pi {
            return Err(Error::validation("theta", format!("angle {theta} outside (-2π, 2π]")));
        }
        Ok(Self { theta, axis })
    }

    /// The trivial rotation θ = 0 about ẑ.
    pub fn none() -> Self {
        Self {
            theta: T::zero(),
            axis: [T::zero(), T::zero(), T::one()],
        }
    }

    pub fn about_x(theta: T) -> Result<Self> {
        Self::new(theta, [T::one(), T::zero(), T::zero()])
    }

    pub fn about_y(theta: T) -> Result<Self> {
        Self::new(theta, [T::zero(), T::one(), T::zero()])
    }

    pub fn about_z(theta: T) -> Result<Self> {
        Self::new(theta, [T::zero(), T::zero(), T::one()])
    }

    pub fn matrix(&self) -> SpinMatrix<T> {
        su2_from_axis_angle(self)
    }
}

/// `exp(i θ/2 n̂·σ) = cos(θ/2) I + i sin(θ/2) n̂·σ`.
pub fn su2_from_axis_angle<T: Real>(rot: &LinkRotation<T>) -> SpinMatrix<T> {
    let half = rot.theta / T::lit(2.0);
    let (s, co) = half.sin_cos();
    let [nx, ny, nz] = rot.axis;
    // i s (nx σx + ny σy + nz σz)
    SpinMatrix::new([[c(co, s * nz), c(s * ny, s * nx)], [c(-s * ny, s * nx), c(co, -s * nz)]])
}

/// Time-reversal test `σ^y M* σ^y = M`, i.e. `[−iσ^y K, M] = 0`.
pub fn time_reversal_symmetric<T: Real>(m: &SpinMatrix<T>, tol: T) -> bool {
    let sy = SpinMatrix::<T>::sigma_y();
    (sy * m.conj() * sy).max_abs_diff(m) < tol
}

/// True iff `‖M − cI‖_max < tol` with `c` the mean of the diagonal.
pub fn is_scalar_multiple_of_identity<T: Real>(m: &SpinMatrix<T>, tol: T) -> bool {
    let mean = m.trace() / cr(T::lit(2.0));
    m.max_abs_diff(&SpinMatrix::scalar(mean)) < tol
}

/// Time reversal `−iσ^y K` applied to a spinor `(a, b)`: gives `(−b*, a*)`.
pub fn time_reverse_spinor<T: Real>(v: [Complex<T>; 2]) -> [Complex<T>; 2] {
    [-v[1].conj(), v[0].conj()]
}
