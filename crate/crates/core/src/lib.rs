//! Exact diagonalization of spin-orbit coupled Hubbard models on arbitrary
//! graphs, with numerical checks of their SU(2) symmetries.
//!
//! The model is `H = Σ_links c_i† T_ij c_j + H.c. + Σ_i μ_i n_i + Σ_i U_i n_i↑ n_i↓`
//! with time-reversal symmetric link blocks `T_ij = t_ij exp(i θ_ij/2 n̂_ij·σ)`.
//! All numerics are generic over the real scalar ([`Real`]); the `*64`
//! aliases below fix it to `f64`.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod casestudy;
pub mod error;
pub mod fock;
pub mod gauge;
pub mod hamiltonian;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod scalar;
pub mod spinor;
pub mod symmetry;

#[cfg(test)]
pub(crate) mod test_support;

pub use error::{Error, Result};
pub use scalar::{Complex, Real};

pub type SpinMatrix64 = spinor::SpinMatrix<f64>;
pub type LinkRotation64 = spinor::LinkRotation<f64>;
pub type ModelGraph64 = lattice::ModelGraph<f64>;
pub type ManyBodyOperator64 = fock::ManyBodyOperator<f64>;
pub type SingleParticleMatrix64 = hamiltonian::SingleParticleMatrix<f64>;
pub type SingleParticleSolution64 = symmetry::SingleParticleSolution<f64>;
pub type SymmetryReport64 = symmetry::SymmetryReport<f64>;
pub type GaugeTransform64 = gauge::GaugeTransform<f64>;
pub type RingSpec64 = casestudy::RingSpec<f64>;

pub type SpinMatrix32 = spinor::SpinMatrix<f32>;
pub type ModelGraph32 = lattice::ModelGraph<f32>;
pub type ManyBodyOperator32 = fock::ManyBodyOperator<f32>;
