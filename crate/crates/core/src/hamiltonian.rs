//! First-quantized hopping matrix, many-body Hamiltonians and bare spin
//! operators.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::{one_body_operator, FockBasis, ManyBodyOperator};
use crate::lattice::ModelGraph;
use crate::linalg::{self, CMatrix, Eigen};
use crate::scalar::{cr, Complex, Real};
use crate::spinor::{time_reverse_spinor, SpinMatrix};

/// Hermitian `2N × 2N` hopping matrix in spin-orbital order `2·site + spin`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleMatrix<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> SingleParticleMatrix<T> {
    /// Wraps a raw matrix; it must be square with even size and Hermitian.
    pub fn from_matrix(matrix: CMatrix<T>) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() || !n.is_multiple_of(2) {
            return Err(Error::validation(
                "matrix",
                format!("expected an even square matrix, got {}×{}", n, matrix.ncols()),
            ));
        }
        if !(linalg::hermiticity_defect(&matrix) < T::tol(1e-12)) {
            return Err(Error::validation("matrix", "not Hermitian"));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn n_sites(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// 2×2 spin block coupling sites `i` and `j`.
    pub fn block(&self, i: usize, j: usize) -> SpinMatrix<T> {
        let m = &self.matrix;
        SpinMatrix::new([
            [m[(2 * i, 2 * j)], m[(2 * i, 2 * j + 1)]],
            [m[(2 * i + 1, 2 * j)], m[(2 * i + 1, 2 * j + 1)]],
        ])
    }

    /// Largest violation of `σ^y B* σ^y = B` over all spin blocks.
    pub fn time_reversal_defect(&self) -> T {
        let n = self.n_sites();
        let sy = SpinMatrix::<T>::sigma_y();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let b = self.block(i, j);
                worst = worst.max((sy * b.conj() * sy).max_abs_diff(&b));
            }
        }
        worst
    }

    pub fn is_time_reversal_symmetric(&self, tol: T) -> bool {
        self.time_reversal_defect() < tol
    }

    pub fn eigen(&self) -> Result<Eigen<T>> {
        linalg::hermitian_eigen(&self.matrix)
    }
}

/// `−iσ^y K` applied site by site to a single-particle vector.
pub fn time_reverse_vector<T: Real>(v: &[Complex<T>]) -> Vec<Complex<T>> {
    v.chunks(2).flat_map(|s| time_reverse_spinor([s[0], s[1]])).collect()
}

/// `Σ_i c_i† M_i c_i` as a `2N × 2N` matrix from per-site spin blocks.
pub fn site_diagonal_matrix<T: Real>(n_sites: usize, block: impl Fn(usize) -> SpinMatrix<T>) -> CMatrix<T> {
    let mut m = CMatrix::zeros(2 * n_sites, 2 * n_sites);
    for i in 0..n_sites {
        let b = block(i);
        for a in 0..2 {
            for c in 0..2 {
                m[(2 * i + a, 2 * i + c)] = b.get(a, c);
            }
        }
    }
    m
}

pub fn build_single_particle<T: Real>(g: &ModelGraph<T>) -> SingleParticleMatrix<T> {
    let n = g.n_sites();
    let mut m = site_diagonal_matrix(n, |i| SpinMatrix::scalar(cr(g.sites()[i].mu)));
    for link in g.links() {
        let b = link.hopping_block();
        let (i, j) = (link.i, link.j);
        for a in 0..2 {
            for c in 0..2 {
                m[(2 * i + a, 2 * j + c)] += b.get(a, c);
                m[(2 * j + c, 2 * i + a)] += b.get(a, c).conj();
            }
        }
    }
    SingleParticleMatrix { matrix: m }
}

fn check_sites<T: Real>(g: &ModelGraph<T>, basis: &FockBasis) -> Result<()> {
    if basis.n_sites() != g.n_sites() {
        return Err(Error::Dimension {
            expected: g.n_sites(),
            actual: basis.n_sites(),
        });
    }
    Ok(())
}

/// Many-body `H_T`: hopping plus chemical potential.
pub fn build_hopping<T: Real>(g: &ModelGraph<T>, basis: &Arc<FockBasis>) -> Result<ManyBodyOperator<T>> {
    check_sites(g, basis)?;
    one_body_operator(basis, build_single_particle(g).matrix())
}

/// `H_U = Σ_i U_i n_{i↑} n_{i↓}` (diagonal).
pub fn build_interaction<T: Real>(g: &ModelGraph<T>, basis: &Arc<FockBasis>) -> Result<ManyBodyOperator<T>> {
    check_sites(g, basis)?;
    let us: Vec<T> = g.sites().iter().map(|s| s.u).collect();
    Ok(ManyBodyOperator::diagonal(basis.clone(), |w| {
        us.iter()
            .enumerate()
            .filter(|&(i, _)| (w >> (2 * i)) & 0b11 == 0b11)
            .fold(T::zero(), |acc, (_, &u)| acc + u)
    }))
}

/// Full `H = H_T + H_U` on a particle-number sector.
pub fn build_many_body<T: Real>(g: &ModelGraph<T>, basis: &Arc<FockBasis>) -> Result<ManyBodyOperator<T>> {
    let ht = build_hopping(g, basis)?;
    let hu = build_interaction(g, basis)?;
    Ok(&ht + &hu)
}

/// Single-particle matrices of `s^α = Σ_i ½ c_i† σ^α c_i`.
pub fn spin_matrices<T: Real>(n_sites: usize) -> [CMatrix<T>; 3] {
    let half = cr(T::lit(0.5));
    std::array::from_fn(|a| site_diagonal_matrix(n_sites, |_| SpinMatrix::pauli(a).scale(half)))
}

/// Total spin components `(s^x, s^y, s^z)`.
pub fn spin_operators<T: Real>(basis: &Arc<FockBasis>) -> [ManyBodyOperator<T>; 3] {
    spin_matrices(basis.n_sites()).map(|m| one_body_operator(basis, &m).expect("spin matrices match the basis"))
}

/// `Σ_α (X^α)²`.
pub fn casimir<T: Real>(ops: &[ManyBodyOperator<T>; 3]) -> Result<ManyBodyOperator<T>> {
    let mut acc = ManyBodyOperator::zero(ops[0].basis().clone());
    for op in ops {
        acc = &acc + &op.matmul(op)?;
    }
    Ok(acc)
}
