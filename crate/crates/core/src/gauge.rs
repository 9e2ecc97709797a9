//! Site-local spin rotations `d_i = u_i c_i` that absorb link rotations
//! along a spanning tree.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::{one_body_operator, FockBasis, ManyBodyOperator};
use crate::hamiltonian::{build_interaction, site_diagonal_matrix};
use crate::lattice::{spanning_tree, LinkSpec, ModelGraph};
use crate::linalg::CMatrix;
use crate::scalar::{cr, Real};
use crate::spinor::SpinMatrix;

/// Per-site unitaries `u_i` with `u_root = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransform<T: Real> {
    rotations: Vec<SpinMatrix<T>>,
    root: usize,
}

impl<T: Real> GaugeTransform<T> {
    pub fn identity(n_sites: usize) -> Self {
        Self {
            rotations: vec![SpinMatrix::identity(); n_sites],
            root: 0,
        }
    }

    /// Arbitrary per-site unitaries (each checked to 1e−12).
    pub fn from_rotations(rotations: Vec<SpinMatrix<T>>) -> Result<Self> {
        for (i, u) in rotations.iter().enumerate() {
            if !(u.unitarity_defect() < T::tol(1e-12)) {
                return Err(Error::validation(format!("u[{i}]"), "not unitary"));
            }
        }
        Ok(Self { rotations, root: 0 })
    }

    pub fn rotations(&self) -> &[SpinMatrix<T>] {
        &self.rotations
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn n_sites(&self) -> usize {
        self.rotations.len()
    }

    /// Link matrix seen by the rotated fermions: `u_i R_ij u_j†`.
    pub fn transform_link(&self, link: &LinkSpec<T>) -> SpinMatrix<T> {
        self.rotations[link.i] * *link.rotation() * self.rotations[link.j].adjoint()
    }

    /// The model rewritten in the rotated fermions `d_i`.
    pub fn apply(&self, g: &ModelGraph<T>) -> ModelGraph<T> {
        let links = g
            .links()
            .iter()
            .map(|l| LinkSpec::with_matrix(l.i, l.j, l.t, self.transform_link(l)))
            .collect();
        g.replace_links(links)
    }
}

/// Gauge that trivializes every tree link of the BFS spanning tree.
///
/// Returns the transform and the rotated model, in which tree links carry
/// the identity and each chord carries its residual `u_i R_ij u_j†`.
pub fn fix_gauge<T: Real>(g: &ModelGraph<T>) -> (GaugeTransform<T>, ModelGraph<T>) {
    let tree = spanning_tree(g);
    let mut rotations = vec![SpinMatrix::identity(); g.n_sites()];
    for &site in tree.order.iter().skip(1) {
        let (parent, link) = tree.parent[site].expect("non-root site has a parent");
        let r = g.links()[link]
            .oriented_rotation(parent, site)
            .expect("tree link joins parent and child");
        rotations[site] = rotations[parent] * r;
    }
    let gt = GaugeTransform { rotations, root: 0 };
    let mut in_tree = vec![false; g.links().len()];
    for &k in &tree.tree_links {
        in_tree[k] = true;
    }
    let links = g
        .links()
        .iter()
        .zip(&in_tree)
        .map(|(l, &tree_link)| {
            let m = if tree_link {
                SpinMatrix::identity()
            } else {
                gt.transform_link(l)
            };
            LinkSpec::with_matrix(l.i, l.j, l.t, m)
        })
        .collect();
    let transformed = g.replace_links(links);
    (gt, transformed)
}

/// Single-particle matrices of `𝒮^α = Σ_i ½ c_i† (u_i† σ^α u_i) c_i`.
pub fn rotated_spin_matrices<T: Real>(gt: &GaugeTransform<T>) -> [CMatrix<T>; 3] {
    let half = cr(T::lit(0.5));
    std::array::from_fn(|a| {
        site_diagonal_matrix(gt.n_sites(), |i| {
            let u = gt.rotations[i];
            (u.adjoint() * SpinMatrix::pauli(a) * u).scale(half)
        })
    })
}

/// Rotated spin operators `𝒮^α = Σ_i ½ d_i† σ^α d_i`.
pub fn rotated_spin_generators<T: Real>(
    gt: &GaugeTransform<T>,
    basis: &Arc<FockBasis>,
) -> Result<[ManyBodyOperator<T>; 3]> {
    if basis.n_sites() != gt.n_sites() {
        return Err(Error::Dimension {
            expected: gt.n_sites(),
            actual: basis.n_sites(),
        });
    }
    let [x, y, zz] = rotated_spin_matrices(gt);
    Ok([
        one_body_operator(basis, &x)?,
        one_body_operator(basis, &y)?,
        one_body_operator(basis, &zz)?,
    ])
}

/// `‖Σ U_i d_{i↑}†d_{i↑} d_{i↓}†d_{i↓} − Σ U_i n_{i↑} n_{i↓}‖_F`.
pub fn verify_hubbard_invariance<T: Real>(
    gt: &GaugeTransform<T>,
    g: &ModelGraph<T>,
    basis: &Arc<FockBasis>,
) -> Result<T> {
    if gt.n_sites() != g.n_sites() {
        return Err(Error::Dimension {
            expected: g.n_sites(),
            actual: gt.n_sites(),
        });
    }
    let n = g.n_sites();
    let mut rotated = ManyBodyOperator::zero(basis.clone());
    for (i, site) in g.sites().iter().enumerate() {
        if site.u == T::zero() {
            continue;
        }
        let u = gt.rotations[i];
        // d_{iσ}† d_{iσ} = Σ_ab conj(u_σa) u_σb c_ia† c_ib
        let density = |sigma: usize| -> Result<ManyBodyOperator<T>> {
            let block = SpinMatrix::new(std::array::from_fn(|a| {
                std::array::from_fn(|b| u.get(sigma, a).conj() * u.get(sigma, b))
            }));
            let m = site_diagonal_matrix(n, |k| if k == i { block } else { SpinMatrix::zero() });
            one_body_operator(basis, &m)
        };
        let term = density(0)?.matmul(&density(1)?)?;
        rotated = &rotated + &term.scale(cr(site.u));
    }
    let bare = build_interaction(g, basis)?;
    Ok((&rotated - &bare).frobenius_norm())
}
