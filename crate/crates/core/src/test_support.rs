//! Seeded random fixtures shared by unit tests.

use rand::Rng;

use crate::lattice::{LinkSpec, ModelGraph, SiteSpec};
use crate::scalar::Complex;
use crate::spinor::{LinkRotation, SpinMatrix};

pub fn random_rotation<R: Rng>(rng: &mut R) -> LinkRotation<f64> {
    let cos_t: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let sin_t = (1.0 - cos_t * cos_t).sqrt();
    let axis = [sin_t * phi.cos(), sin_t * phi.sin(), cos_t];
    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    let theta = rng.gen_range(-6.2..6.2);
    LinkRotation::new(theta, axis.map(|a| a / norm)).unwrap()
}

/// `e^{iφ}` times a random SU(2) element.
pub fn random_unitary_2x2<R: Rng>(rng: &mut R) -> SpinMatrix<f64> {
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    random_rotation(rng).matrix().scale(Complex::new(phi.cos(), phi.sin()))
}

/// Random connected graph with random hoppings, potentials and rotations.
/// `multi` adds extra links on top of a random tree when `n ≥ 3`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, multi: bool) -> ModelGraph<f64> {
    let sites = (0..n).map(|_| SiteSpec::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|k| (rng.gen_range(0..k), k)).collect();
    if multi && n >= 3 {
        let extra = rng.gen_range(1..=n - 1);
        for _ in 0..extra * 4 {
            if pairs.len() >= n - 1 + extra {
                break;
            }
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let (i, j) = (a.min(b), a.max(b));
            if i != j && !pairs.contains(&(i, j)) {
                pairs.push((i, j));
            }
        }
    }
    let links = pairs
        .into_iter()
        .map(|(i, j)| {
            let t = rng.gen_range(0.3..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            LinkSpec::new(i, j, t, random_rotation(rng))
        })
        .collect();
    ModelGraph::new(sites, links).unwrap()
}

/// Plain `t = −1` chain closed by a link `(0, n−1)` carrying `rot`.
pub fn ring_with_twist(n: usize, rot: LinkRotation<f64>) -> ModelGraph<f64> {
    let mut links: Vec<_> = (0..n - 1).map(|i| LinkSpec::plain(i, i + 1, -1.0)).collect();
    links.push(LinkSpec::new(0, n - 1, -1.0, rot));
    ModelGraph::new(vec![SiteSpec::new(0.0, 0.0); n], links).unwrap()
}

/// Gauge-equivalent copy of `g` with link matrices `v_i† R_ij v_j` for
/// random SU(2) site rotations `v_i`.
pub fn tree_gauge_dressing<R: Rng>(rng: &mut R, g: &ModelGraph<f64>) -> ModelGraph<f64> {
    let v: Vec<SpinMatrix<f64>> = (0..g.n_sites()).map(|_| random_rotation(rng).matrix()).collect();
    let links = g
        .links()
        .iter()
        .map(|l| LinkSpec::with_matrix(l.i, l.j, l.t, v[l.i].adjoint() * *l.rotation() * v[l.j]))
        .collect();
    ModelGraph::new(g.sites().to_vec(), links).unwrap()
}
