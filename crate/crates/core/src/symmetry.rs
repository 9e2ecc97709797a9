//! Kramers pairing of the single-particle spectrum, pseudo-spin generators
//! built from the pairs, and the commutator analysis of a model.
//!
//! The pairing is canonical: inside each degenerate cluster the first mode
//! is the normalized projection of the basis orbital with the largest
//! weight in the cluster (lowest index on ties), and its partner is the
//! time-reversed mode `−iσ^y K ψ`. The construction therefore depends only
//! on the cluster projectors, not on the eigensolver's arbitrary basis.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fock::{commutator, one_body_operator, FockBasis, ManyBodyOperator};
use crate::gauge::{fix_gauge, rotated_spin_generators, rotated_spin_matrices};
use crate::hamiltonian::{
    build_hopping, build_interaction, build_single_particle, casimir, spin_operators, time_reverse_vector,
    SingleParticleMatrix,
};
use crate::lattice::{classify_topology, holonomy_report, ModelGraph, Topology};
use crate::linalg::{self, degenerate_clusters, CMatrix};
use crate::scalar::{c, cr, levi_civita, Complex, Real};
use crate::spinor::SpinMatrix;

/// Default relative gap for merging eigenvalues into one cluster.
pub const DEFAULT_PAIRING_TOL: f64 = 1e-9;

/// Commutators below `ZERO_PER_DIM · dim` (Frobenius) count as vanishing.
pub const ZERO_PER_DIM: f64 = 1e-9;

const AXES: [&str; 3] = ["x", "y", "z"];

/// Eigen-decomposition of a time-reversal symmetric hopping matrix with
/// its modes grouped into Kramers pairs.
#[derive(Debug, Clone)]
pub struct SingleParticleSolution<T: Real> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Columns are modes; column `k` belongs to `values[k]`.
    pub modes: CMatrix<T>,
    /// Each mode index appears in exactly one pair.
    pub pairs: Vec<(usize, usize)>,
    /// Degenerate clusters as half-open index ranges.
    pub clusters: Vec<(usize, usize)>,
}

impl<T: Real> SingleParticleSolution<T> {
    /// Assembles a solution from explicit modes and pairs, validating the
    /// pairing contract.
    pub fn from_parts(values: Vec<T>, modes: CMatrix<T>, pairs: Vec<(usize, usize)>, tol: T) -> Result<Self> {
        let n = values.len();
        if modes.nrows() != n || modes.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: modes.ncols(),
            });
        }
        let mut seen = vec![false; n];
        for &(a, b) in &pairs {
            for k in [a, b] {
                if k >= n || std::mem::replace(&mut seen[k], true) {
                    return Err(Error::validation("pairs", format!("mode {k} unpaired or reused")));
                }
            }
            if !((values[a] - values[b]).abs() < tol) {
                return Err(Error::validation(
                    "pairs",
                    format!("modes {a} and {b} are not degenerate"),
                ));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::validation("pairs", "not every mode is paired"));
        }
        let range = spectral_range(&values);
        let clusters = degenerate_clusters(&values, tol * T::one().max(range));
        Ok(Self {
            values,
            modes,
            pairs,
            clusters,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.values.len() / 2
    }

    /// `‖D†D − I‖_max`.
    pub fn unitarity_defect(&self) -> T {
        linalg::unitarity_defect(&self.modes)
    }

    /// Re-pairs each cluster with a reference spin frame.
    ///
    /// `reference` holds single-particle matrices `G^α` that commute with the
    /// hopping matrix and act as spin ½ on every cluster. The first mode of
    /// each pair is a `G^z = +½` state and its partner is `(G^x − iG^y)` applied
    /// to it, so the resulting pseudo-spin equals `G` on the occupied levels.
    pub fn aligned_to(&self, reference: &[CMatrix<T>; 3]) -> Result<Self> {
        let n = self.values.len();
        for g in reference {
            if g.nrows() != n || g.ncols() != n {
                return Err(Error::Dimension {
                    expected: n,
                    actual: g.nrows(),
                });
            }
        }
        let tol = T::tol(1e-8);
        let lowering = &reference[0] - reference[1].map(|z| z * c(T::zero(), T::one()));
        let mut modes = self.modes.clone();
        let mut pairs = Vec::with_capacity(n / 2);
        for &(start, end) in &self.clusters {
            let q = self.modes.columns(start, end - start).into_owned();
            let restricted = linalg::adjoint(&q) * &reference[2] * &q;
            let eig = linalg::hermitian_eigen(&restricted)?;
            let m = end - start;
            let half = T::lit(0.5);
            let (lower, upper) = eig.values.split_at(m / 2);
            if lower.iter().any(|&v| (v + half).abs() > tol) || upper.iter().any(|&v| (v - half).abs() > tol) {
                return Err(Error::Numerical(format!(
                    "reference frame is not a spin-½ symmetry on levels {start}..{end}"
                )));
            }
            for (k, y) in (m / 2..m).enumerate() {
                let v = &q * eig.vectors.column(y);
                let w = &lowering * &v;
                let in_cluster = &q * (linalg::adjoint(&q) * &w);
                if linalg::vnorm(&(&w - &in_cluster)) > tol || (T::one() - linalg::vnorm(&w)).abs() > tol {
                    return Err(Error::Numerical(format!(
                        "reference lowering leaves levels {start}..{end}"
                    )));
                }
                let (a, b) = (start + 2 * k, start + 2 * k + 1);
                modes.set_column(a, &v);
                modes.set_column(b, &w);
                pairs.push((a, b));
            }
        }
        Ok(Self {
            values: self.values.clone(),
            modes,
            pairs,
            clusters: self.clusters.clone(),
        })
    }
}

fn spectral_range<T: Real>(sorted: &[T]) -> T {
    match (sorted.first(), sorted.last()) {
        (Some(&lo), Some(&hi)) => hi - lo,
        _ => T::zero(),
    }
}

fn dot<T: Real>(a: &DVector<Complex<T>>, b: &DVector<Complex<T>>) -> Complex<T> {
    a.iter()
        .zip(b.iter())
        .fold(cr(T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// Orthonormal basis of the span of `cols`, dropping directions with
/// residual norm below `tol`.
fn orthonormalize<T: Real>(cols: Vec<DVector<Complex<T>>>, tol: T) -> Vec<DVector<Complex<T>>> {
    let mut basis: Vec<DVector<Complex<T>>> = Vec::new();
    for mut v in cols {
        for _ in 0..2 {
            for b in &basis {
                let ov = dot(b, &v);
                v -= b * ov;
            }
        }
        let norm = linalg::vnorm(&v);
        if norm > tol {
            basis.push(v / cr(norm));
        }
    }
    basis
}

/// Diagonalizes `H1` and groups its modes into time-reversal pairs.
///
/// `tol` is the degeneracy gap relative to `max(1, spectral range)`.
pub fn diagonalize_and_pair<T: Real>(h1: &SingleParticleMatrix<T>, tol: T) -> Result<SingleParticleSolution<T>> {
    let scale = T::one().max(linalg::max_abs(h1.matrix()));
    let defect = h1.time_reversal_defect();
    if !(defect < T::tol(1e-10) * scale) {
        return Err(Error::validation(
            "hamiltonian",
            format!("single-particle matrix is not time-reversal symmetric (defect {defect})"),
        ));
    }
    let eig = h1.eigen()?;
    let n = eig.dim();
    let range = eig.spectral_range();
    let clusters = degenerate_clusters(&eig.values, tol * T::one().max(range));
    let check = T::tol(1e-8);
    let mut modes = eig.vectors.clone();
    let mut pairs = Vec::with_capacity(n / 2);
    for &(start, end) in &clusters {
        if (end - start) % 2 != 0 {
            return Err(Error::Numerical(format!(
                "odd degenerate cluster of size {} at energy {}",
                end - start,
                eig.values[start]
            )));
        }
        let mut remaining: Vec<DVector<Complex<T>>> =
            (start..end).map(|k| eig.vectors.column(k).into_owned()).collect();
        let mut slot = start;
        while !remaining.is_empty() {
            // Projector diagonal picks the seed orbital.
            let weights: Vec<T> = (0..n)
                .map(|p| remaining.iter().fold(T::zero(), |acc, v| acc + v[p].norm_sqr()))
                .collect();
            let top = weights.iter().copied().fold(T::zero(), T::max);
            let seed = weights
                .iter()
                .position(|&w| w >= top * (T::one() - T::lit(1e-6)))
                .expect("cluster has weight somewhere");
            let mut v = DVector::zeros(n);
            for r in &remaining {
                v += r * r[seed].conj();
            }
            let v = &v / cr(linalg::vnorm(&v));
            let tv = DVector::from_vec(time_reverse_vector(v.as_slice()));
            let overlap = dot(&v, &tv).norm();
            if overlap > check {
                return Err(Error::Numerical(format!(
                    "time-reversed partner not orthogonal (overlap {overlap})"
                )));
            }
            let mut w = DVector::zeros(n);
            for r in &remaining {
                w += r * dot(r, &tv);
            }
            if (T::one() - linalg::vnorm(&w)).abs() > check {
                return Err(Error::Numerical(format!(
                    "time-reversed partner leaves the degenerate cluster at energy {}",
                    eig.values[start]
                )));
            }
            let w = &w / cr(linalg::vnorm(&w));
            modes.set_column(slot, &v);
            modes.set_column(slot + 1, &w);
            pairs.push((slot, slot + 1));
            slot += 2;
            let projected: Vec<_> = remaining
                .into_iter()
                .map(|r| {
                    let r = &r - &v * dot(&v, &r);
                    &r - &w * dot(&w, &r)
                })
                .collect();
            remaining = orthonormalize(projected, T::lit(1e-6));
            if remaining.len() != end - slot {
                return Err(Error::Numerical(format!(
                    "cluster at energy {} lost rank while pairing",
                    eig.values[start]
                )));
            }
        }
    }
    Ok(SingleParticleSolution {
        values: eig.values,
        modes,
        pairs,
        clusters,
    })
}

/// Single-particle matrices `M^α = Σ_pairs ½ Σ_{λλ'} σ^α_{λλ'} d_λ d_λ'†`.
pub fn pseudo_spin_matrices<T: Real>(sol: &SingleParticleSolution<T>) -> [CMatrix<T>; 3] {
    let n = sol.values.len();
    let half = cr(T::lit(0.5));
    std::array::from_fn(|a| {
        let sigma = SpinMatrix::<T>::pauli(a);
        let mut m = CMatrix::zeros(n, n);
        for &(k1, k2) in &sol.pairs {
            let cols = [sol.modes.column(k1), sol.modes.column(k2)];
            for l in 0..2 {
                for lp in 0..2 {
                    let s = sigma.get(l, lp);
                    if s == cr(T::zero()) {
                        continue;
                    }
                    m += cols[l] * cols[lp].transpose().map(|z| z.conj()) * (s * half);
                }
            }
        }
        m
    })
}

/// Pseudo-spin generators `F^α = Σ_k ½ f_k† σ^α f_k` on a Fock sector.
pub fn pseudo_spin_generators<T: Real>(
    sol: &SingleParticleSolution<T>,
    basis: &Arc<FockBasis>,
) -> Result<[ManyBodyOperator<T>; 3]> {
    if basis.n_sites() != sol.n_sites() {
        return Err(Error::Dimension {
            expected: sol.n_sites(),
            actual: basis.n_sites(),
        });
    }
    let [mx, my, mz] = pseudo_spin_matrices(sol);
    Ok([
        one_body_operator(basis, &mx)?,
        one_body_operator(basis, &my)?,
        one_body_operator(basis, &mz)?,
    ])
}

/// Largest `‖[X^α, X^β] − iε_{αβγ} X^γ‖_F` over all α, β.
pub fn su2_algebra_residual<T: Real>(ops: &[ManyBodyOperator<T>; 3]) -> Result<T> {
    let mut worst = T::zero();
    for a in 0..3 {
        for b in 0..3 {
            let mut diff = commutator(&ops[a], &ops[b])?;
            for g in 0..3 {
                let e = levi_civita(a, b, g);
                if e != 0 {
                    let term = ops[g].scale(c(T::zero(), T::from_i32(e).unwrap()));
                    diff = &diff - &term;
                }
            }
            worst = worst.max(diff.frobenius_norm());
        }
    }
    Ok(worst)
}

/// Generator family used in commutator tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    /// Bare spin `s^α`.
    Spin,
    /// Kramers pseudo-spin `F^α`.
    PseudoSpin,
    /// Gauge-rotated spin `𝒮^α`.
    RotatedSpin,
}

impl Family {
    pub fn symbol(self) -> &'static str {
        match self {
            Family::Spin => "s",
            Family::PseudoSpin => "F",
            Family::RotatedSpin => "S",
        }
    }

    pub fn component(self, alpha: usize) -> String {
        format!("{}^{}", self.symbol(), AXES[alpha])
    }
}

/// Hamiltonian pieces commutators are taken against.
pub const TARGETS: [&str; 3] = ["H_T", "H_U", "H"];

pub const VERDICT_BARE_SPIN: &str = "bare spin SU(2) conserved";
pub const VERDICT_ROTATED_SPIN: &str = "SU(2) conserved (𝒮)";
pub const VERDICT_PSEUDO_SPIN: &str = "pseudo-spin SU(2) conserved (F)";
pub const VERDICT_BROKEN: &str = "SU(2) broken by on-site interaction";
pub const VERDICT_NO_PSEUDO_SPIN: &str = "no Kramers pseudo-spin (pairing failed)";

#[derive(Debug, Clone)]
pub struct SymmetryReport<T: Real> {
    pub n_sites: usize,
    pub n_particles: Option<usize>,
    pub dim: usize,
    pub topology: Topology,
    pub trivializable: bool,
    pub kramers_ok: bool,
    /// Largest SU(2) algebra residual of the pseudo-spin generators.
    pub algebra_residual: Option<T>,
    /// `(Σ_α (F^α)² − Σ_α (𝒮^α)²)` Frobenius norm, when both exist.
    pub casimir_gap: Option<T>,
    pub single_particle_spectrum: Vec<T>,
    /// Operator component (e.g. `"F^x"`) → target (`"H_T"`, `"H_U"`, `"H"`) → `‖[A, B]‖_F`.
    pub commutator_norms: BTreeMap<String, BTreeMap<String, T>>,
    pub zero_threshold: T,
    pub verdicts: Vec<String>,
}

impl<T: Real> SymmetryReport<T> {
    /// Largest norm of `[X^α, target]` over α, or `None` if the family is absent.
    pub fn family_norm(&self, family: Family, target: &str) -> Option<T> {
        (0..3)
            .map(|a| {
                self.commutator_norms
                    .get(&family.component(a))
                    .and_then(|row| row.get(target).copied())
            })
            .try_fold(T::zero(), |acc, v| v.map(|v| acc.max(v)))
    }

    pub fn conserves(&self, family: Family, target: &str) -> bool {
        self.family_norm(family, target)
            .is_some_and(|v| v < self.zero_threshold)
    }
}

/// Builds every Hamiltonian piece and generator family for `g` on `basis`
/// and tabulates their commutators.
///
/// When the link rotations can be gauged away, the pseudo-spin pairs are
/// aligned with the gauge-rotated spin frame.
pub fn analyze<T: Real>(g: &ModelGraph<T>, basis: &Arc<FockBasis>) -> Result<SymmetryReport<T>> {
    if basis.n_sites() != g.n_sites() {
        return Err(Error::Dimension {
            expected: g.n_sites(),
            actual: basis.n_sites(),
        });
    }
    let h1 = build_single_particle(g);
    let spectrum = h1.eigen()?.values;
    let topology = classify_topology(g);
    let trivializable = holonomy_report(g).trivializable;

    let ht = build_hopping(g, basis)?;
    let hu = build_interaction(g, basis)?;
    let h = &ht + &hu;
    let targets = [&ht, &hu, &h];

    let mut families: Vec<(Family, [ManyBodyOperator<T>; 3])> = vec![(Family::Spin, spin_operators(basis))];
    let rotated = if trivializable {
        let (gt, _) = fix_gauge(g);
        families.push((Family::RotatedSpin, rotated_spin_generators(&gt, basis)?));
        Some(rotated_spin_matrices(&gt))
    } else {
        None
    };
    let pairing = diagonalize_and_pair(&h1, T::tol(DEFAULT_PAIRING_TOL)).and_then(|sol| match &rotated {
        Some(reference) => sol.aligned_to(reference),
        None => Ok(sol),
    });
    let kramers_ok = pairing.is_ok();
    let mut algebra_residual = None;
    if let Ok(sol) = &pairing {
        let f = pseudo_spin_generators(sol, basis)?;
        algebra_residual = Some(su2_algebra_residual(&f)?);
        families.push((Family::PseudoSpin, f));
    }

    let mut commutator_norms = BTreeMap::new();
    for (family, ops) in &families {
        for (a, op) in ops.iter().enumerate() {
            let mut row = BTreeMap::new();
            for (name, target) in TARGETS.iter().zip(targets) {
                row.insert(name.to_string(), commutator(op, target)?.frobenius_norm());
            }
            commutator_norms.insert(family.component(a), row);
        }
    }

    let casimir_gap = match (
        families.iter().find(|f| f.0 == Family::PseudoSpin),
        families.iter().find(|f| f.0 == Family::RotatedSpin),
    ) {
        (Some((_, f)), Some((_, s))) => Some((&casimir(f)? - &casimir(s)?).frobenius_norm()),
        _ => None,
    };

    let mut report = SymmetryReport {
        n_sites: g.n_sites(),
        n_particles: basis.n_particles(),
        dim: basis.dim(),
        topology,
        trivializable,
        kramers_ok,
        algebra_residual,
        casimir_gap,
        single_particle_spectrum: spectrum,
        commutator_norms,
        zero_threshold: T::tol(ZERO_PER_DIM) * T::from_count(basis.dim()),
        verdicts: Vec::new(),
    };
    report.verdicts = verdicts(&report);
    Ok(report)
}

fn verdicts<T: Real>(r: &SymmetryReport<T>) -> Vec<String> {
    let mut out = Vec::new();
    if r.conserves(Family::Spin, "H") {
        out.push(VERDICT_BARE_SPIN);
    }
    if r.conserves(Family::RotatedSpin, "H") {
        out.push(VERDICT_ROTATED_SPIN);
    }
    if !r.kramers_ok {
        out.push(VERDICT_NO_PSEUDO_SPIN);
    } else if r.conserves(Family::PseudoSpin, "H") {
        out.push(VERDICT_PSEUDO_SPIN);
    } else if r.conserves(Family::PseudoSpin, "H_T") && !r.conserves(Family::RotatedSpin, "H") {
        out.push(VERDICT_BROKEN);
    }
    out.into_iter().map(String::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;
    use crate::hamiltonian::build_many_body;
    use crate::lattice::{LinkSpec, SiteSpec};
    use crate::spinor::LinkRotation;
    use crate::test_support::{random_graph, random_unitary_2x2, ring_with_twist};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn z(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn twisted_ring(n: usize) -> ModelGraph<f64> {
        ring_with_twist(n, LinkRotation::about_y(-PI).unwrap())
    }

    #[test]
    fn single_decoupled_site() {
        let g = ModelGraph::new(vec![SiteSpec::new(0.0, 0.0)], vec![]).unwrap();
        let sol = diagonalize_and_pair(&build_single_particle(&g), 1e-9).unwrap();
        assert_eq!(sol.values, vec![0.0, 0.0]);
        assert_eq!(sol.pairs, vec![(0, 1)]);
    }

    #[test]
    fn twisted_ring_four_sites_pairs() {
        let sol = diagonalize_and_pair(&build_single_particle(&twisted_ring(4)), 1e-9).unwrap();
        let mut oracle: Vec<f64> = (0..8).map(|n| -2.0 * (PI * n as f64 / 4.0 + PI / 8.0).cos()).collect();
        oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in sol.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(sol.pairs.len(), 4);
        assert_eq!(sol.clusters.len(), 4);
        assert!(sol.unitarity_defect() < 1e-8);
        for &(a, b) in &sol.pairs {
            let v = sol.modes.column(a).into_owned();
            let tv = DVector::from_vec(time_reverse_vector(v.as_slice()));
            assert!((tv - sol.modes.column(b)).norm() < 1e-10);
        }
    }

    #[test]
    fn random_models_have_even_clusters() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for k in 0..30 {
            let g = random_graph(&mut rng, 5, k % 2 == 0);
            let sol = diagonalize_and_pair(&build_single_particle(&g), 1e-9).unwrap();
            assert!(sol.clusters.iter().all(|(a, b)| (b - a) % 2 == 0));
            assert!(sol.unitarity_defect() < 1e-8);
        }
    }

    #[test]
    fn accidental_degeneracy_is_paired() {
        // Star with three equivalent leaves: the zero level is 4-fold.
        let links = (1..=3)
            .map(|k| LinkSpec::new(0, k, -1.0, LinkRotation::about_x(0.7 * k as f64).unwrap()))
            .collect();
        let g = ModelGraph::new(vec![SiteSpec::new(0.0, 0.0); 4], links).unwrap();
        let sol = diagonalize_and_pair(&build_single_particle(&g), 1e-9).unwrap();
        assert!(sol.clusters.iter().any(|(a, b)| b - a == 4));
        assert_eq!(sol.pairs.len(), 4);
        assert!(sol.unitarity_defect() < 1e-8);
    }

    #[test]
    fn rejects_non_time_reversal_input() {
        let g = ModelGraph::new(
            vec![SiteSpec::new(0.0, 0.0); 2],
            vec![LinkSpec::with_matrix(0, 1, 1.0, SpinMatrix::scalar(z(0.0, 1.0)))],
        )
        .unwrap();
        assert!(diagonalize_and_pair(&build_single_particle(&g), 1e-9).is_err());
    }

    #[test]
    fn natural_pairing_reproduces_bare_spin() {
        let g = random_graph(&mut ChaCha8Rng::seed_from_u64(3), 3, true).without_spin_orbit();
        // Real symmetric orbital part: eigenvectors φ_k ⊗ ↑, φ_k ⊗ ↓.
        let h1 = build_single_particle(&g);
        let n = g.n_sites();
        let orbital = CMatrix::from_fn(n, n, |i, j| h1.matrix()[(2 * i, 2 * j)]);
        let e = linalg::hermitian_eigen(&orbital).unwrap();
        let mut modes = CMatrix::zeros(2 * n, 2 * n);
        let mut values = Vec::new();
        let mut pairs = Vec::new();
        for k in 0..n {
            for i in 0..n {
                modes[(2 * i, 2 * k)] = e.vectors[(i, k)];
                modes[(2 * i + 1, 2 * k + 1)] = e.vectors[(i, k)];
            }
            values.extend([e.values[k], e.values[k]]);
            pairs.push((2 * k, 2 * k + 1));
        }
        let sol = SingleParticleSolution::from_parts(values, modes, pairs, 1e-9).unwrap();
        let b = build_basis(n, 3).unwrap();
        let f = pseudo_spin_generators(&sol, &b).unwrap();
        let s = spin_operators(&b);
        for a in 0..3 {
            assert!((&f[a] - &s[a]).max_abs() < 1e-12);
        }
    }

    #[test]
    fn from_parts_validates_pairing() {
        let id = CMatrix::<f64>::identity(4, 4);
        assert!(SingleParticleSolution::from_parts(vec![0.0; 4], id.clone(), vec![(0, 1)], 1e-9).is_err());
        assert!(SingleParticleSolution::from_parts(vec![0.0; 4], id.clone(), vec![(0, 1), (1, 2)], 1e-9).is_err());
        assert!(
            SingleParticleSolution::from_parts(vec![0.0, 1.0, 1.0, 1.0], id.clone(), vec![(0, 1), (2, 3)], 1e-9)
                .is_err()
        );
        assert!(SingleParticleSolution::from_parts(vec![0.0; 4], id, vec![(0, 3), (1, 2)], 1e-9).is_ok());
    }

    #[test]
    fn pseudo_spin_algebra_and_free_conservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for k in 0..8 {
            let g = random_graph(&mut rng, 2 + k % 3, k % 2 == 0);
            let sol = diagonalize_and_pair(&build_single_particle(&g), 1e-9).unwrap();
            for n in 0..=2 * g.n_sites() {
                let b = build_basis(g.n_sites(), n).unwrap();
                let f = pseudo_spin_generators(&sol, &b).unwrap();
                let dim = b.dim() as f64;
                assert!(su2_algebra_residual(&f).unwrap() < 1e-10 * dim);
                let ht = build_hopping(&g, &b).unwrap();
                for op in &f {
                    assert!(op.is_hermitian(1e-12));
                    assert!(commutator(op, &ht).unwrap().frobenius_norm() < 1e-9 * dim);
                }
            }
        }
    }

    #[test]
    fn pairing_freedom_keeps_free_conservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = random_graph(&mut rng, 4, true);
        let sol = diagonalize_and_pair(&build_single_particle(&g), 1e-9).unwrap();
        let b = build_basis(4, 3).unwrap();
        let ht = build_hopping(&g, &b).unwrap();
        let thr = 1e-9 * b.dim() as f64;
        for _ in 0..10 {
            let mut mixed = sol.clone();
            for &(k1, k2) in &sol.pairs {
                let u = random_unitary_2x2(&mut rng);
                let (c1, c2) = (sol.modes.column(k1).into_owned(), sol.modes.column(k2).into_owned());
                mixed.modes.set_column(k1, &(&c1 * u.get(0, 0) + &c2 * u.get(1, 0)));
                mixed.modes.set_column(k2, &(&c1 * u.get(0, 1) + &c2 * u.get(1, 1)));
            }
            let f = pseudo_spin_generators(&mixed, &b).unwrap();
            assert!(su2_algebra_residual(&f).unwrap() < 1e-10 * b.dim() as f64);
            for op in &f {
                assert!(commutator(op, &ht).unwrap().frobenius_norm() < thr);
            }
        }
    }

    #[test]
    fn aligned_pairing_matches_rotated_spin_on_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for k in 0..6 {
            let g = random_graph(&mut rng, 3 + k % 2, false);
            let (gt, _) = fix_gauge(&g);
            let sol = diagonalize_and_pair(&build_single_particle(&g), 1e-9).unwrap();
            let aligned = sol.aligned_to(&rotated_spin_matrices(&gt)).unwrap();
            let n = g.n_sites();
            let b = build_basis(n, n).unwrap();
            let f = pseudo_spin_generators(&aligned, &b).unwrap();
            let s = rotated_spin_generators(&gt, &b).unwrap();
            for a in 0..3 {
                assert!((&f[a] - &s[a]).max_abs() < 1e-9);
            }
            let gap = (&casimir(&f).unwrap() - &casimir(&s).unwrap()).frobenius_norm();
            assert!(gap < 1e-9);
        }
    }

    #[test]
    fn alignment_rejects_non_symmetric_reference() {
        let g = twisted_ring(3);
        let sol = diagonalize_and_pair(&build_single_particle(&g), 1e-9).unwrap();
        let bare = crate::hamiltonian::spin_matrices::<f64>(3);
        assert!(sol.aligned_to(&bare).is_err());
    }

    #[test]
    fn analyze_tree_with_interaction() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let g = random_graph(&mut rng, 4, false);
        let us: Vec<f64> = (0..4).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let g = g.with_interactions(&us).unwrap();
        let b = build_basis(4, 4).unwrap();
        let r = analyze(&g, &b).unwrap();
        assert_eq!(r.topology, Topology::SimplyConnected);
        assert!(r.trivializable && r.kramers_ok);
        assert!(r.conserves(Family::RotatedSpin, "H"));
        assert!(r.conserves(Family::PseudoSpin, "H"));
        assert!(!r.conserves(Family::Spin, "H"));
        assert!(r.casimir_gap.unwrap() < 1e-9);
        assert!(r.verdicts.contains(&VERDICT_ROTATED_SPIN.to_string()));
    }

    #[test]
    fn analyze_ring() {
        let b = build_basis(3, 3).unwrap();
        let free = analyze(&twisted_ring(3), &b).unwrap();
        assert!(!free.trivializable);
        assert!(free.conserves(Family::PseudoSpin, "H"));
        assert!(free.family_norm(Family::RotatedSpin, "H").is_none());

        let interacting = analyze(&twisted_ring(3).with_uniform_u(2.0), &b).unwrap();
        assert!(interacting.conserves(Family::PseudoSpin, "H_T"));
        assert!(interacting.family_norm(Family::PseudoSpin, "H").unwrap() > 0.01);
        assert_eq!(interacting.verdicts, vec![VERDICT_BROKEN.to_string()]);
    }

    #[test]
    fn analyze_without_spin_orbit() {
        let g = twisted_ring(4).without_spin_orbit().with_uniform_u(3.0);
        let b = build_basis(4, 4).unwrap();
        let r = analyze(&g, &b).unwrap();
        assert!(r.trivializable);
        assert!(r.verdicts.contains(&VERDICT_BARE_SPIN.to_string()));
        assert!(r.algebra_residual.unwrap() < 1e-10 * b.dim() as f64);
    }

    #[test]
    fn interacting_many_body_is_consistent_with_pieces() {
        let g = twisted_ring(3).with_uniform_u(1.5);
        let b = build_basis(3, 2).unwrap();
        let h = build_many_body(&g, &b).unwrap();
        let split = &build_hopping(&g, &b).unwrap() + &build_interaction(&g, &b).unwrap();
        assert_eq!((&h - &split).nnz(), 0);
    }
}
