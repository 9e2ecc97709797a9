//! Two worked scenarios: the ring with one spin-rotating bond (and its
//! spinless half-flux image), and ground-state spin checks on bipartite
//! lattices.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::{build_basis, commutator, eigensolve_dense, FockBasis};
use crate::gauge::{fix_gauge, rotated_spin_generators};
use crate::hamiltonian::{build_many_body, build_single_particle, casimir};
use crate::lattice::{holonomy_report, LinkSpec, ModelGraph, SiteSpec};
use crate::linalg::{degenerate_clusters, CMatrix};
use crate::scalar::{c, cr, Complex, Real};
use crate::spinor::LinkRotation;
use crate::symmetry::{diagonalize_and_pair, pseudo_spin_generators, DEFAULT_PAIRING_TOL, ZERO_PER_DIM};

/// `N`-site ring with hopping `J` and the rotation `e^{−iπσ_y/2}` on the
/// bond between the first and last site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSpec<T: Real> {
    pub n: usize,
    pub j: T,
    pub u: T,
}

impl<T: Real> RingSpec<T> {
    pub fn new(n: usize, j: T, u: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation("N", format!("ring needs at least 2 sites, got {n}")));
        }
        if !(j > T::zero()) || !j.is_finite() {
            return Err(Error::validation("J", format!("hopping must be positive, got {j}")));
        }
        if !u.is_finite() {
            return Err(Error::validation("U", "not finite"));
        }
        Ok(Self { n, j, u })
    }
}

pub fn build_ring<T: Real>(spec: &RingSpec<T>) -> ModelGraph<T> {
    let n = spec.n;
    let sites = vec![SiteSpec::new(T::zero(), spec.u); n];
    let twist = LinkRotation::about_y(-T::PI()).expect("valid angle");
    let links = if n == 2 {
        // Both bonds join sites 0 and 1: −J(I + e^{−iπσ_y/2}) = −√2 J e^{−iπσ_y/4}.
        let half_twist = LinkRotation::about_y(-T::FRAC_PI_2()).expect("valid angle");
        vec![LinkSpec::new(0, 1, -spec.j * T::SQRT_2(), half_twist)]
    } else {
        let mut links: Vec<_> = (0..n - 1).map(|i| LinkSpec::plain(i, i + 1, -spec.j)).collect();
        links.push(LinkSpec::new(0, n - 1, -spec.j, twist));
        links
    };
    ModelGraph::new(sites, links).expect("ring is a valid connected graph")
}

/// Spinless `2N`-site ring with uniform Peierls phase `π/2N` per bond.
#[derive(Debug, Clone)]
pub struct FluxRing<T: Real> {
    pub matrix: CMatrix<T>,
    /// Orbital pairs `(j, j + N)` carrying the mapped interaction `U n_j n_{j+N}`.
    pub interaction_pairs: Vec<(usize, usize)>,
    pub u: T,
}

impl<T: Real> FluxRing<T> {
    /// Product of hopping phases around the loop.
    pub fn loop_phase(&self) -> Complex<T> {
        let n = self.matrix.nrows();
        (0..n).fold(cr(T::one()), |acc, k| {
            let h = self.matrix[(k, (k + 1) % n)];
            acc * h / cr(h.norm())
        })
    }
}

pub fn map_to_flux_ring<T: Real>(spec: &RingSpec<T>) -> FluxRing<T> {
    let n2 = 2 * spec.n;
    let phase = T::PI() / T::from_count(n2);
    let hop = c(phase.cos(), phase.sin()) * cr(-spec.j);
    let mut m = CMatrix::zeros(n2, n2);
    for k in 0..n2 {
        let next = (k + 1) % n2;
        m[(k, next)] += hop;
        m[(next, k)] += hop.conj();
    }
    FluxRing {
        matrix: m,
        interaction_pairs: (0..spec.n).map(|k| (k, k + spec.n)).collect(),
        u: spec.u,
    }
}

/// `{−2J cos(πn/N + π/2N) : n = 1..2N}`, ascending.
pub fn analytic_dispersion<T: Real>(spec: &RingSpec<T>) -> Vec<T> {
    let n = T::from_count(spec.n);
    let two = T::lit(2.0);
    let mut out: Vec<T> = (1..=2 * spec.n)
        .map(|k| {
            let k = T::PI() * T::from_count(k) / n;
            -two * spec.j * (k + T::PI() / (two * n)).cos()
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    out
}

/// `max_α ‖[F^α, H]‖_F` on the ring at `U = 0` and at `spec.u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryBreaking<T: Real> {
    pub norm_free: T,
    pub norm_interacting: T,
    pub dim: usize,
    pub threshold: T,
}

impl<T: Real> SymmetryBreaking<T> {
    pub fn free_conserved(&self) -> bool {
        self.norm_free < self.threshold
    }

    pub fn interacting_conserved(&self) -> bool {
        self.norm_interacting < self.threshold
    }
}

pub fn ring_symmetry_breaking<T: Real>(spec: &RingSpec<T>, filling: usize) -> Result<SymmetryBreaking<T>> {
    if filling < 2 || filling + 2 > 2 * spec.n {
        return Err(Error::validation(
            "filling",
            format!("{filling} outside [2, {}]", 2 * spec.n - 2),
        ));
    }
    let free = build_ring(&RingSpec { u: T::zero(), ..*spec });
    let interacting = build_ring(spec);
    let basis = build_basis(spec.n, filling)?;
    let sol = diagonalize_and_pair(&build_single_particle(&free), T::tol(DEFAULT_PAIRING_TOL))?;
    let f = pseudo_spin_generators(&sol, &basis)?;
    let max_norm = |g: &ModelGraph<T>| -> Result<T> {
        let h = build_many_body(g, &basis)?;
        f.iter()
            .try_fold(T::zero(), |acc, op| Ok(acc.max(commutator(op, &h)?.frobenius_norm())))
    };
    Ok(SymmetryBreaking {
        norm_free: max_norm(&free)?,
        norm_interacting: max_norm(&interacting)?,
        dim: basis.dim(),
        threshold: T::tol(ZERO_PER_DIM) * T::from_count(basis.dim()),
    })
}

/// Two-colouring of a bipartite graph; `a` holds site 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

pub fn bipartition<T: Real>(g: &ModelGraph<T>) -> Option<Bipartition> {
    let mut colour = vec![None; g.n_sites()];
    colour[0] = Some(false);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let cv = colour[v].expect("queued sites are coloured");
        for &(w, _) in g.neighbors(v) {
            match colour[w] {
                None => {
                    colour[w] = Some(!cv);
                    queue.push_back(w);
                }
                Some(cw) if cw == cv => return None,
                _ => {}
            }
        }
    }
    let (a, b): (Vec<usize>, Vec<usize>) = (0..g.n_sites()).partition(|&k| colour[k] == Some(false));
    Some(Bipartition { a, b })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interaction {
    /// All `U_i ≥ 0`, half filling, bipartite lattice.
    Repulsive,
    /// All `U_i ≤ 0`, even filling.
    Attractive,
}

/// Ground-state spin measured with `𝒮² = Σ_α (𝒮^α)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiebOutcome<T: Real> {
    pub regime: Interaction,
    /// Twice the spin quantum number.
    pub two_s: usize,
    pub degeneracy: usize,
    pub ground_energy: T,
    /// Ground-space average of `𝒮²`.
    pub casimir: T,
    /// Twice the predicted spin: `||B| − |A||` (repulsive) or 0 (attractive).
    pub expected_two_s: usize,
}

impl<T: Real> LiebOutcome<T> {
    pub fn spin(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn expected_spin(&self) -> f64 {
        self.expected_two_s as f64 / 2.0
    }

    /// Spin matches the prediction and the ground state is one multiplet.
    pub fn passes(&self) -> bool {
        self.two_s == self.expected_two_s && self.degeneracy == self.two_s + 1
    }
}

/// Ground-state total spin in the gauge-rotated frame.
///
/// The model must be gauge-trivializable (a tree or loop holonomies that
/// are pure phases). The regime follows the sign of the interactions.
pub fn lieb_ground_state_spin<T: Real>(g: &ModelGraph<T>, basis: &Arc<FockBasis>) -> Result<LiebOutcome<T>> {
    if basis.n_sites() != g.n_sites() {
        return Err(Error::Dimension {
            expected: g.n_sites(),
            actual: basis.n_sites(),
        });
    }
    let n_particles = basis
        .n_particles()
        .ok_or_else(|| Error::validation("basis", "needs a fixed particle number"))?;
    let us: Vec<T> = g.sites().iter().map(|s| s.u).collect();
    let regime = if us.iter().all(|&u| u >= T::zero()) && us.iter().any(|&u| u > T::zero()) {
        Interaction::Repulsive
    } else if us.iter().all(|&u| u <= T::zero()) {
        Interaction::Attractive
    } else {
        return Err(Error::validation(
            "U",
            "mixed-sign interactions have no ground-state spin prediction",
        ));
    };
    let expected_two_s = match regime {
        Interaction::Repulsive => {
            let parts = bipartition(g)
                .ok_or_else(|| Error::validation("links", "repulsive check needs a bipartite lattice"))?;
            if n_particles != g.n_sites() {
                return Err(Error::validation(
                    "filling",
                    format!("repulsive check needs half filling ({} particles)", g.n_sites()),
                ));
            }
            parts.a.len().abs_diff(parts.b.len())
        }
        Interaction::Attractive => {
            if n_particles % 2 != 0 {
                return Err(Error::validation("filling", "attractive check needs an even filling"));
            }
            0
        }
    };
    if !holonomy_report(g).trivializable {
        return Err(Error::validation(
            "links",
            "link rotations cannot be gauged away; rotated spin frame undefined",
        ));
    }
    let (gt, _) = fix_gauge(g);
    let spin = rotated_spin_generators(&gt, basis)?;
    let s2 = casimir(&spin)?;
    let h = build_many_body(g, basis)?;
    let eig = eigensolve_dense(&h)?;
    let gap = T::tol(1e-8) * eig.spectral_range().max(T::one());
    let (start, end) = degenerate_clusters(&eig.values, gap)[0];
    let degeneracy = end - start;
    let total = (start..end).fold(T::zero(), |acc, k| {
        let v: Vec<Complex<T>> = eig.vectors.column(k).iter().copied().collect();
        acc + s2.expectation(&v).re
    });
    let s_s1 = total / T::from_count(degeneracy);
    // S(S+1) = x  ⇒  2S = √(1 + 4x) − 1
    let two_s_real = (T::one() + T::lit(4.0) * s_s1).max(T::zero()).sqrt() - T::one();
    let two_s_round = two_s_real.round();
    if (two_s_real - two_s_round).abs() / T::lit(2.0) > T::lit(5e-3) || two_s_round < T::zero() {
        return Err(Error::Numerical(format!(
            "ground-space ⟨𝒮²⟩ = {s_s1} is not S(S+1) for a half-integer S"
        )));
    }
    Ok(LiebOutcome {
        regime,
        two_s: two_s_round.to_usize().expect("non-negative"),
        degeneracy,
        ground_energy: eig.values[0],
        casimir: s_s1,
        expected_two_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;
    use crate::lattice::{classify_topology, Topology};
    use crate::linalg::{adjoint, hermitian_eigen, max_abs};
    use crate::spinor::SpinMatrix;
    use crate::test_support::tree_gauge_dressing;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn ring(n: usize, j: f64, u: f64) -> RingSpec<f64> {
        RingSpec::new(n, j, u).unwrap()
    }

    #[test]
    fn ring_spec_validation() {
        assert!(RingSpec::new(1, 1.0, 0.0).is_err());
        assert!(RingSpec::new(3, 0.0, 0.0).is_err());
        assert!(RingSpec::new(3, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn ring_structure() {
        let g = build_ring(&ring(5, 1.5, 2.0));
        assert_eq!(g.links().len(), 5);
        assert!(g.sites().iter().all(|s| s.mu == 0.0 && s.u == 2.0));
        let twisted: Vec<_> = g.links().iter().filter(|l| !l.is_spin_trivial(1e-12)).collect();
        assert_eq!(twisted.len(), 1);
        assert_eq!((twisted[0].i, twisted[0].j), (0, 4));
        let expect = SpinMatrix::sigma_y().scale(Complex::new(0.0, -1.0));
        assert!(twisted[0].rotation().max_abs_diff(&expect) < 1e-15);
        assert_eq!(
            classify_topology(&build_ring(&ring(3, 1.0, 0.0))),
            Topology::MultiConnected
        );
        let rep = holonomy_report(&build_ring(&ring(4, 1.0, 0.0)));
        assert!(!rep.trivializable);
    }

    #[test]
    fn two_site_ring_is_a_doubled_bond() {
        let g = build_ring(&ring(2, 1.0, 0.0));
        assert_eq!(g.links().len(), 1);
        let sum = SpinMatrix::identity() + SpinMatrix::sigma_y().scale(Complex::new(0.0, -1.0));
        assert!(
            g.links()[0]
                .hopping_block()
                .max_abs_diff(&sum.scale(Complex::new(-1.0, 0.0)))
                < 1e-15
        );
        let e = build_single_particle(&g).eigen().unwrap().values;
        let r2 = 2f64.sqrt();
        for (a, b) in e.iter().zip([-r2, -r2, r2, r2]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dispersion_examples() {
        let d = analytic_dispersion(&ring(2, 1.0, 0.0));
        let r2 = 2f64.sqrt();
        for (a, b) in d.iter().zip([-r2, -r2, r2, r2]) {
            assert!((a - b).abs() < 1e-14);
        }
        for n in 2..=8 {
            let d = analytic_dispersion(&ring(n, 1.0, 0.0));
            for pair in d.chunks(2) {
                assert!((pair[0] - pair[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flux_ring_spectrum_and_phase() {
        for n in 2..=8 {
            let spec = ring(n, 0.8, 0.0);
            let flux = map_to_flux_ring(&spec);
            let loop_phase = flux.loop_phase();
            assert!((loop_phase - Complex::new(-1.0, 0.0)).norm() < 1e-12);
            let numeric = hermitian_eigen(&flux.matrix).unwrap().values;
            let spin = build_single_particle(&build_ring(&spec)).eigen().unwrap().values;
            let analytic = analytic_dispersion(&spec);
            for k in 0..2 * n {
                assert!((numeric[k] - analytic[k]).abs() < 1e-10);
                assert!((spin[k] - analytic[k]).abs() < 1e-10);
            }
            assert_eq!(flux.interaction_pairs.len(), n);
            assert_eq!(flux.interaction_pairs[n - 1], (n - 1, 2 * n - 1));
        }
    }

    #[test]
    fn twist_unitary_maps_ring_onto_flux_ring() {
        // a_j = e^{−i(j−1)π/2N} c_{j↑},  a_{N+j} = e^{−i(N+j−1)π/2N} c_{j↓}
        for n in 3..=6 {
            let spec = ring(n, 1.0, 0.0);
            let h = build_single_particle(&build_ring(&spec));
            let mut w = CMatrix::<f64>::zeros(2 * n, 2 * n);
            for j in 0..n {
                for (spin, a) in [(0, j), (1, n + j)] {
                    let phase = a as f64 * PI / (2 * n) as f64;
                    // c_{j,spin} = e^{iφ} a
                    w[(2 * j + spin, a)] = Complex::new(phase.cos(), phase.sin());
                }
            }
            let mapped = adjoint(&w) * h.matrix() * &w;
            let flux = map_to_flux_ring(&spec).matrix;
            assert!(max_abs(&(mapped - flux)) < 1e-12);
        }
    }

    #[test]
    fn symmetry_breaking_guards() {
        assert!(ring_symmetry_breaking(&ring(3, 1.0, 2.0), 1).is_err());
        assert!(ring_symmetry_breaking(&ring(3, 1.0, 2.0), 5).is_err());
    }

    #[test]
    fn symmetry_breaking_examples() {
        let r = ring_symmetry_breaking(&ring(3, 1.0, 0.0), 3).unwrap();
        assert!(r.free_conserved() && r.interacting_conserved());
        let r = ring_symmetry_breaking(&ring(3, 1.0, 2.0), 3).unwrap();
        assert!(r.free_conserved());
        assert!(r.norm_interacting > 0.01);
        let r = ring_symmetry_breaking(&ring(4, 1.0, 4.0), 4).unwrap();
        assert!(r.free_conserved());
        assert!(r.norm_interacting > 0.01);
    }

    fn chain(n: usize, u: f64) -> ModelGraph<f64> {
        let links = (0..n - 1).map(|i| LinkSpec::plain(i, i + 1, -1.0)).collect();
        ModelGraph::new(vec![SiteSpec::new(0.0, u); n], links).unwrap()
    }

    fn star(u: f64) -> ModelGraph<f64> {
        let links = (1..4).map(|k| LinkSpec::plain(0, k, -1.0)).collect();
        ModelGraph::new(vec![SiteSpec::new(0.0, u); 4], links).unwrap()
    }

    #[test]
    fn bipartitions() {
        let p = bipartition(&star(0.0)).unwrap();
        assert_eq!(p.a, vec![0]);
        assert_eq!(p.b, vec![1, 2, 3]);
        assert!(bipartition(&build_ring(&ring(3, 1.0, 0.0))).is_none());
        assert!(bipartition(&build_ring(&ring(4, 1.0, 0.0))).is_some());
    }

    #[test]
    fn lieb_two_site() {
        let b = build_basis(2, 2).unwrap();
        let out = lieb_ground_state_spin(&chain(2, 4.0), &b).unwrap();
        assert_eq!(out.regime, Interaction::Repulsive);
        assert_eq!((out.two_s, out.degeneracy), (0, 1));
        assert!((out.ground_energy - 2.0 * (1.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!(out.passes());
    }

    #[test]
    fn lieb_star() {
        let b = build_basis(4, 4).unwrap();
        let out = lieb_ground_state_spin(&star(4.0), &b).unwrap();
        assert_eq!((out.two_s, out.degeneracy), (2, 3));
        assert!((out.casimir - 2.0).abs() < 1e-9);
        assert!(out.passes());
    }

    #[test]
    fn lieb_attractive_dressed_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let g = tree_gauge_dressing(&mut rng, &chain(4, -3.0));
        assert!(!g.is_spin_trivial(1e-6));
        let b = build_basis(4, 4).unwrap();
        let out = lieb_ground_state_spin(&g, &b).unwrap();
        assert_eq!(out.regime, Interaction::Attractive);
        assert_eq!((out.two_s, out.degeneracy), (0, 1));
    }

    #[test]
    fn lieb_guards() {
        let ring3 = build_ring(&ring(3, 1.0, 4.0)).without_spin_orbit();
        assert!(lieb_ground_state_spin(&ring3, &build_basis(3, 3).unwrap()).is_err());
        assert!(lieb_ground_state_spin(&chain(4, 4.0), &build_basis(4, 3).unwrap()).is_err());
        assert!(lieb_ground_state_spin(&chain(4, -3.0), &build_basis(4, 3).unwrap()).is_err());
        let twisted = build_ring(&ring(4, 1.0, 4.0));
        assert!(lieb_ground_state_spin(&twisted, &build_basis(4, 4).unwrap()).is_err());
    }
}
