//! Model graphs: sites, spin-rotating links, topology and loop holonomies.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spinor::{is_scalar_multiple_of_identity, LinkRotation, SpinMatrix};

/// Tolerance for deciding whether a holonomy is an Abelian phase.
pub const TRIVIALIZABLE_TOL: f64 = 1e-10;

/// On-site parameters: chemical potential and Hubbard interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteSpec<T: Real> {
    pub mu: T,
    pub u: T,
}

impl<T: Real> SiteSpec<T> {
    pub fn new(mu: T, u: T) -> Self {
        Self { mu, u }
    }
}

/// Undirected link `i < j` with hopping block `t · R`, where `R` is a
/// unitary spin rotation. `R` is the matrix in `c_i† (t R) c_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec<T: Real> {
    pub i: usize,
    pub j: usize,
    pub t: T,
    rotation: SpinMatrix<T>,
}

impl<T: Real> LinkSpec<T> {
    pub fn new(i: usize, j: usize, t: T, rotation: LinkRotation<T>) -> Self {
        Self::with_matrix(i, j, t, rotation.matrix())
    }

    /// Link without spin rotation.
    pub fn plain(i: usize, j: usize, t: T) -> Self {
        Self::with_matrix(i, j, t, SpinMatrix::identity())
    }

    /// Link carrying an arbitrary unitary (checked when the graph is built).
    pub fn with_matrix(i: usize, j: usize, t: T, rotation: SpinMatrix<T>) -> Self {
        Self { i, j, t, rotation }
    }

    /// Normalized link matrix `T_ij / t_ij`.
    pub fn rotation(&self) -> &SpinMatrix<T> {
        &self.rotation
    }

    /// Full hopping block `T_ij`.
    pub fn hopping_block(&self) -> SpinMatrix<T> {
        self.rotation.scale(crate::scalar::cr(self.t))
    }

    /// Axis-angle form of the link rotation, if it is in SU(2).
    pub fn axis_angle(&self) -> Option<LinkRotation<T>> {
        self.rotation.to_axis_angle(T::tol(1e-9))
    }

    /// Link matrix for traversal `from → to`; the adjoint when walking
    /// against the stored orientation.
    pub fn oriented_rotation(&self, from: usize, to: usize) -> Option<SpinMatrix<T>> {
        if from == self.i && to == self.j {
            Some(self.rotation)
        } else if from == self.j && to == self.i {
            Some(self.rotation.adjoint())
        } else {
            None
        }
    }

    pub fn is_spin_trivial(&self, tol: T) -> bool {
        self.rotation.max_abs_diff(&SpinMatrix::identity()) < tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    SimplyConnected,
    MultiConnected,
}

/// A validated, connected model graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGraph<T: Real> {
    sites: Vec<SiteSpec<T>>,
    links: Vec<LinkSpec<T>>,
    /// Per site: `(neighbor, link index)` sorted by neighbor.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl<T: Real> ModelGraph<T> {
    pub fn new(sites: Vec<SiteSpec<T>>, links: Vec<LinkSpec<T>>) -> Result<Self> {
        let n = sites.len();
        if n == 0 {
            return Err(Error::validation("sites", "model has no sites"));
        }
        for (k, s) in sites.iter().enumerate() {
            if !s.mu.is_finite() {
                return Err(Error::validation(format!("sites[{k}].mu"), "not finite"));
            }
            if !s.u.is_finite() {
                return Err(Error::validation(format!("sites[{k}].U"), "not finite"));
            }
        }
        let mut seen = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n];
        for (k, l) in links.iter().enumerate() {
            if l.i >= n || l.j >= n {
                return Err(Error::validation(
                    format!("links[{k}]"),
                    format!("site index out of range for {n} sites"),
                ));
            }
            if l.i >= l.j {
                return Err(Error::validation(
                    format!("links[{k}]"),
                    format!("requires i < j, got i={} j={}", l.i, l.j),
                ));
            }
            if !seen.insert((l.i, l.j)) {
                return Err(Error::validation(
                    format!("links[{k}]"),
                    format!("duplicate link ({}, {})", l.i, l.j),
                ));
            }
            if !l.t.is_finite() {
                return Err(Error::validation(format!("links[{k}].t"), "not finite"));
            }
            if !(l.rotation.unitarity_defect() < T::tol(1e-10)) {
                return Err(Error::validation(format!("links[{k}]"), "link matrix is not unitary"));
            }
            adjacency[l.i].push((l.j, k));
            adjacency[l.j].push((l.i, k));
        }
        for nb in adjacency.iter_mut() {
            nb.sort_unstable();
        }
        let g = Self {
            sites,
            links,
            adjacency,
        };
        if g.bfs_order().len() != n {
            return Err(Error::validation("links", "graph is not connected"));
        }
        Ok(g)
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[SiteSpec<T>] {
        &self.sites
    }

    pub fn links(&self) -> &[LinkSpec<T>] {
        &self.links
    }

    pub fn neighbors(&self, site: usize) -> &[(usize, usize)] {
        &self.adjacency[site]
    }

    /// Index of the link joining `a` and `b`, in either orientation.
    pub fn link_between(&self, a: usize, b: usize) -> Option<usize> {
        let nb = self.adjacency.get(a)?;
        nb.binary_search_by_key(&b, |&(v, _)| v).ok().map(|pos| nb[pos].1)
    }

    /// Same graph with every on-site interaction replaced by `u`.
    pub fn with_uniform_u(&self, u: T) -> Self {
        let mut g = self.clone();
        for s in g.sites.iter_mut() {
            s.u = u;
        }
        g
    }

    /// Same graph with per-site interactions replaced.
    pub fn with_interactions(&self, us: &[T]) -> Result<Self> {
        if us.len() != self.sites.len() {
            return Err(Error::Dimension {
                expected: self.sites.len(),
                actual: us.len(),
            });
        }
        let mut g = self.clone();
        for (s, &u) in g.sites.iter_mut().zip(us) {
            s.u = u;
        }
        Ok(g)
    }

    /// Same graph with all link rotations removed.
    pub fn without_spin_orbit(&self) -> Self {
        let mut g = self.clone();
        for l in g.links.iter_mut() {
            l.rotation = SpinMatrix::identity();
        }
        g
    }

    pub(crate) fn replace_links(&self, links: Vec<LinkSpec<T>>) -> Self {
        debug_assert_eq!(links.len(), self.links.len());
        Self {
            sites: self.sites.clone(),
            links,
            adjacency: self.adjacency.clone(),
        }
    }

    /// True when every link matrix is the identity within `tol`.
    pub fn is_spin_trivial(&self, tol: T) -> bool {
        self.links.iter().all(|l| l.is_spin_trivial(tol))
    }

    pub fn cycle_rank(&self) -> usize {
        self.links.len() + 1 - self.sites.len()
    }

    fn bfs_order(&self) -> Vec<usize> {
        let mut visited = vec![false; self.sites.len()];
        let mut order = Vec::with_capacity(self.sites.len());
        let mut queue = VecDeque::from([0usize]);
        visited[0] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, _) in &self.adjacency[v] {
                if !visited[w] {
                    visited[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }
}

pub fn classify_topology<T: Real>(g: &ModelGraph<T>) -> Topology {
    if g.links().len() + 1 == g.n_sites() {
        Topology::SimplyConnected
    } else {
        Topology::MultiConnected
    }
}

/// Breadth-first spanning tree rooted at site 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    /// Link indices in the tree, in discovery order.
    pub tree_links: Vec<usize>,
    /// Link indices not in the tree, ascending.
    pub chords: Vec<usize>,
    /// `(parent site, link index)` for every non-root site.
    pub parent: Vec<Option<(usize, usize)>>,
    /// Sites in BFS discovery order, root first.
    pub order: Vec<usize>,
}

impl SpanningTree {
    /// Tree path from `site` up to the root, as a list of sites.
    pub fn path_to_root(&self, mut site: usize) -> Vec<usize> {
        let mut path = vec![site];
        while let Some((p, _)) = self.parent[site] {
            path.push(p);
            site = p;
        }
        path
    }
}

/// Deterministic BFS tree (lowest-index neighbor first) plus its chords.
pub fn spanning_tree<T: Real>(g: &ModelGraph<T>) -> SpanningTree {
    let n = g.n_sites();
    let mut parent = vec![None; n];
    let mut visited = vec![false; n];
    let mut in_tree = vec![false; g.links().len()];
    let mut tree_links = Vec::with_capacity(n.saturating_sub(1));
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([0usize]);
    visited[0] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(w, link) in g.neighbors(v) {
            if !visited[w] {
                visited[w] = true;
                parent[w] = Some((v, link));
                in_tree[link] = true;
                tree_links.push(link);
                queue.push_back(w);
            }
        }
    }
    let chords = (0..g.links().len()).filter(|&k| !in_tree[k]).collect();
    SpanningTree {
        tree_links,
        chords,
        parent,
        order,
    }
}

/// Ordered product of normalized link matrices along a closed walk
/// `[v0, v1, …, vk = v0]`.
pub fn cycle_holonomy<T: Real>(g: &ModelGraph<T>, walk: &[usize]) -> Result<SpinMatrix<T>> {
    if walk.len() < 2 || walk.first() != walk.last() {
        return Err(Error::validation("cycle", "walk is not closed"));
    }
    let mut acc = SpinMatrix::identity();
    for pair in walk.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let link = g
            .link_between(a, b)
            .ok_or_else(|| Error::validation("cycle", format!("sites {a} and {b} are not linked")))?;
        let r = g.links()[link]
            .oriented_rotation(a, b)
            .expect("link joins the walk sites");
        acc = acc * r;
    }
    Ok(acc)
}

/// Fundamental cycles of the BFS tree and their holonomies.
#[derive(Debug, Clone)]
pub struct HolonomyReport<T: Real> {
    /// One closed walk per chord: the chord `i → j`, then the tree path back.
    pub cycles: Vec<Vec<usize>>,
    pub holonomies: Vec<SpinMatrix<T>>,
    pub trivializable: bool,
}

/// Closed walk for a chord: `i → j` along the chord, then `j → … → i`
/// through the tree.
pub fn fundamental_cycle<T: Real>(g: &ModelGraph<T>, tree: &SpanningTree, chord: usize) -> Vec<usize> {
    let link = &g.links()[chord];
    let up_j = tree.path_to_root(link.j);
    let up_i = tree.path_to_root(link.i);
    // Lowest common ancestor: last shared site from the root end.
    let mut shared = 0;
    while shared < up_i.len() && shared < up_j.len() && up_i[up_i.len() - 1 - shared] == up_j[up_j.len() - 1 - shared] {
        shared += 1;
    }
    let j_to_lca = &up_j[..=up_j.len() - shared];
    let lca_to_i = up_i[..up_i.len() - shared].iter().rev();
    let mut walk = vec![link.i];
    walk.extend_from_slice(j_to_lca);
    walk.extend(lca_to_i);
    walk
}

pub fn holonomy_report<T: Real>(g: &ModelGraph<T>) -> HolonomyReport<T> {
    let tree = spanning_tree(g);
    let cycles: Vec<Vec<usize>> = tree
        .chords
        .iter()
        .map(|&chord| fundamental_cycle(g, &tree, chord))
        .collect();
    let holonomies: Vec<SpinMatrix<T>> = cycles
        .iter()
        .map(|walk| cycle_holonomy(g, walk).expect("fundamental cycle is a closed walk"))
        .collect();
    let tol = T::tol(TRIVIALIZABLE_TOL);
    let trivializable = holonomies.iter().all(|h| is_scalar_multiple_of_identity(h, tol));
    HolonomyReport {
        cycles,
        holonomies,
        trivializable,
    }
}
