//! Fermionic Fock bases over `2N` spin-orbitals and sparse operators on them.
//!
//! Spin-orbital `p = 2·site + spin` with spin 0 = ↑, 1 = ↓. An occupation
//! word has bit `p` set when orbital `p` is filled. Creation and annihilation
//! of orbital `p` carry the sign `(−1)^{#filled orbitals below p}`.

use std::fmt;
use std::ops::{Add, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Eigen};
use crate::scalar::{cr, Complex, Real};

/// Largest supported spin-orbital count.
pub const MAX_ORBITALS: usize = 28;

/// Largest site count for the all-sectors basis (dimension `4^N`).
pub const MAX_FULL_SPACE_SITES: usize = 6;

/// Stored operator entries below this modulus are dropped.
pub const DROP_TOL: f64 = 1e-14;

/// Occupation words of fixed particle number (or of every particle number).
#[derive(Clone, PartialEq, Eq)]
pub struct FockBasis {
    n_sites: usize,
    /// `None` for the full Fock space.
    n_particles: Option<usize>,
    states: Vec<u32>,
}

impl fmt::Debug for FockBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockBasis")
            .field("n_sites", &self.n_sites)
            .field("n_particles", &self.n_particles)
            .field("dim", &self.states.len())
            .finish()
    }
}

/// Basis of all words with exactly `n_particles` set bits, ascending.
pub fn build_basis(n_sites: usize, n_particles: usize) -> Result<Arc<FockBasis>> {
    let n_orb = 2 * n_sites;
    if n_orb > MAX_ORBITALS {
        return Err(Error::validation(
            "n_sites",
            format!("{n_sites} sites exceed the {MAX_ORBITALS}-orbital limit"),
        ));
    }
    if n_particles > n_orb {
        return Err(Error::validation(
            "n_particles",
            format!("{n_particles} particles do not fit in {n_orb} spin-orbitals"),
        ));
    }
    let mut states = Vec::new();
    if n_particles == 0 {
        states.push(0);
    } else {
        // Gosper's hack: next word with the same popcount.
        let limit = 1u64 << n_orb;
        let mut w: u64 = (1u64 << n_particles) - 1;
        while w < limit {
            states.push(w as u32);
            let low = w & w.wrapping_neg();
            let ripple = w + low;
            w = (((ripple ^ w) >> 2) / low) | ripple;
        }
    }
    Ok(Arc::new(FockBasis {
        n_sites,
        n_particles: Some(n_particles),
        states,
    }))
}

impl FockBasis {
    /// Every occupation word over `2·n_sites` orbitals.
    pub fn full(n_sites: usize) -> Result<Arc<FockBasis>> {
        if n_sites > MAX_FULL_SPACE_SITES {
            return Err(Error::validation(
                "n_sites",
                format!("full Fock space limited to {MAX_FULL_SPACE_SITES} sites"),
            ));
        }
        Ok(Arc::new(FockBasis {
            n_sites,
            n_particles: None,
            states: (0..1u32 << (2 * n_sites)).collect(),
        }))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_orbitals(&self) -> usize {
        2 * self.n_sites
    }

    pub fn n_particles(&self) -> Option<usize> {
        self.n_particles
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, word: u32) -> Option<usize> {
        self.states.binary_search(&word).ok()
    }

    fn check_orbital(&self, p: usize) -> Result<()> {
        if p >= self.n_orbitals() {
            return Err(Error::validation(
                "orbital",
                format!("index {p} out of range for {} orbitals", self.n_orbitals()),
            ));
        }
        Ok(())
    }
}

/// Spin-orbital index of `(site, spin)`.
#[inline]
pub fn orbital(site: usize, spin: usize) -> usize {
    2 * site + spin
}

#[inline]
fn parity_below(word: u32, p: usize) -> bool {
    (word & ((1u32 << p) - 1)).count_ones() % 2 == 1
}

/// `c_q` on a word: `(sign negative, new word)`, or `None` if `q` is empty.
#[inline]
pub fn annihilate(word: u32, q: usize) -> Option<(bool, u32)> {
    (word >> q & 1 == 1).then(|| (parity_below(word, q), word ^ (1 << q)))
}

/// `c_p†` on a word: `(sign negative, new word)`, or `None` if `p` is filled.
#[inline]
pub fn create(word: u32, p: usize) -> Option<(bool, u32)> {
    (word >> p & 1 == 0).then(|| (parity_below(word, p), word | (1 << p)))
}

/// Sparse complex operator on a [`FockBasis`], stored as row-major sorted
/// `(row, col, value)` triplets with no duplicates.
#[derive(Clone)]
pub struct ManyBodyOperator<T: Real> {
    basis: Arc<FockBasis>,
    entries: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Real> fmt::Debug for ManyBodyOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManyBodyOperator")
            .field("basis", &self.basis)
            .field("nnz", &self.entries.len())
            .finish()
    }
}

impl<T: Real> ManyBodyOperator<T> {
    pub fn zero(basis: Arc<FockBasis>) -> Self {
        Self {
            basis,
            entries: Vec::new(),
        }
    }

    pub fn identity(basis: Arc<FockBasis>) -> Self {
        let entries = (0..basis.dim()).map(|k| (k, k, cr(T::one()))).collect();
        Self { basis, entries }
    }

    /// Builds an operator from unordered triplets; duplicates are summed.
    pub fn from_triplets(
        basis: Arc<FockBasis>,
        triplets: impl IntoIterator<Item = (usize, usize, Complex<T>)>,
    ) -> Self {
        let mut raw: Vec<_> = triplets.into_iter().collect();
        raw.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let drop = T::lit(DROP_TOL);
        let mut entries: Vec<(usize, usize, Complex<T>)> = Vec::with_capacity(raw.len());
        for (r, c, v) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|e| e.2.norm() >= drop);
        Self { basis, entries }
    }

    /// Diagonal operator with the given per-state values.
    pub fn diagonal(basis: Arc<FockBasis>, values: impl Fn(u32) -> T) -> Self {
        let entries: Vec<_> = basis
            .states()
            .iter()
            .enumerate()
            .map(|(k, &w)| (k, k, cr(values(w))))
            .collect();
        Self::from_triplets(basis, entries)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn entries(&self) -> &[(usize, usize, Complex<T>)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries
            .binary_search_by_key(&(row, col), |&(r, c, _)| (r, c))
            .map(|k| self.entries[k].2)
            .unwrap_or_else(|_| cr(T::zero()))
    }

    fn check_same_basis(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || *self.basis == *other.basis {
            Ok(())
        } else {
            Err(Error::BasisMismatch(format!("{:?} vs {:?}", self.basis, other.basis)))
        }
    }

    pub fn scale(&self, z: Complex<T>) -> Self {
        Self::from_triplets(self.basis.clone(), self.entries.iter().map(|&(r, c, v)| (r, c, v * z)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.basis.clone(),
            self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())),
        )
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: Complex<T>, other: &Self, b: Complex<T>) -> Result<Self> {
        self.check_same_basis(other)?;
        let merged = self
            .entries
            .iter()
            .map(|&(r, c, v)| (r, c, v * a))
            .chain(other.entries.iter().map(|&(r, c, v)| (r, c, v * b)));
        Ok(Self::from_triplets(self.basis.clone(), merged))
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        let dim = self.dim();
        let row_ptr = other.row_offsets();
        let mut acc = vec![cr(T::zero()); dim];
        let mut seen = vec![false; dim];
        let mut touched: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        let mut k = 0;
        while k < self.entries.len() {
            let row = self.entries[k].0;
            while k < self.entries.len() && self.entries[k].0 == row {
                let (_, mid, a) = self.entries[k];
                for &(_, col, b) in &other.entries[row_ptr[mid]..row_ptr[mid + 1]] {
                    if !seen[col] {
                        seen[col] = true;
                        touched.push(col);
                    }
                    acc[col] += a * b;
                }
                k += 1;
            }
            for &col in &touched {
                out.push((row, col, acc[col]));
                acc[col] = cr(T::zero());
                seen[col] = false;
            }
            touched.clear();
        }
        Ok(Self::from_triplets(self.basis.clone(), out))
    }

    fn row_offsets(&self) -> Vec<usize> {
        let mut ptr = vec![0usize; self.dim() + 1];
        for &(r, _, _) in &self.entries {
            ptr[r + 1] += 1;
        }
        for k in 0..self.dim() {
            ptr[k + 1] += ptr[k];
        }
        ptr
    }

    /// Operator applied to a dense vector.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![cr(T::zero()); self.dim()];
        for &(r, c, a) in &self.entries {
            out[r] += a * v[c];
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, e| acc + e.2.norm_sqr())
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, e| acc.max(e.2.norm()))
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_defect(&self) -> T {
        (self - &self.adjoint()).max_abs()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() < tol
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    /// `⟨v|A|v⟩` for a dense column.
    pub fn expectation(&self, v: &[Complex<T>]) -> Complex<T> {
        let av = self.apply(v);
        v.iter().zip(&av).fold(cr(T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }
}

impl<T: Real> Add for &ManyBodyOperator<T> {
    type Output = ManyBodyOperator<T>;

    fn add(self, rhs: Self) -> ManyBodyOperator<T> {
        self.linear_combination(cr(T::one()), rhs, cr(T::one()))
            .expect("operands on the same basis")
    }
}

impl<T: Real> Sub for &ManyBodyOperator<T> {
    type Output = ManyBodyOperator<T>;

    fn sub(self, rhs: Self) -> ManyBodyOperator<T> {
        self.linear_combination(cr(T::one()), rhs, cr(-T::one()))
            .expect("operands on the same basis")
    }
}

/// `Σ_pq M_pq c_p† c_q` for a `2N × 2N` coefficient matrix.
pub fn one_body_operator<T: Real>(basis: &Arc<FockBasis>, m: &CMatrix<T>) -> Result<ManyBodyOperator<T>> {
    let n_orb = basis.n_orbitals();
    if m.nrows() != n_orb || m.ncols() != n_orb {
        return Err(Error::Dimension {
            expected: n_orb,
            actual: m.nrows(),
        });
    }
    let drop = T::lit(DROP_TOL);
    let mut trip = Vec::new();
    for (col, &w) in basis.states().iter().enumerate() {
        for q in 0..n_orb {
            let Some((s1, w1)) = annihilate(w, q) else { continue };
            for p in 0..n_orb {
                let coef = m[(p, q)];
                if coef.norm() < drop {
                    continue;
                }
                let Some((s2, w2)) = create(w1, p) else { continue };
                let row = basis
                    .index_of(w2)
                    .expect("particle-conserving term stays in the sector");
                let v = if s1 ^ s2 { -coef } else { coef };
                trip.push((row, col, v));
            }
        }
    }
    Ok(ManyBodyOperator::from_triplets(basis.clone(), trip))
}

/// The elementary hop `c_p† c_q`; `p == q` gives the number operator `n_p`.
pub fn hopping_operator<T: Real>(basis: &Arc<FockBasis>, p: usize, q: usize) -> Result<ManyBodyOperator<T>> {
    basis.check_orbital(p)?;
    basis.check_orbital(q)?;
    let mut trip = Vec::new();
    for (col, &w) in basis.states().iter().enumerate() {
        let Some((s1, w1)) = annihilate(w, q) else { continue };
        let Some((s2, w2)) = create(w1, p) else { continue };
        let row = basis.index_of(w2).expect("hop stays in the sector");
        let sign = if s1 ^ s2 { -T::one() } else { T::one() };
        trip.push((row, col, cr(sign)));
    }
    Ok(ManyBodyOperator::from_triplets(basis.clone(), trip))
}

pub fn number_operator<T: Real>(basis: &Arc<FockBasis>, p: usize) -> Result<ManyBodyOperator<T>> {
    basis.check_orbital(p)?;
    Ok(ManyBodyOperator::diagonal(basis.clone(), |w| {
        if w >> p & 1 == 1 {
            T::one()
        } else {
            T::zero()
        }
    }))
}

fn full_space_ladder<T: Real>(
    basis: &Arc<FockBasis>,
    p: usize,
    act: fn(u32, usize) -> Option<(bool, u32)>,
) -> Result<ManyBodyOperator<T>> {
    basis.check_orbital(p)?;
    if basis.n_particles().is_some() {
        return Err(Error::validation(
            "basis",
            "single creation/annihilation operators need the full Fock space",
        ));
    }
    let trip = basis.states().iter().enumerate().filter_map(|(col, &w)| {
        act(w, p).map(|(neg, w2)| {
            let row = basis.index_of(w2).expect("full space contains every word");
            (row, col, cr(if neg { -T::one() } else { T::one() }))
        })
    });
    Ok(ManyBodyOperator::from_triplets(basis.clone(), trip.collect::<Vec<_>>()))
}

/// `c_p†` on the full Fock space.
pub fn creation_operator<T: Real>(basis: &Arc<FockBasis>, p: usize) -> Result<ManyBodyOperator<T>> {
    full_space_ladder(basis, p, create)
}

/// `c_p` on the full Fock space.
pub fn annihilation_operator<T: Real>(basis: &Arc<FockBasis>, p: usize) -> Result<ManyBodyOperator<T>> {
    full_space_ladder(basis, p, annihilate)
}

/// `AB − BA`.
pub fn commutator<T: Real>(a: &ManyBodyOperator<T>, b: &ManyBodyOperator<T>) -> Result<ManyBodyOperator<T>> {
    let ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    Ok(&ab - &ba)
}

/// `AB + BA`.
pub fn anticommutator<T: Real>(a: &ManyBodyOperator<T>, b: &ManyBodyOperator<T>) -> Result<ManyBodyOperator<T>> {
    let ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    Ok(&ab + &ba)
}

pub fn frobenius_norm<T: Real>(a: &ManyBodyOperator<T>) -> T {
    a.frobenius_norm()
}

/// Full spectrum of a Hermitian operator (dimension ≤ 5000).
pub fn eigensolve_dense<T: Real>(a: &ManyBodyOperator<T>) -> Result<Eigen<T>> {
    if a.dim() > linalg::MAX_DENSE_DIM {
        return Err(Error::validation(
            "dimension",
            format!(
                "{} exceeds the dense eigensolver limit {}",
                a.dim(),
                linalg::MAX_DENSE_DIM
            ),
        ));
    }
    linalg::hermitian_eigen(&a.to_dense())
}
