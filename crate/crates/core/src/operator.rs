//! Sparse operators acting on a few modes of a larger space.
//!
//! An operator stores a sparse matrix over the local basis of its support
//! modes; on the full space it acts as that matrix tensored with the identity
//! on every other mode. The full matrix is never materialized unless asked for.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::space::HilbertSpace;
use crate::state::{same_space, StateVector};

const PARALLEL_MIN_DIM: usize = 1 << 15;

#[derive(Debug, Clone, PartialEq)]
struct Csr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl Csr {
    fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut rows: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            *rows[r].entry(c).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v.norm_sqr() != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, Complex64::new(1.0, 0.0))))
    }

    fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    fn matmul(&self, other: &Csr) -> Self {
        let mut trips = Vec::new();
        for r in 0..self.dim {
            let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    *acc.entry(c).or_insert(Complex64::new(0.0, 0.0)) += a * b;
                }
            }
            trips.extend(acc.into_iter().map(|(c, v)| (r, c, v)));
        }
        Self::from_triplets(self.dim, trips)
    }

    fn nnz(&self) -> usize {
        self.vals.len()
    }
}

/// Row-major offsets, inside a local space with dimensions `dims`, of every
/// basis state of the sub-register at `positions` (other digits zero).
fn register_offsets(dims: &[usize], positions: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let mut offsets = vec![0usize];
    for &p in positions {
        let (d, s) = (dims[p], strides[p]);
        offsets = offsets
            .iter()
            .flat_map(|&o| (0..d).map(move |n| o + n * s))
            .collect();
    }
    offsets
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    space: Arc<HilbertSpace>,
    support: Vec<usize>,
    local: Csr,
}

impl SparseOperator {
    pub fn identity(space: Arc<HilbertSpace>) -> Self {
        Self {
            space,
            support: Vec::new(),
            local: Csr::identity(1),
        }
    }

    /// Builds an operator from triplets `(row, col, value)` over the local
    /// basis of `support`, row-major in the order the modes are listed.
    pub fn from_local(
        space: Arc<HilbertSpace>,
        support: &[usize],
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Result<Self> {
        if support.iter().any(|&m| m >= space.num_modes()) {
            return Err(Error::UnknownMode(format!("mode index out of range in {support:?}")));
        }
        let mut sorted = support.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != support.len() {
            return Err(Error::Invalid("operator support lists a mode twice".into()));
        }
        let dims: Vec<usize> = sorted.iter().map(|&m| space.dims()[m]).collect();
        let dim: usize = dims.iter().product();
        // local index in caller order -> local index in sorted order
        let positions: Vec<usize> = support
            .iter()
            .map(|m| sorted.iter().position(|s| s == m).unwrap())
            .collect();
        let perm = register_offsets(&dims, &positions);
        let local = Csr::from_triplets(
            dim,
            triplets.into_iter().map(|(r, c, v)| (perm[r], perm[c], v)),
        );
        Ok(Self {
            space,
            support: sorted,
            local,
        })
    }

    pub fn from_local_dense(
        space: Arc<HilbertSpace>,
        support: &[usize],
        m: &DMatrix<Complex64>,
    ) -> Result<Self> {
        let trips = (0..m.nrows())
            .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
            .filter(|&(r, c)| m[(r, c)].norm_sqr() != 0.0)
            .map(|(r, c)| (r, c, m[(r, c)]));
        Self::from_local(space, support, trips)
    }

    /// Bosonic annihilation operator on `mode`, truncated at its cutoff.
    pub fn annihilation(space: Arc<HilbertSpace>, mode: usize) -> Result<Self> {
        if mode >= space.num_modes() {
            return Err(Error::UnknownMode(format!("mode index {mode}")));
        }
        let d = space.dims()[mode];
        let trips = (1..d).map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0)));
        Self::from_local(space, &[mode], trips)
    }

    pub fn creation(space: Arc<HilbertSpace>, mode: usize) -> Result<Self> {
        Ok(Self::annihilation(space, mode)?.adjoint())
    }

    pub fn number(space: Arc<HilbertSpace>, mode: usize) -> Result<Self> {
        if mode >= space.num_modes() {
            return Err(Error::UnknownMode(format!("mode index {mode}")));
        }
        let d = space.dims()[mode];
        let trips = (1..d).map(|n| (n, n, Complex64::new(n as f64, 0.0)));
        Self::from_local(space, &[mode], trips)
    }

    /// Photon-number parity `(-1)^n` on `mode`.
    pub fn parity(space: Arc<HilbertSpace>, mode: usize) -> Result<Self> {
        if mode >= space.num_modes() {
            return Err(Error::UnknownMode(format!("mode index {mode}")));
        }
        let d = space.dims()[mode];
        let trips = (0..d).map(|n| (n, n, Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)));
        Self::from_local(space, &[mode], trips)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn nnz_local(&self) -> usize {
        self.local.nnz()
    }

    pub fn local_triplets(&self) -> Vec<(usize, usize, Complex64)> {
        self.local.triplets().collect()
    }

    pub fn local_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.local.dim, self.local.dim);
        for (r, c, v) in self.local.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            support: self.support.clone(),
            local: self.local.adjoint(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            space: self.space.clone(),
            support: self.support.clone(),
            local: Csr::from_triplets(self.local.dim, self.local.triplets().map(|(r, k, v)| (r, k, v * c))),
        }
    }

    /// Local matrix on a larger support (tensored with identities).
    fn lifted(&self, support: &[usize]) -> Csr {
        if support == self.support.as_slice() {
            return self.local.clone();
        }
        let dims: Vec<usize> = support.iter().map(|&m| self.space.dims()[m]).collect();
        let own: Vec<usize> = self
            .support
            .iter()
            .map(|m| support.iter().position(|s| s == m).unwrap())
            .collect();
        let extra: Vec<usize> = (0..support.len()).filter(|p| !own.contains(p)).collect();
        let own_off = register_offsets(&dims, &own);
        let extra_off = register_offsets(&dims, &extra);
        let dim = dims.iter().product();
        let trips: Vec<_> = self
            .local
            .triplets()
            .flat_map(|(r, c, v)| {
                let (r, c) = (own_off[r], own_off[c]);
                extra_off.iter().map(move |&e| (r + e, c + e, v))
            })
            .collect();
        Csr::from_triplets(dim, trips)
    }

    fn union_support(&self, other: &SparseOperator) -> Vec<usize> {
        let mut u: Vec<usize> = self.support.iter().chain(&other.support).copied().collect();
        u.sort_unstable();
        u.dedup();
        u
    }

    /// The product `self * other` (apply `other` first).
    pub fn compose(&self, other: &SparseOperator) -> Result<Self> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let u = self.union_support(other);
        Ok(Self {
            space: self.space.clone(),
            local: self.lifted(&u).matmul(&other.lifted(&u)),
            support: u,
        })
    }

    pub fn add(&self, other: &SparseOperator) -> Result<Self> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let u = self.union_support(other);
        let a = self.lifted(&u);
        let b = other.lifted(&u);
        Ok(Self {
            space: self.space.clone(),
            local: Csr::from_triplets(a.dim, a.triplets().chain(b.triplets())),
            support: u,
        })
    }

    /// Matrix-vector product on the full space. No renormalization.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if !same_space(&self.space, state.space_arc()) {
            return Err(Error::SpaceMismatch);
        }
        StateVector::new(self.space.clone(), self.apply_slice(state.amplitudes()))
    }

    pub(crate) fn apply_slice(&self, input: &[Complex64]) -> Vec<Complex64> {
        let space = &*self.space;
        let offsets = space.local_offsets(&self.support);
        let lstrides: Vec<(usize, usize, usize)> = {
            let mut ls = 1usize;
            let mut v: Vec<(usize, usize, usize)> = self
                .support
                .iter()
                .rev()
                .map(|&m| {
                    let e = (space.strides()[m], space.dims()[m], ls);
                    ls *= space.dims()[m];
                    e
                })
                .collect();
            v.reverse();
            v
        };
        let local = &self.local;
        let value = |i: usize| -> Complex64 {
            let r: usize = lstrides.iter().map(|&(s, d, l)| ((i / s) % d) * l).sum();
            let base = i - offsets[r];
            local.row(r).map(|(c, v)| v * input[base + offsets[c]]).sum()
        };
        let n = input.len();
        if n >= PARALLEL_MIN_DIM {
            (0..n).into_par_iter().map(value).collect()
        } else {
            (0..n).map(value).collect()
        }
    }

    /// Checks `U^dagger U = 1` on the local support.
    pub fn unitarity_error(&self) -> f64 {
        let u = self.local_dense();
        let p = u.adjoint() * &u;
        (p - DMatrix::<Complex64>::identity(u.nrows(), u.ncols()))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() < tol
    }

    /// The full `total_dim x total_dim` matrix. Intended for small spaces.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.space.total_dim();
        let offsets = self.space.local_offsets(&self.support);
        let rest = self.space.complement(&self.support);
        let bases = self.space.local_offsets(&rest);
        let mut m = DMatrix::zeros(d, d);
        for &b in &bases {
            for (r, c, v) in self.local.triplets() {
                m[(b + offsets[r], b + offsets[c])] = v;
            }
        }
        m
    }
}
