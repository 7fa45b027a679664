use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::SparseOperator;
use crate::space::HilbertSpace;
use crate::state::{same_space, StateVector};

/// Dense density matrix over the Fock basis of a [`HilbertSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: Arc<HilbertSpace>,
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(space: Arc<HilbertSpace>, m: DMatrix<Complex64>) -> Result<Self> {
        let d = space.total_dim();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Invalid(format!(
                "density matrix must be {d}x{d}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self { space, m })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self {
            space: state.space_arc().clone(),
            m: &v * v.adjoint(),
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            space: self.space.clone(),
            m: self.m.map(|z| z / t),
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            space: self.space.clone(),
            m: self.m.map(|z| z * s),
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.m - self.m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// `<psi|rho|psi>`.
    pub fn expectation_in(&self, psi: &StateVector) -> Result<f64> {
        if !same_space(&self.space, psi.space_arc()) {
            return Err(Error::SpaceMismatch);
        }
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Ok((v.adjoint() * &self.m * &v)[(0, 0)].re)
    }

    /// Reduced state on the listed modes.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.space.num_modes();
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() || keep.iter().any(|&k| k >= n) {
            return Err(Error::BadPartition("kept modes must be a nonempty subset".into()));
        }
        let sub = Arc::new(self.space.subspace(&keep)?);
        let rest = self.space.complement(&keep);
        let ko = self.space.local_offsets(&keep);
        let ro = self.space.local_offsets(&rest);
        let d = ko.len();
        let m = DMatrix::from_fn(d, d, |i, j| {
            ro.iter().map(|&r| self.m[(r + ko[i], r + ko[j])]).sum()
        });
        Self::new(sub, m)
    }

    /// Partial transpose over the listed modes. Row/column digits of those
    /// modes are exchanged; every other digit is left in place.
    pub fn partial_transpose(&self, modes: &[usize]) -> Result<Self> {
        let n = self.space.num_modes();
        if modes.iter().any(|&k| k >= n) {
            return Err(Error::BadPartition("mode index out of range".into()));
        }
        let rest = self.space.complement(modes);
        let ao = self.space.local_offsets(modes);
        let bo = self.space.local_offsets(&rest);
        let d = self.space.total_dim();
        let mut out = DMatrix::<Complex64>::zeros(d, d);
        for &ia in &ao {
            for &ja in &ao {
                for &ib in &bo {
                    for &jb in &bo {
                        out[(ja + ib, ia + jb)] = self.m[(ia + ib, ja + jb)];
                    }
                }
            }
        }
        Self::new(self.space.clone(), out)
    }

    /// `O rho O^dagger`.
    pub fn conjugate_by(&self, op: &SparseOperator) -> Result<Self> {
        if !same_space(&self.space, op.space_arc()) {
            return Err(Error::SpaceMismatch);
        }
        let left = self.apply_left(op, &self.m);
        let right = self.apply_left(op, &left.adjoint());
        Ok(Self {
            space: self.space.clone(),
            m: right.adjoint(),
        })
    }

    /// `sum_k K_k rho K_k^dagger`.
    pub fn apply_kraus(&self, kraus: &[SparseOperator]) -> Result<Self> {
        let d = self.space.total_dim();
        let mut acc = DMatrix::<Complex64>::zeros(d, d);
        for k in kraus {
            acc += self.conjugate_by(k)?.m;
        }
        Self::new(self.space.clone(), acc)
    }

    fn apply_left(&self, op: &SparseOperator, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let d = m.nrows();
        let mut out = DMatrix::<Complex64>::zeros(d, m.ncols());
        for j in 0..m.ncols() {
            let col = op.apply_slice(m.column(j).as_slice());
            out.column_mut(j).copy_from_slice(&col);
        }
        out
    }
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}
