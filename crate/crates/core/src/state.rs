use std::sync::Arc;

use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::space::{HilbertSpace, ModeLabel};

pub(crate) fn same_space(a: &Arc<HilbertSpace>, b: &Arc<HilbertSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Dense amplitude vector over the Fock basis of a [`HilbertSpace`].
///
/// Operations never renormalize implicitly; after a projection the squared
/// norm is the probability of the outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: Arc<HilbertSpace>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(space: Arc<HilbertSpace>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != space.total_dim() {
            return Err(Error::Invalid(format!(
                "expected {} amplitudes, got {}",
                space.total_dim(),
                amps.len()
            )));
        }
        Ok(Self { space, amps })
    }

    pub fn zeros(space: Arc<HilbertSpace>) -> Self {
        let amps = vec![Complex64::new(0.0, 0.0); space.total_dim()];
        Self { space, amps }
    }

    pub fn vacuum(space: Arc<HilbertSpace>) -> Self {
        let mut s = Self::zeros(space);
        s.amps[0] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// Amplitude of the basis state with the given occupation digits.
    pub fn amplitude(&self, digits: &[usize]) -> Complex64 {
        self.amps[self.space.index(digits)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            space: self.space.clone(),
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: Complex64, other: &StateVector) -> Result<Self> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self {
            space: self.space.clone(),
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Product state on the concatenated space (`self`'s modes first).
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let space = Arc::new(self.space.concat(&other.space)?);
        let mut amps = Vec::with_capacity(space.total_dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(Self { space, amps })
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// Reduced density matrix on `keep`, tracing out every other mode
    /// without forming the full density matrix.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.space.num_modes();
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() || keep.iter().any(|&k| k >= n) {
            return Err(Error::BadPartition("kept modes must be a nonempty subset".into()));
        }
        let sub = Arc::new(self.space.subspace(&keep)?);
        let rest = self.space.complement(&keep);
        let keep_offsets = self.space.local_offsets(&keep);
        let rest_offsets = self.space.local_offsets(&rest);
        let d = keep_offsets.len();
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(d, d);
        for &r in &rest_offsets {
            let col: Vec<Complex64> = keep_offsets.iter().map(|&k| self.amps[r + k]).collect();
            for i in 0..d {
                if col[i] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    m[(i, j)] += col[i] * col[j].conj();
                }
            }
        }
        DensityMatrix::new(sub, m)
    }

    /// Applies the bra `<phi|` on `modes` and returns the (unnormalized)
    /// state of the remaining modes. `phi` is given as ket coefficients over
    /// the local basis of `modes` (row-major in the order listed).
    pub fn contract(&self, modes: &[usize], phi: &[Complex64]) -> Result<StateVector> {
        let rest = self.space.complement(modes);
        if rest.is_empty() {
            return Err(Error::BadPartition("contraction would remove every mode".into()));
        }
        let local = self.space.local_offsets(modes);
        if local.len() != phi.len() {
            return Err(Error::Invalid("bra length does not match the local dimension".into()));
        }
        let sub = Arc::new(self.space.subspace(&rest)?);
        let rest_offsets = self.space.local_offsets(&rest);
        let nonzero: Vec<(usize, Complex64)> = local
            .iter()
            .zip(phi)
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(&o, c)| (o, c.conj()))
            .collect();
        let amps = rest_offsets
            .iter()
            .map(|&r| nonzero.iter().map(|&(o, c)| c * self.amps[r + o]).sum())
            .collect();
        StateVector::new(sub, amps)
    }

    /// Probability weight of having exactly `n` photons in `mode`.
    pub fn occupation_weight(&self, mode: usize, n: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.digit(*i, mode) == n)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn mean_photon_number(&self, mode: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| self.space.digit(i, mode) as f64 * a.norm_sqr())
            .sum()
    }

    /// Same amplitudes, spatial labels renamed through `rename`.
    pub fn relabel(&self, rename: &[(&str, &str)]) -> Result<StateVector> {
        let modes = self.space.modes().iter().map(|m| {
            let mut m = m.clone();
            if let Some((_, to)) = rename.iter().find(|(from, _)| *from == m.spatial) {
                m.spatial = (*to).to_string();
            }
            m
        });
        let space = Arc::new(HilbertSpace::new(modes)?);
        StateVector::new(space, self.amps.clone())
    }

    /// Re-expresses the state on `target`, which must hold the same mode
    /// labels (in any order, with any cutoffs). Returns the state and the
    /// probability weight dropped by smaller cutoffs.
    pub fn embed_into(&self, target: &Arc<HilbertSpace>) -> Result<(StateVector, f64)> {
        if target.num_modes() != self.space.num_modes() {
            return Err(Error::SpaceMismatch);
        }
        let map: Vec<usize> = self
            .space
            .modes()
            .iter()
            .map(|m| target.index_of(&m.label()))
            .collect::<Result<_>>()?;
        let mut out = StateVector::zeros(target.clone());
        let mut dropped = 0.0;
        let mut tdigits = vec![0usize; map.len()];
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let mut fits = true;
            for (k, &t) in map.iter().enumerate() {
                let n = self.space.digit(i, k);
                if n > target.modes()[t].cutoff {
                    fits = false;
                    break;
                }
                tdigits[t] = n;
            }
            if fits {
                out.amps[target.index(&tdigits)] = *a;
            } else {
                dropped += a.norm_sqr();
            }
        }
        Ok((out, dropped))
    }

    pub fn mode_index(&self, label: &ModeLabel) -> Result<usize> {
        self.space.index_of(label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Polarization::{H, V};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn tensor_of_vacua_is_vacuum() {
        let s1 = Arc::new(HilbertSpace::new([("a", H, 1)]).unwrap());
        let s2 = Arc::new(HilbertSpace::new([("b", H, 2)]).unwrap());
        let t = StateVector::vacuum(s1).tensor(&StateVector::vacuum(s2)).unwrap();
        assert_eq!(t.amplitudes()[0], c(1.0));
        assert_eq!(t.space().total_dim(), 6);
    }

    #[test]
    fn tensor_rejects_overlap() {
        let s = Arc::new(HilbertSpace::new([("a", H, 1)]).unwrap());
        let v = StateVector::vacuum(s);
        assert!(matches!(v.tensor(&v), Err(Error::OverlappingModes(_))));
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let s = Arc::new(HilbertSpace::new([("a", H, 1)]).unwrap());
        let a = StateVector::new(s.clone(), vec![Complex64::new(0.0, 1.0), c(0.0)]).unwrap();
        let b = StateVector::new(s, vec![c(1.0), c(0.0)]).unwrap();
        assert_eq!(a.inner(&b).unwrap(), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn inner_rejects_space_mismatch() {
        let a = StateVector::vacuum(Arc::new(HilbertSpace::new([("a", H, 1)]).unwrap()));
        let b = StateVector::vacuum(Arc::new(HilbertSpace::new([("a", V, 1)]).unwrap()));
        assert_eq!(a.inner(&b), Err(Error::SpaceMismatch));
    }

    #[test]
    fn embed_into_reorders_and_truncates() {
        let s = Arc::new(HilbertSpace::new([("a", H, 2), ("b", H, 1)]).unwrap());
        let mut st = StateVector::zeros(s);
        let (i, j) = (st.space().index(&[2, 0]), st.space().index(&[1, 1]));
        st.amplitudes_mut()[i] = c(0.6);
        st.amplitudes_mut()[j] = c(0.8);
        let t = Arc::new(HilbertSpace::new([("b", H, 1), ("a", H, 1)]).unwrap());
        let (e, dropped) = st.embed_into(&t).unwrap();
        assert!((dropped - 0.36).abs() < 1e-15);
        assert_eq!(e.amplitude(&[1, 1]), c(0.8));
    }
}
