//! Figures of merit for simulated states: fidelity, negativity, parity,
//! phase-space distributions and the hybrid qubit density matrix.

mod negativity;
mod phase_space;

use std::sync::Arc;

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::measure::ConditionalState;
use crate::space::{HilbertSpace, ModeLabel, Polarization};
use crate::state::StateVector;
use crate::states::{product_state, CatParity, CatSpec};

pub use negativity::{negativity, negativity_of, negativity_pure};
pub use phase_space::{
    quadrature_distribution, wigner, wigner_at, wigner_negative_volume, GridSpec, WignerGrid,
};

/// Borrowed view of a pure state, a density matrix or a pure-state ensemble.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
    Ensemble(&'a [(f64, StateVector)]),
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(rho: &'a DensityMatrix) -> Self {
        StateRef::Mixed(rho)
    }
}

impl<'a> From<&'a ConditionalState> for StateRef<'a> {
    fn from(c: &'a ConditionalState) -> Self {
        match c {
            ConditionalState::Pure(s) => StateRef::Pure(s),
            ConditionalState::Mixed(rho) => StateRef::Mixed(rho),
            ConditionalState::Ensemble(e) => StateRef::Ensemble(e),
        }
    }
}

impl StateRef<'_> {
    pub fn space(&self) -> &Arc<HilbertSpace> {
        match self {
            StateRef::Pure(s) => s.space_arc(),
            StateRef::Mixed(rho) => rho.space_arc(),
            StateRef::Ensemble(e) => e[0].1.space_arc(),
        }
    }

    /// `<a|X|b>` where `X` is this state read as an operator.
    fn sandwich(&self, a: &StateVector, b: &StateVector) -> Result<Complex64> {
        match self {
            StateRef::Pure(s) => Ok(a.inner(s)? * s.inner(b)?),
            StateRef::Mixed(rho) => {
                let va = nalgebra::DVector::from_column_slice(a.amplitudes());
                let vb = nalgebra::DVector::from_column_slice(b.amplitudes());
                if rho.space() != a.space() {
                    return Err(Error::SpaceMismatch);
                }
                Ok((va.adjoint() * rho.matrix() * vb)[(0, 0)])
            }
            StateRef::Ensemble(e) => e
                .iter()
                .map(|(w, s)| Ok(a.inner(s)? * s.inner(b)? * *w))
                .sum(),
        }
    }

    fn trace(&self) -> f64 {
        match self {
            StateRef::Pure(s) => s.norm_sqr(),
            StateRef::Mixed(rho) => rho.trace(),
            StateRef::Ensemble(e) => e.iter().map(|(w, s)| w * s.norm_sqr()).sum(),
        }
    }

    /// Reduced density matrix on `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        match self {
            StateRef::Pure(s) => s.reduced(keep),
            StateRef::Mixed(rho) => rho.partial_trace(keep),
            StateRef::Ensemble(e) => {
                let mut acc: Option<DMatrix<Complex64>> = None;
                let mut space = None;
                for (w, s) in e.iter() {
                    let r = s.reduced(keep)?;
                    space.get_or_insert_with(|| r.space_arc().clone());
                    let m = r.into_matrix() * Complex64::new(*w, 0.0);
                    acc = Some(match acc {
                        None => m,
                        Some(a) => a + m,
                    });
                }
                DensityMatrix::new(space.ok_or(Error::ZeroNorm)?, acc.ok_or(Error::ZeroNorm)?)
            }
        }
    }
}

/// Conditions the one-photon DV path `dv` on polarization `pol` and returns
/// the probability of that outcome together with the reduced state of the
/// `cv` mode with the same polarization.
pub fn dv_conditioned_mode<'a>(
    state: impl Into<StateRef<'a>>,
    dv: &str,
    cv: &str,
    pol: Polarization,
) -> Result<(f64, DensityMatrix)> {
    let state = state.into();
    let (ph, pv) = match pol {
        Polarization::H => (1, 0),
        Polarization::V => (0, 1),
    };
    let branch = |s: &StateVector| -> Result<(f64, Option<DensityMatrix>)> {
        let norm = s.norm_sqr();
        let h = crate::measure::project_fock(s, &ModeLabel::new(dv, Polarization::H), ph)?;
        let Some(ConditionalState::Pure(rest)) = h.state else {
            return Ok((0.0, None));
        };
        let v = crate::measure::project_fock(&rest, &ModeLabel::new(dv, Polarization::V), pv)?;
        let Some(ConditionalState::Pure(rest)) = v.state else {
            return Ok((0.0, None));
        };
        let keep = [rest.space().index_of(&ModeLabel::new(cv, pol))?];
        Ok((h.probability * v.probability * norm, Some(rest.reduced(&keep)?)))
    };
    let members: Vec<(f64, &StateVector)> = match state {
        StateRef::Pure(s) => vec![(1.0, s)],
        StateRef::Ensemble(e) => e.iter().map(|(w, s)| (*w, s)).collect(),
        StateRef::Mixed(_) => {
            return Err(Error::Invalid("DV conditioning needs a pure state or an ensemble".into()));
        }
    };
    let mut total = 0.0;
    let mut acc: Option<DensityMatrix> = None;
    for (w, s) in members {
        let (p, rho) = branch(s)?;
        if let Some(rho) = rho {
            let weighted = rho.scaled(w * p);
            acc = Some(match acc {
                None => weighted,
                Some(a) => DensityMatrix::new(a.space_arc().clone(), a.into_matrix() + weighted.into_matrix())?,
            });
            total += w * p;
        }
    }
    let rho = acc.ok_or(Error::ZeroNorm)?;
    Ok((total / state.trace(), rho.normalized()?))
}

/// Fidelity between a pure state and a pure or mixed state: `|<a|b>|^2` or
/// `<a|rho|a>`. Pure arguments are normalized first.
pub fn fidelity<'a, 'b>(a: impl Into<StateRef<'a>>, b: impl Into<StateRef<'b>>) -> Result<f64> {
    let (a, b) = (a.into(), b.into());
    let (psi, other) = match (a, b) {
        (StateRef::Pure(p), o) | (o, StateRef::Pure(p)) => (p, o),
        _ => return Err(Error::Invalid("fidelity needs at least one pure state".into())),
    };
    if **other.space() != *psi.space() {
        return Err(Error::SpaceMismatch);
    }
    let n = psi.norm_sqr();
    if n == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(other.sandwich(psi, psi)?.re / (n * other.trace()))
}

/// `<(-1)^n>` on one mode.
pub fn parity_expectation<'a>(state: impl Into<StateRef<'a>>, mode: &ModeLabel) -> Result<f64> {
    let state = state.into();
    let space = state.space().clone();
    let k = space.index_of(mode)?;
    let sign = |i: usize| if space.digit(i, k) % 2 == 0 { 1.0 } else { -1.0 };
    let diag_sum = |s: &StateVector| -> f64 {
        s.amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| sign(i) * a.norm_sqr())
            .sum()
    };
    let value = match state {
        StateRef::Pure(s) => diag_sum(s),
        StateRef::Mixed(rho) => (0..space.total_dim()).map(|i| sign(i) * rho.matrix()[(i, i)].re).sum(),
        StateRef::Ensemble(e) => e.iter().map(|(w, s)| w * diag_sum(s)).sum(),
    };
    Ok(value / state.trace())
}

/// Density matrix restricted to the hybrid qubit basis
/// `{|1_H>|Cat+_H>, |1_H>|Cat-_V>, |1_V>|Cat+_H>, |1_V>|Cat-_V>}`, with the
/// DV photon first.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridQubitDensity {
    pub matrix: Matrix4<Complex64>,
    /// Probability weight outside the four-dimensional subspace.
    pub leakage: f64,
}

impl HybridQubitDensity {
    /// Negativity across the DV | CV cut of the (unnormalized) 4x4 block.
    pub fn negativity(&self) -> f64 {
        let mut pt = self.matrix;
        // transpose the CV qubit index
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        pt[(2 * a + d, 2 * b + c)] = self.matrix[(2 * a + c, 2 * b + d)];
                    }
                }
            }
        }
        let pt = DMatrix::from_iterator(4, 4, pt.iter().copied());
        let ev = crate::density::hermitian_eigenvalues(&pt);
        let t: f64 = self.matrix.trace().re;
        (ev.iter().map(|l| l.abs()).sum::<f64>() - t) / 2.0
    }
}

/// The four hybrid basis kets on `space`, in [`HybridQubitDensity`] order.
pub fn hybrid_basis(space: &Arc<HilbertSpace>, dv_spatial: &str, cv_spatial: &str, alpha: Complex64) -> Result<[StateVector; 4]> {
    let (dh, dv) = space.polarized_pair(dv_spatial)?;
    let (ch, cv) = space.polarized_pair(cv_spatial)?;
    let covered = [dh, dv, ch, cv];
    if let Some(extra) = (0..space.num_modes()).find(|m| !covered.contains(m)) {
        return Err(Error::BadPartition(format!(
            "mode {} is neither the DV nor the CV path",
            space.modes()[extra].label()
        )));
    }
    let even = CatSpec::new(alpha, CatParity::Plus, space.modes()[ch].cutoff)?;
    let odd = CatSpec::new(alpha, CatParity::Minus, space.modes()[cv].cutoff)?;
    let photon = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let ket = |p: Polarization, cat_plus: bool| {
        let dv_mode = if p == Polarization::H { dh } else { dv };
        let (cat_mode, amps) = if cat_plus { (ch, even.amplitudes()) } else { (cv, odd.amplitudes()) };
        product_state(space, &[(dv_mode, &photon), (cat_mode, amps)])
    };
    Ok([
        ket(Polarization::H, true)?,
        ket(Polarization::H, false)?,
        ket(Polarization::V, true)?,
        ket(Polarization::V, false)?,
    ])
}

/// Projects a state of one DV path and one CV path onto the hybrid qubit
/// basis.
pub fn hybrid_qubit_density<'a>(
    state: impl Into<StateRef<'a>>,
    dv_spatial: &str,
    cv_spatial: &str,
    alpha: Complex64,
) -> Result<HybridQubitDensity> {
    let state = state.into();
    let basis = hybrid_basis(state.space(), dv_spatial, cv_spatial, alpha)?;
    let total = state.trace();
    let mut matrix = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            matrix[(i, j)] = state.sandwich(&basis[i], &basis[j])? / total;
        }
    }
    let leakage = 1.0 - matrix.trace().re;
    Ok(HybridQubitDensity { matrix, leakage })
}
