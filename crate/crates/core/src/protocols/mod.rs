//! End-to-end drivers: heralded generation of hybrid entanglement, the two
//! swapping schemes and teleportation of a polarization qubit onto a cat
//! qubit.

mod generate;
mod swap;
mod teleport;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{BellOutcome, StationConfig};
use crate::operator::SparseOperator;
use crate::optics::TapOrder;
use crate::space::{default_cv_cutoff, HilbertSpace};
use crate::state::StateVector;
use crate::states::{product_state, CatParity, CatSpec};

pub use generate::{generate_hybrid, hybrid_target, ladder_gammas, GenerationReport, Model, Variant};
pub use swap::{cat_bell_target, swap_cv_dvbsm_cv, swap_dv_dvbsm_cv, SwapOutcome, SwapReport};
pub use teleport::{cat_qubit, teleport, TeleportReport};

/// Default bound on the number of amplitudes a driver may allocate.
pub const DEFAULT_MAX_DIM: usize = 1 << 24;

/// Knobs shared by every driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tap_order: TapOrder,
    /// Overrides the default CV cutoff.
    pub cv_cutoff: Option<usize>,
    pub max_dim: usize,
    pub station: StationConfig,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tap_order: TapOrder::ExactBS,
            cv_cutoff: None,
            max_dim: DEFAULT_MAX_DIM,
            station: StationConfig::default(),
        }
    }
}

impl Settings {
    pub fn cv_cutoff_for(&self, alpha: f64) -> usize {
        self.cv_cutoff.unwrap_or_else(|| default_cv_cutoff(alpha.abs()))
    }

    /// Largest register [`generate_hybrid`] allocates.
    pub fn generation_dim(&self, alpha: f64, model: Model) -> usize {
        let cv = self.cv_cutoff_for(alpha) + 1;
        let station = match model {
            Model::ProjectorBSM => 2,
            Model::PhysicalStation => self.station.required_cutoff() + 1,
        };
        cv.pow(4).max(4 * station.pow(4) * cv.pow(2))
    }

    /// Joint dimension of two DV paths and one CV path, as in
    /// [`swap_dv_dvbsm_cv`] and [`teleport`].
    pub fn single_cv_dim(&self, alpha: f64) -> usize {
        16 * (self.cv_cutoff_for(alpha) + 1).pow(2)
    }

    /// Joint dimension of two DV paths and two CV paths, as in
    /// [`swap_cv_dvbsm_cv`].
    pub fn double_cv_dim(&self, alpha: f64) -> usize {
        16 * (self.cv_cutoff_for(alpha) + 1).pow(4)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim > self.max_dim {
            return Err(Error::DimensionTooLarge {
                dim,
                limit: self.max_dim,
                bytes: dim * std::mem::size_of::<Complex64>(),
            });
        }
        Ok(())
    }
}

/// Entanglement shared before swapping or teleportation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Resource {
    /// `(|1_H>|Cat+_H> + |1_V>|Cat-_V>) / sqrt(2)`.
    Ideal,
    /// The heralded output of [`generate_hybrid`] (variant 1, projector
    /// heralding) with tap reflectivity `r`.
    Generated { r: f64 },
}

impl std::fmt::Display for Resource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Resource::Ideal => f.write_str("ideal"),
            Resource::Generated { r } => write!(f, "generated(r={r})"),
        }
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Space with one DV path (one photon of capacity) followed by one CV path.
pub(crate) fn hybrid_space(dv: &str, cv: &str, cutoff: usize) -> Result<Arc<HilbertSpace>> {
    Ok(Arc::new(HilbertSpace::polarized(&[(dv, 1), (cv, cutoff)])?))
}

/// `c_h |1_H>|Cat+_H> + c_v |1_V>|Cat-_V>` on `space` (not normalized).
pub(crate) fn hybrid_pair(
    space: &Arc<HilbertSpace>,
    dv: &str,
    cv: &str,
    alpha: f64,
    c_h: Complex64,
    c_v: Complex64,
) -> Result<StateVector> {
    let (dh, dvv) = space.polarized_pair(dv)?;
    let (ch, cvv) = space.polarized_pair(cv)?;
    let even = CatSpec::new(re(alpha), CatParity::Plus, space.modes()[ch].cutoff)?;
    let odd = CatSpec::new(re(alpha), CatParity::Minus, space.modes()[cvv].cutoff)?;
    let photon = [re(0.0), re(1.0)];
    let first = product_state(space, &[(dh, &photon), (ch, even.amplitudes())])?;
    let second = product_state(space, &[(dvv, &photon), (cvv, odd.amplitudes())])?;
    Ok(first.scaled(c_h).add_scaled(c_v, &second)?)
}

/// The resource state on `(dv, cv)`, unit norm, with the DV path holding
/// exactly one photon.
pub fn resource_state(alpha: f64, resource: Resource, dv: &str, cv: &str, settings: &Settings) -> Result<StateVector> {
    let cutoff = settings.cv_cutoff_for(alpha);
    match resource {
        Resource::Ideal => {
            let space = hybrid_space(dv, cv, cutoff)?;
            let s = std::f64::consts::FRAC_1_SQRT_2;
            hybrid_pair(&space, dv, cv, alpha, re(s), re(s))
        }
        Resource::Generated { r } => {
            let report = generate_hybrid(alpha, r, Variant::V1, Model::ProjectorBSM, 1.0, settings)?;
            let state = report
                .conditional_state
                .as_pure()
                .ok_or_else(|| Error::Invalid("generated resource is not pure".into()))?
                .relabel(&[("a", dv), ("c", cv)])?;
            let target = hybrid_space(dv, cv, cutoff)?;
            Ok(state.embed_into(&target)?.0)
        }
    }
}

/// Pauli correction for a Bell outcome: `(z, x)` flags, with `x` applied
/// first.
pub(crate) fn pauli_for(outcome: BellOutcome) -> (bool, bool) {
    match outcome {
        BellOutcome::OmegaPlus => (false, false),
        BellOutcome::OmegaMinus => (true, false),
        BellOutcome::ThetaPlus => (false, true),
        BellOutcome::ThetaMinus => (true, true),
    }
}

/// 2x2 correction matrix `Z^z X^x` in the `{0, 1}` qubit basis.
pub(crate) fn pauli_matrix(outcome: BellOutcome) -> [[f64; 2]; 2] {
    match pauli_for(outcome) {
        (false, false) => [[1.0, 0.0], [0.0, 1.0]],
        (true, false) => [[1.0, 0.0], [0.0, -1.0]],
        (false, true) => [[0.0, 1.0], [1.0, 0.0]],
        (true, true) => [[0.0, 1.0], [-1.0, 0.0]],
    }
}

/// Applies `u` on the cat qubit `{|Cat+_H>, |Cat-_V>}` of `spatial` and the
/// identity on its orthogonal complement.
pub fn cat_qubit_unitary(state: &StateVector, spatial: &str, alpha: f64, u: [[f64; 2]; 2]) -> Result<StateVector> {
    let space = state.space_arc();
    let (h, v) = space.polarized_pair(spatial)?;
    let dv = space.dims()[v];
    let even = CatSpec::new(re(alpha), CatParity::Plus, space.modes()[h].cutoff)?;
    let odd = CatSpec::new(re(alpha), CatParity::Minus, space.modes()[v].cutoff)?;
    // local basis of (h, v), row-major: index = n_h * dim_v + n_v
    let e0: Vec<(usize, Complex64)> = even
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(n, a)| (n * dv, *a))
        .collect();
    let e1: Vec<(usize, Complex64)> = odd
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(n, a)| (n, *a))
        .collect();
    let basis = [&e0, &e1];
    let mut trips = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let c = u[i][j] - if i == j { 1.0 } else { 0.0 };
            if c == 0.0 {
                continue;
            }
            for &(r, a) in basis[i] {
                for &(col, b) in basis[j] {
                    trips.push((r, col, a * b.conj() * c));
                }
            }
        }
    }
    let delta = SparseOperator::from_local(space.clone(), &[h, v], trips)?;
    state.add_scaled(re(1.0), &delta.apply(state)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_qubit_paulis_act_on_the_cat_basis() {
        let space = hybrid_space("x", "c", default_cv_cutoff(1.0)).unwrap();
        let zero = hybrid_pair(&space, "x", "c", 1.0, re(1.0), re(0.0)).unwrap();
        let one = hybrid_pair(&space, "x", "c", 1.0, re(0.0), re(1.0)).unwrap();
        let x = cat_qubit_unitary(&zero, "c", 1.0, pauli_matrix(BellOutcome::ThetaPlus)).unwrap();
        // |1_H>|Cat+_H> -> |1_H>|Cat-_V>
        assert!(x.inner(&zero).unwrap().norm() < 1e-12);
        assert!((x.norm() - 1.0).abs() < 1e-12);
        let z = cat_qubit_unitary(&one, "c", 1.0, pauli_matrix(BellOutcome::OmegaMinus)).unwrap();
        assert!((z.inner(&one).unwrap() + re(1.0)).norm() < 1e-12);
    }

    #[test]
    fn correction_is_identity_off_the_cat_qubit() {
        let space = Arc::new(HilbertSpace::polarized(&[("c", default_cv_cutoff(1.0))]).unwrap());
        let mut s = StateVector::zeros(space.clone());
        let i = space.index(&[1, 1]);
        s.amplitudes_mut()[i] = re(1.0);
        let out = cat_qubit_unitary(&s, "c", 1.0, pauli_matrix(BellOutcome::ThetaMinus)).unwrap();
        assert!((out.add_scaled(re(-1.0), &s).unwrap().norm()) < 1e-14);
    }
}
