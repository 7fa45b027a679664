use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::sync::Arc;

use serde::Serialize;

use crate::analysis::negativity_of;
use crate::error::Result;
use crate::measure::{bsm_project, BellOutcome};
use crate::optics::half_wave_plate;
use crate::space::HilbertSpace;
use crate::state::StateVector;
use crate::states::{bell_pair, product_state, CatParity, CatSpec};

use super::{cat_qubit_unitary, hybrid_pair, hybrid_space, pauli_for, pauli_matrix, re, resource_state, Resource, Settings};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapOutcome {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Fidelity of the corrected state with the target.
    pub fidelity: f64,
    /// Negativity of the corrected state across the two end nodes.
    pub negativity: f64,
    #[serde(skip)]
    pub corrected_state: Option<StateVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapReport {
    pub alpha: f64,
    pub resource: Resource,
    pub outcomes: Vec<SwapOutcome>,
}

impl SwapReport {
    /// Total weight of the four Bell outcomes.
    pub fn success_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    pub fn outcome(&self, which: BellOutcome) -> Option<&SwapOutcome> {
        self.outcomes.iter().find(|o| o.outcome == which)
    }
}

fn finish_outcome(
    outcome: BellOutcome,
    probability: f64,
    corrected: Option<StateVector>,
    target: &StateVector,
    left: &str,
) -> Result<SwapOutcome> {
    let (fidelity, negativity) = match &corrected {
        Some(s) => {
            let left_modes = s.space().modes_of(&[left])?;
            (s.inner(target)?.norm_sqr(), negativity_of(s, &left_modes)?)
        }
        None => (0.0, 0.0),
    };
    Ok(SwapOutcome {
        outcome,
        probability,
        fidelity,
        negativity,
        corrected_state: corrected,
    })
}

/// Swapping through a DV Bell measurement with a DV output node: a
/// polarization Bell pair on `(A1, A2)` and a hybrid resource on
/// `(B1, B2)`, a Bell projection on `(A2, B1)` and a wave-plate correction
/// on `A1`. The target is the ideal hybrid state on `(A1, B2)`.
pub fn swap_dv_dvbsm_cv(alpha: f64, resource: Resource, settings: &Settings) -> Result<SwapReport> {
    let cutoff = settings.cv_cutoff_for(alpha);
    settings.check_dim(settings.single_cv_dim(alpha))?;
    let pair_space = Arc::new(HilbertSpace::polarized(&[("A1", 1), ("A2", 1)])?);
    let pair = bell_pair(&pair_space, "A1", "A2")?;
    let joint = pair.tensor(&resource_state(alpha, resource, "B1", "B2", settings)?)?;

    let target_space = hybrid_space("A1", "B2", cutoff)?;
    let target = hybrid_pair(&target_space, "A1", "B2", alpha, re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2))?;

    let outcomes = BellOutcome::ALL
        .iter()
        .map(|&outcome| {
            let herald = bsm_project(&joint, "A2", "B1", outcome)?;
            let corrected = match herald.state.as_ref().and_then(|c| c.as_pure()) {
                Some(s) => {
                    let (z, x) = pauli_for(outcome);
                    let mut s = s.embed_into(&target_space)?.0;
                    if x {
                        s = half_wave_plate(&target_space, "A1", FRAC_PI_4)?.apply(&s)?;
                    }
                    if z {
                        s = half_wave_plate(&target_space, "A1", 0.0)?.apply(&s)?;
                    }
                    Some(s)
                }
                None => None,
            };
            finish_outcome(outcome, herald.probability, corrected, &target, "A1")
        })
        .collect::<Result<_>>()?;
    Ok(SwapReport {
        alpha,
        resource,
        outcomes,
    })
}

/// `(|Cat+_H>|Cat+_H> + |Cat-_V>|Cat-_V>) / sqrt(2)` on `(left, right)`.
pub fn cat_bell_target(alpha: f64, left: &str, right: &str, cutoff: usize) -> Result<StateVector> {
    let space = Arc::new(HilbertSpace::polarized(&[(left, cutoff), (right, cutoff)])?);
    let (lh, lv) = space.polarized_pair(left)?;
    let (rh, rv) = space.polarized_pair(right)?;
    let even = CatSpec::new(re(alpha), CatParity::Plus, cutoff)?;
    let odd = CatSpec::new(re(alpha), CatParity::Minus, cutoff)?;
    let first = product_state(&space, &[(lh, even.amplitudes()), (rh, even.amplitudes())])?;
    let second = product_state(&space, &[(lv, odd.amplitudes()), (rv, odd.amplitudes())])?;
    Ok(first.add_scaled(re(1.0), &second)?.scaled(re(FRAC_1_SQRT_2)))
}

/// Swapping through a DV Bell measurement with CV output nodes: two hybrid
/// resources on `(D1, C1)` and `(D2, C2)`, a Bell projection on the DV
/// halves `(D1, D2)` and a cat-qubit correction on `C2`. The target is the
/// entangled cat pair on `(C1, C2)`.
///
/// The joint state holds two CV paths, so its dimension grows as the fourth
/// power of the CV cutoff; [`Settings::max_dim`] bounds it.
pub fn swap_cv_dvbsm_cv(alpha: f64, resource: Resource, settings: &Settings) -> Result<SwapReport> {
    let cutoff = settings.cv_cutoff_for(alpha);
    settings.check_dim(settings.double_cv_dim(alpha))?;
    let first = resource_state(alpha, resource, "D1", "C1", settings)?;
    let second = resource_state(alpha, resource, "D2", "C2", settings)?;
    let joint = first.tensor(&second)?;
    let target = cat_bell_target(alpha, "C1", "C2", cutoff)?;

    let outcomes = BellOutcome::ALL
        .iter()
        .map(|&outcome| {
            let herald = bsm_project(&joint, "D1", "D2", outcome)?;
            let corrected = match herald.state.as_ref().and_then(|c| c.as_pure()) {
                Some(s) => Some(cat_qubit_unitary(s, "C2", alpha, pauli_matrix(outcome))?),
                None => None,
            };
            finish_outcome(outcome, herald.probability, corrected, &target, "C1")
        })
        .collect::<Result<_>>()?;
    Ok(SwapReport {
        alpha,
        resource,
        outcomes,
    })
}
