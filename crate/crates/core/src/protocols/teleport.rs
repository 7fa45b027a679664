use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{bsm_project, BellOutcome};
use crate::space::HilbertSpace;
use crate::state::StateVector;
use crate::states::{polarization_qubit, product_state, CatParity, CatSpec};

use super::{cat_qubit_unitary, pauli_matrix, re, resource_state, Resource, Settings};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportReport {
    /// `(c_H, c_V)` as `[re, im]` pairs.
    pub input: [[f64; 2]; 2],
    pub resource: Resource,
    pub alpha: f64,
    pub outcome_probabilities: BTreeMap<BellOutcome, f64>,
    /// Fidelity of Bob's corrected state with `c_H |Cat+_H> + c_V |Cat-_V>`.
    pub corrected_fidelities: BTreeMap<BellOutcome, f64>,
}

impl TeleportReport {
    pub fn success_probability(&self) -> f64 {
        self.outcome_probabilities.values().sum()
    }

    pub fn min_fidelity(&self) -> f64 {
        self.corrected_fidelities.values().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `c_h |Cat+_H> + c_v |Cat-_V>` on the two polarization modes of `spatial`.
pub fn cat_qubit(alpha: f64, spatial: &str, cutoff: usize, c_h: Complex64, c_v: Complex64) -> Result<StateVector> {
    let space = Arc::new(HilbertSpace::polarized(&[(spatial, cutoff)])?);
    let (h, v) = space.polarized_pair(spatial)?;
    let even = CatSpec::new(re(alpha), CatParity::Plus, cutoff)?;
    let odd = CatSpec::new(re(alpha), CatParity::Minus, cutoff)?;
    let zero = product_state(&space, &[(h, even.amplitudes())])?;
    let one = product_state(&space, &[(v, odd.amplitudes())])?;
    zero.scaled(c_h).add_scaled(c_v, &one)
}

/// Teleports the polarization qubit `c_h |1_H>_A + c_v |1_V>_A` onto the
/// cat qubit of `B` through a hybrid resource on `(C, B)`: a Bell
/// projection on `(A, C)` followed by the matching Pauli correction on the
/// cat-qubit subspace of `B`.
pub fn teleport(
    c_h: Complex64,
    c_v: Complex64,
    alpha: f64,
    resource: Resource,
    settings: &Settings,
) -> Result<TeleportReport> {
    let total = c_h.norm_sqr() + c_v.norm_sqr();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(total));
    }
    let cutoff = settings.cv_cutoff_for(alpha);
    settings.check_dim(settings.single_cv_dim(alpha))?;
    let input_space = Arc::new(HilbertSpace::polarized(&[("A", 1)])?);
    let input = polarization_qubit(&input_space, "A", c_h, c_v)?;
    let joint = input.tensor(&resource_state(alpha, resource, "C", "B", settings)?)?;
    let target = cat_qubit(alpha, "B", cutoff, c_h, c_v)?;

    let mut outcome_probabilities = BTreeMap::new();
    let mut corrected_fidelities = BTreeMap::new();
    for outcome in BellOutcome::ALL {
        let herald = bsm_project(&joint, "A", "C", outcome)?;
        let fidelity = match herald.state.as_ref().and_then(|c| c.as_pure()) {
            Some(s) => {
                let s = cat_qubit_unitary(s, "B", alpha, pauli_matrix(outcome))?;
                s.inner(&target)?.norm_sqr()
            }
            None => 0.0,
        };
        outcome_probabilities.insert(outcome, herald.probability);
        corrected_fidelities.insert(outcome, fidelity);
    }
    Ok(TeleportReport {
        input: [[c_h.re, c_h.im], [c_v.re, c_v.im]],
        resource,
        alpha,
        outcome_probabilities,
        corrected_fidelities,
    })
}
