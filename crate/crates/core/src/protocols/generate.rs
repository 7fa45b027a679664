use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::negativity_of;
use crate::error::{Error, Result};
use crate::measure::{bsm_project, central_station, BellOutcome, Coincidence, ConditionalState};
use crate::optics::{half_wave_plate, weak_tap};
use crate::space::HilbertSpace;
use crate::state::StateVector;
use crate::states::{bell_pair, polarization_coupled_cat, product_state, CatParity, CatSpec, RelativeSign};

use super::{re, Settings};

/// How the `(b, d)` photons are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Direct projection onto the Bell state `Omega+` of `(b, d)`.
    #[default]
    ProjectorBSM,
    /// Beam splitter, wave plates and a C13 detector coincidence.
    PhysicalStation,
}

/// The four heralded hybrid Bell states, numbered in display order:
///
/// | variant | heralded state                                   |
/// |---------|--------------------------------------------------|
/// | 1       | `g+ |1_H>|Cat+_H> + g- |1_V>|Cat-_V>`            |
/// | 2       | `g+ |1_H>|Cat+_V> + g- |1_V>|Cat-_H>`            |
/// | 3       | `g- |1_H>|Cat-_H> - g+ |1_V>|Cat+_V>`            |
/// | 4       | `g+ |1_H>|Cat+_V> - g- |1_V>|Cat-_H>`            |
///
/// Variants 3 and 4 start Bob from the minus-sign polarization-coupled cat.
/// Wave plates at 45 degrees exchange H and V: variant 1 uses one in path
/// `b` and one in path `c` after the tap, variant 2 and variant 4 only the
/// one in `b`, variant 3 none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    V1,
    V2,
    V3,
    V4,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::V1, Variant::V2, Variant::V3, Variant::V4];

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Variant::V1),
            2 => Ok(Variant::V2),
            3 => Ok(Variant::V3),
            4 => Ok(Variant::V4),
            _ => Err(Error::Invalid(format!("variant must be 1..4, got {n}"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Variant::V1 => 1,
            Variant::V2 => 2,
            Variant::V3 => 3,
            Variant::V4 => 4,
        }
    }

    fn bob_sign(self) -> RelativeSign {
        match self {
            Variant::V1 | Variant::V2 => RelativeSign::Plus,
            Variant::V3 | Variant::V4 => RelativeSign::Minus,
        }
    }

    fn plate_b(self) -> bool {
        matches!(self, Variant::V1 | Variant::V2 | Variant::V4)
    }

    fn plate_c(self) -> bool {
        matches!(self, Variant::V1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationReport {
    pub variant: u8,
    pub model: Model,
    pub alpha: f64,
    pub r: f64,
    pub eta: f64,
    pub herald_probability: f64,
    /// State of `(a, c)` after the herald.
    pub conditional_state: ConditionalState,
    pub fidelity_vs_target: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Negativity across the `a | c` cut.
    pub negativity: f64,
    /// Weight dropped when the tap output is truncated to the station cutoff.
    pub truncated_weight: f64,
}

/// `(gamma_plus, gamma_minus)` with `gamma_+ = r <Cat+|c|Cat->` and
/// `gamma_- = r <Cat-|c|Cat+>`, evaluated on the truncated cat vectors.
/// These are `r alpha N-/N+` and `r alpha N+/N-` for the normalizations
/// `N+- = 1/sqrt(2 +- 2 exp(-2 alpha^2))`.
pub fn ladder_gammas(alpha: f64, r: f64, cutoff: usize) -> Result<(f64, f64)> {
    let even = CatSpec::new(re(alpha), CatParity::Plus, cutoff)?;
    let odd = CatSpec::new(re(alpha), CatParity::Minus, cutoff)?;
    // <m|a|n> = sqrt(n) delta_{m, n-1}
    let lower = |to: &[Complex64], from: &[Complex64]| -> f64 {
        (1..from.len())
            .map(|n| to[n - 1].conj() * from[n] * (n as f64).sqrt())
            .sum::<Complex64>()
            .re
    };
    Ok((
        r * lower(even.amplitudes(), odd.amplitudes()),
        r * lower(odd.amplitudes(), even.amplitudes()),
    ))
}

/// Normalized target state of a variant on the `(a, c)` space.
pub fn hybrid_target(space: &Arc<HilbertSpace>, variant: Variant, alpha: f64, gammas: (f64, f64)) -> Result<StateVector> {
    let (gp, gm) = gammas;
    let (ah, av) = space.polarized_pair("a")?;
    let (ch, cv) = space.polarized_pair("c")?;
    let even = CatSpec::new(re(alpha), CatParity::Plus, space.modes()[ch].cutoff)?;
    let odd = CatSpec::new(re(alpha), CatParity::Minus, space.modes()[ch].cutoff)?;
    let photon = [re(0.0), re(1.0)];
    let term = |a_mode: usize, c_mode: usize, cat: &CatSpec| product_state(space, &[(a_mode, &photon), (c_mode, cat.amplitudes())]);
    let (first, second, c1, c2) = match variant {
        Variant::V1 => (term(ah, ch, &even)?, term(av, cv, &odd)?, gp, gm),
        Variant::V2 => (term(ah, cv, &even)?, term(av, ch, &odd)?, gp, gm),
        Variant::V3 => (term(ah, ch, &odd)?, term(av, cv, &even)?, gm, -gp),
        Variant::V4 => (term(ah, cv, &even)?, term(av, ch, &odd)?, gp, -gm),
    };
    first.scaled(re(c1)).add_scaled(re(c2), &second)?.normalized()
}

fn hwp45(state: &StateVector, spatial: &str) -> Result<StateVector> {
    half_wave_plate(state.space_arc(), spatial, FRAC_PI_4)?.apply(state)
}

/// Runs the generation circuit: Alice's polarization Bell pair on `(a, b)`,
/// Bob's polarization-coupled cat on `c` with a weak tap into `d`, and a
/// herald on `(b, d)`. Reports the conditional state of `(a, c)` with its
/// fidelity against the variant's target.
pub fn generate_hybrid(
    alpha: f64,
    r: f64,
    variant: Variant,
    model: Model,
    eta: f64,
    settings: &Settings,
) -> Result<GenerationReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::BadReflectivity(r));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::BadEta(eta));
    }
    let cutoff = settings.cv_cutoff_for(alpha);
    let station = match model {
        Model::ProjectorBSM => 1,
        Model::PhysicalStation => settings.station.required_cutoff(),
    };
    settings.check_dim(settings.generation_dim(alpha, model))?;

    let bob_space = Arc::new(HilbertSpace::polarized(&[("c", cutoff), ("d", cutoff)])?);
    let bob = polarization_coupled_cat(&bob_space, "c", re(alpha), variant.bob_sign())?;
    let mut tapped = weak_tap(&bob, "c", "d", r, settings.tap_order)?.state;
    if variant.plate_c() {
        tapped = hwp45(&tapped, "c")?;
    }
    let kept_space = Arc::new(HilbertSpace::polarized(&[("c", cutoff), ("d", station)])?);
    let (tapped, truncated_weight) = tapped.embed_into(&kept_space)?;

    let alice_space = Arc::new(HilbertSpace::polarized(&[("a", 1), ("b", station)])?);
    let mut alice = bell_pair(&alice_space, "a", "b")?;
    if variant.plate_b() {
        alice = hwp45(&alice, "b")?;
    }
    let joint = alice.tensor(&tapped)?;

    let herald = match model {
        Model::ProjectorBSM => {
            let mut h = bsm_project(&joint, "b", "d", BellOutcome::OmegaPlus)?;
            h.probability *= eta * eta;
            h
        }
        Model::PhysicalStation => central_station(&joint, "b", "d", Coincidence::C13, eta, &settings.station)?,
    };
    // probabilities relative to the untruncated state
    let herald_probability = herald.probability * (1.0 - truncated_weight);
    let conditional_state = herald.state.ok_or(Error::ZeroNorm)?;
    let gammas = ladder_gammas(alpha, r, cutoff)?;
    let target = hybrid_target(conditional_state.space(), variant, alpha, gammas)?;
    let a_modes = conditional_state.space().modes_of(&["a"])?;
    Ok(GenerationReport {
        variant: variant.number(),
        model,
        alpha,
        r,
        eta,
        herald_probability,
        fidelity_vs_target: conditional_state.fidelity_with(&target)?,
        negativity: negativity_of(&conditional_state, &a_modes)?,
        conditional_state,
        gamma_plus: gammas.0,
        gamma_minus: gammas.1,
        truncated_weight,
    })
}
