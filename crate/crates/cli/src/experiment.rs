//! Runs every sweep point of an experiment and collects table rows, JSON
//! reports and Wigner grids in sweep order.

use hybridcat::analysis::{dv_conditioned_mode, wigner, wigner_negative_volume, GridSpec, WignerGrid};
use hybridcat::measure::{ConditionalState, StationConfig};
use hybridcat::optics::TapOrder;
use hybridcat::protocols::{
    generate_hybrid, swap_cv_dvbsm_cv, swap_dv_dvbsm_cv, teleport, GenerationReport, Model, Resource, Settings,
    SwapReport,
};
use hybridcat::space::{coherent_tail_weight, default_cv_cutoff, ModeLabel, Polarization, TRUNCATION_TOLERANCE};
use hybridcat::states::{cat_state, CatParity};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Protocol, ResourceKind};
use crate::error::CliError;

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub protocol: Protocol,
    pub alpha: f64,
    pub r: f64,
    pub eta: f64,
    pub variant: Option<u8>,
    pub model: Option<Model>,
    pub resource: Option<ResourceKind>,
    pub outcome: String,
    pub herald_probability: f64,
    pub fidelity: f64,
    pub negativity: f64,
}

#[derive(Debug, Clone)]
pub struct PointResult {
    pub index: usize,
    pub alpha: f64,
    pub r: f64,
    pub rows: Vec<Row>,
    pub report: Value,
    /// One simulated shot drawn from the outcome probabilities.
    pub sampled_outcome: Option<String>,
    pub grids: Vec<(String, WignerGrid)>,
}

pub fn settings(cfg: &ExperimentConfig) -> Settings {
    Settings {
        tap_order: TapOrder::ExactBS,
        cv_cutoff: cfg.cutoff,
        max_dim: cfg.max_dim,
        station: StationConfig {
            detectors: cfg.detectors,
            ..StationConfig::default()
        },
    }
}

fn resource(cfg: &ExperimentConfig, r: f64) -> Resource {
    match cfg.resource {
        ResourceKind::Ideal => Resource::Ideal,
        ResourceKind::Generated => Resource::Generated { r },
    }
}

fn point_rng(cfg: &ExperimentConfig, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    rng
}

fn sample(rng: &mut ChaCha8Rng, outcomes: &[(String, f64)]) -> Option<String> {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (label, p) in outcomes {
        acc += p;
        if u < acc {
            return Some(label.clone());
        }
    }
    None
}

/// Haar-random polarization qubit.
fn random_qubit(rng: &mut ChaCha8Rng) -> (Complex64, Complex64) {
    let cos_theta = 1.0 - 2.0 * rng.random::<f64>();
    let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    let half = cos_theta.acos() / 2.0;
    (Complex64::new(half.cos(), 0.0), Complex64::from_polar(half.sin(), phi))
}

fn report_value<T: serde::Serialize>(report: &T, keep_states: bool) -> Result<Value, CliError> {
    let mut v = serde_json::to_value(report)?;
    if !keep_states {
        if let Some(map) = v.as_object_mut() {
            map.remove("conditional_state");
        }
    }
    Ok(v)
}

/// Wigner grids of the CV mode conditioned on one H photon (even cat) and
/// on one V photon (odd cat) in the DV path.
fn cat_grids(
    state: &ConditionalState,
    alpha: f64,
    n: usize,
) -> Result<Vec<(Polarization, f64, f64, WignerGrid)>, CliError> {
    let spec = GridSpec::square(alpha + 4.0, n);
    [(Polarization::H, CatParity::Plus), (Polarization::V, CatParity::Minus)]
        .into_iter()
        .map(|(pol, parity)| {
            let (p, rho) = dv_conditioned_mode(state, "a", "c", pol)?;
            let cat = cat_state(rho.space_arc(), &ModeLabel::new("c", pol), Complex64::new(alpha, 0.0), parity)?;
            let fid = rho.expectation_in(&cat)?;
            Ok((pol, p, fid, wigner(&rho, &spec)?))
        })
        .collect()
}

fn grid_label(pol: Polarization) -> String {
    format!("a=1_{pol:?};c_{pol:?}")
}

fn run_generation(cfg: &ExperimentConfig, alpha: f64, r: f64) -> Result<GenerationReport, CliError> {
    Ok(generate_hybrid(alpha, r, cfg.variant(), cfg.model, cfg.eta, &settings(cfg))?)
}

fn swap_rows(cfg: &ExperimentConfig, alpha: f64, r: f64, report: &SwapReport) -> Vec<Row> {
    report
        .outcomes
        .iter()
        .map(|o| Row {
            protocol: cfg.protocol,
            alpha,
            r,
            eta: cfg.eta,
            variant: None,
            model: None,
            resource: Some(cfg.resource),
            outcome: o.outcome.to_string(),
            herald_probability: o.probability,
            fidelity: o.fidelity,
            negativity: o.negativity,
        })
        .collect()
}

fn run_point(cfg: &ExperimentConfig, index: usize, alpha: f64, r: f64) -> Result<PointResult, CliError> {
    let mut rng = point_rng(cfg, index);
    let mut grids = Vec::new();
    let base = Row {
        protocol: cfg.protocol,
        alpha,
        r,
        eta: cfg.eta,
        variant: Some(cfg.variant),
        model: Some(cfg.model),
        resource: None,
        outcome: String::new(),
        herald_probability: 0.0,
        fidelity: 0.0,
        negativity: 0.0,
    };
    let (rows, report, sampled) = match cfg.protocol {
        Protocol::Generate => {
            let rep = run_generation(cfg, alpha, r)?;
            if let Some(n) = cfg.wigner_grid {
                for (pol, _, _, grid) in cat_grids(&rep.conditional_state, alpha, n)? {
                    grids.push((grid_label(pol), grid));
                }
            }
            let outcome = match cfg.model {
                Model::ProjectorBSM => "OmegaPlus",
                Model::PhysicalStation => "C13",
            };
            let row = Row {
                outcome: outcome.into(),
                herald_probability: rep.herald_probability,
                fidelity: rep.fidelity_vs_target,
                negativity: rep.negativity,
                ..base
            };
            let sampled = sample(&mut rng, &[(outcome.to_string(), rep.herald_probability)]);
            (vec![row], report_value(&rep, cfg.states)?, sampled)
        }
        Protocol::Wigner => {
            let rep = run_generation(cfg, alpha, r)?;
            let n = cfg.wigner_grid.unwrap_or(101);
            let mut rows = Vec::new();
            let mut probabilities = Vec::new();
            for (pol, p, fid, grid) in cat_grids(&rep.conditional_state, alpha, n)? {
                rows.push(Row {
                    outcome: grid_label(pol),
                    herald_probability: p,
                    fidelity: fid,
                    negativity: wigner_negative_volume(&grid),
                    ..base.clone()
                });
                probabilities.push((grid_label(pol), p));
                grids.push((grid_label(pol), grid));
            }
            let sampled = sample(&mut rng, &probabilities);
            (rows, report_value(&rep, cfg.states)?, sampled)
        }
        Protocol::SwapDv | Protocol::SwapCv => {
            let res = resource(cfg, r);
            let rep = if cfg.protocol == Protocol::SwapDv {
                swap_dv_dvbsm_cv(alpha, res, &settings(cfg))?
            } else {
                swap_cv_dvbsm_cv(alpha, res, &settings(cfg))?
            };
            let probabilities: Vec<(String, f64)> =
                rep.outcomes.iter().map(|o| (o.outcome.to_string(), o.probability)).collect();
            let sampled = sample(&mut rng, &probabilities);
            (swap_rows(cfg, alpha, r, &rep), serde_json::to_value(&rep)?, sampled)
        }
        Protocol::Teleport => {
            let (c_h, c_v) = cfg.input_complex().unwrap_or_else(|| random_qubit(&mut rng));
            let rep = teleport(c_h, c_v, alpha, resource(cfg, r), &settings(cfg))?;
            let rows = rep
                .outcome_probabilities
                .iter()
                .map(|(outcome, p)| Row {
                    variant: None,
                    model: None,
                    resource: Some(cfg.resource),
                    outcome: outcome.to_string(),
                    herald_probability: *p,
                    fidelity: rep.corrected_fidelities[outcome],
                    negativity: 0.0,
                    ..base.clone()
                })
                .collect();
            let probabilities: Vec<(String, f64)> =
                rep.outcome_probabilities.iter().map(|(o, p)| (o.to_string(), *p)).collect();
            let sampled = sample(&mut rng, &probabilities);
            (rows, serde_json::to_value(&rep)?, sampled)
        }
    };
    Ok(PointResult {
        index,
        alpha,
        r,
        rows,
        report,
        sampled_outcome: sampled,
        grids,
    })
}

/// Runs all sweep points, in parallel, returning them in sweep order.
pub fn compute(cfg: &ExperimentConfig) -> Result<Vec<PointResult>, CliError> {
    cfg.points()
        .par_iter()
        .enumerate()
        .map(|(i, &(alpha, r))| run_point(cfg, i, alpha, r))
        .collect()
}

/// Resolved cutoff and allocation estimate for one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub alpha: f64,
    pub r: f64,
    pub cutoff: usize,
    pub dim: usize,
    pub bytes: usize,
    pub over_guard: bool,
}

/// Cutoffs and the largest register each point would allocate, without
/// running anything. A cutoff override below the truncation policy is an
/// error.
pub fn estimate(cfg: &ExperimentConfig) -> Result<Vec<Estimate>, CliError> {
    let s = settings(cfg);
    cfg.points()
        .into_iter()
        .map(|(alpha, r)| {
            let cutoff = s.cv_cutoff_for(alpha);
            let deficit = coherent_tail_weight(alpha, cutoff);
            if deficit >= TRUNCATION_TOLERANCE {
                return Err(CliError::Sim(hybridcat::Error::CutoffTooSmall {
                    cutoff,
                    alpha_abs: alpha,
                    deficit,
                    required: default_cv_cutoff(alpha),
                }));
            }
            let generated = match cfg.resource {
                ResourceKind::Generated => s.generation_dim(alpha, Model::ProjectorBSM),
                ResourceKind::Ideal => 0,
            };
            let dim = match cfg.protocol {
                Protocol::Generate | Protocol::Wigner => s.generation_dim(alpha, cfg.model),
                Protocol::SwapDv | Protocol::Teleport => s.single_cv_dim(alpha).max(generated),
                Protocol::SwapCv => s.double_cv_dim(alpha).max(generated),
            };
            let bytes = dim * std::mem::size_of::<Complex64>();
            Ok(Estimate {
                alpha,
                r,
                cutoff,
                dim,
                bytes,
                over_guard: dim > cfg.max_dim,
            })
        })
        .collect()
}

pub fn point_json(p: &PointResult, wigner_files: &[String]) -> Value {
    json!({
        "index": p.index,
        "alpha": p.alpha,
        "r": p.r,
        "sampled_outcome": p.sampled_outcome,
        "wigner_files": wigner_files,
        "report": p.report,
    })
}
