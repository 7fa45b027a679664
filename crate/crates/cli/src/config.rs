//! Experiment configuration: a flat TOML document whose keys match the
//! command-line flags, merged with the flags and validated up front.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use hybridcat::measure::DetectorModel;
use hybridcat::protocols::{Model, Variant};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable overriding the dimension guard.
pub const MAX_DIM_ENV: &str = "HYBRIDCAT_MAX_DIM";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Generate,
    SwapDv,
    SwapCv,
    Teleport,
    Wigner,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Generate => "generate",
            Protocol::SwapDv => "swap-dv",
            Protocol::SwapCv => "swap-cv",
            Protocol::Teleport => "teleport",
            Protocol::Wigner => "wigner",
        }
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "generate" => Ok(Protocol::Generate),
            "swap-dv" => Ok(Protocol::SwapDv),
            "swap-cv" => Ok(Protocol::SwapCv),
            "teleport" => Ok(Protocol::Teleport),
            "wigner" => Ok(Protocol::Wigner),
            other => Err(format!(
                "unknown protocol {other:?} (expected generate, swap-dv, swap-cv, teleport or wigner)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceKind {
    Ideal,
    Generated,
}

/// A scalar or a `"start:stop:steps"` sweep, as written by the user.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RawValue {
    Number(f64),
    Text(String),
}

impl RawValue {
    fn text(&self) -> String {
        match self {
            RawValue::Number(x) => x.to_string(),
            RawValue::Text(s) => s.clone(),
        }
    }
}

/// Every key is optional; flags are layered on top of the file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RawConfig {
    pub protocol: Option<String>,
    pub alpha: Option<RawValue>,
    pub r: Option<RawValue>,
    pub eta: Option<f64>,
    pub variant: Option<i64>,
    pub model: Option<String>,
    pub detectors: Option<String>,
    pub ch: Option<RawValue>,
    pub cv: Option<RawValue>,
    pub resource: Option<String>,
    pub seed: Option<u64>,
    pub cutoff: Option<usize>,
    pub out: Option<PathBuf>,
    pub wigner_grid: Option<usize>,
    pub states: Option<bool>,
}

impl RawConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config("config", e.message().to_string()))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: RawConfig) -> RawConfig {
        RawConfig {
            protocol: over.protocol.or(self.protocol),
            alpha: over.alpha.or(self.alpha),
            r: over.r.or(self.r),
            eta: over.eta.or(self.eta),
            variant: over.variant.or(self.variant),
            model: over.model.or(self.model),
            detectors: over.detectors.or(self.detectors),
            ch: over.ch.or(self.ch),
            cv: over.cv.or(self.cv),
            resource: over.resource.or(self.resource),
            seed: over.seed.or(self.seed),
            cutoff: over.cutoff.or(self.cutoff),
            out: over.out.or(self.out),
            wigner_grid: over.wigner_grid.or(self.wigner_grid),
            states: over.states.or(self.states),
        }
    }
}

/// Fully resolved and validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    pub alpha: Vec<f64>,
    pub r: Vec<f64>,
    pub eta: f64,
    pub variant: u8,
    pub model: Model,
    pub detectors: DetectorModel,
    /// Teleportation input; drawn from the seed when absent.
    pub input: Option<[[f64; 2]; 2]>,
    pub resource: ResourceKind,
    pub seed: u64,
    pub cutoff: Option<usize>,
    pub out: PathBuf,
    pub wigner_grid: Option<usize>,
    pub states: bool,
    pub max_dim: usize,
}

impl ExperimentConfig {
    pub fn variant(&self) -> Variant {
        Variant::from_number(self.variant).expect("validated")
    }

    pub fn input_complex(&self) -> Option<(Complex64, Complex64)> {
        self.input
            .map(|[h, v]| (Complex64::new(h[0], h[1]), Complex64::new(v[0], v[1])))
    }

    /// Sweep points in output order: `alpha` outer, `r` inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.alpha
            .iter()
            .flat_map(|&a| self.r.iter().map(move |&r| (a, r)))
            .collect()
    }
}

/// Parses `"x"` or `"start:stop:steps"` into the list of values, evenly
/// spaced with both ends included.
pub fn parse_sweep(field: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let number = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::config(field, format!("{s:?} is not a number")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [x] => Ok(vec![number(x)?]),
        [start, stop, steps] => {
            let (start, stop) = (number(start)?, number(stop)?);
            let steps: usize = steps
                .trim()
                .parse()
                .map_err(|_| CliError::config(field, format!("sweep steps {steps:?} is not a positive integer")))?;
            if steps == 0 {
                return Err(CliError::config(field, "sweep needs at least one step"));
            }
            if steps == 1 {
                return Ok(vec![start]);
            }
            let h = (stop - start) / (steps - 1) as f64;
            Ok((0..steps).map(|k| if k == steps - 1 { stop } else { start + h * k as f64 }).collect())
        }
        _ => Err(CliError::config(field, format!("{text:?} is neither a number nor start:stop:steps"))),
    }
}

fn parse_complex(field: &str, value: &RawValue) -> Result<Complex64, CliError> {
    match value {
        RawValue::Number(x) => Ok(Complex64::new(*x, 0.0)),
        RawValue::Text(s) => Complex64::from_str(s.trim())
            .map_err(|_| CliError::config(field, format!("{s:?} is not a complex number (e.g. 0.6 or 0.3+0.4i)"))),
    }
}

fn check_all(field: &str, values: &[f64], ok: impl Fn(f64) -> bool, what: &str) -> Result<(), CliError> {
    match values.iter().find(|&&x| !ok(x)) {
        Some(x) => Err(CliError::config(field, format!("{x} is outside {what}"))),
        None => Ok(()),
    }
}

/// Resolves defaults and validates every field before anything runs.
/// `max_dim_env` is the raw value of [`MAX_DIM_ENV`], if set.
pub fn resolve(raw: RawConfig, max_dim_env: Option<&str>) -> Result<ExperimentConfig, CliError> {
    let protocol = match &raw.protocol {
        Some(p) => p.parse().map_err(|e: String| CliError::config("protocol", e))?,
        None => return Err(CliError::config("protocol", "no protocol given")),
    };
    let alpha = parse_sweep("alpha", &raw.alpha.as_ref().map_or("1".into(), RawValue::text))?;
    check_all("alpha", &alpha, |a| a.is_finite() && a > 0.0, "(0, inf)")?;
    let r = parse_sweep("r", &raw.r.as_ref().map_or("0.05".into(), RawValue::text))?;
    check_all("r", &r, |x| x > 0.0 && x < 1.0, "(0, 1)")?;
    let eta = raw.eta.unwrap_or(1.0);
    check_all("eta", &[eta], |x| x > 0.0 && x <= 1.0, "(0, 1]")?;
    let variant = raw.variant.unwrap_or(1);
    if !(1..=4).contains(&variant) {
        return Err(CliError::config("variant", format!("{variant} is not one of 1, 2, 3, 4")));
    }
    let model = match raw.model.as_deref().unwrap_or("projector") {
        "projector" => Model::ProjectorBSM,
        "physical" => Model::PhysicalStation,
        other => return Err(CliError::config("model", format!("{other:?} is not projector or physical"))),
    };
    let detectors = match raw.detectors.as_deref().unwrap_or("pnr") {
        "pnr" => DetectorModel::NumberResolving,
        "onoff" => DetectorModel::OnOff,
        other => return Err(CliError::config("detectors", format!("{other:?} is not pnr or onoff"))),
    };
    let input = match (&raw.ch, &raw.cv) {
        (None, None) => None,
        (Some(_), None) => return Err(CliError::config("cv", "--ch given without --cv")),
        (None, Some(_)) => return Err(CliError::config("ch", "--cv given without --ch")),
        (Some(h), Some(v)) => {
            let (h, v) = (parse_complex("ch", h)?, parse_complex("cv", v)?);
            let total = h.norm_sqr() + v.norm_sqr();
            if (total - 1.0).abs() > 1e-10 {
                return Err(CliError::config("ch", format!("|ch|^2 + |cv|^2 = {total}, expected 1")));
            }
            Some([[h.re, h.im], [v.re, v.im]])
        }
    };
    let resource = match raw.resource.as_deref().unwrap_or("ideal") {
        "ideal" => ResourceKind::Ideal,
        "generated" => ResourceKind::Generated,
        other => return Err(CliError::config("resource", format!("{other:?} is not ideal or generated"))),
    };
    if raw.cutoff == Some(0) {
        return Err(CliError::config("cutoff", "cutoff must be at least 1"));
    }
    let wigner_grid = match (protocol, raw.wigner_grid) {
        (_, Some(n)) if n < 2 => return Err(CliError::config("wigner-grid", "a grid needs at least 2 points per axis")),
        (Protocol::Generate | Protocol::Wigner, n) => n.or((protocol == Protocol::Wigner).then_some(101)),
        (_, Some(_)) => {
            return Err(CliError::config(
                "wigner-grid",
                "grids are available for the generate and wigner protocols only",
            ))
        }
        (_, None) => None,
    };
    let max_dim = match max_dim_env {
        None => hybridcat::protocols::DEFAULT_MAX_DIM,
        Some(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::config(MAX_DIM_ENV, format!("{s:?} is not a positive integer")))?,
    };
    Ok(ExperimentConfig {
        protocol,
        alpha,
        r,
        eta,
        variant: variant as u8,
        model,
        detectors,
        input,
        resource,
        seed: raw.seed.unwrap_or(0),
        cutoff: raw.cutoff,
        out: raw.out.unwrap_or_else(|| PathBuf::from("out")),
        wigner_grid,
        states: raw.states.unwrap_or(false),
        max_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(protocol: &str) -> RawConfig {
        RawConfig {
            protocol: Some(protocol.into()),
            ..RawConfig::default()
        }
    }

    #[test]
    fn sweeps_include_both_ends() {
        assert_eq!(parse_sweep("alpha", "0.5:2.5:5").unwrap(), vec![0.5, 1.0, 1.5, 2.0, 2.5]);
        assert_eq!(parse_sweep("alpha", "1.5").unwrap(), vec![1.5]);
        assert_eq!(parse_sweep("alpha", "1:2:1").unwrap(), vec![1.0]);
    }

    #[test]
    fn zero_steps_names_the_field() {
        let err = parse_sweep("alpha", "1:2:0").unwrap_err();
        assert_eq!(err.field(), Some("alpha"));
    }

    #[test]
    fn negative_r_names_r() {
        let cfg = RawConfig {
            r: Some(RawValue::Number(-0.1)),
            ..raw("generate")
        };
        assert_eq!(resolve(cfg, None).unwrap_err().field(), Some("r"));
    }

    #[test]
    fn flags_override_file_values() {
        let file: RawConfig = toml::from_str("protocol = \"generate\"\nalpha = \"1:2:3\"\nr = 0.1\n").unwrap();
        let flags = RawConfig {
            r: Some(RawValue::Text("0.02".into())),
            ..RawConfig::default()
        };
        let cfg = resolve(file.overlay(flags), None).unwrap();
        assert_eq!(cfg.alpha, vec![1.0, 1.5, 2.0]);
        assert_eq!(cfg.r, vec![0.02]);
        assert_eq!(cfg.points().len(), 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RawConfig>("alpah = 1\n").is_err());
    }

    #[test]
    fn teleport_input_must_be_normalized() {
        let cfg = RawConfig {
            ch: Some(RawValue::Text("0.6".into())),
            cv: Some(RawValue::Text("0.8i".into())),
            ..raw("teleport")
        };
        let cfg = resolve(cfg, None).unwrap();
        assert_eq!(cfg.input, Some([[0.6, 0.0], [0.0, 0.8]]));
        let bad = RawConfig {
            ch: Some(RawValue::Number(1.0)),
            cv: Some(RawValue::Number(1.0)),
            ..raw("teleport")
        };
        assert_eq!(resolve(bad, None).unwrap_err().field(), Some("ch"));
    }

    #[test]
    fn guard_override_is_validated() {
        assert_eq!(resolve(raw("swap-cv"), Some("1000")).unwrap().max_dim, 1000);
        assert_eq!(resolve(raw("swap-cv"), Some("lots")).unwrap_err().field(), Some(MAX_DIM_ENV));
    }
}
