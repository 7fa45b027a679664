//! Writers for `results.csv`, `report.json` and `wigner_NNN.csv`.

use std::fs;
use std::path::{Path, PathBuf};

use hybridcat::protocols::Model;
use serde_json::json;

use crate::config::{ExperimentConfig, ResourceKind};
use crate::error::CliError;
use crate::experiment::{point_json, PointResult, Row};

pub const RESULTS_HEADER: [&str; 11] = [
    "protocol",
    "alpha",
    "r",
    "eta",
    "variant",
    "model",
    "resource",
    "outcome",
    "herald_probability",
    "fidelity",
    "negativity",
];

/// Twelve significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn row_fields(row: &Row) -> [String; 11] {
    [
        row.protocol.name().to_string(),
        fmt_float(row.alpha),
        fmt_float(row.r),
        fmt_float(row.eta),
        row.variant.map(|v| v.to_string()).unwrap_or_default(),
        row.model
            .map(|m| match m {
                Model::ProjectorBSM => "projector",
                Model::PhysicalStation => "physical",
            })
            .unwrap_or_default()
            .to_string(),
        row.resource
            .map(|r| match r {
                ResourceKind::Ideal => "ideal",
                ResourceKind::Generated => "generated",
            })
            .unwrap_or_default()
            .to_string(),
        row.outcome.clone(),
        fmt_float(row.herald_probability),
        fmt_float(row.fidelity),
        fmt_float(row.negativity),
    ]
}

pub fn results_csv(points: &[PointResult]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_HEADER)?;
    for row in points.iter().flat_map(|p| &p.rows) {
        w.write_record(row_fields(row))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub results: PathBuf,
    pub report: PathBuf,
    pub wigner: Vec<PathBuf>,
    pub rows: usize,
}

/// Writes every output file under `cfg.out`.
pub fn write_all(cfg: &ExperimentConfig, points: &[PointResult]) -> Result<Written, CliError> {
    let dir: &Path = &cfg.out;
    fs::create_dir_all(dir)?;
    let mut wigner = Vec::new();
    let mut entries = Vec::new();
    for p in points {
        let mut names = Vec::new();
        for (label, grid) in &p.grids {
            let name = format!("wigner_{:03}.csv", wigner.len());
            let path = dir.join(&name);
            fs::write(&path, grid.to_csv())?;
            wigner.push(path);
            names.push(format!("{name} ({label})"));
        }
        entries.push(point_json(p, &names));
    }
    let results = dir.join("results.csv");
    fs::write(&results, results_csv(points)?)?;
    let report = dir.join("report.json");
    let doc = json!({ "config": cfg, "points": entries });
    fs::write(&report, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(Written {
        results,
        report,
        wigner,
        rows: points.iter().map(|p| p.rows.len()).sum(),
    })
}
