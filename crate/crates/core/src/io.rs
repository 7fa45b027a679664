//! JSON documents for states, density matrices and operators.
//!
//! A state is `{"space": {...}, "amplitudes": [[re, im], ...]}` with the
//! amplitudes in basis order (last mode fastest).

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::measure::ConditionalState;
use crate::operator::SparseOperator;
use crate::space::HilbertSpace;
use crate::state::StateVector;

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize, Deserialize)]
struct StateDoc {
    space: HilbertSpace,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct DensityDoc {
    space: HilbertSpace,
    rows: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct OperatorDoc {
    space: HilbertSpace,
    support: Vec<usize>,
    /// `[row, col, re, im]` over the local basis of `support`.
    entries: Vec<(usize, usize, f64, f64)>,
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateDoc {
            space: self.space().clone(),
            amplitudes: self.amplitudes().iter().map(pair).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = StateDoc::deserialize(deserializer)?;
        let amps = doc.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        StateVector::new(Arc::new(doc.space), amps).map_err(serde::de::Error::custom)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let m = self.matrix();
        DensityDoc {
            space: self.space().clone(),
            rows: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(&m[(i, j)])).collect()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = DensityDoc::deserialize(deserializer)?;
        let d = doc.rows.len();
        if doc.rows.iter().any(|r| r.len() != d) {
            return Err(serde::de::Error::custom("density matrix rows must be square"));
        }
        let m = DMatrix::from_fn(d, d, |i, j| Complex64::new(doc.rows[i][j][0], doc.rows[i][j][1]));
        DensityMatrix::new(Arc::new(doc.space), m).map_err(serde::de::Error::custom)
    }
}

impl Serialize for SparseOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorDoc {
            space: self.space().clone(),
            support: self.support().to_vec(),
            entries: self.local_triplets().into_iter().map(|(r, c, v)| (r, c, v.re, v.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SparseOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = OperatorDoc::deserialize(deserializer)?;
        let space = Arc::new(doc.space);
        if doc.support.is_empty() {
            return Ok(SparseOperator::identity(space));
        }
        SparseOperator::from_local(
            space,
            &doc.support,
            doc.entries.into_iter().map(|(r, c, re, im)| (r, c, Complex64::new(re, im))),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize)]
struct Member<'a> {
    weight: f64,
    state: &'a StateVector,
}

impl Serialize for ConditionalState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(tag = "kind", rename_all = "snake_case")]
        enum Doc<'a> {
            Pure { state: &'a StateVector },
            Mixed { density: &'a DensityMatrix },
            Ensemble { members: Vec<Member<'a>> },
        }
        let doc = match self {
            ConditionalState::Pure(state) => Doc::Pure { state },
            ConditionalState::Mixed(density) => Doc::Mixed { density },
            ConditionalState::Ensemble(e) => Doc::Ensemble {
                members: e.iter().map(|(weight, state)| Member { weight: *weight, state }).collect(),
            },
        };
        doc.serialize(serializer)
    }
}

pub fn state_to_json(state: &StateVector) -> Result<String> {
    serde_json::to_string(state).map_err(|e| Error::Invalid(e.to_string()))
}

pub fn state_from_json(text: &str) -> Result<StateVector> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))
}

pub fn operator_to_json(op: &SparseOperator) -> Result<String> {
    serde_json::to_string(op).map_err(|e| Error::Invalid(e.to_string()))
}

pub fn operator_from_json(text: &str) -> Result<SparseOperator> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))
}
