//! Mode registry and basis indexing for truncated multimode Fock spaces.
//!
//! Basis states are ordered row-major over the mode sequence with the last
//! mode varying fastest, so the amplitude of `|n_0, n_1, ..., n_k>` sits at
//! `sum_j n_j * stride_j`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest probability weight a truncated coherent expansion may discard.
pub const TRUNCATION_TOLERANCE: f64 = 1e-12;

/// Cutoff for single-photon (polarization) modes. Two photons must fit so
/// that bunching at the central station stays representable.
pub const DV_CUTOFF: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::H => f.write_str("H"),
            Polarization::V => f.write_str("V"),
        }
    }
}

/// A spatial path together with a polarization, e.g. `a:H`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeLabel {
    pub spatial: String,
    pub polarization: Polarization,
}

impl ModeLabel {
    pub fn new(spatial: impl Into<String>, polarization: Polarization) -> Self {
        Self {
            spatial: spatial.into(),
            polarization,
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.spatial, self.polarization)
    }
}

impl From<(&str, Polarization)> for ModeLabel {
    fn from((spatial, polarization): (&str, Polarization)) -> Self {
        Self::new(spatial, polarization)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeDescriptor {
    pub spatial: String,
    pub polarization: Polarization,
    /// Maximum photon number; the mode has `cutoff + 1` basis states.
    pub cutoff: usize,
}

impl ModeDescriptor {
    pub fn new(spatial: impl Into<String>, polarization: Polarization, cutoff: usize) -> Self {
        Self {
            spatial: spatial.into(),
            polarization,
            cutoff,
        }
    }

    pub fn label(&self) -> ModeLabel {
        ModeLabel::new(self.spatial.clone(), self.polarization)
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }
}

impl From<(&str, Polarization, usize)> for ModeDescriptor {
    fn from((spatial, polarization, cutoff): (&str, Polarization, usize)) -> Self {
        Self::new(spatial, polarization, cutoff)
    }
}

/// Ordered set of bosonic modes with per-mode Fock cutoffs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HilbertSpace {
    modes: Vec<ModeDescriptor>,
    #[serde(skip)]
    dims: Vec<usize>,
    #[serde(skip)]
    strides: Vec<usize>,
    #[serde(skip)]
    total_dim: usize,
}

#[derive(Deserialize)]
struct SpaceRepr {
    modes: Vec<ModeDescriptor>,
}

impl<'de> Deserialize<'de> for HilbertSpace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SpaceRepr::deserialize(deserializer)?;
        HilbertSpace::new(repr.modes).map_err(serde::de::Error::custom)
    }
}

impl HilbertSpace {
    pub fn new<I, M>(modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = M>,
        M: Into<ModeDescriptor>,
    {
        let modes: Vec<ModeDescriptor> = modes.into_iter().map(Into::into).collect();
        if modes.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut seen = HashSet::new();
        for m in &modes {
            if m.cutoff == 0 {
                return Err(Error::ZeroCutoff(m.label()));
            }
            if !seen.insert(m.label()) {
                return Err(Error::DuplicateMode(m.label()));
            }
        }
        let dims: Vec<usize> = modes.iter().map(ModeDescriptor::dim).collect();
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let total_dim = dims.iter().product();
        Ok(Self {
            modes,
            dims,
            strides,
            total_dim,
        })
    }

    /// Two modes (H then V) for every spatial label, all with the same cutoff.
    pub fn polarized(spatials: &[(&str, usize)]) -> Result<Self> {
        Self::new(spatials.iter().flat_map(|&(s, cutoff)| {
            Polarization::BOTH
                .into_iter()
                .map(move |p| ModeDescriptor::new(s, p, cutoff))
        }))
    }

    pub fn modes(&self) -> &[ModeDescriptor] {
        &self.modes
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn index_of(&self, label: &ModeLabel) -> Result<usize> {
        self.find(&label.spatial, label.polarization)
    }

    pub fn find(&self, spatial: &str, polarization: Polarization) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.spatial == spatial && m.polarization == polarization)
            .ok_or_else(|| Error::UnknownMode(format!("{spatial}:{polarization}")))
    }

    pub fn contains_spatial(&self, spatial: &str) -> bool {
        self.modes.iter().any(|m| m.spatial == spatial)
    }

    /// Indices of the H and V modes of a spatial location.
    pub fn polarized_pair(&self, spatial: &str) -> Result<(usize, usize)> {
        Ok((
            self.find(spatial, Polarization::H)?,
            self.find(spatial, Polarization::V)?,
        ))
    }

    /// All mode indices belonging to the given spatial labels, in space order.
    pub fn modes_of(&self, spatials: &[&str]) -> Result<Vec<usize>> {
        for s in spatials {
            if !self.contains_spatial(s) {
                return Err(Error::UnknownMode((*s).to_string()));
            }
        }
        Ok(self
            .modes
            .iter()
            .enumerate()
            .filter(|(_, m)| spatials.contains(&m.spatial.as_str()))
            .map(|(i, _)| i)
            .collect())
    }

    pub fn digit(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % self.dims[mode]
    }

    pub fn digits(&self, index: usize) -> Vec<usize> {
        (0..self.modes.len()).map(|k| self.digit(index, k)).collect()
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    /// The space formed by `self`'s modes followed by `other`'s.
    pub fn concat(&self, other: &HilbertSpace) -> Result<HilbertSpace> {
        for m in &other.modes {
            if self.index_of(&m.label()).is_ok() {
                return Err(Error::OverlappingModes(m.label()));
            }
        }
        HilbertSpace::new(self.modes.iter().chain(&other.modes).cloned())
    }

    /// The space spanned by the listed modes, kept in `self`'s order.
    pub fn subspace(&self, keep: &[usize]) -> Result<HilbertSpace> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        HilbertSpace::new(keep.iter().map(|&k| self.modes[k].clone()))
    }

    /// Mode indices not in `modes`, ascending.
    pub fn complement(&self, modes: &[usize]) -> Vec<usize> {
        (0..self.modes.len()).filter(|k| !modes.contains(k)).collect()
    }

    /// Full-space offsets of every local basis state of `support`
    /// (row-major over `support` in the given order).
    pub fn local_offsets(&self, support: &[usize]) -> Vec<usize> {
        let mut offsets = vec![0usize];
        for &m in support {
            let mut next = Vec::with_capacity(offsets.len() * self.dims[m]);
            for &o in &offsets {
                for n in 0..self.dims[m] {
                    next.push(o + n * self.strides[m]);
                }
            }
            offsets = next;
        }
        offsets
    }

    /// Product of the dimensions of the listed modes.
    pub fn local_dim(&self, support: &[usize]) -> usize {
        support.iter().map(|&m| self.dims[m]).product()
    }
}

/// Probability weight of a Poisson distribution with mean `|alpha|^2` above
/// photon number `cutoff`.
pub fn coherent_tail_weight(alpha_abs: f64, cutoff: usize) -> f64 {
    let lambda = alpha_abs * alpha_abs;
    if lambda == 0.0 {
        return 0.0;
    }
    let ln_lambda = lambda.ln();
    let mut ln_fact = (1..=cutoff + 1).map(|k| (k as f64).ln()).sum::<f64>();
    let mut sum = 0.0;
    let mut n = cutoff + 1;
    loop {
        let term = (-lambda + n as f64 * ln_lambda - ln_fact).exp();
        sum += term;
        if (n as f64) > lambda && term < sum * 1e-18 {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
    }
    sum
}

/// Lower bound on CV cutoffs: `ceil(|alpha|^2 + 6|alpha| + 6)`.
pub fn policy_cutoff(alpha_abs: f64) -> usize {
    (alpha_abs * alpha_abs + 6.0 * alpha_abs + 6.0).ceil() as usize
}

/// Smallest cutoff at or above [`policy_cutoff`] whose truncated Poisson
/// weight is below [`TRUNCATION_TOLERANCE`].
pub fn default_cv_cutoff(alpha_abs: f64) -> usize {
    let mut cutoff = policy_cutoff(alpha_abs);
    while coherent_tail_weight(alpha_abs, cutoff) >= TRUNCATION_TOLERANCE {
        cutoff += 1;
    }
    cutoff
}
