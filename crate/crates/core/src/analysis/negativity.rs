use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::density::{hermitian_eigenvalues, DensityMatrix};
use crate::error::{Error, Result};
use crate::space::HilbertSpace;
use crate::state::StateVector;

use super::StateRef;

fn check_partition(space: &HilbertSpace, part_a: &[usize]) -> Result<Vec<usize>> {
    let n = space.num_modes();
    let mut a = part_a.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.is_empty() || a.len() == n || a.iter().any(|&k| k >= n) {
        return Err(Error::BadPartition(format!(
            "{part_a:?} is not a proper nonempty subset of {n} modes"
        )));
    }
    Ok(a)
}

/// `(||rho^{T_A}||_1 - tr rho) / 2` with the trace norm taken from the
/// eigenvalues of the partial transpose over the modes in `part_a`.
pub fn negativity(rho: &DensityMatrix, part_a: &[usize]) -> Result<f64> {
    let a = check_partition(rho.space(), part_a)?;
    let pt = rho.partial_transpose(&a)?;
    let ev = hermitian_eigenvalues(pt.matrix());
    Ok((ev.iter().map(|l| l.abs()).sum::<f64>() - rho.trace()) / 2.0)
}

/// Negativity of a pure state from its Schmidt coefficients:
/// `((sum_i s_i)^2 - 1) / 2` for a unit vector.
pub fn negativity_pure(state: &StateVector, part_a: &[usize]) -> Result<f64> {
    let space = state.space();
    let a = check_partition(space, part_a)?;
    let b = space.complement(&a);
    let ao = space.local_offsets(&a);
    let bo = space.local_offsets(&b);
    let m = DMatrix::<Complex64>::from_fn(ao.len(), bo.len(), |i, j| state.amplitudes()[ao[i] + bo[j]]);
    let s: f64 = m.singular_values().iter().sum();
    Ok((s * s - state.norm_sqr()) / 2.0 / state.norm_sqr())
}

/// Negativity of any supported state representation. Pure states use the
/// Schmidt route; mixtures go through the partial transpose.
pub fn negativity_of<'a>(state: impl Into<StateRef<'a>>, part_a: &[usize]) -> Result<f64> {
    match state.into() {
        StateRef::Pure(s) => negativity_pure(s, part_a),
        StateRef::Mixed(rho) => {
            let t = rho.trace();
            Ok(negativity(rho, part_a)? / t)
        }
        e @ StateRef::Ensemble(_) => {
            let rho = e.reduced(&(0..e.space().num_modes()).collect::<Vec<_>>())?;
            let t = rho.trace();
            Ok(negativity(&rho, part_a)? / t)
        }
    }
}
