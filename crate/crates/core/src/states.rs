//! Constructors for the kets used by the protocols: Fock states, coherent
//! and cat states, polarization qubits and the polarization Bell pair.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{coherent_tail_weight, default_cv_cutoff, HilbertSpace, ModeLabel, Polarization, TRUNCATION_TOLERANCE};
use crate::state::StateVector;

/// Photon-number parity of a cat state: `Plus` is even, `Minus` is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CatParity {
    Plus,
    Minus,
}

impl CatParity {
    pub fn flipped(self) -> Self {
        match self {
            CatParity::Plus => CatParity::Minus,
            CatParity::Minus => CatParity::Plus,
        }
    }

    fn sign(self) -> f64 {
        match self {
            CatParity::Plus => 1.0,
            CatParity::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelativeSign {
    Plus,
    Minus,
}

impl RelativeSign {
    pub fn value(self) -> f64 {
        match self {
            RelativeSign::Plus => 1.0,
            RelativeSign::Minus => -1.0,
        }
    }
}

/// Truncated, renormalized coherent-state amplitudes `alpha^n / sqrt(n!)`.
pub fn coherent_amplitudes(alpha: Complex64, cutoff: usize) -> Result<Vec<Complex64>> {
    let alpha_abs = alpha.norm();
    let deficit = coherent_tail_weight(alpha_abs, cutoff);
    if deficit >= TRUNCATION_TOLERANCE {
        return Err(Error::CutoffTooSmall {
            cutoff,
            alpha_abs,
            deficit,
            required: default_cv_cutoff(alpha_abs),
        });
    }
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-alpha_abs * alpha_abs / 2.0).exp(), 0.0);
    amps.push(c);
    for n in 1..=cutoff {
        c = c * alpha / (n as f64).sqrt();
        amps.push(c);
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Ok(amps.into_iter().map(|a| a / norm).collect())
}

/// A cat state `N (|alpha> +- |-alpha>)` with its normalization computed
/// from the truncated vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CatSpec {
    pub alpha: Complex64,
    pub parity: CatParity,
    pub normalization: f64,
    amps: Vec<Complex64>,
}

impl CatSpec {
    pub fn new(alpha: Complex64, parity: CatParity, cutoff: usize) -> Result<Self> {
        let plus = coherent_amplitudes(alpha, cutoff)?;
        let minus = coherent_amplitudes(-alpha, cutoff)?;
        let s = parity.sign();
        let raw: Vec<Complex64> = plus.iter().zip(&minus).map(|(p, m)| p + m * s).collect();
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        // the odd cat vanishes identically as alpha -> 0
        if norm < 1e-12 {
            return Err(Error::DegenerateAmplitude);
        }
        Ok(Self {
            alpha,
            parity,
            normalization: 1.0 / norm,
            amps: raw.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Normalized single-mode amplitudes.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }
}

/// `1 / sqrt(2 +- 2 exp(-2|alpha|^2))`, the untruncated cat normalization.
pub fn cat_normalization_analytic(alpha_abs: f64, parity: CatParity) -> f64 {
    1.0 / (2.0 + 2.0 * parity.sign() * (-2.0 * alpha_abs * alpha_abs).exp()).sqrt()
}

/// Product state with the given single-mode amplitude vectors on the listed
/// modes and vacuum everywhere else.
pub fn product_state(space: &Arc<HilbertSpace>, factors: &[(usize, &[Complex64])]) -> Result<StateVector> {
    let mut out = StateVector::zeros(space.clone());
    let mut entries: Vec<(usize, Complex64)> = vec![(0, Complex64::new(1.0, 0.0))];
    for &(mode, amps) in factors {
        if mode >= space.num_modes() {
            return Err(Error::UnknownMode(format!("mode index {mode}")));
        }
        if amps.len() > space.dims()[mode] {
            let extra: f64 = amps[space.dims()[mode]..].iter().map(|a| a.norm_sqr()).sum();
            if extra > 0.0 {
                return Err(Error::CutoffExceeded {
                    mode: space.modes()[mode].label(),
                    count: amps.len() - 1,
                    cutoff: space.modes()[mode].cutoff,
                });
            }
        }
        let stride = space.strides()[mode];
        entries = entries
            .iter()
            .flat_map(|&(i, c)| {
                amps.iter()
                    .enumerate()
                    .filter(|(n, a)| *n < space.dims()[mode] && a.norm_sqr() > 0.0)
                    .map(move |(n, a)| (i + n * stride, c * a))
            })
            .collect();
    }
    let amps = out.amplitudes_mut();
    for (i, c) in entries {
        amps[i] += c;
    }
    Ok(out)
}

/// Basis ket with the given photon numbers; unlisted modes are empty.
pub fn fock_state(space: &Arc<HilbertSpace>, occupation: &[(ModeLabel, usize)]) -> Result<StateVector> {
    let mut digits = vec![0usize; space.num_modes()];
    for (label, n) in occupation {
        let k = space.index_of(label)?;
        if *n > space.modes()[k].cutoff {
            return Err(Error::CutoffExceeded {
                mode: label.clone(),
                count: *n,
                cutoff: space.modes()[k].cutoff,
            });
        }
        digits[k] = *n;
    }
    let mut s = StateVector::zeros(space.clone());
    let i = space.index(&digits);
    s.amplitudes_mut()[i] = Complex64::new(1.0, 0.0);
    Ok(s)
}

pub fn coherent_state(space: &Arc<HilbertSpace>, mode: &ModeLabel, alpha: Complex64) -> Result<StateVector> {
    let k = space.index_of(mode)?;
    let amps = coherent_amplitudes(alpha, space.modes()[k].cutoff)?;
    product_state(space, &[(k, &amps)])
}

pub fn cat_state(
    space: &Arc<HilbertSpace>,
    mode: &ModeLabel,
    alpha: Complex64,
    parity: CatParity,
) -> Result<StateVector> {
    let k = space.index_of(mode)?;
    let cat = CatSpec::new(alpha, parity, space.modes()[k].cutoff)?;
    product_state(space, &[(k, cat.amplitudes())])
}

/// One photon in `spatial` with polarization amplitudes `(c_h, c_v)`.
pub fn polarization_qubit(
    space: &Arc<HilbertSpace>,
    spatial: &str,
    c_h: Complex64,
    c_v: Complex64,
) -> Result<StateVector> {
    let total = c_h.norm_sqr() + c_v.norm_sqr();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(total));
    }
    let (h, v) = space.polarized_pair(spatial)?;
    let mut s = StateVector::zeros(space.clone());
    let mut digits = vec![0usize; space.num_modes()];
    digits[h] = 1;
    let ih = space.index(&digits);
    digits[h] = 0;
    digits[v] = 1;
    let iv = space.index(&digits);
    let amps = s.amplitudes_mut();
    amps[ih] = c_h;
    amps[iv] = c_v;
    Ok(s)
}

/// `(|1_H>_a |1_H>_b + |1_V>_a |1_V>_b) / sqrt(2)`.
pub fn bell_pair(space: &Arc<HilbertSpace>, spatial_a: &str, spatial_b: &str) -> Result<StateVector> {
    let (ah, av) = space.polarized_pair(spatial_a)?;
    let (bh, bv) = space.polarized_pair(spatial_b)?;
    let mut s = StateVector::zeros(space.clone());
    for (ma, mb) in [(ah, bh), (av, bv)] {
        let mut digits = vec![0usize; space.num_modes()];
        digits[ma] = 1;
        digits[mb] = 1;
        let i = space.index(&digits);
        s.amplitudes_mut()[i] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    }
    Ok(s)
}

/// `(|Cat+_H> +- |Cat-_V>) / sqrt(2)` on the two polarization modes of
/// `spatial`: an even cat in H with V empty, superposed with an odd cat in V
/// with H empty.
pub fn polarization_coupled_cat(
    space: &Arc<HilbertSpace>,
    spatial: &str,
    alpha: Complex64,
    sign: RelativeSign,
) -> Result<StateVector> {
    let (h, v) = space.polarized_pair(spatial)?;
    let even = CatSpec::new(alpha, CatParity::Plus, space.modes()[h].cutoff)?;
    let odd = CatSpec::new(alpha, CatParity::Minus, space.modes()[v].cutoff)?;
    let first = product_state(space, &[(h, even.amplitudes())])?;
    let second = product_state(space, &[(v, odd.amplitudes())])?;
    Ok(first
        .add_scaled(Complex64::new(sign.value(), 0.0), &second)?
        .scaled(Complex64::new(FRAC_1_SQRT_2, 0.0)))
}

/// Single-mode cat amplitudes for the given parity placed on one
/// polarization of `spatial` with the other polarization empty.
pub fn polarized_cat(
    space: &Arc<HilbertSpace>,
    spatial: &str,
    polarization: Polarization,
    alpha: Complex64,
    parity: CatParity,
) -> Result<StateVector> {
    cat_state(space, &ModeLabel::new(spatial, polarization), alpha, parity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::SparseOperator;
    use crate::space::Polarization::{H, V};

    fn single(cutoff: usize) -> Arc<HilbertSpace> {
        Arc::new(HilbertSpace::new([("c", H, cutoff)]).unwrap())
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn fock_state_basics() {
        let sp = Arc::new(HilbertSpace::polarized(&[("a", 2)]).unwrap());
        let vac = fock_state(&sp, &[]).unwrap();
        assert_eq!(vac.amplitudes()[0], re(1.0));
        let one = fock_state(&sp, &[(("a", H).into(), 1)]).unwrap();
        assert_eq!(one.amplitude(&[1, 0]), re(1.0));
        assert!(matches!(
            fock_state(&sp, &[(("a", V).into(), 3)]),
            Err(Error::CutoffExceeded { .. })
        ));
    }

    #[test]
    fn coherent_state_properties() {
        let sp = single(default_cv_cutoff(1.0));
        let vac = coherent_state(&sp, &("c", H).into(), re(0.0)).unwrap();
        assert_eq!(vac.amplitudes()[0], re(1.0));
        let a = coherent_state(&sp, &("c", H).into(), re(1.0)).unwrap();
        assert!((a.mean_photon_number(0) - 1.0).abs() < 1e-8);
        let b = coherent_state(&sp, &("c", H).into(), re(-1.0)).unwrap();
        let overlap = a.inner(&b).unwrap();
        assert!((overlap.re - (-2.0f64).exp()).abs() < 1e-10);
        assert!(overlap.im.abs() < 1e-15);
    }

    #[test]
    fn coherent_state_rejects_small_cutoff() {
        let sp = single(5);
        let err = coherent_state(&sp, &("c", H).into(), re(2.0)).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { required: 25, .. }), "{err:?}");
    }

    #[test]
    fn cat_parity_support() {
        let sp = single(default_cv_cutoff(1.0));
        let plus = cat_state(&sp, &("c", H).into(), re(1.0), CatParity::Plus).unwrap();
        let minus = cat_state(&sp, &("c", H).into(), re(1.0), CatParity::Minus).unwrap();
        for (n, (p, m)) in plus.amplitudes().iter().zip(minus.amplitudes()).enumerate() {
            if n % 2 == 0 {
                assert_eq!(m.norm(), 0.0);
            } else {
                assert_eq!(p.norm(), 0.0);
            }
        }
        assert_eq!(plus.inner(&minus).unwrap().norm(), 0.0);
        assert!((plus.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn even_cat_tends_to_vacuum() {
        let sp = single(default_cv_cutoff(1e-3));
        let plus = cat_state(&sp, &("c", H).into(), re(1e-3), CatParity::Plus).unwrap();
        assert!((plus.amplitudes()[0].norm_sqr() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn odd_cat_at_zero_is_degenerate() {
        let sp = single(6);
        assert_eq!(
            cat_state(&sp, &("c", H).into(), re(0.0), CatParity::Minus),
            Err(Error::DegenerateAmplitude)
        );
    }

    #[test]
    fn numeric_normalization_matches_closed_form() {
        for a in [0.5, 1.0, 1.5, 2.0] {
            let k = default_cv_cutoff(a);
            for p in [CatParity::Plus, CatParity::Minus] {
                let cat = CatSpec::new(re(a), p, k).unwrap();
                assert!((cat.normalization - cat_normalization_analytic(a, p)).abs() < 1e-10);
            }
        }
    }

    /// a|Cat+> = alpha (N+/N-) |Cat->, a|Cat-> = alpha (N-/N+) |Cat+>.
    /// Oracle: <n> of an even cat is |alpha|^2 tanh|alpha|^2 and of an odd
    /// cat |alpha|^2 coth|alpha|^2, so the ladder coefficients at alpha = 1
    /// are sqrt(tanh 1) = 0.872677... and sqrt(coth 1) = 1.145884...
    #[test]
    fn annihilation_swaps_cat_parity() {
        let sp = single(default_cv_cutoff(1.0));
        let plus = cat_state(&sp, &("c", H).into(), re(1.0), CatParity::Plus).unwrap();
        let minus = cat_state(&sp, &("c", H).into(), re(1.0), CatParity::Minus).unwrap();
        let a = SparseOperator::annihilation(sp, 0).unwrap();
        let down_plus = minus.inner(&a.apply(&plus).unwrap()).unwrap();
        let down_minus = plus.inner(&a.apply(&minus).unwrap()).unwrap();
        assert!((down_plus.re - 1f64.tanh().sqrt()).abs() < 1e-10);
        assert!((down_minus.re - (1.0 / 1f64.tanh()).sqrt()).abs() < 1e-10);
        assert!((down_minus.re - 1.1459).abs() < 1e-4);
        assert!((a.apply(&plus).unwrap().norm() - down_plus.norm()).abs() < 1e-10);
    }

    #[test]
    fn polarization_qubit_examples() {
        let sp = Arc::new(HilbertSpace::polarized(&[("A", 1)]).unwrap());
        let h = polarization_qubit(&sp, "A", re(1.0), re(0.0)).unwrap();
        assert_eq!(h, fock_state(&sp, &[(("A", H).into(), 1)]).unwrap());
        let circ = polarization_qubit(&sp, "A", re(FRAC_1_SQRT_2), Complex64::new(0.0, FRAC_1_SQRT_2)).unwrap();
        assert!((circ.norm() - 1.0).abs() < 1e-15);
        let q = polarization_qubit(&sp, "A", re(0.6), re(0.8)).unwrap();
        assert!((q.mean_photon_number(0) - 0.36).abs() < 1e-15);
        assert!(matches!(
            polarization_qubit(&sp, "A", re(1.0), re(1.0)),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn bell_pair_examples() {
        let sp = Arc::new(HilbertSpace::polarized(&[("a", 2), ("b", 2)]).unwrap());
        let psi = bell_pair(&sp, "a", "b").unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-15);
        let hv = fock_state(&sp, &[(("a", H).into(), 1), (("b", V).into(), 1)]).unwrap();
        assert_eq!(hv.inner(&psi).unwrap().norm(), 0.0);
        assert!(matches!(bell_pair(&sp, "a", "x"), Err(Error::UnknownMode(_))));
    }

    #[test]
    fn coupled_cats_are_orthogonal_and_normalized() {
        let k = default_cv_cutoff(1.5);
        let sp = Arc::new(HilbertSpace::polarized(&[("c", k)]).unwrap());
        let plus = polarization_coupled_cat(&sp, "c", re(1.5), RelativeSign::Plus).unwrap();
        let minus = polarization_coupled_cat(&sp, "c", re(1.5), RelativeSign::Minus).unwrap();
        assert!((plus.norm() - 1.0).abs() < 1e-10);
        assert!(plus.inner(&minus).unwrap().norm() < 1e-14);
        // H mode carries only even photon numbers
        let rho_h = plus.reduced(&[0]).unwrap();
        for n in (1..=k).step_by(2) {
            assert!(rho_h.matrix()[(n, n)].norm() < 1e-15);
        }
    }
}
