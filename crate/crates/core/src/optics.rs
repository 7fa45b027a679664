//! Linear-optical elements as Fock-space unitaries, the weak tap used for
//! photon subtraction, and the pure-loss channel.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::operator::SparseOperator;
use crate::space::{HilbertSpace, Polarization};
use crate::state::StateVector;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `exp(i sum_jk h_jk a_j^dag a_k)` on modes `(m1, m2)`.
///
/// The generator conserves total photon number, so the exponential is taken
/// block by block over number sectors of the truncated two-mode register.
/// The creation operators transform as `a_k^dag -> sum_j (e^{ih})_jk a_j^dag`.
pub fn passive_two_mode(
    space: &Arc<HilbertSpace>,
    m1: usize,
    m2: usize,
    h: [[Complex64; 2]; 2],
) -> Result<SparseOperator> {
    if m1 == m2 {
        return Err(Error::Invalid("two-mode element needs two distinct modes".into()));
    }
    let d1 = space.dims()[m1];
    let d2 = space.dims()[m2];
    let mut trips = Vec::new();
    for total in 0..(d1 + d2 - 1) {
        let sector: Vec<(usize, usize)> = (0..d1)
            .filter(|&n1| total >= n1 && total - n1 < d2)
            .map(|n1| (n1, total - n1))
            .collect();
        let dim = sector.len();
        let mut k = DMatrix::<Complex64>::zeros(dim, dim);
        for (col, &(n1, n2)) in sector.iter().enumerate() {
            k[(col, col)] = h[0][0] * n1 as f64 + h[1][1] * n2 as f64;
            // a1^dag a2 |n1, n2> = sqrt((n1+1) n2) |n1+1, n2-1>
            if n2 > 0 && n1 + 1 < d1 {
                let row = sector.iter().position(|&s| s == (n1 + 1, n2 - 1)).unwrap();
                k[(row, col)] += h[0][1] * (((n1 + 1) * n2) as f64).sqrt();
            }
            if n1 > 0 && n2 + 1 < d2 {
                let row = sector.iter().position(|&s| s == (n1 - 1, n2 + 1)).unwrap();
                k[(row, col)] += h[1][0] * (((n2 + 1) * n1) as f64).sqrt();
            }
        }
        let eig = k.symmetric_eigen();
        let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (I * l).exp()));
        let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
        for (r, &(a1, a2)) in sector.iter().enumerate() {
            for (c, &(b1, b2)) in sector.iter().enumerate() {
                let v = u[(r, c)];
                if v.norm() > 1e-300 {
                    trips.push((a1 * d2 + a2, b1 * d2 + b2, v));
                }
            }
        }
    }
    SparseOperator::from_local(space.clone(), &[m1, m2], trips)
}

fn check_polarized(space: &HilbertSpace, spatial: &str) -> Result<(usize, usize)> {
    space.polarized_pair(spatial)
}

/// Beam splitter between two polarized paths with amplitude reflectivity `r`,
/// acting identically on the H pair and on the V pair. In the Heisenberg
/// picture `b1 -> t b1 + r b2`, `b2 -> -r b1 + t b2`, `t = sqrt(1 - r^2)`,
/// so a photon entering path 1 leaves as `t|1,0> - r|0,1>`.
pub fn beam_splitter(space: &Arc<HilbertSpace>, spatial1: &str, spatial2: &str, r: f64) -> Result<SparseOperator> {
    let [bs_h, bs_v] = beam_splitter_factors(space, spatial1, spatial2, r)?;
    bs_h.compose(&bs_v)
}

/// The H and V halves of [`beam_splitter`]. They commute; applying them
/// one after the other avoids building the four-mode product, whose size
/// grows as the fourth power of the cutoff.
pub fn beam_splitter_factors(
    space: &Arc<HilbertSpace>,
    spatial1: &str,
    spatial2: &str,
    r: f64,
) -> Result<[SparseOperator; 2]> {
    if !(0.0..=1.0).contains(&r) || r.is_nan() {
        return Err(Error::BadReflectivity(r));
    }
    let (h1, v1) = check_polarized(space, spatial1)?;
    let (h2, v2) = check_polarized(space, spatial2)?;
    let theta = r.asin();
    let zero = Complex64::new(0.0, 0.0);
    let h = [[zero, -I * theta], [I * theta, zero]];
    Ok([passive_two_mode(space, h1, h2, h)?, passive_two_mode(space, v1, v2, h)?])
}

/// Half-wave plate with fast axis at `theta` (radians). Jones matrix
/// `[[cos 2t, sin 2t], [sin 2t, -cos 2t]]` on `(H, V)`: at 0 it flips the
/// sign of V, at 45 degrees it exchanges H and V.
pub fn half_wave_plate(space: &Arc<HilbertSpace>, spatial: &str, theta: f64) -> Result<SparseOperator> {
    let (h, v) = check_polarized(space, spatial)?;
    if space.dims()[h] != space.dims()[v] {
        return Err(Error::Invalid(format!("H and V cutoffs of {spatial} differ")));
    }
    // e^{i pi |u><u|} = 1 - 2|u><u| with u the Jones eigenvector of eigenvalue -1
    let u = [-theta.sin(), theta.cos()];
    let gen = [
        [Complex64::new(std::f64::consts::PI * u[0] * u[0], 0.0), Complex64::new(std::f64::consts::PI * u[0] * u[1], 0.0)],
        [Complex64::new(std::f64::consts::PI * u[1] * u[0], 0.0), Complex64::new(std::f64::consts::PI * u[1] * u[1], 0.0)],
    ];
    passive_two_mode(space, h, v, gen)
}

/// Polarizing beam splitter: the H mode of `spatial_in` is exchanged with
/// the H mode of `spatial_out_h`, the V mode with the V mode of
/// `spatial_out_v`. An output equal to the input leaves that polarization
/// in place.
pub fn pbs(
    space: &Arc<HilbertSpace>,
    spatial_in: &str,
    spatial_out_h: &str,
    spatial_out_v: &str,
) -> Result<SparseOperator> {
    let (in_h, in_v) = check_polarized(space, spatial_in)?;
    let out_h = space.find(spatial_out_h, Polarization::H)?;
    let out_v = space.find(spatial_out_v, Polarization::V)?;
    let mut op = SparseOperator::identity(space.clone());
    for (a, b) in [(in_h, out_h), (in_v, out_v)] {
        if a != b {
            op = swap_modes(space, a, b)?.compose(&op)?;
        }
    }
    Ok(op)
}

/// [`pbs`] applied to a state, checking that the output ports start empty.
pub fn route_pbs(state: &StateVector, spatial_in: &str, spatial_out_h: &str, spatial_out_v: &str) -> Result<StateVector> {
    let space = state.space_arc();
    for (spatial, pol) in [(spatial_out_h, Polarization::H), (spatial_out_v, Polarization::V)] {
        if spatial == spatial_in {
            continue;
        }
        let k = space.find(spatial, pol)?;
        if 1.0 - state.occupation_weight(k, 0) > 1e-14 * state.norm_sqr().max(1.0) {
            return Err(Error::OutputNotVacuum(spatial.to_string()));
        }
    }
    pbs(space, spatial_in, spatial_out_h, spatial_out_v)?.apply(state)
}

fn swap_modes(space: &Arc<HilbertSpace>, a: usize, b: usize) -> Result<SparseOperator> {
    let d = space.dims()[a];
    if space.dims()[b] != d {
        return Err(Error::Invalid("swapped modes need equal cutoffs".into()));
    }
    let trips = (0..d).flat_map(|n| (0..d).map(move |m| (m * d + n, n * d + m, Complex64::new(1.0, 0.0))));
    SparseOperator::from_local(space.clone(), &[a, b], trips)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum TapOrder {
    /// `1 + r sum_pol c_pol d_pol^dag`, the first-order expansion.
    FirstOrder,
    /// The full beam-splitter unitary.
    #[default]
    ExactBS,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TapResult {
    /// Unnormalized for `FirstOrder`, unit norm for `ExactBS`.
    pub state: StateVector,
    pub kept: String,
    pub tap: String,
    pub order: TapOrder,
}

/// The first-order tap operator `1 + r (c_H d_H^dag + c_V d_V^dag)`.
pub fn first_order_tap(space: &Arc<HilbertSpace>, spatial_in: &str, spatial_tap: &str, r: f64) -> Result<SparseOperator> {
    let (ch, cv) = check_polarized(space, spatial_in)?;
    let (dh, dv) = check_polarized(space, spatial_tap)?;
    let mut op = SparseOperator::identity(space.clone());
    for (c, d) in [(ch, dh), (cv, dv)] {
        let term = SparseOperator::creation(space.clone(), d)?
            .compose(&SparseOperator::annihilation(space.clone(), c)?)?
            .scaled(Complex64::new(r, 0.0));
        op = op.add(&term)?;
    }
    Ok(op)
}

/// Diverts a small fraction of `spatial_in` into the empty path `spatial_tap`.
///
/// The exact variant orders the beam splitter so that its first-order term
/// is `+r c d^dag`, matching [`first_order_tap`].
pub fn weak_tap(state: &StateVector, spatial_in: &str, spatial_tap: &str, r: f64, order: TapOrder) -> Result<TapResult> {
    if !(0.0..=1.0).contains(&r) || r.is_nan() {
        return Err(Error::BadReflectivity(r));
    }
    let space = state.space_arc();
    let (dh, dv) = check_polarized(space, spatial_tap)?;
    check_polarized(space, spatial_in)?;
    let empty = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| space.digit(*i, dh) > 0 || space.digit(*i, dv) > 0)
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>();
    if empty > 1e-14 * state.norm_sqr().max(1.0) {
        return Err(Error::TapNotVacuum(spatial_tap.to_string()));
    }
    let out = match order {
        TapOrder::FirstOrder => first_order_tap(space, spatial_in, spatial_tap, r)?.apply(state)?,
        TapOrder::ExactBS => {
            let [bs_h, bs_v] = beam_splitter_factors(space, spatial_tap, spatial_in, r)?;
            bs_v.apply(&bs_h.apply(state)?)?
        }
    };
    Ok(TapResult {
        state: out,
        kept: spatial_in.to_string(),
        tap: spatial_tap.to_string(),
        order,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Kraus operators of pure loss with transmission `eta` on `mode`:
/// `K_k = sum_n sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k><n|`.
pub fn loss_kraus(space: &Arc<HilbertSpace>, mode: usize, eta: f64) -> Result<Vec<SparseOperator>> {
    if !(0.0..=1.0).contains(&eta) || eta.is_nan() {
        return Err(Error::BadEta(eta));
    }
    if mode >= space.num_modes() {
        return Err(Error::UnknownMode(format!("mode index {mode}")));
    }
    let d = space.dims()[mode];
    (0..d)
        .map(|k| {
            let trips = (k..d).map(move |n| {
                let w = binomial(n, k) * eta.powi((n - k) as i32) * (1.0 - eta).powi(k as i32);
                (n - k, n, Complex64::new(w.sqrt(), 0.0))
            });
            SparseOperator::from_local(space.clone(), &[mode], trips)
        })
        .collect()
}

/// Pure loss: coupling to a vacuum ancilla through a beam splitter of
/// transmissivity `sqrt(eta)` and discarding the ancilla.
pub fn loss_channel(rho: &DensityMatrix, mode: usize, eta: f64) -> Result<DensityMatrix> {
    let kraus = loss_kraus(rho.space_arc(), mode, eta)?;
    rho.apply_kraus(&kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{default_cv_cutoff, ModeDescriptor};
    use crate::states::{cat_state, coherent_state, fock_state, polarization_coupled_cat, CatParity, RelativeSign};
    use num_complex::Complex64 as C;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
    use Polarization::{H, V};

    fn two_paths(cutoff: usize) -> Arc<HilbertSpace> {
        Arc::new(HilbertSpace::polarized(&[("x", cutoff), ("y", cutoff)]).unwrap())
    }

    fn ket(space: &Arc<HilbertSpace>, occ: &[(&str, Polarization, usize)]) -> StateVector {
        let occ: Vec<_> = occ.iter().map(|&(s, p, n)| (crate::ModeLabel::new(s, p), n)).collect();
        fock_state(space, &occ).unwrap()
    }

    #[test]
    fn beam_splitter_zero_reflectivity_is_identity() {
        let sp = two_paths(2);
        let bs = beam_splitter(&sp, "x", "y", 0.0).unwrap();
        assert!((bs.to_dense() - DMatrix::<C>::identity(81, 81)).norm() < 1e-14);
    }

    #[test]
    fn balanced_beam_splitter_single_photon() {
        let sp = two_paths(2);
        let bs = beam_splitter(&sp, "x", "y", FRAC_1_SQRT_2).unwrap();
        let out = bs.apply(&ket(&sp, &[("x", H, 1)])).unwrap();
        let expected = ket(&sp, &[("x", H, 1)])
            .add_scaled(C::new(-1.0, 0.0), &ket(&sp, &[("y", H, 1)]))
            .unwrap()
            .scaled(C::new(FRAC_1_SQRT_2, 0.0));
        assert!((out.inner(&expected).unwrap().re - 1.0).abs() < 1e-12);
    }

    /// Two photons through a balanced splitter, propagated by a Taylor
    /// series of the generator on a two-photon-complete register.
    #[test]
    fn hong_ou_mandel_against_taylor_series() {
        let sp = Arc::new(HilbertSpace::new([("x", H, 2), ("y", H, 2)]).unwrap());
        let theta = FRAC_PI_4;
        let a1 = SparseOperator::annihilation(sp.clone(), 0).unwrap().to_dense();
        let a2 = SparseOperator::annihilation(sp.clone(), 1).unwrap().to_dense();
        let g = (a1.adjoint() * &a2 - &a1 * a2.adjoint()).map(|z| z * theta);
        let mut term = DMatrix::<C>::identity(9, 9);
        let mut u = term.clone();
        for k in 1..60 {
            term = &term * &g / C::new(k as f64, 0.0);
            u += &term;
        }
        let input = sp.index(&[1, 1]);
        let out_taylor: Vec<C> = (0..9).map(|i| u[(i, input)]).collect();
        assert!(out_taylor[input].norm() < 1e-14);
        let local = Arc::new(HilbertSpace::polarized(&[("x", 2), ("y", 2)]).unwrap());
        let bs = beam_splitter(&local, "x", "y", FRAC_1_SQRT_2).unwrap();
        let out = bs.apply(&ket(&local, &[("x", H, 1), ("y", H, 1)])).unwrap();
        assert!(out.amplitude(&[1, 0, 1, 0]).norm() < 1e-14);
        for (n1, n2) in [(2, 0), (0, 2)] {
            let want = out_taylor[sp.index(&[n1, n2])];
            assert!((out.amplitude(&[n1, 0, n2, 0]) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn elements_are_unitary_and_conserve_photon_number() {
        let sp = two_paths(3);
        let ops = [
            beam_splitter(&sp, "x", "y", 0.3).unwrap(),
            half_wave_plate(&sp, "x", 0.37).unwrap(),
            pbs(&sp, "x", "y", "x").unwrap(),
        ];
        let total: Vec<SparseOperator> = (0..4).map(|m| SparseOperator::number(sp.clone(), m).unwrap()).collect();
        let mut n_tot = total[0].clone();
        for t in &total[1..] {
            n_tot = n_tot.add(t).unwrap();
        }
        let n = n_tot.to_dense();
        for op in &ops {
            assert!(op.is_unitary(1e-10));
            let u = op.to_dense();
            assert!((&u * &n - &n * &u).norm() < 1e-10);
        }
    }

    #[test]
    fn half_wave_plate_conventions() {
        let sp = Arc::new(HilbertSpace::polarized(&[("x", 2)]).unwrap());
        let h = ket(&sp, &[("x", H, 1)]);
        let v = ket(&sp, &[("x", V, 1)]);
        let hwp45 = half_wave_plate(&sp, "x", FRAC_PI_4).unwrap();
        assert!((hwp45.apply(&h).unwrap().inner(&v).unwrap().re - 1.0).abs() < 1e-12);
        let hwp0 = half_wave_plate(&sp, "x", 0.0).unwrap();
        assert!((hwp0.apply(&v).unwrap().inner(&v).unwrap().re + 1.0).abs() < 1e-12);
        assert!((hwp0.apply(&h).unwrap().inner(&h).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_wave_plate_relabels_cat_polarization() {
        let k = default_cv_cutoff(1.0);
        let sp = Arc::new(HilbertSpace::polarized(&[("c", k)]).unwrap());
        let cat_h = cat_state(&sp, &("c", H).into(), C::new(1.0, 0.0), CatParity::Plus).unwrap();
        let cat_v = cat_state(&sp, &("c", V).into(), C::new(1.0, 0.0), CatParity::Plus).unwrap();
        let out = half_wave_plate(&sp, "c", FRAC_PI_4).unwrap().apply(&cat_h).unwrap();
        assert!((out.inner(&cat_v).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pbs_routes_by_polarization() {
        let sp = Arc::new(HilbertSpace::polarized(&[("in", 1), ("oh", 1), ("ov", 1)]).unwrap());
        let h = ket(&sp, &[("in", H, 1)]);
        let out = route_pbs(&h, "in", "oh", "ov").unwrap();
        assert_eq!(out, ket(&sp, &[("oh", H, 1)]));
        let v = ket(&sp, &[("in", V, 1)]);
        assert_eq!(route_pbs(&v, "in", "oh", "ov").unwrap(), ket(&sp, &[("ov", V, 1)]));
        let d = h.add_scaled(C::new(1.0, 0.0), &v).unwrap().scaled(C::new(FRAC_1_SQRT_2, 0.0));
        let out = route_pbs(&d, "in", "oh", "ov").unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-15);
        let busy = ket(&sp, &[("in", H, 1), ("oh", H, 1)]);
        assert!(matches!(route_pbs(&busy, "in", "oh", "ov"), Err(Error::OutputNotVacuum(_))));
    }

    fn tapped_cat_space(alpha: f64) -> Arc<HilbertSpace> {
        let k = default_cv_cutoff(alpha);
        Arc::new(HilbertSpace::polarized(&[("c", k), ("d", 2)]).unwrap())
    }

    #[test]
    fn weak_tap_zero_reflectivity_is_identity() {
        let sp = tapped_cat_space(1.0);
        let psi = polarization_coupled_cat(&sp, "c", C::new(1.0, 0.0), RelativeSign::Plus).unwrap();
        for order in [TapOrder::FirstOrder, TapOrder::ExactBS] {
            let out = weak_tap(&psi, "c", "d", 0.0, order).unwrap();
            assert!((out.state.inner(&psi).unwrap().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weak_tap_requires_empty_tap_port() {
        let sp = tapped_cat_space(1.0);
        let busy = fock_state(&sp, &[(("d", H).into(), 1)]).unwrap();
        assert!(matches!(
            weak_tap(&busy, "c", "d", 0.1, TapOrder::ExactBS),
            Err(Error::TapNotVacuum(_))
        ));
    }

    /// First-order tap term by term: the one-photon-tapped component is
    /// r/sqrt(2) (c_H|Cat+>|1_H> + c_V|Cat->|1_V>), whose squared norm is
    /// r^2 |alpha|^2 ((N-/N+)^2 + (N+/N-)^2) / 2.
    #[test]
    fn first_order_tap_matches_term_expansion() {
        let alpha = 1.0;
        let r = 0.05;
        let sp = tapped_cat_space(alpha);
        let psi = polarization_coupled_cat(&sp, "c", C::new(alpha, 0.0), RelativeSign::Plus).unwrap();
        let out = weak_tap(&psi, "c", "d", r, TapOrder::FirstOrder).unwrap().state;
        let dh = sp.find("d", H).unwrap();
        let dv = sp.find("d", V).unwrap();
        let one: f64 = out
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| sp.digit(*i, dh) + sp.digit(*i, dv) == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let k = sp.modes()[0].cutoff;
        let np = crate::states::CatSpec::new(C::new(alpha, 0.0), CatParity::Plus, k).unwrap().normalization;
        let nm = crate::states::CatSpec::new(C::new(alpha, 0.0), CatParity::Minus, k).unwrap().normalization;
        let expected = r * r * alpha * alpha * ((nm / np).powi(2) + (np / nm).powi(2)) / 2.0;
        assert!((one - expected).abs() < 1e-12 * expected.max(1.0), "{one} vs {expected}");
        // the zero-photon component is untouched
        let zero = out.contract(&[dh, dv], &[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)]).unwrap();
        assert!((zero.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_order_tap_is_the_quoted_operator() {
        let sp = tapped_cat_space(0.5);
        let r = 0.07;
        let op = first_order_tap(&sp, "c", "d", r).unwrap().to_dense();
        let mut expected = DMatrix::<C>::identity(sp.total_dim(), sp.total_dim());
        for (c, d) in [("c", "d")] {
            for p in Polarization::BOTH {
                let cc = SparseOperator::annihilation(sp.clone(), sp.find(c, p).unwrap()).unwrap().to_dense();
                let dd = SparseOperator::creation(sp.clone(), sp.find(d, p).unwrap()).unwrap().to_dense();
                expected += (dd * cc).map(|z| z * r);
            }
        }
        assert!((op - expected).norm() < 1e-14);
    }

    fn tap_deviation(r: f64) -> f64 {
        let sp = tapped_cat_space(1.0);
        let psi = polarization_coupled_cat(&sp, "c", C::new(1.0, 0.0), RelativeSign::Plus).unwrap();
        let a = weak_tap(&psi, "c", "d", r, TapOrder::ExactBS).unwrap().state;
        let b = weak_tap(&psi, "c", "d", r, TapOrder::FirstOrder).unwrap().state;
        a.add_scaled(C::new(-1.0, 0.0), &b).unwrap().norm()
    }

    #[test]
    fn exact_and_first_order_tap_differ_at_second_order() {
        let ratio = tap_deviation(0.04) / tap_deviation(0.02);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn loss_channel_limits() {
        let sp = Arc::new(HilbertSpace::new([ModeDescriptor::new("c", H, 4)]).unwrap());
        let rho = fock_state(&sp, &[(("c", H).into(), 3)]).unwrap().to_density();
        let same = loss_channel(&rho, 0, 1.0).unwrap();
        assert!((same.matrix() - rho.matrix()).norm() < 1e-14);
        let gone = loss_channel(&rho, 0, 0.0).unwrap();
        assert!((gone.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(matches!(loss_channel(&rho, 0, 1.5), Err(Error::BadEta(_))));
    }

    #[test]
    fn lossy_coherent_state_stays_coherent() {
        let eta: f64 = 0.6;
        let alpha = 1.2;
        let k = default_cv_cutoff(alpha);
        let sp = Arc::new(HilbertSpace::new([("c", H, k)]).unwrap());
        let rho = coherent_state(&sp, &("c", H).into(), C::new(alpha, 0.0)).unwrap().to_density();
        let out = loss_channel(&rho, 0, eta).unwrap();
        let target = coherent_state(&sp, &("c", H).into(), C::new(eta.sqrt() * alpha, 0.0)).unwrap();
        assert!((out.expectation_in(&target).unwrap() - 1.0).abs() < 1e-8);
    }

    /// Independent route: explicit beam splitter onto an ancilla, then a
    /// partial trace.
    #[test]
    fn kraus_loss_matches_dilation() {
        let eta: f64 = 0.7;
        let sp = Arc::new(HilbertSpace::polarized(&[("c", 4)]).unwrap());
        let mut psi = StateVector::zeros(sp.clone());
        for (d, a) in [([0, 0], 0.5), ([2, 1], 0.5), ([1, 3], -0.5), ([4, 0], 0.5)] {
            let i = sp.index(&d);
            psi.amplitudes_mut()[i] = C::new(a, 0.0);
        }
        let rho = psi.to_density();
        let direct = loss_channel(&rho, 0, eta).unwrap();

        let anc = Arc::new(HilbertSpace::polarized(&[("e", 4)]).unwrap());
        let joint = psi.tensor(&StateVector::vacuum(anc)).unwrap();
        // the splitter couples both polarizations, so compare with loss on both
        let bs = beam_splitter(joint.space_arc(), "c", "e", (1.0 - eta).sqrt()).unwrap();
        let out = bs.apply(&joint).unwrap();
        let reduced = out.reduced(&[0, 1]).unwrap();
        let both = loss_channel(&direct, 1, eta).unwrap();
        assert!((reduced.matrix() - both.matrix()).norm() < 1e-12);
        assert!((direct.trace() - 1.0).abs() < 1e-12);
    }
}
