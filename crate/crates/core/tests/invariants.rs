use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use hybridcat::analysis::{negativity, negativity_pure};
use hybridcat::measure::{bsm_project, BellOutcome};
use hybridcat::optics::{beam_splitter, half_wave_plate, loss_channel};
use hybridcat::protocols::{teleport, Resource, Settings};
use hybridcat::states::coherent_amplitudes;
use hybridcat::{HilbertSpace, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn random_state(space: &Arc<HilbertSpace>, parts: &[(f64, f64)]) -> StateVector {
    let amps: Vec<Complex64> = parts
        .iter()
        .cycle()
        .take(space.total_dim())
        .enumerate()
        .map(|(i, &(a, b))| Complex64::new(a + 0.01 * i as f64, b))
        .collect();
    StateVector::new(space.clone(), amps).unwrap().normalized().unwrap()
}

fn parts() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn beam_splitter_preserves_norm_and_photon_number(r in 0.0f64..1.0, p in parts()) {
        let space = Arc::new(HilbertSpace::polarized(&[("x", 2), ("y", 2)]).unwrap());
        let psi = random_state(&space, &p);
        let out = beam_splitter(&space, "x", "y", r).unwrap().apply(&psi).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
        let total = |s: &StateVector| (0..4).map(|m| s.mean_photon_number(m)).sum::<f64>();
        prop_assert!((total(&out) - total(&psi)).abs() < 1e-10);
    }

    #[test]
    fn half_wave_plate_is_an_involution(theta in -3.2f64..3.2, p in parts()) {
        let space = Arc::new(HilbertSpace::polarized(&[("x", 2)]).unwrap());
        // sectors above the cutoff are not closed under rotation
        let mut amps = random_state(&space, &p).into_amplitudes();
        for (i, a) in amps.iter_mut().enumerate() {
            if space.digits(i).iter().sum::<usize>() > 2 {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let psi = StateVector::new(space.clone(), amps).unwrap();
        let hwp = half_wave_plate(&space, "x", theta).unwrap();
        let back = hwp.apply(&hwp.apply(&psi).unwrap()).unwrap();
        prop_assert!(back.add_scaled(Complex64::new(-1.0, 0.0), &psi).unwrap().norm() < 1e-10);
    }

    #[test]
    fn coherent_amplitudes_are_normalized(alpha in 0.05f64..2.5, phase in 0.0f64..6.3) {
        let cutoff = hybridcat::space::default_cv_cutoff(alpha);
        let amps = coherent_amplitudes(Complex64::from_polar(alpha, phase), cutoff).unwrap();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_outcomes_resolve_one_photon_per_path(p in parts()) {
        // a third path keeps a remainder to hand back
        let space = Arc::new(HilbertSpace::polarized(&[("a", 1), ("b", 1), ("z", 1)]).unwrap());
        let raw = random_state(&space, &p);
        let mut amps = raw.amplitudes().to_vec();
        for (i, a) in amps.iter_mut().enumerate() {
            let d = space.digits(i);
            if d[0] + d[1] != 1 || d[2] + d[3] != 1 {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let psi = StateVector::new(space.clone(), amps).unwrap();
        prop_assume!(psi.norm() > 1e-6);
        let psi = psi.normalized().unwrap();
        let total: f64 = BellOutcome::ALL
            .iter()
            .map(|&o| bsm_project(&psi, "a", "b", o).unwrap().probability)
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pure_and_mixed_negativity_agree(p in parts()) {
        let space = Arc::new(HilbertSpace::polarized(&[("a", 1), ("b", 1)]).unwrap());
        let psi = random_state(&space, &p);
        let part = space.modes_of(&["a"]).unwrap();
        let pure = negativity_pure(&psi, &part).unwrap();
        let mixed = negativity(&psi.to_density(), &part).unwrap();
        prop_assert!((pure - mixed).abs() < 1e-9);
    }

    #[test]
    fn loss_preserves_trace_and_never_adds_photons(eta in 0.0f64..1.0, p in parts()) {
        let space = Arc::new(HilbertSpace::polarized(&[("x", 3)]).unwrap());
        let psi = random_state(&space, &p);
        let rho = psi.to_density();
        let lossy = loss_channel(&rho, 0, eta).unwrap();
        prop_assert!((lossy.trace() - 1.0).abs() < 1e-10);
        let n = |r: &hybridcat::DensityMatrix| {
            (0..space.total_dim()).map(|i| space.digit(i, 0) as f64 * r.matrix()[(i, i)].re).sum::<f64>()
        };
        prop_assert!((n(&lossy) - eta * n(&rho)).abs() < 1e-10);
    }

    #[test]
    fn teleport_statistics_do_not_depend_on_the_input(theta in 0.0f64..3.15, phi in 0.0f64..6.3) {
        let c_h = Complex64::new((theta / 2.0).cos(), 0.0);
        let c_v = Complex64::from_polar((theta / 2.0).sin(), phi);
        let rep = teleport(c_h, c_v, 1.0, Resource::Ideal, &Settings::default()).unwrap();
        for p in rep.outcome_probabilities.values() {
            prop_assert!((p - 0.25).abs() < 1e-9);
        }
        prop_assert!((rep.min_fidelity() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn diagonal_plate_exchanges_polarizations() {
    let space = Arc::new(HilbertSpace::polarized(&[("x", 1)]).unwrap());
    let h = hybridcat::states::polarization_qubit(&space, "x", Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
    let v = hybridcat::states::polarization_qubit(&space, "x", Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
    let out = half_wave_plate(&space, "x", FRAC_PI_4).unwrap().apply(&h).unwrap();
    assert!((out.inner(&v).unwrap().norm() - 1.0).abs() < 1e-12);
}
