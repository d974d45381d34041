//! Analytic cavity propagation against a fixed-step RK4 integration of the
//! non-Hermitian Schrödinger equation, and the optimal emission time against
//! a dense scan plus golden-section refinement.

#![allow(clippy::needless_range_loop)]

mod common;

use common::{argmax_by_scan, p_closed_form, rk4, setup, OMEGA};
use ion_photon::cavity::{evolve_conditional, optimal_emission_time, success_probability, FourLevelAmplitudes};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

#[test]
fn analytic_propagator_matches_rk4() {
    for ratio in [0.0, 0.1, 1.0, 3.0] {
        let kappa = ratio * OMEGA;
        let tau = optimal_emission_time(OMEGA, kappa).unwrap();
        let t_end = 5.0 * tau;
        // at most (2π/Ω̃)/200 per step
        let steps = ((t_end * OMEGA / (2.0 * std::f64::consts::PI)) * 2000.0).ceil().max(2000.0) as usize;
        let s = setup(OMEGA, kappa);
        let init = FourLevelAmplitudes::initial();
        let traj = rk4(OMEGA, kappa, init.0, t_end, steps);
        let peak = traj.iter().map(|(_, p)| p[1].norm_sqr()).fold(0.0, f64::max);
        for (t, psi) in traj.iter().step_by(steps / 100) {
            let ana = evolve_conditional(&s, &init, *t).unwrap();
            for i in 0..4 {
                assert!((ana.0[i] - psi[i]).norm() <= 1e-8 * init.norm_sqr().sqrt(), "kappa/omega={ratio} t={t:e} i={i}");
            }
            // the closed form gives the photon weight of one branch; two
            // equally weighted branches each carry half of it
            let p = success_probability(OMEGA, kappa, *t);
            let numeric = 2.0 * psi[1].norm_sqr();
            assert!((p - numeric).abs() <= 1e-8 * peak.max(1e-300) * 2.0, "kappa/omega={ratio} t={t:e}: {p} vs {numeric}");
            assert!((ana.photon_weight() - p).abs() <= 1e-10);
        }
    }
}

#[test]
fn optimal_time_matches_dense_scan() {
    for ratio in [0.0, 0.01, 0.1, 0.5, 1.0, 1.9, 3.0, 10.0] {
        let kappa = ratio * OMEGA;
        let tau = optimal_emission_time(OMEGA, kappa).unwrap();
        // without decay every maximum has P = 1, so scan only the first period
        let periods = if kappa > 0.0 { 3.0 } else { 1.0 };
        let scan = argmax_by_scan(OMEGA, kappa, periods * std::f64::consts::PI / OMEGA);
        assert!((tau - scan).abs() <= 1e-6 * tau, "kappa/omega={ratio}: {tau:e} vs {scan:e}");
    }
}

#[test]
fn later_maxima_are_lower() {
    let kappa = 0.05 * OMEGA;
    let tau = optimal_emission_time(OMEGA, kappa).unwrap();
    let p_star = success_probability(OMEGA, kappa, tau);
    let w = (OMEGA * OMEGA - kappa * kappa / 4.0).sqrt();
    for k in 1..5 {
        let t = tau + k as f64 * std::f64::consts::PI / w;
        assert!(success_probability(OMEGA, kappa, t) < p_star);
    }
}

fn arb_state() -> impl Strategy<Value = FourLevelAmplitudes> {
    proptest::collection::vec(-1.0f64..1.0, 8).prop_filter_map("non-zero", |v| {
        let a: [C64; 4] = std::array::from_fn(|i| C64::new(v[2 * i], v[2 * i + 1]));
        let n = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        (n > 1e-3).then(|| FourLevelAmplitudes(a.map(|x| x / n)))
    })
}

proptest! {
    #[test]
    fn norm_never_increases(state in arb_state(), ratio in 0.0f64..5.0) {
        let s = setup(OMEGA, ratio * OMEGA);
        let mut last = state.norm_sqr();
        for k in 1..=200 {
            let t = k as f64 * 2e-12;
            let n = evolve_conditional(&s, &state, t).unwrap().norm_sqr();
            prop_assert!(n <= last + 1e-13);
            last = n;
        }
    }

    #[test]
    fn sectors_do_not_mix(ratio in 0.0f64..5.0, t in 0.0f64..1e-9) {
        let s = setup(OMEGA, ratio * OMEGA);
        let g = evolve_conditional(&s, &FourLevelAmplitudes::basis(FourLevelAmplitudes::G_AUX), t).unwrap();
        prop_assert_eq!(g.0[FourLevelAmplitudes::E_AUX], C64::new(0.0, 0.0));
        prop_assert_eq!(g.0[FourLevelAmplitudes::E_PHOTON], C64::new(0.0, 0.0));
        let e = evolve_conditional(&s, &FourLevelAmplitudes::basis(FourLevelAmplitudes::E_AUX), t).unwrap();
        prop_assert_eq!(e.0[FourLevelAmplitudes::G_AUX], C64::new(0.0, 0.0));
        prop_assert_eq!(e.0[FourLevelAmplitudes::G_PHOTON], C64::new(0.0, 0.0));
    }

    #[test]
    fn analytic_matches_closed_form(ratio in 0.0f64..5.0, frac in 0.0f64..5.0) {
        let kappa = ratio * OMEGA;
        let t = frac / OMEGA;
        let a = success_probability(OMEGA, kappa, t);
        let b = p_closed_form(OMEGA, kappa, t);
        prop_assert!((a - b).abs() <= 1e-10);
    }
}
