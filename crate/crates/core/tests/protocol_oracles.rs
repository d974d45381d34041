//! End-to-end protocol output against the hand-expanded two- and three-ion
//! outcome tables, entanglement and orthogonality checks, and sampling
//! statistics.

mod common;

use common::{Expected, BELL, GHZ3};
use ion_photon::config::Config;
use ion_photon::protocol::{
    emission_stage, entangle_stage, entangle_stage_ideal, outcome_table, prepare_initial, run_pipeline, sample_run,
    sample_run_parallel, success_rate, OutcomeTable,
};
use num_complex::Complex64 as C64;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn check_table(table: &OutcomeTable, expected: &Expected) {
    let n = table.ions;
    assert_eq!(table.rows.len(), 1 << n);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (ions, terms) in expected {
        let row = table.row(ions).unwrap();
        assert!((row.probability - 1.0 / (1 << n) as f64).abs() < 1e-12);
        assert_eq!(row.terms.len(), 2, "{ions}");
        for (sign, photons) in terms {
            let a = row.amplitude(photons);
            assert!((a - C64::new(sign * r, 0.0)).norm() < 1e-10, "{ions} {photons}: {a}");
        }
    }
}

fn full_amplitude_check(preset: &str, expected: &Expected) {
    // unnormalised amplitude of every basis term is ±1/(2^(N/2)·√2)
    let exp = Config::preset(preset).unwrap().run(None).unwrap().experiment;
    let out = run_pipeline(&exp).unwrap();
    let n = exp.ion_count();
    let amp = 1.0 / (2f64.powf(n as f64 / 2.0) * 2f64.sqrt());
    let s = &out.entangled;
    let mut seen = 0;
    for (ions, terms) in expected {
        for (sign, photons) in terms {
            let spins: usize = ions.chars().fold(0, |acc, c| (acc << 1) | usize::from(c == 'g'));
            let pol: usize = photons.split(' ').fold(0, |acc, p| (acc << 1) | usize::from(p == "s0"));
            let idx = (0..n).fold(0, |acc, q| {
                let sb = (spins >> (n - 1 - q)) & 1;
                let pb = (pol >> (n - 1 - q)) & 1;
                (acc << 2) | (sb << 1) | pb
            });
            let a = s.amplitudes()[idx];
            assert!((a - C64::new(sign * amp, 0.0)).norm() < 1e-10, "{ions} {photons}");
            seen += 1;
        }
    }
    let rest: f64 = s.amplitudes().iter().map(|a| a.norm_sqr()).sum::<f64>() - seen as f64 * amp * amp;
    assert!(rest.abs() < 1e-12);
    check_table(&out.table, expected);
}

#[test]
fn two_ions_give_the_bell_table() {
    full_amplitude_check("bell_ideal", BELL);
}

#[test]
fn three_ions_give_the_ghz_table() {
    full_amplitude_check("ghz3_ideal", GHZ3);
}

#[test]
fn pulses_and_ideal_gates_agree() {
    for preset in ["bell_ideal", "ghz3_ideal", "ghz5_ideal"] {
        let exp = Config::preset(preset).unwrap().run(None).unwrap().experiment;
        let em = emission_stage(&exp.cavities).unwrap();
        let j = exp.couplings().unwrap();
        let a = entangle_stage(&em.state, &j, exp.convention).unwrap();
        let b = entangle_stage_ideal(&em.state, exp.convention).unwrap();
        let diff: f64 = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        assert!(diff < 1e-9, "{preset}: {diff}");
    }
}

/// Schmidt coefficients across photon 1 | rest from the 2 × 2^(N−1) matrix.
fn schmidt(v: &[C64], n: usize) -> Vec<f64> {
    let cols = 1 << (n - 1);
    let m = nalgebra::DMatrix::from_fn(2, cols, |r, c| {
        let z = v[(r << (n - 1)) | c];
        nalgebra::Complex::new(z.re, z.im)
    });
    let mut s: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[test]
fn every_photon_state_is_maximally_entangled() {
    for preset in ["bell_ideal", "ghz3_ideal"] {
        let exp = Config::preset(preset).unwrap().run(None).unwrap().experiment;
        let table = run_pipeline(&exp).unwrap().table;
        for v in table.photon_vectors() {
            let s = schmidt(&v, table.ions);
            let r = std::f64::consts::FRAC_1_SQRT_2;
            assert!((s[0] - r).abs() < 1e-10 && (s[1] - r).abs() < 1e-10, "{s:?}");
        }
    }
}

#[test]
fn photon_states_form_an_orthonormal_basis() {
    for preset in ["bell_ideal", "ghz3_ideal", "ghz5_ideal"] {
        let exp = Config::preset(preset).unwrap().run(None).unwrap().experiment;
        let vs = run_pipeline(&exp).unwrap().table.photon_vectors();
        for (a, va) in vs.iter().enumerate() {
            for (b, vb) in vs.iter().enumerate() {
                let g: C64 = va.iter().zip(vb).map(|(x, y)| x.conj() * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g - C64::new(want, 0.0)).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn lossy_emission_keeps_the_table() {
    // conditioning on emission removes the decay, so the table is unchanged
    let mut exp = Config::preset("bell_cavity").unwrap().run(None).unwrap().experiment;
    let lossy = run_pipeline(&exp).unwrap();
    exp.cavities.iter_mut().for_each(|c| c.kappa = 0.0);
    let ideal = run_pipeline(&exp).unwrap();
    check_table(&lossy.table, BELL);
    assert!((lossy.emission.total_probability - 0.8075).abs() < 2e-3);
    assert_eq!(ideal.emission.total_probability, 1.0);
}

#[test]
fn initial_state_reduced_density_is_balanced() {
    let s = prepare_initial(3);
    for site in &s.sites {
        assert!((site.0[0].norm_sqr() - 0.5).abs() < 1e-15);
        assert!((site.0[2].norm_sqr() - 0.5).abs() < 1e-15);
        assert_eq!(site.photon_weight(), 0.0);
    }
}

#[test]
fn outcome_table_of_product_input() {
    // without entangling gates each ion string heralds a product photon state
    let exp = Config::preset("bell_ideal").unwrap().run(None).unwrap().experiment;
    let em = emission_stage(&exp.cavities).unwrap();
    let t = outcome_table(&em.state);
    assert!(t.rows.iter().all(|r| r.terms.len() == 1 && (r.probability - 0.25).abs() < 1e-12));
    assert_eq!(t.row("eg").unwrap().terms[0].photons, "s+ s0");
}

#[test]
fn sampling_is_uniform_and_reproducible() {
    for preset in ["bell_ideal", "ghz3_ideal"] {
        let mut exp = Config::preset(preset).unwrap().run(None).unwrap().experiment;
        let df = (1usize << exp.ion_count()) - 1;
        let critical = ChiSquared::new(df as f64).unwrap().inverse_cdf(0.999);
        for seed in [1, 2, 3] {
            exp.seed = seed;
            let a = sample_run(&exp, 100_000).unwrap();
            assert_eq!(a, sample_run_parallel(&exp, 100_000).unwrap());
            assert_eq!(a.emitted, 100_000);
            assert_eq!(a.counts.values().sum::<u64>(), a.emitted);
            let e = a.emitted as f64 / (df + 1) as f64;
            let chi2: f64 = a.counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
            assert!(chi2 < critical, "{preset} seed {seed}: {chi2} >= {critical}");
        }
    }
}

#[test]
fn zero_emission_probability_gives_no_successes() {
    let mut exp = Config::preset("bell_cavity").unwrap().run(None).unwrap().experiment;
    exp.collection_efficiency = 0.0;
    let r = sample_run(&exp, 1000).unwrap();
    assert_eq!(r.emitted, 0);
    assert!(r.counts.values().all(|&c| c == 0));
}

#[test]
fn five_ion_target_rate() {
    let exp = Config::preset("ghz5_ideal").unwrap().run(None).unwrap().experiment;
    let out = run_pipeline(&exp).unwrap();
    let p: Vec<f64> = out.emission.per_ion.iter().map(|r| r.p_success).collect();
    assert_eq!(success_rate(5, &p).unwrap().per_target_state, 1.0 / 32.0);
    assert_eq!(out.table.rows.len(), 32);
}
