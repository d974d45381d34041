//! Oracles shared by the integration test targets.
#![allow(dead_code, clippy::needless_range_loop)]

use ion_photon::cavity::{CavitySetup, RamanChannel};
use ion_photon::protocol::OutcomeTable;
use num_complex::Complex64 as C64;

pub const OMEGA: f64 = 13.8e9;

/// `i dψ/dt = H ψ` on the basis `g′00, g10, e′00, e01` with
/// `H = [[0, Ω], [Ω, −iκ]]` in each two-state sector.
pub fn derivative(omega: f64, kappa: f64, psi: &[C64; 4]) -> [C64; 4] {
    let mi = C64::new(0.0, -1.0);
    let h = |a: C64, b: C64| (omega * b, omega * a + C64::new(0.0, -kappa) * b);
    let (g0, g1) = h(psi[0], psi[1]);
    let (e0, e1) = h(psi[2], psi[3]);
    [mi * g0, mi * g1, mi * e0, mi * e1]
}

pub fn rk4(omega: f64, kappa: f64, psi0: [C64; 4], t_end: f64, steps: usize) -> Vec<(f64, [C64; 4])> {
    let h = t_end / steps as f64;
    let mut psi = psi0;
    let mut out = vec![(0.0, psi)];
    let add = |a: &[C64; 4], b: &[C64; 4], s: f64| std::array::from_fn::<C64, 4, _>(|i| a[i] + b[i] * s);
    for k in 0..steps {
        let k1 = derivative(omega, kappa, &psi);
        let k2 = derivative(omega, kappa, &add(&psi, &k1, h / 2.0));
        let k3 = derivative(omega, kappa, &add(&psi, &k2, h / 2.0));
        let k4 = derivative(omega, kappa, &add(&psi, &k3, h));
        psi = std::array::from_fn(|i| psi[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0));
        out.push(((k + 1) as f64 * h, psi));
    }
    out
}

/// Setup whose effective Rabi frequency is exactly `omega`.
pub fn setup(omega: f64, kappa: f64) -> CavitySetup {
    let ch = RamanChannel::new(omega, 1.0, 1.0).unwrap();
    CavitySetup::new(ch, ch, kappa).unwrap()
}

pub fn p_closed_form(omega: f64, kappa: f64, t: f64) -> f64 {
    // |b(t)|² from the eigenvalues of [[0, Ω], [Ω, −iκ]]
    let w = C64::new(omega * omega - kappa * kappa / 4.0, 0.0).sqrt();
    let s = if w.norm() < 1e-300 { C64::new(t, 0.0) } else { (w * t).sin() / w };
    (-kappa * t).exp() * (omega * s).norm_sqr()
}

pub fn argmax_by_scan(omega: f64, kappa: f64, horizon: f64) -> f64 {
    let n = 20_000;
    let dt = horizon / n as f64;
    let best = (0..=n)
        .map(|k| (k, p_closed_form(omega, kappa, k as f64 * dt)))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
        .0;
    let (mut lo, mut hi) = ((best.max(1) - 1) as f64 * dt, (best + 1) as f64 * dt);
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - gr * (hi - lo);
        let b = lo + gr * (hi - lo);
        if p_closed_form(omega, kappa, a) > p_closed_form(omega, kappa, b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    0.5 * (lo + hi)
}


/// `(ions, [(sign, photons)...])` with every amplitude `sign/√2`.
pub type Expected = [(&'static str, [(f64, &'static str); 2])];

pub const BELL: &Expected = &[
    ("gg", [(1.0, "s+ s+"), (1.0, "s0 s0")]),
    ("ee", [(1.0, "s0 s+"), (-1.0, "s+ s0")]),
    ("eg", [(1.0, "s0 s0"), (-1.0, "s+ s+")]),
    ("ge", [(1.0, "s0 s+"), (1.0, "s+ s0")]),
];

pub const GHZ3: &Expected = &[
    ("ggg", [(1.0, "s+ s+ s+"), (1.0, "s0 s0 s0")]),
    ("egg", [(1.0, "s0 s0 s0"), (-1.0, "s+ s+ s+")]),
    ("gee", [(1.0, "s0 s+ s+"), (1.0, "s+ s0 s0")]),
    ("eee", [(1.0, "s0 s+ s+"), (-1.0, "s+ s0 s0")]),
    ("geg", [(1.0, "s+ s0 s+"), (1.0, "s0 s+ s0")]),
    ("eeg", [(1.0, "s0 s+ s0"), (-1.0, "s+ s0 s+")]),
    ("gge", [(1.0, "s0 s0 s+"), (1.0, "s+ s+ s0")]),
    ("ege", [(1.0, "s0 s0 s+"), (-1.0, "s+ s+ s0")]),
];

/// Largest amplitude error of `table` against `expected`, and whether every
/// row has exactly the two expected terms and probability `1/2^N` to `1e-12`.
pub fn table_error(table: &OutcomeTable, expected: &Expected) -> (f64, bool) {
    let n = table.ions;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut err: f64 = 0.0;
    let mut shape = table.rows.len() == 1 << n && expected.len() == 1 << n;
    for (ions, terms) in expected {
        let Some(row) = table.row(ions) else { return (f64::INFINITY, false) };
        shape &= row.terms.len() == 2 && (row.probability - 1.0 / (1 << n) as f64).abs() < 1e-12;
        for (sign, photons) in terms {
            err = err.max((row.amplitude(photons) - C64::new(sign * r, 0.0)).norm());
        }
    }
    (err, shape)
}
