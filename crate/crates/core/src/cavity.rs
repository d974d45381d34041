//! Raman photon emission of one ion in a leaky two-mode microcavity.
//!
//! Each ion has two independent Raman channels, `|g′⟩ → |g⟩` emitting into
//! the σ₀ cavity mode and `|e′⟩ → |e⟩` emitting into the σ₊ mode, both with
//! effective rate `Ω̃ = Ω h / δ`. Before a photon leaks, the no-jump evolution
//! follows the non-Hermitian Hamiltonian
//!
//! ```text
//! H = Ω̃ (c_g |g′⟩⟨g| + c_g† |g⟩⟨g′| + c_e |e′⟩⟨e| + c_e† |e⟩⟨e′|) − iκ (c_g†c_g + c_e†c_e)
//! ```
//!
//! which splits into two 2×2 sectors `{|g′,00⟩, |g,10⟩}` and
//! `{|e′,00⟩, |e,01⟩}`, each of the form `[[0, Ω̃], [Ω̃, −iκ]]`. With
//! `Ω̃′ = sqrt(Ω̃² − κ²/4)` the propagator is
//! `e^{−κt/2} [cos(Ω̃′t) − i sin(Ω̃′t)/Ω̃′ · (H + iκ/2)]`, continued to
//! `cosh`/`sinh` when `κ > 2Ω̃`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::constants::{MICROMETRE, MRAD_PER_S};

#[derive(Debug, Error)]
pub enum CavityError {
    #[error("Raman detuning must be non-zero")]
    ZeroDetuning,
    #[error("effective Rabi frequency must be positive, got {0:e} rad/s")]
    NonPositiveRabi(f64),
    #[error("invalid cavity input: {0}")]
    InvalidInput(String),
}

type Result<T> = std::result::Result<T, CavityError>;

/// One laser + cavity-mode Raman channel, all angular frequencies in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RamanChannel {
    pub omega_laser: f64,
    pub g_cav: f64,
    pub detuning: f64,
}

impl RamanChannel {
    pub fn new(omega_laser: f64, g_cav: f64, detuning: f64) -> Result<Self> {
        if detuning == 0.0 {
            return Err(CavityError::ZeroDetuning);
        }
        if !(omega_laser >= 0.0 && g_cav >= 0.0) || !omega_laser.is_finite() || !g_cav.is_finite() || !detuning.is_finite() {
            return Err(CavityError::InvalidInput(format!(
                "channel couplings must be finite and >= 0 (omega {omega_laser:e}, g {g_cav:e}, delta {detuning:e})"
            )));
        }
        Ok(Self { omega_laser, g_cav, detuning })
    }
}

/// `Ω̃ = Ω h / δ`.
pub fn effective_rabi(ch: &RamanChannel) -> Result<f64> {
    if ch.detuning == 0.0 {
        return Err(CavityError::ZeroDetuning);
    }
    let r = ch.omega_laser * ch.g_cav / ch.detuning;
    if !r.is_finite() {
        return Err(CavityError::InvalidInput("effective Rabi frequency is not finite".into()));
    }
    Ok(r)
}

/// Relative tolerance on the two channels' effective rates.
pub const RABI_MATCH_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CavitySetup {
    pub channel_g: RamanChannel,
    pub channel_e: RamanChannel,
    /// Field decay rate of both cavity modes, rad/s.
    pub kappa: f64,
    /// Cavity size in m, only used for scaling studies.
    pub radius: Option<f64>,
}

impl CavitySetup {
    pub fn new(channel_g: RamanChannel, channel_e: RamanChannel, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(CavityError::InvalidInput(format!("cavity decay rate must be >= 0, got {kappa:e}")));
        }
        Ok(Self { channel_g, channel_e, kappa, radius: None })
    }

    /// Both channels driven identically.
    pub fn symmetric(omega_laser: f64, g_cav: f64, detuning: f64, kappa: f64) -> Result<Self> {
        let ch = RamanChannel::new(omega_laser, g_cav, detuning)?;
        Self::new(ch, ch, kappa)
    }

    /// Effective Rabi frequency used for both channels. Mismatched channels
    /// are replaced by their mean, and `mismatch` is set.
    pub fn effective_rabi(&self) -> Result<RabiRate> {
        let g = effective_rabi(&self.channel_g)?;
        let e = effective_rabi(&self.channel_e)?;
        let mean = 0.5 * (g + e);
        let mismatch = (g - e).abs() > RABI_MATCH_TOLERANCE * g.abs().max(e.abs());
        Ok(RabiRate { value: mean, mismatch })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RabiRate {
    pub value: f64,
    pub mismatch: bool,
}

/// Amplitudes over `{|g′,00⟩, |g,10⟩, |e′,00⟩, |e,01⟩}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourLevelAmplitudes(pub [C64; 4]);

impl FourLevelAmplitudes {
    pub const G_AUX: usize = 0;
    pub const G_PHOTON: usize = 1;
    pub const E_AUX: usize = 2;
    pub const E_PHOTON: usize = 3;

    /// `(|g′⟩ + |e′⟩)/√2 ⊗ |00⟩`.
    pub fn initial() -> Self {
        let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self([r, C64::new(0.0, 0.0), r, C64::new(0.0, 0.0)])
    }

    pub fn basis(index: usize) -> Self {
        let mut a = [C64::new(0.0, 0.0); 4];
        a[index] = C64::new(1.0, 0.0);
        Self(a)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Weight on the two one-photon states.
    pub fn photon_weight(&self) -> f64 {
        self.0[Self::G_PHOTON].norm_sqr() + self.0[Self::E_PHOTON].norm_sqr()
    }
}

/// `(cos(Ω̃′t), sin(Ω̃′t)/Ω̃′)` for `Ω̃′² = w2` of either sign, with a series
/// near `w2 = 0`.
fn oscillation_terms(w2: f64, t: f64) -> (f64, f64) {
    let x = w2 * t * t;
    if x.abs() < 1e-6 {
        let c = 1.0 - x / 2.0 + x * x / 24.0;
        let s = t * (1.0 - x / 6.0 + x * x / 120.0);
        (c, s)
    } else if w2 > 0.0 {
        let w = w2.sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    } else {
        let g = (-w2).sqrt();
        ((g * t).cosh(), (g * t).sinh() / g)
    }
}

/// Propagates one 2×2 sector `(aux, photon)`.
fn evolve_sector(omega: f64, kappa: f64, aux: C64, photon: C64, t: f64) -> (C64, C64) {
    let w2 = omega * omega - 0.25 * kappa * kappa;
    let (c, s) = oscillation_terms(w2, t);
    let damp = (-0.5 * kappa * t).exp();
    let mi = C64::new(0.0, -1.0);
    let a = (aux * (c + 0.5 * kappa * s) + mi * omega * s * photon) * damp;
    let b = (mi * omega * s * aux + photon * (c - 0.5 * kappa * s)) * damp;
    (a, b)
}

/// No-jump evolution for time `t` (s).
pub fn evolve_conditional(setup: &CavitySetup, state: &FourLevelAmplitudes, t: f64) -> Result<FourLevelAmplitudes> {
    if !(t >= 0.0) {
        return Err(CavityError::InvalidInput(format!("evolution time must be >= 0, got {t:e}")));
    }
    let g = effective_rabi(&setup.channel_g)?;
    let e = effective_rabi(&setup.channel_e)?;
    let rabi = setup.effective_rabi()?;
    let (g, e) = if rabi.mismatch { (rabi.value, rabi.value) } else { (g, e) };
    let s = &state.0;
    let (ga, gp) = evolve_sector(g, setup.kappa, s[0], s[1], t);
    let (ea, ep) = evolve_sector(e, setup.kappa, s[2], s[3], t);
    Ok(FourLevelAmplitudes([ga, gp, ea, ep]))
}

/// Time of the first maximum of the emission probability,
/// `tan(Ω̃′τ) = 2Ω̃′/κ`, or `tanh(|Ω̃′|τ) = 2|Ω̃′|/κ` when overdamped.
pub fn optimal_emission_time(omega_eff: f64, kappa: f64) -> Result<f64> {
    if !(omega_eff > 0.0) || !omega_eff.is_finite() {
        return Err(CavityError::NonPositiveRabi(omega_eff));
    }
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(CavityError::InvalidInput(format!("cavity decay rate must be >= 0, got {kappa:e}")));
    }
    let w2 = omega_eff * omega_eff - 0.25 * kappa * kappa;
    // x = 2Ω̃′/κ; τ = (2/κ) atan(x)/x, or atanh for imaginary Ω̃′
    if kappa > 0.0 {
        let x2 = 4.0 * w2 / (kappa * kappa);
        if x2.abs() < 1e-8 {
            // atan(x)/x and atanh(x)/x share the series 1 − x²/3 + x⁴/5 in x²
            return Ok(2.0 / kappa * (1.0 - x2 / 3.0 + x2 * x2 / 5.0));
        }
    }
    if w2 > 0.0 {
        let w = w2.sqrt();
        Ok((2.0 * w).atan2(kappa) / w)
    } else {
        let g = (-w2).sqrt();
        Ok((2.0 * g / kappa).atanh() / g)
    }
}

/// `P = e^{−κτ} sin²(Ω̃′τ) (Ω̃/Ω̃′)²` with the hyperbolic continuation.
pub fn success_probability(omega_eff: f64, kappa: f64, tau: f64) -> f64 {
    let w2 = omega_eff * omega_eff - 0.25 * kappa * kappa;
    let (_, s) = oscillation_terms(w2, tau);
    let p = (-kappa * tau).exp() * (omega_eff * s).powi(2);
    debug_assert!((0.0..=1.0 + 1e-12).contains(&p), "success probability {p} out of range");
    p
}

/// Emission probability at `τ*`. The optimality condition makes
/// `sin²(Ω̃′τ*)(Ω̃/Ω̃′)² = 1`, so this is `e^{−κτ*}`, exactly 1 when `κ = 0`.
pub fn optimal_success_probability(omega_eff: f64, kappa: f64) -> Result<f64> {
    let tau = optimal_emission_time(omega_eff, kappa)?;
    Ok((-kappa * tau).exp())
}

/// Normalised spin-photon branch `c_g |g⟩|10⟩ + c_e |e⟩|01⟩` after emission,
/// with the global phase chosen so that `c_g` is real and non-negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalState {
    pub amp_g: C64,
    pub amp_e: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmissionResult {
    pub omega_eff: f64,
    pub tau_star: f64,
    pub p_success: f64,
    pub conditional_state: ConditionalState,
    pub rabi_mismatch: bool,
}

/// Runs one ion's emission from the standard initial state to `τ*`.
pub fn emit(setup: &CavitySetup) -> Result<EmissionResult> {
    let rabi = setup.effective_rabi()?;
    let tau_star = optimal_emission_time(rabi.value, setup.kappa)?;
    let mut out = emit_at(setup, tau_star)?;
    out.p_success = optimal_success_probability(rabi.value, setup.kappa)?;
    Ok(out)
}

/// Same as [`emit`] but stopping at an arbitrary time.
pub fn emit_at(setup: &CavitySetup, tau: f64) -> Result<EmissionResult> {
    let rabi = setup.effective_rabi()?;
    let out = evolve_conditional(setup, &FourLevelAmplitudes::initial(), tau)?;
    let p_success = out.photon_weight();
    let conditional_state = if p_success > 0.0 {
        let norm = p_success.sqrt();
        let g = out.0[FourLevelAmplitudes::G_PHOTON];
        let phase = if g.norm() > 0.0 { g.conj() / g.norm() } else { C64::new(1.0, 0.0) };
        ConditionalState {
            amp_g: g * phase / norm,
            amp_e: out.0[FourLevelAmplitudes::E_PHOTON] * phase / norm,
        }
    } else {
        let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        ConditionalState { amp_g: r, amp_e: r }
    };
    Ok(EmissionResult { omega_eff: rabi.value, tau_star: tau, p_success, conditional_state, rabi_mismatch: rabi.mismatch })
}

/// Power-law scaling of cavity coupling and decay with cavity size:
/// `h ∝ R^{−3/4}` and `κ ∝ 1/R` at fixed mirror losses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CavityScaling {
    pub anchor_radius: f64,
    pub anchor_g: f64,
    pub anchor_kappa: f64,
}

impl Default for CavityScaling {
    /// 10 μm cavity with h = 138.4 and κ = 960 (10⁶ rad/s).
    fn default() -> Self {
        Self { anchor_radius: 10.0 * MICROMETRE, anchor_g: 138.4 * MRAD_PER_S, anchor_kappa: 960.0 * MRAD_PER_S }
    }
}

impl CavityScaling {
    /// Returns `(h, κ)` in rad/s for a cavity of size `radius` (m).
    pub fn scale(&self, radius: f64) -> Result<(f64, f64)> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(CavityError::InvalidInput(format!("cavity size must be > 0, got {radius:e}")));
        }
        let ratio = radius / self.anchor_radius;
        Ok((self.anchor_g * ratio.powf(-0.75), self.anchor_kappa / ratio))
    }
}

/// Laser and cavity couplings shared by every point of a success-rate sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepTemplate {
    pub omega_laser: f64,
    pub g_cav: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub kappa_rad_s: f64,
    pub delta_rad_s: f64,
    pub tau_star_s: f64,
    pub p_single: f64,
    pub p_pair: f64,
}

/// Two identical cavities swept over κ for each detuning. Rows come out with
/// δ as the outer loop (in the given order) and κ ascending inside.
pub fn fig2_sweep(template: &SweepTemplate, kappas: &[f64], deltas: &[f64]) -> Result<Vec<SweepPoint>> {
    if kappas.is_empty() || deltas.is_empty() {
        return Err(CavityError::InvalidInput("sweep ranges must be non-empty".into()));
    }
    let mut kappas = kappas.to_vec();
    kappas.sort_by(f64::total_cmp);
    let grid: Vec<(f64, f64)> = deltas.iter().flat_map(|&d| kappas.iter().map(move |&k| (d, k))).collect();
    grid.par_iter()
        .map(|&(delta, kappa)| {
            let setup = CavitySetup::symmetric(template.omega_laser, template.g_cav, delta, kappa)?;
            let rabi = setup.effective_rabi()?.value;
            let tau = optimal_emission_time(rabi, kappa)?;
            let p = (-kappa * tau).exp();
            Ok(SweepPoint { kappa_rad_s: kappa, delta_rad_s: delta, tau_star_s: tau, p_single: p, p_pair: p * p })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    const M: f64 = MRAD_PER_S;

    #[test]
    fn effective_rabi_values() {
        let ch = RamanChannel::new(10.0 * M, 138.0 * M, 0.1 * M).unwrap();
        assert!((effective_rabi(&ch).unwrap() / (13800.0 * M) - 1.0).abs() < 1e-15);
        let zero = RamanChannel::new(0.0, 138.0 * M, 0.1 * M).unwrap();
        assert_eq!(effective_rabi(&zero).unwrap(), 0.0);
        let doubled = RamanChannel::new(10.0 * M, 138.0 * M, 0.2 * M).unwrap();
        assert!((effective_rabi(&doubled).unwrap() * 2.0 / effective_rabi(&ch).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(RamanChannel::new(1.0, 1.0, 0.0), Err(CavityError::ZeroDetuning)));
        let raw = RamanChannel { omega_laser: 1.0, g_cav: 1.0, detuning: 0.0 };
        assert!(matches!(effective_rabi(&raw), Err(CavityError::ZeroDetuning)));
    }

    #[test]
    fn lossless_half_oscillation_transfers_population() {
        let setup = CavitySetup::symmetric(1.0, 2.0, 1.0, 0.0).unwrap();
        let t = PI / (2.0 * 2.0);
        let out = evolve_conditional(&setup, &FourLevelAmplitudes::basis(0), t).unwrap();
        assert!((out.0[1].norm() - 1.0).abs() < 1e-14);
        assert!(out.0[0].norm() < 1e-14);
        assert_eq!(out.0[2], C64::new(0.0, 0.0));
        assert_eq!(out.0[3], C64::new(0.0, 0.0));
    }

    #[test]
    fn zero_time_is_identity() {
        let setup = CavitySetup::symmetric(1.0, 2.0, 1.0, 0.7).unwrap();
        let s = FourLevelAmplitudes([C64::new(0.3, 0.1), C64::new(0.2, -0.4), C64::new(0.5, 0.0), C64::new(0.0, 0.1)]);
        assert_eq!(evolve_conditional(&setup, &s, 0.0).unwrap(), s);
        assert!(evolve_conditional(&setup, &s, -1.0).is_err());
    }

    #[test]
    fn optimal_time_limits() {
        assert!((optimal_emission_time(3.0, 0.0).unwrap() - FRAC_PI_2 / 3.0).abs() < 1e-16);
        assert!(optimal_emission_time(0.0, 1.0).is_err());
        assert!(optimal_emission_time(-1.0, 1.0).is_err());
        // critical damping: P = e^{−κt} Ω̃² t², maximal at t = 2/κ
        let tau = optimal_emission_time(1.0, 2.0).unwrap();
        assert!((tau - 1.0).abs() < 1e-12);
        // continuity across the critical point
        let below = optimal_emission_time(1.0, 2.0 - 1e-7).unwrap();
        let above = optimal_emission_time(1.0, 2.0 + 1e-7).unwrap();
        assert!((below - above).abs() < 1e-6);
    }

    #[test]
    fn success_probability_values() {
        assert_eq!(success_probability(2.0, 0.0, FRAC_PI_2 / 2.0), 1.0);
        assert_eq!(success_probability(2.0, 0.3, 0.0), 0.0);
        let omega = 13800.0 * M;
        let kappa = 960.0 * M;
        let tau = optimal_emission_time(omega, kappa).unwrap();
        assert!((tau / 1.114e-10 - 1.0).abs() < 1e-3, "{tau}");
        let p = success_probability(omega, kappa, tau);
        assert!((p - 0.899).abs() < 5e-4, "{p}");
        assert!((p * p - 0.81).abs() < 5e-3);
        for f in [1.0 - 1e-3, 1.0 + 1e-3] {
            assert!(success_probability(omega, kappa, tau * f) <= p);
        }
    }

    #[test]
    fn optimum_probability_is_decay_envelope() {
        assert_eq!(optimal_success_probability(13.8e9, 0.0).unwrap(), 1.0);
        for ratio in [1e-3, 0.1, 1.0, 1.999, 2.0, 2.001, 3.0, 10.0] {
            let omega = 1.0e6;
            let kappa = ratio * omega;
            let tau = optimal_emission_time(omega, kappa).unwrap();
            let p = optimal_success_probability(omega, kappa).unwrap();
            assert!((p - success_probability(omega, kappa, tau)).abs() < 1e-12, "ratio {ratio}");
        }
    }

    #[test]
    fn emission_result_is_normalised_bell_branch() {
        let setup = CavitySetup::symmetric(10.0 * M, 138.0 * M, 0.1 * M, 960.0 * M).unwrap();
        let r = emit(&setup).unwrap();
        let cs = r.conditional_state;
        assert!((cs.amp_g.norm_sqr() + cs.amp_e.norm_sqr() - 1.0).abs() < 1e-14);
        assert!((cs.amp_g - cs.amp_e).norm() < 1e-14);
        assert!(cs.amp_g.im == 0.0 && cs.amp_g.re > 0.0);
        assert!((r.p_success - success_probability(r.omega_eff, 960.0 * M, r.tau_star)).abs() < 1e-12);
    }

    #[test]
    fn mismatched_channels_use_mean() {
        let g = RamanChannel::new(1.0, 2.0, 1.0).unwrap();
        let e = RamanChannel::new(1.0, 4.0, 1.0).unwrap();
        let setup = CavitySetup::new(g, e, 0.1).unwrap();
        let rabi = setup.effective_rabi().unwrap();
        assert!(rabi.mismatch);
        assert_eq!(rabi.value, 3.0);
        assert!(emit(&setup).unwrap().rabi_mismatch);
    }

    #[test]
    fn cavity_scaling() {
        let sc = CavityScaling::default();
        let (h, k) = sc.scale(10e-6).unwrap();
        assert!((h / (138.4 * M) - 1.0).abs() < 1e-14);
        assert!((k / (960.0 * M) - 1.0).abs() < 1e-14);
        let (h, k) = sc.scale(160e-6).unwrap();
        assert!((h / (17.3 * M) - 1.0).abs() < 1e-12);
        assert!((k / (60.0 * M) - 1.0).abs() < 1e-12);
        assert!(sc.scale(0.0).is_err());
    }

    #[test]
    fn sweep_rows_and_kappa_zero() {
        let t = SweepTemplate { omega_laser: 10.0 * M, g_cav: 138.0 * M };
        let rows = fig2_sweep(&t, &[1e8, 0.0], &[0.1 * M, 1.0 * M]).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].kappa_rad_s, 0.0);
        assert_eq!(rows[0].p_pair, 1.0);
        assert_eq!(rows[2].delta_rad_s, 1.0 * M);
        assert!(fig2_sweep(&t, &[], &[1.0]).is_err());
    }
}
