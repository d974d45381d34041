//! End-to-end N-ion protocol: preparation, cavity emission, entangling
//! CNOTs, ion measurement and the resulting photon-state table.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cavity::{self, CavitySetup, EmissionResult, FourLevelAmplitudes};
use crate::crystal::{CouplingMatrix, CrystalAnalysis, FieldGradient, IonSpecies, TrapArray};
use crate::gates::{self, CnotConvention, GateMatrix, PulseSequence, SpinLevel, SpinPhotonState, MAX_IONS};
use crate::{Error, Result};

/// Everything needed for one protocol run.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub traps: TrapArray,
    pub gradient: FieldGradient,
    pub species: IonSpecies,
    /// One cavity per ion.
    pub cavities: Vec<CavitySetup>,
    pub convention: CnotConvention,
    pub seed: u64,
    /// Duration of one CNOT; derived from the couplings when `None`.
    pub t0: Option<f64>,
    /// Hadamard plus fluorescence detection time.
    pub t1: f64,
    /// Duration of a π rotation, used for the pulse overhead of each CNOT.
    pub pi_pulse: f64,
    /// Per-photon collection efficiency, 1 for ideal collection.
    pub collection_efficiency: f64,
}

impl ExperimentConfig {
    pub fn ion_count(&self) -> usize {
        self.traps.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ion_count();
        if !(2..=MAX_IONS).contains(&n) {
            return Err(Error::Protocol(format!("ion count must be between 2 and {MAX_IONS}, got {n}")));
        }
        if self.cavities.len() != n {
            return Err(Error::Protocol(format!("{} cavity setups for {n} ions", self.cavities.len())));
        }
        if !(0.0..=1.0).contains(&self.collection_efficiency) {
            return Err(Error::Protocol(format!(
                "collection efficiency must lie in [0, 1], got {}",
                self.collection_efficiency
            )));
        }
        for (name, v) in [("t1", self.t1), ("pi_pulse", self.pi_pulse)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Protocol(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if let Some(t0) = self.t0 {
            if !(t0 >= 0.0) || !t0.is_finite() {
                return Err(Error::Protocol(format!("t0 must be finite and >= 0, got {t0}")));
            }
        }
        Ok(())
    }

    pub fn couplings(&self) -> Result<CouplingMatrix> {
        Ok(CrystalAnalysis::compute(&self.traps, &self.gradient, &self.species)?.couplings)
    }
}

/// Per-ion auxiliary superposition with empty cavities, before emission.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialState {
    pub sites: Vec<FourLevelAmplitudes>,
}

impl InitialState {
    /// Amplitude of the product state on one auxiliary-basis configuration;
    /// `true` selects `|e′⟩`, `false` selects `|g′⟩`.
    pub fn auxiliary_amplitude(&self, levels: &[bool]) -> C64 {
        self.sites
            .iter()
            .zip(levels)
            .map(|(s, &e)| s.0[if e { FourLevelAmplitudes::E_AUX } else { FourLevelAmplitudes::G_AUX }])
            .product()
    }
}

pub fn prepare_initial(ions: usize) -> InitialState {
    InitialState { sites: vec![FourLevelAmplitudes::initial(); ions] }
}

#[derive(Clone, Debug)]
pub struct EmissionStage {
    pub state: SpinPhotonState,
    pub per_ion: Vec<EmissionResult>,
    pub total_probability: f64,
}

/// Runs every ion's cavity emission to its optimal time and returns the
/// spin-photon state conditioned on all ions having emitted, with each
/// cavity photon relabelled as a free polarisation qubit.
pub fn emission_stage(cavities: &[CavitySetup]) -> Result<EmissionStage> {
    let per_ion = cavities.iter().map(cavity::emit).collect::<std::result::Result<Vec<_>, _>>()?;
    let zero = C64::new(0.0, 0.0);
    let sites: Vec<[C64; 4]> = per_ion
        .iter()
        .map(|r| {
            // index = spin_bit << 1 | photon_bit; |g⟩|σ₀⟩ = 0b11, |e⟩|σ₊⟩ = 0b00
            let mut site = [zero; 4];
            site[0b11] = r.conditional_state.amp_g;
            site[0b00] = r.conditional_state.amp_e;
            site
        })
        .collect();
    let state = SpinPhotonState::from_sites(&sites)?;
    let total_probability = per_ion.iter().map(|r| r.p_success).product();
    Ok(EmissionStage { state, per_ion, total_probability })
}

/// The compiled pulse program of the entangling stage: CNOT from ion 0 to
/// each other ion in turn. The final Hadamard on ion 0 is applied separately.
pub fn entangling_sequences(couplings: &CouplingMatrix, convention: CnotConvention) -> Result<Vec<PulseSequence>> {
    (1..couplings.dim())
        .map(|k| Ok(gates::cnot_sequence(couplings, 0, k, convention)?))
        .collect()
}

/// CNOT_{1k} for k = 2..N through compiled pulses under the full coupling
/// matrix, then the Hadamard on ion 1.
pub fn entangle_stage(state: &SpinPhotonState, couplings: &CouplingMatrix, convention: CnotConvention) -> Result<SpinPhotonState> {
    let mut s = state.clone();
    for seq in entangling_sequences(couplings, convention)? {
        seq.apply(&mut s, couplings)?;
    }
    s.apply_hadamard(0)?;
    Ok(s)
}

/// Same as [`entangle_stage`] with ideal gate matrices in place of pulses.
pub fn entangle_stage_ideal(state: &SpinPhotonState, convention: CnotConvention) -> Result<SpinPhotonState> {
    let n = state.ion_count();
    let mut s = state.clone();
    for k in 1..n {
        s.apply_ion_unitary(&gates::controlled_x(n, 0, k, convention.active_level()))?;
    }
    s.apply_hadamard(0)?;
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhotonTerm {
    /// e.g. `"s0 s+"`
    pub photons: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeRow {
    /// Ion measurement result over `{g, e}`, ion 1 first.
    pub ions: String,
    pub probability: f64,
    /// Normalised photon state, e.g. `(+|s0 s+> - |s+ s0>)/sqrt2`.
    pub photon_state: String,
    pub terms: Vec<PhotonTerm>,
}

impl OutcomeRow {
    pub fn amplitude(&self, photons: &str) -> C64 {
        self.terms
            .iter()
            .find(|t| t.photons == photons)
            .map(|t| C64::new(t.re, t.im))
            .unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeTable {
    pub ions: usize,
    pub rows: Vec<OutcomeRow>,
}

impl OutcomeTable {
    pub fn row(&self, ions: &str) -> Option<&OutcomeRow> {
        self.rows.iter().find(|r| r.ions == ions)
    }

    /// Photon state of each row as a dense vector over `2^N` photon indices.
    pub fn photon_vectors(&self) -> Vec<Vec<C64>> {
        let n = self.ions;
        self.rows
            .iter()
            .map(|r| {
                let mut v = vec![C64::new(0.0, 0.0); 1 << n];
                for t in &r.terms {
                    v[photon_index(&t.photons)] = C64::new(t.re, t.im);
                }
                v
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("ions,probability,photon_state\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.ions, crate::format::num(r.probability), r.photon_state));
        }
        out
    }
}

fn photon_label(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| gates::Polarization::from_bit(index >> (n - 1 - q)).label())
        .collect::<Vec<_>>()
        .join(" ")
}

fn photon_index(label: &str) -> usize {
    label
        .split_whitespace()
        .fold(0, |acc, p| (acc << 1) | usize::from(p == "s0"))
}

fn ion_label(index: usize, n: usize) -> String {
    (0..n).map(|q| SpinLevel::from_bit(index >> (n - 1 - q)).label()).collect()
}

const AMP_EPS: f64 = 1e-12;

fn render_photon_state(terms: &[PhotonTerm]) -> String {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let simple = terms.len() == 2 && terms.iter().all(|t| t.im.abs() < 1e-9 && (t.re.abs() - r).abs() < 1e-9);
    if simple {
        let parts: Vec<String> = terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let sign = if t.re > 0.0 { "+" } else { "-" };
                if i == 0 {
                    format!("{sign}|{}>", t.photons)
                } else {
                    format!(" {sign} |{}>", t.photons)
                }
            })
            .collect();
        return format!("({})/sqrt2", parts.concat());
    }
    terms
        .iter()
        .map(|t| format!("({}{:+}i)|{}>", crate::format::num(t.re), t.im, t.photons))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Projects the ions onto every basis string and records the normalised
/// photon remainder and its probability.
pub fn outcome_table(state: &SpinPhotonState) -> OutcomeTable {
    let n = state.ion_count();
    let mut branches: Vec<Vec<(usize, C64)>> = vec![Vec::new(); 1 << n];
    for (idx, &a) in state.amplitudes().iter().enumerate() {
        if a.norm() > AMP_EPS {
            branches[state.spin_index(idx)].push((state.photon_index(idx), a));
        }
    }
    let rows = branches
        .into_iter()
        .enumerate()
        .map(|(spin, branch)| {
            let probability: f64 = branch.iter().map(|(_, a)| a.norm_sqr()).sum();
            let norm = probability.sqrt();
            let mut terms: Vec<PhotonTerm> = branch
                .iter()
                .map(|&(p, a)| {
                    let a = if norm > 0.0 { a / norm } else { a };
                    PhotonTerm { photons: photon_label(p, n), re: a.re, im: a.im }
                })
                .collect();
            // positive real terms first, then basis order
            terms.sort_by_key(|t| (t.re <= 0.0, photon_index(&t.photons)));
            let photon_state = render_photon_state(&terms);
            OutcomeRow { ions: ion_label(spin, n), probability, photon_state, terms }
        })
        .collect();
    OutcomeTable { ions: n, rows }
}

/// `(N − 1) t₀ + t₁`.
pub fn timing_estimate(ions: usize, t0: f64, t1: f64) -> Result<f64> {
    if ions < 2 {
        return Err(Error::Protocol(format!("timing needs at least 2 ions, got {ions}")));
    }
    if !(t0 >= 0.0 && t1 >= 0.0) {
        return Err(Error::Protocol("t0 and t1 must be >= 0".into()));
    }
    Ok((ions - 1) as f64 * t0 + t1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuccessRate {
    /// Probability of ending with one particular photon state.
    pub per_target_state: f64,
    /// Probability of ending with some entangled photon state.
    pub any_state: f64,
}

pub fn success_rate(ions: usize, probabilities: &[f64]) -> Result<SuccessRate> {
    if probabilities.len() != ions {
        return Err(Error::Protocol(format!("{} emission probabilities for {ions} ions", probabilities.len())));
    }
    if let Some(p) = probabilities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Protocol(format!("emission probability {p} outside [0, 1]")));
    }
    let any_state: f64 = probabilities.iter().product();
    Ok(SuccessRate { per_target_state: any_state / (1u64 << ions) as f64, any_state })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimingReport {
    /// Slowest CNOT's free-evolution time.
    pub t0_no_overhead_s: f64,
    /// Ratio of CNOT time with rotation pulses to free-evolution time.
    pub echo_overhead_factor: f64,
    pub t0_with_overhead_s: f64,
    pub t1_s: f64,
    pub total_no_overhead_s: f64,
    pub total_with_overhead_s: f64,
}

/// Timing for the configured run. A user-supplied `t0` replaces the derived
/// CNOT time in both totals.
pub fn timing_report(cfg: &ExperimentConfig, couplings: &CouplingMatrix) -> Result<TimingReport> {
    let n = cfg.ion_count();
    let seqs = entangling_sequences(couplings, cfg.convention)?;
    let bare = seqs.iter().map(|s| s.total_duration()).fold(0.0, f64::max);
    let dressed = seqs.iter().map(|s| s.duration_with_pulses(cfg.pi_pulse)).fold(0.0, f64::max);
    let factor = if bare > 0.0 { dressed / bare } else { 1.0 };
    let (t0_bare, t0_dressed) = match cfg.t0 {
        Some(t0) => (t0, t0 * factor),
        None => (bare, dressed),
    };
    Ok(TimingReport {
        t0_no_overhead_s: t0_bare,
        echo_overhead_factor: factor,
        t0_with_overhead_s: t0_dressed,
        t1_s: cfg.t1,
        total_no_overhead_s: timing_estimate(n, t0_bare, cfg.t1)?,
        total_with_overhead_s: timing_estimate(n, t0_dressed, cfg.t1)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub ions: usize,
    pub seed: u64,
    pub trials: u64,
    pub per_ion_p: Vec<f64>,
    pub total_emission_p: f64,
    pub collection_efficiency: f64,
    pub emitted: u64,
    pub counts: BTreeMap<String, u64>,
    pub frequencies: BTreeMap<String, f64>,
    /// Every outcome count within 3σ of its binomial expectation.
    pub within_3sigma: bool,
    pub success: SuccessRate,
    pub timing: TimingReport,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ions,count,frequency\n");
        for (k, c) in &self.counts {
            out.push_str(&format!("{k},{c},{}\n", crate::format::num(self.frequencies[k])));
        }
        out
    }
}

/// Full pipeline state after emission and entangling, plus its table.
#[derive(Clone, Debug)]
pub struct ProtocolOutput {
    pub couplings: CouplingMatrix,
    pub emission: EmissionStage,
    pub entangled: SpinPhotonState,
    pub table: OutcomeTable,
}

pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<ProtocolOutput> {
    cfg.validate()?;
    let couplings = cfg.couplings()?;
    let emission = emission_stage(&cfg.cavities)?;
    let entangled = entangle_stage(&emission.state, &couplings, cfg.convention)?;
    let table = outcome_table(&entangled);
    Ok(ProtocolOutput { couplings, emission, entangled, table })
}

/// Random substream for one trial: ChaCha8 keyed by the seed, stream number
/// equal to the trial index.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Outcome of one trial: `None` if emission failed, else the row index.
fn sample_trial(seed: u64, trial: u64, p_emit: f64, cumulative: &[f64]) -> Option<usize> {
    let mut rng = trial_rng(seed, trial);
    if rng.random::<f64>() >= p_emit {
        return None;
    }
    let u: f64 = rng.random();
    Some(cumulative.iter().position(|&c| u < c).unwrap_or(cumulative.len() - 1))
}

fn assemble_report(
    cfg: &ExperimentConfig,
    out: &ProtocolOutput,
    trials: u64,
    outcomes: &[Option<usize>],
) -> Result<RunReport> {
    let n = cfg.ion_count();
    let per_ion_p: Vec<f64> = out.emission.per_ion.iter().map(|r| r.p_success).collect();
    let mut counts: BTreeMap<String, u64> = out.table.rows.iter().map(|r| (r.ions.clone(), 0)).collect();
    let mut emitted = 0u64;
    for o in outcomes.iter().flatten() {
        *counts.get_mut(&out.table.rows[*o].ions).expect("row exists") += 1;
        emitted += 1;
    }
    let frequencies = counts
        .iter()
        .map(|(k, &c)| (k.clone(), if emitted > 0 { c as f64 / emitted as f64 } else { 0.0 }))
        .collect();
    let within_3sigma = out.table.rows.iter().all(|r| {
        let e = emitted as f64 * r.probability;
        let sd = (emitted as f64 * r.probability * (1.0 - r.probability)).sqrt();
        (counts[&r.ions] as f64 - e).abs() <= 3.0 * sd + 1e-9
    });
    let emit_p: Vec<f64> = per_ion_p.iter().map(|p| p * cfg.collection_efficiency).collect();
    let success = success_rate(n, &emit_p)?;
    let timing = timing_report(cfg, &out.couplings)?;
    let mut notes = Vec::new();
    if cfg.t1 == 0.0 {
        notes.push("t1 (Hadamard + detection time) not supplied; taken as 0".to_string());
    }
    if cfg.pi_pulse == 0.0 {
        notes.push("rotation pulses treated as instantaneous".to_string());
    }
    if out.emission.per_ion.iter().any(|r| r.rabi_mismatch) {
        notes.push("effective Rabi frequencies of the two Raman channels differ; their mean was used".to_string());
    }
    Ok(RunReport {
        ions: n,
        seed: cfg.seed,
        trials,
        total_emission_p: per_ion_p.iter().product(),
        per_ion_p,
        collection_efficiency: cfg.collection_efficiency,
        emitted,
        counts,
        frequencies,
        within_3sigma,
        success,
        timing,
        notes,
    })
}

fn sampling_inputs(cfg: &ExperimentConfig, out: &ProtocolOutput) -> (f64, Vec<f64>) {
    let n = cfg.ion_count() as i32;
    let p_emit = out.emission.total_probability * cfg.collection_efficiency.powi(n);
    let cumulative = out
        .table
        .rows
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r.probability;
            Some(*acc)
        })
        .collect();
    (p_emit, cumulative)
}

/// Monte Carlo over `trials` independent attempts, evaluated serially.
pub fn sample_run(cfg: &ExperimentConfig, trials: u64) -> Result<RunReport> {
    if trials == 0 {
        return Err(Error::Protocol("trial count must be >= 1".into()));
    }
    let out = run_pipeline(cfg)?;
    let (p_emit, cumulative) = sampling_inputs(cfg, &out);
    let outcomes: Vec<Option<usize>> = (0..trials).map(|t| sample_trial(cfg.seed, t, p_emit, &cumulative)).collect();
    assemble_report(cfg, &out, trials, &outcomes)
}

/// Same as [`sample_run`] with trials spread over the rayon pool; the report
/// is bit-identical to the serial one.
pub fn sample_run_parallel(cfg: &ExperimentConfig, trials: u64) -> Result<RunReport> {
    if trials == 0 {
        return Err(Error::Protocol("trial count must be >= 1".into()));
    }
    let out = run_pipeline(cfg)?;
    let (p_emit, cumulative) = sampling_inputs(cfg, &out);
    let outcomes: Vec<Option<usize>> = (0..trials)
        .into_par_iter()
        .map(|t| sample_trial(cfg.seed, t, p_emit, &cumulative))
        .collect();
    assemble_report(cfg, &out, trials, &outcomes)
}

/// Unitary of the entangling stage's pulse program on the spin register.
pub fn entangling_unitary(couplings: &CouplingMatrix, convention: CnotConvention) -> Result<GateMatrix> {
    let n = couplings.dim();
    let mut u = GateMatrix::identity(1 << n);
    for seq in entangling_sequences(couplings, convention)? {
        u = gates::sequence_unitary(&seq, couplings)?.matmul(&u);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::MRAD_PER_S;

    #[test]
    fn initial_state_product() {
        let s = prepare_initial(1);
        assert!((s.sites[0].norm_sqr() - 1.0).abs() < 1e-15);
        let s = prepare_initial(2);
        for levels in [[false, false], [false, true], [true, false], [true, true]] {
            assert!((s.auxiliary_amplitude(&levels) - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
        let s = prepare_initial(3);
        let site = s.sites[1];
        assert!((site.0[0].norm_sqr() - 0.5).abs() < 1e-15);
        assert!((site.0[2].norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn emission_selection_rule() {
        let cav = CavitySetup::symmetric(10.0 * MRAD_PER_S, 138.0 * MRAD_PER_S, 0.1 * MRAD_PER_S, 960.0 * MRAD_PER_S).unwrap();
        let st = emission_stage(&[cav.clone(), cav]).unwrap();
        assert!((st.total_probability - 0.8075).abs() < 2e-3);
        let s = &st.state;
        for (idx, a) in s.amplitudes().iter().enumerate() {
            for ion in 0..2 {
                // |g⟩ with σ₊ and |e⟩ with σ₀ never occur
                if s.spin_bit(idx, ion) != s.photon_bit(idx, ion) {
                    assert_eq!(*a, C64::new(0.0, 0.0));
                }
            }
        }
        assert!((s.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lossless_emission_is_certain() {
        let cav = CavitySetup::symmetric(1.0, 1.0, 1.0, 0.0).unwrap();
        let st = emission_stage(&[cav.clone(), cav.clone(), cav]).unwrap();
        assert!(st.per_ion.iter().all(|r| r.p_success == 1.0));
    }

    #[test]
    fn timing_formula() {
        assert!((timing_estimate(5, 1e-3, 0.5e-3).unwrap() - 4.5e-3).abs() < 1e-18);
        assert_eq!(timing_estimate(2, 0.0, 0.0).unwrap(), 0.0);
        assert!(timing_estimate(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn success_rates() {
        let r = success_rate(5, &[1.0; 5]).unwrap();
        assert_eq!(r.per_target_state, 1.0 / 32.0);
        assert_eq!(success_rate(2, &[1.0, 1.0]).unwrap().per_target_state, 0.25);
        let r = success_rate(2, &[0.899, 0.899]).unwrap();
        assert!((r.per_target_state - 0.202).abs() < 5e-4);
        assert!(success_rate(2, &[1.2, 0.5]).is_err());
        assert!(success_rate(3, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn photon_labels_round_trip() {
        for n in 1..=4 {
            for i in 0..1 << n {
                assert_eq!(photon_index(&photon_label(i, n)), i);
            }
        }
        assert_eq!(photon_label(0b01, 2), "s+ s0");
        assert_eq!(ion_label(0b10, 2), "ge");
    }
}
