//! Batch front-end behind the `ion-photon` binary.
//!
//! Each subcommand turns a [`Config`] into a [`ReportBundle`]: a set of named
//! artifacts plus a `manifest.json` holding the SHA-256 of every file. Output
//! depends only on the configuration and seed, never on the environment or
//! the number of threads.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cavity::{self, fig2_sweep};
use crate::config::{Config, ConfigError, CrystalRow, ReferenceRow};
use crate::constants::UNITS_EXPLANATION;
use crate::crystal::CrystalAnalysis;
use crate::format::{json, num, opt, Table};
use crate::gates::{
    self, cnot_product, compile_refocused_zz, controlled_x, gate_fidelity, sequence_unitary, zz_rotation, CnotConvention,
    SpinLevel, POLARITY_DIAGNOSTIC,
};
use crate::protocol;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "ion-photon", version, about = "Entangled photons from trapped ions in microcavities")]
pub struct Cli {
    /// Print the units policy and exit.
    #[arg(long)]
    pub explain_units: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibria, normal modes, epsilon and Ising couplings.
    Couplings(CommonArgs),
    /// Cavity emission success-probability sweep.
    Emission(CommonArgs),
    /// CNOT polarity check and refocusing verification.
    Gates(CommonArgs),
    /// Full protocol with Monte Carlo sampling.
    Run(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in configuration.
    #[arg(long)]
    pub preset: Option<String>,
    /// Directory for the report bundle; without it only the summary is printed.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `[run] seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Print the units policy before running.
    #[arg(long)]
    pub explain_units: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Named artifacts of one command plus the text summary printed to stdout.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportBundle {
    pub command: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: String,
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    name: &'a str,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config_sha256: &'a str,
    seed: Option<u64>,
    files: Vec<ManifestEntry<'a>>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl ReportBundle {
    fn new(command: &str, cfg: &Config) -> Self {
        Self { command: command.into(), config_sha256: cfg.digest(), ..Self::default() }
    }

    pub fn add(&mut self, name: impl Into<String>, content: impl Into<Vec<u8>>) {
        self.files.push((name.into(), content.into()));
    }

    fn add_tables(&mut self, stem: &str, tables: &[(&str, &Table)], format: Format) {
        match format {
            Format::Csv => {
                for (name, t) in tables {
                    self.add(format!("{name}.csv"), t.to_csv());
                }
            }
            Format::Json => {
                let obj: serde_json::Map<String, serde_json::Value> =
                    tables.iter().map(|(n, t)| (n.to_string(), t.to_json_value())).collect();
                self.add(format!("{stem}.json"), json(&obj));
            }
        }
    }

    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|f| f.0 == name).map(|f| f.1.as_slice())
    }

    pub fn file_str(&self, name: &str) -> Option<&str> {
        self.file(name).and_then(|b| std::str::from_utf8(b).ok())
    }

    pub fn manifest(&self) -> String {
        let files = self
            .files
            .iter()
            .map(|(name, bytes)| ManifestEntry { name, bytes: bytes.len(), sha256: sha256_hex(bytes) })
            .collect();
        json(&Manifest {
            tool: "ion-photon",
            version: env!("CARGO_PKG_VERSION"),
            command: &self.command,
            config_sha256: &self.config_sha256,
            seed: self.seed,
            files,
        })
    }

    /// Writes every artifact and `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let io = |path: &Path, source| Error::Io { path: path.display().to_string(), source };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        for (name, bytes) in self.files.iter().map(|(n, b)| (n.as_str(), b.as_slice())) {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| io(&path, e))?;
        }
        let path = dir.join("manifest.json");
        std::fs::write(&path, self.manifest()).map_err(|e| io(&path, e))
    }
}

impl Config {
    /// SHA-256 of the normalised configuration.
    pub fn digest(&self) -> String {
        sha256_hex(self.canonical_text().as_bytes())
    }
}

fn rel_dev(value: f64, reference: f64) -> f64 {
    (value - reference) / reference
}

struct CouplingSummary {
    delta_1: f64,
    delta_2: f64,
    h: f64,
    eps_max: f64,
    j12: f64,
    j13: Option<f64>,
    j_max: f64,
}

fn summarise(row: &CrystalRow, a: &CrystalAnalysis) -> CouplingSummary {
    let n = row.traps.len();
    let out = a.equilibrium.outward_deviations(&row.traps);
    let j = &a.couplings;
    let mut j_max: f64 = 0.0;
    for i in 0..n {
        for k in i + 1..n {
            j_max = j_max.max(j.get(i, k).abs());
        }
    }
    CouplingSummary {
        delta_1: out[0],
        delta_2: out.get(1).copied().unwrap_or(f64::NAN),
        h: a.equilibrium.gaps.first().copied().unwrap_or(f64::NAN),
        eps_max: a.epsilon.eps_max,
        j12: if n > 1 { j.get(0, 1) } else { f64::NAN },
        j13: (n > 2).then(|| j.get(0, 2)),
        j_max,
    }
}

/// Equilibria, modes, epsilon and couplings for every configuration row.
pub fn cmd_couplings(cfg: &Config, format: Format) -> Result<ReportBundle> {
    let rows = cfg.crystal_rows()?;
    let refs = cfg.reference_rows(rows.len())?;
    let analyses = rows
        .iter()
        .map(|r| CrystalAnalysis::compute(&r.traps, &r.gradient, &r.species))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut eq = Table::new(["row", "ion", "center_m", "position_m", "deviation_m", "outward_deviation_m", "trap_nu_rad_s"]);
    let mut modes = Table::new(["row", "mode", "ion", "mode_freq_rad_s", "spread_m", "s_mode_ion"]);
    let mut eps = Table::new(["row", "mode", "ion", "epsilon"]);
    let mut coup = Table::new(["row", "i", "j", "j_rad_s"]);
    for (r, (row, a)) in rows.iter().zip(&analyses).enumerate() {
        let n = row.traps.len();
        let out = a.equilibrium.outward_deviations(&row.traps);
        for m in 0..n {
            eq.push(vec![
                (r + 1).to_string(),
                (m + 1).to_string(),
                num(row.traps.centers()[m]),
                num(a.equilibrium.positions[m]),
                num(a.equilibrium.deviations[m]),
                num(out[m]),
                num(row.traps.frequencies()[m]),
            ]);
        }
        for l in 0..n {
            for m in 0..n {
                modes.push(vec![
                    (r + 1).to_string(),
                    (l + 1).to_string(),
                    (m + 1).to_string(),
                    num(a.modes.mode_freqs[l]),
                    num(a.modes.spreads[l]),
                    num(a.modes.mode_matrix[(l, m)]),
                ]);
                eps.push(vec![(r + 1).to_string(), (l + 1).to_string(), (m + 1).to_string(), num(a.epsilon.eps[(l, m)])]);
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                coup.push(vec![(r + 1).to_string(), (i + 1).to_string(), (j + 1).to_string(), num(a.couplings.get(i, j))]);
            }
        }
    }

    type RefPick = fn(&ReferenceRow) -> Option<f64>;
    type ValPick = fn(&CouplingSummary) -> Option<f64>;
    let ref_columns: [(&str, RefPick, ValPick); 7] = [
        ("delta_1_m", |r| r.delta_1, |s| Some(s.delta_1)),
        ("delta_2_m", |r| r.delta_2, |s| Some(s.delta_2)),
        ("h_m", |r| r.h, |s| Some(s.h)),
        ("eps_max", |r| r.eps_max, |s| Some(s.eps_max)),
        ("j_max_rad_s", |r| r.j_max, |s| Some(s.j_max)),
        ("j12_rad_s", |r| r.j12, |s| Some(s.j12)),
        ("j13_rad_s", |r| r.j13, |s| s.j13),
    ];
    let used: Vec<_> = ref_columns.iter().filter(|c| refs.iter().any(|r| c.1(r).is_some())).collect();
    let mut header: Vec<String> = [
        "row",
        "n_ions",
        "d_m",
        "dbdz_t_per_m",
        "delta_1_m",
        "delta_2_m",
        "h_m",
        "eps_max",
        "eps_within_cutoff",
        "j12_rad_s",
        "j13_rad_s",
        "j_max_rad_s",
    ]
    .map(String::from)
    .to_vec();
    for c in &used {
        header.push(format!("ref_{}", c.0));
        header.push(format!("rel_dev_{}", c.0));
    }
    let mut summary = Table { header, rows: Vec::new() };
    let mut text = String::new();
    for (r, ((row, a), reference)) in rows.iter().zip(&analyses).zip(&refs).enumerate() {
        let s = summarise(row, a);
        let mut fields = vec![
            (r + 1).to_string(),
            row.traps.len().to_string(),
            num(row.spacing),
            num(row.gradient.dbdz),
            num(s.delta_1),
            num(s.delta_2),
            num(s.h),
            num(s.eps_max),
            a.epsilon.within_cutoff().to_string(),
            num(s.j12),
            opt(s.j13),
            num(s.j_max),
        ];
        for c in &used {
            let reference = c.1(reference);
            fields.push(opt(reference));
            fields.push(opt(reference.zip(c.2(&s)).map(|(rv, v)| rel_dev(v, rv))));
        }
        summary.push(fields);
        let _ = writeln!(
            text,
            "row {}: N={} d={:.3} um  delta_1={:.4} um  h={:.4} um  eps_max={:.4e}  J12={:.4} krad/s{}",
            r + 1,
            row.traps.len(),
            row.spacing * 1e6,
            s.delta_1 * 1e6,
            s.h * 1e6,
            s.eps_max,
            s.j12 / 1e3,
            s.j13.map(|j| format!("  J13={:.4} krad/s", j / 1e3)).unwrap_or_default()
        );
    }

    let mut bundle = ReportBundle::new("couplings", cfg);
    bundle.add_tables(
        "couplings",
        &[("summary", &summary), ("equilibrium", &eq), ("modes", &modes), ("epsilon", &eps), ("couplings", &coup)],
        format,
    );
    bundle.summary = text;
    Ok(bundle)
}

/// Two-cavity success-probability sweep with one summary row per detuning.
pub fn cmd_emission(cfg: &Config, format: Format) -> Result<ReportBundle> {
    let e = cfg.emission()?;
    let points = fig2_sweep(&e.template, &e.kappas, &e.deltas)?;
    let mut sweep = Table::new(["kappa_rad_s", "delta_rad_s", "tau_star_s", "p_single", "p_pair"]);
    for p in &points {
        sweep.push(vec![num(p.kappa_rad_s), num(p.delta_rad_s), num(p.tau_star_s), num(p.p_single), num(p.p_pair)]);
    }
    let mut summary =
        Table::new(["delta_rad_s", "omega_eff_rad_s", "kappa_max_rad_s", "tau_star_s", "p_single", "p_pair", "p_pair_min"]);
    let mut text = String::new();
    let per_curve = e.kappas.len();
    for (d, curve) in e.deltas.iter().zip(points.chunks(per_curve)) {
        let last = curve.last().expect("non-empty grid");
        let min = curve.iter().map(|p| p.p_pair).fold(f64::INFINITY, f64::min);
        let omega_eff = cavity::effective_rabi(&cavity::RamanChannel::new(e.template.omega_laser, e.template.g_cav, *d)?)?;
        summary.push(vec![
            num(*d),
            num(omega_eff),
            num(last.kappa_rad_s),
            num(last.tau_star_s),
            num(last.p_single),
            num(last.p_pair),
            num(min),
        ]);
        let _ = writeln!(
            text,
            "delta={:e} rad/s: omega_eff={:e} rad/s, at kappa={:e} rad/s tau*={:.4e} s P_pair={:.6}, min P_pair={:.6}",
            d, omega_eff, last.kappa_rad_s, last.tau_star_s, last.p_pair, min
        );
    }
    let mut bundle = ReportBundle::new("emission", cfg);
    bundle.add_tables("emission", &[("sweep", &sweep), ("emission_summary", &summary)], format);
    bundle.summary = text;
    Ok(bundle)
}

fn matrix_text(m: &gates::GateMatrix) -> String {
    let mut s = String::new();
    for i in 0..m.dim() {
        let row: Vec<String> = (0..m.dim())
            .map(|j| {
                let z = m.get(i, j);
                let clean = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
                format!("{:+.6}{:+.6}i", clean(z.re), clean(z.im))
            })
            .collect();
        let _ = writeln!(s, "  [{}]", row.join(" "));
    }
    s
}

/// Polarity check of the six-factor CNOT and refocusing verification for
/// every configuration row.
pub fn cmd_gates(cfg: &Config, format: Format) -> Result<ReportBundle> {
    let conventions = [CnotConvention::Verbatim, CnotConvention::ActiveOnE];
    let mut polarity = Table::new(["convention", "active_level", "fidelity_vs_active_e", "fidelity_vs_active_g", "fidelity_vs_own"]);
    let mut text = String::from("CNOT polarity (control ion 1, target ion 2)\n");
    for conv in conventions {
        let u = cnot_product(conv, false);
        let f_e = gate_fidelity(&controlled_x(2, 0, 1, SpinLevel::E), &u)?;
        let f_g = gate_fidelity(&controlled_x(2, 0, 1, SpinLevel::G), &u)?;
        let own = gate_fidelity(&controlled_x(2, 0, 1, conv.active_level()), &u)?;
        let name = match conv {
            CnotConvention::Verbatim => "verbatim",
            CnotConvention::ActiveOnE => "active_on_e",
        };
        polarity.push(vec![name.into(), conv.active_level().label().to_string(), num(f_e), num(f_g), num(own)]);
        let _ = writeln!(text, "  {name}: active on |{}>, fidelity to own ideal {own:.15}", conv.active_level().label());
    }
    text.push_str(POLARITY_DIAGNOSTIC);
    text.push('\n');
    text.push_str("verbatim six-factor product, basis |ee>,|eg>,|ge>,|gg>:\n");
    text.push_str(&matrix_text(&cnot_product(CnotConvention::Verbatim, false)));

    let convention = if cfg.has_section("protocol") { cfg.convention()? } else { CnotConvention::default() };
    let rows = if cfg.has_section("traps") { cfg.crystal_rows()? } else { Vec::new() };
    let mut refocus = Table::new(["row", "kind", "i", "j", "free_time_s", "rotations", "fidelity", "max_abs_error"]);
    let mut sequences = String::new();
    for (r, row) in rows.iter().enumerate() {
        let a = CrystalAnalysis::compute(&row.traps, &row.gradient, &row.species)?;
        let j = &a.couplings;
        let n = j.dim();
        let mut worst: f64 = 1.0;
        for i in 0..n {
            for k in i + 1..n {
                let seq = compile_refocused_zz(j, i, k, std::f64::consts::FRAC_PI_4)?;
                let u = sequence_unitary(&seq, j)?;
                let target = zz_rotation(n, i, k, std::f64::consts::FRAC_PI_4);
                let f = gate_fidelity(&target, &u)?;
                worst = worst.min(f);
                refocus.push(vec![
                    (r + 1).to_string(),
                    "zz".into(),
                    (i + 1).to_string(),
                    (k + 1).to_string(),
                    num(seq.total_duration()),
                    seq.rotation_count().to_string(),
                    num(f),
                    num(u.max_abs_diff(&target)),
                ]);
            }
        }
        for c in 0..n {
            for t in (0..n).filter(|&t| t != c) {
                let seq = gates::cnot_sequence(j, c, t, convention)?;
                let u = sequence_unitary(&seq, j)?;
                let target = controlled_x(n, c, t, convention.active_level());
                let f = gate_fidelity(&target, &u)?;
                worst = worst.min(f);
                refocus.push(vec![
                    (r + 1).to_string(),
                    "cnot".into(),
                    (c + 1).to_string(),
                    (t + 1).to_string(),
                    num(seq.total_duration()),
                    seq.rotation_count().to_string(),
                    num(f),
                    num(u.max_abs_diff(&target)),
                ]);
                if c == 0 {
                    let _ = writeln!(sequences, "# row {} CNOT {} -> {} ({} ions)", r + 1, c + 1, t + 1, n);
                    sequences.push_str(&seq.to_text());
                }
            }
        }
        let _ = writeln!(text, "row {}: {} ions, worst refocused gate fidelity {:.15}", r + 1, n, worst);
    }

    let mut bundle = ReportBundle::new("gates", cfg);
    bundle.add_tables("gates", &[("polarity", &polarity), ("refocusing", &refocus)], format);
    bundle.add("gates_report.txt", text.clone());
    if !sequences.is_empty() {
        bundle.add("cnot_sequences.txt", sequences);
    }
    bundle.summary = text;
    Ok(bundle)
}

#[derive(Serialize)]
struct RunJson<'a> {
    outcome_table: &'a protocol::OutcomeTable,
    report: &'a protocol::RunReport,
}

/// Full protocol: emission, entangling, ion measurement and sampling.
pub fn cmd_run(cfg: &Config, seed: Option<u64>, format: Format) -> Result<ReportBundle> {
    let run = cfg.run(seed)?;
    let exp = &run.experiment;
    let out = protocol::run_pipeline(exp)?;
    let report = protocol::sample_run_parallel(exp, run.trials)?;

    let mut bundle = ReportBundle::new("run", cfg);
    bundle.seed = Some(exp.seed);
    match format {
        Format::Csv => {
            bundle.add("outcome_table.csv", out.table.to_csv());
            let mut counts = Table::new(["ions", "count", "frequency", "expected"]);
            for r in &out.table.rows {
                counts.push(vec![
                    r.ions.clone(),
                    report.counts[&r.ions].to_string(),
                    num(report.frequencies[&r.ions]),
                    num(r.probability),
                ]);
            }
            bundle.add("counts.csv", counts.to_csv());
            let mut s = Table::new(["quantity", "value"]);
            let t = &report.timing;
            let rows: Vec<(&str, String)> = vec![
                ("ions", report.ions.to_string()),
                ("seed", report.seed.to_string()),
                ("trials", report.trials.to_string()),
                ("emitted", report.emitted.to_string()),
                ("total_emission_p", num(report.total_emission_p)),
                ("collection_efficiency", num(report.collection_efficiency)),
                ("success_per_target_state", num(report.success.per_target_state)),
                ("success_any_state", num(report.success.any_state)),
                ("within_3sigma", report.within_3sigma.to_string()),
                ("t0_no_overhead_s", num(t.t0_no_overhead_s)),
                ("echo_overhead_factor", num(t.echo_overhead_factor)),
                ("t0_with_overhead_s", num(t.t0_with_overhead_s)),
                ("t1_s", num(t.t1_s)),
                ("total_no_overhead_s", num(t.total_no_overhead_s)),
                ("total_with_overhead_s", num(t.total_with_overhead_s)),
            ];
            for (k, v) in rows {
                s.push(vec![k.into(), v]);
            }
            for (m, p) in report.per_ion_p.iter().enumerate() {
                s.push(vec![format!("p_ion_{}", m + 1), num(*p)]);
            }
            bundle.add("run_summary.csv", s.to_csv());
        }
        Format::Json => bundle.add("run.json", json(&RunJson { outcome_table: &out.table, report: &report })),
    }
    let program: String = protocol::entangling_sequences(&out.couplings, exp.convention)?
        .iter()
        .enumerate()
        .map(|(k, s)| format!("# CNOT 1 -> {}\n{}", k + 2, s.to_text()))
        .collect();
    bundle.add("entangling.txt", program);

    let mut text = String::new();
    for r in &out.table.rows {
        let _ = writeln!(text, "|{}>  p={:.6}  {}  count={}", r.ions, r.probability, r.photon_state, report.counts[&r.ions]);
    }
    let _ = writeln!(
        text,
        "emitted {}/{} trials, P_total={:.6}, per-target-state rate {:.6}, within 3 sigma: {}",
        report.emitted, report.trials, report.total_emission_p, report.success.per_target_state, report.within_3sigma
    );
    let _ = writeln!(
        text,
        "time per attempt: {:.4e} s without overhead, {:.4e} s with overhead",
        report.timing.total_no_overhead_s, report.timing.total_with_overhead_s
    );
    for note in &report.notes {
        let _ = writeln!(text, "note: {note}");
    }
    bundle.summary = text;
    Ok(bundle)
}

fn load_config(args: &CommonArgs) -> Result<Config> {
    match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
            Ok(Config::parse(&text)?)
        }
        (None, Some(name)) => Ok(Config::preset(name)?),
        _ => Err(ConfigError::Usage("give exactly one of --config <path> or --preset <name>".into()).into()),
    }
}

/// Runs a parsed command line, printing the summary to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let io = |source| Error::Io { path: "<stdout>".into(), source };
    if cli.explain_units {
        stdout.write_all(UNITS_EXPLANATION.as_bytes()).map_err(io)?;
        if cli.command.is_none() {
            return Ok(());
        }
    }
    let Some(command) = &cli.command else {
        return Err(ConfigError::Usage("no subcommand given (couplings, emission, gates, run)".into()).into());
    };
    let (args, bundle) = match command {
        Command::Couplings(a) => (a, cmd_couplings(&load_config(a)?, a.format)?),
        Command::Emission(a) => (a, cmd_emission(&load_config(a)?, a.format)?),
        Command::Gates(a) => (a, cmd_gates(&load_config(a)?, a.format)?),
        Command::Run(a) => (a, cmd_run(&load_config(a)?, a.seed, a.format)?),
    };
    if args.explain_units && !cli.explain_units {
        stdout.write_all(UNITS_EXPLANATION.as_bytes()).map_err(io)?;
    }
    stdout.write_all(bundle.summary.as_bytes()).map_err(io)?;
    if let Some(dir) = &args.out {
        bundle.write(dir)?;
        writeln!(stdout, "wrote {} files and manifest.json to {}", bundle.files.len(), dir.display()).map_err(io)?;
    }
    Ok(())
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
