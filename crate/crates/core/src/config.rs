//! TOML experiment configuration and the built-in presets.
//!
//! Sections: `species`, `traps`, `gradient`, `cavity`, `protocol`, `run` and
//! the optional `reference`. Key names carry their unit. In `traps`,
//! `gradient` and `reference` every value is either a scalar or an array with
//! one entry per configuration row; scalars are broadcast to all rows. In
//! `cavity`, arrays are per ion for `run` and `delta_Mrad_s` is the list of
//! curves for `emission`.

use thiserror::Error;
use toml::{Table, Value};

use crate::cavity::{CavityScaling, CavitySetup, RamanChannel, SweepTemplate};
use crate::constants::{AMU, KRAD_PER_S, MICROMETRE, MRAD_PER_S};
use crate::crystal::{FieldGradient, IonSpecies, TrapArray};
use crate::gates::{CnotConvention, MAX_IONS};
use crate::protocol::ExperimentConfig;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("[{section}] unknown key `{key}`")]
    UnknownKey { section: String, key: String },
    #[error("missing required section [{0}]")]
    MissingSection(String),
    #[error("[{section}] missing required key `{key}`")]
    MissingKey { section: String, key: String },
    #[error("[{section}] {key}: {message}")]
    InvalidValue { section: String, key: String, message: String },
    #[error("unknown preset `{0}` (available: {list})", list = PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", "))]
    UnknownPreset(String),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, ConfigError>;

/// Built-in presets, embedded at build time.
pub const PRESETS: &[(&str, &str)] = &[
    ("table1", include_str!("../presets/table1.toml")),
    ("table2", include_str!("../presets/table2.toml")),
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig2_low_delta", include_str!("../presets/fig2_low_delta.toml")),
    ("bell_ideal", include_str!("../presets/bell_ideal.toml")),
    ("ghz3_ideal", include_str!("../presets/ghz3_ideal.toml")),
    ("ghz5_ideal", include_str!("../presets/ghz5_ideal.toml")),
    ("bell_cavity", include_str!("../presets/bell_cavity.toml")),
];

const SECTIONS: &[(&str, &[&str])] = &[
    ("species", &["label", "mass_amu", "g_factor"]),
    (
        "traps",
        &[
            "n_ions",
            "d_um",
            "nu_Mrad_s",
            "nu_1_Mrad_s",
            "nu_2_Mrad_s",
            "nu_3_Mrad_s",
            "nu_4_Mrad_s",
            "nu_5_Mrad_s",
            "nu_6_Mrad_s",
        ],
    ),
    ("gradient", &["dBdz_T_per_m"]),
    (
        "cavity",
        &[
            "omega_Mrad_s",
            "g_Mrad_s",
            "delta_Mrad_s",
            "delta_e_Mrad_s",
            "kappa_Mrad_s",
            "kappa_max_Mrad_s",
            "kappa_points",
            "radius_um",
            "anchor_radius_um",
            "anchor_g_Mrad_s",
            "anchor_kappa_Mrad_s",
        ],
    ),
    ("protocol", &["convention", "t0_s", "t1_s", "pi_pulse_s", "collection_efficiency"]),
    ("run", &["seed", "trials"]),
    ("reference", &["delta_1_um", "delta_2_um", "h_um", "eps_max", "J_krad_s", "J12_krad_s", "J13_krad_s"]),
];

/// Sections whose arrays run over configuration rows.
const ROW_SECTIONS: &[&str] = &["traps", "gradient", "reference"];

pub const DEFAULT_TRIALS: u64 = 100_000;

/// A validated configuration file: known sections and keys only.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    table: Table,
}

/// One crystal configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct CrystalRow {
    pub spacing: f64,
    pub traps: TrapArray,
    pub gradient: FieldGradient,
    pub species: IonSpecies,
}

/// Printed values to compare against, SI units.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReferenceRow {
    pub delta_1: Option<f64>,
    pub delta_2: Option<f64>,
    pub h: Option<f64>,
    pub eps_max: Option<f64>,
    pub j_max: Option<f64>,
    pub j12: Option<f64>,
    pub j13: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmissionConfig {
    pub template: SweepTemplate,
    pub kappas: Vec<f64>,
    pub deltas: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub trials: u64,
}

fn invalid(section: &str, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue { section: section.into(), key: key.into(), message: message.into() }
}

fn missing(section: &str, key: &str) -> ConfigError {
    ConfigError::MissingKey { section: section.into(), key: key.into() }
}

fn as_number(section: &str, key: &str, v: &Value) -> Result<f64> {
    let x = match v {
        Value::Integer(i) => *i as f64,
        Value::Float(f) => *f,
        other => return Err(invalid(section, key, format!("expected a number, got {}", other.type_str()))),
    };
    if !x.is_finite() {
        return Err(invalid(section, key, "must be finite"));
    }
    Ok(x)
}

pub fn preset_text(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|p| p.0 == name)
        .map(|p| p.1)
        .ok_or_else(|| ConfigError::UnknownPreset(name.into()))
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        for (name, body) in &table {
            let Some((_, keys)) = SECTIONS.iter().find(|s| s.0 == name) else {
                return Err(ConfigError::UnknownSection(name.clone()));
            };
            let Value::Table(body) = body else {
                return Err(ConfigError::Parse(format!("`{name}` must be a [section]")));
            };
            if let Some(key) = body.keys().find(|k| !keys.contains(&k.as_str())) {
                return Err(ConfigError::UnknownKey { section: name.clone(), key: key.clone() });
            }
        }
        Ok(Self { table })
    }

    pub fn preset(name: &str) -> Result<Self> {
        Self::parse(preset_text(name)?)
    }

    /// The parsed configuration re-serialised, independent of comments and
    /// layout in the source text.
    pub fn canonical_text(&self) -> String {
        self.table.to_string()
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.table.contains_key(section)
    }

    fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.table.get(section)?.as_table()?.get(key)
    }

    fn require_section(&self, section: &str) -> Result<()> {
        if self.has_section(section) {
            Ok(())
        } else {
            Err(ConfigError::MissingSection(section.into()))
        }
    }

    fn scalar(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::Array(_)) => Err(invalid(section, key, "expected a single number")),
            Some(v) => as_number(section, key, v).map(Some),
        }
    }

    fn positive_scalar(&self, section: &str, key: &str) -> Result<Option<f64>> {
        let v = self.scalar(section, key)?;
        if let Some(x) = v {
            if x <= 0.0 {
                return Err(invalid(section, key, format!("must be > 0, got {x}")));
            }
        }
        Ok(v)
    }

    fn non_negative_scalar(&self, section: &str, key: &str) -> Result<Option<f64>> {
        let v = self.scalar(section, key)?;
        if let Some(x) = v {
            if x < 0.0 {
                return Err(invalid(section, key, format!("must be >= 0, got {x}")));
            }
        }
        Ok(v)
    }

    fn integer(&self, section: &str, key: &str) -> Result<Option<u64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(_) => Err(invalid(section, key, "expected a non-negative integer")),
        }
    }

    /// All numbers under a key, scalar or array.
    fn numbers(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::Array(items)) => {
                if items.is_empty() {
                    return Err(invalid(section, key, "array must not be empty"));
                }
                items.iter().map(|v| as_number(section, key, v)).collect::<Result<Vec<_>>>().map(Some)
            }
            Some(v) => Ok(Some(vec![as_number(section, key, v)?])),
        }
    }

    /// Number of configuration rows implied by array lengths in the row
    /// sections.
    pub fn row_count(&self) -> Result<usize> {
        let mut rows: Option<(usize, String, String)> = None;
        for &section in ROW_SECTIONS {
            let Some(Value::Table(body)) = self.table.get(section) else { continue };
            for (key, v) in body {
                let Value::Array(items) = v else { continue };
                match &rows {
                    None => rows = Some((items.len(), section.into(), key.clone())),
                    Some((n, s, k)) if *n != items.len() => {
                        return Err(invalid(
                            section,
                            key,
                            format!("has {} entries but [{s}] {k} has {n}", items.len()),
                        ))
                    }
                    _ => {}
                }
            }
        }
        Ok(rows.map_or(1, |r| r.0))
    }

    /// Per-row values of a row-section key, broadcasting scalars.
    fn row_values(&self, section: &str, key: &str, rows: usize) -> Result<Option<Vec<f64>>> {
        Ok(self.numbers(section, key)?.map(|v| if v.len() == 1 { vec![v[0]; rows] } else { v }))
    }

    fn required_rows(&self, section: &str, key: &str, rows: usize) -> Result<Vec<f64>> {
        self.row_values(section, key, rows)?.ok_or_else(|| missing(section, key))
    }

    fn positive_rows(&self, section: &str, key: &str, rows: usize) -> Result<Vec<f64>> {
        let v = self.required_rows(section, key, rows)?;
        if let Some(x) = v.iter().find(|x| **x <= 0.0) {
            return Err(invalid(section, key, format!("must be > 0, got {x}")));
        }
        Ok(v)
    }

    pub fn species(&self) -> Result<IonSpecies> {
        self.require_section("species")?;
        let mass = self.positive_scalar("species", "mass_amu")?.ok_or_else(|| missing("species", "mass_amu"))?;
        let g = self.scalar("species", "g_factor")?.ok_or_else(|| missing("species", "g_factor"))?;
        let label = match self.get("species", "label") {
            None => "ion".to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(invalid("species", "label", "expected a string")),
        };
        IonSpecies::new(mass * AMU, g, label).map_err(|e| invalid("species", "mass_amu", e.to_string()))
    }

    /// Every crystal configuration in the file.
    pub fn crystal_rows(&self) -> Result<Vec<CrystalRow>> {
        self.require_section("traps")?;
        self.require_section("gradient")?;
        let species = self.species()?;
        let rows = self.row_count()?;
        let n_ions = self.required_rows("traps", "n_ions", rows)?;
        let d = self.positive_rows("traps", "d_um", rows)?;
        let common_nu = match self.row_values("traps", "nu_Mrad_s", rows)? {
            Some(v) if v.iter().any(|x| *x <= 0.0) => return Err(invalid("traps", "nu_Mrad_s", "must be > 0")),
            other => other,
        };
        let grad = self.required_rows("gradient", "dBdz_T_per_m", rows)?;
        let mut out = Vec::with_capacity(rows);
        for r in 0..rows {
            let n = n_ions[r];
            if n.fract() != 0.0 || !(1.0..=MAX_IONS as f64).contains(&n) {
                return Err(invalid("traps", "n_ions", format!("must be an integer in 1..={MAX_IONS}, got {n}")));
            }
            let n = n as usize;
            let mut freqs = Vec::with_capacity(n);
            for m in 1..=n {
                let key = format!("nu_{m}_Mrad_s");
                let nu = match (self.row_values("traps", &key, rows)?, &common_nu) {
                    (Some(v), _) => v[r],
                    (None, Some(c)) => c[r],
                    (None, None) => return Err(missing("traps", &key)),
                };
                if nu <= 0.0 {
                    return Err(invalid("traps", &key, format!("must be > 0, got {nu}")));
                }
                freqs.push(nu * MRAD_PER_S);
            }
            let spacing = d[r] * MICROMETRE;
            let traps = TrapArray::evenly_spaced(spacing, freqs).map_err(|e| invalid("traps", "d_um", e.to_string()))?;
            let gradient =
                FieldGradient::new(grad[r]).map_err(|e| invalid("gradient", "dBdz_T_per_m", e.to_string()))?;
            out.push(CrystalRow { spacing, traps, gradient, species: species.clone() });
        }
        Ok(out)
    }

    pub fn reference_rows(&self, rows: usize) -> Result<Vec<ReferenceRow>> {
        let fetch = |key: &str, scale: f64| -> Result<Option<Vec<f64>>> {
            Ok(self.row_values("reference", key, rows)?.map(|v| v.into_iter().map(|x| x * scale).collect()))
        };
        let delta_1 = fetch("delta_1_um", MICROMETRE)?;
        let delta_2 = fetch("delta_2_um", MICROMETRE)?;
        let h = fetch("h_um", MICROMETRE)?;
        let eps = fetch("eps_max", 1.0)?;
        let j = fetch("J_krad_s", KRAD_PER_S)?;
        let j12 = fetch("J12_krad_s", KRAD_PER_S)?;
        let j13 = fetch("J13_krad_s", KRAD_PER_S)?;
        let pick = |v: &Option<Vec<f64>>, r: usize| v.as_ref().map(|v| v[r]);
        Ok((0..rows)
            .map(|r| ReferenceRow {
                delta_1: pick(&delta_1, r),
                delta_2: pick(&delta_2, r),
                h: pick(&h, r),
                eps_max: pick(&eps, r),
                j_max: pick(&j, r),
                j12: pick(&j12, r),
                j13: pick(&j13, r),
            })
            .collect())
    }

    fn scaling(&self) -> Result<CavityScaling> {
        let d = CavityScaling::default();
        Ok(CavityScaling {
            anchor_radius: self.positive_scalar("cavity", "anchor_radius_um")?.map_or(d.anchor_radius, |x| x * MICROMETRE),
            anchor_g: self.positive_scalar("cavity", "anchor_g_Mrad_s")?.map_or(d.anchor_g, |x| x * MRAD_PER_S),
            anchor_kappa: self
                .non_negative_scalar("cavity", "anchor_kappa_Mrad_s")?
                .map_or(d.anchor_kappa, |x| x * MRAD_PER_S),
        })
    }

    /// Cavity coupling `h` (rad/s) from either `g_Mrad_s` or `radius_um`.
    fn cavity_coupling_scalar(&self) -> Result<f64> {
        match (self.scalar("cavity", "g_Mrad_s")?, self.positive_scalar("cavity", "radius_um")?) {
            (Some(_), Some(_)) => Err(invalid("cavity", "radius_um", "give either g_Mrad_s or radius_um, not both")),
            (Some(g), None) => Ok(g * MRAD_PER_S),
            (None, Some(r)) => Ok(self
                .scaling()?
                .scale(r * MICROMETRE)
                .map_err(|e| invalid("cavity", "radius_um", e.to_string()))?
                .0),
            (None, None) => Err(missing("cavity", "g_Mrad_s")),
        }
    }

    pub fn emission(&self) -> Result<EmissionConfig> {
        self.require_section("cavity")?;
        let omega = self.scalar("cavity", "omega_Mrad_s")?.ok_or_else(|| missing("cavity", "omega_Mrad_s"))?;
        let g = self.cavity_coupling_scalar()?;
        let deltas = self.numbers("cavity", "delta_Mrad_s")?.ok_or_else(|| missing("cavity", "delta_Mrad_s"))?;
        if deltas.contains(&0.0) {
            return Err(invalid("cavity", "delta_Mrad_s", "detuning must be non-zero"));
        }
        let kappas = match (self.numbers("cavity", "kappa_Mrad_s")?, self.non_negative_scalar("cavity", "kappa_max_Mrad_s")?) {
            (Some(_), Some(_)) => {
                return Err(invalid("cavity", "kappa_max_Mrad_s", "give either kappa_Mrad_s or kappa_max_Mrad_s, not both"))
            }
            (Some(k), None) => k,
            (None, Some(max)) => {
                let points = self.integer("cavity", "kappa_points")?.ok_or_else(|| missing("cavity", "kappa_points"))?;
                if points < 2 {
                    return Err(invalid("cavity", "kappa_points", "need at least 2 points"));
                }
                (0..points).map(|i| max * i as f64 / (points - 1) as f64).collect()
            }
            (None, None) => return Err(missing("cavity", "kappa_Mrad_s")),
        };
        if let Some(k) = kappas.iter().find(|k| **k < 0.0) {
            return Err(invalid("cavity", "kappa_Mrad_s", format!("must be >= 0, got {k}")));
        }
        Ok(EmissionConfig {
            template: SweepTemplate { omega_laser: omega * MRAD_PER_S, g_cav: g },
            kappas: kappas.into_iter().map(|k| k * MRAD_PER_S).collect(),
            deltas: deltas.into_iter().map(|d| d * MRAD_PER_S).collect(),
        })
    }

    /// Per-ion values of a cavity key: a scalar or one entry per ion.
    fn per_ion(&self, key: &str, ions: usize) -> Result<Option<Vec<f64>>> {
        match self.numbers("cavity", key)? {
            None => Ok(None),
            Some(v) if v.len() == 1 => Ok(Some(vec![v[0]; ions])),
            Some(v) if v.len() == ions => Ok(Some(v)),
            Some(v) => Err(invalid("cavity", key, format!("expected 1 or {ions} entries, got {}", v.len()))),
        }
    }

    pub fn cavities(&self, ions: usize) -> Result<Vec<CavitySetup>> {
        self.require_section("cavity")?;
        let req = |key: &str| self.per_ion(key, ions)?.ok_or_else(|| missing("cavity", key));
        let omega = req("omega_Mrad_s")?;
        let delta = req("delta_Mrad_s")?;
        let delta_e = self.per_ion("delta_e_Mrad_s", ions)?.unwrap_or_else(|| delta.clone());
        let radius = self.per_ion("radius_um", ions)?;
        let g = self.per_ion("g_Mrad_s", ions)?;
        let kappa = self.per_ion("kappa_Mrad_s", ions)?;
        let scaling = self.scaling()?;
        let mut out = Vec::with_capacity(ions);
        for m in 0..ions {
            let (g_m, kappa_m, r_m) = match (&radius, &g, &kappa) {
                (Some(r), None, None) => {
                    let (g, k) = scaling
                        .scale(r[m] * MICROMETRE)
                        .map_err(|e| invalid("cavity", "radius_um", e.to_string()))?;
                    (g, k, Some(r[m] * MICROMETRE))
                }
                (Some(_), _, _) => {
                    return Err(invalid("cavity", "radius_um", "radius_um replaces g_Mrad_s and kappa_Mrad_s; give one or the other"))
                }
                (None, Some(g), Some(k)) => (g[m] * MRAD_PER_S, k[m] * MRAD_PER_S, None),
                (None, None, _) => return Err(missing("cavity", "g_Mrad_s")),
                (None, _, None) => return Err(missing("cavity", "kappa_Mrad_s")),
            };
            let ch = |d: f64, key: &str| {
                RamanChannel::new(omega[m] * MRAD_PER_S, g_m, d * MRAD_PER_S).map_err(|e| invalid("cavity", key, e.to_string()))
            };
            let mut setup = CavitySetup::new(ch(delta[m], "delta_Mrad_s")?, ch(delta_e[m], "delta_e_Mrad_s")?, kappa_m)
                .map_err(|e| invalid("cavity", "kappa_Mrad_s", e.to_string()))?;
            setup.radius = r_m;
            out.push(setup);
        }
        Ok(out)
    }

    pub fn convention(&self) -> Result<CnotConvention> {
        match self.get("protocol", "convention") {
            None => Ok(CnotConvention::default()),
            Some(Value::String(s)) => match s.as_str() {
                "active_on_e" => Ok(CnotConvention::ActiveOnE),
                "verbatim" => Ok(CnotConvention::Verbatim),
                other => Err(invalid("protocol", "convention", format!("expected `active_on_e` or `verbatim`, got `{other}`"))),
            },
            Some(_) => Err(invalid("protocol", "convention", "expected a string")),
        }
    }

    /// Configuration for a protocol run. `seed` overrides `[run] seed`.
    pub fn run(&self, seed: Option<u64>) -> Result<RunConfig> {
        let mut rows = self.crystal_rows()?;
        if rows.len() != 1 {
            return Err(invalid("traps", "d_um", format!("a run needs exactly one configuration, found {}", rows.len())));
        }
        let row = rows.remove(0);
        let ions = row.traps.len();
        if ions < 2 {
            return Err(invalid("traps", "n_ions", "a run needs at least 2 ions"));
        }
        let seed = match (seed, self.integer("run", "seed")?) {
            (Some(s), _) | (None, Some(s)) => s,
            (None, None) => return Err(missing("run", "seed")),
        };
        let trials = self.integer("run", "trials")?.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(invalid("run", "trials", "must be >= 1"));
        }
        let eta = self.scalar("protocol", "collection_efficiency")?.unwrap_or(1.0);
        if !(0.0..=1.0).contains(&eta) {
            return Err(invalid("protocol", "collection_efficiency", format!("must lie in [0, 1], got {eta}")));
        }
        let experiment = ExperimentConfig {
            cavities: self.cavities(ions)?,
            traps: row.traps,
            gradient: row.gradient,
            species: row.species,
            convention: self.convention()?,
            seed,
            t0: self.non_negative_scalar("protocol", "t0_s")?,
            t1: self.non_negative_scalar("protocol", "t1_s")?.unwrap_or(0.0),
            pi_pulse: self.non_negative_scalar("protocol", "pi_pulse_s")?.unwrap_or(0.0),
            collection_efficiency: eta,
        };
        Ok(RunConfig { experiment, trials })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for (name, _) in PRESETS {
            Config::preset(name).unwrap();
        }
        assert!(matches!(Config::preset("nope"), Err(ConfigError::UnknownPreset(_))));
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert_eq!(Config::parse("[bogus]\nx = 1\n"), Err(ConfigError::UnknownSection("bogus".into())));
        assert_eq!(
            Config::parse("[traps]\nd_micron = 1\n"),
            Err(ConfigError::UnknownKey { section: "traps".into(), key: "d_micron".into() })
        );
        assert!(matches!(Config::parse("[traps"), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn row_broadcasting() {
        let c = Config::parse(
            "[species]\nmass_amu = 171\ng_factor = 2\n[traps]\nn_ions = 2\nd_um = [6.0, 7.0]\nnu_Mrad_s = 5.0\n\
             [gradient]\ndBdz_T_per_m = [100, 200]\n",
        )
        .unwrap();
        let rows = c.crystal_rows().unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].spacing, 7.0 * MICROMETRE);
        assert_eq!(rows[1].gradient.dbdz, 200.0);
        assert_eq!(rows[0].traps.frequencies(), &[5e6, 5e6]);
    }

    #[test]
    fn row_length_mismatch_names_keys() {
        let c = Config::parse("[traps]\nd_um = [6.0, 7.0]\n[gradient]\ndBdz_T_per_m = [1, 2, 3]\n").unwrap();
        let err = c.row_count().unwrap_err().to_string();
        assert!(err.contains("[gradient] dBdz_T_per_m"), "{err}");
    }

    #[test]
    fn missing_keys_name_section_and_key() {
        let c = Config::parse("[species]\nmass_amu = 171\ng_factor = 2\n[traps]\nn_ions = 2\nd_um = 6\n[gradient]\ndBdz_T_per_m = 1\n").unwrap();
        assert_eq!(c.crystal_rows().unwrap_err(), missing("traps", "nu_1_Mrad_s"));
        let c = Config::parse("[traps]\nd_um = 6\n").unwrap();
        assert_eq!(c.crystal_rows().unwrap_err().to_string(), "missing required section [gradient]");
    }

    #[test]
    fn invalid_values() {
        let base = "[species]\nmass_amu = 171\ng_factor = 2\n[gradient]\ndBdz_T_per_m = 1\n";
        let c = Config::parse(&format!("{base}[traps]\nn_ions = 2\nd_um = -6\nnu_Mrad_s = 1\n")).unwrap();
        assert!(matches!(c.crystal_rows(), Err(ConfigError::InvalidValue { ref key, .. }) if key == "d_um"));
        let c = Config::parse(&format!("{base}[traps]\nn_ions = 2.5\nd_um = 6\nnu_Mrad_s = 1\n")).unwrap();
        assert!(matches!(c.crystal_rows(), Err(ConfigError::InvalidValue { ref key, .. }) if key == "n_ions"));
        let c = Config::parse(&format!("{base}[traps]\nn_ions = 2\nd_um = \"six\"\nnu_Mrad_s = 1\n")).unwrap();
        assert!(matches!(c.crystal_rows(), Err(ConfigError::InvalidValue { ref key, .. }) if key == "d_um"));
    }

    #[test]
    fn kappa_grid() {
        let c = Config::parse("[cavity]\nomega_Mrad_s = 10\ng_Mrad_s = 138\ndelta_Mrad_s = [0.1, 1]\nkappa_max_Mrad_s = 1000\nkappa_points = 5\n").unwrap();
        let e = c.emission().unwrap();
        assert_eq!(e.kappas, vec![0.0, 250e6, 500e6, 750e6, 1000e6]);
        assert_eq!(e.deltas, vec![0.1e6, 1e6]);
        let c = Config::parse("[cavity]\nomega_Mrad_s = 10\ng_Mrad_s = 138\ndelta_Mrad_s = 0\nkappa_Mrad_s = 1\n").unwrap();
        assert!(c.emission().is_err());
    }

    #[test]
    fn cavity_from_radius() {
        let c = Config::parse("[cavity]\nomega_Mrad_s = 10\ndelta_Mrad_s = 0.1\nradius_um = 160\n").unwrap();
        let cav = c.cavities(2).unwrap();
        assert!((cav[0].kappa - 60e6).abs() < 1e-3);
        assert!((cav[1].channel_g.g_cav - 17.3e6).abs() < 1e-3);
        let c = Config::parse("[cavity]\nomega_Mrad_s = 10\ndelta_Mrad_s = 0.1\nradius_um = 10\ng_Mrad_s = 1\n").unwrap();
        assert!(c.cavities(2).is_err());
    }

    #[test]
    fn run_requires_seed() {
        let c = Config::preset("bell_ideal").unwrap();
        let stripped = Config::parse(&preset_text("bell_ideal").unwrap().replace("seed = 1", "")).unwrap();
        assert_eq!(stripped.run(None).unwrap_err(), missing("run", "seed"));
        assert_eq!(stripped.run(Some(9)).unwrap().experiment.seed, 9);
        assert_eq!(c.run(Some(5)).unwrap().experiment.seed, 5);
    }
}
