//! Physical constants (CODATA 2018) and unit helpers.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Bohr magneton, J/T.
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;

/// Coulomb constant times e², i.e. `e² / (4 π ε₀)`, in J m.
pub fn coulomb_strength() -> f64 {
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY)
}

/// The frequency unit used throughout the published tables: a quoted
/// "MHz" is read as 10⁶ rad/s and a quoted "kHz" as 10³ rad/s.
pub const MRAD_PER_S: f64 = 1e6;
pub const KRAD_PER_S: f64 = 1e3;
pub const MICROMETRE: f64 = 1e-6;

/// Text printed by `--explain-units`.
pub const UNITS_EXPLANATION: &str = "\
Units policy
  internal computation is SI: m, kg, s, and angular frequencies in rad/s.
  config keys carry their unit in the name: *_um (micrometres),
  *_Mrad_s (1e6 rad/s), *_rad_s, *_T_per_m, *_s, mass_amu.
  Frequencies quoted as \"MHz\" in the reference tables are angular:
  1 \"MHz\" = 1e6 rad/s and 1 \"kHz\" = 1e3 rad/s. Only this reading
  reproduces the tabulated equilibria (force balance) and epsilon values.
  Coupling columns named *_krad_s are J in 1e3 rad/s.
";
