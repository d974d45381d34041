//! Axial statics and dynamics of ions held one per microtrap.
//!
//! The potential is a sum of independent harmonic wells plus pairwise Coulomb
//! repulsion,
//!
//! ```text
//! V(z) = Σ_m ½ M ν_m² (z_m − z̄_m)² + Σ_{m<n} k_e / |z_m − z_n|
//! ```
//!
//! A uniform field gradient shifts each ion's qubit splitting by
//! `∂ω/∂z = g μ_B (∂B/∂z) / ħ`, which together with the shared vibrational
//! modes produces an effective Ising coupling
//!
//! ```text
//! J_ij = Σ_n (1/ν_n) S_ni S_nj (∂ω_i/∂z)(∂ω_j/∂z) Δz_n²,   Δz_n = sqrt(ħ / 2Mν_n)
//! ```

use serde::Serialize;
use thiserror::Error;

use crate::constants::{coulomb_strength, AMU, BOHR_MAGNETON, HBAR};
use crate::linalg::{self, SquareMatrix};

/// Newton iteration cap.
pub const MAX_NEWTON_ITERATIONS: usize = 200;
/// Force residual (N) below which the equilibrium is accepted.
pub const FORCE_TOLERANCE: f64 = 1e-20;
/// Newton step, relative to the natural Coulomb length, below which the
/// equilibrium is accepted.
pub const RELATIVE_STEP_TOLERANCE: f64 = 1e-14;
/// Two ions closer than this during the iteration count as a collision.
pub const COLLISION_GAP: f64 = 10e-9;
/// Fidelity restriction on the largest gradient Lamb-Dicke parameter.
pub const EPSILON_CUTOFF: f64 = 0.071;
/// Effective Lamb-Dicke parameters above this are flagged.
pub const LAMB_DICKE_WARNING: f64 = 0.123;

#[derive(Debug, Error)]
pub enum CrystalError {
    #[error("invalid crystal input: {0}")]
    InvalidInput(String),
    #[error("equilibrium solver did not converge after {iterations} iterations (residual {residual:e} N)")]
    SolverFailure { iterations: usize, residual: f64 },
    #[error("ions collided during the equilibrium iteration (gap {gap:e} m)")]
    Collision { gap: f64 },
    #[error("unstable configuration: Hessian eigenvalue {eigenvalue:e} N/m is not positive")]
    Unstable { eigenvalue: f64 },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

impl CrystalError {
    pub fn is_input_error(&self) -> bool {
        matches!(self, CrystalError::InvalidInput(_) | CrystalError::Unsupported(_))
    }
}

type Result<T> = std::result::Result<T, CrystalError>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IonSpecies {
    /// kg
    pub mass: f64,
    pub g_factor: f64,
    pub label: String,
}

impl IonSpecies {
    pub fn new(mass: f64, g_factor: f64, label: impl Into<String>) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(CrystalError::InvalidInput(format!("species mass must be > 0, got {mass}")));
        }
        if !(g_factor > 0.0 && g_factor.is_finite()) {
            return Err(CrystalError::InvalidInput(format!("g factor must be > 0, got {g_factor}")));
        }
        Ok(Self { mass, g_factor, label: label.into() })
    }

    /// ¹⁷¹Yb⁺ with the electron g factor of its field-sensitive hyperfine states.
    pub fn yb171() -> Self {
        Self { mass: 171.0 * AMU, g_factor: 2.0, label: "Yb171+".into() }
    }

    /// Qubit frequency gradient `g μ_B (∂B/∂z) / ħ` in rad/(s m).
    pub fn frequency_gradient(&self, grad: &FieldGradient) -> f64 {
        self.g_factor * BOHR_MAGNETON * grad.dbdz / HBAR
    }
}

impl Default for IonSpecies {
    fn default() -> Self {
        Self::yb171()
    }
}

/// Returns the single species shared by every ion. Chains of mixed species
/// would need a mass-weighted Hessian and are rejected.
pub fn common_species(ions: &[IonSpecies]) -> Result<IonSpecies> {
    let first = ions
        .first()
        .ok_or_else(|| CrystalError::InvalidInput("no ions given".into()))?;
    if ions.iter().any(|s| s != first) {
        return Err(CrystalError::Unsupported("mixed-species chains are not supported".into()));
    }
    Ok(first.clone())
}

/// Microtrap centres (m) and their angular trap frequencies (rad/s).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrapArray {
    centers: Vec<f64>,
    frequencies: Vec<f64>,
}

impl TrapArray {
    pub fn new(centers: Vec<f64>, frequencies: Vec<f64>) -> Result<Self> {
        if centers.is_empty() {
            return Err(CrystalError::InvalidInput("at least one trap is required".into()));
        }
        if centers.len() != frequencies.len() {
            return Err(CrystalError::InvalidInput(format!(
                "{} trap centres but {} trap frequencies",
                centers.len(),
                frequencies.len()
            )));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(CrystalError::InvalidInput("trap centres must be finite".into()));
        }
        if centers.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CrystalError::InvalidInput("trap centres must be strictly increasing".into()));
        }
        if let Some(f) = frequencies.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
            return Err(CrystalError::InvalidInput(format!("trap frequencies must be > 0, got {f}")));
        }
        Ok(Self { centers, frequencies })
    }

    /// `count` traps at spacing `spacing`, symmetric about the origin.
    pub fn evenly_spaced(spacing: f64, frequencies: Vec<f64>) -> Result<Self> {
        let n = frequencies.len();
        let mid = (n as f64 - 1.0) / 2.0;
        let centers = (0..n).map(|m| (m as f64 - mid) * spacing).collect();
        Self::new(centers, frequencies)
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            centers: self.centers.iter().map(|c| c + offset).collect(),
            frequencies: self.frequencies.clone(),
        }
    }

    /// Length at which Coulomb and trap forces balance for the softest trap.
    fn coulomb_length(&self, species: &IonSpecies) -> f64 {
        let nu_min = self.frequencies.iter().cloned().fold(f64::INFINITY, f64::min);
        (coulomb_strength() / (species.mass * nu_min * nu_min)).cbrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldGradient {
    /// T/m
    pub dbdz: f64,
    /// Field at the origin, T. Only absolute splittings depend on it.
    pub b0: f64,
}

impl FieldGradient {
    pub fn new(dbdz: f64) -> Result<Self> {
        if !(dbdz >= 0.0 && dbdz.is_finite()) {
            return Err(CrystalError::InvalidInput(format!("field gradient must be >= 0, got {dbdz}")));
        }
        Ok(Self { dbdz, b0: 0.0 })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Equilibrium {
    /// m, strictly increasing
    pub positions: Vec<f64>,
    /// `z_m − z̄_m` in m, signed along +z.
    pub deviations: Vec<f64>,
    /// Neighbour distances `z_{m+1} − z_m` in m.
    pub gaps: Vec<f64>,
    /// Largest |force| at the returned positions, N.
    pub residual: f64,
    pub iterations: usize,
}

impl Equilibrium {
    /// Deviations with the sign chosen so that displacement away from the
    /// middle of the array is positive. An ion exactly at the middle keeps
    /// its raw sign.
    pub fn outward_deviations(&self, traps: &TrapArray) -> Vec<f64> {
        let c = traps.centers();
        let mid = 0.5 * (c[0] + c[c.len() - 1]);
        self.deviations
            .iter()
            .zip(c)
            .map(|(&d, &z)| if z < mid { -d } else { d })
            .collect()
    }
}

/// Potential energy in J.
pub fn potential_energy(positions: &[f64], traps: &TrapArray, species: &IonSpecies) -> f64 {
    let ke = coulomb_strength();
    let mut v = 0.0;
    for (m, &z) in positions.iter().enumerate() {
        let nu = traps.frequencies[m];
        let dz = z - traps.centers[m];
        v += 0.5 * species.mass * nu * nu * dz * dz;
        for &w in &positions[m + 1..] {
            v += ke / (z - w).abs();
        }
    }
    v
}

/// Gradient of the potential, i.e. minus the force on each ion, in N.
pub fn potential_gradient(positions: &[f64], traps: &TrapArray, species: &IonSpecies) -> Vec<f64> {
    let ke = coulomb_strength();
    let n = positions.len();
    let mut g = vec![0.0; n];
    for m in 0..n {
        let nu = traps.frequencies[m];
        g[m] += species.mass * nu * nu * (positions[m] - traps.centers[m]);
        for k in (m + 1)..n {
            let r = positions[m] - positions[k];
            let f = ke * r.signum() / (r * r);
            g[m] -= f;
            g[k] += f;
        }
    }
    g
}

/// Hessian `∂²V/∂z_m∂z_n` in N/m.
pub fn hessian(positions: &[f64], traps: &TrapArray, species: &IonSpecies) -> SquareMatrix {
    let ke = coulomb_strength();
    let n = positions.len();
    let mut k = SquareMatrix::zeros(n);
    for m in 0..n {
        let nu = traps.frequencies[m];
        k[(m, m)] += species.mass * nu * nu;
        for j in (m + 1)..n {
            let r = (positions[m] - positions[j]).abs();
            let c = 2.0 * ke / (r * r * r);
            k[(m, m)] += c;
            k[(j, j)] += c;
            k[(m, j)] -= c;
            k[(j, m)] -= c;
        }
    }
    k
}

fn min_gap(positions: &[f64]) -> f64 {
    positions
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Force balance by Newton's method with the analytic Hessian, starting from
/// the trap centres. Steps are halved whenever a full step would reorder the
/// ions or raise the force residual.
pub fn solve_equilibrium(traps: &TrapArray, species: &IonSpecies) -> Result<Equilibrium> {
    let length = traps.coulomb_length(species);
    let mut z = traps.centers.to_vec();
    let mut grad = potential_gradient(&z, traps, species);
    let mut residual = max_abs(&grad);

    for iteration in 0..MAX_NEWTON_ITERATIONS {
        if traps.len() == 1 || residual == 0.0 {
            return Ok(finish(z, traps, species, iteration));
        }
        let k = hessian(&z, traps, species);
        let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
        let step = linalg::solve(&k, &neg).ok_or(CrystalError::SolverFailure {
            iterations: iteration,
            residual,
        })?;

        let mut alpha = 1.0;
        let mut accepted = None;
        let mut last_gap = f64::INFINITY;
        for _ in 0..60 {
            let trial: Vec<f64> = z.iter().zip(&step).map(|(a, s)| a + alpha * s).collect();
            let gap = min_gap(&trial);
            last_gap = gap;
            if gap >= COLLISION_GAP {
                let g = potential_gradient(&trial, traps, species);
                let r = max_abs(&g);
                if r < residual || r < FORCE_TOLERANCE || alpha * max_abs(&step) / length < RELATIVE_STEP_TOLERANCE {
                    accepted = Some((trial, g, r));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((trial, g, r)) = accepted else {
            if last_gap < COLLISION_GAP {
                return Err(CrystalError::Collision { gap: last_gap });
            }
            // no descent possible: the residual sits at the rounding floor
            if max_abs(&step) / length < 1e-10 {
                return Ok(finish(z, traps, species, iteration + 1));
            }
            return Err(CrystalError::SolverFailure { iterations: iteration + 1, residual });
        };

        let converged = residual < FORCE_TOLERANCE || alpha * max_abs(&step) / length < RELATIVE_STEP_TOLERANCE;
        z = trial;
        grad = g;
        residual = r;
        if converged {
            return Ok(finish(z, traps, species, iteration + 1));
        }
    }
    Err(CrystalError::SolverFailure { iterations: MAX_NEWTON_ITERATIONS, residual })
}

fn finish(positions: Vec<f64>, traps: &TrapArray, species: &IonSpecies, iterations: usize) -> Equilibrium {
    let residual = max_abs(&potential_gradient(&positions, traps, species));
    let deviations = positions.iter().zip(traps.centers()).map(|(z, c)| z - c).collect();
    let gaps = positions.windows(2).map(|w| w[1] - w[0]).collect();
    Equilibrium { positions, deviations, gaps, residual, iterations }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalModes {
    /// Mode angular frequencies ν_n in rad/s, ascending.
    pub mode_freqs: Vec<f64>,
    /// Orthogonal mode matrix: row n is mode n, column m is ion m.
    pub mode_matrix: SquareMatrix,
    /// Ground-state spreads Δz_n = sqrt(ħ / 2Mν_n) in m.
    pub spreads: Vec<f64>,
    pub mass: f64,
}

impl NormalModes {
    pub fn len(&self) -> usize {
        self.mode_freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mode_freqs.is_empty()
    }
}

pub fn normal_modes(eq: &Equilibrium, traps: &TrapArray, species: &IonSpecies) -> Result<NormalModes> {
    let k = hessian(&eq.positions, traps, species);
    let eig = linalg::symmetric_eigen(&k);
    if let Some(&bad) = eig.values.iter().find(|&&v| v <= 0.0) {
        return Err(CrystalError::Unstable { eigenvalue: bad });
    }
    let mode_freqs: Vec<f64> = eig.values.iter().map(|v| (v / species.mass).sqrt()).collect();
    let spreads = mode_freqs
        .iter()
        .map(|nu| (HBAR / (2.0 * species.mass * nu)).sqrt())
        .collect();
    Ok(NormalModes { mode_freqs, mode_matrix: eig.vectors, spreads, mass: species.mass })
}

/// Pairwise Ising couplings in rad/s, with `H_I = −Σ_{i<j} (J_ij/2) σz^i σz^j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingMatrix {
    j: SquareMatrix,
}

impl CouplingMatrix {
    /// Builds a coupling matrix from an arbitrary square matrix, symmetrising
    /// from the upper triangle and zeroing the diagonal.
    pub fn from_matrix(m: &SquareMatrix) -> Self {
        let n = m.dim();
        let mut j = SquareMatrix::zeros(n);
        for a in 0..n {
            for b in (a + 1)..n {
                j[(a, b)] = m[(a, b)];
                j[(b, a)] = m[(a, b)];
            }
        }
        Self { j }
    }

    /// Uniform all-to-all coupling.
    pub fn uniform(n: usize, value: f64) -> Self {
        let mut m = SquareMatrix::zeros(n);
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    m[(a, b)] = value;
                }
            }
        }
        Self { j: m }
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.j[(a, b)]
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.j
    }
}

pub fn coupling_matrix(modes: &NormalModes, grad: &FieldGradient, species: &IonSpecies) -> CouplingMatrix {
    let n = modes.len();
    let dw = vec![species.frequency_gradient(grad); n];
    let s = &modes.mode_matrix;
    let mut j = SquareMatrix::zeros(n);
    for a in 0..n {
        for b in (a + 1)..n {
            let sum: f64 = (0..n)
                .map(|k| s[(k, a)] * s[(k, b)] * modes.spreads[k] * modes.spreads[k] / modes.mode_freqs[k])
                .sum();
            let v = sum * dw[a] * dw[b];
            j[(a, b)] = v;
            j[(b, a)] = v;
        }
    }
    CouplingMatrix { j }
}

/// Gradient-induced Lamb-Dicke parameters, stored mode × ion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonMatrix {
    /// `eps[(l, n)]` couples ion n to mode l.
    pub eps: SquareMatrix,
    pub eps_max: f64,
}

impl EpsilonMatrix {
    pub fn within_cutoff(&self) -> bool {
        self.eps_max <= EPSILON_CUTOFF
    }
}

/// `ε_nl = |S_ln| (∂ω_n/∂z) Δz_l / ν_l`.
pub fn epsilon_matrix(modes: &NormalModes, grad: &FieldGradient, species: &IonSpecies) -> EpsilonMatrix {
    let n = modes.len();
    let dw = species.frequency_gradient(grad);
    let mut eps = SquareMatrix::zeros(n);
    let mut eps_max = 0.0_f64;
    for l in 0..n {
        for ion in 0..n {
            let e = modes.mode_matrix[(l, ion)].abs() * dw * modes.spreads[l] / modes.mode_freqs[l];
            eps[(l, ion)] = e;
            eps_max = eps_max.max(e);
        }
    }
    EpsilonMatrix { eps, eps_max }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambDicke {
    pub value: f64,
    pub exceeds_bound: bool,
}

/// `η₁ = sqrt(η² + ε²)`; flagged above [`LAMB_DICKE_WARNING`].
pub fn effective_lamb_dicke(eta: f64, eps_max: f64) -> LambDicke {
    let value = eta.hypot(eps_max);
    LambDicke { value, exceeds_bound: value > LAMB_DICKE_WARNING }
}

/// Everything the coupling tables need for one trap configuration.
#[derive(Clone, Debug, Serialize)]
pub struct CrystalAnalysis {
    pub equilibrium: Equilibrium,
    pub modes: NormalModes,
    pub couplings: CouplingMatrix,
    pub epsilon: EpsilonMatrix,
}

impl CrystalAnalysis {
    pub fn compute(traps: &TrapArray, grad: &FieldGradient, species: &IonSpecies) -> Result<Self> {
        let equilibrium = solve_equilibrium(traps, species)?;
        let modes = normal_modes(&equilibrium, traps, species)?;
        let couplings = coupling_matrix(&modes, grad, species);
        let epsilon = epsilon_matrix(&modes, grad, species);
        Ok(Self { equilibrium, modes, couplings, epsilon })
    }
}
