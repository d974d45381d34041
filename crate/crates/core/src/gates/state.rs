use num_complex::Complex64 as C64;
use serde::Serialize;

use super::matrix::{hadamard_matrix, rotation_matrix, GateMatrix};
use super::{Axis, GateError};
use crate::crystal::CouplingMatrix;

/// Dimension cap: 6 ions and 6 photons, 4096 amplitudes.
pub const MAX_IONS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SpinLevel {
    E,
    G,
}

impl SpinLevel {
    pub fn bit(self) -> usize {
        match self {
            SpinLevel::E => 0,
            SpinLevel::G => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            SpinLevel::E
        } else {
            SpinLevel::G
        }
    }

    pub fn label(self) -> char {
        match self {
            SpinLevel::E => 'e',
            SpinLevel::G => 'g',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Polarization {
    SigmaPlus,
    SigmaZero,
}

impl Polarization {
    pub fn bit(self) -> usize {
        match self {
            Polarization::SigmaPlus => 0,
            Polarization::SigmaZero => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Polarization::SigmaPlus
        } else {
            Polarization::SigmaZero
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Polarization::SigmaPlus => "s+",
            Polarization::SigmaZero => "s0",
        }
    }
}

/// State of N ion qubits and N photon polarisation qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinPhotonState {
    ions: usize,
    amps: Vec<C64>,
}

impl SpinPhotonState {
    pub fn new(ions: usize, amps: Vec<C64>) -> Result<Self, GateError> {
        if ions == 0 || ions > MAX_IONS {
            return Err(GateError::TooManyIons(ions));
        }
        let dim = 1usize << (2 * ions);
        if amps.len() != dim {
            return Err(GateError::DimensionMismatch { expected: dim, got: amps.len() });
        }
        Ok(Self { ions, amps })
    }

    /// Product state from per-site amplitudes indexed by `spin_bit << 1 | photon_bit`.
    pub fn from_sites(sites: &[[C64; 4]]) -> Result<Self, GateError> {
        let n = sites.len();
        if n == 0 || n > MAX_IONS {
            return Err(GateError::TooManyIons(n));
        }
        let mut amps = vec![C64::new(1.0, 0.0)];
        for site in sites {
            amps = amps.iter().flat_map(|a| site.iter().map(move |s| a * s)).collect();
        }
        Ok(Self { ions: n, amps })
    }

    pub fn basis(spins: &[SpinLevel], photons: &[Polarization]) -> Result<Self, GateError> {
        if spins.len() != photons.len() {
            return Err(GateError::DimensionMismatch { expected: spins.len(), got: photons.len() });
        }
        let n = spins.len();
        if n == 0 || n > MAX_IONS {
            return Err(GateError::TooManyIons(n));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << (2 * n)];
        amps[Self::index_of(spins, photons)] = C64::new(1.0, 0.0);
        Ok(Self { ions: n, amps })
    }

    pub fn ion_count(&self) -> usize {
        self.ions
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn index_of(spins: &[SpinLevel], photons: &[Polarization]) -> usize {
        spins
            .iter()
            .zip(photons)
            .fold(0, |acc, (s, p)| (acc << 2) | (s.bit() << 1) | p.bit())
    }

    pub fn amplitude(&self, spins: &[SpinLevel], photons: &[Polarization]) -> C64 {
        self.amps[Self::index_of(spins, photons)]
    }

    /// Spin value of `ion` in basis index `idx`.
    pub fn spin_bit(&self, idx: usize, ion: usize) -> usize {
        (idx >> (2 * (self.ions - 1 - ion) + 1)) & 1
    }

    pub fn photon_bit(&self, idx: usize, ion: usize) -> usize {
        (idx >> (2 * (self.ions - 1 - ion))) & 1
    }

    /// Spin-register index (ion 0 most significant) of basis index `idx`.
    pub fn spin_index(&self, idx: usize) -> usize {
        (0..self.ions).fold(0, |acc, ion| (acc << 1) | self.spin_bit(idx, ion))
    }

    pub fn photon_index(&self, idx: usize) -> usize {
        (0..self.ions).fold(0, |acc, ion| (acc << 1) | self.photon_bit(idx, ion))
    }

    fn check_ion(&self, ion: usize) -> Result<(), GateError> {
        if ion >= self.ions {
            return Err(GateError::IndexOutOfRange { ion, count: self.ions });
        }
        Ok(())
    }

    /// Applies a 2×2 matrix to the spin of `ion`.
    pub fn apply_spin_matrix(&mut self, ion: usize, m: &[[C64; 2]; 2]) -> Result<(), GateError> {
        self.check_ion(ion)?;
        let bit = 1usize << (2 * (self.ions - 1 - ion) + 1);
        for i in 0..self.amps.len() {
            if i & bit != 0 {
                continue;
            }
            let j = i | bit;
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a + m[0][1] * b;
            self.amps[j] = m[1][0] * a + m[1][1] * b;
        }
        Ok(())
    }

    /// `exp(−i angle/2 σ_axis)` on one ion; photons untouched.
    pub fn apply_rotation(&mut self, ion: usize, axis: Axis, angle: f64) -> Result<(), GateError> {
        self.apply_spin_matrix(ion, &rotation_matrix(axis, angle))
    }

    pub fn apply_hadamard(&mut self, ion: usize) -> Result<(), GateError> {
        self.apply_spin_matrix(ion, &hadamard_matrix())
    }

    pub fn apply_global_phase(&mut self, angle: f64) {
        let p = C64::from_polar(1.0, angle);
        self.amps.iter_mut().for_each(|a| *a *= p);
    }

    /// Free Ising evolution for `t` seconds under `J`.
    pub fn ising_evolve(&mut self, couplings: &CouplingMatrix, t: f64) -> Result<(), GateError> {
        if couplings.dim() != self.ions {
            return Err(GateError::DimensionMismatch { expected: self.ions, got: couplings.dim() });
        }
        let phases = ising_phases(couplings, t);
        for (i, a) in self.amps.iter_mut().enumerate() {
            let spin = (0..self.ions).fold(0, |acc, ion| (acc << 1) | ((i >> (2 * (self.ions - 1 - ion) + 1)) & 1));
            *a *= phases[spin];
        }
        Ok(())
    }

    /// Applies a gate on the spin register (dimension `2^N`).
    pub fn apply_ion_unitary(&mut self, u: &GateMatrix) -> Result<(), GateError> {
        u.check_dim(1 << self.ions)?;
        let photon_dim = 1usize << self.ions;
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        let index = |spin: usize, photon: usize| -> usize {
            (0..self.ions).fold(0, |acc, ion| {
                let s = (spin >> (self.ions - 1 - ion)) & 1;
                let p = (photon >> (self.ions - 1 - ion)) & 1;
                (acc << 2) | (s << 1) | p
            })
        };
        let data = u.data();
        let dim = u.dim();
        for p in 0..photon_dim {
            for col in 0..dim {
                let a = self.amps[index(col, p)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for row in 0..dim {
                    let m = data[row * dim + col];
                    if m != C64::new(0.0, 0.0) {
                        out[index(row, p)] += m * a;
                    }
                }
            }
        }
        self.amps = out;
        Ok(())
    }

    /// Largest amplitude difference to another state.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Diagonal of the free-evolution unitary over the spin register.
pub(crate) fn ising_phases(couplings: &CouplingMatrix, t: f64) -> Vec<C64> {
    let n = couplings.dim();
    (0..1usize << n)
        .map(|spin| {
            let z = |q: usize| if (spin >> (n - 1 - q)) & 1 == 0 { 1.0 } else { -1.0 };
            let mut phase = 0.0;
            for a in 0..n {
                for b in (a + 1)..n {
                    phase += 0.5 * couplings.get(a, b) * z(a) * z(b);
                }
            }
            C64::from_polar(1.0, phase * t)
        })
        .collect()
}
