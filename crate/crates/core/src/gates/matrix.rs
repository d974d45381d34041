use num_complex::Complex64 as C64;

use super::{Axis, GateError};

/// Dense complex square matrix acting on the ion-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    data: Vec<C64>,
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl GateMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), dim);
            m.data[i * dim..(i + 1) * dim].copy_from_slice(r);
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|x| x * factor).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Largest entry of `|U†U − I|`.
    pub fn unitarity_error(&self) -> f64 {
        self.dagger().matmul(self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|U − e^{iφ}V|` after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let overlap = other.dagger().matmul(self).trace();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        self.max_abs_diff(&other.scaled(phase))
    }

    /// `I ⊗ … ⊗ m ⊗ … ⊗ I` with `m` on `qubit` of `count`, qubit 0 most
    /// significant.
    pub fn embed_single(count: usize, qubit: usize, m: &[[C64; 2]; 2]) -> Self {
        let dim = 1usize << count;
        let bit = count - 1 - qubit;
        let mut out = Self::zeros(dim);
        for col in 0..dim {
            let b = (col >> bit) & 1;
            for (r, row) in m.iter().enumerate() {
                let v = row[b];
                if v != ZERO {
                    let rowi = (col & !(1 << bit)) | (r << bit);
                    out.data[rowi * dim + col] += v;
                }
            }
        }
        out
    }

    pub(crate) fn data(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<(), GateError> {
        if self.dim != dim {
            return Err(GateError::DimensionMismatch { expected: dim, got: self.dim });
        }
        Ok(())
    }
}

/// Pauli matrix in the `(|e⟩, |g⟩)` basis.
pub fn pauli(axis: Axis) -> [[C64; 2]; 2] {
    match axis {
        Axis::X => [[ZERO, ONE], [ONE, ZERO]],
        Axis::Y => [[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]],
        Axis::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

/// `exp(−i angle/2 σ_axis) = cos(angle/2) I − i sin(angle/2) σ_axis`.
pub fn rotation_matrix(axis: Axis, angle: f64) -> [[C64; 2]; 2] {
    let c = C64::new((angle / 2.0).cos(), 0.0);
    let ms = C64::new(0.0, -(angle / 2.0).sin());
    let p = pauli(axis);
    [[c + ms * p[0][0], ms * p[0][1]], [ms * p[1][0], c + ms * p[1][1]]]
}

/// `|g⟩ → (|g⟩ + |e⟩)/√2`, `|e⟩ → (|g⟩ − |e⟩)/√2`, in the `(|e⟩, |g⟩)` basis.
pub fn hadamard_matrix() -> [[C64; 2]; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [[C64::new(-r, 0.0), C64::new(r, 0.0)], [C64::new(r, 0.0), C64::new(r, 0.0)]]
}
