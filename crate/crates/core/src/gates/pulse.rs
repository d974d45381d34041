use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use super::matrix::{rotation_matrix, GateMatrix};
use super::state::{ising_phases, SpinPhotonState};
use super::GateError;
use crate::crystal::CouplingMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn label(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(format!("unknown axis `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PulseElement {
    /// `exp(−i angle/2 σ_axis)` on one ion, instantaneous.
    Rotation { ion: usize, axis: Axis, angle: f64 },
    /// Free evolution under the full coupling matrix.
    IsingDelay { duration: f64 },
    /// Multiplies the state by `e^{i angle}`.
    GlobalPhase { angle: f64 },
}

impl PulseElement {
    fn validate(&self, ions: usize) -> Result<(), GateError> {
        match *self {
            PulseElement::Rotation { ion, .. } if ion >= ions => Err(GateError::IndexOutOfRange { ion, count: ions }),
            PulseElement::IsingDelay { duration } if !(duration >= 0.0) || !duration.is_finite() => {
                Err(GateError::InvalidElement(format!("delay duration must be finite and >= 0, got {duration:e}")))
            }
            _ => Ok(()),
        }
    }

    fn apply_to_state(&self, state: &mut SpinPhotonState, couplings: &CouplingMatrix) -> Result<(), GateError> {
        match *self {
            PulseElement::Rotation { ion, axis, angle } => state.apply_rotation(ion, axis, angle),
            PulseElement::IsingDelay { duration } => state.ising_evolve(couplings, duration),
            PulseElement::GlobalPhase { angle } => {
                state.apply_global_phase(angle);
                Ok(())
            }
        }
    }

    fn matrix(&self, couplings: &CouplingMatrix) -> GateMatrix {
        let n = couplings.dim();
        match *self {
            PulseElement::Rotation { ion, axis, angle } => GateMatrix::embed_single(n, ion, &rotation_matrix(axis, angle)),
            PulseElement::IsingDelay { duration } => GateMatrix::from_diagonal(&ising_phases(couplings, duration)),
            PulseElement::GlobalPhase { angle } => GateMatrix::identity(1 << n).scaled(C64::from_polar(1.0, angle)),
        }
    }
}

impl fmt::Display for PulseElement {
    /// One line of the text format. Floats use the shortest representation
    /// that parses back to the same value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PulseElement::Rotation { ion, axis, angle } => write!(f, "ROT {ion} {} {angle:e}", axis.label()),
            PulseElement::IsingDelay { duration } => write!(f, "ZZ {duration:e}"),
            PulseElement::GlobalPhase { angle } => write!(f, "PHASE {angle:e}"),
        }
    }
}

impl FromStr for PulseElement {
    type Err = String;
    fn from_str(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}"));
        match fields.as_slice() {
            ["ROT", ion, axis, angle] => Ok(PulseElement::Rotation {
                ion: ion.parse().map_err(|e| format!("bad ion index `{ion}`: {e}"))?,
                axis: axis.parse()?,
                angle: num(angle)?,
            }),
            ["ZZ", d] => {
                let duration = num(d)?;
                if !(duration >= 0.0) {
                    return Err(format!("negative delay {duration:e}"));
                }
                Ok(PulseElement::IsingDelay { duration })
            }
            ["PHASE", a] => Ok(PulseElement::GlobalPhase { angle: num(a)? }),
            _ => Err(format!("unrecognised element `{line}`")),
        }
    }
}

/// Pulse sequence written like an operator product: the first element is
/// applied last.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PulseSequence {
    elements: Vec<PulseElement>,
}

impl PulseSequence {
    pub fn new(elements: Vec<PulseElement>) -> Self {
        Self { elements }
    }

    /// Builds a sequence from elements listed in the order they act.
    pub fn from_application_order(mut elements: Vec<PulseElement>) -> Self {
        elements.reverse();
        Self { elements }
    }

    pub fn elements(&self) -> &[PulseElement] {
        &self.elements
    }

    pub fn applied_order(&self) -> impl Iterator<Item = &PulseElement> {
        self.elements.iter().rev()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `self` followed in time by `later`, i.e. the operator product `later · self`.
    pub fn then(&self, later: &PulseSequence) -> PulseSequence {
        let mut elements = later.elements.clone();
        elements.extend_from_slice(&self.elements);
        PulseSequence { elements }
    }

    /// Total free-evolution time; rotations are instantaneous.
    pub fn total_duration(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| match e {
                PulseElement::IsingDelay { duration } => *duration,
                _ => 0.0,
            })
            .sum()
    }

    /// Time spent in rotations if a π rotation takes `pi_pulse` seconds.
    pub fn rotation_time(&self, pi_pulse: f64) -> f64 {
        self.elements
            .iter()
            .map(|e| match e {
                PulseElement::Rotation { angle, .. } => angle.abs() / std::f64::consts::PI * pi_pulse,
                _ => 0.0,
            })
            .sum()
    }

    pub fn rotation_count(&self) -> usize {
        self.elements.iter().filter(|e| matches!(e, PulseElement::Rotation { .. })).count()
    }

    pub fn duration_with_pulses(&self, pi_pulse: f64) -> f64 {
        self.total_duration() + self.rotation_time(pi_pulse)
    }

    pub fn validate(&self, ions: usize) -> Result<(), GateError> {
        self.elements.iter().try_for_each(|e| e.validate(ions))
    }

    /// Runs the sequence on a spin-photon state with all couplings on during delays.
    pub fn apply(&self, state: &mut SpinPhotonState, couplings: &CouplingMatrix) -> Result<(), GateError> {
        self.validate(state.ion_count())?;
        for e in self.applied_order() {
            e.apply_to_state(state, couplings)?;
        }
        Ok(())
    }

    /// Text format, one element per line in operator order.
    pub fn to_text(&self) -> String {
        self.elements.iter().map(|e| format!("{e}\n")).collect()
    }

    /// Parses the text format. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, GateError> {
        let mut elements = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let e = line.parse().map_err(|message| GateError::Parse { line: i + 1, message })?;
            elements.push(e);
        }
        Ok(Self { elements })
    }
}

/// Unitary of the sequence on the spin register of `couplings.dim()` ions.
pub fn sequence_unitary(seq: &PulseSequence, couplings: &CouplingMatrix) -> Result<GateMatrix, GateError> {
    let n = couplings.dim();
    seq.validate(n)?;
    let mut u = GateMatrix::identity(1 << n);
    for e in seq.applied_order() {
        u = e.matrix(couplings).matmul(&u);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_sequence_is_identity() {
        let j = CouplingMatrix::uniform(2, 1.0);
        let u = sequence_unitary(&PulseSequence::default(), &j).unwrap();
        assert_eq!(u, GateMatrix::identity(4));
    }

    #[test]
    fn operator_order() {
        // X(π/2) then Z(π/2) in time equals Z·X as a product
        let seq = PulseSequence::from_application_order(vec![
            PulseElement::Rotation { ion: 0, axis: Axis::X, angle: 0.5 },
            PulseElement::Rotation { ion: 0, axis: Axis::Z, angle: 0.5 },
        ]);
        assert!(matches!(seq.elements()[0], PulseElement::Rotation { axis: Axis::Z, .. }));
        let j = CouplingMatrix::uniform(1, 0.0);
        let u = sequence_unitary(&seq, &j).unwrap();
        let x = GateMatrix::embed_single(1, 0, &rotation_matrix(Axis::X, 0.5));
        let z = GateMatrix::embed_single(1, 0, &rotation_matrix(Axis::Z, 0.5));
        assert!(u.max_abs_diff(&z.matmul(&x)) < 1e-15);
    }

    #[test]
    fn durations() {
        let seq = PulseSequence::new(vec![
            PulseElement::IsingDelay { duration: 1e-4 },
            PulseElement::Rotation { ion: 0, axis: Axis::X, angle: std::f64::consts::PI },
            PulseElement::IsingDelay { duration: 2e-4 },
            PulseElement::GlobalPhase { angle: 1.0 },
        ]);
        assert!((seq.total_duration() - 3e-4).abs() < 1e-18);
        assert!((seq.duration_with_pulses(1e-5) - 3.1e-4).abs() < 1e-17);
        assert_eq!(seq.rotation_count(), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(PulseSequence::parse("ZZ -1"), Err(GateError::Parse { line: 1, .. })));
        assert!(matches!(PulseSequence::parse("\nROT 0 w 1"), Err(GateError::Parse { line: 2, .. })));
        assert!(PulseSequence::parse("FOO").is_err());
        let ok = PulseSequence::parse("# comment\nPHASE 1.5\n\nROT 2 y -3e-1\n").unwrap();
        assert_eq!(ok.elements().len(), 2);
        let j = CouplingMatrix::uniform(2, 1.0);
        assert!(matches!(sequence_unitary(&ok, &j), Err(GateError::IndexOutOfRange { ion: 2, count: 2 })));
    }

    fn element() -> impl Strategy<Value = PulseElement> {
        prop_oneof![
            (0usize..6, 0usize..3, any::<f64>().prop_filter("finite", |x| x.is_finite()))
                .prop_map(|(ion, a, angle)| PulseElement::Rotation { ion, axis: [Axis::X, Axis::Y, Axis::Z][a], angle }),
            (0.0..1.0f64).prop_map(|duration| PulseElement::IsingDelay { duration }),
            any::<f64>().prop_filter("finite", |x| x.is_finite()).prop_map(|angle| PulseElement::GlobalPhase { angle }),
        ]
    }

    proptest! {
        #[test]
        fn text_round_trip_is_lossless(elems in proptest::collection::vec(element(), 0..20)) {
            let seq = PulseSequence::new(elems);
            let back = PulseSequence::parse(&seq.to_text()).unwrap();
            prop_assert_eq!(back, seq);
        }
    }
}
