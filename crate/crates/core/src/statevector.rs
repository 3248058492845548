//! Dense statevector simulation for the small gate set the arithmetic circuits use.
//!
//! Qubit 0 is the least significant bit of the basis index. Registers carry their
//! own bit order, so nothing in here knows about operand layout.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Register};
use crate::error::{Error, Result};

/// Default hard cap on simulated qubits (2^26 amplitudes is 1 GiB).
pub const DEFAULT_QUBIT_CAP: usize = 26;

/// Readouts of the deterministic circuits built here must beat this probability.
pub const DETERMINISTIC_THRESHOLD: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    X(usize),
    Phase {
        target: usize,
        angle: f64,
    },
    CPhase {
        control: usize,
        target: usize,
        angle: f64,
    },
    CCPhase {
        control1: usize,
        control2: usize,
        target: usize,
        angle: f64,
    },
    Swap(usize, usize),
}

impl Gate {
    /// Short mnemonic, also used as the gate-list keyword.
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::Phase { .. } => "P",
            Gate::CPhase { .. } => "CP",
            Gate::CCPhase { .. } => "CCP",
            Gate::Swap(..) => "SWAP",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) => vec![q],
            Gate::Phase { target, .. } => vec![target],
            Gate::CPhase {
                control, target, ..
            } => vec![control, target],
            Gate::CCPhase {
                control1,
                control2,
                target,
                ..
            } => vec![control1, control2, target],
            Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Phase { angle, .. }
            | Gate::CPhase { angle, .. }
            | Gate::CCPhase { angle, .. } => Some(angle),
            _ => None,
        }
    }

    /// The inverse gate: rotations negate their angle, the rest are self-inverse.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Phase { target, angle } => Gate::Phase {
                target,
                angle: -angle,
            },
            Gate::CPhase {
                control,
                target,
                angle,
            } => Gate::CPhase {
                control,
                target,
                angle: -angle,
            },
            Gate::CCPhase {
                control1,
                control2,
                target,
                angle,
            } => Gate::CCPhase {
                control1,
                control2,
                target,
                angle: -angle,
            },
            g => g,
        }
    }

    /// Checks qubit bounds, distinctness and angle finiteness against a register file of `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::RepeatedQubit(q));
            }
        }
        match self.angle() {
            Some(a) if !a.is_finite() => Err(Error::NonFiniteAngle(a)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qubits = self
            .qubits()
            .iter()
            .map(|q| q.to_string())
            .collect::<Vec<_>>()
            .join(",");
        match self.angle() {
            Some(a) => write!(f, "{} {},{:.16e}", self.name(), qubits, a),
            None => write!(f, "{} {}", self.name(), qubits),
        }
    }
}

/// Most likely value of a register and its marginal probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Readout {
    pub value: u64,
    pub probability: f64,
}

#[derive(Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateVector")
            .field("num_qubits", &self.num_qubits)
            .field("len", &self.amplitudes.len())
            .finish()
    }
}

impl StateVector {
    /// Computational basis state `|basis_index>` over `num_qubits` qubits.
    pub fn basis(num_qubits: usize, basis_index: u64) -> Result<Self> {
        Self::basis_with_cap(num_qubits, basis_index, DEFAULT_QUBIT_CAP)
    }

    pub fn basis_with_cap(num_qubits: usize, basis_index: u64, cap: usize) -> Result<Self> {
        if num_qubits > cap {
            return Err(Error::QubitCap {
                requested: num_qubits,
                cap,
            });
        }
        let dim = 1usize << num_qubits;
        if basis_index >= dim as u64 {
            return Err(Error::BasisOutOfRange {
                index: basis_index,
                num_qubits,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[basis_index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes. The length must be a power of two; normalization is the caller's concern.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "amplitude vector length {len} is not a power of two"
            )));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    fn apply_unchecked(&mut self, gate: &Gate) {
        let amps = &mut self.amplitudes;
        match *gate {
            Gate::H(q) => {
                let bit = 1usize << q;
                for base in (0..amps.len()).step_by(bit << 1) {
                    for i in base..base + bit {
                        let a = amps[i];
                        let b = amps[i | bit];
                        amps[i] = (a + b) * FRAC_1_SQRT_2;
                        amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::X(q) => {
                let bit = 1usize << q;
                for base in (0..amps.len()).step_by(bit << 1) {
                    for i in base..base + bit {
                        amps.swap(i, i | bit);
                    }
                }
            }
            Gate::Phase { target, angle } => phase_on_mask(amps, 1 << target, angle),
            Gate::CPhase {
                control,
                target,
                angle,
            } => phase_on_mask(amps, (1 << control) | (1 << target), angle),
            Gate::CCPhase {
                control1,
                control2,
                target,
                angle,
            } => phase_on_mask(
                amps,
                (1 << control1) | (1 << control2) | (1 << target),
                angle,
            ),
            Gate::Swap(a, b) => {
                let (ba, bb) = (1usize << a, 1usize << b);
                for i in 0..amps.len() {
                    if i & ba != 0 && i & bb == 0 {
                        amps.swap(i, i ^ ba ^ bb);
                    }
                }
            }
        }
    }

    /// Applies every gate of `circuit` in order.
    pub fn run(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::QubitCountMismatch {
                circuit: circuit.num_qubits(),
                state: self.num_qubits,
            });
        }
        // Circuits validate gates on append.
        for gate in circuit.gates() {
            self.apply_unchecked(gate);
        }
        Ok(())
    }

    /// Marginal probability of every value of `register`, indexed by value.
    pub fn register_distribution(&self, register: &Register) -> Result<Vec<f64>> {
        if register.end() > self.num_qubits {
            return Err(Error::RegisterOutOfRange {
                name: register.name().to_string(),
                end: register.end(),
                num_qubits: self.num_qubits,
            });
        }
        let mut probs = vec![0.0; 1usize << register.width()];
        for (index, amp) in self.amplitudes.iter().enumerate() {
            let p = amp.norm_sqr();
            if p != 0.0 {
                probs[register.extract(index as u64) as usize] += p;
            }
        }
        Ok(probs)
    }

    /// Most probable value of `register`, marginalizing all other qubits.
    pub fn readout(&self, register: &Register) -> Result<Readout> {
        let probs = self.register_distribution(register)?;
        let (value, probability) = probs
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (v, p)| {
                if p > best.1 {
                    (v, p)
                } else {
                    best
                }
            });
        Ok(Readout {
            value: value as u64,
            probability,
        })
    }

    /// Like [`readout`](Self::readout) but fails unless the outcome is deterministic.
    pub fn readout_deterministic(&self, register: &Register) -> Result<Readout> {
        let r = self.readout(register)?;
        if r.probability <= DETERMINISTIC_THRESHOLD {
            return Err(Error::NonDeterministic {
                register: register.name().to_string(),
                probability: r.probability,
            });
        }
        Ok(r)
    }
}

fn phase_on_mask(amps: &mut [Complex64], mask: usize, angle: f64) {
    let factor = Complex64::from_polar(1.0, angle);
    // Walk only indices with the lowest mask bit set.
    let low = mask & mask.wrapping_neg();
    for (chunk_start, chunk) in amps.chunks_mut(low << 1).enumerate() {
        let base = chunk_start * (low << 1) + low;
        for (i, amp) in chunk[low..].iter_mut().enumerate() {
            if (base + i) & mask == mask {
                *amp *= factor;
            }
        }
    }
}

/// `|basis_index>` over `num_qubits` qubits.
pub fn init_basis_state(num_qubits: usize, basis_index: u64) -> Result<StateVector> {
    StateVector::basis(num_qubits, basis_index)
}

/// Returns `state` after `gate`.
pub fn apply_gate(mut state: StateVector, gate: &Gate) -> Result<StateVector> {
    state.apply(gate)?;
    Ok(state)
}

/// Returns `state` after every gate of `circuit`.
pub fn run_circuit(mut state: StateVector, circuit: &Circuit) -> Result<StateVector> {
    state.run(circuit)?;
    Ok(state)
}

/// Most probable value of `register` and its probability.
pub fn readout(state: &StateVector, register: &Register) -> Result<Readout> {
    state.readout(register)
}
