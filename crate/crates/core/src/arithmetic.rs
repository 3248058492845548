//! Fourier-basis adders and multipliers.
//!
//! Every construction works the same way: QFT the accumulator, add phases, IQFT.
//! After the QFT the accumulator qubit of significance `p` carries `2*pi*v / 2^(p+1)`,
//! so adding `x` means rotating that qubit by `2*pi*x / 2^(p+1)`. All arithmetic is
//! modulo `2^width` of the accumulator.
//!
//! Angles are reduced modulo `2*pi` with integer arithmetic before conversion to
//! `f64`, so even large multiplicands produce exact, small angles.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::circuit::{BitOrder, Circuit, Register, RegisterRole};
use crate::error::{Error, Result};
use crate::qft::{append_iqft, append_qft};
use crate::statevector::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UIntOperand {
    value: u64,
    width: u32,
}

impl UIntOperand {
    pub fn new(value: u64, width: u32) -> Result<Self> {
        if width == 0 || width > 62 || value >> width != 0 {
            return Err(Error::ValueOutOfRange {
                value: value as i64,
                width,
            });
        }
        Ok(Self { value, width })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn width(&self) -> u32 {
        self.width
    }
}

/// Two's complement operand; `width` includes the sign bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedOperand {
    value: i64,
    width: u32,
}

impl SignedOperand {
    pub fn new(value: i64, width: u32) -> Result<Self> {
        if width == 0 || width > 62 {
            return Err(Error::ValueOutOfRange { value, width });
        }
        let half = 1i64 << (width - 1);
        if value < -half || value >= half {
            return Err(Error::ValueOutOfRange { value, width });
        }
        Ok(Self { value, width })
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// `value mod 2^width`.
    pub fn encoded(&self) -> u64 {
        self.value.rem_euclid(1i64 << self.width) as u64
    }
}

/// Interprets an unsigned measurement of `width` bits as two's complement.
pub fn decode_signed(measured: u64, width: u32) -> i64 {
    debug_assert!((1..=63).contains(&width) && measured >> width == 0);
    if (measured >> (width - 1)) & 1 == 1 {
        measured as i64 - (1i64 << width)
    } else {
        measured as i64
    }
}

/// Smallest two's complement width holding every value in `lo..=hi`.
pub fn signed_width_for(lo: i128, hi: i128) -> u32 {
    let mut m = 1;
    while lo < -(1i128 << (m - 1)) || hi >= (1i128 << (m - 1)) {
        m += 1;
    }
    m
}

/// Angle of `2*pi * numerator / 2^(p+1)` reduced to `[0, 2*pi)`.
pub fn fourier_angle(numerator: i128, significance: usize) -> f64 {
    let modulus = 1i128 << (significance + 1);
    let r = numerator.rem_euclid(modulus);
    TAU * r as f64 / modulus as f64
}

/// Adds the constant `value` to a Fourier-encoded accumulator: one counted
/// `Phase` per accumulator qubit.
pub(crate) fn append_phase_add(circuit: &mut Circuit, acc: &Register, value: i128) -> Result<()> {
    for p in 0..acc.width() {
        circuit.push(
            Gate::Phase {
                target: acc.qubit(p),
                angle: fourier_angle(value, p),
            },
            true,
        )?;
    }
    Ok(())
}

/// Adds `multiplicand * b` to a Fourier-encoded accumulator using one controlled
/// rotation per (b bit, accumulator qubit) pair whose angle is not a whole turn.
/// With `signed_b`, the top qubit of `b` has weight `-2^(w-1)`.
pub(crate) fn append_controlled_multiply(
    circuit: &mut Circuit,
    multiplicand: i128,
    b: &Register,
    signed_b: bool,
    acc: &Register,
) -> Result<()> {
    let bw = b.width();
    for j in 0..bw {
        let weight = if signed_b && j == bw - 1 {
            -(1i128 << j)
        } else {
            1i128 << j
        };
        // For p < j the rotation is a multiple of 2*pi.
        for p in j..acc.width() {
            circuit.push(
                Gate::CPhase {
                    control: b.qubit(j),
                    target: acc.qubit(p),
                    angle: fourier_angle(multiplicand * weight, p),
                },
                true,
            )?;
        }
    }
    Ok(())
}

fn check_disjoint(a: &Register, b: &Register) -> Result<()> {
    if a.overlaps(b) {
        return Err(Error::RegisterOverlap(a.name().into(), b.name().into()));
    }
    Ok(())
}

/// Quantum-quantum adder: `acc <- acc + a`. The accumulator carries one extra
/// carry qubit so an unsigned addition never overflows.
pub fn build_adder_original(a: &Register, acc: &Register) -> Result<Circuit> {
    if acc.width() != a.width() + 1 {
        return Err(Error::WidthMismatch(format!(
            "accumulator must be one qubit wider than the addend ({} vs {})",
            acc.width(),
            a.width()
        )));
    }
    check_disjoint(a, acc)?;
    let mut c = Circuit::spanning(&[a, acc])?;
    append_qft(&mut c, acc)?;
    for p in 0..acc.width() {
        for i in 0..=p.min(a.width() - 1) {
            c.push(
                Gate::CPhase {
                    control: a.qubit(i),
                    target: acc.qubit(p),
                    angle: fourier_angle(1i128 << i, p),
                },
                true,
            )?;
        }
    }
    append_iqft(&mut c, acc)?;
    Ok(c)
}

/// Classical-addend adder: `acc <- (acc + constant) mod 2^width`, with the addend
/// baked into `width` uncontrolled phase rotations.
pub fn build_adder_optimized(constant: UIntOperand, acc: &Register) -> Result<Circuit> {
    if acc.width() != constant.width() as usize + 1 {
        return Err(Error::WidthMismatch(format!(
            "accumulator must be one qubit wider than the constant ({} vs {})",
            acc.width(),
            constant.width()
        )));
    }
    let mut c = Circuit::spanning(&[acc])?;
    append_qft(&mut c, acc)?;
    append_phase_add(&mut c, acc, constant.value() as i128)?;
    append_iqft(&mut c, acc)?;
    Ok(c)
}

/// Several classical additions between a single QFT/IQFT pair. An empty list is the identity.
pub fn build_accumulator(constants: &[UIntOperand], acc: &Register) -> Result<Circuit> {
    let mut c = Circuit::spanning(&[acc])?;
    if constants.is_empty() {
        return Ok(c);
    }
    append_qft(&mut c, acc)?;
    for k in constants {
        append_phase_add(&mut c, acc, k.value() as i128)?;
    }
    append_iqft(&mut c, acc)?;
    Ok(c)
}

/// Signed variant of [`build_accumulator`]; values may be negative.
pub fn build_signed_accumulator(constants: &[SignedOperand], acc: &Register) -> Result<Circuit> {
    let mut c = Circuit::spanning(&[acc])?;
    if constants.is_empty() {
        return Ok(c);
    }
    append_qft(&mut c, acc)?;
    for k in constants {
        append_phase_add(&mut c, acc, k.value() as i128)?;
    }
    append_iqft(&mut c, acc)?;
    Ok(c)
}

/// Adds a two's complement constant to an accumulator of the same width.
pub fn signed_add_constant(constant: SignedOperand, acc: &Register) -> Result<Circuit> {
    if acc.width() != constant.width() as usize {
        return Err(Error::WidthMismatch(format!(
            "signed accumulator width {} differs from operand width {}",
            acc.width(),
            constant.width()
        )));
    }
    let mut c = Circuit::spanning(&[acc])?;
    append_qft(&mut c, acc)?;
    append_phase_add(&mut c, acc, constant.encoded() as i128)?;
    append_iqft(&mut c, acc)?;
    Ok(c)
}

fn check_multiplier_widths(n: usize, b: &Register, out: &Register) -> Result<()> {
    if b.width() != n {
        return Err(Error::WidthMismatch(format!(
            "operand register `{}` is {} qubits, expected {n}",
            b.name(),
            b.width()
        )));
    }
    if out.width() != 2 * n {
        return Err(Error::WidthMismatch(format!(
            "product register `{}` is {} qubits, expected {}",
            out.name(),
            out.width(),
            2 * n
        )));
    }
    Ok(())
}

/// Quantum-quantum multiplier: `out <- a * b` using one doubly-controlled rotation
/// per (a bit, b bit, out qubit) triple.
pub fn build_multiplier_original(a: &Register, b: &Register, out: &Register) -> Result<Circuit> {
    let n = a.width();
    check_multiplier_widths(n, b, out)?;
    check_disjoint(a, b)?;
    check_disjoint(a, out)?;
    check_disjoint(b, out)?;
    let mut c = Circuit::spanning(&[a, b, out])?;
    append_qft(&mut c, out)?;
    for i in 0..n {
        for j in 0..n {
            for p in 0..out.width() {
                c.push(
                    Gate::CCPhase {
                        control1: a.qubit(i),
                        control2: b.qubit(j),
                        target: out.qubit(p),
                        angle: fourier_angle(1i128 << (i + j), p),
                    },
                    true,
                )?;
            }
        }
    }
    append_iqft(&mut c, out)?;
    Ok(c)
}

/// The rotation stage of [`build_multiplier_optimized`] on its own (no QFT/IQFT):
/// each `b` bit controls the shifted partial product `a * 2^j` onto `out`.
pub fn multiply_stage(a: UIntOperand, b: &Register, out: &Register) -> Result<Circuit> {
    check_multiplier_widths(a.width() as usize, b, out)?;
    check_disjoint(b, out)?;
    let mut c = Circuit::spanning(&[b, out])?;
    append_controlled_multiply(&mut c, a.value() as i128, b, false, out)?;
    Ok(c)
}

/// Classical-by-quantum multiplier: `out <- a * b` with single-controlled rotations.
pub fn build_multiplier_optimized(a: UIntOperand, b: &Register, out: &Register) -> Result<Circuit> {
    let stage = multiply_stage(a, b, out)?;
    let mut c = Circuit::spanning(&[b, out])?;
    append_qft(&mut c, out)?;
    c.append_circuit(&stage)?;
    append_iqft(&mut c, out)?;
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    AdderOriginal,
    AdderOptimized,
    AdderClassical,
    MultiplierOriginal,
    MultiplierOptimized,
    MultiplierClassical,
}

impl Construction {
    pub const ALL: [Construction; 6] = [
        Construction::AdderOriginal,
        Construction::AdderOptimized,
        Construction::AdderClassical,
        Construction::MultiplierOriginal,
        Construction::MultiplierOptimized,
        Construction::MultiplierClassical,
    ];

    pub const QUANTUM: [Construction; 4] = [
        Construction::AdderOriginal,
        Construction::AdderOptimized,
        Construction::MultiplierOriginal,
        Construction::MultiplierOptimized,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Construction::AdderOriginal => "adder_original",
            Construction::AdderOptimized => "adder_optimized",
            Construction::AdderClassical => "adder_classical",
            Construction::MultiplierOriginal => "multiplier_original",
            Construction::MultiplierOptimized => "multiplier_optimized",
            Construction::MultiplierClassical => "multiplier_classical",
        }
    }

    pub fn is_quantum(self) -> bool {
        !matches!(
            self,
            Construction::AdderClassical | Construction::MultiplierClassical
        )
    }

    pub fn is_adder(self) -> bool {
        matches!(
            self,
            Construction::AdderOriginal | Construction::AdderOptimized | Construction::AdderClassical
        )
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Construction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.replace('-', "_");
        Construction::ALL
            .into_iter()
            .find(|c| c.as_str() == norm)
            .ok_or_else(|| format!("unknown construction `{s}`"))
    }
}

/// Closed-form qubit and gate counts. Classical constructions have no qubit count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResourceEstimate {
    pub qubits: Option<u64>,
    pub gates: u64,
}

pub fn resource_estimate(construction: Construction, n: u32) -> Result<ResourceEstimate> {
    if n == 0 {
        return Err(Error::WidthMismatch("operand width n must be >= 1".into()));
    }
    let n = n as u64;
    let (qubits, gates) = match construction {
        Construction::AdderOriginal => (Some(2 * n + 1), (n * n + 3 * n) / 2),
        Construction::AdderOptimized => (Some(n + 1), n + 1),
        Construction::AdderClassical => (None, 5 * n - 3),
        Construction::MultiplierOriginal => (Some(4 * n), 2 * n * n * n),
        Construction::MultiplierOptimized => (Some(3 * n), (3 * n * n + n) / 2),
        Construction::MultiplierClassical => (None, 6 * n * n),
    };
    Ok(ResourceEstimate { qubits, gates })
}

/// Builds a representative circuit of `construction` for `n`-bit operands with the
/// standard layout (`a`, `b`, then the accumulator, all LSB first). `constant` is the
/// classical operand of the optimized forms; it does not affect gate counts.
///
/// Returns `None` for classical constructions.
pub fn reference_circuit(construction: Construction, n: u32, constant: u64) -> Result<Option<Circuit>> {
    let n = n as usize;
    let reg = |name: &str, offset: usize, width: usize, role: RegisterRole| {
        Register::new(name, offset, width, BitOrder::LsbFirst, role)
    };
    let circuit = match construction {
        Construction::AdderOriginal => {
            let a = reg("a", 0, n, RegisterRole::Operand)?;
            let acc = reg("acc", n, n + 1, RegisterRole::Accumulator)?;
            build_adder_original(&a, &acc)?
        }
        Construction::AdderOptimized => {
            let acc = reg("acc", 0, n + 1, RegisterRole::Accumulator)?;
            build_adder_optimized(UIntOperand::new(constant, n as u32)?, &acc)?
        }
        Construction::MultiplierOriginal => {
            let a = reg("a", 0, n, RegisterRole::Operand)?;
            let b = reg("b", n, n, RegisterRole::Operand)?;
            let out = reg("out", 2 * n, 2 * n, RegisterRole::Accumulator)?;
            build_multiplier_original(&a, &b, &out)?
        }
        Construction::MultiplierOptimized => {
            let b = reg("b", 0, n, RegisterRole::Operand)?;
            let out = reg("out", n, 2 * n, RegisterRole::Accumulator)?;
            build_multiplier_optimized(UIntOperand::new(constant, n as u32)?, &b, &out)?
        }
        Construction::AdderClassical | Construction::MultiplierClassical => return Ok(None),
    };
    Ok(Some(circuit))
}
