//! Circuit representation: registers laid out over a flat qubit file, an ordered
//! gate list, and a per-gate "counted" flag used for resource accounting.
//!
//! Only arithmetic-core rotations are counted. QFT/IQFT blocks and X gates that
//! load classical operands are data encoding and stay uncounted.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Gate, DEFAULT_QUBIT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BitOrder {
    /// The register's first qubit holds its most significant bit.
    MsbFirst,
    /// The register's first qubit holds its least significant bit.
    LsbFirst,
}

impl BitOrder {
    pub fn flipped(self) -> Self {
        match self {
            BitOrder::MsbFirst => BitOrder::LsbFirst,
            BitOrder::LsbFirst => BitOrder::MsbFirst,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            BitOrder::MsbFirst => "msb_first",
            BitOrder::LsbFirst => "lsb_first",
        }
    }
}

impl FromStr for BitOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "msb_first" => Ok(BitOrder::MsbFirst),
            "lsb_first" => Ok(BitOrder::LsbFirst),
            other => Err(format!("unknown bit order `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegisterRole {
    Operand,
    Accumulator,
    Sign,
    Carry,
}

impl RegisterRole {
    fn as_str(self) -> &'static str {
        match self {
            RegisterRole::Operand => "operand",
            RegisterRole::Accumulator => "accumulator",
            RegisterRole::Sign => "sign",
            RegisterRole::Carry => "carry",
        }
    }
}

impl FromStr for RegisterRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "operand" => Ok(RegisterRole::Operand),
            "accumulator" => Ok(RegisterRole::Accumulator),
            "sign" => Ok(RegisterRole::Sign),
            "carry" => Ok(RegisterRole::Carry),
            other => Err(format!("unknown register role `{other}`")),
        }
    }
}

/// A named, contiguous span of qubits that encodes one integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Register {
    name: String,
    offset: usize,
    width: usize,
    bit_order: BitOrder,
    role: RegisterRole,
}

impl Register {
    pub fn new(
        name: impl Into<String>,
        offset: usize,
        width: usize,
        bit_order: BitOrder,
        role: RegisterRole,
    ) -> Result<Self> {
        let name = name.into();
        if width == 0 {
            return Err(Error::EmptyRegister(name));
        }
        if width > 63 {
            return Err(Error::WidthMismatch(format!(
                "register `{name}` is {width} qubits wide; at most 63 supported"
            )));
        }
        Ok(Self {
            name,
            offset,
            width,
            bit_order,
            role,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// One past the last qubit.
    pub fn end(&self) -> usize {
        self.offset + self.width
    }

    pub fn bit_order(&self) -> BitOrder {
        self.bit_order
    }

    pub fn role(&self) -> RegisterRole {
        self.role
    }

    /// Same span with the opposite bit order.
    pub fn reversed(&self) -> Self {
        Self {
            bit_order: self.bit_order.flipped(),
            ..self.clone()
        }
    }

    /// Physical qubit holding the bit of weight `2^significance`.
    pub fn qubit(&self, significance: usize) -> usize {
        assert!(significance < self.width, "bit {significance} outside register");
        match self.bit_order {
            BitOrder::LsbFirst => self.offset + significance,
            BitOrder::MsbFirst => self.offset + self.width - 1 - significance,
        }
    }

    pub fn contains(&self, qubit: usize) -> bool {
        (self.offset..self.end()).contains(&qubit)
    }

    pub fn overlaps(&self, other: &Register) -> bool {
        self.offset < other.end() && other.offset < self.end()
    }

    /// Value of this register inside the basis index `index`.
    pub fn extract(&self, index: u64) -> u64 {
        (0..self.width).fold(0, |v, bit| v | (((index >> self.qubit(bit)) & 1) << bit))
    }

    /// Basis-index bits that encode `value` in this register (other qubits zero).
    /// Values are taken modulo `2^width`.
    pub fn deposit(&self, value: u64) -> u64 {
        (0..self.width).fold(0, |idx, bit| idx | (((value >> bit) & 1) << self.qubit(bit)))
    }

    /// `value mod 2^width`, accepting negative values in two's complement.
    pub fn encode(&self, value: i64) -> u64 {
        value.rem_euclid(1i64 << self.width) as u64
    }
}

/// Register request for [`Circuit::with_registers`]; the offset is assigned by layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterSpec {
    pub name: String,
    pub width: usize,
    pub bit_order: BitOrder,
    pub role: RegisterRole,
}

impl RegisterSpec {
    pub fn new(name: impl Into<String>, width: usize, bit_order: BitOrder, role: RegisterRole) -> Self {
        Self {
            name: name.into(),
            width,
            bit_order,
            role,
        }
    }

    pub fn lsb(name: impl Into<String>, width: usize, role: RegisterRole) -> Self {
        Self::new(name, width, BitOrder::LsbFirst, role)
    }
}

/// Gate totals for a circuit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GateCensus {
    pub total: usize,
    pub counted: usize,
    pub by_kind: BTreeMap<String, usize>,
}

/// An append-only gate list over named registers.
///
/// Every appended gate is validated against the qubit count, so a `Circuit` can be
/// simulated without further checks. There is no API to remove or edit gates.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    registers: Vec<Register>,
    gates: Vec<Gate>,
    counted: Vec<bool>,
}

impl Circuit {
    /// Empty circuit over `num_qubits` qubits with no registers.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::with_cap(num_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(num_qubits: usize, cap: usize) -> Result<Self> {
        if num_qubits > cap {
            return Err(Error::QubitCap {
                requested: num_qubits,
                cap,
            });
        }
        Ok(Self {
            num_qubits,
            registers: Vec::new(),
            gates: Vec::new(),
            counted: Vec::new(),
        })
    }

    /// Lays registers out back to back starting at qubit 0.
    pub fn with_registers(specs: &[RegisterSpec]) -> Result<Self> {
        Self::with_registers_capped(specs, DEFAULT_QUBIT_CAP)
    }

    pub fn with_registers_capped(specs: &[RegisterSpec], cap: usize) -> Result<Self> {
        let total: usize = specs.iter().map(|s| s.width).sum();
        let mut circuit = Self::with_cap(total, cap)?;
        let mut offset = 0;
        for spec in specs {
            let reg = Register::new(spec.name.clone(), offset, spec.width, spec.bit_order, spec.role)?;
            offset += spec.width;
            circuit.add_register(reg)?;
        }
        Ok(circuit)
    }

    /// Circuit spanning exactly the qubits needed by `registers` (0 to the furthest end).
    pub fn spanning(registers: &[&Register]) -> Result<Self> {
        let n = registers.iter().map(|r| r.end()).max().unwrap_or(0);
        let mut circuit = Self::new(n)?;
        for reg in registers {
            circuit.add_register((*reg).clone())?;
        }
        Ok(circuit)
    }

    /// Records a register mapping, checking bounds, name uniqueness and disjointness.
    pub fn add_register(&mut self, register: Register) -> Result<()> {
        if register.end() > self.num_qubits {
            return Err(Error::RegisterOutOfRange {
                name: register.name.clone(),
                end: register.end(),
                num_qubits: self.num_qubits,
            });
        }
        for existing in &self.registers {
            if existing.name == register.name {
                return Err(Error::DuplicateRegister(register.name));
            }
            if existing.overlaps(&register) {
                return Err(Error::RegisterOverlap(register.name, existing.name.clone()));
            }
        }
        self.registers.push(register);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn counted_flags(&self) -> &[bool] {
        &self.counted
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate, counted: bool) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        self.counted.push(counted);
        Ok(())
    }

    /// Appends all gates of `other`, which must not use more qubits than `self`.
    /// Register bookkeeping of `self` is kept; `other`'s is dropped.
    pub fn append_circuit(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits > self.num_qubits {
            return Err(Error::QubitCountMismatch {
                circuit: other.num_qubits,
                state: self.num_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        self.counted.extend_from_slice(&other.counted);
        Ok(())
    }

    /// X gates (uncounted) that load `value mod 2^width` into `register` from |0...0>.
    /// Loading on top of a nonzero register XORs the bit patterns.
    pub fn load(&mut self, register: &Register, value: u64) -> Result<()> {
        for bit in 0..register.width() {
            if (value >> bit) & 1 == 1 {
                self.push(Gate::X(register.qubit(bit)), false)?;
            }
        }
        Ok(())
    }

    /// Reversed gate order with every rotation negated; counted flags follow their gates.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            registers: self.registers.clone(),
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            counted: self.counted.iter().rev().copied().collect(),
        }
    }

    pub fn census(&self) -> GateCensus {
        let mut census = GateCensus::default();
        for (gate, &counted) in self.gates.iter().zip(&self.counted) {
            census.total += 1;
            census.counted += usize::from(counted);
            *census.by_kind.entry(gate.name().to_string()).or_default() += 1;
        }
        census
    }

    /// Portable line-oriented text form. See [`Circuit::import_gatelist`].
    pub fn export_gatelist(&self) -> String {
        let mut out = String::new();
        writeln!(out, "qubits={}", self.num_qubits).unwrap();
        for r in &self.registers {
            writeln!(
                out,
                "reg={},{},{},{},{}",
                r.name,
                r.offset,
                r.width,
                r.bit_order.as_str(),
                r.role.as_str()
            )
            .unwrap();
        }
        for (gate, &counted) in self.gates.iter().zip(&self.counted) {
            if counted {
                writeln!(out, "{gate} counted").unwrap();
            } else {
                writeln!(out, "{gate}").unwrap();
            }
        }
        out
    }

    pub fn import_gatelist(text: &str) -> Result<Circuit> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty gate list"))?;
        let num_qubits = header
            .strip_prefix("qubits=")
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| Error::parse(line_no, "expected `qubits=<Q>` header"))?;
        let mut circuit = Circuit::new(num_qubits)?;
        for (line_no, line) in lines {
            if let Some(rest) = line.strip_prefix("reg=") {
                let reg = parse_register(rest).map_err(|m| Error::parse(line_no, m))?;
                circuit.add_register(reg)?;
                continue;
            }
            let (gate, counted) = parse_gate_line(line).map_err(|m| Error::parse(line_no, m))?;
            circuit.push(gate, counted)?;
        }
        Ok(circuit)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.export_gatelist())
    }
}

fn parse_register(s: &str) -> Result<Register, String> {
    let fields: Vec<&str> = s.split(',').collect();
    let [name, offset, width, order, role] = fields[..] else {
        return Err(format!("register line needs 5 fields, got {}", fields.len()));
    };
    let offset = offset.parse().map_err(|_| format!("bad offset `{offset}`"))?;
    let width = width.parse().map_err(|_| format!("bad width `{width}`"))?;
    Register::new(name, offset, width, order.parse()?, role.parse()?).map_err(|e| e.to_string())
}

fn parse_gate_line(line: &str) -> Result<(Gate, bool), String> {
    let mut parts = line.split_whitespace();
    let kind = parts.next().ok_or("missing gate kind")?;
    let args = parts.next().ok_or("missing gate operands")?;
    let counted = match parts.next() {
        None => false,
        Some("counted") => true,
        Some(other) => return Err(format!("unexpected trailing token `{other}`")),
    };
    if parts.next().is_some() {
        return Err("too many fields".into());
    }
    let fields: Vec<&str> = args.split(',').collect();
    let q = |i: usize| -> Result<usize, String> {
        fields
            .get(i)
            .ok_or_else(|| format!("{kind} is missing operand {i}"))?
            .parse()
            .map_err(|_| format!("bad qubit index `{}`", fields[i]))
    };
    let angle = |i: usize| -> Result<f64, String> {
        fields
            .get(i)
            .ok_or_else(|| format!("{kind} is missing its angle"))?
            .parse()
            .map_err(|_| format!("bad angle `{}`", fields[i]))
    };
    let (gate, arity) = match kind {
        "H" => (Gate::H(q(0)?), 1),
        "X" => (Gate::X(q(0)?), 1),
        "SWAP" => (Gate::Swap(q(0)?, q(1)?), 2),
        "P" => (
            Gate::Phase {
                target: q(0)?,
                angle: angle(1)?,
            },
            2,
        ),
        "CP" => (
            Gate::CPhase {
                control: q(0)?,
                target: q(1)?,
                angle: angle(2)?,
            },
            3,
        ),
        "CCP" => (
            Gate::CCPhase {
                control1: q(0)?,
                control2: q(1)?,
                target: q(2)?,
                angle: angle(3)?,
            },
            4,
        ),
        other => return Err(format!("unknown gate kind `{other}`")),
    };
    if fields.len() != arity {
        return Err(format!("{kind} takes {arity} fields, got {}", fields.len()));
    }
    Ok((gate, counted))
}

/// Lays out a fresh circuit from register requests.
pub fn new_circuit(specs: &[RegisterSpec]) -> Result<Circuit> {
    Circuit::with_registers(specs)
}

pub fn census(circuit: &Circuit) -> GateCensus {
    circuit.census()
}

pub fn inverse(circuit: &Circuit) -> Circuit {
    circuit.inverse()
}
