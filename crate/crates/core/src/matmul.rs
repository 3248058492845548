//! Quantum matrix multiplication built from the Fourier-basis arithmetic.
//!
//! Each output element of the basic product is one fused inner-product circuit:
//! a single QFT of the accumulator, one controlled-multiply stage per term (the
//! `b` operand register is re-prepared with X gates between stages), one IQFT.
//!
//! The Strassen variant runs the same seven-product recursion as the classical
//! algorithm. Every elementwise sum or difference is an accumulator circuit over
//! two's complement values and every leaf product is a fused inner product with a
//! signed operand register.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::arithmetic::{append_controlled_multiply, append_phase_add, decode_signed, signed_width_for};
use crate::circuit::{Circuit, RegisterRole, RegisterSpec};
use crate::error::{Error, Result};
use crate::qft::{append_iqft, append_qft};
use crate::statevector::StateVector;

/// Row-major integer matrix with a declared element bit width.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    elements: Vec<i64>,
    element_width: u32,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, elements: Vec<i64>, element_width: u32) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if elements.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} elements, got {}",
                rows * cols,
                elements.len()
            )));
        }
        if element_width == 0 || element_width > 62 {
            return Err(Error::WidthMismatch(format!(
                "element width {element_width} outside 1..=62"
            )));
        }
        Ok(Self {
            rows,
            cols,
            elements,
            element_width,
        })
    }

    /// Builds from nested rows, picking the smallest width that holds every element.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let elements: Vec<i64> = rows.concat();
        let width = minimal_width(&elements);
        Self::new(r, c, elements, width)
    }

    pub fn identity(dim: usize) -> Self {
        let mut e = vec![0; dim * dim];
        for i in 0..dim {
            e[i * dim + i] = 1;
        }
        Self::new(dim, dim, e, 1).expect("valid identity")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![0; rows * cols], 1).expect("valid zeros")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn element_width(&self) -> u32 {
        self.element_width
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.elements[row * self.cols + col]
    }

    pub fn row_vec(&self, row: usize) -> Vec<i64> {
        self.elements[row * self.cols..(row + 1) * self.cols].to_vec()
    }

    pub fn col_vec(&self, col: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row_vec(r)).collect()
    }

    /// Same elements under a new declared width; fails if any element does not fit unsigned.
    pub fn with_element_width(mut self, width: u32) -> Result<Self> {
        if width == 0 || width > 62 {
            return Err(Error::WidthMismatch(format!("element width {width} outside 1..=62")));
        }
        self.element_width = width;
        self.check_unsigned()?;
        Ok(self)
    }

    /// Every element satisfies `0 <= e < 2^n`.
    pub fn check_unsigned(&self) -> Result<()> {
        let limit = 1i64 << self.element_width;
        match self.elements.iter().find(|&&e| e < 0 || e >= limit) {
            Some(&e) => Err(Error::ValueOutOfRange {
                value: e,
                width: self.element_width,
            }),
            None => Ok(()),
        }
    }

    /// Every element satisfies `-2^(n-1) <= e < 2^(n-1)`.
    pub fn check_signed(&self) -> Result<()> {
        let half = 1i64 << (self.element_width - 1);
        match self.elements.iter().find(|&&e| e < -half || e >= half) {
            Some(&e) => Err(Error::ValueOutOfRange {
                value: e,
                width: self.element_width,
            }),
            None => Ok(()),
        }
    }

    fn is_square_pow2(&self) -> Result<usize> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "Strassen needs square matrices, got {}x{}",
                self.rows, self.cols
            )));
        }
        if !self.rows.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(self.rows));
        }
        Ok(self.rows)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.elements.iter().map(i64::to_string).collect();
        let w = cells.iter().map(String::len).max().unwrap_or(1);
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .map(|c| format!("{:>w$}", cells[r * self.cols + c]))
                .collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

/// Smallest width that holds all values: unsigned when none is negative,
/// two's complement otherwise.
pub fn minimal_width(values: &[i64]) -> u32 {
    let lo = values.iter().copied().min().unwrap_or(0);
    let hi = values.iter().copied().max().unwrap_or(0);
    if lo >= 0 {
        (64 - (hi as u64).leading_zeros()).max(1)
    } else {
        signed_width_for(lo as i128, hi as i128)
    }
}

fn ceil_log2(k: usize) -> u32 {
    k.max(1).next_power_of_two().trailing_zeros()
}

/// Register widths for a matmul run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WidthPlan {
    pub operand_width: u32,
    pub accumulator_width: u32,
    pub sign_headroom: u32,
}

impl WidthPlan {
    pub fn new(operand_width: u32, accumulator_width: u32, sign_headroom: u32) -> Self {
        Self {
            operand_width,
            accumulator_width,
            sign_headroom,
        }
    }

    /// `2n + ceil(log2 k) + headroom`: enough for a length-`k` inner product of `n`-bit values.
    pub fn required_accumulator_width(operand_width: u32, inner_dim: usize, sign_headroom: u32) -> u32 {
        2 * operand_width + ceil_log2(inner_dim) + sign_headroom
    }

    /// Smallest plan accepted by [`validate_basic`](Self::validate_basic).
    pub fn basic(operand_width: u32, inner_dim: usize) -> Self {
        Self::new(
            operand_width,
            Self::required_accumulator_width(operand_width, inner_dim, 0),
            0,
        )
    }

    /// Smallest plan accepted by [`validate_strassen`](Self::validate_strassen).
    pub fn strassen(operand_width: u32, dim: usize, threshold: usize) -> Result<Self> {
        let bounds = strassen_bounds(operand_width, dim, threshold)?;
        let generic = Self::required_accumulator_width(operand_width, dim, 1);
        Ok(Self::new(operand_width, generic.max(bounds.accumulator_width()), 1))
    }

    pub fn validate_basic(&self, inner_dim: usize) -> Result<()> {
        let required = Self::required_accumulator_width(self.operand_width, inner_dim, self.sign_headroom);
        if self.accumulator_width < required {
            return Err(Error::WidthPlan {
                reason: format!(
                    "inner dimension {inner_dim} with {}-bit elements can overflow the accumulator",
                    self.operand_width
                ),
                required,
                available: self.accumulator_width,
            });
        }
        Ok(())
    }

    /// Checks the generic capacity rule with sign headroom plus the worst-case
    /// magnitude of every intermediate the Strassen recursion produces.
    pub fn validate_strassen(&self, dim: usize, threshold: usize) -> Result<StrassenBounds> {
        if self.sign_headroom != 1 {
            return Err(Error::WidthPlan {
                reason: "Strassen intermediates can be negative; plan needs sign_headroom = 1".into(),
                required: self.accumulator_width,
                available: self.accumulator_width,
            });
        }
        self.validate_basic(dim)?;
        let bounds = strassen_bounds(self.operand_width, dim, threshold)?;
        let required = bounds.accumulator_width();
        if self.accumulator_width < required {
            return Err(Error::WidthPlan {
                reason: format!(
                    "Strassen intermediates reach [{}, {}]",
                    bounds.output_lo, bounds.output_hi
                ),
                required,
                available: self.accumulator_width,
            });
        }
        Ok(bounds)
    }
}

/// Operation counts and costs of one matmul run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct MatmulStats {
    pub quantum_multiplications: usize,
    pub quantum_additions: usize,
    pub total_counted_gates: usize,
    pub total_qubits_peak: usize,
    pub circuits: usize,
    pub wall_time: f64,
}

/// Measurement of one output element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementReadout {
    pub row: usize,
    pub col: usize,
    pub value: i64,
    /// Raw register value before sign decoding.
    pub raw: u64,
    pub register_width: usize,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumProduct {
    pub matrix: IntMatrix,
    pub stats: MatmulStats,
    pub readouts: Vec<ElementReadout>,
    pub plan: WidthPlan,
}

// ---------------------------------------------------------------------------
// Classical oracles

pub fn matmul_classical(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = vec![0i64; a.rows * b.cols];
    for i in 0..a.rows {
        for t in 0..a.cols {
            let x = a.get(i, t);
            for j in 0..b.cols {
                out[i * b.cols + j] += x * b.get(t, j);
            }
        }
    }
    let w = minimal_width(&out);
    IntMatrix::new(a.rows, b.cols, out, w)
}

pub fn strassen_classical(a: &IntMatrix, b: &IntMatrix, threshold: usize) -> Result<IntMatrix> {
    let dim = check_strassen_inputs(a, b, threshold)?;
    let c = strassen(&ClassicalRing, &Square::from(a), &Square::from(b), threshold)?;
    let w = minimal_width(&c.data);
    IntMatrix::new(dim, dim, c.data, w)
}

fn check_strassen_inputs(a: &IntMatrix, b: &IntMatrix, threshold: usize) -> Result<usize> {
    let da = a.is_square_pow2()?;
    let db = b.is_square_pow2()?;
    if da != db {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {da}x{da} by {db}x{db}"
        )));
    }
    if threshold == 0 {
        return Err(Error::DimensionMismatch("Strassen threshold must be >= 1".into()));
    }
    Ok(da)
}

// ---------------------------------------------------------------------------
// Shared Strassen recursion

#[derive(Debug, Clone)]
struct Square<T> {
    dim: usize,
    data: Vec<T>,
}

impl From<&IntMatrix> for Square<i64> {
    fn from(m: &IntMatrix) -> Self {
        Square {
            dim: m.rows,
            data: m.elements.clone(),
        }
    }
}

impl<T: Clone> Square<T> {
    fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.dim + c]
    }

    /// Quadrant `(qr, qc)` with `qr, qc` in `{0, 1}`.
    fn quadrant(&self, qr: usize, qc: usize) -> Square<T> {
        let h = self.dim / 2;
        let mut data = Vec::with_capacity(h * h);
        for r in 0..h {
            for c in 0..h {
                data.push(self.at(qr * h + r, qc * h + c).clone());
            }
        }
        Square { dim: h, data }
    }

    fn assemble(q11: Square<T>, q12: Square<T>, q21: Square<T>, q22: Square<T>) -> Square<T> {
        let h = q11.dim;
        let dim = 2 * h;
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let q = match (r < h, c < h) {
                    (true, true) => &q11,
                    (true, false) => &q12,
                    (false, true) => &q21,
                    (false, false) => &q22,
                };
                data.push(q.at(r % h, c % h).clone());
            }
        }
        Square { dim, data }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    OperandSum,
    ResultSum,
}

/// Arithmetic the Strassen recursion runs over.
trait StrassenRing: Sync {
    type Elem: Clone + Send + Sync;

    /// `sum(sign * term)` for one output element. `stage` says whether this forms an
    /// operand of a sub-product or assembles a block of the result.
    fn combine(&self, terms: &[(i64, &Self::Elem)], stage: Stage) -> Result<Self::Elem>;

    /// Product of two leaf blocks.
    fn leaf(&self, a: &Square<Self::Elem>, b: &Square<Self::Elem>) -> Result<Square<Self::Elem>>;

    /// Hook for post-processing a block product, given its operands.
    fn finish_block(
        &self,
        _a: &Square<Self::Elem>,
        _b: &Square<Self::Elem>,
        c: Square<Self::Elem>,
    ) -> Result<Square<Self::Elem>> {
        Ok(c)
    }
}

/// Signed coefficient and block of one term in a block sum.
type Term<'a, T> = (i64, &'a Square<T>);
type BlockPair<'a, T> = (&'a Square<T>, &'a Square<T>);

fn combine_blocks<R: StrassenRing>(
    ring: &R,
    terms: &[Term<R::Elem>],
    stage: Stage,
) -> Result<Square<R::Elem>> {
    let dim = terms[0].1.dim;
    let data = (0..dim * dim)
        .into_par_iter()
        .map(|i| {
            let elems: Vec<(i64, &R::Elem)> = terms.iter().map(|(s, m)| (*s, &m.data[i])).collect();
            ring.combine(&elems, stage)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Square { dim, data })
}

fn strassen<R: StrassenRing>(
    ring: &R,
    a: &Square<R::Elem>,
    b: &Square<R::Elem>,
    threshold: usize,
) -> Result<Square<R::Elem>> {
    if a.dim <= threshold {
        let c = ring.leaf(a, b)?;
        return ring.finish_block(a, b, c);
    }
    let (a11, a12, a21, a22) = (a.quadrant(0, 0), a.quadrant(0, 1), a.quadrant(1, 0), a.quadrant(1, 1));
    let (b11, b12, b21, b22) = (b.quadrant(0, 0), b.quadrant(0, 1), b.quadrant(1, 0), b.quadrant(1, 1));

    let sums: Vec<Vec<Term<R::Elem>>> = vec![
        vec![(1, &b12), (-1, &b22)], // s1
        vec![(1, &a11), (1, &a12)],  // s2
        vec![(1, &a21), (1, &a22)],  // s3
        vec![(1, &b21), (-1, &b11)], // s4
        vec![(1, &a11), (1, &a22)],  // s5
        vec![(1, &b11), (1, &b22)],  // s6
        vec![(1, &a12), (-1, &a22)], // s7
        vec![(1, &b21), (1, &b22)],  // s8
        vec![(1, &a11), (-1, &a21)], // s9
        vec![(1, &b11), (1, &b12)],  // s10
    ];
    let s = sums
        .par_iter()
        .map(|terms| combine_blocks(ring, terms, Stage::OperandSum))
        .collect::<Result<Vec<_>>>()?;

    let products: [BlockPair<R::Elem>; 7] = [
        (&a11, &s[0]),
        (&s[1], &b22),
        (&s[2], &b11),
        (&a22, &s[3]),
        (&s[4], &s[5]),
        (&s[6], &s[7]),
        (&s[8], &s[9]),
    ];
    let p = products
        .par_iter()
        .map(|(x, y)| strassen(ring, x, y, threshold))
        .collect::<Result<Vec<_>>>()?;

    let c11 = combine_blocks(ring, &[(1, &p[4]), (1, &p[3]), (-1, &p[1]), (1, &p[5])], Stage::ResultSum)?;
    let c12 = combine_blocks(ring, &[(1, &p[0]), (1, &p[1])], Stage::ResultSum)?;
    let c21 = combine_blocks(ring, &[(1, &p[2]), (1, &p[3])], Stage::ResultSum)?;
    let c22 = combine_blocks(ring, &[(1, &p[4]), (1, &p[0]), (-1, &p[2]), (-1, &p[6])], Stage::ResultSum)?;
    ring.finish_block(a, b, Square::assemble(c11, c12, c21, c22))
}

struct ClassicalRing;

impl StrassenRing for ClassicalRing {
    type Elem = i64;

    fn combine(&self, terms: &[(i64, &i64)], _stage: Stage) -> Result<i64> {
        Ok(terms.iter().map(|(s, v)| s * **v).sum())
    }

    fn leaf(&self, a: &Square<i64>, b: &Square<i64>) -> Result<Square<i64>> {
        let d = a.dim;
        let mut data = vec![0; d * d];
        for i in 0..d {
            for t in 0..d {
                for j in 0..d {
                    data[i * d + j] += a.at(i, t) * b.at(t, j);
                }
            }
        }
        Ok(Square { dim: d, data })
    }
}

// ---------------------------------------------------------------------------
// Worst-case planning

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Interval {
    lo: i128,
    hi: i128,
}

impl Interval {
    fn scale(self, s: i64) -> Interval {
        let (x, y) = (self.lo * s as i128, self.hi * s as i128);
        Interval {
            lo: x.min(y),
            hi: x.max(y),
        }
    }

    fn add(self, o: Interval) -> Interval {
        Interval {
            lo: self.lo + o.lo,
            hi: self.hi + o.hi,
        }
    }

    fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Interval {
            lo: *c.iter().min().unwrap(),
            hi: *c.iter().max().unwrap(),
        }
    }

    fn intersect(self, o: Interval) -> Interval {
        Interval {
            lo: self.lo.max(o.lo),
            hi: self.hi.min(o.hi),
        }
    }
}

/// Worst-case ranges of everything a quantum Strassen run measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StrassenBounds {
    /// Range covering the final value of every accumulator circuit.
    pub output_lo: i128,
    pub output_hi: i128,
    /// Range of values loaded into the leaf operand register.
    pub leaf_operand_lo: i128,
    pub leaf_operand_hi: i128,
}

impl StrassenBounds {
    pub fn accumulator_width(&self) -> u32 {
        signed_width_for(self.output_lo, self.output_hi)
    }

    pub fn leaf_operand_width(&self) -> u32 {
        signed_width_for(self.leaf_operand_lo, self.leaf_operand_hi)
    }
}

#[derive(Default)]
struct BoundsRing {
    seen: std::sync::Mutex<Option<(Interval, Interval)>>,
}

impl BoundsRing {
    fn record(&self, output: Interval, operand: Option<Interval>) {
        let mut seen = self.seen.lock().unwrap();
        let (out, opnd) = seen.get_or_insert((output, operand.unwrap_or(Interval { lo: 0, hi: 0 })));
        out.lo = out.lo.min(output.lo);
        out.hi = out.hi.max(output.hi);
        if let Some(o) = operand {
            opnd.lo = opnd.lo.min(o.lo);
            opnd.hi = opnd.hi.max(o.hi);
        }
    }

    fn block_product(a: &Square<Interval>, b: &Square<Interval>) -> Square<Interval> {
        let d = a.dim;
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = Interval { lo: 0, hi: 0 };
                for t in 0..d {
                    acc = acc.add(a.at(i, t).mul(*b.at(t, j)));
                }
                data.push(acc);
            }
        }
        Square { dim: d, data }
    }
}

impl StrassenRing for BoundsRing {
    type Elem = Interval;

    fn combine(&self, terms: &[(i64, &Interval)], _stage: Stage) -> Result<Interval> {
        let sum = terms
            .iter()
            .fold(Interval { lo: 0, hi: 0 }, |acc, (s, v)| acc.add(v.scale(*s)));
        Ok(sum)
    }

    fn leaf(&self, a: &Square<Interval>, b: &Square<Interval>) -> Result<Square<Interval>> {
        for v in &b.data {
            self.record(Interval { lo: 0, hi: 0 }, Some(*v));
        }
        Ok(Self::block_product(a, b))
    }

    fn finish_block(&self, a: &Square<Interval>, b: &Square<Interval>, c: Square<Interval>) -> Result<Square<Interval>> {
        // The block's true values are the product of its operands, whatever route computed them.
        let exact = Self::block_product(a, b);
        let data: Vec<Interval> = c.data.iter().zip(&exact.data).map(|(x, y)| x.intersect(*y)).collect();
        for v in &data {
            self.record(*v, None);
        }
        Ok(Square { dim: c.dim, data })
    }
}

/// Worst-case ranges for quantum Strassen on `dim x dim` inputs with `n`-bit unsigned elements.
///
/// Sums are tracked with interval arithmetic. Accumulators are modular, so only the
/// final value of each circuit has to fit, not its partial sums.
pub fn strassen_bounds(operand_width: u32, dim: usize, threshold: usize) -> Result<StrassenBounds> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    if threshold == 0 {
        return Err(Error::DimensionMismatch("Strassen threshold must be >= 1".into()));
    }
    let elem = Interval {
        lo: 0,
        hi: (1i128 << operand_width) - 1,
    };
    let input = Square {
        dim,
        data: vec![elem; dim * dim],
    };
    let ring = RecordingBounds(BoundsRing::default());
    strassen(&ring, &input, &input, threshold)?;
    let (out, opnd) = ring.0.seen.into_inner().unwrap().expect("at least one block");
    Ok(StrassenBounds {
        output_lo: out.lo,
        output_hi: out.hi,
        leaf_operand_lo: opnd.lo,
        leaf_operand_hi: opnd.hi,
    })
}

/// Records operand sums as circuit outputs.
struct RecordingBounds(BoundsRing);

impl StrassenRing for RecordingBounds {
    type Elem = Interval;

    fn combine(&self, terms: &[(i64, &Interval)], stage: Stage) -> Result<Interval> {
        let v = self.0.combine(terms, stage)?;
        // Result sums equal a block product and are recorded, tighter, by finish_block.
        if stage == Stage::OperandSum {
            self.0.record(v, None);
        }
        Ok(v)
    }

    fn leaf(&self, a: &Square<Interval>, b: &Square<Interval>) -> Result<Square<Interval>> {
        self.0.leaf(a, b)
    }

    fn finish_block(&self, a: &Square<Interval>, b: &Square<Interval>, c: Square<Interval>) -> Result<Square<Interval>> {
        self.0.finish_block(a, b, c)
    }
}

// ---------------------------------------------------------------------------
// Circuit execution

/// Result of simulating one accumulator circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
struct CircuitRun {
    value: i64,
    raw: u64,
    probability: f64,
    counted_gates: usize,
    qubits: usize,
}

/// Builds the fused inner-product circuit `acc <- sum_t a[t] * b[t]`.
///
/// `a` is classical and enters rotation angles; `b` is loaded into an operand
/// register with X gates and re-prepared between stages.
pub fn inner_product_circuit(a: &[i64], b: &[i64], b_width: usize, signed: bool, acc_width: usize) -> Result<Circuit> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "inner product of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut c = Circuit::with_registers(&[
        RegisterSpec::lsb("b", b_width, RegisterRole::Operand),
        RegisterSpec::lsb("acc", acc_width, RegisterRole::Accumulator),
    ])?;
    let breg = c.registers()[0].clone();
    let acc = c.registers()[1].clone();
    let encode = |v: i64| -> Result<u64> {
        let fits = if signed {
            let half = 1i64 << (b_width - 1);
            (-half..half).contains(&v)
        } else {
            (0..1i64 << b_width).contains(&v)
        };
        if !fits {
            return Err(Error::ValueOutOfRange {
                value: v,
                width: b_width as u32,
            });
        }
        Ok(breg.encode(v))
    };

    let mut loaded = 0u64;
    c.load(&breg, encode(b[0])?)?;
    loaded ^= encode(b[0])?;
    append_qft(&mut c, &acc)?;
    for (t, (&x, &y)) in a.iter().zip(b).enumerate() {
        if t > 0 {
            let next = encode(y)?;
            c.load(&breg, loaded ^ next)?;
            loaded = next;
        }
        append_controlled_multiply(&mut c, x as i128, &breg, signed, &acc)?;
    }
    append_iqft(&mut c, &acc)?;
    Ok(c)
}

/// Builds `acc <- initial + sum(addends)` over a two's complement accumulator.
pub fn accumulate_circuit(initial: i64, addends: &[i64], acc_width: usize) -> Result<Circuit> {
    let mut c = Circuit::with_registers(&[RegisterSpec::lsb("acc", acc_width, RegisterRole::Accumulator)])?;
    let acc = c.registers()[0].clone();
    c.load(&acc, acc.encode(initial))?;
    if !addends.is_empty() {
        append_qft(&mut c, &acc)?;
        for &v in addends {
            append_phase_add(&mut c, &acc, v as i128)?;
        }
        append_iqft(&mut c, &acc)?;
    }
    Ok(c)
}

fn simulate(circuit: &Circuit, signed: bool) -> Result<CircuitRun> {
    let acc = circuit.register("acc").expect("accumulator register").clone();
    let mut state = StateVector::basis(circuit.num_qubits(), 0)?;
    state.run(circuit)?;
    let r = state.readout_deterministic(&acc)?;
    let value = if signed {
        decode_signed(r.value, acc.width() as u32)
    } else {
        r.value as i64
    };
    Ok(CircuitRun {
        value,
        raw: r.value,
        probability: r.probability,
        counted_gates: circuit.census().counted,
        qubits: circuit.num_qubits(),
    })
}

#[derive(Default)]
struct Counters {
    multiplications: AtomicUsize,
    additions: AtomicUsize,
    counted_gates: AtomicUsize,
    qubits_peak: AtomicUsize,
    circuits: AtomicUsize,
}

impl Counters {
    fn record(&self, run: &CircuitRun, multiplications: usize, additions: usize) {
        self.multiplications.fetch_add(multiplications, Ordering::Relaxed);
        self.additions.fetch_add(additions, Ordering::Relaxed);
        self.counted_gates.fetch_add(run.counted_gates, Ordering::Relaxed);
        self.qubits_peak.fetch_max(run.qubits, Ordering::Relaxed);
        self.circuits.fetch_add(1, Ordering::Relaxed);
    }

    fn stats(&self, wall_time: f64) -> MatmulStats {
        MatmulStats {
            quantum_multiplications: self.multiplications.load(Ordering::Relaxed),
            quantum_additions: self.additions.load(Ordering::Relaxed),
            total_counted_gates: self.counted_gates.load(Ordering::Relaxed),
            total_qubits_peak: self.qubits_peak.load(Ordering::Relaxed),
            circuits: self.circuits.load(Ordering::Relaxed),
            wall_time,
        }
    }
}

/// Value of an element plus how it was last measured.
#[derive(Debug, Clone, Copy)]
struct Measured {
    value: i64,
    raw: u64,
    probability: f64,
}

impl Measured {
    fn classical(value: i64) -> Self {
        Self {
            value,
            raw: value as u64,
            probability: 1.0,
        }
    }

    fn from_run(r: &CircuitRun) -> Self {
        Self {
            value: r.value,
            raw: r.raw,
            probability: r.probability,
        }
    }
}

struct QuantumRing {
    acc_width: usize,
    leaf_b_width: usize,
    counters: Counters,
}

impl StrassenRing for QuantumRing {
    type Elem = Measured;

    fn combine(&self, terms: &[(i64, &Measured)], _stage: Stage) -> Result<Measured> {
        let initial = terms[0].0 * terms[0].1.value;
        let addends: Vec<i64> = terms[1..].iter().map(|(s, m)| s * m.value).collect();
        let run = simulate(&accumulate_circuit(initial, &addends, self.acc_width)?, true)?;
        self.counters.record(&run, 0, addends.len());
        Ok(Measured::from_run(&run))
    }

    fn leaf(&self, a: &Square<Measured>, b: &Square<Measured>) -> Result<Square<Measured>> {
        let d = a.dim;
        let data = (0..d * d)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / d, idx % d);
                let row: Vec<i64> = (0..d).map(|t| a.at(i, t).value).collect();
                let col: Vec<i64> = (0..d).map(|t| b.at(t, j).value).collect();
                let c = inner_product_circuit(&row, &col, self.leaf_b_width, true, self.acc_width)?;
                let run = simulate(&c, true)?;
                self.counters.record(&run, d, d - 1);
                Ok(Measured::from_run(&run))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Square { dim: d, data })
    }
}

/// Basic quantum matmul: one fused inner-product circuit per output element.
pub fn qmatmul_basic(a: &IntMatrix, b: &IntMatrix, plan: &WidthPlan) -> Result<QuantumProduct> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let k = a.cols;
    plan.validate_basic(k)?;
    let n = plan.operand_width;
    a.clone().with_element_width(n)?;
    b.clone().with_element_width(n)?;

    let start = Instant::now();
    let counters = Counters::default();
    let acc_width = plan.accumulator_width as usize;
    let readouts = (0..a.rows * b.cols)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / b.cols, idx % b.cols);
            let c = inner_product_circuit(&a.row_vec(i), &b.col_vec(j), n as usize, false, acc_width)?;
            let run = simulate(&c, false)?;
            counters.record(&run, k, k - 1);
            Ok(ElementReadout {
                row: i,
                col: j,
                value: run.value,
                raw: run.raw,
                register_width: acc_width,
                probability: run.probability,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let elements: Vec<i64> = readouts.iter().map(|r| r.value).collect();
    let matrix = IntMatrix::new(a.rows, b.cols, elements.clone(), minimal_width(&elements))?;
    Ok(QuantumProduct {
        matrix,
        stats: counters.stats(start.elapsed().as_secs_f64()),
        readouts,
        plan: *plan,
    })
}

/// Quantum Strassen: signed Fourier-basis adders for every submatrix sum and
/// difference, fused quantum inner products at the leaves (`dim <= threshold`).
pub fn qmatmul_strassen(a: &IntMatrix, b: &IntMatrix, plan: &WidthPlan, threshold: usize) -> Result<QuantumProduct> {
    let dim = check_strassen_inputs(a, b, threshold)?;
    let bounds = plan.validate_strassen(dim, threshold)?;
    let n = plan.operand_width;
    a.clone().with_element_width(n)?;
    b.clone().with_element_width(n)?;

    let start = Instant::now();
    let ring = QuantumRing {
        acc_width: plan.accumulator_width as usize,
        leaf_b_width: bounds.leaf_operand_width() as usize,
        counters: Counters::default(),
    };
    let lift = |m: &IntMatrix| Square {
        dim,
        data: m.elements.iter().map(|&v| Measured::classical(v)).collect(),
    };
    let c = strassen(&ring, &lift(a), &lift(b), threshold)?;
    let readouts: Vec<ElementReadout> = c
        .data
        .iter()
        .enumerate()
        .map(|(idx, m)| ElementReadout {
            row: idx / dim,
            col: idx % dim,
            value: m.value,
            raw: m.raw,
            register_width: ring.acc_width,
            probability: m.probability,
        })
        .collect();
    let elements: Vec<i64> = readouts.iter().map(|r| r.value).collect();
    let matrix = IntMatrix::new(dim, dim, elements.clone(), minimal_width(&elements))?;
    Ok(QuantumProduct {
        matrix,
        stats: ring.counters.stats(start.elapsed().as_secs_f64()),
        readouts,
        plan: *plan,
    })
}

/// Both algorithms on the same inputs, with their results cross-checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub product: IntMatrix,
    pub basic: MatmulStats,
    pub strassen: MatmulStats,
    pub basic_plan: WidthPlan,
    pub strassen_plan: WidthPlan,
    pub threshold: usize,
}

pub fn compare_algorithms(
    a: &IntMatrix,
    b: &IntMatrix,
    basic_plan: &WidthPlan,
    strassen_plan: &WidthPlan,
    threshold: usize,
) -> Result<Comparison> {
    let basic = qmatmul_basic(a, b, basic_plan)?;
    let stras = qmatmul_strassen(a, b, strassen_plan, threshold)?;
    if basic.matrix.elements != stras.matrix.elements {
        return Err(Error::OracleMismatch(format!(
            "basic {:?} vs Strassen {:?}",
            basic.matrix.elements, stras.matrix.elements
        )));
    }
    Ok(Comparison {
        product: basic.matrix,
        basic: basic.stats,
        strassen: stras.stats,
        basic_plan: *basic_plan,
        strassen_plan: *strassen_plan,
        threshold,
    })
}
