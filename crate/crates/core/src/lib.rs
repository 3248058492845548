//! QFT-based quantum arithmetic and quantum matrix multiplication.
//!
//! The crate builds adders and multipliers that work in the Fourier basis,
//! simulates them on a dense statevector, counts their gates, and composes them
//! into an inner-product matrix multiply and a Strassen variant. Every quantum
//! result can be checked against the classical routines in [`matmul`].

pub mod arithmetic;
pub mod circuit;
pub mod error;
pub mod format;
pub mod matmul;
pub mod qft;
pub mod statevector;

pub use arithmetic::{
    build_accumulator, build_adder_optimized, build_adder_original, build_multiplier_optimized,
    build_multiplier_original, build_signed_accumulator, decode_signed, multiply_stage, resource_estimate,
    signed_add_constant, Construction, ResourceEstimate, SignedOperand, UIntOperand,
};
pub use circuit::{BitOrder, Circuit, GateCensus, Register, RegisterRole, RegisterSpec};
pub use error::{Error, ErrorClass, Result};
pub use format::{format_measurement, parse_measurement};
pub use matmul::{
    compare_algorithms, matmul_classical, qmatmul_basic, qmatmul_strassen, strassen_classical, Comparison,
    ElementReadout, IntMatrix, MatmulStats, QuantumProduct, WidthPlan,
};
pub use qft::{build_iqft, build_qft};
pub use statevector::{Gate, Readout, StateVector};
