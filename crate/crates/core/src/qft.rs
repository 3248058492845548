//! Quantum Fourier transform over one register.
//!
//! The circuit has no trailing swaps. After it runs, the qubit holding bit `p` of the
//! input carries the phase `2*pi*j / 2^(p+1)`, which means the Fourier output index
//! reads out bit-reversed. The returned circuit records its register with the flipped
//! bit order so readouts of the transformed register see the true index `k`.

use std::f64::consts::TAU;

use crate::circuit::{Circuit, Register};
use crate::error::Result;
use crate::statevector::Gate;

/// `2*pi / 2^k`, the angle of `R_k`.
pub fn rk_angle(k: usize) -> f64 {
    TAU / (1u64 << k) as f64
}

/// Appends the QFT of `register` to `circuit`. All gates are uncounted.
pub(crate) fn append_qft(circuit: &mut Circuit, register: &Register) -> Result<()> {
    let w = register.width();
    for target in (0..w).rev() {
        circuit.push(Gate::H(register.qubit(target)), false)?;
        for control in (0..target).rev() {
            circuit.push(
                Gate::CPhase {
                    control: register.qubit(control),
                    target: register.qubit(target),
                    angle: rk_angle(target - control + 1),
                },
                false,
            )?;
        }
    }
    Ok(())
}

pub(crate) fn append_iqft(circuit: &mut Circuit, register: &Register) -> Result<()> {
    let mut fwd = Circuit::new(circuit.num_qubits())?;
    append_qft(&mut fwd, register)?;
    circuit.append_circuit(&fwd.inverse())
}

/// QFT circuit over `register`: one Hadamard per qubit, most significant first,
/// each followed by the controlled `R_k` ladder from the lower bits.
pub fn build_qft(register: &Register) -> Result<Circuit> {
    let mut circuit = Circuit::new(register.end())?;
    circuit.add_register(register.reversed())?;
    append_qft(&mut circuit, register)?;
    Ok(circuit)
}

/// Exact inverse of [`build_qft`]; takes the register in its computational-basis order.
pub fn build_iqft(register: &Register) -> Result<Circuit> {
    let mut circuit = Circuit::new(register.end())?;
    circuit.add_register(register.clone())?;
    append_iqft(&mut circuit, register)?;
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{BitOrder, RegisterRole};
    use crate::statevector::StateVector;
    use num_complex::Complex64;

    fn reg(w: usize) -> Register {
        Register::new("x", 0, w, BitOrder::LsbFirst, RegisterRole::Accumulator).unwrap()
    }

    fn reverse_bits(v: usize, w: usize) -> usize {
        (0..w).fold(0, |r, b| r | (((v >> b) & 1) << (w - 1 - b)))
    }

    #[test]
    fn width_one_is_a_hadamard() {
        let c = build_qft(&reg(1)).unwrap();
        assert_eq!(c.gates(), &[Gate::H(0)]);
        assert_eq!(build_iqft(&reg(1)).unwrap().gates(), &[Gate::H(0)]);
    }

    #[test]
    fn qft3_gate_counts() {
        let c = build_qft(&reg(3)).unwrap();
        let s = c.census();
        assert_eq!(s.total, 6);
        assert_eq!(s.by_kind["H"], 3);
        assert_eq!(s.by_kind["CP"], 3);
        assert_eq!(s.counted, 0);
    }

    #[test]
    fn qft3_matches_dft_closed_form() {
        let w = 3;
        let n = 1usize << w;
        let c = build_qft(&reg(w)).unwrap();
        for j in 0..n {
            let mut s = StateVector::basis(w, j as u64).unwrap();
            s.run(&c).unwrap();
            for k in 0..n {
                let expect = Complex64::from_polar(
                    1.0 / (n as f64).sqrt(),
                    TAU * (j * k) as f64 / n as f64,
                );
                let got = s.amplitude(reverse_bits(k, w));
                assert!((got - expect).norm() < 1e-12, "j={j} k={k}");
            }
        }
    }

    #[test]
    fn recorded_register_reads_the_fourier_index() {
        let c = build_qft(&reg(3)).unwrap();
        let out = &c.registers()[0];
        assert_eq!(out.bit_order(), BitOrder::MsbFirst);
        // QFT of |0> is uniform; the phase read through the reversed register is index-order.
        for idx in 0..8u64 {
            assert_eq!(out.deposit(out.extract(idx)), idx);
        }
    }

    #[test]
    fn iqft_undoes_qft() {
        for w in 1..=6 {
            let mut round_trip = build_qft(&reg(w)).unwrap();
            round_trip.append_circuit(&build_iqft(&reg(w)).unwrap()).unwrap();
            for j in 0..(1u64 << w) {
                let mut s = StateVector::basis(w, j).unwrap();
                s.run(&round_trip).unwrap();
                assert!((s.amplitude(j as usize) - Complex64::new(1.0, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn iqft_decodes_phase_encoded_integer() {
        // qubit l (1-based, significance l-1) prepared as (|0> + e^{2 pi i m / 2^l}|1>)/sqrt2
        let (w, m) = (4, 5u64);
        let r = reg(w);
        let mut prep = Circuit::new(w).unwrap();
        for l in 1..=w {
            let q = r.qubit(l - 1);
            prep.push(Gate::H(q), false).unwrap();
            prep.push(
                Gate::Phase {
                    target: q,
                    angle: TAU * m as f64 / (1u64 << l) as f64,
                },
                false,
            )
            .unwrap();
        }
        prep.append_circuit(&build_iqft(&r).unwrap()).unwrap();
        let mut s = StateVector::basis(w, 0).unwrap();
        s.run(&prep).unwrap();
        let out = s.readout_deterministic(&r).unwrap();
        assert_eq!(out.value, m);
    }

    #[test]
    fn works_on_offset_msb_first_registers() {
        let r = Register::new("y", 2, 3, BitOrder::MsbFirst, RegisterRole::Accumulator).unwrap();
        let mut c = build_qft(&r).unwrap();
        c.append_circuit(&build_iqft(&r).unwrap()).unwrap();
        assert_eq!(c.num_qubits(), 5);
        let mut s = StateVector::basis(5, r.deposit(6) | 0b01).unwrap();
        s.run(&c).unwrap();
        assert_eq!(s.readout_deterministic(&r).unwrap().value, 6);
    }
}
