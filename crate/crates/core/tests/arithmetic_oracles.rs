//! End-to-end simulation of every arithmetic construction against integer arithmetic.

use num_complex::Complex64;
use qmatmul_core::arithmetic::{build_signed_accumulator, reference_circuit};
use qmatmul_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn lsb(name: &str, offset: usize, width: usize) -> Register {
    Register::new(name, offset, width, BitOrder::LsbFirst, RegisterRole::Operand).unwrap()
}

fn run(circuit: &Circuit, inputs: &[(&Register, u64)], out: &Register) -> u64 {
    let idx = inputs.iter().fold(0, |i, (r, v)| i | r.deposit(*v));
    let mut s = StateVector::basis(circuit.num_qubits(), idx).unwrap();
    s.run(circuit).unwrap();
    s.readout_deterministic(out).unwrap().value
}

#[test]
fn original_adder_is_exact() {
    for n in 1..=4 {
        let (a, acc) = (lsb("a", 0, n), lsb("acc", n, n + 1));
        let c = build_adder_original(&a, &acc).unwrap();
        for x in 0..1u64 << n {
            for y in 0..1u64 << n {
                assert_eq!(run(&c, &[(&a, x), (&acc, y)], &acc), x + y, "n={n} {x}+{y}");
            }
        }
    }
}

#[test]
fn optimized_adder_is_exact() {
    for n in 1..=4u32 {
        let acc = lsb("acc", 0, n as usize + 1);
        let modulus = 1u64 << (n + 1);
        for k in 0..1u64 << n {
            let c = build_adder_optimized(UIntOperand::new(k, n).unwrap(), &acc).unwrap();
            for y in 0..modulus {
                assert_eq!(run(&c, &[(&acc, y)], &acc), (y + k) % modulus, "n={n} {y}+{k}");
            }
        }
    }
}

#[test]
fn accumulator_sums_many_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let width = rng.gen_range(2..=7usize);
        let acc = lsb("acc", 0, width);
        let count = rng.gen_range(0..6);
        let ks: Vec<UIntOperand> = (0..count)
            .map(|_| UIntOperand::new(rng.gen_range(0..8), 3).unwrap())
            .collect();
        let c = build_accumulator(&ks, &acc).unwrap();
        let expect = ks.iter().map(|k| k.value()).sum::<u64>() % (1 << width);
        assert_eq!(run(&c, &[(&acc, 0)], &acc), expect);
        let s = c.census();
        assert_eq!(s.counted, count * width);
        let blocks = if count == 0 { 0 } else { 2 };
        assert_eq!(s.by_kind.get("H").copied().unwrap_or(0), blocks * width);
    }
}

#[test]
fn original_multiplier_is_exact() {
    for n in 1..=3 {
        let (a, b, out) = (lsb("a", 0, n), lsb("b", n, n), lsb("out", 2 * n, 2 * n));
        let c = build_multiplier_original(&a, &b, &out).unwrap();
        for x in 0..1u64 << n {
            for y in 0..1u64 << n {
                assert_eq!(run(&c, &[(&a, x), (&b, y)], &out), x * y, "n={n} {x}*{y}");
            }
        }
    }
}

#[test]
fn optimized_multiplier_is_exact() {
    for n in 1..=3u32 {
        let nu = n as usize;
        let (b, out) = (lsb("b", 0, nu), lsb("out", nu, 2 * nu));
        for x in 0..1u64 << n {
            let c = build_multiplier_optimized(UIntOperand::new(x, n).unwrap(), &b, &out).unwrap();
            for y in 0..1u64 << n {
                assert_eq!(run(&c, &[(&b, y)], &out), x * y, "n={n} {x}*{y}");
            }
        }
    }
}

#[test]
fn signed_add_is_exact_in_range() {
    for m in 1..=5u32 {
        let acc = lsb("acc", 0, m as usize);
        let half = 1i64 << (m - 1);
        for k in -half..half {
            let c = signed_add_constant(SignedOperand::new(k, m).unwrap(), &acc).unwrap();
            for x in -half..half {
                if !(-half..half).contains(&(x + k)) {
                    continue;
                }
                let start = acc.encode(x);
                let got = decode_signed(run(&c, &[(&acc, start)], &acc), m);
                assert_eq!(got, x + k, "m={m} {x}+{k}");
            }
        }
    }
}

#[test]
fn signed_accumulator_handles_mixed_signs() {
    let acc = lsb("acc", 0, 6);
    let ks: Vec<SignedOperand> = [5, -9, 3, -1].iter().map(|&v| SignedOperand::new(v, 5).unwrap()).collect();
    let c = build_signed_accumulator(&ks, &acc).unwrap();
    assert_eq!(decode_signed(run(&c, &[(&acc, 0)], &acc), 6), -2);
}

#[test]
fn census_agrees_with_closed_forms() {
    for n in 1..=6u32 {
        for c in Construction::QUANTUM {
            let est = resource_estimate(c, n).unwrap();
            for constant in [0, (1 << n) - 1] {
                let built = reference_circuit(c, n, constant).unwrap().unwrap();
                assert_eq!(built.census().counted as u64, est.gates, "{c} n={n}");
                assert_eq!(Some(built.num_qubits() as u64), est.qubits, "{c} n={n}");
            }
        }
    }
}

#[test]
fn optimized_forms_tie_at_one_bit() {
    let g = |c| resource_estimate(c, 1).unwrap().gates;
    assert_eq!(g(Construction::AdderOptimized), g(Construction::AdderOriginal));
    assert_eq!(g(Construction::MultiplierOptimized), g(Construction::MultiplierOriginal));
}

#[test]
fn optimized_forms_use_fewer_gates() {
    for n in 2..=8u32 {
        let g = |c| resource_estimate(c, n).unwrap().gates;
        assert!(g(Construction::AdderOptimized) < g(Construction::AdderOriginal), "n={n}");
        assert!(g(Construction::MultiplierOptimized) < g(Construction::MultiplierOriginal), "n={n}");
        if n <= 6 {
            let built = |c| reference_circuit(c, n, 1).unwrap().unwrap().census().counted;
            assert!(built(Construction::AdderOptimized) < built(Construction::AdderOriginal));
            assert!(built(Construction::MultiplierOptimized) < built(Construction::MultiplierOriginal));
        }
    }
}

/// Relative phase of qubit `q` given every other qubit in the basis pattern `base`.
fn relative_phase(s: &StateVector, base: usize, q: usize) -> Complex64 {
    let (zero, one) = (s.amplitude(base), s.amplitude(base | 1 << q));
    one / zero
}

#[test]
fn multiplier_phases_before_iqft() {
    let n = 3;
    let (b, out) = (lsb("b", 0, n), lsb("out", n, 2 * n));
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..20 {
        let (x, y) = (rng.gen_range(0..8u64), rng.gen_range(0..8u64));
        let mut c = build_qft(&out).unwrap();
        let mut full = Circuit::spanning(&[&b, &out]).unwrap();
        full.append_circuit(&c).unwrap();
        c = multiply_stage(UIntOperand::new(x, 3).unwrap(), &b, &out).unwrap();
        full.append_circuit(&c).unwrap();
        let mut s = StateVector::basis(full.num_qubits(), b.deposit(y)).unwrap();
        s.run(&full).unwrap();
        let base = b.deposit(y) as usize;
        for p in 0..2 * n {
            let expect = Complex64::from_polar(1.0, TAU * (x * y) as f64 / (1u64 << (p + 1)) as f64);
            let got = relative_phase(&s, base, out.qubit(p));
            assert!((got - expect).norm() < 1e-9, "a={x} b={y} l={}", p + 1);
        }
    }
}
