//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p qmatmul-cli --test acceptance -- --nocapture --test-threads 1`
//! to see the report in order.

use std::f64::consts::TAU;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use qmatmul_core::arithmetic::reference_circuit;
use qmatmul_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn check(id: u32, title: &str, body: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let outcome = body();
    let secs = start.elapsed().as_secs_f64();
    match &outcome {
        Ok(detail) => println!("[PASS] criterion {id}: {title} ({detail}; {secs:.2} s)"),
        Err(why) => println!("[FAIL] criterion {id}: {title} ({why}; {secs:.2} s)"),
    }
    if let Err(why) = outcome {
        panic!("criterion {id} failed: {why}");
    }
}

fn lsb(name: &str, offset: usize, width: usize) -> Register {
    Register::new(name, offset, width, BitOrder::LsbFirst, RegisterRole::Operand).unwrap()
}

fn simulate(circuit: &Circuit, inputs: &[(&Register, u64)], out: &Register) -> Result<u64, String> {
    let idx = inputs.iter().fold(0, |i, (r, v)| i | r.deposit(*v));
    let mut s = StateVector::basis(circuit.num_qubits(), idx).map_err(|e| e.to_string())?;
    s.run(circuit).map_err(|e| e.to_string())?;
    s.readout_deterministic(out).map(|r| r.value).map_err(|e| e.to_string())
}

fn matrix(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn criterion_1_worked_example() {
    check(1, "2x2 worked example through the CLI", || {
        let out = Command::new(env!("CARGO_BIN_EXE_qmatmul"))
            .args(["multiply", "--a", "1,2;3,4", "--b", "2,3;4,5", "--n", "3", "--acc-width", "12"])
            .args(["--format", "json"])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
        }
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        let c: Vec<Vec<i64>> = serde_json::from_value(doc["c"].clone()).map_err(|e| e.to_string())?;
        if c != vec![vec![10, 13], vec![22, 29]] {
            return Err(format!("C = {c:?}"));
        }
        let elements = doc["elements"].as_array().ok_or("no elements")?;
        let min_p = elements
            .iter()
            .map(|e| e["probability"].as_f64().unwrap_or(0.0))
            .fold(1.0, f64::min);
        if min_p <= 1.0 - 1e-9 {
            return Err(format!("lowest readout probability {min_p}"));
        }
        let c11 = elements
            .iter()
            .find(|e| e["row"] == 1 && e["col"] == 1)
            .ok_or("no c11")?;
        if c11["hex"] != "0x500" {
            return Err(format!("c11 rendered as {}", c11["hex"]));
        }
        Ok(format!("C = {c:?}, c11 = 0x500, min p = {min_p:.12}"))
    });
}

#[test]
fn criterion_2_closed_form_resources() {
    check(2, "built circuits match the closed-form qubit and gate counts", || {
        type Formula = fn(u64) -> (u64, u64);
        let formulas: [(Construction, Formula); 4] = [
            (Construction::AdderOriginal, |n| ((n * n + 3 * n) / 2, 2 * n + 1)),
            (Construction::AdderOptimized, |n| (n + 1, n + 1)),
            (Construction::MultiplierOriginal, |n| (2 * n * n * n, 4 * n)),
            (Construction::MultiplierOptimized, |n| ((3 * n * n + n) / 2, 3 * n)),
        ];
        let mut checked = 0;
        for n in 1..=6u32 {
            for (c, f) in formulas {
                let (gates, qubits) = f(n as u64);
                for constant in [0, 1, (1u64 << n) - 1] {
                    let built = reference_circuit(c, n, constant).map_err(|e| e.to_string())?.unwrap();
                    let got = (built.census().counted as u64, built.num_qubits() as u64);
                    if got != (gates, qubits) {
                        return Err(format!("{c} n={n}: built {got:?}, expected {:?}", (gates, qubits)));
                    }
                    checked += 1;
                }
            }
        }
        Ok(format!("{checked} circuits"))
    });
}

#[test]
fn criterion_3_exhaustive_arithmetic() {
    check(3, "adders, multipliers and signed adds exact on every input", || {
        let mut cases = 0u64;
        for n in 1..=4usize {
            let (a, acc) = (lsb("a", 0, n), lsb("acc", n, n + 1));
            let c = build_adder_original(&a, &acc).map_err(|e| e.to_string())?;
            let wide = lsb("acc", 0, n + 1);
            for x in 0..1u64 << n {
                let opt = build_adder_optimized(UIntOperand::new(x, n as u32).unwrap(), &wide)
                    .map_err(|e| e.to_string())?;
                for y in 0..1u64 << n {
                    let got = simulate(&c, &[(&a, x), (&acc, y)], &acc)?;
                    if got != x + y {
                        return Err(format!("original adder n={n}: {x}+{y} = {got}"));
                    }
                    let got = simulate(&opt, &[(&wide, y)], &wide)?;
                    if got != x + y {
                        return Err(format!("optimized adder n={n}: {y}+{x} = {got}"));
                    }
                    cases += 2;
                }
            }
        }
        for n in 1..=3usize {
            let (a, b, out) = (lsb("a", 0, n), lsb("b", n, n), lsb("out", 2 * n, 2 * n));
            let orig = build_multiplier_original(&a, &b, &out).map_err(|e| e.to_string())?;
            let (b2, out2) = (lsb("b", 0, n), lsb("out", n, 2 * n));
            for x in 0..1u64 << n {
                let opt = build_multiplier_optimized(UIntOperand::new(x, n as u32).unwrap(), &b2, &out2)
                    .map_err(|e| e.to_string())?;
                for y in 0..1u64 << n {
                    let got = simulate(&orig, &[(&a, x), (&b, y)], &out)?;
                    if got != x * y {
                        return Err(format!("original multiplier n={n}: {x}*{y} = {got}"));
                    }
                    let got = simulate(&opt, &[(&b2, y)], &out2)?;
                    if got != x * y {
                        return Err(format!("optimized multiplier n={n}: {x}*{y} = {got}"));
                    }
                    cases += 2;
                }
            }
        }
        for m in 1..=5u32 {
            let acc = lsb("acc", 0, m as usize);
            let half = 1i64 << (m - 1);
            for k in -half..half {
                let c = signed_add_constant(SignedOperand::new(k, m).unwrap(), &acc).map_err(|e| e.to_string())?;
                for x in (-half..half).filter(|x| (-half..half).contains(&(x + k))) {
                    let got = decode_signed(simulate(&c, &[(&acc, acc.encode(x))], &acc)?, m);
                    if got != x + k {
                        return Err(format!("signed add m={m}: {x}+{k} = {got}"));
                    }
                    cases += 1;
                }
            }
        }
        Ok(format!("{cases} cases, 0 failures"))
    });
}

fn reverse_bits(v: usize, w: usize) -> usize {
    (0..w).fold(0, |r, b| r | (((v >> b) & 1) << (w - 1 - b)))
}

#[test]
fn criterion_4_qft_spectrum() {
    check(4, "QFT amplitudes match the DFT closed form; QFT then IQFT is identity", || {
        let mut worst = 0.0f64;
        for w in 1..=6usize {
            let reg = lsb("x", 0, w);
            let qft = build_qft(&reg).map_err(|e| e.to_string())?;
            let mut round = qft.clone();
            round.append_circuit(&build_iqft(&reg).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let dim = 1usize << w;
            for j in 0..dim {
                let mut s = StateVector::basis(w, j as u64).unwrap();
                s.run(&qft).unwrap();
                for k in 0..dim {
                    let expect = Complex64::from_polar(1.0 / (dim as f64).sqrt(), TAU * (j * k) as f64 / dim as f64);
                    worst = worst.max((s.amplitude(reverse_bits(k, w)) - expect).norm());
                }
                let mut s = StateVector::basis(w, j as u64).unwrap();
                s.run(&round).unwrap();
                for k in 0..dim {
                    let expect = if k == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                    worst = worst.max((s.amplitude(k) - expect).norm());
                }
            }
        }
        if worst < 1e-10 {
            Ok(format!("max deviation {worst:.1e}"))
        } else {
            Err(format!("max deviation {worst:.1e}"))
        }
    });
}

#[test]
fn criterion_5_multiplier_phases() {
    check(5, "optimized multiplier phases before the IQFT equal 2*pi*a*b/2^l", || {
        let n = 3;
        let (b, out) = (lsb("b", 0, n), lsb("out", n, 2 * n));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let (x, y) = (rng.gen_range(0..8u64), rng.gen_range(0..8u64));
            let mut full = Circuit::spanning(&[&b, &out]).unwrap();
            full.append_circuit(&build_qft(&out).unwrap()).unwrap();
            full.append_circuit(&multiply_stage(UIntOperand::new(x, 3).unwrap(), &b, &out).unwrap())
                .unwrap();
            let base = b.deposit(y) as usize;
            let mut s = StateVector::basis(full.num_qubits(), base as u64).unwrap();
            s.run(&full).unwrap();
            for p in 0..2 * n {
                let l = p + 1;
                let expect = Complex64::from_polar(1.0, TAU * (x * y) as f64 / (1u64 << l) as f64);
                let got = s.amplitude(base | 1 << out.qubit(p)) / s.amplitude(base);
                worst = worst.max((got - expect).norm());
            }
        }
        if worst < 1e-9 {
            Ok(format!("20 pairs, max deviation {worst:.1e}"))
        } else {
            Err(format!("max deviation {worst:.1e}"))
        }
    });
}

fn both_paths(a: &IntMatrix, b: &IntMatrix, n: u32, threshold: usize) -> Result<(), String> {
    let expect = matmul_classical(a, b).map_err(|e| e.to_string())?;
    let basic = qmatmul_basic(a, b, &WidthPlan::basic(n, a.cols())).map_err(|e| e.to_string())?;
    if basic.matrix.elements() != expect.elements() {
        return Err(format!("basic {:?} * {:?} = {:?}", a.to_rows(), b.to_rows(), basic.matrix.to_rows()));
    }
    let plan = WidthPlan::strassen(n, a.rows(), threshold).map_err(|e| e.to_string())?;
    let stras = qmatmul_strassen(a, b, &plan, threshold).map_err(|e| e.to_string())?;
    if stras.matrix.elements() != expect.elements() {
        return Err(format!("strassen {:?} * {:?} = {:?}", a.to_rows(), b.to_rows(), stras.matrix.to_rows()));
    }
    Ok(())
}

#[test]
fn criterion_6_matmul_oracle() {
    check(6, "basic and Strassen quantum products equal the classical product", || {
        (0..1u32 << 16).into_par_iter().try_for_each(|code| {
            let v: Vec<i64> = (0..8).map(|i| ((code >> (2 * i)) & 3) as i64).collect();
            let a = IntMatrix::new(2, 2, v[..4].to_vec(), 2).unwrap();
            let b = IntMatrix::new(2, 2, v[4..].to_vec(), 2).unwrap();
            both_paths(&a, &b, 2, 1)
        })?;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let dim = [1, 2, 4][rng.gen_range(0..3)];
            let n = rng.gen_range(1..=3u32);
            let threshold = if dim == 4 { rng.gen_range(1..=2) } else { 1 };
            let mut draw = || {
                let e = (0..dim * dim).map(|_| rng.gen_range(0..1i64 << n)).collect();
                IntMatrix::new(dim, dim, e, n).unwrap()
            };
            let (a, b) = (draw(), draw());
            both_paths(&a, &b, n, threshold)?;
        }
        Ok("all 65536 2x2 pairs at n=2 + 200 random cases".into())
    });
}

#[test]
fn criterion_7_operation_counts() {
    check(7, "4x4: basic 64 vs Strassen 49 multiplications, Strassen does more additions", || {
        let a = matrix(&[&[1, 2, 3, 0], &[3, 1, 0, 2], &[2, 3, 1, 1], &[0, 1, 2, 3]]);
        let b = matrix(&[&[3, 0, 1, 2], &[1, 2, 3, 0], &[0, 3, 2, 1], &[2, 1, 0, 3]]);
        let basic = qmatmul_basic(&a, &b, &WidthPlan::basic(2, 4)).map_err(|e| e.to_string())?;
        let plan = WidthPlan::strassen(2, 4, 1).map_err(|e| e.to_string())?;
        let stras = qmatmul_strassen(&a, &b, &plan, 1).map_err(|e| e.to_string())?;
        let (bm, sm) = (basic.stats.quantum_multiplications, stras.stats.quantum_multiplications);
        let (ba, sa) = (basic.stats.quantum_additions, stras.stats.quantum_additions);
        if bm != 64 || sm != 49 {
            return Err(format!("multiplications basic {bm}, Strassen {sm}"));
        }
        if sa <= ba {
            return Err(format!("additions basic {ba}, Strassen {sa}"));
        }
        Ok(format!("multiplications {bm} vs {sm}, additions {ba} vs {sa}"))
    });
}

#[test]
fn criterion_8_capacity_bound() {
    check(8, "width plan at 3n bits accepts k = 2^n and rejects k = 2^n + 1", || {
        for n in 1..=8u32 {
            let plan = WidthPlan::new(n, 3 * n, 0);
            let k = 1usize << n;
            plan.validate_basic(k).map_err(|e| format!("n={n} k={k} rejected: {e}"))?;
            match plan.validate_basic(k + 1) {
                Err(e) if e.class() == ErrorClass::Constraint => {}
                other => return Err(format!("n={n} k={}: {other:?}", k + 1)),
            }
        }
        Ok("n = 1..8".into())
    });
}

#[test]
fn criterion_9_optimized_dominance() {
    check(9, "optimized constructions use strictly fewer counted gates for n = 1..8", || {
        // Circuits past the simulator's qubit cap cannot be built; there the
        // closed form stands in, which criterion 2 ties to the built census.
        let counted = |c: Construction, n: u32| -> Result<u64, String> {
            match reference_circuit(c, n, (1u64 << n) - 1) {
                Ok(built) => Ok(built.ok_or("not a circuit")?.census().counted as u64),
                Err(Error::QubitCap { .. }) => resource_estimate(c, n).map(|e| e.gates).map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            }
        };
        let mut ties = Vec::new();
        for n in 1..=8u32 {
            let pairs = [
                (Construction::AdderOptimized, Construction::AdderOriginal),
                (Construction::MultiplierOptimized, Construction::MultiplierOriginal),
            ];
            for (opt, orig) in pairs {
                let (o, r) = (counted(opt, n)?, counted(orig, n)?);
                if o >= r {
                    ties.push(format!("n={n} {opt} {o} >= {orig} {r}"));
                }
            }
        }
        if ties.is_empty() {
            Ok("16 comparisons".into())
        } else {
            Err(ties.join(", "))
        }
    });
}
