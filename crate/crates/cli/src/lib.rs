//! Command-line driver for the quantum matmul circuits.
//!
//! Output is produced as a string so the same code path serves the binary and tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmatmul_core::arithmetic::reference_circuit;
use qmatmul_core::format::{parse_inline_matrix, parse_matrix};
use qmatmul_core::matmul::minimal_width;
use qmatmul_core::{
    compare_algorithms, format_measurement, matmul_classical, qmatmul_basic, qmatmul_strassen,
    resource_estimate, Construction, ErrorClass, IntMatrix, MatmulStats, QuantumProduct, WidthPlan,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONSTRAINT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Fixed CSV header shared by every command.
pub const CSV_HEADER: &str = "construction,n_or_dim,qubits,gates,additions,multiplications,seconds";

#[derive(Debug, Parser)]
#[command(name = "qmatmul", version, about = "Quantum Fourier-basis arithmetic and matrix multiplication")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Basic quantum matrix multiplication, one fused inner-product circuit per element.
    Multiply(MatmulArgs),
    /// Quantum Strassen multiplication with signed Fourier-basis adders.
    Strassen(MatmulArgs),
    /// Run both algorithms on the same inputs and report them side by side.
    Compare(MatmulArgs),
    /// Qubit and gate counts per construction, checked against the built circuits.
    Resources(ResourceArgs),
    /// Write the gate list of one arithmetic construction.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct MatmulArgs {
    /// Left matrix: a file in the matrix text format, or inline like `1,2;3,4`.
    #[arg(long, required_unless_present = "random")]
    pub a: Option<String>,
    /// Right matrix, same forms as `--a`.
    #[arg(long, required_unless_present = "random")]
    pub b: Option<String>,
    /// Generate square random inputs of this dimension instead of reading matrices.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    pub random: Option<usize>,
    /// RNG seed for `--random`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Element bit width n; defaults to the narrowest width holding both inputs.
    #[arg(long)]
    pub n: Option<u32>,
    /// Accumulator width override.
    #[arg(long)]
    pub acc_width: Option<u32>,
    /// Strassen leaf size: recursion stops at dimension <= threshold.
    #[arg(long, default_value_t = 1)]
    pub threshold: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ResourceArgs {
    #[arg(long, default_value_t = 1)]
    pub n_min: u32,
    #[arg(long, default_value_t = 6)]
    pub n_max: u32,
    #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// adder_original, adder_optimized, multiplier_original or multiplier_optimized.
    #[arg(long)]
    pub construction: String,
    #[arg(long)]
    pub n: u32,
    /// Classical operand of the optimized constructions.
    #[arg(long, default_value_t = 1)]
    pub constant: u64,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A failed command: exit status plus a diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl From<qmatmul_core::Error> for Failure {
    fn from(e: qmatmul_core::Error) -> Self {
        let code = match e.class() {
            ErrorClass::Usage => EXIT_USAGE,
            ErrorClass::Constraint => EXIT_CONSTRAINT,
            ErrorClass::Internal => EXIT_INTERNAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Multiply(args) => run_product(args, Algorithm::Basic),
        Command::Strassen(args) => run_product(args, Algorithm::Strassen),
        Command::Compare(args) => run_compare(args),
        Command::Resources(args) => run_resources(args),
        Command::Export(args) => run_export(args),
    }
}

/// Reads a matrix argument: an existing file path, otherwise inline text.
pub fn load_matrix(arg: &str) -> Result<IntMatrix, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        parse_matrix(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    } else {
        parse_inline_matrix(arg).map_err(|e| Failure::usage(format!("matrix `{arg}`: {e}")))
    }
}

fn random_square(rng: &mut ChaCha8Rng, dim: usize, n: u32) -> IntMatrix {
    let e = (0..dim * dim).map(|_| rng.gen_range(0..1i64 << n)).collect();
    IntMatrix::new(dim, dim, e, n).expect("valid random matrix")
}

fn inputs(args: &MatmulArgs) -> Result<(IntMatrix, IntMatrix, u32), Failure> {
    let (a, b) = match args.random {
        Some(dim) => {
            if dim == 0 {
                return Err(Failure::usage("--random needs a dimension >= 1"));
            }
            let n = args.n.unwrap_or(3);
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (random_square(&mut rng, dim, n), random_square(&mut rng, dim, n))
        }
        None => (
            load_matrix(args.a.as_deref().expect("clap requires --a"))?,
            load_matrix(args.b.as_deref().expect("clap requires --b"))?,
        ),
    };
    let n = match args.n {
        Some(n) => n,
        None => minimal_width(&[a.elements(), b.elements()].concat()),
    };
    let a = a.with_element_width(n)?;
    let b = b.with_element_width(n)?;
    Ok((a, b, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Algorithm {
    Basic,
    Strassen,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Basic => "basic",
            Algorithm::Strassen => "strassen",
        }
    }
}

fn plan_for(algorithm: Algorithm, args: &MatmulArgs, n: u32, a: &IntMatrix) -> Result<WidthPlan, Failure> {
    let default = match algorithm {
        Algorithm::Basic => WidthPlan::basic(n, a.cols()),
        Algorithm::Strassen => {
            if a.rows() != a.cols() || !a.rows().is_power_of_two() {
                return Err(qmatmul_core::Error::NotPowerOfTwo(a.rows()).into());
            }
            WidthPlan::strassen(n, a.rows(), args.threshold.max(1))?
        }
    };
    Ok(match args.acc_width {
        Some(w) => WidthPlan {
            accumulator_width: w,
            ..default
        },
        None => default,
    })
}

fn execute(algorithm: Algorithm, a: &IntMatrix, b: &IntMatrix, plan: &WidthPlan, threshold: usize) -> Result<QuantumProduct, Failure> {
    let q = match algorithm {
        Algorithm::Basic => qmatmul_basic(a, b, plan)?,
        Algorithm::Strassen => qmatmul_strassen(a, b, plan, threshold)?,
    };
    let oracle = matmul_classical(a, b)?;
    if q.matrix.elements() != oracle.elements() {
        return Err(Failure::internal(format!(
            "quantum result {:?} disagrees with the classical product {:?}",
            q.matrix.to_rows(),
            oracle.to_rows()
        )));
    }
    Ok(q)
}

#[derive(Serialize)]
struct ElementJson {
    row: usize,
    col: usize,
    value: i64,
    raw: u64,
    hex: String,
    probability: f64,
}

fn element_rows(q: &QuantumProduct) -> Vec<ElementJson> {
    q.readouts
        .iter()
        .map(|r| ElementJson {
            row: r.row + 1,
            col: r.col + 1,
            value: r.value,
            raw: r.raw,
            hex: format_measurement(r.raw, r.register_width),
            probability: r.probability,
        })
        .collect()
}

fn csv_row(construction: &str, n_or_dim: usize, stats: &MatmulStats) -> String {
    format!(
        "{construction},{n_or_dim},{},{},{},{},{:.6}",
        stats.total_qubits_peak,
        stats.total_counted_gates,
        stats.quantum_additions,
        stats.quantum_multiplications,
        stats.wall_time
    )
}

fn human_stats(out: &mut String, stats: &MatmulStats) {
    writeln!(out, "  quantum multiplications: {}", stats.quantum_multiplications).unwrap();
    writeln!(out, "  quantum additions:       {}", stats.quantum_additions).unwrap();
    writeln!(out, "  counted gates:           {}", stats.total_counted_gates).unwrap();
    writeln!(out, "  peak qubits:             {}", stats.total_qubits_peak).unwrap();
    writeln!(out, "  circuits simulated:      {}", stats.circuits).unwrap();
    writeln!(out, "  wall time:               {:.3} s", stats.wall_time).unwrap();
}

fn run_product(args: &MatmulArgs, algorithm: Algorithm) -> Result<String, Failure> {
    let (a, b, n) = inputs(args)?;
    let plan = plan_for(algorithm, args, n, &a)?;
    let q = execute(algorithm, &a, &b, &plan, args.threshold)?;
    let elements = element_rows(&q);
    Ok(match args.format {
        OutputFormat::Json => {
            let doc = json!({
                "command": if algorithm == Algorithm::Basic { "multiply" } else { "strassen" },
                "algorithm": algorithm.name(),
                "n": n,
                "plan": plan,
                "threshold": args.threshold,
                "a": a.to_rows(),
                "b": b.to_rows(),
                "c": q.matrix.to_rows(),
                "elements": elements,
                "stats": q.stats,
                "oracle_match": true,
            });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        OutputFormat::Csv => format!("{CSV_HEADER}\n{}\n", csv_row(algorithm.name(), a.rows(), &q.stats)),
        OutputFormat::Human => {
            let mut out = String::new();
            writeln!(
                out,
                "{} quantum matmul, n = {n}, accumulator = {} bits{}",
                algorithm.name(),
                plan.accumulator_width,
                if plan.sign_headroom == 1 { " (signed)" } else { "" }
            )
            .unwrap();
            writeln!(out, "C =").unwrap();
            write!(out, "{}", q.matrix).unwrap();
            writeln!(out, "measurements (bit-reversed hex):").unwrap();
            for e in &elements {
                writeln!(
                    out,
                    "  c{}{} = {:<6} {}  p = {:.12}",
                    e.row, e.col, e.value, e.hex, e.probability
                )
                .unwrap();
            }
            writeln!(out, "classical oracle: match").unwrap();
            human_stats(&mut out, &q.stats);
            out
        }
    })
}

fn run_compare(args: &MatmulArgs) -> Result<String, Failure> {
    let (a, b, n) = inputs(args)?;
    let basic_plan = plan_for(Algorithm::Basic, args, n, &a)?;
    let strassen_plan = plan_for(Algorithm::Strassen, args, n, &a)?;
    let r = compare_algorithms(&a, &b, &basic_plan, &strassen_plan, args.threshold)?;
    if r.product.elements() != matmul_classical(&a, &b)?.elements() {
        return Err(Failure::internal("quantum products disagree with the classical oracle"));
    }
    Ok(match args.format {
        OutputFormat::Json => {
            let doc = json!({
                "command": "compare",
                "n": n,
                "threshold": args.threshold,
                "c": r.product.to_rows(),
                "basic": { "plan": r.basic_plan, "stats": r.basic },
                "strassen": { "plan": r.strassen_plan, "stats": r.strassen },
                "oracle_match": true,
            });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        OutputFormat::Csv => format!(
            "{CSV_HEADER}\n{}\n{}\n",
            csv_row("basic", a.rows(), &r.basic),
            csv_row("strassen", a.rows(), &r.strassen)
        ),
        OutputFormat::Human => {
            let mut out = String::new();
            writeln!(out, "C =").unwrap();
            write!(out, "{}", r.product).unwrap();
            writeln!(out, "{:<26}{:>12}{:>12}", "", "basic", "strassen").unwrap();
            let rows: [(&str, usize, usize); 5] = [
                ("quantum multiplications", r.basic.quantum_multiplications, r.strassen.quantum_multiplications),
                ("quantum additions", r.basic.quantum_additions, r.strassen.quantum_additions),
                ("counted gates", r.basic.total_counted_gates, r.strassen.total_counted_gates),
                ("peak qubits", r.basic.total_qubits_peak, r.strassen.total_qubits_peak),
                ("circuits simulated", r.basic.circuits, r.strassen.circuits),
            ];
            for (label, x, y) in rows {
                writeln!(out, "{label:<26}{x:>12}{y:>12}").unwrap();
            }
            writeln!(out, "{:<26}{:>12.3}{:>12.3}", "wall time (s)", r.basic.wall_time, r.strassen.wall_time).unwrap();
            out
        }
    })
}

#[derive(Serialize)]
struct ResourceRow {
    construction: Construction,
    n: u32,
    qubits: Option<u64>,
    gates: u64,
    built_qubits: Option<usize>,
    built_gates: Option<usize>,
    seconds: f64,
}

fn run_resources(args: &ResourceArgs) -> Result<String, Failure> {
    if args.n_min == 0 || args.n_min > args.n_max {
        return Err(Failure::usage(format!(
            "need 1 <= n-min <= n-max, got {}..{}",
            args.n_min, args.n_max
        )));
    }
    let mut rows = Vec::new();
    for construction in Construction::ALL {
        for n in args.n_min..=args.n_max {
            let est = resource_estimate(construction, n)?;
            let start = Instant::now();
            let built = match reference_circuit(construction, n, (1u64 << n) - 1) {
                Err(qmatmul_core::Error::QubitCap { .. }) => None,
                other => other?,
            };
            let seconds = start.elapsed().as_secs_f64();
            let (built_qubits, built_gates) = match &built {
                Some(c) => (Some(c.num_qubits()), Some(c.census().counted)),
                None => (None, None),
            };
            if built_gates.is_some_and(|g| g as u64 != est.gates)
                || built_qubits.is_some_and(|q| Some(q as u64) != est.qubits)
            {
                return Err(Failure::internal(format!(
                    "{construction} n={n}: built circuit disagrees with the closed form"
                )));
            }
            rows.push(ResourceRow {
                construction,
                n,
                qubits: est.qubits,
                gates: est.gates,
                built_qubits,
                built_gates,
                seconds,
            });
        }
    }
    Ok(match args.format {
        OutputFormat::Json => {
            let doc = json!({ "command": "resources", "rows": rows });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        OutputFormat::Csv => {
            let mut out = format!("{CSV_HEADER}\n");
            for r in &rows {
                let (adds, muls) = if r.construction.is_adder() { (1, 0) } else { (0, 1) };
                writeln!(
                    out,
                    "{},{},{},{},{adds},{muls},{:.6}",
                    r.construction,
                    r.n,
                    r.qubits.map(|q| q.to_string()).unwrap_or_default(),
                    r.gates,
                    r.seconds
                )
                .unwrap();
            }
            out
        }
        OutputFormat::Human => {
            let mut out = String::new();
            write!(out, "{:<22}", "construction").unwrap();
            for n in args.n_min..=args.n_max {
                write!(out, "{:>14}", format!("n={n}")).unwrap();
            }
            writeln!(out).unwrap();
            for construction in Construction::ALL {
                write!(out, "{:<22}", construction.as_str()).unwrap();
                for r in rows.iter().filter(|r| r.construction == construction) {
                    let cell = match r.qubits {
                        Some(q) => format!("{q}q/{}g", r.gates),
                        None => format!("-/{}g", r.gates),
                    };
                    write!(out, "{cell:>14}").unwrap();
                }
                writeln!(out).unwrap();
            }
            writeln!(out, "(q = qubits, g = counted gates; quantum rows within the qubit cap verified against built circuits)").unwrap();
            out
        }
    })
}

fn run_export(args: &ExportArgs) -> Result<String, Failure> {
    let construction: Construction = args.construction.parse().map_err(Failure::usage)?;
    if args.n == 0 || args.n > 12 {
        return Err(Failure {
            code: EXIT_CONSTRAINT,
            message: format!("n = {} outside the supported range 1..=12", args.n),
        });
    }
    if args.constant >> args.n != 0 {
        return Err(Failure {
            code: EXIT_CONSTRAINT,
            message: format!("constant {} does not fit in {} bits", args.constant, args.n),
        });
    }
    let circuit = reference_circuit(construction, args.n, args.constant)?.ok_or_else(|| {
        Failure::usage(format!("{construction} is a classical construction; nothing to export"))
    })?;
    let text = circuit.export_gatelist();
    match &args.output {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(format!("wrote {} gates to {}\n", circuit.len(), path.display()))
        }
        None => Ok(text),
    }
}
