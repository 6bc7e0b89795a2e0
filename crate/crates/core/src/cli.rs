//! The `sphord` command line.
//!
//! Results go to stdout, diagnostics to stderr. Operation failures print
//! `{"error": code, "detail": message}` on stderr and exit with 1; usage
//! errors exit with 2.

use std::fs;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::backforth::{self, DEFAULT_SEARCH_BOUND};
use crate::budget::Budget;
use crate::dense::{format_rational, parse_rational, DenseOracle, Enumeration, WitnessRequest};
use crate::logic::{self, parse};
use crate::order::{self, io, FiniteSphericalOrder};
use crate::spectra::{self, ExpansionSpec, HasseKind};

#[derive(Debug, Parser)]
#[command(name = "sphord", version, about = "Finite and dense n-spherical orders")]
struct Cli {
    /// Structured JSON output
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Size {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the derived structure on 1..m (or on --labels) as a structure file
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, required_unless_present = "labels")]
        m: Option<usize>,
        /// Comma-separated labels, in increasing order
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<String>>,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Check the four axioms on a structure file (`-` for stdin)
    Check { file: String },
    /// |K| for the derived structure of size m, or of a structure file
    Count {
        #[arg(long, required_unless_present = "file", requires = "m")]
        n: Option<usize>,
        #[arg(long, required_unless_present = "file", requires = "n")]
        m: Option<usize>,
        #[arg(long, conflicts_with_all = ["n", "m"])]
        file: Option<String>,
    },
    /// Search for an isomorphism between two structure files
    Iso { a: String, b: String },
    /// Enumerate every relation on m points satisfying the axioms, up to isomorphism
    Unique {
        #[command(flatten)]
        size: Size,
    },
    /// Density witness for a member tuple of rationals (p/q)
    Witness {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        tuple: Vec<String>,
    },
    /// Back-and-forth between two seeded dense oracles
    Backforth {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed_a: Option<u64>,
        #[arg(long)]
        seed_b: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND)]
        bound: usize,
        /// Print each added pair as a JSON line
        #[arg(long)]
        trace: bool,
        /// Check preservation over all n-tuples of the final map
        #[arg(long)]
        verify: bool,
    },
    /// Decide a sentence of the dense theory
    Decide {
        #[arg(long)]
        n: usize,
        sentence: String,
    },
    /// Satisfiability of a quantifier-free formula
    Sat {
        #[arg(long)]
        n: usize,
        formula: String,
    },
    /// Number of countable models of an expansion
    Spectrum {
        #[arg(long)]
        n: usize,
        /// r_k for k = 0, 2, 3, ..., n-1
        #[arg(long, value_delimiter = ',', conflicts_with = "ehrenfeucht")]
        counts: Option<Vec<u64>>,
        #[arg(long)]
        ehrenfeucht: Option<u64>,
        /// Infinitely many nonisolated 1-types
        #[arg(long, conflicts_with = "ehrenfeucht")]
        infinite_types: bool,
    },
    /// The countable models of the Ehrenfeucht expansion T^m_n
    Catalog {
        #[command(flatten)]
        size: CatalogSize,
    },
    /// Hasse diagram (DOT) for T1, T2, limit(k) or a `*`-product of them
    Hasse {
        #[arg(long)]
        kind: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
}

#[derive(Debug, Args)]
struct CatalogSize {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: u64,
}

struct Failure {
    code: String,
    detail: String,
}

impl Failure {
    fn new(code: &str, detail: impl ToString) -> Self {
        Failure {
            code: code.to_string(),
            detail: detail.to_string(),
        }
    }
}

macro_rules! from_coded {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::new(e.code(), &e)
            }
        }
    )*};
}

from_coded!(
    order::OrderError,
    io::StructureError,
    crate::dense::DenseError,
    backforth::BackForthError,
    logic::LogicError,
    spectra::SpectraError
);

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new("io_error", e)
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    json: bool,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String, Failure> {
        if path == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s)?;
            Ok(s)
        } else {
            fs::read_to_string(path).map_err(|e| Failure::new("io_error", format!("{path}: {e}")))
        }
    }

    fn structure(&mut self, path: &str) -> Result<FiniteSphericalOrder, Failure> {
        let text = self.read(path)?;
        Ok(io::from_json(&text)?)
    }

    fn write_to(&mut self, path: &str, text: &str) -> Result<(), Failure> {
        if path == "-" {
            self.stdout.write_all(text.as_bytes())?;
            Ok(())
        } else {
            fs::write(path, text).map_err(|e| Failure::new("io_error", format!("{path}: {e}")))
        }
    }

    fn line(&mut self, text: impl std::fmt::Display) -> Result<(), Failure> {
        writeln!(self.stdout, "{text}")?;
        Ok(())
    }

    /// Prints `value` as JSON under `--json`, otherwise the text.
    fn emit(&mut self, value: serde_json::Value, text: impl std::fmt::Display) -> Result<(), Failure> {
        if self.json {
            self.line(value)
        } else {
            self.line(text)
        }
    }
}

/// Runs one command line (including the program name) and returns the exit code.
pub fn dispatch<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io {
        stdin,
        stdout,
        json: cli.json,
    };
    match run(cli.command, &mut io) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "{}", json!({"error": f.code, "detail": f.detail}));
            1
        }
    }
}

fn order_labels(order: &FiniteSphericalOrder, t: &[usize]) -> Vec<String> {
    t.iter().map(|&i| order.elements()[i].clone()).collect()
}

fn run(command: Command, io: &mut Io<'_>) -> Result<(), Failure> {
    match command {
        Command::Generate { n, m, labels, output } => {
            let order = match labels {
                Some(labels) => FiniteSphericalOrder::derive(n, &labels)?,
                None => FiniteSphericalOrder::standard(n, m.expect("clap requires m"))?,
            };
            let mut text = io::to_json(&order);
            text.push('\n');
            io.write_to(&output, &text)
        }
        Command::Check { file } => {
            let order = io.structure(&file)?;
            let report = order::check_axioms(&order, Budget::from_env())?;
            if io.json {
                return io.line(serde_json::to_string(&report).expect("report serializes"));
            }
            for o in &report.outcomes {
                let status = if o.passed { "pass" } else { "FAIL" };
                let mut line = format!("{} {status} ({} checked)", o.axiom.name(), o.checked);
                if let Some(c) = &o.counterexample {
                    line += &format!(" counterexample ({})", order_labels(&order, c.tuple()).join(", "));
                }
                io.line(line)?;
            }
            let summary = if report.all_pass() {
                "all axioms pass"
            } else {
                "some axioms fail"
            };
            io.line(summary)
        }
        Command::Count { n, m, file } => {
            let value = match (file, n, m) {
                (Some(f), _, _) => io.structure(&f)?.relation_size(),
                (None, Some(n), Some(m)) => order::cardinality_formula(n, m)?,
                _ => unreachable!("clap enforces --n/--m or --file"),
            };
            io.emit(json!({"count": value.to_string()}), value)
        }
        Command::Iso { a, b } => {
            let left = io.structure(&a)?;
            let right = io.structure(&b)?;
            match order::are_isomorphic(&left, &right)? {
                Some(map) => {
                    let pairs: Vec<[String; 2]> = map
                        .iter()
                        .enumerate()
                        .map(|(i, &j)| [left.elements()[i].clone(), right.elements()[j].clone()])
                        .collect();
                    let text = pairs
                        .iter()
                        .map(|[x, y]| format!("{x} -> {y}"))
                        .collect::<Vec<_>>()
                        .join("\n");
                    io.emit(json!({"isomorphic": true, "map": pairs}), format!("isomorphic\n{text}"))
                }
                None => io.emit(json!({"isomorphic": false}), "not isomorphic"),
            }
        }
        Command::Unique { size } => {
            let census = order::enumerate_all_orders(size.n, size.m, Budget::from_env())?;
            let classes: Vec<serde_json::Value> = census
                .classes
                .iter()
                .map(|c| serde_json::from_str(&io::to_json(c)).expect("structure json"))
                .collect();
            io.emit(
                json!({"relations": census.relations, "classes": classes.len(), "representatives": classes}),
                format!(
                    "{} relations, {} isomorphism classes",
                    census.relations,
                    census.classes.len()
                ),
            )
        }
        Command::Witness { n, tuple } => {
            let oracle = DenseOracle::new(n, Enumeration::Canonical)?;
            let values = tuple.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
            let req = WitnessRequest::new(&oracle, values)?;
            let b = oracle.density_witness(&req)?;
            let text = format_rational(&b);
            io.emit(json!({"witness": text}), &text)
        }
        Command::Backforth {
            n,
            steps,
            seed_a,
            seed_b,
            bound,
            trace,
            verify,
        } => {
            let oracle =
                |seed: Option<u64>| DenseOracle::new(n, seed.map_or(Enumeration::Canonical, Enumeration::Seeded));
            let (a, b) = (oracle(seed_a)?, oracle(seed_b)?);
            let mut sink: Vec<String> = Vec::new();
            let result = backforth::run_with(a, b, steps, bound, |p| {
                if trace {
                    sink.push(p.to_json_line());
                }
            });
            for line in sink {
                io.line(line)?;
            }
            let iso = result?;
            let preserved = if verify {
                Some(iso.find_violation().is_none())
            } else {
                None
            };
            let covered = iso.coverage_holds();
            let mut text = format!(
                "{} pairs, coverage {}",
                iso.len(),
                if covered { "ok" } else { "FAILED" }
            );
            if let Some(p) = preserved {
                text += &format!(", preservation {}", if p { "ok" } else { "FAILED" });
            }
            io.emit(
                json!({"pairs": iso.len(), "coverage": covered, "preservation": preserved}),
                text,
            )
        }
        Command::Decide { n, sentence } => {
            let f = parse(&sentence, n)?;
            let value = logic::decide(n, &f)?;
            io.emit(json!({"value": value}), value)
        }
        Command::Sat { n, formula } => {
            let f = parse(&formula, n)?;
            match logic::qf_sat(n, &f)? {
                Some(d) => {
                    let classes: Vec<String> = d.classes().iter().map(|c| c.join("=")).collect();
                    let structure: serde_json::Value =
                        serde_json::from_str(&io::to_json(&d.class_order())).expect("structure json");
                    io.emit(
                        json!({"sat": true, "classes": classes, "diagram": structure}),
                        format!(
                            "sat\nclasses: {}\n{}",
                            classes.join(" | "),
                            io::to_json(&d.class_order())
                        ),
                    )
                }
                None => io.emit(json!({"sat": false}), "unsat"),
            }
        }
        Command::Spectrum {
            n,
            counts,
            ehrenfeucht,
            infinite_types,
        } => {
            let spec = match ehrenfeucht {
                Some(m) => ExpansionSpec::ehrenfeucht(n, m)?,
                None => ExpansionSpec::constants(n, &counts.unwrap_or_default(), infinite_types)?,
            };
            let value = spectra::spectrum(&spec);
            io.emit(json!({"spectrum": value.to_string()}), value)
        }
        Command::Catalog { size } => {
            let catalog = spectra::ehrenfeucht_catalog(size.n, size.m)?;
            if io.json {
                return io.line(serde_json::to_string(&catalog).expect("catalog serializes"));
            }
            for e in &catalog.models {
                let kind = match e.kind {
                    spectra::ModelKind::Prime => "prime".to_string(),
                    spectra::ModelKind::PrimeOverRealization(i) => format!("prime over p^{i}_inf"),
                    spectra::ModelKind::Saturated => "saturated".to_string(),
                };
                io.line(format!("{kind}: {}", e.property))?;
            }
            io.line(format!("{} models", catalog.len()))
        }
        Command::Hasse { kind, output } => {
            let diagram = spectra::hasse(&HasseKind::parse(&kind)?)?;
            io.write_to(&output, &diagram.to_dot())
        }
    }
}
