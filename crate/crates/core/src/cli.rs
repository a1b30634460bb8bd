//! Command-line front end. [`run`] is the whole program minus process
//! plumbing, so it can be driven from tests.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::certificates::{check_minimality, complement, verify_switching_flow, CertificateError};
use crate::engine::{
    decide, oracle_decide_staterep, simulate, simulate_traced, EngineError, StateRepConfig,
};
use crate::flow::{parse_flow, serialize_flow, FlowError};
use crate::generators::{Family, GeneratorError, GeneratorSpec};
use crate::graph::{analyze, export_dot, parse_instance, serialize_instance, Instance, InstanceError};
use crate::relaxation::{
    build_constraints, check_point, feasible, gap_search, parse_point, serialize_point,
    witness_document, Feasibility, GapMode, GapOutcome, RelaxError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_IO: i32 = 5;
pub const EXIT_TOO_LARGE: i32 = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Instance {
        path: String,
        source: InstanceError,
    },
    #[error("{path}: {source}")]
    Flow { path: String, source: FlowError },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error(transparent)]
    Relax(#[from] RelaxError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Generator(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Instance { .. } | CliError::Flow { .. } => EXIT_MALFORMED,
            CliError::Engine(EngineError::BudgetExhausted { .. }) => EXIT_BUDGET,
            CliError::Engine(EngineError::SteppedFromDestination(_)) => EXIT_USAGE,
            CliError::Engine(EngineError::StateSpaceTooLarge { .. }) => EXIT_TOO_LARGE,
            CliError::Certificate(CertificateError::BudgetExceeded(_)) => EXIT_BUDGET,
            CliError::Certificate(CertificateError::NonEdge(_)) => EXIT_MALFORMED,
            CliError::Certificate(_) => EXIT_USAGE,
            CliError::Relax(RelaxError::Document(_) | RelaxError::DimensionMismatch(_)) => {
                EXIT_MALFORMED
            }
            CliError::Relax(RelaxError::TooLarge(_)) => EXIT_TOO_LARGE,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "arrival", version)]
#[command(about = "Decide, certify and analyze train runs on switch graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Oracle {
    /// Stop at the first dead end
    DeadEnd,
    /// Detect a repeated state
    Staterep,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Counter,
    Zigzag,
    Trap,
    Direct,
    Random,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print YES (terminates) or NO (cycles) with the step count
    Decide {
        input: String,
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long, value_enum, default_value = "dead-end")]
        oracle: Oracle,
    },
    /// Run without the dead-end cut; needs a step budget
    Simulate {
        input: String,
        #[arg(long)]
        max_steps: u64,
        /// Print every visited vertex
        #[arg(long)]
        trace: bool,
    },
    /// Write the run profile as a flow document
    Profile {
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also check the profile is the least switching flow up to this cap
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Report dead ends and edge desperations
    Analyze {
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a switching-flow certificate
    VerifyFlow {
        instance: String,
        flow: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Write the complement instance
    Complement {
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide feasibility of the rational relaxation, or check a point
    Relax {
        input: String,
        /// Check this point document instead of deciding feasibility
        #[arg(long)]
        point: Option<String>,
        /// Where to write the witness point
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a cycling instance with a feasible relaxation
    GapSearch {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = u64::MAX)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a generated instance
    Gen {
        #[arg(value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a Graphviz rendering
    ExportDot {
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String, CliError> {
        let io_err = |source| CliError::Io {
            path: path.to_string(),
            source,
        };
        if path == "-" {
            let mut text = String::new();
            self.stdin.read_to_string(&mut text).map_err(io_err)?;
            Ok(text)
        } else {
            fs::read_to_string(path).map_err(io_err)
        }
    }

    fn instance(&mut self, path: &str) -> Result<Instance, CliError> {
        let text = self.read(path)?;
        parse_instance(&text).map_err(|source| CliError::Instance {
            path: path.to_string(),
            source,
        })
    }

    fn emit(&mut self, out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
        match out {
            Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            }),
            None => self.print(text),
        }
    }

    fn print(&mut self, text: &str) -> Result<(), CliError> {
        self.stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
    }

    fn note(&mut self, text: &str) {
        let _ = self.stderr.write_all(text.as_bytes());
    }
}

fn analysis_document(instance: &Instance) -> String {
    let report = analyze(instance);
    let dead: Vec<&str> = report.dead().into_iter().map(|v| instance.name(v)).collect();
    let desperation: serde_json::Map<String, serde_json::Value> = instance
        .edges()
        .iter()
        .filter_map(|&e| report.desperation(e).map(|k| (instance.edge_key(e), k.into())))
        .collect();
    let mut out = serde_json::to_string_pretty(&serde_json::json!({
        "dead": dead,
        "desperation": desperation,
    }))
    .expect("analysis serializes");
    out.push('\n');
    out
}

fn execute(command: Command, io: &mut Io<'_>) -> Result<(), CliError> {
    match command {
        Command::Decide {
            input,
            max_steps,
            oracle,
        } => {
            let instance = io.instance(&input)?;
            let decision = match oracle {
                Oracle::DeadEnd => decide(&instance, max_steps)?,
                Oracle::Staterep => {
                    oracle_decide_staterep(&instance, StateRepConfig::default())?.decision
                }
            };
            io.print(&format!("{}\n", decision.summary(&instance)))
        }
        Command::Simulate {
            input,
            max_steps,
            trace,
        } => {
            let instance = io.instance(&input)?;
            let decision = if trace {
                let mut visited = Vec::new();
                let result = simulate_traced(&instance, max_steps, |v| {
                    visited.push(instance.name(v).to_string())
                });
                io.print(&format!("{}\n", visited.join(" ")))?;
                result?
            } else {
                simulate(&instance, max_steps)?
            };
            io.print(&format!("{}\n", decision.summary(&instance)))
        }
        Command::Profile { input, out, cap } => {
            let instance = io.instance(&input)?;
            let decision = decide(&instance, None)?;
            match decision.profile() {
                Some(profile) => {
                    io.emit(out.as_ref(), &serialize_flow(&instance, profile))?;
                    if let Some(cap) = cap {
                        let report = check_minimality(&instance, cap)?;
                        let verdict = if report.confirmed() { "MINIMAL" } else { "NOT_MINIMAL" };
                        io.note(&format!(
                            "{verdict} flows={} counterexamples={}\n",
                            report.flows_examined,
                            report.counterexamples.len()
                        ));
                    }
                    Ok(())
                }
                None => io.print(&format!("{}\n", decision.summary(&instance))),
            }
        }
        Command::Analyze { input, out } => {
            let instance = io.instance(&input)?;
            io.emit(out.as_ref(), &analysis_document(&instance))
        }
        Command::VerifyFlow {
            instance,
            flow,
            format,
        } => {
            let inst = io.instance(&instance)?;
            let text = io.read(&flow)?;
            let parsed = parse_flow(&inst, &text).map_err(|source| CliError::Flow {
                path: flow.clone(),
                source,
            })?;
            let verdict = verify_switching_flow(&inst, &parsed)?;
            match format {
                Format::Text => io.print(&verdict.render_text()),
                Format::Json => io.print(&verdict.render_json()),
            }
        }
        Command::Complement { input, out } => {
            let instance = io.instance(&input)?;
            io.emit(out.as_ref(), &serialize_instance(&complement(&instance)))
        }
        Command::Relax { input, point, out } => {
            let instance = io.instance(&input)?;
            let system = build_constraints(&instance);
            if let Some(path) = point {
                let text = io.read(&path)?;
                let parsed = parse_point(&instance, &text).map_err(|e| match e {
                    RelaxError::Document(source) => CliError::Flow { path, source },
                    other => CliError::Relax(other),
                })?;
                let check = check_point(&system, &parsed)?;
                return io.print(&check.render_text(&instance));
            }
            match feasible(&system)? {
                Feasibility::Feasible(witness) => {
                    io.print("FEASIBLE\n")?;
                    let doc = serialize_point(&instance, &witness);
                    match out {
                        Some(path) => io.emit(Some(&path), &doc),
                        None => io.print(&doc),
                    }
                }
                Feasibility::Infeasible => io.print("INFEASIBLE\n"),
            }
        }
        Command::GapSearch {
            n,
            mode,
            seed,
            budget,
            out,
        } => {
            let mode = match mode {
                Mode::Exhaustive => GapMode::Exhaustive,
                Mode::Random => GapMode::SeededRandom { seed },
            };
            match gap_search(n, mode, budget)? {
                GapOutcome::Found(witness) => {
                    io.note(&format!("found after {} instances\n", witness.examined));
                    io.emit(out.as_ref(), &witness_document(&witness))
                }
                GapOutcome::NotFound { examined } => {
                    io.print(&format!("NOT_FOUND examined={examined}\n"))
                }
            }
        }
        Command::Gen {
            family,
            n,
            seed,
            out,
        } => {
            let family = match family {
                FamilyArg::Counter => Family::Counter,
                FamilyArg::Zigzag => Family::Zigzag,
                FamilyArg::Trap => Family::Trap,
                FamilyArg::Direct => Family::Direct,
                FamilyArg::Random => Family::Random,
            };
            let instance = GeneratorSpec { family, n, seed }.generate()?;
            io.emit(out.as_ref(), &serialize_instance(&instance))
        }
        Command::ExportDot { input, out } => {
            let instance = io.instance(&input)?;
            io.emit(out.as_ref(), &export_dot(&instance))
        }
    }
}

/// Parses `args` (program name first) and runs one command. Returns the
/// process exit status.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let mut io = Io {
        stdin,
        stdout,
        stderr,
    };
    match execute(cli.command, &mut io) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            io.note(&format!("error: {e}\n"));
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["arrival"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut input, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn gen(args: &[&str]) -> String {
        let mut argv = vec!["gen"];
        argv.extend_from_slice(args);
        let (code, out, _) = call(&argv, "");
        assert_eq!(code, 0);
        out
    }

    #[test]
    fn decide_trap_is_successful_no() {
        let trap = gen(&["trap"]);
        assert_eq!(call(&["decide", "-"], &trap), (0, "NO dead_end=o steps=0\n".into(), String::new()));
    }

    #[test]
    fn counter_pipeline() {
        let counter = gen(&["counter", "--n", "3"]);
        assert_eq!(call(&["decide", "-"], &counter).1, "YES steps=22\n");
        assert_eq!(
            call(&["decide", "-", "--oracle", "staterep"], &counter).1,
            "YES steps=22\n"
        );
    }

    #[test]
    fn complement_flips_direct() {
        let direct = gen(&["direct"]);
        let (_, bar, _) = call(&["complement", "-"], &direct);
        let (code, out, _) = call(&["decide", "-"], &bar);
        assert_eq!(code, 0);
        assert!(out.starts_with("NO"));
    }

    #[test]
    fn simulate_needs_budget() {
        let trap = gen(&["trap"]);
        let (code, _, err) = call(&["simulate", "-"], &trap);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--max-steps"));
        let (code, _, err) = call(&["simulate", "-", "--max-steps", "50"], &trap);
        assert_eq!(code, EXIT_BUDGET);
        assert!(err.contains("budget exhausted"));
        let zig = gen(&["zigzag"]);
        assert_eq!(
            call(&["simulate", "-", "--max-steps", "50", "--trace"], &zig).1,
            "o w u w d\nYES steps=4\n"
        );
    }

    #[test]
    fn malformed_and_unknown_verbs() {
        assert_eq!(call(&["decide", "-"], "{").0, EXIT_MALFORMED);
        assert_eq!(call(&["frobnicate"], "").0, EXIT_USAGE);
        assert_eq!(call(&["decide", "/nonexistent/file.json"], "").0, EXIT_IO);
        assert_eq!(call(&["gen", "counter", "--n", "0"], "").0, EXIT_USAGE);
    }

    #[test]
    fn profile_then_verify() {
        let zig = gen(&["zigzag"]);
        let dir = std::env::temp_dir().join(format!("arrival-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let inst = dir.join("zig.json");
        let profile = dir.join("profile.json");
        fs::write(&inst, &zig).unwrap();
        let (code, _, err) = call(
            &[
                "profile",
                inst.to_str().unwrap(),
                "--out",
                profile.to_str().unwrap(),
                "--cap",
                "3",
            ],
            "",
        );
        assert_eq!(code, 0);
        assert!(err.starts_with("MINIMAL"));
        let (code, out, _) = call(
            &["verify-flow", inst.to_str().unwrap(), profile.to_str().unwrap()],
            "",
        );
        assert_eq!((code, out.as_str()), (0, "VALID\n"));

        let bad = r#"{"edges": {"o->w": "1", "w->d": "1"}}"#;
        let (code, out, _) = call(&["verify-flow", inst.to_str().unwrap(), "-"], bad);
        assert_eq!(code, 0);
        assert!(out.starts_with("INVALID\nBALANCE at w"));
        let (_, json, _) = call(
            &["verify-flow", inst.to_str().unwrap(), "-", "--format", "json"],
            bad,
        );
        assert!(json.contains("\"kind\": \"BALANCE\""));

        let (code, _, _) = call(
            &["verify-flow", inst.to_str().unwrap(), "-"],
            r#"{"edges": {"o->d": "1"}}"#,
        );
        assert_eq!(code, EXIT_MALFORMED);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn relax_decides_and_checks_points() {
        let trap = gen(&["trap"]);
        assert_eq!(call(&["relax", "-"], &trap).1, "INFEASIBLE\n");
        let direct = gen(&["direct"]);
        let (_, out, _) = call(&["relax", "-"], &direct);
        assert!(out.starts_with("FEASIBLE\n{"));

        let zig = gen(&["zigzag"]);
        let dir = std::env::temp_dir().join(format!("arrival-relax-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let inst = dir.join("zig.json");
        fs::write(&inst, &zig).unwrap();
        let point = r#"{"edges": {"o->w": "1", "w->u": "1/2", "u->w": "1/2", "w->d": "1"}}"#;
        let (code, out, _) = call(&["relax", inst.to_str().unwrap(), "--point", "-"], point);
        assert_eq!(code, 0);
        assert_eq!(out, "INFEASIBLE\nviolated: odd <= even at w\n");
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn analyze_and_dot() {
        let zig = gen(&["zigzag"]);
        let (_, out, _) = call(&["analyze", "-"], &zig);
        assert!(out.contains("\"dead\": []"));
        assert!(out.contains("\"w->u\": 2"));
        let (_, dot, _) = call(&["export-dot", "-"], &zig);
        assert!(dot.contains("\"w\" -> \"d\" [style=dashed];"));
    }

    #[test]
    fn gap_search_small_is_not_found() {
        assert_eq!(
            call(&["gap-search", "--n", "2"], "").1,
            "NOT_FOUND examined=4\n"
        );
    }
}
