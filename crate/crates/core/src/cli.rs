//! The `uca-repext` command line.
//!
//! Every subcommand prints one JSON object on stdout and maps its result to
//! an exit status: 0 sat / valid / yes, 1 unsat / invalid / no, 2 budget
//! exhausted, 64 unusable input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::arith::Rat;
use crate::model::{Domain, Graph, InstanceError, InstanceFile, PartialRep, Representation, SolveInstance};
use crate::reduction::{oracle_partition, reduce_to_repext, validate_3p, Mode, ReductionError, ThreePartitionFile};
use crate::render::render_svg;
use crate::solver::{solve, Budget, SolveOutcome};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "uca-repext", version, about = "Partial representation extension for unit circular-arc graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    /// Stop after this many feasibility checks.
    #[arg(long = "budget-checks", value_name = "N")]
    pub checks: Option<u64>,
    /// Stop after this many seconds of search.
    #[arg(long = "budget-seconds", value_name = "S")]
    pub seconds: Option<f64>,
    /// Worker threads (the search currently runs on one).
    #[arg(long, value_name = "T")]
    pub threads: Option<NonZeroUsize>,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget, CliError> {
        let max_time = match self.seconds {
            Some(s) if !(s.is_finite() && s >= 0.0) => {
                return Err(CliError::input("--budget-seconds must be a non-negative number"))
            }
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(Budget {
            max_checks: self.checks,
            max_time,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the arc instance for a 3-Partition file.
    Reduce {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Decide whether the pinned arcs extend.
    Solve {
        instance: PathBuf,
        /// Where to write the witness (only on sat).
        #[arg(long)]
        witness: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Validate a witness against an instance.
    Check { instance: PathBuf, witness: PathBuf },
    /// Brute-force the partition problem itself.
    Oracle {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Draw an instance, optionally with a witness.
    Render {
        instance: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        svg: PathBuf,
    },
    /// Solve the path on 2ℓ vertices inside a line window.
    Lemma {
        ell: usize,
        #[arg(long)]
        window: Rat,
        #[arg(long)]
        witness: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub struct CliError {
    status: i32,
    payload: Value,
}

impl CliError {
    fn input(message: impl Into<String>) -> CliError {
        CliError {
            status: EXIT_INPUT,
            payload: json!({ "outcome": "error", "error": message.into() }),
        }
    }

    fn invalid(payload: Value) -> CliError {
        CliError {
            status: EXIT_NO,
            payload,
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{what} {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn resolved(p: &Path) -> PathBuf {
    fs::canonicalize(p)
        .or_else(|_| std::path::absolute(p))
        .unwrap_or_else(|_| p.to_path_buf())
}

/// Rejects outputs that coincide with an input or with each other.
fn guard_clobber(inputs: &[&Path], outputs: &[(&str, &Path)]) -> Result<(), CliError> {
    let ins: Vec<PathBuf> = inputs.iter().map(|p| resolved(p)).collect();
    let mut seen: Vec<(&str, PathBuf)> = Vec::new();
    for (flag, out) in outputs {
        let r = resolved(out);
        if ins.contains(&r) {
            return Err(CliError::input(format!(
                "{flag} {} would overwrite an input file",
                out.display()
            )));
        }
        if let Some((other, _)) = seen.iter().find(|(_, p)| *p == r) {
            return Err(CliError::input(format!("{flag} and {other} name the same file")));
        }
        seen.push((flag, r));
    }
    Ok(())
}

fn load_instance(path: &Path) -> Result<SolveInstance, CliError> {
    let file: InstanceFile = read_json(path, "instance")?;
    file.into_instance().map_err(|e| match e {
        InstanceError::Partial(rep) => CliError::invalid(json!({
            "outcome": "invalid",
            "error": format!("partial representation: {rep}"),
        })),
        other => CliError::input(format!("instance {}: {other}", path.display())),
    })
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn finish_solve(
    inst: &SolveInstance,
    outcome: SolveOutcome,
    witness_out: Option<&Path>,
    svg_out: Option<&Path>,
    extra: Value,
) -> Result<(i32, Value), CliError> {
    let mut payload = json!({
        "outcome": outcome.verdict(),
        "stats": outcome.stats(),
    });
    if let Value::Object(extra) = extra {
        payload.as_object_mut().expect("object").extend(extra);
    }
    let status = match &outcome {
        SolveOutcome::Sat { witness, .. } => {
            if let Some(path) = witness_out {
                write_file(path, &pretty(witness))?;
            }
            if let Some(path) = svg_out {
                let svg = render_svg(inst, Some(witness)).map_err(|e| CliError::input(e.to_string()))?;
                write_file(path, &svg)?;
            }
            payload["witness"] = json!(witness);
            if let Domain::Line { .. } = inst.domain() {
                payload["extent"] = json!(witness.extent());
            }
            EXIT_YES
        }
        SolveOutcome::Unsat { .. } => EXIT_NO,
        SolveOutcome::Unknown { .. } => EXIT_UNKNOWN,
    };
    Ok((status, payload))
}

fn resolve_mode(file: &ThreePartitionFile, flag: Option<Mode>) -> Mode {
    flag.or(file.mode).unwrap_or_default()
}

fn execute(command: &Command) -> Result<(i32, Value), CliError> {
    match command {
        Command::Reduce { input, out, mode } => {
            guard_clobber(&[input], &[("--out", out)])?;
            let file: ThreePartitionFile = read_json(input, "3-Partition file")?;
            let mode = resolve_mode(&file, *mode);
            let inst = match reduce_to_repext(&file.instance(), mode) {
                Ok(inst) => inst,
                Err(ReductionError::Invalid(v)) => {
                    return Err(CliError::invalid(json!({ "outcome": "invalid", "mode": mode, "violations": v })))
                }
                Err(e) => return Err(CliError::input(e.to_string())),
            };
            write_file(out, &pretty(&InstanceFile::from(&inst)))?;
            Ok((
                EXIT_YES,
                json!({
                    "outcome": "ok",
                    "mode": mode,
                    "vertices": inst.graph().len(),
                    "edges": inst.graph().edge_count(),
                    "domain": inst.domain().to_string(),
                }),
            ))
        }
        Command::Solve {
            instance,
            witness,
            budget,
            svg,
        } => {
            let mut outs = Vec::new();
            if let Some(w) = witness {
                outs.push(("--witness", w.as_path()));
            }
            if let Some(s) = svg {
                outs.push(("--svg", s.as_path()));
            }
            guard_clobber(&[instance], &outs)?;
            let budget = budget.budget()?;
            let inst = load_instance(instance)?;
            let outcome = solve(&inst, budget).map_err(|e| CliError::input(e.to_string()))?;
            finish_solve(&inst, outcome, witness.as_deref(), svg.as_deref(), json!({}))
        }
        Command::Check { instance, witness } => {
            let inst = load_instance(instance)?;
            let rep: Representation = read_json(witness, "witness")?;
            Ok(match inst.check(&rep) {
                Ok(()) => (EXIT_YES, json!({ "outcome": "valid" })),
                Err(e) => (EXIT_NO, json!({ "outcome": "invalid", "error": e.to_string() })),
            })
        }
        Command::Oracle { input, mode } => {
            let file: ThreePartitionFile = read_json(input, "3-Partition file")?;
            let mode = resolve_mode(&file, *mode);
            let inst = file.instance();
            if let Err(v) = validate_3p(&inst, mode) {
                return Err(CliError::invalid(json!({ "outcome": "invalid", "mode": mode, "violations": v })));
            }
            Ok(match oracle_partition(&inst, mode) {
                Some(w) => (EXIT_YES, json!({ "outcome": "yes", "mode": mode, "groups": w.groups })),
                None => (EXIT_NO, json!({ "outcome": "no", "mode": mode })),
            })
        }
        Command::Render { instance, witness, svg } => {
            let mut ins = vec![instance.as_path()];
            if let Some(w) = witness {
                ins.push(w);
            }
            guard_clobber(&ins, &[("--svg", svg)])?;
            let inst = load_instance(instance)?;
            let rep: Option<Representation> = witness.as_deref().map(|w| read_json(w, "witness")).transpose()?;
            match render_svg(&inst, rep.as_ref()) {
                Ok(doc) => {
                    write_file(svg, &doc)?;
                    Ok((EXIT_YES, json!({ "outcome": "ok" })))
                }
                Err(e) => Err(CliError::invalid(json!({ "outcome": "invalid", "error": e.to_string() }))),
            }
        }
        Command::Lemma {
            ell,
            window,
            witness,
            budget,
            svg,
        } => {
            let mut outs = Vec::new();
            if let Some(w) = witness {
                outs.push(("--witness", w.as_path()));
            }
            if let Some(s) = svg {
                outs.push(("--svg", s.as_path()));
            }
            guard_clobber(&[], &outs)?;
            if *ell == 0 {
                return Err(CliError::input("ell must be at least 1"));
            }
            let budget = budget.budget()?;
            let domain = Domain::line(window.clone()).map_err(|e| CliError::input(format!("--window: {e}")))?;
            let inst = SolveInstance::new(Graph::path("p", 2 * ell), domain, PartialRep::new())
                .map_err(|e| CliError::input(e.to_string()))?;
            let outcome = solve(&inst, budget).map_err(|e| CliError::input(e.to_string()))?;
            finish_solve(
                &inst,
                outcome,
                witness.as_deref(),
                svg.as_deref(),
                json!({ "ell": ell, "window": window }),
            )
        }
    }
}

/// Parses `args` and runs the command, writing the JSON result to `out`
/// and diagnostics to `err`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_YES,
                _ => EXIT_INPUT,
            };
        }
    };
    let (status, payload) = match execute(&cli.command) {
        Ok(done) => done,
        Err(e) => {
            if e.status == EXIT_INPUT {
                let _ = writeln!(err, "error: {}", e.payload["error"].as_str().unwrap_or("input error"));
            }
            (e.status, e.payload)
        }
    };
    let _ = writeln!(out, "{payload}");
    status
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_are_input_errors() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["uca-repext", "frobnicate"], &mut out, &mut err), EXIT_INPUT);
        assert_eq!(run(["uca-repext", "lemma", "2", "--window", "2/0"], &mut out, &mut err), EXIT_INPUT);
        assert_eq!(run(["uca-repext", "--help"], &mut out, &mut err), EXIT_YES);
    }

    #[test]
    fn clobber_guard() {
        let p = Path::new("same.json");
        assert!(guard_clobber(&[p], &[("--out", p)]).is_err());
        assert!(guard_clobber(&[], &[("--witness", p), ("--svg", Path::new("./same.json"))]).is_err());
        assert!(guard_clobber(&[p], &[("--out", Path::new("other.json"))]).is_ok());
    }
}
