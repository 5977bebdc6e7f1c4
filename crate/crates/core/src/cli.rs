//! Command-line front end. Exit codes: 0 success or PASS, 1 FAIL, 2 input
//! or usage error, 3 resource limit.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::checker::{check_unit, render_report, report_json, CheckOptions, Status};
use crate::eventb::{parse_machine, render_machine, well_formedness_check, Machine};
use crate::jml::render_class;
use crate::semantics::{Universe, DEFAULT_CEILING};
use crate::translate::translate_machine;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "eb2jml", version, about = "Translate Event-B machines to JML and check the translation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tree,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the JML-annotated Java class for a machine.
    Translate {
        input: PathBuf,
        /// Output file; defaults to `<MachineName>.java`.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check every translated event against its source over a finite universe.
    Check {
        input: PathBuf,
        /// Inclusive integer range, e.g. `0..2`.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        int_range: Option<(i64, i64)>,
        /// Carrier set size, e.g. `PERSON=2`; repeatable.
        #[arg(long = "carrier", value_parser = parse_carrier)]
        carriers: Vec<(String, usize)>,
        /// Largest number of enumerated states or state pairs.
        #[arg(long, env = "EB2JML_CEILING")]
        ceiling: Option<u64>,
        /// Largest cardinality of enumerated set values.
        #[arg(long)]
        max_set_card: Option<usize>,
        /// Witnesses reported per failing verdict.
        #[arg(long)]
        witnesses: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Parse and check a machine, then print its canonical text.
    Parse { input: PathBuf },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, found `{s}`"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn parse_carrier(s: &str) -> Result<(String, usize), String> {
    let (name, n) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=N, found `{s}`"))?;
    let n: usize = n.trim().parse().map_err(|e| format!("bad size: {e}"))?;
    if n == 0 {
        return Err(format!("carrier `{name}` must have at least one element"));
    }
    Ok((name.trim().to_string(), n))
}

/// Reads, parses and statically checks a machine, reporting problems on
/// `stderr`.
fn load(path: &Path, stderr: &mut dyn Write) -> Option<Machine> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot read {}: {e}", path.display());
            return None;
        }
    };
    let m = match parse_machine(&text) {
        Ok(m) => m,
        Err(e) => {
            let _ = writeln!(stderr, "{}: {e}", path.display());
            return None;
        }
    };
    let diags = well_formedness_check(&m);
    if diags.is_empty() {
        Some(m)
    } else {
        for d in diags {
            let _ = writeln!(stderr, "{}: {d}", path.display());
        }
        None
    }
}

fn write_output(
    out: Option<&Path>,
    text: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> bool {
    match out {
        Some(p) => match std::fs::write(p, text) {
            Ok(()) => true,
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", p.display());
                false
            }
        },
        None => stdout.write_all(text.as_bytes()).is_ok(),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match cli.command {
        Command::Parse { input } => match load(&input, stderr) {
            Some(m) => {
                let _ = write!(stdout, "{}", render_machine(&m));
                EXIT_OK
            }
            None => EXIT_INPUT,
        },
        Command::Translate { input, out } => {
            let Some(m) = load(&input, stderr) else {
                return EXIT_INPUT;
            };
            let unit = match translate_machine(&m) {
                Ok(u) => u,
                Err(e) => {
                    let _ = writeln!(stderr, "{}: {e}", input.display());
                    return EXIT_INPUT;
                }
            };
            let path = out.unwrap_or_else(|| PathBuf::from(format!("{}.java", unit.result.name)));
            if let Err(e) = std::fs::write(&path, render_class(&unit.result)) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
            let _ = writeln!(
                stdout,
                "wrote {} ({} methods)",
                path.display(),
                unit.result.methods.len()
            );
            for t in &unit.trace {
                let _ = writeln!(stdout, "  {t}");
            }
            EXIT_OK
        }
        Command::Check {
            input,
            int_range,
            carriers,
            ceiling,
            max_set_card,
            witnesses,
            format,
            out,
        } => {
            let Some(m) = load(&input, stderr) else {
                return EXIT_INPUT;
            };
            let ceiling = ceiling.unwrap_or(DEFAULT_CEILING);
            if ceiling == 0 {
                let _ = writeln!(stderr, "error: the ceiling must be at least 1");
                return EXIT_INPUT;
            }
            for (name, _) in &carriers {
                if !m.carrier_sets.iter().any(|c| c.name == *name) {
                    let _ = writeln!(stderr, "warning: `{name}` is not a carrier set of {}", m.name);
                }
            }
            let mut u = Universe::default();
            if let Some(r) = int_range {
                u.int_range = r;
            }
            u.carriers.extend(carriers);
            u.ceiling = ceiling;
            u.max_set_card = max_set_card;
            let opts = CheckOptions {
                witnesses: witnesses.unwrap_or(CheckOptions::default().witnesses),
            };
            let unit = match translate_machine(&m) {
                Ok(u) => u,
                Err(e) => {
                    let _ = writeln!(stderr, "{}: {e}", input.display());
                    return EXIT_INPUT;
                }
            };
            let report = match check_unit(&unit, &u, opts) {
                Ok(r) => r,
                Err(e) => {
                    let _ = writeln!(stderr, "{}: {e}", input.display());
                    return EXIT_INPUT;
                }
            };
            let text = match format {
                Format::Text => render_report(&report),
                Format::Tree => report_json(&report) + "\n",
            };
            if !write_output(out.as_deref(), &text, stdout, stderr) {
                return EXIT_INPUT;
            }
            match report.status {
                Status::Pass => EXIT_OK,
                Status::Fail => EXIT_FAIL,
                Status::ResourceLimit => EXIT_RESOURCE,
            }
        }
    }
}
