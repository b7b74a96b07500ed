//! `xtt` command line: `transduce` and `check`.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser};

use crate::engine::{transduce, TransduceOptions, TransductionResult};
use crate::rules::{load_rules, validate_rule, StateName, Transducer};
use crate::tree::{parse_sexpr, Tree};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCOMPLETE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "xtt", version, about = "Weighted extended top-down tree transducer")]
pub enum CliConfig {
    /// Transduce one tree, or a file of trees (one per line)
    Transduce(TransduceArgs),
    /// Validate and classify a rule file
    Check(CheckArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["tree", "input"]))]
pub struct TransduceArgs {
    /// YAML rule file
    #[arg(long, value_name = "PATH")]
    pub rules: PathBuf,

    /// Input tree as an s-expression
    #[arg(long, value_name = "SEXPR")]
    pub tree: Option<String>,

    /// File with one s-expression per line; blank lines are skipped
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,

    /// Beam width; 0 keeps every configuration
    #[arg(long, default_value_t = 0)]
    pub beam: usize,

    /// Maximum number of rule applications per input
    #[arg(long, default_value_t = crate::engine::DEFAULT_MAX_STEPS, value_parser = positive)]
    pub max_steps: usize,

    /// Print only the best N outputs; 0 prints all
    #[arg(long, default_value_t = 0)]
    pub top: usize,

    /// Initial state
    #[arg(long = "state", default_value = crate::rules::DEFAULT_INITIAL_STATE)]
    pub initial_state: String,

    /// Append the output yield to each line
    #[arg(long = "yield")]
    pub show_yield: bool,

    /// List the derivations supporting each output
    #[arg(long = "derivations")]
    pub show_derivations: bool,

    /// Report stuck configurations and search statistics on stderr
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// YAML rule file
    #[arg(long, value_name = "PATH")]
    pub rules: PathBuf,
}

pub fn run(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let status = match config {
        CliConfig::Transduce(args) => run_transduce(args, out, err),
        CliConfig::Check(args) => run_check(args, out, err),
    };
    status.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: writing output: {e}");
        EXIT_ERROR
    })
}

fn load_rule_file(path: &PathBuf, err: &mut dyn Write) -> io::Result<Option<Transducer>> {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            writeln!(err, "error: cannot read {}: {e}", path.display())?;
            return Ok(None);
        }
    };
    match load_rules(&text) {
        Ok(t) => Ok(Some(t)),
        Err(e) => {
            writeln!(err, "error: {}: {e}", path.display())?;
            Ok(None)
        }
    }
}

fn positive(text: &str) -> Result<usize, String> {
    match text.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Weight with exactly six fractional digits; ties round half to even.
pub fn format_weight(weight: f64) -> String {
    format!("{weight:.6}")
}

pub fn run_transduce(args: &TransduceArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let Some(transducer) = load_rule_file(&args.rules, err)? else {
        return Ok(EXIT_ERROR);
    };
    let Ok(state) = StateName::new(&args.initial_state) else {
        writeln!(err, "error: invalid state name {:?}", args.initial_state)?;
        return Ok(EXIT_ERROR);
    };

    let mut inputs: Vec<Tree> = Vec::new();
    match (&args.tree, &args.input) {
        (Some(text), None) => match parse_sexpr(text) {
            Ok(tree) => inputs.push(tree),
            Err(e) => {
                writeln!(err, "error: input tree: {e}")?;
                return Ok(EXIT_ERROR);
            }
        },
        (None, Some(path)) => {
            let text = match fs::read_to_string(path) {
                Ok(text) => text,
                Err(e) => {
                    writeln!(err, "error: cannot read {}: {e}", path.display())?;
                    return Ok(EXIT_ERROR);
                }
            };
            for (lineno, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                match parse_sexpr(line) {
                    Ok(tree) => inputs.push(tree),
                    Err(e) => {
                        writeln!(err, "error: {}:{}: {e}", path.display(), lineno + 1)?;
                        return Ok(EXIT_ERROR);
                    }
                }
            }
        }
        _ => {
            writeln!(err, "error: give exactly one of --tree or --input")?;
            return Ok(EXIT_ERROR);
        }
    }

    let options = TransduceOptions {
        collect_stuck: args.verbose,
        ..TransduceOptions::default()
            .with_beam(args.beam)
            .with_max_steps(args.max_steps)
            .with_initial_state(state)
    };

    let many = args.input.is_some();
    let mut status = EXIT_OK;
    for (i, tree) in inputs.iter().enumerate() {
        if many {
            writeln!(out, "# input {}: {tree}", i + 1)?;
        }
        let result = transduce(tree, &transducer, &options);
        write_result(args, &result, out)?;
        if args.verbose {
            for stuck in &result.stuck {
                writeln!(err, "stuck: {stuck}")?;
            }
            writeln!(err, "expansions={}", result.expansions)?;
        }
        if result.outputs.is_empty() {
            status = EXIT_INCOMPLETE;
        }
    }
    Ok(status)
}

fn write_result(args: &TransduceArgs, result: &TransductionResult, out: &mut dyn Write) -> io::Result<()> {
    let shown = if args.top == 0 {
        result.outputs.len()
    } else {
        args.top.min(result.outputs.len())
    };
    for output in &result.outputs[..shown] {
        write!(out, "{}\t{}", format_weight(output.weight), output.tree)?;
        if args.show_yield {
            write!(out, "\t{}", output.tree.yield_of().join(" "))?;
        }
        writeln!(out)?;
        if args.show_derivations {
            for d in &output.derivations {
                let steps: Vec<String> = d.steps.iter().map(ToString::to_string).collect();
                writeln!(out, "    {}\t{}", format_weight(d.weight), steps.join(" "))?;
            }
        }
    }
    writeln!(
        out,
        "outputs={} stuck={} truncated={}",
        result.outputs.len(),
        result.stuck_count,
        result.truncated
    )
}

pub fn run_check(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let Some(transducer) = load_rule_file(&args.rules, err)? else {
        return Ok(EXIT_ERROR);
    };
    writeln!(out, "rules: {}", transducer.len())?;
    let states: Vec<&str> = transducer.states().into_iter().map(|s| s.as_str()).collect();
    writeln!(out, "states: {}", states.join(", "))?;
    for rule in transducer.rules() {
        for warning in validate_rule(rule).warnings {
            writeln!(out, "warning: rule {}: {warning}", rule.id)?;
        }
    }
    writeln!(out, "{}", transducer.classify())?;
    Ok(EXIT_OK)
}
