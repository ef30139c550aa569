use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ptlc_core::{
    check_equivalence, lookup, parse_grammar, Compilation, CompileError, CompiledRelation, Compiler, Diagnostic,
    Direction, Grammar, MarkedLanguage, Severity, StringTuple, Variant,
};

#[derive(Parser)]
#[command(name = "ptlc", version, about = "Compile and run partition-based two-level grammars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a grammar into a relation dump.
    Compile {
        grammar: PathBuf,
        /// Output path; the dump goes to stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "2", value_parser = parse_variant)]
        variant: Variant,
        /// Also write the three phase automata next to the output.
        #[arg(long, requires = "output")]
        snapshots: bool,
        /// Write Graphviz instead of the text format.
        #[arg(long)]
        dot: bool,
        /// Leave out the coercion phase (for testing `check`).
        #[arg(long, hide = true)]
        skip_sc: bool,
    },
    /// Analyze a surface form or generate from a lexical form.
    Lookup {
        relation: PathBuf,
        direction: LookupDirection,
        /// Input tuple; tapes are separated by commas.
        input: String,
        /// Maximum number of transitions that read no input.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        bound: Option<u64>,
    },
    /// Compare the compiled relation with a brute-force interpreter.
    Check {
        grammar: PathBuf,
        #[arg(long, default_value = "2", value_parser = parse_variant)]
        variant: Variant,
        /// Longest string per tape to enumerate.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
        #[arg(long, hide = true)]
        skip_sc: bool,
    },
    /// Print a relation dump in text or Graphviz form.
    Dump {
        relation: PathBuf,
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LookupDirection {
    Analyze,
    Generate,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: CompileError| e.to_string())
}

/// Diagnostics go to stderr, in colour only on a terminal and unless
/// `TLC_COLOR=0`.
struct Reporter {
    color: bool,
}

impl Reporter {
    fn new() -> Self {
        let disabled = std::env::var("TLC_COLOR").is_ok_and(|v| v == "0");
        Self {
            color: !disabled && io::stderr().is_terminal(),
        }
    }

    fn emit(&self, severity: Severity, line: Option<usize>, message: &str) {
        let (tag, code) = match severity {
            Severity::Error => ("error", "31"),
            Severity::Warning => ("warning", "33"),
        };
        let tag = if self.color {
            format!("\x1b[1;{code}m{tag}\x1b[0m")
        } else {
            tag.to_owned()
        };
        match line {
            Some(n) => eprintln!("{tag}: line {n}: {message}"),
            None => eprintln!("{tag}: {message}"),
        }
    }

    fn diagnostic(&self, d: &Diagnostic) {
        self.emit(d.severity, d.line, &d.message);
    }

    fn error(&self, message: &str) {
        self.emit(Severity::Error, None, message);
    }
}

/// Reported failure; the message has already been printed.
struct Reported;

fn load_grammar(path: &Path, reporter: &Reporter) -> Result<Grammar, Reported> {
    let text = fs::read_to_string(path).map_err(|e| {
        reporter.error(&format!("cannot read {}: {e}", path.display()));
        Reported
    })?;
    let grammar = parse_grammar(&text).map_err(|e| {
        reporter.emit(Severity::Error, Some(e.line), &e.message);
        Reported
    })?;
    let diagnostics = grammar.validate();
    for d in &diagnostics {
        reporter.diagnostic(d);
    }
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(Reported);
    }
    Ok(grammar)
}

fn compile(
    grammar: &Grammar,
    variant: Variant,
    skip_sc: bool,
    reporter: &Reporter,
) -> Result<(Compiler, Compilation), Reported> {
    let compiler = Compiler::new(grammar).map_err(|e| {
        reporter.error(&e.to_string());
        Reported
    })?;
    let result = if skip_sc {
        let initial = compiler.initial_approximation();
        compiler.apply_cr(&initial).map(|after_cr| Compilation {
            variant,
            relation: compiler.strip_markers(&after_cr),
            after_coercion: after_cr.clone(),
            after_restriction: after_cr,
            initial,
        })
    } else {
        compiler.compile(variant)
    };
    let compilation = result.map_err(|e| {
        reporter.error(&e.to_string());
        Reported
    })?;
    Ok((compiler, compilation))
}

fn render_relation(rel: &CompiledRelation, dot: bool) -> String {
    if dot {
        rel.to_dot("relation")
    } else {
        rel.to_text()
    }
}

fn render_phase(compiler: &Compiler, phase: &MarkedLanguage, dot: bool) -> String {
    let table = &compiler.preprocessed().table;
    if dot {
        phase.automaton.to_dot(table, &phase.phase.to_string())
    } else {
        format!("# phase {}\n{}", phase.phase, phase.automaton.to_text(table))
    }
}

fn snapshot_path(output: &Path, tag: &str, dot: bool) -> PathBuf {
    let mut name = output.file_stem().unwrap_or_default().to_os_string();
    name.push(format!(".{tag}.{}", if dot { "dot" } else { "fsa" }));
    output.with_file_name(name)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn run_compile(
    grammar: &Path,
    output: Option<&Path>,
    variant: Variant,
    snapshots: bool,
    dot: bool,
    skip_sc: bool,
    reporter: &Reporter,
) -> Result<bool> {
    let Ok(g) = load_grammar(grammar, reporter) else {
        return Ok(false);
    };
    let Ok((compiler, comp)) = compile(&g, variant, skip_sc, reporter) else {
        return Ok(false);
    };
    let dump = render_relation(&comp.relation, dot);
    match output {
        Some(path) => {
            write_file(path, &dump)?;
            if snapshots {
                for phase in [&comp.initial, &comp.after_restriction, &comp.after_coercion] {
                    let target = snapshot_path(path, &phase.phase.to_string(), dot);
                    write_file(&target, &render_phase(&compiler, phase, dot))?;
                }
            }
        }
        None => io::stdout().write_all(dump.as_bytes())?,
    }
    eprintln!(
        "compiled {} rule(s): {} states, {} transitions",
        g.cr_rules.len() + g.sc_rules.len(),
        comp.relation.num_states(),
        comp.relation.num_transitions()
    );
    Ok(true)
}

fn load_relation(path: &Path, reporter: &Reporter) -> Result<CompiledRelation, Reported> {
    let text = fs::read_to_string(path).map_err(|e| {
        reporter.error(&format!("cannot read {}: {e}", path.display()));
        Reported
    })?;
    CompiledRelation::from_text(&text).map_err(|e| {
        reporter.error(&format!("{}: {e}", path.display()));
        Reported
    })
}

fn run_lookup(
    relation: &Path,
    direction: LookupDirection,
    input: &str,
    bound: Option<u64>,
    reporter: &Reporter,
) -> Result<bool> {
    let Ok(rel) = load_relation(relation, reporter) else {
        return Ok(false);
    };
    let direction = match direction {
        LookupDirection::Analyze => Direction::Analyze,
        LookupDirection::Generate => Direction::Generate,
    };
    let tuple = StringTuple(input.split(',').map(str::to_owned).collect());
    let result = match lookup(&rel, direction, &tuple, bound.map(|b| b as usize)) {
        Ok(r) => r,
        Err(e) => {
            reporter.error(&e.to_string());
            return Ok(false);
        }
    };
    let mut out = io::stdout().lock();
    for t in &result.outputs {
        writeln!(out, "{}", t.0.join(","))?;
    }
    if result.truncated {
        writeln!(out, "!truncated")?;
    }
    Ok(true)
}

fn run_check(grammar: &Path, variant: Variant, bound: u64, skip_sc: bool, reporter: &Reporter) -> Result<bool> {
    let Ok(g) = load_grammar(grammar, reporter) else {
        return Ok(false);
    };
    let Ok((_, comp)) = compile(&g, variant, skip_sc, reporter) else {
        return Ok(false);
    };
    let report = check_equivalence(&g, &comp.relation, variant, bound as usize);
    match report.counterexample {
        None => {
            println!("equivalent up to bound {bound}");
            Ok(true)
        }
        Some(cx) => {
            println!("counterexample: {cx}");
            Ok(false)
        }
    }
}

fn run_dump(relation: &Path, dot: bool, reporter: &Reporter) -> Result<bool> {
    let Ok(rel) = load_relation(relation, reporter) else {
        return Ok(false);
    };
    io::stdout().write_all(render_relation(&rel, dot).as_bytes())?;
    Ok(true)
}

fn run(cli: Cli, reporter: &Reporter) -> Result<bool> {
    match cli.command {
        Command::Compile {
            grammar,
            output,
            variant,
            snapshots,
            dot,
            skip_sc,
        } => run_compile(&grammar, output.as_deref(), variant, snapshots, dot, skip_sc, reporter),
        Command::Lookup {
            relation,
            direction,
            input,
            bound,
        } => run_lookup(&relation, direction, &input, bound, reporter),
        Command::Check {
            grammar,
            variant,
            bound,
            skip_sc,
        } => run_check(&grammar, variant, bound, skip_sc, reporter),
        Command::Dump { relation, dot } => run_dump(&relation, dot, reporter),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let reporter = Reporter::new();
    match run(cli, &reporter) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            reporter.error(&format!("{e:#}"));
            ExitCode::FAILURE
        }
    }
}
