use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use tdlmc_core::compile::{monadize, translate_program, CompileOptions, Compiled};
use tdlmc_core::msr::Bounds;
use tdlmc_core::pattern::{parse_unsafe, UnsafePattern};
use tdlmc_core::sim::Simulator;
use tdlmc_core::symbolic::{
    member, replay_trace, resolve_patterns, sbr, Limits, SymbolicSet, Verdict,
};
use tdlmc_core::tdl::{parse_program, Program};
use tdlmc_core::Rational;

const EXIT_SAFE: u8 = 0;
const EXIT_UNSAFE: u8 = 1;
const EXIT_BOUND: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_DISAGREE: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "tdlmc",
    version,
    about = "Safety checker for thread definition language programs"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide safety by symbolic backward reachability.
    Check {
        program: PathBuf,
        unsafe_spec: PathBuf,
        #[command(flatten)]
        translation: Translation,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        max_iterations: u64,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_set_size: u64,
    },
    /// Print the multiset rewriting specification of a program.
    Compile {
        program: PathBuf,
        #[command(flatten)]
        translation: Translation,
    },
    /// Run the concrete semantics, randomly or from a script.
    Simulate {
        program: PathBuf,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// One step per line: `rule @ instance [, partner]`.
        #[arg(long)]
        script: Option<PathBuf>,
        /// Exit 1 if a visited configuration matches these patterns.
        #[arg(long = "unsafe")]
        unsafe_spec: Option<PathBuf>,
    },
    /// Bounded forward exploration of the compiled specification.
    Oracle {
        program: PathBuf,
        unsafe_spec: PathBuf,
        #[command(flatten)]
        translation: Translation,
        #[arg(long, default_value_t = 6)]
        max_atoms: usize,
        #[arg(long, default_value_t = 10)]
        value_cap: i64,
        #[arg(long, default_value_t = 2_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_configs: u64,
        /// Verdict to compare against; defaults to SAFE.
        #[arg(long, value_enum, default_value_t = Expect::Safe)]
        expect: Expect,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct Translation {
    /// Replace the constant 0 by an auxiliary atom; requires a monadic program.
    #[arg(long)]
    monadic: bool,
    /// Also allow rendez-vous between two instances of one definition.
    #[arg(long)]
    self_sync: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Expect {
    Safe,
    Unsafe,
}

/// An input problem: unreadable file, parse or validation error.
#[derive(Debug)]
struct InputError(String);

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, InputError> {
    parse_program(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_patterns(path: &Path) -> Result<Vec<UnsafePattern>, InputError> {
    parse_unsafe(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn compile(program: &Program, t: Translation) -> Result<Compiled, InputError> {
    let c = translate_program(
        program,
        &CompileOptions {
            self_sync: t.self_sync,
        },
    )
    .map_err(|e| InputError(e.to_string()))?;
    for w in &c.warnings {
        eprintln!("warning: {w}");
    }
    if t.monadic {
        monadize(&c).map_err(|e| InputError(e.to_string()))
    } else {
        Ok(c)
    }
}

fn unsafe_set(path: &Path, c: &Compiled) -> Result<SymbolicSet, InputError> {
    let patterns = load_patterns(path)?;
    resolve_patterns(&patterns, &c.spec, c.layout.zero)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn emit(format: Format, text: String, value: serde_json::Value) {
    match format {
        Format::Text => print!("{text}"),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("json values serialize")
        ),
    }
}

fn run(cli: Cli) -> Result<u8, InputError> {
    let format = cli.format;
    match cli.command {
        Command::Check {
            program,
            unsafe_spec,
            translation,
            max_iterations,
            max_set_size,
        } => {
            let c = compile(&load_program(&program)?, translation)?;
            let bad = unsafe_set(&unsafe_spec, &c)?;
            let limits = Limits {
                max_iterations: max_iterations as usize,
                max_set_size: max_set_size as usize,
            };
            let report = sbr(&c.spec, &bad, &limits);
            let preds = &c.spec.predicates;
            let mut text = report.to_text(preds);
            let mut value = report.to_json(preds);
            if report.verdict == Verdict::Unsafe {
                match replay_trace(&report, &c.spec) {
                    Ok((configs, rules)) => {
                        text.push_str("concrete run:\n");
                        text.push_str(&format!("0: initial => {}\n", configs[0].display(preds)));
                        for (i, (r, m)) in rules.iter().zip(&configs[1..]).enumerate() {
                            text.push_str(&format!("{}: {r} => {}\n", i + 1, m.display(preds)));
                        }
                        let run: Vec<_> = configs
                            .iter()
                            .enumerate()
                            .map(|(i, m)| {
                                json!({
                                    "rule": i.checked_sub(1).map(|k| rules[k].clone()),
                                    "configuration": m.display(preds).to_string(),
                                })
                            })
                            .collect();
                        value["replay"] = json!(run);
                    }
                    Err(e) => eprintln!("warning: trace replay failed: {e}"),
                }
            }
            emit(format, text, value);
            Ok(match report.verdict {
                Verdict::Safe => EXIT_SAFE,
                Verdict::Unsafe => EXIT_UNSAFE,
                Verdict::BoundExceeded => EXIT_BOUND,
            })
        }
        Command::Compile {
            program,
            translation,
        } => {
            let c = compile(&load_program(&program)?, translation)?;
            let text = c.spec.to_text();
            let value =
                json!({ "rules": c.spec.rules.len(), "warnings": c.warnings, "spec": text });
            emit(format, text, value);
            Ok(EXIT_SAFE)
        }
        Command::Simulate {
            program,
            steps,
            script,
            unsafe_spec,
        } => {
            let p = load_program(&program)?;
            // Validation errors are reported the same way as for the other commands.
            compile(
                &p,
                Translation {
                    monadic: false,
                    self_sync: false,
                },
            )?;
            let patterns = unsafe_spec.as_deref().map(load_patterns).transpose()?;
            let sim = Simulator::new(&p);
            let g0 = sim.initial_configuration();
            let run = match script {
                Some(path) => sim
                    .run_script(&g0, &read(&path)?)
                    .map_err(|e| InputError(format!("{}: {e}", path.display())))?,
                None => sim.run_random(&g0, steps, cli.seed),
            };
            let hit = patterns
                .as_ref()
                .and_then(|ps| run.configs.iter().position(|g| sim.match_unsafe(g, ps)));
            let mut text = sim.trace_text(&run);
            if let Some(i) = hit {
                text.push_str(&format!("unsafe configuration at step {i}\n"));
            }
            let value = json!({ "trace": sim.trace_json(&run), "stopped": run.stopped, "unsafe_step": hit });
            emit(format, text, value);
            Ok(if hit.is_some() {
                EXIT_UNSAFE
            } else {
                EXIT_SAFE
            })
        }
        Command::Oracle {
            program,
            unsafe_spec,
            translation,
            max_atoms,
            value_cap,
            max_configs,
            expect,
        } => {
            let c = compile(&load_program(&program)?, translation)?;
            let bad = unsafe_set(&unsafe_spec, &c)?;
            let bounds = Bounds {
                max_atoms,
                value_cap: Rational::from_integer(value_cap),
                max_configs: max_configs as usize,
            };
            let reach = c.spec.post_star_bounded(&bounds);
            let found = reach
                .configs
                .iter()
                .position(|m| bad.members().iter().any(|cc| member(cc, m)));
            let preds = &c.spec.predicates;
            let agrees = match expect {
                Expect::Safe => found.is_none(),
                Expect::Unsafe => found.is_some(),
            };
            let expected = match expect {
                Expect::Safe => "SAFE",
                Expect::Unsafe => "UNSAFE",
            };
            let mut text = format!("explored: {}\n", reach.configs.len());
            if reach.truncated {
                text.push_str("truncated: configuration cap reached\n");
            }
            let mut path_json = Vec::new();
            match found {
                None => text.push_str("no bad configuration found\n"),
                Some(i) => {
                    text.push_str("bad configuration found\n");
                    for (k, (rule, m)) in reach.path_to(i).into_iter().enumerate() {
                        let name = rule.map(|r| c.spec.rules[r].name.clone());
                        text.push_str(&format!(
                            "{k}: {} => {}\n",
                            name.as_deref().unwrap_or("initial"),
                            m.display(preds)
                        ));
                        path_json.push(
                            json!({ "rule": name, "configuration": m.display(preds).to_string() }),
                        );
                    }
                }
            }
            let relation = if agrees {
                "consistent with"
            } else {
                "contradicts"
            };
            text.push_str(&format!("{relation} {expected}\n"));
            let value = json!({
                "explored": reach.configs.len(),
                "truncated": reach.truncated,
                "bad_found": found.is_some(),
                "path": path_json,
                "expected": expected,
                "agrees": agrees,
            });
            emit(format, text, value);
            Ok(match (found.is_some(), agrees) {
                (_, false) => EXIT_DISAGREE,
                (true, true) => EXIT_UNSAFE,
                (false, true) => EXIT_SAFE,
            })
        }
    }
}

fn configure_threads() {
    let Ok(v) = std::env::var("TDLMC_THREADS") else {
        return;
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                eprintln!("warning: TDLMC_THREADS ignored: {e}");
            }
        }
        _ => eprintln!("warning: TDLMC_THREADS must be a positive integer, got `{v}`"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    configure_threads();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
