use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use bescheck::chain::{bench_row, gen_chain, BenchRow};
use bescheck::report::{self, EXIT_ERROR, EXIT_INCONSISTENT, EXIT_OK};
use bescheck::StdClock;
use bescheck_core::engine::{full_check_timed, CheckOptions, EngineKind, Mode};
use bescheck_core::sim::{fair_stability_check, Granularity, DEFAULT_BOUND};
use bescheck_core::{build_ts, ctl, parse_bes, Bes};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bescheck", version, about = "Consistency and stability checking for Boolean evolution systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Relaxed,
    Strict,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SemanticsArg {
    Sync,
    Interleave,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Direct,
    Ctl,
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GranularityArg {
    Rule,
    Assignment,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check consistency and stability of one or more model files.
    Check {
        #[arg(required = true)]
        files: Vec<String>,
        #[arg(long, value_enum, default_value = "relaxed")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "sync")]
        semantics: SemanticsArg,
        /// Defaults to `direct` (`oracle` under interleaving semantics).
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        /// Step unit under interleaving semantics.
        #[arg(long, value_enum, default_value = "rule")]
        granularity: GranularityArg,
        /// Print counterexample traces.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
        /// State bound for explicit exploration.
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
        /// Maximum number of unstable loops to extract.
        #[arg(long, default_value_t = 8)]
        max_loops: usize,
        /// Omit timings from human output.
        #[arg(long)]
        no_timings: bool,
    },
    /// Check a CTL formula against all initial states.
    Ctl { file: String, formula: String },
    /// Print the ring benchmark model.
    GenChain {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
    },
    /// Time direct against formula-based checking on the ring benchmark.
    Bench {
        #[arg(long)]
        k_max: usize,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 32)]
        m: usize,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
}

struct CheckConfig {
    options: CheckOptions,
    interleave: Option<Granularity>,
    format: Format,
    timings: bool,
}

/// Output text and exit code for one file.
fn check_file(file: &str, cfg: &CheckConfig) -> (String, i32) {
    let bes = match load(file) {
        Ok(b) => b,
        Err(e) => return (e, EXIT_ERROR),
    };
    if let Some(granularity) = cfg.interleave {
        return match fair_stability_check(&bes, granularity, cfg.options.explicit_bound) {
            Ok(r) => {
                let code = report::fair_exit_code(&r);
                let name = if granularity == Granularity::Rule { "rule" } else { "assignment" };
                let text = match cfg.format {
                    Format::Json => json(&report::json_fair_report(file, name, &r)),
                    Format::Human => report::human_fair_report(file, &bes, &r),
                };
                (text, code)
            }
            Err(e) => (format!("{file}: {e}\n"), EXIT_ERROR),
        };
    }
    match full_check_timed(&bes, &cfg.options, &StdClock::new()) {
        Ok(r) => {
            let code = report::exit_code(&r);
            let text = match cfg.format {
                Format::Json => json(&report::json_report(file, &bes, &r)),
                Format::Human => report::human_report(file, &bes, &r, cfg.timings),
            };
            (text, code)
        }
        Err(e) => (format!("{file}: {e}\n"), EXIT_ERROR),
    }
}

fn load(file: &str) -> Result<Bes, String> {
    let src = fs::read_to_string(file).map_err(|e| format!("{file}: {e}\n"))?;
    parse_bes(&src).map_err(|e| format!("{file}: {e}\n"))
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_ERROR as u8)
}

fn run_check(files: &[String], cfg: &CheckConfig) -> ExitCode {
    let results: Vec<(String, i32)> = std::thread::scope(|scope| {
        let handles: Vec<_> = files.iter().map(|f| scope.spawn(move || check_file(f, cfg))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| ("internal error\n".into(), EXIT_ERROR))).collect()
    });
    let mut stdout = std::io::stdout().lock();
    let json_batch = cfg.format == Format::Json && files.len() > 1;
    if json_batch {
        let items: Vec<&str> = results.iter().map(|(t, _)| t.trim_end()).collect();
        let _ = writeln!(stdout, "[\n{}\n]", items.join(",\n"));
    }
    for (text, code) in &results {
        if *code == EXIT_ERROR {
            eprint!("{text}");
        } else if !json_batch {
            let _ = write!(stdout, "{text}");
        }
    }
    let worst = results.iter().map(|(_, c)| *c).max_by_key(|&c| report::severity(c)).unwrap_or(EXIT_OK);
    ExitCode::from(worst as u8)
}

fn run_ctl(file: &str, formula: &str) -> ExitCode {
    let bes = match load(file) {
        Ok(b) => b,
        Err(e) => return usage_error(e.trim_end()),
    };
    let f = match ctl::parse_ctl(formula) {
        Ok(f) => f,
        Err(e) => return usage_error(&e.to_string()),
    };
    let mut ts = build_ts(&bes);
    match ctl::check(&mut ts, &f) {
        Ok(true) => {
            println!("holds: {f}");
            ExitCode::from(EXIT_OK as u8)
        }
        Ok(false) => {
            println!("fails: {f}");
            ExitCode::from(EXIT_INCONSISTENT as u8)
        }
        Err(e) => usage_error(&e.to_string()),
    }
}

fn run_bench(m: usize, k_min: usize, k_max: usize, format: Format) -> ExitCode {
    if m < 2 {
        return usage_error("--m must be at least 2");
    }
    let clock = StdClock::new();
    let mut rows: Vec<BenchRow> = Vec::new();
    if format == Format::Human {
        println!(
            "{:>3} {:>14} {:>14} {:>12} {:>12} {:>12} {:>12} {:>8}",
            "k", "vars (bits)", "states", "direct cons", "ctl cons", "direct stab", "ctl stab", "ratio"
        );
    }
    for k in k_min..=k_max {
        let row = bench_row(m, k, &clock);
        if format == Format::Human {
            println!(
                "{:>3} {:>14} {:>14} {:>10.1}ms {:>10.1}ms {:>10.1}ms {:>10.1}ms {:>7.0}x",
                row.k,
                format!("{} ({})", row.variables, row.state_bits),
                format!("{:.5e}", row.reachable.approx),
                row.direct_consistency_ms,
                row.ctl_consistency_ms,
                row.direct_stability_ms,
                row.ctl_stability_ms,
                row.ctl_stability_ms / row.direct_stability_ms.max(1e-6)
            );
        }
        rows.push(row);
    }
    if format == Format::Json {
        print!("{}", json(&rows));
    }
    ExitCode::from(EXIT_OK as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    match cli.command {
        Command::Check { files, mode, semantics, engine, granularity, trace, format, bound, max_loops, no_timings } => {
            let interleave = semantics == SemanticsArg::Interleave;
            if interleave && mode == ModeArg::Strict {
                return usage_error("strict mode requires synchronous semantics");
            }
            if interleave && matches!(engine, Some(EngineArg::Direct | EngineArg::Ctl)) {
                return usage_error("interleaving semantics is checked by the oracle engine only");
            }
            let options = CheckOptions {
                mode: if mode == ModeArg::Strict { Mode::Strict } else { Mode::Relaxed },
                engine: match engine {
                    Some(EngineArg::Ctl) => EngineKind::Ctl,
                    Some(EngineArg::Oracle) => EngineKind::Oracle,
                    _ => EngineKind::Direct,
                },
                trace,
                max_loops,
                explicit_bound: bound,
            };
            let cfg = CheckConfig {
                options,
                interleave: interleave.then_some(match granularity {
                    GranularityArg::Rule => Granularity::Rule,
                    GranularityArg::Assignment => Granularity::Assignment,
                }),
                format,
                timings: !no_timings,
            };
            run_check(&files, &cfg)
        }
        Command::Ctl { file, formula } => run_ctl(&file, &formula),
        Command::GenChain { m, k } => match gen_chain(m, k) {
            Ok(src) => {
                print!("{src}");
                ExitCode::from(EXIT_OK as u8)
            }
            Err(e) => usage_error(&e.to_string()),
        },
        Command::Bench { k_max, k_min, m, format } => run_bench(m, k_min, k_max, format),
    }
}
