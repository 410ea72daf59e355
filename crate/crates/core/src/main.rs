use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fatou::harness::{self, emit, ConfigFile, OutputFormat, ScenarioReport, SCENARIOS};
use fatou::kernels::{comparison_sup, decay_check, default_comparison_grids, default_decay_grids};
use fatou::mellin::tauberian_check;
use fatou::{registry, Error};

const RUN_DEFAULTS: &str = "Scenario defaults: 48 grid points; ratio 0.75 from 0.1 toward zero; \
ratio 1.5 toward infinity ending at 1e6; trace tolerance 1e-4; verdict tolerance 5e-3; \
measures whose convolutions diverge at infinity are restricted to the unit ball. \
A --config file is a JSON object overriding these keys, or {\"scenarios\": {id: {...}}}. \
Exit codes: 0 expected verdicts, 2 unexpected verdict, 3 I/O error, 4 config error.";

#[derive(Parser)]
#[command(name = "fatou", version, about = "Converse Fatou experiments on Euclidean and real hyperbolic spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
            Format::Both => OutputFormat::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Tauberian,
    Comparison,
    Decay,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario, or `all` of them.
    #[command(after_help = RUN_DEFAULTS)]
    Run {
        scenario: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, env = "FATOU_OUT_DIR", default_value = "fatou-out")]
        out: PathBuf,
        /// Overrides the format in the config.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// List scenarios with their statements and expected verdicts.
    List,
    /// Tabulate the radial Mellin transform of a kernel as CSV.
    Mellin {
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
        ymin: f64,
        #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
        ymax: f64,
        #[arg(long, default_value_t = 161)]
        points: usize,
    },
    /// Tauberian, comparison or decay check of a kernel, as JSON.
    Check {
        #[arg(value_enum)]
        what: Check,
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        n: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::Config(_) | Error::Lookup(_) | Error::Json(_) => 4,
        _ => 1,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn summarize(r: &ScenarioReport) {
    println!(
        "{:<28} {:<36} expected {:<36} {:>8.2}s",
        r.scenario,
        r.verdict.as_str(),
        r.expected().as_str(),
        r.wall_time.as_secs_f64()
    );
    for t in &r.traces {
        match (&t.classification, &t.failed) {
            (Some(c), _) => println!("    {:<40} {}", t.name, serde_json::to_string(c).unwrap_or_default()),
            (None, Some(msg)) => println!("    {:<40} failed: {msg}", t.name),
            _ => {}
        }
    }
    for n in &r.notes {
        println!("    note: {n}");
    }
}

fn run(scenario: &str, config: Option<PathBuf>, out: PathBuf, format: Option<Format>) -> ExitCode {
    let file = match config.as_deref().map(ConfigFile::load).transpose() {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let results = if scenario == "all" {
        harness::run_all(file.as_ref())
    } else {
        let r = harness::resolve_config(scenario, file.as_ref()).and_then(|c| harness::run_scenario(&c));
        vec![(scenario.to_string(), r)]
    };
    let mut code = 0u8;
    for (id, r) in results {
        let report = match r {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {id}: {e}");
                code = code.max(exit_code(&e));
                continue;
            }
        };
        summarize(&report);
        let fmt = format.map(OutputFormat::from).unwrap_or(report.config.format);
        if let Err(e) = emit::emit(&report, &out, fmt) {
            eprintln!("error: {id}: {e}");
            code = code.max(3);
        }
        if !report.as_expected() {
            code = code.max(2);
        }
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            config,
            out,
            format,
        } => run(&scenario, config, out, format),
        Command::List => {
            for s in SCENARIOS {
                println!("{:<28} expected {:<36} {}", s.id, s.expected.as_str(), s.statement);
            }
            ExitCode::SUCCESS
        }
        Command::Mellin {
            kernel,
            n,
            ymin,
            ymax,
            points,
        } => {
            let spectrum = registry::kernel(&kernel, n).and_then(|k| tauberian_check(&k, ymin, ymax, points));
            match spectrum {
                Ok(s) => {
                    print!("{}", s.to_csv());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Check { what, kernel, n } => {
            let k = match registry::kernel(&kernel, n) {
                Ok(k) => k,
                Err(e) => return fail(e),
            };
            let json = match what {
                Check::Tauberian => tauberian_check(&k, -20.0, 20.0, 401).and_then(|s| Ok(serde_json::to_string_pretty(&s)?)),
                Check::Comparison => {
                    let (tg, rg) = default_comparison_grids();
                    comparison_sup(&k, &tg, &rg).and_then(|s| Ok(serde_json::to_string_pretty(&s)?))
                }
                Check::Decay => {
                    let (a, b) = default_decay_grids();
                    serde_json::to_string_pretty(&decay_check(&k, &a, &b)).map_err(Error::from)
                }
            };
            match json {
                Ok(s) => {
                    println!("{s}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
