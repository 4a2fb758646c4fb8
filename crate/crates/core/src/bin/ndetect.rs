use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use ndetect::report::{
    run_and_emit, Format, Mode, RunConfig, RunError, DEFAULT_BIN_WIDTH, DEFAULT_N_MAX, DEFAULT_TRIALS,
};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    /// List target (stuck-at) and untargeted (bridging) faults.
    Faults,
    /// Worst-case n_min per bridging fault, coverage and tail tables, histogram.
    Worst,
    /// Detection probabilities of random n-detection test sets.
    Avg,
    /// Average-case analysis under both detection definitions, same seed.
    CompareDefs,
    /// Dump truth tables and detection sets.
    Simulate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Text,
}

/// Worst-case and average-case analysis of n-detection test sets.
#[derive(Debug, Parser)]
#[command(name = "ndetect", version)]
struct Cli {
    #[arg(value_enum, required_unless_present = "config")]
    mode: Option<ModeArg>,

    /// Re-run from the config embedded in an earlier JSON or CSV report.
    #[arg(long, conflicts_with_all = ["mode", "netlist", "fixture"])]
    config: Option<PathBuf>,

    /// ".bench" netlist; `-` reads standard input.
    #[arg(long, env = "NDETECT_NETLIST")]
    netlist: Option<PathBuf>,

    /// Detection-set fixture file (bypasses simulation).
    #[arg(long, env = "NDETECT_FIXTURE", conflicts_with = "netlist")]
    fixture: Option<PathBuf>,

    /// Load test sets instead of drawing them (`avg` only).
    #[arg(long, env = "NDETECT_SNAPSHOTS")]
    snapshots: Option<PathBuf>,

    /// Write the drawn test sets to this file (`avg` only).
    #[arg(long, env = "NDETECT_DUMP_SNAPSHOTS")]
    dump_snapshots: Option<PathBuf>,

    /// Circuit name for report rows.
    #[arg(long, env = "NDETECT_NAME")]
    name: Option<String>,

    /// Collapse equivalent stuck-at faults (default).
    #[arg(long, overrides_with = "no_collapse")]
    collapse: bool,

    #[arg(long, overrides_with = "collapse")]
    no_collapse: bool,

    #[arg(long, env = "NDETECT_NMAX", default_value_t = DEFAULT_N_MAX)]
    nmax: usize,

    /// Number of random test sets per n.
    #[arg(long, env = "NDETECT_TRIALS", default_value_t = DEFAULT_TRIALS)]
    trials: usize,

    #[arg(long, env = "NDETECT_SEED", default_value_t = 0)]
    seed: u64,

    /// Detection counting: 1 counts every test, 2 only sufficiently different ones.
    #[arg(long, env = "NDETECT_DEFINITION", default_value_t = 1)]
    definition: u8,

    /// Ascending thresholds for the `n_min <= t` coverage table.
    #[arg(
        long,
        env = "NDETECT_THRESHOLDS_LE",
        value_delimiter = ',',
        default_value = "1,2,3,4,5,10"
    )]
    thresholds_le: Vec<usize>,

    /// Descending thresholds for the `n_min >= t` tail table.
    #[arg(
        long,
        env = "NDETECT_THRESHOLDS_GE",
        value_delimiter = ',',
        default_value = "100,20,11"
    )]
    thresholds_ge: Vec<usize>,

    #[arg(long, env = "NDETECT_BIN_WIDTH", default_value_t = DEFAULT_BIN_WIDTH)]
    bin_width: usize,

    /// Probability bins count faults with n_min at least this (default nmax + 1).
    #[arg(long, env = "NDETECT_SELECT_MIN")]
    select_min: Option<usize>,

    #[arg(long, value_enum, env = "NDETECT_FORMAT", default_value = "csv")]
    format: FormatArg,

    /// Output file; standard output when omitted.
    #[arg(long, env = "NDETECT_OUT")]
    out: Option<PathBuf>,

    /// Worker threads (results do not depend on this).
    #[arg(long, env = "NDETECT_JOBS")]
    jobs: Option<usize>,
}

fn config_from(cli: &Cli) -> Result<RunConfig, RunError> {
    if let Some(path) = &cli.config {
        let bad = |e: &dyn std::fmt::Display| RunError::Usage(format!("{}: {e}", path.display()));
        let text = std::fs::read_to_string(path).map_err(|e| bad(&e))?;
        // a CSV report carries its config on a `# config:` line
        let json = match text.lines().find_map(|l| l.strip_prefix("# config: ")) {
            Some(line) => line.to_string(),
            None => text,
        };
        let mut value: serde_json::Value = serde_json::from_str(&json).map_err(|e| bad(&e))?;
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
        return serde_json::from_value(value).map_err(|e| bad(&e));
    }
    let mode = match cli.mode.expect("required by clap") {
        ModeArg::Faults => Mode::Faults,
        ModeArg::Worst => Mode::Worst,
        ModeArg::Avg => Mode::Avg,
        ModeArg::CompareDefs => Mode::CompareDefs,
        ModeArg::Simulate => Mode::Simulate,
    };
    let mut config = RunConfig::new(mode);
    config.netlist = cli.netlist.clone();
    config.fixture = cli.fixture.clone();
    config.snapshots = cli.snapshots.clone();
    config.dump_snapshots = cli.dump_snapshots.clone();
    config.circuit_name = cli.name.clone();
    config.collapse = !cli.no_collapse;
    config.n_max = cli.nmax;
    config.trials = cli.trials;
    config.seed = cli.seed;
    config.definition = cli.definition;
    config.thresholds_le = cli.thresholds_le.clone();
    config.thresholds_ge = cli.thresholds_ge.clone();
    config.bin_width = cli.bin_width;
    config.select_min = cli.select_min;
    config.format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    config.out = cli.out.clone();
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("ndetect: internal error: {e}");
            return ExitCode::from(4);
        }
    }
    let result = config_from(&cli).and_then(|config| {
        let bytes = run_and_emit(&config)?;
        if config.out.is_none() {
            std::io::stdout().write_all(&bytes).map_err(|source| RunError::Output {
                path: "stdout".into(),
                source,
            })?;
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ndetect: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
