//! Run configuration, report assembly and table emission.
//!
//! A [`Report`] is a list of named tables of [`Cell`]s plus a header echoing
//! the tool version and the full [`RunConfig`]. CSV, JSON and text renderings
//! are produced from the same cells, so they always agree.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::avgcase::{
    estimate_probabilities, probability_bins, procedure1_build, select_hard_faults, AvgError, Definition,
    DetectionProbabilities, TrialEnsemble, DEFAULT_EDGES_TENTHS,
};
use crate::detmap::{build_universe, DetectionUniverse, FixtureError};
use crate::faultmodels::{enumerate_bridging, enumerate_stuck_at};
use crate::logicsim::Simulator;
use crate::netlist::{parse_bench, Circuit, NetlistError};
use crate::worstcase::{
    analyze, coverage_table, format_hundredths, histogram, tail_table, CoverageTable, Requirement, ThresholdError,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "ndetect";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DEFAULT_N_MAX: usize = 10;
pub const DEFAULT_TRIALS: usize = 1000;
pub const MAX_TRIALS: usize = 10_000;
pub const DEFAULT_THRESHOLDS_LE: [usize; 6] = [1, 2, 3, 4, 5, 10];
pub const DEFAULT_THRESHOLDS_GE: [usize; 3] = [100, 20, 11];
pub const DEFAULT_BIN_WIDTH: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Faults,
    Worst,
    Avg,
    CompareDefs,
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    /// Netlist path; `-` reads standard input.
    pub netlist: Option<PathBuf>,
    pub fixture: Option<PathBuf>,
    /// Pre-built test sets to analyze instead of drawing random ones.
    pub snapshots: Option<PathBuf>,
    /// Write the generated test sets here.
    pub dump_snapshots: Option<PathBuf>,
    /// Name shown in the circuit column; defaults to the input file stem.
    pub circuit_name: Option<String>,
    pub collapse: bool,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub definition: u8,
    pub thresholds_le: Vec<usize>,
    pub thresholds_ge: Vec<usize>,
    pub bin_width: usize,
    /// Probability bins only count faults with `n_min(g)` at least this;
    /// defaults to `n_max + 1`.
    pub select_min: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        RunConfig {
            mode,
            netlist: None,
            fixture: None,
            snapshots: None,
            dump_snapshots: None,
            circuit_name: None,
            collapse: true,
            n_max: DEFAULT_N_MAX,
            trials: DEFAULT_TRIALS,
            seed: 0,
            definition: 1,
            thresholds_le: DEFAULT_THRESHOLDS_LE.to_vec(),
            thresholds_ge: DEFAULT_THRESHOLDS_GE.to_vec(),
            bin_width: DEFAULT_BIN_WIDTH,
            select_min: None,
            format: Format::Csv,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let usage = |m: String| Err(RunError::Usage(m));
        match (&self.netlist, &self.fixture) {
            (Some(_), Some(_)) => return usage("give either a netlist or a fixture, not both".into()),
            (None, None) => return usage("no input: pass a netlist or a fixture".into()),
            _ => {}
        }
        if self.n_max == 0 {
            return usage("n_max must be at least 1".into());
        }
        if self.trials == 0 || self.trials > MAX_TRIALS {
            return usage(format!("trial count must be in 1..={MAX_TRIALS}"));
        }
        if Definition::from_number(self.definition).is_none() {
            return usage(format!("definition must be 1 or 2, got {}", self.definition));
        }
        if self.bin_width == 0 {
            return usage("bin width must be at least 1".into());
        }
        if self.select_min == Some(0) {
            return usage("select-min must be at least 1".into());
        }
        coverage_table(&[], &self.thresholds_le).map_err(|e| RunError::Usage(format!("--thresholds-le: {e}")))?;
        tail_table(&[], &self.thresholds_ge).map_err(|e| RunError::Usage(format!("--thresholds-ge: {e}")))?;
        if self.snapshots.is_some() && self.dump_snapshots.is_some() {
            return usage("--snapshots and --dump-snapshots are exclusive".into());
        }
        if self.mode == Mode::CompareDefs && self.snapshots.is_some() {
            return usage("compare-defs draws its own test sets; --snapshots is not allowed".into());
        }
        Ok(())
    }

    fn definition(&self) -> Definition {
        Definition::from_number(self.definition).expect("validated")
    }

    fn select_min(&self) -> usize {
        self.select_min.unwrap_or(self.n_max + 1)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: io::Error },
    #[error("internal error: {0}")]
    Internal(String),
}

impl RunError {
    /// Process exit status: 2 usage, 3 input data, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) | RunError::Output { .. } => 2,
            RunError::Data(_) => 3,
            RunError::Internal(_) => 4,
        }
    }
}

impl From<NetlistError> for RunError {
    fn from(e: NetlistError) -> Self {
        RunError::Data(format!("netlist: {e}"))
    }
}

impl From<FixtureError> for RunError {
    fn from(e: FixtureError) -> Self {
        RunError::Data(e.to_string())
    }
}

impl From<ThresholdError> for RunError {
    fn from(e: ThresholdError) -> Self {
        RunError::Usage(e.to_string())
    }
}

impl From<AvgError> for RunError {
    fn from(e: AvgError) -> Self {
        match e {
            AvgError::NoTrials | AvgError::NoIterations | AvgError::NeedsCircuit => RunError::Usage(e.to_string()),
            AvgError::NoTargets | AvgError::Snapshot { .. } => RunError::Data(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Text(String),
    Blank(Option<()>),
}

impl Cell {
    pub fn blank() -> Self {
        Cell::Blank(None)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn int(n: usize) -> Self {
        Cell::Int(n as u64)
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Blank(_) => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(name: &str, columns: Vec<String>) -> Self {
        Table {
            name: name.to_string(),
            columns,
            rows: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub circuit: String,
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
}

enum Source {
    Circuit(Circuit),
    Fixture(DetectionUniverse),
}

fn read_input(path: &PathBuf) -> Result<String, RunError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| RunError::Data(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| RunError::Data(format!("{}: {e}", path.display())))
    }
}

fn load_source(config: &RunConfig) -> Result<Source, RunError> {
    if let Some(path) = &config.netlist {
        Ok(Source::Circuit(parse_bench(&read_input(path)?)?))
    } else {
        let path = config.fixture.as_ref().expect("validated");
        Ok(Source::Fixture(DetectionUniverse::parse_fixture(&read_input(path)?)?))
    }
}

fn circuit_name(config: &RunConfig) -> String {
    if let Some(name) = &config.circuit_name {
        return name.clone();
    }
    config
        .netlist
        .as_ref()
        .or(config.fixture.as_ref())
        .filter(|p| p.as_os_str() != "-")
        .and_then(|p| p.file_stem())
        .map_or_else(|| "stdin".to_string(), |s| s.to_string_lossy().into_owned())
}

fn universe_of(source: &Source, collapse: bool) -> DetectionUniverse {
    match source {
        Source::Circuit(c) => build_universe(c, collapse),
        Source::Fixture(u) => u.clone(),
    }
}

/// Build the report for `config` and write any side outputs it asks for.
pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    config.validate()?;
    let source = load_source(config)?;
    let circuit = circuit_name(config);
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        config: config.clone(),
        circuit: circuit.clone(),
        notes: Vec::new(),
        tables: Vec::new(),
    };
    match config.mode {
        Mode::Faults => faults_tables(&source, config, &mut report),
        Mode::Simulate => simulate_tables(&source, config, &mut report),
        Mode::Worst => {
            let universe = universe_of(&source, config.collapse);
            worst_tables(&universe, config, &mut report)?;
        }
        Mode::Avg => {
            let universe = universe_of(&source, config.collapse);
            let requirements = analyze(&universe).requirements;
            let ensemble = match &config.snapshots {
                Some(path) => {
                    let e = TrialEnsemble::parse_snapshots(&read_input(path)?, universe.input_count())?;
                    report.notes.push(format!(
                        "test sets loaded from {}: {} trials",
                        path.display(),
                        e.trial_count()
                    ));
                    e
                }
                None => procedure1_build(&universe, config.n_max, config.trials, config.seed, config.definition())?,
            };
            if let Some(path) = &config.dump_snapshots {
                fs::write(path, ensemble.to_snapshots()).map_err(|source| RunError::Output {
                    path: path.display().to_string(),
                    source,
                })?;
            }
            let probs = estimate_probabilities(&ensemble, &universe);
            note_ensemble(&mut report, &ensemble);
            let rows = vec![(ensemble.definition, probs)];
            avg_tables(&universe, &requirements, &rows, config, &mut report);
        }
        Mode::CompareDefs => {
            let universe = universe_of(&source, config.collapse);
            let requirements = analyze(&universe).requirements;
            let mut rows = Vec::new();
            for def in [Definition::Standard, Definition::Distinct] {
                let e = procedure1_build(&universe, config.n_max, config.trials, config.seed, def)?;
                note_ensemble(&mut report, &e);
                rows.push((Some(def), estimate_probabilities(&e, &universe)));
            }
            avg_tables(&universe, &requirements, &rows, config, &mut report);
        }
    }
    Ok(report)
}

fn note_ensemble(report: &mut Report, e: &TrialEnsemble) {
    if e.definition == Some(Definition::Distinct) {
        report.notes.push(format!(
            "definition 2 counts are greedy in insertion order (a lower bound on the exact count); \
             fallback to definition 1 selection occurred {} times",
            e.fallbacks()
        ));
    }
}

fn faults_tables(source: &Source, config: &RunConfig, report: &mut Report) {
    let mut table = Table::new(
        "faults",
        ["model", "fault", "lines"].iter().map(|s| s.to_string()).collect(),
    );
    match source {
        Source::Circuit(c) => {
            for f in enumerate_stuck_at(c, config.collapse) {
                table.rows.push(vec![
                    Cell::text("stuck-at"),
                    Cell::text(f.to_string()),
                    Cell::text(c.name(f.line)),
                ]);
            }
            for f in enumerate_bridging(c) {
                table.rows.push(vec![
                    Cell::text("bridging"),
                    Cell::text(f.to_string()),
                    Cell::text(format!("{} {}", c.name(f.victim), c.name(f.aggressor))),
                ]);
            }
        }
        Source::Fixture(u) => {
            for e in u.targets.iter().chain(&u.dropped_targets) {
                table
                    .rows
                    .push(vec![Cell::text("target"), Cell::text(&e.label), Cell::blank()]);
            }
            for e in u.untargeted.iter().chain(&u.dropped_untargeted) {
                table
                    .rows
                    .push(vec![Cell::text("untargeted"), Cell::text(&e.label), Cell::blank()]);
            }
        }
    }
    report.tables.push(table);
}

fn vector_list<I: Iterator<Item = u32>>(vs: I) -> String {
    vs.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn simulate_tables(source: &Source, config: &RunConfig, report: &mut Report) {
    if let Source::Circuit(c) = source {
        let sim = Simulator::new(c);
        let mut lines = Table::new(
            "lines",
            ["line", "name", "driver", "level", "ones", "values"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        );
        for l in c.lines() {
            let table = sim.good(l);
            let values: String = (0..table.len()).map(|v| if table.get(v) { '1' } else { '0' }).collect();
            let driver = c.driving_gate(l).map_or("INPUT", |g| g.kind.name());
            lines.rows.push(vec![
                Cell::int(l.number()),
                Cell::text(c.name(l)),
                Cell::text(driver),
                Cell::int(c.level(l)),
                Cell::int(table.count_ones()),
                Cell::text(values),
            ]);
        }
        report.tables.push(lines);
    }
    let universe = universe_of(source, config.collapse);
    let mut sets = Table::new(
        "detection_sets",
        ["model", "fault", "size", "vectors"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    let targets = universe.targets.iter().chain(&universe.dropped_targets);
    for e in targets {
        sets.rows.push(vec![
            Cell::text("target"),
            Cell::text(&e.label),
            Cell::int(e.tests.size()),
            Cell::text(vector_list(e.tests.vectors())),
        ]);
    }
    for e in universe.untargeted.iter().chain(&universe.dropped_untargeted) {
        sets.rows.push(vec![
            Cell::text("untargeted"),
            Cell::text(&e.label),
            Cell::int(e.tests.size()),
            Cell::text(vector_list(e.tests.vectors())),
        ]);
    }
    report.tables.push(sets);
}

/// Percent cells, blank after the first column that reaches 100%.
fn coverage_cells(t: &CoverageTable) -> Vec<Cell> {
    let full = t.percent_hundredths.iter().position(|&h| h == 10_000);
    t.percent_hundredths
        .iter()
        .enumerate()
        .map(|(i, &h)| match full {
            Some(f) if i > f => Cell::blank(),
            _ => Cell::text(format_hundredths(h)),
        })
        .collect()
}

fn worst_tables(universe: &DetectionUniverse, config: &RunConfig, report: &mut Report) -> Result<(), RunError> {
    let requirements = analyze(universe).requirements;
    let faults = requirements.len();

    let cov = coverage_table(&requirements, &config.thresholds_le)?;
    let mut columns = vec!["circuit".to_string(), "faults".to_string()];
    columns.extend(cov.thresholds.iter().map(|t| format!("le_{t}")));
    let mut table = Table::new("coverage", columns);
    let mut row = vec![Cell::text(&report.circuit), Cell::int(faults)];
    row.extend(coverage_cells(&cov));
    table.rows.push(row);
    report.tables.push(table);

    let tail = tail_table(&requirements, &config.thresholds_ge)?;
    let mut columns = vec!["circuit".to_string(), "faults".to_string()];
    for t in &tail.thresholds {
        columns.push(format!("ge_{t}"));
        columns.push(format!("ge_{t}_pct"));
    }
    let mut table = Table::new("tail", columns);
    let mut row = vec![Cell::text(&report.circuit), Cell::int(faults)];
    for (c, &h) in tail.counts.iter().zip(&tail.percent_hundredths) {
        row.push(Cell::int(*c));
        row.push(Cell::text(format_hundredths(h)));
    }
    table.rows.push(row);
    report.tables.push(table);

    let hist = histogram(&requirements, config.bin_width);
    let mut table = Table::new(
        "histogram",
        ["bin_lower", "bin_upper", "count"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    for (lower, count) in &hist.bins {
        table.rows.push(vec![
            Cell::int(*lower),
            Cell::int(lower + hist.bin_width - 1),
            Cell::int(*count),
        ]);
    }
    table
        .rows
        .push(vec![Cell::text("unbounded"), Cell::blank(), Cell::int(hist.unbounded)]);
    report.tables.push(table);

    let mut table = Table::new(
        "requirements",
        ["fault", "tests", "n_min"].iter().map(|s| s.to_string()).collect(),
    );
    for (e, r) in universe.untargeted.iter().zip(&requirements) {
        table.rows.push(vec![
            Cell::text(&e.label),
            Cell::int(e.tests.size()),
            match r {
                Requirement::Bounded(n) => Cell::int(*n),
                Requirement::Unbounded => Cell::text("unbounded"),
            },
        ]);
    }
    report.tables.push(table);
    report.notes.push(format!(
        "{} detectable untargeted faults ({} undetectable dropped); {} detectable target faults ({} dropped)",
        universe.untargeted.len(),
        universe.dropped_untargeted.len(),
        universe.targets.len(),
        universe.dropped_targets.len()
    ));
    Ok(())
}

fn edge_label(tenths: usize) -> String {
    format!("{}.{}", tenths / 10, tenths % 10)
}

fn avg_tables(
    universe: &DetectionUniverse,
    requirements: &[Requirement],
    rows: &[(Option<Definition>, DetectionProbabilities)],
    config: &RunConfig,
    report: &mut Report,
) {
    let select_min = config.select_min();
    let selected = select_hard_faults(requirements, select_min);
    let mut columns = vec!["circuit".to_string(), "faults".to_string(), "definition".to_string()];
    columns.extend(DEFAULT_EDGES_TENTHS.iter().map(|&e| format!("ge_{}", edge_label(e))));
    let mut bins_table = Table::new("probability_bins", columns);
    for (def, probs) in rows {
        let at_nmax = probs.at(probs.n_max);
        let picked: Vec<_> = selected.iter().map(|&g| at_nmax[g]).collect();
        let bins = probability_bins(&picked, &DEFAULT_EDGES_TENTHS);
        let mut row = vec![
            Cell::text(&report.circuit),
            Cell::int(selected.len()),
            def.map_or_else(Cell::blank, |d| Cell::int(d.number() as usize)),
        ];
        row.extend(
            bins.displayed()
                .into_iter()
                .map(|c| c.map_or_else(Cell::blank, Cell::int)),
        );
        bins_table.rows.push(row);
    }
    report.tables.push(bins_table);
    report.notes.push(format!(
        "probability bins use n = {} and faults with n_min >= {select_min}",
        rows[0].1.n_max
    ));

    let n_max = rows[0].1.n_max;
    let mut columns = vec!["fault".to_string(), "n_min".to_string(), "definition".to_string()];
    columns.extend((1..=n_max).map(|n| format!("p_{n}")));
    let mut table = Table::new("probabilities", columns);
    for (g, e) in universe.untargeted.iter().enumerate() {
        for (def, probs) in rows {
            let mut row = vec![
                Cell::text(&e.label),
                match requirements[g] {
                    Requirement::Bounded(n) => Cell::int(n),
                    Requirement::Unbounded => Cell::text("unbounded"),
                },
                def.map_or_else(Cell::blank, |d| Cell::int(d.number() as usize)),
            ];
            row.extend((1..=n_max).map(|n| Cell::text(probs.probability(n, g).render())));
            table.rows.push(row);
        }
    }
    report.tables.push(table);
}

fn header_lines(report: &Report) -> Vec<String> {
    let config = serde_json::to_string(&report.config).expect("config serializes");
    let mut lines = vec![
        format!("{} {} (schema {})", report.tool, report.version, report.schema_version),
        format!("config: {config}"),
        format!("seed: {}", report.config.seed),
    ];
    lines.extend(report.notes.iter().map(|n| format!("note: {n}")));
    lines
}

pub fn emit_csv(report: &Report) -> Vec<u8> {
    let mut out = Vec::new();
    for line in header_lines(report) {
        out.extend_from_slice(format!("# {line}\n").as_bytes());
    }
    for table in &report.tables {
        out.extend_from_slice(format!("\n# table: {}\n", table.name).as_bytes());
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        w.write_record(&table.columns).expect("in-memory write");
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        out.extend(w.into_inner().expect("in-memory flush"));
    }
    out
}

pub fn emit_json(report: &Report) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
    out.push(b'\n');
    out
}

pub fn emit_text(report: &Report) -> Vec<u8> {
    let mut out = String::new();
    for line in header_lines(report) {
        let _ = writeln!(out, "# {line}");
    }
    for table in &report.tables {
        let _ = writeln!(out, "\n[{}]", table.name);
        let rendered: Vec<Vec<String>> = std::iter::once(table.columns.clone())
            .chain(table.rows.iter().map(|r| r.iter().map(Cell::render).collect()))
            .collect();
        let mut widths = vec![0; table.columns.len()];
        for row in &rendered {
            for (i, cell) in row.iter().enumerate() {
                if i < widths.len() {
                    widths[i] = widths[i].max(cell.len());
                }
            }
        }
        for row in &rendered {
            let cells: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, c)| format!("{c:>w$}", w = widths.get(i).copied().unwrap_or(0)))
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
    }
    out.into_bytes()
}

pub fn emit_table(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => emit_csv(report),
        Format::Json => emit_json(report),
        Format::Text => emit_text(report),
    }
}

/// Run `config` and write the rendered report to its output (stdout when unset).
pub fn run_and_emit(config: &RunConfig) -> Result<Vec<u8>, RunError> {
    let report = run(config)?;
    let bytes = emit_table(&report, config.format);
    if let Some(path) = &config.out {
        fs::write(path, &bytes).map_err(|source| RunError::Output {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report_with(tables: Vec<Table>) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            config: RunConfig::new(Mode::Worst),
            circuit: "circuit".into(),
            notes: vec![],
            tables,
        }
    }

    #[test]
    fn coverage_row_rendering() {
        use Requirement::*;
        let cov = coverage_table(&[Bounded(1), Bounded(1), Bounded(2), Bounded(3)], &[1, 2, 3]).unwrap();
        let mut t = Table::new("coverage", vec!["circuit".into(), "faults".into()]);
        let mut row = vec![Cell::text("circuit"), Cell::int(4)];
        row.extend(coverage_cells(&cov));
        t.rows.push(row);
        let csv = String::from_utf8(emit_csv(&report_with(vec![t]))).unwrap();
        assert!(csv.lines().any(|l| l == "circuit,4,50.00,75.00,100.00"), "{csv}");
    }

    #[test]
    fn blank_after_full_coverage() {
        use Requirement::*;
        let cov = coverage_table(&[Bounded(1), Bounded(2)], &[1, 2, 3, 4]).unwrap();
        assert_eq!(
            coverage_cells(&cov),
            [Cell::text("50.00"), Cell::text("100.00"), Cell::blank(), Cell::blank()]
        );
    }

    #[test]
    fn json_nulls_and_round_trip() {
        let mut t = Table::new("x", vec!["a".into(), "b".into(), "c".into()]);
        t.rows.push(vec![Cell::int(3), Cell::blank(), Cell::text("0.200")]);
        let report = report_with(vec![t]);
        let bytes = emit_json(&report);
        let generic: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert!(generic["tables"][0]["rows"][0][1].is_null());
        assert_eq!(generic["schema_version"], 1);
        let back: Report = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(Mode::Avg);
        assert!(matches!(c.validate(), Err(RunError::Usage(_))));
        c.netlist = Some("x.bench".into());
        assert!(c.validate().is_ok());
        c.trials = 0;
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
        c.trials = 10;
        c.thresholds_le = vec![3, 1];
        assert!(c.validate().is_err());
        c.thresholds_le = vec![1];
        c.definition = 3;
        assert!(c.validate().is_err());
    }
}
