//! Command-line front end. Exit codes: 0 success, 1 validation failure,
//! 2 usage, I/O or scenario error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use crate::error::ModelError;
use crate::exec::Execution;
use crate::grover::{run_marked, MarkedSet, ToyPowInstance, MAX_QUBITS};
use crate::netstats::{
    load_scenario, render_report, write_report, Column, Destination, ReportDocument, ReportError,
    ReportFormat, ReportTable, Scenario, ScenarioError, PUBLISHED_FIXTURE,
};
use crate::physics::TemperatureK;
use crate::pipeline::{
    breakeven_table, check_against_published, energy_table, tables_document, Assessment,
};
use crate::quantum::{
    grover_iterations_optimal, grover_success_probability, iterations_for_success,
};
use crate::race::{run_race, MinerAgent, RaceConfig, RaceReport, Retarget};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Relative tolerance used by `tables --check`.
pub const CHECK_TOLERANCE: f64 = 0.01;

#[derive(Debug, Parser)]
#[command(
    name = "qpow",
    version,
    about = "Energy cost of classical and quantum proof-of-work mining"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Scenario file, or a bundled fixture name (paper-2022, self-consistent)
    #[arg(long, global = true, default_value = PUBLISHED_FIXTURE)]
    pub scenario: PathBuf,
    /// Heat-sink temperature in kelvin
    #[arg(long, global = true)]
    pub temperature: Option<f64>,
    /// Efficiency ratios, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub ratio: Option<Vec<f64>>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// text, csv or structured
    #[arg(long, global = true, default_value = "text")]
    pub format: ReportFormat,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Compare computed tables with the published values
    #[arg(long, global = true)]
    pub check: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy and break-even tables with the methodology chain
    Tables,
    /// Landauer minimum and projected energy per infrastructure
    Energy,
    /// Efficiency ratio at which each quantum miner matches the classical one
    Breakeven,
    /// Statevector run of Grover mining on a toy hash
    Grover(GroverArgs),
    /// Seeded block race between the scenario's miners
    Race(RaceArgs),
    /// Load and validate a scenario
    Validate,
}

#[derive(Debug, Args)]
pub struct GroverArgs {
    #[arg(long, default_value_t = 3)]
    pub qubits: u32,
    /// Digest width of the toy hash; defaults to the qubit count
    #[arg(long)]
    pub digest_bits: Option<u32>,
    /// Mark nonces whose digest is at or below this target
    #[arg(long, conflicts_with = "marked")]
    pub target: Option<u64>,
    /// Mark this many nonces (those with the smallest digests)
    #[arg(long)]
    pub marked: Option<u64>,
    #[arg(long, conflicts_with = "p_target")]
    pub iterations: Option<u64>,
    /// Choose the fewest iterations reaching this success probability
    #[arg(long)]
    pub p_target: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RaceArgs {
    #[arg(long, default_value_t = 100_000)]
    pub blocks: u64,
    /// Give every agent this per-block success probability
    #[arg(long)]
    pub success_prob: Option<f64>,
    /// Retarget difficulty every this many blocks
    #[arg(long)]
    pub retarget: Option<u64>,
    /// Network hash rate relative to the starting difficulty's calibration
    #[arg(long, default_value_t = 1.0)]
    pub hashrate_multiplier: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Validation(String),
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Parses `args` and runs the command, writing reports to `stdout` (unless
/// `--out` is given) and diagnostics to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
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
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Validation(msg)) => {
            let _ = writeln!(stderr, "invalid: {msg}");
            EXIT_VALIDATION
        }
    }
}

fn scenario_with_overrides(g: &GlobalArgs) -> Result<Scenario, Failure> {
    let mut s = load_scenario(&g.scenario)?;
    if let Some(t) = g.temperature {
        s.temperature = TemperatureK::new(t)?;
    }
    if let Some(ratios) = &g.ratio {
        if ratios.is_empty() || ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Failure::Usage("--ratio needs positive numbers".into()));
        }
        s.ratios = ratios.clone();
    }
    Ok(s)
}

fn emit(doc: &ReportDocument, g: &GlobalArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &g.out {
        Some(path) => write_report(doc, g.format, &Destination::File(path.clone()))?,
        None => stdout
            .write_all(render_report(doc, g.format).as_bytes())
            .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}")))?,
    }
    Ok(())
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Validate => return validate(g, stdout, stderr),
        Command::Tables => {
            let scenario = scenario_with_overrides(g)?;
            for w in scenario.warnings() {
                let _ = writeln!(stderr, "warning: {w}");
            }
            let (mut doc, assessment) = tables_document(&scenario)?;
            if g.check {
                let check = check_against_published(&assessment, CHECK_TOLERANCE);
                doc.tables.push(check.to_table());
                doc.notes.push(format!(
                    "max relative deviation from published values: {:.4}",
                    check.max_relative_deviation()
                ));
                for w in check.warnings() {
                    let _ = writeln!(stderr, "warning: {w}");
                }
            }
            emit(&doc, g, stdout)?;
        }
        Command::Energy => {
            let scenario = scenario_with_overrides(g)?;
            let a = Assessment::from_scenario(&scenario)?;
            let mut doc = ReportDocument::new("Energy per block", &scenario.name);
            doc.tables.push(energy_table(&a));
            let mut bits = ReportTable::new(
                "Bits erased per block",
                "Infrastructure",
                vec![Column::new("bits erased", "bits")],
            );
            bits.push_values("Classical", &[a.classical_landauer.bits_erased]);
            for arch in &a.architectures {
                bits.push_values(&arch.arch.label, &[arch.erased_bits]);
            }
            doc.tables.push(bits);
            doc.notes
                .push(format!("heat sink at {} K", a.temperature.kelvin()));
            emit(&doc, g, stdout)?;
        }
        Command::Breakeven => {
            let scenario = scenario_with_overrides(g)?;
            let a = Assessment::from_scenario(&scenario)?;
            let mut doc = ReportDocument::new("Break-even efficiency ratios", &scenario.name);
            doc.tables.push(breakeven_table(&a));
            emit(&doc, g, stdout)?;
        }
        Command::Grover(args) => {
            let doc = grover(args, g)?;
            emit(&doc, g, stdout)?;
        }
        Command::Race(args) => {
            let scenario = scenario_with_overrides(g)?;
            let report = race(args, g, &scenario)?;
            emit(&race_document(&report, &scenario.name), g, stdout)?;
        }
    }
    Ok(EXIT_OK)
}

fn validate(
    g: &GlobalArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    match load_scenario(&g.scenario) {
        Ok(s) => {
            let _ = writeln!(stdout, "valid: {} ({})", s.name, g.scenario.display());
            for w in s.warnings() {
                let _ = writeln!(stderr, "warning: {w}");
            }
            Ok(EXIT_OK)
        }
        Err(e) if e.is_validation() => Err(Failure::Validation(e.to_string())),
        Err(e) => Err(e.into()),
    }
}

fn grover(args: &GroverArgs, g: &GlobalArgs) -> Result<ReportDocument, Failure> {
    let n = args.qubits;
    if n == 0 || n > MAX_QUBITS {
        return Err(
            ModelError::Resource(format!("--qubits must be in 1..={MAX_QUBITS}, got {n}")).into(),
        );
    }
    let digest_bits = args.digest_bits.unwrap_or(n);
    let (instance, marked) = match (args.target, args.marked) {
        (Some(target), _) => {
            let inst = ToyPowInstance::new(n, digest_bits, target)?;
            let marked = MarkedSet::from_instance(&inst);
            (inst, marked)
        }
        (None, m) => {
            let inst = ToyPowInstance::new(n, digest_bits, 0)?;
            let marked = MarkedSet::lowest_digests(&inst, m.unwrap_or(1))?;
            (inst, marked)
        }
    };
    let space = BigUint::from(instance.search_space());
    let m = marked.len();
    if m == 0 {
        return Err(Failure::Usage("no nonce satisfies the target".into()));
    }
    let mf = m as f64;
    let iterations = match (args.iterations, args.p_target) {
        (Some(t), _) => t,
        (None, Some(p)) => iterations_for_success(&space, mf, p)?,
        (None, None) => grover_iterations_optimal(&space, mf)?,
    };
    let analytic = grover_success_probability(&space, mf, iterations)?;
    let outcome = run_marked(n, &marked, iterations, g.seed, Execution::default())?;

    let mut doc = ReportDocument::new("Grover mining on a toy hash", format!("toy-{n}q"));
    let mut t = ReportTable::new("Grover run", "Quantity", vec![Column::new("value", "")]);
    t.push_quantity("Qubits", Some(n as f64), "qubits");
    t.push_quantity("Marked nonces", Some(mf), "nonces");
    t.push_quantity("Iterations", Some(iterations as f64), "iterations");
    t.push_quantity(
        "Analytic success probability",
        Some(analytic),
        "probability",
    );
    t.push_quantity(
        "Simulated success probability",
        Some(outcome.success_probability),
        "probability",
    );
    t.push_quantity(
        "Gap",
        Some((analytic - outcome.success_probability).abs()),
        "probability",
    );
    t.push_quantity("Sampled nonce", Some(outcome.sampled_nonce as f64), "nonce");
    t.push_quantity(
        "Sample is a solution",
        Some(if outcome.sample_satisfies_target {
            1.0
        } else {
            0.0
        }),
        "bool",
    );
    doc.tables.push(t);
    Ok(doc)
}

fn race(args: &RaceArgs, g: &GlobalArgs, scenario: &Scenario) -> Result<RaceReport, Failure> {
    let a = Assessment::from_scenario(scenario)?;
    let last = a.ratios.len() - 1;
    let p_default = a.computed_share;
    let p = args.success_prob.unwrap_or(p_default);

    let mut agents = vec![MinerAgent::classical(
        "Classical",
        p,
        a.classical_actual_network_j,
    )];
    for arch in &a.architectures {
        agents.push(MinerAgent::quantum(
            &arch.arch.label,
            p,
            arch.projected_j[last],
        ));
    }
    let mut config = RaceConfig::new(agents, args.blocks, g.seed, scenario.network.difficulty);
    config.target_block_time_s = scenario.network.block_time_s;
    if let Some(interval) = args.retarget {
        config.retarget = Some(Retarget {
            interval_blocks: interval,
            hashrate_multiplier: args.hashrate_multiplier,
        });
    }
    Ok(run_race(&config)?)
}

pub fn race_document(report: &RaceReport, scenario: &str) -> ReportDocument {
    let mut doc = ReportDocument::new("Mining race", scenario);
    let mut agents = ReportTable::new(
        "Agents",
        "Agent",
        vec![
            Column::new("success probability", "probability"),
            Column::new("blocks won", "blocks"),
            Column::new("total energy", "J"),
            Column::new("energy per won block", "J"),
        ],
    );
    for r in &report.agents {
        agents.push(
            &r.label,
            vec![
                Some(r.per_block_success_prob),
                Some(r.blocks_won as f64),
                Some(r.total_energy_j),
                r.energy_per_won_block_j,
            ],
        );
    }
    doc.tables.push(agents);

    let mut summary = ReportTable::new("Summary", "Quantity", vec![Column::new("value", "")]);
    summary.push_quantity("Seed", Some(report.seed as f64), "seed");
    summary.push_quantity("Total blocks", Some(report.total_blocks as f64), "blocks");
    summary.push_quantity(
        "Unclaimed blocks",
        Some(report.unclaimed_blocks() as f64),
        "blocks",
    );
    summary.push_quantity(
        "Final difficulty",
        Some(report.final_difficulty),
        "difficulty",
    );
    summary.push_quantity("Retargets", Some(report.retargets as f64), "retargets");
    if let Some(classical) = report.agents.first().and_then(|c| c.energy_per_won_block_j) {
        for q in &report.agents[1..] {
            summary.push_quantity(
                format!("Energy per won block, Classical / {}", q.label),
                q.energy_per_won_block_j.map(|e| classical / e),
                "factor",
            );
        }
    }
    doc.tables.push(summary);
    doc
}
