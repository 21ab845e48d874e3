//! `lcuprep` command-line interface.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::amplification::{
    build_pipeline, build_transduction, layout_for, Algorithm, PipelineConfig, Rounds,
};
use crate::analysis::{
    angle_truncation_bounds, cost_table, empirical_angle_error, reflection_cost,
    required_angle_bits, CostAlgorithm, CostRow, EmpiricalError, ErrorBound, ReflectionCostRow,
};
use crate::circuit::{Circuit, GateCounts, RegisterLayout};
use crate::error::{Error, Result};
use crate::qasm::{export_qasm2, lowered_counts, with_lowering_ancillas};
use crate::report::{run_report, AmplitudeFile};

#[derive(Debug, Parser)]
#[command(
    name = "lcuprep",
    version,
    about = "Black-box state preparation circuits via LCU transduction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the amplitude transduction circuit.
    Synth(SynthArgs),
    /// Build and simulate the amplified preparation pipeline.
    Run(RunArgs),
    /// Closed-form resource counts.
    Cost(CostArgs),
    /// Angle-truncation error bounds.
    Bound(BoundArgs),
    /// Export the pipeline as a quantum program.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthOut {
    Text,
    Qasm,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Qasm2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CostSelection {
    All,
    Sanders,
    Bausch,
    Standard,
    Modified,
}

impl CostSelection {
    fn algorithms(self) -> Vec<CostAlgorithm> {
        match self {
            CostSelection::All => CostAlgorithm::ALL.to_vec(),
            CostSelection::Sanders => vec![CostAlgorithm::Sanders],
            CostSelection::Bausch => vec![CostAlgorithm::Bausch],
            CostSelection::Standard => vec![CostAlgorithm::StandardLcu],
            CostSelection::Modified => vec![CostAlgorithm::ModifiedLcu],
        }
    }
}

fn parse_rounds(s: &str) -> std::result::Result<Rounds, String> {
    if s == "auto" {
        return Ok(Rounds::Auto);
    }
    s.parse()
        .map(Rounds::Explicit)
        .map_err(|_| format!("expected 'auto' or a round count, got '{s}'"))
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub algo: Algorithm,
    #[arg(long)]
    pub input: PathBuf,
    /// Lower the standard kick-back cascade to Toffoli and CNOT gates.
    #[arg(long)]
    pub decompose: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub out: SynthOut,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub algo: Algorithm,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "auto", value_parser = parse_rounds)]
    pub rounds: Rounds,
    /// Measurement shots to sample; 0 skips sampling.
    #[arg(long, default_value_t = 0)]
    pub shots: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub decompose: bool,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub algo: CostSelection,
    #[arg(long)]
    pub bits: usize,
    /// Also emit the per-iterate reflection costs.
    #[arg(long)]
    pub reflections: bool,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub bits: usize,
    /// Fractional bits kept for each rotation fraction.
    #[arg(long)]
    pub angle_bits: u32,
    /// Also simulate the truncated preparation and report measured errors.
    #[arg(long)]
    pub empirical: bool,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_enum)]
    pub algo: Algorithm,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "qasm2")]
    pub format: ExportFormat,
    #[arg(long, default_value = "auto", value_parser = parse_rounds)]
    pub rounds: Rounds,
    #[arg(long)]
    pub decompose: bool,
}

#[derive(Serialize)]
struct SynthReport<'a> {
    algorithm: Algorithm,
    n: usize,
    d: usize,
    decomposed: bool,
    qubits_total: usize,
    layout: &'a RegisterLayout,
    gate_counts: GateCounts,
    lowered_counts: GateCounts,
    gates: Vec<String>,
}

#[derive(Serialize)]
struct CostReport {
    bits: usize,
    transduction: Vec<CostRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reflections: Option<Vec<ReflectionCostRow>>,
}

#[derive(Serialize)]
struct BoundReport {
    bound: ErrorBound,
    required_angle_bits: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical: Option<EmpiricalError>,
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn synth(args: &SynthArgs) -> Result<String> {
    let spec = AmplitudeFile::load(&args.input)?.to_spec()?;
    let layout = layout_for(&spec, args.algo, args.decompose)?;
    let circuit = build_transduction(&layout, args.algo, args.decompose)?;
    match args.out {
        SynthOut::Text => {
            let counts = circuit.count();
            Ok(format!(
                "# {} transduction, n = {}, {} qubits, {} gates, {} toffoli, {} cnot\n{circuit}",
                args.algo.name(),
                spec.bits(),
                layout.total(),
                counts.total_gates(),
                counts.toffoli,
                counts.cnot,
            ))
        }
        SynthOut::Qasm => export_qasm2(&with_lowering_ancillas(&circuit)?),
        SynthOut::Json => to_json(&SynthReport {
            algorithm: args.algo,
            n: spec.bits(),
            d: spec.len(),
            decomposed: args.decompose,
            qubits_total: layout.total(),
            layout: &layout,
            gate_counts: circuit.count(),
            lowered_counts: lowered_counts(&with_lowering_ancillas(&circuit)?)?,
            gates: circuit.gates().iter().map(ToString::to_string).collect(),
        }),
    }
}

fn run_cmd(args: &RunArgs) -> Result<String> {
    let spec = AmplitudeFile::load(&args.input)?.to_spec()?;
    let config = PipelineConfig::new(spec, args.algo)
        .rounds(args.rounds)
        .decomposed(args.decompose)
        .seed(args.seed);
    to_json(&run_report(&config, args.shots)?)
}

fn cost(args: &CostArgs) -> Result<String> {
    let algorithms = args.algo.algorithms();
    let transduction = algorithms
        .iter()
        .map(|&a| cost_table(a, args.bits))
        .collect::<Result<_>>()?;
    let reflections = if args.reflections {
        Some(
            algorithms
                .iter()
                .map(|&a| reflection_cost(a, args.bits))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    to_json(&CostReport {
        bits: args.bits,
        transduction,
        reflections,
    })
}

fn bound(args: &BoundArgs) -> Result<String> {
    let empirical = if args.empirical {
        Some(empirical_angle_error(args.bits, args.angle_bits)?)
    } else {
        None
    };
    to_json(&BoundReport {
        bound: angle_truncation_bounds(args.bits, args.angle_bits)?,
        required_angle_bits: required_angle_bits(args.bits)?,
        empirical,
    })
}

/// The full pipeline, widened so every gate can be lowered.
pub fn export_circuit(args: &ExportArgs) -> Result<Circuit> {
    let spec = AmplitudeFile::load(&args.input)?.to_spec()?;
    let config = PipelineConfig::new(spec, args.algo)
        .rounds(args.rounds)
        .decomposed(args.decompose);
    with_lowering_ancillas(&build_pipeline(&config)?.circuit)
}

fn export(args: &ExportArgs) -> Result<String> {
    match args.format {
        ExportFormat::Qasm2 => export_qasm2(&export_circuit(args)?),
    }
}

/// Executes a parsed command and returns its standard output.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Run(a) => run_cmd(a),
        Command::Cost(a) => cost(a),
        Command::Bound(a) => bound(a),
        Command::Export(a) => export(a),
    }
}

/// Parses `argv` (program name first) and executes it.
pub fn run<I, T>(argv: I) -> Result<String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Usage(first_line(&e.to_string())))?;
    execute(&cli)
}

/// First non-empty line of a multi-line message, without the `error: ` tag.
pub fn first_line(message: &str) -> String {
    let line = message
        .lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("")
        .trim();
    line.strip_prefix("error: ").unwrap_or(line).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn rounds_parser() {
        assert_eq!(parse_rounds("auto"), Ok(Rounds::Auto));
        assert_eq!(parse_rounds("3"), Ok(Rounds::Explicit(3)));
        assert!(parse_rounds("-1").is_err());
    }

    #[test]
    fn usage_errors_are_one_line() {
        let err = run(["lcuprep", "cost", "--bits", "x"]).unwrap_err();
        assert!(!err.to_string().contains('\n'));
    }
}
