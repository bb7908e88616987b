use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use ringqec::analysis::fit_error_rate;
use ringqec::circuit::CodeDescriptor;
use ringqec::io::{
    read_summary, write_dataset, write_summary, CodeChoice, Dataset, DatasetHeader, DatasetRecord, FitReport,
    NoisePreset, ReadoutModel, RunConfig, SummaryMeta,
};
use ringqec::runner::{Engine, FiveQubitSimulator, InitialState};
use ringqec::verify::{verify_code, verify_five_qubit, verify_surface17, VerifyReport};
use ringqec::{Error, Result};

/// Density-matrix simulation of small stabilizer-code memories.
#[derive(Parser)]
#[command(name = "ringqec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an ensemble and write the per-cycle fidelity summary as CSV.
    Simulate(RunArgs),
    /// Write sampled syndrome histories as JSON Lines for decoder training.
    EmitDataset(RunArgs),
    /// Fit the logical error rate to one or more summary files.
    Fit(FitArgs),
    /// Run the noiseless syndrome and round-trip checks for a code.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum CodeArg {
    FiveQubit,
    Surface17Verify,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum NoiseArg {
    Default,
    Off,
    Decoherence,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ReadoutArg {
    Ideal,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum EngineArg {
    Instrument,
    Full,
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with run settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    code: Option<CodeArg>,
    /// Initial state: 0, 1, +, -, i+, i-, 0L or 1L.
    #[arg(long)]
    state: Option<String>,
    /// Arbitrary initial state as `re_a,im_a,re_b,im_b`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    amplitudes: Option<Vec<f64>>,
    /// Number of QEC cycles.
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to RINGQEC_THREADS, then one per core.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    noise: Option<NoiseArg>,
    #[arg(long, value_enum)]
    readout: Option<ReadoutArg>,
    /// Relaxation time in microseconds.
    #[arg(long)]
    t1: Option<f64>,
    /// Dephasing time in microseconds.
    #[arg(long)]
    t2: Option<f64>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Apply the final readout rotations without gate noise.
    #[arg(long)]
    ideal_final_gates: bool,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Summary CSV files written by `simulate`.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    /// Fit from the first cycle on.
    #[arg(long, conflicts_with = "exclude_first")]
    include_first: bool,
    /// Leave the first cycle out of the fit.
    #[arg(long)]
    exclude_first: bool,
    /// Ignore the per-point standard errors.
    #[arg(long)]
    unweighted: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// `five_qubit` or `surface17`.
    code: String,
    /// Replace a generator before checking, as `INDEX=PAULI`.
    #[arg(long, value_name = "INDEX=PAULI")]
    generator: Vec<String>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(code) = self.code {
            c.code = match code {
                CodeArg::FiveQubit => CodeChoice::FiveQubit,
                CodeArg::Surface17Verify => CodeChoice::Surface17Verify,
            };
        }
        if let Some(s) = &self.state {
            c.initial_state = s.clone();
            c.amplitudes = None;
        }
        if let Some(a) = &self.amplitudes {
            if a.len() != 4 {
                return Err(Error::Config(format!("--amplitudes takes 4 comma-separated numbers, got {}", a.len())));
            }
            c.amplitudes = Some([[a[0], a[1]], [a[2], a[3]]]);
        }
        if let Some(k) = self.cycles {
            c.k_max = k;
        }
        if let Some(n) = self.runs {
            c.n_runs = n;
        }
        if self.seed.is_some() {
            c.seed = self.seed;
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        if let Some(n) = self.noise {
            c.noise = match n {
                NoiseArg::Default => NoisePreset::Default,
                NoiseArg::Off => NoisePreset::Off,
                NoiseArg::Decoherence => NoisePreset::Decoherence,
            };
        }
        if let Some(r) = self.readout {
            c.readout = Some(match r {
                ReadoutArg::Ideal => ReadoutModel::Ideal,
                ReadoutArg::Table => ReadoutModel::Table,
            });
        }
        if self.t1.is_some() {
            c.overrides.t1_us = self.t1;
        }
        if self.t2.is_some() {
            c.overrides.t2_us = self.t2;
        }
        if let Some(e) = self.engine {
            c.engine = match e {
                EngineArg::Instrument => Engine::Instrument,
                EngineArg::Full => Engine::Full,
            };
        }
        if self.ideal_final_gates {
            c.noisy_final_gates = false;
        }
        c.validate()?;
        Ok(c)
    }
}

/// Output sink, opened before any simulation so unwritable paths fail fast.
fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_report(report: &VerifyReport) -> Result<bool> {
    eprintln!("{report}");
    Ok(report.passed())
}

fn simulator(c: &RunConfig) -> Result<FiveQubitSimulator> {
    let model = c.noise_model()?;
    FiveQubitSimulator::new(model, c.simulator_options())
}

fn simulate(args: &RunArgs) -> Result<bool> {
    let c = args.config()?;
    if c.code == CodeChoice::Surface17Verify {
        return print_report(&verify_surface17(&CodeDescriptor::surface17())?);
    }
    let out = open_output(args.out.as_deref().or(c.output.summary.as_deref()))?;
    let seed = c.seed.unwrap_or(0);
    let init = c.initial()?;
    let sim = simulator(&c)?;
    let summary = sim.run_ensemble(&init, c.n_runs, c.k_max, seed, c.parallelism())?;
    info!("{} runs of {} cycles in {:.2} s", c.n_runs, c.k_max, summary.wall_time_s);

    let meta: SummaryMeta = [
        ("state", init.label()),
        ("runs", c.n_runs.to_string()),
        ("seed", seed.to_string()),
        ("cycle_ns", sim.model().params.t_cycle_ns.to_string()),
        ("noise", format!("{:?}", c.noise).to_lowercase()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    write_summary(out, &meta, &summary.rows)?;
    Ok(true)
}

fn emit_dataset(args: &RunArgs) -> Result<bool> {
    let c = args.config()?;
    if c.code != CodeChoice::FiveQubit {
        return Err(Error::Config("datasets are only emitted for the five-qubit code".into()));
    }
    let seed = c
        .seed
        .ok_or_else(|| Error::Config("dataset emission needs a seed (--seed or `seed` in the config)".into()))?;
    let init = c.initial()?;
    if !matches!(&init, InitialState::Amplitudes(..)) && !["0", "+", "i+"].contains(&init.label().as_str()) {
        return Err(Error::Config(format!(
            "datasets start from 0, +, i+ or explicit amplitudes, not {}",
            init.label()
        )));
    }
    let out = open_output(args.out.as_deref().or(c.output.dataset.as_deref()))?;
    let sim = simulator(&c)?;
    let traj = sim.run_records(&init, c.n_runs, c.k_max, seed, true, c.parallelism())?;
    let records = traj.iter().map(DatasetRecord::try_from).collect::<Result<Vec<_>>>()?;
    let model = sim.model();
    let header = DatasetHeader::new(
        &init.label(),
        c.k_max,
        records.len(),
        seed,
        model.params,
        model.measurement,
        c.noisy_final_gates,
    );
    write_dataset(out, &Dataset { header, records })?;
    Ok(true)
}

fn fit(args: &FitArgs) -> Result<bool> {
    let out = open_output(args.out.as_deref())?;
    let mut reports = Vec::new();
    for path in &args.paths {
        let file = File::open(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let summary = read_summary(BufReader::new(file)).map_err(|e| match e {
            Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
            other => other,
        })?;
        if summary.rows.len() < 4 {
            return Err(Error::Format(format!("{}: {} rows, need at least 4", path.display(), summary.rows.len())));
        }
        let exclude = if args.include_first {
            false
        } else {
            args.exclude_first || summary.default_exclude_first()
        };
        let times: Vec<f64> = summary.rows.iter().map(|r| r.time_us).collect();
        let fids: Vec<f64> = summary.rows.iter().map(|r| r.mean_fidelity).collect();
        let weights: Option<Vec<f64>> = if args.unweighted || summary.rows.iter().any(|r| !(r.stderr > 0.0)) {
            None
        } else {
            Some(summary.rows.iter().map(|r| r.stderr.powi(-2)).collect())
        };
        let result = fit_error_rate(&times, &fids, weights.as_deref(), exclude)?;
        let report = FitReport::new(
            &path.display().to_string(),
            summary.meta.get("state").cloned(),
            &summary.rows,
            &result,
        );
        eprintln!(
            "{}: epsilon = {:.4} +/- {:.4} %/us, t0 = {:.2} us",
            path.display(),
            100.0 * report.epsilon,
            100.0 * report.epsilon_stderr,
            report.t0_us
        );
        reports.push(report);
    }
    if reports.len() > 1 {
        let mean = reports.iter().map(|r| r.epsilon).sum::<f64>() / reports.len() as f64;
        eprintln!("mean epsilon over {} files = {:.4} %/us", reports.len(), 100.0 * mean);
    }
    let mut out = out;
    if let [single] = reports.as_slice() {
        serde_json::to_writer_pretty(&mut out, single)?;
    } else {
        serde_json::to_writer_pretty(&mut out, &reports)?;
    }
    writeln!(out)?;
    out.flush()?;
    Ok(true)
}

fn verify(args: &VerifyArgs) -> Result<bool> {
    if args.generator.is_empty() {
        return print_report(&verify_code(&args.code)?);
    }
    let five = match args.code.as_str() {
        "five_qubit" | "five-qubit" | "5" => true,
        "surface17" | "surface-17" | "surface17_verify" | "17" => false,
        other => return Err(Error::Config(format!("unknown code {other:?}; expected five_qubit or surface17"))),
    };
    let mut code = if five { CodeDescriptor::five_qubit() } else { CodeDescriptor::surface17() };
    for g in &args.generator {
        let (i, p) = g
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--generator {g:?} is not INDEX=PAULI")))?;
        let index = i.trim().parse().map_err(|_| Error::Config(format!("bad generator index {i:?}")))?;
        let pauli = p.trim().parse().map_err(|e: Error| Error::Config(e.to_string()))?;
        code = code.with_generator(index, pauli).map_err(|e| Error::Config(e.to_string()))?;
    }
    let report = if five { verify_five_qubit(&code)? } else { verify_surface17(&code)? };
    print_report(&report)
}

fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() || matches!(e, Error::FitFailed { .. }) {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::EmitDataset(a) => emit_dataset(a),
        Command::Fit(a) => fit(a),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
