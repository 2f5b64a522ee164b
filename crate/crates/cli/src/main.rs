//! `fcqem` command-line driver.

mod args;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Command, DumpArgs, GroundArgs, MitigateArgs, ModelArgs, ScaleArgs, SweepArgs};
use fcqem::experiment::{
    dump_distribution, mitigate, run_scale, run_sweep, simulate_distribution, HamiltonianSource,
    ScaleConfig, SweepAxis, SweepConfig,
};
use fcqem::io::{
    build_tfim, load_circuit, load_hamiltonian, load_measurements, parse_range, write_table,
    Metadata, Table, TableOptions, TfimSpec,
};
use fcqem::mitigation::{FcqemConfig, Normalization};
use fcqem::sim::{exact_ground_state, neel_circuit, Circuit, NoiseModel};
use fcqem::{Error, PauliSum, Tpb};

const DEFAULT_SWEEP_SHOTS: u64 = 100_000;
const DEFAULT_FILE_SHOTS: u64 = 10_000;
const DEFAULT_THRESHOLD: f64 = 0.005;

/// Failure with its exit code class.
#[derive(Debug)]
pub enum CliError {
    /// Conflicting or malformed options.
    Config(String),
    Lib(Error),
}

impl CliError {
    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Lib(e) => match e {
                Error::Argument(_) | Error::Precondition(_) => 2,
                Error::Parse { .. }
                | Error::Format(_)
                | Error::Schema { .. }
                | Error::Json(_)
                | Error::Io(_)
                | Error::MissingMeasurement { .. }
                | Error::DegenerateInput(_)
                | Error::Dimension(_) => 3,
                Error::Capacity { .. } => 4,
                Error::Consistency(_) | Error::Csv(_) => 1,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Lib(Error::Io(e))
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fcqem: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(CliError::config)?;
    }
    let config = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            Some(serde_json::from_str::<serde_json::Value>(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?)
        }
        None => None,
    };
    let config = config.as_ref();
    match &cli.command {
        Command::Sweep(a) => cmd_sweep(&args::merge(a, config)?),
        Command::Mitigate(a) => cmd_mitigate(&args::merge(a, config)?),
        Command::Scale(a) => cmd_scale(&args::merge(a, config)?),
        Command::DumpDist(a) => cmd_dump_dist(&args::merge(a, config)?),
        Command::GroundState(a) => cmd_ground_state(&args::merge(a, config)?),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn metadata<T: Serialize>(command: &str, seed: Option<u64>, args: &T) -> Result<Metadata> {
    let mut m = Metadata::new()
        .with("command", command)
        .with("version", env!("CARGO_PKG_VERSION"));
    if let Some(s) = seed {
        m = m.with("seed", s);
    }
    Ok(m.with("config", serde_json::to_string(args).map_err(CliError::config)?))
}

fn emit_table<T: Table, A: Serialize>(
    command: &str,
    seed: Option<u64>,
    args: &A,
    output: Option<&PathBuf>,
    rows: &[T],
    opts: &TableOptions,
) -> Result<()> {
    let meta = metadata(command, seed, args)?;
    let mut out = open_output(output.map(|p| p.as_path()))?;
    write_table(&mut out, &meta, rows, opts)?;
    out.flush()?;
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, output: Option<&PathBuf>) -> Result<()> {
    let mut out = open_output(output.map(|p| p.as_path()))?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Lib(Error::Json(e)))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn hamiltonian_source(m: &ModelArgs) -> Result<HamiltonianSource> {
    match (m.model.as_deref(), &m.hamiltonian) {
        (Some(_), Some(_)) => Err(CliError::Config("give either --model or --hamiltonian, not both".into())),
        (None, None) => Err(CliError::Config("a Hamiltonian is required: --model tfim or --hamiltonian FILE".into())),
        (Some("tfim"), None) => {
            let n = m.n.ok_or_else(|| CliError::Config("--model tfim needs --n".into()))?;
            Ok(HamiltonianSource::Tfim {
                n,
                j: m.j.unwrap_or(1.0),
                h: m.h.unwrap_or(0.0),
                periodic: m.periodic,
            })
        }
        (Some(other), None) => Err(CliError::Config(format!("unknown model `{other}`"))),
        (None, Some(path)) => {
            if m.n.is_some() || m.j.is_some() || m.h.is_some() || m.periodic {
                return Err(CliError::Config("--n, --j, --h and --periodic apply to --model tfim only".into()));
            }
            Ok(HamiltonianSource::Explicit(load_hamiltonian(path)?))
        }
    }
}

fn trial_circuit(trial: Option<&str>, n: usize) -> Result<Option<Circuit>> {
    match trial {
        None | Some("neel") => Ok(None),
        Some(path) => Ok(Some(load_circuit(Path::new(path), Some(n))?)),
    }
}

fn noise_model(s: Option<&str>) -> Result<NoiseModel> {
    Ok(match s {
        Some(s) => s.parse::<NoiseModel>()?,
        None => NoiseModel::noiseless(),
    })
}

fn rotation_qubit(s: &str) -> Result<usize> {
    let v = s.strip_prefix("q=").unwrap_or(s);
    v.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("--rotate-y expects `q=INDEX`, got `{s}`")))
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let source = hamiltonian_source(&a.model)?;
    let n = source.num_qubits();
    let ranges = [&a.h_range, &a.theta_range, &a.depol_range]
        .iter()
        .filter(|r| r.is_some())
        .count();
    if ranges > 1 {
        return Err(CliError::Config("give at most one of --h-range, --theta-range, --depol-range".into()));
    }
    if a.rotate_y.is_some() != a.theta_range.is_some() {
        return Err(CliError::Config("--theta-range and --rotate-y go together".into()));
    }
    let axis = if let Some(r) = &a.h_range {
        SweepAxis::Field(parse_range(r)?)
    } else if let Some(r) = &a.theta_range {
        SweepAxis::Theta {
            qubit: rotation_qubit(a.rotate_y.as_deref().unwrap_or_default())?,
            values: parse_range(r)?,
        }
    } else if let Some(r) = &a.depol_range {
        SweepAxis::Depolarizing(parse_range(r)?)
    } else {
        match &source {
            HamiltonianSource::Tfim { h, .. } => SweepAxis::Field(vec![*h]),
            HamiltonianSource::Explicit(_) => {
                return Err(CliError::Config("a Hamiltonian file needs --theta-range or --depol-range".into()))
            }
        }
    };
    let default_shots = match source {
        HamiltonianSource::Tfim { .. } => DEFAULT_SWEEP_SHOTS,
        HamiltonianSource::Explicit(_) => DEFAULT_FILE_SHOTS,
    };
    let shots = match a.shots.unwrap_or(default_shots) {
        0 => None,
        s => Some(s),
    };
    let normalization: Normalization = match &a.normalization {
        Some(s) => s.parse()?,
        None => Normalization::PerBasis,
    };
    let seed = a.seed.unwrap_or(0);
    let cfg = SweepConfig {
        source,
        trial: trial_circuit(a.trial.as_deref(), n)?,
        axis,
        noise: noise_model(a.noise.as_deref())?,
        shots,
        seed,
        fcqem: FcqemConfig {
            normalization,
            preferred_basis: None,
        },
    };
    cfg.validate()?;
    let rows = run_sweep(&cfg)?;
    emit_table("sweep", Some(seed), a, a.output.as_ref(), &rows, &TableOptions::default())
}

fn cmd_mitigate(a: &MitigateArgs) -> Result<()> {
    let mpath = a.measurements.as_ref().ok_or_else(|| CliError::Config("--measurements is required".into()))?;
    let hpath = a.hamiltonian.as_ref().ok_or_else(|| CliError::Config("--hamiltonian is required".into()))?;
    let h = load_hamiltonian(hpath)?;
    let ms = load_measurements(mpath)?;
    let second = a.second.as_ref().map(|p| load_measurements(p)).transpose()?;
    let report = mitigate(&ms, &h, second.as_ref())?;
    #[derive(Serialize)]
    struct Out<'a, T: Serialize> {
        version: &'a str,
        config: &'a MitigateArgs,
        seed: Option<u64>,
        #[serde(flatten)]
        report: T,
    }
    emit_json(
        &Out {
            version: env!("CARGO_PKG_VERSION"),
            config: a,
            seed: ms.provenance().seed,
            report,
        },
        a.output.as_ref(),
    )
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| CliError::Config(format!("invalid {what} `{t}`"))))
        .collect()
}

fn cmd_scale(a: &ScaleArgs) -> Result<()> {
    let trial = match a.trial.as_deref() {
        None | Some("neel") => None,
        Some(path) => Some(load_circuit(Path::new(path), None)?),
    };
    let sizes = match (&a.sizes, &trial) {
        (Some(s), _) => parse_list(s, "size")?,
        (None, Some(t)) => vec![t.num_qubits()],
        (None, None) => vec![16, 64, 256, 1024],
    };
    let rates = match &a.rates {
        Some(s) => parse_list(s, "rate")?,
        None => vec![1e-4, 1e-3, 1e-2, 1e-1],
    };
    let seed = a.seed.unwrap_or(0);
    let cfg = ScaleConfig {
        sizes,
        rates,
        shots: a.shots.unwrap_or(DEFAULT_SWEEP_SHOTS),
        seed,
        bias: a.bias.unwrap_or(10.0),
        trial,
    };
    cfg.validate()?;
    let rows = run_scale(&cfg)?;
    emit_table("scale", Some(seed), a, a.output.as_ref(), &rows, &TableOptions { timing: a.timing })
}

fn cmd_dump_dist(a: &DumpArgs) -> Result<()> {
    let threshold = a.threshold.unwrap_or(DEFAULT_THRESHOLD);
    let (dist, seed) = if let Some(path) = &a.measurements {
        if a.trial.is_some() || a.noise.is_some() || a.shots.is_some() || a.n.is_some() {
            return Err(CliError::Config("--measurements excludes --trial, --n, --noise and --shots".into()));
        }
        let ms = load_measurements(path)?;
        let basis = match &a.basis {
            Some(b) => b.parse::<Tpb>()?,
            None => Tpb::all_z(ms.num_qubits()),
        };
        let d = ms
            .get(&basis)
            .cloned()
            .ok_or_else(|| CliError::Lib(Error::MissingMeasurement { bases: vec![basis.to_string()] }))?;
        (d, ms.provenance().seed)
    } else {
        let circuit = match a.trial.as_deref() {
            None | Some("neel") => {
                neel_circuit(a.n.ok_or_else(|| CliError::Config("the Néel trial needs --n".into()))?)?
            }
            Some(path) => load_circuit(Path::new(path), a.n)?,
        };
        let basis = match &a.basis {
            Some(b) => b.parse::<Tpb>()?,
            None => Tpb::all_z(circuit.num_qubits()),
        };
        let seed = a.seed.unwrap_or(0);
        let shots = a.shots.filter(|&s| s > 0);
        let d = simulate_distribution(&circuit, &basis, &noise_model(a.noise.as_deref())?, shots, seed)?;
        (d, Some(seed))
    };
    let rows = dump_distribution(&dist, threshold)?;
    emit_table("dump-dist", seed, a, a.output.as_ref(), &rows, &TableOptions::default())
}

fn cmd_ground_state(a: &GroundArgs) -> Result<()> {
    let h: PauliSum = match hamiltonian_source(&a.model)? {
        HamiltonianSource::Tfim { n, j, h, periodic } => build_tfim(&TfimSpec::chain(n, j, h, periodic)?)?,
        HamiltonianSource::Explicit(h) => h,
    };
    let (energy, _) = exact_ground_state(&h)?;
    #[derive(Serialize)]
    struct Out<'a> {
        version: &'a str,
        config: &'a GroundArgs,
        num_qubits: usize,
        terms: usize,
        energy: f64,
    }
    emit_json(
        &Out {
            version: env!("CARGO_PKG_VERSION"),
            config: a,
            num_qubits: h.num_qubits(),
            terms: h.len(),
            energy,
        },
        a.output.as_ref(),
    )
}
