use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use infomono::config::{DirectionSource, OutputFormat, RunConfig};
use infomono::region::round_sig;
use infomono::sampling::HarnessOptions;
use infomono::{
    common_part, entropy, feasibility_test, gk_common_information, intercepts,
    monotonicity_harness, mutual_information, region_approx, region_t2k,
    scratch_characterization_perfect, scratch_check_statistical, simulate_pi_s, total_correlation,
    wyner_with, Error, JointPmf, MarginSpec, MonotoneOp, ScratchCertificate,
};

#[derive(Parser)]
#[command(
    name = "infomono",
    version,
    about = "Common information, residual information regions and secure sampling checks"
)]
struct Cli {
    /// Auxiliary alphabet size (defaults depend on the command)
    #[arg(long, global = true, env = "INFOMONO_Q_SIZE")]
    q_size: Option<usize>,
    /// Random restarts per optimization
    #[arg(long, global = true, env = "INFOMONO_RESTARTS", default_value_t = 4)]
    restarts: usize,
    #[arg(long, global = true, env = "INFOMONO_SEED", default_value_t = 0)]
    seed: u64,
    /// Number of lattice directions added to the axes, or a JSON file of directions
    #[arg(long, global = true, env = "INFOMONO_DIRECTIONS", default_value = "50")]
    directions: DirectionSource,
    /// Region comparison tolerance, in (0, 0.1]
    #[arg(
        long,
        global = true,
        env = "INFOMONO_TOLERANCE",
        default_value_t = 1e-3
    )]
    tolerance: f64,
    #[arg(long, global = true, env = "INFOMONO_FORMAT", value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ari,
    TwoK,
}

#[derive(Subcommand)]
enum Command {
    /// Entropies, pairwise mutual information and total correlation
    Info { file: PathBuf },
    /// Gács–Körner and Wyner common information
    Ci { file: PathBuf },
    /// Support-function samples of the residual information region
    Region {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Ari)]
        kind: Kind,
        /// Also write the CSV table here
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Axis intercepts of the region boundary
    Intercepts { file: PathBuf },
    /// Region inclusion test for sampling m copies of a target from n copies of a setup
    Feasible {
        setup: PathBuf,
        target: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
    /// Realizability of a target from scratch
    Scratch {
        target: PathBuf,
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Joint over (outputs, Q) to check statistically instead of the perfect test
        #[arg(long)]
        candidate: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
    },
    /// Run the broadcast protocol of a realizable certificate
    Simulate {
        cert: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        initiator: usize,
    },
    /// Check that an operation does not shrink the region
    Monocheck {
        file: PathBuf,
        /// JSON operation spec
        op: PathBuf,
    },
}

enum Failure {
    Input(String),
    Library(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Library(Error::Precondition(_) | Error::Certificate(_)) => 3,
            Failure::Library(Error::InfeasibleWitness { .. }) => 4,
            Failure::Library(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(m) => m.clone(),
            Failure::Library(e) => e.to_string(),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Rounds every float to nine significant digits.
fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

fn emit(v: impl Serialize) -> Result<String, Failure> {
    let v = serde_json::to_value(v).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(serde_json::to_string_pretty(&rounded(v)).expect("values serialize"))
}

fn info_report(p: &JointPmf) -> Result<Value, Failure> {
    let k = p.num_coords();
    let entropies = (0..k)
        .map(|a| entropy(p, &MarginSpec::single(a)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let v = mutual_information(p, &MarginSpec::single(i), &MarginSpec::single(j))?;
            pairs.push(json!({ "pair": [i, j], "value": v }));
        }
    }
    Ok(json!({
        "alphabet_sizes": p.sizes(),
        "entropies": entropies,
        "joint_entropy": entropy(p, &MarginSpec::range(k))?,
        "pairwise_mutual_information": pairs,
        "total_correlation": total_correlation(p, None)?,
    }))
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let cfg = RunConfig {
        q_size: cli.q_size,
        restarts: cli.restarts,
        seed: cli.seed,
        directions: cli.directions.clone(),
        tolerance: cli.tolerance,
        output_format: cli.format,
    };
    cfg.validate()?;
    if cfg.output_format == OutputFormat::Csv && !matches!(cli.command, Command::Region { .. }) {
        return Err(Failure::Input(
            "CSV output is only available for region tables".into(),
        ));
    }
    match &cli.command {
        Command::Info { file } => emit(info_report(&read_json(file)?)?),
        Command::Ci { file } => {
            let p: JointPmf = read_json(file)?;
            let gk = gk_common_information(&p);
            let wyner = wyner_with(&p, &cfg.wyner_options())?;
            emit(json!({
                "total_correlation": total_correlation(&p, None)?,
                "gacs_korner": gk,
                "common_part_pmf": common_part(&p).component_pmf,
                "wyner": wyner,
            }))
        }
        Command::Region { file, kind, csv } => {
            let p: JointPmf = read_json(file)?;
            let region = match kind {
                Kind::Ari => region_approx(
                    &p,
                    &cfg.directions(p.num_coords() + 1)?,
                    &cfg.region_options(),
                )?,
                Kind::TwoK => region_t2k(
                    &p,
                    &cfg.directions(2 * p.num_coords())?,
                    &cfg.region_options(),
                )?,
            };
            if let Some(path) = csv {
                std::fs::write(path, region.to_csv())
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            }
            match cfg.output_format {
                OutputFormat::Json => emit(&region),
                OutputFormat::Csv => Ok(region.to_csv().trim_end().to_string()),
            }
        }
        Command::Intercepts { file } => emit(intercepts(&read_json(file)?)?),
        Command::Feasible {
            setup,
            target,
            n,
            m,
        } => {
            let setup: JointPmf = read_json(setup)?;
            let target: JointPmf = read_json(target)?;
            let dirs = cfg.directions(setup.num_coords() + 1)?;
            emit(feasibility_test(
                &setup,
                &target,
                *n,
                *m,
                &dirs,
                &cfg.region_options(),
                cfg.tolerance,
            )?)
        }
        Command::Scratch {
            target,
            t,
            candidate,
            epsilon,
            delta,
        } => {
            let target: JointPmf = read_json(target)?;
            let cert = match candidate {
                None => scratch_characterization_perfect(&target, *t)?,
                Some(path) => {
                    scratch_check_statistical(&read_json(path)?, &target, *t, *epsilon, *delta)?
                }
            };
            emit(cert)
        }
        Command::Simulate {
            cert,
            samples,
            initiator,
        } => {
            let cert: ScratchCertificate = read_json(cert)?;
            emit(simulate_pi_s(&cert, *initiator, *samples, cfg.seed)?)
        }
        Command::Monocheck { file, op } => {
            let p: JointPmf = read_json(file)?;
            let op: MonotoneOp = read_json(op)?;
            let dirs = cfg.directions(p.num_coords() + 1)?;
            let opts = HarnessOptions {
                region: cfg.region_options(),
                margin: 0.0,
            };
            emit(monotonicity_harness(&p, &op, &dirs, &opts)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
