use std::fs::File;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use intermithash::bench::{self, MsgClass};
use intermithash::energy::{self, EnergyParams, Experiment};
use intermithash::quality::{self, QualityConfig, QualityTest};
use intermithash::report::{self, Format};
use intermithash::{Error, HashAlgorithm, Result, StreamHasher};

#[derive(Parser)]
#[command(name = "intermithash", version, about = "Lightweight hashes, hash quality tests and an intermittent-power simulator")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "INTERMITHASH_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Format {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Short,
    Long,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Continuous,
    Iem,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the hex digest of FILE, or of standard input.
    Hash { name: String, file: Option<PathBuf> },
    /// Time every hash on short and long messages.
    Bench {
        #[arg(long, value_enum, default_value_t = ClassArg::Both)]
        class: ClassArg,
        #[arg(long, default_value_t = bench::DEFAULT_REPETITIONS)]
        reps: usize,
        #[arg(long, default_value_t = bench::DEFAULT_WARMUP)]
        warmup: usize,
        /// Hashes to time; all of them by default.
        #[arg(long = "hash")]
        hashes: Vec<String>,
    },
    /// Run the statistical battery.
    Quality {
        /// md5 and the three SPECK constructions by default.
        #[arg(long = "hash")]
        hashes: Vec<String>,
        /// Every test by default.
        #[arg(long = "test")]
        tests: Vec<String>,
    },
    /// Success rate of a long BLAKE2s hash against reader distance.
    Simulate {
        /// Device parameter file; the bundled calibration by default.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Both policies by default.
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        #[arg(long)]
        task_cycles: Option<u64>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Also write a voltage trace CSV at the mid-range distance.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Also write a per-cycle histogram CSV at the farthest distance.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("intermithash: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let out = cli.out.as_deref();
    let format = Format::from(cli.format);
    match cli.cmd {
        Cmd::Hash { name, file } => hash_cmd(&name, file.as_deref(), out),
        Cmd::Bench { class, reps, warmup, hashes } => {
            let classes: &[MsgClass] = match class {
                ClassArg::Short => &[MsgClass::Short],
                ClassArg::Long => &[MsgClass::Long],
                ClassArg::Both => &MsgClass::ALL,
            };
            let hashes = parse_hashes(&hashes, &HashAlgorithm::ALL)?;
            let mut results = Vec::new();
            for &h in &hashes {
                for &c in classes {
                    results.push(bench::bench_hash(h, c, reps, warmup, cli.seed)?);
                }
            }
            report::report_emit(&results, format, out)
        }
        Cmd::Quality { hashes, tests } => {
            let default = [HashAlgorithm::Md5, HashAlgorithm::DmSpeck128, HashAlgorithm::MmoSpeck128, HashAlgorithm::MpSpeck128];
            let hashes = parse_hashes(&hashes, &default)?;
            let tests = if tests.is_empty() {
                QualityTest::ALL.to_vec()
            } else {
                tests.iter().map(|t| t.parse()).collect::<Result<Vec<QualityTest>>>()?
            };
            let config = QualityConfig::desk(cli.seed);
            let mut reports = Vec::new();
            for h in &hashes {
                reports.push(quality::run_battery(h, &tests, &config)?);
            }
            let text = match format {
                Format::Json => {
                    let mut s = String::new();
                    for r in &reports {
                        s.push_str(&r.to_json_lines()?);
                    }
                    s
                }
                Format::Csv => quality::csv_summary(&reports),
            };
            report::write_output(&text, out)
        }
        Cmd::Simulate { params, policy, task_cycles, trials, trace, histogram } => {
            let params = match params {
                Some(p) => EnergyParams::load(&p)?,
                None => EnergyParams::shipped(),
            };
            let mut exp = Experiment::with_params(params);
            if let Some(n) = task_cycles {
                exp.task.total_cycles = n;
                exp.task.checkpoint_granularity_cycles = exp.task.checkpoint_granularity_cycles.min(n.max(1));
            }
            let (cont, iem) = match policy {
                None => (true, true),
                Some(PolicyArg::Continuous) => (true, false),
                Some(PolicyArg::Iem) => (false, true),
            };
            let points = exp.sweep(cont, iem, trials, cli.seed)?;
            if let Some(path) = trace {
                let profile = exp.profile_at(exp.mid_distance_m)?.reseeded(cli.seed);
                let t = energy::simulate_trace(&exp.params, &profile, exp.timeout_s, energy::DEFAULT_DT_S)?;
                std::fs::write(path, t.to_csv())?;
            }
            if let Some(path) = histogram {
                let far = exp.distances_m.iter().copied().fold(f64::MIN, f64::max);
                let h = energy::cycle_histogram(&exp.params, &exp.profile_at(far)?, trials.max(100), cli.seed)?;
                std::fs::write(path, h.to_csv())?;
            }
            let text = match format {
                Format::Json => {
                    let doc = json!({
                        "schema": report::SCHEMA,
                        "seed": cli.seed,
                        "params": exp.params,
                        "energy_per_ipc_j": energy::energy_per_ipc(&exp.params),
                        "cycles_per_ipc": energy::cycles_per_ipc(&exp.params),
                        "task": exp.task,
                        "iem": exp.iem,
                        "p_ref_w": exp.p_ref_w,
                        "d_ref_m": exp.d_ref_m,
                        "rel_sigma": exp.rel_sigma,
                        "timeout_s": exp.timeout_s,
                        "trials": trials,
                        "points": points,
                    });
                    serde_json::to_string_pretty(&doc)? + "\n"
                }
                Format::Csv => {
                    let cell = |v: Option<f64>| v.map_or("N/A".to_string(), |x| x.to_string());
                    let mut s = String::from("distance_m,power_w,continuous,iem\n");
                    for p in &points {
                        s += &format!("{},{},{},{}\n", p.distance_m, p.power_w, cell(p.continuous), cell(p.iem));
                    }
                    s
                }
            };
            report::write_output(&text, out)
        }
    }
}

fn parse_hashes(names: &[String], default: &[HashAlgorithm]) -> Result<Vec<HashAlgorithm>> {
    if names.is_empty() {
        return Ok(default.to_vec());
    }
    names.iter().map(|n| HashAlgorithm::from_name(n)).collect()
}

fn hash_cmd(name: &str, file: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let alg = HashAlgorithm::from_name(name)?;
    let mut input: Box<dyn Read> = match file {
        Some(p) => Box::new(File::open(p).map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", p.display()))))?),
        None => Box::new(io::stdin().lock()),
    };
    let mut h = alg.hasher();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = match input.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e.into()),
        };
        h.update(&buf[..n]);
    }
    report::write_output(&format!("{}\n", h.finalize().to_hex()), out)
}
