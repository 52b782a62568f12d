use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hardmis_core::bench::{self, BenchConfig, Figure};
use hardmis_core::generate::{
    candidate_count, kings_lattice, native_radius, random_udg_box, rewire, sample_native_instance, square_layout,
    triangular_layout, LayoutKind, DEFAULT_SPACING_UM, DEFAULT_TRAPS,
};
use hardmis_core::hardness::{analyze, DEFAULT_ORIENTATIONS};
use hardmis_core::quantum::{self, NoiseModel, SampleSet, Schedule};
use hardmis_core::solver::{greedy_leftmost, solve_bb};
use hardmis_core::weighting::{apply_scheme, SchemeKind, WeightScheme, DEFAULT_DELTA_BAR};
use hardmis_core::{Assignment, Instance};

/// Exit status of `solve` when the tick budget ran out before optimality
/// was proven.
const EXIT_TRUNCATED: u8 = 3;

#[derive(Parser)]
#[command(name = "hardmis", version, about = "Hard unit-disk MIS instances: generation, analysis, solving, annealing emulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Native,
    Box,
    Kings,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Atom count (native, box).
        #[arg(long)]
        n: Option<usize>,
        /// Fill density.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lattice width and height (kings).
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        /// Fraction of edges to rewire (kings).
        #[arg(long, default_value_t = 0.0)]
        rewire: f64,
        /// Trap layout of native instances.
        #[arg(long, default_value = "triangular")]
        layout: String,
        #[arg(long, default_value_t = DEFAULT_SPACING_UM)]
        spacing: f64,
        /// Native disk radius in units of the spacing.
        #[arg(long)]
        radius_factor: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hardness measures of an instance.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORIENTATIONS)]
        orientations: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reweight an instance.
    Weight {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        scheme: String,
        #[arg(long, default_value_t = DEFAULT_DELTA_BAR)]
        delta_bar: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact MWIS by branch and bound. Exits with status 3 when the tick
    /// budget stops the search early.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        /// QUBO penalty used to report the solution's cost: `auto` (twice the
        /// largest weight) or a number above the largest weight.
        #[arg(long, default_value = "auto")]
        alpha: String,
        #[arg(long)]
        budget_ticks: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Greedy leftmost-disk independent set.
    Approx {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emulate an annealing run and sample it.
    Anneal {
        #[arg(long = "in")]
        input: PathBuf,
        /// Schedule JSON; the default anneal of `--duration` otherwise.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long, default_value_t = quantum::schedule::DEFAULT_DURATION_US)]
        duration: f64,
        #[arg(long, default_value_t = quantum::DEFAULT_DT_US)]
        dt: f64,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Readout noise, e.g. `p=0.03,q=0.08`.
        #[arg(long)]
        noise: Option<String>,
        /// Attach the mitigated distribution of the noisy shots.
        #[arg(long)]
        mitigate: bool,
        /// Repair every shot into a maximal independent set.
        #[arg(long)]
        repair: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Invert the readout channel on a sample set.
    Mitigate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        noise: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a sweep and write one CSV row per (instance, scheme).
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Append finished cells here as they complete.
        #[arg(long)]
        partial: Option<PathBuf>,
    },
    /// Aggregate a results CSV into plot-ready long format.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        figure: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, &text)
}

fn load_instance(path: &Path) -> Result<Instance> {
    Instance::from_json(&read(path)?).with_context(|| format!("parsing instance {}", path.display()))
}

fn save_instance(path: &Path, inst: &Instance) -> Result<()> {
    let mut text = inst.to_json()?;
    text.push('\n');
    write(path, &text)
}

#[allow(clippy::too_many_arguments)]
fn generate(
    kind: Kind,
    n: Option<usize>,
    rho: Option<f64>,
    seed: u64,
    width: Option<usize>,
    height: Option<usize>,
    fraction: f64,
    layout: &str,
    spacing: f64,
    radius_factor: Option<f64>,
) -> Result<Instance> {
    Ok(match kind {
        Kind::Native => {
            let n = n.context("--n is required")?;
            let rho = rho.context("--rho is required")?;
            let traps = candidate_count(n, rho).max(DEFAULT_TRAPS);
            let layout = match LayoutKind::parse(layout)? {
                LayoutKind::Triangular => triangular_layout(traps, spacing)?,
                LayoutKind::Kings => square_layout(traps, spacing)?,
            };
            let radius = match radius_factor {
                Some(f) => f * layout.spacing,
                None => native_radius(&layout),
            };
            sample_native_instance(&layout, n, rho, radius, seed)?
        }
        Kind::Box => {
            let n = n.context("--n is required")?;
            random_udg_box(n, rho.context("--rho is required")?, seed)?
        }
        Kind::Kings => {
            let (w, h) = match (width, height, n) {
                (Some(w), Some(h), _) => (w, h),
                (None, None, Some(n)) => {
                    let side = (n as f64).sqrt().round() as usize;
                    if side * side != n {
                        bail!("--n {n} is not a square; give --width and --height");
                    }
                    (side, side)
                }
                _ => bail!("give --width and --height (or a square --n)"),
            };
            let base: Instance = kings_lattice(w, h)?;
            if fraction == 0.0 {
                base
            } else {
                let mut inst = base.with_graph(rewire(&base.graph, fraction, seed)?);
                inst.meta.seed = Some(seed);
                inst.meta.name = format!("kings-{w}x{h}-f{fraction}-s{seed}");
                inst
            }
        }
    })
}

#[derive(Serialize)]
struct SolveOutput {
    #[serde(flatten)]
    report: hardmis_core::solver::SolveReportFile,
    alpha: f64,
    qubo_cost: f64,
}

#[derive(Serialize)]
struct ApproxOutput {
    solution: Vec<usize>,
    size: usize,
    weight: f64,
}

#[derive(Serialize)]
struct MitigatedOutput {
    n: usize,
    /// Quasi-probabilities after inverting the channel (nonzero entries).
    raw: BTreeMap<String, f64>,
    /// `raw` clipped at zero and renormalized (nonzero entries).
    clipped: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct AnnealOutput {
    #[serde(flatten)]
    samples: SampleSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    mitigated: Option<MitigatedOutput>,
}

fn mitigated(samples: &SampleSet, nm: &NoiseModel) -> Result<MitigatedOutput> {
    let n = samples.validate()?.context("sample set is empty")?;
    let m = quantum::mitigate_readout(&samples.to_distribution(n)?, nm)?;
    let keep = |v: &[f64]| {
        v.iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(s, &p)| (quantum::bitstring(n, s), p))
            .collect()
    };
    Ok(MitigatedOutput {
        n,
        raw: keep(&m.raw),
        clipped: keep(&m.clipped),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate {
            kind,
            n,
            rho,
            seed,
            width,
            height,
            rewire,
            layout,
            spacing,
            radius_factor,
            out,
        } => {
            let inst = generate(kind, n, rho, seed, width, height, rewire, &layout, spacing, radius_factor)?;
            save_instance(&out, &inst)?;
        }
        Command::Analyze {
            input,
            orientations,
            out,
        } => {
            let inst = load_instance(&input)?;
            write_json(&out, &analyze(&inst, orientations)?)?;
        }
        Command::Weight {
            input,
            scheme,
            delta_bar,
            seed,
            out,
        } => {
            let inst = load_instance(&input)?;
            let scheme = WeightScheme::new(SchemeKind::parse(&scheme)?)
                .with_delta_bar(delta_bar)
                .with_seed(seed);
            let g = apply_scheme(&inst.graph, &scheme)?;
            save_instance(&out, &inst.with_graph(g))?;
        }
        Command::Solve {
            input,
            alpha,
            budget_ticks,
            out,
        } => {
            let inst = load_instance(&input)?;
            let g = &inst.graph;
            let alpha = if alpha == "auto" {
                g.default_penalty()
            } else {
                let a: f64 = alpha.parse().with_context(|| format!("bad --alpha {alpha:?}"))?;
                if !(a > g.max_weight()) {
                    bail!("--alpha must exceed the largest weight {}", g.max_weight());
                }
                a
            };
            let rep = solve_bb(g, budget_ticks);
            let cost = g.qubo_cost(&Assignment::indicator(g.n(), &rep.solution), alpha)?;
            write_json(
                &out,
                &SolveOutput {
                    report: rep.to_file(),
                    alpha,
                    qubo_cost: cost,
                },
            )?;
            if !rep.optimal {
                eprintln!("tick budget exhausted after {} ticks; best weight {}", rep.ticks, rep.optimum);
                return Ok(ExitCode::from(EXIT_TRUNCATED));
            }
        }
        Command::Approx { input, out } => {
            let inst = load_instance(&input)?;
            let solution = greedy_leftmost(&inst)?;
            write_json(
                &out,
                &ApproxOutput {
                    size: solution.len(),
                    weight: inst.graph.set_weight(&solution),
                    solution,
                },
            )?;
        }
        Command::Anneal {
            input,
            schedule,
            duration,
            dt,
            shots,
            seed,
            noise,
            mitigate,
            repair,
            out,
        } => {
            let inst = load_instance(&input)?;
            let schedule = match schedule {
                Some(p) => Schedule::from_json(&read(&p)?)?,
                None => Schedule::default_anneal(duration)?,
            };
            let noise = noise.as_deref().map(NoiseModel::parse).transpose()?;
            if mitigate && noise.is_none() {
                bail!("--mitigate needs --noise");
            }
            let h = quantum::build_hamiltonian(&inst, schedule)?;
            let psi = quantum::evolve(&h, dt)?;
            let mut samples = quantum::sample(&psi, shots, seed)?;
            let mut mit = None;
            if let Some(nm) = &noise {
                samples = quantum::corrupt_samples(&samples, nm, seed.wrapping_add(1))?;
                if mitigate {
                    mit = Some(mitigated(&samples, nm)?);
                }
            }
            if repair {
                samples = quantum::repair_bitstrings(&samples, &inst.graph)?;
            }
            write_json(
                &out,
                &AnnealOutput {
                    samples,
                    mitigated: mit,
                },
            )?;
        }
        Command::Mitigate { input, noise, out } => {
            let samples = SampleSet::from_json(&read(&input)?)?;
            write_json(&out, &mitigated(&samples, &NoiseModel::parse(&noise)?)?)?;
        }
        Command::Bench {
            config,
            out,
            workers,
            partial,
        } => {
            let cfg = BenchConfig::from_json(&read(&config)?)?;
            let rows = bench::run_benchmark(&cfg, workers, partial.as_deref())?;
            let mut buf = Vec::new();
            bench::write_csv(&rows, &mut buf)?;
            fs::File::create(&out)
                .and_then(|mut f| f.write_all(&buf))
                .with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Report { input, figure, out } => {
            let figure = Figure::parse(&figure)?;
            let f = fs::File::open(&input).with_context(|| format!("reading {}", input.display()))?;
            let mut buf = Vec::new();
            bench::report(f, figure, &mut buf)?;
            fs::write(&out, buf).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
