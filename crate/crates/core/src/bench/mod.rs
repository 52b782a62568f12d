//! Metrics, sweep orchestration and figure-data reports.
//!
//! Seeds: every instance draws from
//! `derive_seed(master, [label_key(generator), N, f64 bits of ρ or the
//! rewire fraction, replicate])`; the weighting of one scheme on it uses
//! `derive_seed(instance_seed, [label_key(scheme)])`, and its quantum
//! sampling `derive_seed(instance_seed, [label_key(scheme),
//! label_key("shots")])`. All schemes of a cell therefore see the same
//! instance.

pub mod metrics;
pub mod report;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{
    candidate_count, kings_lattice, native_radius, random_udg_box, rewire, sample_native_instance,
    square_layout, triangular_layout, Layout, LayoutKind, DEFAULT_SPACING_UM, DEFAULT_TRAPS,
};
use crate::hardness::minfill_treewidth;
use crate::instance::Instance;
use crate::quantum::{
    self, build_hamiltonian, corrupt_samples, evolve, mitigate_readout, probabilities,
    repair_bitstrings, NoiseModel, Schedule,
};
use crate::rng::{derive_seed, label_key};
use crate::solver::solve_bb;
use crate::weighting::{apply_scheme, SchemeKind, WeightScheme, DEFAULT_DELTA_BAR};

pub use metrics::{
    avg_gap, gap, mean, median, p_mis, p_mis_distribution, truncated_avg_gap, tts_q,
};
pub use report::{report, Figure};

/// Environment variable naming a directory where generated instances are
/// cached as JSON.
pub const CACHE_ENV: &str = "HARDMIS_CACHE_DIR";

/// Keep fractions of the truncated-gap columns, in column order.
pub const KEEP_FRACTIONS: [f64; 5] = [1.0, 0.8, 0.6, 0.4, 0.2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KingsConfig {
    pub width: usize,
    pub height: usize,
    pub fractions: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumConfig {
    #[serde(default = "default_shots")]
    pub shots: u64,
    /// Duration of the default annealing schedule; ignored with `schedule`.
    #[serde(default = "default_duration")]
    pub duration_us: f64,
    #[serde(default)]
    pub schedule: Option<quantum::schedule::ScheduleFile>,
    #[serde(default = "default_dt")]
    pub dt_us: f64,
    /// Instances above this size get empty quantum columns.
    #[serde(default = "default_max_n")]
    pub max_n: usize,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub mitigate: bool,
    #[serde(default = "yes")]
    pub repair: bool,
}

fn default_shots() -> u64 {
    1000
}
fn default_duration() -> f64 {
    quantum::schedule::DEFAULT_DURATION_US
}
fn default_dt() -> f64 {
    quantum::DEFAULT_DT_US
}
fn default_max_n() -> usize {
    14
}
fn yes() -> bool {
    true
}
fn default_schemes() -> Vec<String> {
    vec!["unweighted".into()]
}
fn default_replicates() -> usize {
    1
}
fn default_delta_bar() -> f64 {
    DEFAULT_DELTA_BAR
}
fn default_spacing() -> f64 {
    DEFAULT_SPACING_UM
}
fn default_layout() -> String {
    "triangular".into()
}

/// Sweep description, read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub name: String,
    /// `native`, `box` or `kings`.
    pub generator: String,
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub rhos: Vec<f64>,
    #[serde(default)]
    pub kings: Option<KingsConfig>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<String>,
    #[serde(default = "default_delta_bar")]
    pub delta_bar: f64,
    /// Tick budget per solve; exhausted rows have `optimal = false`.
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default = "default_layout")]
    pub layout: String,
    #[serde(default = "default_spacing")]
    pub spacing_um: f64,
    /// Native disk radius in units of the spacing (layout default if absent).
    #[serde(default)]
    pub radius_factor: Option<f64>,
    #[serde(default = "yes")]
    pub treewidth: bool,
    #[serde(default)]
    pub quantum: Option<QuantumConfig>,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn schemes(&self) -> Result<Vec<SchemeKind>> {
        self.schemes.iter().map(|s| SchemeKind::parse(s)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let schemes = self.schemes()?;
        if schemes.is_empty() {
            return Err(Error::InvalidParameter("no weighting schemes given".into()));
        }
        WeightScheme::new(SchemeKind::Unweighted)
            .with_delta_bar(self.delta_bar)
            .validate()?;
        match self.generator.as_str() {
            "native" | "box" => {
                if self.sizes.is_empty() || self.rhos.is_empty() {
                    return Err(Error::InvalidParameter(format!(
                        "{} sweeps need sizes and rhos",
                        self.generator
                    )));
                }
                if self.generator == "native" {
                    LayoutKind::parse(&self.layout)?;
                }
            }
            "kings" => {
                let k = self.kings.as_ref().ok_or_else(|| {
                    Error::InvalidParameter("kings sweeps need a kings section".into())
                })?;
                if k.fractions.is_empty() {
                    return Err(Error::InvalidParameter(
                        "kings sweep needs fractions".into(),
                    ));
                }
            }
            other => {
                return Err(Error::Unknown {
                    what: "generator",
                    name: other.to_string(),
                })
            }
        }
        if let Some(q) = &self.quantum {
            if let Some(nm) = &q.noise {
                nm.validate()?;
            }
            if q.mitigate && q.noise.is_none() {
                return Err(Error::InvalidParameter(
                    "mitigation needs a noise model".into(),
                ));
            }
            self.quantum_schedule()?;
        }
        Ok(())
    }

    fn quantum_schedule(&self) -> Result<Option<Schedule>> {
        match &self.quantum {
            None => Ok(None),
            Some(q) => {
                let s = match &q.schedule {
                    Some(f) => Schedule::from_file(f)?,
                    None => Schedule::default_anneal(q.duration_us)?,
                };
                s.validate_annealing()?;
                Ok(Some(s))
            }
        }
    }
}

/// One instance to generate: a grid cell and replicate.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub rho: Option<f64>,
    pub rewire: Option<f64>,
    pub replicate: usize,
}

pub fn cells(config: &BenchConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    match config.generator.as_str() {
        "kings" => {
            if let Some(k) = &config.kings {
                for &f in &k.fractions {
                    for r in 0..config.replicates {
                        out.push(Cell {
                            n: k.width * k.height,
                            rho: None,
                            rewire: Some(f),
                            replicate: r,
                        });
                    }
                }
            }
        }
        _ => {
            for &n in &config.sizes {
                for &rho in &config.rhos {
                    for r in 0..config.replicates {
                        out.push(Cell {
                            n,
                            rho: Some(rho),
                            rewire: None,
                            replicate: r,
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn instance_seed(config: &BenchConfig, cell: &Cell) -> u64 {
    let axis = cell.rho.or(cell.rewire).unwrap_or(0.0);
    derive_seed(
        config.master_seed,
        &[
            label_key(&config.generator),
            cell.n as u64,
            axis.to_bits(),
            cell.replicate as u64,
        ],
    )
}

pub fn instance_id(config: &BenchConfig, cell: &Cell) -> String {
    match (cell.rho, cell.rewire) {
        (Some(rho), _) => format!(
            "{}-n{}-rho{}-r{}",
            config.generator, cell.n, rho, cell.replicate
        ),
        (None, Some(f)) => {
            let k = config.kings.as_ref().expect("kings config");
            format!("kings-{}x{}-f{}-r{}", k.width, k.height, f, cell.replicate)
        }
        (None, None) => format!("{}-n{}-r{}", config.generator, cell.n, cell.replicate),
    }
}

/// The trap layout shared by every native cell of the sweep: the default
/// size, grown to hold the largest candidate set.
pub fn sweep_layout(config: &BenchConfig) -> Result<Layout> {
    let need = config
        .sizes
        .iter()
        .flat_map(|&n| config.rhos.iter().map(move |&rho| candidate_count(n, rho)))
        .max()
        .unwrap_or(0)
        .max(DEFAULT_TRAPS);
    match LayoutKind::parse(&config.layout)? {
        LayoutKind::Triangular => triangular_layout(need, config.spacing_um),
        LayoutKind::Kings => square_layout(need, config.spacing_um),
    }
}

fn generate(
    config: &BenchConfig,
    layout: Option<&Layout>,
    cell: &Cell,
    seed: u64,
) -> Result<Instance> {
    match config.generator.as_str() {
        "native" => {
            let layout = layout.expect("native sweeps build a layout");
            let radius = match config.radius_factor {
                Some(f) => f * layout.spacing,
                None => native_radius(layout),
            };
            sample_native_instance(layout, cell.n, cell.rho.unwrap_or(1.0), radius, seed)
        }
        "box" => random_udg_box(cell.n, cell.rho.unwrap_or(1.0), seed),
        "kings" => {
            let k = config.kings.as_ref().expect("validated");
            let base: Instance = kings_lattice(k.width, k.height)?;
            let f = cell.rewire.unwrap_or(0.0);
            let mut inst = base.with_graph(rewire(&base.graph, f, seed)?);
            inst.meta.seed = Some(seed);
            inst.meta.name = format!("kings-{}x{}-f{}-s{}", k.width, k.height, f, seed);
            Ok(inst)
        }
        other => Err(Error::Unknown {
            what: "generator",
            name: other.to_string(),
        }),
    }
}

/// Generates a cell's instance, going through the cache directory if set.
fn load_or_generate(
    config: &BenchConfig,
    layout: Option<&Layout>,
    cell: &Cell,
    seed: u64,
) -> Result<Instance> {
    let cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let path = cache.map(|d| d.join(format!("{}-{:016x}.json", instance_id(config, cell), seed)));
    if let Some(p) = &path {
        if let Ok(text) = fs::read_to_string(p) {
            return Instance::from_json(&text);
        }
    }
    let inst = generate(config, layout, cell, seed)?;
    if let Some(p) = &path {
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir)?;
        }
        // write-then-rename so concurrent readers never see partial files
        let tmp = p.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, inst.to_json()?)?;
        fs::rename(&tmp, p)?;
    }
    Ok(inst)
}

/// One result row per (instance, scheme).
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    pub instance_id: String,
    pub generator: String,
    pub n: usize,
    pub rho: Option<f64>,
    pub rewire: Option<f64>,
    pub replicate: usize,
    pub seed: u64,
    pub scheme: String,
    pub edges: usize,
    pub treewidth_est: Option<usize>,
    pub ticks: Option<u64>,
    pub bb_nodes: Option<u64>,
    pub optimal: Option<bool>,
    pub optimum: Option<f64>,
    pub lp_root: Option<f64>,
    pub root_gap_pct: Option<f64>,
    pub p_mis: Option<f64>,
    pub tts_q: Option<f64>,
    pub avg_gap: Option<f64>,
    /// Same order as [`KEEP_FRACTIONS`].
    pub truncated_gaps: [Option<f64>; 5],
    pub note: String,
}

pub const CSV_COLUMNS: [&str; 25] = [
    "instance_id",
    "generator",
    "n",
    "rho",
    "rewire",
    "replicate",
    "seed",
    "scheme",
    "edges",
    "treewidth_est",
    "ticks",
    "bb_nodes",
    "optimal",
    "optimum",
    "lp_root",
    "root_gap_pct",
    "p_mis",
    "tts_q",
    "avg_gap",
    "gap_keep_100",
    "gap_keep_80",
    "gap_keep_60",
    "gap_keep_40",
    "gap_keep_20",
    "note",
];

/// `%.17g`: 17 significant digits, trailing zeros trimmed, `.` decimal.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mant.to_string()), exp)
    }
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

impl MetricRow {
    pub fn to_record(&self) -> Vec<String> {
        let mut rec = vec![
            self.instance_id.clone(),
            self.generator.clone(),
            self.n.to_string(),
            opt(self.rho, fmt_f64),
            opt(self.rewire, fmt_f64),
            self.replicate.to_string(),
            self.seed.to_string(),
            self.scheme.clone(),
            self.edges.to_string(),
            opt(self.treewidth_est, |v| v.to_string()),
            opt(self.ticks, |v| v.to_string()),
            opt(self.bb_nodes, |v| v.to_string()),
            opt(self.optimal, |v| v.to_string()),
            opt(self.optimum, fmt_f64),
            opt(self.lp_root, fmt_f64),
            opt(self.root_gap_pct, fmt_f64),
            opt(self.p_mis, fmt_f64),
            opt(self.tts_q, fmt_f64),
            opt(self.avg_gap, fmt_f64),
        ];
        rec.extend(self.truncated_gaps.iter().map(|g| opt(*g, fmt_f64)));
        rec.push(self.note.clone());
        rec
    }
}

struct QuantumOutcome {
    p_mis: f64,
    tts_q: f64,
    avg_gap: Option<f64>,
    truncated: [Option<f64>; 5],
}

fn run_quantum(
    inst: &Instance,
    optimum: f64,
    q: &QuantumConfig,
    schedule: &Schedule,
    seed: u64,
) -> Result<QuantumOutcome> {
    let h = build_hamiltonian(inst, schedule.clone())?;
    let probs = probabilities(&evolve(&h, q.dt_us)?);
    let g = &inst.graph;
    let mut samples = quantum::sample_distribution(&probs, q.shots, seed)?;
    let mut mitigated_p = None;
    if let Some(nm) = &q.noise {
        samples = corrupt_samples(&samples, nm, derive_seed(seed, &[label_key("noise")]))?;
        if q.mitigate {
            let m = mitigate_readout(&samples.to_distribution(g.n())?, nm)?;
            let mut fixed = vec![0.0; m.clipped.len()];
            for (s, &p) in m.clipped.iter().enumerate() {
                if p > 0.0 {
                    let bits = quantum::bitstring(g.n(), s);
                    let idx = if q.repair {
                        quantum::repair_assignment(
                            g,
                            &crate::graph::Assignment::from_bitstring(&bits)?,
                        )?
                        .to_index() as usize
                    } else {
                        s
                    };
                    fixed[idx] += p;
                }
            }
            mitigated_p = Some(p_mis_distribution(&fixed, g, optimum)?);
        }
    }
    if q.repair {
        samples = repair_bitstrings(&samples, g)?;
    }
    let p = match mitigated_p {
        Some(p) => p,
        None => p_mis(&samples, g, optimum)?,
    };
    let mut truncated = [None; 5];
    for (slot, &f) in truncated.iter_mut().zip(KEEP_FRACTIONS.iter()) {
        *slot = truncated_avg_gap(&samples, g, optimum, f)?;
    }
    Ok(QuantumOutcome {
        p_mis: p,
        tts_q: tts_q(p.clamp(0.0, 1.0))?,
        avg_gap: avg_gap(&samples, g, optimum)?,
        truncated,
    })
}

fn rows_for_cell(
    config: &BenchConfig,
    layout: Option<&Layout>,
    schedule: Option<&Schedule>,
    schemes: &[SchemeKind],
    cell: &Cell,
) -> Result<Vec<MetricRow>> {
    let seed = instance_seed(config, cell);
    let inst = load_or_generate(config, layout, cell, seed)?;
    let tw = if config.treewidth {
        Some(minfill_treewidth(&inst.graph).width)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(schemes.len());
    for &kind in schemes {
        let mut row = MetricRow {
            instance_id: instance_id(config, cell),
            generator: config.generator.clone(),
            n: inst.n(),
            rho: cell.rho,
            rewire: cell.rewire,
            replicate: cell.replicate,
            seed,
            scheme: kind.name().to_string(),
            edges: inst.graph.edge_count(),
            treewidth_est: tw,
            ticks: None,
            bb_nodes: None,
            optimal: None,
            optimum: None,
            lp_root: None,
            root_gap_pct: None,
            p_mis: None,
            tts_q: None,
            avg_gap: None,
            truncated_gaps: [None; 5],
            note: String::new(),
        };
        let scheme = WeightScheme::new(kind)
            .with_delta_bar(config.delta_bar)
            .with_seed(derive_seed(seed, &[label_key(kind.name())]));
        let g = match apply_scheme(&inst.graph, &scheme) {
            Ok(g) => g,
            Err(e) => {
                row.note = format!("weighting failed: {e}");
                rows.push(row);
                continue;
            }
        };
        let rep = solve_bb(&g, config.budget);
        row.ticks = Some(rep.ticks);
        row.bb_nodes = Some(rep.bb_nodes);
        row.optimal = Some(rep.optimal);
        row.optimum = Some(rep.optimum);
        row.lp_root = Some(rep.lp_root);
        row.root_gap_pct = Some(rep.root_gap_pct);
        if !rep.optimal {
            row.note = "tick budget exhausted".into();
        }
        if let (Some(q), Some(s)) = (&config.quantum, schedule) {
            let fits =
                inst.n() <= q.max_n && inst.positions.is_some() && inst.geometry_consistent();
            if fits && rep.optimal && rep.optimum > 0.0 {
                let wi = inst.with_graph(g);
                let qseed = derive_seed(seed, &[label_key(kind.name()), label_key("shots")]);
                let out = run_quantum(&wi, rep.optimum, q, s, qseed)?;
                row.p_mis = Some(out.p_mis);
                row.tts_q = Some(out.tts_q);
                row.avg_gap = out.avg_gap;
                row.truncated_gaps = out.truncated;
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_csv(rows: &[MetricRow], mut out: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record(r.to_record())?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the sweep on `workers` threads (0 = all cores). Rows come back in
/// cell order, then scheme order, whatever the completion order. With
/// `partial`, each finished cell's rows are appended there immediately.
pub fn run_benchmark(
    config: &BenchConfig,
    workers: usize,
    partial: Option<&Path>,
) -> Result<Vec<MetricRow>> {
    config.validate()?;
    let schemes = config.schemes()?;
    let layout = if config.generator == "native" {
        Some(sweep_layout(config)?)
    } else {
        None
    };
    let schedule = config.quantum_schedule()?;
    let cells = cells(config);
    let sink = match partial {
        Some(p) => {
            let mut f = fs::File::create(p)?;
            writeln!(f, "{}", CSV_COLUMNS.join(","))?;
            Some(Mutex::new(f))
        }
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let per_cell: Vec<Vec<MetricRow>> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let rows =
                    rows_for_cell(config, layout.as_ref(), schedule.as_ref(), &schemes, cell)?;
                if let Some(sink) = &sink {
                    let mut buf = Vec::new();
                    {
                        let mut w = csv::WriterBuilder::new()
                            .has_headers(false)
                            .from_writer(&mut buf);
                        for r in &rows {
                            w.write_record(r.to_record())?;
                        }
                        w.flush()?;
                    }
                    let mut f = sink.lock().expect("partial sink");
                    f.write_all(&buf)?;
                    f.flush()?;
                }
                Ok(rows)
            })
            .collect::<Result<_>>()
    })?;
    Ok(per_cell.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(0.1), "0.10000000000000001");
        assert_eq!(fmt_f64(2.0), "2");
        assert_eq!(fmt_f64(1234.5), "1234.5");
        assert_eq!(fmt_f64(1e-7), "9.9999999999999995e-8");
        assert_eq!(fmt_f64(1e20), "1e20");
        assert_eq!(fmt_f64(-0.25), "-0.25");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        for x in [0.1, 1.0 / 3.0, 6.02e23, 1e-300, 123456789.123] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    fn small() -> BenchConfig {
        BenchConfig::from_json(
            r#"{"generator": "native", "sizes": [12], "rhos": [0.5, 1.0], "replicates": 2,
                "master_seed": 7, "schemes": ["unweighted", "degree_centrality"]}"#,
        )
        .unwrap()
    }

    #[test]
    fn rows_are_ordered_and_paired() {
        let c = small();
        let rows = run_benchmark(&c, 2, None).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[0].scheme, "unweighted");
        assert_eq!(rows[1].scheme, "degree_centrality");
        assert_eq!(rows[0].seed, rows[1].seed);
        assert_eq!(rows[0].edges, rows[1].edges);
        assert!(rows.iter().all(|r| r.optimal == Some(true)));
    }

    #[test]
    fn config_rejections() {
        assert!(
            BenchConfig::from_json(r#"{"generator": "nope", "sizes": [5], "rhos": [0.5]}"#)
                .is_err()
        );
        assert!(BenchConfig::from_json(
            r#"{"generator": "box", "sizes": [5], "rhos": [0.5], "schemes": ["odd"]}"#
        )
        .is_err());
        assert!(BenchConfig::from_json(r#"{"generator": "kings"}"#).is_err());
        assert!(BenchConfig::from_json(
            r#"{"generator": "box", "sizes": [5], "rhos": [0.5], "typo": 1}"#
        )
        .is_err());
    }

    #[test]
    fn failed_weighting_is_recorded() {
        // closeness is undefined on disconnected instances
        let c = BenchConfig::from_json(
            r#"{"generator": "box", "sizes": [6], "rhos": [0.05], "schemes": ["closeness"]}"#,
        )
        .unwrap();
        let rows = run_benchmark(&c, 1, None).unwrap();
        assert!(rows[0].note.starts_with("weighting failed"));
        assert_eq!(rows[0].ticks, None);
    }
}
