//! Experiment harness: dataset generation, repeated PIL/standard runs with
//! max/avg aggregation, forgetting evaluation and `p` sweeps.
//!
//! Every run draws its seed from the master seed and its (instance, repeat)
//! position, never from scheduling order, so the worker count changes only
//! the timing columns of the output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cobyla::CobylaSettings;
use crate::error::{Error, Result};
use crate::graph::{DatasetSpec, Family, Graph};
use crate::oracle::{max_cut_bruteforce, Assignment};
use crate::qaoa::QaoaProblem;
use crate::rng::{derive_seed, stream};
use crate::trainer::{train, BreakMetric, Method, TrainConfig, TrainReport};

/// JSON keys holding wall-clock measurements.
pub const TIMING_KEYS: [&str; 4] = ["wall_time", "total_time", "time_avg_s", "time_s"];

/// `c_a / c_star`, with `(1.0, true)` when `c_star = 0`.
pub fn approximation_ratio(c_a: f64, c_star: f64) -> Result<(f64, bool)> {
    if c_star < 0.0 || c_star.is_nan() {
        return Err(Error::Argument(format!("optimum {c_star} is negative")));
    }
    if c_star == 0.0 {
        Ok((1.0, true))
    } else {
        Ok((c_a / c_star, false))
    }
}

// ---------------------------------------------------------------------------
// Dataset generation

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomCells {
    pub n: Vec<usize>,
    pub ep: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularCells {
    pub d: usize,
    pub n: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompleteCells {
    pub n: Vec<usize>,
}

/// Which dataset cells to generate. Families left out are not generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetGrid {
    pub seed: u64,
    pub weighted: Vec<bool>,
    #[serde(default)]
    pub random: Option<RandomCells>,
    #[serde(default)]
    pub regular: Vec<RegularCells>,
    #[serde(default)]
    pub complete: Option<CompleteCells>,
}

impl DatasetGrid {
    /// The full benchmark grid: random n = 5..10 with ep in
    /// {0.2, 0.4, 0.6, 0.8}; regular d = 2 and d = 4 at n = 5..10, d = 3 at
    /// n in {6, 8, 10}; complete n = 5..10; all unweighted and weighted.
    pub fn sandbox(seed: u64) -> Self {
        let sizes: Vec<usize> = (5..=10).collect();
        DatasetGrid {
            seed,
            weighted: vec![false, true],
            random: Some(RandomCells {
                n: sizes.clone(),
                ep: vec![0.2, 0.4, 0.6, 0.8],
            }),
            regular: vec![
                RegularCells { d: 2, n: sizes.clone() },
                RegularCells { d: 3, n: vec![6, 8, 10] },
                RegularCells { d: 4, n: sizes.clone() },
            ],
            complete: Some(CompleteCells { n: sizes }),
        }
    }

    /// All cells in generation order, each with its derived seed.
    pub fn cells(&self) -> Vec<DatasetSpec> {
        let mut families = Vec::new();
        if let Some(r) = &self.random {
            for &n in &r.n {
                for &ep in &r.ep {
                    families.push((Family::Random { ep }, n));
                }
            }
        }
        for r in &self.regular {
            families.extend(r.n.iter().map(|&n| (Family::Regular { d: r.d }, n)));
        }
        if let Some(c) = &self.complete {
            families.extend(c.n.iter().map(|&n| (Family::Complete, n)));
        }
        let mut cells = Vec::new();
        for &weighted in &self.weighted {
            for &(family, n) in &families {
                let mut spec = DatasetSpec {
                    family,
                    n,
                    weighted,
                    seed: 0,
                };
                spec.seed = cell_seed(self.seed, &spec.id());
                cells.push(spec);
            }
        }
        cells
    }
}

/// Seed of a dataset cell: depends on the master seed and the cell id only.
fn cell_seed(master: u64, id: &str) -> u64 {
    let digest = Sha256::digest(id.as_bytes());
    let tag = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
    derive_seed(master, &[stream::DATASET, tag])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    /// Graph file, relative to the manifest.
    pub file: String,
    pub spec: DatasetSpec,
    pub graph_hash: String,
    pub edges: usize,
    pub c_star: f64,
    pub witness: Assignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub id: String,
    pub spec: DatasetSpec,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub rng: String,
    pub graph_format: String,
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
    pub skipped: Vec<SkippedCell>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

const RNG_DESCRIPTION: &str = "ChaCha8 (rand_chacha ChaCha8Rng, SeedableRng::seed_from_u64); \
uniform = (next_u64 >> 11) * 2^-53; weights = 1 - uniform; cell seed = SplitMix64 chain of \
(master, 8, first 8 little-endian bytes of SHA-256(cell id))";

const GRAPH_FORMAT: &str = "header `n <count> weighted <0|1>`, then one `u v w` line per edge, \
u < v, w in shortest round-trip decimal";

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Generates every cell of `grid` into `out_dir` plus a manifest with the
/// exact optimum of each graph. Invalid cells are reported on stderr and
/// listed under `skipped`.
pub fn gen_dataset(grid: &DatasetGrid, out_dir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for spec in grid.cells() {
        let id = spec.id();
        match spec.generate() {
            Ok(g) => {
                let file = format!("{id}.graph");
                g.write(&out_dir.join(&file))?;
                let oracle = max_cut_bruteforce(&g)?;
                entries.push(ManifestEntry {
                    id,
                    file,
                    spec,
                    graph_hash: g.hash(),
                    edges: g.edges().len(),
                    c_star: oracle.c_star,
                    witness: oracle.witness,
                });
            }
            Err(e @ (Error::Config(_) | Error::Generation(_))) => {
                eprintln!("warning: skipping {id}: {e}");
                skipped.push(SkippedCell {
                    id,
                    spec,
                    reason: e.to_string(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    let manifest = Manifest {
        rng: RNG_DESCRIPTION.into(),
        graph_format: GRAPH_FORMAT.into(),
        seed: grid.seed,
        entries,
        skipped,
    };
    write_json(&out_dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Experiment configuration

/// A benchmark instance: generated from a spec or read from a graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    Spec(DatasetSpec),
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForgettingConfig {
    /// Nodes of the old graph.
    pub old_size: usize,
    /// Sizes of the grown graphs whose parameters are replayed on the old one.
    pub new_sizes: Vec<usize>,
}

impl Default for ForgettingConfig {
    fn default() -> Self {
        ForgettingConfig {
            old_size: 4,
            new_sizes: vec![6, 8, 10],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceSource>,
    /// Dataset manifest whose entries are appended to `instances`.
    pub manifest: Option<PathBuf>,
    pub methods: Vec<Method>,
    pub p: usize,
    pub p_list: Vec<usize>,
    pub repeats: usize,
    pub k: usize,
    pub shots: usize,
    pub base_size: usize,
    pub phase_stride: usize,
    pub break_metric: BreakMetric,
    pub optimizer: CobylaSettings,
    /// Master seed.
    pub seed: u64,
    /// Parallel runs; 0 means one per available core.
    pub workers: usize,
    pub out: PathBuf,
    pub forgetting: ForgettingConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        ExperimentConfig {
            instances: Vec::new(),
            manifest: None,
            methods: vec![Method::Pil, Method::Standard],
            p: train.p,
            p_list: vec![1, 2, 3, 4, 5],
            repeats: 10,
            k: train.k,
            shots: train.shots,
            base_size: train.base_size,
            phase_stride: train.phase_stride,
            break_metric: train.break_metric,
            optimizer: train.optimizer,
            seed: 0,
            workers: 0,
            out: PathBuf::from("results"),
            forgetting: ForgettingConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
        // Relative paths inside the config are relative to the config file.
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(m) = &mut cfg.manifest {
            if m.is_relative() {
                *m = base.join(&*m);
            }
        }
        for inst in &mut cfg.instances {
            if let InstanceSource::File { path } = inst {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        self.train_config(self.p, 0).validate()
    }

    /// Training settings for one run.
    pub fn train_config(&self, p: usize, seed: u64) -> TrainConfig {
        TrainConfig {
            p,
            base_size: self.base_size,
            phase_stride: self.phase_stride,
            k: self.k,
            shots: self.shots,
            optimizer: self.optimizer,
            break_metric: self.break_metric,
            seed,
        }
    }

    /// Resolves `instances` and `manifest` into graphs with their optima.
    pub fn load_instances(&self) -> Result<Vec<Instance>> {
        let mut out = Vec::new();
        for src in &self.instances {
            out.push(match src {
                InstanceSource::Spec(spec) => Instance::from_spec(*spec)?,
                InstanceSource::File { path } => Instance::from_file(path)?,
            });
        }
        if let Some(path) = &self.manifest {
            let manifest = Manifest::read(path)?;
            let dir = path.parent().unwrap_or(Path::new(""));
            for e in manifest.entries {
                let graph = Graph::read(&dir.join(&e.file))?;
                if graph.hash() != e.graph_hash {
                    return Err(Error::Config(format!(
                        "graph file {} does not match its manifest hash",
                        e.file
                    )));
                }
                out.push(Instance {
                    id: e.id,
                    family: e.spec.family_name().into(),
                    ep_or_d: e.spec.ep_or_d(),
                    weighted: graph.weighted(),
                    c_star: e.c_star,
                    graph,
                });
            }
        }
        if out.is_empty() {
            return Err(Error::Config("no instances configured".into()));
        }
        Ok(out)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: String,
    pub family: String,
    pub ep_or_d: String,
    pub weighted: bool,
    pub graph: Graph,
    pub c_star: f64,
}

impl Instance {
    pub fn from_spec(spec: DatasetSpec) -> Result<Self> {
        let graph = spec.generate()?;
        Ok(Instance {
            id: spec.id(),
            family: spec.family_name().into(),
            ep_or_d: spec.ep_or_d(),
            weighted: spec.weighted,
            c_star: max_cut_bruteforce(&graph)?.c_star,
            graph,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let graph = Graph::read(path)?;
        Ok(Instance {
            id: path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            family: "file".into(),
            ep_or_d: String::new(),
            weighted: graph.weighted(),
            c_star: max_cut_bruteforce(&graph)?.c_star,
            graph,
        })
    }
}

// ---------------------------------------------------------------------------
// Benchmark

/// One CSV summary row: max/avg over the repeats of one instance and method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub instance: String,
    pub family: String,
    pub n: usize,
    pub ep_or_d: String,
    pub weighted: u8,
    pub method: Method,
    pub p: usize,
    pub ar_max: Option<f64>,
    pub ar_avg: Option<f64>,
    pub time_avg_s: Option<f64>,
    pub flags: String,
}

/// One training run in the JSON detail file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub method: Method,
    pub p: usize,
    pub repeat: usize,
    pub seed: u64,
    pub report: Option<TrainReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResults {
    pub master_seed: u64,
    pub rows: Vec<MetricsRow>,
    pub runs: Vec<RunRecord>,
}

impl BenchResults {
    pub fn failed(&self) -> usize {
        self.runs.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Seed of repeat `repeat` on instance `index`; shared by all methods so the
/// methods are compared from the same starting angles.
pub fn run_seed(master: u64, index: usize, repeat: usize) -> u64 {
    derive_seed(master, &[stream::RUN, index as u64, repeat as u64])
}

fn aggregate(inst: &Instance, method: Method, p: usize, runs: &[RunRecord]) -> MetricsRow {
    let reports: Vec<&TrainReport> = runs.iter().filter_map(|r| r.report.as_ref()).collect();
    let failed = runs.len() - reports.len();
    let ars: Vec<f64> = reports.iter().map(|r| r.ar_sampled).collect();
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    let times: Vec<f64> = reports.iter().map(|r| r.total_time).collect();
    let mut flags = Vec::new();
    if reports.iter().any(|r| r.zero_optimum) {
        flags.push("zero_optimum".to_string());
    }
    if failed > 0 {
        flags.push(format!("failed={failed}"));
    }
    MetricsRow {
        instance: inst.id.clone(),
        family: inst.family.clone(),
        n: inst.graph.n(),
        ep_or_d: inst.ep_or_d.clone(),
        weighted: u8::from(inst.weighted),
        method,
        p,
        ar_max: ars.iter().copied().reduce(f64::max),
        ar_avg: mean(&ars),
        time_avg_s: mean(&times),
        flags: flags.join(";"),
    }
}

fn bench_for_p(cfg: &ExperimentConfig, instances: &[Instance], p: usize, pool: &rayon::ThreadPool) -> (Vec<MetricsRow>, Vec<RunRecord>) {
    let mut jobs = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        for &method in &cfg.methods {
            for repeat in 0..cfg.repeats {
                jobs.push((i, inst, method, repeat));
            }
        }
    }
    let runs: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, inst, method, repeat)| {
                let seed = run_seed(cfg.seed, i, repeat);
                let outcome = train(method, &inst.graph, &cfg.train_config(p, seed));
                let (report, error) = match outcome {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                RunRecord {
                    instance: inst.id.clone(),
                    method,
                    p,
                    repeat,
                    seed,
                    report,
                    error,
                }
            })
            .collect()
    });
    let rows = runs
        .chunks(cfg.repeats)
        .zip(jobs.chunks(cfg.repeats))
        .map(|(chunk, job)| aggregate(job[0].1, job[0].2, p, chunk))
        .collect();
    (rows, runs)
}

/// Runs every instance and method `repeats` times at `cfg.p`.
pub fn run_benchmark(cfg: &ExperimentConfig) -> Result<BenchResults> {
    cfg.validate()?;
    let instances = cfg.load_instances()?;
    let (rows, runs) = bench_for_p(cfg, &instances, cfg.p, &cfg.pool()?);
    Ok(BenchResults {
        master_seed: cfg.seed,
        rows,
        runs,
    })
}

/// The benchmark once per entry of `cfg.p_list`, rows in list order.
pub fn run_p_sweep(cfg: &ExperimentConfig) -> Result<BenchResults> {
    cfg.validate()?;
    if cfg.p_list.is_empty() {
        return Err(Error::Config("p_list is empty".into()));
    }
    if cfg.p_list.contains(&0) {
        return Err(Error::Config("p_list entries must be >= 1".into()));
    }
    let instances = cfg.load_instances()?;
    let pool = cfg.pool()?;
    let mut results = BenchResults {
        master_seed: cfg.seed,
        rows: Vec::new(),
        runs: Vec::new(),
    };
    for &p in &cfg.p_list {
        let (rows, runs) = bench_for_p(cfg, &instances, p, &pool);
        results.rows.extend(rows);
        results.runs.extend(runs);
    }
    Ok(results)
}

// ---------------------------------------------------------------------------
// Forgetting

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgettingRow {
    pub instance: String,
    pub method: Method,
    pub p: usize,
    pub old_n: usize,
    pub new_n: usize,
    /// AR of the old graph's own training (the reference column).
    pub ar_old_trained_max: Option<f64>,
    pub ar_old_trained_avg: Option<f64>,
    /// AR on the old graph using the new graph's final parameters.
    pub ar_forgetting_max: Option<f64>,
    pub ar_forgetting_avg: Option<f64>,
    /// AR of the new graph's own training.
    pub ar_new_trained_avg: Option<f64>,
    pub flags: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgettingRecord {
    pub instance: String,
    pub method: Method,
    pub repeat: usize,
    pub seed: u64,
    pub old_n: usize,
    pub new_n: usize,
    /// `map[old label] = new label`.
    pub node_map: Vec<usize>,
    pub ar_old_trained: Option<f64>,
    pub ar_forgetting: Option<f64>,
    pub ar_new_trained: Option<f64>,
    pub replay_cut: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgettingResults {
    pub master_seed: u64,
    pub rows: Vec<ForgettingRow>,
    pub runs: Vec<ForgettingRecord>,
}

/// Old graph plus its grown versions, each with the map from old labels to
/// its own labels.
struct GrowthChain {
    old: Graph,
    old_c_star: f64,
    grown: Vec<(Graph, Vec<usize>)>,
}

fn growth_chain(inst: &Instance, fc: &ForgettingConfig) -> Result<GrowthChain> {
    let full = &inst.graph;
    let largest = fc.new_sizes.iter().copied().max().unwrap_or(fc.old_size);
    if fc.old_size < 2 || largest > full.n() {
        return Err(Error::Config(format!(
            "instance {} has {} nodes; forgetting needs 2 <= old_size ({}) and new sizes <= n (max {largest})",
            inst.id,
            full.n(),
            fc.old_size
        )));
    }
    let old_nodes: Vec<usize> = (0..fc.old_size).collect();
    let (old, _) = full.induced_subgraph(&old_nodes)?;
    let mut grown = Vec::new();
    for &size in &fc.new_sizes {
        if size < fc.old_size {
            return Err(Error::Config(format!(
                "new size {size} smaller than old size {}",
                fc.old_size
            )));
        }
        let (g, _) = full.induced_subgraph(&(0..size).collect::<Vec<_>>())?;
        // New graphs extend the old one, so old node i is new node i.
        let map = old_nodes.clone();
        let (check, _) = g.induced_subgraph(&map)?;
        if check != old {
            return Err(Error::Config(format!(
                "node map does not embed the old graph into the {size}-node graph"
            )));
        }
        grown.push((g, map));
    }
    let old_c_star = max_cut_bruteforce(&old)?.c_star;
    Ok(GrowthChain {
        old,
        old_c_star,
        grown,
    })
}

struct ForgettingRun {
    ar_old_trained: f64,
    per_size: Vec<Result<(f64, f64, f64)>>,
}

fn forgetting_run(chain: &GrowthChain, method: Method, tc: &TrainConfig) -> Result<ForgettingRun> {
    let old_problem = QaoaProblem::new(&chain.old)?;
    let reference = train(method, &chain.old, tc)?;
    let replay_seed = derive_seed(tc.seed, &[stream::FINAL_SHOTS]);
    let per_size = chain
        .grown
        .iter()
        .map(|(g, _)| {
            let report = train(method, g, tc)?;
            let replay = old_problem.best_sampled_cut(&report.final_params, tc.shots, replay_seed)?;
            let (ar, _) = approximation_ratio(replay.value, chain.old_c_star)?;
            Ok((ar, report.ar_sampled, replay.value))
        })
        .collect();
    Ok(ForgettingRun {
        ar_old_trained: reference.ar_sampled,
        per_size,
    })
}

/// For each instance, grows the first `old_size` nodes into the first
/// `new_sizes` nodes, trains each grown graph and replays its parameters on
/// the old graph.
pub fn run_forgetting(cfg: &ExperimentConfig) -> Result<ForgettingResults> {
    cfg.validate()?;
    let fc = &cfg.forgetting;
    if fc.new_sizes.is_empty() {
        return Err(Error::Config("forgetting.new_sizes is empty".into()));
    }
    let instances = cfg.load_instances()?;
    let chains = instances
        .iter()
        .map(|inst| growth_chain(inst, fc))
        .collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for i in 0..instances.len() {
        for &method in &cfg.methods {
            for repeat in 0..cfg.repeats {
                jobs.push((i, method, repeat));
            }
        }
    }
    let outcomes: Vec<(u64, Result<ForgettingRun>)> = cfg.pool()?.install(|| {
        jobs.par_iter()
            .map(|&(i, method, repeat)| {
                let seed = derive_seed(cfg.seed, &[stream::FORGETTING, i as u64, repeat as u64]);
                (seed, forgetting_run(&chains[i], method, &cfg.train_config(cfg.p, seed)))
            })
            .collect()
    });

    let mut runs = Vec::new();
    for (&(i, method, repeat), (seed, outcome)) in jobs.iter().zip(outcomes) {
        let chain = &chains[i];
        for (s, (g, map)) in chain.grown.iter().enumerate() {
            let mut rec = ForgettingRecord {
                instance: instances[i].id.clone(),
                method,
                repeat,
                seed,
                old_n: chain.old.n(),
                new_n: g.n(),
                node_map: map.clone(),
                ar_old_trained: None,
                ar_forgetting: None,
                ar_new_trained: None,
                replay_cut: None,
                error: None,
            };
            match &outcome {
                Ok(run) => {
                    rec.ar_old_trained = Some(run.ar_old_trained);
                    match &run.per_size[s] {
                        Ok((ar, ar_new, cut)) => {
                            rec.ar_forgetting = Some(*ar);
                            rec.ar_new_trained = Some(*ar_new);
                            rec.replay_cut = Some(*cut);
                        }
                        Err(e) => rec.error = Some(e.to_string()),
                    }
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            runs.push(rec);
        }
    }

    let mut groups: BTreeMap<(usize, usize, usize), Vec<&ForgettingRecord>> = BTreeMap::new();
    for (idx, rec) in runs.iter().enumerate() {
        let job = idx / fc.new_sizes.len();
        let (i, method, _) = jobs[job];
        let m = cfg.methods.iter().position(|&x| x == method).expect("configured method");
        groups.entry((i, m, idx % fc.new_sizes.len())).or_default().push(rec);
    }
    let rows = groups
        .into_iter()
        .map(|((i, m, s), recs)| {
            let pick = |f: fn(&ForgettingRecord) -> Option<f64>| recs.iter().filter_map(|r| f(r)).collect::<Vec<_>>();
            let old = pick(|r| r.ar_old_trained);
            let forget = pick(|r| r.ar_forgetting);
            let new = pick(|r| r.ar_new_trained);
            let failed = recs.iter().filter(|r| r.error.is_some()).count();
            ForgettingRow {
                instance: instances[i].id.clone(),
                method: cfg.methods[m],
                p: cfg.p,
                old_n: fc.old_size,
                new_n: fc.new_sizes[s],
                ar_old_trained_max: max_of(&old),
                ar_old_trained_avg: mean_of(&old),
                ar_forgetting_max: max_of(&forget),
                ar_forgetting_avg: mean_of(&forget),
                ar_new_trained_avg: mean_of(&new),
                flags: if failed > 0 { format!("failed={failed}") } else { String::new() },
            }
        })
        .collect();
    Ok(ForgettingResults {
        master_seed: cfg.seed,
        rows,
        runs,
    })
}

fn max_of(v: &[f64]) -> Option<f64> {
    v.iter().copied().reduce(f64::max)
}

fn mean_of(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

// ---------------------------------------------------------------------------
// Output

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `<stem>.csv` and `<stem>_detail.json` into `dir`.
pub fn write_bench(dir: &Path, stem: &str, results: &BenchResults) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_csv(&dir.join(format!("{stem}.csv")), &results.rows)?;
    write_json(&dir.join(format!("{stem}_detail.json")), results)
}

pub fn write_forgetting(dir: &Path, results: &ForgettingResults) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_csv(&dir.join("forgetting.csv"), &results.rows)?;
    write_json(&dir.join("forgetting_detail.json"), results)
}

/// Replaces every timing field with `null`, recursively, so outputs of two
/// runs can be compared byte for byte.
pub fn strip_timing(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map.iter_mut() {
                if TIMING_KEYS.contains(&k.as_str()) {
                    *v = serde_json::Value::Null;
                } else {
                    strip_timing(v);
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}
