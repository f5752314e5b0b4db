//! Incremental (PIL) training and the single-phase standard baseline.
//!
//! A PIL run trains a small random base subgraph first, then grows it one
//! node at a time until it is the target graph. Every phase starts from the
//! previous phase's optimized angles. Phases strictly between the base and
//! the target may stop early once the best sampled cut at the current
//! iterate reaches the best of `k` random partitions of the phase graph.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bench::approximation_ratio;
use crate::cobyla::{CobylaSettings, HookAction, Termination};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::oracle::{max_cut_bruteforce, random_partition_max, Assignment};
use crate::qaoa::{OptimResult, ParamVector, QaoaProblem};
use crate::rng::{derive_seed, stream, Rng};

/// Attempts at drawing a base subset that induces at least one edge.
pub const BASE_RESAMPLE_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Pil,
    Standard,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Pil => "pil",
            Method::Standard => "standard",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pil" => Ok(Method::Pil),
            "standard" => Ok(Method::Standard),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

/// Quantity compared against the random-partition bar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BreakMetric {
    /// Best cut among `shots` samples of the current state.
    #[default]
    Sampled,
    /// `<C>` at the current parameters.
    Expectation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub p: usize,
    pub base_size: usize,
    /// Nodes added per incremental phase.
    pub phase_stride: usize,
    /// Random partitions behind the early-break bar.
    pub k: usize,
    /// Shots per sampled cut.
    pub shots: usize,
    pub optimizer: CobylaSettings,
    pub break_metric: BreakMetric,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            p: 3,
            base_size: 4,
            phase_stride: 1,
            k: 20,
            shots: 1024,
            optimizer: CobylaSettings::default(),
            break_metric: BreakMetric::Sampled,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::Config("p must be >= 1".into()));
        }
        if self.base_size < 2 {
            return Err(Error::Config("base_size must be >= 2".into()));
        }
        if self.phase_stride == 0 {
            return Err(Error::Config("phase_stride must be >= 1".into()));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be >= 1".into()));
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be >= 1".into()));
        }
        self.optimizer.validate()
    }
}

/// The chain of node subsets a PIL run trains on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSchedule {
    pub target: Graph,
    /// A permutation of the target's nodes; phase `t` trains on a prefix.
    pub node_order: Vec<usize>,
    pub base_size: usize,
    pub phases: Vec<Vec<usize>>,
}

impl PhaseSchedule {
    /// Induced subgraph of phase `t`, relabeled in node order, with its map
    /// back to target labels.
    pub fn phase_graph(&self, t: usize) -> Result<(Graph, Vec<usize>)> {
        let nodes = self
            .phases
            .get(t)
            .ok_or_else(|| Error::Argument(format!("no phase {t}")))?;
        self.target.induced_subgraph(nodes)
    }

    fn single(target: &Graph) -> Self {
        let all: Vec<usize> = (0..target.n()).collect();
        PhaseSchedule {
            target: target.clone(),
            node_order: all.clone(),
            base_size: target.n(),
            phases: vec![all],
        }
    }
}

/// One-node-per-phase schedule.
pub fn build_schedule(g: &Graph, base_size: usize, seed: u64) -> Result<PhaseSchedule> {
    build_schedule_with_stride(g, base_size, 1, seed)
}

/// Random node order whose first `base_size` nodes induce at least one edge
/// (when the graph has any), then prefixes growing by `stride` nodes.
pub fn build_schedule_with_stride(
    g: &Graph,
    base_size: usize,
    stride: usize,
    seed: u64,
) -> Result<PhaseSchedule> {
    if base_size < 2 || base_size > g.n() {
        return Err(Error::Argument(format!(
            "base_size {base_size} outside 2..={}",
            g.n()
        )));
    }
    if stride == 0 {
        return Err(Error::Argument("phase stride must be >= 1".into()));
    }
    let mut rng = Rng::new(seed);
    let mut order: Vec<usize> = (0..g.n()).collect();
    rng.shuffle(&mut order);
    if !g.edges().is_empty() {
        let has_edge = |order: &[usize]| {
            let base = &order[..base_size];
            g.edges()
                .iter()
                .any(|e| base.contains(&e.u) && base.contains(&e.v))
        };
        let mut attempts = 1;
        while !has_edge(&order) && attempts < BASE_RESAMPLE_LIMIT {
            rng.shuffle(&mut order);
            attempts += 1;
        }
        if !has_edge(&order) {
            let e = g.edges()[rng.below(g.edges().len() as u64) as usize];
            let mut rest: Vec<usize> = (0..g.n()).filter(|&v| v != e.u && v != e.v).collect();
            rng.shuffle(&mut rest);
            order = [e.u, e.v].into_iter().chain(rest).collect();
        }
    }
    let mut phases = Vec::new();
    let mut size = base_size;
    loop {
        phases.push(order[..size].to_vec());
        if size == g.n() {
            break;
        }
        size = (size + stride).min(g.n());
    }
    Ok(PhaseSchedule {
        target: g.clone(),
        node_order: order,
        base_size,
        phases,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakDecision {
    pub stop: bool,
    /// The compared value at the current parameters (best sampled cut, or
    /// `<C>` under [`BreakMetric::Expectation`]).
    pub best_cut: f64,
    pub random_bar: f64,
    pub witness: Option<Assignment>,
}

/// The early-break comparison for one phase graph; the random bar is drawn
/// once on construction.
pub struct EarlyBreak<'a> {
    problem: &'a QaoaProblem,
    random_bar: f64,
    shots: usize,
    metric: BreakMetric,
}

impl<'a> EarlyBreak<'a> {
    pub fn new(problem: &'a QaoaProblem, k: usize, shots: usize, metric: BreakMetric, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::Argument("shot count must be >= 1".into()));
        }
        Ok(EarlyBreak {
            random_bar: random_partition_max(problem.graph(), k, derive_seed(seed, &[stream::RANDOM_BAR]))?,
            problem,
            shots,
            metric,
        })
    }

    pub fn random_bar(&self) -> f64 {
        self.random_bar
    }

    /// Stop iff the current value is at least the bar (exact comparison).
    pub fn check(&self, params: &ParamVector, shot_seed: u64) -> Result<BreakDecision> {
        let (best_cut, witness) = match self.metric {
            BreakMetric::Sampled => {
                let s = self.problem.best_sampled_cut(params, self.shots, shot_seed)?;
                (s.value, Some(s.witness))
            }
            BreakMetric::Expectation => (self.problem.objective(params), None),
        };
        Ok(BreakDecision {
            stop: best_cut >= self.random_bar,
            best_cut,
            random_bar: self.random_bar,
            witness,
        })
    }
}

/// Single early-break evaluation: bar from `k` random partitions, compared
/// value from `m` shots at `params`.
pub fn early_break_check(
    phase_graph: &Graph,
    params: &ParamVector,
    k: usize,
    m: usize,
    seed: u64,
) -> Result<BreakDecision> {
    let problem = QaoaProblem::new(phase_graph)?;
    let eb = EarlyBreak::new(&problem, k, m, BreakMetric::Sampled, seed)?;
    eb.check(params, derive_seed(seed, &[stream::CHECK_SHOTS]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseResult {
    pub phase_index: usize,
    pub nodes: usize,
    pub graph_hash: String,
    pub init_params: ParamVector,
    pub final_params: ParamVector,
    /// `<C>` at `init_params`.
    pub init_objective: f64,
    /// `<C>` at `final_params`.
    pub objective: f64,
    /// Best sampled cut at `final_params`.
    pub best_cut: f64,
    /// Witness of `best_cut` in target labels (nodes outside the phase on side 0).
    pub best_witness: Option<Assignment>,
    pub random_bar: f64,
    pub early_break_enabled: bool,
    pub early_broken: bool,
    pub checks: usize,
    pub iterations: usize,
    pub evals: usize,
    pub termination: Termination,
    /// Seconds.
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub method: Method,
    pub config: TrainConfig,
    pub schedule: PhaseSchedule,
    pub phase_results: Vec<PhaseResult>,
    pub final_params: ParamVector,
    /// `<C>` of the final parameters on the target graph.
    pub objective: f64,
    /// Best sampled cut on the target graph.
    pub c_a: f64,
    pub witness: Assignment,
    pub c_star: f64,
    pub ar_sampled: f64,
    pub ar_expectation: f64,
    /// Set when `c_star = 0` and the ratios default to 1.
    pub zero_optimum: bool,
    /// Seconds from schedule construction to the end of the last phase.
    pub total_time: f64,
}

/// Timed part of one phase, before report-only values are filled in.
struct PhaseRun {
    graph: Graph,
    map: Vec<usize>,
    init: ParamVector,
    optim: OptimResult,
    bar: Option<f64>,
    last_check: Option<BreakDecision>,
    checks: usize,
    wall_time: f64,
}

fn run_phase(
    graph: Graph,
    map: Vec<usize>,
    init: &ParamVector,
    cfg: &TrainConfig,
    phase_seed: u64,
    early_break: bool,
) -> Result<PhaseRun> {
    let start = Instant::now();
    let problem = QaoaProblem::new(&graph)?;
    let mut checks = 0;
    let mut last_check = None;
    let mut hook_error = None;
    let (optim, bar) = if early_break {
        let eb = EarlyBreak::new(&problem, cfg.k, cfg.shots, cfg.break_metric, phase_seed)?;
        let optim = problem.optimize(init, &cfg.optimizer, |params| {
            let seed = derive_seed(phase_seed, &[stream::CHECK_SHOTS, checks as u64]);
            checks += 1;
            match eb.check(params, seed) {
                Ok(d) => {
                    last_check = Some(d);
                    if d.stop {
                        HookAction::Stop
                    } else {
                        HookAction::Continue
                    }
                }
                Err(e) => {
                    hook_error = Some(e);
                    HookAction::Stop
                }
            }
        })?;
        (optim, Some(eb.random_bar()))
    } else {
        (problem.optimize(init, &cfg.optimizer, |_| HookAction::Continue)?, None)
    };
    if let Some(e) = hook_error {
        return Err(e);
    }
    Ok(PhaseRun {
        graph,
        map,
        init: init.clone(),
        optim,
        bar,
        last_check,
        checks,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Fills in the report-only values of a finished phase (not timed).
fn finish_phase(run: PhaseRun, index: usize, cfg: &TrainConfig, phase_seed: u64, target_n: usize) -> Result<PhaseResult> {
    let problem = QaoaProblem::new(&run.graph)?;
    let random_bar = match run.bar {
        Some(b) => b,
        None => random_partition_max(&run.graph, cfg.k, derive_seed(phase_seed, &[stream::RANDOM_BAR]))?,
    };
    // The last check ran on the last accepted iterate, which is the returned point.
    let (best_cut, witness) = match run.last_check {
        Some(d) if cfg.break_metric == BreakMetric::Sampled => (d.best_cut, d.witness),
        _ => {
            let s = problem.best_sampled_cut(
                &run.optim.params,
                cfg.shots,
                derive_seed(phase_seed, &[stream::FINAL_SHOTS]),
            )?;
            (s.value, Some(s.witness))
        }
    };
    let best_witness = witness.map(|w| w.relabel(&run.map, target_n)).transpose()?;
    Ok(PhaseResult {
        phase_index: index,
        nodes: run.graph.n(),
        graph_hash: run.graph.hash(),
        init_objective: problem.objective(&run.init),
        init_params: run.init,
        final_params: run.optim.params,
        objective: run.optim.objective,
        best_cut,
        best_witness,
        random_bar,
        early_break_enabled: run.bar.is_some(),
        early_broken: run.optim.early_broken,
        checks: run.checks,
        iterations: run.optim.iterations,
        evals: run.optim.evals,
        termination: run.optim.termination,
        wall_time: run.wall_time,
    })
}

fn assemble(
    method: Method,
    cfg: &TrainConfig,
    schedule: PhaseSchedule,
    phase_results: Vec<PhaseResult>,
    c_star: f64,
    total_time: f64,
) -> Result<TrainReport> {
    let target = QaoaProblem::new(&schedule.target)?;
    let final_params = phase_results
        .last()
        .expect("at least one phase")
        .final_params
        .clone();
    let objective = target.objective(&final_params);
    let sampled = target.best_sampled_cut(
        &final_params,
        cfg.shots,
        derive_seed(cfg.seed, &[stream::FINAL_SHOTS]),
    )?;
    let (ar_sampled, zero_optimum) = approximation_ratio(sampled.value, c_star)?;
    let (ar_expectation, _) = approximation_ratio(objective, c_star)?;
    Ok(TrainReport {
        method,
        config: cfg.clone(),
        schedule,
        phase_results,
        final_params,
        objective,
        c_a: sampled.value,
        witness: sampled.witness,
        c_star,
        ar_sampled,
        ar_expectation,
        zero_optimum,
        total_time,
    })
}

/// PIL training of `g`.
///
/// Phase 0 (the base graph) and the last phase (the target) run to
/// convergence; phases in between may break early. Each phase's initial
/// parameters are a copy of the previous phase's optimized parameters.
pub fn train_pil(g: &Graph, cfg: &TrainConfig) -> Result<TrainReport> {
    cfg.validate()?;
    let c_star = max_cut_bruteforce(g)?.c_star;
    let start = Instant::now();
    let schedule = build_schedule_with_stride(
        g,
        cfg.base_size.min(g.n()),
        cfg.phase_stride,
        derive_seed(cfg.seed, &[stream::SCHEDULE]),
    )?;
    let last = schedule.phases.len() - 1;
    let mut params = ParamVector::random(cfg.p, derive_seed(cfg.seed, &[stream::INIT_PARAMS]))?;
    let mut runs = Vec::with_capacity(schedule.phases.len());
    for t in 0..=last {
        let phase_seed = derive_seed(cfg.seed, &[stream::PHASE, t as u64]);
        // The last phase covers every node; it trains on the target in its own
        // labels, which is the same graph up to relabeling.
        let phase_graph = if t == last {
            Ok((g.clone(), (0..g.n()).collect()))
        } else {
            schedule.phase_graph(t)
        };
        let outcome = phase_graph
            .and_then(|(graph, map)| run_phase(graph, map, &params, cfg, phase_seed, t > 0 && t < last));
        match outcome {
            Ok(run) => {
                params = run.optim.params.clone();
                runs.push(run);
            }
            Err(e) => {
                let completed = runs
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let seed = derive_seed(cfg.seed, &[stream::PHASE, i as u64]);
                        finish_phase(r, i, cfg, seed, g.n())
                    })
                    .collect::<Result<Vec<_>>>()?;
                return Err(Error::PhaseFailed {
                    phase: t,
                    source: Box::new(e),
                    completed,
                });
            }
        }
    }
    let total_time = start.elapsed().as_secs_f64();
    let phase_results = runs
        .into_iter()
        .enumerate()
        .map(|(t, r)| finish_phase(r, t, cfg, derive_seed(cfg.seed, &[stream::PHASE, t as u64]), g.n()))
        .collect::<Result<Vec<_>>>()?;
    assemble(Method::Pil, cfg, schedule, phase_results, c_star, total_time)
}

/// Standard QAOA: one optimization of the whole graph from a seeded random
/// start.
pub fn train_standard(g: &Graph, cfg: &TrainConfig) -> Result<TrainReport> {
    cfg.validate()?;
    let c_star = max_cut_bruteforce(g)?.c_star;
    let start = Instant::now();
    let schedule = PhaseSchedule::single(g);
    let init = ParamVector::random(cfg.p, derive_seed(cfg.seed, &[stream::INIT_PARAMS]))?;
    let phase_seed = derive_seed(cfg.seed, &[stream::PHASE, 0]);
    let map: Vec<usize> = (0..g.n()).collect();
    let run = run_phase(g.clone(), map, &init, cfg, phase_seed, false)?;
    let total_time = start.elapsed().as_secs_f64();
    let phase = finish_phase(run, 0, cfg, phase_seed, g.n())?;
    assemble(Method::Standard, cfg, schedule, vec![phase], c_star, total_time)
}

pub fn train(method: Method, g: &Graph, cfg: &TrainConfig) -> Result<TrainReport> {
    match method {
        Method::Pil => train_pil(g, cfg),
        Method::Standard => train_standard(g, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle, generate_complete, generate_random, generate_regular};

    fn quick() -> TrainConfig {
        TrainConfig {
            seed: 11,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn schedule_phase_counts() {
        let g = generate_random(10, 0.5, false, 1).unwrap();
        let s = build_schedule(&g, 4, 3).unwrap();
        assert_eq!(s.phases.len(), 7);
        for (t, phase) in s.phases.iter().enumerate() {
            assert_eq!(phase.len(), 4 + t);
            assert_eq!(phase[..], s.node_order[..4 + t]);
        }
        let g4 = generate_complete(4, false, 0).unwrap();
        assert_eq!(build_schedule(&g4, 4, 3).unwrap().phases.len(), 1);
    }

    #[test]
    fn schedule_base_has_an_edge() {
        // A sparse graph where most 4-subsets are edgeless.
        let g = Graph::unweighted(10, &[(2, 7)]).unwrap();
        for seed in 0..30 {
            let s = build_schedule(&g, 4, seed).unwrap();
            let (base, _) = s.phase_graph(0).unwrap();
            assert_eq!(base.edges().len(), 1, "seed {seed}");
        }
    }

    #[test]
    fn schedule_on_edgeless_graph() {
        let g = Graph::new(6, false, vec![]).unwrap();
        let s = build_schedule(&g, 4, 1).unwrap();
        assert_eq!(s.phases.len(), 3);
    }

    #[test]
    fn schedule_rejects_bad_base_size() {
        let g = cycle(5).unwrap();
        assert!(matches!(build_schedule(&g, 1, 0), Err(Error::Argument(_))));
        assert!(matches!(build_schedule(&g, 6, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn schedule_with_stride() {
        let g = cycle(9).unwrap();
        let s = build_schedule_with_stride(&g, 4, 2, 5).unwrap();
        let sizes: Vec<usize> = s.phases.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![4, 6, 8, 9]);
    }

    #[test]
    fn early_break_examples() {
        let empty = Graph::new(4, false, vec![]).unwrap();
        let d = early_break_check(&empty, &ParamVector::zeros(1).unwrap(), 5, 16, 1).unwrap();
        assert!(d.stop);
        assert_eq!((d.best_cut, d.random_bar), (0.0, 0.0));

        // gamma = pi/2, beta = pi/8 is optimal on K2: every sample cuts the edge.
        let edge = Graph::unweighted(2, &[(0, 1)]).unwrap();
        let opt = ParamVector::new(vec![std::f64::consts::FRAC_PI_2], vec![std::f64::consts::FRAC_PI_8]).unwrap();
        for k in [1, 5, 100] {
            let d = early_break_check(&edge, &opt, k, 4, 9).unwrap();
            assert!(d.stop && d.best_cut == 1.0);
        }

        // Pinned from one seeded run: the sampled best on the triangle is its
        // optimum 2, which no random partition can beat.
        let tri = Graph::unweighted(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let d = early_break_check(&tri, &ParamVector::zeros(3).unwrap(), 20, 1024, 42).unwrap();
        assert!(d.stop);
        assert_eq!((d.best_cut, d.random_bar), (2.0, 2.0));
    }

    #[test]
    fn pil_reuses_parameters_exactly() {
        let g = generate_regular(8, 3, false, 4).unwrap();
        let r = train_pil(&g, &quick()).unwrap();
        assert_eq!(r.phase_results.len(), 5);
        for w in r.phase_results.windows(2) {
            assert_eq!(w[1].init_params, w[0].final_params);
        }
        assert!(!r.phase_results[0].early_break_enabled);
        assert!(!r.phase_results.last().unwrap().early_break_enabled);
        assert!(r.phase_results[1..4].iter().all(|p| p.early_break_enabled));
        for p in &r.phase_results {
            if p.early_broken {
                assert!(p.best_cut >= p.random_bar);
            }
            assert!(p.objective >= p.init_objective - 1e-9);
        }
        let phase_time: f64 = r.phase_results.iter().map(|p| p.wall_time).sum();
        assert!(r.total_time >= phase_time);
        assert!((0.0..=1.0).contains(&r.ar_sampled));
        assert!(r.ar_expectation <= 1.0);
        assert_eq!(r.final_params, r.phase_results.last().unwrap().final_params);
    }

    #[test]
    fn pil_phase_graphs_chain_to_target() {
        let g = generate_random(8, 0.5, true, 6).unwrap();
        let r = train_pil(&g, &quick()).unwrap();
        let s = &r.schedule;
        let last_t = s.phases.len() - 1;
        for (t, p) in r.phase_results[..last_t].iter().enumerate() {
            let (pg, _) = s.phase_graph(t).unwrap();
            assert_eq!(pg.hash(), p.graph_hash);
        }
        assert_eq!(r.phase_results[last_t].graph_hash, g.hash());
        let (last, map) = s.phase_graph(s.phases.len() - 1).unwrap();
        let mut relabeled: Vec<_> = last
            .edges()
            .iter()
            .map(|e| (map[e.u].min(map[e.v]), map[e.u].max(map[e.v]), e.w.to_bits()))
            .collect();
        relabeled.sort_unstable();
        let original: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.w.to_bits())).collect();
        assert_eq!(relabeled, original);
    }

    #[test]
    fn c5_reaches_optimum() {
        // Pinned from one seeded run against the exact optimum 4.
        let r = train_pil(&cycle(5).unwrap(), &quick()).unwrap();
        assert_eq!(r.c_star, 4.0);
        assert_eq!(r.ar_sampled, 1.0);
    }

    #[test]
    fn degenerate_schedule_matches_standard_shape() {
        let g = generate_complete(4, true, 2).unwrap();
        let pil = train_pil(&g, &quick()).unwrap();
        let std = train_standard(&g, &quick()).unwrap();
        assert_eq!(pil.phase_results.len(), 1);
        assert_eq!(std.phase_results.len(), 1);
        assert!(!pil.phase_results[0].early_broken);
        assert_eq!(pil.phase_results[0].init_params, std.phase_results[0].init_params);
        assert_eq!(pil.final_params, std.final_params);
        assert_eq!(pil.c_a, std.c_a);
    }

    #[test]
    fn standard_examples() {
        let edge = Graph::unweighted(2, &[(0, 1)]).unwrap();
        let cfg = TrainConfig { p: 1, ..quick() };
        let r = train_standard(&edge, &cfg).unwrap();
        assert_eq!(r.phase_results.len(), 1);
        assert!(!r.phase_results[0].early_broken);
        assert_eq!(r.ar_sampled, 1.0);

        let empty = Graph::new(5, false, vec![]).unwrap();
        let r = train_standard(&empty, &quick()).unwrap();
        assert_eq!(r.c_a, 0.0);
        assert_eq!(r.ar_sampled, 1.0);
        assert!(r.zero_optimum);
    }

    #[test]
    fn expectation_break_metric() {
        let g = generate_random(7, 0.6, false, 8).unwrap();
        let cfg = TrainConfig {
            break_metric: BreakMetric::Expectation,
            ..quick()
        };
        let r = train_pil(&g, &cfg).unwrap();
        for p in &r.phase_results {
            if p.early_broken {
                assert!(p.objective >= p.random_bar);
            }
        }
    }

    #[test]
    fn training_is_deterministic() {
        let g = generate_random(7, 0.6, true, 21).unwrap();
        let a = train_pil(&g, &quick()).unwrap();
        let b = train_pil(&g, &quick()).unwrap();
        assert_eq!(a.final_params, b.final_params);
        assert_eq!(a.c_a, b.c_a);
        assert_eq!(a.schedule, b.schedule);
    }

    #[test]
    fn config_validation() {
        let g = cycle(5).unwrap();
        for bad in [
            TrainConfig { p: 0, ..quick() },
            TrainConfig { k: 0, ..quick() },
            TrainConfig { shots: 0, ..quick() },
            TrainConfig { base_size: 1, ..quick() },
        ] {
            assert!(matches!(train_pil(&g, &bad), Err(Error::Config(_))));
        }
    }
}
