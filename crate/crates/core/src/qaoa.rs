//! The standard `p`-layer MaxCut QAOA ansatz and its classical optimization.

use std::f64::consts::PI;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cobyla::{self, CobylaSettings, HookAction, Termination};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::oracle::Assignment;
use crate::rng::Rng;
use crate::statevector::{CutTable, StateVector};

/// The `2p` angles of the ansatz. Their number depends only on `p`, never on
/// the graph, which is what lets one phase's optimum seed the next phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ParamVector {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

#[derive(Deserialize)]
struct RawParams {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl TryFrom<RawParams> for ParamVector {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        ParamVector::new(raw.gammas, raw.betas)
    }
}

impl ParamVector {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::Argument(format!(
                "need p >= 1 gammas and betas, got {} and {}",
                gammas.len(),
                betas.len()
            )));
        }
        if let Some(bad) = gammas.iter().chain(&betas).find(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("non-finite angle {bad}")));
        }
        Ok(ParamVector { gammas, betas })
    }

    pub fn zeros(p: usize) -> Result<Self> {
        ParamVector::new(vec![0.0; p], vec![0.0; p])
    }

    /// Seeded uniform start: each `gamma` in `[0, 2pi)` then each `beta` in `[0, pi)`.
    pub fn random(p: usize, seed: u64) -> Result<Self> {
        let mut rng = Rng::new(seed);
        let gammas = (0..p).map(|_| 2.0 * PI * rng.uniform()).collect();
        let betas = (0..p).map(|_| PI * rng.uniform()).collect();
        ParamVector::new(gammas, betas)
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// `[gamma_1..gamma_p, beta_1..beta_p]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.len() % 2 != 0 {
            return Err(Error::Argument(format!("odd parameter count {}", flat.len())));
        }
        let (g, b) = flat.split_at(flat.len() / 2);
        ParamVector::new(g.to_vec(), b.to_vec())
    }
}

/// Best cut among sampled measurement outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledCut {
    pub value: f64,
    pub witness: Assignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimResult {
    pub params: ParamVector,
    /// Final `<C>` at `params`.
    pub objective: f64,
    pub iterations: usize,
    pub evals: usize,
    pub early_broken: bool,
    pub termination: Termination,
    /// Seconds.
    pub wall_time: f64,
}

/// A graph together with its cut table, ready for repeated circuit runs.
#[derive(Debug, Clone)]
pub struct QaoaProblem {
    graph: Graph,
    table: CutTable,
}

impl QaoaProblem {
    pub fn new(graph: &Graph) -> Result<Self> {
        Ok(QaoaProblem {
            table: CutTable::new(graph)?,
            graph: graph.clone(),
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn table(&self) -> &CutTable {
        &self.table
    }

    /// `|gamma, beta> = prod_l exp(-i beta_l X) exp(-i gamma_l C) |+>^n`.
    pub fn state(&self, params: &ParamVector) -> StateVector {
        let mut s = StateVector::plus(self.graph.n()).expect("size checked by CutTable");
        for (&gamma, &beta) in params.gammas().iter().zip(params.betas()) {
            s.apply_cost_phase(&self.table, gamma)
                .expect("table and state share n");
            s.apply_mixer(beta);
        }
        s
    }

    pub fn objective(&self, params: &ParamVector) -> f64 {
        self.state(params)
            .expectation(&self.table)
            .expect("table and state share n")
    }

    /// Samples `m` outcomes of the prepared state and keeps the best cut; the
    /// first sample attaining the maximum is the witness.
    pub fn best_sampled_cut(&self, params: &ParamVector, m: usize, seed: u64) -> Result<SampledCut> {
        let shots = self.state(params).sample(m, seed)?;
        let mut best = SampledCut {
            value: f64::NEG_INFINITY,
            witness: shots[0],
        };
        for z in shots {
            let c = self.table.get(z.bits());
            if c > best.value {
                best = SampledCut { value: c, witness: z };
            }
        }
        Ok(best)
    }

    /// Maximizes `<C>` from `init` by minimizing `-<C>`. `stop_hook` sees the
    /// initial point and every accepted iterate; a `Stop` ends the run with
    /// `early_broken = true` at that iterate.
    pub fn optimize<H>(&self, init: &ParamVector, cfg: &CobylaSettings, mut stop_hook: H) -> Result<OptimResult>
    where
        H: FnMut(&ParamVector) -> HookAction,
    {
        let start = Instant::now();
        let minimum = cobyla::minimize(
            |x| -self.objective(&ParamVector::from_flat(x).expect("even length")),
            &init.to_flat(),
            cfg,
            |x, _| stop_hook(&ParamVector::from_flat(x).expect("even length")),
        )
        .map_err(|e| match e {
            Error::Numerical { message, iterate } => Error::Numerical {
                message: format!("{message} on a {}-node graph", self.graph.n()),
                iterate,
            },
            other => other,
        })?;
        let wall_time = start.elapsed().as_secs_f64();
        Ok(OptimResult {
            params: ParamVector::from_flat(&minimum.x)?,
            objective: -minimum.f,
            iterations: minimum.iterations,
            evals: minimum.evals,
            early_broken: minimum.termination == Termination::Hook,
            termination: minimum.termination,
            wall_time,
        })
    }
}

/// `<C>` of the `p`-layer circuit on `g`.
pub fn evaluate_objective(g: &Graph, params: &ParamVector) -> Result<f64> {
    Ok(QaoaProblem::new(g)?.objective(params))
}

pub fn best_sampled_cut(g: &Graph, params: &ParamVector, m: usize, seed: u64) -> Result<SampledCut> {
    QaoaProblem::new(g)?.best_sampled_cut(params, m, seed)
}

pub fn optimize<H>(g: &Graph, init: &ParamVector, cfg: &CobylaSettings, stop_hook: H) -> Result<OptimResult>
where
    H: FnMut(&ParamVector) -> HookAction,
{
    QaoaProblem::new(g)?.optimize(init, cfg, stop_hook)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

    use super::*;
    use crate::graph::{cycle, generate_random};
    use crate::oracle::max_cut_bruteforce;

    fn triangle() -> Graph {
        Graph::unweighted(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn edge() -> Graph {
        Graph::unweighted(2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn param_vector_validation() {
        assert!(ParamVector::new(vec![], vec![]).is_err());
        assert!(ParamVector::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(ParamVector::new(vec![f64::NAN], vec![1.0]).is_err());
        let p = ParamVector::random(3, 8).unwrap();
        assert_eq!(ParamVector::from_flat(&p.to_flat()).unwrap(), p);
        assert!(p.gammas().iter().all(|g| (0.0..2.0 * PI).contains(g)));
        assert!(p.betas().iter().all(|b| (0.0..PI).contains(b)));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<ParamVector>(&json).unwrap(), p);
        assert!(serde_json::from_str::<ParamVector>(r#"{"gammas":[1],"betas":[]}"#).is_err());
    }

    #[test]
    fn zero_params_give_half_total_weight() {
        for p in 1..=4 {
            let v = evaluate_objective(&triangle(), &ParamVector::zeros(p).unwrap()).unwrap();
            assert!((v - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn single_edge_matches_matrix_oracle() {
        // Frozen from the explicit 4x4 matrix product in
        // tests/engine_oracles.rs: <C> = (1 + sin(4 beta) sin(gamma)) / 2
        // at gamma = pi/2, beta = pi/8 gives exactly 1.
        let params = ParamVector::new(vec![FRAC_PI_2], vec![FRAC_PI_8]).unwrap();
        let v = evaluate_objective(&edge(), &params).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn objective_bounded_by_optimum() {
        let g = generate_random(6, 0.6, true, 3).unwrap();
        let c_star = max_cut_bruteforce(&g).unwrap().c_star;
        for seed in 0..20 {
            let params = ParamVector::random(2, seed).unwrap();
            assert!(evaluate_objective(&g, &params).unwrap() <= c_star + 1e-12);
        }
    }

    #[test]
    fn sampled_cut_examples() {
        // gamma = pi/2, beta = pi/8 puts all weight on the two cut states of K2.
        let params = ParamVector::new(vec![FRAC_PI_2], vec![FRAC_PI_8]).unwrap();
        for seed in 0..5 {
            let best = best_sampled_cut(&edge(), &params, 3, seed).unwrap();
            assert_eq!(best.value, 1.0);
        }
        let zeros = ParamVector::zeros(1).unwrap();
        let best = best_sampled_cut(&triangle(), &zeros, 4096, 17).unwrap();
        assert_eq!(best.value, 2.0);
        assert!(matches!(
            best_sampled_cut(&triangle(), &zeros, 0, 1),
            Err(Error::Argument(_))
        ));
        let c5 = cycle(5).unwrap();
        for seed in 0..10 {
            let params = ParamVector::random(2, seed).unwrap();
            assert!(best_sampled_cut(&c5, &params, 64, seed).unwrap().value <= 4.0);
        }
    }

    #[test]
    fn optimize_single_edge() {
        let init = ParamVector::random(1, 4).unwrap();
        let r = optimize(&edge(), &init, &CobylaSettings::default(), |_| HookAction::Continue).unwrap();
        assert!(r.objective >= 0.95, "{r:?}");
        assert!(!r.early_broken);
        assert!((r.objective - evaluate_objective(&edge(), &r.params).unwrap()).abs() < 1e-9);
        assert!(r.wall_time >= 0.0);
    }

    #[test]
    fn optimize_stops_on_hook() {
        let init = ParamVector::random(3, 1).unwrap();
        let r = optimize(&cycle(5).unwrap(), &init, &CobylaSettings::default(), |_| HookAction::Stop).unwrap();
        assert!(r.early_broken);
        assert!(r.iterations <= 1);
        assert_eq!(r.params, init);
    }

    #[test]
    fn optimize_zero_edge_graph() {
        let g = Graph::new(3, false, vec![]).unwrap();
        let init = ParamVector::random(2, 2).unwrap();
        let r = optimize(&g, &init, &CobylaSettings::default(), |_| HookAction::Continue).unwrap();
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.termination, Termination::Converged);
        assert_eq!(r.params, init);
    }

    #[test]
    fn optimize_is_deterministic() {
        let g = generate_random(6, 0.5, true, 10).unwrap();
        let init = ParamVector::random(2, 6).unwrap();
        let cfg = CobylaSettings::default();
        let a = optimize(&g, &init, &cfg, |_| HookAction::Continue).unwrap();
        let b = optimize(&g, &init, &cfg, |_| HookAction::Continue).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        assert_eq!((a.iterations, a.evals), (b.iterations, b.evals));
    }
}
