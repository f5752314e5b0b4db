//! Cross-checks of the simulator and the exact solver against independent
//! reference implementations.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};

use num_complex::Complex64;
use proptest::prelude::*;

use pilqaoa::graph::{generate_complete, generate_random, generate_regular};
use pilqaoa::{cut_value, evaluate_objective, max_cut_bruteforce, Assignment, Graph, ParamVector, QaoaProblem};

type Matrix = Vec<Vec<Complex64>>;

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// Dense unitary of the mixer layer, built as a Kronecker product of
/// single-qubit rotations (qubit 0 is the least significant factor).
fn mixer_matrix(n: usize, beta: f64) -> Matrix {
    let (s, c) = beta.sin_cos();
    let rx = vec![
        vec![Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
        vec![Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
    ];
    let mut m = vec![vec![Complex64::new(1.0, 0.0)]];
    for _ in 0..n {
        m = kron(&rx, &m);
    }
    m
}

/// Cut value recomputed from the edge list with per-node side lookups.
fn naive_cut(g: &Graph, z: usize) -> f64 {
    g.edges()
        .iter()
        .filter(|e| (z >> e.u & 1) != (z >> e.v & 1))
        .map(|e| e.w)
        .sum()
}

/// `<C>` by dense matrix products on the state vector.
fn dense_expectation(g: &Graph, params: &ParamVector) -> f64 {
    let dim = 1 << g.n();
    let cuts: Vec<f64> = (0..dim).map(|z| naive_cut(g, z)).collect();
    let a = (dim as f64).sqrt().recip();
    let mut psi = vec![Complex64::new(a, 0.0); dim];
    for (&gamma, &beta) in params.gammas().iter().zip(params.betas()) {
        for (amp, &c) in psi.iter_mut().zip(&cuts) {
            *amp *= Complex64::new(0.0, -gamma * c).exp();
        }
        let m = mixer_matrix(g.n(), beta);
        psi = (0..dim)
            .map(|i| (0..dim).map(|j| m[i][j] * psi[j]).sum())
            .collect();
    }
    psi.iter().zip(&cuts).map(|(a, c)| a.norm_sqr() * c).sum()
}

fn edge() -> Graph {
    Graph::unweighted(2, &[(0, 1)]).unwrap()
}

#[test]
fn single_edge_closed_form() {
    let g = edge();
    for (gamma, beta) in [(FRAC_PI_2, FRAC_PI_8), (0.3, 0.2), (2.0, 1.3), (5.5, 2.9)] {
        let params = ParamVector::new(vec![gamma], vec![beta]).unwrap();
        let expected = (1.0 + (4.0 * beta).sin() * gamma.sin()) / 2.0;
        let dense = dense_expectation(&g, &params);
        let sim = evaluate_objective(&g, &params).unwrap();
        assert!((dense - expected).abs() < 1e-12, "{dense} vs {expected}");
        assert!((sim - expected).abs() < 1e-12, "{sim} vs {expected}");
    }
    let best = evaluate_objective(&g, &ParamVector::new(vec![FRAC_PI_2], vec![FRAC_PI_8]).unwrap()).unwrap();
    assert!((best - 1.0).abs() < 1e-12);
}

#[test]
fn single_edge_grid_maximum() {
    // 100 x 100 grid over [0, pi]^2; the continuous optimum is 1.
    let g = edge();
    let mut best: f64 = 0.0;
    for i in 0..100 {
        for j in 0..100 {
            let gamma = PI * i as f64 / 99.0;
            let beta = PI * j as f64 / 99.0;
            let params = ParamVector::new(vec![gamma], vec![beta]).unwrap();
            best = best.max(evaluate_objective(&g, &params).unwrap());
        }
    }
    assert!((0.999..=1.0 + 1e-12).contains(&best), "{best}");
}

#[test]
fn dense_matrices_agree_with_statevector() {
    let graphs = [
        generate_random(4, 0.7, true, 1).unwrap(),
        generate_regular(6, 3, false, 2).unwrap(),
        generate_complete(5, true, 3).unwrap(),
    ];
    for (i, g) in graphs.iter().enumerate() {
        for p in 1..=3 {
            let params = ParamVector::random(p, 100 + i as u64 * 10 + p as u64).unwrap();
            let dense = dense_expectation(g, &params);
            let sim = evaluate_objective(g, &params).unwrap();
            assert!((dense - sim).abs() < 1e-10, "graph {i}, p {p}: {dense} vs {sim}");
        }
    }
}

/// Maximum cut by Gray-code enumeration over all 2^n assignments.
fn gray_code_max(g: &Graph) -> f64 {
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.u].push((e.v, e.w));
        adj[e.v].push((e.u, e.w));
    }
    let mut z = 0usize;
    let mut cut = 0.0;
    let mut best: f64 = 0.0;
    for step in 1..1usize << n {
        let flip = step.trailing_zeros() as usize;
        for &(v, w) in &adj[flip] {
            if (z >> v & 1) == (z >> flip & 1) {
                cut += w;
            } else {
                cut -= w;
            }
        }
        z ^= 1 << flip;
        best = best.max(cut);
    }
    best
}

#[test]
fn bruteforce_matches_gray_code() {
    for seed in 0..40 {
        let n = 3 + (seed as usize % 8);
        let g = generate_random(n, 0.5, seed % 2 == 0, seed).unwrap();
        let r = max_cut_bruteforce(&g).unwrap();
        assert!((r.c_star - gray_code_max(&g)).abs() < 1e-9, "seed {seed}");
        assert_eq!(cut_value(&g, &r.witness).unwrap(), r.c_star);
        assert!(!r.witness.side(0));
    }
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..=7, 0.1f64..0.9, any::<bool>(), any::<u64>())
        .prop_map(|(n, ep, w, seed)| generate_random(n, ep, w, seed).unwrap())
}

fn params_strategy() -> impl Strategy<Value = ParamVector> {
    (1usize..=3, any::<u64>()).prop_map(|(p, seed)| ParamVector::random(p, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cut_is_complement_symmetric(g in graph_strategy(), bits in any::<u64>()) {
        let z = Assignment::new(g.n(), bits & ((1 << g.n()) - 1)).unwrap();
        prop_assert_eq!(cut_value(&g, &z).unwrap(), cut_value(&g, &z.complement()).unwrap());
    }

    #[test]
    fn circuit_preserves_norm(g in graph_strategy(), params in params_strategy()) {
        let problem = QaoaProblem::new(&g).unwrap();
        prop_assert!((problem.state(&params).norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn objective_within_bounds(g in graph_strategy(), params in params_strategy()) {
        let v = evaluate_objective(&g, &params).unwrap();
        let c_star = max_cut_bruteforce(&g).unwrap().c_star;
        prop_assert!(v >= -1e-12 && v <= c_star + 1e-9);
    }

    #[test]
    fn integer_weights_have_gamma_period(n in 2usize..=6, seed in any::<u64>(), params in params_strategy()) {
        // Unweighted cuts are integers, so gamma is 2 pi periodic.
        let g = generate_random(n, 0.6, false, seed).unwrap();
        let shifted = ParamVector::new(
            params.gammas().iter().map(|g| g + 2.0 * PI).collect(),
            params.betas().to_vec(),
        ).unwrap();
        let a = evaluate_objective(&g, &params).unwrap();
        let b = evaluate_objective(&g, &shifted).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn beta_has_period_pi(g in graph_strategy(), params in params_strategy()) {
        // exp(-i (beta + pi) X) = -exp(-i beta X); the global sign cancels.
        let shifted = ParamVector::new(
            params.gammas().to_vec(),
            params.betas().iter().map(|b| b + PI).collect(),
        ).unwrap();
        let a = evaluate_objective(&g, &params).unwrap();
        let b = evaluate_objective(&g, &shifted).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn params_round_trip(params in params_strategy()) {
        prop_assert_eq!(ParamVector::from_flat(&params.to_flat()).unwrap(), params.clone());
        let json = serde_json::to_string(&params).unwrap();
        prop_assert_eq!(serde_json::from_str::<ParamVector>(&json).unwrap(), params);
    }

    #[test]
    fn text_format_round_trip(g in graph_strategy()) {
        let back = Graph::from_text(&g.to_text()).unwrap();
        prop_assert_eq!(back.hash(), g.hash());
        prop_assert_eq!(back, g);
    }
}
