//! Unconstrained COBYLA: derivative-free minimization with linear models
//! built on a simplex of `n + 1` interpolation points and a trust region of
//! radius `rho` that shrinks from `rho_begin` to `tol`.
//!
//! The iteration follows Powell's scheme without constraints: each pass
//! either takes a trust-region step along the negative model gradient or,
//! when the simplex is badly shaped, a geometry step that restores it. A
//! caller-supplied hook sees every accepted iterate (every new best point,
//! starting with the initial point) and may stop the run.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum distance of a vertex from its opposite face, in units of `rho`.
const SIMPLEX_SIGMA: f64 = 0.25;
/// Maximum distance of a vertex from the best point, in units of `rho`.
const SIMPLEX_REACH: f64 = 2.1;
/// Length of a geometry step, in units of `rho`.
const GEOMETRY_STEP: f64 = 0.5;
/// Vertices farther than this from a new point are preferred for replacement.
const FAR_EDGE: f64 = 1.1;
/// Reduction ratio below which a trust-region step counts as poor.
const POOR_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CobylaSettings {
    /// Initial trust-region radius.
    pub rho_begin: f64,
    /// Final trust-region radius; the run converges once `rho` reaches it.
    pub tol: f64,
    /// Cap on main-loop passes (one objective evaluation each).
    pub max_iters: usize,
}

impl Default for CobylaSettings {
    fn default() -> Self {
        CobylaSettings {
            rho_begin: 0.5,
            tol: 1e-4,
            max_iters: 500,
        }
    }
}

impl CobylaSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tol {} must be positive", self.tol)));
        }
        if !(self.rho_begin >= self.tol && self.rho_begin.is_finite()) {
            return Err(Error::Config(format!(
                "rho_begin {} must be finite and >= tol {}",
                self.rho_begin, self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HookAction {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIters,
    Hook,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evals: usize,
    pub termination: Termination,
}

struct Problem<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Problem<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        let v = (self.f)(x);
        if !v.is_finite() {
            return Err(Error::Numerical {
                message: format!("objective returned {v}"),
                iterate: x.to_vec(),
            });
        }
        Ok(v)
    }
}

/// Simplex stored relative to its best vertex (the pole).
struct Simplex {
    pole: Vec<f64>,
    f_pole: f64,
    vertices: Vec<Vec<f64>>,
    f_vertices: Vec<f64>,
}

impl Simplex {
    fn edges(&self) -> DMatrix<f64> {
        let n = self.pole.len();
        DMatrix::from_fn(n, n, |j, i| self.vertices[j][i] - self.pole[i])
    }

    /// Makes vertex `j` the pole when it beats the current one.
    fn promote_if_better(&mut self, j: usize) -> bool {
        if self.f_vertices[j] < self.f_pole {
            std::mem::swap(&mut self.pole, &mut self.vertices[j]);
            std::mem::swap(&mut self.f_pole, &mut self.f_vertices[j]);
            true
        } else {
            false
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Minimizes `f` from `x0`.
///
/// `hook(x, f(x))` runs on the initial point and after every accepted
/// iterate; returning [`HookAction::Stop`] ends the run at that point.
/// `iterations` counts main-loop passes after the initial simplex, so a hook
/// that stops immediately yields zero iterations.
pub fn minimize<F, H>(f: F, x0: &[f64], settings: &CobylaSettings, mut hook: H) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
    H: FnMut(&[f64], f64) -> HookAction,
{
    settings.validate()?;
    if x0.is_empty() {
        return Err(Error::Argument("empty starting point".into()));
    }
    if let Some(bad) = x0.iter().find(|v| !v.is_finite()) {
        return Err(Error::Argument(format!("non-finite starting value {bad}")));
    }
    let n = x0.len();
    let mut problem = Problem { f, evals: 0 };
    let mut rho = settings.rho_begin;

    let f0 = problem.eval(x0)?;
    let finish = |s: &Simplex, iterations, evals, termination| Minimum {
        x: s.pole.clone(),
        f: s.f_pole,
        iterations,
        evals,
        termination,
    };

    let mut simplex = Simplex {
        pole: x0.to_vec(),
        f_pole: f0,
        vertices: Vec::with_capacity(n),
        f_vertices: Vec::with_capacity(n),
    };
    if hook(&simplex.pole, f0) == HookAction::Stop {
        return Ok(finish(&simplex, 0, problem.evals, Termination::Hook));
    }
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += rho;
        let fv = problem.eval(&v)?;
        simplex.vertices.push(v);
        simplex.f_vertices.push(fv);
    }
    let best = (0..n).min_by(|&a, &b| simplex.f_vertices[a].total_cmp(&simplex.f_vertices[b]));
    if let Some(j) = best {
        if simplex.promote_if_better(j) && hook(&simplex.pole, simplex.f_pole) == HookAction::Stop {
            return Ok(finish(&simplex, 0, problem.evals, Termination::Hook));
        }
    }

    let mut iterations = 0;
    loop {
        if iterations >= settings.max_iters {
            return Ok(finish(&simplex, iterations, problem.evals, Termination::MaxIters));
        }

        let edges = simplex.edges();
        let inverse = edges.clone().try_inverse();
        let reach: Vec<f64> = simplex.vertices.iter().map(|v| dist(v, &simplex.pole)).collect();
        let sigma: Vec<f64> = match &inverse {
            Some(inv) => (0..n).map(|j| inv.column(j).norm().recip()).collect(),
            None => vec![0.0; n],
        };
        let far = (0..n)
            .filter(|&j| reach[j] > SIMPLEX_REACH * rho)
            .max_by(|&a, &b| reach[a].total_cmp(&reach[b]));
        let thin = (0..n)
            .filter(|&j| sigma[j] < SIMPLEX_SIGMA * rho)
            .min_by(|&a, &b| sigma[a].total_cmp(&sigma[b]));

        let df = DVector::from_fn(n, |j, _| simplex.f_vertices[j] - simplex.f_pole);
        let gradient = inverse.as_ref().map(|inv| inv * &df);

        let repair = match &inverse {
            Some(inv) => far.or(thin).map(|l| (l, inv.column(l).normalize())),
            None => Some(repair_direction(&edges)),
        };
        if let Some((l, normal)) = repair {
            // Geometry step: move vertex l to the pole plus a step of length
            // GEOMETRY_STEP * rho along the normal of its opposite face.
            let mut step = normal * (GEOMETRY_STEP * rho);
            if let Some(g) = &gradient {
                if g.dot(&step) > 0.0 {
                    step = -step;
                }
            }
            let x: Vec<f64> = simplex.pole.iter().zip(step.iter()).map(|(p, s)| p + s).collect();
            let fx = problem.eval(&x)?;
            iterations += 1;
            simplex.vertices[l] = x;
            simplex.f_vertices[l] = fx;
            if simplex.promote_if_better(l) && hook(&simplex.pole, simplex.f_pole) == HookAction::Stop {
                return Ok(finish(&simplex, iterations, problem.evals, Termination::Hook));
            }
            continue;
        }

        // The simplex is acceptable, so the inverse exists.
        let (inv, g) = match (&inverse, gradient) {
            (Some(inv), Some(g)) => (inv, g),
            _ => unreachable!("acceptable simplex without inverse"),
        };
        let g_norm = g.norm();
        let mut poor = true;
        if g_norm > 0.0 {
            let step = &g * (-rho / g_norm);
            let x: Vec<f64> = simplex.pole.iter().zip(step.iter()).map(|(p, s)| p + s).collect();
            let fx = problem.eval(&x)?;
            iterations += 1;
            let predicted = rho * g_norm;
            let actual = simplex.f_pole - fx;
            poor = actual <= POOR_RATIO * predicted;
            let improved = fx < simplex.f_pole;

            // Pick the vertex whose replacement keeps the simplex best shaped.
            let weights = inv.transpose() * &step;
            let mut best_weight = if improved { 0.0 } else { 1.0 };
            let mut drop = None;
            for j in 0..n {
                let w = weights[j].abs();
                if w > best_weight {
                    best_weight = w;
                    drop = Some(j);
                }
            }
            let mut farthest = FAR_EDGE * rho;
            for j in 0..n {
                let shaped = weights[j].abs() * sigma[j];
                if shaped >= SIMPLEX_SIGMA * rho || shaped >= sigma[j] {
                    let d = if improved { dist(&simplex.vertices[j], &x) } else { reach[j] };
                    if d > farthest {
                        farthest = d;
                        drop = Some(j);
                    }
                }
            }
            if let Some(j) = drop {
                simplex.vertices[j] = x;
                simplex.f_vertices[j] = fx;
                if simplex.promote_if_better(j)
                    && hook(&simplex.pole, simplex.f_pole) == HookAction::Stop
                {
                    return Ok(finish(&simplex, iterations, problem.evals, Termination::Hook));
                }
            }
        }

        if poor {
            if rho <= settings.tol {
                return Ok(finish(&simplex, iterations, problem.evals, Termination::Converged));
            }
            rho *= 0.5;
            if rho <= 1.5 * settings.tol {
                rho = settings.tol;
            }
        }
    }
}

/// For a singular edge matrix: the first edge that is linearly dependent on
/// the ones before it, and a unit vector orthogonal to all other edges.
fn repair_direction(edges: &DMatrix<f64>) -> (usize, DVector<f64>) {
    let n = edges.nrows();
    let rows: Vec<DVector<f64>> = (0..n).map(|j| edges.row(j).transpose()).collect();
    let scale = rows.iter().map(|r| r.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut dependent = 0;
    for (j, r) in rows.iter().enumerate() {
        let residual = orthogonalize(r.clone(), &basis);
        if residual.norm() <= 1e-12 * scale {
            dependent = j;
            break;
        }
        basis.push(residual.normalize());
    }
    let others: Vec<DVector<f64>> = rows
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != dependent)
        .fold(Vec::new(), |mut acc, (_, r)| {
            let residual = orthogonalize(r.clone(), &acc);
            if residual.norm() > 1e-12 * scale {
                acc.push(residual.normalize());
            }
            acc
        });
    let direction = (0..n)
        .map(|i| orthogonalize(DVector::from_fn(n, |k, _| f64::from(u8::from(k == i))), &others))
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("n >= 1");
    (dependent, direction.normalize())
}

fn orthogonalize(mut v: DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    for b in basis {
        v -= b * b.dot(&v);
    }
    v
}
