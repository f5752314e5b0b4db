//! Dense statevector simulation of the MaxCut QAOA circuit.
//!
//! Qubit `i` is node `i` and is stored as bit `i` of the basis index
//! (little-endian), the same convention as [`Assignment`] and [`CutTable`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::oracle::{check_enum_cap, cut_bits, Assignment};
use crate::rng::Rng;

/// Norm tolerance checked before sampling.
pub const SAMPLE_NORM_TOL: f64 = 1e-8;

/// Cut value of every basis state; the diagonal of the cost Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct CutTable {
    n: usize,
    values: Vec<f64>,
}

impl CutTable {
    pub fn new(g: &Graph) -> Result<Self> {
        check_enum_cap(g.n())?;
        let values = (0..1u64 << g.n()).map(|z| cut_bits(g, z)).collect();
        Ok(CutTable { n: g.n(), values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, z: u64) -> f64 {
        self.values[z as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Uniform superposition `|+>^n`.
    pub fn plus(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("state needs at least one qubit".into()));
        }
        check_enum_cap(n)?;
        let dim = 1usize << n;
        let a = (dim as f64).sqrt().recip();
        Ok(StateVector {
            n,
            amps: vec![Complex64::new(a, 0.0); dim],
        })
    }

    /// Computational basis state `|z>`.
    pub fn basis(z: &Assignment) -> Result<Self> {
        check_enum_cap(z.len())?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << z.len()];
        amps[z.bits() as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n: z.len(), amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two. Normalization
    /// is not enforced here.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(Error::Argument(format!(
                "amplitude count {} is not a power of two >= 2",
                amps.len()
            )));
        }
        let n = amps.len().trailing_zeros() as usize;
        check_enum_cap(n)?;
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_table(&self, t: &CutTable) -> Result<()> {
        if t.n != self.n {
            return Err(Error::Argument(format!(
                "cut table has {} qubits, state has {}",
                t.n, self.n
            )));
        }
        Ok(())
    }

    /// `exp(-i gamma C)`: multiplies `amps[z]` by `exp(-i gamma C(z))`.
    pub fn apply_cost_phase(&mut self, t: &CutTable, gamma: f64) -> Result<()> {
        self.check_table(t)?;
        for (a, &c) in self.amps.iter_mut().zip(&t.values) {
            *a *= Complex64::cis(-gamma * c);
        }
        Ok(())
    }

    /// `exp(-i beta X)` on every qubit, one butterfly pass per qubit.
    pub fn apply_mixer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        let minus_i_sin = Complex64::new(0.0, -s);
        for q in 0..self.n {
            let stride = 1 << q;
            for block in self.amps.chunks_exact_mut(stride << 1) {
                let (lo, hi) = block.split_at_mut(stride);
                for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x0, x1) = (*a0, *a1);
                    *a0 = x0 * c + x1 * minus_i_sin;
                    *a1 = x0 * minus_i_sin + x1 * c;
                }
            }
        }
    }

    /// `<C> = sum_z |a_z|^2 C(z)`.
    pub fn expectation(&self, t: &CutTable) -> Result<f64> {
        self.check_table(t)?;
        Ok(self
            .amps
            .iter()
            .zip(&t.values)
            .map(|(a, &c)| a.norm_sqr() * c)
            .sum())
    }

    /// `m` independent measurements by inverse-CDF lookup of one uniform
    /// draw each on the cumulative probability array.
    pub fn sample(&self, m: usize, seed: u64) -> Result<Vec<Assignment>> {
        if m == 0 {
            return Err(Error::Argument("shot count must be >= 1".into()));
        }
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > SAMPLE_NORM_TOL {
            return Err(Error::Argument(format!(
                "state norm {norm} is not 1 within {SAMPLE_NORM_TOL}"
            )));
        }
        let cdf: Vec<f64> = self
            .amps
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a.norm_sqr();
                Some(*acc)
            })
            .collect();
        let total = cdf[cdf.len() - 1];
        let last = cdf.len() - 1;
        let mut rng = Rng::new(seed);
        (0..m)
            .map(|_| {
                let target = rng.uniform() * total;
                let z = cdf.partition_point(|&c| c <= target).min(last);
                Assignment::new(self.n, z as u64)
            })
            .collect()
    }
}
