//! The GKSL generator
//! `L(ρ) = -i[H₀, ρ] + Σ_k (L_k ρ L_k† - ½{L_k† L_k, ρ})`.
//!
//! `H₀` is diagonal in the occupation basis and every channel maps basis
//! vectors to basis vectors, so diagonal states stay diagonal and their
//! populations follow a classical master equation with rates `strength²`.

use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::channels::LindbladSet;
use super::density::DensityState;
use crate::error::{Error, Result};

fn check_dims(rho: &DensityState, h0: &[f64], set: &LindbladSet) -> Result<()> {
    let expected = 1usize << (2 * set.agents());
    for got in [rho.dim(), h0.len()] {
        if got != expected {
            return Err(Error::DimensionMismatch { expected, got });
        }
    }
    Ok(())
}

/// Applies the generator to `rho`, returning `dρ/dt` in the same form.
pub fn liouvillian_apply(rho: &DensityState, h0: &[f64], set: &LindbladSet) -> Result<DensityState> {
    check_dims(rho, h0, set)?;
    match rho {
        DensityState::Populations(p) => {
            let agents = set.agents();
            let mut dp = vec![0.0; p.len()];
            for (s, &ps) in p.iter().enumerate() {
                if ps == 0.0 {
                    continue;
                }
                for ch in set.channels() {
                    if let Some(t) = ch.target(s, agents) {
                        let flux = ch.rate() * ps;
                        dp[s] -= flux;
                        dp[t] += flux;
                    }
                }
            }
            Ok(DensityState::Populations(dp))
        }
        DensityState::Dense(m) => Ok(DensityState::Dense(DenseGenerator::new(h0, set)?.apply(m))),
    }
}

/// Dense form of the generator, for small systems and cross-checks.
#[derive(Debug, Clone)]
pub struct DenseGenerator {
    h0: Vec<f64>,
    jumps: Vec<DMatrix<Complex64>>,
    jumps_adj: Vec<DMatrix<Complex64>>,
    /// `Σ L_k† L_k`
    decay: DMatrix<Complex64>,
}

impl DenseGenerator {
    pub fn new(h0: &[f64], set: &LindbladSet) -> Result<Self> {
        let dim = 1usize << (2 * set.agents());
        if h0.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: h0.len(),
            });
        }
        let jumps: Vec<_> = set.operators()?.iter().map(|op| op.to_dense()).collect();
        let jumps_adj: Vec<_> = jumps.iter().map(|l| l.adjoint()).collect();
        let mut decay = DMatrix::zeros(dim, dim);
        for (l, ld) in jumps.iter().zip(&jumps_adj) {
            decay += ld * l;
        }
        Ok(Self {
            h0: h0.to_vec(),
            jumps,
            jumps_adj,
            decay,
        })
    }

    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = rho.nrows();
        let mut out = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(0.0, -(self.h0[i] - self.h0[j])) * rho[(i, j)]
        });
        for (l, ld) in self.jumps.iter().zip(&self.jumps_adj) {
            out += l * rho * ld;
        }
        let anti = &self.decay * rho + rho * &self.decay;
        out -= anti.scale(0.5);
        out
    }
}

/// Population master equation restricted to the configurations reachable
/// from an initial support.
#[derive(Debug, Clone)]
pub struct PopulationGenerator {
    states: Vec<usize>,
    /// (from, to, rate) over compact indices
    transitions: Vec<(usize, usize, f64)>,
    exit: Vec<f64>,
}

impl PopulationGenerator {
    /// Explores every configuration reachable through channels of nonzero
    /// strength, starting from the configurations with nonzero population.
    pub fn compile(set: &LindbladSet, populations: &[f64]) -> Result<Self> {
        let agents = set.agents();
        let dim = 1usize << (2 * agents);
        if populations.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: populations.len(),
            });
        }
        let active: Vec<_> = set.channels().iter().filter(|c| c.rate() > 0.0).collect();
        let mut index = HashMap::new();
        let mut states = Vec::new();
        let mut queue: VecDeque<usize> = populations
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(s, _)| s)
            .collect();
        for &s in &queue {
            index.insert(s, states.len());
            states.push(s);
        }
        let mut transitions = Vec::new();
        while let Some(s) = queue.pop_front() {
            let from = index[&s];
            for ch in &active {
                if let Some(t) = ch.target(s, agents) {
                    let to = *index.entry(t).or_insert_with(|| {
                        states.push(t);
                        queue.push_back(t);
                        states.len() - 1
                    });
                    transitions.push((from, to, ch.rate()));
                }
            }
        }
        let mut exit = vec![0.0; states.len()];
        for &(from, _, rate) in &transitions {
            exit[from] += rate;
        }
        Ok(Self {
            states,
            transitions,
            exit,
        })
    }

    /// Configurations tracked, in compact order.
    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn max_exit_rate(&self) -> f64 {
        self.exit.iter().copied().fold(0.0, f64::max)
    }

    pub fn transitions(&self) -> &[(usize, usize, f64)] {
        &self.transitions
    }

    pub fn compress(&self, populations: &[f64]) -> Vec<f64> {
        self.states.iter().map(|&s| populations[s]).collect()
    }

    pub fn expand(&self, compact: &[f64], dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for (&s, &p) in self.states.iter().zip(compact) {
            out[s] = p;
        }
        out
    }

    /// `out = Q p` on compact vectors.
    pub fn apply(&self, p: &[f64], out: &mut [f64]) {
        for (o, (&pi, &e)) in out.iter_mut().zip(p.iter().zip(&self.exit)) {
            *o = -e * pi;
        }
        for &(from, to, rate) in &self.transitions {
            out[to] += rate * p[from];
        }
    }
}
