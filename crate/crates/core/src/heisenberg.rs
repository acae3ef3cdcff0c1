//! Closed-form Heisenberg dynamics.
//!
//! The ladder operators evolve as `X(t) = exp(iVt) X(0)`. For an initial
//! occupation-number product state the local means follow directly from the
//! squared moduli of the propagator entries:
//!
//! ```text
//! F_α(t) = Σ_β |v_{α,β}(t)|² F_β⁰ + |v_{α,β+N}(t)|² G_β⁰
//! G_α(t) = Σ_β |v_{α+N,β}(t)|² F_β⁰ + |v_{α+N,β+N}(t)|² G_β⁰
//! ```

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Family, Result};
use crate::model::{build_v_matrix, NetworkSpec, VMatrix};

/// Hermiticity tolerance accepted by [`HermitianExp::new`].
const HERMITIAN_TOL: f64 = 1e-12;

/// Per-agent mean occupations of the fake and good modes.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanState {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl MeanState {
    /// Validates lengths and that every entry lies in `[0, 1]`.
    pub fn new(f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if f.len() != g.len() {
            return Err(Error::DimensionMismatch {
                expected: f.len(),
                got: g.len(),
            });
        }
        for (family, values) in [(Family::Fake, &f), (Family::Good, &g)] {
            if let Some((i, &value)) = values
                .iter()
                .enumerate()
                .find(|(_, x)| !(0.0..=1.0).contains(*x))
            {
                return Err(Error::MeanOutOfRange {
                    family,
                    agent: i + 1,
                    value,
                });
            }
        }
        Ok(Self { f, g })
    }

    pub fn zeros(agents: usize) -> Self {
        Self {
            f: vec![0.0; agents],
            g: vec![0.0; agents],
        }
    }

    pub fn agents(&self) -> usize {
        self.f.len()
    }

    /// `(F_1..F_N, G_1..G_N)`, matching the flat mode order.
    pub fn flat(&self) -> Vec<f64> {
        self.f.iter().chain(&self.g).copied().collect()
    }

    pub fn from_flat(values: &[f64]) -> Self {
        let n = values.len() / 2;
        Self {
            f: values[..n].to_vec(),
            g: values[n..].to_vec(),
        }
    }

    pub fn get(&self, family: Family, agent: usize) -> f64 {
        match family {
            Family::Fake => self.f[agent - 1],
            Family::Good => self.g[agent - 1],
        }
    }

    /// `Σ_α (F_α + G_α)`
    pub fn total(&self) -> f64 {
        self.f.iter().chain(&self.g).sum()
    }

    /// Agent total `F_α + G_α` (1-based).
    pub fn agent_total(&self, agent: usize) -> f64 {
        self.f[agent - 1] + self.g[agent - 1]
    }
}

/// `(F, G)`: arithmetic means of the local values over agents.
pub fn global_means(state: &MeanState) -> (f64, f64) {
    let n = state.agents();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    (mean(&state.f), mean(&state.g))
}

/// Eigendecomposition of a Hermitian `V`, reusable for any `t`.
#[derive(Debug, Clone)]
pub struct HermitianExp {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl HermitianExp {
    pub fn new(v: &VMatrix) -> Result<Self> {
        let deviation = v.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let eig = v.matrix().clone().symmetric_eigen();
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `exp(iVt)`. At `t = 0` the identity is returned exactly.
    pub fn at(&self, t: f64) -> Propagator {
        let n = self.dim();
        if t == 0.0 {
            return Propagator {
                matrix: DMatrix::identity(n, n),
                t,
            };
        }
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, &e) in self.eigenvalues.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, e * t);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
        Propagator {
            matrix: scaled * q.adjoint(),
            t,
        }
    }
}

/// The matrix `exp(iVt)` at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub matrix: DMatrix<Complex64>,
    pub t: f64,
}

impl Propagator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |U†U - I|` entrywise.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        (prod - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise `|v_ij|²`, a doubly stochastic matrix.
    pub fn moduli_squared(&self) -> DMatrix<f64> {
        self.matrix.map(|z| z.norm_sqr())
    }
}

pub fn propagator(v: &VMatrix, t: f64) -> Result<Propagator> {
    Ok(HermitianExp::new(v)?.at(t))
}

/// Local means at the propagator's time from the initial means.
pub fn evolve_means(prop: &Propagator, init: &MeanState) -> Result<MeanState> {
    let n2 = prop.dim();
    if 2 * init.agents() != n2 {
        return Err(Error::DimensionMismatch {
            expected: n2,
            got: 2 * init.agents(),
        });
    }
    let x0 = init.flat();
    let out: Vec<f64> = (0..n2)
        .map(|i| {
            prop.matrix
                .row(i)
                .iter()
                .zip(&x0)
                .map(|(z, x)| z.norm_sqr() * x)
                .sum()
        })
        .collect();
    Ok(MeanState::from_flat(&out))
}

/// Time-sampled means plus global means.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MeanState>,
    pub f_mean: Vec<f64>,
    pub g_mean: Vec<f64>,
}

impl Trajectory {
    pub fn push(&mut self, t: f64, state: MeanState) {
        let (f, g) = global_means(&state);
        self.times.push(t);
        self.states.push(state);
        self.f_mean.push(f);
        self.g_mean.push(g);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&MeanState> {
        self.states.last()
    }

    /// Series of one local observable over time.
    pub fn series(&self, family: Family, agent: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.get(family, agent)).collect()
    }
}

/// Number of output intervals on `{0, dt_out, ..., t_max}`.
///
/// `t_max` need not be a multiple of `dt_out`; the grid stops at the last
/// sample not beyond `t_max`.
pub fn grid_steps(t_max: f64, dt_out: f64) -> Result<usize> {
    if !(dt_out.is_finite() && dt_out > 0.0) {
        return Err(Error::InvalidGrid(format!("dt_out = {dt_out} must be positive")));
    }
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(Error::InvalidGrid(format!("t_max = {t_max} must be nonnegative")));
    }
    Ok((t_max / dt_out + 1e-9).floor() as usize)
}

pub fn run_heisenberg(spec: &NetworkSpec, init: &MeanState, t_max: f64, dt_out: f64) -> Result<Trajectory> {
    spec.validate()?;
    if init.agents() != spec.agents() {
        return Err(Error::DimensionMismatch {
            expected: spec.agents(),
            got: init.agents(),
        });
    }
    let steps = grid_steps(t_max, dt_out)?;
    let exp = HermitianExp::new(&build_v_matrix(spec))?;
    let mut traj = Trajectory::default();
    for i in 0..=steps {
        let t = i as f64 * dt_out;
        traj.push(t, evolve_means(&exp.at(t), init)?);
    }
    Ok(traj)
}
