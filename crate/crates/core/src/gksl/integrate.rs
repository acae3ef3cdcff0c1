//! Fixed-step classic Runge–Kutta integration of the GKSL equation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::channels::LindbladSet;
use super::density::{mean_values, DensityState};
use super::generator::{DenseGenerator, PopulationGenerator};
use crate::error::{Error, Result};
use crate::heisenberg::{grid_steps, MeanState, Trajectory};
use crate::model::{free_energies, NetworkSpec};

/// Trace drift beyond which populations are renormalized.
const TRACE_DRIFT: f64 = 1e-10;
/// Populations below this are set to zero after each step. Decaying
/// populations otherwise sink into subnormal floats, which are very slow.
const FLUSH: f64 = 1e-200;

enum Engine {
    Populations {
        gen: PopulationGenerator,
        p: Vec<f64>,
        scratch: [Vec<f64>; 5],
    },
    Dense {
        gen: DenseGenerator,
        rho: DMatrix<Complex64>,
    },
}

/// Steps a density state forward with step `dt`.
///
/// When `dt` exceeds the explicit stability range of the generator (rate
/// times step above one) each step is split into equal substeps, so output
/// times stay on the requested grid.
pub struct GkslIntegrator {
    engine: Engine,
    agents: usize,
    dt: f64,
    substeps: usize,
    steps_taken: u64,
}

impl GkslIntegrator {
    pub fn new(rho0: &DensityState, spec: &NetworkSpec, set: &LindbladSet, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("integrator step dt = {dt} must be positive")));
        }
        let agents = set.agents();
        if spec.agents() != agents {
            return Err(Error::DimensionMismatch {
                expected: agents,
                got: spec.agents(),
            });
        }
        if rho0.dim() != 1 << (2 * agents) {
            return Err(Error::DimensionMismatch {
                expected: 1 << (2 * agents),
                got: rho0.dim(),
            });
        }
        let (engine, stiffness) = match rho0 {
            DensityState::Populations(p) => {
                let gen = PopulationGenerator::compile(set, p)?;
                log::debug!("population engine tracks {} of {} configurations", gen.len(), p.len());
                let compact = gen.compress(p);
                let len = compact.len();
                let stiffness = gen.max_exit_rate();
                (
                    Engine::Populations {
                        gen,
                        p: compact,
                        scratch: std::array::from_fn(|_| vec![0.0; len]),
                    },
                    stiffness,
                )
            }
            DensityState::Dense(m) => {
                let h0 = free_energies(spec);
                let spread = h0.iter().copied().fold(0.0, f64::max) - h0.iter().copied().fold(f64::MAX, f64::min);
                let decay: f64 = set.channels().iter().map(|c| c.rate()).sum();
                (
                    Engine::Dense {
                        gen: DenseGenerator::new(&h0, set)?,
                        rho: m.clone(),
                    },
                    spread + decay,
                )
            }
        };
        let substeps = (stiffness * dt).ceil().max(1.0) as usize;
        if substeps > 1 {
            log::debug!("splitting dt = {dt} into {substeps} substeps (stiffness {stiffness})");
        }
        Ok(Self {
            engine,
            agents,
            dt,
            substeps,
            steps_taken: 0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    /// Elapsed time, `steps * dt`.
    pub fn time(&self) -> f64 {
        self.steps_taken as f64 * self.dt
    }

    pub fn step(&mut self) {
        let h = self.dt / self.substeps as f64;
        for _ in 0..self.substeps {
            match &mut self.engine {
                Engine::Populations { gen, p, scratch } => {
                    rk4_populations(gen, p, scratch, h);
                    p.iter_mut().filter(|x| x.abs() < FLUSH).for_each(|x| *x = 0.0);
                }
                Engine::Dense { gen, rho } => rk4_dense(gen, rho, h),
            }
        }
        self.steps_taken += 1;
    }

    /// Advances by `steps` steps of `dt`, then checks the trace.
    pub fn advance(&mut self, steps: usize) {
        for _ in 0..steps {
            self.step();
        }
        self.renormalize_if_drifted();
    }

    fn renormalize_if_drifted(&mut self) {
        let trace = self.trace();
        if (trace - 1.0).abs() > TRACE_DRIFT {
            log::warn!("trace drifted to {trace} at t = {}, renormalizing", self.time());
            match &mut self.engine {
                Engine::Populations { p, .. } => p.iter_mut().for_each(|x| *x /= trace),
                Engine::Dense { rho, .. } => *rho /= Complex64::new(trace, 0.0),
            }
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.engine {
            Engine::Populations { p, .. } => p.iter().sum(),
            Engine::Dense { rho, .. } => rho.diagonal().iter().map(|z| z.re).sum(),
        }
    }

    /// Smallest population (diagonal entry) currently held.
    pub fn min_population(&self) -> f64 {
        match &self.engine {
            Engine::Populations { p, .. } => p.iter().copied().fold(f64::INFINITY, f64::min),
            Engine::Dense { rho, .. } => rho.diagonal().iter().map(|z| z.re).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn state(&self) -> DensityState {
        let dim = 1usize << (2 * self.agents);
        match &self.engine {
            Engine::Populations { gen, p, .. } => DensityState::Populations(gen.expand(p, dim)),
            Engine::Dense { rho, .. } => DensityState::Dense(rho.clone()),
        }
    }

    pub fn means(&self) -> MeanState {
        match &self.engine {
            Engine::Populations { gen, p, .. } => {
                let mut x = vec![0.0; 2 * self.agents];
                for (&s, &ps) in gen.states().iter().zip(p.iter()) {
                    for (b, xb) in x.iter_mut().enumerate() {
                        if s >> b & 1 == 1 {
                            *xb += ps;
                        }
                    }
                }
                MeanState::from_flat(&x)
            }
            Engine::Dense { .. } => mean_values(&self.state()),
        }
    }
}

fn rk4_populations(gen: &PopulationGenerator, p: &mut [f64], scratch: &mut [Vec<f64>; 5], h: f64) {
    let [k1, k2, k3, k4, tmp] = scratch;
    gen.apply(p, k1);
    for ((t, &x), &k) in tmp.iter_mut().zip(p.iter()).zip(k1.iter()) {
        *t = x + 0.5 * h * k;
    }
    gen.apply(tmp, k2);
    for ((t, &x), &k) in tmp.iter_mut().zip(p.iter()).zip(k2.iter()) {
        *t = x + 0.5 * h * k;
    }
    gen.apply(tmp, k3);
    for ((t, &x), &k) in tmp.iter_mut().zip(p.iter()).zip(k3.iter()) {
        *t = x + h * k;
    }
    gen.apply(tmp, k4);
    for (i, x) in p.iter_mut().enumerate() {
        *x += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

fn rk4_dense(gen: &DenseGenerator, rho: &mut DMatrix<Complex64>, h: f64) {
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    let k1 = gen.apply(rho);
    let k2 = gen.apply(&(&*rho + &k1 * half));
    let k3 = gen.apply(&(&*rho + &k2 * half));
    let k4 = gen.apply(&(&*rho + &k3 * full));
    *rho += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * Complex64::new(h / 6.0, 0.0);
}

/// Number of integrator steps per output interval.
pub(crate) fn steps_per_output(dt: f64, dt_out: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidGrid(format!("integrator step dt = {dt} must be positive")));
    }
    let ratio = dt_out / dt;
    let k = ratio.round();
    if k < 1.0 || (ratio - k).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::InvalidGrid(format!(
            "dt_out = {dt_out} is not a multiple of dt = {dt}"
        )));
    }
    Ok(k as usize)
}

/// Integrates from `rho0` and records mean values on the `dt_out` grid.
pub fn integrate(
    rho0: &DensityState,
    spec: &NetworkSpec,
    set: &LindbladSet,
    t_max: f64,
    dt: f64,
    dt_out: f64,
) -> Result<Trajectory> {
    let samples = grid_steps(t_max, dt_out)?;
    let per_out = steps_per_output(dt, dt_out)?;
    let mut integ = GkslIntegrator::new(rho0, spec, set, dt)?;
    let mut traj = Trajectory::default();
    traj.push(0.0, integ.means());
    for i in 1..=samples {
        integ.advance(per_out);
        traj.push(i as f64 * dt_out, integ.means());
    }
    Ok(traj)
}
