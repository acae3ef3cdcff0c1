//! Open-system dynamics under the GKSL master equation with `H = H₀`.

mod asymptote;
mod channels;
mod density;
mod generator;
mod integrate;
mod jumps;

pub use asymptote::{
    find_asymptote, sweep, Asymptote, GkslProblem, Observable, SweepParam, SweepPoint, DEFAULT_EPS, DEFAULT_T_CAP,
};
pub use channels::{build_lindblads, ChannelKind, ChannelSpec, LindbladSet};
pub use density::{build_initial_density, mean_values, DensityState, InitialStateKind};
pub use generator::{liouvillian_apply, DenseGenerator, PopulationGenerator};
pub use integrate::{integrate, GkslIntegrator};
pub use jumps::{jump_drift_probabilities, JumpDrift};

impl GkslProblem {
    /// Mean-value trajectory on the `dt_out` grid.
    pub fn trajectory(&self, t_max: f64, dt_out: f64) -> crate::error::Result<crate::heisenberg::Trajectory> {
        let rho0 = build_initial_density(&self.init, self.init_kind)?;
        integrate(&rho0, &self.spec, &self.channels, t_max, self.dt, dt_out)
    }
}
