//! Operator dynamics for the spreading of fake and good news on agent
//! networks.
//!
//! Each agent carries two fermionic modes, one per kind of information.
//! [`heisenberg`] solves the closed quadratic model through the one-body
//! matrix `V`, [`hrho`] adds rule-driven updates of the inertia
//! parameters, and [`gksl`] evolves the density operator under jump
//! operators that move packets between agents or switch their kind.

pub mod error;
pub mod fock;
pub mod gksl;
pub mod heisenberg;
pub mod hrho;
pub mod model;
pub mod oracle;
pub mod presets;
mod sparse;

pub use error::{Error, Family, Result, ValidationError};
pub use fock::{ModeIndex, ModeOperator, MAX_MODES};
pub use heisenberg::{global_means, run_heisenberg, MeanState, Trajectory};
pub use hrho::{run_hrho, HrhoRun, HrhoSchedule, Rule, RuleSpec};
pub use model::{build_v_matrix, NetworkSpec, VMatrix};
pub use sparse::SparseOp;
