//! Rule-driven piecewise Hamiltonian dynamics.
//!
//! The horizon is split into windows of length `tau`. Inside a window the
//! Hamiltonian is fixed; at each boundary `kτ` the variations of the local
//! means over the window update the inertia parameters through one of six
//! rules, and the next window starts from the operators reached at `kτ`.
//! Propagators are composed across windows, so the glued ladder operators
//! are `X(t) = exp(iV_k (t - kτ)) ··· exp(iV_1 τ) X(0)` and the means keep
//! following the closed form with the accumulated propagator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heisenberg::{evolve_means, grid_steps, HermitianExp, MeanState, Propagator, Trajectory};
use crate::model::{build_v_matrix, NetworkSpec};

/// Lower bound applied to every updated inertia parameter.
pub const OMEGA_MIN: f64 = 1e-6;

/// Variations of the local means across one window.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    pub delta_f: Vec<f64>,
    pub delta_g: Vec<f64>,
}

pub fn compute_deltas(prev: &MeanState, cur: &MeanState) -> Result<DeltaReport> {
    if prev.agents() != cur.agents() {
        return Err(Error::DimensionMismatch {
            expected: prev.agents(),
            got: cur.agents(),
        });
    }
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| y - x).collect();
    Ok(DeltaReport {
        delta_f: diff(&prev.f, &cur.f),
        delta_g: diff(&prev.g, &cur.g),
    })
}

/// The update rule applied at window boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    None,
    One,
    Two,
    Three,
    Four,
    Five,
    Six,
}

/// How one family's inertia reacts to its variation: `ω(1 + w κ δ)` or
/// `ω(1 + w κ δ²)`.
#[derive(Debug, Clone, Copy)]
struct Response {
    weight: f64,
    squared: bool,
}

const FULL: Response = Response {
    weight: 1.0,
    squared: false,
};
const HALF: Response = Response {
    weight: 0.5,
    squared: false,
};
const FULL_SQ: Response = Response {
    weight: 1.0,
    squared: true,
};
const HALF_SQ: Response = Response {
    weight: 0.5,
    squared: true,
};

impl Rule {
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn all() -> [Rule; 7] {
        use Rule::*;
        [None, One, Two, Three, Four, Five, Six]
    }

    /// (fake, good) responses, or `None` for the identity rule.
    fn responses(self) -> Option<(Response, Response)> {
        match self {
            Rule::None => None,
            Rule::One => Some((FULL, HALF)),
            Rule::Two => Some((HALF, FULL)),
            Rule::Three => Some((FULL, HALF_SQ)),
            Rule::Four => Some((FULL_SQ, HALF)),
            Rule::Five => Some((HALF, FULL_SQ)),
            Rule::Six => Some((HALF_SQ, FULL)),
        }
    }
}

impl TryFrom<u8> for Rule {
    type Error = Error;

    fn try_from(id: u8) -> Result<Self> {
        Rule::all()
            .get(id as usize)
            .copied()
            .ok_or(Error::UnknownRule(id))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleSpec {
    pub rule: Rule,
    pub kappa: Vec<f64>,
    pub tau: f64,
}

impl RuleSpec {
    pub fn validate(&self, agents: usize) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidRule(format!("tau = {} must be positive", self.tau)));
        }
        if self.kappa.len() != agents {
            return Err(Error::DimensionMismatch {
                expected: agents,
                got: self.kappa.len(),
            });
        }
        if let Some(k) = self.kappa.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
            return Err(Error::InvalidRule(format!("kappa = {k} must be nonnegative")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HrhoSchedule {
    pub t_max: f64,
    pub dt_out: f64,
}

fn update(omega: &[f64], kappa: &[f64], delta: &[f64], r: Response) -> Vec<f64> {
    omega
        .iter()
        .zip(kappa)
        .zip(delta)
        .enumerate()
        .map(|(i, ((&w, &k), &d))| {
            let d = if r.squared { d * d } else { d };
            let updated = w * (1.0 + r.weight * k * d);
            if updated < OMEGA_MIN {
                log::warn!("inertia of agent {} clamped from {updated} to {OMEGA_MIN}", i + 1);
                OMEGA_MIN
            } else {
                updated
            }
        })
        .collect()
}

/// Applies `rule` to the current inertia parameters.
pub fn apply_rule(
    rule: &RuleSpec,
    omega_f: &[f64],
    omega_g: &[f64],
    deltas: &DeltaReport,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = omega_f.len();
    for len in [omega_g.len(), rule.kappa.len(), deltas.delta_f.len(), deltas.delta_g.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    match rule.rule.responses() {
        None => Ok((omega_f.to_vec(), omega_g.to_vec())),
        Some((rf, rg)) => Ok((
            update(omega_f, &rule.kappa, &deltas.delta_f, rf),
            update(omega_g, &rule.kappa, &deltas.delta_g, rg),
        )),
    }
}

/// One window of constant Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowRecord {
    pub start_time: f64,
    pub end_time: f64,
    pub omega_f: Vec<f64>,
    pub omega_g: Vec<f64>,
    pub start_state: MeanState,
    pub end_state: MeanState,
}

#[derive(Debug, Clone)]
pub struct HrhoRun {
    pub trajectory: Trajectory,
    pub windows: Vec<WindowRecord>,
}

/// Windows sharing one Hamiltonian: the propagator from `t = 0` is
/// `exp(iV (t - anchor_time)) * anchor`.
struct Segment {
    exp: HermitianExp,
    anchor_index: usize,
    anchor: Option<DMatrix<Complex64>>,
}

impl Segment {
    fn propagator(&self, index: usize, dt_out: f64) -> Propagator {
        let local = (index - self.anchor_index) as f64 * dt_out;
        match &self.anchor {
            None => self.exp.at(local),
            Some(w) if index == self.anchor_index => Propagator {
                matrix: w.clone(),
                t: index as f64 * dt_out,
            },
            Some(w) => Propagator {
                matrix: self.exp.at(local).matrix * w,
                t: index as f64 * dt_out,
            },
        }
    }
}

pub fn run_hrho(spec: &NetworkSpec, rule: &RuleSpec, sched: &HrhoSchedule, init: &MeanState) -> Result<HrhoRun> {
    spec.validate()?;
    rule.validate(spec.agents())?;
    if init.agents() != spec.agents() {
        return Err(Error::DimensionMismatch {
            expected: spec.agents(),
            got: init.agents(),
        });
    }
    let steps = grid_steps(sched.t_max, sched.dt_out)?;
    let ratio = rule.tau / sched.dt_out;
    let per_window = ratio.round();
    if per_window < 1.0 || (ratio - per_window).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::InvalidGrid(format!(
            "dt_out = {} does not divide tau = {}",
            sched.dt_out, rule.tau
        )));
    }
    let per_window = per_window as usize;

    let mut current = spec.clone();
    let mut segment = Segment {
        exp: HermitianExp::new(&build_v_matrix(&current))?,
        anchor_index: 0,
        anchor: None,
    };
    let mut trajectory = Trajectory::default();
    let mut windows = Vec::new();
    trajectory.push(0.0, init.clone());
    let mut start_state = init.clone();

    let mut start = 0;
    while start < steps {
        let end = (start + per_window).min(steps);
        let mut last = segment.propagator(end, sched.dt_out);
        for i in start + 1..=end {
            let prop = if i == end {
                last.clone()
            } else {
                segment.propagator(i, sched.dt_out)
            };
            trajectory.push(i as f64 * sched.dt_out, evolve_means(&prop, init)?);
        }
        let end_state = trajectory.states[end].clone();
        windows.push(WindowRecord {
            start_time: start as f64 * sched.dt_out,
            end_time: end as f64 * sched.dt_out,
            omega_f: current.omega_f.clone(),
            omega_g: current.omega_g.clone(),
            start_state: start_state.clone(),
            end_state: end_state.clone(),
        });
        if end == steps {
            break;
        }

        let deltas = compute_deltas(&start_state, &end_state)?;
        let (omega_f, omega_g) = apply_rule(rule, &current.omega_f, &current.omega_g, &deltas)?;
        if omega_f != current.omega_f || omega_g != current.omega_g {
            current.omega_f = omega_f;
            current.omega_g = omega_g;
            last.t = end as f64 * sched.dt_out;
            segment = Segment {
                exp: HermitianExp::new(&build_v_matrix(&current))?,
                anchor_index: end,
                anchor: Some(last.matrix),
            };
        }
        start_state = evolve_means(&segment.propagator(end, sched.dt_out), init)?;
        start = end;
    }
    Ok(HrhoRun { trajectory, windows })
}
