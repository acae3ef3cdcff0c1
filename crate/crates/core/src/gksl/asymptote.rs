use rayon::prelude::*;

use super::channels::LindbladSet;
use super::density::{build_initial_density, InitialStateKind};
use super::integrate::GkslIntegrator;
use crate::error::{Error, Family, Result};
use crate::heisenberg::{global_means, MeanState};
use crate::model::NetworkSpec;

/// Stopping tolerance on the per-unit-time change of every mean.
pub const DEFAULT_EPS: f64 = 1e-8;
/// Integration horizon after which a run is reported as not converged.
pub const DEFAULT_T_CAP: f64 = 2000.0;

/// Everything needed to run the GKSL engine from a set of initial means.
#[derive(Debug, Clone, PartialEq)]
pub struct GkslProblem {
    pub spec: NetworkSpec,
    pub init: MeanState,
    pub init_kind: InitialStateKind,
    pub channels: LindbladSet,
    pub dt: f64,
}

/// A scalar read off a [`MeanState`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Local(Family, usize),
    FMean,
    GMean,
}

impl Observable {
    /// Accepts `G_6`, `G6`, `F_mean`, `G_mean`.
    pub fn parse(name: &str) -> Result<Self> {
        let unknown = || Error::UnknownObservable(name.to_string());
        match name {
            "F_mean" => return Ok(Observable::FMean),
            "G_mean" => return Ok(Observable::GMean),
            _ => {}
        }
        let family = match name.chars().next() {
            Some('F') => Family::Fake,
            Some('G') => Family::Good,
            _ => return Err(unknown()),
        };
        let rest = name[1..].trim_start_matches('_');
        let agent: usize = rest.parse().map_err(|_| unknown())?;
        if agent == 0 {
            return Err(unknown());
        }
        Ok(Observable::Local(family, agent))
    }

    pub fn check(self, agents: usize) -> Result<Self> {
        match self {
            Observable::Local(_, a) if a > agents => Err(Error::AgentOutOfRange { agent: a, agents }),
            _ => Ok(self),
        }
    }

    pub fn read(self, state: &MeanState) -> f64 {
        match self {
            Observable::Local(family, agent) => state.get(family, agent),
            Observable::FMean => global_means(state).0,
            Observable::GMean => global_means(state).1,
        }
    }

    /// Compact label, e.g. `G6`.
    pub fn label(self) -> String {
        match self {
            Observable::Local(family, agent) => format!("{}{agent}", family.label().to_uppercase()),
            Observable::FMean => "F_mean".into(),
            Observable::GMean => "G_mean".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Asymptote {
    pub value: f64,
    /// Time at which the run stopped.
    pub time: f64,
    pub converged: bool,
    pub means: MeanState,
}

/// Integrates until every mean changes by less than `eps` per unit time
/// (measured over one unit of time) or until `t_cap`.
pub fn find_asymptote(problem: &GkslProblem, observable: Observable, eps: f64, t_cap: f64) -> Result<Asymptote> {
    let observable = observable.check(problem.spec.agents())?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidGrid(format!("eps = {eps} must be positive")));
    }
    let rho0 = build_initial_density(&problem.init, problem.init_kind)?;
    let mut integ = GkslIntegrator::new(&rho0, &problem.spec, &problem.channels, problem.dt)?;
    let per_unit = super::integrate::steps_per_output(problem.dt, 1.0)?;
    let units = t_cap.floor() as usize;
    let mut prev = integ.means();
    let mut converged = false;
    for _ in 0..units {
        integ.advance(per_unit);
        let cur = integ.means();
        let change = prev
            .flat()
            .iter()
            .zip(cur.flat())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        prev = cur;
        if change < eps {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("no asymptote within t_cap = {t_cap} (eps = {eps})");
    }
    Ok(Asymptote {
        value: observable.read(&prev),
        time: integ.time(),
        converged,
        means: prev,
    })
}

/// A scalar of a [`GkslProblem`] addressed by a dotted path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// 1-based position in the channel list
    ChannelStrength(usize),
    Omega(Family, usize),
    Init(Family, usize),
}

impl SweepParam {
    /// `gksl.channels.<i>.strength`, `network.omega_f.<a>`,
    /// `network.omega_g.<a>`, `init.f0.<a>` or `init.g0.<a>` (1-based).
    pub fn parse(path: &str, problem: &GkslProblem) -> Result<Self> {
        let unknown = || Error::UnknownParameter(path.to_string());
        let parts: Vec<&str> = path.split('.').collect();
        let index = |s: &str| s.parse::<usize>().ok().filter(|&i| i >= 1).ok_or_else(unknown);
        let agents = problem.spec.agents();
        let param = match parts.as_slice() {
            ["gksl", "channels", i, "strength"] => {
                let i = index(i)?;
                if i > problem.channels.len() {
                    return Err(unknown());
                }
                SweepParam::ChannelStrength(i)
            }
            ["network", field, a] => {
                let family = match *field {
                    "omega_f" => Family::Fake,
                    "omega_g" => Family::Good,
                    _ => return Err(unknown()),
                };
                SweepParam::Omega(family, index(a)?)
            }
            ["init", field, a] => {
                let family = match *field {
                    "f0" => Family::Fake,
                    "g0" => Family::Good,
                    _ => return Err(unknown()),
                };
                SweepParam::Init(family, index(a)?)
            }
            _ => return Err(unknown()),
        };
        match param {
            SweepParam::Omega(_, a) | SweepParam::Init(_, a) if a > agents => Err(unknown()),
            p => Ok(p),
        }
    }

    pub fn apply(self, problem: &GkslProblem, value: f64) -> Result<GkslProblem> {
        let mut p = problem.clone();
        match self {
            SweepParam::ChannelStrength(i) => p.channels.set_strength(i - 1, value)?,
            SweepParam::Omega(Family::Fake, a) => p.spec.omega_f[a - 1] = value,
            SweepParam::Omega(Family::Good, a) => p.spec.omega_g[a - 1] = value,
            SweepParam::Init(Family::Fake, a) => p.init.f[a - 1] = value,
            SweepParam::Init(Family::Good, a) => p.init.g[a - 1] = value,
        }
        p.spec.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub asymptote: Asymptote,
}

/// One [`find_asymptote`] run per value, in input order. Points run on the
/// ambient rayon pool.
pub fn sweep(
    problem: &GkslProblem,
    param: SweepParam,
    values: &[f64],
    observable: Observable,
    eps: f64,
    t_cap: f64,
) -> Result<Vec<SweepPoint>> {
    values
        .par_iter()
        .map(|&value| {
            let p = param.apply(problem, value)?;
            Ok(SweepPoint {
                value,
                asymptote: find_asymptote(&p, observable, eps, t_cap)?,
            })
        })
        .collect()
}
