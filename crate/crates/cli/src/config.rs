//! TOML run configuration.

use opdyn::gksl::{
    build_lindblads, ChannelKind, ChannelSpec, GkslProblem, InitialStateKind, Observable, SweepParam, DEFAULT_EPS,
    DEFAULT_T_CAP,
};
use opdyn::hrho::{HrhoSchedule, Rule, RuleSpec};
use opdyn::{MeanState, NetworkSpec, ValidationError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(#[from] toml::de::Error),
    #[error("`{path}`: {message}")]
    Invalid { path: String, message: String },
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
}

fn invalid(path: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub network: NetworkDoc,
    pub init: InitDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hrho: Option<HrhoDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gksl: Option<GkslDoc>,
    pub output: OutputDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub omega_f: Vec<f64>,
    pub omega_g: Vec<f64>,
    pub lambda: Vec<f64>,
    pub p_f: Vec<Vec<f64>>,
    pub p_g: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitDoc {
    pub f0: Vec<f64>,
    pub g0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HrhoDoc {
    pub rule: u8,
    pub kappa: Vec<f64>,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateDoc {
    #[default]
    Product,
    SingleExcitation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GkslDoc {
    pub dt: f64,
    /// Cap on the asymptote search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Asymptote tolerance per unit time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default)]
    pub initial_state: InitialStateDoc,
    pub channels: Vec<ChannelDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKindDoc {
    TransferGood,
    TransferFake,
    SwitchFakeToGood,
    SwitchGoodToFake,
    PumpGood,
    PumpFake,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    pub kind: ChannelKindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub src: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dst: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<usize>,
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDoc {
    pub dt_out: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDoc {
    pub param: String,
    pub values: Vec<f64>,
    pub observable: String,
}

impl ChannelDoc {
    pub fn from_spec(spec: &ChannelSpec) -> Self {
        use ChannelKind::*;
        let (kind, src, dst, agent) = match spec.kind {
            TransferGood { src, dst } => (ChannelKindDoc::TransferGood, Some(src), Some(dst), None),
            TransferFake { src, dst } => (ChannelKindDoc::TransferFake, Some(src), Some(dst), None),
            SwitchFakeToGood { agent } => (ChannelKindDoc::SwitchFakeToGood, None, None, Some(agent)),
            SwitchGoodToFake { agent } => (ChannelKindDoc::SwitchGoodToFake, None, None, Some(agent)),
            PumpGood { agent } => (ChannelKindDoc::PumpGood, None, None, Some(agent)),
            PumpFake { agent } => (ChannelKindDoc::PumpFake, None, None, Some(agent)),
        };
        Self {
            kind,
            src,
            dst,
            agent,
            strength: spec.strength,
        }
    }

    fn to_spec(&self, path: &str) -> Result<ChannelSpec, ConfigError> {
        let transfer = matches!(self.kind, ChannelKindDoc::TransferGood | ChannelKindDoc::TransferFake);
        let need = |v: Option<usize>, name: &str| v.ok_or_else(|| invalid(format!("{path}.{name}"), "missing field"));
        let forbid = |v: Option<usize>, name: &str| match v {
            Some(_) => Err(invalid(format!("{path}.{name}"), "not allowed for this channel kind")),
            None => Ok(()),
        };
        let kind = if transfer {
            forbid(self.agent, "agent")?;
            let (src, dst) = (need(self.src, "src")?, need(self.dst, "dst")?);
            if self.kind == ChannelKindDoc::TransferGood {
                ChannelKind::TransferGood { src, dst }
            } else {
                ChannelKind::TransferFake { src, dst }
            }
        } else {
            forbid(self.src, "src")?;
            forbid(self.dst, "dst")?;
            let agent = need(self.agent, "agent")?;
            match self.kind {
                ChannelKindDoc::SwitchFakeToGood => ChannelKind::SwitchFakeToGood { agent },
                ChannelKindDoc::SwitchGoodToFake => ChannelKind::SwitchGoodToFake { agent },
                ChannelKindDoc::PumpGood => ChannelKind::PumpGood { agent },
                _ => ChannelKind::PumpFake { agent },
            }
        };
        Ok(ChannelSpec::new(kind, self.strength))
    }
}

fn validation_path(e: &ValidationError) -> String {
    use ValidationError::*;
    match e {
        NoAgents => "network".into(),
        Length { field, .. } | NonFinite { field, .. } => format!("network.{field}"),
        Asymmetric { family, row, col, .. } | NegativeCoupling { family, row, col, .. } => {
            format!("network.p_{family}[{row}][{col}]")
        }
        NonzeroDiagonal { family, agent, .. } => format!("network.p_{family}[{agent}][{agent}]"),
        NonPositiveOmega { family, agent, .. } => format!("network.omega_{family}[{agent}]"),
        NegativeLambda { agent, .. } => format!("network.lambda[{agent}]"),
    }
}

fn positive(value: f64, path: &str) -> Result<f64, ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(path, format!("{value} must be positive")))
    }
}

impl ConfigDocument {
    pub fn network_spec(&self) -> Result<NetworkSpec, ConfigError> {
        let n = &self.network;
        let spec = NetworkSpec {
            omega_f: n.omega_f.clone(),
            omega_g: n.omega_g.clone(),
            lambda: n.lambda.clone(),
            p_f: n.p_f.clone(),
            p_g: n.p_g.clone(),
        };
        spec.validate().map_err(|e| invalid(validation_path(&e), &e))?;
        Ok(spec)
    }

    pub fn initial_means(&self) -> Result<MeanState, ConfigError> {
        let agents = self.network.omega_f.len();
        for (name, v) in [("f0", &self.init.f0), ("g0", &self.init.g0)] {
            if v.len() != agents {
                return Err(invalid(
                    format!("init.{name}"),
                    format!("has length {}, expected {agents}", v.len()),
                ));
            }
            if let Some(i) = v.iter().position(|x| !(0.0..=1.0).contains(x)) {
                return Err(invalid(format!("init.{name}[{}]", i + 1), format!("{} is outside [0, 1]", v[i])));
            }
        }
        MeanState::new(self.init.f0.clone(), self.init.g0.clone()).map_err(|e| invalid("init", e))
    }

    pub fn schedule(&self) -> Result<HrhoSchedule, ConfigError> {
        let t_max = self.output.t_max;
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(invalid("output.t_max", format!("{t_max} must be nonnegative")));
        }
        Ok(HrhoSchedule {
            t_max,
            dt_out: positive(self.output.dt_out, "output.dt_out")?,
        })
    }

    pub fn rule_spec(&self) -> Result<RuleSpec, ConfigError> {
        let h = self.hrho.as_ref().ok_or(ConfigError::MissingSection("hrho"))?;
        let rule = Rule::try_from(h.rule).map_err(|e| invalid("hrho.rule", e))?;
        let spec = RuleSpec {
            rule,
            kappa: h.kappa.clone(),
            tau: h.tau,
        };
        if h.kappa.len() != self.network.omega_f.len() {
            return Err(invalid(
                "hrho.kappa",
                format!("has length {}, expected {}", h.kappa.len(), self.network.omega_f.len()),
            ));
        }
        spec.validate(h.kappa.len()).map_err(|e| invalid("hrho", e))?;
        Ok(spec)
    }

    pub fn gksl_problem(&self) -> Result<GkslProblem, ConfigError> {
        let g = self.gksl.as_ref().ok_or(ConfigError::MissingSection("gksl"))?;
        let spec = self.network_spec()?;
        let channels = g
            .channels
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_spec(&format!("gksl.channels[{}]", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, c) in channels.iter().enumerate() {
            build_lindblads(spec.agents(), vec![*c]).map_err(|e| invalid(format!("gksl.channels[{}]", i + 1), e))?;
        }
        let channels = build_lindblads(spec.agents(), channels).map_err(|e| invalid("gksl.channels", e))?;
        let init = self.initial_means()?;
        let init_kind = match g.initial_state {
            InitialStateDoc::Product => InitialStateKind::Product,
            InitialStateDoc::SingleExcitation => InitialStateKind::SingleExcitation,
        };
        if init_kind == InitialStateKind::SingleExcitation && init.total() > 1.0 + 1e-12 {
            return Err(invalid(
                "gksl.initial_state",
                format!("single_excitation needs total occupation <= 1, got {}", init.total()),
            ));
        }
        Ok(GkslProblem {
            spec,
            init,
            init_kind,
            channels,
            dt: positive(g.dt, "gksl.dt")?,
        })
    }

    /// `(eps, t_cap)` of the asymptote search.
    pub fn asymptote_limits(&self) -> Result<(f64, f64), ConfigError> {
        let g = self.gksl.as_ref().ok_or(ConfigError::MissingSection("gksl"))?;
        Ok((
            positive(g.eps.unwrap_or(DEFAULT_EPS), "gksl.eps")?,
            positive(g.t_max.unwrap_or(DEFAULT_T_CAP), "gksl.t_max")?,
        ))
    }

    /// Resolved sweep section: parameter, values and observable.
    pub fn sweep_plan(&self) -> Result<Option<(SweepParam, Vec<f64>, Observable)>, ConfigError> {
        let Some(s) = &self.sweep else { return Ok(None) };
        let problem = self.gksl_problem()?;
        let param = SweepParam::parse(&s.param, &problem).map_err(|e| invalid("sweep.param", e))?;
        let observable = Observable::parse(&s.observable)
            .and_then(|o| o.check(problem.spec.agents()))
            .map_err(|e| invalid("sweep.observable", e))?;
        if s.values.is_empty() {
            return Err(invalid("sweep.values", "must not be empty"));
        }
        Ok(Some((param, s.values.clone(), observable)))
    }

    /// Checks every section that is present.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.network_spec()?;
        self.initial_means()?;
        self.schedule()?;
        if self.hrho.is_some() {
            self.rule_spec()?;
        }
        if self.gksl.is_some() {
            self.gksl_problem()?;
            self.asymptote_limits()?;
        } else if self.sweep.is_some() {
            return Err(ConfigError::MissingSection("gksl"));
        }
        self.sweep_plan()?;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config documents serialize")
    }

    pub fn from_parts(spec: &NetworkSpec, init: &MeanState, output: OutputDoc) -> Self {
        Self {
            network: NetworkDoc {
                omega_f: spec.omega_f.clone(),
                omega_g: spec.omega_g.clone(),
                lambda: spec.lambda.clone(),
                p_f: spec.p_f.clone(),
                p_g: spec.p_g.clone(),
            },
            init: InitDoc {
                f0: init.f.clone(),
                g0: init.g.clone(),
            },
            hrho: None,
            gksl: None,
            output,
            sweep: None,
        }
    }
}

/// Parses and fully validates a configuration.
pub fn parse_config(text: &str) -> Result<ConfigDocument, ConfigError> {
    let doc: ConfigDocument = toml::from_str(text)?;
    doc.validate()?;
    Ok(doc)
}

