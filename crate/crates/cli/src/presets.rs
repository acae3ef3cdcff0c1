//! Named configurations for the reference runs.

use opdyn::gksl::GkslProblem;
use opdyn::presets as p;

use crate::config::{ChannelDoc, ConfigDocument, GkslDoc, HrhoDoc, InitialStateDoc, OutputDoc, SweepDoc};

/// Which engine a configuration is meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Heisenberg,
    Hrho,
    Gksl,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetName {
    NoRule,
    Rule(u8),
    Exp1,
    Exp1Sweep,
    Exp2,
    Exp3a,
    Exp3b,
}

impl PresetName {
    pub const ALL: [PresetName; 12] = [
        PresetName::NoRule,
        PresetName::Rule(1),
        PresetName::Rule(2),
        PresetName::Rule(3),
        PresetName::Rule(4),
        PresetName::Rule(5),
        PresetName::Rule(6),
        PresetName::Exp1,
        PresetName::Exp1Sweep,
        PresetName::Exp2,
        PresetName::Exp3a,
        PresetName::Exp3b,
    ];

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn name(self) -> String {
        match self {
            PresetName::NoRule => "norule".into(),
            PresetName::Rule(k) => format!("rule{k}"),
            PresetName::Exp1 => "exp1".into(),
            PresetName::Exp1Sweep => "exp1-sweep".into(),
            PresetName::Exp2 => "exp2".into(),
            PresetName::Exp3a => "exp3a".into(),
            PresetName::Exp3b => "exp3b".into(),
        }
    }

    pub fn command(self) -> CommandKind {
        match self {
            PresetName::NoRule => CommandKind::Heisenberg,
            PresetName::Rule(_) => CommandKind::Hrho,
            PresetName::Exp1Sweep => CommandKind::Sweep,
            _ => CommandKind::Gksl,
        }
    }

    pub fn document(self) -> ConfigDocument {
        match self {
            PresetName::NoRule => three_layer(None),
            PresetName::Rule(k) => three_layer(Some(k)),
            PresetName::Exp1 => gksl(&p::experiment_one(), p::GKSL_T_MAX, p::GKSL_DT_OUT),
            PresetName::Exp1Sweep => {
                let mut doc = gksl(&p::experiment_one(), p::GKSL_T_MAX, p::GKSL_DT_OUT);
                doc.sweep = Some(SweepDoc {
                    param: format!("gksl.channels.{}.strength", p::SWITCH_GOOD_CHANNEL),
                    values: p::EXP1_SWEEP_VALUES.to_vec(),
                    observable: "G_6".into(),
                });
                doc
            }
            PresetName::Exp2 => gksl(&p::experiment_two(), p::GKSL_T_MAX, p::GKSL_DT_OUT),
            PresetName::Exp3a => gksl(&p::experiment_three(0.1), p::PUMP_T_MAX, p::PUMP_DT_OUT),
            PresetName::Exp3b => gksl(&p::experiment_three(0.5), p::PUMP_T_MAX, p::PUMP_DT_OUT),
        }
    }
}

fn three_layer(rule: Option<u8>) -> ConfigDocument {
    let mut doc = ConfigDocument::from_parts(
        &p::three_layer_network(),
        &p::three_layer_init(),
        OutputDoc {
            dt_out: p::THREE_LAYER_DT_OUT,
            t_max: p::THREE_LAYER_T_MAX,
        },
    );
    doc.hrho = rule.map(|rule| HrhoDoc {
        rule,
        kappa: p::rule_weights(),
        tau: p::THREE_LAYER_TAU,
    });
    doc
}

fn gksl(problem: &GkslProblem, t_max: f64, dt_out: f64) -> ConfigDocument {
    let mut doc = ConfigDocument::from_parts(&problem.spec, &problem.init, OutputDoc { dt_out, t_max });
    doc.gksl = Some(GkslDoc {
        dt: problem.dt,
        t_max: None,
        eps: None,
        initial_state: match problem.init_kind {
            opdyn::gksl::InitialStateKind::Product => InitialStateDoc::Product,
            opdyn::gksl::InitialStateKind::SingleExcitation => InitialStateDoc::SingleExcitation,
        },
        channels: problem.channels.channels().iter().map(ChannelDoc::from_spec).collect(),
    });
    doc
}
