//! Parameter sets of the reference experiments.

use crate::error::Family;
use crate::gksl::{build_lindblads, ChannelKind, ChannelSpec, GkslProblem, InitialStateKind, LindbladSet};
use crate::heisenberg::MeanState;
use crate::model::NetworkSpec;

/// Output spacing of the three-layer presets.
pub const THREE_LAYER_DT_OUT: f64 = 0.05;
pub const THREE_LAYER_T_MAX: f64 = 100.0;
pub const THREE_LAYER_TAU: f64 = 1.0;

/// Integrator step of the dissipative presets.
pub const GKSL_DT: f64 = 0.01;
pub const GKSL_DT_OUT: f64 = 0.5;
pub const GKSL_T_MAX: f64 = 200.0;
/// Pump rates as low as 0.01 need a long horizon to saturate.
pub const PUMP_T_MAX: f64 = 3000.0;
pub const PUMP_DT: f64 = 0.05;
pub const PUMP_DT_OUT: f64 = 1.0;

pub const EXP1_SWITCH_GOOD: f64 = 2.0;
pub const EXP1_SWITCH_FAKE: f64 = 0.05;
pub const TRANSFER: f64 = 0.5;
/// Values of the good-switch strength on agent 3 scanned by the sweep preset.
pub const EXP1_SWEEP_VALUES: [f64; 9] = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0];
/// 1-based positions of the two switches in [`experiment_one_channels`].
pub const SWITCH_GOOD_CHANNEL: usize = 17;
pub const SWITCH_FAKE_CHANNEL: usize = 18;
/// 1-based position of the fake transfer 1 -> 3.
pub const FAKE_1_3_CHANNEL: usize = 6;

/// Six agents in three layers: agent 1 is the source, agents 2 to 5 the
/// middle layer and agent 6 the receiver.
pub fn three_layer_network() -> NetworkSpec {
    let mut s = NetworkSpec {
        omega_f: vec![1.0, 1.2, 0.6, 0.6, 0.8, 0.6],
        omega_g: vec![1.0, 0.8, 0.8, 0.8, 1.2, 0.6],
        lambda: vec![0.2, 0.0, 0.2, 0.2, 0.0, 0.2],
        ..NetworkSpec::uniform(6, 1.0)
    };
    for (a, b, v) in [(1, 2, 0.5), (1, 3, 0.5), (1, 4, 0.5), (1, 5, 0.7), (3, 6, 0.3), (4, 6, 0.5), (5, 6, 0.9)] {
        s.set_link(Family::Fake, a, b, v);
    }
    for (a, b, v) in [(1, 2, 0.7), (1, 3, 0.5), (1, 4, 0.5), (1, 5, 0.5), (2, 6, 0.9), (3, 6, 0.5), (4, 6, 0.3)] {
        s.set_link(Family::Good, a, b, v);
    }
    s
}

/// Agent 1 holds half a fake and half a good packet.
pub fn three_layer_init() -> MeanState {
    source_init(0.5, 0.5)
}

/// Rule weights κ of the three-layer presets.
pub fn rule_weights() -> Vec<f64> {
    vec![1.0, 1.2, 1.2, 1.2, 1.2, 0.6]
}

fn source_init(f1: f64, g1: f64) -> MeanState {
    let mut m = MeanState::zeros(6);
    m.f[0] = f1;
    m.g[0] = g1;
    m
}

fn transfer_channels() -> Vec<ChannelSpec> {
    let mut v = Vec::with_capacity(16);
    for a in 2..=5 {
        v.push(ChannelSpec::new(ChannelKind::TransferGood { src: 1, dst: a }, TRANSFER));
    }
    for a in 2..=5 {
        v.push(ChannelSpec::new(ChannelKind::TransferFake { src: 1, dst: a }, TRANSFER));
    }
    for a in 2..=5 {
        v.push(ChannelSpec::new(ChannelKind::TransferGood { src: a, dst: 6 }, TRANSFER));
    }
    for a in 2..=5 {
        v.push(ChannelSpec::new(ChannelKind::TransferFake { src: a, dst: 6 }, TRANSFER));
    }
    v
}

/// Sixteen transfers through the middle layer, then the good switch on
/// agent 3 and the fake switch on agent 4.
pub fn experiment_one_channels(switch_good: f64, switch_fake: f64) -> LindbladSet {
    let mut v = transfer_channels();
    v.push(ChannelSpec::new(ChannelKind::SwitchFakeToGood { agent: 3 }, switch_good));
    v.push(ChannelSpec::new(ChannelKind::SwitchGoodToFake { agent: 4 }, switch_fake));
    build_lindblads(6, v).expect("preset channels are valid")
}

/// Experiment I channels with both switches off and a good pump on agent 1.
pub fn experiment_three_channels(pump: f64) -> LindbladSet {
    let mut v = experiment_one_channels(0.0, 0.0).channels().to_vec();
    v.push(ChannelSpec::new(ChannelKind::PumpGood { agent: 1 }, pump));
    build_lindblads(6, v).expect("preset channels are valid")
}

fn gksl_problem(init: MeanState, channels: LindbladSet) -> GkslProblem {
    GkslProblem {
        spec: NetworkSpec::uniform(6, 1.0),
        init,
        init_kind: InitialStateKind::SingleExcitation,
        channels,
        dt: GKSL_DT,
    }
}

pub fn experiment_one() -> GkslProblem {
    gksl_problem(
        source_init(0.5, 0.5),
        experiment_one_channels(EXP1_SWITCH_GOOD, EXP1_SWITCH_FAKE),
    )
}

/// The source leans fake and the fake route 1 -> 3 is ten times faster.
pub fn experiment_two() -> GkslProblem {
    let mut p = experiment_one();
    p.init = source_init(0.8, 0.2);
    p.channels
        .set_strength(FAKE_1_3_CHANNEL - 1, 5.0)
        .expect("channel index in range");
    p
}

pub fn experiment_three(pump: f64) -> GkslProblem {
    GkslProblem {
        dt: PUMP_DT,
        ..gksl_problem(source_init(0.5, 0.5), experiment_three_channels(pump))
    }
}
