use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{self, ModeIndex, ModeOperator};

/// Which mechanism a Lindblad operator models.
///
/// Agents are 1-based. Transfers move a packet from `src` to `dst` within
/// one family, switches convert a packet on one agent, pumps create one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    TransferGood { src: usize, dst: usize },
    TransferFake { src: usize, dst: usize },
    SwitchFakeToGood { agent: usize },
    SwitchGoodToFake { agent: usize },
    PumpGood { agent: usize },
    PumpFake { agent: usize },
}

impl ChannelKind {
    /// `(annihilated mode, created mode)`; pumps annihilate nothing.
    pub fn modes(self) -> (Option<ModeIndex>, ModeIndex) {
        use ChannelKind::*;
        match self {
            TransferGood { src, dst } => (Some(ModeIndex::good(src)), ModeIndex::good(dst)),
            TransferFake { src, dst } => (Some(ModeIndex::fake(src)), ModeIndex::fake(dst)),
            SwitchFakeToGood { agent } => (Some(ModeIndex::fake(agent)), ModeIndex::good(agent)),
            SwitchGoodToFake { agent } => (Some(ModeIndex::good(agent)), ModeIndex::fake(agent)),
            PumpGood { agent } => (None, ModeIndex::good(agent)),
            PumpFake { agent } => (None, ModeIndex::fake(agent)),
        }
    }

    pub fn is_pump(self) -> bool {
        matches!(self, ChannelKind::PumpGood { .. } | ChannelKind::PumpFake { .. })
    }

    fn agents(self) -> Vec<usize> {
        use ChannelKind::*;
        match self {
            TransferGood { src, dst } | TransferFake { src, dst } => vec![src, dst],
            SwitchFakeToGood { agent }
            | SwitchGoodToFake { agent }
            | PumpGood { agent }
            | PumpFake { agent } => vec![agent],
        }
    }
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use ChannelKind::*;
        match *self {
            TransferGood { src, dst } => write!(f, "g_{dst}† g_{src}"),
            TransferFake { src, dst } => write!(f, "f_{dst}† f_{src}"),
            SwitchFakeToGood { agent } => write!(f, "g_{agent}† f_{agent}"),
            SwitchGoodToFake { agent } => write!(f, "f_{agent}† g_{agent}"),
            PumpGood { agent } => write!(f, "g_{agent}†"),
            PumpFake { agent } => write!(f, "f_{agent}†"),
        }
    }
}

/// A Lindblad operator `strength * (monomial)`; its rate is `strength²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub strength: f64,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, strength: f64) -> Self {
        Self { kind, strength }
    }

    pub fn rate(&self) -> f64 {
        self.strength * self.strength
    }

    /// `(annihilated bit, created bit)` in a basis index of `agents` agents.
    pub fn bits(&self, agents: usize) -> (Option<usize>, usize) {
        let (src, dst) = self.kind.modes();
        (src.map(|m| m.bit(agents)), dst.bit(agents))
    }

    /// Configuration reached from `state`, if the monomial does not vanish.
    pub fn target(&self, state: usize, agents: usize) -> Option<usize> {
        let (src, dst) = self.bits(agents);
        if state >> dst & 1 == 1 {
            return None;
        }
        match src {
            Some(s) if state >> s & 1 == 0 => None,
            Some(s) => Some(state & !(1 << s) | 1 << dst),
            None => Some(state | 1 << dst),
        }
    }

    /// The operator on the Fock space of `agents` agents.
    pub fn operator(&self, agents: usize) -> Result<ModeOperator> {
        let modes = 2 * agents;
        let (src, dst) = self.kind.modes();
        let mut op = fock::creator(dst.flat(agents), modes)?;
        if let Some(src) = src {
            op = op.mul(&fock::annihilator(src.flat(agents), modes)?);
        }
        Ok(op.scale(Complex64::new(self.strength, 0.0)))
    }

    fn validate(&self, agents: usize) -> Result<()> {
        for agent in self.kind.agents() {
            if agent == 0 || agent > agents {
                return Err(Error::AgentOutOfRange { agent, agents });
            }
        }
        if let ChannelKind::TransferGood { src, dst } | ChannelKind::TransferFake { src, dst } = self.kind {
            if src == dst {
                return Err(Error::InvalidChannel(format!("transfer {} has src == dst", self.kind)));
            }
        }
        if !(self.strength.is_finite() && self.strength >= 0.0) {
            return Err(Error::InvalidChannel(format!(
                "strength {} of {} must be nonnegative",
                self.strength, self.kind
            )));
        }
        Ok(())
    }
}

/// Ordered, validated list of Lindblad channels for a network.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSet {
    agents: usize,
    channels: Vec<ChannelSpec>,
}

impl LindbladSet {
    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn channels(&self) -> &[ChannelSpec] {
        &self.channels
    }

    /// Number of Lindblad operators `N⋆`.
    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn has_pumps(&self) -> bool {
        self.channels.iter().any(|c| c.kind.is_pump())
    }

    /// Replaces the strength of the channel at 0-based `index`.
    pub fn set_strength(&mut self, index: usize, strength: f64) -> Result<()> {
        let ch = self
            .channels
            .get_mut(index)
            .ok_or_else(|| Error::InvalidChannel(format!("no channel at position {}", index + 1)))?;
        ch.strength = strength;
        ch.validate(self.agents)
    }

    pub fn operators(&self) -> Result<Vec<ModeOperator>> {
        self.channels.iter().map(|c| c.operator(self.agents)).collect()
    }
}

pub fn build_lindblads(agents: usize, channels: Vec<ChannelSpec>) -> Result<LindbladSet> {
    for ch in &channels {
        ch.validate(agents)?;
    }
    Ok(LindbladSet { agents, channels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn experiment_one_has_eighteen() {
        let set = presets::experiment_one_channels(2.0, 0.05);
        assert_eq!(set.len(), 18);
        assert!(!set.has_pumps());
        let with_pump = presets::experiment_three_channels(0.1);
        assert_eq!(with_pump.len(), 19);
        assert!(with_pump.has_pumps());
    }

    #[test]
    fn empty_set() {
        let set = build_lindblads(6, vec![]).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn rejects_bad_channels() {
        let bad = ChannelSpec::new(ChannelKind::TransferGood { src: 1, dst: 7 }, 0.5);
        assert!(matches!(build_lindblads(6, vec![bad]), Err(Error::AgentOutOfRange { agent: 7, .. })));
        let self_loop = ChannelSpec::new(ChannelKind::TransferFake { src: 2, dst: 2 }, 0.5);
        assert!(build_lindblads(6, vec![self_loop]).is_err());
        let negative = ChannelSpec::new(ChannelKind::PumpGood { agent: 1 }, -0.1);
        assert!(build_lindblads(6, vec![negative]).is_err());
    }

    #[test]
    fn operator_matches_target() {
        let agents = 2;
        let kinds = [
            ChannelKind::TransferGood { src: 1, dst: 2 },
            ChannelKind::TransferFake { src: 2, dst: 1 },
            ChannelKind::SwitchFakeToGood { agent: 1 },
            ChannelKind::SwitchGoodToFake { agent: 2 },
            ChannelKind::PumpGood { agent: 1 },
            ChannelKind::PumpFake { agent: 2 },
        ];
        for kind in kinds {
            let ch = ChannelSpec::new(kind, 0.5);
            let op = ch.operator(agents).unwrap();
            for s in 0..16 {
                let col: Vec<_> = (0..16).filter(|&r| op.get(r, s).norm() > 0.0).collect();
                match ch.target(s, agents) {
                    Some(t) => {
                        assert_eq!(col, vec![t], "{kind} from {s}");
                        assert_eq!(op.get(t, s).norm(), 0.5);
                    }
                    None => assert!(col.is_empty(), "{kind} from {s}"),
                }
            }
        }
    }
}
