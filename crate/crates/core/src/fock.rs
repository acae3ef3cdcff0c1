//! Fermionic Fock space for `M` modes.
//!
//! Modes are numbered 1..=M in flat order: the fake modes of agents 1..N
//! followed by the good modes of agents 1..N. Basis vector `index` has mode
//! `k` occupied iff bit `k - 1` of `index` is set (little-endian). Ladder
//! operators use the Jordan–Wigner construction over this flat order, so the
//! canonical anticommutation relations hold with integer matrix entries.

use num_complex::Complex64;

use crate::error::{Error, Family, Result};
use crate::sparse::SparseOp;

/// Largest mode count for which Fock-space operators are materialized.
pub const MAX_MODES: usize = 14;

/// Fock-space operators are sparse matrices in the occupation basis.
pub type ModeOperator = SparseOp;

/// One fermionic mode, addressed by family and 1-based agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub kind: Family,
    pub agent: usize,
}

impl ModeIndex {
    pub fn fake(agent: usize) -> Self {
        Self {
            kind: Family::Fake,
            agent,
        }
    }

    pub fn good(agent: usize) -> Self {
        Self {
            kind: Family::Good,
            agent,
        }
    }

    /// 1-based flat index for a network of `agents` agents.
    pub fn flat(self, agents: usize) -> usize {
        match self.kind {
            Family::Fake => self.agent,
            Family::Good => agents + self.agent,
        }
    }

    /// 0-based bit position in a basis index.
    pub fn bit(self, agents: usize) -> usize {
        self.flat(agents) - 1
    }
}

/// A Fock basis configuration together with its integer label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasisIndex {
    pub occupation: Vec<bool>,
    pub index: usize,
}

impl FockBasisIndex {
    pub fn from_index(index: usize, modes: usize) -> Result<Self> {
        check_modes(modes)?;
        if index >> modes != 0 {
            return Err(Error::DimensionMismatch {
                expected: 1 << modes,
                got: index,
            });
        }
        let occupation = (0..modes).map(|b| index >> b & 1 == 1).collect();
        Ok(Self { occupation, index })
    }

    pub fn from_occupation(occupation: &[bool]) -> Result<Self> {
        check_modes(occupation.len())?;
        let index = occupation
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .fold(0usize, |acc, (b, _)| acc | 1 << b);
        Ok(Self {
            occupation: occupation.to_vec(),
            index,
        })
    }

    pub fn modes(&self) -> usize {
        self.occupation.len()
    }
}

fn check_modes(modes: usize) -> Result<()> {
    if modes == 0 {
        return Err(Error::ModeOutOfRange { index: 0, modes });
    }
    if modes > MAX_MODES {
        return Err(Error::DimensionCap {
            modes,
            cap: MAX_MODES,
        });
    }
    Ok(())
}

fn check_mode(k: usize, modes: usize) -> Result<()> {
    check_modes(modes)?;
    if k == 0 || k > modes {
        return Err(Error::ModeOutOfRange { index: k, modes });
    }
    Ok(())
}

/// Jordan–Wigner parity of the modes below `bit` in configuration `state`.
pub(crate) fn parity_below(state: usize, bit: usize) -> f64 {
    if (state & ((1 << bit) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Annihilation operator for flat mode `k` (1-based) among `modes` modes.
pub fn annihilator(k: usize, modes: usize) -> Result<ModeOperator> {
    check_mode(k, modes)?;
    let bit = k - 1;
    let dim = 1usize << modes;
    let triplets = (0..dim)
        .filter(|s| s >> bit & 1 == 1)
        .map(|s| (s ^ 1 << bit, s, Complex64::new(parity_below(s, bit), 0.0)));
    Ok(SparseOp::from_triplets(dim, triplets))
}

pub fn creator(k: usize, modes: usize) -> Result<ModeOperator> {
    Ok(annihilator(k, modes)?.adjoint())
}

/// Number operator `a_k† a_k`: a diagonal 0/1 projection.
pub fn number_operator(k: usize, modes: usize) -> Result<ModeOperator> {
    check_mode(k, modes)?;
    let bit = k - 1;
    Ok(SparseOp::diagonal(
        (0..1usize << modes).map(|s| Complex64::new((s >> bit & 1) as f64, 0.0)),
    ))
}

/// Total number operator over all modes.
pub fn total_number(modes: usize) -> Result<ModeOperator> {
    check_modes(modes)?;
    Ok(SparseOp::diagonal(
        (0..1usize << modes).map(|s| Complex64::new(s.count_ones() as f64, 0.0)),
    ))
}

/// Basis configuration with fake occupations `n` and good occupations `m`.
pub fn basis_index(n: &[u8], m: &[u8]) -> Result<FockBasisIndex> {
    if n.len() != m.len() {
        return Err(Error::DimensionMismatch {
            expected: n.len(),
            got: m.len(),
        });
    }
    let mut occupation = Vec::with_capacity(2 * n.len());
    for &bit in n.iter().chain(m) {
        match bit {
            0 => occupation.push(false),
            1 => occupation.push(true),
            other => {
                return Err(Error::InvalidInitialState(format!(
                    "occupation {other} is not 0 or 1"
                )))
            }
        }
    }
    FockBasisIndex::from_occupation(&occupation)
}

/// Worst entrywise deviations from the canonical anticommutation relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarReport {
    pub modes: usize,
    /// max over j,k of |{a_j, a_k†} - δ_jk I|
    pub mixed_deviation: f64,
    /// max over j,k of |{a_j, a_k}|
    pub pure_deviation: f64,
}

impl CarReport {
    pub fn max_deviation(&self) -> f64 {
        self.mixed_deviation.max(self.pure_deviation)
    }
}

/// Exhaustively checks every anticommutator among the ladder operators.
pub fn check_car(modes: usize) -> Result<CarReport> {
    if modes == 0 || modes > 8 {
        return Err(Error::DimensionCap { modes, cap: 8 });
    }
    let lowering: Vec<_> = (1..=modes).map(|k| annihilator(k, modes)).collect::<Result<_>>()?;
    let raising: Vec<_> = lowering.iter().map(SparseOp::adjoint).collect();
    let identity = SparseOp::identity(1 << modes);
    let mut report = CarReport {
        modes,
        mixed_deviation: 0.0,
        pure_deviation: 0.0,
    };
    for (j, aj) in lowering.iter().enumerate() {
        for (k, ak) in lowering.iter().enumerate() {
            let mut mixed = aj.anticommutator(&raising[k]);
            if j == k {
                mixed = mixed.sub(&identity);
            }
            report.mixed_deviation = report.mixed_deviation.max(mixed.max_abs());
            report.pure_deviation = report.pure_deviation.max(aj.anticommutator(ak).max_abs());
        }
    }
    Ok(report)
}
