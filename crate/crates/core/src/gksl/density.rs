use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Family, Result};
use crate::fock::MAX_MODES;
use crate::heisenberg::MeanState;

/// How requested initial means are realized as a density operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InitialStateKind {
    /// Independent modes: `⊗ diag(1 - x_k, x_k)`.
    #[default]
    Product,
    /// At most one packet: configuration "only mode k occupied" with
    /// probability `x_k`, the vacuum with `1 - Σ x_k`. Same populations as
    /// the pure state `(√(1-Σx) + Σ √x_k a_k†)|0⟩`.
    SingleExcitation,
}

/// A density operator over the `2^(2N)` occupation configurations.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityState {
    Dense(DMatrix<Complex64>),
    /// Diagonal in the occupation basis.
    Populations(Vec<f64>),
}

fn agents_for_dim(dim: usize) -> usize {
    dim.trailing_zeros() as usize / 2
}

impl DensityState {
    pub fn dim(&self) -> usize {
        match self {
            DensityState::Dense(m) => m.nrows(),
            DensityState::Populations(p) => p.len(),
        }
    }

    pub fn agents(&self) -> usize {
        agents_for_dim(self.dim())
    }

    pub fn trace(&self) -> f64 {
        match self {
            DensityState::Dense(m) => m.diagonal().iter().map(|z| z.re).sum(),
            DensityState::Populations(p) => p.iter().sum(),
        }
    }

    /// Diagonal entries (real parts for the dense form).
    pub fn populations(&self) -> Vec<f64> {
        match self {
            DensityState::Dense(m) => m.diagonal().iter().map(|z| z.re).collect(),
            DensityState::Populations(p) => p.clone(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match self {
            DensityState::Dense(m) => m.clone(),
            DensityState::Populations(p) => {
                DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    p.len(),
                    p.iter().map(|&x| Complex64::new(x, 0.0)),
                ))
            }
        }
    }

    /// Pure-state projector `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &[Complex64]) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi);
        DensityState::Dense(&v * v.adjoint())
    }
}

pub fn build_initial_density(init: &MeanState, kind: InitialStateKind) -> Result<DensityState> {
    let n = init.agents();
    if n == 0 || 2 * n > MAX_MODES {
        return Err(Error::DimensionCap {
            modes: 2 * n,
            cap: MAX_MODES,
        });
    }
    for (family, values) in [(Family::Fake, &init.f), (Family::Good, &init.g)] {
        if let Some((i, &value)) = values.iter().enumerate().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
            return Err(Error::MeanOutOfRange {
                family,
                agent: i + 1,
                value,
            });
        }
    }
    let x = init.flat();
    let dim = 1usize << (2 * n);
    let pops = match kind {
        InitialStateKind::Product => (0..dim)
            .map(|s| {
                x.iter()
                    .enumerate()
                    .map(|(b, &xb)| if s >> b & 1 == 1 { xb } else { 1.0 - xb })
                    .product()
            })
            .collect(),
        InitialStateKind::SingleExcitation => {
            let total: f64 = x.iter().sum();
            if total > 1.0 + 1e-12 {
                return Err(Error::InvalidInitialState(format!(
                    "single-excitation state needs total occupation <= 1, got {total}"
                )));
            }
            let mut p = vec![0.0; dim];
            p[0] = (1.0 - total).max(0.0);
            for (b, &xb) in x.iter().enumerate() {
                p[1 << b] = xb;
            }
            p
        }
    };
    Ok(DensityState::Populations(pops))
}

/// `F_α = tr(ρ F̂_α)`, `G_α = tr(ρ Ĝ_α)`.
pub fn mean_values(rho: &DensityState) -> MeanState {
    let pops = rho.populations();
    let modes = 2 * rho.agents();
    let mut x = vec![0.0; modes];
    for (s, &p) in pops.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (b, xb) in x.iter_mut().enumerate() {
            if s >> b & 1 == 1 {
                *xb += p;
            }
        }
    }
    MeanState::from_flat(&x)
}
