//! First-order split of one short GKSL step acting on a pure state into a
//! continuous drift `A = 1 - (dt/2) Σ L†L` and jumps `B_k = √dt L_k`.

use num_complex::Complex64;

use super::channels::LindbladSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct JumpDrift {
    /// `‖AΨ‖²`
    pub p_drift: f64,
    /// `dt ‖L_k Ψ‖²`, in channel order
    pub p_jumps: Vec<f64>,
}

impl JumpDrift {
    pub fn total(&self) -> f64 {
        self.p_drift + self.p_jumps.iter().sum::<f64>()
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn jump_drift_probabilities(psi: &[Complex64], set: &LindbladSet, dt: f64) -> Result<JumpDrift> {
    let dim = 1usize << (2 * set.agents());
    if psi.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: psi.len(),
        });
    }
    let norm = norm_sqr(psi).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized { norm });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidGrid(format!("dt = {dt} must be positive")));
    }
    let mut drift: Vec<Complex64> = psi.to_vec();
    let mut p_jumps = Vec::with_capacity(set.len());
    for op in set.operators()? {
        let l_psi = op.apply(psi);
        p_jumps.push(dt * norm_sqr(&l_psi));
        let ll_psi = op.adjoint().apply(&l_psi);
        for (d, x) in drift.iter_mut().zip(ll_psi) {
            *d -= x * (0.5 * dt);
        }
    }
    Ok(JumpDrift {
        p_drift: norm_sqr(&drift),
        p_jumps,
    })
}
