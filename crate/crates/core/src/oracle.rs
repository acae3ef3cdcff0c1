//! Brute-force references for small systems. They share no algorithmic
//! path with the production engines: the Heisenberg oracle exponentiates
//! the full Fock-space Hamiltonian, the GKSL oracle the dense superoperator,
//! and the absorbing solver inverts the transient block of the rate matrix.

use std::collections::{BTreeMap, HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::basis_index;
use crate::gksl::{DensityState, LindbladSet};
use crate::heisenberg::MeanState;
use crate::model::{build_hamiltonian_matrix, free_energies, NetworkSpec};

/// Largest mode count for which the oracles build dense matrices.
pub const HEISENBERG_MODE_CAP: usize = 8;
pub const GKSL_MODE_CAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OracleReport {
    pub max_abs_error: f64,
    pub compared_observables: usize,
}

impl OracleReport {
    pub fn compare(&mut self, expected: &MeanState, got: &MeanState) {
        for (a, b) in expected.flat().iter().zip(got.flat()) {
            self.max_abs_error = self.max_abs_error.max((a - b).abs());
            self.compared_observables += 1;
        }
    }
}

fn means_from_populations(pops: impl Iterator<Item = f64>, modes: usize) -> MeanState {
    let mut x = vec![0.0; modes];
    for (s, p) in pops.enumerate() {
        for (b, xb) in x.iter_mut().enumerate() {
            if s >> b & 1 == 1 {
                *xb += p;
            }
        }
    }
    MeanState::from_flat(&x)
}

/// Means of `exp(-iHt)|n, m⟩` for occupation bits `n` (fake) and `m` (good).
pub fn brute_force_heisenberg(spec: &NetworkSpec, n: &[u8], m: &[u8], t: f64) -> Result<MeanState> {
    let modes = spec.modes();
    if modes > HEISENBERG_MODE_CAP {
        return Err(Error::DimensionCap {
            modes,
            cap: HEISENBERG_MODE_CAP,
        });
    }
    let start = basis_index(n, m)?;
    if n.len() != spec.agents() {
        return Err(Error::DimensionMismatch {
            expected: spec.agents(),
            got: n.len(),
        });
    }
    let h = build_hamiltonian_matrix(spec)?.to_dense();
    let u = (h * Complex64::new(0.0, -t)).exp();
    Ok(means_from_populations(
        u.column(start.index).iter().map(|z| z.norm_sqr()),
        modes,
    ))
}

/// `exp(tS) vec(ρ₀)` with `S` the column-stacked superoperator of the GKSL
/// generator with `H = H₀`.
pub fn brute_force_gksl(rho0: &DMatrix<Complex64>, spec: &NetworkSpec, set: &LindbladSet, t: f64) -> Result<DensityState> {
    let mut grid = brute_force_gksl_grid(rho0, spec, set, t, 1)?;
    Ok(grid.pop().expect("grid holds the final state"))
}

/// States at `k * dt` for `k = 0..=steps`, from powers of `exp(dt S)`.
pub fn brute_force_gksl_grid(
    rho0: &DMatrix<Complex64>,
    spec: &NetworkSpec,
    set: &LindbladSet,
    dt: f64,
    steps: usize,
) -> Result<Vec<DensityState>> {
    let modes = spec.modes();
    if modes > GKSL_MODE_CAP {
        return Err(Error::DimensionCap {
            modes,
            cap: GKSL_MODE_CAP,
        });
    }
    let dim = 1usize << modes;
    if rho0.nrows() != dim || rho0.ncols() != dim || set.agents() != spec.agents() {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: rho0.nrows(),
        });
    }
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let h = DMatrix::from_diagonal(&DVector::from_iterator(
        dim,
        free_energies(spec).into_iter().map(|e| Complex64::new(e, 0.0)),
    ));
    let i = Complex64::new(0.0, 1.0);
    // vec(AρB) = (Bᵀ ⊗ A) vec(ρ)
    let mut s = (id.kronecker(&h) - h.transpose().kronecker(&id)) * (-i);
    for op in set.operators()? {
        let l = op.to_dense();
        let k = l.adjoint() * &l;
        s += l.conjugate().kronecker(&l);
        s -= (id.kronecker(&k) + k.transpose().kronecker(&id)) * Complex64::new(0.5, 0.0);
    }
    let step = (s * Complex64::new(dt, 0.0)).exp();
    let mut v = DVector::from_column_slice(rho0.as_slice());
    let mut out = vec![DensityState::Dense(rho0.clone())];
    for _ in 0..steps {
        v = &step * v;
        out.push(DensityState::Dense(DMatrix::from_column_slice(dim, dim, v.as_slice())));
    }
    Ok(out)
}

/// Limiting populations of the master equation whose rates are read off
/// the Lindblad operators' matrix elements, `p_A = p0_A + Q_AT (-Q_TT)⁻¹ p0_T`
/// over transient (T) and absorbing (A) configurations reachable from the
/// support of `p0`.
pub fn absorbing_populations(set: &LindbladSet, p0: &[f64]) -> Result<Vec<f64>> {
    let dim = 1usize << (2 * set.agents());
    if p0.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p0.len(),
        });
    }
    // column -> [(row, rate)] over all operators
    let mut out_edges: HashMap<usize, BTreeMap<usize, f64>> = HashMap::new();
    for op in set.operators()? {
        for (r, c, v) in op.triplets() {
            *out_edges.entry(c).or_default().entry(r).or_insert(0.0) += v.norm_sqr();
        }
    }
    let mut order = Vec::new();
    let mut seen = HashMap::new();
    let mut queue: VecDeque<usize> = (0..dim).filter(|&s| p0[s] != 0.0).collect();
    for &s in &queue {
        seen.insert(s, ());
    }
    while let Some(s) = queue.pop_front() {
        order.push(s);
        if let Some(edges) = out_edges.get(&s) {
            for &t in edges.keys() {
                if seen.insert(t, ()).is_none() {
                    queue.push_back(t);
                }
            }
        }
    }
    let exits = |s: usize| out_edges.get(&s).map_or(0.0, |e| e.values().sum::<f64>());
    let transient: Vec<usize> = order.iter().copied().filter(|&s| exits(s) > 0.0).collect();
    let absorbing: Vec<usize> = order.iter().copied().filter(|&s| exits(s) == 0.0).collect();
    let t_pos: HashMap<usize, usize> = transient.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let a_pos: HashMap<usize, usize> = absorbing.iter().enumerate().map(|(i, &s)| (s, i)).collect();

    let nt = transient.len();
    let mut q_tt = DMatrix::<f64>::zeros(nt, nt);
    let mut q_at = DMatrix::<f64>::zeros(absorbing.len(), nt);
    for (j, &s) in transient.iter().enumerate() {
        q_tt[(j, j)] -= exits(s);
        for (&t, &rate) in &out_edges[&s] {
            if let Some(&i) = t_pos.get(&t) {
                q_tt[(i, j)] += rate;
            } else {
                q_at[(a_pos[&t], j)] += rate;
            }
        }
    }
    let p0_t = DVector::from_iterator(nt, transient.iter().map(|&s| p0[s]));
    let time_spent = (-q_tt)
        .lu()
        .solve(&p0_t)
        .ok_or_else(|| Error::InvalidChannel("transient block is singular (no absorbing limit)".into()))?;
    let flux = q_at * time_spent;
    let mut out = vec![0.0; dim];
    for (i, &s) in absorbing.iter().enumerate() {
        out[s] = p0[s] + flux[i];
    }
    Ok(out)
}

/// Means of [`absorbing_populations`].
pub fn absorbing_means(set: &LindbladSet, p0: &[f64]) -> Result<MeanState> {
    let p = absorbing_populations(set, p0)?;
    Ok(means_from_populations(p.into_iter(), 2 * set.agents()))
}
