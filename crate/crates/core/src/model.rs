//! Network specification, the single-particle matrix `V`, and the Fock-space
//! Hamiltonian.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Family, Result, ValidationError};
use crate::fock::{self, ModeIndex, ModeOperator, MAX_MODES};
use crate::sparse::SparseOp;

/// Agents, inertia parameters, switch strengths and diffusion couplings.
///
/// Agents are 1-based in every public accessor; the vectors and matrices
/// themselves are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub omega_f: Vec<f64>,
    pub omega_g: Vec<f64>,
    pub lambda: Vec<f64>,
    pub p_f: Vec<Vec<f64>>,
    pub p_g: Vec<Vec<f64>>,
}

impl NetworkSpec {
    /// A network of `agents` agents with all inertia parameters equal to
    /// `omega` and no couplings.
    pub fn uniform(agents: usize, omega: f64) -> Self {
        Self {
            omega_f: vec![omega; agents],
            omega_g: vec![omega; agents],
            lambda: vec![0.0; agents],
            p_f: vec![vec![0.0; agents]; agents],
            p_g: vec![vec![0.0; agents]; agents],
        }
    }

    pub fn agents(&self) -> usize {
        self.omega_f.len()
    }

    pub fn modes(&self) -> usize {
        2 * self.agents()
    }

    pub fn omega(&self, family: Family) -> &[f64] {
        match family {
            Family::Fake => &self.omega_f,
            Family::Good => &self.omega_g,
        }
    }

    pub fn couplings(&self, family: Family) -> &[Vec<f64>] {
        match family {
            Family::Fake => &self.p_f,
            Family::Good => &self.p_g,
        }
    }

    /// Sets a symmetric link between 1-based agents `a` and `b`.
    pub fn set_link(&mut self, family: Family, a: usize, b: usize, value: f64) {
        let p = match family {
            Family::Fake => &mut self.p_f,
            Family::Good => &mut self.p_g,
        };
        p[a - 1][b - 1] = value;
        p[b - 1][a - 1] = value;
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let n = self.agents();
        if n == 0 {
            return Err(ValidationError::NoAgents);
        }
        for (field, v) in [("omega_g", &self.omega_g), ("lambda", &self.lambda)] {
            if v.len() != n {
                return Err(ValidationError::Length {
                    field,
                    expected: n,
                    got: v.len(),
                });
            }
        }
        for (field, p) in [("p_f", &self.p_f), ("p_g", &self.p_g)] {
            if p.len() != n {
                return Err(ValidationError::Length {
                    field,
                    expected: n,
                    got: p.len(),
                });
            }
            if let Some(row) = p.iter().find(|r| r.len() != n) {
                return Err(ValidationError::Length {
                    field,
                    expected: n,
                    got: row.len(),
                });
            }
        }
        for family in [Family::Fake, Family::Good] {
            let field = match family {
                Family::Fake => "omega_f",
                Family::Good => "omega_g",
            };
            for (i, &w) in self.omega(family).iter().enumerate() {
                if !w.is_finite() {
                    return Err(ValidationError::NonFinite { field, agent: i + 1 });
                }
                if w <= 0.0 {
                    return Err(ValidationError::NonPositiveOmega {
                        family,
                        agent: i + 1,
                        value: w,
                    });
                }
            }
        }
        for (i, &l) in self.lambda.iter().enumerate() {
            if !l.is_finite() {
                return Err(ValidationError::NonFinite {
                    field: "lambda",
                    agent: i + 1,
                });
            }
            if l < 0.0 {
                return Err(ValidationError::NegativeLambda {
                    agent: i + 1,
                    value: l,
                });
            }
        }
        for family in [Family::Fake, Family::Good] {
            let p = self.couplings(family);
            for i in 0..n {
                if p[i][i] != 0.0 {
                    return Err(ValidationError::NonzeroDiagonal {
                        family,
                        agent: i + 1,
                        value: p[i][i],
                    });
                }
                for j in 0..n {
                    let v = p[i][j];
                    if !v.is_finite() {
                        return Err(ValidationError::NonFinite {
                            field: if family == Family::Fake { "p_f" } else { "p_g" },
                            agent: i + 1,
                        });
                    }
                    if v < 0.0 {
                        return Err(ValidationError::NegativeCoupling {
                            family,
                            row: i + 1,
                            col: j + 1,
                            value: v,
                        });
                    }
                    if j > i && v != p[j][i] {
                        return Err(ValidationError::Asymmetric {
                            family,
                            row: i + 1,
                            col: j + 1,
                            upper: v,
                            lower: p[j][i],
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Consumes the spec, returning it only if every invariant holds.
    pub fn validated(self) -> Result<Self, ValidationError> {
        self.validate()?;
        Ok(self)
    }
}

/// The Hermitian `2N x 2N` coefficient matrix of the linear Heisenberg
/// equations `dX/dt = i V X`, with `X = (f_1..f_N, g_1..g_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VMatrix(pub DMatrix<Complex64>);

impl VMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Largest entrywise modulus of `V - V†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let m = &self.0;
        (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn build_v_matrix(spec: &NetworkSpec) -> VMatrix {
    let n = spec.agents();
    let mut v = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for (block, family) in [(0, Family::Fake), (n, Family::Good)] {
        let omega = spec.omega(family);
        let p = spec.couplings(family);
        for a in 0..n {
            v[(block + a, block + a)] = Complex64::new(-omega[a], 0.0);
            for b in 0..n {
                if a != b {
                    v[(block + a, block + b)] = Complex64::new(2.0 * p[a][b], 0.0);
                }
            }
        }
    }
    for a in 0..n {
        let l = Complex64::new(spec.lambda[a], 0.0);
        v[(a, n + a)] = l;
        v[(n + a, a)] = l;
    }
    VMatrix(v)
}

/// Free part `Σ ω_f F̂ + Σ ω_g Ĝ` as its diagonal in the occupation basis.
pub fn free_energies(spec: &NetworkSpec) -> Vec<f64> {
    let n = spec.agents();
    let weights: Vec<f64> = spec.omega_f.iter().chain(&spec.omega_g).copied().collect();
    (0..1usize << (2 * n))
        .map(|s| {
            weights
                .iter()
                .enumerate()
                .filter(|(b, _)| s >> b & 1 == 1)
                .map(|(_, w)| w)
                .sum()
        })
        .collect()
}

/// The full Hamiltonian on the `2^(2N)`-dimensional Fock space:
/// free part, diffusion over every ordered agent pair, and the per-agent
/// fake/good exchange.
pub fn build_hamiltonian_matrix(spec: &NetworkSpec) -> Result<ModeOperator> {
    let n = spec.agents();
    let modes = 2 * n;
    if modes > MAX_MODES {
        return Err(Error::DimensionCap {
            modes,
            cap: MAX_MODES,
        });
    }
    let lowering = |mode: ModeIndex| fock::annihilator(mode.flat(n), modes);
    let mut h = SparseOp::diagonal(free_energies(spec).into_iter().map(|e| Complex64::new(e, 0.0)));

    // p (a_α a_β† + a_β a_α†) summed over ordered pairs
    for family in [Family::Fake, Family::Good] {
        let p = spec.couplings(family);
        let ops: Vec<_> = (1..=n)
            .map(|a| lowering(ModeIndex { kind: family, agent: a }))
            .collect::<Result<_>>()?;
        for a in 0..n {
            for b in 0..n {
                if a == b || p[a][b] == 0.0 {
                    continue;
                }
                let term = ops[a]
                    .mul(&ops[b].adjoint())
                    .add(&ops[b].mul(&ops[a].adjoint()));
                h = h.add(&term.scale(Complex64::new(p[a][b], 0.0)));
            }
        }
    }
    for a in 1..=n {
        let l = spec.lambda[a - 1];
        if l == 0.0 {
            continue;
        }
        let f = lowering(ModeIndex::fake(a))?;
        let g = lowering(ModeIndex::good(a))?;
        let term = f.mul(&g.adjoint()).add(&g.mul(&f.adjoint()));
        h = h.add(&term.scale(Complex64::new(l, 0.0)));
    }
    Ok(h)
}
