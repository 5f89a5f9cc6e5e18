//! Reduced density matrices of the (thermal) ground state.
//!
//! Both states are real symmetric in the computational basis
//! |00>, |01>, |10>, |11> with sigma_z |0> = +|0>. The two-spin state has
//! the X structure
//!
//!   diag( (1+2m+czz)/4, (1-czz)/4, (1-czz)/4, (1-2m+czz)/4 )
//!
//! with anti-diagonal corners (cxx-cyy)/4 and inner entries (cxx+cyy)/4.

use crate::correlators::CorrelatorSet;
use crate::error::{Error, Result};
use crate::hermitian::{eigh, CMatrix, HermitianMatrix};

const TRACE_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;
const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Real symmetric, trace-one, positive-semidefinite matrix of dim 2 or 4.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl DensityMatrix {
    /// Validate and wrap row-major entries.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::NotAState {
                reason: format!("dimension must be 2 or 4, got {dim}"),
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::NotAState {
                reason: format!("expected {} entries, got {}", dim * dim, entries.len()),
            });
        }
        let trace: f64 = (0..dim).map(|i| entries[i * dim + i]).sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotAState {
                reason: format!("trace {trace} differs from 1 beyond {TRACE_TOL:.0e}"),
            });
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (entries[i * dim + j] - entries[j * dim + i]).abs() > SYMMETRY_TOL {
                    return Err(Error::NotAState {
                        reason: format!("asymmetric at ({i}, {j})"),
                    });
                }
            }
        }
        let state = Self { dim, entries };
        let min = state.eigenvalues()?[0];
        if min < EIGENVALUE_FLOOR {
            return Err(Error::NotAState {
                reason: format!("eigenvalue {min:.3e} below {EIGENVALUE_FLOOR:.1e}"),
            });
        }
        Ok(state)
    }

    /// Projector onto a real pure state (the vector is normalized first).
    pub fn from_pure(psi: &[f64]) -> Result<Self> {
        let dim = psi.len();
        let norm: f64 = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotAState {
                reason: "zero state vector".into(),
            });
        }
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = psi[i] * psi[j] / (norm * norm);
            }
        }
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn to_hermitian(&self) -> HermitianMatrix {
        HermitianMatrix::new(CMatrix::from_real(self.dim, &self.entries))
            .expect("a validated state is Hermitian")
    }

    /// Tr rho^2.
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.get(i, j) * self.get(j, i);
            }
        }
        acc
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let h = HermitianMatrix::new(CMatrix::from_real(self.dim, &self.entries))?;
        Ok(eigh(&h)?.values)
    }
}

/// Single-spin reduced state diag((1+m)/2, (1-m)/2).
pub fn single_spin_state(c: &CorrelatorSet) -> Result<DensityMatrix> {
    single_spin_from_magnetization(c.m)
}

pub fn single_spin_from_magnetization(m: f64) -> Result<DensityMatrix> {
    if m.abs() > 1.0 + 1e-12 {
        return Err(Error::NotAState {
            reason: format!("|m| = {} exceeds 1", m.abs()),
        });
    }
    let m = m.clamp(-1.0, 1.0);
    DensityMatrix::new(2, vec![(1.0 + m) / 2.0, 0.0, 0.0, (1.0 - m) / 2.0])
}

/// Two-spin reduced X state from the correlators.
pub fn two_spin_state(c: &CorrelatorSet) -> Result<DensityMatrix> {
    two_spin_from_correlations(c.m, c.cxx, c.cyy, c.czz)
}

pub fn two_spin_from_correlations(m: f64, cxx: f64, cyy: f64, czz: f64) -> Result<DensityMatrix> {
    for (label, v) in [("m", m), ("cxx", cxx), ("cyy", cyy), ("czz", czz)] {
        if v.abs() > 1.0 + 1e-9 {
            return Err(Error::NotAState {
                reason: format!("|{label}| = {} exceeds 1", v.abs()),
            });
        }
    }
    let mut e = vec![0.0; 16];
    e[0] = (1.0 + 2.0 * m + czz) / 4.0;
    e[5] = (1.0 - czz) / 4.0;
    e[10] = (1.0 - czz) / 4.0;
    e[15] = (1.0 - 2.0 * m + czz) / 4.0;
    e[3] = (cxx - cyy) / 4.0;
    e[12] = e[3];
    e[6] = (cxx + cyy) / 4.0;
    e[9] = e[6];
    DensityMatrix::new(4, e)
}

/// Trace out the second spin of a two-spin state.
pub fn partial_trace_second(rho: &DensityMatrix) -> Result<DensityMatrix> {
    reduce(rho, |a, ap, b| (2 * a + b, 2 * ap + b))
}

/// Trace out the first spin of a two-spin state.
pub fn partial_trace_first(rho: &DensityMatrix) -> Result<DensityMatrix> {
    reduce(rho, |a, ap, b| (2 * b + a, 2 * b + ap))
}

fn reduce(
    rho: &DensityMatrix,
    index: impl Fn(usize, usize, usize) -> (usize, usize),
) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: 4,
        });
    }
    let mut out = vec![0.0; 4];
    for a in 0..2 {
        for ap in 0..2 {
            for b in 0..2 {
                let (i, j) = index(a, ap, b);
                out[a * 2 + ap] += rho.get(i, j);
            }
        }
    }
    DensityMatrix::new(2, out)
}
