//! Coherence and uncertainty measures built on the skew information
//!
//!   I(rho, K)   = Tr(rho K^2) - Tr(sqrt(rho) K sqrt(rho) K)
//!   I^L(rho, K) = (Tr(rho^2 K^2) - Tr(rho K rho K)) / 2
//!   V(rho, K)   = Tr(rho K^2) - (Tr rho K)^2
//!
//! together with the local quantum uncertainty of a two-spin state,
//!
//!   U_A(rho) = 1 - lambda_max(W),
//!   W_ij     = Tr( sqrt(rho) (sigma_i x I) sqrt(rho) (sigma_j x I) ).
//!
//! Every trace is evaluated in the eigenbasis of rho, so one
//! eigendecomposition per state feeds all measures; the square root is
//! never re-diagonalized. Round-off can push the trace combinations a hair
//! below zero: such values clamp to 0 and are counted, while anything past
//! -1e-8 signals a construction bug and errors out.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hermitian::{
    eigh, max_eig_sym3, pauli_x, pauli_y, pauli_z, CMatrix, HermitianMatrix, LocalObservable,
};
use crate::states::DensityMatrix;

const CLAMP_BUDGET: f64 = 1e-8;

static NEGATIVE_CLAMPS: AtomicU64 = AtomicU64::new(0);

/// How many measure evaluations returned a (tiny) negative value that was
/// clamped to zero since process start. Diagnostic only.
pub fn negative_clamp_count() -> u64 {
    NEGATIVE_CLAMPS.load(Ordering::Relaxed)
}

fn clamp_measure(x: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -CLAMP_BUDGET {
        NEGATIVE_CLAMPS.fetch_add(1, Ordering::Relaxed);
        Ok(0.0)
    } else {
        Err(Error::NegativeMeasure { value: x })
    }
}

/// Which spins an LQC observable acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    SingleSpin,
    TwoSpin,
}

/// A measure to evaluate along a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureKind {
    /// Skew-information coherence of a local observable.
    LqcFull {
        observable: LocalObservable,
        target: Target,
    },
    /// The simplified lower bound (square root dropped).
    LqcLower {
        observable: LocalObservable,
        target: Target,
    },
    /// Local quantum uncertainty (optimized over local observables);
    /// always a two-spin quantity.
    Lqu,
}

impl MeasureKind {
    pub fn target(&self) -> Target {
        match self {
            MeasureKind::LqcFull { target, .. } | MeasureKind::LqcLower { target, .. } => *target,
            MeasureKind::Lqu => Target::TwoSpin,
        }
    }

    pub fn is_lower(&self) -> bool {
        matches!(self, MeasureKind::LqcLower { .. })
    }
}

impl std::fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn axis_name(o: &LocalObservable) -> String {
            let [x, y, z] = o.direction();
            if (x - 1.0).abs() < 1e-12 {
                "x".into()
            } else if (y - 1.0).abs() < 1e-12 {
                "y".into()
            } else if (z - 1.0).abs() < 1e-12 {
                "z".into()
            } else {
                format!("({x:.3},{y:.3},{z:.3})")
            }
        }
        let target = |t: &Target| match t {
            Target::SingleSpin => "single",
            Target::TwoSpin => "pair",
        };
        match self {
            MeasureKind::LqcFull { observable, target: t } => {
                write!(f, "lqc-{}/{}", axis_name(observable), target(t))
            }
            MeasureKind::LqcLower { observable, target: t } => {
                write!(f, "lqc-{}-lower/{}", axis_name(observable), target(t))
            }
            MeasureKind::Lqu => write!(f, "lqu/pair"),
        }
    }
}

/// Result of the LQU optimization.
#[derive(Clone, Debug)]
pub struct LquResult {
    /// U_A = 1 - lambda_max(W), in [0, 1].
    pub value: f64,
    /// Unit Bloch vector of the minimizing observable.
    pub optimal_direction: [f64; 3],
    /// The symmetrized 3x3 W matrix.
    pub w_matrix: [[f64; 3]; 3],
}

/// Eigendecomposition of a state, cached so that every measure for the
/// same state reuses a single solve.
#[derive(Clone, Debug)]
pub struct SpectralState {
    dim: usize,
    /// ascending, clamped at zero
    eigenvalues: Vec<f64>,
    sqrt_eigenvalues: Vec<f64>,
    basis: CMatrix,
}

impl SpectralState {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        let h = HermitianMatrix::new(CMatrix::from_real(rho.dim(), rho.entries()))?;
        let decomp = eigh(&h)?;
        if let Some(&bad) = decomp.values.iter().find(|&&l| l < -1e-10) {
            return Err(Error::NotAState {
                reason: format!("eigenvalue {bad:.3e} below -1e-10"),
            });
        }
        // Anything below the solver's resolution is numerically zero; taking
        // its square root would otherwise inject sqrt(eps)-size noise.
        let top = decomp.values.last().copied().unwrap_or(0.0).abs();
        let floor = 16.0 * f64::EPSILON * top;
        let eigenvalues: Vec<f64> = decomp
            .values
            .iter()
            .map(|&l| if l < floor { 0.0 } else { l })
            .collect();
        let sqrt_eigenvalues = eigenvalues.iter().map(|&l| l.sqrt()).collect();
        Ok(Self {
            dim: rho.dim(),
            eigenvalues,
            sqrt_eigenvalues,
            basis: decomp.vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// V^H K V.
    fn transformed(&self, k: &CMatrix) -> CMatrix {
        self.basis.adjoint().mul(&k.mul(&self.basis))
    }

    fn check_dim(&self, k: &HermitianMatrix) -> Result<()> {
        if k.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: k.dim(),
            });
        }
        Ok(())
    }
}

/// Skew information against a precomputed eigenbasis.
pub fn skew_information_spectral(s: &SpectralState, k: &HermitianMatrix) -> Result<f64> {
    s.check_dim(k)?;
    let kt = s.transformed(k.matrix());
    let n = s.dim;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let w = kt.get(i, j).norm_sqr();
            acc += (s.eigenvalues[i] - s.sqrt_eigenvalues[i] * s.sqrt_eigenvalues[j]) * w;
        }
    }
    clamp_measure(acc)
}

pub fn skew_information_lower_spectral(s: &SpectralState, k: &HermitianMatrix) -> Result<f64> {
    s.check_dim(k)?;
    let kt = s.transformed(k.matrix());
    let n = s.dim;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let li = s.eigenvalues[i];
            let lj = s.eigenvalues[j];
            acc += 0.5 * (li * li - li * lj) * kt.get(i, j).norm_sqr();
        }
    }
    clamp_measure(acc)
}

pub fn variance_spectral(s: &SpectralState, k: &HermitianMatrix) -> Result<f64> {
    s.check_dim(k)?;
    let kt = s.transformed(k.matrix());
    let n = s.dim;
    let mut second = 0.0;
    let mut first = 0.0;
    for i in 0..n {
        first += s.eigenvalues[i] * kt.get(i, i).re;
        for j in 0..n {
            second += s.eigenvalues[i] * kt.get(i, j).norm_sqr();
        }
    }
    clamp_measure(second - first * first)
}

/// I(rho, K) = Tr(rho K^2) - Tr(sqrt(rho) K sqrt(rho) K), clamped at 0.
pub fn skew_information(rho: &DensityMatrix, k: &HermitianMatrix) -> Result<f64> {
    skew_information_spectral(&SpectralState::new(rho)?, k)
}

/// I^L(rho, K) = (Tr(rho^2 K^2) - Tr(rho K rho K)) / 2, clamped at 0.
pub fn skew_information_lower(rho: &DensityMatrix, k: &HermitianMatrix) -> Result<f64> {
    skew_information_lower_spectral(&SpectralState::new(rho)?, k)
}

/// V(rho, K) = Tr(rho K^2) - (Tr rho K)^2.
pub fn variance(rho: &DensityMatrix, k: &HermitianMatrix) -> Result<f64> {
    variance_spectral(&SpectralState::new(rho)?, k)
}

/// Coherence of a two-spin state against K acting on the first spin.
pub fn local_coherence(
    rho_pair: &DensityMatrix,
    k: &LocalObservable,
    lower: bool,
) -> Result<f64> {
    let embedded = k.acting_on_first();
    if lower {
        skew_information_lower(rho_pair, &embedded)
    } else {
        skew_information(rho_pair, &embedded)
    }
}

/// LQU of a two-spin state via the 3x3 W matrix.
pub fn lqu(rho_pair: &DensityMatrix) -> Result<LquResult> {
    lqu_spectral(&SpectralState::new(rho_pair)?)
}

pub fn lqu_spectral(s: &SpectralState) -> Result<LquResult> {
    if s.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: 4,
        });
    }
    let identity = CMatrix::identity(2);
    let locals = [
        pauli_x().matrix().kron(&identity),
        pauli_y().matrix().kron(&identity),
        pauli_z().matrix().kron(&identity),
    ];
    let transformed: Vec<CMatrix> = locals.iter().map(|k| s.transformed(k)).collect();

    let mut w = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in a..3 {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    acc += transformed[a].get(i, j)
                        * transformed[b].get(i, j).conj()
                        * (s.sqrt_eigenvalues[i] * s.sqrt_eigenvalues[j]);
                }
            }
            w[a][b] = acc.re;
            w[b][a] = acc.re;
        }
    }

    let (lambda_max, direction) = max_eig_sym3(&w)?;
    let raw = 1.0 - lambda_max;
    if raw > 1.0 + 1e-10 {
        return Err(Error::MeasureOutOfRange { value: raw });
    }
    Ok(LquResult {
        value: clamp_measure(raw)?,
        optimal_direction: direction,
        w_matrix: w,
    })
}
