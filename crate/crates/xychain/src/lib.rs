//! Numerics for the anisotropic spin-1/2 XY chain in a transverse field:
//! thermodynamic-limit correlators, reduced density matrices,
//! skew-information coherence measures, and detection of the quantum
//! critical point and the ground-state factorization point from sweep
//! non-analyticities, including finite-temperature estimation.
//!
//! The pipeline is `correlators` -> `states` -> `measures`, driven over a
//! field grid by `sweep` and `critical`. `hermitian` supplies the small
//! dense eigensolvers everything shares, and `oracle` holds independent
//! cross-checks (dense exact diagonalization, sphere-search LQU).

pub mod correlators;
pub mod critical;
pub mod error;
pub mod hermitian;
pub mod measures;
pub mod oracle;
pub mod quadrature;
pub mod states;
pub mod sweep;

pub use correlators::{
    correlator_set, correlator_xx, correlator_yy, correlator_zz, dispersion, g_function,
    magnetization, Beta, CorrelatorSet, ModelParams,
};
pub use critical::{estimate_cp, estimate_fp, EstimateResult, TransitionKind};
pub use error::{Error, Result};
pub use hermitian::{
    eigh, max_eig_sym3, sqrt_psd, CMatrix, Eigh, HermitianMatrix, LocalObservable,
};
pub use measures::{
    local_coherence, lqu, skew_information, skew_information_lower, variance, LquResult,
    MeasureKind, SpectralState, Target,
};
pub use oracle::{brute_force_lqu, finite_chain_correlators, FiniteChainSpec};
pub use quadrature::{integrate, Quadrature, QuadratureConfig};
pub use states::{single_spin_state, two_spin_state, DensityMatrix};
pub use sweep::{
    detect_features, differentiate, sweep, AxisLabel, DirectionSwitch, Divergence, FeatureReport,
    Jump, MeasureSeries, SweepGrid, SweepParams,
};
