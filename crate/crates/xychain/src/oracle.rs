//! Independent verification backends.
//!
//! `finite_chain_correlators` diagonalizes the full 2^N Hamiltonian of a
//! periodic chain and takes Gibbs-weighted expectations, sharing no code
//! with the quadrature pipeline. `brute_force_lqu` minimizes the skew
//! information over a dense sphere of local observables instead of going
//! through the W matrix.
//!
//! The energy scale matters for finite-temperature comparisons: the
//! correlator integrals weight modes by tanh(beta omega_phi) with
//! omega_phi = sqrt(...)/2, i.e. half the quasiparticle energy of the
//! literal coupling constants. The chain Hamiltonian is scaled by the same
//! half so that a shared beta means the same physical temperature on both
//! sides, and the field term enters with the sign that polarizes the
//! lambda = 0 ground state to <sigma_z> = -1, matching the convention of
//! the integrals.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::correlators::{Beta, CorrelatorSet, ModelParams};
use crate::error::{Error, Result};
use crate::hermitian::LocalObservable;
use crate::measures::{skew_information_spectral, SpectralState};
use crate::states::DensityMatrix;
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub const MIN_SITES: usize = 2;
pub const MAX_SITES: usize = 12;

/// A periodic chain small enough to diagonalize densely.
#[derive(Clone, Copy, Debug)]
pub struct FiniteChainSpec {
    pub n_sites: usize,
    pub params: ModelParams,
}

impl FiniteChainSpec {
    pub fn new(n_sites: usize, params: ModelParams) -> Result<Self> {
        if !(MIN_SITES..=MAX_SITES).contains(&n_sites) {
            return Err(Error::InvalidParameter {
                name: "n_sites",
                reason: format!("must lie in [{MIN_SITES}, {MAX_SITES}], got {n_sites}"),
            });
        }
        if params.beta.is_infinite() {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: "the thermal oracle needs finite beta; use a large value for near-ground behavior".into(),
            });
        }
        if params.r as usize >= n_sites {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!("separation {} does not fit a ring of {n_sites} sites", params.r),
            });
        }
        Ok(Self { n_sites, params })
    }
}

/// sigma_z eigenvalue of site `j` in basis state `s` (bit 0 means |0>).
#[inline]
fn z_sign(s: usize, j: usize) -> f64 {
    if s & (1 << j) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn hamiltonian(spec: &FiniteChainSpec) -> DMatrix<f64> {
    let n = spec.n_sites;
    let dim = 1usize << n;
    let lambda = spec.params.lambda;
    let gamma = spec.params.gamma;
    // half-energy normalization, field sign flipped; see module docs
    let jxx = -(lambda / 4.0) * (1.0 + gamma);
    let jyy = -(lambda / 4.0) * (1.0 - gamma);
    let field = 0.5;

    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..dim {
        let mut diag = 0.0;
        for j in 0..n {
            diag += field * z_sign(s, j);
        }
        h[(s, s)] += diag;
        for j in 0..n {
            let k = (j + 1) % n;
            let mask = (1 << j) | (1 << k);
            let t = s ^ mask;
            // sigma_x sigma_x flips both spins with amplitude 1;
            // sigma_y sigma_y flips both with amplitude -z_j z_k
            h[(t, s)] += jxx + jyy * (-z_sign(s, j) * z_sign(s, k));
        }
    }
    h
}

struct ThermalEnsemble {
    weights: Vec<f64>,
    partition: f64,
    vectors: DMatrix<f64>,
}

fn thermal_ensemble(spec: &FiniteChainSpec) -> ThermalEnsemble {
    let beta = match spec.params.beta {
        Beta::Finite(b) => b,
        Beta::Infinite => unreachable!("validated finite"),
    };
    let eig = SymmetricEigen::new(hamiltonian(spec));
    let e0 = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&e| (-beta * (e - e0)).exp())
        .collect();
    let partition = weights.iter().sum();
    ThermalEnsemble {
        weights,
        partition,
        vectors: eig.eigenvectors,
    }
}

/// Per-site thermal expectations; all sites must agree for a
/// translation-invariant ring.
#[derive(Clone, Debug)]
pub struct PerSiteExpectations {
    pub m: Vec<f64>,
    pub cxx: Vec<f64>,
    pub cyy: Vec<f64>,
    pub czz: Vec<f64>,
}

impl PerSiteExpectations {
    /// Largest spread across sites over all four observables.
    pub fn max_spread(&self) -> f64 {
        [&self.m, &self.cxx, &self.cyy, &self.czz]
            .iter()
            .map(|xs| {
                let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
                max - min
            })
            .fold(0.0, f64::max)
    }
}

pub fn finite_chain_per_site(spec: &FiniteChainSpec) -> Result<PerSiteExpectations> {
    let n = spec.n_sites;
    let dim = 1usize << n;
    let r = spec.params.r as usize;
    let ensemble = thermal_ensemble(spec);

    let mut m = vec![0.0; n];
    let mut cxx = vec![0.0; n];
    let mut cyy = vec![0.0; n];
    let mut czz = vec![0.0; n];

    for (col, &weight) in ensemble.weights.iter().enumerate() {
        if weight < 1e-300 {
            continue;
        }
        let v = ensemble.vectors.column(col);
        for j in 0..n {
            let k = (j + r) % n;
            let mask = (1 << j) | (1 << k);
            let mut ez = 0.0;
            let mut exx = 0.0;
            let mut eyy = 0.0;
            let mut ezz = 0.0;
            for s in 0..dim {
                let vs = v[s];
                let zj = z_sign(s, j);
                let zk = z_sign(s, k);
                ez += zj * vs * vs;
                ezz += zj * zk * vs * vs;
                let flip = v[s ^ mask] * vs;
                exx += flip;
                eyy += -zj * zk * flip;
            }
            m[j] += weight * ez;
            cxx[j] += weight * exx;
            cyy[j] += weight * eyy;
            czz[j] += weight * ezz;
        }
    }
    let z = ensemble.partition;
    for xs in [&mut m, &mut cxx, &mut cyy, &mut czz] {
        for x in xs.iter_mut() {
            *x /= z;
        }
    }
    Ok(PerSiteExpectations { m, cxx, cyy, czz })
}

/// Thermal correlators of the finite ring, translation-averaged.
pub fn finite_chain_correlators(spec: &FiniteChainSpec) -> Result<CorrelatorSet> {
    let per_site = finite_chain_per_site(spec)?;
    let n = spec.n_sites as f64;
    let avg = |xs: &[f64]| xs.iter().sum::<f64>() / n;
    let m = avg(&per_site.m);
    let mut g = BTreeMap::new();
    g.insert(0, -m);
    Ok(CorrelatorSet {
        m,
        g,
        cxx: avg(&per_site.cxx),
        cyy: avg(&per_site.cyy),
        czz: avg(&per_site.czz),
        params: spec.params,
    })
}

/// Minimize the skew information over a dense (theta, phi) grid of local
/// observables, then descend locally until the angular step drops below
/// 1e-7. Returns the minimum and the minimizing Bloch direction.
pub fn brute_force_lqu(
    rho_pair: &DensityMatrix,
    coarse_steps: usize,
) -> Result<(f64, [f64; 3])> {
    if rho_pair.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: rho_pair.dim(),
            right: 4,
        });
    }
    if coarse_steps < 64 {
        return Err(Error::InvalidParameter {
            name: "coarse_steps",
            reason: format!("need at least 64 grid steps, got {coarse_steps}"),
        });
    }
    let spectral = SpectralState::new(rho_pair)?;
    let eval = |theta: f64, phi: f64| -> Result<f64> {
        let k = LocalObservable::from_polar(theta, phi).acting_on_first();
        skew_information_spectral(&spectral, &k)
    };

    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..coarse_steps {
        let theta = PI * (i as f64 + 0.5) / coarse_steps as f64;
        for j in 0..(2 * coarse_steps) {
            let phi = PI * j as f64 / coarse_steps as f64;
            let value = eval(theta, phi)?;
            if value < best.0 {
                best = (value, theta, phi);
            }
        }
    }

    let (mut value, mut theta, mut phi) = best;
    let mut step = PI / coarse_steps as f64;
    while step > 1e-7 {
        let mut improved = false;
        for dt in [-step, 0.0, step] {
            for dp in [-step, 0.0, step] {
                if dt == 0.0 && dp == 0.0 {
                    continue;
                }
                let v = eval(theta + dt, phi + dp)?;
                if v < value {
                    value = v;
                    theta += dt;
                    phi += dp;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok((value, LocalObservable::from_polar(theta, phi).direction()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::lqu;
    use crate::quadrature::QuadratureConfig;
    use crate::states::DensityMatrix;

    #[test]
    fn spec_validation() {
        let p = ModelParams::new(0.5, 0.5, Beta::Finite(5.0), 1).unwrap();
        assert!(FiniteChainSpec::new(1, p).is_err());
        assert!(FiniteChainSpec::new(13, p).is_err());
        assert!(FiniteChainSpec::new(8, p).is_ok());
        let cold = ModelParams::new(0.5, 0.5, Beta::Infinite, 1).unwrap();
        assert!(FiniteChainSpec::new(8, cold).is_err());
        let wide = ModelParams::new(0.5, 0.5, Beta::Finite(5.0), 4).unwrap();
        assert!(FiniteChainSpec::new(4, wide).is_err());
    }

    #[test]
    fn decoupled_two_site_ring_polarizes() {
        let p = ModelParams::new(0.0, 0.5, Beta::Finite(10.0), 1).unwrap();
        let spec = FiniteChainSpec::new(2, p).unwrap();
        let set = finite_chain_correlators(&spec).unwrap();
        assert!((set.m + 1.0).abs() < 1e-3, "m = {}", set.m);
        assert!((set.czz - 1.0).abs() < 1e-3, "czz = {}", set.czz);
    }

    #[test]
    fn small_ring_matches_thermodynamic_limit_away_from_criticality() {
        let p = ModelParams::new(0.5, 1.0, Beta::Finite(5.0), 1).unwrap();
        let spec = FiniteChainSpec::new(8, p).unwrap();
        let ed = finite_chain_correlators(&spec).unwrap();
        let bulk = crate::correlators::correlator_set(&p, &QuadratureConfig::default()).unwrap();
        assert!((ed.m - bulk.m).abs() < 5e-3, "dm = {}", (ed.m - bulk.m).abs());
        assert!((ed.cxx - bulk.cxx).abs() < 5e-3);
        assert!((ed.czz - bulk.czz).abs() < 5e-3);
    }

    #[test]
    fn brute_force_matches_closed_form_on_bell_and_product() {
        let s = 0.5f64.sqrt();
        let bell = DensityMatrix::from_pure(&[s, 0.0, 0.0, s]).unwrap();
        let (value, _) = brute_force_lqu(&bell, 64).unwrap();
        assert!((value - 1.0).abs() < 1e-6, "Bell value {value}");

        let p11 = DensityMatrix::from_pure(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        let (value, direction) = brute_force_lqu(&p11, 64).unwrap();
        assert!(value < 1e-9, "product value {value}");
        assert!(direction[2].abs() > 0.999, "direction {direction:?}");
    }

    #[test]
    fn brute_force_agrees_with_w_matrix_route() {
        let rho = crate::states::two_spin_from_correlations(-0.55, 0.4, -0.15, 0.35).unwrap();
        let exact = lqu(&rho).unwrap();
        let (value, _) = brute_force_lqu(&rho, 64).unwrap();
        assert!((value - exact.value).abs() < 1e-6);
        assert!(value >= exact.value - 1e-8);
    }

    #[test]
    fn brute_force_rejects_tiny_grids() {
        let rho = crate::states::two_spin_from_correlations(0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(brute_force_lqu(&rho, 32).is_err());
    }
}
