//! Thermodynamic-limit correlators of the anisotropic spin-1/2 XY chain in
//! a transverse field.
//!
//! The chain
//!
//!   H = -(λ/2) Σ_j [(1+γ) σx_j σx_{j+1} + (1-γ) σy_j σy_{j+1}] - Σ_j σz_j
//!
//! maps to free fermions with dispersion
//!
//!   ω_φ = sqrt((γλ sin φ)² + (1 + λ cos φ)²) / 2,
//!
//! and its magnetization and pair correlators reduce to one-dimensional
//! integrals plus small Toeplitz determinants:
//!
//!   ⟨σz⟩        = -∫₀^π (1 + λ cos φ) tanh(βω_φ) / (2π ω_φ) dφ
//!   G_r         = ∫₀^π tanh(βω_φ) [cos(rφ)(1 + λ cos φ) - γλ sin(rφ) sin φ] / (2π ω_φ) dφ
//!   ⟨σx_0 σx_r⟩ = det [G_{j-i-1}]  (r×r)
//!   ⟨σy_0 σy_r⟩ = det [G_{i-j+1}]  (r×r)
//!   ⟨σz_0 σz_r⟩ = ⟨σz⟩² - G_r G_{-r}
//!
//! Zero temperature is an explicit mode: tanh(βω) is replaced by 1 exactly,
//! never approximated by a large β. The only delicate point of the
//! integrands is the gap closing at (λ = 1, φ = π), where ω_φ → 0 and every
//! numerator vanishes as well; the integrands extend continuously by 0
//! there.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};

/// Largest spin separation for which the Toeplitz determinants are
/// evaluated; pivoted elimination on dense r×r matrices is exact enough up
/// to this size and r never gets close in practice.
pub const MAX_SEPARATION: u32 = 32;

/// Inverse temperature, with the exact ground-state limit as a distinct
/// mode rather than a large number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    /// Map a temperature to an inverse temperature; `T = 0` selects the
    /// exact ground-state mode.
    pub fn from_temperature(t: f64) -> Result<Self> {
        if t == 0.0 {
            Ok(Beta::Infinite)
        } else if t > 0.0 && t.is_finite() {
            Ok(Beta::Finite(1.0 / t))
        } else {
            Err(Error::InvalidParameter {
                name: "temperature",
                reason: format!("must be finite and >= 0, got {t}"),
            })
        }
    }

    pub fn new_finite(beta: f64) -> Result<Self> {
        if beta > 0.0 && beta.is_finite() {
            Ok(Beta::Finite(beta))
        } else {
            Err(Error::InvalidParameter {
                name: "beta",
                reason: format!("must be finite and positive, got {beta}"),
            })
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Beta::Infinite)
    }

    /// tanh(βω); exactly 1 in the ground-state mode.
    pub fn thermal_factor(self, omega: f64) -> f64 {
        match self {
            Beta::Infinite => 1.0,
            Beta::Finite(b) => (b * omega).tanh(),
        }
    }

    /// The temperature this mode corresponds to (0 for the ground state).
    pub fn temperature(self) -> f64 {
        match self {
            Beta::Infinite => 0.0,
            Beta::Finite(b) => 1.0 / b,
        }
    }
}

/// Physical parameters of one evaluation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub lambda: f64,
    pub gamma: f64,
    pub beta: Beta,
    pub r: u32,
}

impl ModelParams {
    pub fn new(lambda: f64, gamma: f64, beta: Beta, r: u32) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("must be finite and >= 0, got {lambda}"),
            });
        }
        // gamma = 0 is the XX line with different criticality; rejected.
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must lie in (0, 1], got {gamma}"),
            });
        }
        if let Beta::Finite(b) = beta {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "beta",
                    reason: format!("must be finite and positive, got {b}"),
                });
            }
        }
        if r == 0 || r > MAX_SEPARATION {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!("spin separation must lie in [1, {MAX_SEPARATION}], got {r}"),
            });
        }
        Ok(Self { lambda, gamma, beta, r })
    }

    /// Same parameters at a different field strength.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda, self.gamma, self.beta, self.r)
    }
}

/// Magnetization and pair correlators at one parameter point, with the
/// cached G_r values that produced them.
#[derive(Clone, Debug)]
pub struct CorrelatorSet {
    /// ⟨σz⟩
    pub m: f64,
    /// G_k for k in [-r, r]
    pub g: BTreeMap<i32, f64>,
    /// ⟨σx_0 σx_r⟩
    pub cxx: f64,
    /// ⟨σy_0 σy_r⟩
    pub cyy: f64,
    /// ⟨σz_0 σz_r⟩
    pub czz: f64,
    pub params: ModelParams,
}

/// Quasiparticle dispersion ω_φ.
pub fn dispersion(phi: f64, params: &ModelParams) -> f64 {
    let s = params.gamma * params.lambda * phi.sin();
    let c = 1.0 + params.lambda * phi.cos();
    (s * s + c * c).sqrt() / 2.0
}

fn g_integrand(phi: f64, r: i32, params: &ModelParams) -> f64 {
    let omega = dispersion(phi, params);
    if omega == 0.0 {
        // gap closing (lambda = 1, phi = pi): every numerator vanishes too
        return 0.0;
    }
    let rphi = r as f64 * phi;
    let numerator = rphi.cos() * (1.0 + params.lambda * phi.cos())
        - params.gamma * params.lambda * rphi.sin() * phi.sin();
    params.beta.thermal_factor(omega) * numerator / (2.0 * PI * omega)
}

/// The G_r integral. Negative r is allowed.
pub fn g_function(r: i32, params: &ModelParams, quad: &QuadratureConfig) -> Result<f64> {
    // Seed panel edges so the gap-closing endpoint pi bounds a panel of its
    // own and cos(r phi) oscillates at most once per panel.
    let n_panels = (r.unsigned_abs() as usize).max(2);
    let breaks: Vec<f64> = (1..n_panels)
        .map(|i| PI * i as f64 / n_panels as f64)
        .collect();
    integrate(|phi| g_integrand(phi, r, params), 0.0, PI, &breaks, quad).map(|q| q.value)
}

/// Transverse magnetization ⟨σz⟩ = -G_0.
pub fn magnetization(params: &ModelParams, quad: &QuadratureConfig) -> Result<f64> {
    Ok(-g_function(0, params, quad)?)
}

/// Determinant by elimination with partial pivoting.
fn det_dense(mut m: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let (pivot, pivot_abs) = (k..n)
            .map(|i| (i, m[i * n + k].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pivot_abs == 0.0 {
            return 0.0;
        }
        if pivot != k {
            for j in 0..n {
                m.swap(k * n + j, pivot * n + j);
            }
            det = -det;
        }
        let diag = m[k * n + k];
        det *= diag;
        for i in (k + 1)..n {
            let factor = m[i * n + k] / diag;
            for j in k..n {
                m[i * n + j] -= factor * m[k * n + j];
            }
        }
    }
    det
}

fn toeplitz_det(g: &BTreeMap<i32, f64>, n: usize, index: impl Fn(usize, usize) -> i32) -> f64 {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = g[&index(i, j)];
        }
    }
    det_dense(m, n)
}

fn g_range(params: &ModelParams, quad: &QuadratureConfig) -> Result<BTreeMap<i32, f64>> {
    let r = params.r as i32;
    let mut g = BTreeMap::new();
    for k in -r..=r {
        g.insert(k, g_function(k, params, quad)?);
    }
    Ok(g)
}

/// ⟨σx_0 σx_r⟩: determinant of the r×r Toeplitz matrix with entry
/// (i, j) = G_{j-i-1}, so r = 1 gives G_{-1}.
pub fn correlator_xx(params: &ModelParams, quad: &QuadratureConfig) -> Result<f64> {
    let g = g_range(params, quad)?;
    Ok(toeplitz_det(&g, params.r as usize, |i, j| j as i32 - i as i32 - 1))
}

/// ⟨σy_0 σy_r⟩: determinant of the r×r Toeplitz matrix with entry
/// (i, j) = G_{i-j+1}, so r = 1 gives G_1.
pub fn correlator_yy(params: &ModelParams, quad: &QuadratureConfig) -> Result<f64> {
    let g = g_range(params, quad)?;
    Ok(toeplitz_det(&g, params.r as usize, |i, j| i as i32 - j as i32 + 1))
}

/// ⟨σz_0 σz_r⟩ = ⟨σz⟩² - G_r G_{-r}.
pub fn correlator_zz(params: &ModelParams, quad: &QuadratureConfig) -> Result<f64> {
    let r = params.r as i32;
    let g0 = g_function(0, params, quad)?;
    let gp = g_function(r, params, quad)?;
    let gm = g_function(-r, params, quad)?;
    Ok(g0 * g0 - gp * gm)
}

/// Evaluate everything at once, computing each G_k a single time.
pub fn correlator_set(params: &ModelParams, quad: &QuadratureConfig) -> Result<CorrelatorSet> {
    let r = params.r as i32;
    let g = g_range(params, quad)?;
    let m = -g[&0];
    let n = params.r as usize;
    let cxx = toeplitz_det(&g, n, |i, j| j as i32 - i as i32 - 1);
    let cyy = toeplitz_det(&g, n, |i, j| i as i32 - j as i32 + 1);
    let czz = m * m - g[&r] * g[&(-r)];
    Ok(CorrelatorSet {
        m,
        g,
        cxx,
        cyy,
        czz,
        params: *params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_OVER_PI: f64 = 2.0 / PI;

    fn params(lambda: f64, gamma: f64, beta: Beta) -> ModelParams {
        ModelParams::new(lambda, gamma, beta, 1).unwrap()
    }

    fn quad() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(ModelParams::new(-0.1, 0.5, Beta::Infinite, 1).is_err());
        assert!(ModelParams::new(1.0, 0.0, Beta::Infinite, 1).is_err());
        assert!(ModelParams::new(1.0, 1.1, Beta::Infinite, 1).is_err());
        assert!(ModelParams::new(1.0, 0.5, Beta::Finite(-2.0), 1).is_err());
        assert!(ModelParams::new(1.0, 0.5, Beta::Infinite, 0).is_err());
        assert!(ModelParams::new(1.0, 0.5, Beta::Infinite, 33).is_err());
        assert!(Beta::from_temperature(-1.0).is_err());
        assert_eq!(Beta::from_temperature(0.0).unwrap(), Beta::Infinite);
    }

    #[test]
    fn dispersion_limits() {
        let p0 = params(0.0, 0.5, Beta::Infinite);
        for phi in [0.0, 0.3, 1.2, PI] {
            assert!((dispersion(phi, &p0) - 0.5).abs() < 1e-15);
        }
        let p1 = params(1.0, 1.0, Beta::Infinite);
        assert!(dispersion(PI, &p1).abs() < 1e-15);
        assert!((dispersion(PI / 2.0, &p1) - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn magnetization_decoupled_limit() {
        let m = magnetization(&params(0.0, 0.5, Beta::Infinite), &quad()).unwrap();
        assert!((m + 1.0).abs() < 1e-12, "m = {m}");
    }

    #[test]
    fn magnetization_critical_ising() {
        let m = magnetization(&params(1.0, 1.0, Beta::Infinite), &quad()).unwrap();
        assert!((m + TWO_OVER_PI).abs() < 1e-10, "m = {m}");
    }

    #[test]
    fn g_function_simplifies_at_critical_ising() {
        let p = params(1.0, 1.0, Beta::Infinite);
        let q = quad();
        assert!(g_function(1, &params(0.0, 0.5, Beta::Infinite), &q)
            .unwrap()
            .abs()
            < 1e-12);
        assert!((g_function(-1, &p, &q).unwrap() - TWO_OVER_PI).abs() < 1e-10);
        assert!((g_function(1, &p, &q).unwrap() + 2.0 / (3.0 * PI)).abs() < 1e-10);
    }

    #[test]
    fn g_function_matches_frozen_reference() {
        // frozen from an independent high-accuracy quadrature
        let q = quad();
        let p = params(0.5, 0.5, Beta::Infinite);
        assert!((g_function(1, &p, &q).unwrap() - (-0.125384801928962)).abs() < 1e-9);
        assert!((g_function(-1, &p, &q).unwrap() - 0.135160630290057).abs() < 1e-9);
        let p = params(1.2, 0.5, Beta::Infinite);
        assert!((g_function(2, &p, &q).unwrap() - (-0.009727464651671)).abs() < 1e-9);
        assert!((g_function(-2, &p, &q).unwrap() - (-0.393457876615908)).abs() < 1e-9);
        assert!((g_function(0, &p, &q).unwrap() - 0.545915377301088).abs() < 1e-9);
    }

    #[test]
    fn correlators_at_critical_ising() {
        let p = params(1.0, 1.0, Beta::Infinite);
        let q = quad();
        assert!((correlator_xx(&p, &q).unwrap() - TWO_OVER_PI).abs() < 1e-10);
        assert!((correlator_yy(&p, &q).unwrap() + 2.0 / (3.0 * PI)).abs() < 1e-10);
        assert!((correlator_zz(&p, &q).unwrap() - 16.0 / (3.0 * PI * PI)).abs() < 1e-10);
    }

    #[test]
    fn two_by_two_determinants_expand_correctly() {
        let p = ModelParams::new(1.3, 0.7, Beta::Infinite, 2).unwrap();
        let q = quad();
        let g = g_range(&p, &q).unwrap();
        let xx = correlator_xx(&p, &q).unwrap();
        let yy = correlator_yy(&p, &q).unwrap();
        assert!((xx - (g[&-1] * g[&-1] - g[&-2] * g[&0])).abs() < 1e-12);
        assert!((yy - (g[&1] * g[&1] - g[&0] * g[&2])).abs() < 1e-12);
    }

    #[test]
    fn correlator_set_decoupled_product_state() {
        let set = correlator_set(&params(0.0, 0.5, Beta::Infinite), &quad()).unwrap();
        assert!((set.m + 1.0).abs() < 1e-12);
        assert!(set.cxx.abs() < 1e-12);
        assert!(set.cyy.abs() < 1e-12);
        assert!((set.czz - 1.0).abs() < 1e-12);
        assert!((set.g[&0] + set.m).abs() < 1e-9);
    }

    #[test]
    fn correlator_set_matches_frozen_thermal_reference() {
        let p = params(1.2, 0.5, Beta::Finite(2.0));
        let set = correlator_set(&p, &quad()).unwrap();
        assert!((set.m - (-0.5422083595240579)).abs() < 1e-9);
        assert!((set.cxx - 0.5002159694857247).abs() < 1e-9);
        assert!((set.cyy - 0.07219736097292839).abs() < 1e-9);
        assert!((set.czz - 0.2578756322243858).abs() < 1e-9);
    }

    #[test]
    fn correlator_set_at_longer_separation() {
        let p = ModelParams::new(1.0, 1.0, Beta::Infinite, 2).unwrap();
        let set = correlator_set(&p, &quad()).unwrap();
        assert!((set.cxx - 0.5403796460924681).abs() < 1e-9);
        assert!((set.cyy - (-0.03602530973949789)).abs() < 1e-9);
        assert!((set.czz - 0.4323037168739744).abs() < 1e-9);
        let p3 = ModelParams::new(1.0, 1.0, Beta::Infinite, 3).unwrap();
        let set3 = correlator_set(&p3, &quad()).unwrap();
        assert!((set3.cxx - 0.4892677223643892).abs() < 1e-9);
    }

    #[test]
    fn finite_beta_converges_to_ground_state() {
        let q = quad();
        let cold = correlator_set(&params(0.5, 0.5, Beta::Finite(50.0)), &q).unwrap();
        let ground = correlator_set(&params(0.5, 0.5, Beta::Infinite), &q).unwrap();
        assert!((cold.m - ground.m).abs() < 1e-6);
        assert!((cold.cxx - ground.cxx).abs() < 1e-6);
        assert!((cold.cyy - ground.cyy).abs() < 1e-6);
        assert!((cold.czz - ground.czz).abs() < 1e-6);
    }

    #[test]
    fn large_field_magnetization_fades() {
        let q = quad();
        let set = correlator_set(&params(5.0, 1.0, Beta::Infinite), &q).unwrap();
        assert!(set.m > -0.2 && set.m < 0.0, "m = {}", set.m);
        assert!((set.czz - (set.m * set.m - set.g[&1] * set.g[&-1])).abs() < 1e-12);
    }
}
