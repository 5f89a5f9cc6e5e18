//! Adaptive panel quadrature with an embedded Gauss-Kronrod rule pair.
//!
//! Every panel is scored by the 7-point Gauss / 15-point Kronrod pair; the
//! panel with the largest error estimate is bisected until the summed
//! estimate meets the requested tolerance or the subdivision budget runs
//! out. Callers may supply interior breakpoints so that known kinks start
//! out on panel boundaries.

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "quadrature tolerance",
                reason: format!(
                    "tolerances must be positive, got abs {} rel {}",
                    self.abs_tol, self.rel_tol
                ),
            });
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter {
                name: "max_subdivisions",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Converged integral with its final error estimate.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

// 15-point Kronrod abscissae on [-1, 1] (positive half), with the embedded
// 7-point Gauss weights. Values from the QUADPACK QK15 tables.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One panel evaluation of the G7/K15 pair: (value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let x = half * XGK[jtw];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss += WG[j] * (f1 + f2);
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    res_gauss += WG[3] * f_center;

    for j in 0..4 {
        let jtw = 2 * j;
        let x = half * XGK[jtw];
        let f1 = f(center - x);
        let f2 = f(center + x);
        if jtw < 7 {
            fv1[jtw] = f1;
            fv2[jtw] = f2;
        }
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    (
        res_kronrod * half,
        rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
    )
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// Integrate `f` over `[a, b]`, seeding panels at the supplied interior
/// breakpoints, until the summed Kronrod error estimate drops below
/// `max(abs_tol, rel_tol * |integral|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Quadrature> {
    cfg.validate()?;
    if !(a < b) {
        return Err(Error::InvalidParameter {
            name: "integration interval",
            reason: format!("require a < b, got [{a}, {b}]"),
        });
    }

    let mut edges: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges.insert(0, a);
    edges.push(b);

    let mut panels: Vec<Panel> = edges
        .windows(2)
        .map(|w| {
            let (value, err) = gk15(&f, w[0], w[1]);
            Panel { a: w[0], b: w[1], value, err }
        })
        .collect();

    let mut subdivisions = 0;
    loop {
        let total_value: f64 = panels.iter().map(|p| p.value).sum();
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        let tol = cfg.abs_tol.max(cfg.rel_tol * total_value.abs());
        if total_err <= tol {
            panels.sort_by(|x, y| x.a.total_cmp(&y.a));
            let value = panels.iter().map(|p| p.value).sum();
            return Ok(Quadrature {
                value,
                error_estimate: total_err,
                subdivisions,
            });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                achieved: total_err,
                requested: tol,
                subdivisions,
            });
        }

        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.err.total_cmp(&y.err).then(y.a.total_cmp(&x.a)))
            .map(|(i, _)| i)
            .expect("panel list is never empty");
        let Panel { a: pa, b: pb, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        for (lo, hi) in [(pa, mid), (mid, pb)] {
            let (value, err) = gk15(&f, lo, hi);
            panels.push(Panel { a: lo, b: hi, value, err });
        }
        subdivisions += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn integrates_sine_over_half_period() {
        let q = integrate(f64::sin, 0.0, PI, &[], &cfg()).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12, "got {}", q.value);
    }

    #[test]
    fn integrates_polynomial_exactly() {
        // degree 7 is exact for the embedded Gauss rule already
        let q = integrate(|x| 3.0 * x.powi(7) - x.powi(2) + 1.0, -1.0, 2.0, &[], &cfg()).unwrap();
        let exact = 3.0 * (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0) / 3.0 + 3.0;
        assert!((q.value - exact).abs() < 1e-12);
    }

    #[test]
    fn handles_kink_with_breakpoint() {
        let q = integrate(|x| (x - 0.5).abs(), 0.0, 1.0, &[0.5], &cfg()).unwrap();
        assert!((q.value - 0.25).abs() < 1e-13);
        assert_eq!(q.subdivisions, 0);
    }

    #[test]
    fn handles_kink_without_breakpoint() {
        let q = integrate(|x| (x - 0.5).abs(), 0.0, 1.0, &[], &cfg()).unwrap();
        assert!((q.value - 0.25).abs() < 1e-11);
    }

    #[test]
    fn oscillatory_integrand_converges() {
        let q = integrate(|x| (20.0 * x).cos(), 0.0, PI, &[], &cfg()).unwrap();
        let exact = (20.0 * PI).sin() / 20.0;
        assert!((q.value - exact).abs() < 1e-11, "got {}", q.value);
    }

    #[test]
    fn reports_non_convergence_with_achieved_error() {
        let nasty = |x: f64| (1.0 / (x + 1e-8)).sin();
        let tight = QuadratureConfig {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_subdivisions: 3,
        };
        match integrate(nasty, 0.0, 1.0, &[], &tight) {
            Err(Error::QuadratureNonConvergence { achieved, subdivisions, .. }) => {
                assert!(achieved > 0.0);
                assert_eq!(subdivisions, 3);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(integrate(|x| x, 1.0, 0.0, &[], &cfg()).is_err());
    }
}
