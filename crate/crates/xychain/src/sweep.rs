//! Measure sweeps over a field grid, finite-difference derivatives, and
//! classification of non-analyticities.
//!
//! A divergence and a finite jump in the first derivative look alike on a
//! single grid; they separate under grid refinement. The model's critical
//! divergence is logarithmic, so the first-derivative peak itself grows
//! only slowly when the step is halved, while the second-derivative peak
//! doubles. A candidate therefore counts as a divergence when its |d2|
//! peak grows by at least 1.5x AND its |d1| peak keeps growing; a jump is
//! an adjacent-point step in d1 far above the local noise floor whose size
//! is stable under refinement.

use rayon::prelude::*;

use crate::correlators::{correlator_set, Beta, ModelParams};
use crate::error::{Error, Result};
use crate::measures::{
    lqu_spectral, skew_information_lower_spectral, skew_information_spectral, MeasureKind,
    SpectralState, Target,
};
use crate::quadrature::QuadratureConfig;
use crate::states::{single_spin_state, two_spin_state};

/// Uniform field grid; at least 17 points so the derivative stencils and
/// detection windows have room.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepGrid {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub step: f64,
}

impl SweepGrid {
    pub fn new(lambda_min: f64, lambda_max: f64, step: f64) -> Result<Self> {
        if !(lambda_min < lambda_max) {
            return Err(Error::InvalidParameter {
                name: "lambda range",
                reason: format!("need min < max, got [{lambda_min}, {lambda_max}]"),
            });
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidParameter {
                name: "step",
                reason: format!("must be positive, got {step}"),
            });
        }
        if (lambda_max - lambda_min) / step < 16.0 {
            return Err(Error::InvalidParameter {
                name: "step",
                reason: "grid must span at least 16 steps".into(),
            });
        }
        Ok(Self {
            lambda_min,
            lambda_max,
            step,
        })
    }

    pub fn len(&self) -> usize {
        ((self.lambda_max - self.lambda_min) / self.step).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.lambda_min + i as f64 * self.step)
            .collect()
    }

    /// Same interval at half the step.
    pub fn refined(&self) -> Self {
        Self {
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            step: self.step / 2.0,
        }
    }
}

/// Fixed parameters of a sweep (everything but lambda).
#[derive(Clone, Copy, Debug)]
pub struct SweepParams {
    pub gamma: f64,
    pub beta: Beta,
    pub r: u32,
    pub quadrature: QuadratureConfig,
}

impl SweepParams {
    pub fn new(gamma: f64, beta: Beta) -> Self {
        Self {
            gamma,
            beta,
            r: 1,
            quadrature: QuadratureConfig::default(),
        }
    }
}

/// Sampled measure values over a grid, with optional derivative columns.
#[derive(Clone, Debug)]
pub struct MeasureSeries {
    pub grid: SweepGrid,
    pub values: Vec<f64>,
    pub d1: Option<Vec<f64>>,
    pub d2: Option<Vec<f64>>,
    /// LQU only: optimal Bloch direction per grid point.
    pub optimal_directions: Option<Vec<[f64; 3]>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Divergence {
    pub lambda: f64,
    pub growth_ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub lambda: f64,
    pub jump_size: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisLabel {
    X,
    Y,
    Z,
}

impl std::fmt::Display for AxisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AxisLabel::X => "x",
            AxisLabel::Y => "y",
            AxisLabel::Z => "z",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectionSwitch {
    pub lambda: f64,
    pub from_axis: AxisLabel,
    pub to_axis: AxisLabel,
}

/// Detected non-analyticities of a sweep.
#[derive(Clone, Debug, Default)]
pub struct FeatureReport {
    pub divergences: Vec<Divergence>,
    pub jumps: Vec<Jump>,
    pub direction_switches: Vec<DirectionSwitch>,
}

impl FeatureReport {
    pub fn is_empty(&self) -> bool {
        self.divergences.is_empty() && self.jumps.is_empty() && self.direction_switches.is_empty()
    }
}

fn evaluate_point(kind: &MeasureKind, lambda: f64, p: &SweepParams) -> Result<(f64, Option<[f64; 3]>)> {
    let params = ModelParams::new(lambda, p.gamma, p.beta, p.r)?;
    let set = correlator_set(&params, &p.quadrature)?;
    match kind {
        MeasureKind::Lqu => {
            let rho = two_spin_state(&set)?;
            let out = lqu_spectral(&SpectralState::new(&rho)?)?;
            Ok((out.value, Some(out.optimal_direction)))
        }
        MeasureKind::LqcFull { observable, target }
        | MeasureKind::LqcLower { observable, target } => {
            let lower = kind.is_lower();
            let (state, k) = match target {
                Target::SingleSpin => (single_spin_state(&set)?, observable.matrix()),
                Target::TwoSpin => (two_spin_state(&set)?, observable.acting_on_first()),
            };
            let spectral = SpectralState::new(&state)?;
            let value = if lower {
                skew_information_lower_spectral(&spectral, &k)?
            } else {
                skew_information_spectral(&spectral, &k)?
            };
            Ok((value, None))
        }
    }
}

/// Evaluate a measure pointwise over the grid. Points run in parallel;
/// assembly is in grid order, so the output does not depend on the worker
/// count.
pub fn sweep(kind: &MeasureKind, grid: &SweepGrid, params: &SweepParams) -> Result<MeasureSeries> {
    let points = grid.points();
    let outcomes: Vec<Result<(f64, Option<[f64; 3]>)>> = points
        .par_iter()
        .map(|&lambda| {
            evaluate_point(kind, lambda, params).map_err(|e| Error::SweepPoint {
                lambda,
                source: Box::new(e),
            })
        })
        .collect();

    let mut values = Vec::with_capacity(points.len());
    let mut directions = Vec::new();
    for outcome in outcomes {
        let (v, d) = outcome?;
        values.push(v);
        if let Some(d) = d {
            directions.push(d);
        }
    }
    Ok(MeasureSeries {
        grid: *grid,
        values,
        d1: None,
        d2: None,
        optimal_directions: if directions.is_empty() {
            None
        } else {
            Some(directions)
        },
    })
}

fn finite_differences(values: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = values.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 1..n - 1 {
        d1[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
        d2[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
    }
    d1[0] = (values[1] - values[0]) / h;
    d1[n - 1] = (values[n - 1] - values[n - 2]) / h;
    d2[0] = (values[2] - 2.0 * values[1] + values[0]) / (h * h);
    d2[n - 1] = (values[n - 1] - 2.0 * values[n - 2] + values[n - 3]) / (h * h);
    (d1, d2)
}

/// Fill the derivative columns: central differences inside, one-sided at
/// the two edges.
pub fn differentiate(series: &mut MeasureSeries) {
    let (d1, d2) = finite_differences(&series.values, series.grid.step);
    series.d1 = Some(d1);
    series.d2 = Some(d2);
}

const DIVERGENCE_D2_GROWTH: f64 = 1.5;
const DIVERGENCE_D1_GROWTH: f64 = 1.02;
const JUMP_MEDIAN_FACTOR: f64 = 8.0;
const JUMP_STABILITY_LOW: f64 = 0.67;
const JUMP_STABILITY_HIGH: f64 = 1.5;
const JUMP_WINDOW_HALF: usize = 10;
const SWITCH_ANGLE_DEG: f64 = 30.0;
const CLUSTER_STEPS: f64 = 5.0;

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn merge_clusters<T: Copy>(
    mut events: Vec<(f64, T, f64)>, // (lambda, payload, strength)
    max_gap: f64,
) -> Vec<(f64, T)> {
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, T, f64)> = Vec::new();
    for ev in events {
        match out.last_mut() {
            Some(last) if ev.0 - last.0 <= max_gap => {
                if ev.2 > last.2 {
                    *last = ev;
                }
            }
            _ => out.push(ev),
        }
    }
    out.into_iter().map(|(l, p, _)| (l, p)).collect()
}

fn dominant_axis(v: [f64; 3]) -> AxisLabel {
    let mut best = 0;
    for i in 1..3 {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    match best {
        0 => AxisLabel::X,
        1 => AxisLabel::Y,
        _ => AxisLabel::Z,
    }
}

fn angle_between(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).abs().min(1.0);
    dot.acos().to_degrees()
}

/// Classify the non-analyticities of `coarse` using `refined`, a sweep of
/// the same measure on the same interval at half the step.
pub fn detect_features(coarse: &MeasureSeries, refined: &MeasureSeries) -> Result<FeatureReport> {
    let g = &coarse.grid;
    let rg = &refined.grid;
    let ok = (rg.lambda_min - g.lambda_min).abs() < 1e-9
        && (rg.lambda_max - g.lambda_max).abs() < 1e-9
        && (rg.step - g.step / 2.0).abs() < 1e-9 * g.step;
    if !ok {
        return Err(Error::InvalidParameter {
            name: "refined",
            reason: "refined series must cover the same interval at half the step".into(),
        });
    }

    let h = g.step;
    let n = coarse.values.len();
    let (d1c, d2c) = finite_differences(&coarse.values, h);
    let (d1r, d2r) = finite_differences(&refined.values, rg.step);
    let lambda_at = |i: usize| g.lambda_min + i as f64 * h;

    // --- divergences: growing |d1| local maxima with doubling |d2| peaks
    let mut divergences = Vec::new();
    for i in 1..n - 1 {
        let a = d1c[i].abs();
        let (left, right) = (d1c[i - 1].abs(), d1c[i + 1].abs());
        if !(a >= left && a >= right && (a > left || a > right)) || a == 0.0 {
            continue;
        }
        let coarse_d2 = d2c[i - 1].abs().max(d2c[i].abs()).max(d2c[i + 1].abs());
        if coarse_d2 == 0.0 {
            continue;
        }
        let lo = 2 * (i - 1);
        let hi = (2 * (i + 1)).min(refined.values.len() - 1);
        let refined_d1 = d1r[lo..=hi].iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let refined_d2 = d2r[lo..=hi].iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if refined_d2 / coarse_d2 >= DIVERGENCE_D2_GROWTH
            && refined_d1 / a >= DIVERGENCE_D1_GROWTH
        {
            divergences.push((lambda_at(i), refined_d2 / coarse_d2, a));
        }
    }
    let divergences: Vec<Divergence> = merge_clusters(divergences, CLUSTER_STEPS * h)
        .into_iter()
        .map(|(lambda, growth_ratio)| Divergence {
            lambda,
            growth_ratio,
        })
        .collect();

    // --- jumps: adjacent-point steps in d1 above the windowed noise floor,
    // stable in size under refinement
    let deltas: Vec<f64> = d1c.windows(2).map(|w| w[1] - w[0]).collect();
    let d1_scale = d1c.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mut jumps = Vec::new();
    for (i, &delta) in deltas.iter().enumerate() {
        let lo = i.saturating_sub(JUMP_WINDOW_HALF);
        let hi = (i + JUMP_WINDOW_HALF + 1).min(deltas.len());
        let noise: Vec<f64> = (lo..hi)
            .filter(|&j| j != i)
            .map(|j| deltas[j].abs())
            .collect();
        let floor = median(noise);
        // a zero floor (exactly flat neighborhood) makes any real step
        // significant; the scale term keeps pure round-off out
        if delta.abs() <= JUMP_MEDIAN_FACTOR * floor + 1e-9 * d1_scale {
            continue;
        }
        // steps inside a divergence's detection window are tail structure
        // of the singularity, not kinks
        let mid = 0.5 * (lambda_at(i) + lambda_at(i + 1));
        if divergences
            .iter()
            .any(|d| (d.lambda - mid).abs() <= JUMP_WINDOW_HALF as f64 * h)
        {
            continue;
        }
        // net d1 change across the pair plus one step on either side
        let left = i.saturating_sub(1);
        let right = (i + 2).min(n - 1);
        let size_coarse = d1c[right] - d1c[left];
        if size_coarse == 0.0 {
            continue;
        }
        let size_refined = d1r[2 * right] - d1r[2 * left];
        let ratio = (size_refined / size_coarse).abs();
        if (JUMP_STABILITY_LOW..=JUMP_STABILITY_HIGH).contains(&ratio) {
            let lambda = 0.5 * (lambda_at(i) + lambda_at(i + 1));
            jumps.push((lambda, size_coarse, delta.abs()));
        }
    }
    let jumps = merge_clusters(jumps, CLUSTER_STEPS * h)
        .into_iter()
        .map(|(lambda, jump_size)| Jump { lambda, jump_size })
        .collect();

    // --- LQU direction switches: consecutive optimal directions more than
    // 30 degrees apart (antipodal directions identified)
    let mut direction_switches = Vec::new();
    if let Some(dirs) = &coarse.optimal_directions {
        let mut i = 0;
        while i + 1 < dirs.len() {
            if angle_between(dirs[i], dirs[i + 1]) <= SWITCH_ANGLE_DEG {
                i += 1;
                continue;
            }
            // group consecutive flips, then compare endpoint directions
            let start = i;
            let mut end = i + 1;
            while end + 1 < dirs.len() && angle_between(dirs[end], dirs[end + 1]) > SWITCH_ANGLE_DEG
            {
                end += 1;
            }
            let net = angle_between(dirs[start], dirs[end]);
            if net > SWITCH_ANGLE_DEG {
                direction_switches.push(DirectionSwitch {
                    lambda: 0.5 * (lambda_at(start) + lambda_at(end)),
                    from_axis: dominant_axis(dirs[start]),
                    to_axis: dominant_axis(dirs[end]),
                });
            }
            i = end;
        }
    }

    Ok(FeatureReport {
        divergences,
        jumps,
        direction_switches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::LocalObservable;

    fn series_from(values: Vec<f64>, grid: SweepGrid) -> MeasureSeries {
        MeasureSeries {
            grid,
            values,
            d1: None,
            d2: None,
            optimal_directions: None,
        }
    }

    #[test]
    fn grid_validation() {
        assert!(SweepGrid::new(1.0, 0.5, 0.01).is_err());
        assert!(SweepGrid::new(0.0, 1.0, -0.1).is_err());
        assert!(SweepGrid::new(0.0, 1.0, 0.1).is_err(), "only 10 steps");
        let g = SweepGrid::new(0.0, 1.0, 0.05).unwrap();
        assert_eq!(g.len(), 21);
        let pts = g.points();
        assert!((pts[20] - 1.0).abs() < 1e-12);
        assert!((g.refined().step - 0.025).abs() < 1e-15);
    }

    #[test]
    fn differentiate_constant_and_ramp() {
        let grid = SweepGrid::new(0.0, 2.0, 0.1).unwrap();
        let mut series = series_from(vec![3.5; grid.len()], grid);
        differentiate(&mut series);
        assert!(series.d1.as_ref().unwrap().iter().all(|&x| x.abs() < 1e-12));

        let mut ramp = series_from(grid.points(), grid);
        differentiate(&mut ramp);
        assert!(ramp.d1.as_ref().unwrap().iter().all(|&x| (x - 1.0).abs() < 1e-9));
        assert!(ramp.d2.as_ref().unwrap().iter().all(|&x| x.abs() < 1e-7));
    }

    #[test]
    fn smooth_series_yields_empty_report() {
        let grid = SweepGrid::new(0.8, 1.2, 1e-3).unwrap();
        let refined_grid = grid.refined();
        let f = |l: f64| ((l - 1.0) / 0.05).tanh();
        let coarse = series_from(grid.points().iter().map(|&l| f(l)).collect(), grid);
        let refined = series_from(
            refined_grid.points().iter().map(|&l| f(l)).collect(),
            refined_grid,
        );
        let report = detect_features(&coarse, &refined).unwrap();
        assert!(report.is_empty(), "{report:?}");
    }

    #[test]
    fn synthetic_log_divergence_is_detected() {
        // f'(x) ~ ln|x - 1| integrates to a continuous kink shape
        let grid = SweepGrid::new(0.8, 1.2, 1e-3).unwrap();
        let refined_grid = grid.refined();
        let f = |l: f64| {
            let x: f64 = l - 1.0;
            if x == 0.0 {
                0.0
            } else {
                x * x.abs().ln() - x
            }
        };
        let coarse = series_from(grid.points().iter().map(|&l| f(l)).collect(), grid);
        let refined = series_from(
            refined_grid.points().iter().map(|&l| f(l)).collect(),
            refined_grid,
        );
        let report = detect_features(&coarse, &refined).unwrap();
        assert_eq!(report.divergences.len(), 1, "{report:?}");
        assert!((report.divergences[0].lambda - 1.0).abs() <= 2e-3);
        assert!(report.jumps.is_empty(), "{report:?}");
    }

    #[test]
    fn synthetic_slope_jump_is_detected() {
        let grid = SweepGrid::new(0.8, 1.2, 1e-3).unwrap();
        let refined_grid = grid.refined();
        // slope changes from 1 to -0.5 at 1.0303 (off-grid kink)
        let f = |l: f64| {
            let x = l - 1.0303;
            if x < 0.0 {
                x
            } else {
                -0.5 * x
            }
        };
        let coarse = series_from(grid.points().iter().map(|&l| f(l)).collect(), grid);
        let refined = series_from(
            refined_grid.points().iter().map(|&l| f(l)).collect(),
            refined_grid,
        );
        let report = detect_features(&coarse, &refined).unwrap();
        assert!(report.divergences.is_empty(), "{report:?}");
        assert_eq!(report.jumps.len(), 1, "{report:?}");
        assert!((report.jumps[0].lambda - 1.0303).abs() <= 2e-3);
        assert!((report.jumps[0].jump_size - (-1.5)).abs() < 0.1);
    }

    #[test]
    fn detect_rejects_mismatched_grids() {
        let grid = SweepGrid::new(0.8, 1.2, 1e-3).unwrap();
        let coarse = series_from(vec![0.0; grid.len()], grid);
        let report = detect_features(&coarse, &coarse);
        assert!(report.is_err());
    }

    #[test]
    fn direction_switch_grouping() {
        let grid = SweepGrid::new(0.0, 1.0, 0.05).unwrap();
        let n = grid.len();
        let mut dirs = vec![[0.0, 0.0, 1.0]; n];
        for d in dirs.iter_mut().skip(10) {
            *d = [1.0, 0.0, 0.0];
        }
        let mut series = series_from(vec![0.0; n], grid);
        series.optimal_directions = Some(dirs);
        let refined_grid = grid.refined();
        let refined = series_from(vec![0.0; refined_grid.len()], refined_grid);
        let report = detect_features(&series, &refined).unwrap();
        assert_eq!(report.direction_switches.len(), 1);
        let sw = report.direction_switches[0];
        assert_eq!(sw.from_axis, AxisLabel::Z);
        assert_eq!(sw.to_axis, AxisLabel::X);
        assert!((sw.lambda - 0.475).abs() < 1e-12);
    }

    #[test]
    fn sweep_single_spin_matches_closed_form() {
        let grid = SweepGrid::new(0.2, 0.6, 0.02).unwrap();
        let params = SweepParams::new(0.5, Beta::Infinite);
        let kind = MeasureKind::LqcFull {
            observable: LocalObservable::x(),
            target: Target::SingleSpin,
        };
        let series = sweep(&kind, &grid, &params).unwrap();
        for (&lambda, &value) in grid.points().iter().zip(&series.values) {
            let p = ModelParams::new(lambda, 0.5, Beta::Infinite, 1).unwrap();
            let m = crate::correlators::magnetization(&p, &params.quadrature).unwrap();
            let closed = 1.0 - (1.0 - m * m).sqrt();
            assert!((value - closed).abs() < 1e-9, "lambda {lambda}");
        }
    }

    #[test]
    fn sweep_attaches_offending_lambda() {
        // lambda_min < 0 is invalid for the model
        let grid = SweepGrid::new(-0.5, 0.5, 0.05).unwrap();
        let params = SweepParams::new(0.5, Beta::Infinite);
        let kind = MeasureKind::Lqu;
        match sweep(&kind, &grid, &params) {
            Err(Error::SweepPoint { lambda, .. }) => assert!((lambda + 0.5).abs() < 1e-12),
            other => panic!("expected SweepPoint error, got {other:?}"),
        }
    }
}
