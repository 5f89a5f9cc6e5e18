//! Command-line front end producing plot-ready data files and estimation
//! reports. Output is deterministic for a fixed configuration: numbers are
//! printed with 17 significant digits, JSON keys are sorted, and every
//! file embeds the resolved configuration and the tool version.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use xychain::correlators::{correlator_set, Beta, ModelParams};
use xychain::critical::{estimate_cp, estimate_fp};
use xychain::hermitian::LocalObservable;
use xychain::measures::{local_coherence, lqu, skew_information, skew_information_lower, MeasureKind, Target};
use xychain::oracle::{brute_force_lqu, finite_chain_correlators, FiniteChainSpec};
use xychain::quadrature::QuadratureConfig;
use xychain::states::{single_spin_state, two_spin_state};
use xychain::sweep::{differentiate, sweep, SweepGrid, SweepParams};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(
    name = "xychain",
    version,
    about = "Correlators, coherence measures, and transition points of the transverse-field XY chain"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep a measure over a lambda grid and write lambda,value,d1,d2 rows
    Scan(ScanArgs),
    /// Estimate the critical point from the first-derivative extremum at T > 0
    EstimateCp(EstimateArgs),
    /// Estimate the factorization point from the second-derivative extremum at T > 0
    EstimateFp(EstimateArgs),
    /// Print correlators, state spectra, and every measure at one parameter point
    Point(PointArgs),
    /// Cross-check the quadrature pipeline against exact diagonalization and brute-force LQU
    OracleCheck(OracleArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MeasureArg {
    LqcX,
    LqcY,
    LqcZ,
    LqcXLower,
    LqcYLower,
    LqcZLower,
    Lqu,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Single,
    Pair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PointFormatArg {
    Text,
    Json,
}

/// "min:max:step"
#[derive(Clone, Copy, Debug)]
pub struct LambdaRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

fn parse_range(s: &str) -> Result<LambdaRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected min:max:step, got `{s}`"));
    }
    let parse = |p: &str| -> Result<f64, String> {
        p.parse::<f64>().map_err(|_| format!("`{p}` is not a number"))
    };
    Ok(LambdaRange {
        min: parse(parts[0])?,
        max: parse(parts[1])?,
        step: parse(parts[2])?,
    })
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Anisotropy in (0, 1]
    #[arg(long)]
    pub gamma: f64,
    /// Temperature; 0 selects the exact ground state
    #[arg(long = "T")]
    pub temperature: f64,
    #[arg(long)]
    pub measure: MeasureArg,
    #[arg(long, default_value = "pair")]
    pub target: TargetArg,
    /// Spin separation
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Field grid as min:max:step
    #[arg(long, value_parser = parse_range)]
    pub lambda: LambdaRange,
    /// Output path; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    pub gamma: f64,
    /// Temperature; must be positive for the estimators
    #[arg(long = "T")]
    pub temperature: f64,
    #[arg(long)]
    pub measure: MeasureArg,
    #[arg(long, default_value = "pair")]
    pub target: TargetArg,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Search window as min:max:step
    #[arg(long, value_parser = parse_range)]
    pub lambda: LambdaRange,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long = "T")]
    pub temperature: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    #[arg(long, default_value = "text")]
    pub format: PointFormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Ring size for exact diagonalization (2..=12)
    #[arg(long, default_value_t = 10)]
    pub n_sites: usize,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// Inverse temperature of the thermal comparison
    #[arg(long, default_value_t = 5.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Tolerated finite-chain deviation
    #[arg(long, default_value_t = 2e-2)]
    pub tol_chain: f64,
    /// Tolerated LQU brute-force deviation
    #[arg(long, default_value_t = 1e-6)]
    pub tol_lqu: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// CLI failure with the exit status it maps to: 1 for validation problems,
/// 2 for numerical ones.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

fn flag_for(name: &str) -> &'static str {
    match name {
        "gamma" => "--gamma",
        "temperature" | "beta" => "--T",
        "r" => "--r",
        "measure" => "--measure",
        "n_sites" => "--n-sites",
        "lambda" | "lambda range" | "step" | "lambda window" | "integration interval" => "--lambda",
        _ => "--lambda",
    }
}

fn classify(err: xychain::Error) -> CliError {
    use xychain::Error::*;
    match err {
        InvalidParameter { name, reason } => {
            CliError::Validation(format!("{}: {reason}", flag_for(name)))
        }
        SweepPoint { lambda, source } => match classify(*source) {
            CliError::Validation(m) => CliError::Validation(m),
            CliError::Numerical(m) => {
                CliError::Numerical(format!("at lambda = {lambda}: {m}"))
            }
        },
        other => CliError::Numerical(other.to_string()),
    }
}

fn measure_kind(measure: MeasureArg, target: TargetArg) -> Result<MeasureKind, CliError> {
    let t = match target {
        TargetArg::Single => Target::SingleSpin,
        TargetArg::Pair => Target::TwoSpin,
    };
    let kind = match measure {
        MeasureArg::LqcX => MeasureKind::LqcFull { observable: LocalObservable::x(), target: t },
        MeasureArg::LqcY => MeasureKind::LqcFull { observable: LocalObservable::y(), target: t },
        MeasureArg::LqcZ => MeasureKind::LqcFull { observable: LocalObservable::z(), target: t },
        MeasureArg::LqcXLower => MeasureKind::LqcLower { observable: LocalObservable::x(), target: t },
        MeasureArg::LqcYLower => MeasureKind::LqcLower { observable: LocalObservable::y(), target: t },
        MeasureArg::LqcZLower => MeasureKind::LqcLower { observable: LocalObservable::z(), target: t },
        MeasureArg::Lqu => {
            if target == TargetArg::Single {
                return Err(CliError::Validation(
                    "--target: lqu is a two-spin measure; use --target pair".into(),
                ));
            }
            MeasureKind::Lqu
        }
    };
    Ok(kind)
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Validation(format!("--out: cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scan(args) => run_scan(args),
        Command::EstimateCp(args) => run_estimate(args, true),
        Command::EstimateFp(args) => run_estimate(args, false),
        Command::Point(args) => run_point(args),
        Command::OracleCheck(args) => run_oracle_check(args),
    }
}

fn run_scan(args: ScanArgs) -> Result<(), CliError> {
    let kind = measure_kind(args.measure, args.target)?;
    let grid = SweepGrid::new(args.lambda.min, args.lambda.max, args.lambda.step)
        .map_err(classify)?;
    let beta = Beta::from_temperature(args.temperature).map_err(classify)?;
    let params = SweepParams {
        gamma: args.gamma,
        beta,
        r: args.r,
        quadrature: QuadratureConfig::default(),
    };
    let mut series = sweep(&kind, &grid, &params).map_err(classify)?;
    differentiate(&mut series);
    let d1 = series.d1.as_ref().expect("differentiated");
    let d2 = series.d2.as_ref().expect("differentiated");
    let points = grid.points();

    let content = match args.format {
        FormatArg::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "# xychain {VERSION}");
            let _ = writeln!(s, "# command = scan");
            let _ = writeln!(s, "# gamma = {}", args.gamma);
            let _ = writeln!(s, "# T = {}", args.temperature);
            let _ = writeln!(s, "# measure = {kind}");
            let _ = writeln!(s, "# r = {}", args.r);
            let _ = writeln!(
                s,
                "# lambda = {}:{}:{}",
                args.lambda.min, args.lambda.max, args.lambda.step
            );
            let _ = writeln!(s, "lambda,value,d1,d2");
            for i in 0..points.len() {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    num(points[i]),
                    num(series.values[i]),
                    num(d1[i]),
                    num(d2[i])
                );
            }
            s
        }
        FormatArg::Json => {
            let rows: Vec<serde_json::Value> = (0..points.len())
                .map(|i| json!([points[i], series.values[i], d1[i], d2[i]]))
                .collect();
            let doc = json!({
                "version": VERSION,
                "config": {
                    "command": "scan",
                    "gamma": args.gamma,
                    "T": args.temperature,
                    "measure": kind.to_string(),
                    "r": args.r,
                    "lambda": [args.lambda.min, args.lambda.max, args.lambda.step],
                },
                "columns": ["lambda", "value", "d1", "d2"],
                "rows": rows,
            });
            format!("{doc:#}\n")
        }
    };
    emit(&args.out, &content)
}

fn run_estimate(args: EstimateArgs, critical_point: bool) -> Result<(), CliError> {
    let kind = measure_kind(args.measure, args.target)?;
    let window = SweepGrid::new(args.lambda.min, args.lambda.max, args.lambda.step)
        .map_err(classify)?;
    let quad = QuadratureConfig::default();
    let estimate = if critical_point {
        estimate_cp(&kind, args.gamma, args.temperature, &window, args.r, &quad)
    } else {
        estimate_fp(&kind, args.gamma, args.temperature, &window, args.r, &quad)
    }
    .map_err(classify)?;

    let doc = json!({
        "lambda_hat": estimate.lambda_hat,
        "temperature": estimate.temperature,
        "measure": kind.to_string(),
        "window": [window.lambda_min, window.lambda_max],
        "step": window.step,
        "version": VERSION,
        "config": {
            "command": if critical_point { "estimate-cp" } else { "estimate-fp" },
            "gamma": args.gamma,
            "T": args.temperature,
            "measure": kind.to_string(),
            "r": args.r,
            "lambda": [args.lambda.min, args.lambda.max, args.lambda.step],
        },
    });
    emit(&args.out, &format!("{doc:#}\n"))
}

fn run_point(args: PointArgs) -> Result<(), CliError> {
    let beta = Beta::from_temperature(args.temperature).map_err(classify)?;
    let params = ModelParams::new(args.lambda, args.gamma, beta, args.r).map_err(classify)?;
    let quad = QuadratureConfig::default();
    let set = correlator_set(&params, &quad).map_err(classify)?;
    let single = single_spin_state(&set).map_err(classify)?;
    let pair = two_spin_state(&set).map_err(classify)?;
    let single_eigs = single.eigenvalues().map_err(classify)?;
    let pair_eigs = pair.eigenvalues().map_err(classify)?;

    let axes = [
        ("x", LocalObservable::x()),
        ("y", LocalObservable::y()),
        ("z", LocalObservable::z()),
    ];
    let mut measures: Vec<(String, f64)> = Vec::new();
    for (name, obs) in &axes {
        let k2 = obs.matrix();
        measures.push((
            format!("lqc-{name}/single"),
            skew_information(&single, &k2).map_err(classify)?,
        ));
        measures.push((
            format!("lqc-{name}-lower/single"),
            skew_information_lower(&single, &k2).map_err(classify)?,
        ));
        measures.push((
            format!("lqc-{name}/pair"),
            local_coherence(&pair, obs, false).map_err(classify)?,
        ));
        measures.push((
            format!("lqc-{name}-lower/pair"),
            local_coherence(&pair, obs, true).map_err(classify)?,
        ));
    }
    let lqu_out = lqu(&pair).map_err(classify)?;

    let content = match args.format {
        PointFormatArg::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "# xychain {VERSION} point gamma={} T={} lambda={} r={}",
                args.gamma, args.temperature, args.lambda, args.r
            );
            let _ = writeln!(s, "m   = {}", num(set.m));
            let _ = writeln!(s, "cxx = {}", num(set.cxx));
            let _ = writeln!(s, "cyy = {}", num(set.cyy));
            let _ = writeln!(s, "czz = {}", num(set.czz));
            for (k, v) in &set.g {
                let _ = writeln!(s, "G[{k}] = {}", num(*v));
            }
            let _ = writeln!(
                s,
                "single_spin_eigenvalues = {}",
                single_eigs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
            );
            let _ = writeln!(
                s,
                "two_spin_eigenvalues = {}",
                pair_eigs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
            );
            for (name, value) in &measures {
                let _ = writeln!(s, "{name} = {}", num(*value));
            }
            let _ = writeln!(s, "lqu/pair = {}", num(lqu_out.value));
            let _ = writeln!(
                s,
                "lqu_optimal_direction = {}, {}, {}",
                num(lqu_out.optimal_direction[0]),
                num(lqu_out.optimal_direction[1]),
                num(lqu_out.optimal_direction[2])
            );
            s
        }
        PointFormatArg::Json => {
            let measure_map: serde_json::Map<String, serde_json::Value> = measures
                .iter()
                .map(|(k, v)| (k.clone(), json!(v)))
                .chain(std::iter::once(("lqu/pair".to_string(), json!(lqu_out.value))))
                .collect();
            let g_map: serde_json::Map<String, serde_json::Value> = set
                .g
                .iter()
                .map(|(k, v)| (k.to_string(), json!(v)))
                .collect();
            let doc = json!({
                "version": VERSION,
                "config": {
                    "command": "point",
                    "gamma": args.gamma,
                    "T": args.temperature,
                    "lambda": args.lambda,
                    "r": args.r,
                },
                "m": set.m,
                "cxx": set.cxx,
                "cyy": set.cyy,
                "czz": set.czz,
                "g": g_map,
                "single_spin_eigenvalues": single_eigs,
                "two_spin_eigenvalues": pair_eigs,
                "measures": measure_map,
                "lqu_optimal_direction": lqu_out.optimal_direction,
            });
            format!("{doc:#}\n")
        }
    };
    emit(&args.out, &content)
}

fn run_oracle_check(args: OracleArgs) -> Result<(), CliError> {
    let beta = Beta::new_finite(args.beta).map_err(classify)?;
    let params = ModelParams::new(args.lambda, args.gamma, beta, args.r).map_err(classify)?;
    let quad = QuadratureConfig::default();

    let spec = FiniteChainSpec::new(args.n_sites, params).map_err(classify)?;
    let ed = finite_chain_correlators(&spec).map_err(classify)?;
    let bulk = correlator_set(&params, &quad).map_err(classify)?;
    let dm = (ed.m - bulk.m).abs();
    let dxx = (ed.cxx - bulk.cxx).abs();
    let dyy = (ed.cyy - bulk.cyy).abs();
    let dzz = (ed.czz - bulk.czz).abs();
    let chain_worst = dm.max(dxx).max(dyy).max(dzz);

    // LQU closed form vs sphere search on two-spin states drawn from the
    // model itself (X states by construction)
    let mut lqu_worst = 0.0f64;
    for &lambda in &[0.3, 0.7, 1.1, 1.5, 1.9] {
        let p = params.with_lambda(lambda).map_err(classify)?;
        let set = correlator_set(&p, &quad).map_err(classify)?;
        let rho = two_spin_state(&set).map_err(classify)?;
        let exact = lqu(&rho).map_err(classify)?.value;
        let (brute, _) = brute_force_lqu(&rho, 64).map_err(classify)?;
        lqu_worst = lqu_worst.max((exact - brute).abs());
    }

    let mut s = String::new();
    let _ = writeln!(s, "# xychain {VERSION} oracle-check");
    let _ = writeln!(
        s,
        "# n_sites = {}, gamma = {}, lambda = {}, beta = {}, r = {}",
        args.n_sites, args.gamma, args.lambda, args.beta, args.r
    );
    let _ = writeln!(s, "finite_chain_dm   = {}", num(dm));
    let _ = writeln!(s, "finite_chain_dcxx = {}", num(dxx));
    let _ = writeln!(s, "finite_chain_dcyy = {}", num(dyy));
    let _ = writeln!(s, "finite_chain_dczz = {}", num(dzz));
    let _ = writeln!(s, "lqu_brute_force_max_deviation = {}", num(lqu_worst));
    let ok = chain_worst <= args.tol_chain && lqu_worst <= args.tol_lqu;
    let _ = writeln!(s, "result: {}", if ok { "OK" } else { "FAIL" });
    emit(&args.out, &s)?;
    if !ok {
        return Err(CliError::Numerical(format!(
            "oracle deviations exceed tolerances: chain {chain_worst:.3e} (tol {:.1e}), lqu {lqu_worst:.3e} (tol {:.1e})",
            args.tol_chain, args.tol_lqu
        )));
    }
    Ok(())
}
