//! Command implementations behind the `qms-deco` binary.

pub mod checks;
pub mod model;

use std::io::Write;
use std::path::{Path, PathBuf};

use qmsdeco::constants::{self, SearchBudget};
use qmsdeco::dynamics::{self, DecoSearch, DecoTimeResult};
use qmsdeco::matops::{self, serde_rows, CMatrix};
use qmsdeco::report::{self, fmt_f64, ReportOptions};
use qmsdeco::{sampling, DecoherenceReport, DensityMatrix, ModelSpec};

pub use checks::Suite;
pub use model::Model;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Parse(String),
    Model(qmsdeco::Error),
    Violations(usize),
}

impl CliError {
    /// 0 success, 1 I/O or parse, 2 structural or mathematical failure, 3 tolerance violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => 1,
            CliError::Model(qmsdeco::Error::RejectedInput(_)) => 1,
            CliError::Model(_) => 2,
            CliError::Violations(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Violations(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qmsdeco::Error> for CliError {
    fn from(e: qmsdeco::Error) -> Self {
        CliError::Model(e)
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn budget(seed: u64, starts: usize) -> SearchBudget {
    SearchBudget { starts, perturbative: starts.min(8) / 2, ..SearchBudget::with_seed(seed) }
}

pub struct AnalyzeArgs {
    pub model: PathBuf,
    pub seed: u64,
    pub budget: usize,
    pub out: Option<PathBuf>,
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<DecoherenceReport, CliError> {
    let model = Model::load(&args.model)?;
    let f = model.functionals(args.seed)?;
    let mut opts = ReportOptions::new(args.seed);
    opts.budget = budget(args.seed, args.budget);
    let report = DecoherenceReport::build(&model.name, &f, &opts)?;
    write_text(args.out.as_deref(), &report.to_json()?)?;
    Ok(report)
}

/// Initial state for `simulate`: `mixed`, `plus`, `basis:K`, `random`, an inline
/// matrix of `[re, im]` rows, or a path to a JSON file holding one.
pub fn parse_state(spec: &str, d: usize, seed: u64) -> Result<DensityMatrix, CliError> {
    let spec = spec.trim();
    let from_rows = |text: &str| -> Result<DensityMatrix, CliError> {
        let rows: Vec<Vec<[f64; 2]>> =
            serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid state matrix: {e}")))?;
        let m = serde_rows::from_rows(&rows).map_err(CliError::Parse)?;
        if m.nrows() != d {
            return Err(CliError::Parse(format!("state has dimension {}, model has {d}", m.nrows())));
        }
        Ok(DensityMatrix::new(m)?)
    };
    match spec {
        "mixed" => Ok(DensityMatrix::maximally_mixed(d)),
        "random" => Ok(sampling::random_state(d, &mut sampling::rng(seed))),
        "plus" => {
            let psi = CMatrix::from_element(d, 1, matops::c(1.0 / (d as f64).sqrt(), 0.0));
            Ok(DensityMatrix::new(&psi * psi.adjoint())?)
        }
        s if s.starts_with("basis:") => {
            let k: usize = s[6..].parse().map_err(|_| CliError::Parse(format!("invalid basis index in {s:?}")))?;
            if k >= d {
                return Err(CliError::Parse(format!("basis index {k} out of range for dimension {d}")));
            }
            Ok(DensityMatrix::new(matops::unit(d, k, k))?)
        }
        s if s.starts_with('[') => from_rows(s),
        s => {
            let p = Path::new(s);
            let text = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            from_rows(&text)
        }
    }
}

pub struct SimulateArgs {
    pub model: PathBuf,
    pub rho: String,
    pub tmax: Option<f64>,
    pub points: usize,
    pub alpha: Option<f64>,
    pub seed: u64,
    pub budget: usize,
    pub out: Option<PathBuf>,
}

pub const CURVE_HEADER: [&str; 6] = ["t", "trace_dist", "df_variance", "df_entropy", "pi_bound", "mlsi_bound"];

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let model = Model::load(&args.model)?;
    let f = model.functionals(args.seed)?;
    let rho = parse_state(&args.rho, f.dim(), args.seed)?;
    let full = f.analysis.algebra.len() == f.dim() * f.dim();
    let lambda = if full { f64::NAN } else { constants::spectral_gap(&f)?.lambda };
    let alpha = match args.alpha {
        Some(a) => a,
        None if full => f64::NAN,
        None => constants::estimate_alpha(&f, &budget(args.seed, args.budget))?.alpha_upper,
    };
    let tmax = args.tmax.unwrap_or(if lambda.is_finite() { 5.0 / lambda } else { 5.0 });
    let times = dynamics::linear_grid(tmax, args.points.max(2));
    let curve = dynamics::trajectory(&f, &rho, &times)?;
    let bounds = dynamics::bound_curves(f.sigma_tr.min_eigenvalue(), lambda, alpha, &times);

    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = CURVE_HEADER.to_vec();
    if curve.mutual_info.is_some() {
        header.push("mutual_info");
    }
    wtr.write_record(&header).map_err(|e| CliError::Io(e.to_string()))?;
    for k in 0..times.len() {
        let mut row = vec![
            fmt_f64(times[k]),
            fmt_f64(curve.trace_dist[k]),
            fmt_f64(curve.df_variance[k]),
            fmt_f64(curve.df_entropy[k]),
            fmt_f64(bounds.pi[k]),
            fmt_f64(bounds.mlsi[k]),
        ];
        if let Some(mi) = &curve.mutual_info {
            row.push(fmt_f64(mi[k]));
        }
        wtr.write_record(&row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = wtr.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    write_text(args.out.as_deref(), &String::from_utf8_lossy(&bytes))
}

pub struct DecotimeArgs {
    pub model: PathBuf,
    pub epsilon: f64,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub budget: usize,
    pub out: Option<PathBuf>,
}

/// Least-squares line `y = a + b x` with its coefficient of determination.
#[derive(Debug, Clone, Copy)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LinearFit { intercept: my - slope * mx, slope, r2 }
}

pub const DECOTIME_HEADER: [&str; 9] =
    ["dim", "epsilon", "tau_empirical", "tau_PI_bound", "tau_MLSI_bound", "sigma_min", "lambda", "alpha", "g0"];

pub fn cmd_decotime(args: &DecotimeArgs) -> Result<Vec<DecoTimeResult>, CliError> {
    let model = Model::load(&args.model)?;
    let rows = match (&model.spec, args.dims.is_empty()) {
        (Some(ModelSpec::Deco { dim, gamma }), dims_empty) => {
            let dims = if dims_empty { vec![*dim] } else { args.dims.clone() };
            dims.iter()
                .map(|&d| dynamics::deco_decoherence_time(d, *gamma, args.epsilon))
                .collect::<qmsdeco::Result<Vec<_>>>()?
        }
        (_, false) => return Err(CliError::Parse("--dims is only available for the deco builder".into())),
        (_, true) => {
            let f = model.functionals(args.seed)?;
            let lambda = constants::spectral_gap(&f)?.lambda;
            let alpha = constants::estimate_alpha(&f, &budget(args.seed, args.budget))?.alpha_upper;
            let search = DecoSearch { seed: args.seed, ..DecoSearch::default() };
            vec![dynamics::decoherence_time(&f, args.epsilon, lambda, alpha, search)?]
        }
    };

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(DECOTIME_HEADER).map_err(|e| CliError::Io(e.to_string()))?;
    for r in &rows {
        let mut rec = vec![r.dim.to_string()];
        rec.extend(
            [r.epsilon, r.tau_empirical, r.tau_pi_bound, r.tau_mlsi_bound, r.sigma_min, r.lambda, r.alpha, r.g0]
                .iter()
                .map(|&v| fmt_f64(v)),
        );
        wtr.write_record(&rec).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = wtr.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    let csv_text = String::from_utf8_lossy(&bytes).into_owned();
    if let Some(p) = &args.out {
        std::fs::write(p, &csv_text).map_err(|e| io_err(p, e))?;
    }

    let mut table = format!("{:>5} {:>14} {:>14} {:>14}\n", "dim", "tau_emp", "tau_PI", "tau_MLSI");
    for r in &rows {
        table += &format!("{:>5} {:>14.6} {:>14.6} {:>14.6}\n", r.dim, r.tau_empirical, r.tau_pi_bound, r.tau_mlsi_bound);
    }
    if rows.len() >= 3 && rows.iter().all(|r| r.dim >= 2) {
        let ln_d: Vec<f64> = rows.iter().map(|r| (r.dim as f64).ln()).collect();
        let lnln_d: Vec<f64> = ln_d.iter().map(|x| x.ln()).collect();
        let pi: Vec<f64> = rows.iter().map(|r| r.tau_pi_bound).collect();
        let mlsi: Vec<f64> = rows.iter().map(|r| r.tau_mlsi_bound).collect();
        let a = linear_fit(&ln_d, &pi);
        let b = linear_fit(&lnln_d, &mlsi);
        table += &format!("tau_PI ~ ln d: slope {:.6}, R^2 {:.6}\n", a.slope, a.r2);
        table += &format!("tau_MLSI ~ ln ln d: slope {:.6}, R^2 {:.6}\n", b.slope, b.r2);
    }
    std::io::stdout().write_all(table.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(rows)
}

pub struct CheckArgs {
    pub model: PathBuf,
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub budget: usize,
    pub out: Option<PathBuf>,
}

/// Runs the suite, writes the JSON report, and fails with exit code 3 on violations.
pub fn cmd_check(args: &CheckArgs) -> Result<checks::CheckReport, CliError> {
    let model = Model::load(&args.model)?;
    let f = model.functionals(args.seed)?;
    let cfg = checks::CheckConfig { seed: args.seed, samples: args.samples, budget: budget(args.seed, args.budget) };
    let rep = checks::run(&f, &model.name, args.suite, &cfg)?;
    write_text(args.out.as_deref(), &report::to_json(&rep)?)?;
    match rep.failures() {
        0 => Ok(rep),
        n => Err(CliError::Violations(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_of_exact_line() {
        let fit = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((fit.slope - 2.0).abs() < 1e-14 && (fit.intercept - 1.0).abs() < 1e-14);
        assert!((fit.r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn state_specs() {
        assert!((matops::trace(parse_state("mixed", 3, 1).unwrap().mat()).re - 1.0).abs() < 1e-15);
        assert_eq!(parse_state("basis:1", 2, 1).unwrap().mat()[(1, 1)].re, 1.0);
        assert!(parse_state("basis:2", 2, 1).is_err());
        let inline = parse_state("[[[0.5,0],[0.3,0]],[[0.3,0],[0.5,0]]]", 2, 1).unwrap();
        assert_eq!(inline.mat()[(0, 1)].re, 0.3);
        assert!(matches!(parse_state("[[[2,0]]]", 1, 1), Err(CliError::Model(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Io("x".into()).exit_code(), 1);
        assert_eq!(CliError::Model(qmsdeco::Error::Structural("x".into())).exit_code(), 2);
        assert_eq!(CliError::Violations(1).exit_code(), 3);
    }
}
