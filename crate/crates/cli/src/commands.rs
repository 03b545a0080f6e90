//! Subcommands. Each one loads its inputs, calls the library, and packs the
//! library's own numbers into a [`RunReport`].

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cur_spca::cursampler::{cur_decompose, SamplingMode};
use cur_spca::glsolver::{
    glreg_solve, glspca_solve, kkt_scale, tune_lambda1_with, GlConfig, GlSolution, TuneMode, TuneOutcome,
    DEFAULT_MAX_PROBES,
};
use cur_spca::matcore::{column_projection_error, factor_projection_error};
use cur_spca::synthbench::{
    cur_error_curve, glreg_error_curve, run_trial_detailed, summarize_trials, Case, CurvePoint, Dataset, Estimate,
    Fit, Method, SignalSpec, Tuning, ZeroMask, score_fit,
};
use cur_spca::DenseMatrix;
use serde::Serialize;
use serde_json::json;

use crate::io::{create_dir, load_indices, load_matrix, save_indices, save_matrix, write_text};
use crate::report::{Metrics, RunReport};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "curspca", version, about = "Leverage-score CUR, group-lasso regression and group-lasso sparse PCA")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample columns by leverage score and report the projection error.
    Cur(CurArgs),
    /// Group-lasso self-regression: select columns through row-sparse coefficients.
    Glreg(GlregArgs),
    /// Group-lasso sparse PCA with row-sparse loadings.
    Glspca(GlspcaArgs),
    /// Run seeded trials on synthetic signal-plus-noise data.
    Simulate(SimulateArgs),
    /// Score saved outputs against a signal.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    WithReplacement,
    Distinct,
}

impl From<ModeArg> for SamplingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::WithReplacement => SamplingMode::WithReplacement,
            ModeArg::Distinct => SamplingMode::Distinct,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Data matrix as CSV, one observation per row.
    #[arg(long)]
    pub input: PathBuf,
    /// Skip the first line of the input.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    /// Relative objective change that counts as converged.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Stationarity bound, relative to the largest squared column norm.
    #[arg(long, default_value_t = 1e-6)]
    pub kkt_tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Bisection budget when tuning lambda1 to a row count.
    #[arg(long, default_value_t = DEFAULT_MAX_PROBES)]
    pub max_probes: usize,
}

impl SolverArgs {
    fn config(&self, x: &DenseMatrix, rank: usize, lambda: f64) -> GlConfig {
        GlConfig::new(rank)
            .with_lambda(lambda)
            .with_tol(self.tol)
            .with_kkt_tol(self.kkt_tol * kkt_scale(x))
            .with_max_iter(self.max_iter)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CurArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Number of right singular vectors behind the leverage scores.
    #[arg(long)]
    pub rank: usize,
    /// Columns to sample.
    #[arg(long)]
    pub cols: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::WithReplacement)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for selected.txt, scores.csv and report.json.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write an error-versus-columns curve here.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Column counts on the curve; defaults to 1..=cols.
    #[arg(long, value_delimiter = ',')]
    pub curve_cols: Vec<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(clap::ArgGroup::new("penalty").required(true).args(["target_rows", "lambda1"])))]
pub struct GlregArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Tune lambda1 to this many selected columns.
    #[arg(long)]
    pub target_rows: Option<usize>,
    /// Solve at a fixed group-lasso weight.
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Ridge weight.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Directory for selected.txt, b.csv and report.json.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write an error-versus-columns curve here.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Column counts on the curve; defaults to 1..=target-rows.
    #[arg(long, value_delimiter = ',')]
    pub curve_cols: Vec<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(clap::ArgGroup::new("penalty").required(true).args(["target_rows", "lambda1"])))]
pub struct GlspcaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub rank: usize,
    /// Ridge weight.
    #[arg(long)]
    pub lambda: f64,
    /// Tune lambda1 to this many nonzero rows of W.
    #[arg(long)]
    pub target_rows: Option<usize>,
    /// Solve at a fixed group-lasso weight.
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Directory for w.csv, a.csv, rows.txt and report.json.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// I, II or III.
    #[arg(long)]
    pub case: Case,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    /// Signal rank and method rank.
    #[arg(long, default_value_t = 10)]
    pub rank: usize,
    /// Fraction of zeros in the signal (Case I) or in V (Cases II, III).
    #[arg(long)]
    pub sparsity: f64,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    /// cur, glreg, spca_oracle or glpca.
    #[arg(long)]
    pub method: Method,
    /// Column or row count to tune to; defaults to the true count.
    #[arg(long)]
    pub cols: Option<usize>,
    /// Signal scale; defaults to 3 (sqrt(n) + sqrt(p)).
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Distinct)]
    pub mode: ModeArg,
    /// Ridge weight of the PCA methods, as a multiple of sigma_1(X)^2.
    #[arg(long, default_value_t = 1.0)]
    pub pca_lambda: f64,
    /// Ridge weight of GL-REG.
    #[arg(long, default_value_t = 0.0)]
    pub reg_lambda: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Directory for report.json.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write each trial's data and fit under <output>/trial-<t>/.
    #[arg(long, requires = "output")]
    pub save_trials: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(clap::ArgGroup::new("fit").required(true).args(["factors", "selected"])))]
pub struct EvalArgs {
    /// Signal matrix.
    #[arg(long)]
    pub xhat: PathBuf,
    /// Observed data matrix.
    #[arg(long)]
    pub x: PathBuf,
    /// Loading matrix W (p x k) as CSV.
    #[arg(long)]
    pub factors: Option<PathBuf>,
    /// Selected column indices, one per line.
    #[arg(long)]
    pub selected: Option<PathBuf>,
    /// Matrix whose zeros are the true zeros: the signal layout (n x p) or the
    /// loading layout (p x k). Defaults to the signal.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Every input CSV has a header line.
    #[arg(long)]
    pub header: bool,
    /// Directory for report.json.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Run a parsed command. Returns the report and, if any, the directory it
/// should also be written to.
pub fn run(command: &Command) -> Result<(RunReport, Option<PathBuf>), CliError> {
    match command {
        Command::Cur(a) => run_cur(a).map(|r| (r, a.output.clone())),
        Command::Glreg(a) => run_glreg(a).map(|r| (r, a.output.clone())),
        Command::Glspca(a) => run_glspca(a).map(|r| (r, a.output.clone())),
        Command::Simulate(a) => run_simulate(a).map(|r| (r, a.output.clone())),
        Command::Eval(a) => run_eval(a).map(|r| (r, a.output.clone())),
    }
}

fn config_json(args: &impl Serialize) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments are plain data")
}

fn prepare(dir: &Option<PathBuf>) -> Result<(), CliError> {
    if let Some(d) = dir {
        create_dir(d)?;
    }
    Ok(())
}

fn write_curve(path: &Path, points: &[CurvePoint]) -> Result<(), CliError> {
    let mut text = String::from("columns,selected,error\n");
    for pt in points {
        text.push_str(&format!("{},{},{:.16e}\n", pt.target, pt.selected, pt.error));
    }
    Ok(write_text(path, &text)?)
}

fn curve_counts(requested: &[usize], upto: usize) -> Vec<usize> {
    if requested.is_empty() {
        (1..=upto).collect()
    } else {
        requested.to_vec()
    }
}

fn solver_metrics(sol: &GlSolution) -> Metrics {
    Metrics {
        active_count: Some(sol.active_rows.len()),
        objective_final: Some(sol.objective()),
        kkt_residual: Some(sol.kkt_residual),
        iterations: Some(sol.iterations),
        converged: Some(sol.converged),
        ..Metrics::default()
    }
}

fn solver_details(sol: &GlSolution, lambda1: f64, tune: Option<&TuneOutcome>) -> serde_json::Value {
    let mut d = json!({
        "lambda1": lambda1,
        "sweeps": sol.sweeps,
        "active_rows": sol.active_rows.indices(),
        "diagnostics": sol.diagnostics,
    });
    if let Some(t) = tune {
        d["target_rows"] = json!(t.target_rows);
        d["gap"] = json!(t.gap);
        d["lambda1_max"] = json!(t.lambda1_max);
        d["probes"] = json!(t.probes);
    }
    d
}

fn run_cur(a: &CurArgs) -> Result<RunReport, CliError> {
    let x = load_matrix(&a.input.input, a.input.header)?;
    let mode = a.mode.into();
    let r = cur_decompose(&x, a.rank, a.cols, mode, a.seed)?;
    let metrics = Metrics { err_reg: Some(r.error), active_count: Some(r.selected.len()), ..Metrics::default() };
    let mut report = RunReport::new("cur", config_json(a), metrics, Some(a.seed));
    report.details = json!({ "draws": r.draws, "selected": r.selected.indices() });
    prepare(&a.output)?;
    if let Some(dir) = &a.output {
        save_indices(&dir.join("selected.txt"), &r.selected)?;
        let scores = DenseMatrix::from_column_slice(x.ncols(), 1, r.scores.scores());
        save_matrix(&dir.join("scores.csv"), &scores)?;
    }
    if let Some(path) = &a.curve {
        write_curve(path, &cur_error_curve(&x, a.rank, &curve_counts(&a.curve_cols, a.cols), mode, a.seed)?)?;
    }
    Ok(report)
}

fn run_glreg(a: &GlregArgs) -> Result<RunReport, CliError> {
    let x = load_matrix(&a.input.input, a.input.header)?;
    let config = a.solver.config(&x, 1, a.lambda);
    let (sol, lambda1, tune) = match (a.target_rows, a.lambda1) {
        (Some(c), _) => {
            let out = tune_lambda1_with(&x, &config, c, TuneMode::Reg, a.solver.max_probes)?;
            (out.solution.clone(), out.lambda1, Some(out))
        }
        (None, Some(l1)) => (glreg_solve(&x, &config.with_lambda1(l1))?, l1, None),
        (None, None) => return Err(CliError::Usage("one of --target-rows or --lambda1 is required".into())),
    };
    let metrics = Metrics { err_reg: Some(column_projection_error(&x, &sol.active_rows)?), ..solver_metrics(&sol) };
    let mut report = RunReport::new("glreg", config_json(a), metrics, None);
    report.details = solver_details(&sol, lambda1, tune.as_ref());
    prepare(&a.output)?;
    if let Some(dir) = &a.output {
        save_indices(&dir.join("selected.txt"), &sol.active_rows)?;
        save_matrix(&dir.join("b.csv"), &sol.factors.w)?;
    }
    if let Some(path) = &a.curve {
        let upto = a.target_rows.unwrap_or(sol.active_rows.len()).max(1);
        write_curve(path, &glreg_error_curve(&x, &config, &curve_counts(&a.curve_cols, upto), a.solver.max_probes)?)?;
    }
    Ok(report)
}

fn run_glspca(a: &GlspcaArgs) -> Result<RunReport, CliError> {
    let x = load_matrix(&a.input.input, a.input.header)?;
    let config = a.solver.config(&x, a.rank, a.lambda);
    let (sol, lambda1, tune) = match (a.target_rows, a.lambda1) {
        (Some(c), _) => {
            let out = tune_lambda1_with(&x, &config, c, TuneMode::Spca, a.solver.max_probes)?;
            (out.solution.clone(), out.lambda1, Some(out))
        }
        (None, Some(l1)) => (glspca_solve(&x, &config.with_lambda1(l1), None)?, l1, None),
        (None, None) => return Err(CliError::Usage("one of --target-rows or --lambda1 is required".into())),
    };
    let metrics = Metrics { err_pca: Some(factor_projection_error(&x, &sol.factors.w)?), ..solver_metrics(&sol) };
    let mut report = RunReport::new("glspca", config_json(a), metrics, None);
    report.details = solver_details(&sol, lambda1, tune.as_ref());
    prepare(&a.output)?;
    if let Some(dir) = &a.output {
        save_matrix(&dir.join("w.csv"), &sol.factors.w)?;
        save_matrix(&dir.join("a.csv"), &sol.factors.a)?;
        save_indices(&dir.join("rows.txt"), &sol.active_rows)?;
    }
    Ok(report)
}

fn save_trial(dir: &Path, data: &Dataset, fit: &Fit) -> Result<(), CliError> {
    create_dir(dir)?;
    save_matrix(&dir.join("x.csv"), &data.x)?;
    save_matrix(&dir.join("xhat.csv"), &data.xhat)?;
    if let Some(v) = &data.v {
        save_matrix(&dir.join("v.csv"), v)?;
    }
    match fit {
        Fit::Columns { selected, .. } => save_indices(&dir.join("selected.txt"), selected)?,
        Fit::Factors { w, .. } => save_matrix(&dir.join("w.csv"), w)?,
    }
    Ok(())
}

fn run_simulate(a: &SimulateArgs) -> Result<RunReport, CliError> {
    let mut spec = SignalSpec::from_sparsity(a.case, a.n, a.p, a.rank, a.sparsity, a.seed)?;
    if let Some(theta) = a.amplitude {
        spec = spec.with_amplitude(theta);
        spec.validate()?;
    }
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let tuning = Tuning {
        rank: a.rank,
        cur_mode: a.mode.into(),
        pca_lambda: a.pca_lambda,
        reg_lambda: a.reg_lambda,
        tol: a.solver.tol,
        rel_kkt_tol: a.solver.kkt_tol,
        max_iter: a.solver.max_iter,
        max_probes: a.solver.max_probes,
        target: a.cols,
    };
    prepare(&a.output)?;
    let mut results = Vec::with_capacity(a.trials);
    for t in 0..a.trials {
        let r = run_trial_detailed(&spec, a.method, &tuning, t);
        if let (true, Some(dir), Ok((data, fit, _))) = (a.save_trials, &a.output, &r) {
            save_trial(&dir.join(format!("trial-{t}")), data, fit)?;
        }
        results.push(r.map(|(_, _, outcome)| outcome));
    }
    let summary = summarize_trials(&spec, a.method, &tuning, results);
    if summary.trials.is_empty() {
        let first = &summary.failures[0];
        return Err(CliError::Failed(format!("every trial failed; trial {}: {}", first.trial, first.error)));
    }
    let converged: Vec<bool> = summary.trials.iter().filter_map(|o| o.converged).collect();
    let kkt = summary.trials.iter().filter_map(|o| o.kkt_residual).reduce(f64::max);
    let metrics = Metrics {
        err_reg: summary.err_reg.map(|s| s.mean),
        err_pca: summary.err_pca.map(|s| s.mean),
        precision: summary.precision.map(|s| s.mean),
        kkt_residual: kkt,
        converged: (!converged.is_empty()).then(|| converged.iter().all(|c| *c)),
        ..Metrics::default()
    };
    let mut report = RunReport::new("simulate", config_json(a), metrics, Some(a.seed));
    report.details = serde_json::to_value(&summary).expect("summary is plain data");
    Ok(report)
}

fn run_eval(a: &EvalArgs) -> Result<RunReport, CliError> {
    let xhat = load_matrix(&a.xhat, a.header)?;
    let x = load_matrix(&a.x, a.header)?;
    let truth = match &a.truth {
        Some(path) => ZeroMask::of_matrix(&load_matrix(path, a.header)?),
        None => ZeroMask::of_matrix(&xhat),
    };
    let scores = match (&a.factors, &a.selected) {
        (Some(path), _) => {
            let w = load_matrix(path, a.header)?;
            score_fit(&xhat, &x, &truth, Estimate::Loadings(&w))?
        }
        (None, Some(path)) => {
            let set = load_indices(path, x.ncols())?;
            score_fit(&xhat, &x, &truth, Estimate::Columns(&set))?
        }
        (None, None) => return Err(CliError::Usage("one of --factors or --selected is required".into())),
    };
    let metrics = Metrics {
        err_reg: scores.err_reg,
        err_pca: scores.err_pca,
        precision: scores.precision,
        active_count: Some(scores.active_count),
        ..Metrics::default()
    };
    prepare(&a.output)?;
    let mut report = RunReport::new("eval", config_json(a), metrics, None);
    report.details = json!({ "recall": scores.recall });
    Ok(report)
}
