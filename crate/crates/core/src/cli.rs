//! Command-line front end.
//!
//! Settings are resolved in this order, later entries winning: command
//! defaults, the `--config` file (`key = value`), `SWRED_SEED`, flags.
//! Exit codes: 0 pass, 1 verification or convergence failure, 2 usage or
//! configuration error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::equations::ResidualBundle;
use crate::error::{Result, SwError};
use crate::fields::{explicit_torus_solution, fit_explicit_family, perturbed_configuration, random_bandlimited_configuration, Configuration};
use crate::hk::{hk_suite, orthogonality_lemma_check, Fault};
use crate::io::{load_configuration, parse_key_values, parse_value, save_configuration, write_plot_data, Manifest};
use crate::lift4d::{clifford_check, reduction_consistency_check};
use crate::linear::{
    assemble, complex_a_report, dimension_formulas, dimension_report, gauge_injectivity, kernel_index,
    kernel_vectors, sigma_tangent_dim, AssembleOptions, DimensionCase,
};
use crate::solver::{coulomb_gauge_fix, solve, Method, SolveOptions};
use crate::surface::TorusGrid;
use crate::VERSION;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "swred", version, about = "Reduced Seiberg-Witten equations on the flat torus: residual checks, deformation counts, identity suites and a solver")]
pub struct Cli {
    /// `key = value` file with settings; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON report to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Grid points per side
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Torus side length (default 2π)
    #[arg(long, global = true)]
    pub side: Option<f64>,
    /// Random seed (also read from SWRED_SEED)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Frequency parameter c2 of the explicit solution
    #[arg(long, global = true)]
    pub c2: Option<f64>,
    /// Phase of c1 in the explicit solution
    #[arg(long, global = true)]
    pub phase: Option<f64>,
    /// Pass/fail tolerance of verify-explicit
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Highest Fourier mode of band-limited subspaces (at most n/4)
    #[arg(long, global = true)]
    pub max_mode: Option<usize>,
    /// Write gnuplot grids of the relevant configuration into this directory
    #[arg(long, global = true)]
    pub emit_plot_data: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    None,
    FlipOmega3,
    FlipSpinorJ,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Self {
        match f {
            FaultArg::None => Fault::None,
            FaultArg::FlipOmega3 => Fault::FlipOmega3,
            FaultArg::FlipSpinorJ => Fault::FlipSpinorJ,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Residuals of the explicit torus solution
    VerifyExplicit,
    /// Metric, symplectic-form, complex-structure and moment-map identities on random draws
    HkCheck {
        /// Number of random (base, X, Y, u) draws
        #[arg(long)]
        samples: Option<usize>,
        /// Deliberate sign error, for checking that the suite can fail
        #[arg(long, value_enum, default_value = "none", hide = true)]
        inject_fault: FaultArg,
    },
    /// Kernel, cokernel and index of the gauge-fixed linearisation at the explicit solution
    Linearize {
        /// Count the tangent space of the fixed-spinor moduli space instead
        #[arg(long)]
        sigma: bool,
        /// Homotopy parameter in [0, 1]
        #[arg(long)]
        t: Option<f64>,
        /// Relative singular value below which a direction counts as null
        #[arg(long)]
        rank_threshold: Option<f64>,
        /// Minimum singular value gap for a trustworthy count
        #[arg(long)]
        gap_threshold: Option<f64>,
    },
    /// Gauss-Newton or gradient flow from a perturbed explicit solution or a saved configuration
    Solve {
        /// Largest pointwise amplitude of the band-limited noise
        #[arg(long)]
        perturb: Option<f64>,
        /// Start from a saved configuration instead
        #[arg(long)]
        initial: Option<PathBuf>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        energy_tol: Option<f64>,
        /// gauss_newton or gradient_flow
        #[arg(long)]
        method: Option<String>,
        /// Save the result as a configuration container
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Per-iteration CSV trace
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Compare the 4D residuals of lifted configurations with the 2D residuals
    ReduceCheck {
        /// Number of random configurations
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Closed-form moduli dimensions
    Dims {
        #[arg(long)]
        g: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        c1: Option<i64>,
        /// n, sigma, vortex_psi1_zero or vortex_psi2_zero
        #[arg(long)]
        case: Option<String>,
    },
}

/// Fully resolved settings; embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n: usize,
    pub side: f64,
    pub seed: u64,
    pub c2: f64,
    pub phase: f64,
    pub tol: f64,
    pub max_mode: usize,
    pub samples: usize,
    pub t: f64,
    pub sigma: bool,
    pub rank_threshold: f64,
    pub gap_threshold: f64,
    pub perturb: f64,
    pub max_iters: usize,
    pub energy_tol: f64,
    pub method: String,
    pub initial: Option<PathBuf>,
    pub g: i64,
    pub c1: i64,
    pub case: String,
}

const KEYS: [&str; 19] = [
    "n",
    "side",
    "seed",
    "c2",
    "phase",
    "tol",
    "max_mode",
    "samples",
    "t",
    "sigma",
    "rank_threshold",
    "gap_threshold",
    "perturb",
    "max_iters",
    "energy_tol",
    "method",
    "g",
    "c1",
    "case",
];

impl RunConfig {
    fn defaults(command: &Command) -> Self {
        let (name, n, samples) = match command {
            Command::VerifyExplicit => ("verify-explicit", 32, 0),
            Command::HkCheck { .. } => ("hk-check", 16, 100),
            Command::Linearize { .. } => ("linearize", 16, 0),
            Command::Solve { .. } => ("solve", 16, 0),
            Command::ReduceCheck { .. } => ("reduce-check", 16, 50),
            Command::Dims { .. } => ("dims", 16, 0),
        };
        Self {
            command: name.into(),
            n,
            side: 2.0 * std::f64::consts::PI,
            seed: 0,
            c2: 1.0,
            phase: 0.0,
            tol: 1e-12,
            max_mode: usize::MAX,
            samples,
            t: 1.0,
            sigma: false,
            rank_threshold: crate::linear::DEFAULT_RANK_THRESHOLD,
            gap_threshold: crate::linear::DEFAULT_GAP_THRESHOLD,
            perturb: 1e-2,
            max_iters: 50,
            energy_tol: 1e-18,
            method: "gauss_newton".into(),
            initial: None,
            g: 1,
            c1: 0,
            case: "n".into(),
        }
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "n" => self.n = parse_value(key, v)?,
            "side" => self.side = parse_value(key, v)?,
            "seed" => self.seed = parse_value(key, v)?,
            "c2" => self.c2 = parse_value(key, v)?,
            "phase" => self.phase = parse_value(key, v)?,
            "tol" => self.tol = parse_value(key, v)?,
            "max_mode" => self.max_mode = parse_value(key, v)?,
            "samples" => self.samples = parse_value(key, v)?,
            "t" => self.t = parse_value(key, v)?,
            "sigma" => self.sigma = parse_value(key, v)?,
            "rank_threshold" => self.rank_threshold = parse_value(key, v)?,
            "gap_threshold" => self.gap_threshold = parse_value(key, v)?,
            "perturb" => self.perturb = parse_value(key, v)?,
            "max_iters" => self.max_iters = parse_value(key, v)?,
            "energy_tol" => self.energy_tol = parse_value(key, v)?,
            "method" => self.method = v.to_string(),
            "g" => self.g = parse_value(key, v)?,
            "c1" => self.c1 = parse_value(key, v)?,
            "case" => self.case = v.to_string(),
            other => {
                return Err(SwError::Config(format!("unknown key {other:?}; known keys: {}", KEYS.join(", "))))
            }
        }
        Ok(())
    }

    /// Defaults, then `config_text`, then `env_seed`, then flags.
    pub fn resolve(cli: &Cli, config_text: Option<&str>, env_seed: Option<&str>) -> Result<Self> {
        let mut cfg = Self::defaults(&cli.command);
        if let Some(text) = config_text {
            for (k, v) in parse_key_values(text)? {
                cfg.set(&k, &v)?;
            }
        }
        if let Some(s) = env_seed {
            cfg.seed = parse_value("SWRED_SEED", s.trim())?;
        }
        macro_rules! flag {
            ($src:expr => $dst:ident) => {
                if let Some(v) = $src.clone() {
                    cfg.$dst = v;
                }
            };
        }
        flag!(cli.n => n);
        flag!(cli.side => side);
        flag!(cli.seed => seed);
        flag!(cli.c2 => c2);
        flag!(cli.phase => phase);
        flag!(cli.tol => tol);
        flag!(cli.max_mode => max_mode);
        match &cli.command {
            Command::HkCheck { samples, .. } | Command::ReduceCheck { samples } => flag!(samples => samples),
            Command::Linearize { sigma, t, rank_threshold, gap_threshold } => {
                cfg.sigma |= *sigma;
                flag!(t => t);
                flag!(rank_threshold => rank_threshold);
                flag!(gap_threshold => gap_threshold);
            }
            Command::Solve { perturb, initial, max_iters, energy_tol, method, .. } => {
                flag!(perturb => perturb);
                flag!(max_iters => max_iters);
                flag!(energy_tol => energy_tol);
                flag!(method => method);
                cfg.initial = initial.clone();
            }
            Command::Dims { g, c1, case } => {
                flag!(g => g);
                flag!(c1 => c1);
                flag!(case => case);
            }
            Command::VerifyExplicit => {}
        }
        if cfg.max_mode == usize::MAX {
            cfg.max_mode = cfg.n / 4;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SwError::Config(m));
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return bad(format!("n = {} must be even and at least 4", self.n));
        }
        if !(self.side.is_finite() && self.side > 0.0) {
            return bad(format!("side = {} must be positive", self.side));
        }
        if self.max_mode > self.n / 4 {
            return bad(format!("max_mode = {} exceeds n/4 = {}", self.max_mode, self.n / 4));
        }
        if !(self.tol > 0.0) || !(self.energy_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if matches!(self.command.as_str(), "hk-check" | "reduce-check") && self.samples == 0 {
            return bad("samples must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.t) {
            return bad(format!("t = {} outside [0, 1]", self.t));
        }
        if !(self.perturb >= 0.0 && self.perturb.is_finite()) {
            return bad(format!("perturb = {} must be non-negative", self.perturb));
        }
        if !(self.rank_threshold > 0.0 && self.gap_threshold > 0.0) {
            return bad("thresholds must be positive".into());
        }
        self.method.parse::<Method>()?;
        self.case.parse::<DimensionCase>()?;
        Ok(())
    }

    fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.n, self.side)
    }
}

/// Exit code for an error that escaped a command.
pub fn exit_code(e: &SwError) -> i32 {
    match e {
        SwError::InvalidGrid(_)
        | SwError::GridMismatch
        | SwError::NonPeriodicParameter { .. }
        | SwError::InvalidArgument(_)
        | SwError::Config(_)
        | SwError::Parse(_)
        | SwError::Io(_)
        | SwError::Json(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

struct Outcome {
    passed: bool,
    result: Value,
    /// Plain text printed instead of a JSON report.
    plain: Option<String>,
}

fn report(cfg: &RunConfig, o: &Outcome) -> Value {
    json!({
        "command": cfg.command,
        "version": VERSION,
        "config": cfg,
        "passed": o.passed,
        "result": o.result,
    })
}

fn emit_plots(dir: &Option<PathBuf>, c: &Configuration) -> Result<()> {
    if let Some(d) = dir {
        write_plot_data(d, c)?;
    }
    Ok(())
}

fn verify_explicit(cfg: &RunConfig, plots: &Option<PathBuf>) -> Result<Outcome> {
    let c = explicit_torus_solution(cfg.grid()?, cfg.c2, cfg.phase)?;
    emit_plots(plots, &c)?;
    let r = ResidualBundle::evaluate(&c).report();
    let passed = r.max_residual() < cfg.tol;
    Ok(Outcome { passed, result: json!({ "residuals": r, "max_residual": r.max_residual() }), plain: None })
}

fn hk_check(cfg: &RunConfig, fault: Fault) -> Result<Outcome> {
    let suite = hk_suite(cfg.grid()?, cfg.samples, cfg.seed, cfg.max_mode, fault)?;
    // lemma diagnostics at the explicit solution on a small grid
    let g8 = TorusGrid::new(8, cfg.side)?;
    let lemma = match explicit_torus_solution(g8, cfg.c2, cfg.phase) {
        Ok(c) => {
            let op = assemble(&c, AssembleOptions::for_grid(&g8))?;
            let reports: Vec<_> = kernel_vectors(&op, cfg.rank_threshold)
                .iter()
                .map(|x| orthogonality_lemma_check(&c, x, 2))
                .collect();
            json!({ "n": 8, "kernel_vectors": reports })
        }
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    let failing: Vec<String> = suite.failing().into_iter().map(String::from).collect();
    Ok(Outcome {
        passed: suite.passed,
        result: json!({ "suite": suite, "failing": failing, "orthogonality_lemma": lemma }),
        plain: None,
    })
}

fn linearize(cfg: &RunConfig, plots: &Option<PathBuf>) -> Result<Outcome> {
    let c = explicit_torus_solution(cfg.grid()?, cfg.c2, cfg.phase)?;
    emit_plots(plots, &c)?;
    if cfg.sigma {
        let r = sigma_tangent_dim(&c, cfg.max_mode)?;
        let expected = dimension_formulas(1, 0, DimensionCase::Sigma)?;
        return Ok(Outcome {
            passed: true,
            result: json!({ "sigma": r, "dimension": r.kernel_dim, "formula_4g": expected }),
            plain: None,
        });
    }
    let opts = AssembleOptions { max_mode: cfg.max_mode, t: cfg.t, ..AssembleOptions::for_grid(c.grid()) };
    let op = assemble(&c, opts)?;
    let r = kernel_index(&op, cfg.rank_threshold, cfg.gap_threshold)?;
    let expected = dimension_formulas(1, 0, DimensionCase::N)?;
    let mut result = json!({
        "report": r,
        "formula_2g_plus_2": expected,
        "index_matches_formula": r.index == expected,
    });
    if cfg.t == 0.0 {
        let b = &op;
        let block = |rows: &[std::ops::Range<usize>], cols: &[std::ops::Range<usize>]| {
            let m = b.block(rows, cols);
            dimension_report(&m, c.grid(), cfg.max_mode, 0.0, cfg.rank_threshold, cfg.gap_threshold)
        };
        result["blocks"] = json!({
            "coupling": op.block_coupling(),
            "alpha": complex_a_report(&op),
            "gamma": block(&[op.layout.b_range()], &[op.basis.gamma_range()]),
            "beta": block(&[op.layout.c_range()], &[op.basis.beta_range()]),
            "gauge_injectivity": gauge_injectivity(&c, cfg.max_mode, 0.0)?,
        });
    }
    Ok(Outcome { passed: true, result, plain: None })
}

fn solve_cmd(cfg: &RunConfig, plots: &Option<PathBuf>, dump: &Option<PathBuf>, trace: &Option<PathBuf>) -> Result<Outcome> {
    let (initial, grid, base) = match &cfg.initial {
        Some(path) => {
            let (c, _) = load_configuration(path)?;
            let g = *c.grid();
            (c, g, None)
        }
        None => {
            let g = cfg.grid()?;
            let e = explicit_torus_solution(g, cfg.c2, cfg.phase)?;
            let c = if cfg.perturb > 0.0 {
                perturbed_configuration(&e, cfg.seed, cfg.max_mode.min(3), cfg.perturb)?
            } else {
                e.clone()
            };
            (c, g, Some(e))
        }
    };
    let opts = SolveOptions {
        max_iters: cfg.max_iters,
        energy_tol: cfg.energy_tol,
        method: cfg.method.parse()?,
        max_mode: cfg.max_mode.min(grid.n() / 4),
        ..SolveOptions::for_grid(grid.n())
    };
    let (out, rep) = match solve(&initial, &opts) {
        Ok(v) => v,
        Err(SwError::MaxItersExceeded(r) | SwError::StalledLineSearch(r)) => {
            if let Some(p) = trace {
                rep_trace(p, &r)?;
            }
            return Ok(Outcome { passed: false, result: json!({ "error": "no convergence", "report": r }), plain: None });
        }
        Err(e) => return Err(e),
    };
    if let Some(p) = trace {
        rep_trace(p, &rep)?;
    }
    if let Some(p) = dump {
        let m = Manifest { seed: Some(cfg.seed), c2: Some(cfg.c2), phase: Some(cfg.phase), ..Manifest::new(&grid, "solve") };
        save_configuration(p, &out, &m)?;
    }
    emit_plots(plots, &out)?;
    let mut result = json!({ "report": rep });
    if let Some(e) = base {
        // Coulomb gauge relative to the unperturbed solution, then the closest translate
        let (fixed, _) = coulomb_gauge_fix(&out, &e)?;
        let (phase, shift, distance) = fit_explicit_family(&fixed, cfg.c2)?;
        result["explicit_family"] = json!({
            "phase": phase,
            "shift": shift,
            "distance": distance,
            "fixed_max_residual": ResidualBundle::evaluate(&fixed).report().max_residual(),
        });
    }
    Ok(Outcome { passed: rep.converged, result, plain: None })
}

fn rep_trace(path: &Path, r: &crate::solver::SolveReport) -> Result<()> {
    let f = std::fs::File::create(path)?;
    r.write_trace_csv(std::io::BufWriter::new(f))
}

fn reduce_check(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.grid()?;
    let clifford = clifford_check();
    let mut worst = 0f64;
    let mut failures = Vec::new();
    let mut by_channel: Vec<(String, f64)> = Vec::new();
    for k in 0..cfg.samples as u64 {
        let c = random_bandlimited_configuration(grid, cfg.seed.wrapping_add(k), cfg.max_mode, 1.0)?;
        let r = reduction_consistency_check(&c);
        worst = worst.max(r.max_mismatch);
        for ch in &r.channels {
            match by_channel.iter_mut().find(|(n, _)| *n == ch.channel) {
                Some((_, m)) => *m = m.max(ch.mismatch),
                None => by_channel.push((ch.channel.clone(), ch.mismatch)),
            }
        }
        if !r.passed {
            failures.push(k);
        }
    }
    let explicit = explicit_torus_solution(grid, cfg.c2, cfg.phase).map(|c| reduction_consistency_check(&c));
    let explicit_ok = explicit.as_ref().map_or(true, |r| r.max_mismatch < 1e-12);
    let channels: Vec<Value> =
        by_channel.iter().map(|(n, m)| json!({ "channel": n, "max_mismatch": m })).collect();
    let passed = clifford.all_hold && failures.is_empty() && explicit_ok;
    Ok(Outcome {
        passed,
        result: json!({
            "clifford": clifford,
            "random": { "samples": cfg.samples, "max_mismatch": worst, "channels": channels, "failing_samples": failures.len() },
            "explicit": explicit.ok(),
        }),
        plain: None,
    })
}

fn dims(cfg: &RunConfig) -> Result<Outcome> {
    let d = dimension_formulas(cfg.g, cfg.c1, cfg.case.parse()?)?;
    Ok(Outcome { passed: true, result: json!({ "dimension": d }), plain: Some(d.to_string()) })
}

/// Runs a parsed command line and returns the exit code; reports go to
/// `stdout` (or `--out`), diagnostics to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match run_inner(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "swred: {e}");
            exit_code(&e)
        }
    }
}

fn run_inner(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let text = match &cli.config {
        Some(p) => Some(std::fs::read_to_string(p)?),
        None => None,
    };
    let env_seed = std::env::var("SWRED_SEED").ok();
    let cfg = RunConfig::resolve(cli, text.as_deref(), env_seed.as_deref())?;
    let outcome = match &cli.command {
        Command::VerifyExplicit => verify_explicit(&cfg, &cli.emit_plot_data)?,
        Command::HkCheck { inject_fault, .. } => hk_check(&cfg, (*inject_fault).into())?,
        Command::Linearize { .. } => linearize(&cfg, &cli.emit_plot_data)?,
        Command::Solve { dump, trace, .. } => solve_cmd(&cfg, &cli.emit_plot_data, dump, trace)?,
        Command::ReduceCheck { .. } => reduce_check(&cfg)?,
        Command::Dims { .. } => dims(&cfg)?,
    };
    let body = match &outcome.plain {
        Some(s) => format!("{s}\n"),
        None => format!("{}\n", serde_json::to_string_pretty(&report(&cfg, &outcome))?),
    };
    match &cli.out {
        Some(p) => std::fs::write(p, body)?,
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(if outcome.passed { EXIT_PASS } else { EXIT_FAIL })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("swred").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn precedence_defaults_file_env_flags() {
        let cli = parse(&["verify-explicit"]);
        let cfg = RunConfig::resolve(&cli, None, None).unwrap();
        assert_eq!((cfg.n, cfg.seed, cfg.max_mode), (32, 0, 8));

        let cfg = RunConfig::resolve(&cli, Some("n = 16\nseed = 3\n"), None).unwrap();
        assert_eq!((cfg.n, cfg.seed, cfg.max_mode), (16, 3, 4));

        let cfg = RunConfig::resolve(&cli, Some("seed = 3"), Some("9")).unwrap();
        assert_eq!(cfg.seed, 9);

        let cli = parse(&["--seed", "11", "verify-explicit"]);
        let cfg = RunConfig::resolve(&cli, Some("seed = 3"), Some("9")).unwrap();
        assert_eq!(cfg.seed, 11);
    }

    #[test]
    fn invalid_settings_are_rejected() {
        let cli = parse(&["verify-explicit"]);
        assert!(RunConfig::resolve(&cli, Some("colour = blue"), None).is_err());
        assert!(RunConfig::resolve(&cli, Some("n = 7"), None).is_err());
        assert!(RunConfig::resolve(&cli, Some("max_mode = 20"), None).is_err());
        assert!(RunConfig::resolve(&cli, None, Some("abc")).is_err());
        let cli = parse(&["hk-check", "--samples", "0"]);
        assert!(matches!(RunConfig::resolve(&cli, None, None), Err(SwError::Config(_))));
        let cli = parse(&["solve", "--method", "newton"]);
        assert!(RunConfig::resolve(&cli, None, None).is_err());
    }

    #[test]
    fn exit_codes() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(&parse(&["--n", "16", "verify-explicit"]), &mut out, &mut err), EXIT_PASS);
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["config"]["n"], 16);
        assert_eq!(run(&parse(&["--c2", "0.3", "verify-explicit"]), &mut Vec::new(), &mut err), EXIT_USAGE);
        assert_eq!(run(&parse(&["--tol", "1e-30", "verify-explicit"]), &mut Vec::new(), &mut err), EXIT_FAIL);
    }

    #[test]
    fn dims_prints_an_integer() {
        let mut out = Vec::new();
        let code = run(&parse(&["dims", "--g", "2", "--c1", "1", "--case", "vortex_psi1_zero"]), &mut out, &mut Vec::new());
        assert_eq!(code, EXIT_PASS);
        assert_eq!(String::from_utf8(out).unwrap(), "4\n");
    }
}
