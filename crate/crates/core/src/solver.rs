//! Gauss–Newton and gradient flow on the residual energy, and Coulomb gauge
//! fixing.
//!
//! Gauss–Newton linearises at every iterate on the same band-limited tangent
//! coordinates used for the dimension counts, so updates stay in the
//! subspace `|m|, |k| ≤ max_mode`. Rows are the residual samples on the
//! whole grid, because products with the base fields push the residual
//! beyond `max_mode` and a Galerkin projection of the rows would hide that
//! part of the energy. The flat gauge directions are handled by
//! the minimum-norm pseudo-inverse step. Slice rows `d₁*δ = 0` are not
//! appended: a gauge transformation that is not constant takes a
//! band-limited solution out of the band, so the slice through a perturbed
//! iterate generally contains no band-limited solution and the iteration
//! would stall. With `gauge_fix` the result is Coulomb-fixed relative to the
//! initial configuration afterwards and the quality of that fix is reported.
//!
//! Iterates are kept away from `Ψ = 0` (a spurious minimum of the energy)
//! by rejecting steps that push `‖Ψ‖` below `norm_floor`. This is a
//! heuristic, not a guarantee.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::equations::{EnergyWeights, ResidualBundle, ResidualReport};
use crate::error::{Result, SwError};
use crate::fields::{gauge_apply, Configuration, GaugeElement, TangentVector};
use crate::linear::{linearized_residual_t, LinearizedResidual, TangentBasis};
use crate::surface::{green_invert, partial_z, partial_zbar, ScalarField, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GaussNewton,
    GradientFlow,
}

impl std::str::FromStr for Method {
    type Err = SwError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss_newton" => Ok(Self::GaussNewton),
            "gradient_flow" => Ok(Self::GradientFlow),
            other => Err(SwError::Parse(format!("unknown method {other:?} (gauss_newton, gradient_flow)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iters: usize,
    pub energy_tol: f64,
    /// Sufficient-decrease constant of the backtracking line search.
    pub armijo: f64,
    pub shrink: f64,
    pub min_step: f64,
    /// First trial step of gradient flow; adapted between iterations.
    pub initial_step: f64,
    pub max_mode: usize,
    pub gauge_fix: bool,
    pub method: Method,
    pub weights: EnergyWeights,
    pub norm_floor: f64,
    /// Relative singular value cutoff of the Gauss–Newton pseudo-inverse.
    /// Directions below it are treated as flat; at the explicit solution
    /// the Jacobian has exact zeros and then a gap up to `≈ 1.5e−2·σ_max`.
    pub rcond: f64,
}

impl SolveOptions {
    pub fn for_grid(n: usize) -> Self {
        Self {
            max_iters: 50,
            energy_tol: 1e-18,
            armijo: 1e-4,
            shrink: 0.5,
            min_step: 1e-10,
            initial_step: 0.05,
            max_mode: n / 4,
            gauge_fix: true,
            method: Method::GaussNewton,
            weights: EnergyWeights::default(),
            norm_floor: 1e-4,
            rcond: 1e-6,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.energy_tol > 0.0) {
            return Err(SwError::InvalidArgument("energy_tol must be positive".into()));
        }
        if self.max_mode > n / 4 {
            return Err(SwError::InvalidArgument(format!("max_mode {} exceeds n/4 = {}", self.max_mode, n / 4)));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) || !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(SwError::InvalidArgument("line search needs 0 < shrink, armijo < 1".into()));
        }
        let w = self.weights;
        if [w.w1, w.w2, w.w3a, w.w3b].iter().any(|&x| !(x > 0.0)) {
            return Err(SwError::InvalidArgument("energy weights must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub energy: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3a: f64,
    pub r3b: f64,
    /// Accepted step length leading to this iterate (0 for the initial one).
    pub step: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_energy: f64,
    pub residuals: Option<ResidualReport>,
    /// `‖d*(a − a_initial)‖_{L²}` of the returned configuration.
    pub slice_defect: f64,
    /// With `gauge_fix`: slice defect of the Coulomb-fixed result.
    pub gauge_fix_residual: Option<f64>,
    /// With `gauge_fix`: largest residual of the Coulomb-fixed result. It
    /// exceeds the residual of the returned configuration by the aliasing
    /// error of `e^{−ζ}Ψ` on the grid.
    pub gauge_fixed_max_residual: Option<f64>,
    pub converged: bool,
    pub trace: Vec<TraceRow>,
}

impl SolveReport {
    pub fn energy_trace(&self) -> Vec<f64> {
        self.trace.iter().map(|r| r.energy).collect()
    }

    pub fn write_trace_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "iter,energy,r1,r2,r3a,r3b,step")?;
        for r in &self.trace {
            writeln!(w, "{},{:e},{:e},{:e},{:e},{:e},{:e}", r.iter, r.energy, r.r1, r.r2, r.r3a, r.r3b, r.step)?;
        }
        Ok(())
    }
}

/// `d*(a − a_ref)` as a real density, `−4 Im ∂_z̄(a − a_ref)`.
pub fn coulomb_defect(c: &Configuration, reference: &Configuration) -> ScalarField {
    partial_zbar(&(c.a() - reference.a())).map(|v| C64::new(-4.0 * v.im, 0.0))
}

/// Gauge transformation bringing `c` into Coulomb gauge relative to
/// `reference`: `d*(a − a_ref) = 0` with zero-mean `ζ`.
pub fn coulomb_gauge_fix(c: &Configuration, reference: &Configuration) -> Result<(Configuration, GaugeElement)> {
    if c.grid() != reference.grid() {
        return Err(SwError::GridMismatch);
    }
    // a + i∂_zθ changes the defect by −Δθ
    let defect = coulomb_defect(c, reference);
    let mut source = defect;
    let mean = source.mean();
    source.values_mut().iter_mut().for_each(|v| *v -= mean);
    let theta = green_invert(&source)?;
    let u = GaugeElement::from_real_angle(&theta);
    Ok((gauge_apply(&u, c), u))
}

/// `g`-gradient of the weighted energy on the full grid.
pub fn gradient_weighted(c: &Configuration, w: &EnergyWeights) -> TangentVector {
    let r = ResidualBundle::evaluate(c);
    let (a, psi1, psi2, phi) = (c.a(), c.psi1(), c.psi2(), c.phi());
    let (r1, r2, r3a, r3b) = (&r.r1.f, &r.r2.f, &r.r3a, &r.r3b);
    let (w1, w2, w3a, w3b) = (w.w1, w.w2, w.w3a, w.w3b);
    // dE(X) = 2 Re ∫ (p Ȳ_p + β₁Ȳ_β₁ + β₂Ȳ_β₂ + g Ȳ_g)
    let y_p = &(&partial_z(r1).scale_re(2.0 * w1) - &(psi2 * &r3a.conj()).scale_re(w3a))
        + &(&psi1.conj() * r3b).scale_re(w3b);
    let y_b1 = &(&(&(r1 * psi1).scale_re(w1) - &(r2 * psi2).scale_re(w2)) - &(phi * r3a).scale_re(0.5 * w3a))
        + &(&(&a.conj() * r3b) - &partial_zbar(r3b)).scale_re(w3b);
    let y_b2 = &(&(&(r1 * psi2).scale_re(-w1) - &(psi1 * &r2.conj()).scale_re(w2))
        - &(&partial_z(r3a) + &(a * r3a)).scale_re(w3a))
        - &(&phi.conj() * r3b).scale_re(0.5 * w3b);
    let y_g = &(&partial_z(r2).scale_re(2.0 * w2) - &(psi1 * &r3a.conj()).scale_re(0.5 * w3a))
        - &(&psi2.conj() * r3b).scale_re(0.5 * w3b);
    TangentVector::from_coefficients(y_p.scale_re(0.5), y_b1, y_b2, y_g.scale_re(0.5))
}

pub fn gradient(c: &Configuration) -> TangentVector {
    gradient_weighted(c, &EnergyWeights::default())
}

fn trace_row(iter: usize, b: &ResidualBundle, w: &EnergyWeights, step: f64) -> TraceRow {
    TraceRow {
        iter,
        energy: b.energy_weighted(w),
        r1: b.r1.f.l2_norm(),
        r2: b.r2.f.l2_norm(),
        r3a: b.r3a.l2_norm(),
        r3b: b.r3b.l2_norm(),
        step,
    }
}

fn spinor_norm(c: &Configuration) -> f64 {
    (c.psi1().l2_norm_sq() + c.psi2().l2_norm_sq()).sqrt()
}

fn finish(mut report: SolveReport, c: &Configuration, initial: &Configuration, opts: &SolveOptions) -> SolveReport {
    let b = ResidualBundle::evaluate(c);
    report.final_energy = b.energy_weighted(&opts.weights);
    report.residuals = Some(b.report());
    report.slice_defect = coulomb_defect(c, initial).l2_norm();
    if opts.gauge_fix {
        if let Ok((fixed, _)) = coulomb_gauge_fix(c, initial) {
            report.gauge_fix_residual = Some(coulomb_defect(&fixed, initial).l2_norm());
            report.gauge_fixed_max_residual = Some(ResidualBundle::evaluate(&fixed).report().max_residual());
        }
    }
    report
}

/// Residual samples scaled so that the squared Euclidean norm equals the
/// weighted energy: `[r₁ | Re, Im r₂ | Re, Im r₃ₐ | Re, Im r₃ᵦ]`.
fn grid_rows(r: &LinearizedResidual, w: &EnergyWeights) -> Vec<f64> {
    let h = r.c3a.grid().cell_area().sqrt();
    let mut out = Vec::with_capacity(7 * r.c3a.grid().len());
    out.extend(r.a.f.values().iter().map(|v| v.re * h * w.w1.sqrt()));
    for (f, wi) in [(&r.b.f, w.w2), (&r.c3a, w.w3a), (&r.c3b, w.w3b)] {
        let s = h * wi.sqrt();
        out.extend(f.values().iter().flat_map(|v| [v.re * s, v.im * s]));
    }
    out
}

/// Jacobian of [`grid_rows`] with respect to band-limited tangent coordinates.
fn grid_jacobian(c: &Configuration, basis: &TangentBasis, w: &EnergyWeights) -> DMatrix<f64> {
    let cols = basis.dim();
    let mut jac = DMatrix::zeros(7 * c.grid().len(), cols);
    let mut e = vec![0.0; cols];
    for j in 0..cols {
        e[j] = 1.0;
        let x = basis.synthesize(&e);
        e[j] = 0.0;
        let col = grid_rows(&linearized_residual_t(c, &x, 1.0), w);
        jac.set_column(j, &DVector::from_vec(col));
    }
    jac
}

/// Minimum-norm least-squares solution of `J δ = −r`, dropping singular
/// values below `rcond·σ_max`. `J = QR` first, then an SVD of the square `R`.
fn pseudo_solve(jac: &DMatrix<f64>, rhs: &DVector<f64>, rcond: f64) -> DVector<f64> {
    let qr = jac.clone().qr();
    let qtr = qr.q().tr_mul(rhs);
    let svd = qr.r().svd(true, true);
    let cut = rcond * svd.singular_values.max();
    let (u, vt) = (svd.u.as_ref().expect("u requested"), svd.v_t.as_ref().expect("v requested"));
    let mut delta = DVector::zeros(jac.ncols());
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        if sv > cut {
            delta -= vt.row(k).transpose() * (u.column(k).dot(&qtr) / sv);
        }
    }
    delta
}

/// Solves the equations from `initial`.
///
/// Returns the final configuration when the energy drops below
/// `opts.energy_tol`; otherwise [`SwError::MaxItersExceeded`] or
/// [`SwError::StalledLineSearch`], both carrying the report.
pub fn solve(initial: &Configuration, opts: &SolveOptions) -> Result<(Configuration, SolveReport)> {
    let n = initial.grid().n();
    opts.validate(n)?;
    if !(spinor_norm(initial) > 1e-8) {
        return Err(SwError::InvalidArgument("initial spinor vanishes; the zero configuration is excluded".into()));
    }
    let w = opts.weights;
    let mut c = initial.clone();
    let mut bundle = ResidualBundle::evaluate(&c);
    let mut report = SolveReport { trace: vec![trace_row(0, &bundle, &w, 0.0)], ..Default::default() };
    let mut step_guess = opts.initial_step;

    loop {
        let e = bundle.energy_weighted(&w);
        if e < opts.energy_tol {
            report.converged = true;
            return Ok((c.clone(), finish(report, &c, initial, opts)));
        }
        if report.iterations >= opts.max_iters {
            return Err(SwError::MaxItersExceeded(Box::new(finish(report, &c, initial, opts))));
        }

        // search direction and the first-order decrease it predicts
        let (direction, predicted, mut step) = match opts.method {
            Method::GaussNewton => {
                let basis = TangentBasis::new(*c.grid(), opts.max_mode)?;
                let jac = grid_jacobian(&c, &basis, &opts.weights);
                let lin = LinearizedResidual {
                    a: bundle.r1.clone(),
                    b: bundle.r2.clone(),
                    c3a: bundle.r3a.clone(),
                    c3b: bundle.r3b.clone(),
                };
                let rhs = DVector::from_vec(grid_rows(&lin, &opts.weights));
                let delta = pseudo_solve(&jac, &rhs, opts.rcond);
                let model = &rhs + &jac * &delta;
                let predicted = rhs.norm_squared() - model.norm_squared();
                (basis.synthesize(delta.as_slice()), predicted, 1.0)
            }
            Method::GradientFlow => {
                let grad = gradient_weighted(&c, &w);
                let gnorm = crate::hk::metric_g(&grad, &grad);
                (grad.scale(-1.0), gnorm, step_guess)
            }
        };

        let mut accepted = None;
        while step >= opts.min_step {
            let trial = c.displaced(&direction, step);
            if spinor_norm(&trial) >= opts.norm_floor {
                let tb = ResidualBundle::evaluate(&trial);
                let te = tb.energy_weighted(&w);
                if te <= e - opts.armijo * step * predicted.max(0.0) && te < e || te < opts.energy_tol {
                    accepted = Some((trial, tb));
                    break;
                }
            }
            step *= opts.shrink;
        }
        let Some((trial, tb)) = accepted else {
            return Err(SwError::StalledLineSearch(Box::new(finish(report, &c, initial, opts))));
        };
        report.iterations += 1;
        report.trace.push(trace_row(report.iterations, &tb, &w, step));
        if opts.method == Method::GradientFlow {
            step_guess = (2.0 * step).min(1.0);
        }
        c = trial;
        bundle = tb;
    }
}
