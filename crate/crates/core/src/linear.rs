//! Linearised equations, the deformation complex and its numerical
//! kernel / cokernel counts.
//!
//! For `X = (α, β, γ)` with `α = p dz − p̄ dz̄`, `γ = g dz − ḡ dz̄` the
//! linearisation of the residuals at `c = (a, Ψ, φ)`, deformed by the
//! homotopy parameter `t`, is
//!
//! ```text
//! A = −2 Re ∂_z̄p + t (Re ψ₁β̄₁ − Re ψ₂β̄₂)
//! B = −2 ∂_z̄g − t (β₁ψ̄₂ + ψ₁β̄₂)
//! C = ( ∂_z̄β₂ − āβ₂ − ½tφ̄β₁ − t(p̄ψ₂ + ½ḡψ₁),
//!       ∂_zβ₁ + aβ₁ − ½tφβ₂ + t(pψ₁ − ½gψ₂) )
//! ```
//!
//! which is the true derivative at `t = 1` and splits into the complexes
//! `α ↦ dα`, `γ ↦ ∂̄γ`, `β ↦ D_A β` at `t = 0`. Gauge directions are
//! `d₁ᵗ(iθ) = (d(iθ), −t·iθΨ, 0)` with `g`-adjoint density
//! `d₁ᵗ*(X) = −4 Im ∂_z̄p + 2t Im(ψ₁β̄₁ + ψ₂β̄₂)`.
//!
//! The operator is assembled by Galerkin projection on the Fourier modes
//! `|m|, |k| ≤ max_mode` of every field. Tangent coordinates are orthonormal
//! for the metric `g = ∫ 4 Re pq̄ + 2 Re β·η̄ + 4 Re gh̄ dx₁dx₂`; codomain
//! coordinates are orthonormal in `L²(dx₁dx₂)`.

use nalgebra::{DMatrix, DVector, SVD};
use serde::{Deserialize, Serialize};

use crate::equations::energy;
use crate::error::{Result, SwError};
use crate::fields::{Configuration, TangentVector};
use crate::surface::{differential, partial_z, partial_zbar, ScalarField, TorusGrid, TwoFormField, C64, I};

/// Linearised residuals `(A, B, C)`, stored like the nonlinear residuals.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizedResidual {
    pub a: TwoFormField,
    pub b: TwoFormField,
    pub c3a: ScalarField,
    pub c3b: ScalarField,
}

impl LinearizedResidual {
    pub fn max_abs(&self) -> f64 {
        self.a.max_abs().max(self.b.max_abs()).max(self.c3a.max_abs()).max(self.c3b.max_abs())
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.a.l2_norm_sq() + self.b.l2_norm_sq() + self.c3a.l2_norm_sq() + self.c3b.l2_norm_sq()
    }
}

/// `d₂ᵗ X` at `base`.
pub fn linearized_residual_t(base: &Configuration, x: &TangentVector, t: f64) -> LinearizedResidual {
    let (a, psi1, psi2, phi) = (base.a(), base.psi1(), base.psi2(), base.phi());
    let (p, b1, b2, g) = (x.p(), &x.beta1, &x.beta2, x.g());
    let n = base.grid().len();

    let dbar_p = partial_zbar(p);
    let mut ra = dbar_p.map(|v| C64::new(-2.0 * v.re, 0.0));
    let mut rb = partial_zbar(g).scale_re(-2.0);
    let mut r3a = partial_zbar(b2);
    let mut r3b = partial_z(b1);
    {
        let (ra, rb) = (ra.values_mut(), rb.values_mut());
        for k in 0..n {
            let (s1, s2) = (psi1.values()[k], psi2.values()[k]);
            let (e1, e2) = (b1.values()[k], b2.values()[k]);
            ra[k] += t * ((s1 * e1.conj()).re - (s2 * e2.conj()).re);
            rb[k] -= t * (e1 * s2.conj() + s1 * e2.conj());
        }
    }
    {
        let (r3a, r3b) = (r3a.values_mut(), r3b.values_mut());
        for k in 0..n {
            let (av, fv) = (a.values()[k], phi.values()[k]);
            let (s1, s2) = (psi1.values()[k], psi2.values()[k]);
            let (e1, e2) = (b1.values()[k], b2.values()[k]);
            let (pv, gv) = (p.values()[k], g.values()[k]);
            r3a[k] += -av.conj() * e2 - 0.5 * t * fv.conj() * e1 - t * (pv.conj() * s2 + 0.5 * gv.conj() * s1);
            r3b[k] += av * e1 - 0.5 * t * fv * e2 + t * (pv * s1 - 0.5 * gv * s2);
        }
    }
    LinearizedResidual { a: TwoFormField::new(ra), b: TwoFormField::new(rb), c3a: r3a, c3b: r3b }
}

/// `d₂ X`, the derivative of the residuals at `base` along `X`.
pub fn linearized_residual(base: &Configuration, x: &TangentVector) -> LinearizedResidual {
    linearized_residual_t(base, x, 1.0)
}

/// `d₁ᵗ f = (df, −t f Ψ, 0)` for an iℝ-valued `f`.
pub fn d1(f: &ScalarField, base: &Configuration, t: f64) -> TangentVector {
    TangentVector {
        alpha: differential(f),
        beta1: (f * base.psi1()).scale_re(-t),
        beta2: (f * base.psi2()).scale_re(-t),
        gamma: crate::surface::OneFormField::zeros(*base.grid()),
    }
}

/// Real density `θ ↦ g(d₁ᵗ(iθ), X)`, i.e. the `g`-adjoint of `d₁ᵗ` with
/// respect to `θ ∈ L²(dx₁dx₂)`.
pub fn d1_adjoint(base: &Configuration, x: &TangentVector, t: f64) -> ScalarField {
    let dbar_p = partial_zbar(x.p());
    let mut out = dbar_p.map(|v| C64::new(-4.0 * v.im, 0.0));
    let (psi1, psi2) = (base.psi1().values(), base.psi2().values());
    let (b1, b2) = (x.beta1.values(), x.beta2.values());
    for (k, v) in out.values_mut().iter_mut().enumerate() {
        v.re += 2.0 * t * (psi1[k] * b1[k].conj() + psi2[k] * b2[k].conj()).im;
    }
    out
}

/// Fourier modes `|m|, |k| ≤ max_mode` and the coordinate maps built on them.
#[derive(Clone, Debug)]
pub struct ModeSet {
    grid: TorusGrid,
    max_mode: usize,
    modes: Vec<(i64, i64)>,
    half: Vec<(i64, i64)>,
}

impl ModeSet {
    pub fn new(grid: TorusGrid, max_mode: usize) -> Result<Self> {
        if max_mode > grid.n() / 4 {
            return Err(SwError::InvalidArgument(format!(
                "max_mode {max_mode} exceeds n/4 = {}",
                grid.n() / 4
            )));
        }
        let m = max_mode as i64;
        let modes: Vec<(i64, i64)> = (-m..=m).flat_map(|j| (-m..=m).map(move |k| (j, k))).collect();
        let half = modes.iter().copied().filter(|&(j, k)| j > 0 || (j == 0 && k > 0)).collect();
        Ok(Self { grid, max_mode, modes, half })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    /// Number of modes `N = (2·max_mode + 1)²`.
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    fn bin(&self, (j, k): (i64, i64)) -> usize {
        self.grid.index(self.grid.bin(j), self.grid.bin(k))
    }

    /// Complex field from `2N` coordinates, `ĉ = scale·(x + iy)`.
    fn synthesize_complex(&self, coords: &[f64], scale: f64) -> ScalarField {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.grid.len()];
        for (i, &mode) in self.modes.iter().enumerate() {
            coeffs[self.bin(mode)] = C64::new(coords[2 * i], coords[2 * i + 1]) * scale;
        }
        ScalarField::from_fourier(self.grid, coeffs)
    }

    fn project_complex(&self, f: &ScalarField, scale: f64, out: &mut [f64]) {
        let coeffs = f.fourier_coefficients();
        for (i, &mode) in self.modes.iter().enumerate() {
            let c = coeffs[self.bin(mode)] * scale;
            out[2 * i] = c.re;
            out[2 * i + 1] = c.im;
        }
    }

    /// Real field from `N` L²-orthonormal coordinates.
    pub fn synthesize_real(&self, coords: &[f64]) -> ScalarField {
        let side = self.grid.side();
        let mut coeffs = vec![C64::new(0.0, 0.0); self.grid.len()];
        coeffs[self.bin((0, 0))] = C64::new(coords[0] / side, 0.0);
        let s = 1.0 / (2f64.sqrt() * side);
        for (i, &(j, k)) in self.half.iter().enumerate() {
            let c = C64::new(coords[1 + 2 * i], coords[2 + 2 * i]) * s;
            coeffs[self.bin((j, k))] = c;
            coeffs[self.bin((-j, -k))] = c.conj();
        }
        ScalarField::from_fourier(self.grid, coeffs).re()
    }

    /// L²-orthonormal coordinates of the real part of `f`.
    pub fn project_real(&self, f: &ScalarField, out: &mut [f64]) {
        let side = self.grid.side();
        let coeffs = f.re().fourier_coefficients();
        out[0] = coeffs[self.bin((0, 0))].re * side;
        let s = 2f64.sqrt() * side;
        for (i, &mode) in self.half.iter().enumerate() {
            let c = coeffs[self.bin(mode)] * s;
            out[1 + 2 * i] = c.re;
            out[2 + 2 * i] = c.im;
        }
    }
}

/// `g`-orthonormal real coordinates on band-limited tangent vectors,
/// ordered `[p | β₁ | β₂ | g]`, `2N` each.
#[derive(Clone, Debug)]
pub struct TangentBasis {
    pub modes: ModeSet,
}

impl TangentBasis {
    pub fn new(grid: TorusGrid, max_mode: usize) -> Result<Self> {
        Ok(Self { modes: ModeSet::new(grid, max_mode)? })
    }

    pub fn dim(&self) -> usize {
        8 * self.modes.len()
    }

    fn scales(&self) -> (f64, f64) {
        let side = self.modes.grid().side();
        (1.0 / (2.0 * side), 1.0 / (2f64.sqrt() * side))
    }

    pub fn synthesize(&self, coords: &[f64]) -> TangentVector {
        assert_eq!(coords.len(), self.dim());
        let b = 2 * self.modes.len();
        let (sp, sb) = self.scales();
        TangentVector::from_coefficients(
            self.modes.synthesize_complex(&coords[..b], sp),
            self.modes.synthesize_complex(&coords[b..2 * b], sb),
            self.modes.synthesize_complex(&coords[2 * b..3 * b], sb),
            self.modes.synthesize_complex(&coords[3 * b..], sp),
        )
    }

    /// Coordinates of the band-limited part of `x`.
    pub fn project(&self, x: &TangentVector) -> Vec<f64> {
        let b = 2 * self.modes.len();
        let (sp, sb) = self.scales();
        let mut out = vec![0.0; self.dim()];
        self.modes.project_complex(x.p(), 1.0 / sp, &mut out[..b]);
        self.modes.project_complex(&x.beta1, 1.0 / sb, &mut out[b..2 * b]);
        self.modes.project_complex(&x.beta2, 1.0 / sb, &mut out[2 * b..3 * b]);
        self.modes.project_complex(x.g(), 1.0 / sp, &mut out[3 * b..]);
        out
    }

    /// Column ranges of the `α`, `β`, `γ` blocks.
    pub fn alpha_range(&self) -> std::ops::Range<usize> {
        0..2 * self.modes.len()
    }

    pub fn beta_range(&self) -> std::ops::Range<usize> {
        2 * self.modes.len()..6 * self.modes.len()
    }

    pub fn gamma_range(&self) -> std::ops::Range<usize> {
        6 * self.modes.len()..8 * self.modes.len()
    }
}

/// Row layout of the assembled operator: `[A (N) | B (2N) | C (4N) | d₁* (N)]`.
#[derive(Clone, Debug)]
pub struct CodomainLayout {
    n: usize,
    with_gauge_fix: bool,
}

impl CodomainLayout {
    pub fn rows(&self) -> usize {
        if self.with_gauge_fix {
            8 * self.n
        } else {
            7 * self.n
        }
    }

    pub fn a_range(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn b_range(&self) -> std::ops::Range<usize> {
        self.n..3 * self.n
    }

    pub fn c_range(&self) -> std::ops::Range<usize> {
        3 * self.n..7 * self.n
    }

    pub fn gauge_range(&self) -> std::ops::Range<usize> {
        if self.with_gauge_fix {
            7 * self.n..8 * self.n
        } else {
            7 * self.n..7 * self.n
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssembleOptions {
    pub max_mode: usize,
    pub with_gauge_fix: bool,
    pub t: f64,
    /// Refuse bases whose energy exceeds `energy_tol`.
    pub require_solution: bool,
    pub energy_tol: f64,
}

impl AssembleOptions {
    pub fn for_grid(grid: &TorusGrid) -> Self {
        Self { max_mode: grid.n() / 4, with_gauge_fix: true, t: 1.0, require_solution: true, energy_tol: 1e-18 }
    }
}

/// Dense real matrix of `[d₂ᵗ; d₁ᵗ*]` on band-limited coordinates.
#[derive(Clone, Debug)]
pub struct DeformationOperator {
    pub base: Configuration,
    pub basis: TangentBasis,
    pub layout: CodomainLayout,
    pub matrix: DMatrix<f64>,
    pub options: AssembleOptions,
}

fn project_codomain(modes: &ModeSet, r: &LinearizedResidual, gauge: Option<&ScalarField>, out: &mut [f64]) {
    let n = modes.len();
    let side = modes.grid().side();
    modes.project_real(&r.a.f, &mut out[..n]);
    modes.project_complex(&r.b.f, side, &mut out[n..3 * n]);
    modes.project_complex(&r.c3a, side, &mut out[3 * n..5 * n]);
    modes.project_complex(&r.c3b, side, &mut out[5 * n..7 * n]);
    if let Some(gf) = gauge {
        modes.project_real(gf, &mut out[7 * n..8 * n]);
    }
}

/// Assembles the deformation operator at `base`.
pub fn assemble(base: &Configuration, opts: AssembleOptions) -> Result<DeformationOperator> {
    if opts.require_solution {
        let e = energy(base);
        if !(e < opts.energy_tol) {
            return Err(SwError::NotASolution { energy: e });
        }
    }
    if !(0.0..=1.0).contains(&opts.t) {
        return Err(SwError::InvalidArgument(format!("t = {} outside [0, 1]", opts.t)));
    }
    let basis = TangentBasis::new(*base.grid(), opts.max_mode)?;
    let layout = CodomainLayout { n: basis.modes.len(), with_gauge_fix: opts.with_gauge_fix };
    let cols = basis.dim();
    let rows = layout.rows();
    let mut matrix = DMatrix::zeros(rows, cols);
    let mut e = vec![0.0; cols];
    let mut column = vec![0.0; rows];
    for j in 0..cols {
        e[j] = 1.0;
        let x = basis.synthesize(&e);
        e[j] = 0.0;
        let r = linearized_residual_t(base, &x, opts.t);
        let gauge = opts.with_gauge_fix.then(|| d1_adjoint(base, &x, opts.t));
        project_codomain(&basis.modes, &r, gauge.as_ref(), &mut column);
        matrix.set_column(j, &DVector::from_column_slice(&column));
    }
    Ok(DeformationOperator { base: base.clone(), basis, layout, matrix, options: opts })
}

impl DeformationOperator {
    /// Coordinates of `d₁ᵗ(iθ)` for each real θ-basis function, as columns.
    pub fn gauge_columns(&self) -> DMatrix<f64> {
        d1_matrix(&self.base, &self.basis, self.options.t)
    }

    /// Largest entry of the blocks that couple different complexes at `t = 0`.
    pub fn block_coupling(&self) -> f64 {
        let (ar, br, gr) = (self.basis.alpha_range(), self.basis.beta_range(), self.basis.gamma_range());
        let (ra, rb, rc, rg) =
            (self.layout.a_range(), self.layout.b_range(), self.layout.c_range(), self.layout.gauge_range());
        let own = |row: usize, col: usize| -> bool {
            if ar.contains(&col) {
                ra.contains(&row) || rg.contains(&row)
            } else if br.contains(&col) {
                rc.contains(&row)
            } else {
                gr.contains(&col) && rb.contains(&row)
            }
        };
        let mut worst = 0f64;
        for col in 0..self.matrix.ncols() {
            for row in 0..self.matrix.nrows() {
                if !own(row, col) {
                    worst = worst.max(self.matrix[(row, col)].abs());
                }
            }
        }
        worst
    }

    /// Sub-operator on the given row and column ranges.
    pub fn block(&self, rows: &[std::ops::Range<usize>], cols: &[std::ops::Range<usize>]) -> DMatrix<f64> {
        let ri: Vec<usize> = rows.iter().flat_map(|r| r.clone()).collect();
        let ci: Vec<usize> = cols.iter().flat_map(|r| r.clone()).collect();
        DMatrix::from_fn(ri.len(), ci.len(), |i, j| self.matrix[(ri[i], ci[j])])
    }
}

/// Matrix of `θ ↦ d₁ᵗ(iθ)` from real θ-coordinates to tangent coordinates.
pub fn d1_matrix(base: &Configuration, basis: &TangentBasis, t: f64) -> DMatrix<f64> {
    let n = basis.modes.len();
    let mut m = DMatrix::zeros(basis.dim(), n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let theta = basis.modes.synthesize_real(&e);
        e[j] = 0.0;
        let x = d1(&theta.scale(I), base, t);
        m.set_column(j, &DVector::from_vec(basis.project(&x)));
    }
    m
}

pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-8;
pub const DEFAULT_GAP_THRESHOLD: f64 = 1e3;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DimensionReport {
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    pub index: i64,
    pub gap_ratio: f64,
    pub trustworthy: bool,
    pub n: usize,
    pub max_mode: usize,
    pub t: f64,
    pub rows: usize,
    pub cols: usize,
    /// Up to 16 smallest singular values, ascending.
    pub smallest_singular_values: Vec<f64>,
    pub largest_singular_value: f64,
    #[serde(skip)]
    pub singular_values: Vec<f64>,
}

/// SVD-based counts without enforcing the gap threshold.
pub fn dimension_report(
    matrix: &DMatrix<f64>,
    grid: &TorusGrid,
    max_mode: usize,
    t: f64,
    rank_threshold: f64,
    gap_threshold: f64,
) -> DimensionReport {
    let (rows, cols) = matrix.shape();
    let mut sv: Vec<f64> = matrix.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| a.total_cmp(b));
    let smax = sv.last().copied().unwrap_or(0.0);
    let cutoff = rank_threshold * smax;
    let rank = sv.iter().filter(|&&s| s >= cutoff).count();
    let largest_discarded = sv.iter().copied().filter(|&s| s < cutoff).fold(0.0, f64::max);
    let smallest_kept = sv.iter().copied().find(|&s| s >= cutoff).unwrap_or(0.0);
    let gap_ratio = smallest_kept / largest_discarded.max(smax * 1e-16).max(f64::MIN_POSITIVE);
    let kernel_dim = cols - rank;
    let cokernel_dim = rows - rank;
    DimensionReport {
        kernel_dim,
        cokernel_dim,
        index: kernel_dim as i64 - cokernel_dim as i64,
        gap_ratio,
        trustworthy: gap_ratio > gap_threshold,
        n: grid.n(),
        max_mode,
        t,
        rows,
        cols,
        smallest_singular_values: sv.iter().copied().take(16).collect(),
        largest_singular_value: smax,
        singular_values: sv,
    }
}

fn require_gap(report: DimensionReport, gap_threshold: f64) -> Result<DimensionReport> {
    if report.trustworthy {
        Ok(report)
    } else {
        Err(SwError::UntrustworthyGap { gap: report.gap_ratio, threshold: gap_threshold })
    }
}

/// Kernel, cokernel and index of an assembled operator; fails when the
/// singular-value gap is below `gap_threshold`.
pub fn kernel_index(op: &DeformationOperator, rank_threshold: f64, gap_threshold: f64) -> Result<DimensionReport> {
    let report = dimension_report(
        &op.matrix,
        op.base.grid(),
        op.options.max_mode,
        op.options.t,
        rank_threshold,
        gap_threshold,
    );
    require_gap(report, gap_threshold)
}

/// Orthonormal (in `g`) basis of the numerical kernel, as tangent vectors.
pub fn kernel_vectors(op: &DeformationOperator, rank_threshold: f64) -> Vec<TangentVector> {
    let svd = SVD::new(op.matrix.clone(), false, true);
    let v_t = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max();
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < rank_threshold * smax {
            let row: Vec<f64> = v_t.row(i).iter().copied().collect();
            out.push(op.basis.synthesize(&row));
        }
    }
    // wide matrices have extra null directions beyond min(rows, cols)
    let cols = op.matrix.ncols();
    let rows = op.matrix.nrows();
    if cols > rows {
        let full = SVD::new(op.matrix.transpose() * &op.matrix, false, true);
        let vt = full.v_t.expect("requested V");
        let mut pairs: Vec<(f64, usize)> = full.singular_values.iter().copied().zip(0..).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.clear();
        let cutoff = (rank_threshold * smax).powi(2);
        for (s, i) in pairs {
            if s < cutoff {
                let row: Vec<f64> = vt.row(i).iter().copied().collect();
                out.push(op.basis.synthesize(&row));
            }
        }
    }
    out
}

/// Complex (a) alone: `α ↦ (dα, d*α)` on band-limited iℝ 1-forms.
pub fn complex_a_report(op: &DeformationOperator) -> DimensionReport {
    let m = op.block(&[op.layout.a_range(), op.layout.gauge_range()], &[op.basis.alpha_range()]);
    dimension_report(
        &m,
        op.base.grid(),
        op.options.max_mode,
        op.options.t,
        DEFAULT_RANK_THRESHOLD,
        DEFAULT_GAP_THRESHOLD,
    )
}

/// Tangent space of `Σ_Ψ`: closed-and-coclosed iℝ 1-forms plus `∂̄`-closed
/// (1,0)-forms, counted in real dimensions.
pub fn sigma_tangent_dim(base: &Configuration, max_mode: usize) -> Result<DimensionReport> {
    let opts = AssembleOptions { max_mode, with_gauge_fix: true, t: 0.0, require_solution: false, energy_tol: 0.0 };
    let op = assemble(base, opts)?;
    let m = op.block(
        &[op.layout.a_range(), op.layout.gauge_range(), op.layout.b_range()],
        &[op.basis.alpha_range(), op.basis.gamma_range()],
    );
    let report = dimension_report(&m, base.grid(), max_mode, 0.0, DEFAULT_RANK_THRESHOLD, DEFAULT_GAP_THRESHOLD);
    require_gap(report, DEFAULT_GAP_THRESHOLD)
}

/// Smallest singular value of `d₁ᵗ` on band-limited θ; zero means `H⁰ ≠ 0`.
pub fn gauge_injectivity(base: &Configuration, max_mode: usize, t: f64) -> Result<f64> {
    let basis = TangentBasis::new(*base.grid(), max_mode)?;
    let m = d1_matrix(base, &basis, t);
    Ok(m.singular_values().min())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DimensionCase {
    /// Moduli space `𝒩` of the full system.
    N,
    /// Moduli space `Σ_Ψ` at fixed spinor class.
    Sigma,
    /// Vortex moduli with `ψ₁ = 0`.
    VortexPsi1Zero,
    /// Vortex moduli with `ψ₂ = 0`.
    VortexPsi2Zero,
}

impl std::str::FromStr for DimensionCase {
    type Err = SwError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "n" => Ok(Self::N),
            "sigma" => Ok(Self::Sigma),
            "vortex_psi1_zero" => Ok(Self::VortexPsi1Zero),
            "vortex_psi2_zero" => Ok(Self::VortexPsi2Zero),
            other => Err(SwError::InvalidArgument(format!("unknown dimension case {other:?}"))),
        }
    }
}

/// Closed-form dimension counts in terms of genus and degree.
pub fn dimension_formulas(g: i64, c1: i64, case: DimensionCase) -> Result<i64> {
    if g < 1 {
        return Err(SwError::InvalidArgument(format!("genus {g} must be at least 1")));
    }
    Ok(match case {
        DimensionCase::N => 2 * g + 2,
        DimensionCase::Sigma => 4 * g,
        DimensionCase::VortexPsi1Zero => c1 + g + 1,
        DimensionCase::VortexPsi2Zero => -c1 + g + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::ResidualBundle;
    use crate::fields::{explicit_torus_solution, random_bandlimited_configuration, random_bandlimited_tangent};

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::square(n).unwrap()
    }

    fn metric(x: &TangentVector, y: &TangentVector) -> f64 {
        4.0 * x.p().inner(y.p()).re
            + 2.0 * (x.beta1.inner(&y.beta1).re + x.beta2.inner(&y.beta2).re)
            + 4.0 * x.g().inner(y.g()).re
    }

    fn residual_diff(a: &ResidualBundle, b: &ResidualBundle, s: f64) -> LinearizedResidual {
        LinearizedResidual {
            a: TwoFormField::new((&a.r1.f - &b.r1.f).scale_re(s)),
            b: TwoFormField::new((&a.r2.f - &b.r2.f).scale_re(s)),
            c3a: (&a.r3a - &b.r3a).scale_re(s),
            c3b: (&a.r3b - &b.r3b).scale_re(s),
        }
    }

    fn sub(x: &LinearizedResidual, y: &LinearizedResidual) -> f64 {
        (&x.a.f - &y.a.f)
            .max_abs()
            .max((&x.b.f - &y.b.f).max_abs())
            .max((&x.c3a - &y.c3a).max_abs())
            .max((&x.c3b - &y.c3b).max_abs())
    }

    #[test]
    fn linearization_matches_central_differences() {
        let g = grid(16);
        let c = random_bandlimited_configuration(g, 1, 3, 1.0).unwrap();
        let x = random_bandlimited_tangent(g, 2, 3, 1.0).unwrap();
        let exact = linearized_residual(&c, &x);
        let err = |h: f64| {
            let plus = ResidualBundle::evaluate(&c.displaced(&x, h));
            let minus = ResidualBundle::evaluate(&c.displaced(&x, -h));
            sub(&residual_diff(&plus, &minus, 0.5 / h), &exact)
        };
        // residuals are quadratic, so central differences are exact up to rounding
        let (e3, e4) = (err(1e-3), err(1e-4));
        let scale = exact.max_abs();
        assert!(e3 < 1e-8 * scale && e4 < 1e-7 * scale, "{e3} {e4}");
    }

    #[test]
    fn linearization_of_zero_is_zero() {
        let g = grid(8);
        let c = random_bandlimited_configuration(g, 1, 2, 1.0).unwrap();
        assert_eq!(linearized_residual(&c, &TangentVector::zeros(g)).max_abs(), 0.0);
    }

    #[test]
    fn gauge_directions_are_in_kernel_at_solution() {
        let g = grid(16);
        let c = explicit_torus_solution(g, 1.0, 0.0).unwrap();
        for seed in 0..3 {
            let theta = crate::fields::random_gauge(g, seed, 4, 1.0);
            let x = d1(theta.zeta(), &c, 1.0);
            assert!(linearized_residual(&c, &x).max_abs() < 1e-11);
            // t = 0 also closes the complex
            let x0 = d1(theta.zeta(), &c, 0.0);
            assert!(linearized_residual_t(&c, &x0, 0.0).max_abs() < 1e-11);
        }
    }

    #[test]
    fn intermediate_homotopy_does_not_close_the_complex() {
        // at a solution d₂ᵗd₁ᵗ(ζ) = (0, 0, −½t(1 − t)ζφ̄ψ₁, −½t(1 − t)ζφψ₂)
        let g = grid(16);
        let c = explicit_torus_solution(g, 1.0, 0.0).unwrap();
        let zeta = crate::fields::random_gauge(g, 4, 3, 1.0).zeta().clone();
        for t in [0.25, 0.5, 0.75] {
            let r = linearized_residual_t(&c, &d1(&zeta, &c, t), t);
            let k = -0.5 * t * (1.0 - t);
            let expected_a = (&(&zeta * &c.phi().conj()) * c.psi1()).scale_re(k);
            let expected_b = (&(&zeta * c.phi()) * c.psi2()).scale_re(k);
            assert!((&r.c3a - &expected_a).max_abs() < 1e-11, "t = {t}");
            assert!((&r.c3b - &expected_b).max_abs() < 1e-11, "t = {t}");
            assert!(r.a.max_abs() < 1e-11 && r.b.max_abs() < 1e-11);
            assert!(r.c3a.max_abs() > 1e-3);
        }
    }

    #[test]
    fn d1_special_cases() {
        let g = grid(8);
        let c = random_bandlimited_configuration(g, 5, 2, 1.0).unwrap();
        let zero = d1(&ScalarField::zeros(g), &c, 1.0);
        assert_eq!(zero.max_abs(), 0.0);
        let f = crate::fields::random_gauge(g, 3, 2, 1.0).zeta().clone();
        let x = d1(&f, &c, 0.0);
        assert_eq!(x.beta1.max_abs(), 0.0);
        let k = ScalarField::constant(g, C64::new(0.0, 0.3));
        let x = d1(&k, &c, 1.0);
        assert!(x.alpha.max_abs() < 1e-15);
        assert!((&x.beta2 + &(&k * c.psi2())).max_abs() < 1e-15);
    }

    #[test]
    fn d1_adjoint_is_metric_adjoint() {
        let g = grid(16);
        let c = random_bandlimited_configuration(g, 6, 3, 1.0).unwrap();
        let x = random_bandlimited_tangent(g, 7, 3, 1.0).unwrap();
        let theta = crate::fields::random_gauge(g, 8, 3, 1.0).zeta().scale(-I);
        for t in [0.0, 0.4, 1.0] {
            let lhs = metric(&d1(&theta.scale(I), &c, t), &x);
            let rhs = d1_adjoint(&c, &x, t).inner(&theta).re;
            assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn tangent_basis_is_metric_orthonormal() {
        let basis = TangentBasis::new(grid(8), 2).unwrap();
        let dim = basis.dim();
        let cols: Vec<TangentVector> = [0, 1, 7, 51, 53, 120, 199]
            .iter()
            .map(|&j| {
                let mut e = vec![0.0; dim];
                e[j] = 1.0;
                basis.synthesize(&e)
            })
            .collect();
        for (i, x) in cols.iter().enumerate() {
            for (j, y) in cols.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((metric(x, y) - expected).abs() < 1e-13);
            }
        }
        let coords: Vec<f64> = (0..dim).map(|k| (k as f64 * 0.37).sin()).collect();
        let back = basis.project(&basis.synthesize(&coords));
        assert!(coords.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn real_channel_round_trip() {
        let modes = ModeSet::new(grid(16), 3).unwrap();
        let coords: Vec<f64> = (0..modes.len()).map(|k| (k as f64 * 1.3).cos()).collect();
        let f = modes.synthesize_real(&coords);
        assert!(f.is_real(1e-15));
        let norm: f64 = coords.iter().map(|c| c * c).sum();
        assert!((f.l2_norm_sq() - norm).abs() < 1e-12 * norm);
        let mut back = vec![0.0; modes.len()];
        modes.project_real(&f, &mut back);
        assert!(coords.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn assembled_matrix_annihilates_band_limited_gauge_directions() {
        let g = grid(16);
        let c = explicit_torus_solution(g, 1.0, 0.0).unwrap();
        let opts = AssembleOptions { with_gauge_fix: false, ..AssembleOptions::for_grid(&g) };
        let op = assemble(&c, opts).unwrap();
        // θ with modes ≤ max_mode − 2 keeps θΨ inside the band
        let theta = crate::fields::random_gauge(g, 9, 2, 1.0);
        let x = d1(theta.zeta(), &c, 1.0);
        let coords = DVector::from_vec(op.basis.project(&x));
        let image = &op.matrix * coords;
        assert!(image.amax() < 1e-11, "{}", image.amax());
    }

    #[test]
    fn assembly_requires_a_solution() {
        let g = grid(8);
        let c = random_bandlimited_configuration(g, 1, 2, 1.0).unwrap();
        assert!(matches!(assemble(&c, AssembleOptions::for_grid(&g)), Err(SwError::NotASolution { .. })));
    }

    #[test]
    fn homotopy_start_is_block_diagonal() {
        let g = grid(8);
        let c = explicit_torus_solution(g, 1.0, 0.0).unwrap();
        let op = assemble(&c, AssembleOptions { t: 0.0, ..AssembleOptions::for_grid(&g) }).unwrap();
        assert!(op.block_coupling() < 1e-13);
        let op1 = assemble(&c, AssembleOptions::for_grid(&g)).unwrap();
        assert!(op1.block_coupling() > 1e-3);
    }

    #[test]
    fn complex_a_has_two_dimensional_cohomology() {
        let g = grid(8);
        let c = explicit_torus_solution(g, 1.0, 0.0).unwrap();
        let op = assemble(&c, AssembleOptions { t: 0.0, ..AssembleOptions::for_grid(&g) }).unwrap();
        let r = complex_a_report(&op);
        assert_eq!(r.kernel_dim, 2);
        assert!(r.trustworthy);
    }

    #[test]
    fn sigma_tangent_space_is_four_dimensional() {
        let g = grid(8);
        let c = explicit_torus_solution(g, 1.0, 0.0).unwrap();
        let r = sigma_tangent_dim(&c, 2).unwrap();
        assert_eq!(r.kernel_dim, 4);
    }

    #[test]
    fn gauge_action_is_free_only_away_from_homotopy_start() {
        let g = grid(8);
        let c = explicit_torus_solution(g, 1.0, 0.0).unwrap();
        assert!(gauge_injectivity(&c, 2, 1.0).unwrap() > 1e-3);
        assert!(gauge_injectivity(&c, 2, 0.0).unwrap() < 1e-12);
    }

    #[test]
    fn formulas() {
        assert_eq!(dimension_formulas(1, 0, DimensionCase::N).unwrap(), 4);
        assert_eq!(dimension_formulas(1, 0, DimensionCase::VortexPsi1Zero).unwrap(), 2);
        assert_eq!(dimension_formulas(2, 0, DimensionCase::Sigma).unwrap(), 8);
        assert_eq!(dimension_formulas(2, 1, DimensionCase::VortexPsi2Zero).unwrap(), 2);
        assert!(dimension_formulas(0, 0, DimensionCase::N).is_err());
        assert_eq!("sigma".parse::<DimensionCase>().unwrap(), DimensionCase::Sigma);
    }
}
