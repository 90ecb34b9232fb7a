//! Flat-torus geometry with exact Fourier-multiplier calculus.
//!
//! Coordinates are `x₁, x₂ ∈ [0, side)` sampled on an `n × n` grid, with the
//! complex coordinate `z = x₁ + i x₂` and the flat metric `ds² = dz ⊗ dz̄`.
//! Samples are stored row-major, `values[i * n + j]` at `(x₁, x₂) = (i h, j h)`.
//!
//! Conventions used throughout the crate:
//!
//! | object            | convention                                       |
//! |-------------------|--------------------------------------------------|
//! | `∂_z`             | `½(∂₁ − i∂₂)`                                    |
//! | `∂_z̄`             | `½(∂₁ + i∂₂)`                                    |
//! | `dz ∧ dz̄`         | `−2i dx₁ ∧ dx₂`                                  |
//! | `ω`               | `i dz ∧ dz̄ = 2 dx₁ ∧ dx₂`                        |
//! | `Δ`               | `∂₁² + ∂₂² = 4 ∂_z ∂_z̄` (off the Nyquist lines)  |
//! | `*dz`, `*dz̄`      | `−i dz`, `i dz̄`                                  |
//!
//! The surface Laplacian `Δ_h = h⁻² ∂²/∂z∂z̄` with `h = 1` equals `Δ / 4`.
//!
//! First derivatives zero the Nyquist wavenumber so that conjugation
//! symmetry (and therefore `iℝ`-valuedness) survives differentiation.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SwError};

pub type C64 = Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Periodic square grid on the flat torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    n: usize,
    side: f64,
}

impl TorusGrid {
    pub fn new(n: usize, side: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(SwError::InvalidGrid(format!(
                "n = {n} must be a power of two and at least 4"
            )));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(SwError::InvalidGrid(format!("side = {side} must be positive")));
        }
        Ok(Self { n, side })
    }

    /// The `2π × 2π` torus.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn spacing(&self) -> f64 {
        self.side / self.n as f64
    }

    /// Number of grid points, `n²`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `h²` of one cell in `dx₁ dx₂`.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let h = self.spacing();
        ((idx / self.n) as f64 * h, (idx % self.n) as f64 * h)
    }

    /// Signed Fourier mode of an FFT bin, in `[−n/2, n/2)`.
    #[inline]
    pub fn mode(&self, bin: usize) -> i64 {
        let n = self.n as i64;
        let b = bin as i64;
        if b < n / 2 {
            b
        } else {
            b - n
        }
    }

    /// FFT bin holding a signed mode.
    #[inline]
    pub fn bin(&self, mode: i64) -> usize {
        mode.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn wavenumber(&self, mode: i64) -> f64 {
        2.0 * PI * mode as f64 / self.side
    }

    /// Wavenumber used by first derivatives: the Nyquist bin is zeroed.
    #[inline]
    fn derivative_wavenumber(&self, bin: usize) -> f64 {
        if bin == self.n / 2 {
            0.0
        } else {
            self.wavenumber(self.mode(bin))
        }
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// Unnormalised 2D DFT in place.
fn fft2(data: &mut [C64], n: usize, inverse: bool) {
    let fft = plan(n, inverse);
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    let mut column = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            column[i] = data[i * n + j];
        }
        fft.process(&mut column);
        for i in 0..n {
            data[i * n + j] = column[i];
        }
    }
}

/// Complex sample field on the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    values: Vec<C64>,
}

impl ScalarField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self::constant(grid, C64::new(0.0, 0.0))
    }

    pub fn constant(grid: TorusGrid, c: C64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> C64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let (x1, x2) = grid.coords(idx);
                f(x1, x2)
            })
            .collect();
        Self { grid, values }
    }

    pub fn from_values(grid: TorusGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(SwError::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Synthesises a field from Fourier coefficients indexed by FFT bin,
    /// `f(x) = Σ ĉ_{mk} e^{i(κ_m x₁ + κ_k x₂)}`.
    pub fn from_fourier(grid: TorusGrid, coefficients: Vec<C64>) -> Self {
        assert_eq!(coefficients.len(), grid.len());
        let mut values = coefficients;
        fft2(&mut values, grid.n(), true);
        Self { grid, values }
    }

    /// Fourier coefficients indexed by FFT bin (inverse of [`Self::from_fourier`]).
    pub fn fourier_coefficients(&self) -> Vec<C64> {
        let mut data = self.values.clone();
        fft2(&mut data, self.grid.n(), false);
        let norm = 1.0 / self.grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= norm);
        data
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self { grid: self.grid, values }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| v * c)
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    /// Pointwise real part, as a complex field.
    pub fn re(&self) -> Self {
        self.map(|v| C64::new(v.re, 0.0))
    }

    /// Pointwise imaginary part, as a complex field.
    pub fn im(&self) -> Self {
        self.map(|v| C64::new(v.im, 0.0))
    }

    pub fn norm_sqr(&self) -> Self {
        self.map(|v| C64::new(v.norm_sqr(), 0.0))
    }

    pub fn mean(&self) -> C64 {
        self.values.iter().sum::<C64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `∫ |f|² dx₁ dx₂` by the (spectrally exact) trapezoid rule.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `∫ f ḡ dx₁ dx₂`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<C64>()
            * self.grid.cell_area()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    pub fn is_imaginary(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.re.abs() <= tol)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// Applies a Fourier multiplier given as a function of the two FFT bins.
    pub fn apply_multiplier(&self, multiplier: impl Fn(usize, usize) -> C64) -> Self {
        let n = self.grid.n();
        let mut data = self.values.clone();
        fft2(&mut data, n, false);
        let norm = 1.0 / self.grid.len() as f64;
        for bi in 0..n {
            for bj in 0..n {
                data[bi * n + bj] *= multiplier(bi, bj) * norm;
            }
        }
        fft2(&mut data, n, true);
        Self { grid: self.grid, values: data }
    }

    /// Zeroes all Fourier modes with `|m| > max_mode` or `|k| > max_mode`.
    pub fn band_limit(&self, max_mode: usize) -> Self {
        let g = self.grid;
        let limit = max_mode as i64;
        self.apply_multiplier(|bi, bj| {
            if g.mode(bi).abs() <= limit && g.mode(bj).abs() <= limit {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

fn check_same(a: &ScalarField, b: &ScalarField) {
    assert_eq!(a.grid, b.grid, "fields live on different grids");
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        check_same(self, rhs);
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        check_same(self, rhs);
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: &ScalarField) -> ScalarField {
        check_same(self, rhs);
        self.zip_map(rhs, |a, b| a * b)
    }
}

impl Mul<C64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: C64) -> ScalarField {
        self.scale(rhs)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.scale_re(rhs)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.map(|v| -v)
    }
}

/// `p dz + q dz̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneFormField {
    pub p: ScalarField,
    pub q: ScalarField,
}

impl OneFormField {
    pub fn new(p: ScalarField, q: ScalarField) -> Self {
        check_same(&p, &q);
        Self { p, q }
    }

    /// The `iℝ`-valued form `p dz − p̄ dz̄`.
    pub fn imaginary(p: ScalarField) -> Self {
        let q = -&p.conj();
        Self { p, q }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self::new(ScalarField::zeros(grid), ScalarField::zeros(grid))
    }

    pub fn grid(&self) -> &TorusGrid {
        self.p.grid()
    }

    /// `q = −p̄` pointwise.
    pub fn is_imaginary_valued(&self, tol: f64) -> bool {
        self.p
            .values()
            .iter()
            .zip(self.q.values())
            .all(|(p, q)| (q + p.conj()).norm() <= tol)
    }

    pub fn part_10(&self) -> Self {
        Self::new(self.p.clone(), ScalarField::zeros(*self.grid()))
    }

    pub fn part_01(&self) -> Self {
        Self::new(ScalarField::zeros(*self.grid()), self.q.clone())
    }

    /// `self ∧ other`, as the `dz ∧ dz̄` coefficient `p₁q₂ − q₁p₂`.
    pub fn wedge(&self, other: &Self) -> TwoFormField {
        TwoFormField::new(&(&self.p * &other.q) - &(&self.q * &other.p))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.p.scale(c), self.q.scale(c))
    }

    pub fn max_abs(&self) -> f64 {
        self.p.max_abs().max(self.q.max_abs())
    }
}

impl Add for &OneFormField {
    type Output = OneFormField;
    fn add(self, rhs: &OneFormField) -> OneFormField {
        OneFormField::new(&self.p + &rhs.p, &self.q + &rhs.q)
    }
}

impl Sub for &OneFormField {
    type Output = OneFormField;
    fn sub(self, rhs: &OneFormField) -> OneFormField {
        OneFormField::new(&self.p - &rhs.p, &self.q - &rhs.q)
    }
}

/// `f dz ∧ dz̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoFormField {
    pub f: ScalarField,
}

impl TwoFormField {
    pub fn new(f: ScalarField) -> Self {
        Self { f }
    }

    /// `ω = i dz ∧ dz̄`.
    pub fn omega(grid: TorusGrid) -> Self {
        Self::new(ScalarField::constant(grid, I))
    }

    /// `g · ω` for a scalar `g`.
    pub fn times_omega(g: &ScalarField) -> Self {
        Self::new(g.scale(I))
    }

    /// Coefficient `g` with `self = g · ω`.
    pub fn omega_coefficient(&self) -> ScalarField {
        self.f.scale(-I)
    }

    pub fn grid(&self) -> &TorusGrid {
        self.f.grid()
    }

    /// An `iℝ`-valued 2-form has a real `dz ∧ dz̄` coefficient.
    pub fn is_imaginary_valued(&self, tol: f64) -> bool {
        self.f.is_real(tol)
    }

    pub fn max_abs(&self) -> f64 {
        self.f.max_abs()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.f.l2_norm_sq()
    }
}

impl Add for &TwoFormField {
    type Output = TwoFormField;
    fn add(self, rhs: &TwoFormField) -> TwoFormField {
        TwoFormField::new(&self.f + &rhs.f)
    }
}

impl Sub for &TwoFormField {
    type Output = TwoFormField;
    fn sub(self, rhs: &TwoFormField) -> TwoFormField {
        TwoFormField::new(&self.f - &rhs.f)
    }
}

/// Fourier multiplier of `∂_z` at the given bins.
pub(crate) fn dz_symbol(grid: &TorusGrid, bi: usize, bj: usize) -> C64 {
    let k1 = grid.derivative_wavenumber(bi);
    let k2 = grid.derivative_wavenumber(bj);
    C64::new(k2, k1) * 0.5
}

/// Fourier multiplier of `∂_z̄` at the given bins.
pub(crate) fn dzbar_symbol(grid: &TorusGrid, bi: usize, bj: usize) -> C64 {
    let k1 = grid.derivative_wavenumber(bi);
    let k2 = grid.derivative_wavenumber(bj);
    C64::new(-k2, k1) * 0.5
}

pub fn partial_z(f: &ScalarField) -> ScalarField {
    let g = *f.grid();
    f.apply_multiplier(|bi, bj| dz_symbol(&g, bi, bj))
}

pub fn partial_zbar(f: &ScalarField) -> ScalarField {
    let g = *f.grid();
    f.apply_multiplier(|bi, bj| dzbar_symbol(&g, bi, bj))
}

pub fn partial_x1(f: &ScalarField) -> ScalarField {
    let g = *f.grid();
    f.apply_multiplier(|bi, _| C64::new(0.0, g.derivative_wavenumber(bi)))
}

pub fn partial_x2(f: &ScalarField) -> ScalarField {
    let g = *f.grid();
    f.apply_multiplier(|_, bj| C64::new(0.0, g.derivative_wavenumber(bj)))
}

/// `Δ = ∂₁² + ∂₂²`, keeping the Nyquist modes.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let g = *f.grid();
    f.apply_multiplier(|bi, bj| {
        let k1 = g.wavenumber(g.mode(bi));
        let k2 = g.wavenumber(g.mode(bj));
        C64::new(-(k1 * k1 + k2 * k2), 0.0)
    })
}

/// `df = ∂_z f dz + ∂_z̄ f dz̄`.
pub fn differential(f: &ScalarField) -> OneFormField {
    OneFormField::new(partial_z(f), partial_zbar(f))
}

/// `d(p dz + q dz̄) = (∂_z q − ∂_z̄ p) dz ∧ dz̄`.
pub fn exterior_d(a: &OneFormField) -> TwoFormField {
    TwoFormField::new(&partial_z(&a.q) - &partial_zbar(&a.p))
}

/// Hodge star on 1-forms: `*(η dz) = −iη dz`, `*(η dz̄) = iη dz̄`.
pub fn hodge_star_1(a: &OneFormField) -> OneFormField {
    OneFormField::new(a.p.scale(-I), a.q.scale(I))
}

/// `∫_M t` with `dz ∧ dz̄ = −2i dx₁ ∧ dx₂`.
pub fn integrate_2form(t: &TwoFormField) -> C64 {
    let grid = t.grid();
    t.f.values().iter().sum::<C64>() * C64::new(0.0, -2.0) * grid.cell_area()
}

/// Solves `Δw = t` with `mean(w) = 0`.
///
/// Fails with [`SwError::NonZeroMean`] when `|mean(t)| > 1e−10`, which is the
/// solvability obstruction on a closed surface.
pub fn green_invert(t: &ScalarField) -> Result<ScalarField> {
    let mean = t.mean();
    if mean.norm() > 1e-10 {
        return Err(SwError::NonZeroMean { mean: mean.norm() });
    }
    let g = *t.grid();
    Ok(t.apply_multiplier(|bi, bj| {
        let k1 = g.wavenumber(g.mode(bi));
        let k2 = g.wavenumber(g.mode(bj));
        let k2sum = k1 * k1 + k2 * k2;
        if k2sum == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::new(-1.0 / k2sum, 0.0)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> TorusGrid {
        TorusGrid::square(32).unwrap()
    }

    fn wave(g: TorusGrid, sign: f64) -> ScalarField {
        // e^{±i(z + z̄)} = e^{±2i x₁}
        ScalarField::from_fn(g, |x1, _| C64::from_polar(1.0, sign * 2.0 * x1))
    }

    fn random_bandlimited(g: TorusGrid, seed: u64, max_mode: i64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = vec![C64::new(0.0, 0.0); g.len()];
        for m in -max_mode..=max_mode {
            for k in -max_mode..=max_mode {
                coeffs[g.index(g.bin(m), g.bin(k))] =
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        ScalarField::from_fourier(g, coeffs)
    }

    fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        (a - b).max_abs()
    }

    #[test]
    fn grid_validation() {
        assert!(TorusGrid::new(3, 1.0).is_err());
        assert!(TorusGrid::new(12, 1.0).is_err());
        assert!(TorusGrid::new(8, 0.0).is_err());
        assert!(TorusGrid::new(8, 1.0).is_ok());
        let g = TorusGrid::square(8).unwrap();
        assert_eq!(g.mode(4), -4);
        assert_eq!(g.mode(7), -1);
        assert_eq!(g.bin(-1), 7);
    }

    #[test]
    fn fourier_round_trip() {
        let g = grid();
        let f = random_bandlimited(g, 3, 8);
        let back = ScalarField::from_fourier(g, f.fourier_coefficients());
        assert!(max_diff(&f, &back) < 1e-13);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let f = ScalarField::constant(grid(), C64::new(2.5, -1.0));
        assert!(partial_z(&f).max_abs() < 1e-13);
        assert!(partial_zbar(&f).max_abs() < 1e-13);
    }

    #[test]
    fn derivative_of_plane_waves() {
        let g = grid();
        let f = wave(g, 1.0);
        assert!(max_diff(&partial_z(&f), &f.scale(I)) < 1e-12);
        assert!(max_diff(&partial_zbar(&f), &f.scale(I)) < 1e-12);
        let f = wave(g, -1.0);
        assert!(max_diff(&partial_zbar(&f), &f.scale(-I)) < 1e-12);
    }

    #[test]
    fn dzbar_of_x2_mode_matches_multiplier() {
        // ½(∂₁ + i∂₂) e^{ikx₂} = ½ · i · ik e^{ikx₂} = −(k/2) e^{ikx₂}
        let g = grid();
        for k in [1.0, 3.0, -5.0] {
            let f = ScalarField::from_fn(g, |_, x2| C64::from_polar(1.0, k * x2));
            let expected = f.scale_re(-k / 2.0);
            assert!(max_diff(&partial_zbar(&f), &expected) < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn spectral_derivative_matches_fourth_order_differences() {
        // one band-limited field (modes ≤ 4) sampled on refining grids; the
        // stencil error must fall by ~2⁴ per halving of the spacing
        fn fd_error(n: usize) -> f64 {
            let g = TorusGrid::square(n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let modes: Vec<(f64, f64, C64)> = (0..12)
                .map(|_| {
                    (
                        rng.gen_range(-4..=4) as f64,
                        rng.gen_range(-4..=4) as f64,
                        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    )
                })
                .collect();
            let f = ScalarField::from_fn(g, |x1, x2| {
                modes.iter().map(|&(m, k, c)| c * C64::from_polar(1.0, m * x1 + k * x2)).sum()
            });
            let h = g.spacing();
            let at = |i: usize, j: usize| f.values()[g.index(i % n, j % n)];
            let mut fd = ScalarField::zeros(g);
            for i in 0..n {
                for j in 0..n {
                    let d1 = (-at(i + 2, j) + at(i + 1, j) * 8.0 - at(i + n - 1, j) * 8.0
                        + at(i + n - 2, j))
                        / (12.0 * h);
                    let d2 = (-at(i, j + 2) + at(i, j + 1) * 8.0 - at(i, j + n - 1) * 8.0
                        + at(i, j + n - 2))
                        / (12.0 * h);
                    fd.values_mut()[g.index(i, j)] = (d1 - I * d2) * 0.5;
                }
            }
            (&partial_z(&f) - &fd).max_abs()
        }
        let errors: Vec<f64> = [16, 32, 64, 128].iter().map(|&n| fd_error(n)).collect();
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 3.7, "observed order {order} from {errors:?}");
        }
        assert!(errors[3] < 1e-3 * errors[0]);
    }

    #[test]
    fn dolbeault_operators_commute() {
        let f = random_bandlimited(grid(), 5, 15);
        let a = partial_z(&partial_zbar(&f));
        let b = partial_zbar(&partial_z(&f));
        assert!(max_diff(&a, &b) < 1e-12 * a.max_abs().max(1.0));
    }

    #[test]
    fn d_of_gradient_vanishes() {
        let f = random_bandlimited(grid(), 6, 16);
        let df = differential(&f);
        assert!(exterior_d(&df).max_abs() < 1e-13 * partial_z(&f).max_abs().max(1.0) * 100.0);
    }

    #[test]
    fn d_of_constant_form_vanishes() {
        let g = grid();
        let a = OneFormField::new(
            ScalarField::constant(g, C64::new(1.0, 2.0)),
            ScalarField::constant(g, C64::new(-3.0, 0.5)),
        );
        assert!(exterior_d(&a).max_abs() < 1e-13);
    }

    #[test]
    fn d_of_wave_dz() {
        let g = grid();
        let f = wave(g, 1.0);
        let a = OneFormField::new(f.clone(), ScalarField::zeros(g));
        let expected = f.scale(-I);
        assert!(max_diff(&exterior_d(&a).f, &expected) < 1e-12);
    }

    #[test]
    fn hodge_star_values() {
        let g = grid();
        let one = ScalarField::constant(g, C64::new(1.0, 0.0));
        let a = OneFormField::new(one.clone(), ScalarField::zeros(g));
        let s = hodge_star_1(&a);
        assert_eq!(s.p.values()[0], C64::new(0.0, -1.0));

        // dx₁ = (dz + dz̄)/2 and dx₂ = (dz − dz̄)/(2i)
        let half = C64::new(0.5, 0.0);
        let dx1 = OneFormField::new(one.scale(half), one.scale(half));
        let dx2 = OneFormField::new(one.scale(-I * 0.5), one.scale(I * 0.5));
        let s = hodge_star_1(&dx1);
        assert!(max_diff(&s.p, &dx2.p) < 1e-15 && max_diff(&s.q, &dx2.q) < 1e-15);
    }

    #[test]
    fn hodge_star_squares_to_minus_one() {
        let g = grid();
        let a = OneFormField::new(random_bandlimited(g, 1, 4), random_bandlimited(g, 2, 4));
        let ss = hodge_star_1(&hodge_star_1(&a));
        assert_eq!(ss.p, -&a.p);
        assert_eq!(ss.q, -&a.q);
    }

    #[test]
    fn integral_of_omega() {
        for side in [2.0 * PI, 3.0] {
            let g = TorusGrid::new(16, side).unwrap();
            let total = integrate_2form(&TwoFormField::omega(g));
            assert!((total - C64::new(2.0 * side * side, 0.0)).norm() < 1e-12 * side * side);
        }
    }

    #[test]
    fn integral_of_oscillation_vanishes() {
        let g = grid();
        let t = TwoFormField::new(wave(g, 1.0));
        assert!(integrate_2form(&t).norm() < 1e-13);
    }

    #[test]
    fn stokes_on_closed_torus() {
        let g = grid();
        for seed in 0..5 {
            let a = OneFormField::new(random_bandlimited(g, seed, 10), random_bandlimited(g, seed + 50, 10));
            let scale = a.max_abs();
            assert!(integrate_2form(&exterior_d(&a)).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn green_operator_examples() {
        let g = grid();
        let t = wave(g, 1.0);
        let w = green_invert(&t).unwrap();
        assert!(max_diff(&w, &t.scale_re(-0.25)) < 1e-14);
        assert!(green_invert(&ScalarField::zeros(g)).unwrap().max_abs() == 0.0);
        let err = green_invert(&ScalarField::constant(g, C64::new(1.0, 0.0)));
        assert!(matches!(err, Err(SwError::NonZeroMean { .. })));
    }

    #[test]
    fn green_operator_inverts_laplacian() {
        let g = grid();
        for seed in 0..5 {
            let mut t = random_bandlimited(g, seed, 16);
            let mean = t.mean();
            t = t.map(|v| v - mean);
            let w = green_invert(&t).unwrap();
            assert!(w.mean().norm() < 1e-14);
            assert!(max_diff(&laplacian(&w), &t) < 1e-10 * t.max_abs());
        }
    }

    #[test]
    fn laplacian_is_four_dz_dzbar_away_from_nyquist() {
        let f = random_bandlimited(grid(), 9, 8);
        let a = laplacian(&f);
        let b = partial_z(&partial_zbar(&f)).scale_re(4.0);
        assert!(max_diff(&a, &b) < 1e-11 * a.max_abs());
    }

    #[test]
    fn derivatives_preserve_imaginary_valued_forms() {
        // Nyquist content must not leak a real part into d of an iℝ function
        let g = TorusGrid::square(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let theta: Vec<C64> = (0..g.len()).map(|_| C64::new(0.0, rng.gen_range(-1.0..1.0))).collect();
        let zeta = ScalarField::from_values(g, theta).unwrap();
        assert!(differential(&zeta).is_imaginary_valued(1e-13));
    }
}
