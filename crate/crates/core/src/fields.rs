//! Configuration space: connection, spinor pair, Higgs field, the gauge action
//! and tangent vectors.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SwError};
use crate::surface::{differential, partial_z, OneFormField, ScalarField, TorusGrid, C64, I};

/// Unitary connection `A − Ā = a dz − ā dz̄`, stored by its dz-coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    pub a: ScalarField,
}

impl Connection {
    pub fn form(&self) -> OneFormField {
        OneFormField::imaginary(self.a.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spinor {
    pub psi1: ScalarField,
    pub psi2: ScalarField,
}

impl Spinor {
    /// `‖Ψ‖²_{L²} = ∫ |ψ₁|² + |ψ₂|² dx₁dx₂`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.psi1.l2_norm_sq() + self.psi2.l2_norm_sq()
    }
}

/// `Φ = φ dz − φ̄ dz̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct Higgs {
    pub phi: ScalarField,
}

impl Higgs {
    pub fn form(&self) -> OneFormField {
        OneFormField::imaginary(self.phi.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub conn: Connection,
    pub spinor: Spinor,
    pub higgs: Higgs,
}

impl Configuration {
    pub fn new(a: ScalarField, psi1: ScalarField, psi2: ScalarField, phi: ScalarField) -> Result<Self> {
        let g = *a.grid();
        if *psi1.grid() != g || *psi2.grid() != g || *phi.grid() != g {
            return Err(SwError::GridMismatch);
        }
        Ok(Self {
            conn: Connection { a },
            spinor: Spinor { psi1, psi2 },
            higgs: Higgs { phi },
        })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        let z = ScalarField::zeros(grid);
        Self::new(z.clone(), z.clone(), z.clone(), z).expect("same grid")
    }

    pub fn grid(&self) -> &TorusGrid {
        self.conn.a.grid()
    }

    pub fn a(&self) -> &ScalarField {
        &self.conn.a
    }

    pub fn psi1(&self) -> &ScalarField {
        &self.spinor.psi1
    }

    pub fn psi2(&self) -> &ScalarField {
        &self.spinor.psi2
    }

    pub fn phi(&self) -> &ScalarField {
        &self.higgs.phi
    }

    /// Moves along a tangent vector: `c + s·X` in the affine space 𝒞.
    pub fn displaced(&self, x: &TangentVector, s: f64) -> Self {
        Self {
            conn: Connection { a: &self.conn.a + &x.alpha.p.scale_re(s) },
            spinor: Spinor {
                psi1: &self.spinor.psi1 + &x.beta1.scale_re(s),
                psi2: &self.spinor.psi2 + &x.beta2.scale_re(s),
            },
            higgs: Higgs { phi: &self.higgs.phi + &x.gamma.p.scale_re(s) },
        }
    }

    /// `self − other` as a tangent vector.
    pub fn difference(&self, other: &Self) -> TangentVector {
        TangentVector::from_coefficients(
            &self.conn.a - &other.conn.a,
            &self.spinor.psi1 - &other.spinor.psi1,
            &self.spinor.psi2 - &other.spinor.psi2,
            &self.higgs.phi - &other.higgs.phi,
        )
    }

    /// Largest pointwise deviation between corresponding fields.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.difference(other).max_abs()
    }

    /// Type-invariant audit: one grid, finite samples.
    pub fn is_valid(&self) -> bool {
        let g = *self.grid();
        [self.psi1(), self.psi2(), self.phi()].iter().all(|f| *f.grid() == g)
            && [self.a(), self.psi1(), self.psi2(), self.phi()]
                .iter()
                .all(|f| f.values().iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }
}

/// Gauge transformation `u = e^ζ` with `ζ: M → iℝ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeElement {
    zeta: ScalarField,
}

impl GaugeElement {
    pub fn new(zeta: ScalarField) -> Result<Self> {
        if !zeta.is_imaginary(1e-13) {
            return Err(SwError::InvalidArgument("gauge parameter must be imaginary".into()));
        }
        Ok(Self { zeta })
    }

    /// `ζ = iθ` from a real-valued field given as a complex one.
    pub fn from_real_angle(theta: &ScalarField) -> Self {
        Self { zeta: theta.map(|v| C64::new(0.0, v.re)) }
    }

    pub fn identity(grid: TorusGrid) -> Self {
        Self { zeta: ScalarField::zeros(grid) }
    }

    pub fn constant(grid: TorusGrid, angle: f64) -> Self {
        Self { zeta: ScalarField::constant(grid, C64::new(0.0, angle)) }
    }

    pub fn zeta(&self) -> &ScalarField {
        &self.zeta
    }

    pub fn u(&self) -> ScalarField {
        self.zeta.map(|z| z.exp())
    }

    pub fn u_inverse(&self) -> ScalarField {
        self.zeta.map(|z| (-z).exp())
    }

    /// Group product `u₁u₂`, i.e. `ζ₁ + ζ₂`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { zeta: &self.zeta + &other.zeta }
    }

    pub fn inverse(&self) -> Self {
        Self { zeta: -&self.zeta }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { zeta: self.zeta.scale_re(s) }
    }
}

/// `(α, β₁, β₂, γ)` at a configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub alpha: OneFormField,
    pub beta1: ScalarField,
    pub beta2: ScalarField,
    pub gamma: OneFormField,
}

impl TangentVector {
    /// Builds `(p dz − p̄ dz̄, β₁, β₂, g dz − ḡ dz̄)`.
    pub fn from_coefficients(p: ScalarField, beta1: ScalarField, beta2: ScalarField, g: ScalarField) -> Self {
        Self {
            alpha: OneFormField::imaginary(p),
            beta1,
            beta2,
            gamma: OneFormField::imaginary(g),
        }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        let z = ScalarField::zeros(grid);
        Self::from_coefficients(z.clone(), z.clone(), z.clone(), z)
    }

    pub fn grid(&self) -> &TorusGrid {
        self.beta1.grid()
    }

    /// dz-coefficient of α.
    pub fn p(&self) -> &ScalarField {
        &self.alpha.p
    }

    /// dz-coefficient of γ.
    pub fn g(&self) -> &ScalarField {
        &self.gamma.p
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_coefficients(
            self.alpha.p.scale_re(s),
            self.beta1.scale_re(s),
            self.beta2.scale_re(s),
            self.gamma.p.scale_re(s),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_coefficients(
            &self.alpha.p + &other.alpha.p,
            &self.beta1 + &other.beta1,
            &self.beta2 + &other.beta2,
            &self.gamma.p + &other.gamma.p,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.alpha
            .max_abs()
            .max(self.beta1.max_abs())
            .max(self.beta2.max_abs())
            .max(self.gamma.max_abs())
    }

    /// α and γ are iℝ-valued to `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.alpha.is_imaginary_valued(tol) && self.gamma.is_imaginary_valued(tol)
    }

    /// `u* X = (α, u⁻¹β, γ)`.
    pub fn gauge_transformed(&self, u: &GaugeElement) -> Self {
        let inv = u.u_inverse();
        Self {
            alpha: self.alpha.clone(),
            beta1: &self.beta1 * &inv,
            beta2: &self.beta2 * &inv,
            gamma: self.gamma.clone(),
        }
    }
}

/// `(A, Ψ, Φ) ↦ (A + u⁻¹du, u⁻¹Ψ, Φ)` with `u = e^ζ`.
pub fn gauge_apply(u: &GaugeElement, c: &Configuration) -> Configuration {
    let inv = u.u_inverse();
    Configuration {
        conn: Connection { a: &c.conn.a + &partial_z(u.zeta()) },
        spinor: Spinor { psi1: &c.spinor.psi1 * &inv, psi2: &c.spinor.psi2 * &inv },
        higgs: c.higgs.clone(),
    }
}

/// Infinitesimal gauge action `X_ζ = (dζ, −ζΨ, 0)`.
pub fn gauge_vector_field(zeta: &ScalarField, c: &Configuration) -> TangentVector {
    TangentVector {
        alpha: differential(zeta),
        beta1: -&(zeta * c.psi1()),
        beta2: -&(zeta * c.psi2()),
        gamma: OneFormField::zeros(*c.grid()),
    }
}

/// `2·c₂·side/2π` must be an integer for `e^{2ic₂x₁}` to be periodic.
pub fn check_periodic(grid: &TorusGrid, c2: f64) -> Result<()> {
    let winding = 2.0 * c2 * grid.side() / (2.0 * PI);
    if !(c2.is_finite() && c2 > 0.0) || (winding - winding.round()).abs() > 1e-9 {
        return Err(SwError::NonPeriodicParameter { c2, side: grid.side() });
    }
    Ok(())
}

/// The torus family `ψ₁ = c₁`, `ψ₂ = c₁e^{ic₂(z+z̄)}`, `φ = −ic₂e^{−ic₂(z+z̄)}`,
/// `a = −ic₂/2` with `c₁ = √2 c₂ e^{i·phase}`.
pub fn explicit_torus_solution(grid: TorusGrid, c2: f64, phase: f64) -> Result<Configuration> {
    check_periodic(&grid, c2)?;
    let c1 = C64::from_polar(2f64.sqrt() * c2, phase);
    Configuration::new(
        ScalarField::constant(grid, C64::new(0.0, -c2 / 2.0)),
        ScalarField::constant(grid, c1),
        ScalarField::from_fn(grid, |x1, _| c1 * C64::from_polar(1.0, 2.0 * c2 * x1)),
        ScalarField::from_fn(grid, |x1, _| -I * c2 * C64::from_polar(1.0, -2.0 * c2 * x1)),
    )
}

/// Explicit solution translated by `shift` in `x₁`: the family member with
/// `ψ₂ = c₁e^{2ic₂(x₁+shift)}` and `φ = −ic₂e^{−2ic₂(x₁+shift)}`.
pub fn explicit_family_member(grid: TorusGrid, c2: f64, phase: f64, shift: f64) -> Result<Configuration> {
    check_periodic(&grid, c2)?;
    let c1 = C64::from_polar(2f64.sqrt() * c2, phase);
    Configuration::new(
        ScalarField::constant(grid, C64::new(0.0, -c2 / 2.0)),
        ScalarField::constant(grid, c1),
        ScalarField::from_fn(grid, |x1, _| c1 * C64::from_polar(1.0, 2.0 * c2 * (x1 + shift))),
        ScalarField::from_fn(grid, |x1, _| -I * c2 * C64::from_polar(1.0, -2.0 * c2 * (x1 + shift))),
    )
}

/// Closest member of the translated explicit family, fitted from the means
/// of `ψ₁` and `ψ₂ψ̄₁e^{−2ic₂x₁}`. Returns `(phase, shift, max pointwise distance)`.
/// Meaningful for configurations already in Coulomb gauge.
pub fn fit_explicit_family(c: &Configuration, c2: f64) -> Result<(f64, f64, f64)> {
    let grid = *c.grid();
    let phase = c.psi1().mean().arg();
    let rel = ScalarField::from_fn(grid, |x1, _| C64::from_polar(1.0, -2.0 * c2 * x1));
    let rel = c.psi2().zip_map(c.psi1(), |p2, p1| p2 * p1.conj()).zip_map(&rel, |u, v| u * v);
    let shift = rel.mean().arg() / (2.0 * c2);
    let member = explicit_family_member(grid, c2, phase, shift)?;
    Ok((phase, shift, c.max_abs_diff(&member)))
}

/// Field with independent uniform coefficients on modes `|m|, |k| ≤ max_mode`.
pub fn random_bandlimited_field(grid: TorusGrid, rng: &mut impl Rng, max_mode: usize, amplitude: f64) -> ScalarField {
    let mut coeffs = vec![C64::new(0.0, 0.0); grid.len()];
    let m = max_mode as i64;
    for j in -m..=m {
        for k in -m..=m {
            coeffs[grid.index(grid.bin(j), grid.bin(k))] =
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amplitude;
        }
    }
    ScalarField::from_fourier(grid, coeffs)
}

/// Real-valued band-limited field (stored as complex with zero imaginary part).
pub fn random_bandlimited_real(grid: TorusGrid, rng: &mut impl Rng, max_mode: usize, amplitude: f64) -> ScalarField {
    random_bandlimited_field(grid, rng, max_mode, amplitude).re()
}

/// Band-limited iℝ-valued field.
pub fn random_bandlimited_imaginary(grid: TorusGrid, rng: &mut impl Rng, max_mode: usize, amplitude: f64) -> ScalarField {
    random_bandlimited_real(grid, rng, max_mode, amplitude).scale(I)
}

fn check_max_mode(grid: &TorusGrid, max_mode: usize) -> Result<()> {
    if max_mode > grid.n() / 4 {
        return Err(SwError::InvalidArgument(format!(
            "max_mode {max_mode} exceeds n/4 = {}",
            grid.n() / 4
        )));
    }
    Ok(())
}

/// Deterministic random configuration with all four fields band-limited.
pub fn random_bandlimited_configuration(
    grid: TorusGrid,
    seed: u64,
    max_mode: usize,
    amplitude: f64,
) -> Result<Configuration> {
    check_max_mode(&grid, max_mode)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_bandlimited_field(grid, &mut rng, max_mode, amplitude);
    let psi1 = random_bandlimited_field(grid, &mut rng, max_mode, amplitude);
    let psi2 = random_bandlimited_field(grid, &mut rng, max_mode, amplitude);
    let phi = random_bandlimited_field(grid, &mut rng, max_mode, amplitude);
    Configuration::new(a, psi1, psi2, phi)
}

/// Deterministic random tangent vector, band-limited.
pub fn random_bandlimited_tangent(
    grid: TorusGrid,
    seed: u64,
    max_mode: usize,
    amplitude: f64,
) -> Result<TangentVector> {
    let c = random_bandlimited_configuration(grid, seed, max_mode, amplitude)?;
    Ok(TangentVector::from_coefficients(c.conn.a, c.spinor.psi1, c.spinor.psi2, c.higgs.phi))
}

/// `c` displaced by band-limited noise whose largest pointwise coefficient is `amplitude`.
pub fn perturbed_configuration(c: &Configuration, seed: u64, max_mode: usize, amplitude: f64) -> Result<Configuration> {
    let x = random_bandlimited_tangent(*c.grid(), seed, max_mode, 1.0)?;
    Ok(c.displaced(&x, amplitude / x.max_abs()))
}

/// Deterministic random gauge element, band-limited.
pub fn random_gauge(grid: TorusGrid, seed: u64, max_mode: usize, amplitude: f64) -> GaugeElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GaugeElement::from_real_angle(&random_bandlimited_real(grid, &mut rng, max_mode, amplitude))
}
