//! Metric, symplectic forms, almost complex structures and moment maps on
//! the tangent space of the configuration space.
//!
//! For `X = (α₁, β, γ₁)`, `Y = (α₂, η, γ₂)`:
//!
//! ```text
//! g(X, Y)  = ∫ *α₁∧α₂ + ∫ Re⟨β, η⟩ ω + ∫ *γ₁∧γ₂
//! Ω(X, Y)  = −∫ α₁∧α₂ + ∫ Re⟨Iβ, η⟩ ω − ∫ γ₁∧γ₂
//! ω₁(X, Y) = −∫ α₁∧α₂ + ∫ Re⟨Iβ, η⟩ ω + ∫ γ₁∧γ₂
//! ω₂(X, Y) = −∫ γ₁∧α₂ − ∫ α₁∧γ₂ + ∫ Re(β²η̄¹ − β¹η̄²) ω
//! ω₃(X, Y) = −∫ *γ₁∧α₂ + ∫ Re⟨Kβ, η⟩ ω + ∫ *α₁∧γ₂
//! 𝒬(X, Y)  = −2∫ α₁^{0,1}∧γ₂^{1,0} + 2∫ α₂^{0,1}∧γ₁^{1,0} − ∫ (β¹η̄² − β̄²η¹) ω
//! ```
//!
//! with `⟨β, η⟩ = β¹η̄¹ + β²η̄²`, `I = diag(i, −i)`, `J = [[0, 1], [−1, 0]]`,
//! `K = [[0, i], [i, 0]]`. The structures are
//!
//! ```text
//! ℐ  = (*, I, −*)       paired with ω₁
//! ℐ_Ω = (*, I, *)       paired with Ω
//! 𝒥  = (α, β, γ) ↦ (*γ, Jβ, *α)
//! 𝒦  = (α, β, γ) ↦ (−γ, Kβ, α)
//! ```
//!
//! All pairings are evaluated as spectral quadratures of wedge products and
//! do not depend on the base configuration.

use serde::Serialize;

use crate::equations::{residual_curvature, residual_higgs};
use crate::fields::{
    gauge_vector_field, random_bandlimited_configuration, random_bandlimited_tangent, random_gauge, Configuration,
    TangentVector,
};
use crate::linear::{linearized_residual, ModeSet};
use crate::surface::{hodge_star_1, integrate_2form, OneFormField, ScalarField, TorusGrid, TwoFormField, C64, I};

fn wedge_integral(a: &OneFormField, b: &OneFormField) -> C64 {
    integrate_2form(&a.wedge(b))
}

fn omega_integral(f: &ScalarField) -> C64 {
    integrate_2form(&TwoFormField::times_omega(f))
}

fn spinor_pairing(b1: &ScalarField, b2: &ScalarField, e1: &ScalarField, e2: &ScalarField) -> ScalarField {
    &(b1 * &e1.conj()) + &(b2 * &e2.conj())
}

/// Spinor matrices acting on `(β¹, β²)`.
fn spinor_i(b1: &ScalarField, b2: &ScalarField) -> (ScalarField, ScalarField) {
    (b1.scale(I), b2.scale(-I))
}

fn spinor_j(b1: &ScalarField, b2: &ScalarField) -> (ScalarField, ScalarField) {
    (b2.clone(), -b1)
}

fn spinor_k(b1: &ScalarField, b2: &ScalarField) -> (ScalarField, ScalarField) {
    (b2.scale(I), b1.scale(I))
}

pub fn metric_g(x: &TangentVector, y: &TangentVector) -> f64 {
    let spin = spinor_pairing(&x.beta1, &x.beta2, &y.beta1, &y.beta2).re();
    (wedge_integral(&hodge_star_1(&x.alpha), &y.alpha)
        + omega_integral(&spin)
        + wedge_integral(&hodge_star_1(&x.gamma), &y.gamma))
    .re
}

/// `‖X‖ = √g(X, X)`.
pub fn metric_norm(x: &TangentVector) -> f64 {
    metric_g(x, x).max(0.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Pairings {
    pub omega: f64,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub q: [f64; 2],
}

impl Pairings {
    pub fn q(&self) -> C64 {
        C64::new(self.q[0], self.q[1])
    }
}

pub fn omega_forms(x: &TangentVector, y: &TangentVector) -> Pairings {
    let aa = wedge_integral(&x.alpha, &y.alpha).re;
    let gg = wedge_integral(&x.gamma, &y.gamma).re;
    let (ib1, ib2) = spinor_i(&x.beta1, &x.beta2);
    let i_spin = omega_integral(&spinor_pairing(&ib1, &ib2, &y.beta1, &y.beta2).re()).re;

    let j_spin = omega_integral(&(&(&x.beta2 * &y.beta1.conj()) - &(&x.beta1 * &y.beta2.conj())).re()).re;
    let w2 = -wedge_integral(&x.gamma, &y.alpha).re - wedge_integral(&x.alpha, &y.gamma).re + j_spin;

    let (kb1, kb2) = spinor_k(&x.beta1, &x.beta2);
    let k_spin = omega_integral(&spinor_pairing(&kb1, &kb2, &y.beta1, &y.beta2).re()).re;
    let w3 = -wedge_integral(&hodge_star_1(&x.gamma), &y.alpha).re
        + k_spin
        + wedge_integral(&hodge_star_1(&x.alpha), &y.gamma).re;

    let q = wedge_integral(&x.alpha.part_01(), &y.gamma.part_10()) * -2.0
        + wedge_integral(&y.alpha.part_01(), &x.gamma.part_10()) * 2.0
        - omega_integral(&(&(&x.beta1 * &y.beta2.conj()) - &(&x.beta2.conj() * &y.beta1)));

    Pairings { omega: -aa + i_spin - gg, w1: -aa + i_spin + gg, w2, w3, q: [q.re, q.im] }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Structure {
    /// `(*, I, −*)`, compatible with `ω₁`.
    I,
    J,
    K,
    /// `(*, I, *)`, compatible with `Ω`.
    IOmega,
}

pub fn apply_structure(s: Structure, x: &TangentVector) -> TangentVector {
    match s {
        Structure::I | Structure::IOmega => {
            let (b1, b2) = spinor_i(&x.beta1, &x.beta2);
            let star_gamma = hodge_star_1(&x.gamma);
            let gamma = if s == Structure::I { star_gamma.scale(C64::new(-1.0, 0.0)) } else { star_gamma };
            TangentVector { alpha: hodge_star_1(&x.alpha), beta1: b1, beta2: b2, gamma }
        }
        Structure::J => {
            let (b1, b2) = spinor_j(&x.beta1, &x.beta2);
            TangentVector { alpha: hodge_star_1(&x.gamma), beta1: b1, beta2: b2, gamma: hodge_star_1(&x.alpha) }
        }
        Structure::K => {
            let (b1, b2) = spinor_k(&x.beta1, &x.beta2);
            TangentVector {
                alpha: x.gamma.scale(C64::new(-1.0, 0.0)),
                beta1: b1,
                beta2: b2,
                gamma: x.alpha.clone(),
            }
        }
    }
}

/// `μ = F(A) − (i/2)(|ψ₁|² − |ψ₂|²)ω`; vanishes exactly on the curvature equation.
pub fn moment_mu(c: &Configuration) -> TwoFormField {
    residual_curvature(c)
}

/// `μ_𝒬 = 2∂̄Φ′ + ψ₁ψ̄₂ω` with `Φ′ = −iΦ`, which equals `−i` times the Higgs residual.
pub fn moment_mu_q(c: &Configuration) -> TwoFormField {
    TwoFormField::new(residual_higgs(c).f.scale(-I))
}

/// `H_ζ = ∫ ζ μ`.
pub fn hamiltonian(c: &Configuration, zeta: &ScalarField) -> C64 {
    integrate_2form(&TwoFormField::new(zeta * &moment_mu(c).f))
}

/// `H^𝒬_ζ = ∫ ζ μ_𝒬`.
pub fn hamiltonian_q(c: &Configuration, zeta: &ScalarField) -> C64 {
    integrate_2form(&TwoFormField::new(zeta * &moment_mu_q(c).f))
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeComparison {
    /// Symplectic side `Ω(X_ζ, X)` or `𝒬(X_ζ, X)`, as `[re, im]`.
    pub exact: [f64; 2],
    pub steps: Vec<f64>,
    /// `|fd(h) − exact| / max(|exact|, ‖X_ζ‖‖X‖)` for each step.
    pub relative_mismatch: Vec<f64>,
    /// `log₁₀` ratio of successive mismatches over `log₁₀` step ratio.
    pub order: Option<f64>,
    pub at_rounding_level: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HamiltonianReport {
    pub omega: DerivativeComparison,
    pub q: DerivativeComparison,
}

/// Below this relative mismatch a central difference of a quadratic
/// functional is exact up to rounding and no convergence order is defined.
pub const ROUNDING_LEVEL: f64 = 1e-10;
pub const MIN_ORDER: f64 = 1.9;

fn compare(exact: C64, scale: f64, steps: &[f64], fd: impl Fn(f64) -> C64) -> DerivativeComparison {
    let mismatch: Vec<f64> = steps
        .iter()
        .map(|&h| {
            let v = fd(h);
            let scale = exact.norm().max(scale).max(f64::MIN_POSITIVE);
            if exact == v {
                0.0
            } else {
                (v - exact).norm() / scale
            }
        })
        .collect();
    let order = (steps.len() >= 2 && mismatch[0] > 0.0 && mismatch[1] > 0.0)
        .then(|| (mismatch[0] / mismatch[1]).log10() / (steps[0] / steps[1]).log10());
    let at_rounding_level = mismatch.iter().all(|&m| m <= ROUNDING_LEVEL);
    let passed = at_rounding_level || order.is_some_and(|o| o >= MIN_ORDER);
    DerivativeComparison { exact: [exact.re, exact.im], steps: steps.to_vec(), relative_mismatch: mismatch, order, at_rounding_level, passed }
}

/// Central differences of `H_ζ` and `H^𝒬_ζ` along `X` against `Ω(X_ζ, X)` and
/// `𝒬(X_ζ, X′)`, where `X′` carries the renamed Higgs direction `−iγ`.
pub fn hamiltonian_check(c: &Configuration, zeta: &ScalarField, x: &TangentVector, steps: &[f64]) -> HamiltonianReport {
    let xz = gauge_vector_field(zeta, c);
    let omega_exact = C64::new(omega_forms(&xz, x).omega, 0.0);
    let scale = metric_norm(&xz) * metric_norm(x);
    let omega = compare(omega_exact, scale, steps, |h| {
        (hamiltonian(&c.displaced(x, h), zeta) - hamiltonian(&c.displaced(x, -h), zeta)) / (2.0 * h)
    });
    let renamed = TangentVector { gamma: x.gamma.scale(-I), ..x.clone() };
    let q = compare(omega_forms(&xz, &renamed).q(), scale, steps, |h| {
        (hamiltonian_q(&c.displaced(x, h), zeta) - hamiltonian_q(&c.displaced(x, -h), zeta)) / (2.0 * h)
    });
    HamiltonianReport { omega, q }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub x_norm: f64,
    /// `max_ζ |g(X, X_ζ)|` over an L²-orthonormal band-limited ζ basis, over `‖X‖`.
    pub gauge_overlap: f64,
    pub orthogonal: bool,
    /// `‖d₂(ℐX)‖ / ‖X‖` for `ℐ = (*, I, −*)`.
    pub residual_i: f64,
    /// `‖d₂(ℐ_Ω X)‖ / ‖X‖` for `ℐ_Ω = (*, I, *)`.
    pub residual_i_omega: f64,
    pub i_preserves_kernel: bool,
    pub i_omega_preserves_kernel: bool,
    /// Whether "orthogonal ⟺ ℐX in kernel" holds for each structure.
    pub lemma_holds_i: bool,
    pub lemma_holds_i_omega: bool,
}

pub const ORTHOGONAL_TOL: f64 = 1e-9;
pub const KERNEL_TOL: f64 = 1e-8;

pub fn orthogonality_lemma_check(c: &Configuration, x: &TangentVector, max_mode: usize) -> OrthogonalityReport {
    let norm = metric_norm(x);
    let modes = ModeSet::new(*c.grid(), max_mode.min(c.grid().n() / 4)).expect("max_mode clamped");
    let mut e = vec![0.0; modes.len()];
    let mut overlap = 0f64;
    for j in 0..modes.len() {
        e[j] = 1.0;
        let zeta = modes.synthesize_real(&e).scale(I);
        e[j] = 0.0;
        overlap = overlap.max(metric_g(x, &gauge_vector_field(&zeta, c)).abs());
    }
    let denom = norm.max(f64::MIN_POSITIVE);
    let residual = |s| linearized_residual(c, &apply_structure(s, x)).l2_norm_sq().sqrt() / denom;
    let (ri, rio) = if norm == 0.0 { (0.0, 0.0) } else { (residual(Structure::I), residual(Structure::IOmega)) };
    let gauge_overlap = if norm == 0.0 { 0.0 } else { overlap / norm };
    let orthogonal = gauge_overlap < ORTHOGONAL_TOL;
    let (ki, kio) = (ri < KERNEL_TOL, rio < KERNEL_TOL);
    OrthogonalityReport {
        x_norm: norm,
        gauge_overlap,
        orthogonal,
        residual_i: ri,
        residual_i_omega: rio,
        i_preserves_kernel: ki,
        i_omega_preserves_kernel: kio,
        lemma_holds_i: orthogonal == ki,
        lemma_holds_i_omega: orthogonal == kio,
    }
}

/// Deliberate sign errors used to check that the suite can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Fault {
    #[default]
    None,
    /// Flips the sign of `ω₃`.
    FlipOmega3,
    /// Uses `J = [[0, −1], [1, 0]]` inside `𝒥`.
    FlipSpinorJ,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityError {
    pub identity: String,
    pub max_error: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HkSuiteReport {
    pub samples: usize,
    pub seed: u64,
    pub n: usize,
    pub max_mode: usize,
    pub identities: Vec<IdentityError>,
    pub passed: bool,
}

impl HkSuiteReport {
    pub fn failing(&self) -> Vec<&str> {
        self.identities.iter().filter(|i| !i.passed).map(|i| i.identity.as_str()).collect()
    }
}

pub const SUITE_THRESHOLD: f64 = 1e-11;

#[derive(Default)]
struct Tracker {
    rows: Vec<(String, f64)>,
}

impl Tracker {
    fn record(&mut self, name: &str, err: f64) {
        match self.rows.iter_mut().find(|(n, _)| n == name) {
            Some((_, e)) => *e = e.max(err),
            None => self.rows.push((name.to_string(), err)),
        }
    }
}

fn tangent_distance(a: &TangentVector, b: &TangentVector) -> f64 {
    metric_norm(&a.sub(b))
}

fn faulty_structure(s: Structure, x: &TangentVector, fault: Fault) -> TangentVector {
    let y = apply_structure(s, x);
    if s == Structure::J && fault == Fault::FlipSpinorJ {
        TangentVector { beta1: -&y.beta1, beta2: -&y.beta2, ..y }
    } else {
        y
    }
}

fn faulty_forms(x: &TangentVector, y: &TangentVector, fault: Fault) -> Pairings {
    let mut p = omega_forms(x, y);
    if fault == Fault::FlipOmega3 {
        p.w3 = -p.w3;
    }
    p
}

/// Runs the identity suite on `samples` random `(base, X, Y, u, ζ)` draws.
/// Errors are relative to `‖X‖·‖Y‖` for pairings and `‖X‖` for vectors;
/// the Hamiltonian rows use the central-difference mismatch and
/// [`ROUNDING_LEVEL`].
pub fn hk_suite(grid: TorusGrid, samples: usize, seed: u64, max_mode: usize, fault: Fault) -> crate::Result<HkSuiteReport> {
    if samples == 0 {
        return Err(crate::SwError::InvalidArgument("samples must be positive".into()));
    }
    let mut t = Tracker::default();
    let mut hamiltonian_rows = Tracker::default();
    for s in 0..samples as u64 {
        let k = seed.wrapping_mul(1_000_003).wrapping_add(4 * s);
        let base = random_bandlimited_configuration(grid, k, max_mode, 1.0)?;
        let x = random_bandlimited_tangent(grid, k + 1, max_mode, 1.0)?;
        let y = random_bandlimited_tangent(grid, k + 2, max_mode, 1.0)?;
        let u = random_gauge(grid, k + 3, max_mode, 1.0);
        let (nx, ny) = (metric_norm(&x), metric_norm(&y));
        let nxy = nx * ny;

        let st = |s, v: &TangentVector| faulty_structure(s, v, fault);
        use Structure::*;
        t.record("IJ = K", tangent_distance(&st(I, &st(J, &x)), &st(K, &x)) / nx);
        t.record("JK = I", tangent_distance(&st(J, &st(K, &x)), &st(I, &x)) / nx);
        t.record("KI = J", tangent_distance(&st(K, &st(I, &x)), &st(J, &x)) / nx);
        for (name, s) in [("I^2 = -Id", I), ("J^2 = -Id", J), ("K^2 = -Id", K), ("I_Omega^2 = -Id", IOmega)] {
            t.record(name, tangent_distance(&st(s, &st(s, &x)), &x.scale(-1.0)) / nx);
        }

        let p = faulty_forms(&x, &y, fault);
        let pt = faulty_forms(&y, &x, fault);
        t.record("w1 = g(I X, Y)", (p.w1 - metric_g(&st(I, &x), &y)).abs() / nxy);
        t.record("w2 = g(J X, Y)", (p.w2 - metric_g(&st(J, &x), &y)).abs() / nxy);
        t.record("w3 = g(K X, Y)", (p.w3 - metric_g(&st(K, &x), &y)).abs() / nxy);
        t.record("Omega = g(I_Omega X, Y)", (p.omega - metric_g(&st(IOmega, &x), &y)).abs() / nxy);
        t.record("w2 + i w3 = Q", (C64::new(p.w2, p.w3) - p.q()).norm() / nxy);

        t.record("g symmetric", (metric_g(&x, &y) - metric_g(&y, &x)).abs() / nxy);
        t.record("Omega antisymmetric", (p.omega + pt.omega).abs() / nxy);
        t.record("w1 antisymmetric", (p.w1 + pt.w1).abs() / nxy);
        t.record("w2 antisymmetric", (p.w2 + pt.w2).abs() / nxy);
        t.record("w3 antisymmetric", (p.w3 + pt.w3).abs() / nxy);
        t.record("Q antisymmetric", (p.q() + pt.q()).norm() / nxy);
        t.record("g positive", if metric_g(&x, &x) > 0.0 { 0.0 } else { 1.0 });

        let (ux, uy) = (x.gauge_transformed(&u), y.gauge_transformed(&u));
        let pu = faulty_forms(&ux, &uy, fault);
        t.record("g gauge invariant", (metric_g(&ux, &uy) - metric_g(&x, &y)).abs() / nxy);
        t.record("Omega gauge invariant", (pu.omega - p.omega).abs() / nxy);
        t.record("w1 gauge invariant", (pu.w1 - p.w1).abs() / nxy);
        t.record("w2 gauge invariant", (pu.w2 - p.w2).abs() / nxy);
        t.record("w3 gauge invariant", (pu.w3 - p.w3).abs() / nxy);
        t.record("Q gauge invariant", (pu.q() - p.q()).norm() / nxy);
        for (name, s) in [("I commutes with u*", I), ("J commutes with u*", J), ("K commutes with u*", K)] {
            let lhs = st(s, &ux);
            let rhs = st(s, &x).gauge_transformed(&u);
            t.record(name, tangent_distance(&lhs, &rhs) / nx);
        }
        // the pairings take no base point, so closedness reduces to this
        t.record("forms independent of base", 0.0);

        let zeta = random_gauge(grid, k + 5, max_mode, 1.0).zeta().clone();
        let h = hamiltonian_check(&base, &zeta, &x, &[1e-3, 1e-4]);
        let worst = |d: &DerivativeComparison| d.relative_mismatch.iter().fold(0f64, |a, &b| a.max(b));
        hamiltonian_rows.record("dH = Omega(X_zeta, X)", worst(&h.omega));
        hamiltonian_rows.record("dH_Q = Q(X_zeta, X)", worst(&h.q));
    }
    let row = |threshold: f64| {
        move |(identity, max_error): (String, f64)| IdentityError {
            passed: max_error < threshold,
            identity,
            max_error,
            threshold,
        }
    };
    let identities: Vec<IdentityError> = t
        .rows
        .into_iter()
        .map(row(SUITE_THRESHOLD))
        .chain(hamiltonian_rows.rows.into_iter().map(row(ROUNDING_LEVEL)))
        .collect();
    let passed = identities.iter().all(|i| i.passed);
    Ok(HkSuiteReport { samples, seed, n: grid.n(), max_mode, identities, passed })
}
