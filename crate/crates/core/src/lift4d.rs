//! Four-dimensional equations on `x₃, x₄`-independent data.
//!
//! `A = i Σ A_j dx_j`, `∇_j = ∂_j + iA_j`, `F_jk = i(∂_j A_k − ∂_k A_j)`,
//! `η_X = Ψ*XΨ` for `X ∈ {I, J, K}`. On lifted data `∂₃ = ∂₄ = 0`.
//!
//! The 2D fields are recovered through
//!
//! ```text
//! a = (A₂ + iA₁)/2      (A − Ā = a dz − ā dz̄ = i(A₁dx₁ + A₂dx₂))
//! φ = A₄ − iA₃          (φ₁ = −iA₃, φ₂ = −iA₄, φ = φ₁ + iφ₂)
//! ```
//!
//! Frozen correspondence, derived by expanding both sides:
//!
//! ```text
//! SW1 row 1          = 2 · r3b
//! SW1 row 2          = 2 · r3a
//! SW2b + i·SW2c      = r2
//! (i/2) · SW2a       = r1 − D/4,    D = |ψ₁|² − |ψ₂|²
//! ```
//!
//! The last line means the curvature channel only corresponds when
//! `|ψ₁| = |ψ₂|`: the 4D equation reads `F₁₂ = (i/2)D` while the 2D equation
//! with `ω = 2 dx₁∧dx₂` reads `F₁₂ = iD`. The check reports the stated
//! correspondence `(i/2)·SW2a ↔ r1` and, separately, the area-normalised
//! variant `(i/2)·SW2a ↔ r1 − D/4`.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::equations::ResidualBundle;
use crate::fields::{Configuration, Spinor};
use crate::surface::{partial_x1, partial_x2, ScalarField, C64, I};

type M2 = Matrix2<C64>;

fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The quaternion units as 2×2 complex matrices and the Clifford map `γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionRep {
    pub i: M2,
    pub j: M2,
    pub k: M2,
}

impl Default for QuaternionRep {
    fn default() -> Self {
        Self {
            i: M2::new(cx(0.0, 1.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, -1.0)),
            j: M2::new(cx(0.0, 0.0), cx(-1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)),
            k: M2::new(cx(0.0, 0.0), cx(0.0, -1.0), cx(0.0, -1.0), cx(0.0, 0.0)),
        }
    }
}

impl QuaternionRep {
    /// `γ(ζ) = [[ζ₁ + iζ₂, −ζ₃ − iζ₄], [ζ₃ − iζ₄, ζ₁ − iζ₂]]`.
    pub fn gamma(&self, z: [f64; 4]) -> M2 {
        M2::new(cx(z[0], z[1]), cx(-z[2], -z[3]), cx(z[2], -z[3]), cx(z[0], -z[1]))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CliffordReport {
    pub identities: Vec<IdentityCheck>,
    pub all_hold: bool,
}

/// Exact (entrywise `==`) check of the quaternion and Clifford identities.
pub fn clifford_check() -> CliffordReport {
    let q = QuaternionRep::default();
    let id = M2::identity();
    let minus = -id;
    let e = |k: usize| {
        let mut z = [0.0; 4];
        z[k] = 1.0;
        q.gamma(z)
    };
    let checks = [
        ("IJ = K", q.i * q.j == q.k),
        ("JK = I", q.j * q.k == q.i),
        ("KI = J", q.k * q.i == q.j),
        ("I^2 = -Id", q.i * q.i == minus),
        ("J^2 = -Id", q.j * q.j == minus),
        ("K^2 = -Id", q.k * q.k == minus),
        ("gamma(e1) = Id", e(0) == id),
        ("gamma(e2) = I", e(1) == q.i),
        ("gamma(e3) = J", e(2) == q.j),
        ("gamma(e4) = K", e(3) == q.k),
        ("gamma(e1)^* gamma(e1) = Id", e(0).adjoint() * e(0) == id),
    ];
    let identities: Vec<IdentityCheck> = checks
        .iter()
        .map(|(name, holds)| IdentityCheck { name: name.to_string(), holds: *holds })
        .collect();
    let all_hold = identities.iter().all(|c| c.holds);
    CliffordReport { identities, all_hold }
}

/// Connection components `A₁..A₄` (real, stored as complex) and spinor,
/// all functions of `(x₁, x₂)` only.
#[derive(Clone, Debug, PartialEq)]
pub struct Config4D {
    pub a: [ScalarField; 4],
    pub psi: Spinor,
}

impl Config4D {
    pub fn is_real(&self, tol: f64) -> bool {
        self.a.iter().all(|f| f.is_real(tol))
    }
}

pub fn lift(c: &Configuration) -> Config4D {
    let a = c.a();
    let phi = c.phi();
    Config4D {
        a: [
            a.map(|v| c64re(2.0 * v.im)),
            a.map(|v| c64re(2.0 * v.re)),
            phi.map(|v| c64re(-v.im)),
            phi.map(|v| c64re(v.re)),
        ],
        psi: c.spinor.clone(),
    }
}

fn c64re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn project_2d(c4: &Config4D) -> Configuration {
    let [a1, a2, a3, a4] = &c4.a;
    let a = a2.zip_map(a1, |x2, x1| cx(x2.re, x1.re) * 0.5);
    let phi = a4.zip_map(a3, |x4, x3| cx(x4.re, -x3.re));
    Configuration::new(a, c4.psi.psi1.clone(), c4.psi.psi2.clone(), phi).expect("same grid")
}

/// `∂_j` on fields independent of `x₃, x₄`.
fn partial(j: usize, f: &ScalarField) -> ScalarField {
    match j {
        1 => partial_x1(f),
        2 => partial_x2(f),
        _ => ScalarField::zeros(*f.grid()),
    }
}

/// `F_jk = i(∂_j A_k − ∂_k A_j)` for `1 ≤ j, k ≤ 4`.
pub fn curvature_component(c4: &Config4D, j: usize, k: usize) -> ScalarField {
    assert!((1..=4).contains(&j) && (1..=4).contains(&k));
    let d = &partial(j, &c4.a[k - 1]) - &partial(k, &c4.a[j - 1]);
    d.scale(I)
}

/// Pointwise `M·Ψ`.
fn apply(m: &M2, psi: &[ScalarField; 2]) -> [ScalarField; 2] {
    [
        &psi[0].scale(m[(0, 0)]) + &psi[1].scale(m[(0, 1)]),
        &psi[0].scale(m[(1, 0)]) + &psi[1].scale(m[(1, 1)]),
    ]
}

/// Pointwise `Ψ* M Ψ`.
fn sandwich(m: &M2, psi: &[ScalarField; 2]) -> ScalarField {
    let mpsi = apply(m, psi);
    &(&psi[0].conj() * &mpsi[0]) + &(&psi[1].conj() * &mpsi[1])
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sw4dResiduals {
    /// `∇₁Ψ − I∇₂Ψ − J∇₃Ψ − K∇₄Ψ`.
    pub sw1: [ScalarField; 2],
    /// `F₁₂ + F₃₄ − ½η₁`.
    pub sw2a: ScalarField,
    /// `F₁₃ + F₄₂ − ½η₂`.
    pub sw2b: ScalarField,
    /// `F₁₄ + F₂₃ − ½η₃`.
    pub sw2c: ScalarField,
}

pub fn sw4d_residuals(c4: &Config4D) -> Sw4dResiduals {
    let q = QuaternionRep::default();
    let psi = [c4.psi.psi1.clone(), c4.psi.psi2.clone()];
    let nabla = |j: usize| -> [ScalarField; 2] {
        let ia = c4.a[j - 1].scale(I);
        [&partial(j, &psi[0]) + &(&ia * &psi[0]), &partial(j, &psi[1]) + &(&ia * &psi[1])]
    };
    let n1 = nabla(1);
    let terms = [apply(&q.i, &nabla(2)), apply(&q.j, &nabla(3)), apply(&q.k, &nabla(4))];
    let mut sw1 = n1;
    for t in &terms {
        sw1 = [&sw1[0] - &t[0], &sw1[1] - &t[1]];
    }
    let f = |j, k| curvature_component(c4, j, k);
    let half = |m: &M2| sandwich(m, &psi).scale_re(0.5);
    Sw4dResiduals {
        sw1,
        sw2a: &(&f(1, 2) + &f(3, 4)) - &half(&q.i),
        sw2b: &(&f(1, 3) + &f(4, 2)) - &half(&q.j),
        sw2c: &(&f(1, 4) + &f(2, 3)) - &half(&q.k),
    }
}

/// The frozen constants relating 4D and 2D residual channels.
#[derive(Clone, Debug, Serialize)]
pub struct ConventionsTable {
    pub sw1_row1_over_r3b: f64,
    pub sw1_row2_over_r3a: f64,
    pub sw2b_plus_i_sw2c_over_r2: f64,
    /// `r1 = κ · SW2a` with `κ = i/2` (stored as `[re, im]`).
    pub r1_over_sw2a: [f64; 2],
    pub a_from_a1_a2: &'static str,
    pub phi_from_a3_a4: &'static str,
}

impl Default for ConventionsTable {
    fn default() -> Self {
        Self {
            sw1_row1_over_r3b: 2.0,
            sw1_row2_over_r3a: 2.0,
            sw2b_plus_i_sw2c_over_r2: 1.0,
            r1_over_sw2a: [0.0, 0.5],
            a_from_a1_a2: "a = (A2 + i A1) / 2",
            phi_from_a3_a4: "phi = A4 - i A3",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelMismatch {
    pub channel: String,
    /// `max|lhs − rhs| / max(1, max|lhs|, max|rhs|)`.
    pub mismatch: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub channels: Vec<ChannelMismatch>,
    pub max_mismatch: f64,
    pub passed: bool,
    /// `(i/2)·SW2a` against `r1 − D/4`; not part of `passed`.
    pub sw2a_area_normalized_mismatch: f64,
    pub tolerance: f64,
    pub conventions: ConventionsTable,
}

fn relative_mismatch(lhs: &ScalarField, rhs: &ScalarField) -> f64 {
    let scale = 1f64.max(lhs.max_abs()).max(rhs.max_abs());
    (lhs - rhs).max_abs() / scale
}

pub const REDUCTION_TOLERANCE: f64 = 1e-10;

/// Compares the 4D residuals of `lift(c)` with the 2D residuals of `c`
/// channel by channel through the conventions table.
pub fn reduction_consistency_check(c: &Configuration) -> ReductionReport {
    let conv = ConventionsTable::default();
    let r = ResidualBundle::evaluate(c);
    let s = sw4d_residuals(&lift(c));
    let kappa = cx(conv.r1_over_sw2a[0], conv.r1_over_sw2a[1]);

    let pairs: [(&str, ScalarField, ScalarField); 4] = [
        ("sw1_row1 <-> r3b", s.sw1[0].clone(), r.r3b.scale_re(conv.sw1_row1_over_r3b)),
        ("sw1_row2 <-> r3a", s.sw1[1].clone(), r.r3a.scale_re(conv.sw1_row2_over_r3a)),
        (
            "sw2b + i sw2c <-> r2",
            &s.sw2b + &s.sw2c.scale(I),
            r.r2.f.scale_re(conv.sw2b_plus_i_sw2c_over_r2),
        ),
        ("sw2a <-> r1", s.sw2a.scale(kappa), r.r1.f.clone()),
    ];
    let channels: Vec<ChannelMismatch> = pairs
        .iter()
        .map(|(name, lhs, rhs)| {
            let mismatch = relative_mismatch(lhs, rhs);
            ChannelMismatch { channel: name.to_string(), mismatch, passed: mismatch < REDUCTION_TOLERANCE }
        })
        .collect();
    let quarter_d = c.psi1().zip_map(c.psi2(), |a, b| c64re((a.norm_sqr() - b.norm_sqr()) * 0.25));
    let sw2a_area_normalized_mismatch = relative_mismatch(&s.sw2a.scale(kappa), &(&r.r1.f - &quarter_d));
    let max_mismatch = channels.iter().map(|ch| ch.mismatch).fold(0.0, f64::max);
    ReductionReport {
        passed: channels.iter().all(|ch| ch.passed),
        channels,
        max_mismatch,
        sw2a_area_normalized_mismatch,
        tolerance: REDUCTION_TOLERANCE,
        conventions: conv,
    }
}
