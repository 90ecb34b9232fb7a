//! Residuals of the reduced system on a flat surface:
//!
//! ```text
//! F(A) = (i/2)(|ψ₁|² − |ψ₂|²) ω                      curvature
//! 2∂̄Φ = −i ψ₁ψ̄₂ ω                                   Higgs
//! [ −½φ̄dz̄   ∂̄ − Ā ] [ψ₁]
//! [ ∂ + A   −½φdz  ] [ψ₂] = 0                          Dirac
//! ```
//!
//! Every two-form residual is stored by its `dz ∧ dz̄` coefficient. With
//! `ω = i dz ∧ dz̄`, `∂̄(φ dz) = −∂_z̄φ dz ∧ dz̄` and `D = |ψ₁|² − |ψ₂|²`:
//!
//! ```text
//! r1  = −∂_z ā − ∂_z̄ a + D/2          (real)
//! r2  = −2∂_z̄ φ − ψ₁ψ̄₂
//! r3a = ∂_z̄ψ₂ − āψ₂ − ½φ̄ψ₁           (dz̄ row)
//! r3b = ∂_zψ₁ + aψ₁ − ½φψ₂            (dz row)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Result, SwError};
use crate::fields::{Configuration, Higgs, Spinor};
use crate::surface::{exterior_d, green_invert, partial_z, partial_zbar, ScalarField, TwoFormField};

/// `F(A) − (i/2)(|ψ₁|² − |ψ₂|²)ω`.
pub fn residual_curvature(c: &Configuration) -> TwoFormField {
    let curvature = exterior_d(&c.conn.form());
    let half_d = c.psi1().zip_map(c.psi2(), |a, b| ((a.norm_sqr() - b.norm_sqr()) * 0.5).into());
    // −(i/2)·D·ω has coefficient −(i/2)·D·i = D/2
    TwoFormField::new(&curvature.f + &half_d)
}

/// `2∂̄Φ + i⟨ψ₁, ψ₂⟩ω` with `⟨ψ₁, ψ₂⟩ = ψ₁ψ̄₂`.
pub fn residual_higgs(c: &Configuration) -> TwoFormField {
    let dbar_phi = partial_zbar(c.phi());
    let pairing = c.psi1().zip_map(c.psi2(), |a, b| a * b.conj());
    TwoFormField::new(&dbar_phi.scale_re(-2.0) - &pairing)
}

/// The two Dirac rows `(r3a, r3b)` in cleared-denominator form.
pub fn residual_dirac(c: &Configuration) -> (ScalarField, ScalarField) {
    let a = c.a();
    let (psi1, psi2, phi) = (c.psi1(), c.psi2(), c.phi());
    let mut r3a = partial_zbar(psi2);
    for (k, v) in r3a.values_mut().iter_mut().enumerate() {
        *v -= a.values()[k].conj() * psi2.values()[k] + 0.5 * phi.values()[k].conj() * psi1.values()[k];
    }
    let mut r3b = partial_z(psi1);
    for (k, v) in r3b.values_mut().iter_mut().enumerate() {
        *v += a.values()[k] * psi1.values()[k] - 0.5 * phi.values()[k] * psi2.values()[k];
    }
    (r3a, r3b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualBundle {
    pub r1: TwoFormField,
    pub r2: TwoFormField,
    pub r3a: ScalarField,
    pub r3b: ScalarField,
}

/// Relative weights of the four residual blocks in the energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3a: f64,
    pub w3b: f64,
}

impl Default for EnergyWeights {
    fn default() -> Self {
        Self { w1: 1.0, w2: 1.0, w3a: 1.0, w3b: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub r1_max: f64,
    pub r1_l2: f64,
    pub r2_max: f64,
    pub r2_l2: f64,
    pub r3a_max: f64,
    pub r3a_l2: f64,
    pub r3b_max: f64,
    pub r3b_l2: f64,
    pub energy: f64,
}

impl ResidualReport {
    pub fn max_residual(&self) -> f64 {
        self.r1_max.max(self.r2_max).max(self.r3a_max).max(self.r3b_max)
    }
}

impl ResidualBundle {
    pub fn evaluate(c: &Configuration) -> Self {
        let (r3a, r3b) = residual_dirac(c);
        Self { r1: residual_curvature(c), r2: residual_higgs(c), r3a, r3b }
    }

    pub fn energy_weighted(&self, w: &EnergyWeights) -> f64 {
        w.w1 * self.r1.f.l2_norm_sq()
            + w.w2 * self.r2.f.l2_norm_sq()
            + w.w3a * self.r3a.l2_norm_sq()
            + w.w3b * self.r3b.l2_norm_sq()
    }

    pub fn energy(&self) -> f64 {
        self.energy_weighted(&EnergyWeights::default())
    }

    pub fn report(&self) -> ResidualReport {
        ResidualReport {
            r1_max: self.r1.max_abs(),
            r1_l2: self.r1.f.l2_norm(),
            r2_max: self.r2.max_abs(),
            r2_l2: self.r2.f.l2_norm(),
            r3a_max: self.r3a.max_abs(),
            r3a_l2: self.r3a.l2_norm(),
            r3b_max: self.r3b.max_abs(),
            r3b_l2: self.r3b.l2_norm(),
            energy: self.energy(),
        }
    }
}

/// `E = ‖r1‖² + ‖r2‖² + ‖r3a‖² + ‖r3b‖²` in `L²(dx₁dx₂)`.
pub fn energy(c: &Configuration) -> f64 {
    ResidualBundle::evaluate(c).energy()
}

pub fn energy_weighted(c: &Configuration, w: &EnergyWeights) -> f64 {
    ResidualBundle::evaluate(c).energy_weighted(w)
}

/// Solves the Higgs equation for `Φ` given `Ψ`.
///
/// With `φ = ∂_z w` the equation `−2∂_z̄φ = ψ₁ψ̄₂` becomes `Δw = −2ψ₁ψ̄₂`,
/// solvable iff the pairing has zero mean. Pairings with content on the
/// Nyquist lines are not represented exactly by `∂_z̄∂_z`.
pub fn construct_higgs_from_spinor(s: &Spinor) -> Result<Higgs> {
    let tau = s.psi1.zip_map(&s.psi2, |a, b| a * b.conj());
    let mean = tau.mean().norm();
    if mean > 1e-10 {
        return Err(SwError::ObstructedSource { mean });
    }
    let w = green_invert(&tau.scale_re(-2.0))?;
    Ok(Higgs { phi: partial_z(&w) })
}

/// Residuals of a vortex configuration: `Φ = 0` and one spinor component zero.
pub fn vortex_residuals(c: &Configuration) -> Result<ResidualBundle> {
    const TOL: f64 = 1e-13;
    if !c.phi().is_zero(TOL) {
        return Err(SwError::NotVortexConfiguration("Higgs field is nonzero".into()));
    }
    if !(c.psi1().is_zero(TOL) || c.psi2().is_zero(TOL)) {
        return Err(SwError::NotVortexConfiguration("both spinor components are nonzero".into()));
    }
    Ok(ResidualBundle::evaluate(c))
}
