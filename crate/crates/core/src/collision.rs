//! Moment-space relaxation, linear equilibria, source and force injection,
//! and the maps between relaxation rates and transport coefficients.

use crate::error::{Error, Result};
use crate::lattice::D1q3Basis;

/// `σ = 1/s − 1/2`.
#[inline]
pub fn sigma_from_rate(s: f64) -> f64 {
    1.0 / s - 0.5
}

/// `s = 1/(σ + 1/2)`.
#[inline]
pub fn rate_from_sigma(sigma: f64) -> f64 {
    1.0 / (sigma + 0.5)
}

/// Per-moment relaxation rates; conserved moments carry `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationSettings<const Q: usize> {
    rates: [Option<f64>; Q],
}

impl<const Q: usize> RelaxationSettings<Q> {
    /// Validates `0 < s < 2` for every relaxed moment.
    pub fn new(rates: [Option<f64>; Q]) -> Result<Self> {
        for (k, s) in rates.iter().enumerate() {
            if let Some(s) = *s {
                if !(s > 0.0 && s < 2.0) {
                    return Err(Error::Config(format!(
                        "relaxation rate s{k} = {s} violates 0 < s < 2"
                    )));
                }
            }
        }
        Ok(Self { rates })
    }

    pub fn rate(&self, k: usize) -> Option<f64> {
        self.rates[k]
    }

    pub fn sigma(&self, k: usize) -> Option<f64> {
        self.rates[k].map(sigma_from_rate)
    }

    pub fn rates(&self) -> &[Option<f64>; Q] {
        &self.rates
    }
}

impl RelaxationSettings<3> {
    /// Density conserved; flux and energy relaxed at `s1`, `s2`.
    pub fn d1q3(s1: f64, s2: f64) -> Result<Self> {
        Self::new([None, Some(s1), Some(s2)])
    }

    pub fn d1q3_from_sigmas(sigma1: f64, sigma2: f64) -> Result<Self> {
        Self::d1q3(rate_from_sigma(sigma1), rate_from_sigma(sigma2))
    }
}

/// Relaxation rates of the D2Q9 scheme. Heat-flux moments share `s5` and
/// the two stresses share `s8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2q9Rates {
    pub s3: f64,
    pub s4: f64,
    pub s5: f64,
    pub s8: f64,
}

impl D2q9Rates {
    /// Default rate of the energy and square-energy moments.
    pub const DEFAULT_S: f64 = 1.2;

    /// Rates from the swept pair `(σ5, σ8)` with `s3 = s4 = 1.2`.
    pub fn from_sigmas(sigma5: f64, sigma8: f64) -> Self {
        Self {
            s3: Self::DEFAULT_S,
            s4: Self::DEFAULT_S,
            s5: rate_from_sigma(sigma5),
            s8: rate_from_sigma(sigma8),
        }
    }
}

impl RelaxationSettings<9> {
    pub fn d2q9(rates: D2q9Rates) -> Result<Self> {
        let D2q9Rates { s3, s4, s5, s8 } = rates;
        Self::new([
            None,
            None,
            None,
            Some(s3),
            Some(s4),
            Some(s5),
            Some(s5),
            Some(s8),
            Some(s8),
        ])
    }
}

/// Linear equilibrium parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquilibriumParams {
    /// Basis A: `m2_eq = ζ λ²/2 ρ`.
    D1q3A { zeta: f64 },
    /// Basis B: `m2_eq = λ² ζ̃ ρ`.
    D1q3B { zeta_tilde: f64 },
    /// `m3_eq = αρ`, `m4_eq = βρ`.
    D2q9 { alpha: f64, beta: f64 },
}

impl EquilibriumParams {
    pub const DEFAULT_ZETA: f64 = 1.0 / 3.0;
    pub const DEFAULT_ZETA_TILDE: f64 = 1.0;

    pub fn validate(&self) -> Result<()> {
        match *self {
            EquilibriumParams::D1q3A { zeta } if !(zeta > 0.0) => Err(Error::Config(format!(
                "zeta = {zeta} must be positive for a positive diffusivity"
            ))),
            EquilibriumParams::D1q3B { zeta_tilde } if !(2.0 + zeta_tilde > 0.0) => {
                Err(Error::Config(format!(
                    "zeta_tilde = {zeta_tilde} must satisfy 2 + zeta_tilde > 0"
                )))
            }
            EquilibriumParams::D2q9 { alpha, beta } if !(alpha.is_finite() && beta.is_finite()) => {
                Err(Error::Config("alpha and beta must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn d1q3_basis(&self) -> Option<D1q3Basis> {
        match self {
            EquilibriumParams::D1q3A { .. } => Some(D1q3Basis::A),
            EquilibriumParams::D1q3B { .. } => Some(D1q3Basis::B),
            EquilibriumParams::D2q9 { .. } => None,
        }
    }
}

pub fn equilibrium_d1q3(
    m: &[f64; 3],
    params: &EquilibriumParams,
    basis: D1q3Basis,
    lambda: f64,
) -> Result<[f64; 3]> {
    let rho = m[0];
    let energy = match (params, basis) {
        (EquilibriumParams::D1q3A { zeta }, D1q3Basis::A) => zeta * lambda * lambda / 2.0 * rho,
        (EquilibriumParams::D1q3B { zeta_tilde }, D1q3Basis::B) => lambda * lambda * zeta_tilde * rho,
        _ => {
            return Err(Error::Config(format!(
                "equilibrium {params:?} does not match D1Q3 basis {basis:?}"
            )))
        }
    };
    Ok([rho, 0.0, energy])
}

#[inline]
pub fn equilibrium_d2q9(m: &[f64; 9], alpha: f64, beta: f64, lambda: f64) -> [f64; 9] {
    let (rho, jx, jy) = (m[0], m[1], m[2]);
    [
        rho,
        jx,
        jy,
        alpha * rho,
        beta * rho,
        -jx / lambda,
        -jy / lambda,
        0.0,
        0.0,
    ]
}

/// `m*_ℓ = (1 − s_ℓ) m_ℓ + s_ℓ m_eq_ℓ` for relaxed moments; conserved
/// moments are copied unchanged.
#[inline]
pub fn relax<const Q: usize>(m: &[f64; Q], m_eq: &[f64; Q], settings: &RelaxationSettings<Q>) -> [f64; Q] {
    let mut out = *m;
    for (k, s) in settings.rates.iter().enumerate() {
        if let Some(s) = *s {
            out[k] = (1.0 - s) * m[k] + s * m_eq[k];
        }
    }
    out
}

/// How a simulation is driven. Magnitudes are in lattice units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DrivingSpec {
    None,
    /// Uniform D1Q3 density source δp per step, split in two halves.
    DiffusionSource { delta_p: f64 },
    /// D2Q9 body force, half before equilibria and half after relaxation.
    ForceSplitHalf { fx: f64 },
    /// D2Q9 body force injected after collision in population form.
    ForcePopulation { fx: f64 },
    /// Pressure step δp imposed through the inlet/outlet closures.
    PressureDrop { delta_p: f64 },
}

impl DrivingSpec {
    pub fn magnitude(&self) -> f64 {
        match *self {
            DrivingSpec::None => 0.0,
            DrivingSpec::DiffusionSource { delta_p } | DrivingSpec::PressureDrop { delta_p } => delta_p,
            DrivingSpec::ForceSplitHalf { fx } | DrivingSpec::ForcePopulation { fx } => fx,
        }
    }

    /// Half of the momentum impulse per step, used to time-centre the
    /// measured momentum of force-driven runs.
    pub fn half_impulse(&self, dt: f64) -> f64 {
        match *self {
            DrivingSpec::ForceSplitHalf { fx } | DrivingSpec::ForcePopulation { fx } => 0.5 * dt * fx,
            _ => 0.0,
        }
    }
}

/// Half of a split source or force, applied before equilibria are evaluated
/// or after relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Pre,
    Post,
}

/// Tracks which half-phases have been applied during the current step.
#[derive(Debug, Default, Clone, Copy)]
pub struct HalfStepTracker {
    pre: bool,
    post: bool,
}

impl HalfStepTracker {
    fn mark(&mut self, phase: Phase) {
        let slot = match phase {
            Phase::Pre => &mut self.pre,
            Phase::Post => {
                debug_assert!(self.pre, "post-collision half applied before the pre-collision half");
                &mut self.post
            }
        };
        debug_assert!(!*slot, "{phase:?} half applied twice in one step");
        *slot = true;
    }

    /// Starts a new step.
    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

/// Adds `δp/2` to the density moment.
#[inline]
pub fn apply_diffusion_source(m: &mut [f64; 3], delta_p: f64, phase: Phase, tracker: &mut HalfStepTracker) {
    tracker.mark(phase);
    m[0] += 0.5 * delta_p;
}

/// Adds `Δt F_x / 2` to `j_x`.
#[inline]
pub fn apply_force_split_half(m: &mut [f64; 9], fx: f64, dt: f64, phase: Phase, tracker: &mut HalfStepTracker) {
    tracker.mark(phase);
    m[1] += 0.5 * dt * fx;
}

/// Post-collision force in moment form: `j_x += F_x`, `m5 −= F_x/λ`.
#[inline]
pub fn apply_force_population(m: &mut [f64; 9], fx: f64, lambda: f64) {
    m[1] += fx;
    m[5] -= fx / lambda;
}

/// The same force written as per-population increments.
pub fn force_population_increments(fx: f64, lambda: f64) -> [f64; 9] {
    let axis = fx / (3.0 * lambda);
    let diag = fx / (12.0 * lambda);
    [0.0, axis, 0.0, -axis, 0.0, diag, -diag, -diag, diag]
}

/// Shear-moment rate for kinematic viscosity `nu`:
/// `s7 = s8 = (1/2 + 3ν/(λ²Δt))⁻¹`.
pub fn viscosity_to_rate(nu: f64, lambda: f64, dt: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("viscosity must be positive, got {nu}")));
    }
    Ok(1.0 / (0.5 + 3.0 * nu / (lambda * lambda * dt)))
}

/// `ν = σ8 λ² Δt / 3`.
pub fn rate_to_viscosity(s: f64, lambda: f64, dt: f64) -> f64 {
    sigma_from_rate(s) * lambda * lambda * dt / 3.0
}

/// Diffusivity of the D1Q3 schemes: `Δt λ² σ1 ζ` for basis A and
/// `Δt λ² σ1 (2 + ζ̃)/3` for basis B.
pub fn diffusivity_from_params(sigma1: f64, params: &EquilibriumParams, lambda: f64, dt: f64) -> Result<f64> {
    let factor = match *params {
        EquilibriumParams::D1q3A { zeta } => zeta,
        EquilibriumParams::D1q3B { zeta_tilde } => (2.0 + zeta_tilde) / 3.0,
        EquilibriumParams::D2q9 { .. } => {
            return Err(Error::Config("diffusivity is defined for D1Q3 schemes only".into()))
        }
    };
    Ok(dt * lambda * lambda * sigma1 * factor)
}

/// Squared sound speed of the linear D2Q9 equilibrium, `λ²(4 + α)/6`.
pub fn sound_speed_squared(alpha: f64, lambda: f64) -> f64 {
    lambda * lambda * (4.0 + alpha) / 6.0
}
