//! Wall-location measurements, σ-product sweeps and the magic-product
//! root finder.
//!
//! A measurement runs one scheme to steady state from `f = 0`, fits a
//! parabola to the time-centred profile across the walls, and reports the
//! offset Δq of the extrapolated zero beyond the first node. The swept
//! product is `σ1σ2` for the D1Q3 schemes and `σ5σ8` for D2Q9.

use crate::collision::{diffusivity_from_params, D2q9Rates, DrivingSpec, EquilibriumParams};
use crate::error::{Error, Result};
use crate::experiments::fit::{fit_parabola, wall_location, ParabolaFit, WallLocationResult, WallSide};
use crate::experiments::steady::{run_to_steady, SteadyStateCriterion};
use crate::scheme::{ChannelConfig, ChannelScheme, DiffusionConfig, DiffusionScheme};

/// Scheme variants with a closed-form superconvergent product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MagicVariant {
    /// D1Q3 basis A with anti-bounce-back.
    DiffusionA,
    /// D1Q3 Gram-Schmidt basis B with anti-bounce-back.
    DiffusionB,
    /// D2Q9, body force split in halves around the collision.
    ForceSplitHalf,
    /// D2Q9, body force added to the populations after collision.
    ForcePopulation,
    /// D2Q9, pressure anti-bounce-back inlet and outlet.
    PressureDrop { alpha: f64, beta: f64 },
}

/// Product of σ parameters at which the wall sits half a cell beyond the
/// boundary node.
pub fn predict_magic(variant: MagicVariant) -> Result<f64> {
    Ok(match variant {
        MagicVariant::DiffusionA => 1.0 / 8.0,
        MagicVariant::DiffusionB => 3.0 / 8.0,
        MagicVariant::ForceSplitHalf => 3.0 / 8.0,
        MagicVariant::ForcePopulation => 3.0 / 16.0,
        MagicVariant::PressureDrop { alpha, beta } => {
            let denominator = alpha + 2.0 * beta - 4.0;
            if denominator == 0.0 {
                return Err(Error::Domain(format!(
                    "alpha + 2 beta - 4 vanishes for alpha = {alpha}, beta = {beta}"
                )));
            }
            -0.375 * (alpha + 4.0) / denominator
        }
    })
}

/// Relaxation pair whose product is swept: `(σ1, σ2)` for D1Q3,
/// `(σ5, σ8)` for D2Q9.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPair {
    pub first: f64,
    pub second: f64,
}

impl SigmaPair {
    pub fn new(first: f64, second: f64) -> Self {
        Self { first, second }
    }

    pub fn product(&self) -> f64 {
        self.first * self.second
    }
}

/// Driving of a D2Q9 channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelDrive {
    SplitHalf { fx: f64 },
    Population { fx: f64 },
    Pressure { delta_p: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum WallProblem {
    /// D1Q3 Poisson problem on `n` nodes with anti-bounce-back ends.
    Diffusion {
        equilibrium: EquilibriumParams,
        n: usize,
        delta_p: f64,
    },
    /// D2Q9 channel with bounce-back walls at y = 0 and y = ny − 1; the
    /// profile is read at column `nx / 2`.
    Channel {
        nx: usize,
        ny: usize,
        alpha: f64,
        beta: f64,
        s3: f64,
        s4: f64,
        drive: ChannelDrive,
    },
}

impl WallProblem {
    /// 1D Poisson problem with the default grid of 32 nodes.
    pub fn poisson(equilibrium: EquilibriumParams) -> Self {
        WallProblem::Diffusion {
            equilibrium,
            n: 32,
            delta_p: 1e-4,
        }
    }

    /// 100 × 21 channel with `α = −2, β = 1` and `s3 = s4 = 1.2`.
    pub fn channel(drive: ChannelDrive) -> Self {
        WallProblem::Channel {
            nx: 100,
            ny: 21,
            alpha: -2.0,
            beta: 1.0,
            s3: D2q9Rates::DEFAULT_S,
            s4: D2q9Rates::DEFAULT_S,
            drive,
        }
    }

    pub fn variant(&self) -> Result<MagicVariant> {
        match self {
            WallProblem::Diffusion { equilibrium, .. } => match equilibrium {
                EquilibriumParams::D1q3A { .. } => Ok(MagicVariant::DiffusionA),
                EquilibriumParams::D1q3B { .. } => Ok(MagicVariant::DiffusionB),
                EquilibriumParams::D2q9 { .. } => {
                    Err(Error::Config("diffusion problem needs D1Q3 equilibrium parameters".into()))
                }
            },
            WallProblem::Channel { alpha, beta, drive, .. } => Ok(match drive {
                ChannelDrive::SplitHalf { .. } => MagicVariant::ForceSplitHalf,
                ChannelDrive::Population { .. } => MagicVariant::ForcePopulation,
                ChannelDrive::Pressure { .. } => MagicVariant::PressureDrop {
                    alpha: *alpha,
                    beta: *beta,
                },
            }),
        }
    }

    /// Names of the two swept parameters, in [`SigmaPair`] order.
    pub fn pair_names(&self) -> (&'static str, &'static str) {
        match self {
            WallProblem::Diffusion { .. } => ("sigma1", "sigma2"),
            WallProblem::Channel { .. } => ("sigma5", "sigma8"),
        }
    }

    /// Factorizes `product` holding the transport parameter (σ1 or σ8)
    /// at `transport_sigma`.
    pub fn pair_for_product(&self, product: f64, transport_sigma: f64) -> SigmaPair {
        match self {
            WallProblem::Diffusion { .. } => SigmaPair::new(transport_sigma, product / transport_sigma),
            WallProblem::Channel { .. } => SigmaPair::new(product / transport_sigma, transport_sigma),
        }
    }

    /// Runs to steady state and locates both walls.
    pub fn measure(&self, pair: SigmaPair, criterion: &SteadyStateCriterion) -> Result<WallMeasurement> {
        if !(pair.first > 0.0 && pair.second > 0.0) {
            return Err(Error::Config(format!(
                "sigma pair ({}, {}) must be positive",
                pair.first, pair.second
            )));
        }
        let (positions, profile, steps) = match *self {
            WallProblem::Diffusion { equilibrium, n, delta_p } => {
                let config = DiffusionConfig::poisson(n, equilibrium, pair.first, pair.second, delta_p)?;
                let mut scheme = DiffusionScheme::new(config)?;
                let report = run_to_steady(&mut scheme, criterion)?;
                let positions = (0..n).map(|i| i as f64).collect::<Vec<_>>();
                (positions, scheme.centred_density(), report.steps)
            }
            WallProblem::Channel {
                nx,
                ny,
                alpha,
                beta,
                s3,
                s4,
                drive,
            } => {
                let rates = D2q9Rates {
                    s3,
                    s4,
                    ..D2q9Rates::from_sigmas(pair.first, pair.second)
                };
                let config = match drive {
                    ChannelDrive::SplitHalf { fx } => {
                        ChannelConfig::force_driven(nx, ny, rates, alpha, beta, DrivingSpec::ForceSplitHalf { fx })
                    }
                    ChannelDrive::Population { fx } => {
                        ChannelConfig::force_driven(nx, ny, rates, alpha, beta, DrivingSpec::ForcePopulation { fx })
                    }
                    ChannelDrive::Pressure { delta_p } => ChannelConfig::pressure_driven(nx, ny, rates, alpha, beta, delta_p)?,
                };
                let mut scheme = ChannelScheme::new(config)?;
                let report = run_to_steady(&mut scheme, criterion)?;
                let positions = (0..ny).map(|j| j as f64).collect::<Vec<_>>();
                (positions, scheme.momentum_column(nx / 2), report.steps)
            }
        };
        WallMeasurement::from_profile(pair, positions, profile, steps)
    }
}

/// Outcome of one steady run: the profile, its fit and both wall offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct WallMeasurement {
    pub pair: SigmaPair,
    pub positions: Vec<f64>,
    pub profile: Vec<f64>,
    pub fit: ParabolaFit,
    pub low: WallLocationResult,
    pub high: WallLocationResult,
    pub steps: usize,
}

impl WallMeasurement {
    /// Fits the full profile (lattice units, Δx = 1) and locates both walls.
    pub fn from_profile(pair: SigmaPair, positions: Vec<f64>, profile: Vec<f64>, steps: usize) -> Result<Self> {
        let fit = fit_parabola(&positions, &profile)?;
        let first = positions[0];
        let last = positions[positions.len() - 1];
        let low = wall_location(&fit, first, 1.0, WallSide::Low)?;
        let high = wall_location(&fit, last, 1.0, WallSide::High)?;
        Ok(Self {
            pair,
            positions,
            profile,
            fit,
            low,
            high,
            steps,
        })
    }

    /// Offset of the low wall, the quantity swept and root-found.
    pub fn delta_q(&self) -> f64 {
        self.low.delta_q
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSample {
    pub pair: SigmaPair,
    pub product: f64,
    pub delta_q: f64,
}

/// Δq against σ-product, with the crossing of Δq = 1/2 and the prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct MagicSweep {
    pub variant: MagicVariant,
    /// Sorted by product; equal products keep their input order.
    pub samples: Vec<SweepSample>,
    /// Linear interpolation of the first bracketed crossing, if any.
    pub root: Option<f64>,
    pub prediction: Option<f64>,
}

impl MagicSweep {
    /// Adjacent samples (by product) across which `Δq − 1/2` changes sign.
    pub fn brackets(&self) -> Vec<(f64, f64)> {
        let distinct = self.distinct();
        distinct
            .windows(2)
            .filter(|w| (w[0].delta_q - 0.5).signum() != (w[1].delta_q - 0.5).signum())
            .map(|w| (w[0].product, w[1].product))
            .collect()
    }

    fn distinct(&self) -> Vec<SweepSample> {
        let mut out: Vec<SweepSample> = Vec::with_capacity(self.samples.len());
        for s in &self.samples {
            if out.last().is_none_or(|last| last.product != s.product) {
                out.push(*s);
            }
        }
        out
    }

    fn interpolate_root(&self) -> Option<f64> {
        let distinct = self.distinct();
        distinct.windows(2).find_map(|w| {
            let (g0, g1) = (w[0].delta_q - 0.5, w[1].delta_q - 0.5);
            if g0 == 0.0 {
                Some(w[0].product)
            } else if g0.signum() != g1.signum() {
                Some(w[0].product + (w[1].product - w[0].product) * g0 / (g0 - g1))
            } else {
                None
            }
        })
    }
}

/// Measures Δq for each σ pair.
pub fn sweep_product(problem: &WallProblem, pairs: &[SigmaPair], criterion: &SteadyStateCriterion) -> Result<MagicSweep> {
    let variant = problem.variant()?;
    let (a, b) = problem.pair_names();
    let mut samples = pairs
        .iter()
        .map(|&pair| {
            problem
                .measure(pair, criterion)
                .map(|m| SweepSample {
                    pair,
                    product: pair.product(),
                    delta_q: m.delta_q(),
                })
                .map_err(|e| e.in_context(format!("sample {a} = {}, {b} = {}", pair.first, pair.second)))
        })
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(|x, y| x.product.total_cmp(&y.product));
    let mut sweep = MagicSweep {
        variant,
        samples,
        root: None,
        prediction: predict_magic(variant).ok(),
    };
    sweep.root = sweep.interpolate_root();
    Ok(sweep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Half-width of the final bracket, in product units.
    pub tolerance: f64,
    pub max_evaluations: usize,
    /// Transport σ held fixed while the other σ absorbs the product.
    pub transport_sigma: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-5,
            max_evaluations: 40,
            transport_sigma: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagicRoot {
    pub product: f64,
    /// Δq measured at `product`.
    pub delta_q: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Bisects `product ↦ Δq(product) − 1/2` over `bracket`.
pub fn find_magic_root(
    problem: &WallProblem,
    bracket: (f64, f64),
    options: &RootOptions,
    criterion: &SteadyStateCriterion,
) -> Result<MagicRoot> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Config(format!("invalid bracket [{lo}, {hi}]")));
    }
    let offset = |product: f64| -> Result<f64> {
        let pair = problem.pair_for_product(product, options.transport_sigma);
        problem
            .measure(pair, criterion)
            .map(|m| m.delta_q() - 0.5)
            .map_err(|e| e.in_context(format!("product {product}")))
    };
    let g_lo = offset(lo)?;
    if g_lo == 0.0 {
        return finish(lo, g_lo, (lo, hi), 1);
    }
    let g_hi = offset(hi)?;
    if g_hi == 0.0 {
        return finish(hi, g_hi, (lo, hi), 2);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    let mut count = 2;
    while 0.5 * (hi - lo) > options.tolerance {
        if count + 1 >= options.max_evaluations {
            return Err(Error::Domain(format!(
                "root finder used its {} evaluations with bracket [{lo}, {hi}]",
                options.max_evaluations
            )));
        }
        let mid = 0.5 * (lo + hi);
        let g_mid = offset(mid)?;
        count += 1;
        if g_mid == 0.0 {
            return finish(mid, g_mid, (lo, hi), count);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let product = 0.5 * (lo + hi);
    let g = offset(product)?;
    finish(product, g, (lo, hi), count + 1)
}

fn finish(product: f64, offset: f64, bracket: (f64, f64), evaluations: usize) -> Result<MagicRoot> {
    Ok(MagicRoot {
        product,
        delta_q: offset + 0.5,
        bracket,
        evaluations,
    })
}

/// Curvature of the steady Poisson profile predicted by the diffusivity,
/// `ρ'' = −δp/(κ Δt)` in lattice units.
pub fn poisson_curvature(equilibrium: &EquilibriumParams, sigma1: f64, delta_p: f64) -> Result<f64> {
    Ok(-delta_p / diffusivity_from_params(sigma1, equilibrium, 1.0, 1.0)?)
}
