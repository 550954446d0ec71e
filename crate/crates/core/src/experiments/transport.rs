//! Transport coefficients measured from the decay or oscillation of a
//! single Fourier mode on a periodic grid.

use std::f64::consts::PI;

use crate::boundary::Topology;
use crate::collision::{D2q9Rates, DrivingSpec, EquilibriumParams, RelaxationSettings};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::scheme::{ChannelConfig, ChannelScheme, DiffusionConfig, DiffusionScheme, Evolve};

/// Sampling plan for a single-mode measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeOptions {
    /// Period of the grid along the mode.
    pub n: usize,
    /// Wavenumber index; `k = 2π mode / n`.
    pub mode: usize,
    /// Steps discarded before sampling starts.
    pub transient: usize,
    pub samples: usize,
    pub stride: usize,
}

impl Default for ModeOptions {
    fn default() -> Self {
        Self {
            n: 64,
            mode: 1,
            transient: 200,
            samples: 21,
            stride: 50,
        }
    }
}

impl ModeOptions {
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI * self.mode as f64 / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || self.mode == 0 || 2 * self.mode >= self.n || self.samples < 2 || self.stride == 0 {
            return Err(Error::Config(format!("unusable mode sampling plan {self:?}")));
        }
        Ok(())
    }
}

/// Complex amplitude `(2/N) Σ u_i e^{−i k x_i}` as `(cos part, sin part)`.
fn fourier(values: &[f64], k: f64) -> (f64, f64) {
    let scale = 2.0 / values.len() as f64;
    values.iter().enumerate().fold((0.0, 0.0), |(c, s), (i, u)| {
        let phase = k * i as f64;
        (c + scale * u * phase.cos(), s + scale * u * phase.sin())
    })
}

/// Least-squares slope of `ln a` against `t`, negated.
fn decay_rate(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let mean_t = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_l = samples.iter().map(|s| s.1.ln()).sum::<f64>() / n;
    let (num, den) = samples.iter().fold((0.0, 0.0), |(num, den), (t, a)| {
        let dt = t - mean_t;
        (num + dt * (a.ln() - mean_l), den + dt * dt)
    });
    -num / den
}

fn sample_decay<S: Evolve>(
    scheme: &mut S,
    options: &ModeOptions,
    amplitude: impl Fn(&S) -> f64,
) -> Result<Vec<(f64, f64)>> {
    for _ in 0..options.transient {
        scheme.step()?;
    }
    let mut samples = Vec::with_capacity(options.samples);
    for i in 0..options.samples {
        if i > 0 {
            for _ in 0..options.stride {
                scheme.step()?;
            }
        }
        let a = amplitude(scheme);
        if !(a >= 1e-12) {
            return Err(Error::ModeExhausted {
                step: scheme.time(),
                amplitude: a,
            });
        }
        samples.push((scheme.time() as f64, a));
    }
    Ok(samples)
}

/// Diffusivity of a D1Q3 scheme from the decay `exp(−κ k² t)` of a
/// density sine mode, in lattice units.
pub fn measure_diffusivity(equilibrium: EquilibriumParams, sigma1: f64, sigma2: f64, options: &ModeOptions) -> Result<f64> {
    options.validate()?;
    let k = options.wavenumber();
    let config = DiffusionConfig {
        n: options.n,
        units: LatticeSpec::d1q3_unit(),
        relaxation: RelaxationSettings::d1q3_from_sigmas(sigma1, sigma2)?,
        equilibrium,
        driving: DrivingSpec::None,
        topology: Topology::periodic(),
    };
    let density: Vec<f64> = (0..options.n).map(|i| (k * i as f64).sin()).collect();
    let field = DiffusionScheme::equilibrium_field(&config, &density)?;
    let mut scheme = DiffusionScheme::with_field(config, field)?;
    let samples = sample_decay(&mut scheme, options, |s| {
        let (c, sn) = fourier(&s.density(), k);
        c.hypot(sn)
    })?;
    Ok(decay_rate(&samples) / (k * k))
}

/// Kinematic viscosity of the D2Q9 scheme from the decay of a transverse
/// shear wave `j_x ∝ sin(k y)` on a 4 × n periodic grid.
pub fn measure_viscosity(rates: D2q9Rates, alpha: f64, beta: f64, options: &ModeOptions) -> Result<f64> {
    options.validate()?;
    let k = options.wavenumber();
    let config = ChannelConfig::periodic_box(4, options.n, rates, alpha, beta);
    let macroscopic: Vec<[f64; 3]> = (0..options.n)
        .flat_map(|y| std::iter::repeat_n([0.0, (k * y as f64).sin(), 0.0], 4))
        .collect();
    let field = ChannelScheme::equilibrium_field(&config, &macroscopic)?;
    let mut scheme = ChannelScheme::with_field(config, field)?;
    let samples = sample_decay(&mut scheme, options, |s| {
        let (c, sn) = fourier(&s.momentum_column(0), k);
        c.hypot(sn)
    })?;
    Ok(decay_rate(&samples) / (k * k))
}

/// Squared sound speed of the D2Q9 scheme from the zero crossings of a
/// standing density wave `ρ ∝ cos(k x)` on an n × 1 periodic grid.
pub fn measure_sound_speed_squared(rates: D2q9Rates, alpha: f64, beta: f64, options: &ModeOptions) -> Result<f64> {
    options.validate()?;
    let k = options.wavenumber();
    let config = ChannelConfig::periodic_box(options.n, 1, rates, alpha, beta);
    let macroscopic: Vec<[f64; 3]> = (0..options.n).map(|x| [(k * x as f64).cos(), 0.0, 0.0]).collect();
    let field = ChannelScheme::equilibrium_field(&config, &macroscopic)?;
    let mut scheme = ChannelScheme::with_field(config, field)?;

    let total = options.transient + options.samples * options.stride;
    let mut crossings = Vec::new();
    let mut previous = fourier(&scheme.density_row(0), k).0;
    for _ in 0..total {
        scheme.step()?;
        let current = fourier(&scheme.density_row(0), k).0;
        if previous.signum() != current.signum() && previous != 0.0 {
            let t = scheme.time() as f64 - current / (current - previous);
            crossings.push(t);
        }
        previous = current;
    }
    if crossings.len() < 3 {
        return Err(Error::ModeExhausted {
            step: scheme.time(),
            amplitude: previous.abs(),
        });
    }
    let half_period = (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
    let omega = PI / half_period;
    Ok((omega / k).powi(2))
}
