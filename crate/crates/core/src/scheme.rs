//! Time stepping of the D1Q3 diffusion and D2Q9 Stokes schemes.
//!
//! Each step runs, node by node: moments, pre-collision half source or
//! force, equilibria, relaxation, post-collision half source or force, back
//! to populations; then streaming with the boundary closures. All runs are
//! carried out in lattice units (Δx = Δt = λ = 1); the physical steps in the
//! configuration only scale reported coordinates.

use crate::boundary::{BoundaryClosure, Face, Topology};
use crate::collision::{
    apply_diffusion_source, apply_force_population, apply_force_split_half, equilibrium_d1q3,
    equilibrium_d2q9, relax, sound_speed_squared, D2q9Rates, DrivingSpec, EquilibriumParams,
    HalfStepTracker, Phase, RelaxationSettings,
};
use crate::error::{Error, Result};
use crate::lattice::{
    build_d1q3_basis, build_d2q9_basis, stream, D1q3Basis, GridShape, LatticeSpec, MomentBasis,
    PopulationField,
};

/// A scheme that can be advanced one time step at a time.
pub trait Evolve {
    fn step(&mut self) -> Result<()>;

    /// All populations, node-major.
    fn populations(&self) -> &[f64];

    /// Steps taken since construction.
    fn time(&self) -> usize;
}

/// D1Q3 diffusion problem on a segment of `n` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionConfig {
    pub n: usize,
    /// Physical steps; the run itself uses lattice units.
    pub units: LatticeSpec<3>,
    pub relaxation: RelaxationSettings<3>,
    pub equilibrium: EquilibriumParams,
    pub driving: DrivingSpec,
    pub topology: Topology,
}

impl DiffusionConfig {
    /// Poisson problem: uniform source, anti-bounce-back at both ends.
    pub fn poisson(n: usize, equilibrium: EquilibriumParams, sigma1: f64, sigma2: f64, delta_p: f64) -> Result<Self> {
        Ok(Self {
            n,
            units: LatticeSpec::d1q3_unit(),
            relaxation: RelaxationSettings::d1q3_from_sigmas(sigma1, sigma2)?,
            equilibrium,
            driving: DrivingSpec::DiffusionSource { delta_p },
            topology: Topology::anti_bounce_back_segment(),
        })
    }

    pub fn validate(&self) -> Result<D1q3Basis> {
        if self.n < 2 {
            return Err(Error::Config(format!("segment needs at least 2 nodes, got {}", self.n)));
        }
        self.equilibrium.validate()?;
        let basis = self
            .equilibrium
            .d1q3_basis()
            .ok_or_else(|| Error::Config("D1Q3 scheme needs D1Q3 equilibrium parameters".into()))?;
        match self.driving {
            DrivingSpec::None | DrivingSpec::DiffusionSource { .. } => Ok(basis),
            other => Err(Error::Config(format!("{other:?} cannot drive a D1Q3 scheme"))),
        }
    }
}

/// Stepper for [`DiffusionConfig`].
#[derive(Debug, Clone)]
pub struct DiffusionScheme {
    config: DiffusionConfig,
    basis_kind: D1q3Basis,
    basis: MomentBasis<3>,
    lattice: LatticeSpec<3>,
    field: PopulationField<3>,
    time: usize,
}

impl DiffusionScheme {
    /// Starts from `f = 0`.
    pub fn new(config: DiffusionConfig) -> Result<Self> {
        let field = PopulationField::zeros(GridShape::line(config.n));
        Self::with_field(config, field)
    }

    pub fn with_field(config: DiffusionConfig, field: PopulationField<3>) -> Result<Self> {
        let basis_kind = config.validate()?;
        if field.shape() != GridShape::line(config.n) {
            return Err(Error::Config("initial field does not match the segment".into()));
        }
        let lattice = LatticeSpec::d1q3_unit();
        Ok(Self {
            basis: build_d1q3_basis(basis_kind, lattice.lambda())?,
            basis_kind,
            lattice,
            config,
            field,
            time: 0,
        })
    }

    /// Populations at equilibrium with the given density profile.
    pub fn equilibrium_field(config: &DiffusionConfig, density: &[f64]) -> Result<PopulationField<3>> {
        let basis_kind = config.validate()?;
        let basis = build_d1q3_basis(basis_kind, 1.0)?;
        let nodes = density
            .iter()
            .map(|&rho| {
                equilibrium_d1q3(&[rho, 0.0, 0.0], &config.equilibrium, basis_kind, 1.0)
                    .map(|m| basis.populations(&m))
            })
            .collect::<Result<Vec<_>>>()?;
        PopulationField::from_nodes(GridShape::line(config.n), nodes)
    }

    pub fn config(&self) -> &DiffusionConfig {
        &self.config
    }

    pub fn basis(&self) -> &MomentBasis<3> {
        &self.basis
    }

    pub fn field(&self) -> &PopulationField<3> {
        &self.field
    }

    /// Conserved density `m0` after streaming.
    pub fn density(&self) -> Vec<f64> {
        self.field.nodes().iter().map(|f| self.basis.moments(f)[0]).collect()
    }

    /// Density as seen by the equilibria: `m0 + δp/2`.
    pub fn centred_density(&self) -> Vec<f64> {
        let half = 0.5 * self.source();
        self.density().into_iter().map(|rho| rho + half).collect()
    }

    fn source(&self) -> f64 {
        match self.config.driving {
            DrivingSpec::DiffusionSource { delta_p } => delta_p,
            _ => 0.0,
        }
    }
}

impl Evolve for DiffusionScheme {
    fn step(&mut self) -> Result<()> {
        let source = self.source();
        let params = self.config.equilibrium;
        let lambda = self.lattice.lambda();
        for node in self.field.nodes_mut() {
            let mut tracker = HalfStepTracker::default();
            let mut m = self.basis.moments(node);
            apply_diffusion_source(&mut m, source, Phase::Pre, &mut tracker);
            let m_eq = equilibrium_d1q3(&m, &params, self.basis_kind, lambda)?;
            let mut post = relax(&m, &m_eq, &self.config.relaxation);
            apply_diffusion_source(&mut post, source, Phase::Post, &mut tracker);
            *node = self.basis.populations(&post);
        }
        stream(&mut self.field, &self.lattice, &self.config.topology)?;
        self.time += 1;
        Ok(())
    }

    fn populations(&self) -> &[f64] {
        self.field.nodes().as_flattened()
    }

    fn time(&self) -> usize {
        self.time
    }
}

/// D2Q9 Stokes problem on an `nx × ny` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub shape: GridShape,
    pub units: LatticeSpec<9>,
    pub rates: D2q9Rates,
    pub alpha: f64,
    pub beta: f64,
    pub driving: DrivingSpec,
    pub topology: Topology,
}

impl ChannelConfig {
    /// Channel with bounce-back walls and periodic ends, driven by a body force.
    pub fn force_driven(nx: usize, ny: usize, rates: D2q9Rates, alpha: f64, beta: f64, driving: DrivingSpec) -> Self {
        Self {
            shape: GridShape::plane(nx, ny),
            units: LatticeSpec::d2q9_unit(),
            rates,
            alpha,
            beta,
            driving,
            topology: Topology::channel(
                BoundaryClosure::periodic(Face::West),
                BoundaryClosure::periodic(Face::East),
            ),
        }
    }

    /// Channel with bounce-back walls and pressure anti-bounce-back ends
    /// imposing the density drop `δρ = δp / c_s²`, `c_s² = (4 + α)/6`.
    pub fn pressure_driven(nx: usize, ny: usize, rates: D2q9Rates, alpha: f64, beta: f64, delta_p: f64) -> Result<Self> {
        let cs2 = sound_speed_squared(alpha, 1.0);
        if !(cs2 > 0.0) {
            return Err(Error::Config(format!(
                "alpha = {alpha} gives a non-positive squared sound speed"
            )));
        }
        let delta_rho = delta_p / cs2;
        Ok(Self {
            shape: GridShape::plane(nx, ny),
            units: LatticeSpec::d2q9_unit(),
            rates,
            alpha,
            beta,
            driving: DrivingSpec::PressureDrop { delta_p },
            topology: Topology::channel(
                BoundaryClosure::pressure(Face::West, delta_rho, alpha, beta)?,
                BoundaryClosure::pressure(Face::East, delta_rho, alpha, beta)?,
            ),
        })
    }

    /// Doubly periodic box without driving.
    pub fn periodic_box(nx: usize, ny: usize, rates: D2q9Rates, alpha: f64, beta: f64) -> Self {
        Self {
            shape: GridShape::plane(nx, ny),
            units: LatticeSpec::d2q9_unit(),
            rates,
            alpha,
            beta,
            driving: DrivingSpec::None,
            topology: Topology::periodic(),
        }
    }

    pub fn validate(&self) -> Result<RelaxationSettings<9>> {
        if self.shape.nx == 0 || self.shape.ny == 0 {
            return Err(Error::Config("grid must not be empty".into()));
        }
        EquilibriumParams::D2q9 {
            alpha: self.alpha,
            beta: self.beta,
        }
        .validate()?;
        if matches!(self.driving, DrivingSpec::DiffusionSource { .. }) {
            return Err(Error::Config("a density source cannot drive the D2Q9 scheme".into()));
        }
        RelaxationSettings::d2q9(self.rates)
    }
}

/// Stepper for [`ChannelConfig`].
#[derive(Debug, Clone)]
pub struct ChannelScheme {
    config: ChannelConfig,
    relaxation: RelaxationSettings<9>,
    basis: MomentBasis<9>,
    lattice: LatticeSpec<9>,
    field: PopulationField<9>,
    time: usize,
}

impl ChannelScheme {
    pub fn new(config: ChannelConfig) -> Result<Self> {
        let field = PopulationField::zeros(config.shape);
        Self::with_field(config, field)
    }

    pub fn with_field(config: ChannelConfig, field: PopulationField<9>) -> Result<Self> {
        let relaxation = config.validate()?;
        if field.shape() != config.shape {
            return Err(Error::Config("initial field does not match the grid".into()));
        }
        let lattice = LatticeSpec::d2q9_unit();
        Ok(Self {
            basis: build_d2q9_basis(lattice.lambda())?,
            relaxation,
            lattice,
            config,
            field,
            time: 0,
        })
    }

    /// Populations at equilibrium with the given `(ρ, j_x, j_y)` per node.
    pub fn equilibrium_field(config: &ChannelConfig, macroscopic: &[[f64; 3]]) -> Result<PopulationField<9>> {
        let basis = build_d2q9_basis(1.0)?;
        let nodes = macroscopic
            .iter()
            .map(|&[rho, jx, jy]| {
                let m = equilibrium_d2q9(&[rho, jx, jy, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], config.alpha, config.beta, 1.0);
                basis.populations(&m)
            })
            .collect();
        PopulationField::from_nodes(config.shape, nodes)
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    pub fn basis(&self) -> &MomentBasis<9> {
        &self.basis
    }

    pub fn field(&self) -> &PopulationField<9> {
        &self.field
    }

    /// Moments `m = M f` at node `(x, y)`.
    pub fn moments_at(&self, x: usize, y: usize) -> [f64; 9] {
        self.basis.moments(self.field.node(x, y))
    }

    /// Time-centred longitudinal momentum `j_x + Δt F_x / 2` along column `x`.
    pub fn momentum_column(&self, x: usize) -> Vec<f64> {
        let half = self.config.driving.half_impulse(1.0);
        (0..self.config.shape.ny)
            .map(|y| self.moments_at(x, y)[1] + half)
            .collect()
    }

    /// Density along row `y`.
    pub fn density_row(&self, y: usize) -> Vec<f64> {
        (0..self.config.shape.nx).map(|x| self.moments_at(x, y)[0]).collect()
    }
}

impl Evolve for ChannelScheme {
    fn step(&mut self) -> Result<()> {
        let (alpha, beta) = (self.config.alpha, self.config.beta);
        let lambda = self.lattice.lambda();
        let dt = self.lattice.dt();
        let driving = self.config.driving;
        for node in self.field.nodes_mut() {
            let mut tracker = HalfStepTracker::default();
            let mut m = self.basis.moments(node);
            if let DrivingSpec::ForceSplitHalf { fx } = driving {
                apply_force_split_half(&mut m, fx, dt, Phase::Pre, &mut tracker);
            }
            let m_eq = equilibrium_d2q9(&m, alpha, beta, lambda);
            let mut post = relax(&m, &m_eq, &self.relaxation);
            match driving {
                DrivingSpec::ForceSplitHalf { fx } => {
                    apply_force_split_half(&mut post, fx, dt, Phase::Post, &mut tracker)
                }
                DrivingSpec::ForcePopulation { fx } => apply_force_population(&mut post, fx, lambda),
                _ => {}
            }
            *node = self.basis.populations(&post);
        }
        stream(&mut self.field, &self.lattice, &self.config.topology)?;
        self.time += 1;
        Ok(())
    }

    fn populations(&self) -> &[f64] {
        self.field.nodes().as_flattened()
    }

    fn time(&self) -> usize {
        self.time
    }
}
