//! Experiment registry: each experiment turns a validated configuration
//! into a [`ResultTable`].

use std::fmt;
use std::str::FromStr;

use lbm_core::collision::diffusivity_from_params;
use lbm_core::experiments::{
    exact_poiseuille, find_magic_root, measure_diffusivity, measure_viscosity, predict_magic, sweep_product,
    ChannelDrive, WallMeasurement, WallProblem,
};
use lbm_core::Error;

use crate::config::{DriveKind, RunConfig, SchemeVariant};
use crate::table::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Poisson1d,
    PoiseuilleForce,
    PoiseuilleForcePop,
    PoiseuillePressure,
    Sweep,
    MagicRoot,
    Diffusivity,
    Viscosity,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Poisson1d,
        Experiment::PoiseuilleForce,
        Experiment::PoiseuilleForcePop,
        Experiment::PoiseuillePressure,
        Experiment::Sweep,
        Experiment::MagicRoot,
        Experiment::Diffusivity,
        Experiment::Viscosity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Poisson1d => "poisson-1d",
            Experiment::PoiseuilleForce => "poiseuille-force",
            Experiment::PoiseuilleForcePop => "poiseuille-force-pop",
            Experiment::PoiseuillePressure => "poiseuille-pressure",
            Experiment::Sweep => "sweep",
            Experiment::MagicRoot => "magic-root",
            Experiment::Diffusivity => "diffusivity",
            Experiment::Viscosity => "viscosity",
        }
    }

    /// The driving an experiment imposes, if any.
    fn drive(self) -> Option<DriveKind> {
        match self {
            Experiment::Poisson1d => Some(DriveKind::Source),
            Experiment::PoiseuilleForce => Some(DriveKind::ForceSplitHalf),
            Experiment::PoiseuilleForcePop => Some(DriveKind::ForcePopulation),
            Experiment::PoiseuillePressure => Some(DriveKind::Pressure),
            _ => None,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment {s:?}"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{experiment} cannot run this configuration: {reason}")]
    Incompatible { experiment: Experiment, reason: String },
    #[error("{experiment}: {source}")]
    Simulation {
        experiment: Experiment,
        #[source]
        source: Error,
    },
}

impl RunError {
    /// 2 for validation problems, 3 for runs that never settle, 4 when no
    /// wall could be located.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Incompatible { .. } => 2,
            RunError::Simulation { source, .. } => match source.root_cause() {
                Error::Config(_) | Error::Domain(_) => 2,
                Error::NonConvergence { .. } | Error::ModeExhausted { .. } | Error::UnclosedLink { .. } => 3,
                Error::TooFewPoints(_) | Error::DegenerateFit(_) | Error::WallNotLocalized(_) | Error::NoBracket { .. } => 4,
                Error::Sample { .. } => unreachable!("root_cause strips sample context"),
            },
        }
    }
}

/// Runs `experiment` on `config`. Tables are a pure function of the
/// configuration.
pub fn run_experiment(experiment: Experiment, config: &RunConfig) -> Result<ResultTable, RunError> {
    let config = resolve(experiment, config)?;
    let sim = |source: Error| RunError::Simulation { experiment, source };
    let mut table = match experiment {
        Experiment::Poisson1d
        | Experiment::PoiseuilleForce
        | Experiment::PoiseuilleForcePop
        | Experiment::PoiseuillePressure => profile(&config).map_err(sim)?,
        Experiment::Sweep => sweep(&config).map_err(sim)?,
        Experiment::MagicRoot => magic_root(&config).map_err(sim)?,
        Experiment::Diffusivity => diffusivity(&config).map_err(sim)?,
        Experiment::Viscosity => viscosity(&config).map_err(sim)?,
    };
    let mut header = ResultTable::new(&[]);
    header.set_meta("experiment", experiment);
    header.set_meta("config_hash", config.hash());
    header.set_meta("variant", config.variant.tag());
    if !matches!(experiment, Experiment::Diffusivity | Experiment::Viscosity) {
        header.set_meta("driving", config.drive_kind().tag());
    }
    header.metadata.append(&mut table.metadata);
    table.metadata = header.metadata;
    Ok(table)
}

/// Checks the scheme against the experiment and pins the driving the
/// experiment imposes.
fn resolve(experiment: Experiment, config: &RunConfig) -> Result<RunConfig, RunError> {
    let incompatible = |reason: String| RunError::Incompatible { experiment, reason };
    let wants_d1q3 = match experiment {
        Experiment::Poisson1d | Experiment::Diffusivity => Some(true),
        Experiment::Sweep | Experiment::MagicRoot => None,
        _ => Some(false),
    };
    if let Some(wants_d1q3) = wants_d1q3 {
        if wants_d1q3 != config.variant.is_d1q3() {
            let needed = if wants_d1q3 { "d1q3-a or d1q3-b" } else { "d2q9" };
            return Err(incompatible(format!(
                "scheme.variant is {} but this experiment needs {needed}",
                config.variant.tag()
            )));
        }
    }
    let mut config = config.clone();
    if let Some(kind) = experiment.drive() {
        if let Some(given) = config.drive {
            if given != kind {
                return Err(incompatible(format!(
                    "driving.kind is {} but this experiment uses {}",
                    given.tag(),
                    kind.tag()
                )));
            }
        }
        config.drive = Some(kind);
        if kind == DriveKind::Pressure {
            predict_magic(config.magic_variant()).map_err(|e| incompatible(e.to_string()))?;
        }
    }
    Ok(config)
}

fn wall_problem(config: &RunConfig) -> WallProblem {
    if config.variant.is_d1q3() {
        return WallProblem::Diffusion {
            equilibrium: config.equilibrium(),
            n: config.n,
            delta_p: config.delta_p,
        };
    }
    let drive = match config.drive_kind() {
        DriveKind::ForcePopulation => ChannelDrive::Population { fx: config.fx },
        DriveKind::Pressure => ChannelDrive::Pressure {
            delta_p: config.delta_p,
        },
        _ => ChannelDrive::SplitHalf { fx: config.fx },
    };
    WallProblem::Channel {
        nx: config.nx,
        ny: config.ny,
        alpha: config.alpha,
        beta: config.beta,
        s3: config.rates.s3,
        s4: config.rates.s4,
        drive,
    }
}

fn grid(config: &RunConfig) -> String {
    if config.variant.is_d1q3() {
        format!("n={}", config.n)
    } else {
        format!("nx={},ny={}", config.nx, config.ny)
    }
}

fn fit_window(config: &RunConfig) -> String {
    if config.variant.is_d1q3() {
        format!("all {} nodes", config.n)
    } else {
        format!("column x={}, all {} rows", config.nx / 2, config.ny)
    }
}

fn common_meta(table: &mut ResultTable, config: &RunConfig) -> Result<(), Error> {
    table.set_meta("predictor", predict_magic(config.magic_variant())?);
    table.set_meta("grid", grid(config));
    table.set_meta("fit_window", fit_window(config));
    Ok(())
}

fn measurement_meta(table: &mut ResultTable, m: &WallMeasurement) {
    let [a0, a1, a2] = m.fit.coefficients();
    table.set_meta("steps", m.steps);
    table.set_meta("delta_q_low", format!("{:.16e}", m.low.delta_q));
    table.set_meta("delta_q_high", format!("{:.16e}", m.high.delta_q));
    table.set_meta("delta_q", format!("{:.16e}", m.delta_q()));
    table.set_meta("fit_coefficients", format!("{a0:.16e} {a1:.16e} {a2:.16e}"));
    table.set_meta("fit_residual", format!("{:.3e}", m.fit.residual));
}

/// Steady profile across the walls with its parabola fit.
fn profile(config: &RunConfig) -> Result<ResultTable, Error> {
    let problem = wall_problem(config);
    let (first, second) = if config.variant.is_d1q3() {
        config.rates.d1q3_sigmas()
    } else {
        config.rates.d2q9_sigmas()
    };
    let pair = lbm_core::experiments::SigmaPair::new(first, second);
    let m = problem.measure(pair, &config.steady)?;
    let (a, b) = problem.pair_names();

    let kind = config.drive_kind();
    let exact = matches!(kind, DriveKind::ForceSplitHalf | DriveKind::ForcePopulation);
    let mut table = if config.variant.is_d1q3() {
        ResultTable::new(&[("x", "dx"), ("density", "lattice"), ("fit", "lattice")])
    } else if exact {
        ResultTable::new(&[("y", "dx"), ("momentum_x", "lattice"), ("fit", "lattice"), ("exact", "lattice")])
    } else {
        ResultTable::new(&[("y", "dx"), ("momentum_x", "lattice"), ("fit", "lattice")])
    };
    common_meta(&mut table, config)?;
    table.set_meta(a, first);
    table.set_meta(b, second);
    table.set_meta("product", pair.product());
    measurement_meta(&mut table, &m);
    // Walls half a cell outside the first and last rows.
    let nu = second / 3.0;
    let height = config.ny as f64;
    for (x, u) in m.positions.iter().zip(&m.profile) {
        let mut row = vec![x * config.dx, *u, m.fit.eval(*x)];
        if exact && !config.variant.is_d1q3() {
            row.push(exact_poiseuille(config.fx, nu, height, x + 0.5));
        }
        table.push_row(row);
    }
    Ok(table)
}

fn sweep(config: &RunConfig) -> Result<ResultTable, Error> {
    let problem = wall_problem(config);
    let pairs: Vec<_> = config
        .sweep
        .products
        .iter()
        .map(|&p| problem.pair_for_product(p, config.sweep.transport_sigma))
        .collect();
    let result = sweep_product(&problem, &pairs, &config.steady)?;
    let (a, b) = problem.pair_names();
    let mut table = ResultTable::new(&[(a, "1"), (b, "1"), ("product", "1"), ("delta_q_over_dx", "1")]);
    common_meta(&mut table, config)?;
    table.set_meta("transport_sigma", config.sweep.transport_sigma);
    table.set_meta(
        "root_interpolated",
        result.root.map_or("none".to_string(), |r| format!("{r:.16e}")),
    );
    table.set_meta("sign_changes", result.brackets().len());
    for s in &result.samples {
        table.push_row(vec![s.pair.first, s.pair.second, s.product, s.delta_q]);
    }
    Ok(table)
}

fn magic_root(config: &RunConfig) -> Result<ResultTable, Error> {
    let problem = wall_problem(config);
    let root = find_magic_root(&problem, config.sweep.bracket, &config.sweep.root_options(), &config.steady)?;
    let mut table = ResultTable::new(&[
        ("product", "1"),
        ("delta_q_over_dx", "1"),
        ("bracket_low", "1"),
        ("bracket_high", "1"),
        ("evaluations", "1"),
    ]);
    common_meta(&mut table, config)?;
    table.set_meta("transport_sigma", config.sweep.transport_sigma);
    table.set_meta("tolerance", config.sweep.tolerance);
    table.push_row(vec![
        root.product,
        root.delta_q,
        root.bracket.0,
        root.bracket.1,
        root.evaluations as f64,
    ]);
    Ok(table)
}

fn mode_meta(table: &mut ResultTable, config: &RunConfig) {
    let m = &config.mode;
    table.set_meta("mode", format!("n={} k_index={} transient={} samples={} stride={}", m.n, m.mode, m.transient, m.samples, m.stride));
}

fn diffusivity(config: &RunConfig) -> Result<ResultTable, Error> {
    let (sigma1, sigma2) = config.rates.d1q3_sigmas();
    let equilibrium = config.equilibrium();
    let scale = config.dx * config.dx / config.dt;
    let measured = measure_diffusivity(equilibrium, sigma1, sigma2, &config.mode)? * scale;
    let predicted = diffusivity_from_params(sigma1, &equilibrium, 1.0, 1.0)? * scale;
    let mut table = ResultTable::new(&[
        ("sigma1", "1"),
        ("sigma2", "1"),
        ("kappa_measured", "dx^2/dt"),
        ("kappa_predicted", "dx^2/dt"),
        ("relative_error", "1"),
    ]);
    table.set_meta("grid", format!("n={} periodic", config.mode.n));
    mode_meta(&mut table, config);
    table.push_row(vec![sigma1, sigma2, measured, predicted, measured / predicted - 1.0]);
    Ok(table)
}

fn viscosity(config: &RunConfig) -> Result<ResultTable, Error> {
    let (sigma5, sigma8) = config.rates.d2q9_sigmas();
    let scale = config.dx * config.dx / config.dt;
    let measured = measure_viscosity(config.rates.d2q9(), config.alpha, config.beta, &config.mode)? * scale;
    let predicted = sigma8 / 3.0 * scale;
    let mut table = ResultTable::new(&[
        ("sigma5", "1"),
        ("sigma8", "1"),
        ("nu_measured", "dx^2/dt"),
        ("nu_predicted", "dx^2/dt"),
        ("relative_error", "1"),
    ]);
    table.set_meta("grid", format!("4x{} periodic", config.mode.n));
    mode_meta(&mut table, config);
    table.push_row(vec![sigma5, sigma8, measured, predicted, measured / predicted - 1.0]);
    Ok(table)
}

/// Plot figure matching a sweep of `variant`.
pub fn figure_for(variant: SchemeVariant) -> crate::plot::Figure {
    if variant.is_d1q3() {
        crate::plot::Figure::Fig2
    } else {
        crate::plot::Figure::Fig4
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("fig9".parse::<Experiment>().is_err());
    }

    #[test]
    fn scheme_mismatch_is_a_validation_failure() {
        let config = RunConfig::default();
        let err = run_experiment(Experiment::PoiseuilleForce, &config).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let config = parse_config("[scheme]\nvariant = \"d2q9\"\n[driving]\nkind = \"pressure\"\n", "c").unwrap();
        let err = run_experiment(Experiment::PoiseuilleForcePop, &config).unwrap_err();
        assert!(matches!(err, RunError::Incompatible { .. }));
    }

    #[test]
    fn exit_codes_follow_the_root_cause() {
        let code = |source: Error| {
            RunError::Simulation {
                experiment: Experiment::Sweep,
                source: source.in_context("sample"),
            }
            .exit_code()
        };
        assert_eq!(code(Error::NonConvergence { steps: 1, change: 1.0 }), 3);
        assert_eq!(code(Error::WallNotLocalized("x".into())), 4);
        assert_eq!(code(Error::NoBracket { lo: 0.1, hi: 0.2 }), 4);
        assert_eq!(code(Error::Config("x".into())), 2);
    }

    #[test]
    fn poisson_profile_table() {
        let config = parse_config("[grid]\nn = 12\n[relaxation]\ns1 = 1.0\ns2 = 1.3333333333333333\n", "c").unwrap();
        let table = run_experiment(Experiment::Poisson1d, &config).unwrap();
        assert_eq!(table.column_names(), ["x", "density", "fit"]);
        assert_eq!(table.rows.len(), 12);
        assert_eq!(table.meta("experiment"), Some("poisson-1d"));
        assert_eq!(table.meta("predictor"), Some("0.125"));
        // σ1σ2 = 0.5 · 0.125 sits on the magic product.
        let dq: f64 = table.meta("delta_q").unwrap().parse().unwrap();
        assert!((dq - 0.5).abs() < 1e-9, "{dq}");
    }

    #[test]
    fn sweep_schema_for_d1q3() {
        let config = parse_config("[grid]\nn = 12\n[sweep]\nproducts = [0.1, 0.15]\n", "c").unwrap();
        let table = run_experiment(Experiment::Sweep, &config).unwrap();
        assert_eq!(table.column_names(), ["sigma1", "sigma2", "product", "delta_q_over_dx"]);
        assert_eq!(table.meta("sign_changes"), Some("1"));
    }
}
