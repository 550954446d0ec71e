//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p lbm-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use lbm_core::boundary::{BoundaryClosure, Face, Topology};
use lbm_core::collision::{
    equilibrium_d1q3, equilibrium_d2q9, relax, D2q9Rates, EquilibriumParams, RelaxationSettings,
};
use lbm_core::experiments::{
    exact_poiseuille, exact_poisson_1d, find_magic_root, fit_parabola, measure_diffusivity, measure_viscosity,
    predict_magic, ChannelDrive, ModeOptions, RootOptions, SigmaPair, SteadyStateCriterion, WallProblem,
};
use lbm_core::lattice::{build_d1q3_basis, build_d2q9_basis, stream, D1q3Basis, GridShape, LatticeSpec, PopulationField};
use lbm_core::scheme::{ChannelConfig, ChannelScheme, DiffusionConfig, DiffusionScheme, Evolve};
use lbm_core::Result;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const ZETA: f64 = 1.0 / 3.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn diffusion_a() -> WallProblem {
    WallProblem::poisson(EquilibriumParams::D1q3A { zeta: ZETA })
}

fn diffusion_b() -> WallProblem {
    WallProblem::poisson(EquilibriumParams::D1q3B { zeta_tilde: 1.0 })
}

fn pressure(alpha: f64, beta: f64) -> WallProblem {
    match WallProblem::channel(ChannelDrive::Pressure { delta_p: 1e-4 }) {
        WallProblem::Channel { nx, ny, s3, s4, drive, .. } => WallProblem::Channel {
            nx,
            ny,
            alpha,
            beta,
            s3,
            s4,
            drive,
        },
        other => other,
    }
}

/// Root of Δq − 1/2 compared with `expected` and with the closed-form
/// prediction.
fn crossing(problem: &WallProblem, bracket: (f64, f64), expected: f64, tol: f64) -> Result<Outcome> {
    let root = find_magic_root(problem, bracket, &RootOptions::default(), &SteadyStateCriterion::default())?;
    let predicted = predict_magic(problem.variant()?)?;
    let off = (root.delta_q - 0.5).abs();
    let pass = (root.product - expected).abs() < tol && (root.product - predicted).abs() < tol && off < 1e-4;
    Ok(check(
        pass,
        format!(
            "root {:.6} (expected {expected} ± {tol}, predicted {predicted:.6}), |dq - 1/2| = {off:.2e} at root, {} runs",
            root.product, root.evaluations
        ),
    ))
}

fn criterion_1() -> Result<Outcome> {
    crossing(&diffusion_a(), (0.05, 0.3), 0.125, 1e-3)
}

fn criterion_2() -> Result<Outcome> {
    crossing(&diffusion_b(), (0.2, 0.6), 0.375, 1e-3)
}

fn criterion_3() -> Result<Outcome> {
    crossing(&WallProblem::channel(ChannelDrive::SplitHalf { fx: 1e-6 }), (0.25, 0.5), 0.375, 1e-3)
}

fn criterion_4() -> Result<Outcome> {
    crossing(&WallProblem::channel(ChannelDrive::Population { fx: 1e-6 }), (0.1, 0.3), 0.1875, 1e-3)
}

fn criterion_5() -> Result<Outcome> {
    let a = crossing(&pressure(-2.0, 1.0), (0.1, 0.3), 0.1875, 2e-3)?;
    let b = crossing(&pressure(-2.5, 2.5), (0.25, 0.5), 0.375, 2e-3)?;
    Ok(check(
        a.pass && b.pass,
        format!("(-2, 1): {}; (-2.5, 2.5): {}", a.detail, b.detail),
    ))
}

fn criterion_6() -> Result<Outcome> {
    let criterion = SteadyStateCriterion::default();
    let cases: [(&str, WallProblem, SigmaPair, SigmaPair); 6] = [
        ("diffusion-A", diffusion_a(), SigmaPair::new(0.5, 0.25), SigmaPair::new(0.25, 0.5)),
        ("diffusion-B", diffusion_b(), SigmaPair::new(0.5, 0.75), SigmaPair::new(0.75, 0.5)),
        (
            "force-split-half",
            WallProblem::channel(ChannelDrive::SplitHalf { fx: 1e-6 }),
            SigmaPair::new(0.75, 0.5),
            SigmaPair::new(0.5, 0.75),
        ),
        (
            "force-population",
            WallProblem::channel(ChannelDrive::Population { fx: 1e-6 }),
            SigmaPair::new(0.375, 0.5),
            SigmaPair::new(0.5, 0.375),
        ),
        ("pressure(-2,1)", pressure(-2.0, 1.0), SigmaPair::new(0.375, 0.5), SigmaPair::new(0.5, 0.375)),
        ("pressure(-2.5,2.5)", pressure(-2.5, 2.5), SigmaPair::new(0.75, 0.5), SigmaPair::new(0.5, 0.75)),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, problem, p, q) in cases {
        let d1 = problem.measure(p, &criterion)?.delta_q();
        let d2 = problem.measure(q, &criterion)?.delta_q();
        let diff = (d1 - d2).abs();
        pass &= diff < 1e-6;
        parts.push(format!("{name} {diff:.2e}"));
    }
    Ok(check(pass, format!("|ddq| per scheme (< 1e-6): {}", parts.join(", "))))
}

fn criterion_7() -> Result<Outcome> {
    let options = ModeOptions::default();
    let kappa_a = measure_diffusivity(EquilibriumParams::D1q3A { zeta: ZETA }, 1.0, 0.5, &options)?;
    let kappa_b = measure_diffusivity(EquilibriumParams::D1q3B { zeta_tilde: 1.0 }, 1.0, 0.5, &options)?;
    let sigma8 = 0.5;
    let rates = D2q9Rates::from_sigmas(0.5, sigma8);
    let nu = measure_viscosity(rates, -2.0, 1.0, &options)?;
    let ea = (kappa_a / ZETA - 1.0).abs();
    let eb = (kappa_b - 1.0).abs();
    let en = (nu / (sigma8 / 3.0) - 1.0).abs();
    Ok(check(
        ea < 0.02 && eb < 0.02 && en < 0.02,
        format!(
            "kappa_A {kappa_a:.6} (err {:.3}%), kappa_B {kappa_b:.6} (err {:.3}%), nu {nu:.6} (err {:.3}%), tol 2%",
            100.0 * ea,
            100.0 * eb,
            100.0 * en
        ),
    ))
}

fn criterion_8() -> Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut failures = Vec::new();

    // Basis round trip.
    let mut worst = 0.0_f64;
    for lambda in [1.0, 2.0, 1.0 / 3.0] {
        for variant in [D1q3Basis::A, D1q3Basis::B] {
            let basis = build_d1q3_basis(variant, lambda)?;
            for _ in 0..200 {
                let f: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
                let back = basis.populations(&basis.moments(&f));
                worst = worst.max(f.iter().zip(back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            }
        }
        let basis = build_d2q9_basis(lambda)?;
        for _ in 0..200 {
            let f: [f64; 9] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let back = basis.populations(&basis.moments(&f));
            worst = worst.max(f.iter().zip(back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
    }
    if worst >= 1e-13 {
        failures.push(format!("basis round trip {worst:.2e}"));
    }

    // Periodic streaming permutes values: the sorted multiset per direction
    // is unchanged, and lcm(nx, ny) = 20 steps return the field.
    let shape = GridShape::plane(5, 4);
    let nodes: Vec<[f64; 9]> = (0..shape.len())
        .map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
        .collect();
    let mut f = PopulationField::from_nodes(shape, nodes.clone())?;
    stream(&mut f, &LatticeSpec::d2q9_unit(), &Topology::periodic())?;
    for j in 0..9 {
        let mut a: Vec<f64> = nodes.iter().map(|n| n[j]).collect();
        let mut b: Vec<f64> = f.nodes().iter().map(|n| n[j]).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        if a != b {
            failures.push(format!("streaming is not a permutation in direction {j}"));
        }
    }
    for _ in 1..20 {
        stream(&mut f, &LatticeSpec::d2q9_unit(), &Topology::periodic())?;
    }
    if f.nodes() != nodes.as_slice() {
        failures.push("20 periodic steps on a 5 x 4 grid do not return the field".into());
    }

    // Conserved moments pass through collision bit-exactly.
    let settings9 = RelaxationSettings::d2q9(D2q9Rates::from_sigmas(0.3, 0.9))?;
    let settings3 = RelaxationSettings::d1q3_from_sigmas(0.7, 0.2)?;
    for _ in 0..1000 {
        let m: [f64; 9] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let out = relax(&m, &equilibrium_d2q9(&m, -2.0, 1.0, 1.0), &settings9);
        if out[0].to_bits() != m[0].to_bits() || out[1].to_bits() != m[1].to_bits() || out[2].to_bits() != m[2].to_bits() {
            failures.push("D2Q9 collision changed a conserved moment".into());
            break;
        }
        let m3: [f64; 3] = [m[0], m[1], m[2]];
        let eq = equilibrium_d1q3(&m3, &EquilibriumParams::D1q3A { zeta: ZETA }, D1q3Basis::A, 1.0)?;
        if relax(&m3, &eq, &settings3)[0].to_bits() != m3[0].to_bits() {
            failures.push("D1Q3 collision changed the density".into());
            break;
        }
    }

    // Rest equilibria stay put under every closure.
    let rates = D2q9Rates::from_sigmas(0.3, 0.7);
    let mut rest_drift = 0.0_f64;
    let mut drift = |mut scheme: Box<dyn Evolve>| -> Result<()> {
        let before = scheme.populations().to_vec();
        for _ in 0..50 {
            scheme.step()?;
        }
        rest_drift = rest_drift.max(
            before
                .iter()
                .zip(scheme.populations())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
        Ok(())
    };
    let walls = ChannelConfig::force_driven(6, 5, rates, -2.0, 1.0, lbm_core::DrivingSpec::None);
    let field = ChannelScheme::equilibrium_field(&walls, &vec![[1.0, 0.0, 0.0]; 30])?;
    drift(Box::new(ChannelScheme::with_field(walls, field)?))?;
    drift(Box::new(ChannelScheme::new(ChannelConfig::pressure_driven(6, 5, rates, -2.0, 1.0, 0.0)?)?))?;
    let periodic = ChannelConfig::periodic_box(4, 4, rates, -2.5, 2.5);
    let field = ChannelScheme::equilibrium_field(&periodic, &vec![[0.8, 0.0, 0.0]; 16])?;
    drift(Box::new(ChannelScheme::with_field(periodic, field)?))?;
    let mut segment = DiffusionConfig::poisson(8, EquilibriumParams::D1q3B { zeta_tilde: 1.0 }, 0.5, 0.5, 0.0)?;
    segment.driving = lbm_core::DrivingSpec::None;
    drift(Box::new(DiffusionScheme::new(segment)?))?;
    let ring = DiffusionConfig {
        topology: Topology::new(&[BoundaryClosure::periodic(Face::West), BoundaryClosure::periodic(Face::East)])?,
        ..DiffusionConfig::poisson(8, EquilibriumParams::D1q3A { zeta: ZETA }, 0.5, 0.5, 0.0)?
    };
    let ring = DiffusionConfig {
        driving: lbm_core::DrivingSpec::None,
        ..ring
    };
    let field = DiffusionScheme::equilibrium_field(&ring, &[0.6; 8])?;
    drift(Box::new(DiffusionScheme::with_field(ring, field)?))?;
    if rest_drift > 1e-14 {
        failures.push(format!("rest state drifted by {rest_drift:.2e}"));
    }

    // Parabola fits to exact solutions recover the walls.
    let xs: Vec<f64> = (1..32).map(|i| i as f64 / 32.0).collect();
    let us: Vec<f64> = xs.iter().map(|&x| exact_poisson_1d(1e-3, 0.4, x)).collect();
    let [r0, r1] = fit_parabola(&xs, &us)?.roots().unwrap_or([f64::NAN; 2]);
    let ys: Vec<f64> = (1..21).map(|j| j as f64 * 0.05).collect();
    let vs: Vec<f64> = ys.iter().map(|&y| exact_poiseuille(1e-6, 1.0 / 6.0, 1.05, y)).collect();
    let [w0, w1] = fit_parabola(&ys, &vs)?.roots().unwrap_or([f64::NAN; 2]);
    let root_err = [r0.abs(), (r1 - 1.0).abs(), w0.abs(), (w1 - 1.05).abs()]
        .into_iter()
        .fold(0.0, f64::max);
    if !(root_err < 1e-12) {
        failures.push(format!("fit root error {root_err:.2e}"));
    }

    let summary = format!(
        "round trip {worst:.2e}, rest drift {rest_drift:.2e}, fit root error {root_err:.2e}"
    );
    Ok(if failures.is_empty() {
        check(true, summary)
    } else {
        check(false, format!("{summary}; {}", failures.join("; ")))
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 8] = [
        ("diffusion basis A crossing at 1/8", criterion_1),
        ("diffusion basis B crossing at 3/8", criterion_2),
        ("split-half force crossing at 3/8", criterion_3),
        ("population force crossing at 3/16", criterion_4),
        ("pressure-driven crossings", criterion_5),
        ("product-only dependence", criterion_6),
        ("transport coefficients", criterion_7),
        ("property suite", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| check(false, format!("error: {e}")));
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{status} {}. {name}: {} [{:.1}s]",
            i + 1,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
