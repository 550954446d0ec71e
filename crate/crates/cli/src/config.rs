//! Run configuration.
//!
//! The surface syntax is TOML restricted to flat sections of scalar or
//! array values:
//!
//! ```toml
//! [scheme]
//! variant = "d2q9"          # "d1q3-a", "d1q3-b" or "d2q9"
//!
//! [grid]
//! nx = 100
//! ny = 21
//!
//! [relaxation]
//! s5 = 1.25
//! s8 = 1.0
//!
//! [driving]
//! kind = "pressure"         # "source", "force-split-half", "force-population", "pressure"
//! delta_p = 1e-4
//! ```
//!
//! Every key has a default, so an empty document is a valid D1Q3 basis A
//! Poisson run. Driving magnitudes (`fx`, `delta_p`) are in lattice units;
//! `dx` and `dt` only scale reported positions and transport coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use lbm_core::collision::{sigma_from_rate, D2q9Rates, EquilibriumParams};
use lbm_core::experiments::{predict_magic, MagicVariant, ModeOptions, RootOptions, SteadyStateCriterion};
use sha2::{Digest, Sha256};
use toml::de::{DeTable, DeValue};
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeVariant {
    D1q3A,
    D1q3B,
    D2q9,
}

impl SchemeVariant {
    pub fn tag(self) -> &'static str {
        match self {
            SchemeVariant::D1q3A => "d1q3-a",
            SchemeVariant::D1q3B => "d1q3-b",
            SchemeVariant::D2q9 => "d2q9",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        [SchemeVariant::D1q3A, SchemeVariant::D1q3B, SchemeVariant::D2q9]
            .into_iter()
            .find(|v| v.tag() == tag)
    }

    pub fn is_d1q3(self) -> bool {
        !matches!(self, SchemeVariant::D2q9)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveKind {
    /// Uniform density source of the D1Q3 Poisson problem.
    Source,
    ForceSplitHalf,
    ForcePopulation,
    Pressure,
}

impl DriveKind {
    pub fn tag(self) -> &'static str {
        match self {
            DriveKind::Source => "source",
            DriveKind::ForceSplitHalf => "force-split-half",
            DriveKind::ForcePopulation => "force-population",
            DriveKind::Pressure => "pressure",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        [DriveKind::Source, DriveKind::ForceSplitHalf, DriveKind::ForcePopulation, DriveKind::Pressure]
            .into_iter()
            .find(|v| v.tag() == tag)
    }

    fn default_for(variant: SchemeVariant) -> Self {
        if variant.is_d1q3() {
            DriveKind::Source
        } else {
            DriveKind::ForceSplitHalf
        }
    }
}

/// Relaxation rates. D1Q3 runs read `s1`, `s2`; D2Q9 runs read the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub s5: f64,
    pub s8: f64,
}

impl Rates {
    pub fn d2q9(&self) -> D2q9Rates {
        D2q9Rates {
            s3: self.s3,
            s4: self.s4,
            s5: self.s5,
            s8: self.s8,
        }
    }

    pub fn d1q3_sigmas(&self) -> (f64, f64) {
        (sigma_from_rate(self.s1), sigma_from_rate(self.s2))
    }

    pub fn d2q9_sigmas(&self) -> (f64, f64) {
        (sigma_from_rate(self.s5), sigma_from_rate(self.s8))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// σ-products visited by `sweep`.
    pub products: Vec<f64>,
    /// The transport σ (σ1 or σ8) held fixed while the other one absorbs
    /// the product.
    pub transport_sigma: f64,
    /// Initial bracket of `magic-root`.
    pub bracket: (f64, f64),
    pub tolerance: f64,
    pub max_evaluations: usize,
}

impl SweepSpec {
    pub fn root_options(&self) -> RootOptions {
        RootOptions {
            tolerance: self.tolerance,
            max_evaluations: self.max_evaluations,
            transport_sigma: self.transport_sigma,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub variant: SchemeVariant,
    /// D1Q3 segment length.
    pub n: usize,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dt: f64,
    /// Only checked against `dx / dt` when given.
    pub lambda: Option<f64>,
    pub rates: Rates,
    pub zeta: f64,
    pub zeta_tilde: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `None` lets the experiment or the scheme pick the driving.
    pub drive: Option<DriveKind>,
    pub fx: f64,
    pub delta_p: f64,
    pub sweep: SweepSpec,
    pub steady: SteadyStateCriterion,
    pub mode: ModeOptions,
    pub output_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        let root = RootOptions::default();
        Self {
            variant: SchemeVariant::D1q3A,
            n: 32,
            nx: 100,
            ny: 21,
            dx: 1.0,
            dt: 1.0,
            lambda: None,
            rates: Rates {
                s1: 1.0,
                s2: 1.0,
                s3: D2q9Rates::DEFAULT_S,
                s4: D2q9Rates::DEFAULT_S,
                s5: 1.0,
                s8: 1.0,
            },
            zeta: EquilibriumParams::DEFAULT_ZETA,
            zeta_tilde: EquilibriumParams::DEFAULT_ZETA_TILDE,
            alpha: -2.0,
            beta: 1.0,
            drive: None,
            fx: 1e-6,
            delta_p: 1e-4,
            sweep: SweepSpec {
                products: (1..=16).map(|i| 0.05 * i as f64).collect(),
                transport_sigma: root.transport_sigma,
                bracket: (0.05, 0.6),
                tolerance: root.tolerance,
                max_evaluations: root.max_evaluations,
            },
            steady: SteadyStateCriterion::default(),
            mode: ModeOptions::default(),
            output_dir: ".".into(),
        }
    }
}

impl RunConfig {
    pub fn drive_kind(&self) -> DriveKind {
        self.drive.unwrap_or(DriveKind::default_for(self.variant))
    }

    pub fn equilibrium(&self) -> EquilibriumParams {
        match self.variant {
            SchemeVariant::D1q3A => EquilibriumParams::D1q3A { zeta: self.zeta },
            SchemeVariant::D1q3B => EquilibriumParams::D1q3B {
                zeta_tilde: self.zeta_tilde,
            },
            SchemeVariant::D2q9 => EquilibriumParams::D2q9 {
                alpha: self.alpha,
                beta: self.beta,
            },
        }
    }

    /// Closed-form magic product for the configured scheme and driving.
    pub fn magic_variant(&self) -> MagicVariant {
        match (self.variant, self.drive_kind()) {
            (SchemeVariant::D1q3A, _) => MagicVariant::DiffusionA,
            (SchemeVariant::D1q3B, _) => MagicVariant::DiffusionB,
            (SchemeVariant::D2q9, DriveKind::ForcePopulation) => MagicVariant::ForcePopulation,
            (SchemeVariant::D2q9, DriveKind::Pressure) => MagicVariant::PressureDrop {
                alpha: self.alpha,
                beta: self.beta,
            },
            (SchemeVariant::D2q9, _) => MagicVariant::ForceSplitHalf,
        }
    }

    /// TOML text that parses back to this configuration.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut section = |name: &str, entries: Vec<(&str, Value)>| {
            out.push_str(&format!("[{name}]\n"));
            for (key, value) in entries {
                out.push_str(&format!("{key} = {value}\n"));
            }
            out.push('\n');
        };
        let float = Value::Float;
        let int = |v: usize| Value::Integer(v as i64);
        section("scheme", vec![("variant", Value::String(self.variant.tag().into()))]);
        section("grid", vec![("n", int(self.n)), ("nx", int(self.nx)), ("ny", int(self.ny))]);
        let mut units = vec![("dx", float(self.dx)), ("dt", float(self.dt))];
        if let Some(lambda) = self.lambda {
            units.push(("lambda", float(lambda)));
        }
        section("units", units);
        let r = &self.rates;
        section(
            "relaxation",
            vec![
                ("s1", float(r.s1)),
                ("s2", float(r.s2)),
                ("s3", float(r.s3)),
                ("s4", float(r.s4)),
                ("s5", float(r.s5)),
                ("s8", float(r.s8)),
            ],
        );
        section(
            "equilibrium",
            vec![
                ("zeta", float(self.zeta)),
                ("zeta_tilde", float(self.zeta_tilde)),
                ("alpha", float(self.alpha)),
                ("beta", float(self.beta)),
            ],
        );
        let mut driving = Vec::new();
        if let Some(kind) = self.drive {
            driving.push(("kind", Value::String(kind.tag().into())));
        }
        driving.push(("fx", float(self.fx)));
        driving.push(("delta_p", float(self.delta_p)));
        section("driving", driving);
        let s = &self.sweep;
        section(
            "sweep",
            vec![
                ("products", Value::Array(s.products.iter().copied().map(float).collect())),
                ("transport_sigma", float(s.transport_sigma)),
                ("bracket", Value::Array(vec![float(s.bracket.0), float(s.bracket.1)])),
                ("tolerance", float(s.tolerance)),
                ("max_evaluations", int(s.max_evaluations)),
            ],
        );
        section(
            "steady",
            vec![
                ("tolerance", float(self.steady.tolerance)),
                ("max_steps", int(self.steady.max_steps)),
                ("check_every", int(self.steady.check_every)),
            ],
        );
        let m = &self.mode;
        section(
            "mode",
            vec![
                ("n", int(m.n)),
                ("mode", int(m.mode)),
                ("transient", int(m.transient)),
                ("samples", int(m.samples)),
                ("stride", int(m.stride)),
            ],
        );
        section("output", vec![("dir", Value::String(self.output_dir.clone()))]);
        out.truncate(out.trim_end().len());
        out.push('\n');
        out
    }

    /// SHA-256 of the rendered configuration, ignoring the output directory
    /// so that results written to different places carry the same hash.
    pub fn hash(&self) -> String {
        let canonical = RunConfig {
            output_dir: String::new(),
            ..self.clone()
        };
        Sha256::digest(canonical.render().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// One problem found while reading a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// `file:line`, `--override key`, or just the file name.
    pub location: String,
    pub key: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            write!(f, "{}: {}", self.location, self.message)
        } else {
            write!(f, "{}: {}: {}", self.location, self.key, self.message)
        }
    }
}

/// All violations of a configuration, in document order of discovery.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigErrors(pub Vec<Violation>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration ({} problem", self.0.len())?;
        if self.0.len() != 1 {
            write!(f, "s")?;
        }
        write!(f, ")")?;
        for v in &self.0 {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("scheme", &["variant"]),
    ("grid", &["n", "nx", "ny"]),
    ("units", &["dx", "dt", "lambda"]),
    ("relaxation", &["s1", "s2", "s3", "s4", "s5", "s8"]),
    ("equilibrium", &["zeta", "zeta_tilde", "alpha", "beta"]),
    ("driving", &["kind", "fx", "delta_p"]),
    ("sweep", &["products", "transport_sigma", "bracket", "tolerance", "max_evaluations"]),
    ("steady", &["tolerance", "max_steps", "check_every"]),
    ("mode", &["n", "mode", "transient", "samples", "stride"]),
    ("output", &["dir"]),
];

/// Parses and validates a configuration document.
pub fn parse_config(text: &str, origin: &str) -> Result<RunConfig, ConfigErrors> {
    parse_with_overrides(text, origin, &[])
}

/// As [`parse_config`], with `section.key=value` overrides applied on top
/// of the document. Values are TOML literals; a bare word is taken as a
/// string.
pub fn parse_with_overrides(text: &str, origin: &str, overrides: &[String]) -> Result<RunConfig, ConfigErrors> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| {
        let location = match e.span() {
            Some(span) => format!("{origin}:{}", line_of(text, span.start)),
            None => origin.to_string(),
        };
        ConfigErrors(vec![Violation {
            location,
            key: String::new(),
            message: e.message().trim().to_string(),
        }])
    })?;

    let mut reader = Reader {
        origin: origin.to_string(),
        lines: key_lines(text),
        overridden: BTreeSet::new(),
        violations: Vec::new(),
    };
    for item in overrides {
        reader.apply_override(&mut table, item);
    }
    reader.check_keys(&table);
    let config = reader.read(&table);
    reader.validate(&config);
    if reader.violations.is_empty() {
        Ok(config)
    } else {
        Err(ConfigErrors(reader.violations))
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of every `section.key` in the document, from the parser's spans.
fn key_lines(text: &str) -> BTreeMap<String, usize> {
    let mut lines = BTreeMap::new();
    let Ok(root) = DeTable::parse(text) else {
        return lines;
    };
    for (section, value) in root.get_ref() {
        let name = section.get_ref().to_string();
        lines.insert(name.clone(), line_of(text, section.span().start));
        if let DeValue::Table(inner) = value.get_ref() {
            for (key, _) in inner {
                lines.insert(format!("{name}.{}", key.get_ref()), line_of(text, key.span().start));
            }
        }
    }
    lines
}

struct Reader {
    origin: String,
    lines: BTreeMap<String, usize>,
    /// Keys set from the command line.
    overridden: BTreeSet<String>,
    violations: Vec<Violation>,
}

impl Reader {
    fn location(&self, key: &str) -> String {
        if self.overridden.contains(key) {
            format!("--override {key}")
        } else if let Some(line) = self.lines.get(key) {
            format!("{}:{line}", self.origin)
        } else {
            self.origin.clone()
        }
    }

    fn flag(&mut self, key: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            location: self.location(key),
            key: key.to_string(),
            message: message.into(),
        });
    }

    fn apply_override(&mut self, table: &mut Table, item: &str) {
        let Some((key, raw)) = item.split_once('=') else {
            self.violations.push(Violation {
                location: format!("--override {item}"),
                key: String::new(),
                message: "expected section.key=value".into(),
            });
            return;
        };
        let key = key.trim();
        let Some((section, name)) = key.split_once('.') else {
            self.violations.push(Violation {
                location: format!("--override {key}"),
                key: key.to_string(),
                message: "override keys have the form section.key".into(),
            });
            return;
        };
        let raw = raw.trim();
        let value = format!("v = {raw}")
            .parse::<Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        self.overridden.insert(key.to_string());
        match table
            .entry(section.to_string())
            .or_insert_with(|| Value::Table(Table::new()))
        {
            Value::Table(inner) => {
                inner.insert(name.to_string(), value);
            }
            _ => self.flag(section, "is not a section"),
        }
    }

    fn check_keys(&mut self, table: &Table) {
        for (section, value) in table {
            let Some((_, keys)) = SCHEMA.iter().find(|(name, _)| name == section) else {
                self.flag(section, "unknown key");
                continue;
            };
            let Value::Table(inner) = value else {
                self.flag(section, "expected a [section]");
                continue;
            };
            for key in inner.keys() {
                if !keys.contains(&key.as_str()) {
                    self.flag(&format!("{section}.{key}"), format!("unknown key (expected one of {})", keys.join(", ")));
                }
            }
        }
    }

    fn value<'t>(&self, table: &'t Table, section: &str, key: &str) -> Option<&'t Value> {
        table.get(section)?.as_table()?.get(key)
    }

    fn f64(&mut self, table: &Table, section: &str, key: &str, default: f64) -> f64 {
        match self.value(table, section, key) {
            None => default,
            Some(Value::Float(v)) => *v,
            Some(Value::Integer(v)) => *v as f64,
            Some(other) => {
                self.flag(&format!("{section}.{key}"), format!("expected a number, found {}", other.type_str()));
                default
            }
        }
    }

    fn opt_f64(&mut self, table: &Table, section: &str, key: &str) -> Option<f64> {
        self.value(table, section, key)?;
        Some(self.f64(table, section, key, f64::NAN))
    }

    fn usize(&mut self, table: &Table, section: &str, key: &str, default: usize) -> usize {
        match self.value(table, section, key) {
            None => default,
            Some(Value::Integer(v)) if *v >= 0 => *v as usize,
            Some(other) => {
                self.flag(&format!("{section}.{key}"), format!("expected a non-negative integer, found {other}"));
                default
            }
        }
    }

    fn string(&mut self, table: &Table, section: &str, key: &str) -> Option<String> {
        match self.value(table, section, key)? {
            Value::String(s) => Some(s.clone()),
            other => {
                self.flag(&format!("{section}.{key}"), format!("expected a string, found {}", other.type_str()));
                None
            }
        }
    }

    fn f64_list(&mut self, table: &Table, section: &str, key: &str, default: &[f64]) -> Vec<f64> {
        let Some(value) = self.value(table, section, key) else {
            return default.to_vec();
        };
        let numbers = value.as_array().and_then(|items| {
            items
                .iter()
                .map(|v| match v {
                    Value::Float(x) => Some(*x),
                    Value::Integer(x) => Some(*x as f64),
                    _ => None,
                })
                .collect::<Option<Vec<f64>>>()
        });
        numbers.unwrap_or_else(|| {
            self.flag(&format!("{section}.{key}"), "expected an array of numbers");
            default.to_vec()
        })
    }

    fn read(&mut self, table: &Table) -> RunConfig {
        let d = RunConfig::default();
        let variant = match self.string(table, "scheme", "variant") {
            None => d.variant,
            Some(tag) => SchemeVariant::from_tag(&tag).unwrap_or_else(|| {
                self.flag("scheme.variant", format!("unknown variant tag {tag:?} (expected d1q3-a, d1q3-b or d2q9)"));
                d.variant
            }),
        };
        let drive = self.string(table, "driving", "kind").and_then(|tag| {
            let kind = DriveKind::from_tag(&tag);
            if kind.is_none() {
                self.flag(
                    "driving.kind",
                    format!("unknown driving tag {tag:?} (expected source, force-split-half, force-population or pressure)"),
                );
            }
            kind
        });
        let bracket = self.f64_list(table, "sweep", "bracket", &[d.sweep.bracket.0, d.sweep.bracket.1]);
        let bracket = match bracket.as_slice() {
            [lo, hi] => (*lo, *hi),
            _ => {
                self.flag("sweep.bracket", "expected exactly two numbers [low, high]");
                d.sweep.bracket
            }
        };
        RunConfig {
            variant,
            n: self.usize(table, "grid", "n", d.n),
            nx: self.usize(table, "grid", "nx", d.nx),
            ny: self.usize(table, "grid", "ny", d.ny),
            dx: self.f64(table, "units", "dx", d.dx),
            dt: self.f64(table, "units", "dt", d.dt),
            lambda: self.opt_f64(table, "units", "lambda"),
            rates: Rates {
                s1: self.f64(table, "relaxation", "s1", d.rates.s1),
                s2: self.f64(table, "relaxation", "s2", d.rates.s2),
                s3: self.f64(table, "relaxation", "s3", d.rates.s3),
                s4: self.f64(table, "relaxation", "s4", d.rates.s4),
                s5: self.f64(table, "relaxation", "s5", d.rates.s5),
                s8: self.f64(table, "relaxation", "s8", d.rates.s8),
            },
            zeta: self.f64(table, "equilibrium", "zeta", d.zeta),
            zeta_tilde: self.f64(table, "equilibrium", "zeta_tilde", d.zeta_tilde),
            alpha: self.f64(table, "equilibrium", "alpha", d.alpha),
            beta: self.f64(table, "equilibrium", "beta", d.beta),
            drive,
            fx: self.f64(table, "driving", "fx", d.fx),
            delta_p: self.f64(table, "driving", "delta_p", d.delta_p),
            sweep: SweepSpec {
                products: self.f64_list(table, "sweep", "products", &d.sweep.products),
                transport_sigma: self.f64(table, "sweep", "transport_sigma", d.sweep.transport_sigma),
                bracket,
                tolerance: self.f64(table, "sweep", "tolerance", d.sweep.tolerance),
                max_evaluations: self.usize(table, "sweep", "max_evaluations", d.sweep.max_evaluations),
            },
            steady: SteadyStateCriterion {
                tolerance: self.f64(table, "steady", "tolerance", d.steady.tolerance),
                max_steps: self.usize(table, "steady", "max_steps", d.steady.max_steps),
                check_every: self.usize(table, "steady", "check_every", d.steady.check_every),
            },
            mode: ModeOptions {
                n: self.usize(table, "mode", "n", d.mode.n),
                mode: self.usize(table, "mode", "mode", d.mode.mode),
                transient: self.usize(table, "mode", "transient", d.mode.transient),
                samples: self.usize(table, "mode", "samples", d.mode.samples),
                stride: self.usize(table, "mode", "stride", d.mode.stride),
            },
            output_dir: self.string(table, "output", "dir").unwrap_or(d.output_dir),
        }
    }

    fn validate(&mut self, c: &RunConfig) {
        if c.n < 3 {
            self.flag("grid.n", format!("{} nodes cannot carry a parabola (need at least 3)", c.n));
        }
        if c.nx == 0 {
            self.flag("grid.nx", "must be at least 1");
        }
        if c.ny < 3 {
            self.flag("grid.ny", format!("{} rows cannot carry a parabola (need at least 3)", c.ny));
        }
        for (key, v) in [("units.dx", c.dx), ("units.dt", c.dt)] {
            if !(v > 0.0 && v.is_finite()) {
                self.flag(key, format!("{v} must be positive"));
            }
        }
        if let Some(lambda) = c.lambda {
            let expected = c.dx / c.dt;
            if !((lambda - expected).abs() <= 1e-12 * expected.abs()) {
                self.flag("units.lambda", format!("{lambda} differs from dx/dt = {expected}"));
            }
        }

        let r = &c.rates;
        for (key, s) in [
            ("s1", r.s1),
            ("s2", r.s2),
            ("s3", r.s3),
            ("s4", r.s4),
            ("s5", r.s5),
            ("s8", r.s8),
        ] {
            if !(s > 0.0 && s < 2.0) {
                self.flag(&format!("relaxation.{key}"), format!("{s} violates the stability bound 0 < s_ℓ < 2"));
            }
        }

        let equilibrium_key = match c.variant {
            SchemeVariant::D1q3A => "equilibrium.zeta",
            SchemeVariant::D1q3B => "equilibrium.zeta_tilde",
            SchemeVariant::D2q9 => "equilibrium.alpha",
        };
        if let Err(e) = c.equilibrium().validate() {
            self.flag(equilibrium_key, e.to_string());
        }

        let kind = c.drive_kind();
        if c.variant.is_d1q3() != (kind == DriveKind::Source) {
            self.flag(
                "driving.kind",
                format!("{} driving does not apply to the {} scheme", kind.tag(), c.variant.tag()),
            );
        }
        if kind == DriveKind::Pressure {
            if let Err(e) = predict_magic(c.magic_variant()) {
                self.flag("equilibrium.beta", format!("singular pressure predictor: {e}"));
            }
            if !(c.alpha > -4.0) {
                self.flag("equilibrium.alpha", format!("{} gives a non-positive sound speed (need alpha > -4)", c.alpha));
            }
        }
        for (key, v) in [("driving.fx", c.fx), ("driving.delta_p", c.delta_p)] {
            if !v.is_finite() {
                self.flag(key, "must be finite");
            }
        }

        let s = &c.sweep;
        if s.products.is_empty() || s.products.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            self.flag("sweep.products", "needs at least one positive product");
        }
        if !(s.transport_sigma > 0.0 && s.transport_sigma.is_finite()) {
            self.flag("sweep.transport_sigma", format!("{} must be positive", s.transport_sigma));
        }
        if !(s.bracket.0 > 0.0 && s.bracket.1 > s.bracket.0) {
            self.flag("sweep.bracket", format!("[{}, {}] must satisfy 0 < low < high", s.bracket.0, s.bracket.1));
        }
        if !(s.tolerance > 0.0) {
            self.flag("sweep.tolerance", "must be positive");
        }
        if s.max_evaluations < 3 {
            self.flag("sweep.max_evaluations", "bisection needs at least 3 evaluations");
        }
        if let Err(e) = c.steady.validate() {
            self.flag("steady", e.to_string());
        }
        if let Err(e) = c.mode.validate() {
            self.flag("mode", e.to_string());
        }
    }
}
