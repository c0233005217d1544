//! Flat key-value experiment configs: one experiment per file, dotted
//! section names, `#` comments. Designed to be diff-friendly.

use std::fmt;

use crossedlab::dynsys::DynamicalSystem;
use crossedlab::presets::GOLDEN;

#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "config error at line {} ({}): {}", self.line, self.field, self.message)
        } else {
            write!(f, "config error ({}): {}", self.field, self.message)
        }
    }
}

fn err(line: usize, field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { line, field: field.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Computation {
    TraceCheck,
    Ids,
    Bands,
    SupportCheck,
    DualityCheck,
    AubryProbe,
    Shubin,
}

impl Computation {
    pub fn name(self) -> &'static str {
        match self {
            Computation::TraceCheck => "trace-check",
            Computation::Ids => "ids",
            Computation::Bands => "bands",
            Computation::SupportCheck => "support-check",
            Computation::DualityCheck => "duality-check",
            Computation::AubryProbe => "aubry-probe",
            Computation::Shubin => "shubin",
        }
    }
}

#[derive(Debug, Clone)]
pub enum SystemSpec {
    Point { rank: usize },
    Torus { theta: Vec<f64> },
    Finite { periods: Vec<i64> },
}

impl SystemSpec {
    pub fn build(&self) -> DynamicalSystem {
        match self {
            SystemSpec::Point { rank } => DynamicalSystem::point(*rank),
            SystemSpec::Torus { theta } => DynamicalSystem::torus(theta.clone()),
            SystemSpec::Finite { periods } => DynamicalSystem::finite_cyclic(periods.clone()),
        }
    }
}

/// A literal kernel entry: group site `t`, coefficient mode `mode` (ignored
/// on the point space), complex amplitude.
#[derive(Debug, Clone)]
pub struct LiteralTerm {
    pub t: i64,
    pub mode: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub preset: String,
    pub lambda: f64,
    pub potential: Vec<f64>,
    pub terms: Vec<LiteralTerm>,
}

#[derive(Debug, Clone)]
pub struct NumericSpec {
    pub box_radius: i64,
    pub x_grid: usize,
    pub that_grid: usize,
    pub mode_cutoff: i64,
    pub energy_grid: usize,
    pub zone_resolution: usize,
    pub shubin_ns: Vec<i64>,
    pub random_kernels: usize,
}

impl Default for NumericSpec {
    fn default() -> Self {
        NumericSpec {
            box_radius: 16,
            x_grid: 64,
            that_grid: 128,
            mode_cutoff: 12,
            energy_grid: 512,
            zone_resolution: 512,
            shubin_ns: vec![10, 20, 40, 80, 160, 320],
            random_kernels: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Canonical key-value echo (parse order, comments stripped).
    pub entries: Vec<(String, String)>,
    pub computation: Computation,
    pub system: SystemSpec,
    pub kernel: KernelSpec,
    pub numeric: NumericSpec,
    pub output_dir: Option<String>,
}

impl ExperimentConfig {
    /// FNV-1a hash of the canonical entry list; stamped into every CSV.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for (k, v) in &self.entries {
            for byte in k.bytes().chain([b'='].into_iter()).chain(v.bytes()).chain([b'\n']) {
                h ^= byte as u64;
                h = h.wrapping_mul(0x1000_0000_01b3);
            }
        }
        h
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    v.trim().parse().map_err(|_| err(line, key, format!("expected a number, got `{v}`")))
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| err(line, key, format!("expected a nonnegative integer, got `{v}`")))
}

fn parse_i64(line: usize, key: &str, v: &str) -> Result<i64, ConfigError> {
    v.trim().parse().map_err(|_| err(line, key, format!("expected an integer, got `{v}`")))
}

fn parse_list<T, F>(line: usize, key: &str, v: &str, f: F) -> Result<Vec<T>, ConfigError>
where
    F: Fn(usize, &str, &str) -> Result<T, ConfigError>,
{
    v.split(',').map(|piece| f(line, key, piece)).collect()
}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut entries: Vec<(String, String, usize)> = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(lineno, line, "expected `key = value`"));
        };
        entries.push((key.trim().to_string(), value.trim().to_string(), lineno));
    }

    let mut computation = None;
    let mut theta: Option<Vec<f64>> = None;
    let mut periods: Option<Vec<i64>> = None;
    let mut rank: Option<usize> = None;
    let mut preset: Option<String> = None;
    let mut lambda = 2.0;
    let mut potential: Vec<f64> = Vec::new();
    let mut terms: Vec<LiteralTerm> = Vec::new();
    let mut numeric = NumericSpec::default();
    let mut output_dir = None;

    for (key, value, line) in &entries {
        let (key, value, line) = (key.as_str(), value.as_str(), *line);
        match key {
            "computation" => {
                computation = Some(match value {
                    "trace-check" => Computation::TraceCheck,
                    "ids" => Computation::Ids,
                    "bands" => Computation::Bands,
                    "support-check" => Computation::SupportCheck,
                    "duality-check" => Computation::DualityCheck,
                    "aubry-probe" => Computation::AubryProbe,
                    "shubin" => Computation::Shubin,
                    other => {
                        return Err(err(line, key, format!("unknown computation `{other}`")))
                    }
                });
            }
            "system.theta" => theta = Some(parse_list(line, key, value, parse_f64)?),
            "system.periods" => periods = Some(parse_list(line, key, value, parse_i64)?),
            "system.rank" => rank = Some(parse_usize(line, key, value)?),
            "kernel.preset" => preset = Some(value.to_string()),
            "kernel.lambda" => lambda = parse_f64(line, key, value)?,
            "kernel.potential" => potential = parse_list(line, key, value, parse_f64)?,
            "kernel.term" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 4 {
                    return Err(err(line, key, "expected `t, mode, re, im`"));
                }
                terms.push(LiteralTerm {
                    t: parse_i64(line, key, parts[0])?,
                    mode: parse_i64(line, key, parts[1])?,
                    re: parse_f64(line, key, parts[2])?,
                    im: parse_f64(line, key, parts[3])?,
                });
            }
            "numeric.box_radius" => numeric.box_radius = parse_i64(line, key, value)?,
            "numeric.x_grid" => numeric.x_grid = parse_usize(line, key, value)?,
            "numeric.that_grid" => numeric.that_grid = parse_usize(line, key, value)?,
            "numeric.mode_cutoff" => numeric.mode_cutoff = parse_i64(line, key, value)?,
            "numeric.energy_grid" => numeric.energy_grid = parse_usize(line, key, value)?,
            "numeric.zone_resolution" => {
                numeric.zone_resolution = parse_usize(line, key, value)?
            }
            "numeric.shubin_ns" => numeric.shubin_ns = parse_list(line, key, value, parse_i64)?,
            "numeric.random_kernels" => numeric.random_kernels = parse_usize(line, key, value)?,
            "output.dir" => output_dir = Some(value.to_string()),
            other => return Err(err(line, other, "unknown key")),
        }
    }

    let computation = computation.ok_or_else(|| err(0, "computation", "missing"))?;
    let preset = preset.unwrap_or_else(|| {
        if terms.is_empty() { "laplacian".to_string() } else { "literal".to_string() }
    });

    if numeric.box_radius <= 0 {
        return Err(err(0, "numeric.box_radius", "must be positive"));
    }
    for (name, v) in [
        ("numeric.x_grid", numeric.x_grid),
        ("numeric.that_grid", numeric.that_grid),
        ("numeric.energy_grid", numeric.energy_grid),
        ("numeric.zone_resolution", numeric.zone_resolution),
    ] {
        if v == 0 {
            return Err(err(0, name, "must be positive"));
        }
    }
    if numeric.energy_grid < 2 {
        return Err(err(0, "numeric.energy_grid", "need at least 2 points"));
    }
    if numeric.mode_cutoff < 0 {
        return Err(err(0, "numeric.mode_cutoff", "must be nonnegative"));
    }

    // resolve the system; presets imply a default when none is given
    let system = match (&theta, &periods) {
        (Some(_), Some(_)) => {
            return Err(err(0, "system", "set system.theta or system.periods, not both"))
        }
        (Some(t), None) => SystemSpec::Torus { theta: t.clone() },
        (None, Some(p)) => {
            if p.iter().any(|&x| x < 1) {
                return Err(err(0, "system.periods", "periods must be >= 1"));
            }
            SystemSpec::Finite { periods: p.clone() }
        }
        (None, None) => match preset.as_str() {
            "almost_mathieu" => SystemSpec::Torus { theta: vec![GOLDEN] },
            "periodic" => {
                if potential.is_empty() {
                    return Err(err(0, "kernel.potential", "required for the periodic preset"));
                }
                SystemSpec::Finite { periods: vec![potential.len() as i64] }
            }
            _ => SystemSpec::Point { rank: rank.unwrap_or(1) },
        },
    };

    match preset.as_str() {
        "unit" | "laplacian" => {}
        "almost_mathieu" => {
            if !matches!(system, SystemSpec::Torus { .. }) {
                return Err(err(0, "kernel.preset", "almost_mathieu needs a torus system"));
            }
        }
        "periodic" => {
            if potential.is_empty() {
                return Err(err(0, "kernel.potential", "required for the periodic preset"));
            }
        }
        "literal" => {
            if terms.is_empty() {
                return Err(err(0, "kernel.term", "literal kernels need at least one term"));
            }
        }
        other => return Err(err(0, "kernel.preset", format!("unknown preset `{other}`"))),
    }

    Ok(ExperimentConfig {
        entries: entries.into_iter().map(|(k, v, _)| (k, v)).collect(),
        computation,
        system,
        kernel: KernelSpec { preset, lambda, potential, terms },
        numeric,
        output_dir,
    })
}
