//! Experiment configs: TOML in, a fully validated [`ExperimentConfig`] out.
//!
//! Validation happens before any computation. Errors name the offending field
//! with its dotted path, e.g. ``params.delta``.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use orbit_census::census::Bump;
use orbit_census::symbolic::DEFAULT_BUDGET;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("`{field}`: {message}")]
    Field { field: String, message: String },
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
}

fn field(name: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: name.to_string(),
        message: message.into(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    task: String,
    system: RawSystem,
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    matrix: Option<Vec<Vec<u8>>>,
    depth: Option<usize>,
    table: Option<BTreeMap<String, f64>>,
    table_csv: Option<PathBuf>,
    random: Option<RandomTable>,
    constant: Option<f64>,
    billiard: Option<RawBilliard>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBilliard {
    centers: Option<Vec<[f64; 2]>>,
    radii: Option<Vec<f64>>,
    symmetric: Option<Symmetric>,
    depth: Option<usize>,
    window: Option<usize>,
}

#[derive(Deserialize, Serialize, Clone, Copy, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Symmetric {
    pub side: f64,
    pub radius: f64,
}

/// Table drawn uniformly from `[lo, hi)` with a ChaCha8 stream, one value per
/// cylinder in lexicographic order.
#[derive(Deserialize, Serialize, Clone, Copy, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RandomTable {
    pub seed: u64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawParams {
    z: Option<f64>,
    z_alpha: Option<f64>,
    p: Option<f64>,
    q: Option<f64>,
    delta: Option<f64>,
    n: Option<usize>,
    n_min: Option<usize>,
    n_max: Option<usize>,
    u: Option<f64>,
    t: Option<f64>,
    a: Option<Vec<f64>>,
    chi: Option<RawChi>,
    x_max: Option<f64>,
    grid: Option<Vec<f64>>,
    s_values: Option<Vec<f64>>,
    zeta_terms: Option<usize>,
    theta: Option<f64>,
    budget: Option<u64>,
    screen: Option<bool>,
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
enum RawChi {
    Polynomial { center: f64, half_width: f64, height: f64 },
    Plateau { lo: f64, hi: f64, ramp: f64 },
    SqueezeLower { p: f64, q: f64, eta: f64 },
    SqueezeUpper { p: f64, q: f64, eta: f64 },
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum TableSource {
    Entries(BTreeMap<String, f64>),
    Csv(PathBuf),
    Random(RandomTable),
    Constant(f64),
}

#[derive(Serialize, Clone, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemSpec {
    Table {
        matrix: Vec<Vec<u8>>,
        depth: usize,
        source: TableSource,
    },
    Billiard {
        centers: Vec<[f64; 2]>,
        radii: Vec<f64>,
        depth: usize,
        window: usize,
    },
}

/// Window offset: absolute, or as a fraction of `alpha` (resolved once `alpha`
/// is known).
#[derive(Serialize, Clone, Copy, Debug, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum ZSpec {
    Absolute(f64),
    AlphaFraction(f64),
}

impl ZSpec {
    pub fn resolve(self, alpha: f64) -> f64 {
        match self {
            ZSpec::Absolute(z) => z,
            ZSpec::AlphaFraction(c) => c * alpha,
        }
    }
}

/// Serializable mirror of [`Bump`].
#[derive(Serialize, Clone, Copy, Debug, PartialEq)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ChiSpec {
    Polynomial { center: f64, half_width: f64, height: f64 },
    Plateau { lo: f64, hi: f64, ramp: f64 },
}

impl ChiSpec {
    pub fn bump(self) -> Bump {
        match self {
            ChiSpec::Polynomial {
                center,
                half_width,
                height,
            } => Bump::Polynomial {
                center,
                half_width,
                height,
            },
            ChiSpec::Plateau { lo, hi, ramp } => Bump::Plateau { lo, hi, ramp },
        }
    }

    pub fn from_bump(b: Bump) -> Self {
        match b {
            Bump::Polynomial {
                center,
                half_width,
                height,
            } => ChiSpec::Polynomial {
                center,
                half_width,
                height,
            },
            Bump::Plateau { lo, hi, ramp } => ChiSpec::Plateau { lo, hi, ramp },
        }
    }
}

#[derive(Serialize, Clone, Copy, Debug, PartialEq)]
pub struct WindowSpec {
    pub z: ZSpec,
    pub p: f64,
    pub q: f64,
    pub delta: f64,
    pub n_min: usize,
    pub n_max: usize,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Task {
    Pressure,
    CountWindow {
        window: WindowSpec,
    },
    #[serde(rename = "count-I")]
    CountI {
        window: WindowSpec,
        a: Vec<f64>,
    },
    PrimitiveWindow {
        window: WindowSpec,
    },
    Smoothed {
        z: ZSpec,
        delta: f64,
        n_min: usize,
        n_max: usize,
        chi: ChiSpec,
    },
    Lemma1 {
        u: f64,
        n_min: usize,
        n_max: usize,
    },
    RuelleLemma {
        t: f64,
        u: f64,
        n_min: usize,
        n_max: usize,
    },
    Spectrum {
        n_max: usize,
    },
    PrimeCount {
        x_max: f64,
        grid: Vec<f64>,
        s_values: Vec<f64>,
        zeta_terms: usize,
    },
    DecayProbe {
        u: f64,
        n_max: usize,
        theta: f64,
    },
}

pub const TASKS: [&str; 10] = [
    "pressure",
    "count-window",
    "count-I",
    "primitive-window",
    "smoothed",
    "lemma1",
    "ruelle-lemma",
    "spectrum",
    "prime-count",
    "decay-probe",
];

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: Format,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub task: Task,
    pub system: SystemSpec,
    pub output: OutputSpec,
    pub budget: u64,
    /// Run the lattice screen and decay probe and attach their flags.
    pub screen: bool,
}

impl ExperimentConfig {
    /// Parse and validate; relative `table_csv` paths resolve against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        resolve(raw, base)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn is_billiard(&self) -> bool {
        matches!(self.system, SystemSpec::Billiard { .. })
    }
}

fn resolve(raw: RawConfig, base: &Path) -> Result<ExperimentConfig, ConfigError> {
    let system = resolve_system(raw.system, base)?;
    let p = raw.params;
    let task = resolve_task(&raw.task, &p)?;
    let format = match raw.output.format.as_deref() {
        None | Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => return Err(field("output.format", format!("expected csv or json, got {other:?}"))),
    };
    let default_name = format!("{}.{}", raw.task, if format == Format::Json { "json" } else { "csv" });
    let path = raw.output.path.unwrap_or_else(|| PathBuf::from(default_name));
    if path.file_stem().is_none() {
        return Err(field("output.path", "needs a file name"));
    }
    let budget = p.budget.unwrap_or(DEFAULT_BUDGET as u64);
    if budget == 0 {
        return Err(field("params.budget", "must be positive"));
    }
    Ok(ExperimentConfig {
        task,
        system,
        output: OutputSpec { path, format },
        budget,
        screen: p.screen.unwrap_or(false),
    })
}

fn resolve_system(raw: RawSystem, base: &Path) -> Result<SystemSpec, ConfigError> {
    let has_table = raw.matrix.is_some()
        || raw.table.is_some()
        || raw.table_csv.is_some()
        || raw.random.is_some()
        || raw.constant.is_some();
    match (raw.billiard, has_table) {
        (Some(_), true) => Err(field("system", "give either a matrix with a table or a billiard, not both")),
        (None, false) => Err(field("system", "missing: give `matrix` with a table, or `billiard`")),
        (Some(b), false) => {
            if raw.depth.is_some() {
                return Err(field("system.depth", "set the depth inside system.billiard"));
            }
            let (centers, radii) = match (b.symmetric, b.centers, b.radii) {
                (Some(s), None, None) => {
                    let h = s.side * 3f64.sqrt() / 2.0;
                    (
                        vec![[0.0, 0.0], [s.side, 0.0], [s.side / 2.0, h]],
                        vec![s.radius; 3],
                    )
                }
                (None, Some(c), Some(r)) => {
                    if c.len() != r.len() {
                        return Err(field("system.billiard.radii", format!("{} radii for {} centers", r.len(), c.len())));
                    }
                    (c, r)
                }
                (Some(_), _, _) => {
                    return Err(field("system.billiard", "give either `symmetric` or `centers` + `radii`"))
                }
                _ => return Err(field("system.billiard", "missing `centers` + `radii` (or `symmetric`)")),
            };
            if centers.len() < 3 {
                return Err(field("system.billiard.centers", "need at least 3 obstacles"));
            }
            let depth = b.depth.ok_or_else(|| field("system.billiard.depth", "missing"))?;
            if depth < 2 {
                return Err(field("system.billiard.depth", "must be at least 2"));
            }
            Ok(SystemSpec::Billiard {
                centers,
                radii,
                depth,
                window: b.window.unwrap_or(orbit_census::billiard::DEFAULT_WINDOW),
            })
        }
        (None, true) => {
            let matrix = raw.matrix.ok_or_else(|| field("system.matrix", "missing"))?;
            let depth = raw.depth.ok_or_else(|| field("system.depth", "missing"))?;
            if depth == 0 {
                return Err(field("system.depth", "must be at least 1"));
            }
            let mut sources = Vec::new();
            if let Some(t) = raw.table {
                sources.push(TableSource::Entries(t));
            }
            if let Some(p) = raw.table_csv {
                sources.push(TableSource::Csv(base.join(p)));
            }
            if let Some(r) = raw.random {
                if !(r.lo < r.hi && r.lo.is_finite() && r.hi.is_finite()) {
                    return Err(field("system.random", "need finite lo < hi"));
                }
                sources.push(TableSource::Random(r));
            }
            if let Some(c) = raw.constant {
                sources.push(TableSource::Constant(c));
            }
            if sources.len() != 1 {
                return Err(field(
                    "system",
                    "give exactly one of `table`, `table_csv`, `random`, `constant`",
                ));
            }
            Ok(SystemSpec::Table {
                matrix,
                depth,
                source: sources.pop().expect("one source"),
            })
        }
    }
}

fn need<T: Copy>(v: Option<T>, name: &str, task: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| field(&format!("params.{name}"), format!("missing (required by task {task})")))
}

fn finite(v: f64, name: &str) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(field(&format!("params.{name}"), "must be finite"))
    }
}

fn n_range(p: &RawParams, task: &str) -> Result<(usize, usize), ConfigError> {
    let (lo, hi) = match (p.n, p.n_min, p.n_max) {
        (Some(n), None, None) => (n, n),
        (None, Some(a), Some(b)) => (a, b),
        (Some(_), _, _) => return Err(field("params.n", "give either `n` or `n_min` + `n_max`")),
        (None, None, _) => return Err(field("params.n", format!("missing (required by task {task})"))),
        (None, Some(_), None) => return Err(field("params.n_max", format!("missing (required by task {task})"))),
    };
    if lo == 0 {
        return Err(field("params.n_min", "must be at least 1"));
    }
    if hi < lo {
        return Err(field("params.n_max", format!("must be at least n_min = {lo}")));
    }
    Ok((lo, hi))
}

fn z_spec(p: &RawParams, task: &str) -> Result<ZSpec, ConfigError> {
    match (p.z, p.z_alpha) {
        (Some(z), None) => Ok(ZSpec::Absolute(finite(z, "z")?)),
        (None, Some(c)) => {
            if !(0.0..=1.0).contains(&c) {
                return Err(field("params.z_alpha", "must lie in [0, 1]"));
            }
            Ok(ZSpec::AlphaFraction(c))
        }
        (Some(_), Some(_)) => Err(field("params.z", "give either `z` or `z_alpha`")),
        (None, None) => Err(field("params.z", format!("missing (required by task {task})"))),
    }
}

fn window(p: &RawParams, task: &str) -> Result<WindowSpec, ConfigError> {
    let z = z_spec(p, task)?;
    let pp = finite(need(p.p, "p", task)?, "p")?;
    let q = finite(need(p.q, "q", task)?, "q")?;
    if pp >= q {
        return Err(field("params.q", format!("must exceed p = {pp}")));
    }
    let delta = finite(need(p.delta, "delta", task)?, "delta")?;
    if delta <= 0.0 {
        return Err(field("params.delta", "must be positive"));
    }
    let (n_min, n_max) = n_range(p, task)?;
    Ok(WindowSpec {
        z,
        p: pp,
        q,
        delta,
        n_min,
        n_max,
    })
}

fn chi(raw: &RawChi) -> Result<ChiSpec, ConfigError> {
    let bump = match *raw {
        RawChi::Polynomial {
            center,
            half_width,
            height,
        } => Bump::Polynomial {
            center,
            half_width,
            height,
        },
        RawChi::Plateau { lo, hi, ramp } => Bump::Plateau { lo, hi, ramp },
        RawChi::SqueezeLower { p, q, eta } | RawChi::SqueezeUpper { p, q, eta } => {
            let (lower, upper) =
                Bump::squeeze(p, q, eta).map_err(|e| field("params.chi", e.to_string()))?;
            if matches!(raw, RawChi::SqueezeLower { .. }) {
                lower
            } else {
                upper
            }
        }
    };
    bump.validate().map_err(|e| field("params.chi", e.to_string()))?;
    Ok(ChiSpec::from_bump(bump))
}

fn resolve_task(name: &str, p: &RawParams) -> Result<Task, ConfigError> {
    let task = match name {
        "pressure" => Task::Pressure,
        "count-window" => Task::CountWindow { window: window(p, name)? },
        "count-I" => {
            let a = p.a.clone().unwrap_or_else(|| vec![1.0]);
            if a.is_empty() || a.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(field("params.a", "need a non-empty list of positive values"));
            }
            Task::CountI {
                window: window(p, name)?,
                a,
            }
        }
        "primitive-window" => Task::PrimitiveWindow { window: window(p, name)? },
        "smoothed" => {
            let raw = p
                .chi
                .as_ref()
                .ok_or_else(|| field("params.chi", format!("missing (required by task {name})")))?;
            let delta = need(p.delta, "delta", name)?;
            if !(delta > 0.0 && delta.is_finite()) {
                return Err(field("params.delta", "must be positive"));
            }
            let (n_min, n_max) = n_range(p, name)?;
            Task::Smoothed {
                z: z_spec(p, name)?,
                delta,
                n_min,
                n_max,
                chi: chi(raw)?,
            }
        }
        "lemma1" => {
            let (n_min, n_max) = n_range(p, name)?;
            Task::Lemma1 {
                u: finite(need(p.u, "u", name)?, "u")?,
                n_min,
                n_max,
            }
        }
        "ruelle-lemma" => {
            let (n_min, n_max) = n_range(p, name)?;
            Task::RuelleLemma {
                t: finite(need(p.t, "t", name)?, "t")?,
                u: finite(need(p.u, "u", name)?, "u")?,
                n_min,
                n_max,
            }
        }
        "spectrum" => {
            let n_max = need(p.n_max, "n_max", name)?;
            if n_max < 1 {
                return Err(field("params.n_max", "must be at least 1"));
            }
            Task::Spectrum { n_max }
        }
        "prime-count" => {
            let x_max = finite(need(p.x_max, "x_max", name)?, "x_max")?;
            if x_max <= 0.0 {
                return Err(field("params.x_max", "must be positive"));
            }
            let grid = p.grid.clone().unwrap_or_else(|| (1..=10).map(|i| x_max * i as f64 / 10.0).collect());
            if grid.iter().any(|x| !x.is_finite()) {
                return Err(field("params.grid", "must be finite"));
            }
            let s_values = p.s_values.clone().unwrap_or_default();
            if s_values.iter().any(|x| !x.is_finite()) {
                return Err(field("params.s_values", "must be finite"));
            }
            Task::PrimeCount {
                x_max,
                grid,
                s_values,
                zeta_terms: p.zeta_terms.unwrap_or(20),
            }
        }
        "decay-probe" => {
            let u = finite(need(p.u, "u", name)?, "u")?;
            if u == 0.0 {
                return Err(field("params.u", "must be non-zero"));
            }
            let theta = p.theta.unwrap_or(0.5);
            if !(theta > 0.0 && theta < 1.0) {
                return Err(field("params.theta", "must lie in (0, 1)"));
            }
            Task::DecayProbe {
                u,
                n_max: need(p.n_max, "n_max", name)?,
                theta,
            }
        }
        other => {
            return Err(field(
                "task",
                format!("unknown task {other:?}; expected one of {}", TASKS.join(", ")),
            ))
        }
    };
    Ok(task)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = "[system]\nmatrix = [[1, 1], [1, 1]]\ndepth = 1\ntable = { 1 = 1.0, 2 = 2.0 }\n";

    fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::from_toml(text, Path::new("."))
    }

    #[test]
    fn pressure_config_resolves_defaults() {
        let c = parse(&format!("task = \"pressure\"\n{GOLDEN}")).unwrap();
        assert_eq!(c.task, Task::Pressure);
        assert_eq!(c.output.path, PathBuf::from("pressure.csv"));
        assert_eq!(c.budget, DEFAULT_BUDGET as u64);
        assert!(!c.screen);
    }

    #[test]
    fn missing_delta_names_the_field() {
        let text = format!("task = \"count-window\"\n{GOLDEN}[params]\nz = 0.0\np = -1.0\nq = 1.0\nn = 5\n");
        let err = parse(&text).unwrap_err();
        assert_eq!(err, field("params.delta", "missing (required by task count-window)"));
        assert!(err.to_string().contains("params.delta"));
    }

    #[test]
    fn unknown_keys_and_tasks_are_rejected() {
        assert!(matches!(
            parse(&format!("task = \"pressure\"\nbogus = 1\n{GOLDEN}")),
            Err(ConfigError::Parse(_))
        ));
        let err = parse(&format!("task = \"sing\"\n{GOLDEN}")).unwrap_err();
        assert!(matches!(err, ConfigError::Field { ref field, .. } if field == "task"));
    }

    #[test]
    fn exactly_one_system() {
        let both = "task = \"pressure\"\n[system]\nmatrix = [[0,1,1],[1,0,1],[1,1,0]]\ndepth = 1\nconstant = 1.0\n[system.billiard]\nsymmetric = { side = 6.0, radius = 1.0 }\ndepth = 2\n";
        assert!(matches!(parse(both), Err(ConfigError::Field { ref field, .. }) if field == "system"));
        let none = "task = \"pressure\"\n[system]\n";
        assert!(parse(none).is_err());
        let two_tables = "task = \"pressure\"\n[system]\nmatrix = [[1,1],[1,0]]\ndepth = 1\nconstant = 1.0\nrandom = { seed = 1, lo = 0.5, hi = 1.0 }\n";
        assert!(parse(two_tables).is_err());
    }

    #[test]
    fn window_ranges_are_checked() {
        let base = format!("task = \"count-window\"\n{GOLDEN}[params]\nz = 0.0\ndelta = 0.1\nn = 4\n");
        let err = parse(&format!("{base}p = 1.0\nq = 1.0\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Field { ref field, .. } if field == "params.q"));
        let err = parse(&format!("{base}p = -1.0\nq = 1.0\nz_alpha = 0.5\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Field { ref field, .. } if field == "params.z"));
    }

    #[test]
    fn billiard_and_squeeze_bump() {
        let text = "task = \"smoothed\"\n[system.billiard]\nsymmetric = { side = 6.0, radius = 1.0 }\ndepth = 3\n[params]\nz = 0.0\ndelta = 0.1\nn_min = 2\nn_max = 5\nchi = { family = \"squeeze-upper\", p = -1.0, q = 1.0, eta = 0.25 }\n";
        let c = parse(text).unwrap();
        assert!(c.is_billiard());
        match c.task {
            Task::Smoothed { chi, n_min, n_max, .. } => {
                assert_eq!(chi.bump(), Bump::Plateau { lo: -1.0, hi: 1.0, ramp: 0.25 });
                assert_eq!((n_min, n_max), (2, 5));
            }
            other => panic!("unexpected task {other:?}"),
        }
    }
}
