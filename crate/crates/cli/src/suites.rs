//! Canned desk-scale reproduction suites.
//!
//! Each suite writes plot-ready CSV tables plus a `manifest.toml` into
//! `<out>/<suite>/`. Tables report counts, predictions and ratios; they never
//! print a verdict.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use serde::Serialize;

use orbit_census::billiard::{self, ValidatedScene};
use orbit_census::census::{self, Bump, CensusOptions, WindowQuery, CENSUS_HEADER};
use orbit_census::numeric::linear_fit;
use orbit_census::potential::{self, LatticeScreenOptions, Potential};
use orbit_census::symbolic::{self, Word};
use orbit_census::transfer::{self, PressureProfile};

use crate::config::{ConfigError, SystemSpec};
use crate::report::{opt_real, real, Table};
use crate::run::{self, Numerics, Reports};
use crate::systems;
use crate::{cells, RunError};

pub const SUITES: [&str; 3] = ["theorem1", "theorem2", "theorem4"];

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Theorem1Params {
    /// `z = c * alpha` for each `c`.
    pub z_fractions: Vec<f64>,
    pub p: f64,
    pub q: f64,
    pub delta: f64,
    pub n_min: usize,
    pub n_max: usize,
    /// Sliding blocks of `block` consecutive `n`, starting at `block_n_min`.
    pub block: usize,
    pub block_n_min: usize,
    pub squeeze_eta: f64,
    pub squeeze_n_max: usize,
}

impl Default for Theorem1Params {
    fn default() -> Self {
        Self {
            z_fractions: vec![0.0, 0.5, 1.0],
            p: -1.0,
            q: 1.0,
            delta: 0.05,
            n_min: 8,
            n_max: 20,
            block: 4,
            block_n_min: 12,
            squeeze_eta: 0.25,
            squeeze_n_max: 16,
        }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Theorem2Params {
    pub z_fraction: f64,
    pub p: f64,
    pub q: f64,
    pub delta: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub a: Vec<f64>,
}

impl Default for Theorem2Params {
    fn default() -> Self {
        Self {
            z_fraction: 0.5,
            p: -1.0,
            q: 1.0,
            delta: 0.05,
            n_min: 4,
            n_max: 10,
            a: vec![0.25, 0.5, 1.0, 2.0],
        }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Theorem4Params {
    pub depth: usize,
    pub window: usize,
    pub n_max: usize,
    pub z: f64,
    pub p: f64,
    pub q: f64,
    pub delta: f64,
}

impl Default for Theorem4Params {
    fn default() -> Self {
        Self {
            depth: 6,
            window: billiard::DEFAULT_WINDOW,
            n_max: 12,
            z: 0.0,
            p: -1.0,
            q: 1.0,
            delta: 0.05,
        }
    }
}

#[derive(Serialize)]
struct SuiteManifest<'a, P: Serialize> {
    tool: &'static str,
    version: &'static str,
    suite: &'a str,
    reports: Vec<String>,
    budget: u64,
    params: &'a P,
    systems: BTreeMap<String, SystemSpec>,
    numerics: Numerics,
}

pub struct SuiteOutput {
    pub tables: Reports,
    pub manifest: String,
}

fn manifest<P: Serialize>(suite: &str, tables: &Reports, params: &P, systems: &[(&str, SystemSpec)]) -> String {
    run::manifest_text(&SuiteManifest {
        tool: "orbit-census",
        version: env!("CARGO_PKG_VERSION"),
        suite,
        reports: tables.iter().map(|(n, _)| format!("{n}.csv")).collect(),
        budget: symbolic::DEFAULT_BUDGET as u64,
        params,
        systems: systems.iter().map(|(n, s)| (n.to_string(), s.clone())).collect(),
        numerics: Numerics::default(),
    })
}

fn profile_table(p: &PressureProfile) -> Table {
    let mut t = Table::new(run::profile_header());
    t.push(run::profile_row(p));
    t
}

fn census_options(f: &Potential, prof: &PressureProfile) -> Result<(CensusOptions, Table), RunError> {
    let budget = symbolic::DEFAULT_BUDGET;
    let screen = potential::screen_lattice(f, LatticeScreenOptions::default())?;
    let decay = transfer::norm_decay_probe(f, prof.p, run::SCREEN_U, run::SCREEN_N_MAX, run::SCREEN_THETA)?;
    let mut t = Table::new("verdict,gamma0,gamma1,max_residual,orbits_tested,rho_hat,delta_limit");
    t.push(cells![
        screen.verdict.as_str(),
        real(screen.gamma0),
        real(screen.gamma1),
        real(screen.max_residual),
        screen.orbits_tested,
        real(decay.rho_hat),
        real(-decay.rho_hat.ln() / 3.0),
    ]);
    let opts = CensusOptions {
        budget,
        hypotheses: census::Hypotheses {
            lattice: Some(screen.verdict),
            rho_hat: Some(decay.rho_hat),
        },
        ..CensusOptions::default()
    };
    Ok((opts, t))
}

/// Block means of consecutive ratios and the least-squares trend of their
/// distance from 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Drift {
    pub z: f64,
    /// `(n_first, n_last, mean_ratio)` per block.
    pub blocks: Vec<(usize, usize, f64)>,
    pub slope: f64,
}

impl Drift {
    pub fn from_ratios(z: f64, ratios: &[(usize, f64)], block: usize) -> Option<Self> {
        let blocks: Vec<(usize, usize, f64)> = ratios
            .windows(block)
            .map(|w| (w[0].0, w[block - 1].0, w.iter().map(|r| r.1).sum::<f64>() / block as f64))
            .collect();
        let xs: Vec<f64> = (0..blocks.len()).map(|i| i as f64).collect();
        let ys: Vec<f64> = blocks.iter().map(|b| (b.2 - 1.0).abs()).collect();
        let fit = linear_fit(&xs, &ys)?;
        Some(Self {
            z,
            blocks,
            slope: fit.slope,
        })
    }
}

pub fn theorem1(params: &Theorem1Params) -> Result<SuiteOutput, RunError> {
    let spec = systems::non_lattice();
    let f = systems::build(&spec)?.potential;
    let prof = transfer::pressure_profile(&f)?;
    let (opts, screen) = census_options(&f, &prof)?;
    let mut ratios = Table::new(CENSUS_HEADER);
    let mut blocks = Table::new("z,n_first,n_last,mean_ratio,abs_deviation");
    let mut drift = Table::new("z,blocks,slope,first_abs_deviation,last_abs_deviation,min_mean_ratio,max_mean_ratio");
    let mut squeeze = Table::new("n,z,smoothed_lower,count,smoothed_upper,predicted");
    for &c in &params.z_fractions {
        let z = c * prof.alpha;
        let mut series = Vec::new();
        for n in params.n_min..=params.n_max {
            let q = WindowQuery::new(z, params.p, params.q, params.delta, n)?;
            let r = census::count_fixed_in_window(&f, &prof, &q, &opts)?;
            ratios.push_csv_lines(&r.csv_rows());
            if n >= params.block_n_min {
                if let Some(x) = r.ratio() {
                    series.push((n, x));
                }
            }
            if n <= params.squeeze_n_max {
                let (lower, upper) = Bump::squeeze(params.p, params.q, params.squeeze_eta)?;
                let lo = census::smoothed_sum(&f, &prof, &lower, z, params.delta, n, &opts)?;
                let hi = census::smoothed_sum(&f, &prof, &upper, z, params.delta, n, &opts)?;
                squeeze.push(cells![n, real(z), real(lo.value), r.empirical, real(hi.value), opt_real(r.predicted)]);
            }
        }
        if let Some(d) = Drift::from_ratios(z, &series, params.block) {
            for &(a, b, m) in &d.blocks {
                blocks.push(cells![real(z), a, b, real(m), real((m - 1.0).abs())]);
            }
            let means: Vec<f64> = d.blocks.iter().map(|b| b.2).collect();
            drift.push(cells![
                real(z),
                d.blocks.len(),
                real(d.slope),
                real((means[0] - 1.0).abs()),
                real((means[means.len() - 1] - 1.0).abs()),
                real(means.iter().copied().fold(f64::INFINITY, f64::min)),
                real(means.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            ]);
        }
    }
    let tables: Reports = vec![
        ("profile".into(), profile_table(&prof)),
        ("screen".into(), screen),
        ("ratios".into(), ratios),
        ("blocks".into(), blocks),
        ("drift".into(), drift),
        ("squeeze".into(), squeeze),
    ];
    let manifest = manifest("theorem1", &tables, params, &[("non-lattice", spec)]);
    Ok(SuiteOutput { tables, manifest })
}

pub fn theorem2(params: &Theorem2Params) -> Result<SuiteOutput, RunError> {
    let spec = systems::non_lattice();
    let f = systems::build(&spec)?.potential;
    let prof = transfer::pressure_profile(&f)?;
    let (opts, screen) = census_options(&f, &prof)?;
    let z = params.z_fraction * prof.alpha;
    let mut counts = Table::new(CENSUS_HEADER);
    let mut brackets = Table::new("n,a,empirical,lower,upper,empirical_over_lower,empirical_over_upper");
    for n in params.n_min..=params.n_max {
        let q = WindowQuery::new(z, params.p, params.q, params.delta, n)?;
        let r = census::count_i(&f, &prof, &q, &params.a, &opts)?;
        counts.push_csv_lines(&r.csv_rows());
        for b in &r.brackets {
            let e = r.empirical as f64;
            brackets.push(cells![n, real(b.a), r.empirical, real(b.lower), real(b.upper), real(e / b.lower), real(e / b.upper)]);
        }
    }
    let tables: Reports = vec![
        ("profile".into(), profile_table(&prof)),
        ("screen".into(), screen),
        ("counts".into(), counts),
        ("brackets".into(), brackets),
    ];
    let manifest = manifest("theorem2", &tables, params, &[("non-lattice", spec)]);
    Ok(SuiteOutput { tables, manifest })
}

/// Exact-length census of the symmetric three-disk billiard.
#[derive(Clone, Debug, PartialEq)]
pub struct BilliardCensusRow {
    pub n: usize,
    pub window: (f64, f64),
    pub m_range: (usize, usize),
    /// Primitive orbits of any length with period in the window.
    pub orbits_all: usize,
    pub m_seen: Option<(usize, usize)>,
    /// Primitive orbits with exactly `n` reflections in the window.
    pub orbits_n: usize,
    /// Periodic points of primitive period `n` in the window, found by
    /// enumerating words rather than orbits.
    pub points_n: usize,
    pub predicted_n: Option<f64>,
}

pub struct BilliardCensus {
    pub scene: ValidatedScene,
    pub potential: Potential,
    pub profile: PressureProfile,
    pub spectrum: billiard::LengthSpectrum,
    pub rows: Vec<BilliardCensusRow>,
    /// Orbits whose exact length leaves `[m d0, m d1]`.
    pub outside_bounds: usize,
    /// Largest length difference between a code and its reversal.
    pub max_reversal_diff: f64,
    pub max_residual: f64,
}

pub fn billiard_census(params: &Theorem4Params) -> Result<BilliardCensus, RunError> {
    let spec = systems::symmetric_billiard(params.depth);
    let built = systems::build(&spec)?;
    let scene = built.scene.expect("billiard system");
    let f = built.potential;
    let prof = transfer::pressure_profile(&f)?;
    let spectrum = billiard::length_spectrum(&scene, params.n_max, symbolic::DEFAULT_BUDGET)?;
    let lengths: HashMap<&Word, f64> = spectrum
        .orbits
        .iter()
        .map(|e| (&e.record.canonical_word, e.path.total_length))
        .collect();
    let (d0, d1) = (f.d0(), f.d1());
    let outside_bounds = spectrum
        .orbits
        .iter()
        .filter(|e| {
            let m = e.record.length as f64;
            e.path.total_length < m * d0 || e.path.total_length > m * d1
        })
        .count();
    let reversed = orbit_census::par::try_map(&spectrum.orbits, |e| {
        billiard::solve_orbit(&scene, &e.record.canonical_word.reversed()).map(|p| (p.total_length - e.path.total_length).abs())
    })?;
    let max_reversal_diff = reversed.into_iter().fold(0.0, f64::max);
    let max_residual = spectrum.orbits.iter().map(|e| e.path.residual).fold(0.0, f64::max);
    let mut rows = Vec::new();
    for n in 2..=params.n_max {
        let q = WindowQuery::new(params.z, params.p, params.q, params.delta, n)?;
        let (lo, hi) = q.bounds(prof.alpha);
        let m_range = census::period_range(&f, lo, hi)?;
        let inside: Vec<usize> = spectrum
            .orbits
            .iter()
            .filter(|e| e.path.total_length >= lo && e.path.total_length <= hi)
            .map(|e| e.record.length)
            .collect();
        let orbits_n = inside.iter().filter(|&&m| m == n).count();
        let mut points_n = 0;
        for w in symbolic::enumerate_periodic(scene.matrix(), n, symbolic::DEFAULT_BUDGET)? {
            if !w.is_primitive() {
                continue;
            }
            let t = lengths[&w.canonical_rotation()];
            if t >= lo && t <= hi {
                points_n += 1;
            }
        }
        rows.push(BilliardCensusRow {
            n,
            window: (lo, hi),
            m_range,
            orbits_all: inside.len(),
            m_seen: inside.iter().min().zip(inside.iter().max()).map(|(a, b)| (*a, *b)),
            orbits_n,
            points_n,
            predicted_n: census::predicted_primitive(&prof, &q),
        });
    }
    Ok(BilliardCensus {
        scene,
        potential: f,
        profile: prof,
        spectrum,
        rows,
        outside_bounds,
        max_reversal_diff,
        max_residual,
    })
}

pub fn theorem4(params: &Theorem4Params) -> Result<SuiteOutput, RunError> {
    let c = billiard_census(params)?;
    let kappa = c.scene.scene().kappa();
    let mut spectrum = Table::new("word,reflections,length,residual");
    for e in &c.spectrum.orbits {
        spectrum.push(cells![
            e.record.canonical_word.format(kappa),
            e.record.length,
            real(e.path.total_length),
            real(e.path.residual),
        ]);
    }
    // Periods are exact solver lengths; P, alpha and sigma0 come from the
    // depth-k potential.
    let flags = format!("exact-periods;depth-{}-constants", params.depth);
    let mut counts = Table::new(
        "n,z,p,q,delta,epsilon_n,window_lo,window_hi,m_lo,m_hi,orbits_all,m_min_seen,m_max_seen,orbits_n,points_n,predicted_n,ratio_n,flags",
    );
    for r in &c.rows {
        let eps = (-params.delta * r.n as f64).exp();
        let (mmin, mmax) = r
            .m_seen
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .unwrap_or_default();
        counts.push(cells![
            r.n,
            real(params.z),
            real(params.p),
            real(params.q),
            real(params.delta),
            real(eps),
            real(r.window.0),
            real(r.window.1),
            r.m_range.0,
            r.m_range.1,
            r.orbits_all,
            mmin,
            mmax,
            r.orbits_n,
            r.points_n,
            opt_real(r.predicted_n),
            opt_real(r.predicted_n.filter(|&p| p > 0.0).map(|p| r.orbits_n as f64 / p)),
            flags.as_str(),
        ]);
    }
    let cert = c.scene.certificate();
    let mut summary = Table::new(
        "orbits,failures,max_residual,max_reversal_diff,outside_period_bounds,d0,d1,h_min_margin,h_min_gap",
    );
    summary.push(cells![
        c.spectrum.orbits.len(),
        c.spectrum.failures.len(),
        real(c.max_residual),
        real(c.max_reversal_diff),
        c.outside_bounds,
        real(c.potential.d0()),
        real(c.potential.d1()),
        real(cert.min_margin),
        real(cert.min_gap),
    ]);
    let tables: Reports = vec![
        ("profile".into(), profile_table(&c.profile)),
        ("summary".into(), summary),
        ("spectrum".into(), spectrum),
        ("counts".into(), counts),
    ];
    let spec = systems::symmetric_billiard(params.depth);
    let manifest = manifest("theorem4", &tables, params, &[("symmetric-billiard", spec)]);
    Ok(SuiteOutput { tables, manifest })
}

pub fn compute(name: &str) -> Result<SuiteOutput, RunError> {
    match name {
        "theorem1" => theorem1(&Theorem1Params::default()),
        "theorem2" => theorem2(&Theorem2Params::default()),
        "theorem4" => theorem4(&Theorem4Params::default()),
        other => Err(RunError::Config(ConfigError::Field {
            field: "suite".into(),
            message: format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")),
        })),
    }
}

/// Run suite `name` and write it under `<out_dir>/<name>/`.
pub fn reproduce(name: &str, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let out = compute(name)?;
    let dir = out_dir.join(name);
    let mut written = Vec::new();
    for (table, t) in &out.tables {
        let path = dir.join(format!("{table}.csv"));
        run::write_file(&path, &t.to_csv())?;
        written.push(path);
    }
    let path = dir.join("manifest.toml");
    run::write_file(&path, &out.manifest)?;
    written.push(path);
    Ok(written)
}
