//! Executing one experiment config and writing its reports.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use orbit_census::billiard::{self, OrbitOptions, ValidatedScene};
use orbit_census::census::{self, CensusOptions, CensusReport, Hypotheses, WindowQuery, CENSUS_HEADER};
use orbit_census::potential::{self, LatticeScreenOptions, Potential};
use orbit_census::symbolic::{self, Word};
use orbit_census::transfer::{self, ConstantsOptions, PressureProfile, RootOptions};

use crate::config::{ExperimentConfig, Format, Task, WindowSpec};
use crate::report::{opt_real, real, Table};
use crate::systems::{self, Built};
use crate::{cells, RunError};

/// Frequency, depth and Hölder base of the decay probe behind `rho_hat`.
pub const SCREEN_U: f64 = 1.0;
pub const SCREEN_N_MAX: usize = 12;
pub const SCREEN_THETA: f64 = 0.5;

/// Every numerical default that can influence a reported number.
#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Numerics {
    pub eig_tol: f64,
    pub eig_max_iter: usize,
    pub degenerate_tol: f64,
    pub root_tol: f64,
    pub root_max_iter: usize,
    pub fd_step: f64,
    pub fd_step2: f64,
    pub cross_tol: f64,
    pub sigma_floor: f64,
    pub orbit_tol: f64,
    pub orbit_max_sweeps: usize,
    pub screen_u: f64,
    pub screen_n_max: usize,
    pub screen_theta: f64,
    pub lattice_n_max: usize,
    pub lattice_tol: f64,
    pub non_lattice_floor: f64,
    pub lattice_max_divisor: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        let c = ConstantsOptions::default();
        let r = RootOptions::default();
        let o = OrbitOptions::default();
        let l = LatticeScreenOptions::default();
        Self {
            eig_tol: r.eigen.eig_tol,
            eig_max_iter: r.eigen.max_iter,
            degenerate_tol: r.eigen.degenerate_tol,
            root_tol: r.root_tol,
            root_max_iter: r.max_iter,
            fd_step: c.fd_step,
            fd_step2: c.fd_step2,
            cross_tol: c.cross_tol,
            sigma_floor: c.sigma_floor,
            orbit_tol: o.orbit_tol,
            orbit_max_sweeps: o.max_sweeps,
            screen_u: SCREEN_U,
            screen_n_max: SCREEN_N_MAX,
            screen_theta: SCREEN_THETA,
            lattice_n_max: l.n_max,
            lattice_tol: l.lattice_tol,
            non_lattice_floor: l.non_lattice_floor,
            lattice_max_divisor: l.max_divisor,
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    seed: Option<u64>,
    reports: Vec<String>,
    config: &'a ExperimentConfig,
    numerics: Numerics,
}

/// Named output tables; the empty name is the main report.
pub type Reports = Vec<(String, Table)>;

pub fn profile_header() -> &'static str {
    "p,alpha,alpha_fd,sigma0_sq,sigma0_sq_fd,entropy,variational_defect,d0,d1,depth,lambda,eigen_iterations,eigen_residual,lattice_warning"
}

pub fn profile_row(p: &PressureProfile) -> Vec<String> {
    cells![
        real(p.p),
        real(p.alpha),
        real(p.alpha_fd),
        real(p.sigma0_sq),
        real(p.sigma0_sq_fd),
        real(p.entropy),
        real(p.variational_defect()),
        real(p.d0),
        real(p.d1),
        p.depth,
        real(p.lambda),
        p.eigen_iterations,
        real(p.eigen_residual),
        p.lattice_warning,
    ]
}

/// Lattice verdict and fitted decay rate, attached to census reports as flags.
pub fn hypotheses(f: &Potential, prof: &PressureProfile, budget: u128) -> Result<Hypotheses, RunError> {
    let screen = potential::screen_lattice(
        f,
        LatticeScreenOptions {
            budget,
            ..LatticeScreenOptions::default()
        },
    )?;
    let decay = transfer::norm_decay_probe(f, prof.p, SCREEN_U, SCREEN_N_MAX, SCREEN_THETA)?;
    Ok(Hypotheses {
        lattice: Some(screen.verdict),
        rho_hat: Some(decay.rho_hat),
    })
}

fn queries(w: &WindowSpec, alpha: f64) -> Result<Vec<WindowQuery>, RunError> {
    let z = w.z.resolve(alpha);
    (w.n_min..=w.n_max)
        .map(|n| Ok(WindowQuery::new(z, w.p, w.q, w.delta, n)?))
        .collect()
}

/// Compute every table for `cfg` without touching the filesystem.
pub fn execute(cfg: &ExperimentConfig, seed: Option<u64>) -> Result<Reports, RunError> {
    let Built { potential: f, scene } = systems::build(&cfg.system)?;
    let budget = u128::from(cfg.budget);
    let needs_profile = !matches!(cfg.task, Task::Spectrum { .. });
    let prof = if needs_profile {
        Some(transfer::pressure_profile(&f)?)
    } else {
        None
    };
    let opts = match (&prof, cfg.screen) {
        (Some(p), true) => CensusOptions {
            budget,
            hypotheses: hypotheses(&f, p, budget)?,
            ..CensusOptions::default()
        },
        _ => CensusOptions {
            budget,
            ..CensusOptions::default()
        },
    };
    // Billiard periods here come from the depth-k potential, not the solver.
    let note = scene.as_ref().map(|_| format!("depth-{}-periods", f.depth()));
    let noted = |mut flags: Vec<String>| {
        flags.extend(note.clone());
        flags
    };
    let rows = |mut r: CensusReport| {
        r.flags = noted(std::mem::take(&mut r.flags));
        r.csv_rows()
    };
    let mut out: Reports = Vec::new();
    match &cfg.task {
        Task::Pressure => {
            let p = prof.as_ref().expect("profile computed");
            let mut t = Table::new(profile_header());
            t.push(profile_row(p));
            out.push((String::new(), t));
            let mut w = Table::new("word,weight");
            for (word, weight) in f.cylinders().words().iter().zip(&p.weights) {
                w.push(cells![word.format(f.matrix().size()), real(*weight)]);
            }
            out.push(("weights".into(), w));
            if let Some(s) = &scene {
                let c = s.certificate();
                let mut t = Table::new("passed,min_margin,worst_i,worst_j,worst_l,min_gap");
                t.push(cells![c.passed, real(c.min_margin), c.worst.0, c.worst.1, c.worst.2, real(c.min_gap)]);
                out.push(("certificate".into(), t));
            }
        }
        Task::CountWindow { window } => {
            let p = prof.as_ref().expect("profile computed");
            let mut t = Table::new(CENSUS_HEADER);
            for q in queries(window, p.alpha)? {
                t.push_csv_lines(&rows(census::count_fixed_in_window(&f, p, &q, &opts)?));
            }
            out.push((String::new(), t));
        }
        Task::CountI { window, a } => {
            let p = prof.as_ref().expect("profile computed");
            let mut t = Table::new(CENSUS_HEADER);
            let mut b = Table::new("n,a,empirical,lower,upper");
            for q in queries(window, p.alpha)? {
                let r = census::count_i(&f, p, &q, a, &opts)?;
                t.push_csv_lines(&rows(r.clone()));
                for br in &r.brackets {
                    b.push(cells![q.n, real(br.a), r.empirical, real(br.lower), real(br.upper)]);
                }
            }
            out.push((String::new(), t));
            out.push(("brackets".into(), b));
        }
        Task::PrimitiveWindow { window } => {
            let p = prof.as_ref().expect("profile computed");
            let kappa = f.matrix().size();
            let mut t = Table::new(CENSUS_HEADER);
            let mut o = Table::new("n,word,length,period");
            for q in queries(window, p.alpha)? {
                let r = census::count_primitive_orbits_in_window(&f, p, &q, &[], &opts)?;
                t.push_csv_lines(&rows(r.clone()));
                for (w, period) in &r.orbits {
                    o.push(cells![q.n, w.format(kappa), w.len(), real(*period)]);
                }
            }
            out.push((String::new(), t));
            out.push(("orbits".into(), o));
        }
        Task::Smoothed {
            z,
            delta,
            n_min,
            n_max,
            chi,
        } => {
            let p = prof.as_ref().expect("profile computed");
            let z = z.resolve(p.alpha);
            let mut t = Table::new("n,z,delta,epsilon_n,value,predicted,ratio,flags");
            for n in *n_min..=*n_max {
                let s = census::smoothed_sum(&f, p, &chi.bump(), z, *delta, n, &opts)?;
                t.push(cells![
                    n,
                    real(s.z),
                    real(s.delta),
                    real(s.epsilon),
                    real(s.value),
                    opt_real(s.predicted),
                    opt_real(s.ratio()),
                    noted(s.flags).join(";"),
                ]);
            }
            out.push((String::new(), t));
        }
        Task::Lemma1 { u, n_min, n_max } => {
            let p = prof.as_ref().expect("profile computed");
            let l = census::lemma1_residual(&f, p.p, *u, *n_min..=*n_max, budget)?;
            let mut t = Table::new("n,sum_re,sum_im,lambda_pow_re,lambda_pow_im,residual");
            for r in &l.rows {
                t.push(cells![
                    r.n,
                    real(r.periodic_sum.re),
                    real(r.periodic_sum.im),
                    real(r.lambda_pow.re),
                    real(r.lambda_pow.im),
                    real(r.residual),
                ]);
            }
            out.push((String::new(), t));
            let mut fit = Table::new("u,lambda_re,lambda_im,theta1_hat,r_squared");
            fit.push(cells![
                real(l.u),
                real(l.lambda.re),
                real(l.lambda.im),
                opt_real(l.theta1_hat),
                opt_real(l.r_squared),
            ]);
            out.push(("fit".into(), fit));
        }
        Task::RuelleLemma { t, u, n_min, n_max } => {
            let rows = census::ruelle_lemma_residual(&f, *t, *u, *n_min..=*n_max, budget)?;
            let mut tab = Table::new("n,lhs_re,lhs_im,rhs_re,rhs_im,residual");
            for r in rows {
                tab.push(cells![
                    r.n,
                    real(r.lhs.re),
                    real(r.lhs.im),
                    real(r.rhs.re),
                    real(r.rhs.im),
                    real(r.residual),
                ]);
            }
            out.push((String::new(), tab));
        }
        Task::Spectrum { n_max } => match &scene {
            Some(s) => out.extend(billiard_spectrum(s, *n_max, budget, seed)?),
            None => {
                let kappa = f.matrix().size();
                let mut t = Table::new("word,length,period");
                let mut all = Vec::new();
                for n in 1..=*n_max {
                    for w in symbolic::primitive_orbits(f.matrix(), n, budget)? {
                        let period = f.birkhoff_sum(w.symbols())?;
                        all.push((w, period));
                    }
                }
                all.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
                for (w, period) in all {
                    t.push(cells![w.format(kappa), w.len(), real(period)]);
                }
                out.push((String::new(), t));
            }
        },
        Task::PrimeCount {
            x_max,
            grid,
            s_values,
            zeta_terms,
        } => {
            let p = prof.as_ref().expect("profile computed");
            let table = census::prime_orbit_counter(&f, *x_max, grid, s_values, *zeta_terms, budget)?;
            let mut g = Table::new("x,count");
            for (x, c) in &table.grid {
                g.push(cells![real(*x), c]);
            }
            out.push((String::new(), g));
            let mut h = Table::new("x_max,orbits,h_hat,p,p_alpha");
            h.push(cells![
                real(table.x_max),
                table.orbits.len(),
                opt_real(table.h_hat),
                real(p.p),
                real(p.p * p.alpha),
            ]);
            out.push(("growth".into(), h));
            let mut z = Table::new("s,partial_sum,terms");
            for (s, v) in &table.zeta {
                z.push(cells![real(*s), real(*v), table.zeta_terms]);
            }
            out.push(("zeta".into(), z));
            let kappa = f.matrix().size();
            let mut o = Table::new("word,length,period");
            for (w, t) in &table.orbits {
                o.push(cells![w.format(kappa), w.len(), real(*t)]);
            }
            out.push(("orbits".into(), o));
        }
        Task::DecayProbe { u, n_max, theta } => {
            let p = prof.as_ref().expect("profile computed");
            let d = transfer::norm_decay_probe(&f, p.p, *u, *n_max, *theta)?;
            let mut t = Table::new("n,sup_norm,seminorm,combined");
            for r in &d.rows {
                t.push(cells![r.n, real(r.sup_norm), real(r.seminorm), real(r.combined)]);
            }
            out.push((String::new(), t));
            let mut fit = Table::new("u,theta,rho_hat,fit_rms");
            fit.push(cells![real(d.u), real(d.theta), real(d.rho_hat), real(d.fit_rms)]);
            out.push(("fit".into(), fit));
        }
    }
    Ok(out)
}

fn billiard_spectrum(s: &ValidatedScene, n_max: usize, budget: u128, seed: Option<u64>) -> Result<Reports, RunError> {
    let spec = billiard::length_spectrum(s, n_max, budget)?;
    let kappa = s.scene().kappa();
    let mut t = Table::new("word,reflections,length,residual");
    for e in &spec.orbits {
        t.push(cells![
            e.record.canonical_word.format(kappa),
            e.record.length,
            real(e.path.total_length),
            real(e.path.residual),
        ]);
    }
    let mut out = vec![(String::new(), t)];
    let mut fail = Table::new("word,error");
    for (w, e) in &spec.failures {
        fail.push(cells![w.format(kappa), e.to_string().replace(',', ";")]);
    }
    out.push(("failures".into(), fail));
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Table::new("word,length,restart_length,abs_diff");
        for e in &spec.orbits {
            let w: &Word = &e.record.canonical_word;
            let start: Vec<f64> = (0..w.len()).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
            let restart = billiard::solve_orbit_with(s, w, Some(&start), OrbitOptions::default())
                .map(|p| p.total_length)
                .ok();
            m.push(cells![
                w.format(kappa),
                real(e.path.total_length),
                opt_real(restart),
                opt_real(restart.map(|r| (r - e.path.total_length).abs())),
            ]);
        }
        out.push(("multistart".into(), m));
    }
    Ok(out)
}

/// Path of a named table next to the main report `main`.
pub fn sibling(main: &Path, name: &str, format: Format) -> PathBuf {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let stem = main.file_stem().expect("validated file name").to_string_lossy();
    let file = if name.is_empty() {
        format!("{stem}.{ext}")
    } else {
        format!("{stem}.{name}.{ext}")
    };
    main.with_file_name(file)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), RunError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| RunError::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
    }
    std::fs::write(path, text).map_err(|e| RunError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn manifest_text<T: Serialize>(value: &T) -> String {
    toml::to_string(value).expect("manifest values serialize")
}

/// Run `cfg`, writing every table under `out_dir` plus a manifest that echoes
/// the resolved config. Returns the written paths.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path, seed: Option<u64>) -> Result<Vec<PathBuf>, RunError> {
    let reports = execute(cfg, seed)?;
    let main = out_dir.join(&cfg.output.path);
    let mut written = Vec::new();
    for (name, table) in &reports {
        let path = sibling(&main, name, cfg.output.format);
        let text = match cfg.output.format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json(),
        };
        write_file(&path, &text)?;
        written.push(path);
    }
    let manifest = Manifest {
        tool: "orbit-census",
        version: env!("CARGO_PKG_VERSION"),
        seed,
        reports: written
            .iter()
            .map(|p| p.file_name().expect("file").to_string_lossy().into_owned())
            .collect(),
        config: cfg,
        numerics: Numerics::default(),
    };
    let mpath = main.with_file_name(format!(
        "{}.manifest.toml",
        main.file_stem().expect("validated file name").to_string_lossy()
    ));
    write_file(&mpath, &manifest_text(&manifest))?;
    written.push(mpath);
    Ok(written)
}
