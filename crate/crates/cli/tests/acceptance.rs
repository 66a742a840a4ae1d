//! Desk-scale acceptance run: one PASS/FAIL line per criterion.
//!
//! Built with `harness = false`, so every line prints even when an earlier
//! criterion fails; the process exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use orbit_census::billiard::{self, BilliardScene, ValidatedScene};
use orbit_census::census::{self, Bump, CensusOptions, WindowQuery};
use orbit_census::potential::Potential;
use orbit_census::symbolic::{self, TransitionMatrix, Word, DEFAULT_BUDGET};
use orbit_census::transfer;
use orbit_census_cli::suites::{self, Theorem1Params, Theorem4Params};
use orbit_census_cli::systems;

const TRACE_N_MAX: usize = 20;
const TRACE_SECONDS: u64 = 10;
const GOLDEN_TOL: f64 = 1e-9;
const GOLDEN_SUM_N_MAX: usize = 30;
const GOLDEN_SUM_TOL: f64 = 1e-12;
const VARIATIONAL_TOL: f64 = 1e-8;
const RESIDUAL_REL_TOL: f64 = 1e-9;
const RESIDUAL_N_MAX: usize = 20;
const DECAY_U: f64 = 0.1;
const DECAY_R2_MIN: f64 = 0.99;
const RATIO_RANGE: (f64, f64) = (0.5, 2.0);
const RATIO_SECONDS: u64 = 600;
const TWO_ORBIT_TOL: f64 = 1e-10;
const TRIANGLE_TOL: f64 = 1e-9;
const REFLECTION_TOL: f64 = 1e-12;
const REVERSAL_TOL: f64 = 1e-12;
const BILLIARD_N_MAX: usize = 10;
const SQUEEZE_N_MAX: usize = 16;
const SQUEEZE_ETA: f64 = 0.25;
const CENSUS_N_MAX: usize = 12;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bundled(name: &str) -> Potential {
    let spec = systems::bundled()
        .into_iter()
        .find(|(n, _)| n == name)
        .unwrap_or_else(|| panic!("no bundled system {name}"))
        .1;
    systems::build_bundled(&spec)
}

/// `trace(A^n)` by exact integer matrix powers.
fn integer_trace(rows: &[Vec<u8>], n: usize) -> u128 {
    let k = rows.len();
    let a: Vec<Vec<u128>> = rows.iter().map(|r| r.iter().map(|&x| x as u128).collect()).collect();
    let mut p = a.clone();
    for _ in 1..n {
        let mut next = vec![vec![0u128; k]; k];
        for i in 0..k {
            for j in 0..k {
                next[i][j] = (0..k).map(|l| p[i][l] * a[l][j]).sum();
            }
        }
        p = next;
    }
    (0..k).map(|i| p[i][i]).sum()
}

fn trace_identity() -> Outcome {
    let start = Instant::now();
    let shifts: [(&str, TransitionMatrix, fn(usize) -> i128); 2] = [
        ("full 2-shift", TransitionMatrix::full_shift(2), |n| 1i128 << n),
        ("no-repeat 3-shift", TransitionMatrix::no_repeat(3), |n| {
            (1i128 << n) + if n % 2 == 0 { 2 } else { -2 }
        }),
    ];
    for (name, a, closed) in &shifts {
        for n in 1..=TRACE_N_MAX {
            let expected = closed(n) as u128;
            let trace = symbolic::count_fixed_points(a, n).map_err(|e| e.to_string())?;
            let listed = symbolic::enumerate_periodic(a, n, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            let oracle = integer_trace(&a.rows(), n);
            if trace != expected || listed.len() as u128 != expected || oracle != expected {
                return Err(format!(
                    "{name} n={n}: trace {trace}, enumerated {}, oracle {oracle}, closed form {expected}",
                    listed.len()
                ));
            }
        }
    }
    let secs = start.elapsed();
    check(
        secs < Duration::from_secs(TRACE_SECONDS),
        format!("n <= {TRACE_N_MAX} exact on both shifts in {:.2} s (limit {TRACE_SECONDS} s)", secs.as_secs_f64()),
    )
}

fn golden_closed_forms() -> Outcome {
    let f = bundled("golden");
    let prof = transfer::pressure_profile(&f).map_err(|e| e.to_string())?;
    let x = (5f64.sqrt() - 1.0) / 2.0;
    let p = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let alpha = 2.0 - x;
    let errors = [
        ("P", (prof.p - p).abs()),
        ("alpha", (prof.alpha - alpha).abs()),
        ("sigma0^2", (prof.sigma0_sq - x * (1.0 - x)).abs()),
        ("h", (prof.entropy - p * alpha).abs()),
    ];
    let mut drift: f64 = 0.0;
    for n in 1..=GOLDEN_SUM_N_MAX {
        let s = census::periodic_sum_real(&f, n, -prof.p, u128::MAX).map_err(|e| e.to_string())?;
        drift = drift.max((s - 1.0).abs());
    }
    let worst = errors.iter().map(|e| e.1).fold(0.0, f64::max);
    let detail = errors
        .iter()
        .map(|(k, e)| format!("|d{k}| = {e:.2e}"))
        .collect::<Vec<_>>()
        .join(", ");
    check(
        worst <= GOLDEN_TOL && drift <= GOLDEN_SUM_TOL,
        format!("{detail}; periodic-sum drift {drift:.2e} over n <= {GOLDEN_SUM_N_MAX} (tol {GOLDEN_TOL:e}, {GOLDEN_SUM_TOL:e})"),
    )
}

fn variational_identity() -> Outcome {
    let mut worst = (String::new(), 0.0f64);
    for (name, spec) in systems::bundled() {
        let f = systems::build_bundled(&spec);
        let prof = transfer::pressure_profile(&f).map_err(|e| format!("{name}: {e}"))?;
        let d = prof.variational_defect();
        if !(d <= worst.1) {
            worst = (name, d);
        }
    }
    check(
        worst.1 <= VARIATIONAL_TOL,
        format!("max |h - P alpha| = {:.2e} ({}) over all bundled systems (tol {VARIATIONAL_TOL:e})", worst.1, worst.0),
    )
}

fn residual_against_spectrum() -> Outcome {
    let f = bundled("random-depth2");
    let p = transfer::solve_p(&f).map_err(|e| e.to_string())?;
    let k = f.depth();
    let table = census::lemma1_residual(&f, p, 0.0, k..=RESIDUAL_N_MAX, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let m = transfer::build_real_operator(&f, -p).map_err(|e| e.to_string())?;
    let ev = transfer::spectrum(&m).map_err(|e| e.to_string())?;
    let mut worst_rel: f64 = 0.0;
    for row in &table.rows {
        let (re, im) = ev[1..].iter().fold((0.0, 0.0), |(re, im), l| {
            let z = l.powu(row.n as u32);
            (re + z.re, im + z.im)
        });
        let oracle = re.hypot(im);
        worst_rel = worst_rel.max((row.residual - oracle).abs() / oracle);
    }
    let decay = census::lemma1_residual(&f, p, DECAY_U, k..=RESIDUAL_N_MAX, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let (theta, r2) = match (decay.theta1_hat, decay.r_squared) {
        (Some(t), Some(r)) => (t, r),
        _ => return Err(format!("u = {DECAY_U}: residual fit unavailable")),
    };
    check(
        worst_rel <= RESIDUAL_REL_TOL && theta < 1.0 && r2 > DECAY_R2_MIN,
        format!(
            "u = 0 max relative gap {worst_rel:.2e} (tol {RESIDUAL_REL_TOL:e}); u = {DECAY_U}: theta = {theta:.4}, R^2 = {r2:.4}"
        ),
    )
}

fn ratio_drift() -> Outcome {
    let start = Instant::now();
    let out = suites::theorem1(&Theorem1Params::default()).map_err(|e| e.to_string())?;
    let drift = &out
        .tables
        .iter()
        .find(|(n, _)| n == "drift")
        .ok_or("no drift table")?
        .1;
    let mut ok = drift.rows.len() == Theorem1Params::default().z_fractions.len();
    let mut parts = Vec::new();
    for i in 0..drift.rows.len() {
        let num = |c: &str| -> f64 { drift.get(i, c).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN) };
        let (z, slope, lo, hi) = (num("z"), num("slope"), num("min_mean_ratio"), num("max_mean_ratio"));
        ok &= lo >= RATIO_RANGE.0 && hi <= RATIO_RANGE.1 && slope <= 0.0;
        parts.push(format!("z={z:.4}: means in [{lo:.3}, {hi:.3}], slope {slope:.2e}"));
    }
    let secs = start.elapsed();
    ok &= secs < Duration::from_secs(RATIO_SECONDS);
    check(ok, format!("{} ({:.1} s, limit {RATIO_SECONDS} s)", parts.join("; "), secs.as_secs_f64()))
}

fn billiard_geometry() -> Outcome {
    let scene = ValidatedScene::new(BilliardScene::symmetric_three(6.0, 1.0).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let cert_ok = scene.certificate().passed;
    let length = |code: &str| -> Result<f64, String> {
        let w = Word::parse(code, 3).map_err(|e| e.to_string())?;
        Ok(billiard::solve_orbit(&scene, &w).map_err(|e| e.to_string())?.total_length)
    };
    let mut two: f64 = 0.0;
    for code in ["12", "13", "23"] {
        two = two.max((length(code)? - 8.0).abs());
    }
    let triangle = (length("123")? - 3.0 * (6.0 - 3f64.sqrt())).abs();
    let spectrum = billiard::length_spectrum(&scene, BILLIARD_N_MAX, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let residual = spectrum.orbits.iter().map(|e| e.path.residual).fold(0.0, f64::max);
    let mut reversal: f64 = 0.0;
    for e in &spectrum.orbits {
        let back = billiard::solve_orbit(&scene, &e.record.canonical_word.reversed()).map_err(|e| e.to_string())?;
        reversal = reversal.max((back.total_length - e.path.total_length).abs());
    }
    check(
        cert_ok
            && two <= TWO_ORBIT_TOL
            && triangle <= TRIANGLE_TOL
            && spectrum.failures.is_empty()
            && residual <= REFLECTION_TOL
            && reversal <= REVERSAL_TOL,
        format!(
            "no-eclipse {}; 2-orbits {two:.1e}; 123-orbit {triangle:.1e}; {} orbits n <= {BILLIARD_N_MAX}, {} failures, max residual {residual:.1e}, max reversal gap {reversal:.1e}",
            if cert_ok { "passed" } else { "FAILED" },
            spectrum.orbits.len(),
            spectrum.failures.len()
        ),
    )
}

fn squeeze() -> Outcome {
    let opts = CensusOptions::default();
    let (p, q, delta) = (-1.0, 1.0, 0.05);
    let (lower, upper) = Bump::squeeze(p, q, SQUEEZE_ETA).map_err(|e| e.to_string())?;
    let mut queries = 0;
    let mut violations = Vec::new();
    for (name, spec) in systems::bundled() {
        let f = systems::build_bundled(&spec);
        let prof = transfer::pressure_profile(&f).map_err(|e| e.to_string())?;
        for c in [0.0, 0.5, 1.0] {
            let z = c * prof.alpha;
            for n in 1..=SQUEEZE_N_MAX {
                let query = WindowQuery::new(z, p, q, delta, n).map_err(|e| e.to_string())?;
                let count = census::count_fixed_in_window(&f, &prof, &query, &opts).map_err(|e| e.to_string())?.empirical as f64;
                let lo = census::smoothed_sum(&f, &prof, &lower, z, delta, n, &opts).map_err(|e| e.to_string())?.value;
                let hi = census::smoothed_sum(&f, &prof, &upper, z, delta, n, &opts).map_err(|e| e.to_string())?.value;
                queries += 1;
                if !(lo <= count && count <= hi) {
                    violations.push(format!("{name} z={z:.3} n={n}: {lo} <= {count} <= {hi} fails"));
                }
            }
        }
    }
    check(
        violations.is_empty(),
        match violations.first() {
            None => format!("{queries} window queries, n <= {SQUEEZE_N_MAX}, eta = {SQUEEZE_ETA}"),
            Some(v) => format!("{} of {queries} violated, first: {v}", violations.len()),
        },
    )
}

fn billiard_consistency() -> Outcome {
    let c = suites::billiard_census(&Theorem4Params {
        n_max: CENSUS_N_MAX,
        ..Theorem4Params::default()
    })
    .map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    for r in &c.rows {
        if r.points_n != r.n * r.orbits_n {
            bad.push(format!("n={}: {} points vs {} orbits", r.n, r.points_n, r.orbits_n));
        }
        if let Some((lo, hi)) = r.m_seen {
            if lo < r.m_range.0 || hi > r.m_range.1 {
                bad.push(format!("n={}: periods {lo}..{hi} outside m-range {:?}", r.n, r.m_range));
            }
        }
    }
    let orbits: usize = c.rows.iter().map(|r| r.orbits_n).sum();
    check(
        bad.is_empty() && c.outside_bounds == 0 && c.spectrum.failures.is_empty(),
        format!(
            "{} rows, {orbits} windowed orbits, {} orbits outside [n d0, n d1], {} solver failures{}",
            c.rows.len(),
            c.outside_bounds,
            c.spectrum.failures.len(),
            bad.first().map(|b| format!("; first mismatch {b}")).unwrap_or_default()
        ),
    )
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).expect("readable report dir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&path).expect("readable report"));
            }
        }
    }
    out
}

fn reproduce_all(workers: usize) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for suite in suites::SUITES {
        let status = Command::new(env!("CARGO_BIN_EXE_orbit-census"))
            .args(["--workers", &workers.to_string(), "--out"])
            .arg(dir.path())
            .args(["reproduce", suite])
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!(
                "reproduce {suite} with {workers} workers: {}",
                String::from_utf8_lossy(&status.stderr).trim()
            ));
        }
    }
    Ok(read_tree(dir.path()))
}

fn determinism() -> Outcome {
    let one = reproduce_all(1)?;
    let eight = reproduce_all(8)?;
    let again = reproduce_all(8)?;
    let differing: Vec<&String> = one
        .keys()
        .chain(eight.keys())
        .filter(|k| one.get(*k) != eight.get(*k) || eight.get(*k) != again.get(*k))
        .collect();
    check(
        !one.is_empty() && differing.is_empty(),
        match differing.first() {
            None => format!("{} files byte-identical across workers 1, 8 and a repeat run", one.len()),
            Some(f) => format!("{} differing files, first {f}", differing.len()),
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("trace identity", trace_identity),
        ("golden closed forms", golden_closed_forms),
        ("variational identity", variational_identity),
        ("residual vs subleading spectrum", residual_against_spectrum),
        ("window ratio drift", ratio_drift),
        ("billiard geometry", billiard_geometry),
        ("squeeze", squeeze),
        ("billiard census consistency", billiard_consistency),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (verdict, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {}: {verdict} {name}: {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
