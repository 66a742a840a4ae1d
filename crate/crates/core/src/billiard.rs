//! Planar open billiards in the exterior of disjoint disks.
//!
//! A cyclic code `w` (no symbol repeated consecutively) determines a unique
//! periodic billiard orbit when no disk meets the convex hull of two others.
//! Orbits are found by minimising the total polygonal length over one boundary
//! angle per reflection.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::par;
use crate::potential::{Potential, Provenance, TwoSidedObservable};
use crate::symbolic::{self, OrbitRecord, Symbol, TransitionMatrix, Word};

type Vec2 = [f64; 2];

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: Vec2,
    pub radius: f64,
}

impl Disk {
    pub fn point(&self, angle: f64) -> Vec2 {
        [
            self.center[0] + self.radius * angle.cos(),
            self.center[1] + self.radius * angle.sin(),
        ]
    }

    /// Derivative of [`Self::point`] with respect to the angle.
    fn tangent(&self, angle: f64) -> Vec2 {
        [-self.radius * angle.sin(), self.radius * angle.cos()]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BilliardScene {
    disks: Vec<Disk>,
}

impl BilliardScene {
    pub fn new(disks: Vec<Disk>) -> Result<Self> {
        if disks.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "need at least 3 obstacles, got {}",
                disks.len()
            )));
        }
        if disks.len() > Symbol::MAX as usize {
            return Err(Error::InvalidInput("too many obstacles".into()));
        }
        for (i, d) in disks.iter().enumerate() {
            if !(d.radius > 0.0 && d.radius.is_finite() && d.center.iter().all(|c| c.is_finite())) {
                return Err(Error::InvalidInput(format!(
                    "obstacle {} needs a finite centre and positive radius",
                    i + 1
                )));
            }
        }
        Ok(Self { disks })
    }

    pub fn from_parts(centers: &[Vec2], radii: &[f64]) -> Result<Self> {
        if centers.len() != radii.len() {
            return Err(Error::InvalidInput(format!(
                "{} centres but {} radii",
                centers.len(),
                radii.len()
            )));
        }
        Self::new(
            centers
                .iter()
                .zip(radii)
                .map(|(&center, &radius)| Disk { center, radius })
                .collect(),
        )
    }

    /// Three disks of radius `r` centred on an equilateral triangle of side `l`.
    pub fn symmetric_three(l: f64, r: f64) -> Result<Self> {
        let h = l * 3f64.sqrt() / 2.0;
        Self::from_parts(&[[0.0, 0.0], [l, 0.0], [l / 2.0, h]], &[r, r, r])
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    pub fn kappa(&self) -> usize {
        self.disks.len()
    }

    /// Rigid motion: rotate by `angle` about the origin, then translate.
    pub fn moved(&self, angle: f64, shift: Vec2) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            disks: self
                .disks
                .iter()
                .map(|d| Disk {
                    center: [
                        c * d.center[0] - s * d.center[1] + shift[0],
                        s * d.center[0] + c * d.center[1] + shift[1],
                    ],
                    radius: d.radius,
                })
                .collect(),
        }
    }
}

/// Outcome of the no-eclipse test.
#[derive(Clone, Debug, PartialEq)]
pub struct HCertificate {
    pub passed: bool,
    /// Smallest `dist(c_l, hull(D_i, D_j)) - r_l` over all triples.
    pub min_margin: f64,
    /// Triple `(i, j, l)` realising the smallest margin.
    pub worst: (usize, usize, usize),
    /// Smallest boundary gap between two disks.
    pub min_gap: f64,
}

/// Signed distance from `x` to the convex hull of two disks.
///
/// The hull is the union of the disks `D((1-t) c_i + t c_j, (1-t) r_i + t r_j)`,
/// so the distance is `min_t |x - c(t)| - r(t)`, a convex function of `t`.
pub fn hull_distance(x: Vec2, a: &Disk, b: &Disk) -> f64 {
    let g = |t: f64| {
        let c = [
            (1.0 - t) * a.center[0] + t * b.center[0],
            (1.0 - t) * a.center[1] + t * b.center[1],
        ];
        norm(sub(x, c)) - ((1.0 - t) * a.radius + t * b.radius)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1) <= g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    g(0.5 * (lo + hi)).min(g(0.0)).min(g(1.0))
}

pub fn validate_scene(scene: &BilliardScene) -> Result<HCertificate> {
    let d = scene.disks();
    let mut min_gap = f64::INFINITY;
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let gap = norm(sub(d[i].center, d[j].center)) - d[i].radius - d[j].radius;
            if gap <= 0.0 {
                return Err(Error::Overlap(i + 1, j + 1));
            }
            min_gap = min_gap.min(gap);
        }
    }
    let mut min_margin = f64::INFINITY;
    let mut worst = (0, 0, 0);
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            for l in 0..d.len() {
                if l == i || l == j {
                    continue;
                }
                let margin = hull_distance(d[l].center, &d[i], &d[j]) - d[l].radius;
                if margin < min_margin {
                    min_margin = margin;
                    worst = (i + 1, j + 1, l + 1);
                }
            }
        }
    }
    Ok(HCertificate {
        passed: min_margin > 0.0,
        min_margin,
        worst,
        min_gap,
    })
}

/// A scene that passed the no-eclipse test.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedScene {
    scene: BilliardScene,
    certificate: HCertificate,
    matrix: TransitionMatrix,
}

impl ValidatedScene {
    pub fn new(scene: BilliardScene) -> Result<Self> {
        let certificate = validate_scene(&scene)?;
        if !certificate.passed {
            let (i, j, l) = certificate.worst;
            return Err(Error::EclipseViolation(i, j, l));
        }
        let matrix = TransitionMatrix::no_repeat(scene.kappa());
        Ok(Self {
            scene,
            certificate,
            matrix,
        })
    }

    pub fn scene(&self) -> &BilliardScene {
        &self.scene
    }

    pub fn certificate(&self) -> &HCertificate {
        &self.certificate
    }

    /// `A(i, j) = 1` iff `i != j`.
    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitOptions {
    /// Bound on the reflection-law defect `|(u_in - u_out) . tangent|`.
    pub orbit_tol: f64,
    pub max_sweeps: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            orbit_tol: 1e-12,
            max_sweeps: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReflectionPath {
    pub code: Word,
    pub angles: Vec<f64>,
    pub points: Vec<Vec2>,
    /// `segment_lengths[j] = |P_{j+1} - P_j|`, indices mod `n`.
    pub segment_lengths: Vec<f64>,
    pub total_length: f64,
    pub converged: bool,
    pub residual: f64,
    pub sweeps: usize,
}

/// Polygonal path through one point per coded disk.
struct Chain<'a> {
    disks: Vec<&'a Disk>,
    cyclic: bool,
}

impl Chain<'_> {
    fn len(&self) -> usize {
        self.disks.len()
    }

    fn segments(&self) -> usize {
        if self.cyclic {
            self.len()
        } else {
            self.len() - 1
        }
    }

    fn points(&self, ang: &[f64]) -> Vec<Vec2> {
        self.disks.iter().zip(ang).map(|(d, &a)| d.point(a)).collect()
    }

    #[cfg(test)]
    fn length(&self, ang: &[f64]) -> f64 {
        let p = self.points(ang);
        (0..self.segments())
            .map(|j| norm(sub(p[(j + 1) % self.len()], p[j])))
            .sum()
    }

    /// Unit vector and length of segment `j` (from point `j` to `j + 1`).
    fn seg(&self, p: &[Vec2], j: usize) -> (Vec2, f64) {
        let d = sub(p[(j + 1) % self.len()], p[j]);
        let l = norm(d);
        ([d[0] / l, d[1] / l], l)
    }

    fn gradient(&self, ang: &[f64]) -> Vec<f64> {
        let p = self.points(ang);
        let n = self.len();
        let mut g = vec![0.0; n];
        for j in 0..self.segments() {
            let (u, _) = self.seg(&p, j);
            let k = (j + 1) % n;
            g[j] -= dot(u, self.disks[j].tangent(ang[j]));
            g[k] += dot(u, self.disks[k].tangent(ang[k]));
        }
        g
    }

    /// Largest reflection-law defect `|g_j| / r_j`.
    fn residual(&self, ang: &[f64]) -> f64 {
        self.gradient(ang)
            .iter()
            .zip(&self.disks)
            .map(|(g, d)| (g / d.radius).abs())
            .fold(0.0, f64::max)
    }

    fn hessian(&self, ang: &[f64]) -> DMatrix<f64> {
        let p = self.points(ang);
        let n = self.len();
        let mut h = DMatrix::zeros(n, n);
        for j in 0..self.segments() {
            let k = (j + 1) % n;
            let (u, l) = self.seg(&p, j);
            let pj = self.disks[j].tangent(ang[j]);
            let pk = self.disks[k].tangent(ang[k]);
            let proj = |a: Vec2, b: Vec2| (dot(a, b) - dot(a, u) * dot(b, u)) / l;
            let pjj = sub(self.disks[j].center, p[j]);
            let pkk = sub(self.disks[k].center, p[k]);
            h[(j, j)] += proj(pj, pj) - dot(u, pjj);
            h[(k, k)] += proj(pk, pk) + dot(u, pkk);
            let cross = -proj(pj, pk);
            h[(j, k)] += cross;
            h[(k, j)] += cross;
        }
        h
    }

    /// Second derivative of the length in coordinate `j` alone.
    fn diag(&self, ang: &[f64], j: usize) -> f64 {
        let p = self.points(ang);
        let n = self.len();
        let mut h = 0.0;
        let mut add = |seg: usize, at_start: bool| {
            let (u, l) = self.seg(&p, seg);
            let t = self.disks[j].tangent(ang[j]);
            let c = sub(self.disks[j].center, p[j]);
            let proj = (dot(t, t) - dot(t, u).powi(2)) / l;
            h += if at_start { proj - dot(u, c) } else { proj + dot(u, c) };
        };
        if j < self.segments() {
            add(j, true);
        }
        if self.cyclic || j > 0 {
            add((j + n - 1) % n, false);
        }
        h
    }

    fn partial(&self, ang: &[f64], j: usize) -> f64 {
        let p = self.points(ang);
        let n = self.len();
        let t = self.disks[j].tangent(ang[j]);
        let mut g = 0.0;
        if j < self.segments() {
            g -= dot(self.seg(&p, j).0, t);
        }
        if self.cyclic || j > 0 {
            g += dot(self.seg(&p, (j + n - 1) % n).0, t);
        }
        g
    }

    fn start_angles(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|j| {
                let c = self.disks[j].center;
                let prev = if self.cyclic || j > 0 { Some(self.disks[(j + n - 1) % n].center) } else { None };
                let next = if self.cyclic || j + 1 < n { Some(self.disks[(j + 1) % n].center) } else { None };
                let target = match (prev, next) {
                    (Some(a), Some(b)) => [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0],
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => c,
                };
                let d = sub(target, c);
                d[1].atan2(d[0])
            })
            .collect()
    }

    /// Coordinate sweeps until the defect is small, then full Newton steps.
    fn solve(&self, mut ang: Vec<f64>, opts: OrbitOptions) -> (Vec<f64>, f64, usize, bool) {
        let newton_switch = 1e-4;
        let mut residual = self.residual(&ang);
        let mut sweeps = 0;
        while sweeps < opts.max_sweeps && residual > opts.orbit_tol {
            if residual > newton_switch {
                sweeps += 1;
                for j in 0..self.len() {
                    for _ in 0..3 {
                        let g = self.partial(&ang, j);
                        let h = self.diag(&ang, j);
                        let step = if h > 0.0 { -g / h } else { -g.signum() * 0.1 };
                        ang[j] += step.clamp(-0.5, 0.5);
                    }
                }
                residual = self.residual(&ang);
                continue;
            }
            let mut improved = false;
            for _ in 0..50 {
                let g = DVector::from_vec(self.gradient(&ang));
                let Some(step) = self.hessian(&ang).lu().solve(&(-g)) else {
                    break;
                };
                let scale = step.amax().max(0.5) / 0.5;
                let trial: Vec<f64> = ang.iter().zip(step.iter()).map(|(a, s)| a + s / scale).collect();
                let r = self.residual(&trial);
                if r >= residual {
                    break;
                }
                ang = trial;
                residual = r;
                improved = true;
                if residual <= opts.orbit_tol {
                    break;
                }
            }
            if residual <= opts.orbit_tol {
                break;
            }
            // Newton stalled: polish with a sweep and retry
            sweeps += 1;
            for j in 0..self.len() {
                let h = self.diag(&ang, j);
                if h > 0.0 {
                    ang[j] -= self.partial(&ang, j) / h;
                }
            }
            let r = self.residual(&ang);
            if !improved && r >= residual {
                residual = r;
                break;
            }
            residual = r;
        }
        let ok = residual <= opts.orbit_tol;
        (ang, residual, sweeps, ok)
    }
}

fn check_code(scene: &ValidatedScene, code: &[Symbol]) -> Result<()> {
    if code.len() < 2 || !scene.matrix().is_cyclically_admissible(code) {
        return Err(Error::InvalidInput(format!(
            "code {} is not a cyclic word without repeated neighbours",
            symbolic::format_symbols(code, scene.scene().kappa())
        )));
    }
    Ok(())
}

/// Periodic orbit with the given cyclic code.
pub fn solve_orbit(scene: &ValidatedScene, code: &Word) -> Result<ReflectionPath> {
    solve_orbit_with(scene, code, None, OrbitOptions::default())
}

/// [`solve_orbit`] from explicit starting angles (default: each point faces
/// the midpoint of its two neighbouring centres).
pub fn solve_orbit_with(
    scene: &ValidatedScene,
    code: &Word,
    start: Option<&[f64]>,
    opts: OrbitOptions,
) -> Result<ReflectionPath> {
    let w = code.symbols();
    check_code(scene, w)?;
    let disks = scene.scene().disks();
    let chain = Chain {
        disks: w.iter().map(|&s| &disks[s as usize]).collect(),
        cyclic: true,
    };
    let init = match start {
        Some(s) if s.len() == w.len() => s.to_vec(),
        Some(s) => {
            return Err(Error::InvalidInput(format!(
                "{} start angles for a code of length {}",
                s.len(),
                w.len()
            )))
        }
        None => chain.start_angles(),
    };
    let (angles, residual, sweeps, ok) = chain.solve(init, opts);
    if !ok {
        return Err(Error::NotConverged {
            iterations: sweeps,
            residual,
        });
    }
    let points = chain.points(&angles);
    let n = w.len();
    let segment_lengths: Vec<f64> = (0..n).map(|j| norm(sub(points[(j + 1) % n], points[j]))).collect();
    let total_length = segment_lengths.iter().sum();
    let path = ReflectionPath {
        code: code.clone(),
        angles,
        points,
        segment_lengths,
        total_length,
        converged: true,
        residual,
        sweeps,
    };
    shadow_check(scene, &path)?;
    Ok(path)
}

fn segment_distance(x: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = sub(b, a);
    let t = (dot(sub(x, a), d) / dot(d, d)).clamp(0.0, 1.0);
    norm(sub(x, [a[0] + t * d[0], a[1] + t * d[1]]))
}

fn shadow_check(scene: &ValidatedScene, path: &ReflectionPath) -> Result<()> {
    let n = path.points.len();
    for j in 0..n {
        let (a, b) = (path.points[j], path.points[(j + 1) % n]);
        for (l, d) in scene.scene().disks().iter().enumerate() {
            let slack = 1e-9 * d.radius;
            if segment_distance(d.center, a, b) < d.radius - slack {
                return Err(Error::ShadowViolation {
                    code: path.code.format(scene.scene().kappa()),
                    obstacle: l + 1,
                });
            }
        }
    }
    Ok(())
}

/// Reflection points of an open chain with free ends; the end points settle
/// where the segment leaves the boundary perpendicularly.
pub fn solve_chain(scene: &ValidatedScene, code: &[Symbol]) -> Result<Vec<Vec2>> {
    if code.len() < 2 || !scene.matrix().is_admissible(code) {
        return Err(Error::InvalidInput("chain code repeats a neighbour".into()));
    }
    let disks = scene.scene().disks();
    let chain = Chain {
        disks: code.iter().map(|&s| &disks[s as usize]).collect(),
        cyclic: false,
    };
    let (ang, residual, sweeps, ok) = chain.solve(chain.start_angles(), OrbitOptions::default());
    if !ok {
        return Err(Error::NotConverged {
            iterations: sweeps,
            residual,
        });
    }
    Ok(chain.points(&ang))
}

/// `F(xi) = |P_1(xi) - P_0(xi)|` for a two-sided code, computed on the window
/// `xi_{-W} .. xi_{W+1}` with free ends.
pub struct BilliardObservable<'a> {
    scene: &'a ValidatedScene,
    window: usize,
}

impl<'a> BilliardObservable<'a> {
    pub fn new(scene: &'a ValidatedScene, window: usize) -> Self {
        Self { scene, window }
    }
}

impl TwoSidedObservable for BilliardObservable<'_> {
    fn past_len(&self) -> usize {
        self.window
    }

    fn future_len(&self) -> usize {
        self.window + 2
    }

    fn eval(&self, past: &[Symbol], future: &[Symbol]) -> Result<f64> {
        let mut code = past.to_vec();
        code.extend_from_slice(future);
        let p = solve_chain(self.scene, &code)?;
        Ok(norm(sub(p[past.len() + 1], p[past.len()])))
    }
}

/// Default padding on each side of a word whose orbit is solved as a chain.
pub const DEFAULT_WINDOW: usize = 20;

/// Depth-`k` table of segment lengths.
///
/// The value on a `k`-word `v` is the length of its central segment, from
/// reflection `c = (k - 1) / 2` to `c + 1`: on the periodic orbit of `v` when `v`
/// closes up cyclically, otherwise on the free-end chain
/// `past ++ v ++ future` padded with `window` greedy symbols on each side.
/// Birkhoff sums of the table then equal exact orbit lengths for codes of
/// length `k` and converge to them as `k` grows.
pub fn geometric_potential(scene: &ValidatedScene, depth: usize, window: usize) -> Result<Potential> {
    if depth < 2 {
        return Err(Error::InvalidInput("geometric potential needs depth >= 2".into()));
    }
    let a = scene.matrix();
    let cylinders = symbolic::Cylinders::new(a, depth)?;
    let c = (depth - 1) / 2;
    let values = par::try_map(cylinders.words(), |w| -> Result<f64> {
        let v = w.symbols();
        if a.is_cyclically_admissible(v) {
            Ok(solve_orbit(scene, w)?.segment_lengths[c])
        } else {
            let mut code = a.extend_past(v[0], window + 1);
            code.pop();
            let future = a.extend_future(&[v[depth - 1]], window + 1);
            code.extend_from_slice(v);
            code.extend_from_slice(&future[1..]);
            let p = solve_chain(scene, &code)?;
            Ok(norm(sub(p[window + c + 1], p[window + c])))
        }
    })?;
    let words = cylinders.words().to_vec();
    let f = Potential::from_table(a, depth, words.into_iter().zip(values))?;
    Ok(f.with_provenance(Provenance::BilliardGeometric))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub record: OrbitRecord,
    pub path: ReflectionPath,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LengthSpectrum {
    /// Sorted by length, then by canonical word.
    pub orbits: Vec<SpectrumEntry>,
    pub failures: Vec<(Word, Error)>,
}

/// Every primitive periodic orbit with at most `n_max` reflections.
pub fn length_spectrum(scene: &ValidatedScene, n_max: usize, budget: u128) -> Result<LengthSpectrum> {
    let mut codes = Vec::new();
    for n in 2..=n_max {
        codes.extend(symbolic::primitive_orbits(scene.matrix(), n, budget)?);
    }
    let solved = par::map(&codes, |w| solve_orbit(scene, w));
    let mut out = LengthSpectrum {
        orbits: Vec::new(),
        failures: Vec::new(),
    };
    for (w, r) in codes.into_iter().zip(solved) {
        match r {
            Ok(path) => {
                let mut record = OrbitRecord::from_word(&w);
                record.f_period = Some(path.total_length);
                out.orbits.push(SpectrumEntry { record, path });
            }
            Err(e) => out.failures.push((w, e)),
        }
    }
    out.orbits.sort_by(|a, b| {
        a.path
            .total_length
            .total_cmp(&b.path.total_length)
            .then_with(|| a.record.canonical_word.cmp(&b.record.canonical_word))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym() -> ValidatedScene {
        ValidatedScene::new(BilliardScene::symmetric_three(6.0, 1.0).unwrap()).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s, 3).unwrap()
    }

    #[test]
    fn no_eclipse_examples() {
        let cert = validate_scene(&BilliardScene::symmetric_three(6.0, 1.0).unwrap()).unwrap();
        assert!(cert.passed);
        assert!((cert.min_margin - (3.0 * 3f64.sqrt() - 2.0)).abs() < 1e-9);
        let fat = BilliardScene::symmetric_three(6.0, 2.7).unwrap();
        let cert = validate_scene(&fat).unwrap();
        assert!(!cert.passed);
        assert!((cert.min_margin - (3.0 * 3f64.sqrt() - 5.4)).abs() < 1e-9);
        assert!(matches!(ValidatedScene::new(fat), Err(Error::EclipseViolation(..))));
        let twins = BilliardScene::from_parts(&[[0.0, 0.0], [0.0, 0.0], [9.0, 0.0]], &[1.0; 3]).unwrap();
        assert_eq!(validate_scene(&twins), Err(Error::Overlap(1, 2)));
        assert!(BilliardScene::from_parts(&[[0.0, 0.0], [5.0, 0.0]], &[1.0; 2]).is_err());
    }

    #[test]
    fn symmetric_orbit_lengths() {
        let s = sym();
        let two = solve_orbit(&s, &w("12")).unwrap();
        assert!((two.total_length - 8.0).abs() < 1e-12);
        assert!(two.residual <= 1e-12);
        let three = solve_orbit(&s, &w("123")).unwrap();
        assert!((three.total_length - 3.0 * (6.0 - 3f64.sqrt())).abs() < 1e-10);
        let back = solve_orbit(&s, &w("132")).unwrap();
        assert!((three.total_length - back.total_length).abs() < 1e-12);
        assert!(matches!(solve_orbit(&s, &w("11")), Err(Error::InvalidInput(_))));
        assert!(matches!(solve_orbit(&s, &w("121")), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn orbit_is_a_local_minimum_and_multistart_agrees() {
        let s = sym();
        let path = solve_orbit(&s, &w("121323")).unwrap();
        let disks = s.scene().disks();
        let chain = Chain {
            disks: path.code.symbols().iter().map(|&x| &disks[x as usize]).collect(),
            cyclic: true,
        };
        for j in 0..path.angles.len() {
            for d in [1e-4, -1e-4] {
                let mut a = path.angles.clone();
                a[j] += d;
                assert!(chain.length(&a) > path.total_length);
            }
        }
        let start: Vec<f64> = (0..6).map(|i| 0.7 * i as f64).collect();
        let other = solve_orbit_with(&s, &path.code, Some(&start), OrbitOptions::default()).unwrap();
        assert!((other.total_length - path.total_length).abs() < 1e-12);
    }

    #[test]
    fn rotations_and_rigid_motions_preserve_length() {
        let s = sym();
        let base = solve_orbit(&s, &w("12313")).unwrap().total_length;
        for r in 1..5 {
            let l = solve_orbit(&s, &w("12313").rotated(r)).unwrap().total_length;
            assert!((l - base).abs() < 1e-12);
        }
        let moved = ValidatedScene::new(s.scene().moved(0.9, [3.0, -7.5])).unwrap();
        let l = solve_orbit(&moved, &w("12313")).unwrap().total_length;
        assert!((l - base).abs() < 1e-10);
    }

    #[test]
    fn perturbed_scene_splits_two_orbits() {
        let mut disks = BilliardScene::symmetric_three(6.0, 1.0).unwrap().disks().to_vec();
        disks[2].center[0] += 0.07;
        disks[2].center[1] += 0.1;
        let s = ValidatedScene::new(BilliardScene::new(disks.clone()).unwrap()).unwrap();
        let mut lengths = Vec::new();
        for (i, j, code) in [(0, 1, "12"), (0, 2, "13"), (1, 2, "23")] {
            let l = solve_orbit(&s, &w(code)).unwrap().total_length;
            let gap = 2.0 * (norm(sub(disks[i].center, disks[j].center)) - 2.0);
            assert!((l - gap).abs() < 1e-12);
            lengths.push(l);
        }
        assert!(lengths[0] != lengths[1] && lengths[1] != lengths[2] && lengths[0] != lengths[2]);
    }

    #[test]
    fn spectrum_up_to_three() {
        let s = sym();
        let spec = length_spectrum(&s, 3, symbolic::DEFAULT_BUDGET).unwrap();
        assert!(spec.failures.is_empty());
        let lengths: Vec<f64> = spec.orbits.iter().map(|o| o.path.total_length).collect();
        assert_eq!(lengths.len(), 5);
        for l in &lengths[..3] {
            assert!((l - 8.0).abs() < 1e-12);
        }
        for l in &lengths[3..] {
            assert!((l - 3.0 * (6.0 - 3f64.sqrt())).abs() < 1e-10);
        }
    }

    #[test]
    fn geometric_potential_depth_two_is_half_orbit() {
        let s = sym();
        let f = geometric_potential(&s, 2, DEFAULT_WINDOW).unwrap();
        assert!((f.value(&[0, 1]).unwrap() - 4.0).abs() < 1e-12);
        assert!(f.is_positive());
        assert!(f.d0() >= s.certificate().min_gap - 1e-12);
        assert_eq!(f.provenance(), Provenance::BilliardGeometric);
    }

    #[test]
    fn observable_two_orbit_sum() {
        let s = sym();
        let obs = BilliardObservable::new(&s, 12);
        let t = crate::potential::two_sided_periodic_sum(&obs, &[0, 1]).unwrap();
        assert!((t - 8.0).abs() < 1e-10);
    }
}
