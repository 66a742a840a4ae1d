//! Counting periodic orbits whose periods fall in exponentially shrinking
//! windows, and the residual diagnostics behind those asymptotics.
//!
//! All counts come from exhaustive enumeration. Windows are closed and every
//! comparison is made on the computed double `f^n`, summed over positions
//! `0..n` in order, so counts are deterministic.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format;
use crate::numeric::{linear_fit, CompensatedComplexSum, CompensatedSum};
use crate::potential::{LatticeVerdict, Potential};
use crate::symbolic::{self, Symbol, Word};
use crate::transfer::{self, EigenOptions, PressureProfile};

/// `[z + n alpha + p eps_n, z + n alpha + q eps_n]` with `eps_n = exp(-delta n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowQuery {
    pub z: f64,
    pub p: f64,
    pub q: f64,
    pub delta: f64,
    pub n: usize,
}

impl WindowQuery {
    pub fn new(z: f64, p: f64, q: f64, delta: f64, n: usize) -> Result<Self> {
        let q_ = Self { z, p, q, delta, n };
        q_.validate()?;
        Ok(q_)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.z, self.p, self.q, self.delta].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("window parameters must be finite".into()));
        }
        if self.delta <= 0.0 {
            return Err(Error::InvalidInput(format!("delta must be positive, got {}", self.delta)));
        }
        if self.p >= self.q {
            return Err(Error::InvalidInput(format!("need p < q, got p = {}, q = {}", self.p, self.q)));
        }
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        (-self.delta * self.n as f64).exp()
    }

    /// Closed window `[lo, hi]` for a given `alpha`.
    pub fn bounds(&self, alpha: f64) -> (f64, f64) {
        let c = self.z + self.n as f64 * alpha;
        let e = self.epsilon();
        (c + self.p * e, c + self.q * e)
    }

    fn check_z(&self, alpha: f64) -> Result<()> {
        if self.z < 0.0 || self.z > alpha {
            return Err(Error::InvalidInput(format!(
                "z = {} must lie in [0, alpha] = [0, {alpha}]",
                self.z
            )));
        }
        Ok(())
    }
}

/// Side information echoed as report flags.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Hypotheses {
    pub lattice: Option<LatticeVerdict>,
    /// Fitted operator decay rate from the norm probe.
    pub rho_hat: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CensusOptions {
    pub budget: u128,
    pub hypotheses: Hypotheses,
    /// `sigma0^2` below this makes predictions meaningless.
    pub sigma_floor: f64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            budget: symbolic::DEFAULT_BUDGET,
            hypotheses: Hypotheses::default(),
            sigma_floor: 1e-12,
        }
    }
}

/// True when `delta` violates `delta < -log(rho) / 3`.
pub fn out_of_regime(delta: f64, rho_hat: f64) -> bool {
    !(rho_hat > 0.0 && rho_hat < 1.0) || delta >= -rho_hat.ln() / 3.0
}

fn flags_for(prof: &PressureProfile, q: &WindowQuery, opts: &CensusOptions) -> Vec<String> {
    let mut flags = Vec::new();
    if prof.sigma0_sq < opts.sigma_floor {
        flags.push("lattice-suspected".to_string());
    }
    if let Some(v) = opts.hypotheses.lattice {
        flags.push(format!("screen-{}", v.as_str()));
    }
    if let Some(rho) = opts.hypotheses.rho_hat {
        if out_of_regime(q.delta, rho) {
            flags.push("out-of-regime".to_string());
        }
    }
    flags
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodCount {
    pub m: usize,
    pub count: u64,
    pub predicted: Option<f64>,
}

/// Asymptotic lower and upper bounds on the multi-period point count for one
/// choice of the free parameter `a` (the width of the band `|m - n|` used in
/// the lower bound).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub a: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusReport {
    pub query: WindowQuery,
    pub epsilon: f64,
    pub window: (f64, f64),
    /// Periods scanned (inclusive); `(n, n)` for single-period counts.
    pub m_range: (usize, usize),
    pub empirical: u64,
    pub predicted: Option<f64>,
    pub per_m: Vec<PeriodCount>,
    pub brackets: Vec<Bracket>,
    /// Canonical words and periods of the counted orbits, when collected.
    pub orbits: Vec<(Word, f64)>,
    pub flags: Vec<String>,
}

pub const CENSUS_HEADER: &str = "n,m,z,p,q,delta,epsilon_n,empirical,predicted,ratio,flags";

impl CensusReport {
    pub fn ratio(&self) -> Option<f64> {
        ratio(self.empirical, self.predicted)
    }

    /// CSV rows (no header): the total first, then one row per period.
    pub fn csv_rows(&self) -> String {
        let q = &self.query;
        let flags = self.flags.join(";");
        let mut out = String::new();
        let mut row = |m: Option<usize>, count: u64, pred: Option<f64>| {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                q.n,
                m.map(|m| m.to_string()).unwrap_or_default(),
                format::real(q.z),
                format::real(q.p),
                format::real(q.q),
                format::real(q.delta),
                format::real(self.epsilon),
                count,
                format::opt_real(pred),
                format::opt_real(ratio(count, pred)),
                flags
            );
        };
        row(None, self.empirical, self.predicted);
        for pc in &self.per_m {
            row(Some(pc.m), pc.count, pc.predicted);
        }
        out
    }
}

fn ratio(count: u64, predicted: Option<f64>) -> Option<f64> {
    predicted.filter(|&p| p > 0.0).map(|p| count as f64 / p)
}

/// `exp(P (z + n alpha))`.
fn growth(prof: &PressureProfile, q: &WindowQuery) -> f64 {
    (prof.p * (q.z + q.n as f64 * prof.alpha)).exp()
}

/// Predicted number of fixed points of `sigma^n` in the window.
pub fn predicted_fixed(prof: &PressureProfile, q: &WindowQuery) -> Option<f64> {
    (prof.sigma0_sq > 0.0).then(|| {
        growth(prof, q) * (q.q - q.p) * q.epsilon()
            / ((2.0 * PI).sqrt() * prof.sigma0() * (q.n as f64).sqrt())
    })
}

/// Predicted number of primitive orbits with exactly `n` symbols in the window.
pub fn predicted_primitive(prof: &PressureProfile, q: &WindowQuery) -> Option<f64> {
    predicted_fixed(prof, q).map(|v| v / q.n as f64)
}

/// Lower and upper bounds on the multi-period count for a given `a`.
pub fn bracket(prof: &PressureProfile, q: &WindowQuery, a: f64) -> Option<Bracket> {
    if prof.sigma0_sq <= 0.0 || a <= 0.0 {
        return None;
    }
    let n = q.n as f64;
    let base = growth(prof, q) * (q.q - q.p) * q.epsilon() / prof.sigma0();
    let r = PI / (4.0 * prof.alpha);
    let lower = base / (PI * n).sqrt() * 2.0 * r / a;
    let upper = base * 2.0 * (2.0 * n).sqrt() / PI.sqrt()
        * ((prof.alpha / prof.d0).sqrt() - (prof.alpha / prof.d1).sqrt());
    Some(Bracket { a, lower, upper })
}

/// Depth-first walk over length-`n` periodic words whose Birkhoff sum lies in
/// `[lo, hi]`, pruned with the table bounds `d0 <= f <= d1`.
struct Walker<'a> {
    f: &'a Potential,
    n: usize,
    k: usize,
    kappa: usize,
    lead: usize,
    lo: f64,
    hi: f64,
    slack: f64,
}

impl<'a> Walker<'a> {
    fn new(f: &'a Potential, n: usize, lo: f64, hi: f64) -> Self {
        let k = f.depth();
        let kappa = f.matrix().size();
        let scale = [lo, hi]
            .iter()
            .filter(|v| v.is_finite())
            .fold(1.0f64, |m, v| m.max(v.abs()));
        Self {
            f,
            n,
            k,
            kappa,
            lead: kappa.pow(k as u32 - 1),
            lo,
            hi,
            slack: 1e-9 * scale,
        }
    }

    fn shard(&self, prefix: &[Symbol], visit: &mut dyn FnMut(&[Symbol], f64)) {
        let a = self.f.matrix();
        if !a.is_admissible(prefix) || prefix.len() > self.n {
            return;
        }
        let mut buf = Vec::with_capacity(self.n);
        let (mut partial, mut code) = (0.0, 0usize);
        for &s in prefix {
            match self.push(&mut buf, partial, code, s) {
                Some((p, c)) => (partial, code) = (p, c),
                None => return,
            }
        }
        self.descend(&mut buf, partial, code, visit);
    }

    fn push(&self, buf: &mut Vec<Symbol>, partial: f64, code: usize, s: Symbol) -> Option<(f64, usize)> {
        let code = if buf.len() >= self.k {
            (code % self.lead) * self.kappa + s as usize
        } else {
            code * self.kappa + s as usize
        };
        buf.push(s);
        let len = buf.len();
        let mut partial = partial;
        let complete = if self.n >= self.k && len >= self.k {
            partial += self
                .f
                .value_by_code(code)
                .expect("admissible window has a table entry");
            len - self.k + 1
        } else {
            0
        };
        let rem = (self.n - complete) as f64;
        if partial + rem * self.f.d0() > self.hi + self.slack
            || partial + rem * self.f.d1() < self.lo - self.slack
        {
            buf.pop();
            return None;
        }
        Some((partial, code))
    }

    fn descend(&self, buf: &mut Vec<Symbol>, partial: f64, code: usize, visit: &mut dyn FnMut(&[Symbol], f64)) {
        let a = self.f.matrix();
        let last = buf[buf.len() - 1];
        if buf.len() == self.n {
            if !a.allowed(last, buf[0]) {
                return;
            }
            let mut total = partial;
            let start = if self.n >= self.k { self.n - self.k + 1 } else { 0 };
            for j in start..self.n {
                let idx = self
                    .f
                    .cylinders()
                    .periodic_index(buf, j)
                    .expect("cyclically admissible window has a table entry");
                total += self.f.values()[idx];
            }
            if total >= self.lo && total <= self.hi {
                visit(buf, total);
            }
            return;
        }
        for t in a.successors(last) {
            if let Some((p, c)) = self.push(buf, partial, code, t) {
                self.descend(buf, p, c, visit);
                buf.pop();
            }
        }
    }
}

/// Fold every length-`n` periodic word with `lo <= f^n <= hi` into
/// per-shard accumulators, returned in shard order.
pub fn scan_periodic<T, I, F>(
    f: &Potential,
    n: usize,
    lo: f64,
    hi: f64,
    budget: u128,
    init: I,
    fold: F,
) -> Result<Vec<T>>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(&mut T, &[Symbol], f64) + Sync + Send,
{
    if n == 0 {
        return Err(Error::InvalidInput("period n must be at least 1".into()));
    }
    let walker = Walker::new(f, n, lo, hi);
    symbolic::map_shards(f.matrix(), n, budget, |prefix| {
        let mut acc = init();
        walker.shard(prefix, &mut |w, t| fold(&mut acc, w, t));
        acc
    })
}

fn count_in(f: &Potential, n: usize, lo: f64, hi: f64, budget: u128) -> Result<u64> {
    Ok(scan_periodic(f, n, lo, hi, budget, || 0u64, |c, _, _| *c += 1)?
        .into_iter()
        .sum())
}

/// Number of fixed points of `sigma^n` with `f^n` in the window.
pub fn count_fixed_in_window(
    f: &Potential,
    prof: &PressureProfile,
    q: &WindowQuery,
    opts: &CensusOptions,
) -> Result<CensusReport> {
    q.validate()?;
    q.check_z(prof.alpha)?;
    let (lo, hi) = q.bounds(prof.alpha);
    let empirical = count_in(f, q.n, lo, hi, opts.budget)?;
    let flags = flags_for(prof, q, opts);
    let predicted = if prof.sigma0_sq < opts.sigma_floor {
        None
    } else {
        predicted_fixed(prof, q)
    };
    Ok(CensusReport {
        query: *q,
        epsilon: q.epsilon(),
        window: (lo, hi),
        m_range: (q.n, q.n),
        empirical,
        predicted,
        per_m: Vec::new(),
        brackets: Vec::new(),
        orbits: Vec::new(),
        flags,
    })
}

/// Periods `m` allowed by `m d0 <= T <= m d1` for `T` in `[lo, hi]`.
pub fn period_range(f: &Potential, lo: f64, hi: f64) -> Result<(usize, usize)> {
    f.require_positive()?;
    let m_lo = (lo / f.d1()).ceil().max(1.0);
    let m_hi = (hi / f.d0()).floor();
    if m_hi < m_lo {
        return Ok((1, 0));
    }
    Ok((m_lo as usize, m_hi as usize))
}

/// Number of points `xi` with `sigma^m xi = xi` and `f^m(xi)` in the window for
/// some `m`; each point is counted once.
pub fn count_i(
    f: &Potential,
    prof: &PressureProfile,
    q: &WindowQuery,
    a_values: &[f64],
    opts: &CensusOptions,
) -> Result<CensusReport> {
    q.validate()?;
    q.check_z(prof.alpha)?;
    let (lo, hi) = q.bounds(prof.alpha);
    let (m_lo, m_hi) = period_range(f, lo, hi)?;
    let ms: Vec<usize> = (m_lo..=m_hi).collect();
    for &m in &ms {
        symbolic::check_budget(f.matrix(), m, opts.budget)?;
    }
    let per_m_points: Vec<Vec<Vec<Symbol>>> = ms
        .iter()
        .map(|&m| {
            let shards = scan_periodic(f, m, lo, hi, opts.budget, Vec::new, |acc, w, _| {
                let d = symbolic::minimal_period(w);
                acc.push(w[..d].to_vec());
            })?;
            Ok(shards.into_iter().flatten().collect())
        })
        .collect::<Result<_>>()?;
    let mut seen: HashSet<Vec<Symbol>> = HashSet::new();
    let mut per_m = Vec::new();
    for (&m, pts) in ms.iter().zip(&per_m_points) {
        per_m.push(PeriodCount {
            m,
            count: pts.len() as u64,
            predicted: None,
        });
        seen.extend(pts.iter().cloned());
    }
    let brackets = a_values.iter().filter_map(|&a| bracket(prof, q, a)).collect();
    Ok(CensusReport {
        query: *q,
        epsilon: q.epsilon(),
        window: (lo, hi),
        m_range: (m_lo, m_hi),
        empirical: seen.len() as u64,
        predicted: None,
        per_m,
        brackets,
        orbits: Vec::new(),
        flags: flags_for(prof, q, opts),
    })
}

/// Primitive orbits with period in the window, broken down by length `m`.
///
/// The total counts every primitive orbit; the row for `m = n` carries the
/// prediction for orbits with exactly `n` symbols.
pub fn count_primitive_orbits_in_window(
    f: &Potential,
    prof: &PressureProfile,
    q: &WindowQuery,
    a_values: &[f64],
    opts: &CensusOptions,
) -> Result<CensusReport> {
    q.validate()?;
    q.check_z(prof.alpha)?;
    let (lo, hi) = q.bounds(prof.alpha);
    let (m_lo, m_hi) = period_range(f, lo, hi)?;
    let mut orbits = Vec::new();
    let mut per_m = Vec::new();
    let lattice = prof.sigma0_sq < opts.sigma_floor;
    for m in m_lo..=m_hi {
        let shards = scan_periodic(f, m, lo, hi, opts.budget, Vec::new, |acc, w, t| {
            if symbolic::is_least_rotation(w) && symbolic::minimal_period(w) == w.len() {
                acc.push((Word::new(w.to_vec()), t));
            }
        })?;
        let found: Vec<(Word, f64)> = shards.into_iter().flatten().collect();
        let predicted = (m == q.n && !lattice)
            .then(|| predicted_primitive(prof, q))
            .flatten();
        per_m.push(PeriodCount {
            m,
            count: found.len() as u64,
            predicted,
        });
        orbits.extend(found);
    }
    Ok(CensusReport {
        query: *q,
        epsilon: q.epsilon(),
        window: (lo, hi),
        m_range: (m_lo, m_hi),
        empirical: orbits.len() as u64,
        predicted: None,
        per_m,
        brackets: a_values.iter().filter_map(|&a| bracket(prof, q, a)).collect(),
        orbits,
        flags: flags_for(prof, q, opts),
    })
}

/// Compactly supported test functions with known mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bump {
    /// `height (1 - t^2)^4` with `t = (x - center) / half_width`.
    Polynomial { center: f64, half_width: f64, height: f64 },
    /// 1 on `[lo, hi]`, falling to 0 over `ramp` on each side along the
    /// normalized primitive of `(1 - t^2)^4`.
    Plateau { lo: f64, hi: f64, ramp: f64 },
}

const BUMP_MASS: f64 = 256.0 / 315.0;

fn bump_primitive(t: f64) -> f64 {
    let t2 = t * t;
    t * (1.0 + t2 * (-4.0 / 3.0 + t2 * (6.0 / 5.0 + t2 * (-4.0 / 7.0 + t2 / 9.0))))
}

/// Rises from 0 at `u = 0` to 1 at `u = 1`, flat to fourth order at both ends.
fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        (bump_primitive(2.0 * u - 1.0) + BUMP_MASS / 2.0) / BUMP_MASS
    }
}

impl Default for Bump {
    fn default() -> Self {
        Bump::Polynomial {
            center: 0.0,
            half_width: 1.0,
            height: 1.0,
        }
    }
}

impl Bump {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Bump::Polynomial { center, half_width, height } => {
                center.is_finite() && half_width > 0.0 && height > 0.0 && half_width.is_finite() && height.is_finite()
            }
            Bump::Plateau { lo, hi, ramp } => lo.is_finite() && hi.is_finite() && lo <= hi && ramp > 0.0 && ramp.is_finite(),
        };
        if ok && self.mass() > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("test function {self:?} must be non-negative with positive mass")))
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Bump::Polynomial { center, half_width, height } => {
                let t = (x - center) / half_width;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    height * (1.0 - t * t).powi(4)
                }
            }
            Bump::Plateau { lo, hi, ramp } => {
                if x < lo {
                    smoothstep((x - (lo - ramp)) / ramp)
                } else if x > hi {
                    smoothstep(((hi + ramp) - x) / ramp)
                } else {
                    1.0
                }
            }
        }
    }

    /// Closed interval outside which the function vanishes.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Bump::Polynomial { center, half_width, .. } => (center - half_width, center + half_width),
            Bump::Plateau { lo, hi, ramp } => (lo - ramp, hi + ramp),
        }
    }

    pub fn mass(&self) -> f64 {
        match *self {
            Bump::Polynomial { half_width, height, .. } => height * half_width * BUMP_MASS,
            Bump::Plateau { lo, hi, ramp } => hi - lo + ramp,
        }
    }

    /// Functions `chi_minus <= 1_[p, q] <= chi_plus` with ramps of width `eta`.
    pub fn squeeze(p: f64, q: f64, eta: f64) -> Result<(Bump, Bump)> {
        if !(p < q) || !(eta > 0.0) || 2.0 * eta > q - p {
            return Err(Error::InvalidInput(format!(
                "squeeze needs p < q and 0 < eta <= (q - p)/2 (p = {p}, q = {q}, eta = {eta})"
            )));
        }
        Ok((
            Bump::Plateau { lo: p + eta, hi: q - eta, ramp: eta },
            Bump::Plateau { lo: p, hi: q, ramp: eta },
        ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothedSum {
    pub n: usize,
    pub z: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub value: f64,
    pub predicted: Option<f64>,
    pub flags: Vec<String>,
}

impl SmoothedSum {
    pub fn ratio(&self) -> Option<f64> {
        self.predicted.filter(|&p| p > 0.0).map(|p| self.value / p)
    }
}

/// `S_n = sum_{sigma^n x = x} chi((g^n(x) - z) / eps_n)` with `g = f - alpha`.
pub fn smoothed_sum(
    f: &Potential,
    prof: &PressureProfile,
    chi: &Bump,
    z: f64,
    delta: f64,
    n: usize,
    opts: &CensusOptions,
) -> Result<SmoothedSum> {
    chi.validate()?;
    let q = WindowQuery::new(z, -1.0, 1.0, delta, n)?;
    let eps = q.epsilon();
    let centre = z + n as f64 * prof.alpha;
    let (a, b) = chi.support();
    let shards = scan_periodic(
        f,
        n,
        centre + a * eps,
        centre + b * eps,
        opts.budget,
        CompensatedSum::new,
        |acc, _, t| acc.add(chi.eval((t - centre) / eps)),
    )?;
    let mut total = CompensatedSum::new();
    for s in &shards {
        total.merge(s);
    }
    let predicted = (prof.sigma0_sq >= opts.sigma_floor).then(|| {
        growth(prof, &q) * eps * chi.mass() / ((2.0 * PI * n as f64).sqrt() * prof.sigma0())
    });
    let mut flags = flags_for(prof, &q, opts);
    flags.retain(|f| f != "out-of-regime");
    if let Some(rho) = opts.hypotheses.rho_hat {
        if out_of_regime(delta, rho) {
            flags.push("out-of-regime".into());
        }
    }
    Ok(SmoothedSum {
        n,
        z,
        delta,
        epsilon: eps,
        value: total.value(),
        predicted,
        flags,
    })
}

/// `sum_{sigma^n x = x} exp(s f^n(x))`, compensated.
pub fn periodic_sum(f: &Potential, n: usize, s: Complex64, budget: u128) -> Result<Complex64> {
    let shards = scan_periodic(
        f,
        n,
        f64::NEG_INFINITY,
        f64::INFINITY,
        budget,
        CompensatedComplexSum::new,
        |acc, _, t| acc.add((s * t).exp()),
    )?;
    let mut total = CompensatedComplexSum::new();
    for sh in &shards {
        total.merge(sh);
    }
    Ok(total.value())
}

/// Real-parameter [`periodic_sum`].
pub fn periodic_sum_real(f: &Potential, n: usize, s: f64, budget: u128) -> Result<f64> {
    let shards = scan_periodic(
        f,
        n,
        f64::NEG_INFINITY,
        f64::INFINITY,
        budget,
        CompensatedSum::new,
        |acc, _, t| acc.add((s * t).exp()),
    )?;
    let mut total = CompensatedSum::new();
    for sh in &shards {
        total.merge(sh);
    }
    Ok(total.value())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma1Row {
    pub n: usize,
    pub periodic_sum: Complex64,
    pub lambda_pow: Complex64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Table {
    pub u: f64,
    pub lambda: Complex64,
    pub rows: Vec<Lemma1Row>,
    /// `exp(slope)` of `log(r_n / n)` against `n`.
    pub theta1_hat: Option<f64>,
    pub r_squared: Option<f64>,
}

/// `r_n = |sum exp((-P + i u) f^n) - lambda^n|` with `lambda` the top
/// eigenvalue at `s = -P + i u`. Multiplying both terms by `exp(-i u n alpha)`
/// turns them into the centred form with `g = f - alpha`, so the modulus is
/// the same.
pub fn lemma1_residual(
    f: &Potential,
    p: f64,
    u: f64,
    n_range: std::ops::RangeInclusive<usize>,
    budget: u128,
) -> Result<Lemma1Table> {
    let s = Complex64::new(-p, u);
    let m = transfer::build_operator(f, s)?;
    let lambda = transfer::leading_eigen(&m, EigenOptions::default())?.lambda;
    let mut rows = Vec::new();
    for n in n_range {
        let sum = if u == 0.0 {
            Complex64::new(periodic_sum_real(f, n, -p, budget)?, 0.0)
        } else {
            periodic_sum(f, n, s, budget)?
        };
        let lambda_pow = lambda.powu(n as u32);
        rows.push(Lemma1Row {
            n,
            periodic_sum: sum,
            lambda_pow,
            residual: (sum - lambda_pow).norm(),
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.residual > 0.0)
        .map(|r| (r.n as f64, (r.residual / r.n as f64).ln()))
        .unzip();
    let fit = if xs.len() == rows.len() { linear_fit(&xs, &ys) } else { None };
    Ok(Lemma1Table {
        u,
        lambda,
        rows,
        theta1_hat: fit.map(|f| f.slope.exp()),
        r_squared: fit.map(|f| f.r_squared),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuelleRow {
    pub n: usize,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// Compare `sum_{sigma^n x = x} exp((t + i u) f^n(x))` with
/// `sum_i (L^n chi_i)(x_i)`, where `chi_i` is the indicator of the first-symbol
/// cylinder `C_i` and `x_i` the shortest periodic point through `i`.
pub fn ruelle_lemma_residual(
    f: &Potential,
    t: f64,
    u: f64,
    n_range: std::ops::RangeInclusive<usize>,
    budget: u128,
) -> Result<Vec<RuelleRow>> {
    let s = Complex64::new(t, u);
    let m = transfer::build_operator(f, s)?;
    let reps = symbolic::cylinder_representatives(f.matrix());
    let anchors: Vec<usize> = reps
        .iter()
        .map(|w| m.periodic_state(w.symbols(), 0).expect("representative is admissible"))
        .collect();
    let n_sym = f.matrix().size();
    let mut rows = Vec::new();
    let mut vecs: Vec<Vec<Complex64>> = (0..n_sym as Symbol)
        .map(|i| {
            m.states()
                .iter()
                .map(|w| Complex64::new(f64::from(u8::from(w.symbols()[0] == i)), 0.0))
                .collect()
        })
        .collect();
    let mut done = 0usize;
    for n in n_range {
        while done < n {
            for v in &mut vecs {
                *v = m.apply(v);
            }
            done += 1;
        }
        let rhs: Complex64 = vecs.iter().zip(&anchors).map(|(v, &x)| v[x]).sum();
        let lhs = if u == 0.0 {
            Complex64::new(periodic_sum_real(f, n, t, budget)?, 0.0)
        } else {
            periodic_sum(f, n, s, budget)?
        };
        rows.push(RuelleRow {
            n,
            lhs,
            rhs,
            residual: (lhs - rhs).norm(),
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrimeCountTable {
    pub x_max: f64,
    /// Primitive orbits with period at most `x_max`, sorted by period.
    pub orbits: Vec<(Word, f64)>,
    pub grid: Vec<(f64, u64)>,
    /// Solution of `pi(x_max) = exp(h x_max) / (h x_max)`.
    pub h_hat: Option<f64>,
    /// Partial sums of `Z(s) = sum_n (1/n) sum_{sigma^n x = x} exp(-s f^n(x))`.
    pub zeta: Vec<(f64, f64)>,
    pub zeta_terms: usize,
}

impl PrimeCountTable {
    pub fn count_up_to(&self, x: f64) -> u64 {
        self.orbits.partition_point(|o| o.1 <= x) as u64
    }
}

/// Primitive orbit counting function `pi(x)` up to `x_max`.
pub fn prime_orbit_counter(
    f: &Potential,
    x_max: f64,
    grid: &[f64],
    s_values: &[f64],
    zeta_terms: usize,
    budget: u128,
) -> Result<PrimeCountTable> {
    f.require_positive()?;
    if !x_max.is_finite() {
        return Err(Error::InvalidInput("x_max must be finite".into()));
    }
    let m_max = (x_max / f.d0()).floor().max(0.0) as usize;
    let mut orbits = Vec::new();
    for m in 1..=m_max {
        let shards = scan_periodic(f, m, f64::NEG_INFINITY, x_max, budget, Vec::new, |acc, w, t| {
            if symbolic::is_least_rotation(w) && symbolic::minimal_period(w) == w.len() {
                acc.push((Word::new(w.to_vec()), t));
            }
        })?;
        orbits.extend(shards.into_iter().flatten());
    }
    orbits.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let mut table = PrimeCountTable {
        x_max,
        orbits,
        grid: Vec::new(),
        h_hat: None,
        zeta: Vec::new(),
        zeta_terms,
    };
    table.grid = grid.iter().map(|&x| (x, table.count_up_to(x))).collect();
    table.h_hat = solve_growth(table.count_up_to(x_max) as f64, x_max);
    for &s in s_values {
        let m = transfer::build_real_operator(f, -s)?;
        let mut total = CompensatedSum::new();
        for n in 1..=zeta_terms {
            total.add(m.trace_power(n).re / n as f64);
        }
        table.zeta.push((s, total.value()));
    }
    Ok(table)
}

/// `h` with `exp(h x) / (h x) = count`, on the branch `h x > 1`.
fn solve_growth(count: f64, x: f64) -> Option<f64> {
    if count < 1.0 || x <= 0.0 {
        return None;
    }
    let g = |y: f64| y - y.ln() - count.ln();
    let (mut lo, mut hi) = (1.0, 2.0);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi) / x)
}
