//! Locally constant roof functions on the one-sided shift.
//!
//! A [`Potential`] stores one value per admissible `k`-word and is evaluated
//! on a point through its length-`k` prefix. Periodic words are evaluated on
//! their periodic extension, which makes Birkhoff sums exact orbit invariants.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::format;
use crate::par;
use crate::symbolic::{self, Cylinders, Symbol, TransitionMatrix, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ExplicitTable,
    SinaiReduced,
    BilliardGeometric,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ExplicitTable => "explicit-table",
            Provenance::SinaiReduced => "sinai-reduced",
            Provenance::BilliardGeometric => "billiard-geometric",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Potential {
    matrix: TransitionMatrix,
    cylinders: Cylinders,
    values: Vec<f64>,
    positive: bool,
    provenance: Provenance,
    d0: f64,
    d1: f64,
}

impl Potential {
    /// Tabulate `f` on every admissible `depth`-word.
    pub fn from_fn(
        a: &TransitionMatrix,
        depth: usize,
        provenance: Provenance,
        f: impl Fn(&[Symbol]) -> f64,
    ) -> Result<Self> {
        let cylinders = Cylinders::new(a, depth)?;
        let values = cylinders.words().iter().map(|w| f(w.symbols())).collect();
        Self::assemble(a.clone(), cylinders, values, provenance)
    }

    /// Build from explicit `(word, value)` entries; every admissible word must
    /// appear exactly once.
    pub fn from_table<I>(a: &TransitionMatrix, depth: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, f64)>,
    {
        let cylinders = Cylinders::new(a, depth)?;
        let mut values = vec![None; cylinders.len()];
        for (w, v) in entries {
            let idx = cylinders.index_of(w.symbols()).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "{} is not an admissible word of length {depth}",
                    w.format(a.size())
                ))
            })?;
            if values[idx].replace(v).is_some() {
                return Err(Error::InconsistentInput(format!(
                    "duplicate entry for {}",
                    w.format(a.size())
                )));
            }
        }
        let values = values
            .into_iter()
            .zip(cylinders.words())
            .map(|(v, w)| v.ok_or_else(|| Error::MissingCylinder(w.format(a.size()))))
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(a.clone(), cylinders, values, Provenance::ExplicitTable)
    }

    /// Depth-1 potential with `values[i]` on the cylinder of symbol `i`.
    pub fn single_symbol(a: &TransitionMatrix, values: &[f64]) -> Result<Self> {
        if values.len() != a.size() {
            return Err(Error::InvalidInput(format!(
                "expected {} values, got {}",
                a.size(),
                values.len()
            )));
        }
        Self::from_fn(a, 1, Provenance::ExplicitTable, |w| values[w[0] as usize])
    }

    pub fn constant(a: &TransitionMatrix, c: f64) -> Result<Self> {
        Self::from_fn(a, 1, Provenance::ExplicitTable, |_| c)
    }

    fn assemble(
        matrix: TransitionMatrix,
        cylinders: Cylinders,
        values: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value on cylinder {}",
                cylinders.words()[bad].format(matrix.size())
            )));
        }
        let d0 = values.iter().copied().fold(f64::INFINITY, f64::min);
        let d1 = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            matrix,
            cylinders,
            positive: d0 > 0.0,
            values,
            provenance,
            d0,
            d1,
        })
    }

    pub(crate) fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    pub fn depth(&self) -> usize {
        self.cylinders.depth()
    }

    pub fn cylinders(&self) -> &Cylinders {
        &self.cylinders
    }

    /// Values in cylinder order (see [`Cylinders::words`]).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Minimum table value.
    pub fn d0(&self) -> f64 {
        self.d0
    }

    /// Maximum table value.
    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn require_positive(&self) -> Result<()> {
        if self.positive {
            Ok(())
        } else {
            Err(Error::PositivityViolated { min: self.d0 })
        }
    }

    /// Value on the cylinder of an exact `k`-word.
    pub fn value(&self, w: &[Symbol]) -> Option<f64> {
        self.cylinders.index_of(w).map(|i| self.values[i])
    }

    #[inline]
    pub(crate) fn value_by_code(&self, code: usize) -> Option<f64> {
        self.cylinders.index_by_code(code).map(|i| self.values[i])
    }

    /// `f^n` on the periodic extension of `w`.
    pub fn birkhoff_sum(&self, w: &[Symbol]) -> Result<f64> {
        if w.is_empty() {
            return Err(Error::InvalidInput("empty word".into()));
        }
        let mut total = 0.0;
        for j in 0..w.len() {
            let idx = self
                .cylinders
                .periodic_index(w, j)
                .ok_or_else(|| self.missing_window(w, j))?;
            total += self.values[idx];
        }
        Ok(total)
    }

    fn missing_window(&self, w: &[Symbol], j: usize) -> Error {
        let n = w.len();
        let window: Vec<Symbol> = (0..self.depth()).map(|i| w[(j + i) % n]).collect();
        Error::MissingCylinder(symbolic::format_symbols(&window, self.matrix.size()))
    }

    /// The same function tabulated at a larger depth.
    pub fn resample(&self, depth: usize) -> Result<Self> {
        if depth < self.depth() {
            return Err(Error::InvalidInput(format!(
                "cannot resample depth {} down to {depth}",
                self.depth()
            )));
        }
        let k = self.depth();
        Self::from_fn(&self.matrix, depth, self.provenance, |w| {
            self.value(&w[..k]).expect("prefix of an admissible word is admissible")
        })
    }

    /// CSV with header `word,value`, one row per cylinder in lexicographic order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("word,value\n");
        for (w, v) in self.cylinders.words().iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", w.format(self.matrix.size()), format::real(*v));
        }
        out
    }

    pub fn from_csv(a: &TransitionMatrix, depth: usize, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("word")) {
                continue;
            }
            let (w, v) = line.split_once(',').ok_or_else(|| {
                Error::InvalidInput(format!("line {}: expected word,value", lineno + 1))
            })?;
            let value: f64 = v.trim().parse().map_err(|_| {
                Error::InvalidInput(format!("line {}: bad value {v:?}", lineno + 1))
            })?;
            entries.push((Word::parse(w, a.size())?, value));
        }
        Self::from_table(a, depth, entries)
    }
}

/// A function on the two-sided shift, observed through a finite window.
///
/// `past` holds `past_len()` coordinates `xi_{-L}..xi_{-1}` (oldest first) and
/// `future` holds `future_len()` coordinates `xi_0, xi_1, ...`.
pub trait TwoSidedObservable: Sync {
    fn past_len(&self) -> usize;
    fn future_len(&self) -> usize;
    fn eval(&self, past: &[Symbol], future: &[Symbol]) -> Result<f64>;

    /// False if `eval` must not be called from several threads at once.
    fn concurrent(&self) -> bool {
        true
    }
}

/// One fixed admissible past per symbol; `pasts[s]` ends with `s` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailAnchor {
    pasts: Vec<Vec<Symbol>>,
}

impl TailAnchor {
    /// Pasts built by repeatedly taking the smallest admissible predecessor.
    pub fn greedy(a: &TransitionMatrix, len: usize) -> Self {
        Self {
            pasts: (0..a.size() as Symbol)
                .map(|s| a.extend_past(s, len + 1))
                .collect(),
        }
    }

    pub fn new(a: &TransitionMatrix, pasts: Vec<Vec<Symbol>>) -> Result<Self> {
        if pasts.len() != a.size() {
            return Err(Error::InvalidInput("one anchor per symbol required".into()));
        }
        for (s, p) in pasts.iter().enumerate() {
            if p.last() != Some(&(s as Symbol)) || !a.is_admissible(p) {
                return Err(Error::InvalidInput(format!(
                    "anchor for symbol {} must be admissible and end in it",
                    s + 1
                )));
            }
        }
        Ok(Self { pasts })
    }

    /// Symbols strictly before the present coordinate.
    pub fn past(&self, s: Symbol) -> &[Symbol] {
        let p = &self.pasts[s as usize];
        &p[..p.len() - 1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinaiOptions {
    pub n_tail: usize,
    pub tail_tol: f64,
}

impl Default for SinaiOptions {
    fn default() -> Self {
        Self {
            n_tail: 60,
            tail_tol: 1e-10,
        }
    }
}

/// Replace a two-sided observable `F` by a cohomologous function of the
/// future only, tabulated at `depth`.
///
/// For a one-sided point `xi` the value is
/// `F(e(xi)) + sum_{n>=1} [F(sigma^n e(xi)) - F(sigma^{n-1} e(sigma xi))]`,
/// where `e` glues the anchored past in front of `xi`. The point representing
/// each cylinder is the periodic (or greedy) extension of its word.
pub fn sinai_reduce(
    observable: &dyn TwoSidedObservable,
    a: &TransitionMatrix,
    anchors: &TailAnchor,
    depth: usize,
    opts: SinaiOptions,
) -> Result<Potential> {
    let lp = observable.past_len();
    if anchors.pasts.iter().any(|p| p.len() < lp + 1) {
        return Err(Error::InvalidInput(format!(
            "anchors shorter than the observable's past window ({lp})"
        )));
    }
    let cylinders = Cylinders::new(a, depth)?;
    let horizon = opts.n_tail + observable.future_len() + depth + 1;
    let reduce_one = |w: &Word| -> Result<f64> {
        let xi = a.extend_future(w.symbols(), horizon);
        // coordinates of sigma^n e(xi), glued past first
        let glued = |start: usize, n: usize| -> Vec<Symbol> {
            let mut v = anchors.past(xi[start]).to_vec();
            v.extend_from_slice(&xi[start..start + n]);
            v
        };
        let eval_at = |start: usize, n: usize| -> Result<f64> {
            let past = glued(start, n);
            let fut = &xi[start + n..start + n + observable.future_len()];
            observable.eval(&past[past.len() - lp..], fut)
        };
        let mut total = eval_at(0, 0)?;
        let mut last = 0.0;
        for n in 1..=opts.n_tail {
            last = eval_at(0, n)? - eval_at(1, n - 1)?;
            total += last;
        }
        if last.abs() > opts.tail_tol {
            return Err(Error::TailNotConverged {
                last_term: last.abs(),
                tol: opts.tail_tol,
            });
        }
        Ok(total)
    };
    let values = if observable.concurrent() {
        par::try_map(cylinders.words(), reduce_one)?
    } else {
        cylinders.words().iter().map(reduce_one).collect::<Result<Vec<_>>>()?
    };
    Potential::assemble(a.clone(), cylinders, values, Provenance::SinaiReduced)
}

/// Two-sided Birkhoff sum of `F` over the periodic point with period word `w`.
pub fn two_sided_periodic_sum(observable: &dyn TwoSidedObservable, w: &[Symbol]) -> Result<f64> {
    let n = w.len();
    let lp = observable.past_len();
    let lf = observable.future_len();
    let at = |i: isize| w[i.rem_euclid(n as isize) as usize];
    let mut total = 0.0;
    for j in 0..n as isize {
        let past: Vec<Symbol> = (j - lp as isize..j).map(at).collect();
        let fut: Vec<Symbol> = (j..j + lf as isize).map(at).collect();
        total += observable.eval(&past, &fut)?;
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeVerdict {
    LooksNonLattice,
    LooksLattice,
    Inconclusive,
}

impl LatticeVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            LatticeVerdict::LooksNonLattice => "looks-non-lattice",
            LatticeVerdict::LooksLattice => "looks-lattice",
            LatticeVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeScreenReport {
    pub verdict: LatticeVerdict,
    pub gamma0: f64,
    pub gamma1: f64,
    pub max_residual: f64,
    pub orbits_tested: usize,
    pub n_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeScreenOptions {
    pub n_max: usize,
    pub lattice_tol: f64,
    /// Residual above which no candidate step is accepted as a lattice.
    pub non_lattice_floor: f64,
    /// Candidate steps are `g0 / k` for `k` up to this bound.
    pub max_divisor: usize,
    pub budget: u128,
}

impl Default for LatticeScreenOptions {
    fn default() -> Self {
        Self {
            n_max: 12,
            lattice_tol: 1e-8,
            non_lattice_floor: 1e-6,
            max_divisor: 64,
            budget: symbolic::DEFAULT_BUDGET,
        }
    }
}

/// Heuristic test of whether the primitive periods fit `gamma0 n + gamma1 m`.
pub fn screen_lattice(f: &Potential, opts: LatticeScreenOptions) -> Result<LatticeScreenReport> {
    let a = f.matrix();
    let mut periods = Vec::new();
    for n in 1..=opts.n_max {
        for w in symbolic::primitive_orbits(a, n, opts.budget)? {
            periods.push((n as f64, f.birkhoff_sum(w.symbols())?));
        }
    }
    Ok(screen_periods(&periods, opts))
}

/// [`screen_lattice`] on precomputed `(n, T)` pairs.
pub fn screen_periods(periods: &[(f64, f64)], opts: LatticeScreenOptions) -> LatticeScreenReport {
    let mut report = LatticeScreenReport {
        verdict: LatticeVerdict::Inconclusive,
        gamma0: f64::NAN,
        gamma1: f64::NAN,
        max_residual: f64::NAN,
        orbits_tested: periods.len(),
        n_max: opts.n_max,
    };
    let Some(&(nr, tr)) = periods
        .iter()
        .min_by(|x, y| (x.1 / x.0).total_cmp(&(y.1 / y.0)))
    else {
        return report;
    };
    let gamma0 = tr / nr;
    let y: Vec<f64> = periods.iter().map(|&(n, t)| t - n * gamma0).collect();
    let spread = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if spread < opts.lattice_tol {
        report.verdict = LatticeVerdict::LooksLattice;
        report.gamma0 = gamma0;
        report.gamma1 = 0.0;
        report.max_residual = spread;
        return report;
    }
    let g0 = y
        .iter()
        .map(|v| v.abs())
        .filter(|&v| v >= opts.lattice_tol)
        .fold(f64::INFINITY, f64::min);
    let mut best: Option<(f64, f64, f64)> = None;
    for k in 1..=opts.max_divisor {
        let g = g0 / k as f64;
        let ms: Vec<f64> = y.iter().map(|v| (v / g).round()).collect();
        let (c0, c1) = least_squares(periods, &ms).unwrap_or((gamma0, g));
        let resid = periods
            .iter()
            .zip(&ms)
            .map(|(&(n, t), &m)| (t - c0 * n - c1 * m).abs())
            .fold(0.0f64, f64::max);
        if best.is_none_or(|b| resid < b.2) {
            best = Some((c0, c1, resid));
        }
        if resid < opts.lattice_tol {
            break;
        }
    }
    let (c0, c1, resid) = best.expect("at least one candidate step");
    report.gamma0 = c0;
    report.gamma1 = c1;
    report.max_residual = resid;
    report.verdict = if resid < opts.lattice_tol {
        LatticeVerdict::LooksLattice
    } else if resid >= opts.non_lattice_floor {
        LatticeVerdict::LooksNonLattice
    } else {
        LatticeVerdict::Inconclusive
    };
    report
}

/// Least-squares `(c0, c1)` for `T ~ c0 n + c1 m`.
fn least_squares(periods: &[(f64, f64)], ms: &[f64]) -> Option<(f64, f64)> {
    let (mut snn, mut snm, mut smm, mut snt, mut smt) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&(n, t), &m) in periods.iter().zip(ms) {
        snn += n * n;
        snm += n * m;
        smm += m * m;
        snt += n * t;
        smt += m * t;
    }
    let det = snn * smm - snm * snm;
    if det.abs() <= 1e-12 * snn * smm.max(1.0) {
        return None;
    }
    Some(((snt * smm - smt * snm) / det, (snn * smt - snm * snt) / det))
}

/// Birkhoff sums of every primitive orbit of length `n`, keyed by canonical word.
pub fn primitive_periods(f: &Potential, n: usize, budget: u128) -> Result<HashMap<Word, f64>> {
    symbolic::primitive_orbits(f.matrix(), n, budget)?
        .into_iter()
        .map(|w| {
            let t = f.birkhoff_sum(w.symbols())?;
            Ok((w, t))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::DEFAULT_BUDGET;

    fn nr3() -> TransitionMatrix {
        TransitionMatrix::no_repeat(3)
    }

    fn w(s: &str) -> Word {
        Word::parse(s, 3).unwrap()
    }

    #[test]
    fn birkhoff_examples() {
        let full2 = TransitionMatrix::full_shift(2);
        let c = Potential::constant(&full2, 2.5).unwrap();
        assert_eq!(c.birkhoff_sum(&[0, 1, 1, 0, 1]).unwrap(), 12.5);
        let golden = Potential::single_symbol(&full2, &[1.0, 2.0]).unwrap();
        assert_eq!(golden.birkhoff_sum(&[0, 1]).unwrap(), 3.0);
        let f2 = Potential::from_fn(&nr3(), 2, Provenance::ExplicitTable, |v| {
            (10 * (v[0] + 1) + v[1] + 1) as f64
        })
        .unwrap();
        assert_eq!(f2.birkhoff_sum(w("123").symbols()).unwrap(), 12.0 + 23.0 + 31.0);
        // shorter than the depth: windows wrap several times
        let f3 = f2.resample(3).unwrap();
        assert_eq!(f3.birkhoff_sum(w("12").symbols()).unwrap(), 12.0 + 21.0);
    }

    #[test]
    fn missing_and_duplicate_entries() {
        let a = nr3();
        let e = Potential::from_table(&a, 1, vec![(w("1"), 1.0), (w("2"), 1.0)]);
        assert_eq!(e.unwrap_err(), Error::MissingCylinder("3".into()));
        let e = Potential::from_table(&a, 1, vec![(w("1"), 1.0), (w("1"), 2.0)]);
        assert!(matches!(e, Err(Error::InconsistentInput(_))));
        let e = Potential::from_table(&a, 2, vec![(w("11"), 1.0)]);
        assert!(matches!(e, Err(Error::InvalidInput(_))));
        let f = Potential::constant(&a, 1.0).unwrap();
        assert!(matches!(f.birkhoff_sum(&[0, 0]), Ok(2.0)));
        let f2 = f.resample(2).unwrap();
        assert!(matches!(f2.birkhoff_sum(&[0, 0]), Err(Error::MissingCylinder(_))));
    }

    #[test]
    fn flags_and_bounds() {
        let a = nr3();
        let f = Potential::single_symbol(&a, &[0.5, -1.0, 2.0]).unwrap();
        assert!(!f.is_positive());
        assert_eq!((f.d0(), f.d1()), (-1.0, 2.0));
        assert_eq!(f.require_positive(), Err(Error::PositivityViolated { min: -1.0 }));
    }

    #[test]
    fn csv_round_trip_is_bit_stable() {
        let a = nr3();
        let f = Potential::from_fn(&a, 2, Provenance::ExplicitTable, |v| {
            (v[0] as f64 + 1.0).sqrt() / 3.0 + std::f64::consts::PI * v[1] as f64
        })
        .unwrap();
        let text = f.to_csv();
        assert!(text.starts_with("word,value\n12,"));
        let g = Potential::from_csv(&a, 2, &text).unwrap();
        for (x, y) in f.values().iter().zip(g.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(g.to_csv(), text);
    }

    struct FutureOnly;
    impl TwoSidedObservable for FutureOnly {
        fn past_len(&self) -> usize {
            0
        }
        fn future_len(&self) -> usize {
            2
        }
        fn eval(&self, _: &[Symbol], fut: &[Symbol]) -> Result<f64> {
            Ok(1.0 + fut[0] as f64 + 0.25 * fut[1] as f64)
        }
    }

    struct PastAndPresent([f64; 3]);
    impl TwoSidedObservable for PastAndPresent {
        fn past_len(&self) -> usize {
            1
        }
        fn future_len(&self) -> usize {
            1
        }
        fn eval(&self, past: &[Symbol], fut: &[Symbol]) -> Result<f64> {
            Ok(self.0[fut[0] as usize] + self.0[past[0] as usize])
        }
    }

    #[test]
    fn sinai_on_future_only_observable_is_sampling() {
        let a = nr3();
        let anchors = TailAnchor::greedy(&a, 4);
        let f = sinai_reduce(&FutureOnly, &a, &anchors, 2, SinaiOptions::default()).unwrap();
        for (wd, v) in f.cylinders().words().iter().zip(f.values()) {
            assert_eq!(*v, FutureOnly.eval(&[], wd.symbols()).unwrap());
        }
        assert_eq!(f.provenance(), Provenance::SinaiReduced);
    }

    #[test]
    fn sinai_preserves_periodic_sums_of_past_dependent_observable() {
        let a = nr3();
        let g = [0.7, 1.9, 3.4];
        let obs = PastAndPresent(g);
        let anchors = TailAnchor::greedy(&a, 3);
        let f = sinai_reduce(&obs, &a, &anchors, 2, SinaiOptions::default()).unwrap();
        for n in 2..=6 {
            for word in symbolic::enumerate_periodic(&a, n, DEFAULT_BUDGET).unwrap() {
                let s = word.symbols();
                let one_sided = f.birkhoff_sum(s).unwrap();
                let doubled: f64 = s.iter().map(|&x| 2.0 * g[x as usize]).sum();
                assert!((one_sided - doubled).abs() < 1e-12, "{word}");
                let two_sided = two_sided_periodic_sum(&obs, s).unwrap();
                assert!((two_sided - doubled).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn anchors_validate() {
        let a = nr3();
        assert!(TailAnchor::new(&a, vec![vec![1, 0], vec![0, 1], vec![0, 2]]).is_ok());
        assert!(TailAnchor::new(&a, vec![vec![0, 0], vec![0, 1], vec![0, 2]]).is_err());
        assert!(TailAnchor::new(&a, vec![vec![1, 0], vec![0, 1], vec![0, 1]]).is_err());
    }

    #[test]
    fn lattice_screen_examples() {
        let full2 = TransitionMatrix::full_shift(2);
        let opts = LatticeScreenOptions {
            n_max: 8,
            ..Default::default()
        };
        let two_valued = Potential::single_symbol(&full2, &[1.3, 2.1]).unwrap();
        let r = screen_lattice(&two_valued, opts).unwrap();
        assert_eq!(r.verdict, LatticeVerdict::LooksLattice);
        assert!((r.gamma0 - 1.3).abs() < 1e-9 && (r.gamma1 - 0.8).abs() < 1e-9);

        let c = Potential::constant(&nr3(), 1.7).unwrap();
        let r = screen_lattice(&c, opts).unwrap();
        assert_eq!(r.verdict, LatticeVerdict::LooksLattice);
        assert_eq!(r.gamma1, 0.0);

        let irr = Potential::single_symbol(&nr3(), &[1.0, 2f64.sqrt(), std::f64::consts::PI])
            .unwrap();
        let r = screen_lattice(&irr, opts).unwrap();
        assert_eq!(r.verdict, LatticeVerdict::LooksNonLattice);
    }
}
