//! Subshifts of finite type: transition matrices, admissible words, the
//! `d_theta` metric and exhaustive enumeration of periodic points.
//!
//! Symbols are stored zero-based (`0..kappa`); every textual form is one-based
//! so that the 3-symbol word `[0, 1, 2]` prints as `123`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::par;

pub type Symbol = u8;

/// Default cap on the number of fixed points enumerated for a single `n`.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Cap on `kappa^depth`, the size of the dense cylinder code table.
pub const DENSE_CODE_CAP: usize = 1 << 24;

/// Aperiodic 0/1 matrix defining the one-sided shift space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    size: usize,
    entries: Vec<bool>,
    witness: usize,
}

/// Smallest `M <= kappa^2` with `A^M` entrywise positive.
pub fn validate_aperiodic(rows: &[Vec<u8>]) -> Result<usize> {
    let size = rows.len();
    if size < 2 {
        return Err(Error::InvalidInput(format!(
            "transition matrix needs at least 2 symbols, got {size}"
        )));
    }
    if size > Symbol::MAX as usize {
        return Err(Error::InvalidInput(format!("too many symbols: {size}")));
    }
    let mut entries = Vec::with_capacity(size * size);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != size {
            return Err(Error::InvalidInput(format!(
                "row {} has {} entries, expected {size}",
                i + 1,
                row.len()
            )));
        }
        for &v in row {
            match v {
                0 => entries.push(false),
                1 => entries.push(true),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "entry {v} in row {} is not 0 or 1",
                        i + 1
                    )))
                }
            }
        }
    }
    witness_exponent(size, &entries)
}

fn witness_exponent(size: usize, entries: &[bool]) -> Result<usize> {
    for i in 0..size {
        if !(0..size).any(|j| entries[i * size + j]) {
            return Err(Error::DeadState(format!("row {} is zero", i + 1)));
        }
        if !(0..size).any(|j| entries[j * size + i]) {
            return Err(Error::DeadState(format!("column {} is zero", i + 1)));
        }
    }
    let max_power = size * size;
    let mut power = entries.to_vec();
    for m in 1..=max_power {
        if power.iter().all(|&b| b) {
            return Ok(m);
        }
        let mut next = vec![false; size * size];
        for i in 0..size {
            for l in 0..size {
                if power[i * size + l] {
                    for j in 0..size {
                        if entries[l * size + j] {
                            next[i * size + j] = true;
                        }
                    }
                }
            }
        }
        power = next;
    }
    Err(Error::NotAperiodic { max_power })
}

impl TransitionMatrix {
    pub fn new(rows: &[Vec<u8>]) -> Result<Self> {
        let witness = validate_aperiodic(rows)?;
        let size = rows.len();
        let entries = rows.iter().flatten().map(|&v| v == 1).collect();
        Ok(Self {
            size,
            entries,
            witness,
        })
    }

    /// The full shift on `kappa` symbols.
    pub fn full_shift(kappa: usize) -> Self {
        Self::new(&vec![vec![1; kappa]; kappa]).expect("full shift is aperiodic")
    }

    /// `A(i, j) = 1` iff `i != j`; the coding matrix of open billiards.
    pub fn no_repeat(kappa: usize) -> Self {
        let rows: Vec<Vec<u8>> = (0..kappa)
            .map(|i| (0..kappa).map(|j| u8::from(i != j)).collect())
            .collect();
        Self::new(&rows).expect("no-repeat matrix with kappa >= 3 is aperiodic")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Smallest `M` with `A^M > 0`.
    pub fn witness(&self) -> usize {
        self.witness
    }

    #[inline]
    pub fn allowed(&self, from: Symbol, to: Symbol) -> bool {
        self.entries[from as usize * self.size + to as usize]
    }

    pub fn successors(&self, from: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.size as Symbol).filter(move |&t| self.allowed(from, t))
    }

    pub fn predecessors(&self, to: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.size as Symbol).filter(move |&s| self.allowed(s, to))
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.entries
            .chunks(self.size)
            .map(|r| r.iter().map(|&b| u8::from(b)).collect())
            .collect()
    }

    /// Consecutive pairs admissible.
    pub fn is_admissible(&self, w: &[Symbol]) -> bool {
        w.iter().all(|&s| (s as usize) < self.size)
            && w.windows(2).all(|p| self.allowed(p[0], p[1]))
    }

    /// Admissible including the wrap-around pair.
    pub fn is_cyclically_admissible(&self, w: &[Symbol]) -> bool {
        !w.is_empty() && self.is_admissible(w) && self.allowed(w[w.len() - 1], w[0])
    }

    /// Extend `w` to `len` symbols: periodically when `w` closes up, otherwise
    /// by always taking the smallest admissible successor.
    pub fn extend_future(&self, w: &[Symbol], len: usize) -> Vec<Symbol> {
        let mut out = Vec::with_capacity(len.max(w.len()));
        if self.is_cyclically_admissible(w) {
            out.extend((0..len.max(w.len())).map(|i| w[i % w.len()]));
        } else {
            out.extend_from_slice(w);
            while out.len() < len {
                let last = *out.last().expect("non-empty word");
                out.push(self.successors(last).next().expect("no dead states"));
            }
        }
        out
    }

    /// Admissible past of `len` symbols ending in `end`, oldest first, built
    /// by always taking the smallest admissible predecessor.
    pub fn extend_past(&self, end: Symbol, len: usize) -> Vec<Symbol> {
        let mut rev = vec![end];
        while rev.len() < len {
            let first = *rev.last().expect("non-empty");
            rev.push(self.predecessors(first).next().expect("no dead states"));
        }
        rev.reverse();
        rev
    }
}

/// Exact `#Fix(sigma^n) = trace(A^n)` in 128-bit arithmetic.
pub fn count_fixed_points(a: &TransitionMatrix, n: usize) -> Result<u128> {
    if n == 0 {
        return Err(Error::InvalidInput("period n must be at least 1".into()));
    }
    let k = a.size();
    let base: Vec<u128> = a.entries.iter().map(|&b| u128::from(b)).collect();
    let mut power = base.clone();
    for _ in 1..n {
        let mut next = vec![0u128; k * k];
        for i in 0..k {
            for l in 0..k {
                let p = power[i * k + l];
                if p == 0 {
                    continue;
                }
                for j in 0..k {
                    if base[l * k + j] != 0 {
                        next[i * k + j] = next[i * k + j]
                            .checked_add(p)
                            .ok_or(Error::Overflow { n })?;
                    }
                }
            }
        }
        power = next;
    }
    (0..k).try_fold(0u128, |acc, i| {
        acc.checked_add(power[i * k + i]).ok_or(Error::Overflow { n })
    })
}

/// A finite sequence of symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    /// Build from one-based symbols, e.g. `&[1, 2, 3]`.
    pub fn from_one_based(symbols: &[usize]) -> Self {
        Word(
            symbols
                .iter()
                .map(|&s| {
                    assert!(s >= 1, "one-based symbols start at 1");
                    (s - 1) as Symbol
                })
                .collect(),
        )
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rotated(&self, by: usize) -> Word {
        let n = self.0.len();
        Word((0..n).map(|i| self.0[(i + by) % n]).collect())
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn repeated(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    /// Lexicographically least rotation.
    pub fn canonical_rotation(&self) -> Word {
        self.rotated(least_rotation(&self.0))
    }

    pub fn minimal_period(&self) -> usize {
        minimal_period(&self.0)
    }

    pub fn is_primitive(&self) -> bool {
        self.minimal_period() == self.0.len()
    }

    /// One-based digits for `kappa <= 9`, dot-separated otherwise.
    pub fn format(&self, kappa: usize) -> String {
        format_symbols(&self.0, kappa)
    }

    pub fn parse(text: &str, kappa: usize) -> Result<Word> {
        let bad = || Error::InvalidInput(format!("cannot parse word {text:?} over {kappa} symbols"));
        let text = text.trim();
        if text.is_empty() {
            return Err(bad());
        }
        let symbols: Vec<usize> = if kappa <= 9 {
            text.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_>>()?
        } else {
            text.split('.')
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        if symbols.iter().any(|&s| s == 0 || s > kappa) {
            return Err(bad());
        }
        Ok(Word(symbols.iter().map(|&s| (s - 1) as Symbol).collect()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kappa = self.0.iter().map(|&s| s as usize + 1).max().unwrap_or(1);
        f.write_str(&format_symbols(&self.0, kappa))
    }
}

pub fn format_symbols(symbols: &[Symbol], kappa: usize) -> String {
    if kappa <= 9 {
        symbols.iter().map(|&s| char::from(b'1' + s)).collect()
    } else {
        symbols
            .iter()
            .map(|&s| (s as usize + 1).to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Start index of the least rotation (two-pointer scan, linear time).
pub fn least_rotation(s: &[Symbol]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// True when `s` is its own least rotation.
pub fn is_least_rotation(s: &[Symbol]) -> bool {
    let n = s.len();
    (1..n).all(|r| {
        for t in 0..n {
            let a = s[t];
            let b = s[(t + r) % n];
            if a != b {
                return a < b;
            }
        }
        true
    })
}

pub fn minimal_period(s: &[Symbol]) -> usize {
    let n = s.len();
    (1..=n)
        .filter(|d| n % d == 0)
        .find(|&d| (0..n).all(|i| s[i] == s[(i + d) % n]))
        .unwrap_or(n)
}

/// Admissible `depth`-words in lexicographic order with a dense code index.
#[derive(Clone, Debug)]
pub struct Cylinders {
    kappa: usize,
    depth: usize,
    words: Vec<Word>,
    index: Vec<u32>,
}

impl Cylinders {
    pub fn new(a: &TransitionMatrix, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidInput("cylinder depth must be at least 1".into()));
        }
        let kappa = a.size();
        let codes = kappa
            .checked_pow(depth as u32)
            .filter(|&c| c <= DENSE_CODE_CAP)
            .ok_or(Error::StateSpaceTooLarge {
                states: usize::MAX,
                cap: DENSE_CODE_CAP,
            })?;
        let mut words = Vec::new();
        let mut buf = Vec::with_capacity(depth);
        fn rec(a: &TransitionMatrix, depth: usize, buf: &mut Vec<Symbol>, out: &mut Vec<Word>) {
            if buf.len() == depth {
                out.push(Word(buf.clone()));
                return;
            }
            let cands: Vec<Symbol> = match buf.last() {
                None => (0..a.size() as Symbol).collect(),
                Some(&l) => a.successors(l).collect(),
            };
            for t in cands {
                buf.push(t);
                rec(a, depth, buf, out);
                buf.pop();
            }
        }
        rec(a, depth, &mut buf, &mut words);
        let mut index = vec![u32::MAX; codes];
        for (i, w) in words.iter().enumerate() {
            index[code_of(kappa, w.symbols())] = i as u32;
        }
        Ok(Self {
            kappa,
            depth,
            words,
            index,
        })
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    #[inline]
    pub fn code(&self, w: &[Symbol]) -> usize {
        code_of(self.kappa, w)
    }

    pub fn index_of(&self, w: &[Symbol]) -> Option<usize> {
        if w.len() != self.depth || w.iter().any(|&s| s as usize >= self.kappa) {
            return None;
        }
        match self.index[self.code(w)] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    #[inline]
    pub(crate) fn index_by_code(&self, code: usize) -> Option<usize> {
        match self.index[code] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    /// Index of the depth-word read from the periodic extension of `w`
    /// starting at position `start`.
    pub fn periodic_index(&self, w: &[Symbol], start: usize) -> Option<usize> {
        let n = w.len();
        let code = (0..self.depth).fold(0usize, |c, i| c * self.kappa + w[(start + i) % n] as usize);
        self.index_by_code(code)
    }
}

#[inline]
pub(crate) fn code_of(kappa: usize, w: &[Symbol]) -> usize {
    w.iter().fold(0usize, |c, &s| c * kappa + s as usize)
}

/// Admissible prefixes used to split enumeration into independent shards.
pub fn shard_prefixes(a: &TransitionMatrix, n: usize) -> Vec<Vec<Symbol>> {
    let len = n.min(2);
    let mut out = Vec::new();
    for s in 0..a.size() as Symbol {
        if len == 1 {
            out.push(vec![s]);
        } else {
            for t in a.successors(s) {
                out.push(vec![s, t]);
            }
        }
    }
    out
}

/// Depth-first walk over the length-`n` cyclically admissible words that start
/// with `prefix`, in lexicographic order.
///
/// `keep` is called on every prefix (lengths `1..=n`, in walk order) and can
/// prune a subtree by returning false; `visit` receives each complete word.
pub fn walk_shard(
    a: &TransitionMatrix,
    n: usize,
    prefix: &[Symbol],
    keep: &mut dyn FnMut(&[Symbol]) -> bool,
    visit: &mut dyn FnMut(&[Symbol]),
) {
    if prefix.is_empty() || prefix.len() > n || !a.is_admissible(prefix) {
        return;
    }
    let mut buf = Vec::with_capacity(n);
    for &s in prefix {
        buf.push(s);
        if !keep(&buf) {
            return;
        }
    }
    fn rec(
        a: &TransitionMatrix,
        n: usize,
        buf: &mut Vec<Symbol>,
        keep: &mut dyn FnMut(&[Symbol]) -> bool,
        visit: &mut dyn FnMut(&[Symbol]),
    ) {
        let last = buf[buf.len() - 1];
        if buf.len() == n {
            if a.allowed(last, buf[0]) {
                visit(buf);
            }
            return;
        }
        for t in 0..a.size() as Symbol {
            if !a.allowed(last, t) {
                continue;
            }
            buf.push(t);
            if keep(buf) {
                rec(a, n, buf, keep, visit);
            }
            buf.pop();
        }
    }
    rec(a, n, &mut buf, keep, visit);
}

/// Fail with `BudgetExceeded` when `trace(A^n)` is above `budget`.
pub fn check_budget(a: &TransitionMatrix, n: usize, budget: u128) -> Result<u128> {
    let predicted = count_fixed_points(a, n)?;
    if predicted > budget {
        return Err(Error::BudgetExceeded {
            predicted,
            cap: budget,
        });
    }
    Ok(predicted)
}

/// Run `per_shard` over every enumeration shard (in parallel when enabled) and
/// return the per-shard results in shard order.
pub fn map_shards<T, F>(a: &TransitionMatrix, n: usize, budget: u128, per_shard: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[Symbol]) -> T + Sync + Send,
{
    check_budget(a, n, budget)?;
    let shards = shard_prefixes(a, n);
    Ok(par::map(&shards, |p| per_shard(p)))
}

/// Every length-`n` cyclically admissible word, each exactly once, in
/// lexicographic order.
pub fn enumerate_periodic(a: &TransitionMatrix, n: usize, budget: u128) -> Result<Vec<Word>> {
    if n == 0 {
        return Err(Error::InvalidInput("period n must be at least 1".into()));
    }
    let shards = map_shards(a, n, budget, |prefix| {
        let mut out = Vec::new();
        walk_shard(a, n, prefix, &mut |_| true, &mut |w| out.push(Word(w.to_vec())));
        out
    })?;
    Ok(shards.into_iter().flatten().collect())
}

/// Canonical representatives of the primitive length-`n` orbits, sorted.
pub fn primitive_orbits(a: &TransitionMatrix, n: usize, budget: u128) -> Result<Vec<Word>> {
    let shards = map_shards(a, n, budget, |prefix| {
        let mut out = Vec::new();
        walk_shard(a, n, prefix, &mut |_| true, &mut |w| {
            if is_least_rotation(w) && minimal_period(w) == n {
                out.push(Word(w.to_vec()));
            }
        });
        out
    })?;
    Ok(shards.into_iter().flatten().collect())
}

/// A periodic orbit of the shift, identified by its least rotation.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord {
    pub canonical_word: Word,
    pub length: usize,
    pub primitive: bool,
    /// Smallest `d | length` with `sigma^d x = x`.
    pub minimal_period: usize,
    pub f_period: Option<f64>,
}

impl OrbitRecord {
    pub fn from_word(w: &Word) -> Self {
        let d = w.minimal_period();
        OrbitRecord {
            canonical_word: w.canonical_rotation(),
            length: w.len(),
            primitive: d == w.len(),
            minimal_period: d,
            f_period: None,
        }
    }
}

/// Partition the fixed points of `sigma^n` into rotation classes.
pub fn group_primitive_orbits<I>(words: I) -> Result<Vec<OrbitRecord>>
where
    I: IntoIterator<Item = Word>,
{
    let words: Vec<Word> = words.into_iter().collect();
    let Some(first) = words.first() else {
        return Ok(Vec::new());
    };
    let n = first.len();
    if words.iter().any(|w| w.len() != n) {
        return Err(Error::InconsistentInput("words of different lengths".into()));
    }
    let set: HashSet<&[Symbol]> = words.iter().map(|w| w.symbols()).collect();
    let mut classes: BTreeMap<Word, OrbitRecord> = BTreeMap::new();
    for w in &words {
        let canon = w.canonical_rotation();
        if classes.contains_key(&canon) {
            continue;
        }
        for r in 1..n {
            let rot = w.rotated(r);
            if !set.contains(rot.symbols()) {
                return Err(Error::InconsistentInput(format!(
                    "rotation {rot} of {w} is missing"
                )));
            }
        }
        classes.insert(canon, OrbitRecord::from_word(w));
    }
    Ok(classes.into_values().collect())
}

/// A point of the one-sided shift: either a finite prefix (a cylinder
/// representative) or the periodic extension of a word.
#[derive(Clone, Copy, Debug)]
pub enum Point<'a> {
    Prefix(&'a [Symbol]),
    Periodic(&'a [Symbol]),
}

impl Point<'_> {
    fn symbol(&self, i: usize) -> Option<Symbol> {
        match *self {
            Point::Prefix(w) => w.get(i).copied(),
            Point::Periodic(w) if w.is_empty() => None,
            Point::Periodic(w) => Some(w[i % w.len()]),
        }
    }

    fn horizon(&self) -> Option<usize> {
        match *self {
            Point::Prefix(w) => Some(w.len()),
            Point::Periodic(_) => None,
        }
    }

    fn period(&self) -> usize {
        match *self {
            Point::Prefix(w) | Point::Periodic(w) => w.len().max(1),
        }
    }
}

/// `theta^m` where `m` is the length of the longest common prefix; 0 on
/// equality.
///
/// Two periodic points are compared over `lcm` of their periods. When a
/// finite prefix is involved and the two agree on the whole shared range the
/// result is `theta^len` unless both are the same finite word.
pub fn d_theta(x: Point<'_>, y: Point<'_>, theta: f64) -> f64 {
    assert!(theta > 0.0 && theta < 1.0, "theta must lie in (0, 1)");
    let limit = match (x.horizon(), y.horizon()) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => lcm(x.period(), y.period()),
    };
    for m in 0..limit {
        if x.symbol(m) != y.symbol(m) {
            return theta.powi(m as i32);
        }
    }
    match (x.horizon(), y.horizon()) {
        (None, None) => 0.0,
        (Some(a), Some(b)) if a == b => 0.0,
        _ => theta.powi(limit as i32),
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Shortest cyclically admissible word through each symbol (lexicographically
/// least among the shortest); used as the anchor point `x_i` of cylinder `C_i`.
pub fn cylinder_representatives(a: &TransitionMatrix) -> Vec<Word> {
    (0..a.size() as Symbol)
        .map(|i| {
            for len in 1..=a.size() {
                let mut found = None;
                walk_shard(a, len, &[i], &mut |_| true, &mut |w| {
                    if found.is_none() {
                        found = Some(Word(w.to_vec()));
                    }
                });
                if let Some(w) = found {
                    return w;
                }
            }
            unreachable!("aperiodic matrices have a cycle through every symbol")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 3).unwrap()
    }

    #[test]
    fn aperiodicity_witness() {
        assert_eq!(TransitionMatrix::full_shift(2).witness(), 1);
        assert_eq!(TransitionMatrix::no_repeat(3).witness(), 2);
        assert_eq!(
            validate_aperiodic(&[vec![1, 0], vec![0, 1]]),
            Err(Error::NotAperiodic { max_power: 4 })
        );
        // golden-mean shift needs the square
        assert_eq!(validate_aperiodic(&[vec![1, 1], vec![1, 0]]), Ok(2));
    }

    #[test]
    fn dead_states_and_shape_are_rejected() {
        assert!(matches!(
            validate_aperiodic(&[vec![1, 1], vec![0, 0]]),
            Err(Error::DeadState(_))
        ));
        assert!(matches!(
            validate_aperiodic(&[vec![1, 0], vec![1, 0]]),
            Err(Error::DeadState(_))
        ));
        assert!(matches!(
            validate_aperiodic(&[vec![1, 1]]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            validate_aperiodic(&[vec![1, 2], vec![1, 1]]),
            Err(Error::InvalidInput(_))
        ));
        // two-symbol no-repeat matrix is a permutation: periodic
        assert!(matches!(
            validate_aperiodic(&[vec![0, 1], vec![1, 0]]),
            Err(Error::NotAperiodic { .. })
        ));
    }

    #[test]
    fn fixed_point_counts() {
        let full2 = TransitionMatrix::full_shift(2);
        let nr3 = TransitionMatrix::no_repeat(3);
        assert_eq!(count_fixed_points(&full2, 4).unwrap(), 16);
        assert_eq!(count_fixed_points(&nr3, 3).unwrap(), 6);
        assert_eq!(count_fixed_points(&nr3, 4).unwrap(), 18);
        assert!(count_fixed_points(&nr3, 0).is_err());
        // 10 symbols, n = 60 fits in 128 bits; 40 full symbols at n = 30 does not.
        assert!(count_fixed_points(&TransitionMatrix::full_shift(10), 38).is_ok());
        assert!(matches!(
            count_fixed_points(&TransitionMatrix::full_shift(40), 30),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn enumeration_examples() {
        let full2 = TransitionMatrix::full_shift(2);
        let nr3 = TransitionMatrix::no_repeat(3);
        let fmt = |v: Vec<Word>| v.iter().map(|w| w.format(3)).collect::<Vec<_>>();
        assert_eq!(
            fmt(enumerate_periodic(&full2, 2, DEFAULT_BUDGET).unwrap()),
            ["11", "12", "21", "22"]
        );
        assert_eq!(
            fmt(enumerate_periodic(&nr3, 2, DEFAULT_BUDGET).unwrap()),
            ["12", "13", "21", "23", "31", "32"]
        );
        assert!(enumerate_periodic(&nr3, 1, DEFAULT_BUDGET).unwrap().is_empty());
        assert!(matches!(
            enumerate_periodic(&nr3, 10, 100),
            Err(Error::BudgetExceeded { predicted: 1026, cap: 100 })
        ));
    }

    #[test]
    fn grouping_examples() {
        let nr3 = TransitionMatrix::no_repeat(3);
        let full2 = TransitionMatrix::full_shift(2);
        let g2 = group_primitive_orbits(enumerate_periodic(&nr3, 2, DEFAULT_BUDGET).unwrap()).unwrap();
        let names: Vec<_> = g2.iter().map(|r| r.canonical_word.format(3)).collect();
        assert_eq!(names, ["12", "13", "23"]);
        assert!(g2.iter().all(|r| r.primitive));
        let g3 = group_primitive_orbits(enumerate_periodic(&nr3, 3, DEFAULT_BUDGET).unwrap()).unwrap();
        let names: Vec<_> = g3.iter().map(|r| r.canonical_word.format(3)).collect();
        assert_eq!(names, ["123", "132"]);
        let f2 = group_primitive_orbits(enumerate_periodic(&full2, 2, DEFAULT_BUDGET).unwrap()).unwrap();
        let summary: Vec<_> = f2
            .iter()
            .map(|r| (r.canonical_word.format(2), r.primitive, r.minimal_period))
            .collect();
        assert_eq!(
            summary,
            [("11".to_string(), false, 1), ("12".to_string(), true, 2), ("22".to_string(), false, 1)]
        );
    }

    #[test]
    fn grouping_detects_missing_rotation() {
        let r = group_primitive_orbits(vec![w("123"), w("231")]);
        assert!(matches!(r, Err(Error::InconsistentInput(_))));
    }

    #[test]
    fn words_parse_and_format() {
        assert_eq!(w("132").symbols(), &[0, 2, 1]);
        assert_eq!(w("132").format(3), "132");
        let big = Word::parse("10.2.11", 12).unwrap();
        assert_eq!(big.symbols(), &[9, 1, 10]);
        assert_eq!(big.format(12), "10.2.11");
        assert!(Word::parse("14", 3).is_err());
        assert!(Word::parse("", 3).is_err());
        assert_eq!(w("2131").canonical_rotation(), w("1213"));
        assert_eq!(w("1212").minimal_period(), 2);
        assert!(!w("1212").is_primitive());
    }

    #[test]
    fn least_rotation_matches_brute_force() {
        for s in ["3121", "1111", "2112", "1213121", "32132"] {
            let word = w(s);
            let brute = (0..word.len()).map(|r| word.rotated(r)).min().unwrap();
            assert_eq!(word.canonical_rotation(), brute, "{s}");
            assert!(is_least_rotation(brute.symbols()));
        }
    }

    #[test]
    fn d_theta_examples() {
        let x = [0u8, 1, 0];
        assert_eq!(d_theta(Point::Periodic(&x), Point::Periodic(&x), 0.5), 0.0);
        assert_eq!(d_theta(Point::Prefix(&[0, 1]), Point::Prefix(&[0, 2]), 0.5), 0.5);
        assert_eq!(
            d_theta(Point::Prefix(&[0, 1, 0]), Point::Prefix(&[0, 1, 1]), 0.5),
            0.25
        );
        // (12)^inf and (1212)^inf are the same point
        assert_eq!(
            d_theta(Point::Periodic(&[0, 1]), Point::Periodic(&[0, 1, 0, 1]), 0.5),
            0.0
        );
        assert_eq!(
            d_theta(Point::Periodic(&[0, 1]), Point::Periodic(&[0, 1, 0, 2]), 0.5),
            0.125
        );
    }

    #[test]
    fn representatives_and_extensions() {
        let nr3 = TransitionMatrix::no_repeat(3);
        let reps: Vec<_> = cylinder_representatives(&nr3).iter().map(|w| w.format(3)).collect();
        assert_eq!(reps, ["12", "21", "31"]);
        assert_eq!(nr3.extend_future(&[0, 1, 0], 6), vec![0, 1, 0, 1, 0, 1]);
        assert_eq!(nr3.extend_future(&[0, 1, 2], 7), vec![0, 1, 2, 0, 1, 2, 0]);
        assert_eq!(nr3.extend_past(2, 4), vec![0, 1, 0, 2]);
    }

    #[test]
    fn cylinders_index_lexicographically() {
        let nr3 = TransitionMatrix::no_repeat(3);
        let c = Cylinders::new(&nr3, 2).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c.index_of(&[0, 2]), Some(1));
        assert_eq!(c.index_of(&[1, 1]), None);
        assert_eq!(c.periodic_index(&[2, 0, 1], 2), c.index_of(&[1, 2]));
    }
}
