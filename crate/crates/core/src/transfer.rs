//! Ruelle transfer operators restricted to depth-`k` cylinder functions.
//!
//! States are the admissible `k`-words. The entry `(target, source)` is
//! `exp(s f(source))` when `source[1..] == target[..k-1]`, so the matrix acts on
//! depth-`k` functions exactly as `L_{s f}` does and `trace(M^n)` equals the
//! periodic sum `sum_{sigma^n x = x} exp(s f^n(x))` for every `n >= 1`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format;
use crate::numeric::linear_fit;
use crate::par;
use crate::potential::Potential;
use crate::symbolic::{Symbol, Word};

/// Largest state space handled by the sparse operator.
pub const STATE_CAP: usize = 1 << 20;

/// Largest state space handled by dense complex eigensolves.
pub const DENSE_CAP: usize = 2000;

/// Sparse operator stored row by row (rows are targets).
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    s: Complex64,
    kappa: usize,
    states: Vec<Word>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

/// Build the matrix of `L_{s f}` on depth-`k` functions, `k = f.depth()`.
pub fn build_operator(f: &Potential, s: Complex64) -> Result<OperatorMatrix> {
    let cyl = f.cylinders();
    let dim = cyl.len();
    if dim > STATE_CAP {
        return Err(Error::StateSpaceTooLarge {
            states: dim,
            cap: STATE_CAP,
        });
    }
    let a = f.matrix();
    let k = cyl.depth();
    let kappa = a.size();
    let lead = kappa.pow(k as u32 - 1);
    let weights: Vec<Complex64> = f.values().iter().map(|&v| (s * v).exp()).collect();
    let rows = par::map_range(dim, |t| {
        let target = cyl.words()[t].symbols();
        let tail = cyl.code(&target[..k - 1]);
        let mut row = Vec::new();
        for j in a.predecessors(target[0]) {
            if let Some(src) = cyl.index_by_code(j as usize * lead + tail) {
                row.push((src, weights[src]));
            }
        }
        row
    });
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for row in rows {
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(OperatorMatrix {
        s,
        kappa,
        states: cyl.words().to_vec(),
        row_ptr,
        cols,
        vals,
    })
}

/// [`build_operator`] at a real parameter.
pub fn build_real_operator(f: &Potential, s: f64) -> Result<OperatorMatrix> {
    build_operator(f, Complex64::new(s, 0.0))
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Word] {
        &self.states
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn is_real(&self) -> bool {
        self.s.im == 0.0
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Stored entries of row `t` as `(column, value)`.
    pub fn row(&self, t: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[t]..self.row_ptr[t + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn entry(&self, target: usize, source: usize) -> Complex64 {
        self.row(target)
            .find(|&(c, _)| c == source)
            .map(|(_, v)| v)
            .unwrap_or_default()
    }

    /// `M v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim())
            .map(|t| self.row(t).map(|(c, w)| w * v[c]).sum())
            .collect()
    }

    /// `M^T v`.
    pub fn apply_transpose(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.dim()];
        for (t, &vt) in v.iter().enumerate() {
            for (c, w) in self.row(t) {
                out[c] += w * vt;
            }
        }
        out
    }

    /// `M v` using real parts only; meaningful when [`Self::is_real`].
    pub fn apply_real(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|t| {
                let r = self.row_ptr[t]..self.row_ptr[t + 1];
                self.cols[r.clone()]
                    .iter()
                    .zip(&self.vals[r])
                    .map(|(&c, w)| w.re * v[c])
                    .sum()
            })
            .collect()
    }

    /// `M^T v` using real parts only.
    pub fn apply_transpose_real(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (t, &vt) in v.iter().enumerate() {
            let r = self.row_ptr[t]..self.row_ptr[t + 1];
            for (&c, w) in self.cols[r.clone()].iter().zip(&self.vals[r]) {
                out[c] += w.re * vt;
            }
        }
        out
    }

    /// Entrywise modulus, i.e. the operator at `Re s`.
    pub fn modulus(&self) -> OperatorMatrix {
        let mut m = self.clone();
        m.s = Complex64::new(self.s.re, 0.0);
        for v in &mut m.vals {
            *v = Complex64::new(v.norm(), 0.0);
        }
        m
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        self.check_dense()?;
        let n = self.dim();
        let mut d = DMatrix::zeros(n, n);
        for t in 0..n {
            for (c, w) in self.row(t) {
                d[(t, c)] = w;
            }
        }
        Ok(d)
    }

    pub fn to_dense_real(&self) -> Result<DMatrix<f64>> {
        self.check_dense()?;
        let n = self.dim();
        let mut d = DMatrix::zeros(n, n);
        for t in 0..n {
            for (c, w) in self.row(t) {
                d[(t, c)] = w.re;
            }
        }
        Ok(d)
    }

    fn check_dense(&self) -> Result<()> {
        if self.dim() > DENSE_CAP {
            return Err(Error::StateSpaceTooLarge {
                states: self.dim(),
                cap: DENSE_CAP,
            });
        }
        Ok(())
    }

    /// `trace(M^n)` by propagating each basis vector `n` times.
    pub fn trace_power(&self, n: usize) -> Complex64 {
        let diag = par::map_range(self.dim(), |i| {
            let mut v = vec![Complex64::default(); self.dim()];
            v[i] = Complex64::new(1.0, 0.0);
            for _ in 0..n {
                v = self.apply(&v);
            }
            v[i]
        });
        diag.into_iter().sum()
    }

    /// Sparse triplets, header `row,col,real,imag`, zero-based indices into
    /// [`Self::states`].
    pub fn to_triplets(&self) -> String {
        let mut out = String::from("row,col,real,imag\n");
        for t in 0..self.dim() {
            for (c, w) in self.row(t) {
                let _ = writeln!(out, "{t},{c},{},{}", format::real(w.re), format::real(w.im));
            }
        }
        out
    }

    /// Index of the state read from the periodic extension of `w` at `start`.
    pub fn periodic_state(&self, w: &[Symbol], start: usize) -> Option<usize> {
        let k = self.states.first()?.len();
        let n = w.len();
        let probe: Vec<Symbol> = (0..k).map(|i| w[(start + i) % n]).collect();
        self.states
            .binary_search_by(|s| s.symbols().cmp(&probe))
            .ok()
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    pub eig_tol: f64,
    pub max_iter: usize,
    /// Relative gap below which two moduli count as tied.
    pub degenerate_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            eig_tol: 1e-12,
            max_iter: 100_000,
            degenerate_tol: 1e-9,
        }
    }
}

/// Perron data of a real positive operator: right vector sums to 1, left
/// vector normalized so that `left . right = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealEigen {
    pub lambda: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeadingEigen {
    pub lambda: Complex64,
    pub right: Vec<Complex64>,
    pub left: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
}

fn power_iterate(
    dim: usize,
    apply: impl Fn(&[f64]) -> Vec<f64>,
    opts: EigenOptions,
) -> Result<(Vec<f64>, usize, f64)> {
    let mut v = vec![1.0 / dim as f64; dim];
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let y = apply(&v);
        let lambda: f64 = y.iter().sum();
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::NotConverged {
                iterations: it,
                residual: f64::NAN,
            });
        }
        residual = y
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).abs())
            .fold(0.0, f64::max)
            / lambda;
        v = y.into_iter().map(|x| x / lambda).collect();
        if residual <= opts.eig_tol * v.iter().fold(0.0f64, |m, x| m.max(*x)) {
            return Ok((v, it, residual));
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        residual,
    })
}

/// Power iteration on a real operator with positive structure.
pub fn leading_eigen_real(m: &OperatorMatrix, opts: EigenOptions) -> Result<RealEigen> {
    if !m.is_real() {
        return Err(Error::InvalidInput("operator has a complex parameter".into()));
    }
    let (right, it_r, _) = power_iterate(m.dim(), |v| m.apply_real(v), opts)?;
    let (mut left, it_l, _) = power_iterate(m.dim(), |v| m.apply_transpose_real(v), opts)?;
    let mr = m.apply_real(&right);
    let lr: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    let lmr: f64 = left.iter().zip(&mr).map(|(a, b)| a * b).sum();
    let lambda = lmr / lr;
    for x in &mut left {
        *x /= lr;
    }
    let residual = mr
        .iter()
        .zip(&right)
        .map(|(a, b)| (a - lambda * b).abs())
        .fold(0.0, f64::max);
    Ok(RealEigen {
        lambda,
        right,
        left,
        iterations: it_r.max(it_l),
        residual,
    })
}

/// Full spectrum, sorted by decreasing modulus (ties by argument).
pub fn spectrum(m: &OperatorMatrix) -> Result<Vec<Complex64>> {
    let mut ev: Vec<Complex64> = if m.is_real() {
        let d = m.to_dense_real()?;
        let schur = nalgebra::linalg::Schur::try_new(d, f64::EPSILON, 100_000).ok_or(
            Error::NotConverged {
                iterations: 100_000,
                residual: f64::NAN,
            },
        )?;
        schur.complex_eigenvalues().iter().copied().collect()
    } else {
        let d = m.to_dense()?;
        let schur = nalgebra::linalg::Schur::try_new(d, f64::EPSILON, 100_000).ok_or(
            Error::NotConverged {
                iterations: 100_000,
                residual: f64::NAN,
            },
        )?;
        let (_, t) = schur.unpack();
        (0..t.nrows()).map(|i| t[(i, i)]).collect()
    };
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(a.arg().total_cmp(&b.arg())));
    Ok(ev)
}

/// Eigenvalue of maximal modulus with eigenvectors.
///
/// Real operators use power iteration. Complex ones use a dense Schur
/// decomposition and fail with `DegenerateTopModulus` when the top two moduli
/// tie, or when the top modulus reaches the spectral radius of the entrywise
/// modulus (which happens exactly when `exp(i u f)` acts like a character).
pub fn leading_eigen(m: &OperatorMatrix, opts: EigenOptions) -> Result<LeadingEigen> {
    if m.is_real() {
        let e = leading_eigen_real(m, opts)?;
        let c = |v: Vec<f64>| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        return Ok(LeadingEigen {
            lambda: Complex64::new(e.lambda, 0.0),
            right: c(e.right),
            left: c(e.left),
            iterations: e.iterations,
            residual: e.residual,
        });
    }
    let ev = spectrum(m)?;
    let lambda = ev[0];
    if ev.len() > 1 && lambda.norm() - ev[1].norm() <= opts.degenerate_tol * lambda.norm() {
        return Err(Error::DegenerateTopModulus(format!(
            "|{}| and |{}| tie at s = {}",
            lambda, ev[1], m.s
        )));
    }
    let rho = leading_eigen_real(&m.modulus(), opts)?.lambda;
    if lambda.norm() >= (1.0 - opts.degenerate_tol) * rho {
        return Err(Error::DegenerateTopModulus(format!(
            "|lambda| = {} reaches the modulus bound {rho} at s = {}",
            lambda.norm(),
            m.s
        )));
    }
    let dense = m.to_dense()?;
    let right = inverse_iteration(&dense, lambda)?;
    let left = inverse_iteration(&dense.transpose(), lambda)?;
    let total: Complex64 = right.iter().sum();
    let scale = if total.norm() > 1e-300 { total } else { Complex64::new(1.0, 0.0) };
    let right: Vec<Complex64> = right.iter().map(|x| x / scale).collect();
    let lr: Complex64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    let left: Vec<Complex64> = left.iter().map(|x| x / lr).collect();
    let mr = m.apply(&right);
    let norm = right.iter().fold(0.0f64, |acc, x| acc.max(x.norm()));
    let residual = mr
        .iter()
        .zip(&right)
        .map(|(a, b)| (a - lambda * b).norm())
        .fold(0.0, f64::max)
        / norm;
    Ok(LeadingEigen {
        lambda,
        right,
        left,
        iterations: 0,
        residual,
    })
}

fn inverse_iteration(d: &DMatrix<Complex64>, lambda: Complex64) -> Result<Vec<Complex64>> {
    let n = d.nrows();
    let shift = lambda * (1.0 + 1e-12) + Complex64::new(1e-300, 0.0);
    let lu = (d - DMatrix::identity(n, n) * shift).lu();
    let mut v = DVector::from_element(n, Complex64::new(1.0, 0.0));
    for _ in 0..4 {
        v = lu.solve(&v).ok_or(Error::NotConverged {
            iterations: 0,
            residual: f64::NAN,
        })?;
        let norm = v.iter().fold(0.0f64, |acc, x| acc.max(x.norm()));
        v /= Complex64::new(norm, 0.0);
    }
    Ok(v.iter().copied().collect())
}

/// `Pr(s f) = log lambda(s f)`.
pub fn pressure(f: &Potential, s: f64) -> Result<f64> {
    pressure_with(f, s, EigenOptions::default())
}

pub fn pressure_with(f: &Potential, s: f64, opts: EigenOptions) -> Result<f64> {
    let m = build_real_operator(f, s)?;
    Ok(leading_eigen_real(&m, opts)?.lambda.ln())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootOptions {
    pub root_tol: f64,
    pub max_iter: usize,
    pub eigen: EigenOptions,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            root_tol: 1e-12,
            max_iter: 200,
            eigen: EigenOptions::default(),
        }
    }
}

/// The unique `P` with `Pr(-P f) = 0` for positive `f`.
pub fn solve_p(f: &Potential) -> Result<f64> {
    solve_p_with(f, RootOptions::default())
}

pub fn solve_p_with(f: &Potential, opts: RootOptions) -> Result<f64> {
    f.require_positive()?;
    let pr = |p: f64| pressure_with(f, -p, opts.eigen);
    let slope = |p: f64| -> Result<f64> {
        let m = build_real_operator(f, -p)?;
        let e = leading_eigen_real(&m, opts.eigen)?;
        Ok(-gibbs_mean(&e, f.values()))
    };
    let mut lo = 0.0;
    let mut hi = pr(0.0)? / f.d0() + 1.0;
    let (plo, phi) = (pr(lo)?, pr(hi)?);
    if plo < 0.0 || phi > 0.0 {
        return Err(Error::NoBracket { lo, hi });
    }
    if plo.abs() <= opts.root_tol {
        return Ok(lo);
    }
    let mut p = 0.5 * (lo + hi);
    for _ in 0..opts.max_iter {
        let v = pr(p)?;
        if v.abs() <= opts.root_tol {
            return Ok(p);
        }
        if v > 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let newton = p - v / slope(p)?;
        p = if hi - lo < 1e-3 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        residual: pr(p)?.abs(),
    })
}

fn gibbs_mean(e: &RealEigen, values: &[f64]) -> f64 {
    e.left
        .iter()
        .zip(&e.right)
        .zip(values)
        .map(|((l, r), v)| l * r * v)
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantsOptions {
    /// Centered step for the first derivative.
    pub fd_step: f64,
    /// Centered step for the second derivative.
    pub fd_step2: f64,
    pub cross_tol: f64,
    /// `sigma0^2` below this is reported with a lattice warning.
    pub sigma_floor: f64,
    pub eigen: EigenOptions,
}

impl Default for ConstantsOptions {
    fn default() -> Self {
        Self {
            fd_step: 1e-5,
            fd_step2: 1e-3,
            cross_tol: 1e-6,
            sigma_floor: 1e-12,
            eigen: EigenOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PressureProfile {
    pub p: f64,
    pub alpha: f64,
    /// Finite-difference estimate of `alpha` used as cross-check.
    pub alpha_fd: f64,
    pub sigma0_sq: f64,
    /// Finite-difference estimate of `sigma0_sq` used as cross-check.
    pub sigma0_sq_fd: f64,
    /// Entropy of the equilibrium Markov chain.
    pub entropy: f64,
    pub d0: f64,
    pub d1: f64,
    pub depth: usize,
    pub lattice_warning: bool,
    /// Leading eigenvalue at `s = -P` (1 up to the root tolerance).
    pub lambda: f64,
    pub eigen_iterations: usize,
    pub eigen_residual: f64,
    /// Equilibrium weights of the depth-`k` cylinders, cylinder order.
    pub weights: Vec<f64>,
}

impl PressureProfile {
    /// `|h - P alpha|`.
    pub fn variational_defect(&self) -> f64 {
        (self.entropy - self.p * self.alpha).abs()
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0_sq.sqrt()
    }
}

/// Solve for `P` and compute every equilibrium constant.
pub fn pressure_profile(f: &Potential) -> Result<PressureProfile> {
    let p = solve_p(f)?;
    equilibrium_constants(f, p, ConstantsOptions::default())
}

/// `alpha`, `sigma0^2` and the entropy of the equilibrium state of `-P f`.
///
/// `alpha = -d/ds Pr(-s f)` at `s = P` comes from the eigenvector formula
/// `sum_i l_i r_i f_i` and is checked against a Richardson-extrapolated
/// centered difference.
///
/// `sigma0^2 = d^2/dt^2 Pr(-P f + t (f - alpha))` at `t = 0`. Along the real
/// direction this is `+sigma0^2`; along the imaginary direction `t = i u` the
/// same Taylor coefficient appears with the opposite sign, giving the
/// `-sigma0^2` of the characteristic-function expansion. It is computed by
/// linear response of the right eigenvector and checked against a second
/// centered difference.
pub fn equilibrium_constants(
    f: &Potential,
    p: f64,
    opts: ConstantsOptions,
) -> Result<PressureProfile> {
    let m = build_real_operator(f, -p)?;
    let e = leading_eigen_real(&m, opts.eigen)?;
    let vals = f.values();
    let weights: Vec<f64> = e.left.iter().zip(&e.right).map(|(l, r)| l * r).collect();
    let alpha = gibbs_mean(&e, vals);

    let pr = |s: f64| pressure_with(f, s, opts.eigen);
    let d1 = |h: f64| -> Result<f64> { Ok((pr(-p + h)? - pr(-p - h)?) / (2.0 * h)) };
    let h = opts.fd_step;
    let alpha_fd = (4.0 * d1(h / 2.0)? - d1(h)?) / 3.0;
    if (alpha - alpha_fd).abs() > opts.cross_tol * alpha.abs().max(1.0) {
        return Err(Error::DerivativeUnstable {
            what: "alpha",
            a: alpha,
            b: alpha_fd,
        });
    }

    let pr0 = pr(-p)?;
    let d2 = |h: f64| -> Result<f64> { Ok((pr(-p + h)? - 2.0 * pr0 + pr(-p - h)?) / (h * h)) };
    let h2 = opts.fd_step2;
    let sigma_fd = (4.0 * d2(h2 / 2.0)? - d2(h2)?) / 3.0;
    let sigma_lr = second_log_derivative(&m, &e, vals, alpha)?;
    if (sigma_lr - sigma_fd).abs() > opts.cross_tol * sigma_lr.abs().max(1.0) {
        return Err(Error::DerivativeUnstable {
            what: "sigma0_sq",
            a: sigma_lr,
            b: sigma_fd,
        });
    }
    let sigma0_sq = sigma_lr.max(0.0);

    Ok(PressureProfile {
        p,
        alpha,
        alpha_fd,
        sigma0_sq,
        sigma0_sq_fd: sigma_fd,
        entropy: markov_entropy(&m, &e),
        d0: f.d0(),
        d1: f.d1(),
        depth: f.depth(),
        lattice_warning: sigma0_sq < opts.sigma_floor,
        lambda: e.lambda,
        eigen_iterations: e.iterations,
        eigen_residual: e.residual,
        weights,
    })
}

/// `(log lambda)''` along `M(s) = M diag(exp((s - s0) f))`:
/// `sum_i w_i f_i^2 - alpha^2 + 2 l^T D r'`, where `r'` solves
/// `(M - lambda I - lambda r l^T) r' = lambda alpha r - M D r`.
fn second_log_derivative(m: &OperatorMatrix, e: &RealEigen, f: &[f64], alpha: f64) -> Result<f64> {
    let n = m.dim();
    let mut a = m.to_dense_real()?;
    for i in 0..n {
        a[(i, i)] -= e.lambda;
        for j in 0..n {
            a[(i, j)] -= e.lambda * e.right[i] * e.left[j];
        }
    }
    let dr: Vec<f64> = e.right.iter().zip(f).map(|(r, v)| r * v).collect();
    let mdr = m.apply_real(&dr);
    let rhs = DVector::from_iterator(
        n,
        (0..n).map(|i| e.lambda * alpha * e.right[i] - mdr[i]),
    );
    let rp = a.lu().solve(&rhs).ok_or(Error::NotConverged {
        iterations: 0,
        residual: f64::NAN,
    })?;
    let second: f64 = (0..n).map(|i| e.left[i] * e.right[i] * f[i] * f[i]).sum();
    let cross: f64 = (0..n).map(|i| e.left[i] * f[i] * rp[i]).sum();
    Ok(second - alpha * alpha + 2.0 * cross)
}

/// Entropy of the stationary chain `src -> tgt` with probabilities
/// `M[tgt][src] l(tgt) / (lambda l(src))` and stationary law `l r`.
fn markov_entropy(m: &OperatorMatrix, e: &RealEigen) -> f64 {
    let mut h = 0.0;
    for t in 0..m.dim() {
        for (src, w) in m.row(t) {
            let prob = w.re * e.left[t] / (e.lambda * e.left[src]);
            if prob > 0.0 {
                h -= e.left[src] * e.right[src] * prob * prob.ln();
            }
        }
    }
    h
}

/// Gibbs weights of the depth-`k` cylinders.
#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumWeights {
    pub words: Vec<Word>,
    pub weights: Vec<f64>,
}

impl EquilibriumWeights {
    /// Largest disagreement between the two marginals on `(k-1)`-words
    /// (dropping the first versus the last symbol).
    pub fn shift_defect(&self) -> f64 {
        use std::collections::BTreeMap;
        let mut by_tail: BTreeMap<&[Symbol], f64> = BTreeMap::new();
        let mut by_head: BTreeMap<&[Symbol], f64> = BTreeMap::new();
        for (w, &x) in self.words.iter().zip(&self.weights) {
            let s = w.symbols();
            *by_tail.entry(&s[1..]).or_default() += x;
            *by_head.entry(&s[..s.len() - 1]).or_default() += x;
        }
        by_tail
            .keys()
            .chain(by_head.keys())
            .map(|k| (by_tail.get(k).unwrap_or(&0.0) - by_head.get(k).unwrap_or(&0.0)).abs())
            .fold(0.0, f64::max)
    }
}

pub fn equilibrium_weights(f: &Potential, p: f64) -> Result<EquilibriumWeights> {
    let m = build_real_operator(f, -p)?;
    let e = leading_eigen_real(&m, EigenOptions::default())?;
    let raw: Vec<f64> = e.left.iter().zip(&e.right).map(|(l, r)| l * r).collect();
    let total: f64 = raw.iter().sum();
    Ok(EquilibriumWeights {
        words: m.states().to_vec(),
        weights: raw.into_iter().map(|x| x / total).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayRow {
    pub n: usize,
    pub sup_norm: f64,
    /// Largest jump between cylinders sharing a `(k-1)`-prefix over `theta^(k-1)`.
    pub seminorm: f64,
    /// `sup_norm + seminorm / |u|`.
    pub combined: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayTable {
    pub u: f64,
    pub theta: f64,
    pub rows: Vec<DecayRow>,
    /// `exp(slope)` of `log combined` against `n`, fitted for `n >= 1`.
    pub rho_hat: f64,
    pub fit_rms: f64,
}

/// Iterate `L^n 1` at `s = -P + i u` and tabulate its norms.
pub fn norm_decay_probe(f: &Potential, p: f64, u: f64, n_max: usize, theta: f64) -> Result<DecayTable> {
    if u == 0.0 || !u.is_finite() {
        return Err(Error::InvalidInput("probe frequency u must be non-zero".into()));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidInput("theta must lie in (0, 1)".into()));
    }
    let m = build_operator(f, Complex64::new(-p, u))?;
    if m.dim() > DENSE_CAP {
        return Err(Error::StateSpaceTooLarge {
            states: m.dim(),
            cap: DENSE_CAP,
        });
    }
    let k = f.depth();
    let scale = theta.powi(k as i32 - 1);
    let row = |n: usize, v: &[Complex64]| {
        let sup_norm = v.iter().fold(0.0f64, |acc, x| acc.max(x.norm()));
        let mut semi = 0.0f64;
        let states = m.states();
        let mut i = 0;
        while i < states.len() {
            let head = &states[i].symbols()[..k - 1];
            let mut j = i;
            while j < states.len() && &states[j].symbols()[..k - 1] == head {
                j += 1;
            }
            for x in i..j {
                for y in x + 1..j {
                    semi = semi.max((v[x] - v[y]).norm());
                }
            }
            i = j;
        }
        let seminorm = semi / scale;
        DecayRow {
            n,
            sup_norm,
            seminorm,
            combined: sup_norm + seminorm / u.abs(),
        }
    };
    let mut v = vec![Complex64::new(1.0, 0.0); m.dim()];
    let mut rows = vec![row(0, &v)];
    for n in 1..=n_max {
        v = m.apply(&v);
        rows.push(row(n, &v));
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n >= 1 && r.combined > 0.0)
        .map(|r| (r.n as f64, r.combined.ln()))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let (rho_hat, fit_rms) = match linear_fit(&xs, &ys) {
        Some(fit) => (fit.slope.exp(), fit.rms_residual),
        None => (f64::NAN, f64::NAN),
    };
    Ok(DecayTable {
        u,
        theta,
        rows,
        rho_hat,
        fit_rms,
    })
}
