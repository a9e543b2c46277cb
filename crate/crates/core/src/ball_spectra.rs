//! Top eigenvalue of the hypercube adjacency restricted to a Hamming ball.
//!
//! The ball `B_r = {x : |x| <= r}` is invariant under coordinate
//! permutations, so its Perron eigenfunction is constant on weight classes.
//! Collapsing the cube to weights gives the `(r+1)`-dimensional radial
//! operator
//!
//! ```text
//! (R h)(w) = w * h(w-1) + (n-w) * h(w+1),   0 <= w <= r,  h(r+1) = 0
//! ```
//!
//! which is similar, via `u(w) = sqrt(C(n,w)) h(w)`, to the symmetric
//! tridiagonal matrix with zero diagonal and off-diagonal
//! `b(w) = sqrt(w (n-w+1))` coupling `w-1` and `w`. Solvers work on that
//! symmetric form and are registered by name in a [`SolverRegistry`]:
//!
//! - `power`: shifted power iteration (the default),
//! - `bisection`: Sturm-sequence bisection plus inverse iteration,
//! - `dense`: power iteration on the full ball inside `{0,1}^n` (small `n`
//!   only), the independent oracle for the radial reduction.

use rayon::prelude::*;
use serde::Serialize;

use crate::cube_fourier::Density;
use crate::{check_dim, Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;
pub const DEFAULT_SOLVER: &str = "power";

/// Largest `n` accepted by the dense cube oracle.
pub const DENSE_ORACLE_MAX_N: u32 = 14;

/// Spectral shift for power iteration. The ball graph is bipartite, so
/// `-lambda` is an eigenvalue too and plain iteration would oscillate.
const POWER_SHIFT: f64 = 1.0;

/// The weight-collapsed adjacency action on a radius-`r` ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialOperator {
    n: u32,
    r: u32,
    /// `sub[w-1] = w`: coefficient of `h(w-1)` in row `w`, `w = 1..=r`.
    sub: Vec<f64>,
    /// `sup[w] = n - w`: coefficient of `h(w+1)` in row `w`, `w = 0..r`.
    sup: Vec<f64>,
}

impl RadialOperator {
    pub fn new(n: u32, r: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be positive".into()));
        }
        if r > n {
            return Err(Error::Domain(format!("radius r={r} exceeds n={n}")));
        }
        Ok(Self {
            n,
            r,
            sub: (1..=r).map(f64::from).collect(),
            sup: (0..r).map(|w| f64::from(n - w)).collect(),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.r as usize + 1
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    pub fn apply(&self, h: &[f64]) -> Vec<f64> {
        assert_eq!(h.len(), self.dim());
        (0..self.dim())
            .map(|w| {
                let down = if w > 0 {
                    self.sub[w - 1] * h[w - 1]
                } else {
                    0.0
                };
                let up = if w < self.r as usize {
                    self.sup[w] * h[w + 1]
                } else {
                    0.0
                };
                down + up
            })
            .collect()
    }

    /// Off-diagonal of the symmetrized operator: entry `w-1` couples
    /// weights `w-1` and `w`.
    pub fn symmetric_offdiag(&self) -> Vec<f64> {
        self.sub
            .iter()
            .zip(&self.sup)
            .map(|(a, b)| (a * b).sqrt())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    /// Convergence threshold on successive Rayleigh quotients.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl SolveOptions {
    /// Residual `||T u - lambda u||` required on top of the Rayleigh
    /// criterion, so the eigenvector (not just the eigenvalue) is accurate.
    pub fn residual_tol(&self, lambda: f64) -> f64 {
        100.0 * self.tol * lambda.abs().max(1.0)
    }

    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Perron pair of the symmetrized radial operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialEigen {
    pub lambda: f64,
    /// Unit-norm, nonnegative eigenvector in symmetric coordinates.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `||T u - lambda u||` for the returned pair.
    pub residual: f64,
    pub converged: bool,
}

/// A top-eigenvalue algorithm for the ball-restricted adjacency.
pub trait BallSolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn solve(&self, op: &RadialOperator, opts: &SolveOptions) -> Result<RadialEigen>;
}

fn symmetric_apply(offdiag: &[f64], u: &[f64]) -> Vec<f64> {
    let dim = u.len();
    (0..dim)
        .map(|w| {
            let down = if w > 0 {
                offdiag[w - 1] * u[w - 1]
            } else {
                0.0
            };
            let up = if w + 1 < dim {
                offdiag[w] * u[w + 1]
            } else {
                0.0
            };
            down + up
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn residual(offdiag: &[f64], u: &[f64], lambda: f64) -> f64 {
    let tu = symmetric_apply(offdiag, u);
    tu.iter()
        .zip(u)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Shifted power iteration from the all-ones vector.
#[derive(Debug, Default, Clone, Copy)]
pub struct PowerIteration;

impl BallSolver for PowerIteration {
    fn name(&self) -> &'static str {
        "power"
    }

    fn description(&self) -> &'static str {
        "shifted power iteration on the symmetrized radial operator"
    }

    fn solve(&self, op: &RadialOperator, opts: &SolveOptions) -> Result<RadialEigen> {
        let offdiag = op.symmetric_offdiag();
        let mut u = vec![1.0; op.dim()];
        normalize(&mut u);
        let mut prev = f64::NAN;
        let mut iterations = 0;
        let mut converged = op.dim() == 1;
        while !converged && iterations < opts.max_iter {
            iterations += 1;
            let tu = symmetric_apply(&offdiag, &u);
            let lambda = dot(&u, &tu);
            let res = tu
                .iter()
                .zip(&u)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt();
            u = tu
                .iter()
                .zip(&u)
                .map(|(a, b)| a + POWER_SHIFT * b)
                .collect();
            normalize(&mut u);
            converged = (lambda - prev).abs() < opts.tol && res <= opts.residual_tol(lambda);
            prev = lambda;
        }
        let lambda = dot(&u, &symmetric_apply(&offdiag, &u));
        Ok(RadialEigen {
            lambda,
            residual: residual(&offdiag, &u, lambda),
            vector: u,
            iterations,
            converged,
        })
    }
}

/// Sturm-sequence bisection for the eigenvalue, inverse iteration for the
/// eigenvector.
#[derive(Debug, Default, Clone, Copy)]
pub struct SturmBisection;

impl SturmBisection {
    /// Number of eigenvalues strictly below `x`.
    fn count_below(offdiag: &[f64], dim: usize, x: f64) -> usize {
        let mut count = 0;
        let mut d = -x;
        for w in 0..dim {
            if w > 0 {
                d = -x - offdiag[w - 1] * offdiag[w - 1] / d;
            }
            if d == 0.0 {
                d = -f64::EPSILON * (1.0 + x.abs());
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }
}

impl BallSolver for SturmBisection {
    fn name(&self) -> &'static str {
        "bisection"
    }

    fn description(&self) -> &'static str {
        "Sturm-sequence bisection with inverse iteration for the eigenvector"
    }

    fn solve(&self, op: &RadialOperator, _opts: &SolveOptions) -> Result<RadialEigen> {
        let dim = op.dim();
        let offdiag = op.symmetric_offdiag();
        if dim == 1 {
            return Ok(RadialEigen {
                lambda: 0.0,
                vector: vec![1.0],
                iterations: 0,
                residual: 0.0,
                converged: true,
            });
        }
        // Gershgorin: every eigenvalue lies in [-n, n].
        let (mut lo, mut hi) = (0.0f64, f64::from(op.n()) + 1.0);
        let mut iterations = 0;
        while hi - lo > 4.0 * f64::EPSILON * hi.max(1.0) && iterations < 200 {
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            if Self::count_below(&offdiag, dim, mid) == dim {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);

        let shift = lambda + 1e-10 * lambda.max(1.0);
        let mut u = vec![1.0; dim];
        normalize(&mut u);
        for _ in 0..3 {
            u = solve_shifted_tridiagonal(&offdiag, shift, &u);
            normalize(&mut u);
        }
        if u.iter().sum::<f64>() < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
        u.iter_mut().for_each(|x| *x = x.max(0.0));
        normalize(&mut u);
        let lambda_rq = dot(&u, &symmetric_apply(&offdiag, &u));
        Ok(RadialEigen {
            lambda,
            residual: residual(&offdiag, &u, lambda_rq),
            vector: u,
            iterations,
            converged: true,
        })
    }
}

/// Solves `(T - shift I) y = rhs` for the zero-diagonal symmetric tridiagonal
/// `T`, by Gaussian elimination with partial pivoting.
fn solve_shifted_tridiagonal(offdiag: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let dim = rhs.len();
    // Row i holds columns i, i+1, i+2 after pivoting (the third is fill-in).
    let mut d: Vec<f64> = vec![-shift; dim];
    let mut du: Vec<f64> = (0..dim.saturating_sub(1)).map(|i| offdiag[i]).collect();
    let mut dl: Vec<f64> = du.clone();
    let mut du2 = vec![0.0; dim.saturating_sub(2)];
    let mut b = rhs.to_vec();
    for i in 0..dim.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            let piv = if d[i] == 0.0 { f64::EPSILON } else { d[i] };
            d[i] = piv;
            let f = dl[i] / piv;
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
            dl[i] = 0.0;
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if i + 2 < dim {
                du2[i] = du[i + 1];
                du[i + 1] *= -f;
            }
            du[i] = tmp;
            b.swap(i, i + 1);
            b[i + 1] -= f * b[i];
        }
    }
    if d[dim - 1] == 0.0 {
        d[dim - 1] = f64::EPSILON;
    }
    let mut y = vec![0.0; dim];
    for i in (0..dim).rev() {
        let mut s = b[i];
        if i + 1 < dim {
            s -= du[i] * y[i + 1];
        }
        if i + 2 < dim {
            s -= du2[i] * y[i + 2];
        }
        y[i] = s / d[i];
    }
    y
}

/// Power iteration on the ball as a subset of the full cube, from a
/// positive start vector that is not constant on weight classes.
#[derive(Debug, Default, Clone, Copy)]
pub struct DenseCube;

impl BallSolver for DenseCube {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn description(&self) -> &'static str {
        "power iteration on the ball inside the full cube (n <= 14)"
    }

    fn solve(&self, op: &RadialOperator, opts: &SolveOptions) -> Result<RadialEigen> {
        let (n, r) = (op.n(), op.r());
        if n > DENSE_ORACLE_MAX_N {
            return Err(Error::DimensionOutOfRange {
                n,
                max: DENSE_ORACLE_MAX_N,
            });
        }
        let size = 1usize << n;
        let ball: Vec<usize> = (0..size).filter(|x| x.count_ones() <= r).collect();
        let mut v = vec![0.0f64; size];
        for &x in &ball {
            let h = (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40;
            v[x] = 1.0 + 0.5 * (h % 1000) as f64 / 1000.0;
        }
        let restricted_apply = |v: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; size];
            for &x in &ball {
                out[x] = (0..n).map(|i| v[x ^ (1 << i)]).sum();
            }
            out
        };
        let norm = |v: &mut [f64]| {
            let s = dot(v, v).sqrt();
            v.iter_mut().for_each(|x| *x /= s);
        };
        norm(&mut v);
        let mut prev = f64::NAN;
        let mut iterations = 0;
        let mut converged = false;
        while !converged && iterations < opts.max_iter {
            iterations += 1;
            let av = restricted_apply(&v);
            let lambda = dot(&v, &av);
            let res = ball
                .iter()
                .map(|&x| (av[x] - lambda * v[x]).powi(2))
                .sum::<f64>()
                .sqrt();
            for &x in &ball {
                v[x] = av[x] + POWER_SHIFT * v[x];
            }
            norm(&mut v);
            converged = (lambda - prev).abs() < opts.tol && res <= opts.residual_tol(lambda);
            prev = lambda;
        }
        let av = restricted_apply(&v);
        let lambda = dot(&v, &av);
        let cube_residual = av
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();

        // Radial profile: class averages, then symmetric coordinates.
        let mut sums = vec![0.0f64; r as usize + 1];
        let mut counts = vec![0usize; r as usize + 1];
        for &x in &ball {
            let w = x.count_ones() as usize;
            sums[w] += v[x];
            counts[w] += 1;
        }
        let mut u: Vec<f64> = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| (s / c as f64) * (c as f64).sqrt())
            .collect();
        normalize(&mut u);
        Ok(RadialEigen {
            lambda,
            vector: u,
            iterations,
            residual: cube_residual,
            converged,
        })
    }
}

/// Named [`BallSolver`] implementations.
pub struct SolverRegistry {
    solvers: Vec<Box<dyn BallSolver>>,
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(PowerIteration));
        registry.register(Box::new(SturmBisection));
        registry.register(Box::new(DenseCube));
        registry
    }
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self {
            solvers: Vec::new(),
        }
    }

    /// Adds a solver, replacing any existing one of the same name.
    pub fn register(&mut self, solver: Box<dyn BallSolver>) {
        self.solvers.retain(|s| s.name() != solver.name());
        self.solvers.push(solver);
    }

    pub fn get(&self, name: &str) -> Result<&dyn BallSolver> {
        self.solvers
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "solver",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.iter().map(|s| s.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn BallSolver> {
        self.solvers.iter().map(|s| s.as_ref())
    }
}

/// `ln C(n, w)` for `w = 0..=r`.
fn ln_binomials(n: u32, r: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(r as usize + 1);
    let mut acc = 0.0f64;
    out.push(acc);
    for w in 0..r {
        acc += f64::from(n - w).ln() - f64::from(w + 1).ln();
        out.push(acc);
    }
    out
}

/// Top eigenvalue of a radius-`r` ball and its lifted Perron eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallSpectrum {
    pub n: u32,
    pub r: u32,
    pub lambda: f64,
    /// `weight_mass[w] = Pr(|Y| = w)` for the distribution `Y` with density
    /// proportional to the eigenfunction.
    pub weight_mass: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub solver: String,
}

impl BallSpectrum {
    fn from_eigen(op: &RadialOperator, eigen: RadialEigen, solver: &str) -> Self {
        let lnc = ln_binomials(op.n(), op.r());
        // Pr(|Y| = w) is proportional to C(n,w) h(w) = sqrt(C(n,w)) u(w).
        let logs: Vec<f64> = eigen
            .vector
            .iter()
            .zip(&lnc)
            .map(|(&u, &l)| {
                if u > 0.0 {
                    0.5 * l + u.ln()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        Self {
            n: op.n(),
            r: op.r(),
            lambda: eigen.lambda,
            weight_mass: raw.iter().map(|m| m / total).collect(),
            iterations: eigen.iterations,
            residual: eigen.residual,
            converged: eigen.converged,
            solver: solver.to_string(),
        }
    }

    /// `h(w)`, the value of the mean-one eigenfunction on weight `w`.
    ///
    /// Overflows to infinity for very large `n`; use [`Self::weight_mass`]
    /// there.
    pub fn radial_profile(&self) -> Vec<f64> {
        let lnc = ln_binomials(self.n, self.r);
        self.weight_mass
            .iter()
            .zip(&lnc)
            .map(|(&q, &l)| {
                if q > 0.0 {
                    (f64::from(self.n) * std::f64::consts::LN_2 + q.ln() - l).exp()
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// The eigenfunction lifted to the cube: `d(x) = h(|x|)` on the ball.
    pub fn density(&self) -> Result<Density> {
        check_dim(self.n)?;
        let profile = self.radial_profile();
        let values = (0..1usize << self.n)
            .map(|x| profile.get(x.count_ones() as usize).copied().unwrap_or(0.0))
            .collect();
        Density::from_weights(self.n, values)
    }

    /// Exact Shannon entropy of `Y` in bits. `Y` is uniform within each
    /// weight class, so `H(Y) = sum_w q_w (log2 C(n,w) - log2 q_w)`.
    pub fn entropy_bits(&self) -> f64 {
        let lnc = ln_binomials(self.n, self.r);
        self.weight_mass
            .iter()
            .zip(&lnc)
            .filter(|(&q, _)| q > 0.0)
            .map(|(&q, &l)| q * (l / std::f64::consts::LN_2 - q.log2()))
            .sum()
    }

    /// `2 sqrt(r (n - r))`, the leading term of the asymptotic estimate.
    pub fn ns_bound(&self) -> f64 {
        ns_bound(self.n, self.r)
    }
}

pub fn ns_bound(n: u32, r: u32) -> f64 {
    2.0 * (f64::from(r) * f64::from(n.saturating_sub(r))).sqrt()
}

/// `lambda_{B_r}` with the default power-iteration solver.
pub fn lambda_ball(n: u32, r: u32, tol: f64) -> Result<BallSpectrum> {
    lambda_ball_with(&PowerIteration, n, r, &SolveOptions::with_tol(tol))
}

pub fn lambda_ball_with(
    solver: &dyn BallSolver,
    n: u32,
    r: u32,
    opts: &SolveOptions,
) -> Result<BallSpectrum> {
    let op = RadialOperator::new(n, r)?;
    let eigen = solver.solve(&op, opts)?;
    Ok(BallSpectrum::from_eigen(&op, eigen, solver.name()))
}

/// `lambda_{B_r}` by power iteration directly on `{0,1}^n`, for `n <= 14`.
pub fn lambda_ball_dense_oracle(n: u32, r: u32) -> Result<f64> {
    let op = RadialOperator::new(n, r)?;
    Ok(DenseCube.solve(&op, &SolveOptions::default())?.lambda)
}

/// The smoothing radius for `(k-1)`-wise independent inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusChoice {
    pub n: u32,
    pub k: u32,
    pub r: u32,
    pub lambda: f64,
    /// `n - 2k + 1`.
    pub threshold: f64,
    /// `n/2 - sqrt(k (n - k))`, the asymptotic location, clamped at 0.
    pub predicted: f64,
}

/// Smallest `r` with `lambda_{B_r} >= n - 2k + 1`, scanning upward from 0.
pub fn min_radius(
    n: u32,
    k: u32,
    solver: &dyn BallSolver,
    opts: &SolveOptions,
) -> Result<RadiusChoice> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k={k} outside 1..={n}")));
    }
    let threshold = f64::from(n) - 2.0 * f64::from(k) + 1.0;
    let predicted = (f64::from(n) / 2.0 - (f64::from(k) * f64::from(n - k)).sqrt()).max(0.0);
    for r in 0..=n {
        let lambda = lambda_ball_with(solver, n, r, opts)?.lambda;
        if lambda >= threshold {
            return Ok(RadiusChoice {
                n,
                k,
                r,
                lambda,
                threshold,
                predicted,
            });
        }
    }
    Err(Error::Internal(format!(
        "no radius reaches lambda >= {threshold} at n={n}"
    )))
}

/// `(lambda_{B_r}, 2 sqrt(r (n - r)))`, for reporting only.
pub fn ns_comparison(n: u32, r: u32) -> Result<(f64, f64)> {
    let lambda = lambda_ball(n, r, DEFAULT_TOL)?.lambda;
    Ok((lambda, ns_bound(n, r)))
}

/// One row of a spectral sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectraRow {
    pub n: u32,
    pub r: u32,
    pub lambda: f64,
    pub ns_bound: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Spectra for every `(n, r)` pair, computed in parallel and returned in
/// input order.
pub fn spectra_sweep(
    points: &[(u32, u32)],
    solver: &dyn BallSolver,
    opts: &SolveOptions,
) -> Result<Vec<SpectraRow>> {
    points
        .par_iter()
        .map(|&(n, r)| {
            let s = lambda_ball_with(solver, n, r, opts)?;
            Ok(SpectraRow {
                n,
                r,
                lambda: s.lambda,
                ns_bound: s.ns_bound(),
                iterations: s.iterations,
                residual: s.residual,
            })
        })
        .collect()
}
