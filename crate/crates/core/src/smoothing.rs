//! Smoothing `Z = X xor Y` by the ball eigenfunction, and numeric
//! certification of both inequality chains.
//!
//! For a density `f` of `X` and the Perron eigenfunction `d` of the radius-r
//! ball (the density of `Y`), `Z` has density `g = f * d`. Since
//! `g^(S) = f^(S) d^(S)`, `Z` keeps the independence of `X`, while `A d >=
//! lambda_r d` forces `<Ag, g> >= lambda_r E[g^2]`. Comparing with the
//! spectral upper estimate on `<Ag, g>` bounds `E[g^2]`, hence `H_2(Z)`,
//! hence `H(X) >= H(Z) - H(Y)`.
//!
//! [`theorem2_chain`] handles half independence directly (no smoothing);
//! [`theorem1_chain`] runs the smoothed argument. Each returns a
//! [`ChainReport`] listing every inequality with both sides and its slack.

use std::fmt::Write as _;

use serde::Serialize;

use crate::ball_spectra::{lambda_ball_with, min_radius, BallSolver, BallSpectrum, SolveOptions};
use crate::cube_fourier::{
    adjacency_apply, adjacency_kernel, convolve, inner_product, level_profile, wht, Density,
};
use crate::entropy_bounds::{
    binary_entropy, bound_thm_half, log2_ball_volume, log2_binomial, opt, renyi2_from_density,
    shannon_entropy,
};
use crate::gf2_codes::SampleSpace;
use crate::kwise::{marginal_check, Distribution, HalfReading, DEFAULT_TOL};
use crate::{Error, Result};

/// Default tolerance on inequality slacks.
pub const CHAIN_TOL: f64 = 1e-8;

/// Tolerance on the convolution associativity identity.
pub const ASSOC_TOL: f64 = 1e-10;

/// Density of `Z = X xor Y`, where `Y` has the ball eigenfunction as density.
///
/// The convolution is spectral; values outside the dilated support of `X`
/// are set to exact zeros.
pub fn smooth(x: &Distribution, spec: &BallSpectrum) -> Result<Distribution> {
    if x.n() != spec.n {
        return Err(Error::DimensionMismatch {
            left: x.n(),
            right: spec.n,
        });
    }
    let d = spec.density()?;
    let g = convolve(x.density().as_function(), d.as_function())?;
    let support = dilate(x.space(), spec.r);
    let values = g
        .into_values()
        .into_iter()
        .zip(&support)
        .map(|(v, &inside)| if inside { v.max(0.0) } else { 0.0 })
        .collect();
    Distribution::from_density(Density::from_weights(x.n(), values)?)
}

/// Points within distance `r` of the support of `s`.
fn dilate(s: &SampleSpace, r: u32) -> Vec<bool> {
    let n = s.n();
    let mut inside = vec![false; 1usize << n];
    let mut frontier: Vec<usize> = Vec::new();
    for (x, p) in s.iter() {
        if p > 0.0 && !inside[x as usize] {
            inside[x as usize] = true;
            frontier.push(x as usize);
        }
    }
    for _ in 0..r {
        let mut next = Vec::new();
        for &x in &frontier {
            for i in 0..n {
                let y = x ^ (1 << i);
                if !inside[y] {
                    inside[y] = true;
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    inside
}

/// `Pr(Z = z) = sum_y Pr(X = y) Pr(Y = z xor y)` by direct double sum.
pub fn direct_smoothing(x: &SampleSpace, y: &SampleSpace) -> Result<Vec<f64>> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch {
            left: x.n(),
            right: y.n(),
        });
    }
    crate::check_dim(x.n())?;
    let mut out = vec![0.0; 1usize << x.n()];
    for (a, p) in x.iter() {
        for (b, q) in y.iter() {
            out[(a ^ b) as usize] += p * q;
        }
    }
    Ok(out)
}

/// Outcome of the three smoothing facts on one input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fact41Report {
    pub n: u32,
    pub r: u32,
    pub order_x: u32,
    pub order_z: u32,
    /// Spectral: `Z` is at least as independent as `X`.
    pub a_spectral: bool,
    /// Marginal oracle on `Z` at `X`'s order; `None` when over the guard.
    pub a_marginal: Option<bool>,
    pub h_x: f64,
    pub h_y: f64,
    pub h_z: f64,
    /// `H(X) + H(Y) >= H(Z) - tol`.
    pub b_entropy: bool,
    /// Largest `|Pr(Z = z)|` disagreement between the spectral and direct
    /// convolutions.
    pub c_max_error: f64,
    pub c_convolution: bool,
}

impl Fact41Report {
    pub fn all_pass(&self) -> bool {
        self.a_spectral && self.a_marginal.unwrap_or(true) && self.b_entropy && self.c_convolution
    }
}

/// Checks that smoothing keeps independence, that `H(X) + H(Y) >= H(Z)`,
/// and that the spectral convolution equals the direct one. Failures are
/// reported, not raised.
pub fn verify_fact41(x: &Distribution, spec: &BallSpectrum, tol: f64) -> Result<Fact41Report> {
    let z = smooth(x, spec)?;
    let y = Distribution::from_density(spec.density()?)?;
    let order_x = x.independence_order(DEFAULT_TOL);
    let order_z = z.independence_order(DEFAULT_TOL);
    let a_marginal = match marginal_check(z.space(), order_x) {
        Ok(report) => Some(report.max_deviation < DEFAULT_TOL),
        Err(Error::ResourceGuard { .. }) => None,
        Err(e) => return Err(e),
    };
    let (h_x, h_y, h_z) = (
        shannon_entropy(x.space()),
        shannon_entropy(y.space()),
        shannon_entropy(z.space()),
    );
    let direct = direct_smoothing(x.space(), y.space())?;
    let c_max_error = direct
        .iter()
        .enumerate()
        .map(|(p, &want)| (want - z.density().probability(p)).abs())
        .fold(0.0, f64::max);
    Ok(Fact41Report {
        n: x.n(),
        r: spec.r,
        order_x,
        order_z,
        a_spectral: order_z >= order_x,
        a_marginal,
        h_x,
        h_y,
        h_z,
        b_entropy: h_x + h_y >= h_z - tol,
        c_max_error,
        c_convolution: c_max_error <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "==",
        }
    }
}

/// One step of a chain: `lhs relation rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityLine {
    pub label: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    /// Nonnegative when the relation holds exactly; `-|lhs - rhs|` for `==`.
    pub slack: f64,
    pub tol: f64,
    /// Display-only lines are reported but never fail a chain.
    pub asserted: bool,
    pub pass: bool,
}

impl InequalityLine {
    fn new(label: impl Into<String>, lhs: f64, relation: Relation, rhs: f64, tol: f64) -> Self {
        let slack = match relation {
            Relation::Le => rhs - lhs,
            Relation::Ge => lhs - rhs,
            Relation::Eq => -(lhs - rhs).abs(),
        };
        Self {
            label: label.into(),
            lhs,
            relation,
            rhs,
            slack,
            tol,
            asserted: true,
            pass: slack >= -tol,
        }
    }

    fn display_only(mut self) -> Self {
        self.asserted = false;
        self
    }

    fn status(&self) -> &'static str {
        match (self.asserted, self.pass) {
            (false, _) => "info",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainKind {
    /// Half independence, no smoothing.
    Half,
    /// Smoothed argument at `r = min_radius(n, k)`.
    Smoothed,
    /// `k > n/2`: the half-independence chain with `r = 0`.
    Degenerate,
}

/// The three caps on `H(Y)` for `Y` supported on a radius-r ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyCaps {
    /// `log2 C(n, r)`.
    pub log2_binom: f64,
    /// `log2 sum_{i <= r} C(n, i)`.
    pub log2_ball: f64,
    /// `n H(r/n)`; caps the ball only for `r <= n/2`.
    pub n_h_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub kind: ChainKind,
    pub n: u32,
    pub k: u32,
    pub r: u32,
    pub lambda_r: f64,
    /// `E[g^2]` (`E[f^2]` when unsmoothed).
    pub e_g_sq: f64,
    /// `<Ag, g>`.
    pub lhs_rayleigh: f64,
    /// `n + (n-2k) E[g^2]`; `n + 1 - E[f^2]` for the half chain.
    pub ub_paper: f64,
    /// `n + (n-2k) (E[g^2] - 1)`, the estimate before loosening.
    pub ub_tight: f64,
    /// `lambda_r E[g^2]`.
    pub lb_paper: f64,
    pub final_check: bool,
    pub h_x: f64,
    pub h_y: f64,
    pub h_y_caps: EntropyCaps,
    pub h_z: f64,
    pub h2_z: f64,
    /// The concluding lower bound on `H(X)`.
    pub entropy_bound: f64,
    /// `sum_{|S| = j} g^(S)^2` for `j = 0..=n`.
    pub level_weights: Vec<f64>,
    pub lines: Vec<InequalityLine>,
}

impl ChainReport {
    pub fn all_pass(&self) -> bool {
        self.lines.iter().filter(|l| l.asserted).all(|l| l.pass)
    }

    pub fn line(&self, label_prefix: &str) -> Option<&InequalityLine> {
        self.lines
            .iter()
            .find(|l| l.label.starts_with(label_prefix))
    }

    /// Human-readable report, one inequality per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let kind = match self.kind {
            ChainKind::Half => "half-independence chain",
            ChainKind::Smoothed => "smoothed chain",
            ChainKind::Degenerate => "smoothed chain (k > n/2, radius 0)",
        };
        let _ = writeln!(
            out,
            "{kind}: n={} k={} r={} lambda_r={}",
            self.n, self.k, self.r, self.lambda_r
        );
        let _ = writeln!(
            out,
            "E[g^2]={} <Ag,g>={} H(X)={} H(Y)={} H(Z)={} H2(Z)={}",
            self.e_g_sq, self.lhs_rayleigh, self.h_x, self.h_y, self.h_z, self.h2_z
        );
        let width = self.lines.iter().map(|l| l.label.len()).max().unwrap_or(0);
        for l in &self.lines {
            let _ = writeln!(
                out,
                "[{}] {:<width$}  {:>22} {} {:<22}  slack={:.3e}",
                l.status(),
                l.label,
                format!("{:.12}", l.lhs),
                l.relation.symbol(),
                format!("{:.12}", l.rhs),
                l.slack,
            );
        }
        let _ = writeln!(
            out,
            "conclusion: H(X) >= {}  (measured {}, slack {:.3e})",
            self.entropy_bound,
            self.h_x,
            self.h_x - self.entropy_bound
        );
        let _ = writeln!(
            out,
            "result: {}",
            if self.all_pass() { "PASS" } else { "FAIL" }
        );
        out
    }

    pub fn csv_header() -> Vec<&'static str> {
        vec![
            "kind",
            "n",
            "k",
            "r",
            "lambda_r",
            "e_g_sq",
            "lhs_rayleigh",
            "ub_paper",
            "ub_tight",
            "lb_paper",
            "final_check",
            "h_x",
            "h_y",
            "h_y_cap_binom",
            "h_y_cap_ball",
            "h_y_cap_nh",
            "h_z",
            "h2_z",
            "entropy_bound",
            "all_pass",
        ]
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            format!("{:?}", self.kind).to_lowercase(),
            self.n.to_string(),
            self.k.to_string(),
            self.r.to_string(),
            self.lambda_r.to_string(),
            self.e_g_sq.to_string(),
            self.lhs_rayleigh.to_string(),
            self.ub_paper.to_string(),
            self.ub_tight.to_string(),
            self.lb_paper.to_string(),
            self.final_check.to_string(),
            self.h_x.to_string(),
            self.h_y.to_string(),
            self.h_y_caps.log2_binom.to_string(),
            self.h_y_caps.log2_ball.to_string(),
            opt(Some(self.h_y_caps.n_h_ratio)),
            self.h_z.to_string(),
            self.h2_z.to_string(),
            self.entropy_bound.to_string(),
            self.all_pass().to_string(),
        ]
    }
}

fn entropy_caps(n: u32, r: u32) -> Result<EntropyCaps> {
    let nf = f64::from(n);
    Ok(EntropyCaps {
        log2_binom: log2_binomial(n, r),
        log2_ball: log2_ball_volume(n, r),
        n_h_ratio: nf * binary_entropy(f64::from(r) / nf)?,
    })
}

/// `sum_S (n - 2|S|) c_S^2`, the spectral form of `<A h, h>`.
fn spectral_rayleigh(n: u32, levels: &[f64]) -> f64 {
    levels
        .iter()
        .enumerate()
        .map(|(j, w)| (f64::from(n) - 2.0 * j as f64) * w)
        .sum()
}

/// The half-independence chain: `0 <= <Af, f> <= n + 1 - E[f^2]`, hence
/// `E[f^2] <= n + 1` and `H(X) >= H_2(X) >= n - log2(n + 1)`.
pub fn theorem2_chain(x: &Distribution, reading: HalfReading) -> Result<ChainReport> {
    let n = x.n();
    let half = reading.required_order(n);
    x.require_order(half, DEFAULT_TOL)?;
    let nf = f64::from(n);

    let f = x.density().as_function();
    let rayleigh = inner_product(&adjacency_apply(f), f)?;
    let levels = level_profile(x.spectrum());
    let e_f_sq = x.density().second_moment();
    let middle: f64 = levels[1..=half as usize].iter().sum();
    let tail_weight: f64 = levels[half as usize + 1..].iter().sum();
    let tail: f64 = levels
        .iter()
        .enumerate()
        .skip(half as usize + 1)
        .map(|(j, w)| (nf - 2.0 * j as f64) * w)
        .sum();
    let h2 = renyi2_from_density(x.density());
    let h_x = shannon_entropy(x.space());
    let bound = bound_thm_half(n);
    let ub = nf + 1.0 - e_f_sq;

    let lines = vec![
        InequalityLine::new("<Af,f> >= 0", rayleigh, Relation::Ge, 0.0, CHAIN_TOL),
        InequalityLine::new(
            "<Af,f> == sum_S (n-2|S|) f^(S)^2",
            rayleigh,
            Relation::Eq,
            spectral_rayleigh(n, &levels),
            CHAIN_TOL,
        ),
        InequalityLine::new(
            format!("sum_{{1<=|S|<={half}}} f^(S)^2 == 0"),
            middle,
            Relation::Eq,
            0.0,
            CHAIN_TOL,
        ),
        InequalityLine::new(
            format!("sum_{{|S|>{half}}} (n-2|S|) f^(S)^2 <= -sum_{{|S|>{half}}} f^(S)^2"),
            tail,
            Relation::Le,
            -tail_weight,
            CHAIN_TOL,
        ),
        InequalityLine::new(
            "<Af,f> <= n + 1 - E[f^2]",
            rayleigh,
            Relation::Le,
            ub,
            CHAIN_TOL,
        ),
        InequalityLine::new("E[f^2] <= n + 1", e_f_sq, Relation::Le, nf + 1.0, CHAIN_TOL),
        InequalityLine::new("H2(X) >= n - log2(n+1)", h2, Relation::Ge, bound, CHAIN_TOL),
        InequalityLine::new("H(X) >= H2(X)", h_x, Relation::Ge, h2, CHAIN_TOL),
        InequalityLine::new("H(X) >= n - log2(n+1)", h_x, Relation::Ge, bound, CHAIN_TOL),
    ];
    Ok(ChainReport {
        kind: ChainKind::Half,
        n,
        k: half + 1,
        r: 0,
        lambda_r: 0.0,
        e_g_sq: e_f_sq,
        lhs_rayleigh: rayleigh,
        ub_paper: ub,
        ub_tight: ub,
        lb_paper: 0.0,
        final_check: e_f_sq <= nf + 1.0 + CHAIN_TOL,
        h_x,
        h_y: 0.0,
        h_y_caps: entropy_caps(n, 0)?,
        h_z: h_x,
        h2_z: h2,
        entropy_bound: bound,
        level_weights: levels,
        lines,
    })
}

/// The smoothed chain for a `(k-1)`-wise independent `X`.
///
/// For `k > n/2` the smoothing radius is 0 and the half-independence chain
/// is returned with [`ChainKind::Degenerate`].
pub fn theorem1_chain(
    x: &Distribution,
    k: u32,
    solver: &dyn BallSolver,
    opts: &SolveOptions,
) -> Result<ChainReport> {
    let n = x.n();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k={k} outside 1..={n}")));
    }
    x.require_order(k - 1, DEFAULT_TOL)?;
    if 2 * k > n {
        let mut report = theorem2_chain(x, HalfReading::Floor)?;
        report.kind = ChainKind::Degenerate;
        report.k = k;
        return Ok(report);
    }

    let nf = f64::from(n);
    let kf = f64::from(k);
    let choice = min_radius(n, k, solver, opts)?;
    let spec = lambda_ball_with(solver, n, choice.r, opts)?;
    let lambda = spec.lambda;
    let r = spec.r;
    let d = spec.density()?;
    let y = Distribution::from_density(d.clone())?;
    let z = smooth(x, &spec)?;
    let f = x.density().as_function();
    let g = z.density().as_function();

    let levels = level_profile(z.spectrum());
    let e_g_sq = z.density().second_moment();
    let ag = adjacency_apply(g);
    let rayleigh = inner_product(&ag, g)?;
    let ub_tight = nf + (nf - 2.0 * kf) * (e_g_sq - 1.0);
    let ub_paper = nf + (nf - 2.0 * kf) * e_g_sq;
    let lb_paper = lambda * e_g_sq;

    // A d >= lambda d: equality on the ball, A d >= 0 = lambda d outside.
    let ad = adjacency_apply(d.as_function());
    let min_ratio = d
        .values()
        .iter()
        .zip(ad.values())
        .filter(|(&dv, _)| dv > 0.0)
        .map(|(&dv, &a)| a / dv)
        .fold(f64::INFINITY, f64::min);
    let outside_ok = d
        .values()
        .iter()
        .zip(ad.values())
        .all(|(&dv, &a)| dv > 0.0 || a >= 0.0);

    let kernel = adjacency_kernel(n)?;
    let d_conv_f = convolve(d.as_function(), f)?;
    let assoc_left = inner_product(&convolve(&kernel, &d_conv_f)?, g)?;
    let kd = convolve(&kernel, d.as_function())?;
    let assoc_right = inner_product(&convolve(&kd, f)?, g)?;
    let d_f_g = inner_product(&d_conv_f, g)?;

    let caps = entropy_caps(n, r)?;
    let h_x = shannon_entropy(x.space());
    let h_y = shannon_entropy(y.space());
    let h_z = shannon_entropy(z.space());
    let h2_z = renyi2_from_density(z.density());
    let small_radius = 2 * r <= n;
    let nh_bound = nf - caps.n_h_ratio - nf.log2();
    let exact_bound = nf - nf.log2() - h_y;
    let combined = (lambda - (nf - 2.0 * kf)) * e_g_sq;

    let mut adjacency_line = InequalityLine::new(
        "min_x (Ad)(x)/d(x) >= lambda_r on supp(d)",
        min_ratio,
        Relation::Ge,
        lambda,
        CHAIN_TOL,
    );
    if !outside_ok {
        adjacency_line.pass = false;
    }
    let nh_cap_line = InequalityLine::new(
        "log2 |B_r| <= n H(r/n)",
        caps.log2_ball,
        Relation::Le,
        caps.n_h_ratio,
        CHAIN_TOL,
    );
    let nh_bound_line = InequalityLine::new(
        "H(X) >= n - n H(r/n) - log2 n",
        h_x,
        Relation::Ge,
        nh_bound,
        CHAIN_TOL,
    );

    let mut lines = vec![
        InequalityLine::new(
            "lambda_r >= n - 2k + 1",
            lambda,
            Relation::Ge,
            choice.threshold,
            CHAIN_TOL,
        ),
        InequalityLine::new(
            format!("sum_{{1<=|S|<{k}}} g^(S)^2 == 0"),
            levels[1..k as usize].iter().sum(),
            Relation::Eq,
            0.0,
            CHAIN_TOL,
        ),
        InequalityLine::new(
            "<Ag,g> == sum_S (n-2|S|) g^(S)^2",
            rayleigh,
            Relation::Eq,
            spectral_rayleigh(n, &levels),
            CHAIN_TOL,
        ),
        InequalityLine::new(
            "<Ag,g> <= n + (n-2k)(E[g^2]-1)",
            rayleigh,
            Relation::Le,
            ub_tight,
            CHAIN_TOL,
        ),
        InequalityLine::new(
            "n + (n-2k)(E[g^2]-1) <= n + (n-2k)E[g^2]",
            ub_tight,
            Relation::Le,
            ub_paper,
            CHAIN_TOL,
        ),
        adjacency_line,
        InequalityLine::new(
            "<L*(d*f),g> == <(L*d)*f,g>",
            assoc_left,
            Relation::Eq,
            assoc_right,
            ASSOC_TOL * assoc_left.abs().max(1.0),
        ),
        InequalityLine::new(
            "<(L*d)*f,g> >= lambda_r <d*f,g>",
            assoc_right,
            Relation::Ge,
            lambda * d_f_g,
            CHAIN_TOL,
        ),
        InequalityLine::new("<d*f,g> == E[g^2]", d_f_g, Relation::Eq, e_g_sq, CHAIN_TOL),
        InequalityLine::new(
            "<Ag,g> >= lambda_r E[g^2]",
            rayleigh,
            Relation::Ge,
            lb_paper,
            CHAIN_TOL,
        ),
        InequalityLine::new(
            "(lambda_r - (n-2k)) E[g^2] <= n",
            combined,
            Relation::Le,
            nf,
            CHAIN_TOL,
        ),
        InequalityLine::new("E[g^2] <= n", e_g_sq, Relation::Le, nf, CHAIN_TOL),
        InequalityLine::new(
            "H2(Z) >= n - log2 n",
            h2_z,
            Relation::Ge,
            nf - nf.log2(),
            CHAIN_TOL,
        ),
        InequalityLine::new("H(Z) >= H2(Z)", h_z, Relation::Ge, h2_z, CHAIN_TOL),
        InequalityLine::new(
            "H(X) + H(Y) >= H(Z)",
            h_x + h_y,
            Relation::Ge,
            h_z,
            CHAIN_TOL,
        ),
        InequalityLine::new(
            "H(Y) <= log2 |B_r|",
            h_y,
            Relation::Le,
            caps.log2_ball,
            CHAIN_TOL,
        ),
        if small_radius {
            nh_cap_line
        } else {
            nh_cap_line.display_only()
        },
        InequalityLine::new(
            "H(Y) <= log2 C(n,r)",
            h_y,
            Relation::Le,
            caps.log2_binom,
            CHAIN_TOL,
        )
        .display_only(),
        InequalityLine::new(
            "H(X) >= n - log2 n - H(Y)",
            h_x,
            Relation::Ge,
            exact_bound,
            CHAIN_TOL,
        ),
        if small_radius {
            nh_bound_line
        } else {
            nh_bound_line.display_only()
        },
    ];
    lines.shrink_to_fit();

    Ok(ChainReport {
        kind: ChainKind::Smoothed,
        n,
        k,
        r,
        lambda_r: lambda,
        e_g_sq,
        lhs_rayleigh: rayleigh,
        ub_paper,
        ub_tight,
        lb_paper,
        final_check: combined <= nf + CHAIN_TOL,
        h_x,
        h_y,
        h_y_caps: caps,
        h_z,
        h2_z,
        entropy_bound: if small_radius {
            nh_bound
        } else {
            nf - nf.log2() - caps.log2_ball
        },
        level_weights: levels,
        lines,
    })
}

/// Spectrum of the smoothing density `Y` (for reporting).
pub fn smoothing_spectrum(spec: &BallSpectrum) -> Result<Vec<f64>> {
    Ok(level_profile(&wht(spec.density()?.as_function())))
}
