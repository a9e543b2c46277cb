//! Entropy functionals and the entropy lower bounds for k-wise independent
//! distributions.
//!
//! All entropies are in bits. Certified bounds:
//!
//! - half independence: a `floor(n/2)`-wise independent `X` has
//!   `H(X) >= n - log2(n + 1)`;
//! - explicit smoothing bound: a `(k-1)`-wise independent `X` with
//!   `k <= n/2` has `H(X) >= n - n H(r/n) - log2 n`, where `r` is the
//!   smallest radius whose ball eigenvalue reaches `n - 2k + 1`, provided
//!   `r <= n/2`;
//! - the small-k bound `H(X) >= log2 C(n, floor(k/2))` for `k`-wise
//!   independent `X`.
//!
//! The asymptotic leading term `n - n H(1/2 - sqrt(k/n (1 - k/n)))` is
//! reported for display only and never used as a certificate.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::ball_spectra::{min_radius, BallSolver, PowerIteration, RadiusChoice, SolveOptions};
use crate::cube_fourier::Density;
use crate::gf2_codes::SampleSpace;
use crate::kwise::{Distribution, HalfReading, DEFAULT_TOL};
use crate::{Error, Result};

/// Slack below which a bound counts as violated.
pub const SLACK_TOL: f64 = 1e-9;

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

pub fn shannon_entropy(s: &SampleSpace) -> f64 {
    -s.probabilities().iter().copied().map(plogp).sum::<f64>()
}

/// `H_2(X) = -log2 sum_y p(y)^2`.
pub fn renyi2_entropy(s: &SampleSpace) -> f64 {
    -s.probabilities().iter().map(|p| p * p).sum::<f64>().log2()
}

/// `H_2` through the density: `n - log2 E[f^2]`.
pub fn renyi2_from_density(d: &Density) -> f64 {
    f64::from(d.n()) - d.second_moment().log2()
}

/// `H(p) = -p log2 p - (1-p) log2 (1-p)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(-plogp(p) - plogp(1.0 - p))
}

/// `n - log2(n + 1)`.
pub fn bound_thm_half(n: u32) -> f64 {
    f64::from(n) - f64::from(n + 1).log2()
}

/// `log2 C(n, k)` from the exact binomial.
pub fn log2_binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    log2_biguint(&c)
}

fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log2() + shift as f64
}

/// `log2 sum_{i <= r} C(n, i)`, the log-size of a radius-`r` Hamming ball.
pub fn log2_ball_volume(n: u32, r: u32) -> f64 {
    let mut c = BigUint::one();
    let mut total = BigUint::one();
    for i in 0..r.min(n) {
        c = c * (n - i) / (i + 1);
        total += &c;
    }
    log2_biguint(&total)
}

/// `log2 C(n, floor(k/2))` for `k`-wise independent inputs.
pub fn bound_gp(n: u32, k: u32) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("k={k} exceeds n={n}")));
    }
    Ok(log2_binomial(n, k / 2))
}

/// The finite-n smoothing bound with its radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExplicitBound {
    pub radius: RadiusChoice,
    pub bound: f64,
}

/// `n - n H(r/n) - log2 n` at `r = min_radius(n, k)`, for `(k-1)`-wise
/// independent inputs.
///
/// Not applicable when `2k > n` (the upper estimate on `<Ag, g>` needs
/// `n - 2k >= 0`) or when the radius exceeds `n/2` (where `n H(r/n)` no
/// longer caps the ball volume).
pub fn bound_thm_main_explicit(
    n: u32,
    k: u32,
    solver: &dyn BallSolver,
    opts: &SolveOptions,
) -> Result<ExplicitBound> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k={k} outside 1..={n}")));
    }
    if 2 * k > n {
        return Err(Error::NotApplicable(format!(
            "k={k} exceeds n/2 for n={n}; the half-independence bound covers this case"
        )));
    }
    let radius = min_radius(n, k, solver, opts)?;
    if 2 * radius.r > n {
        return Err(Error::NotApplicable(format!(
            "radius r={} exceeds n/2 for n={n}, k={k}",
            radius.r
        )));
    }
    let nf = f64::from(n);
    let bound = nf - nf * binary_entropy(f64::from(radius.r) / nf)? - nf.log2();
    Ok(ExplicitBound { radius, bound })
}

/// `n - n H(1/2 - sqrt(k/n (1 - k/n)))`, the asymptotic leading term without
/// its `o(n)` correction. Display only.
pub fn bound_asymptotic_display(n: u32, k: u32) -> Result<f64> {
    if k == 0 || 2 * k > n {
        return Err(Error::NotApplicable(format!(
            "leading term defined for 1 <= k <= n/2 (n={n}, k={k})"
        )));
    }
    let nf = f64::from(n);
    let t = f64::from(k) / nf;
    let p = (0.5 - (t * (1.0 - t)).sqrt()).max(0.0);
    Ok(nf - nf * binary_entropy(p)?)
}

#[derive(Clone, Copy)]
pub struct EvaluateOptions<'a> {
    pub tol: f64,
    pub reading: HalfReading,
    pub solver: &'a dyn BallSolver,
    pub solve: SolveOptions,
}

impl Default for EvaluateOptions<'static> {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            reading: HalfReading::default(),
            solver: &PowerIteration,
            solve: SolveOptions::default(),
        }
    }
}

/// Measured entropies of one distribution against every applicable bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: u32,
    /// Certified independence order from the spectral test.
    pub order: u32,
    pub support_size: usize,
    pub shannon: f64,
    pub renyi2: f64,
    /// `H_2` through `n - log2 E[f^2]`.
    pub renyi2_density: f64,
    pub bound_thm_half: Option<f64>,
    /// `k` used for the smoothing bound (`min(order + 1, floor(n/2))`).
    pub thm_main_k: Option<u32>,
    pub thm_main_radius: Option<u32>,
    pub bound_thm_main_explicit: Option<f64>,
    pub bound_gp: f64,
    pub bound_asymptotic_display: Option<f64>,
    pub slack_thm_half: Option<f64>,
    pub slack_thm_main_explicit: Option<f64>,
    pub slack_gp: f64,
}

impl BoundReport {
    /// The largest certified bound.
    pub fn best_bound(&self) -> f64 {
        [
            self.bound_thm_half,
            self.bound_thm_main_explicit,
            Some(self.bound_gp),
        ]
        .into_iter()
        .flatten()
        .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Every certified bound holds within [`SLACK_TOL`], and
    /// `H >= H_2` holds.
    pub fn all_hold(&self) -> bool {
        let slacks = [
            self.slack_thm_half,
            self.slack_thm_main_explicit,
            Some(self.slack_gp),
        ];
        slacks.into_iter().flatten().all(|s| s >= -SLACK_TOL)
            && self.shannon >= self.renyi2 - SLACK_TOL
    }

    pub fn csv_header() -> Vec<&'static str> {
        vec![
            "n",
            "order",
            "support_size",
            "shannon",
            "renyi2",
            "bound_thm_half",
            "bound_thm_main_explicit",
            "thm_main_k",
            "thm_main_radius",
            "bound_gp",
            "bound_asymptotic_display",
            "slack_thm_half",
            "slack_thm_main_explicit",
            "slack_gp",
        ]
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.order.to_string(),
            self.support_size.to_string(),
            self.shannon.to_string(),
            self.renyi2.to_string(),
            opt(self.bound_thm_half),
            opt(self.bound_thm_main_explicit),
            opt(self.thm_main_k),
            opt(self.thm_main_radius),
            self.bound_gp.to_string(),
            opt(self.bound_asymptotic_display),
            opt(self.slack_thm_half),
            opt(self.slack_thm_main_explicit),
            self.slack_gp.to_string(),
        ]
    }

    /// Flat `key = value` block, one entry per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(&format!("{k:<26} = {v}\n"));
        };
        kv("n", self.n.to_string());
        kv("independence_order", self.order.to_string());
        kv("support_size", self.support_size.to_string());
        kv("shannon", self.shannon.to_string());
        kv("renyi2", self.renyi2.to_string());
        kv("renyi2_density", self.renyi2_density.to_string());
        kv("bound_thm_half", na(self.bound_thm_half));
        kv("bound_thm_main_explicit", na(self.bound_thm_main_explicit));
        kv("thm_main_k", na(self.thm_main_k));
        kv("thm_main_radius", na(self.thm_main_radius));
        kv("bound_gp", self.bound_gp.to_string());
        kv(
            "bound_asymptotic_display",
            na(self.bound_asymptotic_display).to_string() + " (display only)",
        );
        kv("slack_thm_half", na(self.slack_thm_half));
        kv("slack_thm_main_explicit", na(self.slack_thm_main_explicit));
        kv("slack_gp", self.slack_gp.to_string());
        kv("best_bound", self.best_bound().to_string());
        kv("all_bounds_hold", self.all_hold().to_string());
        out
    }
}

pub(crate) fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn na<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "n/a".into())
}

pub fn evaluate(d: &Distribution) -> Result<BoundReport> {
    evaluate_with(d, &EvaluateOptions::default())
}

pub fn evaluate_with(d: &Distribution, opts: &EvaluateOptions<'_>) -> Result<BoundReport> {
    let n = d.n();
    let order = d.independence_order(opts.tol);
    let shannon = shannon_entropy(d.space());
    let renyi2 = renyi2_entropy(d.space());

    let bound_thm_half = (order >= opts.reading.required_order(n)).then(|| bound_thm_half(n));

    let thm_main_k = (n >= 2).then(|| (order + 1).min(n / 2));
    let explicit = match thm_main_k {
        Some(k) => match bound_thm_main_explicit(n, k, opts.solver, &opts.solve) {
            Ok(b) => Some(b),
            Err(Error::NotApplicable(_)) => None,
            Err(e) => return Err(e),
        },
        None => None,
    };
    let bound_gp = bound_gp(n, order)?;
    let bound_asymptotic_display = thm_main_k.and_then(|k| bound_asymptotic_display(n, k).ok());

    Ok(BoundReport {
        n,
        order,
        support_size: d.space().support_size(),
        shannon,
        renyi2,
        renyi2_density: renyi2_from_density(d.density()),
        bound_thm_half,
        thm_main_k,
        thm_main_radius: explicit.map(|b| b.radius.r),
        bound_thm_main_explicit: explicit.map(|b| b.bound),
        bound_gp,
        bound_asymptotic_display,
        slack_thm_half: bound_thm_half.map(|b| shannon - b),
        slack_thm_main_explicit: explicit.map(|b| shannon - b.bound),
        slack_gp: shannon - bound_gp,
    })
}

/// One row of a bound-landscape sweep, for `(k-1)`-wise independent inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: u32,
    pub k: u32,
    pub r_star: Option<u32>,
    pub lambda_r: Option<f64>,
    pub ns_bound: Option<f64>,
    pub thm_main_explicit: Option<f64>,
    pub thm_half: Option<f64>,
    pub gp: f64,
    pub asymptotic_display: Option<f64>,
    pub max_of_bounds: f64,
}

impl BoundRow {
    pub fn csv_header() -> Vec<&'static str> {
        vec![
            "n",
            "k",
            "r_star",
            "lambda_r",
            "ns_bound",
            "thm_main_explicit",
            "thm_half",
            "gp",
            "asymptotic_display",
            "max_of_bounds",
        ]
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.k.to_string(),
            opt(self.r_star),
            opt(self.lambda_r),
            opt(self.ns_bound),
            opt(self.thm_main_explicit),
            opt(self.thm_half),
            self.gp.to_string(),
            opt(self.asymptotic_display),
            self.max_of_bounds.to_string(),
        ]
    }
}

/// All bounds available for a `(k-1)`-wise independent distribution on
/// `n` bits.
pub fn bound_row(n: u32, k: u32, solver: &dyn BallSolver, opts: &SolveOptions) -> Result<BoundRow> {
    if n == 0 || k == 0 || k > n + 1 {
        return Err(Error::Domain(format!("need 1 <= k <= n+1 (n={n}, k={k})")));
    }
    let order = k - 1;
    let explicit = if k <= n {
        match bound_thm_main_explicit(n, k, solver, opts) {
            Ok(b) => Some(b),
            Err(Error::NotApplicable(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let radius = if k <= n {
        Some(explicit.map_or_else(|| min_radius(n, k, solver, opts), |b| Ok(b.radius))?)
    } else {
        None
    };
    let thm_half = (order >= n / 2).then(|| bound_thm_half(n));
    let gp = bound_gp(n, order)?;
    let thm_main_explicit = explicit.map(|b| b.bound);
    let max_of_bounds = [thm_main_explicit, thm_half, Some(gp)]
        .into_iter()
        .flatten()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundRow {
        n,
        k,
        r_star: radius.map(|c| c.r),
        lambda_r: radius.map(|c| c.lambda),
        ns_bound: radius.map(|c| crate::ball_spectra::ns_bound(n, c.r)),
        thm_main_explicit,
        thm_half,
        gp,
        asymptotic_display: bound_asymptotic_display(n, k).ok(),
        max_of_bounds,
    })
}
