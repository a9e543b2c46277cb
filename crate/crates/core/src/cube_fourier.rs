//! Fourier analysis over the Boolean cube `{0,1}^n`.
//!
//! Points and subsets are both machine integers: bit `n - i` of a mask is
//! coordinate `i` (1-based), so the most significant of the `n` bits is
//! coordinate 1. Characters are `chi_S(x) = (-1)^{popcount(S & x)}`.
//!
//! Normalizations are the expectation conventions throughout:
//!
//! - `f^(S) = 2^-n * sum_x f(x) chi_S(x)`
//! - `<f, g> = 2^-n * sum_x f(x) g(x)`
//! - `(f * g)(x) = 2^-n * sum_y f(y) g(y xor x)`
//!
//! Under these conventions the hypercube adjacency operator is convolution
//! with [`adjacency_kernel`], which is `2^n` times the weight-one indicator,
//! and whose coefficients are `n - 2|S|`.

use rayon::prelude::*;
use serde::Serialize;

use crate::{check_dim, Error, Result};

/// Below this length the butterfly runs single-threaded.
const PAR_THRESHOLD: usize = 1 << 14;

/// A real function on `{0,1}^n`, stored densely by point mask.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubeFunction {
    n: u32,
    values: Vec<f64>,
}

impl CubeFunction {
    pub fn new(n: u32, values: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(Error::Length {
                expected,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { n, values })
    }

    pub fn constant(n: u32, c: f64) -> Result<Self> {
        check_dim(n)?;
        Self::new(n, vec![c; 1usize << n])
    }

    pub fn from_fn(n: u32, f: impl Fn(usize) -> f64) -> Result<Self> {
        check_dim(n)?;
        Self::new(n, (0..1usize << n).map(f).collect())
    }

    /// Indicator of a single point.
    pub fn indicator(n: u32, point: usize) -> Result<Self> {
        Self::from_fn(n, |x| if x == point { 1.0 } else { 0.0 })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, x: usize) -> f64 {
        self.values[x]
    }

    /// `E_x[f(x)]` under the uniform measure.
    pub fn mean(&self) -> f64 {
        fsum(self.values.iter().copied()) / self.values.len() as f64
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

/// A normalized probability density: nonnegative with mean 1, so that
/// `f(x) = 2^n * Pr(X = x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Density(CubeFunction);

impl Density {
    /// Tolerance on `|E[f] - 1|` accepted at construction.
    pub const MEAN_TOL: f64 = 1e-12;

    pub fn new(f: CubeFunction) -> Result<Self> {
        if let Some(x) = f.values.iter().position(|&v| v < 0.0) {
            return Err(Error::Validation(format!(
                "density negative at point {x}: {}",
                f.values[x]
            )));
        }
        let mean = f.mean();
        if (mean - 1.0).abs() > Self::MEAN_TOL {
            return Err(Error::Validation(format!(
                "density mean {mean} differs from 1"
            )));
        }
        Ok(Self(f))
    }

    /// Builds a density from nonnegative weights, rescaling to mean exactly 1.
    pub fn from_weights(n: u32, weights: Vec<f64>) -> Result<Self> {
        let f = CubeFunction::new(n, weights)?;
        if f.values.iter().any(|&v| v < 0.0) {
            return Err(Error::Validation("negative weight".into()));
        }
        let mean = f.mean();
        if mean <= 0.0 {
            return Err(Error::Validation("weights sum to zero".into()));
        }
        Ok(Self(f.scale(1.0 / mean)))
    }

    pub fn uniform(n: u32) -> Result<Self> {
        Ok(Self(CubeFunction::constant(n, 1.0)?))
    }

    /// `2^n` times the indicator of `point`.
    pub fn point_mass(n: u32, point: usize) -> Result<Self> {
        let scale = (1u64 << n) as f64;
        Ok(Self(CubeFunction::from_fn(n, |x| {
            if x == point {
                scale
            } else {
                0.0
            }
        })?))
    }

    pub fn as_function(&self) -> &CubeFunction {
        &self.0
    }

    pub fn into_function(self) -> CubeFunction {
        self.0
    }

    pub fn n(&self) -> u32 {
        self.0.n
    }

    pub fn values(&self) -> &[f64] {
        &self.0.values
    }

    /// `Pr(X = x) = f(x) / 2^n`.
    pub fn probability(&self, x: usize) -> f64 {
        self.0.values[x] / self.0.values.len() as f64
    }

    /// `E[f^2]`, which equals `2^n * sum_x Pr(X = x)^2`.
    pub fn second_moment(&self) -> f64 {
        inner_product(&self.0, &self.0).expect("same dimension")
    }
}

impl AsRef<CubeFunction> for Density {
    fn as_ref(&self) -> &CubeFunction {
        &self.0
    }
}

/// Fourier coefficient table indexed by subset mask.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    n: u32,
    coeffs: Vec<f64>,
}

impl Spectrum {
    pub fn new(n: u32, coeffs: Vec<f64>) -> Result<Self> {
        let f = CubeFunction::new(n, coeffs)?;
        Ok(Self {
            n: f.n,
            coeffs: f.values,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, subset: usize) -> f64 {
        self.coeffs[subset]
    }

    /// Fourier weight per level; see [`level_profile`].
    pub fn level_profile(&self) -> Vec<f64> {
        level_profile(self)
    }

    /// Largest `|f^(S)|` over `|S| = level`.
    pub fn level_max_abs(&self, level: u32) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(s, _)| s.count_ones() == level)
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max)
    }

    /// Pointwise product `f^(S) g^(S)`.
    pub fn pointwise(&self, other: &Spectrum) -> Result<Spectrum> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(Spectrum {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }
}

/// Unnormalized in-place Walsh–Hadamard butterfly:
/// `out[S] = sum_x in[x] chi_S(x)`.
pub fn fwht_in_place(data: &mut [f64]) {
    let len = data.len();
    assert!(len.is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < len {
        if len < PAR_THRESHOLD {
            for block in data.chunks_mut(2 * h) {
                butterfly(block, h);
            }
        } else if len / (2 * h) >= 64 {
            data.par_chunks_mut(2 * h)
                .for_each(|block| butterfly(block, h));
        } else {
            for block in data.chunks_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                lo.par_chunks_mut(4096)
                    .zip(hi.par_chunks_mut(4096))
                    .for_each(|(a, b)| {
                        for (u, v) in a.iter_mut().zip(b.iter_mut()) {
                            let (s, d) = (*u + *v, *u - *v);
                            *u = s;
                            *v = d;
                        }
                    });
            }
        }
        h *= 2;
    }
}

#[inline]
fn butterfly(block: &mut [f64], h: usize) {
    let (lo, hi) = block.split_at_mut(h);
    for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
        let (s, d) = (*u + *v, *u - *v);
        *u = s;
        *v = d;
    }
}

/// All `2^n` Fourier coefficients of `f`.
pub fn wht(f: &CubeFunction) -> Spectrum {
    let mut coeffs = f.values.clone();
    fwht_in_place(&mut coeffs);
    let norm = 1.0 / coeffs.len() as f64;
    coeffs.iter_mut().for_each(|c| *c *= norm);
    Spectrum { n: f.n, coeffs }
}

/// `f(x) = sum_S f^(S) chi_S(x)`.
pub fn inverse_wht(s: &Spectrum) -> CubeFunction {
    let mut values = s.coeffs.clone();
    fwht_in_place(&mut values);
    CubeFunction { n: s.n, values }
}

/// `(f * g)(x) = E_y[f(y) g(y xor x)]`, computed spectrally.
pub fn convolve(f: &CubeFunction, g: &CubeFunction) -> Result<CubeFunction> {
    f.same_dim(g)?;
    let product = wht(f).pointwise(&wht(g))?;
    Ok(inverse_wht(&product))
}

/// `<f, g> = E_x[f(x) g(x)]`.
pub fn inner_product(f: &CubeFunction, g: &CubeFunction) -> Result<f64> {
    f.same_dim(g)?;
    let total = fsum(f.values.iter().zip(&g.values).map(|(a, b)| a * b));
    Ok(total / f.values.len() as f64)
}

/// `sum_S f^(S) g^(S)`, the spectral side of Plancherel's identity.
pub fn plancherel_sum(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            left: a.n,
            right: b.n,
        });
    }
    Ok(fsum(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x * y)))
}

/// `(Af)(x) = sum_i f(x xor e_i)`, by direct neighbor summation.
pub fn adjacency_apply(f: &CubeFunction) -> CubeFunction {
    let n = f.n;
    let compute = |x: usize| -> f64 { (0..n).map(|i| f.values[x ^ (1 << i)]).sum() };
    let values: Vec<f64> = if f.values.len() >= PAR_THRESHOLD {
        (0..f.values.len()).into_par_iter().map(compute).collect()
    } else {
        (0..f.values.len()).map(compute).collect()
    };
    CubeFunction { n, values }
}

/// The kernel `K` with `A f = K * f`: `2^n` on weight-one points, 0 elsewhere.
///
/// Its coefficients are `K^(S) = n - 2|S|`.
pub fn adjacency_kernel(n: u32) -> Result<CubeFunction> {
    let scale = (1u64 << n) as f64;
    CubeFunction::from_fn(n, |x| if x.count_ones() == 1 { scale } else { 0.0 })
}

/// `entry[j] = sum_{|S| = j} f^(S)^2` for `j = 0..=n`.
pub fn level_profile(s: &Spectrum) -> Vec<f64> {
    let mut levels = vec![0.0; s.n as usize + 1];
    for (subset, c) in s.coeffs.iter().enumerate() {
        levels[subset.count_ones() as usize] += c * c;
    }
    levels
}

/// Neumaier-compensated summation.
pub(crate) fn fsum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_level(s: &Spectrum) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); s.n() as usize + 1];
        for (subset, &c) in s.coeffs().iter().enumerate() {
            out[subset.count_ones() as usize].push(c);
        }
        out
    }

    fn lcg_values(n: u32, seed: u64) -> Vec<f64> {
        let mut state = seed;
        (0..1usize << n)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect()
    }

    #[test]
    fn wht_of_constant_is_delta_at_empty_set() {
        let s = wht(&CubeFunction::constant(5, 1.0).unwrap());
        assert_eq!(s.coeff(0), 1.0);
        assert!(s.coeffs()[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn wht_of_point_mass_at_origin_is_all_ones() {
        let d = Density::point_mass(6, 0).unwrap();
        let s = wht(d.as_function());
        assert!(s.coeffs().iter().all(|&c| c == 1.0));
    }

    #[test]
    fn adjacency_kernel_coefficients_are_n_minus_two_s() {
        let s = wht(&adjacency_kernel(3).unwrap());
        let levels = by_level(&s);
        let expected = [3.0, 1.0, -1.0, -3.0];
        for (level, want) in expected.iter().enumerate() {
            assert!(levels[level].iter().all(|c| c == want), "level {level}");
        }
        for n in 1..=10 {
            let s = wht(&adjacency_kernel(n).unwrap());
            for (subset, &c) in s.coeffs().iter().enumerate() {
                assert_eq!(c, n as f64 - 2.0 * subset.count_ones() as f64);
            }
        }
    }

    #[test]
    fn plain_weight_one_indicator_has_scaled_coefficients() {
        // The unscaled indicator carries the 2^-n of the expectation convention.
        let ind = CubeFunction::from_fn(3, |x| (x.count_ones() == 1) as u8 as f64).unwrap();
        let s = wht(&ind);
        for (subset, &c) in s.coeffs().iter().enumerate() {
            assert_eq!(c * 8.0, 3.0 - 2.0 * subset.count_ones() as f64);
        }
    }

    #[test]
    fn inverse_of_delta_spectra() {
        let e = Spectrum::new(4, (0..16).map(|s| (s == 0) as u8 as f64).collect()).unwrap();
        assert!(inverse_wht(&e).values().iter().all(|&v| v == 1.0));
        let ones = Spectrum::new(4, vec![1.0; 16]).unwrap();
        let f = inverse_wht(&ones);
        assert_eq!(f.get(0), 16.0);
        assert!(f.values()[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn round_trip_n8() {
        let f = CubeFunction::new(8, lcg_values(8, 7)).unwrap();
        let back = inverse_wht(&wht(&f));
        let err = f
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn wht_matches_direct_summation() {
        let n = 5;
        let f = CubeFunction::new(n, lcg_values(n, 3)).unwrap();
        let s = wht(&f);
        for subset in 0..32usize {
            let direct: f64 = (0..32usize)
                .map(|x| {
                    let sign = if (subset & x).count_ones() % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    f.get(x) * sign
                })
                .sum::<f64>()
                / 32.0;
            assert!((direct - s.coeff(subset)).abs() < 1e-14);
        }
    }

    #[test]
    fn convolution_identities() {
        let n = 5;
        let f = CubeFunction::new(n, lcg_values(n, 11)).unwrap();
        let delta = Density::point_mass(n, 0).unwrap();
        let same = convolve(&f, delta.as_function()).unwrap();
        for (a, b) in f.values().iter().zip(same.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let uniform = CubeFunction::constant(n, 1.0).unwrap();
        let flat = convolve(&uniform, &f).unwrap();
        let mean = f.mean();
        assert!(flat.values().iter().all(|v| (v - mean).abs() < 1e-12));
    }

    #[test]
    fn convolution_matches_double_sum() {
        for n in 1..=6u32 {
            let f = CubeFunction::new(n, lcg_values(n, 100 + n as u64)).unwrap();
            let g = CubeFunction::new(n, lcg_values(n, 200 + n as u64)).unwrap();
            let fast = convolve(&f, &g).unwrap();
            let size = 1usize << n;
            for x in 0..size {
                let direct: f64 =
                    (0..size).map(|y| f.get(y) * g.get(y ^ x)).sum::<f64>() / size as f64;
                assert!((direct - fast.get(x)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn inner_products() {
        let one = CubeFunction::constant(4, 1.0).unwrap();
        assert_eq!(inner_product(&one, &one).unwrap(), 1.0);
        let u = Density::uniform(6).unwrap();
        assert_eq!(u.second_moment(), 1.0);
        let f = CubeFunction::new(8, lcg_values(8, 1)).unwrap();
        let g = CubeFunction::new(8, lcg_values(8, 2)).unwrap();
        let direct = inner_product(&f, &g).unwrap();
        let spectral = plancherel_sum(&wht(&f), &wht(&g)).unwrap();
        assert!((direct - spectral).abs() < 1e-10);
    }

    #[test]
    fn adjacency_examples() {
        let ones = adjacency_apply(&CubeFunction::constant(6, 1.0).unwrap());
        assert!(ones.values().iter().all(|&v| v == 6.0));
        let origin = adjacency_apply(&CubeFunction::indicator(6, 0).unwrap());
        for x in 0..64usize {
            assert_eq!(origin.get(x), (x.count_ones() == 1) as u8 as f64);
        }
    }

    #[test]
    fn adjacency_is_convolution_with_scaled_kernel() {
        for n in 1..=8u32 {
            let f = CubeFunction::new(n, lcg_values(n, 9)).unwrap();
            let direct = adjacency_apply(&f);
            let spectral = convolve(&adjacency_kernel(n).unwrap(), &f).unwrap();
            for (a, b) in direct.values().iter().zip(spectral.values()) {
                assert!((a - b).abs() < 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn adjacency_rayleigh_quotient_bounded_by_degree() {
        let n = 8;
        let mut f = CubeFunction::new(n, lcg_values(n, 5)).unwrap();
        let mut rq = 0.0;
        for _ in 0..200 {
            let af = adjacency_apply(&f);
            rq = inner_product(&af, &f).unwrap() / inner_product(&f, &f).unwrap();
            let norm = inner_product(&af, &af).unwrap().sqrt();
            f = af.scale(1.0 / norm);
        }
        assert!(rq <= n as f64 + 1e-12);
    }

    #[test]
    fn level_profile_examples() {
        let u = wht(Density::uniform(5).unwrap().as_function());
        assert_eq!(level_profile(&u), vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let p = wht(Density::point_mass(5, 0).unwrap().as_function());
        assert_eq!(level_profile(&p), vec![1.0, 5.0, 10.0, 10.0, 5.0, 1.0]);
    }

    #[test]
    fn size_and_validation_errors() {
        assert!(matches!(
            CubeFunction::constant(0, 1.0),
            Err(Error::DimensionOutOfRange { .. })
        ));
        assert!(matches!(
            CubeFunction::new(3, vec![0.0; 7]),
            Err(Error::Length { .. })
        ));
        assert!(matches!(
            CubeFunction::new(1, vec![0.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
        let a = CubeFunction::constant(3, 1.0).unwrap();
        let b = CubeFunction::constant(4, 1.0).unwrap();
        assert!(matches!(
            convolve(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Density::new(CubeFunction::constant(3, 2.0).unwrap()).is_err());
        assert!(Density::new(CubeFunction::new(1, vec![-1.0, 3.0]).unwrap()).is_err());
    }

    #[test]
    fn parallel_butterfly_matches_sequential() {
        let n = 16;
        let f = CubeFunction::new(n, lcg_values(n, 42)).unwrap();
        let mut seq = f.values().to_vec();
        let mut h = 1;
        while h < seq.len() {
            for block in seq.chunks_mut(2 * h) {
                butterfly(block, h);
            }
            h *= 2;
        }
        let mut par = f.values().to_vec();
        fwht_in_place(&mut par);
        assert_eq!(seq, par);
    }
}
