//! Distributions on the cube and their k-wise independence.
//!
//! Two independent tests are provided. The spectral test reads the Fourier
//! coefficients of the normalized density: a distribution is k-wise
//! independent iff `f^(S) = 0` for every `1 <= |S| <= k`. The marginal test
//! enumerates every coordinate set `S` with `|S| <= k` and every assignment
//! `a`, and measures `|Pr(X|_S = a) - 2^-|S||` directly.

use serde::Serialize;

use crate::cube_fourier::{wht, Density, Spectrum};
use crate::gf2_codes::{binomial_u128, to_bitstring, SampleSpace, ENUMERATION_LIMIT};
use crate::{check_dim, Error, Result};

/// Default threshold below which a Fourier coefficient counts as zero.
pub const DEFAULT_TOL: f64 = 1e-9;

/// How "n/2-wise independent" is read for odd `n`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum HalfReading {
    /// `floor(n/2)`-wise, which is all the half-independence argument uses.
    #[default]
    Floor,
    /// `ceil(n/2)`-wise.
    Ceil,
}

impl HalfReading {
    pub fn required_order(self, n: u32) -> u32 {
        match self {
            HalfReading::Floor => n / 2,
            HalfReading::Ceil => n.div_ceil(2),
        }
    }
}

/// A distribution with its normalized density and spectrum precomputed.
#[derive(Debug, Clone, Serialize)]
pub struct Distribution {
    space: SampleSpace,
    density: Density,
    spectrum: Spectrum,
    level_max: Vec<f64>,
}

impl Distribution {
    pub fn from_space(space: SampleSpace) -> Result<Self> {
        let density = density_from_space(&space)?;
        Ok(Self::assemble(space, density))
    }

    /// Builds the distribution `Pr(X = x) = f(x) / 2^n` of a density.
    pub fn from_density(density: Density) -> Result<Self> {
        let scale = 1.0 / density.values().len() as f64;
        let (points, probabilities): (Vec<u64>, Vec<f64>) = density
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(x, &v)| (x as u64, v * scale))
            .unzip();
        let total: f64 = crate::cube_fourier::fsum(probabilities.iter().copied());
        let probabilities = probabilities.into_iter().map(|p| p / total).collect();
        let space = SampleSpace::new(density.n(), points, probabilities)?;
        Ok(Self::assemble(space, density))
    }

    fn assemble(space: SampleSpace, density: Density) -> Self {
        let spectrum = wht(density.as_function());
        let mut level_max = vec![0.0f64; space.n() as usize + 1];
        for (s, c) in spectrum.coeffs().iter().enumerate() {
            let l = s.count_ones() as usize;
            level_max[l] = level_max[l].max(c.abs());
        }
        Self {
            space,
            density,
            spectrum,
            level_max,
        }
    }

    pub fn n(&self) -> u32 {
        self.space.n()
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `max |f^(S)|` over `|S| = level`.
    pub fn level_max_abs(&self, level: u32) -> f64 {
        self.level_max[level as usize]
    }

    /// Largest `k` with `|f^(S)| <= tol` for all `1 <= |S| <= k`.
    pub fn independence_order(&self, tol: f64) -> u32 {
        (1..=self.n())
            .find(|&l| self.level_max[l as usize] > tol)
            .map_or(self.n(), |l| l - 1)
    }

    pub fn is_kwise(&self, k: u32, tol: f64) -> bool {
        self.independence_order(tol) >= k
    }

    /// The lowest level in `1..=k` carrying a coefficient above `tol`, with
    /// that coefficient's magnitude.
    pub fn first_violation(&self, k: u32, tol: f64) -> Option<(u32, f64)> {
        (1..=k.min(self.n()))
            .find(|&l| self.level_max[l as usize] > tol)
            .map(|l| (l, self.level_max[l as usize]))
    }

    /// Fails with [`Error::Precondition`] unless the distribution is `k`-wise
    /// independent at `tol`.
    pub fn require_order(&self, k: u32, tol: f64) -> Result<()> {
        match self.first_violation(k, tol) {
            None => Ok(()),
            Some((level, magnitude)) => Err(Error::Precondition {
                level,
                magnitude,
                required: k,
            }),
        }
    }

    pub fn marginal_check(&self, k: u32) -> Result<MarginalReport> {
        marginal_check(&self.space, k)
    }

    /// Largest `k` whose marginal deviation stays below `tol` at every level
    /// `1..=k`, by brute force.
    pub fn marginal_order(&self, tol: f64) -> Result<u32> {
        let report = self.marginal_check(self.n())?;
        Ok((1..=self.n())
            .find(|&l| report.level_deviation[l as usize] >= tol)
            .map_or(self.n(), |l| l - 1))
    }
}

/// `f(x) = 2^n Pr(X = x)`, rescaled so the mean is exactly 1 up to rounding.
pub fn density_from_space(s: &SampleSpace) -> Result<Density> {
    let n = s.n();
    check_dim(n)?;
    let size = 1usize << n;
    let mut values = vec![0.0; size];
    for (x, p) in s.iter() {
        values[x as usize] += p * size as f64;
    }
    Density::from_weights(n, values)
}

/// A coordinate set and assignment achieving the largest marginal deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalWitness {
    /// Coordinate set as a point mask.
    pub subset: u64,
    /// Assignment to the coordinates of `subset`, in coordinate order.
    pub assignment: u64,
    pub size: u32,
}

impl MarginalWitness {
    /// 1-based coordinates of the witness set.
    pub fn coordinates(&self, n: u32) -> Vec<u32> {
        (0..n)
            .filter(|i| self.subset >> (n - 1 - i) & 1 == 1)
            .map(|i| i + 1)
            .collect()
    }

    pub fn assignment_bits(&self) -> String {
        to_bitstring(self.assignment, self.size)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalReport {
    pub k: u32,
    pub max_deviation: f64,
    pub witness: Option<MarginalWitness>,
    /// `level_deviation[s]`: largest deviation over `|S| = s`, for `s = 0..=k`.
    pub level_deviation: Vec<f64>,
}

/// Brute-force marginal oracle over every `|S| <= k` and every assignment.
pub fn marginal_check(s: &SampleSpace, k: u32) -> Result<MarginalReport> {
    let n = s.n();
    if k > n {
        return Err(Error::Domain(format!("k={k} exceeds n={n}")));
    }
    if n > 63 {
        return Err(Error::Domain("marginal check supports n <= 63".into()));
    }
    let count: u128 = (1..=k).map(|j| binomial_u128(n, j) << j).sum();
    if count > ENUMERATION_LIMIT {
        return Err(Error::ResourceGuard {
            what: "marginal enumeration",
            count,
            limit: ENUMERATION_LIMIT,
        });
    }

    let mut level_deviation = vec![0.0f64; k as usize + 1];
    let mut best: Option<(f64, MarginalWitness)> = None;
    let mut counts: Vec<f64> = Vec::new();
    let mut positions: Vec<u32> = Vec::with_capacity(k as usize);
    for size in 1..=k {
        let target = 1.0 / (1u64 << size) as f64;
        for subset in subsets_of_size(n, size) {
            positions.clear();
            // Coordinate order: most significant point bit first.
            positions.extend((0..n).rev().filter(|b| subset >> b & 1 == 1));
            counts.clear();
            counts.resize(1usize << size, 0.0);
            for (x, p) in s.iter() {
                let a = positions
                    .iter()
                    .fold(0usize, |acc, &b| acc << 1 | (x >> b & 1) as usize);
                counts[a] += p;
            }
            for (a, &pr) in counts.iter().enumerate() {
                let dev = (pr - target).abs();
                let level = &mut level_deviation[size as usize];
                *level = level.max(dev);
                if best.is_none_or(|(d, _)| dev > d) {
                    best = Some((
                        dev,
                        MarginalWitness {
                            subset,
                            assignment: a as u64,
                            size,
                        },
                    ));
                }
            }
        }
    }
    Ok(MarginalReport {
        k,
        max_deviation: best.map_or(0.0, |(d, _)| d),
        witness: best.map(|(_, w)| w),
        level_deviation,
    })
}

/// Masks of `n` bits with exactly `size` ones, in increasing order.
fn subsets_of_size(n: u32, size: u32) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let first = if size == 0 { 0 } else { (1u64 << size) - 1 };
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let cur = next?;
        if cur >= limit {
            return None;
        }
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack.
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2_codes::{hamming_code, simplex_code, uniform_code_space};

    fn hamming(m: u32) -> Distribution {
        Distribution::from_space(uniform_code_space(&hamming_code(m).unwrap()).unwrap()).unwrap()
    }

    fn biased_product(n: u32, p: f64) -> Distribution {
        let points: Vec<u64> = (0..1u64 << n).collect();
        let probs = points
            .iter()
            .map(|x| {
                let ones = x.count_ones() as i32;
                p.powi(ones) * (1.0 - p).powi(n as i32 - ones)
            })
            .collect();
        Distribution::from_space(SampleSpace::new(n, points, probs).unwrap()).unwrap()
    }

    #[test]
    fn densities() {
        let u = density_from_space(&SampleSpace::uniform_cube(2).unwrap()).unwrap();
        assert_eq!(u.values(), &[1.0; 4]);
        let p = density_from_space(&SampleSpace::point(3, 0).unwrap()).unwrap();
        assert_eq!(p.values()[0], 8.0);
        assert!(p.values()[1..].iter().all(|&v| v == 0.0));
        let h = hamming(3);
        let vals = h.density().values();
        assert_eq!(vals.iter().filter(|&&v| v == 8.0).count(), 16);
        assert_eq!(vals.iter().filter(|&&v| v == 0.0).count(), 112);
        assert!((h.spectrum().coeff(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn independence_order_examples() {
        let u = Distribution::from_space(SampleSpace::uniform_cube(6).unwrap()).unwrap();
        assert_eq!(u.independence_order(DEFAULT_TOL), 6);
        let p = Distribution::from_space(SampleSpace::point(6, 0).unwrap()).unwrap();
        assert_eq!(p.independence_order(DEFAULT_TOL), 0);
        let h = hamming(3);
        assert_eq!(h.independence_order(DEFAULT_TOL), 3);
        assert!(h.is_kwise(3, DEFAULT_TOL));
        assert!(!h.is_kwise(4, DEFAULT_TOL));
        assert!(u.is_kwise(6, DEFAULT_TOL));
    }

    #[test]
    fn simplex_space_is_pairwise_but_not_three_wise() {
        // Columns 001, 010, 011 of the simplex generator sum to zero.
        let s = Distribution::from_space(uniform_code_space(&simplex_code(3).unwrap()).unwrap())
            .unwrap();
        assert!(s.is_kwise(2, DEFAULT_TOL));
        assert!(!s.is_kwise(3, DEFAULT_TOL));
        assert_eq!(s.marginal_order(DEFAULT_TOL).unwrap(), 2);
        assert_eq!(s.marginal_check(3).unwrap().max_deviation, 0.125);
    }

    #[test]
    fn marginal_examples() {
        let u = Distribution::from_space(SampleSpace::uniform_cube(5).unwrap()).unwrap();
        assert_eq!(u.marginal_check(5).unwrap().max_deviation, 0.0);
        let h = hamming(3);
        assert_eq!(h.marginal_check(3).unwrap().max_deviation, 0.0);
        let r4 = h.marginal_check(4).unwrap();
        assert_eq!(r4.max_deviation, 1.0 / 16.0);
        let w = r4.witness.unwrap();
        assert_eq!(w.size, 4);
        let b = biased_product(4, 0.6);
        let r1 = b.marginal_check(1).unwrap();
        assert!((r1.max_deviation - 0.1).abs() < 1e-12);
    }

    #[test]
    fn witness_reports_coordinates_in_order() {
        let p = Distribution::from_space(SampleSpace::point(3, 0b000).unwrap()).unwrap();
        let r = p.marginal_check(1).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.coordinates(3), vec![3]);
        assert_eq!(w.assignment_bits(), "0");
        assert_eq!(r.max_deviation, 0.5);
    }

    #[test]
    fn precondition_names_level() {
        let p = Distribution::from_space(SampleSpace::point(4, 0).unwrap()).unwrap();
        match p.require_order(2, DEFAULT_TOL) {
            Err(Error::Precondition {
                level, magnitude, ..
            }) => {
                assert_eq!(level, 1);
                assert!((magnitude - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert!(hamming(3).require_order(3, DEFAULT_TOL).is_ok());
    }

    #[test]
    fn half_reading() {
        assert_eq!(HalfReading::Floor.required_order(7), 3);
        assert_eq!(HalfReading::Ceil.required_order(7), 4);
        assert_eq!(HalfReading::Ceil.required_order(8), 4);
    }

    #[test]
    fn subset_enumeration_counts() {
        for n in 1..=10u32 {
            for k in 0..=n {
                let all: Vec<u64> = subsets_of_size(n, k).collect();
                assert_eq!(all.len() as u128, binomial_u128(n, k));
                assert!(all.iter().all(|s| s.count_ones() == k && *s < 1 << n));
            }
        }
    }

    #[test]
    fn from_density_round_trips_space() {
        let h = hamming(3);
        let again = Distribution::from_density(h.density().clone()).unwrap();
        assert_eq!(again.space().points(), h.space().points());
    }
}
