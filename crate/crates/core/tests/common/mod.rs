//! Shared corpus for the integration suites: tight code witnesses, random
//! linear codes with verified dual distance, and random mixtures of their
//! cosets.
#![allow(dead_code)]

use std::collections::BTreeMap;

use kwise_entropy::gf2_codes::{
    hamming_code, uniform_code_space, BinaryMatrix, LinearCode, SampleSpace,
};
use kwise_entropy::kwise::{Distribution, DEFAULT_TOL};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Gamma};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A labelled corpus entry with its certified independence order.
pub struct Entry {
    pub label: String,
    pub dist: Distribution,
    pub order: u32,
}

impl Entry {
    pub fn new(label: impl Into<String>, space: SampleSpace) -> Self {
        let dist = Distribution::from_space(space).unwrap();
        let order = dist.independence_order(DEFAULT_TOL);
        Self {
            label: label.into(),
            dist,
            order,
        }
    }
}

pub fn hamming(m: u32) -> SampleSpace {
    uniform_code_space(&hamming_code(m).unwrap()).unwrap()
}

/// Random `dim`-dimensional code whose every nonzero word has weight at
/// least `min_weight`, or `None` if none was found.
pub fn random_code_with_distance(
    rng: &mut impl Rng,
    n: u32,
    dim: usize,
    min_weight: u32,
) -> Option<LinearCode> {
    for _ in 0..2_000 {
        let rows: Vec<u64> = (0..dim)
            .map(|_| rng.gen::<u64>() & ((1u64 << n) - 1))
            .collect();
        let m = BinaryMatrix::new(n, rows).unwrap();
        if m.rank() != dim {
            continue;
        }
        let code = LinearCode::from_generator(&m);
        if code.min_distance().unwrap() >= min_weight {
            return Some(code);
        }
    }
    None
}

/// A random code whose uniform distribution is at least `order`-wise
/// independent: the dual of a random code with minimum distance
/// `order + 1`, with dual dimension `dual_dim`.
pub fn random_kwise_code(
    rng: &mut impl Rng,
    n: u32,
    dual_dim: usize,
    order: u32,
) -> Option<LinearCode> {
    let dual = random_code_with_distance(rng, n, dual_dim, order + 1)?;
    let code = dual.dual();
    assert!(code.dual_distance().unwrap() > order);
    Some(code)
}

/// Dirichlet(alpha, ..., alpha) weights.
pub fn dirichlet(rng: &mut impl Rng, len: usize, alpha: f64) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).unwrap();
    loop {
        let w: Vec<f64> = (0..len).map(|_| gamma.sample(rng)).collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 && total.is_finite() {
            return w.into_iter().map(|x| x / total).collect();
        }
    }
}

/// A random mixture of up to `max_cosets` cosets of `code`, each uniform.
/// Every coset has the same spectrum support as `code`, so the mixture is at
/// least as independent as the code.
pub fn coset_mixture(rng: &mut impl Rng, code: &LinearCode, max_cosets: usize) -> SampleSpace {
    let n = code.n();
    let words = code.codewords().unwrap();
    let count = rng.gen_range(1..=max_cosets);
    let weights = dirichlet(rng, count, 1.0);
    let mut mass: BTreeMap<u64, f64> = BTreeMap::new();
    for w in weights {
        let shift = rng.gen::<u64>() & ((1u64 << n) - 1);
        let each = w / words.len() as f64;
        for &c in &words {
            *mass.entry(c ^ shift).or_default() += each;
        }
    }
    let (points, probs): (Vec<u64>, Vec<f64>) = mass.into_iter().unzip();
    SampleSpace::new(n, points, probs).unwrap()
}

/// Uniform on a random code, or a random coset mixture of it, certified
/// `order`-wise independent. Dual dimension is drawn from `dual_dims`.
pub fn random_certified(
    rng: &mut impl Rng,
    n: u32,
    order: u32,
    dual_dims: &[usize],
) -> SampleSpace {
    loop {
        let dual_dim = dual_dims[rng.gen_range(0..dual_dims.len())];
        let Some(code) = random_kwise_code(rng, n, dual_dim, order) else {
            continue;
        };
        return if rng.gen_bool(0.5) {
            uniform_code_space(&code).unwrap()
        } else {
            coset_mixture(rng, &code, 4)
        };
    }
}

/// A random sample space on `n` bits with at most `max_support` points and
/// Dirichlet probabilities; typically not independent at all.
pub fn random_space(rng: &mut impl Rng, n: u32, max_support: usize) -> SampleSpace {
    let cap = max_support.min(1usize << n);
    let size = rng.gen_range(1..=cap);
    let mut points: Vec<u64> = Vec::with_capacity(size);
    while points.len() < size {
        let p = rng.gen::<u64>() & ((1u64 << n) - 1);
        if !points.contains(&p) {
            points.push(p);
        }
    }
    let alpha = [0.05, 0.5, 1.0, 5.0][rng.gen_range(0..4)];
    let probs = dirichlet(rng, size, alpha);
    SampleSpace::new(n, points, probs).unwrap()
}

/// Product of independent bits with bias `p` toward 1.
pub fn biased_product(n: u32, p: f64) -> SampleSpace {
    let points: Vec<u64> = (0..1u64 << n).collect();
    let probs = points
        .iter()
        .map(|&x| {
            let ones = x.count_ones() as i32;
            p.powi(ones) * (1.0 - p).powi(n as i32 - ones)
        })
        .collect();
    SampleSpace::new(n, points, probs).unwrap()
}

/// Hamming-7, Hamming-15, uniform-8, and random certified spaces at
/// n in {8, 10, 12} across several independence orders.
pub fn theorem1_corpus(seed: u64) -> Vec<Entry> {
    let mut rng = rng(seed);
    let mut out = vec![
        Entry::new("hamming-7", hamming(3)),
        Entry::new("hamming-15", hamming(4)),
        Entry::new("uniform-8", SampleSpace::uniform_cube(8).unwrap()),
    ];
    for n in [8u32, 10, 12] {
        for order in 1..=n / 2 {
            for i in 0..2 {
                let space = random_certified(&mut rng, n, order, &[1, 2, 3]);
                out.push(Entry::new(
                    format!("random n={n} order>={order} #{i}"),
                    space,
                ));
            }
        }
    }
    out
}
