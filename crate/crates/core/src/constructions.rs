//! Named sample-space constructions, selected at runtime by name.

use crate::gf2_codes::{
    hamming_code, parity_sampler_space, simplex_code, uniform_code_space, BinaryMatrix, SampleSpace,
};
use crate::{Error, Result};

/// Parameters shared by all constructions; each reads what it needs.
#[derive(Debug, Clone, Default)]
pub struct ConstructParams {
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub matrix: Option<BinaryMatrix>,
}

pub trait Construction: Send + Sync {
    fn name(&self) -> &'static str;

    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }

    fn description(&self) -> &'static str;

    fn build(&self, params: &ConstructParams) -> Result<SampleSpace>;
}

fn require(value: Option<u32>, flag: &str, who: &str) -> Result<u32> {
    value.ok_or_else(|| Error::Domain(format!("{who} needs --{flag}")))
}

/// Uniform on the `[2^m - 1, 2^m - 1 - m]` Hamming code.
pub struct Hamming;

impl Construction for Hamming {
    fn name(&self) -> &'static str {
        "hamming"
    }

    fn description(&self) -> &'static str {
        "uniform on the Hamming code of length 2^m-1 (needs --m)"
    }

    fn build(&self, p: &ConstructParams) -> Result<SampleSpace> {
        uniform_code_space(&hamming_code(require(p.m, "m", "hamming")?)?)
    }
}

/// Uniform on the `[2^m - 1, m]` simplex code.
pub struct Simplex;

impl Construction for Simplex {
    fn name(&self) -> &'static str {
        "simplex"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["hadamard"]
    }

    fn description(&self) -> &'static str {
        "uniform on the simplex code of length 2^m-1 (needs --m)"
    }

    fn build(&self, p: &ConstructParams) -> Result<SampleSpace> {
        uniform_code_space(&simplex_code(require(p.m, "m", "simplex")?)?)
    }
}

pub struct Uniform;

impl Construction for Uniform {
    fn name(&self) -> &'static str {
        "uniform"
    }

    fn description(&self) -> &'static str {
        "uniform on {0,1}^n (needs --n)"
    }

    fn build(&self, p: &ConstructParams) -> Result<SampleSpace> {
        SampleSpace::uniform_cube(require(p.n, "n", "uniform")?)
    }
}

pub struct Point;

impl Construction for Point {
    fn name(&self) -> &'static str {
        "point"
    }

    fn description(&self) -> &'static str {
        "point mass at 0^n (needs --n)"
    }

    fn build(&self, p: &ConstructParams) -> Result<SampleSpace> {
        SampleSpace::point(require(p.n, "n", "point")?, 0)
    }
}

/// The law of `y^T M` for uniform `y`.
pub struct FromMatrix;

impl Construction for FromMatrix {
    fn name(&self) -> &'static str {
        "from-matrix"
    }

    fn description(&self) -> &'static str {
        "law of y^T M for uniform y (needs --input matrix file)"
    }

    fn build(&self, p: &ConstructParams) -> Result<SampleSpace> {
        let m = p
            .matrix
            .as_ref()
            .ok_or_else(|| Error::Domain("from-matrix needs a matrix".into()))?;
        parity_sampler_space(m)
    }
}

pub struct ConstructionRegistry {
    entries: Vec<Box<dyn Construction>>,
}

impl Default for ConstructionRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(Hamming));
        registry.register(Box::new(Simplex));
        registry.register(Box::new(Uniform));
        registry.register(Box::new(Point));
        registry.register(Box::new(FromMatrix));
        registry
    }
}

impl ConstructionRegistry {
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    /// Adds a construction, replacing any existing one of the same name.
    pub fn register(&mut self, c: Box<dyn Construction>) {
        self.entries.retain(|e| e.name() != c.name());
        self.entries.push(c);
    }

    /// Looks up by name or alias.
    pub fn get(&self, name: &str) -> Result<&dyn Construction> {
        self.entries
            .iter()
            .find(|e| e.name() == name || e.aliases().contains(&name))
            .map(|e| e.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "construction",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Construction> {
        self.entries.iter().map(|e| e.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(name: &str, p: ConstructParams) -> Result<SampleSpace> {
        ConstructionRegistry::default().get(name)?.build(&p)
    }

    #[test]
    fn named_examples() {
        let h = build(
            "hamming",
            ConstructParams {
                m: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!((h.n(), h.support_size()), (7, 16));

        let u = build(
            "uniform",
            ConstructParams {
                n: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(u.support_size(), 16);
        assert!(u.probabilities().iter().all(|&p| p == 1.0 / 16.0));

        let p = build(
            "point",
            ConstructParams {
                n: Some(5),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(p.points(), &[0]);
    }

    #[test]
    fn alias_and_matrix() {
        let s = build(
            "hadamard",
            ConstructParams {
                m: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!((s.n(), s.support_size()), (7, 8));

        let matrix = BinaryMatrix::from_bitstrings(&["110", "011", "101"]).unwrap();
        let s = build(
            "from-matrix",
            ConstructParams {
                matrix: Some(matrix),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(s.points(), &[0b000, 0b011, 0b101, 0b110]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            build("bch", ConstructParams::default()),
            Err(Error::UnknownStrategy {
                kind: "construction",
                ..
            })
        ));
        assert!(matches!(
            build("hamming", ConstructParams::default()),
            Err(Error::Domain(_))
        ));
    }
}
