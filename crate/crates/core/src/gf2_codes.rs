//! Bit-packed GF(2) linear algebra, binary linear codes and the sample
//! spaces they induce.
//!
//! Rows and points are packed into one `u64` each. Column `j` (0-based, left
//! to right) of a matrix with `cols` columns is bit `cols - 1 - j`, so a row
//! printed most-significant-bit first reads left to right, and a row mask is
//! directly a point of the cube in the [`crate::cube_fourier`] convention.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::{Error, Result};

/// Enumeration limit shared by the brute-force checks in this module.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Largest code dimension / sampler row count that may be enumerated.
pub const MAX_ENUM_DIM: usize = 26;

/// Tolerance on the probability total accepted when reading a sample space.
pub const LOAD_SUM_TOL: f64 = 1e-9;

/// Tolerance on the probability total for sample spaces built in memory.
pub const SUM_TOL: f64 = 1e-12;

fn width_mask(cols: u32) -> u64 {
    if cols == 64 {
        u64::MAX
    } else {
        (1u64 << cols) - 1
    }
}

fn pivot(row: u64) -> u32 {
    63 - row.leading_zeros()
}

/// Formats the low `width` bits of `word`, most significant first.
pub fn to_bitstring(word: u64, width: u32) -> String {
    (0..width)
        .rev()
        .map(|b| if word >> b & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a `0`/`1` string, first character most significant.
pub fn parse_bitstring(s: &str) -> Option<u64> {
    if s.is_empty() || s.len() > 64 {
        return None;
    }
    s.bytes().try_fold(0u64, |acc, b| match b {
        b'0' => Some(acc << 1),
        b'1' => Some(acc << 1 | 1),
        _ => None,
    })
}

/// A dense binary matrix with at most 64 columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinaryMatrix {
    cols: u32,
    rows: Vec<u64>,
}

impl BinaryMatrix {
    pub fn new(cols: u32, rows: Vec<u64>) -> Result<Self> {
        if cols == 0 || cols > 64 {
            return Err(Error::Domain(format!("column count {cols} outside 1..=64")));
        }
        let mask = width_mask(cols);
        if let Some(i) = rows.iter().position(|r| r & !mask != 0) {
            return Err(Error::Domain(format!(
                "row {i} has bits beyond column {cols}"
            )));
        }
        Ok(Self { cols, rows })
    }

    pub fn identity(n: u32) -> Result<Self> {
        Self::new(n, (0..n).map(|i| 1u64 << (n - 1 - i)).collect())
    }

    pub fn from_bitstrings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let cols = rows
            .first()
            .map(|r| r.as_ref().len())
            .ok_or_else(|| Error::Domain("no rows".into()))?;
        let parsed = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let r = r.as_ref();
                if r.len() != cols {
                    return Err(Error::Domain(format!("row {i} has length {}", r.len())));
                }
                parse_bitstring(r).ok_or_else(|| Error::Domain(format!("row {i} is not binary")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(cols as u32, parsed)
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Column `j` as a mask over rows (bit `i` set iff entry `(i, j)` is 1).
    pub fn column(&self, j: u32) -> u64 {
        assert!(self.rows.len() <= 64, "column masks need at most 64 rows");
        let bit = self.cols - 1 - j;
        self.rows
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, r)| acc | ((r >> bit & 1) << i))
    }

    /// Reduced row-echelon basis of the row space, sorted by pivot
    /// (leftmost column first).
    pub fn rref_basis(&self) -> Vec<u64> {
        let mut basis: Vec<u64> = Vec::new();
        for &row in &self.rows {
            let mut v = row;
            for b in &basis {
                if v >> pivot(*b) & 1 == 1 {
                    v ^= b;
                }
            }
            if v == 0 {
                continue;
            }
            let p = pivot(v);
            for b in basis.iter_mut() {
                if *b >> p & 1 == 1 {
                    *b ^= v;
                }
            }
            basis.push(v);
        }
        basis.sort_unstable_by(|a, b| b.cmp(a));
        basis
    }

    pub fn rank(&self) -> usize {
        self.rref_basis().len()
    }

    /// Basis of `{v : <row, v> = 0 for every row}`.
    pub fn nullspace(&self) -> BinaryMatrix {
        let basis = self.rref_basis();
        let pivots = basis.iter().fold(0u64, |acc, b| acc | 1u64 << pivot(*b));
        let free = width_mask(self.cols) & !pivots;
        let mut rows = Vec::new();
        for bit in (0..self.cols).rev() {
            if free >> bit & 1 == 0 {
                continue;
            }
            let mut v = 1u64 << bit;
            for b in &basis {
                if b >> bit & 1 == 1 {
                    v |= 1u64 << pivot(*b);
                }
            }
            rows.push(v);
        }
        BinaryMatrix {
            cols: self.cols,
            rows,
        }
    }

    /// Writes the text form: `rows cols`, then one bitstring per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows.len(), self.cols);
        for r in &self.rows {
            out.push_str(&to_bitstring(*r, self.cols));
            out.push('\n');
        }
        out
    }
}

impl FromStr for BinaryMatrix {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing 'rows cols' header".into(),
        })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: hline,
                msg: format!("bad header: {e}"),
            })?;
        let [nrows, cols] = dims[..] else {
            return Err(Error::Parse {
                line: hline,
                msg: "header must be 'rows cols'".into(),
            });
        };
        if cols == 0 || cols > 64 {
            return Err(Error::Parse {
                line: hline,
                msg: format!("column count {cols} outside 1..=64"),
            });
        }
        let mut rows = Vec::with_capacity(nrows);
        for (line, l) in lines {
            if l.len() != cols {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {cols} bits, found {}", l.len()),
                });
            }
            let r = parse_bitstring(l).ok_or_else(|| Error::Parse {
                line,
                msg: "row is not a bitstring".into(),
            })?;
            rows.push(r);
        }
        if rows.len() != nrows {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("header declares {nrows} rows, found {}", rows.len()),
            });
        }
        BinaryMatrix::new(cols as u32, rows)
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A binary linear code, stored by a reduced generator matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearCode {
    generator: BinaryMatrix,
}

impl LinearCode {
    /// The code spanned by the rows of `m` (dependent rows are dropped).
    pub fn from_generator(m: &BinaryMatrix) -> Self {
        Self {
            generator: BinaryMatrix {
                cols: m.cols,
                rows: m.rref_basis(),
            },
        }
    }

    /// The code `{v : M v = 0}` for a parity-check matrix `M`.
    pub fn from_parity_check(m: &BinaryMatrix) -> Self {
        Self::from_generator(&m.nullspace())
    }

    pub fn full_space(n: u32) -> Result<Self> {
        Ok(Self::from_generator(&BinaryMatrix::identity(n)?))
    }

    pub fn zero_code(n: u32) -> Result<Self> {
        Ok(Self {
            generator: BinaryMatrix::new(n, Vec::new())?,
        })
    }

    pub fn repetition(n: u32) -> Result<Self> {
        Ok(Self::from_generator(&BinaryMatrix::new(
            n,
            vec![width_mask(n)],
        )?))
    }

    pub fn n(&self) -> u32 {
        self.generator.cols
    }

    pub fn dimension(&self) -> usize {
        self.generator.rows.len()
    }

    pub fn generator(&self) -> &BinaryMatrix {
        &self.generator
    }

    /// A generator of the dual code, i.e. a parity-check matrix of `self`.
    pub fn parity_check(&self) -> BinaryMatrix {
        self.generator.nullspace()
    }

    pub fn dual(&self) -> LinearCode {
        LinearCode::from_generator(&self.parity_check())
    }

    pub fn contains(&self, word: u64) -> bool {
        let mut v = word;
        for b in &self.generator.rows {
            if v >> pivot(*b) & 1 == 1 {
                v ^= b;
            }
        }
        v == 0
    }

    /// All `2^dim` codewords in Gray-code order, starting at `0`.
    pub fn codewords(&self) -> Result<Vec<u64>> {
        let dim = self.dimension();
        if dim > MAX_ENUM_DIM {
            return Err(Error::ResourceGuard {
                what: "codeword enumeration",
                count: 1u128 << dim,
                limit: 1u128 << MAX_ENUM_DIM,
            });
        }
        Ok(gray_span(&self.generator.rows))
    }

    /// Minimum weight of a nonzero codeword; `n + 1` for the zero code.
    pub fn min_distance(&self) -> Result<u32> {
        let dim = self.dimension();
        let count = 1u128 << dim.min(127);
        if count > ENUMERATION_LIMIT {
            return Err(Error::ResourceGuard {
                what: "minimum distance enumeration",
                count,
                limit: ENUMERATION_LIMIT,
            });
        }
        Ok(gray_span(&self.generator.rows)
            .into_iter()
            .skip(1)
            .map(u64::count_ones)
            .min()
            .unwrap_or(self.n() + 1))
    }

    /// Minimum distance of the dual code.
    pub fn dual_distance(&self) -> Result<u32> {
        self.dual().min_distance()
    }

    /// Number of codewords of each weight `0..=n`.
    pub fn weight_distribution(&self) -> Result<Vec<u64>> {
        let mut counts = vec![0u64; self.n() as usize + 1];
        for w in self.codewords()? {
            counts[w.count_ones() as usize] += 1;
        }
        Ok(counts)
    }
}

/// Every GF(2) combination of `rows`, visited in Gray-code order.
fn gray_span(rows: &[u64]) -> Vec<u64> {
    let total = 1usize << rows.len();
    let mut out = Vec::with_capacity(total);
    let mut word = 0u64;
    out.push(word);
    for i in 1..total {
        word ^= rows[i.trailing_zeros() as usize];
        out.push(word);
    }
    out
}

/// Parity-check matrix of the Hamming code of length `2^m - 1`: column `j`
/// (1-based) is the `m`-bit binary encoding of `j`.
pub fn hamming_parity_check(m: u32) -> Result<BinaryMatrix> {
    if !(2..=6).contains(&m) {
        return Err(Error::Domain(format!(
            "Hamming parameter m={m} outside 2..=6"
        )));
    }
    let n = (1u32 << m) - 1;
    let rows = (0..m)
        .map(|t| {
            let bit = m - 1 - t;
            (1..=n).fold(0u64, |acc, j| acc << 1 | (j as u64 >> bit & 1))
        })
        .collect();
    BinaryMatrix::new(n, rows)
}

/// The `[2^m - 1, 2^m - 1 - m, 3]` Hamming code.
pub fn hamming_code(m: u32) -> Result<LinearCode> {
    Ok(LinearCode::from_parity_check(&hamming_parity_check(m)?))
}

/// The `[2^m - 1, m, 2^(m-1)]` simplex code, dual of [`hamming_code`].
pub fn simplex_code(m: u32) -> Result<LinearCode> {
    Ok(LinearCode::from_generator(&hamming_parity_check(m)?))
}

/// Alias of [`simplex_code`]; the simplex code is the punctured Hadamard code.
pub fn hadamard_code(m: u32) -> Result<LinearCode> {
    simplex_code(m)
}

/// True iff every set of at most `t` columns of `m` is linearly independent.
///
/// Brute force over all nonempty column subsets of size `<= t`, guarded by
/// [`ENUMERATION_LIMIT`].
pub fn check_column_independence(m: &BinaryMatrix, t: u32) -> Result<bool> {
    if t > m.cols {
        return Err(Error::Domain(format!(
            "t={t} exceeds column count {}",
            m.cols
        )));
    }
    if m.nrows() > 64 {
        return Err(Error::Domain("column masks need at most 64 rows".into()));
    }
    let count: u128 = (1..=t).map(|s| binomial_u128(m.cols, s)).sum();
    if count > ENUMERATION_LIMIT {
        return Err(Error::ResourceGuard {
            what: "column subset enumeration",
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let columns: Vec<u64> = (0..m.cols).map(|j| m.column(j)).collect();
    Ok(!has_dependent_subset(&columns, 0, t, 0, false))
}

fn has_dependent_subset(
    columns: &[u64],
    start: usize,
    left: u32,
    acc: u64,
    nonempty: bool,
) -> bool {
    if nonempty && acc == 0 {
        return true;
    }
    if left == 0 {
        return false;
    }
    (start..columns.len())
        .any(|j| has_dependent_subset(columns, j + 1, left - 1, acc ^ columns[j], true))
}

pub(crate) fn binomial_u128(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// A finite distribution on `{0,1}^n`, listed by support point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSpace {
    n: u32,
    points: Vec<u64>,
    probabilities: Vec<f64>,
}

impl SampleSpace {
    pub fn new(n: u32, points: Vec<u64>, probabilities: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(n, points, probabilities, SUM_TOL)
    }

    fn with_tolerance(n: u32, points: Vec<u64>, probabilities: Vec<f64>, tol: f64) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::Domain(format!("dimension n={n} outside 1..=64")));
        }
        if points.len() != probabilities.len() {
            return Err(Error::Validation(format!(
                "{} points but {} probabilities",
                points.len(),
                probabilities.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::Validation("empty sample space".into()));
        }
        let mask = width_mask(n);
        if let Some(p) = points.iter().find(|&&p| p & !mask != 0) {
            return Err(Error::Validation(format!(
                "point {p:#x} outside {{0,1}}^{n}"
            )));
        }
        let mut sorted = points.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!(
                "duplicate point {}",
                to_bitstring(w[0], n)
            )));
        }
        if let Some(p) = probabilities.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::Validation(format!("invalid probability {p}")));
        }
        let total: f64 = crate::cube_fourier::fsum(probabilities.iter().copied());
        if (total - 1.0).abs() > tol {
            return Err(Error::Validation(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let probabilities = if total == 1.0 {
            probabilities
        } else {
            probabilities.into_iter().map(|p| p / total).collect()
        };
        Ok(Self {
            n,
            points,
            probabilities,
        })
    }

    /// Equal weight on each of `points`.
    pub fn uniform_on(n: u32, points: Vec<u64>) -> Result<Self> {
        let p = 1.0 / points.len().max(1) as f64;
        let probabilities = vec![p; points.len()];
        Self::new(n, points, probabilities)
    }

    pub fn uniform_cube(n: u32) -> Result<Self> {
        if n > MAX_ENUM_DIM as u32 {
            return Err(Error::ResourceGuard {
                what: "cube enumeration",
                count: 1u128 << n,
                limit: 1u128 << MAX_ENUM_DIM,
            });
        }
        Self::uniform_on(n, (0..1u64 << n).collect())
    }

    pub fn point(n: u32, x: u64) -> Result<Self> {
        Self::new(n, vec![x], vec![1.0])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.points
            .iter()
            .copied()
            .zip(self.probabilities.iter().copied())
    }

    /// Points with nonzero probability.
    pub fn support_size(&self) -> usize {
        self.probabilities.iter().filter(|&&p| p > 0.0).count()
    }

    /// The text form: `n=<n>`, then `<bitstring> <probability>` per point.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for (x, p) in self.iter() {
            out.push_str(&to_bitstring(x, self.n));
            out.push(' ');
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for SampleSpace {
    type Err = Error;

    /// Parses the text form; the total must be within [`LOAD_SUM_TOL`] of 1
    /// and is renormalized exactly.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing 'n=<int>' header".into(),
        })?;
        let n: u32 = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .filter(|&n| (1..=64).contains(&n))
            .ok_or_else(|| Error::Parse {
                line: hline,
                msg: format!("bad header '{header}', expected n=<1..64>"),
            })?;
        let mut points = Vec::new();
        let mut probabilities = Vec::new();
        for (line, l) in lines {
            let mut parts = l.split_whitespace();
            let (Some(bits), Some(prob), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse {
                    line,
                    msg: "expected '<bitstring> <probability>'".into(),
                });
            };
            if bits.len() != n as usize {
                return Err(Error::Parse {
                    line,
                    msg: format!("bitstring has length {}, expected {n}", bits.len()),
                });
            }
            let x = parse_bitstring(bits).ok_or_else(|| Error::Parse {
                line,
                msg: format!("'{bits}' is not a bitstring"),
            })?;
            let p: f64 = prob.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("'{prob}' is not a number"),
            })?;
            points.push(x);
            probabilities.push(p);
        }
        Self::with_tolerance(n, points, probabilities, LOAD_SUM_TOL)
    }
}

impl fmt::Display for SampleSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The uniform distribution on the codewords of `c`, sorted by point.
pub fn uniform_code_space(c: &LinearCode) -> Result<SampleSpace> {
    let mut words = c.codewords()?;
    words.sort_unstable();
    SampleSpace::uniform_on(c.n(), words)
}

/// The distribution of `y^T M` for uniform `y` in `F_2^rows`.
///
/// Enumerates all `2^rows` inputs, so dependent rows merge probability.
pub fn parity_sampler_space(m: &BinaryMatrix) -> Result<SampleSpace> {
    if m.nrows() > MAX_ENUM_DIM {
        return Err(Error::ResourceGuard {
            what: "sampler enumeration",
            count: 1u128 << m.nrows(),
            limit: 1u128 << MAX_ENUM_DIM,
        });
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for word in gray_span(m.rows()) {
        *counts.entry(word).or_default() += 1;
    }
    let total = (1u64 << m.nrows()) as f64;
    let (points, probabilities) = counts
        .into_iter()
        .map(|(x, c)| (x, c as f64 / total))
        .unzip();
    SampleSpace::new(m.cols(), points, probabilities)
}
