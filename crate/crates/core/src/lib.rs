//! Entropy of k-wise independent distributions on the Boolean cube.
//!
//! The crate builds k-wise independent sample spaces from binary linear
//! codes, measures their Shannon and collision entropies, and evaluates the
//! Fourier-analytic entropy lower bounds for them. The bounds are certified
//! numerically: every inequality of the underlying argument is recomputed on
//! the concrete input, including the top eigenvalue of the Hamming graph
//! restricted to a Hamming ball, which is computed exactly rather than
//! estimated asymptotically.
//!
//! Module map:
//!
//! - [`cube_fourier`]: Walsh–Hadamard transform, convolution, inner products
//!   and the hypercube adjacency operator.
//! - [`gf2_codes`]: bit-packed GF(2) matrices, linear codes and sample spaces.
//! - [`kwise`]: distributions and the spectral / marginal independence tests.
//! - [`entropy_bounds`]: entropy functionals and all lower-bound evaluators.
//! - [`ball_spectra`]: Hamming-ball eigenvalues behind a solver registry.
//! - [`smoothing`]: the `Z = X xor Y` pipeline and the inequality-chain checkers.
//! - [`constructions`]: named sample-space constructions behind a registry.

pub mod ball_spectra;
pub mod constructions;
pub mod cube_fourier;
pub mod entropy_bounds;
mod error;
pub mod gf2_codes;
pub mod kwise;
pub mod smoothing;

pub use error::{Error, Result};

/// Environment variable overriding the default cube dimension cap.
pub const MAX_DIM_ENV: &str = "KWISE_MAX_DIM";

/// Default cap on `n` for dense functions over `{0,1}^n` (2^26 reals = 512 MiB).
pub const DEFAULT_MAX_DIM: u32 = 26;

/// Largest cube dimension for which dense functions may be allocated.
///
/// Reads [`MAX_DIM_ENV`] when set to a valid integer in `1..=30`, otherwise
/// falls back to [`DEFAULT_MAX_DIM`].
pub fn max_dim() -> u32 {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&v| (1..=30).contains(&v))
        .unwrap_or(DEFAULT_MAX_DIM)
}

pub(crate) fn check_dim(n: u32) -> Result<()> {
    let max = max_dim();
    if n == 0 || n > max {
        return Err(Error::DimensionOutOfRange { n, max });
    }
    Ok(())
}
