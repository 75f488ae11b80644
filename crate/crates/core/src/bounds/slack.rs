use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlackScale {
    /// `sqrt(2N log(1/delta) / (N - 1/2)^2)`
    One,
    /// `2 sqrt(2N log(2/delta) / (N - 1/2)^2)`, for the bound that spends
    /// `delta/2` on each of two concentration events.
    Two,
}

/// Concentration penalty of the bounded-difference inequality for sampling
/// without replacement with `m = u = N/2`.
pub fn slack_term(population: usize, delta: f64, scale: SlackScale) -> Result<f64> {
    if population < 2 || population % 2 != 0 {
        return Err(Error::InvalidSize(format!(
            "slack term needs an even population of at least 2, got {population}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta = {delta} lies outside (0, 1)")));
    }
    let n = population as f64;
    let base = |log_term: f64| (2.0 * n * log_term / ((n - 0.5) * (n - 0.5))).sqrt();
    Ok(match scale {
        SlackScale::One => base((1.0 / delta).ln()),
        SlackScale::Two => 2.0 * base((2.0 / delta).ln()),
    })
}

/// Additive constant `11 sqrt(2/N)` of the transductive-Rademacher risk bound.
pub fn trc_bound_constant(population: usize) -> f64 {
    11.0 * (2.0 / population as f64).sqrt()
}
