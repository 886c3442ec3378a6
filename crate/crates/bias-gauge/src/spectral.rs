//! Eigenfunction counting for band-limited hypothesis spaces.
//!
//! On an m-sphere the Laplace-Beltrami operator has, for each nonnegative
//! integer k, `C(m+k, m) - C(m+k-2, m)` eigenfunctions of frequency
//! `sqrt(k(k+m-1))`. Keeping frequencies up to a cutoff M gives the
//! telescoped count `E = C(m+K-1, m) + C(m+K, m)` where K is the largest
//! mode below the cutoff. For hypercube domains the analogous count is the
//! volume of the frequency ball.

use crate::numerics::{log_add, log_binomial, LogScalar};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Geometry of the band-limited basis on an m-sphere of radius `r` at
/// spatial resolution `delta`. The frequency cutoff `M = 2*pi*r/delta` is
/// always recomputed, never stored.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpectrumParams {
    pub m: u64,
    pub r: f64,
    pub delta: f64,
}

impl SpectrumParams {
    pub fn new(m: u64, r: f64, delta: f64) -> crate::Result<Self> {
        if m == 0 {
            return Err(crate::Error::InvalidSpec("m must be positive".into()));
        }
        if !(r > 0.0) || !(delta > 0.0) {
            return Err(crate::Error::InvalidSpec(format!(
                "r and delta must be positive, got r={r}, delta={delta}"
            )));
        }
        Ok(SpectrumParams { m, r, delta })
    }

    /// Frequency cutoff `M = 2*pi*r/delta`.
    pub fn max_freq(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.r / self.delta
    }

    /// True when the cutoff admits no non-constant eigenfunction; callers
    /// should surface a warning (or an error where K enters a log).
    pub fn below_first_mode(&self) -> bool {
        max_mode(self.max_freq(), self.m) == 0
    }

    pub fn max_mode(&self) -> u64 {
        max_mode(self.max_freq(), self.m)
    }

    pub fn eigen_count(&self) -> LogScalar {
        eigen_count(self.max_mode(), self.m)
    }
}

/// Largest integer k whose mode frequency `sqrt(k(k+m-1))` is at or below
/// the cutoff (ties included).
pub fn max_mode(max_freq: f64, m: u64) -> u64 {
    assert!(m >= 1, "m must be positive");
    assert!(max_freq >= 0.0, "cutoff must be nonnegative");
    let msq = max_freq * max_freq;
    let mf = (m - 1) as f64;
    // quadratic-formula guess, then integer fixup around it; the comparison
    // runs through sqrt so an exact-boundary cutoff like M = sqrt(m) ties in
    let guess = ((-mf + (mf * mf + 4.0 * msq).sqrt()) / 2.0).floor().max(0.0) as u64;
    let fits = |k: u64| (((k as u128) * ((k + m - 1) as u128)) as f64).sqrt() <= max_freq;
    let mut k = guess.saturating_sub(2);
    while fits(k + 1) {
        k += 1;
    }
    while k > 0 && !fits(k) {
        k -= 1;
    }
    k
}

/// Number of eigenfunctions with frequency at most the cutoff:
/// `E = C(m+K-1, m) + C(m+K, m)`, in log space.
pub fn eigen_count(max_mode: u64, m: u64) -> LogScalar {
    log_add(
        log_binomial(m + max_mode - 1, m),
        log_binomial(m + max_mode, m),
    )
}

/// Joint input/parameter sensitivity constant for a band-limited basis with
/// `d` outputs on a sphere of radius `r`: `L_f = K * sqrt(d) / r`.
pub fn lipschitz_lf(max_mode: u64, d: u64, r: f64) -> f64 {
    assert!(r > 0.0, "r must be positive");
    max_mode as f64 * (d as f64).sqrt() / r
}

/// Mode count on an m-dimensional hypercube domain: integer frequency
/// vectors with norm at most `2*pi/delta`, approximated as the volume of the
/// m-ball of that radius (a continuous count, not a lattice count).
pub fn euclidean_mode_count(m: u64, delta: f64) -> LogScalar {
    assert!(m >= 1, "m must be positive");
    assert!(delta > 0.0, "delta must be positive");
    let mf = m as f64;
    let radius = 2.0 * std::f64::consts::PI / delta;
    // ln E = m ln(2*pi/delta) + ln V_m,  V_m = pi^(m/2) / Gamma(m/2 + 1)
    let ln_vm = 0.5 * mf * std::f64::consts::PI.ln() - ln_gamma(mf / 2.0 + 1.0);
    LogScalar::from_sign_ln(1, mf * radius.ln() + ln_vm)
}
