//! Signed log-space arithmetic and log-combinatorics.
//!
//! Difficulty totals, eigenfunction counts and meta-learning dataset sizes
//! span hundreds of decades, so every internal quantity is carried as a
//! [`LogScalar`]: a sign together with the natural log of the magnitude.
//! All information quantities are natural-log (nats) internally; bits appear
//! only at reporting boundaries via [`to_bits`].

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// A signed real stored as `sign * exp(ln_mag)`.
///
/// `sign == 0` represents exactly zero, with `ln_mag` canonically `-inf`.
/// `ln_mag` is finite whenever `sign != 0`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LogScalar {
    sign: i8,
    #[serde(
        default = "neg_infinity",
        skip_serializing_if = "is_infinite_ref",
        with = "finite_f64"
    )]
    ln_mag: f64,
}

fn neg_infinity() -> f64 {
    f64::NEG_INFINITY
}

fn is_infinite_ref(v: &f64) -> bool {
    v.is_infinite()
}

/// Plain f64 (de)serialization; split out so the zero case can skip the field.
mod finite_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(*v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d)
    }
}

impl PartialEq for LogScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.sign == 0 && other.sign == 0 {
            return true;
        }
        self.sign == other.sign && self.ln_mag == other.ln_mag
    }
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar {
        sign: 0,
        ln_mag: f64::NEG_INFINITY,
    };

    pub const ONE: LogScalar = LogScalar {
        sign: 1,
        ln_mag: 0.0,
    };

    /// Builds from a sign and the natural log of the magnitude.
    pub fn from_sign_ln(sign: i8, ln_mag: f64) -> Self {
        assert!(
            (-1..=1).contains(&sign),
            "sign must be one of -1, 0, +1, got {sign}"
        );
        if sign == 0 || ln_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        assert!(ln_mag.is_finite(), "ln_mag must be finite, got {ln_mag}");
        LogScalar { sign, ln_mag }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(!x.is_nan(), "LogScalar cannot represent NaN");
        if x == 0.0 {
            Self::ZERO
        } else {
            LogScalar {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_mag: x.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn ln_mag(&self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.ln_mag
        }
    }

    /// Base-10 log of the magnitude; `-inf` for zero.
    pub fn log10_mag(&self) -> f64 {
        self.ln_mag() / std::f64::consts::LN_10
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    /// Converts back to f64. Overflows to `+-inf` past about 1e308.
    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * self.ln_mag().exp()
    }

    pub fn neg(&self) -> Self {
        LogScalar {
            sign: -self.sign,
            ln_mag: self.ln_mag,
        }
    }

    /// `a + b` via shifted exponent summation; no intermediate exponentiation
    /// of large magnitudes. Exact cancellation yields sign 0.
    pub fn add(&self, other: &Self) -> Self {
        if self.sign == 0 {
            return *other;
        }
        if other.sign == 0 {
            return *self;
        }
        let (hi, lo) = if self.ln_mag >= other.ln_mag {
            (self, other)
        } else {
            (other, self)
        };
        let shift = lo.ln_mag - hi.ln_mag; // <= 0
        if self.sign == other.sign {
            return LogScalar {
                sign: hi.sign,
                ln_mag: hi.ln_mag + shift.exp().ln_1p(),
            };
        }
        if self.ln_mag == other.ln_mag {
            return Self::ZERO;
        }
        // ln(|hi| - |lo|) = ln|hi| + ln(1 - exp(shift))
        let diff = (-shift.exp()).ln_1p();
        LogScalar {
            sign: hi.sign,
            ln_mag: hi.ln_mag + diff,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return Self::ZERO;
        }
        LogScalar {
            sign: self.sign * other.sign,
            ln_mag: self.ln_mag + other.ln_mag,
        }
    }

    pub fn mul_f64(&self, x: f64) -> Self {
        self.mul(&Self::from_f64(x))
    }

    /// Reinterprets a value in nats as bits (divides by ln 2).
    pub fn to_bits(&self) -> Self {
        if self.sign == 0 {
            return Self::ZERO;
        }
        LogScalar {
            sign: self.sign,
            ln_mag: self.ln_mag - std::f64::consts::LN_2.ln(),
        }
    }

    /// Scientific-notation rendering of the magnitude with 4 significant
    /// digits, e.g. `1.090e16`. Negative values carry a leading minus.
    pub fn to_scientific(&self) -> String {
        if self.sign == 0 {
            return "0".to_string();
        }
        let log10 = self.log10_mag();
        let mut exp = log10.floor();
        let mut mantissa = 10f64.powf(log10 - exp);
        // rounding 9.9996 -> 10.00 bumps the exponent
        if mantissa >= 9.9995 {
            mantissa /= 10.0;
            exp += 1.0;
        }
        let sign = if self.sign < 0 { "-" } else { "" };
        format!("{sign}{mantissa:.3}e{exp}")
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering;
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            ord => return Some(ord),
        }
        match self.sign {
            0 => Some(Ordering::Equal),
            1 => self.ln_mag.partial_cmp(&other.ln_mag),
            _ => other.ln_mag.partial_cmp(&self.ln_mag),
        }
    }
}

impl std::fmt::Display for LogScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_scientific())
    }
}

/// Sum of two log-space values; see [`LogScalar::add`].
pub fn log_add(a: LogScalar, b: LogScalar) -> LogScalar {
    a.add(&b)
}

/// `ln C(n, k)` as a log-space value of the binomial itself.
///
/// Returns the zero scalar when `k > n`: C(n, k) = 0 under the standard
/// convention, which keeps telescoped eigenfunction sums valid at the
/// boundary indices.
pub fn log_binomial(n: u64, k: u64) -> LogScalar {
    if k > n {
        return LogScalar::ZERO;
    }
    if k == 0 || k == n {
        return LogScalar::ONE;
    }
    let ln_c = ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
    LogScalar::from_sign_ln(1, ln_c)
}

/// Converts an information quantity from nats to bits.
pub fn to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}
