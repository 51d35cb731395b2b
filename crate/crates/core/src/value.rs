//! Exact decimal feature values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Number of fractional decimal digits a [`Value`] can hold.
pub const FRACTION_DIGITS: u32 = 9;
const SCALE: i128 = 1_000_000_000;

/// A decimal stored as a scaled integer (`units / 10^9`).
///
/// Ordering and equality are exact; parsing rejects literals with more
/// fractional digits than [`FRACTION_DIGITS`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Value {
    units: i128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseValueError(pub String);

impl fmt::Display for ParseValueError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid decimal literal `{}`", self.0)
    }
}

impl std::error::Error for ParseValueError {}

impl Value {
    pub const fn from_units(units: i128) -> Self {
        Value { units }
    }

    pub fn from_int(v: i64) -> Self {
        Value {
            units: v as i128 * SCALE,
        }
    }

    pub fn units(self) -> i128 {
        self.units
    }

    /// `min + (max - min) * num / den`, rounded toward negative infinity
    /// at the smallest representable step.
    pub fn interpolate(min: Value, max: Value, num: u64, den: u64) -> Value {
        assert!(den > 0);
        let span = max.units - min.units;
        let off = (span * num as i128).div_euclid(den as i128);
        Value {
            units: min.units + off,
        }
    }
}

impl FromStr for Value {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseValueError(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(err());
        }
        if body.contains('.') && frac_part.is_empty() {
            return Err(err());
        }
        let frac_trimmed = frac_part.trim_end_matches('0');
        if frac_trimmed.len() > FRACTION_DIGITS as usize {
            return Err(err());
        }
        let int_val: i128 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| err())?
        };
        let mut frac_val: i128 = 0;
        for (i, b) in frac_trimmed.bytes().enumerate() {
            frac_val += (b - b'0') as i128 * 10i128.pow(FRACTION_DIGITS - 1 - i as u32);
        }
        let units = int_val
            .checked_mul(SCALE)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(err)?;
        Ok(Value {
            units: if neg { -units } else { units },
        })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = self.units < 0;
        let abs = self.units.unsigned_abs();
        let int = abs / SCALE as u128;
        let frac = abs % SCALE as u128;
        if neg {
            write!(f, "-")?;
        }
        if frac == 0 {
            write!(f, "{int}")
        } else {
            let digits = format!("{:09}", frac);
            write!(f, "{int}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<Value> for String {
    fn from(v: Value) -> String {
        v.to_string()
    }
}

impl TryFrom<String> for Value {
    type Error = ParseValueError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}
