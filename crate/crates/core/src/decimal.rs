//! Two-decimal fixed point values.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A non-negative quantity stored in hundredths (`Centi(409)` is `4.09`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Centi(pub u64);

impl Centi {
    pub const ZERO: Centi = Centi(0);

    /// Rounds an exact ratio to hundredths, halves away from zero.
    pub fn round(value: Ratio<u128>) -> Centi {
        let scaled = value * Ratio::from_integer(100u128);
        let (n, d) = (*scaled.numer(), *scaled.denom());
        Centi(((2 * n + d) / (2 * d)) as u64)
    }

    pub fn hundredths(self) -> u64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }

    /// Nearest hundredth of a float; used when re-reading serialized values.
    pub fn from_f64(v: f64) -> Centi {
        Centi((v * 100.0).round().max(0.0) as u64)
    }
}

impl fmt::Display for Centi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

impl Serialize for Centi {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for Centi {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        if !v.is_finite() || v < 0.0 {
            return Err(serde::de::Error::custom("expected a non-negative number"));
        }
        Ok(Centi::from_f64(v))
    }
}
