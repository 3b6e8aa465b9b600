//! Exact rates. Always printed as a reduced `num/den`, never as a float.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rate(Ratio<u64>);

impl Rate {
    /// Panics if `den == 0`.
    pub fn new(num: u64, den: u64) -> Self {
        Rate(Ratio::new(num, den))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    /// `L / (2N)` for a scheme with secret length `L` and signal length `N`.
    pub fn of_scheme(secret_len: usize, signal_len: usize) -> Self {
        Rate::new(secret_len as u64, 2 * signal_len as u64)
    }

    /// `(rho - 1) / (2 rho)`.
    pub fn converse(rho: u64) -> Self {
        Rate::new(rho - 1, 2 * rho)
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let n: u64 = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: u64 = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Rate::new(n, d))
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
