use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Nonnegative rational delay. Serialized as `"num/den"` (or `"num"`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Delay(pub Rational64);

impl Delay {
    pub const ZERO: Delay = Delay(Rational64::new_raw(0, 1));

    pub fn new(num: i64, den: i64) -> Self {
        Delay(Rational64::new(num, den))
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn is_zero(self) -> bool {
        *self.0.numer() == 0
    }

    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    /// Exact difference (panics on negative result in debug builds only
    /// through the caller's own invariants).
    pub fn sub(self, other: Delay) -> Delay {
        Delay(self.0 - other.0)
    }

    pub fn add(self, other: Delay) -> Delay {
        Delay(self.0 + other.0)
    }

    /// Integer multiple `self·n` when n is the common denominator.
    pub fn scaled_integer(self, n: i64) -> i64 {
        let r = self.0 * Rational64::from_integer(n);
        debug_assert!(r.is_integer());
        r.to_integer()
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<I: IntoIterator<Item = Delay>>(delays: I) -> i64 {
    delays.into_iter().fold(1, |acc, d| acc.lcm(&d.denom()))
}

impl fmt::Display for Delay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Delay {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Invalid(format!("delay '{s}' is not a rational 'num/den'"));
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        let r = Rational64::new(n, d);
        if r < Rational64::from_integer(0) {
            return Err(Error::Invalid(format!("delay '{s}' is negative")));
        }
        Ok(Delay(r))
    }
}

impl Serialize for Delay {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Delay {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let d: Delay = "2/5".parse().unwrap();
        assert_eq!(d, Delay::new(2, 5));
        assert_eq!(d.to_string(), "2/5");
        assert_eq!("4/10".parse::<Delay>().unwrap().to_string(), "2/5");
        assert_eq!("0".parse::<Delay>().unwrap(), Delay::ZERO);
        assert!("1/0".parse::<Delay>().is_err());
        assert!("-1/2".parse::<Delay>().is_err());
        assert!("0.4".parse::<Delay>().is_err());
    }

    #[test]
    fn lcm_of_denominators() {
        let n = common_denominator([Delay::new(2, 5), Delay::new(1, 5), Delay::new(1, 2)]);
        assert_eq!(n, 10);
        assert_eq!(Delay::new(2, 5).scaled_integer(n), 4);
    }
}
