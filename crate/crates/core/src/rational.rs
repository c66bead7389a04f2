//! Exact rationals used in formula evaluation.
//!
//! Machine formats carry them as `[numerator, denominator]` integer pairs.

use num_rational::Ratio;

pub type Rational = Ratio<u128>;

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn from_int(n: u64) -> Rational {
    Rational::from_integer(n as u128)
}

/// Serde adapter writing a `Rational` as `[num, den]`.
pub mod pair {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        [*r.numer(), *r.denom()].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let [num, den] = <[u128; 2]>::deserialize(d)?;
        if den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(num, den))
    }
}

/// Same as [`pair`] for optional values.
pub mod opt_pair {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        r.map(|r| [*r.numer(), *r.denom()]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        match Option::<[u128; 2]>::deserialize(d)? {
            Some([_, 0]) => Err(serde::de::Error::custom("zero denominator")),
            Some([num, den]) => Ok(Some(Rational::new(num, den))),
            None => Ok(None),
        }
    }
}
