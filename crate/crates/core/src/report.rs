//! Serialization helpers shared by the report types: arbitrary-precision
//! values are always rendered as decimal strings, exact rationals as
//! "numerator/denominator".

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::ser::SerializeSeq;
use serde::Serializer;

pub fn big_as_string<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn bigs_as_strings<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for item in v {
        seq.serialize_element(&item.to_string())?;
    }
    seq.end()
}

/// "numerator/denominator", denominator always present.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// An observed count out of a total, kept exact.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Fraction {
    pub count: u64,
    pub total: u64,
    pub fraction: String,
}

impl Fraction {
    pub fn new(count: u64, total: u64) -> Self {
        Fraction {
            count,
            total,
            fraction: format!("{count}/{total}"),
        }
    }

    pub fn as_f64(&self) -> f64 {
        self.count as f64 / self.total as f64
    }
}
