//! Serde adapter for extended reals. JSON has no infinities, so `-inf`,
//! `inf` and `nan` travel as the strings `"-inf"`, `"inf"` and `"nan"`.

use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

struct ExtRealVisitor;

impl Visitor<'_> for ExtRealVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("a number or one of \"-inf\", \"inf\", \"nan\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
        match v {
            "-inf" => Ok(f64::NEG_INFINITY),
            "inf" => Ok(f64::INFINITY),
            "nan" => Ok(f64::NAN),
            other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
        }
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    d.deserialize_any(ExtRealVisitor)
}

/// Same encoding for a single value outside a serde derive.
pub fn to_json(x: f64) -> serde_json::Value {
    serialize(&x, serde_json::value::Serializer).expect("f64 always serializes")
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Wrap(#[serde(with = "super")] f64);

    #[test]
    fn infinities_as_strings() {
        assert_eq!(serde_json::to_string(&Wrap(f64::NEG_INFINITY)).unwrap(), "\"-inf\"");
        assert_eq!(serde_json::from_str::<Wrap>("\"-inf\"").unwrap(), Wrap(f64::NEG_INFINITY));
        assert_eq!(serde_json::from_str::<Wrap>("-0.25").unwrap(), Wrap(-0.25));
        assert!(serde_json::from_str::<Wrap>("\"oops\"").is_err());
    }
}
