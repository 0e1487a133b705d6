//! Serde adapters that write rationals as `"n"` or `"n/d"` strings and accept
//! strings or JSON integers on input.

use crate::scalar::{format_scalar, int, parse_scalar, Scalar};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;

/// Newtype used to route a single scalar through serde.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q(pub Scalar);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(&self.0))
    }
}

struct QVisitor;

impl<'de> Visitor<'de> for QVisitor {
    type Value = Q;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational number as a string like \"-2/3\", or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
        parse_scalar(v).map(Q).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
        Ok(Q(int(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
        i64::try_from(v).map(|v| Q(int(v))).map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Q, E> {
        // JSON decimals are re-read from their shortest text form
        parse_scalar(&v.to_string()).map(Q).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        d.deserialize_any(QVisitor)
    }
}

pub mod one {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        Q(v.clone()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        Q::deserialize(d).map(|q| q.0)
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| Q(x.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
        Vec::<Q>::deserialize(d).map(|v| v.into_iter().map(|q| q.0).collect())
    }
}

pub mod mat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<Scalar>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|row| row.iter().map(|x| Q(x.clone())).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Scalar>>, D::Error> {
        Vec::<Vec<Q>>::deserialize(d)
            .map(|m| m.into_iter().map(|r| r.into_iter().map(|q| q.0).collect()).collect())
    }
}

pub mod opt_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Scalar>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Scalar>>, D::Error> {
        Option::<Vec<Q>>::deserialize(d).map(|o| o.map(|v| v.into_iter().map(|q| q.0).collect()))
    }
}
