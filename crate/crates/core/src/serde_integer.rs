//! Arbitrary-precision integers serialized as decimal strings.

use std::str::FromStr;

use rug::Integer;
use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(value: &Integer, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_str(value)
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Integer, D::Error> {
    let s = String::deserialize(deserializer)?;
    Integer::from_str(s.trim()).map_err(serde::de::Error::custom)
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<Integer>, serializer: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => serializer.collect_str(v),
            None => serializer.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Option<Integer>, D::Error> {
        Option::<String>::deserialize(deserializer)?
            .map(|s| Integer::from_str(s.trim()).map_err(serde::de::Error::custom))
            .transpose()
    }
}
