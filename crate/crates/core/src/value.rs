//! Scalar values shared by the frontend, the VM and the result document.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An account address. Users are numbered from zero; `Null` is the zero
/// address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Address {
    #[default]
    Null,
    Index(u32),
}

impl Address {
    pub fn user(index: u32) -> Self {
        Address::Index(index)
    }

    /// The user index, if this address belongs to one of `num_users`
    /// simulated users.
    pub fn user_index(self, num_users: u32) -> Option<u32> {
        match self {
            Address::Index(i) if i < num_users => Some(i),
            _ => None,
        }
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Address::Null => f.write_str("null"),
            Address::Index(i) => write!(f, "address({i})"),
        }
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Address::Null => s.serialize_none(),
            Address::Index(i) => s.serialize_u32(*i),
        }
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match Option::<u32>::deserialize(d)? {
            None => Address::Null,
            Some(i) => Address::Index(i),
        })
    }
}

/// Storable scalar types, also the types allowed for parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueType {
    Uint,
    Address,
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueType::Uint => f.write_str("uint"),
            ValueType::Address => f.write_str("address"),
        }
    }
}

/// A concrete value of a value type: call arguments, initializers and
/// recorded state-variable contents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Literal {
    Uint(#[serde(with = "decimal")] u128),
    Address(Address),
}

impl Literal {
    pub fn value_type(&self) -> ValueType {
        match self {
            Literal::Uint(_) => ValueType::Uint,
            Literal::Address(_) => ValueType::Address,
        }
    }

    pub fn default_of(ty: ValueType) -> Self {
        match ty {
            ValueType::Uint => Literal::Uint(0),
            ValueType::Address => Literal::Address(Address::Null),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Uint(v) => write!(f, "{v}"),
            Literal::Address(a) => write!(f, "{a}"),
        }
    }
}

/// Serde adapter writing integers as decimal strings, so that JSON clients
/// limited to 53-bit floats never lose precision.
pub mod decimal {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    /// Accepts a decimal string or, for hand-written input, a JSON integer.
    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let text = match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) if n.is_u64() || n.is_i64() => n.to_string(),
            other => {
                return Err(D::Error::custom(format!(
                    "expected a decimal string, found {other}"
                )))
            }
        };
        text.parse().map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for item in v {
                seq.serialize_element(&item.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, T, D>(d: D) -> Result<Vec<T>, D::Error>
        where
            T: FromStr,
            T::Err: Display,
            D: Deserializer<'de>,
        {
            Vec::<String>::deserialize(d)?
                .into_iter()
                .map(|s| s.parse().map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<T: Display, S: Serializer>(
            v: &Option<T>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.collect_str(v),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, T, D>(d: D) -> Result<Option<T>, D::Error>
        where
            T: FromStr,
            T::Err: Display,
            D: Deserializer<'de>,
        {
            Option::<String>::deserialize(d)?
                .map(|s| s.parse().map_err(D::Error::custom))
                .transpose()
        }
    }
}
