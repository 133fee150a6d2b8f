//! Coordinate scalar abstraction.
//!
//! All solver mathematics reduces to comparisons between example
//! coordinates and thresholds drawn from those same coordinates, so the
//! core is generic over the scalar. The only arithmetic-like requirement
//! is producing small consecutive integers for merged dimensions, which
//! [`num_traits::FromPrimitive`] covers.

use std::fmt;

use num_traits::FromPrimitive;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Value:
    Copy
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + FromPrimitive
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Parses a decimal cell. `None` marks the cell as non-numeric, which
    /// turns the whole CSV column categorical.
    fn from_decimal(text: &str) -> Option<Self>;

    fn from_count(k: usize) -> Self {
        Self::from_usize(k).expect("count representable in scalar type")
    }
}

impl Value for f64 {
    fn from_decimal(text: &str) -> Option<Self> {
        text.trim().parse::<f64>().ok().filter(|v| v.is_finite())
    }
}

impl Value for f32 {
    fn from_decimal(text: &str) -> Option<Self> {
        text.trim().parse::<f32>().ok().filter(|v| v.is_finite())
    }
}

impl Value for i64 {
    fn from_decimal(text: &str) -> Option<Self> {
        text.trim().parse::<i64>().ok()
    }
}

impl Value for i32 {
    fn from_decimal(text: &str) -> Option<Self> {
        text.trim().parse::<i32>().ok()
    }
}

/// Total-order comparison for scalars that are known to be non-NaN.
///
/// Parsed coordinates are always finite (non-finite cells are treated as
/// categorical), so `partial_cmp` cannot fail on dataset contents.
pub fn cmp_values<V: Value>(a: &V, b: &V) -> std::cmp::Ordering {
    a.partial_cmp(b).expect("coordinates are totally ordered")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_rejects_non_finite() {
        assert_eq!(f64::from_decimal("2.5"), Some(2.5));
        assert_eq!(f64::from_decimal(" -3 "), Some(-3.0));
        assert_eq!(f64::from_decimal("inf"), None);
        assert_eq!(f64::from_decimal("nan"), None);
        assert_eq!(f64::from_decimal("abc"), None);
    }

    #[test]
    fn integer_parsing() {
        assert_eq!(i64::from_decimal("12"), Some(12));
        assert_eq!(i64::from_decimal("1.5"), None);
    }
}
