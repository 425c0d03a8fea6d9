//! Nonnegative extended-real processing times.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

/// A processing time (or valuation) in `[0, +inf]`.
///
/// Addition saturates at `+inf`, comparisons are total and `inf` sits above every
/// finite value. NaN and negative values are rejected at construction.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Cost(f64);

impl Cost {
    pub const ZERO: Cost = Cost(0.0);
    pub const INFINITY: Cost = Cost(f64::INFINITY);

    pub fn new(value: f64) -> Result<Cost> {
        if value.is_nan() {
            return Err(invalid("cost is NaN"));
        }
        if value < 0.0 {
            return Err(invalid(format!("cost {value} is negative")));
        }
        // normalizes -0.0
        Ok(Cost(value + 0.0))
    }

    /// Builds a cost from a value already known to be valid; panics otherwise.
    pub fn of(value: f64) -> Cost {
        Cost::new(value).expect("invalid cost literal")
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `self^p` for `p > 0`; `inf^p = inf`.
    pub fn powf(self, p: f64) -> Cost {
        Cost(self.0.powf(p))
    }

    /// Multiplies by a nonnegative weight, with `0 * inf = 0`.
    pub fn scale(self, weight: f64) -> Cost {
        if weight == 0.0 {
            Cost::ZERO
        } else {
            Cost(self.0 * weight)
        }
    }

    /// `self - other` clamped at zero; `inf - inf = 0`.
    pub fn saturating_sub(self, other: Cost) -> Cost {
        if self.is_infinite() && other.is_infinite() {
            return Cost::ZERO;
        }
        Cost((self.0 - other.0).max(0.0))
    }

    pub fn min(self, other: Cost) -> Cost {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Cost) -> Cost {
        if other > self {
            other
        } else {
            self
        }
    }
}

/// Signed difference of two extended reals; `inf - inf` is taken as 0.
pub fn difference(a: Cost, b: Cost) -> f64 {
    if a.is_infinite() && b.is_infinite() {
        0.0
    } else {
        a.0 - b.0
    }
}

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Cost) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Cost) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for Cost {
    type Output = Cost;
    #[inline]
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl AddAssign for Cost {
    #[inline]
    fn add_assign(&mut self, rhs: Cost) {
        self.0 += rhs.0;
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Cost> for Cost {
    fn sum<I: Iterator<Item = &'a Cost>>(iter: I) -> Cost {
        iter.copied().sum()
    }
}

impl TryFrom<f64> for Cost {
    type Error = crate::Error;
    fn try_from(value: f64) -> Result<Cost> {
        Cost::new(value)
    }
}

impl From<Cost> for f64 {
    fn from(c: Cost) -> f64 {
        c.0
    }
}

impl fmt::Debug for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

// Finite costs serialize as numbers, infinity as the string "inf".
impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Cost, D::Error> {
        struct CostVisitor;

        impl Visitor<'_> for CostVisitor {
            type Value = Cost;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Cost, E> {
                Cost::new(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Cost, E> {
                Ok(Cost(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Cost, E> {
                Cost::new(v as f64).map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Cost, E> {
                match v {
                    "inf" | "infinity" | "Infinity" => Ok(Cost::INFINITY),
                    other => Err(E::custom(format!("unknown cost literal `{other}`"))),
                }
            }
        }

        deserializer.deserialize_any(CostVisitor)
    }
}
