//! Number types that can carry cluster-tree coordinates.
//!
//! The realization only ever adds, subtracts, halves and divides by small
//! integers, so any exact ordered field works. Binary floats also qualify as
//! long as every value stays dyadic within the mantissa; the fraction
//! conversions refuse values they cannot represent exactly.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub trait Scalar: Clone + PartialOrd + Debug + Num + Signed + Send + Sync + 'static {
    fn from_int(n: i64) -> Self;

    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }

    /// Exact `num/den` rendering with a positive denominator.
    fn to_fraction(&self) -> String;

    /// Parses `num/den` or a bare integer; `None` if malformed or not exactly
    /// representable.
    fn parse_fraction(text: &str) -> Option<Self>;

    /// Some total order, cheaper than the numeric one where possible. Only
    /// meant for grouping and set comparison.
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).expect("coordinates are ordered")
    }
}

fn split_fraction(text: &str) -> Option<(&str, &str)> {
    let text = text.trim();
    Some(match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    })
}

impl<I> Scalar for Ratio<I>
where
    I: Integer + Signed + Clone + Debug + Display + FromStr + FromPrimitive + Send + Sync + 'static,
{
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(I::from_i64(n).expect("integer fits the scalar's backing type"))
    }

    fn to_fraction(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_fraction(text: &str) -> Option<Self> {
        let (n, d) = split_fraction(text)?;
        let numer: I = n.parse().ok()?;
        let denom: I = d.parse().ok()?;
        if denom.is_zero() {
            return None;
        }
        Some(Ratio::new(numer, denom))
    }

    // Reduced fractions are unique, so comparing the parts avoids the
    // cross-multiplication a numeric comparison needs.
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.denom()
            .cmp(other.denom())
            .then_with(|| self.numer().cmp(other.numer()))
    }
}

macro_rules! float_scalar {
    ($t:ty, $to:ident) => {
        impl Scalar for $t {
            fn from_int(n: i64) -> Self {
                n as $t
            }

            fn to_fraction(&self) -> String {
                let exact = BigRational::from_float(*self).expect("finite coordinate");
                format!("{}/{}", exact.numer(), exact.denom())
            }

            fn parse_fraction(text: &str) -> Option<Self> {
                let exact = BigRational::parse_fraction(text)?;
                let value = exact.$to()?;
                (BigRational::from_float(value)? == exact).then_some(value)
            }

            fn canonical_cmp(&self, other: &Self) -> Ordering {
                self.total_cmp(other)
            }
        }
    };
}

float_scalar!(f64, to_f64);
float_scalar!(f32, to_f32);

/// `|a - b|`, the metric of the line.
pub fn distance<T: Scalar>(a: &T, b: &T) -> T {
    (a.clone() - b.clone()).abs()
}

/// `serialize_with` helpers rendering scalars as exact fractions.
pub(crate) mod fraction {
    use super::Scalar;
    use serde::Serializer;

    pub fn serialize<T: Scalar, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_fraction())
    }

    pub fn serialize_opt<T: Scalar, S: Serializer>(
        value: &Option<T>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_str(&v.to_fraction()),
            None => s.serialize_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_fractions() {
        let x = Ratio::<i64>::parse_fraction("6/8").unwrap();
        assert_eq!(x, Ratio::new(3, 4));
        assert_eq!(x.to_fraction(), "3/4");
        assert_eq!(
            Ratio::<i64>::parse_fraction("5").unwrap().to_fraction(),
            "5/1"
        );
        assert_eq!(BigRational::parse_fraction("-1/2").unwrap(), big(-1, 2));
        assert!(Ratio::<i64>::parse_fraction("1/0").is_none());
        assert!(Ratio::<i64>::parse_fraction("a/2").is_none());
    }

    #[test]
    fn floats_are_exact_or_refused() {
        assert_eq!(f64::parse_fraction("3/8"), Some(0.375));
        assert_eq!(0.375f64.to_fraction(), "3/8");
        assert_eq!(f64::parse_fraction("1/3"), None);
        assert_eq!(f32::parse_fraction("1/1024"), Some(1.0 / 1024.0));
        assert_eq!(0.5f64.half(), 0.25);
    }

    #[test]
    fn metric() {
        assert_eq!(distance(&big(1, 2), &big(3, 4)), big(1, 4));
        assert_eq!(distance(&-2.0f64, &1.0), 3.0);
    }
}
