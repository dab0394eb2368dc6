//! Number types accepted by the interval-exchange code.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed};

/// An ordered field, or a good enough stand-in for one. Exact rationals give
/// exact answers; `f64` is accepted for quick experiments where ties are
/// decided by rounding.
pub trait Scalar: Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive {}

impl<T> Scalar for T where T: Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive {}

/// Arbitrary-precision rationals.
pub type Rational = BigRational;

/// `p/q` as a [`Rational`].
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parse `p/q` or an integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            (q != BigInt::from(0)).then(|| Rational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions() {
        assert_eq!(parse_rational("3/9"), Some(ratio(1, 3)));
        assert_eq!(parse_rational(" 2 "), Some(ratio(2, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(ratio(1, 2).to_string(), "1/2");
    }
}
