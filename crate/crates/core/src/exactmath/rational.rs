//! Arbitrary-precision rational scalars.
//!
//! Everything downstream (curve classes, ages, series coefficients) is an
//! exact `BigRational`; no floating point enters the pipeline anywhere.
//! `num-rational` keeps values reduced to lowest terms with a positive
//! denominator, which is exactly the canonical form we rely on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rat;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"` with optional sign, exact.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().ok()?;
            let d: BigInt = den.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rat::from_integer(n))
        }
    }
}

/// Renders as `"p"` when integral, `"p/q"` otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

pub fn is_nonneg_integer(r: &Rat) -> bool {
    is_integer(r) && !r.numer().is_negative()
}

/// Largest integer `<= r`.
pub fn floor_int(r: &Rat) -> BigInt {
    r.floor().numer().clone()
}

/// Smallest integer `>= r`.
pub fn ceil_int(r: &Rat) -> BigInt {
    r.ceil().numer().clone()
}

/// Fractional part in `[0, 1)`.
pub fn frac_part(r: &Rat) -> Rat {
    r - Rat::from_integer(floor_int(r))
}

/// lcm of two positive integers.
pub fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "7", "-3", "1/2", "-5/3", "10/4"] {
            let r = parse_rat(s).unwrap();
            let t = parse_rat(&format_rat(&r)).unwrap();
            assert_eq!(r, t);
        }
        assert_eq!(format_rat(&parse_rat("10/4").unwrap()), "5/2");
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }

    #[test]
    fn frac_part_lands_in_unit_interval() {
        let cases = [("-1/2", "1/2"), ("-1", "0"), ("7/3", "1/3"), ("2", "0")];
        for (input, expect) in cases {
            assert_eq!(
                frac_part(&parse_rat(input).unwrap()),
                parse_rat(expect).unwrap()
            );
        }
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(floor_int(&rat(-3, 2)), BigInt::from(-2));
        assert_eq!(ceil_int(&rat(-3, 2)), BigInt::from(-1));
        assert_eq!(floor_int(&rat_int(4)), BigInt::from(4));
        assert_eq!(ceil_int(&rat_int(4)), BigInt::from(4));
    }
}
