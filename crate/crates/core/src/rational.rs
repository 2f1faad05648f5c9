//! Exact rational coefficients.
//!
//! `Rational` is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. Every coefficient in the crate lives here; no
//! rounding occurs anywhere in the artifact.

use num_bigint::BigInt;
use num_rational::BigRational;

pub type Rational = BigRational;

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Fraction n/d, reduced. Panics on d = 0.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Render as `"num/den"`, with `"/den"` omitted when the denominator is 1.
/// This is the exchange format for every emitted table and cache file.
pub fn rational_to_string(x: &Rational) -> String {
    if x.denom() == &BigInt::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse the `"num/den"` format produced by [`rational_to_string`].
pub fn rational_from_str(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|e| format!("bad numerator {num:?}: {e}"))?;
    let d: BigInt = den
        .parse()
        .map_err(|e| format!("bad denominator {den:?}: {e}"))?;
    if d == BigInt::from(0) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn stored_in_lowest_terms_with_positive_denominator() {
        let x = rat(6, -4);
        assert_eq!(x, rat(-3, 2));
        assert!(x.denom().is_positive());
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
    }

    #[test]
    fn string_round_trip() {
        for (n, d, s) in [(3, 1, "3"), (-3, 2, "-3/2"), (0, 5, "0"), (22, 11, "2")] {
            let x = rat(n, d);
            assert_eq!(rational_to_string(&x), s);
            assert_eq!(rational_from_str(s).unwrap(), x);
        }
        assert_eq!(rational_from_str("4/6").unwrap(), rat(2, 3));
        assert!(rational_from_str("1/0").is_err());
        assert!(rational_from_str("a/3").is_err());
    }
}
