//! Exact arithmetic helpers on top of `num-rational`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational;

/// `n choose k` as an exact integer. Zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_uint(n: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from_biguint(Sign::Plus, n))
}

pub fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `base^exp` for a possibly negative exponent.
pub fn powi(base: &BigRational, exp: i64) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    if exp < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Exact square root when both numerator and denominator are perfect squares.
pub fn exact_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    let (rn, rd) = (num.sqrt(), den.sqrt());
    if &(&rn * &rn) == num && &(&rd * &rd) == den {
        Some(BigRational::new(
            BigInt::from_biguint(Sign::Plus, rn),
            BigInt::from_biguint(Sign::Plus, rd),
        ))
    } else {
        None
    }
}

/// Lower rational approximation of `sqrt(x)` for `x >= 0` with absolute error
/// at most `10^-digits`.
pub fn sqrt_lower(x: &BigRational, digits: u32) -> BigRational {
    if let Some(root) = exact_sqrt(x) {
        return root;
    }
    // sqrt(n/d) = sqrt(n*d)/d; floor(sqrt(n*d*S^2))/(d*S) is within 1/(d*S) <= 1/S.
    let scale = BigUint::from(10u32).pow(digits);
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    let root = (n * d * &scale * &scale).sqrt();
    BigRational::new(
        BigInt::from_biguint(Sign::Plus, root),
        BigInt::from_biguint(Sign::Plus, d * scale),
    )
}

/// Truncated decimal expansion with `digits` places after the point.
pub fn to_decimal(x: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (x.numer() * &scale).div_floor(x.denom());
    let negative = scaled.is_negative();
    let magnitude = scaled.magnitude().to_str_radix(10);
    let width = digits as usize + 1;
    let padded: Vec<u8> = if magnitude.len() < width {
        core::iter::repeat_n(b'0', width - magnitude.len())
            .chain(magnitude.bytes())
            .collect()
    } else {
        magnitude.into_bytes()
    };
    let split = padded.len() - digits as usize;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    for &b in &padded[..split] {
        out.push(b as char);
    }
    if digits > 0 {
        out.push('.');
        for &b in &padded[split..] {
            out.push(b as char);
        }
    }
    out
}

/// `numerator/denominator` with an explicit denominator, e.g. `3/16` or `2/1`.
pub fn to_fraction(x: &BigRational) -> String {
    let mut s = String::new();
    let _ = write!(s, "{}/{}", x.numer(), x.denom());
    s
}

pub fn to_f64(x: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), BigUint::from(20u32));
        assert_eq!(binomial(5, 0), BigUint::one());
        assert_eq!(binomial(3, 4), BigUint::zero());
        assert_eq!(binomial(60, 30).to_string(), "118264581564861424");
    }

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&ratio(1, 3), 5), "0.33333");
        assert_eq!(to_decimal(&ratio(5, 1), 3), "5.000");
        assert_eq!(to_decimal(&ratio(-1, 8), 3), "-0.125");
        assert_eq!(to_decimal(&ratio(1, 1000), 2), "0.00");
    }

    #[test]
    fn square_roots() {
        assert_eq!(exact_sqrt(&ratio(1, 4)), Some(ratio(1, 2)));
        assert_eq!(exact_sqrt(&ratio(1, 2)), None);
        let r = sqrt_lower(&ratio(2, 1), 30);
        let err = to_f64(&(&r * &r - ratio(2, 1)));
        assert!(err <= 0.0 && err > -1e-29);
    }
}
