//! Exact rational scalars and a fixed-denominator integer lattice used by the
//! hot loops (shortest paths, voting, closure).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn half() -> Self {
        Scalar::ratio(1, 2)
    }

    pub fn from_integer(v: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(v)))
    }

    /// `numer / denom`. Panics if `denom == 0`.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Scalar(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Self {
        Scalar(BigRational::new(numer, denom))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn pow(&self, exp: u32) -> Self {
        Scalar(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Renders with at most `digits` digits after the decimal point (rounded
    /// half away from zero). Used for CSV output only.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        let scale = num_traits::pow(BigInt::from(10), digits as usize);
        let scaled = &self.0 * BigRational::from_integer(scale.clone());
        let rounded = scaled.round().to_integer();
        let neg = rounded.is_negative();
        let (int_part, frac_part) = rounded.abs().div_rem(&scale);
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push_str(&int_part.to_string());
        if digits > 0 {
            s.push('.');
            s.push_str(&format!("{:0>width$}", frac_part.to_string(), width = digits as usize));
        }
        s
    }
}

/// Returns `Some(k)` when `d` has the form `2^a 5^b`, with `k = max(a, b)`.
fn terminating_digits(d: &BigInt) -> Option<usize> {
    let mut rest = d.clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut a, mut b) = (0usize, 0usize);
    while rest.is_even() {
        rest /= &two;
        a += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        b += 1;
    }
    rest.is_one().then_some(a.max(b))
}

impl fmt::Display for Scalar {
    /// Integers print bare, terminating fractions as exact decimals, and
    /// everything else as `a/b`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.0.denom();
        if d.is_one() {
            return write!(f, "{}", self.0.numer());
        }
        match terminating_digits(d) {
            Some(digits) if digits <= 64 => {
                let scale = num_traits::pow(BigInt::from(10), digits);
                let scaled = (self.0.numer() * (&scale / d)).abs();
                let (int_part, frac_part) = scaled.div_rem(&scale);
                let sign = if self.0.is_negative() { "-" } else { "" };
                let frac = format!("{:0>width$}", frac_part.to_string(), width = digits);
                write!(f, "{sign}{int_part}.{}", frac.trim_end_matches('0'))
            }
            _ => write!(f, "{}/{}", self.0.numer(), d),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts integers, finite decimals (`-0.125`) and fractions (`3/8`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Parse { line: 0, message: format!("not a rational number: {s:?}") };
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let numer: BigInt = a.trim().parse().map_err(|_| bad())?;
            let denom: BigInt = b.trim().parse().map_err(|_| bad())?;
            if denom.is_zero() {
                return Err(bad());
            }
            return Ok(Scalar(BigRational::new(numer, denom)));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let digits_ok = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !digits_ok(int_part) || !digits_ok(frac_part) {
            return Err(bad());
        }
        let all_digits = format!("{int_part}{frac_part}");
        let mut numer: BigInt = if all_digits.is_empty() { BigInt::zero() } else { all_digits.parse().map_err(|_| bad())? };
        if neg {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(Scalar(BigRational::new(numer, denom)))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_integer(v)
    }
}

/// Value type the generic exact algorithms run over: either [`Scalar`] or a
/// lattice coordinate (`i128`, see [`Lattice`]).
pub trait ExactValue: Clone + Ord + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;

    fn abs_diff(&self, rhs: &Self) -> Self {
        if self >= rhs {
            self.minus(rhs)
        } else {
            rhs.minus(self)
        }
    }
}

impl ExactValue for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
}

macro_rules! checked_lattice_value {
    ($t:ty) => {
        impl ExactValue for $t {
            fn zero() -> Self {
                0
            }
            fn plus(&self, rhs: &Self) -> Self {
                self.checked_add(*rhs).expect("lattice headroom exceeded")
            }
            fn minus(&self, rhs: &Self) -> Self {
                self.checked_sub(*rhs).expect("lattice headroom exceeded")
            }
        }
    };
}

checked_lattice_value!(i64);
checked_lattice_value!(i128);

/// Whether sums of up to `max_terms` values bounded by `max_abs` stay below
/// `2^bits` in absolute value.
pub fn sums_fit_in_bits(max_abs: u128, max_terms: usize, bits: u32) -> bool {
    let term_bits = usize::BITS - max_terms.max(1).leading_zeros();
    (128 - max_abs.leading_zeros()) + term_bits <= bits
}

/// A common denominator for a finite family of rationals: every member is
/// represented exactly as `k / scale` with `k: i128`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    scale: u64,
}

/// Bits available for sums of lattice values.
const VALUE_BITS: u32 = 124;

/// `v` as a machine-sized fraction `(numerator, denominator)`, if it is one.
pub fn small_fraction(v: &Scalar) -> Option<(i128, u64)> {
    Some((v.numer().to_i128()?, v.denom().to_u64()?))
}

impl Lattice {
    /// Tries to place `values` on a common lattice with a denominator of at
    /// most 64 bits, leaving enough headroom that any sum of up to
    /// `max_terms` of them (in absolute value) still fits in an `i128`.
    pub fn fit<'a, I>(values: I, max_terms: usize) -> Option<Lattice>
    where
        I: IntoIterator<Item = &'a Scalar>,
    {
        let fracs = values.into_iter().map(small_fraction).collect::<Option<Vec<_>>>()?;
        Self::fit_fractions(&fracs, max_terms).map(|(lattice, _)| lattice)
    }

    /// Like [`Lattice::fit`] for fractions already split into machine
    /// integers; also returns each value's lattice coordinate.
    pub fn fit_fractions(fracs: &[(i128, u64)], max_terms: usize) -> Option<(Lattice, Vec<i128>)> {
        let mut scale: u64 = 1;
        for &(_, d) in fracs {
            if scale % d != 0 {
                scale = u64::try_from(u128::from(scale).lcm(&u128::from(d))).ok()?;
            }
        }
        let coords = fracs
            .iter()
            .map(|&(k, d)| k.checked_mul(i128::from(scale / d)))
            .collect::<Option<Vec<i128>>>()?;
        let max_abs = coords.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0);
        sums_fit_in_bits(max_abs, max_terms, VALUE_BITS).then_some((Lattice { scale }, coords))
    }

    pub fn scale(&self) -> BigInt {
        BigInt::from(self.scale)
    }

    /// The lattice coordinate of `v`, if `v` lies on this lattice.
    pub fn embed(&self, v: &Scalar) -> Option<i128> {
        let (k, d) = small_fraction(v)?;
        if self.scale % d != 0 {
            return None;
        }
        k.checked_mul(i128::from(self.scale / d))
    }

    pub fn lift(&self, k: i128) -> Scalar {
        Scalar::from_bigints(BigInt::from(k), BigInt::from(self.scale))
    }
}

/// Least common multiple of the denominators, if it fits in a `u64`.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Scalar>>(values: I) -> Option<u64> {
    let mut scale = BigInt::one();
    for v in values {
        scale = scale.lcm(v.denom());
        if scale.bits() > 64 {
            return None;
        }
    }
    scale.to_u64()
}
