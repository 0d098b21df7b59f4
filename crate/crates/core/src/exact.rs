//! Arbitrary-precision rationals.
//!
//! Every value handled by the exact algorithms (arguments, accuracies,
//! Taylor terms, partial sums and the error bounds themselves) is rational,
//! so this type is the ground truth the fix-point and binary32 code is
//! measured against.
//!
//! Values are kept in canonical form at all times: the denominator is
//! positive and coprime to the numerator. Addition and multiplication use
//! Knuth's gcd-splitting forms so that combining a huge rational with one
//! that has a small denominator (the common case in series loops) never
//! pays for a gcd of two huge integers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid rational literal {0:?}")]
    Parse(String),
}

/// An exact rational number `num / den` with `den > 0` and
/// `gcd(|num|, den) = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rat {
    num: BigInt,
    den: BigInt,
}

/// gcd that reduces the larger operand modulo the smaller one first.
///
/// `num_integer`'s binary gcd is quadratic in the size difference of its
/// operands; a single Euclid step brings both to the size of the smaller.
fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (a, b) = (a.abs(), b.abs());
    let (big, small) = if a.bits() >= b.bits() { (a, b) } else { (b, a) };
    if small.is_zero() {
        return big;
    }
    let rem = &big % &small;
    if rem.is_zero() {
        return small;
    }
    small.gcd(&rem)
}

impl Rat {
    /// Builds `num / den` and reduces it.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Rat, RatError> {
        let (num, den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(RatError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    /// `num / den` for a denominator known to be non-zero.
    ///
    /// # Panics
    ///
    /// Panics when `den` is zero.
    pub fn frac(num: i64, den: i64) -> Rat {
        Self::new(num, den).expect("zero denominator")
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Rat {
        Rat { num: n.into(), den: BigInt::one() }
    }

    pub fn zero() -> Rat {
        Self::from_integer(0)
    }

    pub fn one() -> Rat {
        Self::from_integer(1)
    }

    /// `10^-exp` exactly.
    pub fn pow10_neg(exp: u32) -> Rat {
        Rat { num: BigInt::one(), den: BigInt::from(10u32).pow(exp) }
    }

    fn reduce(num: BigInt, den: BigInt) -> Rat {
        let (mut num, mut den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        let g = gcd(&num, &den);
        if !g.is_one() && !g.is_zero() {
            num /= &g;
            den /= &g;
        }
        if num.is_zero() {
            den = BigInt::one();
        }
        Rat { num, den }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn abs(&self) -> Rat {
        Rat { num: self.num.abs(), den: self.den.clone() }
    }

    pub fn recip(&self) -> Result<Rat, RatError> {
        if self.num.is_zero() {
            return Err(RatError::DivisionByZero);
        }
        let (num, den) = if self.num.is_negative() {
            (-self.den.clone(), -self.num.clone())
        } else {
            (self.den.clone(), self.num.clone())
        };
        Ok(Rat { num, den })
    }

    pub fn checked_div(&self, rhs: &Rat) -> Result<Rat, RatError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn pow(&self, exp: u32) -> Rat {
        Rat { num: self.num.pow(exp), den: self.den.pow(exp) }
    }

    pub fn floor(&self) -> BigInt {
        self.num.div_floor(&self.den)
    }

    pub fn ceil(&self) -> BigInt {
        -((-&self.num).div_floor(&self.den))
    }

    /// Renders with exactly `digits` fractional digits, rounding to nearest
    /// with ties away from zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = self.num.abs() * &scale;
        let (mut q, r) = scaled.div_rem(&self.den);
        if (r * 2u32) >= self.den {
            q += 1u32;
        }
        let (int_part, frac_part) = q.div_rem(&scale);
        let mut out = String::new();
        if self.num.is_negative() && !q.is_zero() {
            out.push('-');
        }
        out.push_str(&int_part.to_string());
        if digits > 0 {
            out.push('.');
            out.push_str(&format!("{:0>width$}", frac_part.to_string(), width = digits));
        }
        out
    }

    /// Lossy conversion, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        match (self.num.to_f64(), self.den.to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => self.to_decimal(20).parse().unwrap_or(f64::NAN),
        }
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_integer(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::from_integer(n)
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        let (ls, rs) = (self.num.sign(), other.num.sign());
        if ls != rs {
            let rank = |s: Sign| match s {
                Sign::Minus => 0,
                Sign::NoSign => 1,
                Sign::Plus => 2,
            };
            return rank(ls).cmp(&rank(rs));
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_signed(a: &Rat, b: &Rat, negate_b: bool) -> Rat {
    let bn = if negate_b { -&b.num } else { b.num.clone() };
    if a.num.is_zero() {
        return Rat { num: bn, den: b.den.clone() };
    }
    if bn.is_zero() {
        return a.clone();
    }
    let d1 = gcd(&a.den, &b.den);
    if d1.is_one() {
        // coprime denominators: the result is already in lowest terms
        let num = &a.num * &b.den + &bn * &a.den;
        let den = &a.den * &b.den;
        return if num.is_zero() { Rat::zero() } else { Rat { num, den } };
    }
    let a_den_r = &a.den / &d1;
    let b_den_r = &b.den / &d1;
    let t = &a.num * &b_den_r + &bn * &a_den_r;
    if t.is_zero() {
        return Rat::zero();
    }
    let d2 = gcd(&t, &d1);
    let num = t / &d2;
    let den = a_den_r * (&b.den / &d2);
    Rat { num, den }
}

impl<'a> Add<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn add(self, rhs: &'a Rat) -> Rat {
        add_signed(self, rhs, false)
    }
}

impl<'a> Sub<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn sub(self, rhs: &'a Rat) -> Rat {
        add_signed(self, rhs, true)
    }
}

impl<'a> Mul<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn mul(self, rhs: &'a Rat) -> Rat {
        if self.num.is_zero() || rhs.num.is_zero() {
            return Rat::zero();
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let num = (&self.num / &g1) * (&rhs.num / &g2);
        let den = (&self.den / &g2) * (&rhs.den / &g1);
        Rat { num, den }
    }
}

impl<'a> Div<&'a Rat> for &'a Rat {
    type Output = Rat;
    /// # Panics
    ///
    /// Panics on a zero divisor; use [`Rat::checked_div`] to get an error.
    fn div(self, rhs: &'a Rat) -> Rat {
        self.checked_div(rhs).expect("rational division by zero")
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat { num: -self.num, den: self.den }
    }
}

macro_rules! forward_owned_binop {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &'a Rat) -> Rat { (&self).$m(rhs) }
        }
        impl<'a> $tr<Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat { self.$m(&rhs) }
        }
    )*};
}

forward_owned_binop!(Add add, Sub sub, Mul mul, Div div);

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rat({self})")
    }
}

/// Parses `"p/q"`, integers, and decimal literals such as `"0.05"`,
/// `"-1.5"` or `"1e-8"`. Decimals are read exactly.
impl FromStr for Rat {
    type Err = RatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || RatError::Parse(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(err());
        }
        if let Some((p, q)) = t.split_once('/') {
            if q.contains('/') {
                return Err(err());
            }
            let p: Rat = p.parse().map_err(|_| err())?;
            let q: Rat = q.parse().map_err(|_| err())?;
            return p.checked_div(&q).map_err(|e| match e {
                RatError::DivisionByZero => RatError::DivisionByZero,
                _ => err(),
            });
        }
        let (mantissa, exp) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (t, 0),
        };
        let (neg, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_s, frac_s) = digits.split_once('.').unwrap_or((digits, ""));
        if int_s.is_empty() && frac_s.is_empty() {
            return Err(err());
        }
        if !int_s.bytes().chain(frac_s.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let all: String = format!("{int_s}{frac_s}");
        let mut num: BigInt = all.parse().map_err(|_| err())?;
        if neg {
            num = -num;
        }
        let scale = exp - frac_s.len() as i32;
        let ten = BigInt::from(10u32);
        if scale >= 0 {
            Ok(Rat::from_integer(num * ten.pow(scale as u32)))
        } else {
            Rat::new(num, ten.pow((-scale) as u32))
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `n!` as an exact rational.
pub fn factorial(n: u64) -> Rat {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    Rat::from_integer(acc)
}
