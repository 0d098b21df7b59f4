//! Platform-independent fix-point numbers with Gaussian rounding.
//!
//! A [`FixFormat`] is the grid `{ m/k : inf <= m/k <= sup }` for an integer
//! step denominator `k >= 2`; every integer in range is therefore on the
//! grid. A [`FixNum`] stores the scaled integer `m`.
//!
//! Arithmetic follows the axioms of the datatype:
//!
//! * `add`/`sub` return the exact mathematical result or fail, never round;
//! * `mul`/`div` return the grid value nearest to the exact result, ties
//!   going to the even multiple, so the error is at most `delta/2` and zero
//!   whenever the exact result is on the grid;
//! * any exact result outside `[inf, sup]` is a hard [`FixError::RangeOverflow`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixError {
    #[error("value {value} is outside the format range [{inf}, {sup}]")]
    RangeOverflow { value: Box<Rat>, inf: Box<Rat>, sup: Box<Rat> },
    #[error("operands belong to different fix-point formats")]
    FormatMismatch,
    #[error("fix-point division by zero")]
    DivisionByZero,
    #[error("invalid fix-point format: {0}")]
    InvalidFormat(String),
    #[error("invalid fix-point format literal {0:?}")]
    Parse(String),
}

/// Grid of multiples of `1/k` between `inf` and `sup`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FixFormat {
    k: BigInt,
    inf_m: BigInt,
    sup_m: BigInt,
}

impl FixFormat {
    /// Checks `k >= 2`, `inf < 0 < sup` and that both bounds lie on the grid.
    pub fn new(k: impl Into<BigInt>, inf: &Rat, sup: &Rat) -> Result<Arc<FixFormat>, FixError> {
        let k = k.into();
        if k < BigInt::from(2) {
            return Err(FixError::InvalidFormat(format!("step 1/{k} must be below 1")));
        }
        if !inf.is_negative() || !sup.is_positive() {
            return Err(FixError::InvalidFormat(format!("need inf < 0 < sup, got [{inf}, {sup}]")));
        }
        let kr = Rat::from_integer(k.clone());
        let on_grid = |r: &Rat| {
            let scaled = r * &kr;
            scaled.is_integer().then(|| scaled.numer().clone())
        };
        let inf_m =
            on_grid(inf).ok_or_else(|| FixError::InvalidFormat(format!("inf {inf} is not a multiple of 1/{k}")))?;
        let sup_m =
            on_grid(sup).ok_or_else(|| FixError::InvalidFormat(format!("sup {sup} is not a multiple of 1/{k}")))?;
        Ok(Arc::new(FixFormat { k, inf_m, sup_m }))
    }

    pub fn k(&self) -> &BigInt {
        &self.k
    }

    pub fn delta(&self) -> Rat {
        Rat::new(1, self.k.clone()).expect("k >= 2")
    }

    pub fn inf(&self) -> Rat {
        Rat::new(self.inf_m.clone(), self.k.clone()).expect("k >= 2")
    }

    pub fn sup(&self) -> Rat {
        Rat::new(self.sup_m.clone(), self.k.clone()).expect("k >= 2")
    }

    /// Whether `r` is a value of this format.
    pub fn contains(&self, r: &Rat) -> bool {
        let scaled = r * &Rat::from_integer(self.k.clone());
        scaled.is_integer() && self.m_in_range(scaled.numer())
    }

    fn m_in_range(&self, m: &BigInt) -> bool {
        &self.inf_m <= m && m <= &self.sup_m
    }

    fn in_range(&self, r: &Rat) -> bool {
        self.inf() <= *r && *r <= self.sup()
    }

    fn overflow(&self, value: Rat) -> FixError {
        FixError::RangeOverflow { value: Box::new(value), inf: Box::new(self.inf()), sup: Box::new(self.sup()) }
    }

    /// `k` is a power of ten, so values print as exact decimals.
    fn decimal_digits(&self) -> Option<usize> {
        let s = self.k.to_string();
        (s.starts_with('1') && s[1..].bytes().all(|b| b == b'0')).then(|| s.len() - 1)
    }
}

impl fmt::Display for FixFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}:[{},{}]", self.k, self.inf(), self.sup())
    }
}

/// Parses `"1/k:[inf,sup]"`, e.g. `"1/256:[-8,64]"`. The step denominator
/// may also be written as a power, `"1/2^16:[-8,1024]"`.
pub fn parse_format(s: &str) -> Result<Arc<FixFormat>, FixError> {
    let err = || FixError::Parse(s.to_string());
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (step, range) = t.split_once(':').ok_or_else(err)?;
    let k_lit = step.strip_prefix("1/").ok_or_else(err)?;
    let k: BigInt = match k_lit.split_once('^') {
        Some((base, exp)) => {
            let base: BigInt = base.parse().map_err(|_| err())?;
            base.pow(exp.parse::<u32>().map_err(|_| err())?)
        }
        None => k_lit.parse().map_err(|_| err())?,
    };
    let inner = range.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(err)?;
    let (inf, sup) = inner.split_once(',').ok_or_else(err)?;
    let inf: Rat = inf.parse().map_err(|_| err())?;
    let sup: Rat = sup.parse().map_err(|_| err())?;
    FixFormat::new(k, &inf, &sup)
}

/// Nearest integer to `num/den` (`den > 0`), ties to even.
fn round_half_even(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_mod_floor(den);
    let twice = &r * 2u32;
    match twice.cmp(den) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1u32,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1u32
            }
        }
    }
}

/// A value `m/k` of some [`FixFormat`].
#[derive(Debug, Clone)]
pub struct FixNum {
    m: BigInt,
    format: Arc<FixFormat>,
}

impl PartialEq for FixNum {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && same_format(&self.format, &other.format)
    }
}

impl Eq for FixNum {}

fn same_format(a: &Arc<FixFormat>, b: &Arc<FixFormat>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl FixNum {
    /// Rounds `r` to the nearest grid value (ties to even).
    ///
    /// Accepts `r` up to `delta/2` outside `[inf, sup]` as long as the
    /// rounded value lands back in range.
    pub fn from_rat(r: &Rat, format: &Arc<FixFormat>) -> Result<FixNum, FixError> {
        let scaled = r * &Rat::from_integer(format.k.clone());
        let m = round_half_even(scaled.numer(), scaled.denom());
        if !format.m_in_range(&m) {
            return Err(format.overflow(r.clone()));
        }
        Ok(FixNum { m, format: Arc::clone(format) })
    }

    /// The exact grid value `r`; fails unless `r` is representable.
    pub fn exact(r: &Rat, format: &Arc<FixFormat>) -> Result<FixNum, FixError> {
        if !format.contains(r) {
            return Err(if format.in_range(r) {
                FixError::InvalidFormat(format!("{r} is not a multiple of 1/{}", format.k))
            } else {
                format.overflow(r.clone())
            });
        }
        Self::from_rat(r, format)
    }

    pub fn from_int(n: impl Into<BigInt>, format: &Arc<FixFormat>) -> Result<FixNum, FixError> {
        let m = n.into() * &format.k;
        if !format.m_in_range(&m) {
            return Err(format.overflow(Rat::new(m, format.k.clone()).expect("k >= 2")));
        }
        Ok(FixNum { m, format: Arc::clone(format) })
    }

    /// Builds from the scaled integer directly.
    pub fn from_scaled(m: impl Into<BigInt>, format: &Arc<FixFormat>) -> Result<FixNum, FixError> {
        let m = m.into();
        if !format.m_in_range(&m) {
            return Err(format.overflow(Rat::new(m, format.k.clone()).expect("k >= 2")));
        }
        Ok(FixNum { m, format: Arc::clone(format) })
    }

    pub fn zero(format: &Arc<FixFormat>) -> FixNum {
        FixNum { m: BigInt::zero(), format: Arc::clone(format) }
    }

    pub fn scaled(&self) -> &BigInt {
        &self.m
    }

    pub fn format(&self) -> &Arc<FixFormat> {
        &self.format
    }

    pub fn to_rat(&self) -> Rat {
        Rat::new(self.m.clone(), self.format.k.clone()).expect("k >= 2")
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    fn check_format(&self, other: &FixNum) -> Result<(), FixError> {
        if same_format(&self.format, &other.format) {
            Ok(())
        } else {
            Err(FixError::FormatMismatch)
        }
    }

    fn exact_m(&self, m: BigInt) -> Result<FixNum, FixError> {
        if !self.format.m_in_range(&m) {
            let value = Rat::new(m, self.format.k.clone()).expect("k >= 2");
            return Err(self.format.overflow(value));
        }
        Ok(FixNum { m, format: Arc::clone(&self.format) })
    }

    pub fn add(&self, other: &FixNum) -> Result<FixNum, FixError> {
        self.check_format(other)?;
        self.exact_m(&self.m + &other.m)
    }

    pub fn sub(&self, other: &FixNum) -> Result<FixNum, FixError> {
        self.check_format(other)?;
        self.exact_m(&self.m - &other.m)
    }

    /// Negation is exact but may leave an asymmetric range.
    pub fn neg(&self) -> Result<FixNum, FixError> {
        self.exact_m(-&self.m)
    }

    /// Nearest grid value to the exact product.
    pub fn mul(&self, other: &FixNum) -> Result<FixNum, FixError> {
        self.check_format(other)?;
        // (a/k)(b/k) = (ab/k) / k
        let num = &self.m * &other.m;
        self.rounded(num, self.format.k.clone())
    }

    /// Nearest grid value to the exact quotient.
    pub fn div(&self, other: &FixNum) -> Result<FixNum, FixError> {
        self.check_format(other)?;
        if other.m.is_zero() {
            return Err(FixError::DivisionByZero);
        }
        // (a/k) / (b/k) = (a k / b) / k
        let (num, den) = if other.m.is_negative() {
            (-(&self.m * &self.format.k), -other.m.clone())
        } else {
            (&self.m * &self.format.k, other.m.clone())
        };
        self.rounded(num, den)
    }

    /// Rounds the exact scaled result `num/den` (in units of delta).
    fn rounded(&self, num: BigInt, den: BigInt) -> Result<FixNum, FixError> {
        let f = &self.format;
        if num < &f.inf_m * &den || num > &f.sup_m * &den {
            let value = Rat::new(num, den * &f.k).expect("non-zero");
            return Err(f.overflow(value));
        }
        let m = round_half_even(&num, &den);
        Ok(FixNum { m, format: Arc::clone(f) })
    }

    pub fn floor(&self) -> BigInt {
        self.m.div_floor(&self.format.k)
    }

    pub fn ceil(&self) -> BigInt {
        -((-&self.m).div_floor(&self.format.k))
    }
}

impl PartialOrd for FixNum {
    /// Values of different formats are unordered.
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        same_format(&self.format, &other.format).then(|| self.m.cmp(&other.m))
    }
}

impl fmt::Display for FixNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.format.decimal_digits() {
            Some(digits) => f.write_str(&self.to_rat().to_decimal(digits)),
            None => write!(f, "{}/{}", self.m, self.format.k),
        }
    }
}

impl FromStr for FixFormat {
    type Err = FixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_format(s).map(|f| (*f).clone())
    }
}

/// Convenience for tests and the CLI: `1` as a value of `format`.
pub fn fx_one(format: &Arc<FixFormat>) -> FixNum {
    FixNum { m: format.k.clone(), format: Arc::clone(format) }
}
