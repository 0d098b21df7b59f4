//! Exact-arithmetic reference algorithms.
//!
//! Each algorithm is the plain textbook loop over rationals, instrumented
//! so that its Floyd loop invariant is re-evaluated independently at every
//! loop head and its exit condition is checked against the postcondition
//! it is meant to establish. A failed check surfaces as
//! [`OracleError::InvariantViolation`] or [`OracleError::PostconditionViolation`];
//! neither should ever be observed.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{factorial, Rat};

/// Number of fractional digits in the `decimal` field of serialized results.
pub const JSON_DECIMAL_DIGITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("accuracy must be positive, got {0}")]
    NonPositiveEps(Rat),
    #[error("accuracy must satisfy 0 < eps < 1, got {0}")]
    EpsOutOfRange(Rat),
    #[error("argument must satisfy -1 <= x <= 1, got {0}")]
    ArgOutOfRange(Rat),
    #[error("{algorithm}: loop invariant clause `{clause}` violated at loop head n = {n}")]
    InvariantViolation { algorithm: &'static str, n: u64, clause: &'static str },
    #[error("{algorithm}: postcondition `{clause}` violated")]
    PostconditionViolation { algorithm: &'static str, clause: &'static str },
}

impl OracleError {
    /// Invariant and postcondition failures, as opposed to rejected inputs.
    pub fn is_verification_failure(&self) -> bool {
        matches!(self, Self::InvariantViolation { .. } | Self::PostconditionViolation { .. })
    }
}

/// Output of an exact algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgoResult {
    pub value: Rat,
    /// Loop count as the algorithm defines it; see each function.
    pub iterations: u64,
    /// Guaranteed bound on `|value - f(x)|`.
    pub a_priori_bound: Rat,
    /// How many loop heads had their invariant evaluated.
    pub loop_head_checks: u64,
}

/// Wire form of an [`AlgoResult`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgoResultJson {
    pub value: Rat,
    pub decimal: String,
    pub iterations: u64,
    pub bound: Rat,
}

impl AlgoResult {
    pub fn to_json(&self) -> AlgoResultJson {
        AlgoResultJson {
            value: self.value.clone(),
            decimal: self.value.to_decimal(JSON_DECIMAL_DIGITS),
            iterations: self.iterations,
            bound: self.a_priori_bound.clone(),
        }
    }
}

/// Which Taylor series a loop evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Series {
    /// `sum (-1)^n x^(2n) / (2n)!`
    Cos,
    /// `sum (-1)^n x^(2n+1) / (2n+1)!`
    Sin,
}

impl Series {
    pub fn name(self) -> &'static str {
        match self {
            Series::Cos => "cos",
            Series::Sin => "sin",
        }
    }

    /// Power of `x` (and factorial) in term `n`.
    pub fn order(self, n: u64) -> u64 {
        match self {
            Series::Cos => 2 * n,
            Series::Sin => 2 * n + 1,
        }
    }

    /// The two factors that take term `n - 1` to term `n`.
    pub fn divisors(self, n: u64) -> (u64, u64) {
        let o = self.order(n);
        (o - 1, o)
    }

    /// Unsigned term `x^order(n) / order(n)!`.
    pub fn term(self, x: &Rat, n: u64) -> Rat {
        let o = self.order(n);
        x.pow(o as u32) / factorial(o)
    }

    /// Signed term `(-1)^n x^order(n) / order(n)!`.
    pub fn signed_term(self, x: &Rat, n: u64) -> Rat {
        let t = self.term(x, n);
        if n.is_multiple_of(2) {
            t
        } else {
            -t
        }
    }

    /// Term 0 of the series.
    pub fn leading(self, x: &Rat) -> Rat {
        match self {
            Series::Cos => Rat::one(),
            Series::Sin => x.clone(),
        }
    }
}

fn parity_sign(n: u64) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn check(cond: bool, algorithm: &'static str, n: u64, clause: &'static str) -> Result<(), OracleError> {
    if cond {
        Ok(())
    } else {
        Err(OracleError::InvariantViolation { algorithm, n, clause })
    }
}

fn post(cond: bool, algorithm: &'static str, clause: &'static str) -> Result<(), OracleError> {
    if cond {
        Ok(())
    } else {
        Err(OracleError::PostconditionViolation { algorithm, clause })
    }
}

/// Smallest `N >= 1` with `order(N)! * eps >= 1`, scanning at most up to
/// `limit` when one is given.
pub fn minimal_terms(series: Series, eps: &Rat, limit: Option<u64>) -> Option<u64> {
    if !eps.is_positive() {
        return None;
    }
    let mut n = 1u64;
    let mut fact = factorial(series.order(1));
    loop {
        if limit.is_some_and(|l| n > l) {
            return None;
        }
        if &fact * eps >= Rat::one() {
            return Some(n);
        }
        n += 1;
        let (a, b) = series.divisors(n);
        fact = fact * Rat::from_integer(BigInt::from(a) * b);
    }
}

/// Leibniz-series approximation of pi to within `eps`.
///
/// `iterations` counts executions of the loop body and equals
/// `max(0, ceil(2/eps - 3/2))`.
pub fn pi_leibniz(eps: &Rat) -> Result<AlgoResult, OracleError> {
    const ALGO: &str = "pi_leibniz";
    if !eps.is_positive() {
        return Err(OracleError::NonPositiveEps(eps.clone()));
    }
    let quarter_eps = eps / &Rat::from(4);
    let mut qp = Rat::one();
    let mut n: u64 = 1;
    let mut sign: i64 = -1;
    // independently accumulated sum_{m < n} (-1)^m / (2m+1)
    let mut reference = Rat::one();
    let mut checks = 0u64;
    loop {
        check(sign == parity_sign(n), ALGO, n, "sign = (-1)^n")?;
        check(qp == reference, ALGO, n, "qp = sum_{m<n} (-1)^m/(2m+1)")?;
        checks += 1;
        let next = Rat::new(1, 2 * n + 1).expect("odd denominator");
        if quarter_eps >= next {
            break;
        }
        qp = &qp + &(&Rat::from(sign) * &next);
        reference = &reference + &Rat::new(parity_sign(n), 2 * n + 1).expect("odd denominator");
        n += 1;
        sign = -sign;
    }
    let iterations = n - 1;
    let expected = (Rat::from(2) / eps - Rat::frac(3, 2)).ceil().max(BigInt::from(0));
    post(BigInt::from(iterations) == expected, ALGO, "iterations = ceil(2/eps - 3/2)")?;
    let remainder = Rat::new(4, 2 * n + 1).expect("odd denominator");
    post(remainder <= *eps, ALGO, "4/(2n+1) <= eps")?;
    Ok(AlgoResult { value: &qp * &Rat::from(4), iterations, a_priori_bound: eps.clone(), loop_head_checks: checks })
}

fn check_unit_eps(eps: &Rat) -> Result<(), OracleError> {
    if eps.is_positive() && *eps < Rat::one() {
        Ok(())
    } else {
        Err(OracleError::EpsOutOfRange(eps.clone()))
    }
}

/// Taylor-series loop that stops once the next term is at most `eps`.
fn taylor(series: Series, x: &Rat, eps: &Rat) -> Result<AlgoResult, OracleError> {
    let algo = match series {
        Series::Cos => "cos_taylor",
        Series::Sin => "sin_taylor",
    };
    check_unit_eps(eps)?;
    let x2 = x * x;
    let mut acc = series.leading(x);
    let mut n: u64 = 1;
    let mut sign: i64 = -1;
    let mut term = series.term(x, 1);
    let mut reference = series.leading(x);
    let mut checks = 0u64;
    loop {
        check(sign == parity_sign(n), algo, n, "sign = (-1)^n")?;
        check(term == series.term(x, n), algo, n, "term = x^k/k!")?;
        check(acc == reference, algo, n, "partial sum over m < n")?;
        checks += 1;
        if *eps >= term.abs() {
            break;
        }
        acc = &acc + &(&Rat::from(sign) * &term);
        reference = &reference + &series.signed_term(x, n);
        n += 1;
        sign = -sign;
        let (a, b) = series.divisors(n);
        term = &(&term * &x2) / &Rat::from_integer(BigInt::from(a) * b);
    }
    post(x.abs() <= Rat::from_integer(BigInt::from(2 * n)), algo, "|x| <= 2n")?;
    Ok(AlgoResult { value: acc, iterations: n - 1, a_priori_bound: eps.clone(), loop_head_checks: checks })
}

/// Cosine for any rational `x` with `0 < eps < 1`.
///
/// `iterations` counts executions of the loop body.
pub fn cos_taylor(x: &Rat, eps: &Rat) -> Result<AlgoResult, OracleError> {
    taylor(Series::Cos, x, eps)
}

/// Sine for any rational `x` with `0 < eps < 1`. The loop runs while the
/// magnitude of the next term exceeds `eps`.
pub fn sin_taylor(x: &Rat, eps: &Rat) -> Result<AlgoResult, OracleError> {
    taylor(Series::Sin, x, eps)
}

/// State of the range-restricted loop for `x` in `[-1, 1]`, exposed so the
/// fix-point tracer can run it in lockstep.
///
/// The loop counter `ep = (-1)^n order(n)! eps` replaces the term test:
/// the loop stops as soon as `|ep| >= 1`, which is exactly when
/// `n = min { N : order(N)! eps >= 1 }`.
#[derive(Debug, Clone)]
pub struct ZeroneRun {
    pub series: Series,
    pub x: Rat,
    pub eps: Rat,
    x2: Rat,
    pub n: u64,
    pub sign: i64,
    pub acc: Rat,
    /// Unsigned term `x^order(n) / order(n)!` (sign carried by `sign`).
    pub term: Rat,
    pub ep: Rat,
    reference: Rat,
    checks: u64,
}

impl ZeroneRun {
    fn algorithm(&self) -> &'static str {
        match self.series {
            Series::Cos => "cos_zerone",
            Series::Sin => "sin_zerone",
        }
    }

    pub fn start(series: Series, x: &Rat, eps: &Rat) -> Result<ZeroneRun, OracleError> {
        check_unit_eps(eps)?;
        if x.abs() > Rat::one() {
            return Err(OracleError::ArgOutOfRange(x.clone()));
        }
        let first = factorial(series.order(1));
        Ok(ZeroneRun {
            series,
            x: x.clone(),
            eps: eps.clone(),
            x2: x * x,
            n: 1,
            sign: -1,
            acc: series.leading(x),
            term: series.term(x, 1),
            ep: -(eps * &first),
            reference: series.leading(x),
            checks: 0,
        })
    }

    /// Evaluates every clause of the loop invariant.
    pub fn check_invariant(&mut self) -> Result<(), OracleError> {
        let (algo, n) = (self.algorithm(), self.n);
        check(self.eps.is_positive() && self.eps < Rat::one(), algo, n, "0 < eps < 1")?;
        check(self.x.abs() <= Rat::one(), algo, n, "-1 <= x <= 1")?;
        check(self.sign == parity_sign(n), algo, n, "sign = (-1)^n")?;
        let ep = &Rat::from(parity_sign(n)) * &(&factorial(self.series.order(n)) * &self.eps);
        check(self.ep == ep, algo, n, "ep = (-1)^n k! eps")?;
        check(self.term == self.series.term(&self.x, n), algo, n, "term = x^k/k!")?;
        check(self.acc == self.reference, algo, n, "partial sum over m < n")?;
        self.checks += 1;
        Ok(())
    }

    /// Loop guard `|ep| < 1`.
    pub fn continues(&self) -> bool {
        self.ep.abs() < Rat::one()
    }

    /// `sign * term`, the signed term about to be added.
    pub fn signed_term(&self) -> Rat {
        &Rat::from(self.sign) * &self.term
    }

    /// One execution of the loop body.
    pub fn step(&mut self) {
        self.acc = &self.acc + &self.signed_term();
        self.reference = &self.reference + &self.series.signed_term(&self.x, self.n);
        self.n += 1;
        self.sign = -self.sign;
        let (a, b) = self.series.divisors(self.n);
        let factor = Rat::from_integer(BigInt::from(a) * b);
        self.term = &(&self.term * &self.x2) / &factor;
        self.ep = -(&self.ep * &factor);
    }

    /// Checks the exit-path implication and packages the result;
    /// `iterations` is the final loop counter `n`.
    pub fn finish(self) -> Result<AlgoResult, OracleError> {
        let algo = self.algorithm();
        post(!self.continues(), algo, "|ep| >= 1 at exit")?;
        post(self.term.abs() <= self.eps, algo, "term <= eps at exit")?;
        let expected = minimal_terms(self.series, &self.eps, None);
        post(expected == Some(self.n), algo, "n = min { N : k(N)! eps >= 1 }")?;
        Ok(AlgoResult { value: self.acc, iterations: self.n, a_priori_bound: self.eps, loop_head_checks: self.checks })
    }

    pub fn run(series: Series, x: &Rat, eps: &Rat) -> Result<AlgoResult, OracleError> {
        let mut run = Self::start(series, x, eps)?;
        loop {
            run.check_invariant()?;
            if !run.continues() {
                break;
            }
            run.step();
        }
        run.finish()
    }
}

/// Cosine for `-1 <= x <= 1`, `0 < eps < 1`; `iterations` is the final `n`.
pub fn cos_zerone(x: &Rat, eps: &Rat) -> Result<AlgoResult, OracleError> {
    ZeroneRun::run(Series::Cos, x, eps)
}

/// Sine for `-1 <= x <= 1`, `0 < eps < 1`; `iterations` is the final `n`.
pub fn sin_zerone(x: &Rat, eps: &Rat) -> Result<AlgoResult, OracleError> {
    ZeroneRun::run(Series::Sin, x, eps)
}

/// Partial sum up to and including the first term of magnitude `<= eps`,
/// for arbitrary rational `x`. This is the golden-value generator.
pub fn unbounded(series: Series, x: &Rat, eps: &Rat) -> Result<Rat, OracleError> {
    if !eps.is_positive() {
        return Err(OracleError::NonPositiveEps(eps.clone()));
    }
    let x2 = x * x;
    let mut a = series.leading(x);
    let mut s = a.clone();
    let mut k: u64 = series.order(0);
    while a.abs() > *eps {
        let factor = Rat::from_integer(BigInt::from(k + 1) * (k + 2));
        a = -(&(&a * &x2) / &factor);
        s = &s + &a;
        k += 2;
    }
    Ok(s)
}

pub fn cos_unbounded(x: &Rat, eps: &Rat) -> Result<Rat, OracleError> {
    unbounded(Series::Cos, x, eps)
}

pub fn sin_unbounded(x: &Rat, eps: &Rat) -> Result<Rat, OracleError> {
    unbounded(Series::Sin, x, eps)
}
