//! Fix-point cosine and sine on `[-1, 1]` and the lockstep error tracer.
//!
//! The fix-point loop mirrors the exact range-restricted loop in
//! [`crate::oracle::ZeroneRun`] statement for statement:
//!
//! ```text
//! cos: acc := 1;  term := -(x*x)/2;      epfp := 2*eps
//! sin: acc := x;  term := -((x*x)*x)/6;  epfp := 6*eps
//! n := 1
//! while epfp < 1:
//!     acc  := acc + term
//!     n    := n + 1            -- (a, b) = (2n-1, 2n) for cos, (2n, 2n+1) for sin
//!     term := -(term * (x/a)) * (x/b)
//!     epfp := b * (a * epfp)
//! ```
//!
//! with `*` and `/` the rounding fix-point operations and `+` exact. The
//! `epfp` updates are integer scalings of a grid value and therefore exact,
//! so both loops run the same number of iterations and every term of one
//! can be compared with the matching term of the other.
//!
//! With `delta` the grid step, `a = (1 + delta)/2` and `c = 3 delta / 4`,
//! the per-term gaps `D_k = term_fp_k - term_k` satisfy
//!
//! ```text
//! |D_1|     <= c
//! |D_k+|    <= a |D_k| + c                  (after the first half-step)
//! |D_{k+1}| <= a |D_k+| + c <= a^2 |D_k| + (a + 1) c
//! |D_k|     <= 3/2 delta (1 - a^(2k-1)) / (1 - delta) <= 3/2 delta / (1 - delta)
//! ```
//!
//! and the final error is at most `eps + 3 n delta / (2 (1 - delta))`.
//! [`paired_trace`] evaluates every one of these on concrete runs.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::Rat;
use crate::fixpoint::{FixError, FixFormat, FixNum};
use crate::oracle::{self, minimal_terms, AlgoResult, OracleError, Series, ZeroneRun};

/// The true function value is taken as the unbounded series at
/// `eps / ORACLE_SLACK_DIVISOR`, and that slack is added to every tolerance.
pub const ORACLE_SLACK_DIVISOR: i64 = 1000;

/// One failed precondition clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Precondition {
    FormatMismatch,
    EpsInUnitInterval { eps: Rat },
    ArgInUnitInterval { x: Rat },
    TerminatingIndexExists { eps: Rat, sup: Rat },
    SupCoversLoopCounter { needed: BigInt, sup: Rat },
}

impl fmt::Display for Precondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FormatMismatch => write!(f, "x and eps must share one fix-point format"),
            Self::EpsInUnitInterval { eps } => write!(f, "0 < eps < 1 fails for eps = {eps}"),
            Self::ArgInUnitInterval { x } => write!(f, "-1 <= x <= 1 fails for x = {x}"),
            Self::TerminatingIndexExists { eps, sup } => {
                write!(f, "no integer N <= {sup} with k(N)! * {eps} >= 1")
            }
            Self::SupCoversLoopCounter { needed, sup } => {
                write!(f, "sup = {sup} is below the loop counter bound {needed}")
            }
        }
    }
}

/// Which inequality a trace failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    /// `|D_1| <= 3/4 delta`
    FirstTerm,
    /// `|D_k+| <= a |D_k| + c`, and the second half-step
    HalfStep,
    /// `|D_{k+1}| <= a^2 |D_k| + (a+1) c`
    Recurrence,
    /// `|D_k| <= 3/2 delta (1 - a^(2k-1)) / (1 - delta)`
    Accumulated,
    /// `|D_k| <= 3/2 delta / (1 - delta)`
    Uniform,
    /// `acc_fp - acc = sum D_k` exactly
    SumIdentity,
    /// `|acc_fp - f(x)| <= sum |D_k| + eps <= 3/4 delta + (n-2) 3/2 delta/(1-delta) + eps`
    ClosingChain,
    /// `|acc_fp - f(x)| <= eps + 3 n delta / (2 (1 - delta))`
    Headline,
    /// `n = min { N : k(N)! eps >= 1 }`
    IterationCount,
    /// exact and fix-point loop guards disagree
    Lockstep,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixTrigError {
    #[error("precondition violated: {}", .0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; "))]
    PreconditionViolation(Vec<Precondition>),
    #[error("fix-point overflow at iteration {iteration}: {source}")]
    RangeOverflow { iteration: u64, source: FixError },
    #[error("bound {bound} violated at k = {k}: {detail}")]
    BoundViolation { k: u64, bound: BoundKind, detail: String },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl FixTrigError {
    pub fn is_verification_failure(&self) -> bool {
        match self {
            Self::BoundViolation { .. } => true,
            Self::Oracle(e) => e.is_verification_failure(),
            _ => false,
        }
    }
}

/// Result of a fix-point evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixAlgoResult {
    pub value: FixNum,
    pub n: u64,
    /// `eps + 3 n delta / (2 (1 - delta))`
    pub a_priori_bound: Rat,
    /// Unbounded-series value the result was checked against.
    pub reference: Rat,
}

impl FixAlgoResult {
    pub fn observed_error(&self) -> Rat {
        (&self.value.to_rat() - &self.reference).abs()
    }

    pub fn to_json(&self) -> oracle::AlgoResultJson {
        let value = self.value.to_rat();
        oracle::AlgoResultJson {
            decimal: value.to_decimal(oracle::JSON_DECIMAL_DIGITS),
            value,
            iterations: self.n,
            bound: self.a_priori_bound.clone(),
        }
    }
}

/// `eps + 3 n delta / (2 (1 - delta))`.
///
/// # Panics
///
/// Panics unless `0 < delta < 1`.
pub fn error_bound(n: u64, delta: &Rat, eps: &Rat) -> Rat {
    assert!(delta.is_positive() && *delta < Rat::one(), "delta must lie in (0, 1)");
    let num = &Rat::from(3 * n as i64) * delta;
    let den = &Rat::from(2) * &(&Rat::one() - delta);
    eps + &(&num / &den)
}

/// Checks every precondition clause and returns the iteration count the
/// loop must reach.
pub fn preconditions(series: Series, x: &FixNum, eps: &FixNum) -> Result<u64, FixTrigError> {
    if x.format() != eps.format() {
        return Err(FixTrigError::PreconditionViolation(vec![Precondition::FormatMismatch]));
    }
    let format = x.format();
    let (xr, er) = (x.to_rat(), eps.to_rat());
    let mut failed = Vec::new();
    let eps_ok = er.is_positive() && er < Rat::one();
    if !eps_ok {
        failed.push(Precondition::EpsInUnitInterval { eps: er.clone() });
    }
    if xr.abs() > Rat::one() {
        failed.push(Precondition::ArgInUnitInterval { x: xr });
    }
    let sup = format.sup();
    let mut n = None;
    if eps_ok {
        let limit = u64::try_from(sup.floor()).unwrap_or(u64::MAX);
        n = minimal_terms(series, &er, Some(limit));
        match n {
            None => failed.push(Precondition::TerminatingIndexExists { eps: er, sup: sup.clone() }),
            Some(n) => {
                let (a, b) = series.divisors(n);
                let needed = BigInt::from(a) * b;
                if Rat::from_integer(needed.clone()) > sup {
                    failed.push(Precondition::SupCoversLoopCounter { needed, sup });
                }
            }
        }
    }
    match n {
        Some(n) if failed.is_empty() => Ok(n),
        _ => Err(FixTrigError::PreconditionViolation(failed)),
    }
}

/// Fix-point loop state.
#[derive(Debug, Clone)]
struct FixRun {
    series: Series,
    x: FixNum,
    n: u64,
    acc: FixNum,
    /// signed term
    term: FixNum,
    epfp: FixNum,
    one: FixNum,
}

fn at(iteration: u64) -> impl Fn(FixError) -> FixTrigError {
    move |source| FixTrigError::RangeOverflow { iteration, source }
}

fn int(n: u64, format: &Arc<FixFormat>, iteration: u64) -> Result<FixNum, FixTrigError> {
    FixNum::from_int(n, format).map_err(at(iteration))
}

impl FixRun {
    fn start(series: Series, x: &FixNum, eps: &FixNum) -> Result<FixRun, FixTrigError> {
        let f = x.format();
        let e = at(0);
        let xx = x.mul(x).map_err(&e)?;
        let (acc, term, ep_factor) = match series {
            Series::Cos => {
                let two = int(2, f, 0)?;
                (FixNum::from_int(1, f).map_err(&e)?, xx.div(&two).map_err(&e)?.neg().map_err(&e)?, two)
            }
            Series::Sin => {
                let six = int(6, f, 0)?;
                let xxx = xx.mul(x).map_err(&e)?;
                (x.clone(), xxx.div(&six).map_err(&e)?.neg().map_err(&e)?, six)
            }
        };
        let epfp = ep_factor.mul(eps).map_err(&e)?;
        Ok(FixRun { series, x: x.clone(), n: 1, acc, term, epfp, one: FixNum::from_int(1, f).map_err(&e)? })
    }

    fn continues(&self) -> bool {
        self.epfp < self.one
    }

    /// Runs the loop body; returns the half-step value `term * (x / a)`.
    fn step(&mut self) -> Result<FixNum, FixTrigError> {
        let e = at(self.n);
        let f = Arc::clone(self.x.format());
        self.acc = self.acc.add(&self.term).map_err(&e)?;
        self.n += 1;
        let (_, b) = self.series.divisors(self.n);
        let m = int(b, &f, self.n)?;
        let m_minus_1 = m.sub(&self.one).map_err(&e)?;
        let half = self.term.mul(&self.x.div(&m_minus_1).map_err(&e)?).map_err(&e)?;
        self.term = half.neg().map_err(&e)?.mul(&self.x.div(&m).map_err(&e)?).map_err(&e)?;
        self.epfp = m.mul(&m_minus_1.mul(&self.epfp).map_err(&e)?).map_err(&e)?;
        Ok(half)
    }
}

fn violation(k: u64, bound: BoundKind, detail: String) -> FixTrigError {
    FixTrigError::BoundViolation { k, bound, detail }
}

fn reference_value(series: Series, x: &Rat, eps: &Rat) -> Result<Rat, FixTrigError> {
    let slack = eps / &Rat::from(ORACLE_SLACK_DIVISOR);
    Ok(oracle::unbounded(series, x, &slack)?)
}

/// Checks the iteration count and the headline postcondition.
fn conclude(series: Series, run: FixRun, eps: &FixNum, expected_n: u64) -> Result<FixAlgoResult, FixTrigError> {
    if run.n != expected_n {
        return Err(violation(
            run.n,
            BoundKind::IterationCount,
            format!("loop stopped at n = {}, expected {expected_n}", run.n),
        ));
    }
    let er = eps.to_rat();
    let delta = run.x.format().delta();
    let bound = error_bound(run.n, &delta, &er);
    let reference = reference_value(series, &run.x.to_rat(), &er)?;
    let result = FixAlgoResult { value: run.acc, n: run.n, a_priori_bound: bound, reference };
    let tolerance = &result.a_priori_bound + &(&er / &Rat::from(ORACLE_SLACK_DIVISOR));
    let observed = result.observed_error();
    if observed > tolerance {
        return Err(violation(result.n, BoundKind::Headline, format!("observed error {observed} exceeds {tolerance}")));
    }
    Ok(result)
}

fn run_fixpoint(series: Series, x: &FixNum, eps: &FixNum) -> Result<FixAlgoResult, FixTrigError> {
    let expected_n = preconditions(series, x, eps)?;
    let mut run = FixRun::start(series, x, eps)?;
    while run.continues() {
        run.step()?;
    }
    conclude(series, run, eps, expected_n)
}

/// Fix-point cosine; the result is checked against its a-priori bound.
pub fn cos_fixpoint(x: &FixNum, eps: &FixNum) -> Result<FixAlgoResult, FixTrigError> {
    run_fixpoint(Series::Cos, x, eps)
}

/// Fix-point sine; the result is checked against its a-priori bound.
pub fn sin_fixpoint(x: &FixNum, eps: &FixNum) -> Result<FixAlgoResult, FixTrigError> {
    run_fixpoint(Series::Sin, x, eps)
}

/// Values after the first half of the term update.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfStep {
    pub tc: Rat,
    pub tcfp: Rat,
    pub delta: Rat,
}

/// One loop iteration of the paired run, taken at the loop head before the
/// term is added. `tc` is the signed exact term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: u64,
    pub tc: Rat,
    pub cs: Rat,
    pub tcfp: Rat,
    pub csfp: Rat,
    pub delta: Rat,
    pub delta_bound: Rat,
    pub ep: Rat,
    pub epfp: Rat,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub half_step: Option<HalfStep>,
}

/// Flat CSV row, without the half-step sub-record.
#[derive(Serialize)]
struct CsvRow<'a> {
    k: u64,
    tc: &'a Rat,
    cs: &'a Rat,
    tcfp: &'a Rat,
    csfp: &'a Rat,
    delta: &'a Rat,
    delta_bound: &'a Rat,
    ep: &'a Rat,
    epfp: &'a Rat,
}

/// Header line of [`traces_to_csv`].
pub const TRACE_CSV_HEADER: &str = "k,tc,cs,tcfp,csfp,delta,delta_bound,ep,epfp";

/// Writes records as CSV with rationals rendered `p/q`.
pub fn traces_to_csv(records: &[TraceRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if records.is_empty() {
        w.write_record(TRACE_CSV_HEADER.split(',')).expect("in-memory write");
    }
    for r in records {
        w.serialize(CsvRow {
            k: r.k,
            tc: &r.tc,
            cs: &r.cs,
            tcfp: &r.tcfp,
            csfp: &r.csfp,
            delta: &r.delta,
            delta_bound: &r.delta_bound,
            ep: &r.ep,
            epfp: &r.epfp,
        })
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Everything a paired run produces.
#[derive(Debug, Clone)]
pub struct PairedTrace {
    pub records: Vec<TraceRecord>,
    /// Gap of the last computed term, which is never added.
    pub final_delta: Rat,
    pub fixpoint: FixAlgoResult,
    pub exact: AlgoResult,
}

/// Constants of the gap recurrence for one grid step.
struct GapBounds {
    a: Rat,
    c: Rat,
    uniform: Rat,
    delta: Rat,
}

impl GapBounds {
    fn new(delta: Rat) -> GapBounds {
        let one = Rat::one();
        let a = &(&one + &delta) / &Rat::from(2);
        let c = &Rat::frac(3, 4) * &delta;
        let uniform = &(&Rat::frac(3, 2) * &delta) / &(&one - &delta);
        GapBounds { a, c, uniform, delta }
    }

    /// `3/2 delta (1 - a^(2k-1)) / (1 - delta)`
    fn accumulated(&self, k: u64) -> Rat {
        let one = Rat::one();
        let tail = &one - &self.a.pow((2 * k - 1) as u32);
        &(&(&Rat::frac(3, 2) * &self.delta) * &tail) / &(&one - &self.delta)
    }

    fn check_term(&self, k: u64, gap: &Rat, prev: Option<(&Rat, &Rat)>) -> Result<Rat, FixTrigError> {
        let g = gap.abs();
        let fail = |bound, limit: &Rat| violation(k, bound, format!("|{gap}| > {limit}"));
        match prev {
            None => {
                if g > self.c {
                    return Err(fail(BoundKind::FirstTerm, &self.c));
                }
            }
            Some((prev_gap, prev_half)) => {
                let half = &(&self.a * &prev_half.abs()) + &self.c;
                if g > half {
                    return Err(fail(BoundKind::HalfStep, &half));
                }
                let a2 = &self.a * &self.a;
                let rec = &(&a2 * &prev_gap.abs()) + &(&(&self.a + &Rat::one()) * &self.c);
                if g > rec {
                    return Err(fail(BoundKind::Recurrence, &rec));
                }
            }
        }
        let acc = self.accumulated(k);
        if g > acc {
            return Err(fail(BoundKind::Accumulated, &acc));
        }
        if g > self.uniform {
            return Err(fail(BoundKind::Uniform, &self.uniform));
        }
        Ok(acc)
    }
}

/// Runs the exact and fix-point loops side by side and checks every gap
/// inequality, the sum identity and the closing error chain.
pub fn paired_trace(series: Series, x: &FixNum, eps: &FixNum) -> Result<PairedTrace, FixTrigError> {
    let expected_n = preconditions(series, x, eps)?;
    let (xr, er) = (x.to_rat(), eps.to_rat());
    let bounds = GapBounds::new(x.format().delta());
    let mut exact = ZeroneRun::start(series, &xr, &er)?;
    let mut fix = FixRun::start(series, x, eps)?;
    let mut records: Vec<TraceRecord> = Vec::new();
    let mut k = 1u64;
    let final_delta = loop {
        exact.check_invariant()?;
        if exact.continues() != fix.continues() {
            return Err(violation(k, BoundKind::Lockstep, format!("ep = {}, epfp = {}", exact.ep, fix.epfp)));
        }
        let tc = exact.signed_term();
        let gap = &fix.term.to_rat() - &tc;
        let prev = records.last().map(|r| {
            let half = &r.half_step.as_ref().expect("set on every record").delta;
            (&r.delta, half)
        });
        let delta_bound = bounds.check_term(k, &gap, prev)?;
        if !fix.continues() {
            break gap;
        }
        let mut record = TraceRecord {
            k,
            tc: tc.clone(),
            cs: exact.acc.clone(),
            tcfp: fix.term.to_rat(),
            csfp: fix.acc.to_rat(),
            delta: gap.clone(),
            delta_bound,
            ep: exact.ep.clone(),
            epfp: fix.epfp.to_rat(),
            half_step: None,
        };
        exact.step();
        let half_fp = fix.step()?;
        let (a, _) = series.divisors(exact.n);
        let half_exact = &(&tc * &xr) / &Rat::from(a as i64);
        let half_gap = &half_fp.to_rat() - &half_exact;
        let half_limit = &(&bounds.a * &gap.abs()) + &bounds.c;
        if half_gap.abs() > half_limit {
            return Err(violation(k, BoundKind::HalfStep, format!("|{half_gap}| > {half_limit}")));
        }
        record.half_step = Some(HalfStep { tc: half_exact, tcfp: half_fp.to_rat(), delta: half_gap });
        records.push(record);
        k += 1;
    };

    let exact_result = exact.finish()?;
    let fix_acc = fix.acc.to_rat();
    let sum_gaps = records.iter().fold(Rat::zero(), |s, r| &s + &r.delta);
    if &fix_acc - &exact_result.value != sum_gaps {
        return Err(violation(k, BoundKind::SumIdentity, format!("acc gap differs from {sum_gaps}")));
    }
    let n = fix.n;
    let fixpoint = conclude(series, fix, eps, expected_n)?;
    let slack = &er / &Rat::from(ORACLE_SLACK_DIVISOR);
    let observed = fixpoint.observed_error();
    let abs_gaps = records.iter().fold(Rat::zero(), |s, r| &s + &r.delta.abs());
    let tight = &(&abs_gaps + &er) + &slack;
    if observed > tight {
        return Err(violation(n, BoundKind::ClosingChain, format!("{observed} > {tight}")));
    }
    if n >= 2 {
        let chain = &(&(&bounds.c + &(&Rat::from(n as i64 - 2) * &bounds.uniform)) + &er) + &slack;
        if observed > chain {
            return Err(violation(n, BoundKind::ClosingChain, format!("{observed} > {chain}")));
        }
    }
    Ok(PairedTrace { records, final_delta, fixpoint, exact: exact_result })
}

pub fn paired_trace_cos(x: &FixNum, eps: &FixNum) -> Result<PairedTrace, FixTrigError> {
    paired_trace(Series::Cos, x, eps)
}

pub fn paired_trace_sin(x: &FixNum, eps: &FixNum) -> Result<PairedTrace, FixTrigError> {
    paired_trace(Series::Sin, x, eps)
}
