//! Seeded property suites.
//!
//! Every check draws its inputs from its own ChaCha stream derived from the
//! suite seed, evaluates them in parallel and reports outcomes in sample
//! order, so a report is a pure function of `(suite, seed, samples)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{factorial, Rat};
use crate::fixpoint::{parse_format, FixFormat, FixNum};
use crate::fixtrig::{self, error_bound, ORACLE_SLACK_DIVISOR};
use crate::oracle::{self, Series};

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Failures listed individually per check; the rest are only counted.
pub const MAX_REPORTED_FAILURES: usize = 10;

/// Formats swept by the fix-point suites.
pub const GRID_FORMATS: [&str; 3] = ["1/2^8:[-8,64]", "1/2^16:[-8,1024]", "1/10^6:[-8,1024]"];

pub const IDENTITY_SAMPLES: usize = 100;
pub const PI_LAW_SAMPLES: usize = 50;
pub const ORACLE_CONTRACT_SAMPLES: usize = 200;
pub const GRID_X_COUNT: usize = 50;
pub const AXIOM_PAIRS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Trigonometric identities on the exact oracles.
    Identities,
    /// Iteration laws and a-priori error bounds.
    Bounds,
    /// Per-iteration gap bounds of the paired exact/fix-point trace.
    Appendix,
    /// Fix-point arithmetic axioms on random operand pairs.
    Axioms,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Identities, Suite::Bounds, Suite::Appendix, Suite::Axioms];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Bounds => "bounds",
            Suite::Appendix => "appendix",
            Suite::Axioms => "axioms",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}, expected one of identities, bounds, appendix, axioms"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Overrides every check's default sample count.
    pub samples: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: DEFAULT_SEED, samples: None }
    }
}

impl VerifyOptions {
    fn count(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub passed: usize,
    pub failed: usize,
    /// The first [`MAX_REPORTED_FAILURES`] failures in sample order.
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn violations(&self) -> usize {
        self.checks.iter().map(|c| c.failed).sum()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn run_suite(suite: Suite, options: &VerifyOptions) -> SuiteReport {
    let checks = match suite {
        Suite::Identities => identities(options),
        Suite::Bounds => bounds(options),
        Suite::Appendix => appendix(options),
        Suite::Axioms => axioms(options),
    };
    SuiteReport { suite: suite.name().to_string(), seed: options.seed, checks }
}

type Outcome = Result<(), String>;

fn evaluate<S, F>(name: impl Into<String>, samples: &[S], f: F) -> CheckReport
where
    S: Sync,
    F: Fn(&S) -> Outcome + Sync + Send,
{
    let outcomes: Vec<Outcome> = samples.par_iter().map(f).collect();
    let failures: Vec<Failure> = outcomes
        .into_iter()
        .enumerate()
        .filter_map(|(index, o)| o.err().map(|detail| Failure { index, detail }))
        .collect();
    CheckReport {
        name: name.into(),
        samples: samples.len(),
        passed: samples.len() - failures.len(),
        failed: failures.len(),
        failures: failures.into_iter().take(MAX_REPORTED_FAILURES).collect(),
    }
}

/// Independent stream per check so checks do not perturb each other.
fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

fn within(label: &str, lhs: &Rat, tol: &Rat) -> Outcome {
    ensure(lhs.abs() <= *tol, || format!("{label}: |{}| > {}", lhs.to_decimal(12), tol.to_decimal(12)))
}

/// Random rational in `[-r, r]` with a random denominator.
pub fn sample_symmetric(rng: &mut impl Rng, r: i64) -> Rat {
    let den: i64 = rng.gen_range(1..=100_000);
    let num = rng.gen_range(-r * den..=r * den);
    Rat::frac(num, den)
}

/// Random rational in `(0, 1)` whose magnitude is `10^-u` for `u` uniform in
/// `[lo, hi]`.
pub fn sample_eps(rng: &mut impl Rng, lo: f64, hi: f64) -> Rat {
    let u: f64 = rng.gen_range(lo..=hi);
    let den: i64 = rng.gen_range(1_000_000_000..10_000_000_000);
    let num = ((10f64.powf(-u) * den as f64).round() as i64).clamp(1, den - 1);
    Rat::frac(num, den)
}

fn cos_u(x: &Rat, eps: &Rat) -> Result<Rat, String> {
    oracle::cos_unbounded(x, eps).map_err(|e| e.to_string())
}

fn sin_u(x: &Rat, eps: &Rat) -> Result<Rat, String> {
    oracle::sin_unbounded(x, eps).map_err(|e| e.to_string())
}

fn r(n: i64) -> Rat {
    Rat::from(n)
}

struct IdentitySample {
    x: Rat,
    y: Rat,
    eps: Rat,
    pi_eps: Rat,
}

fn identity_samples(options: &VerifyOptions, id: u64, arg: i64) -> Vec<IdentitySample> {
    let mut rng = stream(options.seed, id);
    (0..options.count(IDENTITY_SAMPLES))
        .map(|_| IdentitySample {
            x: sample_symmetric(&mut rng, arg),
            y: sample_symmetric(&mut rng, arg),
            eps: sample_eps(&mut rng, 1.0, 8.0),
            pi_eps: sample_eps(&mut rng, 1.0, 2.0),
        })
        .collect()
}

fn identities(options: &VerifyOptions) -> Vec<CheckReport> {
    let mut reports = Vec::new();

    let samples = identity_samples(options, 1, 1);
    reports.push(evaluate("pythagorean", &samples, |s| {
        let c = oracle::cos_zerone(&s.x, &s.eps).map_err(|e| e.to_string())?.value;
        let sn = oracle::sin_zerone(&s.x, &s.eps).map_err(|e| e.to_string())?.value;
        let lhs = &(&(&c * &c) + &(&sn * &sn)) - &Rat::one();
        let tol = &(&r(2) * &s.eps) + &(&r(2) * &(&s.eps * &s.eps));
        within("c^2 + s^2 - 1", &lhs, &tol)
    }));

    let samples = identity_samples(options, 2, 4);
    reports.push(evaluate("addition", &samples, |s| {
        let (cx, cy) = (cos_u(&s.x, &s.eps)?, cos_u(&s.y, &s.eps)?);
        let (sx, sy) = (sin_u(&s.x, &s.eps)?, sin_u(&s.y, &s.eps)?);
        let lhs = &cos_u(&(&s.x + &s.y), &s.eps)? - &(&(&cx * &cy) - &(&sx * &sy));
        within("cos(x+y) - (cos x cos y - sin x sin y)", &lhs, &(&r(5) * &s.eps))
    }));

    let samples = identity_samples(options, 3, 4);
    reports.push(evaluate("double-angle", &samples, |s| {
        let c = cos_u(&s.x, &s.eps)?;
        let lhs = &cos_u(&(&r(2) * &s.x), &s.eps)? - &(&(&r(2) * &(&c * &c)) - &Rat::one());
        within("cos 2x - (2 cos^2 x - 1)", &lhs, &(&r(6) * &s.eps))
    }));

    let samples = identity_samples(options, 4, 1);
    reports.push(evaluate("periodicity", &samples, |s| {
        let p = oracle::pi_leibniz(&s.pi_eps).map_err(|e| e.to_string())?.value;
        let lhs = &cos_u(&(&s.x + &(&r(2) * &p)), &s.eps)? - &cos_u(&s.x, &s.eps)?;
        let tol = &(&r(2) * &s.eps) + &(&r(2) * &s.pi_eps);
        within("cos(x + 2p) - cos x", &lhs, &tol)
    }));

    let samples = identity_samples(options, 5, 4);
    reports.push(evaluate("half-angle-squared", &samples, |s| {
        let h = cos_u(&(&s.x / &r(2)), &s.eps)?;
        let lhs = &(&h * &h) - &(&(&Rat::one() + &cos_u(&s.x, &s.eps)?) / &r(2));
        within("cos^2(x/2) - (1 + cos x)/2", &lhs, &(&r(3) * &s.eps))
    }));

    let samples = identity_samples(options, 6, 4);
    reports.push(evaluate("parity", &samples, |s| {
        let neg = -&s.x;
        ensure(cos_u(&neg, &s.eps)? == cos_u(&s.x, &s.eps)?, || format!("cos(-x) != cos x at x = {}", s.x))?;
        ensure(sin_u(&neg, &s.eps)? == -&sin_u(&s.x, &s.eps)?, || format!("sin(-x) != -sin x at x = {}", s.x))
    }));

    let samples = identity_samples(options, 7, 1);
    reports.push(evaluate("oracle-self-consistency", &samples, |s| {
        let fine = &s.eps / &r(100);
        let tol = &s.eps + &fine;
        let c = oracle::cos_taylor(&s.x, &s.eps).map_err(|e| e.to_string())?.value;
        within("cos_taylor - cos_unbounded", &(&c - &cos_u(&s.x, &fine)?), &tol)?;
        let sn = oracle::sin_taylor(&s.x, &s.eps).map_err(|e| e.to_string())?.value;
        within("sin_taylor - sin_unbounded", &(&sn - &sin_u(&s.x, &fine)?), &tol)
    }));

    reports
}

/// `max(0, ceil(2/eps - 3/2))`.
pub fn pi_iteration_law(eps: &Rat) -> BigInt {
    let v = &(&r(2) / eps) - &Rat::frac(3, 2);
    v.ceil().max(BigInt::zero())
}

/// Smallest `N >= 1` with `order(N)! >= 1/eps`, by direct factorials.
fn brute_force_terms(series: Series, eps: &Rat) -> u64 {
    (1..).find(|&n| &factorial(series.order(n)) * eps >= Rat::one()).expect("eps > 0")
}

fn bounds(options: &VerifyOptions) -> Vec<CheckReport> {
    let mut reports = Vec::new();

    let mut rng = stream(options.seed, 11);
    let eps: Vec<Rat> = (0..options.count(PI_LAW_SAMPLES)).map(|_| sample_eps(&mut rng, 0.0, 3.0)).collect();
    reports.push(evaluate("pi-iteration-law", &eps, |e| {
        let res = oracle::pi_leibniz(e).map_err(|err| err.to_string())?;
        let want = pi_iteration_law(e);
        ensure(BigInt::from(res.iterations) == want, || {
            format!("eps = {e}: {} iterations, expected {want}", res.iterations)
        })
    }));

    let mut rng = stream(options.seed, 12);
    let pairs: Vec<(Rat, Rat)> = (0..options.count(ORACLE_CONTRACT_SAMPLES))
        .map(|_| (sample_symmetric(&mut rng, 1), sample_eps(&mut rng, 0.0, 8.0)))
        .collect();
    type Algo = fn(&Rat, &Rat) -> Result<oracle::AlgoResult, oracle::OracleError>;
    let algos: [(&str, Series, Algo); 4] = [
        ("cos_taylor", Series::Cos, oracle::cos_taylor),
        ("cos_zerone", Series::Cos, oracle::cos_zerone),
        ("sin_taylor", Series::Sin, oracle::sin_taylor),
        ("sin_zerone", Series::Sin, oracle::sin_zerone),
    ];
    reports.push(evaluate("oracle-contract", &pairs, |(x, e)| {
        let slack = e / &r(ORACLE_SLACK_DIVISOR);
        let tol = e + &slack;
        for (name, series, algo) in &algos {
            let value = algo(x, e).map_err(|err| err.to_string())?.value;
            let reference = oracle::unbounded(*series, x, &slack).map_err(|err| err.to_string())?;
            within(&format!("{name}({x}, {e})"), &(&value - &reference), &tol)?;
        }
        Ok(())
    }));

    let points = grid(options.count(GRID_X_COUNT), options.seed);
    reports.push(evaluate("fixpoint-headline", &points, |p| {
        let res = match p.series {
            Series::Cos => fixtrig::cos_fixpoint(&p.x, &p.eps),
            Series::Sin => fixtrig::sin_fixpoint(&p.x, &p.eps),
        }
        .map_err(|e| format!("{p}: {e}"))?;
        let er = p.eps.to_rat();
        let want_n = brute_force_terms(p.series, &er);
        ensure(res.n == want_n, || format!("{p}: n = {}, brute force gives {want_n}", res.n))?;
        let tol = &error_bound(res.n, &p.x.format().delta(), &er) + &(&er / &r(ORACLE_SLACK_DIVISOR));
        ensure(res.observed_error() <= tol, || {
            format!("{p}: observed {} > {}", res.observed_error().to_decimal(12), tol.to_decimal(12))
        })
    }));

    reports
}

fn appendix(options: &VerifyOptions) -> Vec<CheckReport> {
    let points = grid(options.count(GRID_X_COUNT), options.seed);
    let report = evaluate("paired-trace", &points, |p| {
        let trace = fixtrig::paired_trace(p.series, &p.x, &p.eps).map_err(|e| format!("{p}: {e}"))?;
        ensure(trace.exact.iterations == trace.fixpoint.n, || {
            format!("{p}: exact run took {} terms, fix-point {}", trace.exact.iterations, trace.fixpoint.n)
        })?;
        ensure(trace.records.len() as u64 + 1 == trace.fixpoint.n, || {
            format!("{p}: {} trace records for n = {}", trace.records.len(), trace.fixpoint.n)
        })
    });
    vec![report]
}

/// One fix-point evaluation in the sweep.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub series: Series,
    pub x: FixNum,
    pub eps: FixNum,
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(x = {}, eps = {}, {})", self.series.name(), self.x.to_rat(), self.eps.to_rat(), self.x.format())
    }
}

pub fn grid_formats() -> Vec<Arc<FixFormat>> {
    GRID_FORMATS.iter().map(|s| parse_format(s).expect("valid grid format")).collect()
}

/// `1/4`, `1/16` and the grid value nearest `1/1000`, raised to `delta`
/// when the grid is too coarse to hold it.
pub fn grid_eps(format: &Arc<FixFormat>) -> Vec<FixNum> {
    let milli = FixNum::from_rat(&Rat::frac(1, 1000), format).expect("1/1000 in range");
    let milli = if milli.is_zero() { FixNum::from_scaled(1, format).expect("delta in range") } else { milli };
    let quarter = FixNum::exact(&Rat::frac(1, 4), format).expect("1/4 representable");
    let sixteenth = FixNum::exact(&Rat::frac(1, 16), format).expect("1/16 representable");
    vec![quarter, sixteenth, milli]
}

/// `-1`, `0`, `1` and seeded random grid values in `[-1, 1]`, `count` in all.
pub fn grid_xs(format: &Arc<FixFormat>, count: usize, rng: &mut impl Rng) -> Vec<FixNum> {
    let k = format.k().to_i64().expect("grid step fits in i64");
    let mut xs: Vec<FixNum> =
        [-k, 0, k].into_iter().map(|m| FixNum::from_scaled(m, format).expect("|x| <= 1")).collect();
    xs.truncate(count);
    while xs.len() < count {
        xs.push(FixNum::from_scaled(rng.gen_range(-k..=k), format).expect("|x| <= 1"));
    }
    xs
}

/// Grid formats x `count` arguments x three accuracies x {cos, sin}.
pub fn grid(count: usize, seed: u64) -> Vec<GridPoint> {
    let mut points = Vec::new();
    for (i, format) in grid_formats().iter().enumerate() {
        let mut rng = stream(seed, 100 + i as u64);
        let xs = grid_xs(format, count, &mut rng);
        for eps in grid_eps(format) {
            for x in &xs {
                for series in [Series::Cos, Series::Sin] {
                    points.push(GridPoint { series, x: x.clone(), eps: eps.clone() });
                }
            }
        }
    }
    points
}

struct Bounds {
    k: BigInt,
    inf_m: BigInt,
    sup_m: BigInt,
    delta: Rat,
    half_delta: Rat,
}

impl Bounds {
    fn new(format: &Arc<FixFormat>) -> Bounds {
        let k = format.k().clone();
        let scale = Rat::from_integer(k.clone());
        let delta = format.delta();
        Bounds {
            inf_m: (&format.inf() * &scale).floor(),
            sup_m: (&format.sup() * &scale).floor(),
            half_delta: &delta / &r(2),
            delta,
            k,
        }
    }

    fn in_range(&self, v: &Rat) -> bool {
        let scaled = v * &Rat::from_integer(self.k.clone());
        Rat::from_integer(self.inf_m.clone()) <= scaled && scaled <= Rat::from_integer(self.sup_m.clone())
    }

    fn is_multiple(&self, v: &Rat) -> bool {
        (v * &Rat::from_integer(self.k.clone())).is_integer()
    }
}

/// Scaled value with a log-uniform magnitude, so that both small operands
/// and operands near the range ends occur.
fn sample_m(rng: &mut impl Rng, b: &Bounds) -> BigInt {
    let hi = b.sup_m.clone().max(-b.inf_m.clone());
    let bits = hi.bits();
    let width = rng.gen_range(0..=bits);
    let limit = (BigInt::from(1) << width).min(hi);
    let limit = limit.to_i64().expect("scaled bound fits in i64");
    BigInt::from(rng.gen_range(-limit..=limit)).clamp(b.inf_m.clone(), b.sup_m.clone())
}

fn fx(m: BigInt, format: &Arc<FixFormat>) -> FixNum {
    FixNum::from_scaled(m, format).expect("sampled in range")
}

/// Expected result of a binary operation: the exact value if in range.
fn check_rounded(label: &str, got: Result<FixNum, impl fmt::Display>, exact: &Rat, b: &Bounds) -> Outcome {
    match (got, b.in_range(exact)) {
        (Ok(v), true) => {
            let err = &v.to_rat() - exact;
            within(&format!("{label}: error of {exact}"), &err, &b.half_delta)?;
            ensure(!b.is_multiple(exact) || err.is_zero(), || {
                format!("{label}: {exact} representable but got {}", v.to_rat())
            })
        }
        (Err(_), false) => Ok(()),
        (Ok(v), false) => Err(format!("{label}: {exact} out of range but got {}", v.to_rat())),
        (Err(e), true) => Err(format!("{label}: {exact} in range but failed: {e}")),
    }
}

fn nearest_even_half(t: &BigInt) -> BigInt {
    // t + 1/2 rounds to whichever of t, t + 1 is even
    if t.is_even() {
        t.clone()
    } else {
        t + 1
    }
}

fn axioms(options: &VerifyOptions) -> Vec<CheckReport> {
    let mut reports = Vec::new();
    for (i, format) in grid_formats().iter().enumerate() {
        let b = Bounds::new(format);
        let count = options.count(AXIOM_PAIRS);
        let mut rng = stream(options.seed, 200 + i as u64);
        let pairs: Vec<(BigInt, BigInt, i64)> =
            (0..count).map(|_| (sample_m(&mut rng, &b), sample_m(&mut rng, &b), rng.gen_range(-64..=64))).collect();
        let tag = |name: &str| format!("{name}[{format}]");

        reports.push(evaluate(tag("add-sub-exact"), &pairs, |(ma, mb, _)| {
            let (a, c) = (fx(ma.clone(), format), fx(mb.clone(), format));
            let (ar, cr) = (a.to_rat(), c.to_rat());
            for (label, got, exact) in [("a + b", a.add(&c), &ar + &cr), ("a - b", a.sub(&c), &ar - &cr)] {
                match (got, b.in_range(&exact)) {
                    (Ok(v), true) if v.to_rat() == exact => {}
                    (Err(_), false) => {}
                    (got, _) => return Err(format!("{label} with a = {ar}, b = {cr}: {got:?}")),
                }
            }
            Ok(())
        }));

        reports.push(evaluate(tag("mul-div-half-delta"), &pairs, |(ma, mb, _)| {
            let (a, c) = (fx(ma.clone(), format), fx(mb.clone(), format));
            let (ar, cr) = (a.to_rat(), c.to_rat());
            check_rounded(&format!("{ar} * {cr}"), a.mul(&c), &(&ar * &cr), &b)?;
            if cr.is_zero() {
                return ensure(a.div(&c).is_err(), || format!("{ar} / 0 did not fail"));
            }
            check_rounded(&format!("{ar} / {cr}"), a.div(&c), &(&ar / &cr), &b)
        }));

        reports.push(evaluate(tag("exact-when-representable"), &pairs, |(ma, _, j)| {
            let a = fx(ma.clone(), format);
            let Ok(jn) = FixNum::from_int(*j, format) else { return Ok(()) };
            let prod = &a.to_rat() * &r(*j);
            if b.in_range(&prod) {
                let got = a.mul(&jn).map_err(|e| e.to_string())?;
                ensure(got.to_rat() == prod, || format!("{} * {j} gave {}", a.to_rat(), got.to_rat()))?;
                if *j != 0 {
                    let back = got.div(&jn).map_err(|e| e.to_string())?;
                    ensure(back == a, || format!("({prod}) / {j} gave {}", back.to_rat()))?;
                }
            }
            Ok(())
        }));

        reports.push(evaluate(tag("half-even-ties"), &pairs, |(ma, _, _)| {
            // a = (2t + 1) delta; a * 1/2 and a / 2 both sit at (t + 1/2) delta
            let t: BigInt = ma / 2u32;
            let odd: BigInt = &t * 2u32 + 1u32;
            if odd < b.inf_m || odd > b.sup_m {
                return Ok(());
            }
            let a = fx(odd.clone(), format);
            let half = FixNum::exact(&Rat::frac(1, 2), format).map_err(|e| e.to_string())?;
            let two = FixNum::from_int(2, format).map_err(|e| e.to_string())?;
            let want = nearest_even_half(&t);
            for (label, got) in [("a * 1/2", a.mul(&half)), ("a / 2", a.div(&two))] {
                let got = got.map_err(|e| e.to_string())?;
                ensure(*got.scaled() == want, || {
                    format!("{label} with a = {odd}/{}: m = {}, expected {want}", b.k, got.scaled())
                })?;
            }
            let Ok(neg) = a.neg() else { return Ok(()) };
            let got = neg.mul(&half).map_err(|e| e.to_string())?;
            ensure(*got.scaled() == -&want, || format!("-a * 1/2 not symmetric for a = {odd}/{}", b.k))
        }));

        reports.push(evaluate(tag("boundary-overflow"), &pairs, |(ma, _, _)| {
            let a = fx(ma.clone(), format);
            let step = fx(BigInt::from(1), format);
            let sup = fx(b.sup_m.clone(), format);
            let inf = fx(b.inf_m.clone(), format);
            ensure(sup.add(&step).is_err(), || "sup + delta did not overflow".into())?;
            ensure(inf.sub(&step).is_err(), || "inf - delta did not overflow".into())?;
            let gap = &b.sup_m - ma;
            if gap <= b.sup_m && gap >= b.inf_m {
                let d = fx(gap.clone(), format);
                ensure(a.add(&d).map_err(|e| e.to_string())? == sup, || {
                    format!("{} + ({}) != sup", a.to_rat(), d.to_rat())
                })?;
                if gap < b.sup_m {
                    let over = fx(gap + 1, format);
                    ensure(a.add(&over).is_err(), || format!("{} + ({}) did not overflow", a.to_rat(), over.to_rat()))?;
                }
            }
            let big = FixNum::from_rat(&(&b.delta * &Rat::from_integer(&b.sup_m + 1)), format);
            ensure(big.is_err(), || "sup + delta accepted by from_rat".into())
        }));
    }
    reports
}
