//! Naive binary32 Taylor cosine and the scan that shows it escaping `[-1, 1]`.
//!
//! Rust `f32` arithmetic is IEEE-754 binary32 with round-to-nearest-even:
//! every `+ - * /` rounds once to single precision, and the compiler never
//! contracts `a * b + c` into a fused multiply-add or keeps wider
//! intermediates. The expressions below are written in the exact shape and
//! association of the C original, so results are reproducible bit for bit.

use thiserror::Error;

pub const DEFAULT_ITERATION_CAP: u64 = 1_000_000;

/// Default scan: `x = 0, 0.05, ..., 30` at accuracy `1e-6`.
pub const DEFAULT_SCAN: ScanParams = ScanParams { min: 0.0, max: 30.0, step: 0.05, eps: 1e-6 };

/// Expected `(x, value)` rows for small arguments.
pub const REFERENCE_SMALL_ROWS: [(f32, f32); 3] = [(0.0, 1.000000), (0.05, 0.9987502), (0.1, 0.9950042)];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReproError {
    #[error("no convergence for x = {x:e} within {cap} iterations")]
    IterationCapExceeded { x: f32, cap: u64 },
    #[error("invalid scan parameters: {0}")]
    InvalidScan(String),
}

/// Taylor cosine evaluated term by term in binary32.
///
/// ```text
/// cs = stc = dn = 1
/// while |stc| > eps:
///     stc = -stc * x * x / (dn * (dn + 1))
///     cs  = cs + stc
///     dn  = dn + 2
/// ```
pub fn cos_code_in_c(x: f32, eps: f32) -> Result<f32, ReproError> {
    cos_code_in_c_capped(x, eps, DEFAULT_ITERATION_CAP)
}

pub fn cos_code_in_c_capped(x: f32, eps: f32, cap: u64) -> Result<f32, ReproError> {
    let mut cs: f32 = 1.0;
    let mut stc: f32 = 1.0;
    let mut dn: f32 = 1.0;
    let mut iterations = 0u64;
    while stc.abs() > eps {
        if iterations == cap {
            return Err(ReproError::IterationCapExceeded { x, cap });
        }
        stc = -stc * x * x / (dn * (dn + 1.0));
        cs += stc;
        dn += 2.0;
        iterations += 1;
    }
    Ok(cs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanParams {
    pub min: f32,
    pub max: f32,
    pub step: f32,
    pub eps: f32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub x: f32,
    pub value: f32,
}

/// `for (x = min; x <= max; x = x + step)` with `x` accumulated in binary32.
// negated comparisons so that NaN parameters are rejected too
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn scan_table(params: ScanParams, cap: u64) -> Result<Vec<ScanRow>, ReproError> {
    let ScanParams { min, max, step, eps } = params;
    if !(step > 0.0) || !step.is_finite() {
        return Err(ReproError::InvalidScan(format!("step must be positive, got {step:e}")));
    }
    if !(min <= max) {
        return Err(ReproError::InvalidScan(format!("need min <= max, got {min:e} > {max:e}")));
    }
    if !(eps > 0.0) {
        return Err(ReproError::InvalidScan(format!("eps must be positive, got {eps:e}")));
    }
    let mut rows = Vec::new();
    let mut x = min;
    while x <= max {
        rows.push(ScanRow { x, value: cos_code_in_c_capped(x, eps, cap)? });
        let next = x + step;
        if next == x {
            return Err(ReproError::InvalidScan(format!("step {step:e} vanishes at x = {x:e}")));
        }
        x = next;
    }
    Ok(rows)
}

/// C `printf("%e")`: six fractional digits and a signed exponent of at
/// least two digits.
pub fn format_c_exp(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{v:.6e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// One `"%e  %e  \n"` line per row.
pub fn rows_to_printf(rows: &[ScanRow]) -> String {
    rows.iter().map(|r| format!("{}  {}  \n", format_c_exp(r.x as f64), format_c_exp(r.value as f64))).collect()
}

/// `x,value` CSV with shortest round-trip binary32 renderings.
pub fn rows_to_csv(rows: &[ScanRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "value"]).expect("in-memory write");
    for r in rows {
        w.write_record([r.x.to_string(), r.value.to_string()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
