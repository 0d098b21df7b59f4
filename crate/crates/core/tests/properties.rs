use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use veritrig::exact::factorial;
use veritrig::fixtrig::{error_bound, paired_trace};
use veritrig::floatrepro::cos_code_in_c;
use veritrig::oracle::{self, Series};
use veritrig::{FixFormat, FixNum, Rat};

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Canonical `(num, den)` with `den > 0`.
fn canon(n: i128, d: i128) -> (i128, i128) {
    let g = gcd(n, d);
    let (n, d) = (n / g, d / g);
    if d < 0 {
        (-n, -d)
    } else {
        (n, d)
    }
}

fn parts(r: &Rat) -> (i128, i128) {
    (r.numer().try_into().unwrap(), r.denom().try_into().unwrap())
}

fn rat() -> impl Strategy<Value = Rat> {
    (-10_000i64..=10_000, 1i64..=10_000).prop_map(|(n, d)| Rat::frac(n, d))
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    rat().prop_filter("non-zero", |r| !r.is_zero())
}

fn format_strategy() -> impl Strategy<Value = Arc<FixFormat>> {
    prop_oneof![Just(256i64), Just(1000), Just(65536), Just(3), Just(10)]
        .prop_map(|k| FixFormat::new(k, &Rat::from(-64), &Rat::from(64)).unwrap())
}

/// Format plus two scaled operands within `[-bound, bound]`.
fn operands(bound: i64) -> impl Strategy<Value = (Arc<FixFormat>, FixNum, FixNum)> {
    format_strategy()
        .prop_flat_map(move |f| {
            let k: i64 = f.k().try_into().unwrap();
            let lim = bound * k;
            (Just(f), -lim..=lim, -lim..=lim)
        })
        .prop_map(|(f, a, b)| {
            let (a, b) = (FixNum::from_scaled(a, &f).unwrap(), FixNum::from_scaled(b, &f).unwrap());
            (f, a, b)
        })
}

/// Nearest multiple of `1/k` to `r`, ties to even, by floor and comparison.
fn nearest_scaled(r: &Rat, k: &BigInt) -> BigInt {
    let scaled = r * &Rat::from_integer(k.clone());
    let lo = scaled.floor();
    let frac = &scaled - &Rat::from_integer(lo.clone());
    let half = Rat::frac(1, 2);
    if frac > half || (frac == half && &lo % 2 != BigInt::from(0)) {
        lo + 1
    } else {
        lo
    }
}

proptest! {
    #[test]
    fn add_mul_match_fraction_model(a in rat(), b in rat()) {
        let ((an, ad), (bn, bd)) = (parts(&a), parts(&b));
        prop_assert_eq!(parts(&(&a + &b)), canon(an * bd + bn * ad, ad * bd));
        prop_assert_eq!(parts(&(&a - &b)), canon(an * bd - bn * ad, ad * bd));
        prop_assert_eq!(parts(&(&a * &b)), canon(an * bn, ad * bd));
    }

    #[test]
    fn div_matches_fraction_model(a in rat(), b in nonzero_rat()) {
        let ((an, ad), (bn, bd)) = (parts(&a), parts(&b));
        prop_assert_eq!(parts(&(&a / &b)), canon(an * bd, ad * bn));
    }

    #[test]
    fn field_laws(a in rat(), b in rat(), c in nonzero_rat()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &(-&a), Rat::zero());
        prop_assert_eq!(&c * &c.recip().unwrap(), Rat::one());
    }

    #[test]
    fn ordering_matches_cross_multiplication(a in rat(), b in rat()) {
        let ((an, ad), (bn, bd)) = (parts(&a), parts(&b));
        prop_assert_eq!(a.cmp(&b), (an * bd).cmp(&(bn * ad)));
    }

    #[test]
    fn floor_ceil_galois(a in rat(), m in -20_000i64..=20_000) {
        let (fl, ce) = (Rat::from_integer(a.floor()), Rat::from_integer(a.ceil()));
        prop_assert!(fl <= a && a < &fl + &Rat::one());
        prop_assert!(&ce - &Rat::one() < a && a <= ce);
        // m <= floor(a) iff m <= a; ceil(a) <= m iff a <= m
        let m = Rat::from(m);
        prop_assert_eq!(m <= fl, m <= a);
        prop_assert_eq!(ce <= m, a <= m);
    }

    #[test]
    fn decimal_round_trip(a in rat(), digits in 0usize..12) {
        let back: Rat = a.to_decimal(digits).parse().unwrap();
        let tol = &Rat::from(5) * &Rat::pow10_neg(digits as u32 + 1);
        prop_assert!((&back - &a).abs() <= tol);
    }

    #[test]
    fn display_parse_round_trip(a in rat()) {
        prop_assert_eq!(a.to_string().parse::<Rat>().unwrap(), a);
    }

    #[test]
    fn fix_add_sub_exact((_f, a, b) in operands(32)) {
        prop_assert_eq!(a.add(&b).unwrap().to_rat(), &a.to_rat() + &b.to_rat());
        prop_assert_eq!(a.sub(&b).unwrap().to_rat(), &a.to_rat() - &b.to_rat());
    }

    #[test]
    fn fix_mul_half_delta((f, a, b) in operands(8)) {
        let exact = &a.to_rat() * &b.to_rat();
        let got = a.mul(&b).unwrap();
        prop_assert_eq!(got.scaled(), &nearest_scaled(&exact, f.k()));
        prop_assert!((&got.to_rat() - &exact).abs() <= &f.delta() / &Rat::from(2));
    }

    #[test]
    fn fix_div_half_delta((f, a, b) in operands(8)) {
        prop_assume!(!b.is_zero());
        let exact = &a.to_rat() / &b.to_rat();
        match a.div(&b) {
            Ok(got) => {
                prop_assert_eq!(got.scaled(), &nearest_scaled(&exact, f.k()));
                prop_assert!((&got.to_rat() - &exact).abs() <= &f.delta() / &Rat::from(2));
            }
            Err(_) => prop_assert!(exact.abs() > Rat::from(64)),
        }
    }

    #[test]
    fn fix_mul_by_integer_exact((f, a, _b) in operands(4), j in -16i64..=16) {
        let jn = FixNum::from_int(j, &f).unwrap();
        prop_assert_eq!(a.mul(&jn).unwrap().to_rat(), &a.to_rat() * &Rat::from(j));
    }

    #[test]
    fn rounding_kernel(f in format_strategy(), a in rat(), b in rat()) {
        let (a, b) = (&a / &Rat::from(200), &b / &Rat::from(200));
        let (fa, fb) = (FixNum::from_rat(&a, &f).unwrap(), FixNum::from_rat(&b, &f).unwrap());
        if a <= b {
            prop_assert!(fa <= fb);
        }
        prop_assert_eq!(FixNum::from_rat(&fa.to_rat(), &f).unwrap(), fa.clone());
        prop_assert_eq!(FixNum::from_rat(&-&a, &f).unwrap(), fa.neg().unwrap());
        prop_assert_eq!(fa.scaled(), &nearest_scaled(&a, f.k()));
    }

    #[test]
    fn error_bound_monotone(n in 1u64..50, k1 in 2i64..10_000, k2 in 2i64..10_000, e in 1i64..1000) {
        let eps = Rat::frac(1, e);
        let (small, large) = (Rat::frac(1, k1.max(k2)), Rat::frac(1, k1.min(k2)));
        prop_assert!(error_bound(n, &small, &eps) <= error_bound(n, &large, &eps));
        prop_assert!(error_bound(n, &small, &eps) <= error_bound(n + 1, &small, &eps));
    }

    #[test]
    fn unbounded_parity(x in rat(), e in 2i64..1_000_000) {
        let x = &x / &Rat::from(2500);
        let eps = Rat::frac(1, e);
        prop_assert_eq!(oracle::cos_unbounded(&-&x, &eps).unwrap(), oracle::cos_unbounded(&x, &eps).unwrap());
        prop_assert_eq!(oracle::sin_unbounded(&-&x, &eps).unwrap(), -&oracle::sin_unbounded(&x, &eps).unwrap());
    }

    #[test]
    fn zerone_iterations_minimal(x in rat(), e in 2i64..100_000_000) {
        let x = &x / &Rat::from(10_000);
        let eps = Rat::frac(1, e);
        let c = oracle::cos_zerone(&x, &eps).unwrap();
        let s = oracle::sin_zerone(&x, &eps).unwrap();
        let brute = |series: Series| (1u64..).find(|&n| &factorial(series.order(n)) * &eps >= Rat::one()).unwrap();
        prop_assert_eq!(c.iterations, brute(Series::Cos));
        prop_assert_eq!(s.iterations, brute(Series::Sin));
    }

    #[test]
    fn binary32_cos_deterministic_and_bounded_near_zero(x in -3.0f32..3.0) {
        let v = cos_code_in_c(x, 1e-6).unwrap();
        prop_assert_eq!(v.to_bits(), cos_code_in_c(x, 1e-6).unwrap().to_bits());
        prop_assert!((v as f64 - (x as f64).cos()).abs() < 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pi_iteration_law(p in 1i64..100, q in 100i64..1000) {
        let eps = Rat::frac(p, q);
        let res = oracle::pi_leibniz(&eps).unwrap();
        let want = (&(&Rat::from(2) / &eps) - &Rat::frac(3, 2)).ceil().max(BigInt::from(0));
        prop_assert_eq!(BigInt::from(res.iterations), want);
    }

    #[test]
    fn paired_trace_never_violates_bounds(k in 256i64..5000, xr in -1000i64..=1000, e in 2i64..200, sin in any::<bool>()) {
        let f = FixFormat::new(k, &Rat::from(-8), &Rat::from(64)).unwrap();
        let x = FixNum::from_rat(&Rat::frac(xr, 1000), &f).unwrap();
        let eps = FixNum::from_rat(&Rat::frac(1, e), &f).unwrap();
        let series = if sin { Series::Sin } else { Series::Cos };
        let trace = paired_trace(series, &x, &eps).unwrap();
        prop_assert_eq!(trace.exact.iterations, trace.fixpoint.n);
    }
}
