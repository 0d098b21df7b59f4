#![allow(dead_code)]

use veritrig::Rat;

/// Pi to 50 decimals.
pub const PI_DIGITS: &str = "3.14159265358979323846264338327950288419716939937510";

/// `arctan(1/m)` summed until the first omitted term is below `tol`.
fn arctan_inv(m: i64, tol: &Rat) -> Rat {
    let m2 = Rat::from(m * m);
    let mut power = Rat::frac(1, m);
    let mut sum = Rat::zero();
    let mut k = 0i64;
    loop {
        let term = &power / &Rat::from(2 * k + 1);
        if term < *tol {
            return sum;
        }
        sum = if k % 2 == 0 { &sum + &term } else { &sum - &term };
        power = &power / &m2;
        k += 1;
    }
}

/// `16 arctan(1/5) - 4 arctan(1/239)` to within `10^-digits`.
pub fn machin_pi(digits: u32) -> Rat {
    let tol = &Rat::pow10_neg(digits) / &Rat::from(32);
    &(&Rat::from(16) * &arctan_inv(5, &tol)) - &(&Rat::from(4) * &arctan_inv(239, &tol))
}
