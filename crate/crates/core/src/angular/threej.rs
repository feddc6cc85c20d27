//! Wigner 3j and Clebsch-Gordan coefficients. Arguments are doubled
//! (`tj = 2j`, `tm = 2m`) so half-integers stay integral.
//!
//! The Racah sum is evaluated in exact rational arithmetic; the only rounding
//! is the final conversion and square root.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn factorial(n: i64) -> &'static BigInt {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![BigInt::one()];
        for k in 1..=200u32 {
            let next = &v[k as usize - 1] * BigInt::from(k);
            v.push(next);
        }
        v
    });
    &t[n as usize]
}

fn frac(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// True when `(j1, j2, j3)` obey the triangle rule with integral sum.
pub fn triangle(tj1: i32, tj2: i32, tj3: i32) -> bool {
    tj3 <= tj1 + tj2 && tj3 >= (tj1 - tj2).abs() && (tj1 + tj2 + tj3) % 2 == 0
}

pub fn three_j(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
    if tm1 + tm2 + tm3 != 0 || !triangle(tj1, tj2, tj3) {
        return 0.0;
    }
    for (tj, tm) in [(tj1, tm1), (tj2, tm2), (tj3, tm3)] {
        if tj < 0 || tm.abs() > tj || (tj + tm) % 2 != 0 {
            return 0.0;
        }
    }
    let h = |x: i32| (x / 2) as i64;
    let (a, b, c) = (h(tj1 + tj2 - tj3), h(tj1 - tj2 + tj3), h(-tj1 + tj2 + tj3));
    let total = h(tj1 + tj2 + tj3);
    let delta = frac(factorial(a) * factorial(b) * factorial(c), factorial(total + 1).clone());
    let pre = factorial(h(tj1 + tm1))
        * factorial(h(tj1 - tm1))
        * factorial(h(tj2 + tm2))
        * factorial(h(tj2 - tm2))
        * factorial(h(tj3 + tm3))
        * factorial(h(tj3 - tm3));
    // t ranges over the nonnegative arguments of the six factorials
    let x1 = h(tj3 - tj2 + tm1);
    let x2 = h(tj3 - tj1 - tm2);
    let y1 = a;
    let y2 = h(tj1 - tm1);
    let y3 = h(tj2 + tm2);
    let lo = 0.max(-x1).max(-x2);
    let hi = y1.min(y2).min(y3);
    let mut sum = BigRational::zero();
    for t in lo..=hi {
        let den = factorial(t) * factorial(x1 + t) * factorial(x2 + t) * factorial(y1 - t) * factorial(y2 - t) * factorial(y3 - t);
        let term = frac(BigInt::one(), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let squared = delta * BigRational::from_integer(pre) * &sum * &sum;
    let magnitude = squared.to_f64().unwrap_or(0.0).sqrt();
    let phase_exp = (tj1 - tj2 - tm3) / 2;
    let phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    phase * sign * magnitude
}

/// `<j1 m1 j2 m2 | J M>`.
pub fn clebsch_gordan(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tj: i32, tm: i32) -> f64 {
    let e = (tj1 - tj2 + tm) / 2;
    let phase = if e.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * ((tj + 1) as f64).sqrt() * three_j(tj1, tj2, tj, tm1, tm2, -tm)
}
