//! Wigner 3j and 6j symbols by the Racah formulas.
//!
//! All angular momenta are passed doubled (`2j`, `2m`) so half-integers are
//! exact. Factorials are accumulated in log space, which keeps the symbols
//! finite for j up to a few hundred.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const TABLE_LEN: usize = 1024;

fn log_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; TABLE_LEN];
        for i in 1..TABLE_LEN {
            t[i] = t[i - 1] + (i as f64).ln();
        }
        t
    })
}

/// ln(k!) for a doubled argument `k2 = 2k` (must be even and nonnegative).
fn lf(k2: i32) -> f64 {
    debug_assert!(k2 >= 0 && k2 % 2 == 0);
    log_factorials()[(k2 / 2) as usize]
}

fn triangle(a: i32, b: i32, c: i32) -> bool {
    c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0
}

/// ln Δ(abc) = ln[(a+b−c)!(a−b+c)!(−a+b+c)!/(a+b+c+1)!]
fn log_delta(a: i32, b: i32, c: i32) -> f64 {
    lf(a + b - c) + lf(a - b + c) + lf(-a + b + c) - lf(a + b + c + 2)
}

/// Cancellation ratio (largest term over result) above which the floating
/// sum is replaced by exact rational arithmetic.
const CANCELLATION_LIMIT: f64 = 1e3;

/// Signed sum of `exp(terms)` with a common scale to avoid overflow. Returns
/// `None` when cancellation between terms has eaten too many digits.
fn signed_log_sum(terms: &[(f64, f64)]) -> Option<f64> {
    let max = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Some(0.0);
    }
    let scaled: f64 = terms.iter().map(|&(s, l)| s * (l - max).exp()).sum();
    if terms.len() > 1 && scaled.abs() * CANCELLATION_LIMIT < 1.0 {
        return None;
    }
    Some(scaled * max.exp())
}

fn big_factorial(k2: i32) -> BigInt {
    (1..=(k2 / 2) as u64).fold(BigInt::one(), |acc, i| acc * i)
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).abs().ln();
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact evaluation of Σ sign_k · num_k/den_k, returned as (sign, ln|sum|).
fn exact_sum(terms: &[(bool, Vec<i32>, Vec<i32>)]) -> (f64, f64) {
    let mut acc = BigRational::zero();
    for (negative, num, den) in terms {
        let n = num.iter().fold(BigInt::one(), |a, &k| a * big_factorial(k));
        let d = den.iter().fold(BigInt::one(), |a, &k| a * big_factorial(k));
        let t = BigRational::new(n, d);
        if *negative {
            acc -= t;
        } else {
            acc += t;
        }
    }
    if acc.is_zero() {
        return (0.0, f64::NEG_INFINITY);
    }
    let sign = if acc.is_negative() { -1.0 } else { 1.0 };
    (sign, ln_big(acc.numer()) - ln_big(acc.denom()))
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3), all arguments doubled.
pub fn wigner3j(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    if m1 + m2 + m3 != 0 || !triangle(j1, j2, j3) {
        return 0.0;
    }
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    if (j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (j3 + m3) % 2 != 0 {
        return 0.0;
    }
    if m1 == 0 && m2 == 0 && ((j1 + j2 + j3) / 2) % 2 == 1 {
        return 0.0;
    }
    let pre = 0.5
        * (log_delta(j1, j2, j3)
            + lf(j1 + m1)
            + lf(j1 - m1)
            + lf(j2 + m2)
            + lf(j2 - m2)
            + lf(j3 + m3)
            + lf(j3 - m3));
    // k runs over even doubled values keeping all factorial arguments ≥ 0
    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let dens = |k: i32| [k, j3 - j2 + k + m1, j3 - j1 + k - m2, j1 + j2 - j3 - k, j1 - k - m1, j2 - k + m2];
    let mut terms = Vec::new();
    let mut k = kmin;
    while k <= kmax {
        let l: f64 = dens(k).iter().map(|&x| lf(x)).sum();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        terms.push((sign, pre - l));
        k += 2;
    }
    let phase_exp = (j1 - j2 - m3) / 2;
    let phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    match signed_log_sum(&terms) {
        Some(v) => phase * v,
        None => {
            let exact: Vec<_> = (kmin..=kmax)
                .step_by(2)
                .map(|k| ((k / 2) % 2 == 1, vec![], dens(k).to_vec()))
                .collect();
            let (sign, ln) = exact_sum(&exact);
            phase * sign * (pre + ln).exp()
        }
    }
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}, all arguments doubled.
pub fn wigner6j(j1: i32, j2: i32, j3: i32, j4: i32, j5: i32, j6: i32) -> f64 {
    if !(triangle(j1, j2, j3) && triangle(j1, j5, j6) && triangle(j4, j2, j6) && triangle(j4, j5, j3)) {
        return 0.0;
    }
    let pre = 0.5 * (log_delta(j1, j2, j3) + log_delta(j1, j5, j6) + log_delta(j4, j2, j6) + log_delta(j4, j5, j3));
    let a = [j1 + j2 + j3, j1 + j5 + j6, j4 + j2 + j6, j4 + j5 + j3];
    let b = [j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4];
    let tmin = *a.iter().max().unwrap();
    let tmax = *b.iter().min().unwrap();
    let dens = |t: i32| {
        let mut d: Vec<i32> = a.iter().map(|&ai| t - ai).collect();
        d.extend(b.iter().map(|&bi| bi - t));
        d
    };
    let mut terms = Vec::new();
    let mut t = tmin;
    while t <= tmax {
        let l = lf(t + 2) - dens(t).iter().map(|&x| lf(x)).sum::<f64>();
        let sign = if (t / 2) % 2 == 0 { 1.0 } else { -1.0 };
        terms.push((sign, pre + l));
        t += 2;
    }
    match signed_log_sum(&terms) {
        Some(v) => v,
        None => {
            let exact: Vec<_> = (tmin..=tmax)
                .step_by(2)
                .map(|t| ((t / 2) % 2 == 1, vec![t + 2], dens(t)))
                .collect();
            let (sign, ln) = exact_sum(&exact);
            sign * (pre + ln).exp()
        }
    }
}
