//! Integer-order Bessel functions of the first and second kind for real
//! arguments.
//!
//! `J_n` uses its power series when `x < n + 4` and Miller's backward
//! recurrence (normalised with `J_0 + 2 Σ J_2k = 1`) elsewhere. `Y_0` and `Y_1`
//! come from the Neumann expansions over the same backward-recurrence table,
//! and higher orders from the upward recurrence, which is stable for `Y`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest order supported.
pub const MAX_ORDER: i32 = 12;
/// Largest argument supported.
pub const MAX_ARGUMENT: f64 = 200.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Which Bessel family a derivative refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
}

fn check_order(n: i32) -> Result<()> {
    if !(0..=MAX_ORDER).contains(&n) {
        return Err(Error::Domain(format!("Bessel order {n} outside 0..={MAX_ORDER}")));
    }
    Ok(())
}

fn check_argument<T: Real>(x: T, strictly_positive: bool) -> Result<()> {
    let xf = x.to_f64_lossy();
    if !xf.is_finite() || xf > MAX_ARGUMENT {
        return Err(Error::Domain(format!("Bessel argument {xf} outside [0, {MAX_ARGUMENT}]")));
    }
    if strictly_positive && xf <= 0.0 {
        return Err(Error::Domain(format!("Y_n requires x > 0, got {xf}")));
    }
    if xf < 0.0 {
        return Err(Error::Domain(format!("Bessel argument must be non-negative, got {xf}")));
    }
    Ok(())
}

/// First-kind Bessel function `J_n(x)`, `0 <= n <= 12`, `0 <= x <= 200`.
pub fn bessel_j<T: Real>(n: i32, x: T) -> Result<T> {
    check_order(n)?;
    check_argument(x, false)?;
    Ok(bessel_j_unchecked(n, x))
}

/// Second-kind Bessel function `Y_n(x)`, `0 <= n <= 12`, `0 < x <= 200`.
pub fn bessel_y<T: Real>(n: i32, x: T) -> Result<T> {
    check_order(n)?;
    check_argument(x, true)?;
    Ok(bessel_y_unchecked(n, x))
}

/// Derivative `C_n'(x) = (C_{n-1}(x) - C_{n+1}(x)) / 2` with `C_{-1} = -C_1`.
pub fn bessel_deriv<T: Real>(kind: BesselKind, n: i32, x: T) -> Result<T> {
    check_order(n)?;
    let eval = |m: i32| -> Result<T> {
        let sign = if m < 0 { -T::one() } else { T::one() };
        let m = m.abs();
        let v = match kind {
            BesselKind::J => {
                check_argument(x, false)?;
                bessel_j_unchecked(m, x)
            }
            BesselKind::Y => {
                check_argument(x, true)?;
                bessel_y_unchecked(m, x)
            }
        };
        Ok(sign * v)
    };
    Ok((eval(n - 1)? - eval(n + 1)?) * T::lit(0.5))
}

/// `J_n(x)` for any integer order (negative orders via `J_{-n} = (-1)^n J_n`),
/// without range checks. Used by the field evaluators on validated input.
pub(crate) fn bessel_j_signed<T: Real>(n: i32, x: T) -> T {
    let v = bessel_j_unchecked(n.abs(), x);
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}

pub(crate) fn bessel_j_unchecked<T: Real>(n: i32, x: T) -> T {
    if x == T::zero() {
        return if n == 0 { T::one() } else { T::zero() };
    }
    if x < T::from_i32(n + 4).unwrap() {
        series_j(n, x)
    } else {
        miller_table(x, n as usize)[n as usize]
    }
}

fn bessel_y_unchecked<T: Real>(n: i32, x: T) -> T {
    let (y0, y1) = neumann_y01(x);
    if n == 0 {
        return y0;
    }
    let (mut prev, mut cur) = (y0, y1);
    for k in 1..n {
        let next = T::from_i32(2 * k).unwrap() / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn series_j<T: Real>(n: i32, x: T) -> T {
    let half = x * T::lit(0.5);
    let q = -half * half;
    // (x/2)^n / n!
    let mut term = T::one();
    for k in 1..=n {
        term = term * half / T::from_i32(k).unwrap();
    }
    let mut sum = term;
    for m in 1..200 {
        term = term * q / (T::from_i32(m).unwrap() * T::from_i32(m + n).unwrap());
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() * T::lit(0.01) {
            break;
        }
    }
    sum
}

/// `J_0 ..= J_top` (and beyond, up to the recurrence start) by Miller's
/// backward recurrence. The returned table is long enough for the Neumann
/// sums used by `Y_0` and `Y_1`.
fn miller_table<T: Real>(x: T, top: usize) -> Vec<T> {
    let xf = x.to_f64_lossy();
    let start_f = xf + 40.0 + 10.0 * xf.cbrt();
    let mut start = (start_f.ceil() as usize).max(top + 20);
    if start % 2 == 1 {
        start += 1;
    }
    let big = T::max_value().sqrt();
    let inv_big = T::one() / big;
    let mut table = vec![T::zero(); start + 2];
    table[start + 1] = T::zero();
    table[start] = T::min_positive_value().sqrt();
    for k in (1..=start).rev() {
        let v = T::from_count(2 * k) / x * table[k] - table[k + 1];
        table[k - 1] = v;
        if v.abs() > big {
            for t in table[k - 1..].iter_mut() {
                *t = *t * inv_big;
            }
        }
    }
    let mut norm = table[0];
    let mut k = 2;
    while k <= start {
        norm = norm + T::lit(2.0) * table[k];
        k += 2;
    }
    for t in table.iter_mut() {
        *t = *t / norm;
    }
    table
}

fn neumann_y01<T: Real>(x: T) -> (T, T) {
    let two_over_pi = T::FRAC_2_PI();
    let table = miller_table(x, 2);
    let log_term = (x * T::lit(0.5)).ln() + T::lit(EULER_GAMMA);
    let mut s0 = T::zero();
    let mut s1 = T::zero();
    let mut k = 1usize;
    while 2 * k + 1 < table.len() {
        let kf = T::from_count(k);
        let sign = if k.is_multiple_of(2) { T::one() } else { -T::one() };
        s0 = s0 + sign * table[2 * k] / kf;
        s1 = s1 + sign * (table[2 * k - 1] - table[2 * k + 1]) / kf;
        k += 1;
    }
    let y0 = two_over_pi * (log_term * table[0] - T::lit(2.0) * s0);
    let y1 = -two_over_pi * (table[0] / x - log_term * table[1] - s1);
    (y0, y1)
}
