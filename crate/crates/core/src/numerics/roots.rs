//! Bracketed scalar root finding.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Finds a root of `f` in `[lo, hi]`. Bisects until the bracket is no wider
/// than `tol`, then takes one secant step on the final bracket if it stays
/// inside it.
pub fn find_root_bracketed<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> Result<T> {
    if !(tol > T::zero()) {
        return Err(Error::Config(format!("root tolerance must be positive, got {tol}")));
    }
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::Bracket { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
    }
    let mut fb = fb;
    // The bracket halves every step, so this also terminates when `tol`
    // sits below the scalar's resolution.
    for _ in 0..2200 {
        if b - a <= tol {
            break;
        }
        let mid = a + (b - a) * T::lit(0.5);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    let secant = b - fb * (b - a) / (fb - fa);
    if secant.is_finite() && secant >= a && secant <= b {
        Ok(secant)
    } else {
        Ok(a + (b - a) * T::lit(0.5))
    }
}

/// Scans `[lo, hi]` in `steps` equal cells and returns the first root found.
pub fn first_root_in<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, steps: usize, tol: T) -> Result<T> {
    let h = (hi - lo) / T::from_count(steps.max(1));
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=steps.max(1) {
        let x1 = lo + h * T::from_count(i);
        let f1 = f(x1);
        if f0 == T::zero() {
            return Ok(x0);
        }
        if f0.signum() != f1.signum() {
            return find_root_bracketed(&f, x0, x1, tol);
        }
        x0 = x1;
        f0 = f1;
    }
    Err(Error::Bracket { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() })
}
