//! Small one-dimensional solvers shared by the resonance and fitting code.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Brent's method for a root of `f` bracketed by `[a, b]`.
pub fn brent_root<T, F>(mut f: F, a: T, b: T, tol: T, max_iter: usize) -> Result<T>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Search(format!(
            "root not bracketed on [{a:?}, {b:?}]"
        )));
    }
    let half = T::lit(0.5);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = T::two() * T::epsilon() * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = T::two() * xm * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (T::two() * xm * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if T::two() * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 { b + d } else { b + tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::Search(format!(
        "root search did not converge in {max_iter} iterations"
    )))
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Returns `(x, f(x))` with `x` located to within `tol`.
pub fn golden_section_max<T, F>(mut f: F, a: T, b: T, tol: T) -> (T, T)
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::two();
    let (mut a, mut b) = (a, b);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // The golden ratio shrinks the bracket by ~0.618 per step, so this cap
    // is only reached for tolerances below the floating point resolution.
    for _ in 0..400 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Vertex `(x, y)` of the parabola through three points.
pub fn parabola_vertex<T: Scalar>(x: [T; 3], y: [T; 3]) -> Option<(T, T)> {
    let d = (x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2]);
    if d == T::zero() {
        return None;
    }
    let a = (x[2] * (y[1] - y[0]) + x[1] * (y[0] - y[2]) + x[0] * (y[2] - y[1])) / d;
    let b = (x[2] * x[2] * (y[0] - y[1]) + x[1] * x[1] * (y[2] - y[0]) + x[0] * x[0] * (y[1] - y[2]))
        / d;
    let c = (x[1] * x[2] * (x[1] - x[2]) * y[0]
        + x[2] * x[0] * (x[2] - x[0]) * y[1]
        + x[0] * x[1] * (x[0] - x[1]) * y[2])
        / d;
    if a == T::zero() {
        return None;
    }
    let xv = -b / (T::two() * a);
    Some((xv, c - b * b / (T::lit(4.0) * a)))
}
