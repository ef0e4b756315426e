//! Bracketed scalar root finders.

use crate::error::{Error, Result};

/// Safeguarded Newton iteration on a sign-changing bracket `[lo, hi]`.
///
/// `f` returns the value and derivative. Steps that leave the bracket or
/// fail to halve it fall back to bisection.
pub fn newton_bisect<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::Bracket(format!("f({lo}) = {flo}, f({hi}) = {fhi}")));
    }
    if flo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    // Now f(lo) < 0 < f(hi), with lo and hi in either order.
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..max_iter {
        let newton_ok = dfx.is_finite() && dfx != 0.0 && {
            let step = x - fx / dfx;
            (step - lo) * (step - hi) < 0.0 && (2.0 * fx).abs() <= (dx_old * dfx).abs()
        };
        dx_old = dx;
        if newton_ok {
            dx = fx / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        if dx.abs() <= xtol * (1.0 + x.abs()) {
            return Ok(x);
        }
        let (v, d) = f(x);
        fx = v;
        dfx = d;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo).abs() <= xtol * (1.0 + x.abs()) {
            return Ok(x);
        }
    }
    Ok(x)
}

/// Brent's method for a fallible function on a sign-changing bracket.
///
/// Stops when the bracket is narrower than `xtol * (1 + |x|)` or when
/// `|f| <= ftol`.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64, ftol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fa0 = f(a)?;
    let fb0 = f(b)?;
    brent_with_values(f, a, b, fa0, fb0, xtol, ftol, max_iter)
}

/// [`brent`] when the endpoint values are already known.
#[allow(clippy::too_many_arguments)]
pub fn brent_with_values<F>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!("f({a}) = {fa}, f({b}) = {fb}")));
    }
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
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol * (1.0 + b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb.abs() <= ftol {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
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
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_bisect_sqrt2() {
        let x = newton_bisect(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, 1e-15, 100).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn newton_bisect_decreasing_function() {
        let x = newton_bisect(|x: f64| (-x.powi(3) + 8.0, -3.0 * x * x), 0.0, 10.0, 1e-15, 200).unwrap();
        assert!((x - 2.0).abs() < 1e-13);
    }

    #[test]
    fn newton_bisect_bad_derivative_still_converges() {
        let x = newton_bisect(|x: f64| (x.powi(3) - 0.001, 0.0), -1.0, 1.0, 1e-15, 300).unwrap();
        assert!((x - 0.1).abs() < 1e-13);
    }

    #[test]
    fn brent_cosine() {
        let x = brent(|x: f64| Ok(x.cos() - x), 0.0, 1.0, 1e-15, 0.0, 200).unwrap();
        assert!((x - 0.739_085_133_215_160_6).abs() < 1e-14);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        assert!(brent(|x: f64| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 0.0, 50).is_err());
        assert!(newton_bisect(|x: f64| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-12, 50).is_err());
    }
}
