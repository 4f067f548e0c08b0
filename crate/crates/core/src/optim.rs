//! Scalar root finding and minimization.

/// Root of a decreasing function on `[lo, hi]` with `f(lo) > 0`.
///
/// `f` may return `None` where it cannot be evaluated; such points are
/// treated as lying past the root. Steps are secant updates from the two most
/// recent finite samples when they land inside the bracket, otherwise
/// bisection. Returns the root and its function value once `|f| ≤ ftol` or
/// the bracket is narrower than `xtol`.
pub fn decreasing_root<F>(
    mut f: F,
    lo: f64,
    f_lo: f64,
    hi: f64,
    guess: Option<f64>,
    ftol: f64,
    xtol: f64,
    max_iter: usize,
) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> Option<f64>,
{
    debug_assert!(f_lo > 0.0);
    let (mut lo, mut f_lo, mut hi) = (lo, f_lo, hi);
    let mut f_hi: Option<f64> = None;
    let mut best = (lo, f_lo);
    let mut last: Option<(f64, f64)> = None;
    let mut prev: Option<(f64, f64)> = Some((lo, f_lo));
    let mut width = hi - lo;
    let mut stalled = 0;
    for iter in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let margin = 1e-3 * (hi - lo);
        let inside = |x: f64| x > lo + margin && x < hi - margin;
        let x = if iter == 0 && guess.is_some_and(inside) {
            guess.unwrap()
        } else if stalled >= 2 {
            stalled = 0;
            mid
        } else {
            let secant = match (last, prev) {
                (Some((x1, y1)), Some((x0, y0))) if y1 != y0 => Some(x1 - y1 * (x1 - x0) / (y1 - y0)),
                _ => None,
            };
            let falsi = f_hi.map(|fh| hi - fh * (hi - lo) / (fh - f_lo));
            match (secant.filter(|&x| inside(x)), falsi.filter(|&x| inside(x))) {
                (Some(x), _) | (None, Some(x)) => x,
                _ => mid,
            }
        };
        match f(x) {
            Some(y) => {
                if y.abs() < best.1.abs() {
                    best = (x, y);
                }
                if y.abs() <= ftol {
                    return Some((x, y));
                }
                if y > 0.0 {
                    lo = x;
                    f_lo = y;
                } else {
                    hi = x;
                    f_hi = Some(y);
                }
                prev = last;
                last = Some((x, y));
            }
            None => {
                hi = x;
                f_hi = None;
            }
        }
        if hi - lo > 0.5 * width {
            stalled += 1;
        } else {
            stalled = 0;
        }
        width = hi - lo;
        if width <= xtol {
            return Some(best);
        }
    }
    None
}

/// Brent's minimizer on `[a, b]` starting from an interior point `x` with value `fx`.
///
/// Returns the minimizer and its value. Converges when the bracket around the
/// current best point is within `tol`.
pub fn brent_minimize<F>(mut f: F, a: f64, b: f64, x: f64, fx: f64, tol: f64, max_iter: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let (mut x, mut w, mut v) = (x, x, x);
    let (mut fx, mut fw, mut fv) = (fx, fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = tol + 1e-12 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    (x, fx)
}
