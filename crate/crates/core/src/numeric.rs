//! One-dimensional bracketing root finder and golden-section minimizer.
//!
//! Both keep the bracket explicit: callers in the event locator and the
//! continuation refinement need the final interval, not only a point.

/// Result of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    /// Best root estimate (the endpoint with smaller |f|).
    pub root: f64,
    pub f_root: f64,
    /// Final bracket, `lo <= hi`, with `f(lo)` and `f(hi)` of opposite sign
    /// (or one of them exactly zero).
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Brent's method on `[a, b]`, which must bracket a sign change.
///
/// Stops once the bracket is narrower than `x_tol` or `|f| <= f_tol`
/// (pass `f_tol = 0.0` to stop on width only). Returns `None` if the
/// endpoints do not bracket a root or an evaluation is not finite.
pub fn brent<F>(mut f: F, a: f64, b: f64, x_tol: f64, f_tol: f64, max_iter: usize) -> Option<Bracket>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    if fa == 0.0 {
        return Some(finish(a, fa, a, a, 0));
    }
    if fb == 0.0 {
        return Some(finish(b, fb, b, b, 0));
    }
    if fa.signum() == fb.signum() {
        return None;
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=max_iter {
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

        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * x_tol;
        let m = 0.5 * (c - b);
        if fb == 0.0 {
            return Some(finish(b, fb, b, b, iter));
        }
        if m.abs() <= tol || fb.abs() <= f_tol {
            let (lo, hi) = if b < c { (b, c) } else { (c, b) };
            return Some(finish(b, fb, lo, hi, iter));
        }

        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return None;
        }
    }

    let (lo, hi) = if b < c { (b, c) } else { (c, b) };
    Some(finish(b, fb, lo, hi, max_iter))
}

fn finish(root: f64, f_root: f64, lo: f64, hi: f64, iterations: usize) -> Bracket {
    Bracket { root, f_root, lo, hi, iterations }
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
///
/// Returns `(x_min, f(x_min))`. `f` may fail; a failing probe aborts the
/// search with that error.
pub fn golden_section_min<F, E>(mut f: F, a: f64, b: f64, x_tol: f64, max_iter: usize) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..max_iter {
        if (b - a).abs() <= x_tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}
