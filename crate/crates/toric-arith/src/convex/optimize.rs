//! One-dimensional searches for concave functions.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximum of a unimodal `f` on `[a, b]`, endpoints included.
pub fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    if a >= b {
        return (a, f(a));
    }
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if hi - lo <= 1e-14 * (1.0 + lo.abs() + hi.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a, b] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Boundary of `{f >= 0}` between `inside` (where `f >= 0`) and `outside`,
/// refined to floating-point resolution; the returned point satisfies `f >= 0`.
pub fn bisect_boundary(f: impl Fn(f64) -> f64, inside: f64, outside: f64) -> f64 {
    let (mut a, mut b) = (inside, outside);
    for _ in 0..2000 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if f(mid) >= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

/// The interval `{x in [lo, hi] : f(x) >= 0}` for concave `f`.
pub fn superlevel_interval(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    if lo > hi {
        return None;
    }
    let (xm, fm) = golden_max(&f, lo, hi);
    if fm.is_nan() || fm < 0.0 {
        return None;
    }
    let left = if f(lo) >= 0.0 {
        lo
    } else {
        bisect_boundary(&f, xm, lo)
    };
    let right = if f(hi) >= 0.0 {
        hi
    } else {
        bisect_boundary(&f, xm, hi)
    };
    Some((left, right))
}
