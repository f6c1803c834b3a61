//! Bracketed scalar root finding used by the landmark and threshold
//! computations. Bisection only: every root we chase is bracketed by
//! construction, and robustness beats iteration count at desk scale.

use crate::scalar::Real;

/// Bisect `f` on `[lo, hi]`. Requires a sign change (or an exact zero at an
/// endpoint); returns `None` when the bracket is invalid. Stops when the
/// bracket width drops below `tol` or cannot shrink further.
pub(crate) fn bisect<F: Real>(
    f: impl Fn(F) -> F,
    mut lo: F,
    mut hi: F,
    tol: F,
    max_iter: usize,
) -> Option<F> {
    if !(lo < hi) {
        return None;
    }
    let mut flo = f(lo);
    if flo == F::zero() {
        return Some(lo);
    }
    let fhi = f(hi);
    if fhi == F::zero() {
        return Some(hi);
    }
    if (flo > F::zero()) == (fhi > F::zero()) {
        return None;
    }
    let two = F::one() + F::one();
    let mut mid = (lo + hi) / two;
    for _ in 0..max_iter {
        let fm = f(mid);
        if fm == F::zero() {
            return Some(mid);
        }
        if (fm > F::zero()) == (flo > F::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        let next = (lo + hi) / two;
        if hi - lo <= tol || next == mid || next == lo || next == hi {
            return Some(next);
        }
        mid = next;
    }
    Some(mid)
}

/// Scan `[lo, hi]` with the given step and return the sub-brackets on which
/// `f` changes sign.
pub(crate) fn sign_change_brackets<F: Real>(
    f: impl Fn(F) -> F,
    lo: F,
    hi: F,
    step: F,
) -> Vec<(F, F)> {
    let mut out = Vec::new();
    if !(step > F::zero()) || !(hi > lo) {
        return out;
    }
    let mut a = lo;
    let mut fa = f(a);
    let mut i = 1usize;
    loop {
        let mut b = lo + step * F::from_usize(i).expect("step index");
        if b > hi {
            b = hi;
        }
        let fb = f(b);
        // A zero at the left endpoint belongs to the previous bracket
        // (or to the caller when it sits exactly at `lo`).
        if (i == 1 && fa == F::zero())
            || fb == F::zero()
            || (fa != F::zero() && (fa > F::zero()) != (fb > F::zero()))
        {
            out.push((a, b));
        }
        if b >= hi {
            break;
        }
        a = b;
        fa = fb;
        i += 1;
    }
    out
}
