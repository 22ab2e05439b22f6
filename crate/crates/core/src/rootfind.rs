//! Small scalar root finders shared by the spectral modules.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Plain bisection on a sign change, down to `width` or machine resolution.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, width: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Domain {
            what: "bracket without sign change, lo",
            value: lo,
        });
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= width || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence {
        routine: "bisection",
        iterations: MAX_ITER,
    })
}

/// Outcome of [`hybrid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub root: f64,
    pub residual: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Bisection down to `coarse` width, then Newton steps kept inside the
/// bracket; any step that leaves the bracket is replaced by a bisection.
pub fn hybrid<F, G>(f: F, df: G, lo: f64, hi: f64, coarse: f64, tol: f64) -> Result<Refined>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return Err(Error::Domain {
            what: "bracket without sign change, lo",
            value: lo,
        });
    }
    for (x, fx) in [(lo, flo), (hi, fhi)] {
        if fx == 0.0 {
            return Ok(Refined {
                root: x,
                residual: 0.0,
                lo: x,
                hi: x,
            });
        }
    }
    let mut iterations = 0;
    while hi - lo > coarse {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(Refined {
                root: mid,
                residual: 0.0,
                lo: mid,
                hi: mid,
            });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let mut x = 0.5 * (lo + hi);
    loop {
        iterations += 1;
        if iterations > MAX_ITER {
            return Err(Error::NoConvergence {
                routine: "hybrid Newton",
                iterations,
            });
        }
        let fx = f(x);
        if fx == 0.0 {
            lo = x;
            hi = x;
            break;
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let d = df(x);
        let mut next = x - fx / d;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x.abs().max(1.0)
            || hi - lo <= 4.0 * f64::EPSILON * x.abs().max(1.0)
        {
            break;
        }
    }
    // tighten to a few ulps around the converged point
    let delta = 0.25 * tol;
    let (a, b) = (x - delta, x + delta);
    let (fa, fb) = (f(a), f(b));
    if fa.signum() != fb.signum() && (b - a) < hi - lo {
        lo = a;
        hi = b;
    }
    Ok(Refined {
        root: x,
        residual: f(x).abs(),
        lo,
        hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn hybrid_matches_cosine_root() {
        let r = hybrid(|x: f64| x.cos(), |x: f64| -x.sin(), 1.0, 2.0, 1e-6, 1e-12).unwrap();
        assert!((r.root - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(r.hi - r.lo < 1e-12);
    }

    #[test]
    fn rejects_bracket_without_sign_change() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
        assert!(hybrid(|x| x * x + 1.0, |x| 2.0 * x, -1.0, 1.0, 1e-6, 1e-12).is_err());
    }
}
