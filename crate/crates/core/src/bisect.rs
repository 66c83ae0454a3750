//! Derivative-free root bracketing.

/// A bracketed root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    /// Midpoint of the final bracket.
    pub x: f64,
    /// Function value at `x`.
    pub value: f64,
    /// Width of the final bracket.
    pub width: f64,
    pub iterations: u32,
}

/// The endpoints do not bracket a sign change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoSignChange {
    pub f_lo: f64,
    pub f_hi: f64,
}

const MAX_ITERATIONS: u32 = 200;

/// Bisection on `[lo, hi]` until the bracket is narrower than `tol` or an
/// exact zero is hit. Either orientation of the sign change is accepted.
pub fn bisect(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<Root, NoSignChange> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            value: fa,
            width: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            value: fb,
            width: 0.0,
            iterations: 0,
        });
    }
    if !(fa.signum() != fb.signum()) || fa.is_nan() || fb.is_nan() {
        return Err(NoSignChange { f_lo: fa, f_hi: fb });
    }
    let rising = fa < 0.0;
    let mut iterations = 0;
    loop {
        let mid = a + (b - a) / 2.0;
        // the bracket cannot shrink any further in floating point
        let stalled = mid <= a || mid >= b;
        let fm = f(mid);
        iterations += 1;
        if fm == 0.0 {
            return Ok(Root {
                x: mid,
                value: fm,
                width: 0.0,
                iterations,
            });
        }
        if (fm < 0.0) == rising {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < tol || iterations >= MAX_ITERATIONS || stalled {
            let x = a + (b - a) / 2.0;
            return Ok(Root {
                x,
                value: f(x),
                width: b - a,
                iterations,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_linear_root() {
        let r = bisect(|x| x - 0.3, -1.0, 1.0, 1e-12).unwrap();
        assert!((r.x - 0.3).abs() < 1e-12);
        assert!(r.width < 1e-12);
    }

    #[test]
    fn decreasing_function() {
        let r = bisect(|x| 0.25 - x * x * x, 0.0, 1.0, 1e-10).unwrap();
        assert!((r.x - libm::cbrt(0.25)).abs() < 1e-10);
    }

    #[test]
    fn symmetric_bracket_hits_zero() {
        let r = bisect(|x| x, -0.5, 0.5, 1e-10).unwrap();
        assert_eq!(r.x, 0.0);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn no_sign_change() {
        let e = bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-10).unwrap_err();
        assert_eq!(
            e,
            NoSignChange {
                f_lo: 2.0,
                f_hi: 2.0
            }
        );
    }
}
