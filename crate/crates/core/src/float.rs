//! Float helpers that `core` does not provide without `std`.

#[inline]
pub(crate) fn sqrt(v: f64) -> f64 {
    libm::sqrt(v)
}

#[inline]
pub(crate) fn sin_cos(theta: f64) -> (f64, f64) {
    (libm::sin(theta), libm::cos(theta))
}

#[inline]
pub(crate) fn floor(v: f64) -> f64 {
    libm::floor(v)
}

/// `n` evenly spaced values covering `[lo, hi]`, endpoints included.
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let step = if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    };
    (0..n).map(move |k| {
        if k + 1 == n && n > 1 {
            hi
        } else {
            lo + step * k as f64
        }
    })
}
