use crate::scalar::Scalar;

/// Outcome of a bounded one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineMinimum<T> {
    pub x: T,
    pub value: T,
    pub iterations: usize,
    /// Bracket shrank below the requested tolerance.
    pub converged: bool,
}

/// Golden-section search for the minimum of `f` on `[lo, hi]`.
///
/// The bracket is shrunk until its width is at most `x_tol`; the interior
/// estimate is then compared with both endpoints so that boundary minima are
/// returned exactly. Ties go to the smaller abscissa.
pub fn golden_section<T, E, F>(
    mut f: F,
    lo: T,
    hi: T,
    x_tol: T,
    max_iter: usize,
) -> Result<LineMinimum<T>, E>
where
    T: Scalar,
    F: FnMut(T) -> Result<T, E>,
{
    let f_lo = f(lo)?;
    if !(hi > lo) {
        return Ok(LineMinimum {
            x: lo,
            value: f_lo,
            iterations: 0,
            converged: true,
        });
    }
    let f_hi = f(hi)?;

    let ratio = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iterations = 0;

    while b - a > x_tol && iterations < max_iter {
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    let converged = b - a <= x_tol;

    let (mut x, mut value) = if fc <= fd { (c, fc) } else { (d, fd) };
    if f_lo <= value {
        x = lo;
        value = f_lo;
    }
    if f_hi < value {
        x = hi;
        value = f_hi;
    }
    Ok(LineMinimum {
        x,
        value,
        iterations,
        converged,
    })
}

/// Golden-section search over `ln t` for `t` in `[lo, hi]`, `lo > 0`.
///
/// Liquidation horizons span several orders of magnitude; searching the
/// logarithm gives a uniform relative resolution `x_tol` in `t`. The returned
/// `x` is in the original variable.
pub fn golden_section_log<T, E, F>(
    mut f: F,
    lo: T,
    hi: T,
    x_tol: T,
    max_iter: usize,
) -> Result<LineMinimum<T>, E>
where
    T: Scalar,
    F: FnMut(T) -> Result<T, E>,
{
    let (log_lo, log_hi) = (lo.ln(), hi.ln());
    let found = golden_section(
        |s: T| {
            // pin the endpoints so boundary solutions are exact
            let t = if s <= log_lo {
                lo
            } else if s >= log_hi {
                hi
            } else {
                s.exp()
            };
            f(t)
        },
        log_lo,
        log_hi,
        x_tol,
        max_iter,
    )?;
    let x = if found.x <= log_lo {
        lo
    } else if found.x >= log_hi {
        hi
    } else {
        found.x.exp()
    };
    Ok(LineMinimum { x, ..found })
}
