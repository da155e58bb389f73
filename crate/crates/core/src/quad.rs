//! Adaptive Simpson quadrature.
//!
//! Each panel is compared against its two halves; the panel is accepted
//! once `|S(left) + S(right) - S(whole)| <= 15 * tol`, and the accepted value
//! carries the Richardson correction `(S2 - S1) / 15`.

const MAX_DEPTH: u32 = 60;

/// Integrates `f` over `[a, b]` to the given absolute tolerance.
///
/// Returns 0 for an empty interval. Reversed bounds flip the sign.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, abs_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    if b < a {
        return -adaptive_simpson(f, b, a, abs_tol);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(&f, a, b, fa, fm, fb, whole, abs_tol, MAX_DEPTH)
}

/// Integrates `f` over `[a, b]` to a relative tolerance, using a coarse
/// estimate of the integral to fix the absolute target.
pub fn adaptive_simpson_rel<F>(f: F, a: f64, b: f64, rel_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let coarse = adaptive_simpson(&f, a, b, 1e-3 * (b - a).abs().max(1.0));
    let tol = (rel_tol * coarse.abs()).max(f64::MIN_POSITIVE);
    adaptive_simpson(f, a, b, tol)
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_up_to_cubic_are_exact() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn empty_and_reversed_intervals() {
        assert_eq!(adaptive_simpson(|x| x.exp(), 3.0, 3.0, 1e-10), 0.0);
        let fwd = adaptive_simpson(|x| x.sin(), 0.0, 1.0, 1e-12);
        let back = adaptive_simpson(|x| x.sin(), 1.0, 0.0, 1e-12);
        assert_eq!(fwd, -back);
    }

    #[test]
    fn transcendental_integrand() {
        let v = adaptive_simpson(|x| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-11);
        let v = adaptive_simpson_rel(|x| 1.0 / x, 1.0, 1e6, 1e-11);
        assert!((v / 1e6f64.ln() - 1.0).abs() < 1e-10);
    }
}
