//! Adaptive Simpson quadrature for the tabulated integrating factors.

/// Integrates `f` over `[a, b]` by adaptive Simpson bisection with Richardson
/// correction, to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson_rule(a, b, fa, fm, fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

const MAX_DEPTH: u32 = 50;

fn simpson_rule(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson_rule(a, m, fa, flm, fm);
    let right = simpson_rule(m, b, fm, frm, fb);
    let refined = left + right;
    if depth == 0 || (refined - whole).abs() <= 15.0 * tol {
        return refined + (refined - whole) / 15.0;
    }
    let half = 0.5 * tol;
    recurse(f, a, m, fa, flm, fm, left, half, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, half, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        // Simpson is exact on cubics.
        let v = adaptive_simpson(|x| x * x, 0.0, 1.0, 1e-12);
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
        // [x^4/4 - x^2/2] over [-1, 2] = 3.75 - 1.5
        let v = adaptive_simpson(|x| x * x * x - x, -1.0, 2.0, 1e-12);
        assert!((v - 2.25).abs() < 1e-13);
    }

    #[test]
    fn integrates_transcendentals() {
        let v = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-10);
        assert!((v - 2.0).abs() < 1e-10);
        let v = adaptive_simpson(f64::exp, 0.0, 1.0, 1e-10);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(adaptive_simpson(f64::exp, 2.0, 2.0, 1e-10), 0.0);
    }
}
