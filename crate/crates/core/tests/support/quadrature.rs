// Numerical quadrature of the cosine coefficients, used as an independent
// check of the closed form.

use fof_core::basis::frequency;

/// Adaptive Simpson with Richardson correction.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 40)
}

/// `int cos(t_n (z + 1)) dz` over the intervals, split into panels shorter
/// than a quarter period so the adaptive rule cannot stop on an alias.
pub fn quadrature(intervals: &[(f64, f64)], n: usize) -> f64 {
    let t = frequency(n);
    let f = move |z: f64| (t * (z + 1.0)).cos();
    let mut total = 0.0;
    for &(lo, hi) in intervals {
        let panels = ((hi - lo) * (n as f64 + 1.0)).ceil().max(1.0) as usize;
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let a = lo + h * p as f64;
            let b = if p + 1 == panels { hi } else { a + h };
            total += simpson(&f, a, b, 5e-9 / panels as f64);
        }
    }
    total
}
