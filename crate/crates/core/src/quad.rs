//! Small quadrature helpers: adaptive Simpson in 1D and a refining composite
//! Simpson rule on rectangles for the planar integrals against the limit law.

/// Adaptive Simpson integration of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn rec(
        f: &dyn Fn(f64) -> f64,
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
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Composite 2D Simpson on `[x0,x1] x [y0,y1]`, refining until two successive
/// grids agree to `tol` (or the refinement cap is hit).
pub fn simpson_2d(f: &dyn Fn(f64, f64) -> f64, x: (f64, f64), y: (f64, f64), tol: f64) -> f64 {
    fn composite(f: &dyn Fn(f64, f64) -> f64, x: (f64, f64), y: (f64, f64), n: usize) -> f64 {
        // n panels per axis, n even
        let hx = (x.1 - x.0) / n as f64;
        let hy = (y.1 - y.0) / n as f64;
        let wt = |k: usize| -> f64 {
            if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            }
        };
        let mut acc = 0.0;
        for i in 0..=n {
            let xi = x.0 + hx * i as f64;
            let wx = wt(i);
            let mut row = 0.0;
            for j in 0..=n {
                let yj = y.0 + hy * j as f64;
                row += wt(j) * f(xi, yj);
            }
            acc += wx * row;
        }
        acc * hx * hy / 9.0
    }
    let mut n = 32;
    let mut prev = composite(f, x, y, n);
    for _ in 0..6 {
        n *= 2;
        let next = composite(f, x, y, n);
        if (next - prev).abs() <= tol {
            return next;
        }
        prev = next;
    }
    prev
}
