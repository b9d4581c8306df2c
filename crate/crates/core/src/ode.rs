//! Fixed-step classical Runge–Kutta and composite Simpson quadrature.

use crate::error::{Error, Result};

/// One classical RK4 step of `y' = f(t, y)`.
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let axpy = |y: &[f64; N], k: &[f64; N], a: f64| {
        let mut out = *y;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += a * ki;
        }
        out
    };
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &axpy(y, &k2, 0.5 * h));
    let k4 = f(t + h, &axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrates from `t0` to `t_end` in steps of `dt`; the last step is
/// shortened so the final sample lands exactly on `t_end`. Returns every
/// sample including the initial one.
pub fn rk4_fixed<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    dt: f64,
) -> Result<Vec<(f64, [f64; N])>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let steps = step_count(t_end - t0, dt);
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0;
    out.push((t0, y));
    for i in 0..steps {
        let t = t0 + i as f64 * dt;
        let t_next = if i + 1 == steps {
            t_end
        } else {
            t0 + (i + 1) as f64 * dt
        };
        y = rk4_step(&f, t, &y, t_next - t);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: t_next });
        }
        out.push((t_next, y));
    }
    Ok(out)
}

/// Number of steps of size at most `dt` covering `span`.
fn step_count(span: f64, dt: f64) -> usize {
    let n = span / dt;
    // Absorb rounding so that an exact multiple does not get a sliver step.
    let rounded = n.round();
    if (n - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        rounded.max(1.0) as usize
    } else {
        n.ceil() as usize
    }
}

/// Composite Simpson rule of `f` over `[a, b]` with an even number of
/// panels no wider than `dt`.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, dt: f64) -> f64 {
    if b == a {
        return 0.0;
    }
    let mut n = step_count((b - a).abs(), dt);
    if n % 2 == 1 {
        n += 1;
    }
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Simpson quadrature over `[a, b]` (`b >= a`) on panels of width `h`
/// anchored at `a`; the stretch past the last full panel pair gets one
/// two-panel Simpson step of its own. For non-negative `f` the result is a
/// running sum of non-negative terms, so it never decreases as `b` grows.
pub fn simpson_anchored<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, h: f64) -> f64 {
    let span = b - a;
    if span <= 0.0 {
        return 0.0;
    }
    let pair = 2.0 * h;
    let mut pairs = (span / pair).floor() as usize;
    if a + pairs as f64 * pair > b {
        pairs -= 1;
    }
    let mut acc = 0.0;
    let mut f_left = f(a);
    for k in 0..pairs {
        let x0 = a + k as f64 * pair;
        let x2 = a + (k + 1) as f64 * pair;
        let f_right = f(x2);
        acc += (x2 - x0) / 6.0 * (f_left + 4.0 * f(0.5 * (x0 + x2)) + f_right);
        f_left = f_right;
    }
    let x0 = a + pairs as f64 * pair;
    if b > x0 {
        acc += (b - x0) / 6.0 * (f_left + 4.0 * f(0.5 * (x0 + b)) + f(b));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_exponential() {
        let traj = rk4_fixed(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 1.0, 0.01).unwrap();
        assert_eq!(traj.len(), 101);
        let (t, y) = traj.last().unwrap();
        assert_eq!(*t, 1.0);
        assert!((y[0] - 1f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn rk4_lands_on_end() {
        let traj = rk4_fixed(|_, _: &[f64; 1]| [1.0], 0.0, [0.0], 1.05, 0.1).unwrap();
        assert_eq!(traj.len(), 12);
        assert_eq!(traj.last().unwrap().0, 1.05);
        assert!((traj.last().unwrap().1[0] - 1.05).abs() < 1e-14);
    }

    #[test]
    fn rk4_reports_blow_up() {
        let r = rk4_fixed(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 2.0, 0.1);
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 0.7);
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-13);
        assert_eq!(simpson(|x| x, 3.0, 3.0, 0.1), 0.0);
        let v = simpson_anchored(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 0.3);
        assert!((v - 2.0).abs() < 1e-13);
        assert_eq!(simpson_anchored(|x| x, 3.0, 3.0, 0.1), 0.0);
    }

    #[test]
    fn anchored_simpson_is_monotone_in_upper_limit() {
        let f = |x: f64| (-x * x).exp();
        let mut prev = 0.0;
        for i in 0..2000 {
            let v = simpson_anchored(f, -1.0, -1.0 + i as f64 * 0.0037, 0.01);
            assert!(v >= prev);
            prev = v;
        }
    }
}
