//! Adaptive Dormand-Prince 5(4) integrator for complex linear systems.

use crate::{Error, Result, C64};

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

fn combine(y: &[C64], h: f64, ks: &[&[C64]], w: &[f64], out: &mut [C64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = C64::new(0.0, 0.0);
        for (k, &wk) in ks.iter().zip(w) {
            if wk != 0.0 {
                s += k[i] * wk;
            }
        }
        *o = y[i] + s * h;
    }
}

/// Integrate `y' = f(t, y)` from `0` to `t_end` with mixed error tolerance
/// `tol` (used as both relative and absolute tolerance).
pub fn integrate(
    mut f: impl FnMut(f64, &[C64], &mut [C64]),
    y0: &[C64],
    t_end: f64,
    tol: f64,
) -> Result<(Vec<C64>, Stats)> {
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut stats = Stats::default();
    if t_end == 0.0 || n == 0 {
        return Ok((y, stats));
    }
    let dir = t_end.signum();
    let span = t_end.abs();
    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut y_new = vec![C64::new(0.0, 0.0); n];
    f(0.0, &y, &mut k[0]);

    // Initial step from the size of y and y'.
    let scale = |v: &[C64], w: &[C64]| -> f64 {
        (v.iter().zip(w).map(|(a, b)| (a.norm() / (tol + tol * b.norm())).powi(2)).sum::<f64>() / n as f64).sqrt()
    };
    let d0 = scale(&y, &y);
    let d1 = scale(&k[0], &y);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span);

    let mut t = 0.0;
    while t < span {
        if !(h >= 1e-14 * span.max(1.0)) {
            return Err(Error::StepSizeUnderflow { t_reached: dir * t });
        }
        let last = t + h >= span;
        if last {
            h = span - t;
        }
        let hs = dir * h;
        let (k0, rest) = k.split_at_mut(1);
        combine(&y, hs, &[&k0[0]], &A2, &mut tmp);
        f(dir * (t + C[0] * h), &tmp, &mut rest[0]);
        combine(&y, hs, &[&k0[0], &rest[0]], &A3, &mut tmp);
        f(dir * (t + C[1] * h), &tmp, &mut rest[1]);
        combine(&y, hs, &[&k0[0], &rest[0], &rest[1]], &A4, &mut tmp);
        f(dir * (t + C[2] * h), &tmp, &mut rest[2]);
        combine(&y, hs, &[&k0[0], &rest[0], &rest[1], &rest[2]], &A5, &mut tmp);
        f(dir * (t + C[3] * h), &tmp, &mut rest[3]);
        combine(&y, hs, &[&k0[0], &rest[0], &rest[1], &rest[2], &rest[3]], &A6, &mut tmp);
        f(dir * (t + C[4] * h), &tmp, &mut rest[4]);
        combine(&y, hs, &[&k0[0], &rest[0], &rest[1], &rest[2], &rest[3], &rest[4]], &B, &mut y_new);
        f(dir * (t + h), &y_new, &mut rest[5]);

        let mut err = 0.0;
        for i in 0..n {
            let e: C64 = (0..7).map(|j| k[j][i] * E[j]).sum::<C64>() * hs;
            let sc = tol + tol * y[i].norm().max(y_new[i].norm());
            err += (e.norm() / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();
        // Overflow counts as a rejected step.
        let err = if err.is_finite() { err } else { f64::INFINITY };
        if err <= 1.0 {
            t = if last { span } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            stats.accepted += 1;
        } else {
            stats.rejected += 1;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= if err > 1.0 { fac.min(1.0) } else { fac };
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_phase() {
        let (y, _) = integrate(
            |_, y, dy| dy[0] = C64::new(0.0, -3.0) * y[0],
            &[C64::new(1.0, 0.0)],
            10.0,
            1e-10,
        )
        .unwrap();
        let exact = C64::from_polar(1.0, -30.0);
        assert!((y[0] - exact).norm() < 1e-8, "{}", (y[0] - exact).norm());
    }

    #[test]
    fn decay_and_backwards() {
        let f = |_: f64, y: &[C64], dy: &mut [C64]| dy[0] = -y[0] * 0.7;
        let (y, s) = integrate(f, &[C64::new(2.0, 0.0)], 3.0, 1e-9).unwrap();
        assert!((y[0].re - 2.0 * (-2.1f64).exp()).abs() < 1e-8);
        assert!(s.accepted > 0);
        let (y, _) = integrate(f, &[C64::new(2.0, 0.0)], -1.0, 1e-9).unwrap();
        assert!((y[0].re - 2.0 * 0.7f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn stiff_blowup_underflows() {
        let r = integrate(|t, y, dy| dy[0] = y[0] * (1.0 / (1.0 - t).powi(3)), &[C64::new(1.0, 0.0)], 2.0, 1e-8);
        assert!(matches!(r, Err(Error::StepSizeUnderflow { .. })));
    }
}
