//! Adaptive Gauss-Kronrod quadrature and Cauchy principal values.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd Kronrod nodes (7-point rule).
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss rule.
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Most subintervals kept by [`integrate`].
const MAX_INTERVALS: usize = 4000;

/// Integral of `f` over `[a, b]` to absolute tolerance `tol`, splitting the
/// interval with the largest error estimate until the summed estimate meets
/// `tol` or the subdivision budget runs out.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut err = e;
    while err > tol && parts.len() < MAX_INTERVALS {
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, e0) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval no longer splittable in floating point.
            parts.push((lo, hi, gk15(&mut f, lo, hi).0, 0.0));
            err -= e0;
            continue;
        }
        let (vl, el) = gk15(&mut f, lo, mid);
        let (vr, er) = gk15(&mut f, mid, hi);
        parts.push((lo, mid, vl, el));
        parts.push((mid, hi, vr, er));
        err += el + er - e0;
    }
    parts.iter().map(|p| p.2).sum()
}

/// `P int_lo^hi f(x) / (w - x) dx` for `lo < w < hi`. The singular core
/// `[w - s, w + s]` is folded into `int_0^s (f(w - u) - f(w + u)) / u du`.
pub fn principal_value(mut f: impl FnMut(f64) -> f64, w: f64, lo: f64, hi: f64, tol: f64) -> f64 {
    assert!(lo < w && w < hi, "pole must lie inside the interval");
    let s = (0.5 * (w - lo)).min(0.5 * (hi - w)).min(1.0);
    let core = integrate(|u| if u == 0.0 { 0.0 } else { (f(w - u) - f(w + u)) / u }, 0.0, s, tol / 3.0);
    let left = integrate(|x| f(x) / (w - x), lo, w - s, tol / 3.0);
    let right = integrate(|x| f(x) / (w - x), w + s, hi, tol / 3.0);
    left + core + right
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_and_gaussian() {
        assert_relative_eq!(integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, 1e-12), 32.0 / 3.0 - 4.0, epsilon = 1e-12);
        assert_relative_eq!(integrate(|x| (-x * x).exp(), -10.0, 10.0, 1e-12), PI.sqrt(), epsilon = 1e-11);
    }

    #[test]
    fn hilbert_transform_of_lorentzian() {
        // P int dx / ((1 + x^2)(w - x)) = pi w / (1 + w^2)
        for w in [-2.0, 0.3, 1.0, 4.0] {
            let v = principal_value(|x| 1.0 / (1.0 + x * x), w, -1e5, 1e5, 1e-10);
            assert_relative_eq!(v, PI * w / (1.0 + w * w), epsilon = 1e-6);
        }
    }
}
