//! Derivative-free maximizers used by the parameter searches.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[lo, hi]`. Returns the best
/// point seen, including the endpoints, so the result never falls below
/// `max(f(lo), f(hi))`.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> (f64, f64) {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iter {
        if (b - a).abs() <= xtol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        for (x, v) in [(c, fc), (d, fd)] {
            if v > best.1 {
                best = (x, v);
            }
        }
    }
    best
}

/// Nelder-Mead maximization starting from `x0` with initial simplex steps
/// `step`. Stops when the spread of simplex values falls below `ftol` or
/// after `max_evals` evaluations.
pub fn nelder_mead_max(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: &[f64],
    ftol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    // Minimize -f internally.
    let mut g = |x: &[f64]| -f(x);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), g(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let v = g(&x);
        simplex.push((x, v));
    }
    let mut evals = n + 1;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[n].1 - simplex[0].1).abs() <= ftol {
            break;
        }
        let centroid: Vec<f64> =
            (0..n).map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64).collect();
        let towards = |coef: f64, worst: &[f64]| -> Vec<f64> {
            (0..n).map(|k| centroid[k] + coef * (worst[k] - centroid[k])).collect()
        };
        let worst = simplex[n].0.clone();
        let xr = towards(-1.0, &worst);
        let fr = g(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = towards(-2.0, &worst);
            let fe = g(&xe);
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = towards(-0.5, &worst);
                let v = g(&xc);
                (xc, v)
            } else {
                let xc = towards(0.5, &worst);
                let v = g(&xc);
                (xc, v)
            };
            evals += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    for k in 0..n {
                        x[k] = best[k] + 0.5 * (x[k] - best[k]);
                    }
                    *v = g(x);
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, -v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| 1.0 - (x - 0.3).powi(2), -1.0, 2.0, 1e-12, 200);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn golden_keeps_endpoint_when_monotone() {
        let (x, v) = golden_max(|x| x, 0.0, 1.0, 1e-10, 200);
        assert_eq!(x, 1.0);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &[f64]| -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let (x, v) = nelder_mead_max(f, &[-1.2, 1.0], &[0.5, 0.5], 1e-16, 5000);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] - 1.0).abs() < 1e-4, "{x:?}");
        assert!(v > -1e-8);
    }
}
