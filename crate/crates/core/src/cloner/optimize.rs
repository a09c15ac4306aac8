//! Coarse field/time grid scan followed by alternating golden-section
//! refinement, plus the threshold time `t_c(delta)`.

use serde::{Deserialize, Serialize};

use super::{clone_fidelity, CloneTask, FidelitySeries};
use crate::optim::{golden_max, nelder_mead_max};
use crate::{Error, Result};

/// Values closer than this to the maximum count as ties; ties resolve to the
/// smallest time, then the smallest field.
const TIE: f64 = 1e-12;
/// Refined optima this close are ties.
const REFINED_TIE: f64 = 1e-9;
/// Relative spread of refined times treated as the same time.
const SAME_TIME: f64 = 1e-6;
const MAX_REFINE_ROUNDS: usize = 60;
/// Sampled peaks this close to the best grid value are refined too, since
/// grid quantization can hide an earlier, equally good optimum.
const CANDIDATE_SLACK: f64 = 5e-3;
const MAX_CANDIDATES: usize = 32;
const ROW_CAP: usize = 64;
/// Sampled peaks this close below a threshold are refined between samples.
const PEAK_SLACK: f64 = 2e-2;

/// Field values and a uniform time grid `0, dt, 2 dt, ..., <= t_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub b_values: Vec<f64>,
    pub t_step: f64,
    pub t_max: f64,
}

impl ScanGrid {
    pub fn new(b_values: Vec<f64>, t_step: f64, t_max: f64) -> Result<Self> {
        if b_values.is_empty() {
            return Err(Error::EmptyGrid("field"));
        }
        if !(t_step > 0.0) || !(t_max >= 0.0) || !t_max.is_finite() {
            return Err(Error::EmptyGrid("time"));
        }
        let mut b_values = b_values;
        b_values.sort_by(f64::total_cmp);
        b_values.dedup();
        Ok(Self { b_values, t_step, t_max })
    }

    /// `n_b` log-spaced fields on `[b_min, b_max]`.
    pub fn log_spaced(b_min: f64, b_max: f64, n_b: usize, t_step: f64, t_max: f64) -> Result<Self> {
        if n_b == 0 {
            return Err(Error::EmptyGrid("field"));
        }
        if !(b_min > 0.0 && b_max >= b_min) {
            return Err(Error::InvalidParameter(format!("log field grid needs 0 < {b_min} <= {b_max}")));
        }
        let b = if n_b == 1 {
            vec![b_min]
        } else {
            let (l0, l1) = (b_min.ln(), b_max.ln());
            (0..n_b).map(|i| (l0 + (l1 - l0) * i as f64 / (n_b - 1) as f64).exp()).collect()
        };
        Self::new(b, t_step, t_max)
    }

    /// Default search: 60 fields over `[0.01, 10]`, time step 0.05.
    pub fn standard(t_max: f64) -> Result<Self> {
        Self::log_spaced(0.01, 10.0, 60, 0.05, t_max)
    }

    pub fn n_times(&self) -> usize {
        (self.t_max / self.t_step + 1e-9).floor() as usize + 1
    }
}

/// Result of a field/time optimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloneReport {
    pub per_site_fidelity: Vec<f64>,
    pub mean_fidelity: f64,
    pub b_star: f64,
    pub t_star: f64,
    /// Earliest time reaching `mean_fidelity - delta`, when requested.
    pub t_threshold: Option<f64>,
    pub delta: Option<f64>,
    pub grid: ScanGrid,
    pub n_sources: usize,
    pub n_blanks: usize,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    f: f64,
    t_idx: usize,
    b_idx: usize,
}

/// Sampled peaks of one field row that may end up within `CANDIDATE_SLACK`
/// of the global best, plus the row's best cell.
fn row_peaks(series: &FidelitySeries, b_idx: usize, grid: &ScanGrid) -> (Cell, Vec<Cell>) {
    let n = grid.n_times();
    let mut best = Cell { f: f64::NEG_INFINITY, t_idx: 0, b_idx };
    let mut peaks = Vec::new();
    let mut prev = [f64::NEG_INFINITY; 2];
    let push = |peaks: &mut Vec<Cell>, c: Cell, top: f64| {
        if c.f >= top - CANDIDATE_SLACK {
            peaks.push(c);
            if peaks.len() > 2 * ROW_CAP {
                peaks.retain(|p: &Cell| p.f >= top - CANDIDATE_SLACK);
                peaks.truncate(ROW_CAP);
            }
        }
    };
    series.for_each_time(grid.b_values[b_idx], 0.0, grid.t_step, n, |i, f| {
        if f > best.f + TIE {
            best = Cell { f, t_idx: i, b_idx };
        } else if f > best.f {
            best.f = f;
        }
        // prev[1] is a peak if it beats its left and is not beaten on its right
        if i >= 1 && prev[1] > prev[0] && prev[1] >= f {
            push(&mut peaks, Cell { f: prev[1], t_idx: i - 1, b_idx }, best.f);
        }
        prev = [prev[1], f];
        true
    });
    if n >= 2 && prev[1] > prev[0] {
        push(&mut peaks, Cell { f: prev[1], t_idx: n - 1, b_idx }, best.f);
    } else if n == 1 {
        peaks.push(best);
    }
    peaks.retain(|p| p.f >= best.f - CANDIDATE_SLACK);
    (best, peaks)
}

/// Candidate cells for refinement: the earliest sampled peaks near the top
/// and the best grid cell itself.
fn coarse_scan(series: &FidelitySeries, grid: &ScanGrid) -> Vec<Cell> {
    let rows = crate::par::map_range(grid.b_values.len(), |ib| row_peaks(series, ib, grid));
    let fmax = rows.iter().map(|r| r.0.f).fold(f64::NEG_INFINITY, f64::max);
    let best = rows
        .iter()
        .map(|r| r.0)
        .filter(|c| c.f >= fmax - TIE)
        .min_by(|x, y| x.t_idx.cmp(&y.t_idx).then(x.b_idx.cmp(&y.b_idx)))
        .expect("non-empty field grid");
    let mut cands: Vec<Cell> =
        rows.into_iter().flat_map(|r| r.1).filter(|c| c.f >= fmax - CANDIDATE_SLACK).collect();
    cands.sort_by(|x, y| x.t_idx.cmp(&y.t_idx).then(x.b_idx.cmp(&y.b_idx)));
    cands.truncate(MAX_CANDIDATES);
    if !cands.iter().any(|c| c.t_idx == best.t_idx && c.b_idx == best.b_idx) {
        cands.push(best);
    }
    cands
}

/// Alternate golden-section refinement in `t` and `b` around a grid cell
/// until the improvement drops below `tol`. Returns `(b, t, F)`.
fn refine(series: &FidelitySeries, grid: &ScanGrid, cell: Cell, tol: f64) -> (f64, f64, f64) {
    let bs = &grid.b_values;
    let (b_lo, b_hi) = (bs[cell.b_idx.saturating_sub(1)], bs[(cell.b_idx + 1).min(bs.len() - 1)]);
    let mut b = bs[cell.b_idx];
    let mut t = cell.t_idx as f64 * grid.t_step;
    let mut f = cell.f;
    let xtol = 1e-13;
    for _ in 0..MAX_REFINE_ROUNDS {
        let before = f;
        let (t_lo, t_hi) = ((t - grid.t_step).max(0.0), (t + grid.t_step).min(grid.t_max));
        let (tn, fnew) = golden_max(|x| series.eval(b, x), t_lo, t_hi, xtol * t.max(1.0), 200);
        if fnew > f {
            t = tn;
            f = fnew;
        }
        if b_hi > b_lo {
            let (bn, fnew) = golden_max(|x| series.eval(x, t), b_lo, b_hi, xtol * b.max(1e-3), 200);
            if fnew > f {
                b = bn;
                f = fnew;
            }
        }
        if f - before < tol {
            break;
        }
    }
    // Coordinate steps crawl along the ridge of constant b t; finish with a
    // joint simplex polish confined to the same cell.
    let in_cell = |x: &[f64]| x[0] >= b_lo && x[0] <= b_hi && x[1] >= 0.0 && x[1] <= grid.t_max;
    let step = [((b_hi - b_lo) / 4.0).max(1e-9) * f64::from(u8::from(b_hi > b_lo)), grid.t_step / 4.0];
    if step[0] > 0.0 {
        let (x, fp) = nelder_mead_max(
            |x| if in_cell(x) { series.eval(x[0], x[1]) } else { f64::NEG_INFINITY },
            &[b, t],
            &step,
            tol * 1e-3,
            4000,
        );
        if fp > f {
            return (x[0], x[1], fp);
        }
    }
    (b, t, f)
}

/// Maximize the mean blank fidelity over the grid, then refine locally.
/// Per-site values in the report come from explicit state evolution at the
/// optimum.
pub fn optimize(task: &CloneTask, grid: &ScanGrid, tol: f64) -> Result<CloneReport> {
    let series = FidelitySeries::new(task)?;
    let refined: Vec<(f64, f64, f64)> =
        coarse_scan(&series, grid).into_iter().map(|c| refine(&series, grid, c, tol)).collect();
    let fmax = refined.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<_> = refined.into_iter().filter(|r| r.2 >= fmax - REFINED_TIE).collect();
    let t_first = ties.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    // Refined times agree only to roundoff; within that, the smallest field wins.
    let (b_star, t_star, _) = ties
        .into_iter()
        .filter(|r| r.1 <= t_first + SAME_TIME * t_first.max(1.0))
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .expect("at least one candidate");
    let direct = clone_fidelity(task, b_star, t_star)?;
    let g = task.graph()?;
    log::debug!("optimum F = {} at b = {b_star}, t = {t_star}", direct.mean);
    Ok(CloneReport {
        per_site_fidelity: direct.per_site,
        mean_fidelity: direct.mean,
        b_star,
        t_star,
        t_threshold: None,
        delta: None,
        grid: grid.clone(),
        n_sources: g.sources().len(),
        n_blanks: g.blanks().len(),
    })
}

/// Earliest time on `[0, t_max]` at which the mean fidelity in field `b`
/// reaches `f_abs - delta`: first grid crossing, then bisection inside the
/// bracketing step.
pub fn time_to_threshold(task: &CloneTask, b: f64, delta: f64, f_abs: f64, t_step: f64, t_max: f64) -> Result<f64> {
    let series = FidelitySeries::new(task)?;
    threshold_with_series(&series, b, delta, f_abs, t_step, t_max)
}

fn threshold_with_series(
    series: &FidelitySeries,
    b: f64,
    delta: f64,
    f_abs: f64,
    t_step: f64,
    t_max: f64,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be positive")));
    }
    let grid = ScanGrid::new(vec![b], t_step, t_max)?;
    let target = f_abs - delta;
    let at = |i: usize| i as f64 * t_step;
    // (lo, hi) bracket with F(lo) < target <= F(hi)
    let mut bracket = None;
    let mut prev = [f64::NEG_INFINITY; 2];
    series.for_each_time(b, 0.0, t_step, grid.n_times(), |i, f| {
        if f >= target {
            bracket = Some(if i == 0 { (0.0, 0.0) } else { (at(i - 1), at(i)) });
            return false;
        }
        // A peak between samples can cross the threshold unseen.
        if i >= 2 && prev[1] >= prev[0] && prev[1] >= f && prev[1] >= target - PEAK_SLACK {
            let (tp, fp) = golden_max(|x| series.eval(b, x), at(i - 2), at(i), 1e-14, 200);
            if fp >= target {
                bracket = Some((at(i - 2), tp));
                return false;
            }
        }
        prev = [prev[1], f];
        true
    });
    let (mut lo, mut hi) = bracket.ok_or(Error::ThresholdNotReached { threshold: target, horizon: t_max })?;
    if hi == 0.0 {
        return Ok(0.0);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if series.eval(b, mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-12 * hi.max(1.0) {
            break;
        }
    }
    Ok(hi)
}

/// Earliest threshold time over a set of fields. Returns `(t_c, b)`;
/// fields that never reach the threshold are skipped.
pub fn earliest_threshold_time(
    task: &CloneTask,
    b_values: &[f64],
    delta: f64,
    f_abs: f64,
    t_step: f64,
    t_max: f64,
) -> Result<(f64, f64)> {
    if b_values.is_empty() {
        return Err(Error::EmptyGrid("field"));
    }
    let series = FidelitySeries::new(task)?;
    let per_b = crate::par::map(b_values, |&b| threshold_with_series(&series, b, delta, f_abs, t_step, t_max));
    let mut best: Option<(f64, f64)> = None;
    for (r, &b) in per_b.into_iter().zip(b_values) {
        match r {
            Ok(t) if best.is_none_or(|(bt, _)| t < bt) => best = Some((t, b)),
            Ok(_) | Err(Error::ThresholdNotReached { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    best.ok_or(Error::ThresholdNotReached { threshold: f_abs - delta, horizon: t_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Topology;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn grid_construction() {
        let g = ScanGrid::standard(10.0).unwrap();
        assert_eq!(g.b_values.len(), 60);
        assert_relative_eq!(g.b_values[0], 0.01, epsilon = 1e-15);
        assert_relative_eq!(g.b_values[59], 10.0, epsilon = 1e-12);
        assert_eq!(g.n_times(), 201);
        assert!(ScanGrid::new(vec![], 0.1, 1.0).is_err());
        assert!(ScanGrid::new(vec![1.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn star_two_optimum() {
        let task = CloneTask::equatorial(Topology::Star { m: 2 }, 0.0);
        let r = optimize(&task, &ScanGrid::standard(10.0).unwrap(), 1e-12).unwrap();
        assert_relative_eq!(r.mean_fidelity, 0.5 + 1.0 / 8f64.sqrt(), epsilon = 1e-10);
        assert_relative_eq!(r.t_star, PI / 2f64.sqrt(), epsilon = 1e-4);
        // b t = pi/2 mod 2 pi also holds for larger fields; the smallest wins.
        assert_relative_eq!(r.b_star, 0.5f64.sqrt(), epsilon = 1e-4);
        assert_eq!((r.n_sources, r.n_blanks), (1, 2));
    }

    #[test]
    fn threshold_approaches_optimum_time() {
        let task = CloneTask::equatorial(Topology::Star { m: 2 }, 0.0);
        let f = 0.5 + 1.0 / 8f64.sqrt();
        let t = time_to_threshold(&task, 0.5f64.sqrt(), 1e-10, f, 0.05, 10.0).unwrap();
        assert!((t - PI / 2f64.sqrt()).abs() < 1e-3);
        assert!(matches!(
            time_to_threshold(&task, 0.5f64.sqrt(), 1e-3, 0.99, 0.05, 10.0),
            Err(Error::ThresholdNotReached { .. })
        ));
        assert!(time_to_threshold(&task, 0.5, 0.0, f, 0.05, 10.0).is_err());
    }

    #[test]
    fn ties_resolve_to_earliest_time() {
        // The XY star revisits its optimum periodically; the earliest
        // occurrence must be reported.
        let task = CloneTask::equatorial(Topology::Star { m: 4 }, 0.0);
        let grid = ScanGrid::new(vec![1.0], PI / 200.0, 40.0).unwrap();
        let r = optimize(&task, &grid, 1e-12).unwrap();
        assert_relative_eq!(r.t_star, PI / 2.0, epsilon = 1e-6);
    }
}
