//! Clone fidelity of the three-qubit charge-qubit device as the parasitic
//! `Z Z` coupling `E_K` grows relative to the exchange `J_K`.
//!
//! For each ratio `E_K / J_K` the evolution time and a uniform bias are
//! re-optimized. The device couples with `J = -J_K`; the sign flip is not
//! compensated, the optimizer simply finds the mirrored bias.

use serde::{Deserialize, Serialize};

use crate::cloner::FidelitySeries;
use crate::hilbert::{compose, BlochInput, QuantumState};
use crate::network::{assemble_josephson, JosephsonSpec};
use crate::optim::nelder_mead_max;
use crate::{Error, Result};

/// Search box and grid resolution for the per-ratio optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JosephsonScanOptions {
    pub t_max: f64,
    pub t_step: f64,
    pub bias_min: f64,
    pub bias_max: f64,
    pub n_bias: usize,
}

impl Default for JosephsonScanOptions {
    fn default() -> Self {
        Self { t_max: 20.0, t_step: 0.02, bias_min: -2.0, bias_max: 2.0, n_bias: 81 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JosephsonPoint {
    pub ratio: f64,
    pub fidelity: f64,
    pub t_star: f64,
    pub bias_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JosephsonScan {
    pub points: Vec<JosephsonPoint>,
    pub options: JosephsonScanOptions,
}

/// Fidelity series of the device with `E_K = ratio`, `J_K = 1` and an
/// equatorial input on the centre qubit.
pub fn josephson_series(ratio: f64) -> Result<FidelitySeries> {
    let spec = JosephsonSpec::new(ratio, 1.0)?;
    let input = BlochInput::equatorial(0.0);
    let zero = QuantumState::basis(1, 0)?;
    let psi0 = compose(&[QuantumState::qubit(input), zero.clone(), zero])?;
    FidelitySeries::from_hamiltonian(&assemble_josephson(&spec, 0.0), &psi0, input, &[1, 2])
}

/// Coarse candidates kept within this distance of the best grid value.
const CANDIDATE_SLACK: f64 = 5e-3;
const MAX_CANDIDATES: usize = 32;
/// Refined values this close count as ties.
const TIE: f64 = 1e-9;

fn optimize_ratio(ratio: f64, o: &JosephsonScanOptions) -> Result<JosephsonPoint> {
    let series = josephson_series(ratio)?;
    let n_t = (o.t_max / o.t_step).floor() as usize + 1;
    let db = if o.n_bias > 1 { (o.bias_max - o.bias_min) / (o.n_bias - 1) as f64 } else { 0.0 };
    // Local maxima in t of every bias row.
    let mut peaks: Vec<(f64, usize, f64)> = Vec::new();
    for ib in 0..o.n_bias {
        let b = o.bias_min + ib as f64 * db;
        let v = series.values(b, 0.0, o.t_step, n_t);
        for i in 0..n_t {
            let left = if i == 0 { f64::NEG_INFINITY } else { v[i - 1] };
            let right = if i + 1 == n_t { f64::NEG_INFINITY } else { v[i + 1] };
            if v[i] > left && v[i] >= right {
                peaks.push((v[i], i, b));
            }
        }
    }
    let top = peaks.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    peaks.retain(|p| p.0 >= top - CANDIDATE_SLACK);
    peaks.sort_by(|x, y| x.1.cmp(&y.1).then(x.2.abs().total_cmp(&y.2.abs())));
    peaks.truncate(MAX_CANDIDATES);

    let inside = |x: &[f64]| x[0] >= o.bias_min && x[0] <= o.bias_max && x[1] >= 0.0 && x[1] <= o.t_max;
    let refined: Vec<(Vec<f64>, f64)> = peaks
        .iter()
        .map(|&(_, it, b)| {
            nelder_mead_max(
                |x| if inside(x) { series.eval(x[0], x[1]) } else { f64::NEG_INFINITY },
                &[b, it as f64 * o.t_step],
                &[db.max(1e-3) / 2.0, o.t_step / 2.0],
                1e-15,
                4000,
            )
        })
        .collect();
    let fmax = refined.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    // Candidates are in time order, so the first tie is the earliest.
    let (x, f) = refined.into_iter().find(|r| r.1 >= fmax - TIE).ok_or(Error::EmptyGrid("time"))?;
    Ok(JosephsonPoint { ratio, fidelity: f, t_star: x[1], bias_star: x[0] })
}

/// Optimized fidelity for every `E_K / J_K` in `ratios`.
pub fn josephson_fidelity_scan(ratios: &[f64], options: &JosephsonScanOptions) -> Result<JosephsonScan> {
    if ratios.is_empty() {
        return Err(Error::EmptyGrid("E_K / J_K ratios"));
    }
    if let Some(r) = ratios.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return Err(Error::InvalidParameter(format!("ratio {r} must be finite and >= 0")));
    }
    if !(options.t_step > 0.0 && options.t_max > 0.0 && options.n_bias >= 1 && options.bias_max >= options.bias_min) {
        return Err(Error::InvalidParameter("bad Josephson scan options".into()));
    }
    let points = crate::par::map(ratios, |&r| optimize_ratio(r, options)).into_iter().collect::<Result<Vec<_>>>()?;
    Ok(JosephsonScan { points, options: *options })
}
