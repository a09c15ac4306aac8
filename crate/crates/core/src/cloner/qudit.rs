//! 1 -> M cloning of d-level systems on a star.
//!
//! Every qudit is stored one-hot in `d` qubits. The hub exchanges each
//! excited level `i >= 1` with the ground level of every blank through
//! `(J/2)(|i><0|_hub |0><i|_k + h.c.)`, and a field `Delta` lowers every
//! excited level by `Delta` relative to level 0, which is the qubit star
//! embedded level by level. Excited levels therefore evolve as independent
//! copies of the qubit XY star.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{optimal_parameters, Model};
use crate::dynamics::{star_coeffs_xy, Spectrum};
use crate::hilbert::{embed_qudit, one_hot_index, partial_trace, MAX_SITES};
use crate::network::add_fields;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuditMode {
    /// Logical-subspace amplitudes from the per-level star coefficients.
    Effective,
    /// State-vector simulation of the one-hot qubit network.
    Full,
}

fn input_amplitudes(d: usize, phases: &[f64]) -> Result<Vec<C64>> {
    if phases.len() != d - 1 {
        return Err(Error::DimensionMismatch { expected: d - 1, found: phases.len() });
    }
    let r = 1.0 / (d as f64).sqrt();
    Ok(std::iter::once(C64::new(r, 0.0)).chain(phases.iter().map(|&p| C64::from_polar(r, p))).collect())
}

fn check(d: usize, m: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("qudit dimension {d} < 2")));
    }
    if m < 1 {
        return Err(Error::InvalidParameter("need at least one blank".into()));
    }
    Ok(())
}

/// Blank fidelity for input `(|0> + sum_i e^{i phi_i}|i>)/sqrt d` after time
/// `t` in field `delta`, from the logical-subspace amplitudes.
pub fn qudit_effective_fidelity(d: usize, m: usize, delta: f64, t: f64, phases: &[f64]) -> Result<f64> {
    check(d, m)?;
    let psi = input_amplitudes(d, phases)?;
    let mf = m as f64;
    let alpha = psi[0];
    let beta2: Vec<C64> = psi[1..].iter().map(|&b| star_coeffs_xy(m, b, delta, t).beta2).collect();
    let beta1_sq: f64 = psi[1..].iter().map(|&b| star_coeffs_xy(m, b, delta, t).beta1.norm_sqr()).sum();
    // Reduced matrix of one blank in the logical basis.
    let mut rho = DMatrix::<C64>::zeros(d, d);
    let b2_sq: f64 = beta2.iter().map(|b| b.norm_sqr()).sum();
    rho[(0, 0)] = C64::new(alpha.norm_sqr() + beta1_sq + (1.0 - 1.0 / mf) * b2_sq, 0.0);
    for i in 1..d {
        rho[(i, 0)] = beta2[i - 1] * alpha.conj() / mf.sqrt();
        rho[(0, i)] = rho[(i, 0)].conj();
        for j in 1..d {
            rho[(i, j)] = beta2[i - 1] * beta2[j - 1].conj() / mf;
        }
    }
    let v = DVector::from_vec(psi);
    Ok(v.dotc(&(&rho * &v)).re)
}

/// Qubit index (within an `n`-qubit register) of level `level` of qudit
/// `q`; qudits occupy consecutive blocks of `d` qubits, hub first.
fn qubit_of(q: usize, level: usize, d: usize) -> usize {
    q * d + (d - 1 - level)
}

/// Hamiltonian of the one-hot network on `d (M + 1)` qubits.
fn full_hamiltonian(d: usize, m: usize, delta: f64) -> DMatrix<f64> {
    let n = d * (m + 1);
    let dim = 1usize << n;
    let mask = |q: usize, level: usize| 1usize << (n - 1 - qubit_of(q, level, d));
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for k in 1..=m {
        for i in 1..d {
            let (h0, hi, k0, ki) = (mask(0, 0), mask(0, i), mask(k, 0), mask(k, i));
            for b in 0..dim {
                // hub in 0, blank in i  ->  hub in i, blank in 0
                if b & h0 != 0 && b & hi == 0 && b & ki != 0 && b & k0 == 0 {
                    let b2 = b ^ h0 ^ hi ^ k0 ^ ki;
                    h[(b2, b)] += 0.5;
                    h[(b, b2)] += 0.5;
                }
            }
        }
    }
    let mut fields = vec![0.0; n];
    for q in 0..=m {
        for level in 1..d {
            fields[qubit_of(q, level, d)] = delta;
        }
    }
    add_fields(&mut h, n, &fields);
    h
}

/// Per-blank fidelities from the physical one-hot simulation. Each blank's
/// reduced `2^d x 2^d` matrix is read on the one-hot states.
pub fn qudit_full_fidelity(d: usize, m: usize, delta: f64, t: f64, phases: &[f64]) -> Result<Vec<f64>> {
    check(d, m)?;
    let n = d * (m + 1);
    if n > MAX_SITES {
        return Err(Error::TooManySites(n));
    }
    let amps = input_amplitudes(d, phases)?;
    let hub = embed_qudit(d, &amps)?;
    let ground = embed_qudit(d, &{
        let mut g = vec![C64::new(0.0, 0.0); d];
        g[0] = C64::new(1.0, 0.0);
        g
    })?;
    let mut parts = vec![hub.clone()];
    parts.extend(std::iter::repeat_n(ground, m));
    let psi0 = crate::hilbert::compose(&parts)?;
    let h = full_hamiltonian(d, m, delta);
    let out = Spectrum::for_state(&h, &psi0)?.evolve(&psi0, t, 0.0)?;
    let target = DVector::from_vec(amps);
    (1..=m)
        .map(|k| {
            let sites: Vec<usize> = (0..d).map(|l| qubit_of(k, l, d)).collect();
            let rho = partial_trace(&out, &sites)?.density_matrix();
            let logical = DMatrix::from_fn(d, d, |r, c| rho[(one_hot_index(r), one_hot_index(c))]);
            Ok(target.dotc(&(&logical * &target)).re)
        })
        .collect()
}

/// Mean blank fidelity with all input phases zero.
pub fn qudit_clone_fidelity(d: usize, m: usize, delta: f64, t: f64, mode: QuditMode) -> Result<f64> {
    let phases = vec![0.0; d.saturating_sub(1)];
    match mode {
        QuditMode::Effective => qudit_effective_fidelity(d, m, delta, t, &phases),
        QuditMode::Full => {
            let f = qudit_full_fidelity(d, m, delta, t, &phases)?;
            Ok(f.iter().sum::<f64>() / f.len() as f64)
        }
    }
}

/// Fidelity at the qubit-star optimum `delta = sqrt M / 2`, `t = pi / sqrt M`:
/// `[1 + (d-1)(1 - 1/M)]/d^2 + (d-1)^2/(d^2 M) + 2(d-1)/(d^2 sqrt M)`.
pub fn qudit_optimum_formula(d: usize, m: usize) -> f64 {
    let (df, mf) = (d as f64, m as f64);
    (1.0 + (df - 1.0) * (1.0 - 1.0 / mf)) / (df * df)
        + (df - 1.0).powi(2) / (df * df * mf)
        + 2.0 * (df - 1.0) / (df * df * mf.sqrt())
}

/// Qubit-star optimum reused for every `d`.
pub fn qudit_optimal_parameters(m: usize) -> (f64, f64) {
    optimal_parameters(Model::Xy, m)
}
