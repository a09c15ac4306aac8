//! Three-spin universal cloner: Heisenberg star with an optional coupling
//! between the two blanks, blanks initially maximally mixed, zero field.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{site_fidelities, CloneFidelities};
use crate::dynamics::Spectrum;
use crate::hilbert::{compose, BlochInput, QuantumState};
use crate::optim::golden_max;
use crate::network::{assemble_hamiltonian, Edge, HamiltonianSpec, Role, SpinGraph};
use crate::{Error, Result};

fn hamiltonian(j_bb: f64) -> Result<DMatrix<f64>> {
    let mut edges = vec![Edge { i: 0, j: 1, coupling: 1.0 }, Edge { i: 0, j: 2, coupling: 1.0 }];
    if j_bb != 0.0 {
        edges.push(Edge { i: 1, j: 2, coupling: j_bb });
    }
    let g = SpinGraph::new(3, edges, vec![0.0; 3], vec![Role::Source, Role::Blank, Role::Blank])?;
    Ok(assemble_hamiltonian(&HamiltonianSpec::new(g, 1.0)))
}

/// Clone fidelities on both blanks at time `t` for one input.
pub fn universal_fidelity(input: BlochInput, t: f64, j_bb: f64) -> Result<CloneFidelities> {
    let spec = Spectrum::new(&hamiltonian(j_bb)?)?;
    fidelity_with(&spec, input, t)
}

fn fidelity_with(spec: &Spectrum, input: BlochInput, t: f64) -> Result<CloneFidelities> {
    let psi = QuantumState::qubit(input);
    let rho0 = compose(&[psi.clone(), QuantumState::maximally_mixed(2)?])?;
    let out = spec.evolve(&rho0, t, 0.0)?;
    site_fidelities(&out, &[1, 2], &psi)
}

/// `n` inputs drawn uniformly from the Bloch sphere.
pub fn haar_inputs(n: usize, seed: u64) -> Vec<BlochInput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            BlochInput { theta: (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos(), phi: std::f64::consts::TAU * v }
        })
        .collect()
}

/// `n` deterministic inputs on a Fibonacci spiral, roughly uniform over the
/// Bloch sphere.
pub fn spiral_inputs(n: usize) -> Vec<BlochInput> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            BlochInput { theta: z.clamp(-1.0, 1.0).acos(), phi: (golden * k as f64).rem_euclid(std::f64::consts::TAU) }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalReport {
    pub t: f64,
    /// Blank-blank coupling attaining the family maximum.
    pub best_j_bb: f64,
    /// Input-averaged mean clone fidelity at `best_j_bb`.
    pub fidelity: f64,
    /// `max - min` of the mean fidelity over the sampled inputs at
    /// `best_j_bb`.
    pub spread: f64,
    /// Input-averaged fidelity for every scanned coupling.
    pub per_coupling: Vec<(f64, f64)>,
}

/// Scan the blank-blank coupling family at time `t`, averaging over
/// `inputs`. Ties go to the smallest coupling magnitude, then the smallest
/// value.
pub fn universal_clone(t: f64, j_bb_grid: &[f64], inputs: &[BlochInput]) -> Result<UniversalReport> {
    if j_bb_grid.is_empty() {
        return Err(Error::EmptyGrid("blank-blank coupling"));
    }
    if inputs.is_empty() {
        return Err(Error::EmptyGrid("inputs"));
    }
    let rows = crate::par::map(j_bb_grid, |&j| -> Result<(f64, f64, f64)> {
        let spec = Spectrum::new(&hamiltonian(j)?)?;
        let f: Vec<f64> = inputs.iter().map(|&inp| fidelity_with(&spec, inp, t).map(|r| r.mean)).collect::<Result<_>>()?;
        let mean = f.iter().sum::<f64>() / f.len() as f64;
        let spread = f.iter().copied().fold(f64::NEG_INFINITY, f64::max) - f.iter().copied().fold(f64::INFINITY, f64::min);
        Ok((j, mean, spread))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let fmax = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let best = rows
        .iter()
        .filter(|r| r.1 >= fmax - 1e-12)
        .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(a.0.total_cmp(&b.0)))
        .expect("non-empty grid");
    Ok(UniversalReport {
        t,
        best_j_bb: best.0,
        fidelity: best.1,
        spread: best.2,
        per_coupling: rows.iter().map(|r| (r.0, r.1)).collect(),
    })
}

/// Earliest time on `[0, t_max]` maximizing the clone fidelity for blank
/// coupling `j_bb`. The Hamiltonian and the mixed blanks are rotation
/// invariant, so one input stands for all of them. Returns `(t, F)`.
pub fn universal_time_optimum(j_bb: f64, t_max: f64, t_step: f64) -> Result<(f64, f64)> {
    if !(t_step > 0.0 && t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::EmptyGrid("time"));
    }
    let spec = Spectrum::new(&hamiltonian(j_bb)?)?;
    let north = BlochInput { theta: 0.0, phi: 0.0 };
    let f = |t: f64| fidelity_with(&spec, north, t).map(|r| r.mean).unwrap_or(f64::NEG_INFINITY);
    let n = (t_max / t_step + 1e-9).floor() as usize + 1;
    let v: Vec<f64> = (0..n).map(|i| f(i as f64 * t_step)).collect();
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..n {
        let left = if i == 0 { f64::NEG_INFINITY } else { v[i - 1] };
        let right = if i + 1 == n { f64::NEG_INFINITY } else { v[i + 1] };
        if !(v[i] > left && v[i] >= right && v[i] >= top - 5e-3) {
            continue;
        }
        let t = i as f64 * t_step;
        let (lo, hi) = ((t - t_step).max(0.0), (t + t_step).min(t_max));
        let cand = golden_max(f, lo, hi, 1e-12, 200);
        // Candidates arrive in time order; a later one must be strictly better.
        if cand.1 > best.1 + 1e-12 {
            best = cand;
        }
    }
    Ok(best)
}
