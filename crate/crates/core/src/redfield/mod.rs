//! Bloch-Redfield master equation for a register whose sites each couple
//! through `sigma_z` to an independent Ohmic bath.
//!
//! In the eigenbasis of `H_S` the density matrix obeys
//!
//! ```text
//! d rho_ab / dt = -i w_ab rho_ab - sum_cd R_abcd rho_cd
//! R_abcd = sum_i [ delta_bd sum_n A_an A_nc G(w_cn) + delta_ac sum_n A_dn A_nb G*(w_dn)
//!                  - A_ac A_db G(w_ca) - A_ac A_db G*(w_db) ]
//! ```
//!
//! with `w_ab = E_a - E_b`, `A = A_i` the coupling operator of site `i` and
//! `G(w) = int_0^inf dtau C(tau) exp(i w tau)` the half-range transform of
//! the bath correlation function. Its real part is half the bath spectrum,
//! `Re G(w) = S(-w) / 2`; the imaginary part (Lamb shift) is a principal-value
//! integral of `S` and is off by default. Applied to a matrix the tensor
//! reads `R rho = sum_i [A_i, K_i rho] + [rho K_i^+, A_i]` with
//! `(K_i)_ac = (A_i)_ac G(w_ca)`, which is how it is stored and applied.

mod dopri;
mod quadrature;

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::Spectrum;
use crate::hilbert::{max_abs, Axis, QuantumState, SiteOperator};
use crate::{Error, Result, C64};

pub use dopri::Stats as IntegratorStats;
pub use quadrature::{integrate as gauss_kronrod, principal_value};

/// Largest Hilbert-space dimension accepted by the tensor builder.
pub const MAX_DIM: usize = 64;
/// Default integrator tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
const DEGENERACY_GAP: f64 = 1e-12;

/// Ohmic bath `J(w) = (pi/2) alpha w exp(-|w| / cutoff)`, extended oddly, at
/// inverse temperature `inv_temperature`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub alpha: f64,
    pub inv_temperature: f64,
    pub cutoff: f64,
}

impl Default for BathSpec {
    fn default() -> Self {
        Self { alpha: 0.0, inv_temperature: 10.0, cutoff: 1e4 }
    }
}

impl BathSpec {
    pub fn new(alpha: f64, inv_temperature: f64, cutoff: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("bath coupling {alpha} must be >= 0")));
        }
        if !(inv_temperature > 0.0) {
            return Err(Error::InvalidParameter(format!("inverse temperature {inv_temperature} must be > 0")));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidParameter(format!("cutoff {cutoff} must be > 0")));
        }
        Ok(Self { alpha, inv_temperature, cutoff })
    }

    /// Default temperature and cutoff with coupling `alpha`.
    pub fn with_alpha(alpha: f64) -> Result<Self> {
        let d = Self::default();
        Self::new(alpha, d.inv_temperature, d.cutoff)
    }
}

/// `[G]_w = 2 N(w) J(w)` with `N(w) = 1 / (exp(beta w) - 1)`: absorption for
/// `w > 0`, emission for `w < 0`, `pi alpha / beta` at `w = 0`.
pub fn bath_spectrum(omega: f64, bath: &BathSpec) -> f64 {
    let a = bath.alpha;
    if a == 0.0 {
        return 0.0;
    }
    let beta = bath.inv_temperature;
    if omega == 0.0 {
        return std::f64::consts::PI * a / beta;
    }
    // 2 J(w) N(w) = pi alpha w exp(-|w|/wc) / (exp(beta w) - 1)
    std::f64::consts::PI * a * omega * (-omega.abs() / bath.cutoff).exp() / (beta * omega).exp_m1()
}

/// Half-range transform `G(w)`; the imaginary part only when `lamb_shift`.
fn half_range(omega: f64, bath: &BathSpec, lamb_shift: bool) -> C64 {
    let re = 0.5 * bath_spectrum(-omega, bath);
    if !lamb_shift || bath.alpha == 0.0 {
        return C64::new(re, 0.0);
    }
    // Im G(w) = (1/2pi) P int S(v) / (w - v) dv with S(v) = [G]_{-v}. S decays
    // like exp(-beta |v|) for v < 0 and like exp(-v / cutoff) for v > 0.
    let lo = -(60.0 / bath.inv_temperature).min(60.0 * bath.cutoff) - omega.abs() - 1.0;
    let hi = 60.0 * bath.cutoff + omega.abs() + 1.0;
    let tol = 1e-10 * bath.alpha.max(1e-300) * bath.cutoff;
    let pv = principal_value(|v| bath_spectrum(-v, bath), omega, lo, hi, tol);
    C64::new(re, pv / (2.0 * std::f64::consts::PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RedfieldOptions {
    /// Keep the principal-value (energy-shift) part of the half-range
    /// transforms.
    pub lamb_shift: bool,
}

/// Redfield generator in the eigenbasis of `H_S`.
#[derive(Debug, Clone)]
pub struct RedfieldTensor {
    energies: Vec<f64>,
    /// Eigenvectors as columns (computational basis rows).
    basis: DMatrix<f64>,
    /// Coupling operators in the eigenbasis.
    a: Vec<DMatrix<C64>>,
    k: Vec<DMatrix<C64>>,
    /// `sum_i A_i K_i` and `sum_i K_i^+ A_i`.
    p: DMatrix<C64>,
    q: DMatrix<C64>,
    /// Some coupling operator connects distinct eigenvectors of equal energy.
    pub degenerate: bool,
}

impl RedfieldTensor {
    /// Tensor for `h` on `n_sites` qubits with a `sigma_z` bath on every site.
    pub fn sigma_z(h: &DMatrix<f64>, baths: &[BathSpec], options: RedfieldOptions) -> Result<Self> {
        let n = h.nrows().trailing_zeros() as usize;
        if baths.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: baths.len() });
        }
        let ops = (0..n)
            .map(|i| SiteOperator::new(i, Axis::Z).to_dense(n).map(|m| m.map(|z| z.re)))
            .collect::<Result<Vec<_>>>()?;
        Self::build(h, &ops, baths, options)
    }

    /// Tensor for `h` with Hermitian real coupling operators `ops[i]`, each
    /// attached to its own bath `baths[i]`.
    pub fn build(h: &DMatrix<f64>, ops: &[DMatrix<f64>], baths: &[BathSpec], options: RedfieldOptions) -> Result<Self> {
        let d = h.nrows();
        if d > MAX_DIM {
            return Err(Error::RedfieldTooLarge(d));
        }
        if ops.len() != baths.len() {
            return Err(Error::DimensionMismatch { expected: ops.len(), found: baths.len() });
        }
        if let Some(op) = ops.iter().find(|o| o.nrows() != d || o.ncols() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: op.nrows() });
        }
        let spec = Spectrum::new(h)?;
        let energies = spec.eigenvalues().to_vec();
        let basis = spec.eigenvectors();

        let a: Vec<DMatrix<C64>> = ops.iter().map(|o| (basis.transpose() * o * &basis).map(|x| C64::new(x, 0.0))).collect();
        let mut degenerate = false;
        for ai in &a {
            for r in 0..d {
                for c in 0..d {
                    if r != c && (energies[r] - energies[c]).abs() < DEGENERACY_GAP && ai[(r, c)].norm() > DEGENERACY_GAP {
                        degenerate = true;
                    }
                }
            }
        }
        if degenerate {
            // The tensor depends on the Bohr frequencies only, so any basis of
            // a degenerate subspace gives the same generator; flag it anyway.
            log::debug!("coupling operators connect degenerate eigenvectors");
        }

        // Distinct baths share their half-range tables.
        let mut tables: Vec<(BathSpec, DMatrix<C64>)> = Vec::new();
        let mut k = Vec::with_capacity(a.len());
        for (ai, bath) in a.iter().zip(baths) {
            let idx = match tables.iter().position(|(b, _)| b == bath) {
                Some(i) => i,
                None => {
                    tables.push((*bath, gamma_table(&energies, bath, options.lamb_shift)));
                    tables.len() - 1
                }
            };
            let g = &tables[idx].1;
            // K_ac = A_ac G(w_ca)
            k.push(DMatrix::from_fn(d, d, |r, c| ai[(r, c)] * g[(c, r)]));
        }
        let zero = DMatrix::<C64>::zeros(d, d);
        let p = a.iter().zip(&k).fold(zero.clone(), |acc, (ai, ki)| acc + ai * ki);
        let q = a.iter().zip(&k).fold(zero, |acc, (ai, ki)| acc + ki.adjoint() * ai);
        Ok(Self { energies, basis, a, k, p, q, degenerate })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvectors of `H_S` as columns.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Bohr frequency `w_ab = E_a - E_b`.
    pub fn bohr(&self, a: usize, b: usize) -> f64 {
        self.energies[a] - self.energies[b]
    }

    /// `R_abcd`.
    pub fn element(&self, a: usize, b: usize, c: usize, d: usize) -> C64 {
        let mut r = C64::new(0.0, 0.0);
        if b == d {
            r += self.p[(a, c)];
        }
        if a == c {
            r += self.q[(d, b)];
        }
        for (ai, ki) in self.a.iter().zip(&self.k) {
            // K^+_db = conj(K_bd)
            r -= ki[(a, c)] * ai[(d, b)] + ai[(a, c)] * ki[(b, d)].conj();
        }
        r
    }

    /// `R` as a `D^2 x D^2` matrix with row `a D + b` and column `c D + d`.
    pub fn superoperator(&self) -> DMatrix<C64> {
        let d = self.dim();
        DMatrix::from_fn(d * d, d * d, |r, c| self.element(r / d, r % d, c / d, c % d))
    }

    /// `max_cd |sum_a R_aacd|`; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for c in 0..d {
            for e in 0..d {
                let s: C64 = (0..d).map(|a| self.element(a, a, c, e)).sum();
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    /// `max |R_abcd - conj(R_badc)|`; zero when Hermiticity is preserved.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        worst = worst.max((self.element(a, b, c, e) - self.element(b, a, e, c).conj()).norm());
                    }
                }
            }
        }
        worst
    }

    /// `R rho` for `rho` in the eigenbasis.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = &self.p * rho + rho * &self.q;
        for (ai, ki) in self.a.iter().zip(&self.k) {
            out -= ki * rho * ai + ai * rho * ki.adjoint();
        }
        out
    }

    /// Full right-hand side `-i [E, rho] - R rho` in the eigenbasis.
    pub fn generator(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = self.apply(rho);
        out.neg_mut();
        let d = self.dim();
        for r in 0..d {
            for c in 0..d {
                out[(r, c)] += C64::new(0.0, -self.bohr(r, c)) * rho[(r, c)];
            }
        }
        out
    }

    fn to_eigenbasis(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let v = self.basis.map(|x| C64::new(x, 0.0));
        v.transpose() * rho * v
    }

    fn from_eigenbasis(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let v = self.basis.map(|x| C64::new(x, 0.0));
        &v * rho * v.transpose()
    }
}

/// `G(w_ab)` for every pair, memoized by frequency.
fn gamma_table(energies: &[f64], bath: &BathSpec, lamb_shift: bool) -> DMatrix<C64> {
    let d = energies.len();
    let mut cache: HashMap<u64, C64> = HashMap::new();
    DMatrix::from_fn(d, d, |r, c| {
        let w = energies[r] - energies[c];
        // Merge frequencies that differ only by rounding.
        let key = ((w * 1e10).round() / 1e10).to_bits();
        *cache.entry(key).or_insert_with(|| half_range(w, bath, lamb_shift))
    })
}

/// Result of a master-equation run.
#[derive(Debug, Clone)]
pub struct MasterOutcome {
    pub state: QuantumState,
    pub stats: IntegratorStats,
    /// Smallest eigenvalue of the final density matrix.
    pub min_eigenvalue: f64,
}

/// Integrate the master equation from `rho0` for time `t` with the adaptive
/// Dormand-Prince scheme at tolerance `tol`. The coherent part is solved
/// exactly; only the dissipative drift is stepped, so `alpha = 0` reproduces
/// unitary evolution to rounding.
pub fn evolve_master(rho0: &QuantumState, tensor: &RedfieldTensor, t: f64, tol: f64) -> Result<MasterOutcome> {
    let d = tensor.dim();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rho0.dim() });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be > 0")));
    }
    // Integrate u_ab = exp(i w_ab t) rho_ab, which removes the coherent
    // oscillation and leaves only the dissipative drift: du/dt = -phase(R rho).
    let phase = |t: f64, sign: f64| -> DMatrix<C64> {
        DMatrix::from_fn(d, d, |r, c| C64::from_polar(1.0, sign * tensor.bohr(r, c) * t))
    };
    let r0 = tensor.to_eigenbasis(&rho0.density_matrix());
    let y0: Vec<C64> = r0.iter().copied().collect();
    let (y, stats) = dopri::integrate(
        |s, u, du| {
            let rho = DMatrix::from_column_slice(d, d, u).component_mul(&phase(s, -1.0));
            let drift = tensor.apply(&rho).component_mul(&phase(s, 1.0));
            for (o, v) in du.iter_mut().zip(drift.iter()) {
                *o = -v;
            }
        },
        &y0,
        t,
        tol,
    )?;
    let y = DMatrix::from_column_slice(d, d, &y).component_mul(&phase(t, -1.0));
    let rho = tensor.from_eigenbasis(&y);
    let herm = max_abs(&(&rho - rho.adjoint()));
    if herm > 1e-8 {
        log::warn!("master-equation output deviates from Hermiticity by {herm:e}");
    }
    let min_eigenvalue = ((&rho + rho.adjoint()) * C64::new(0.5, 0.0)).symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -1e-4 {
        log::warn!("Redfield evolution lost positivity: smallest eigenvalue {min_eigenvalue:e}");
    }
    Ok(MasterOutcome { state: QuantumState::mixed_unchecked(rho), stats, min_eigenvalue })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloner::CloneTask;
    use crate::dynamics::evolve;
    use crate::hilbert::BlochInput;
    use crate::network::Topology;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn star_task(m: usize) -> (CloneTask, DMatrix<f64>, f64) {
        let task = CloneTask::equatorial(Topology::Star { m }, 0.0).with_input(BlochInput::equatorial(0.3));
        let mf = m as f64;
        let h = task.hamiltonian(mf.sqrt() / 2.0).unwrap();
        (task, h, PI / mf.sqrt())
    }

    #[test]
    fn spectrum_limits_and_detailed_balance() {
        let bath = BathSpec::with_alpha(0.02).unwrap();
        assert_relative_eq!(bath_spectrum(0.0, &bath), PI * 0.02 / 10.0, epsilon = 1e-15);
        assert_relative_eq!(bath_spectrum(1e-9, &bath), PI * 0.02 / 10.0, max_relative = 1e-7);
        let cold = BathSpec::new(0.02, 1e4, 1e4).unwrap();
        assert!(bath_spectrum(0.5, &cold) < 1e-300);
        for w in [0.1, 1.0, 3.0] {
            let ratio = bath_spectrum(-w, &bath) / bath_spectrum(w, &bath);
            assert_relative_eq!(ratio, (10.0 * w).exp(), max_relative = 1e-12);
        }
        assert_eq!(bath_spectrum(0.7, &BathSpec::default()), 0.0);
    }

    #[test]
    fn zero_coupling_gives_zero_tensor() {
        let (_, h, _) = star_task(2);
        let r = RedfieldTensor::sigma_z(&h, &[BathSpec::default(); 3], RedfieldOptions::default()).unwrap();
        assert_eq!(max_abs(&r.superoperator()), 0.0);
    }

    #[test]
    fn audits_hold_with_and_without_lamb_shift() {
        let (_, h, _) = star_task(2);
        let baths = [BathSpec::with_alpha(0.01).unwrap(); 3];
        for lamb_shift in [false, true] {
            let r = RedfieldTensor::sigma_z(&h, &baths, RedfieldOptions { lamb_shift }).unwrap();
            assert!(r.trace_defect() < 1e-10, "{}", r.trace_defect());
            assert!(r.hermiticity_defect() < 1e-10, "{}", r.hermiticity_defect());
        }
    }

    #[test]
    fn operator_form_matches_superoperator() {
        let (task, h, _) = star_task(2);
        let r = RedfieldTensor::sigma_z(&h, &[BathSpec::with_alpha(0.05).unwrap(); 3], RedfieldOptions::default()).unwrap();
        let rho = r.to_eigenbasis(&task.initial_state().unwrap().density_matrix());
        let flat = DMatrix::from_column_slice(64, 1, rho.transpose().as_slice());
        // Row-major flattening: index a D + b.
        let via_super = r.superoperator() * flat;
        let direct = r.apply(&rho);
        for a in 0..8 {
            for b in 0..8 {
                assert!((via_super[a * 8 + b] - direct[(a, b)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn single_qubit_pure_dephasing() {
        let bfield = 0.8;
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![bfield / 2.0, -bfield / 2.0]));
        let bath = BathSpec::with_alpha(0.03).unwrap();
        let r = RedfieldTensor::sigma_z(&h, &[bath], RedfieldOptions::default()).unwrap();
        // Eigenvalues ascend: index 0 is |1>, index 1 is |0>.
        let g0 = bath_spectrum(0.0, &bath);
        assert_relative_eq!(r.element(0, 1, 0, 1).re, 2.0 * g0, epsilon = 1e-15);
        assert_relative_eq!(r.element(0, 0, 1, 1).norm(), 0.0);
        assert_relative_eq!(r.element(1, 1, 0, 0).norm(), 0.0);
        assert_relative_eq!(r.element(0, 0, 0, 0).norm(), 0.0);

        let plus = QuantumState::qubit(BlochInput::equatorial(0.0));
        let t = 5.0;
        let out = evolve_master(&plus, &r, t, 1e-10).unwrap().state.density_matrix();
        assert_relative_eq!(out[(0, 1)].norm(), 0.5 * (-2.0 * g0 * t).exp(), epsilon = 1e-9);
        assert_relative_eq!(out[(0, 0)].re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn zero_coupling_reduces_to_unitary() {
        let (task, h, t) = star_task(2);
        let rho0 = task.initial_state().unwrap().into_mixed();
        let r = RedfieldTensor::sigma_z(&h, &[BathSpec::default(); 3], RedfieldOptions::default()).unwrap();
        let out = evolve_master(&rho0, &r, t, DEFAULT_TOL).unwrap();
        let exact = evolve(&h, &rho0, t).unwrap();
        let err = max_abs(&(out.state.density_matrix() - exact.density_matrix()));
        assert!(err < 1e-8, "{err:e}");
    }

    #[test]
    fn trace_conserved_and_fidelity_degrades() {
        let (task, h, t) = star_task(2);
        let rho0 = task.initial_state().unwrap();
        let r = RedfieldTensor::sigma_z(&h, &[BathSpec::with_alpha(1e-2).unwrap(); 3], RedfieldOptions::default()).unwrap();
        let out = evolve_master(&rho0, &r, t, DEFAULT_TOL).unwrap();
        assert!((out.state.trace() - 1.0).abs() < 1e-7);
        let f = crate::cloner::site_fidelities(&out.state, &[1, 2], &task.target()).unwrap().mean;
        assert!(f < 0.853553 && f > 0.5, "{f}");
    }

    #[test]
    fn rejects_oversized_registers() {
        let h = DMatrix::<f64>::zeros(128, 128);
        assert!(matches!(
            RedfieldTensor::sigma_z(&h, &[BathSpec::default(); 7], RedfieldOptions::default()),
            Err(Error::RedfieldTooLarge(128))
        ));
    }
}
