//! Clone fidelity as an explicit trigonometric series in `t`.
//!
//! With eigenpairs `(E_k, m_k)` of the zero-field Hamiltonian and expansion
//! coefficients `a_k` of the initial state, a uniform field `b` only shifts
//! `E_k` by `(b / 2) m_k`, so
//!
//! ```text
//! F(b, t) = F0 + sum_{p<q} Re[c_pq exp(i (E_p - E_q + (b/2)(m_p - m_q)) t)]
//! c_pq    = 2 conj(a_p) a_q <p|O|q>
//! ```
//!
//! where `O` is the average over the measured sites of the projector onto
//! the target state. One decomposition serves a whole field/time scan.

use nalgebra::{DMatrix, DVector};

use super::CloneTask;
use crate::dynamics::Spectrum;
use crate::hilbert::{bit_of, site_mask, BlochInput, QuantumState};
use crate::{Error, Result, C64};

const DROP_TOL: f64 = 1e-15;
const MERGE_TOL: f64 = 1e-11;
/// Recurrence steps between exact phase resynchronizations.
const RESYNC: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    c: C64,
    de: f64,
    dm: f64,
}

#[derive(Debug, Clone)]
pub struct FidelitySeries {
    constant: f64,
    terms: Vec<Term>,
}

impl FidelitySeries {
    /// Mean fidelity over all blanks of `task`.
    pub fn new(task: &CloneTask) -> Result<Self> {
        Self::for_sites(task, &task.blanks()?)
    }

    /// Mean fidelity over `sites`.
    pub fn for_sites(task: &CloneTask, sites: &[usize]) -> Result<Self> {
        Self::from_hamiltonian(&task.hamiltonian(0.0)?, &task.initial_state()?, task.input, sites)
    }

    /// Mean fidelity with `input` over `sites`, for a zero-field Hamiltonian
    /// `h` that conserves total `sigma_z`, starting from the pure `psi0`.
    pub fn from_hamiltonian(h: &DMatrix<f64>, psi0: &QuantumState, input: BlochInput, sites: &[usize]) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidParameter("no sites to measure".into()));
        }
        let n = psi0.n_sites();
        if let Some(&s) = sites.iter().find(|&&s| s >= n) {
            return Err(Error::SiteOutOfRange { site: s, n_sites: n });
        }
        let amps = psi0.amplitudes().ok_or_else(|| Error::InvalidParameter("fidelity series needs a pure state".into()))?;
        let spec = Spectrum::for_state(h, psi0)?;
        let m = spec.magnetizations().ok_or_else(|| {
            Error::InvalidParameter("fidelity series needs a sum-Z conserving Hamiltonian".into())
        })?;
        let a = spec.coefficients(amps)?;
        let [t0, t1] = input.amplitudes();
        // Projector |phi><phi| on one site.
        let p = [[t0 * t0.conj(), t0 * t1.conj()], [t1 * t0.conj(), t1 * t1.conj()]];
        let v = spec.eigenvectors();
        let k = spec.len();
        let w = 1.0 / sites.len() as f64;

        // Only eigenvectors with weight in the initial state contribute.
        let live: Vec<usize> = (0..k).filter(|&i| a[i].norm() > DROP_TOL).collect();
        // O applied to each live eigenvector.
        let ov: Vec<DVector<C64>> = crate::par::map(&live, |&q| {
            let col = v.column(q);
            let mut out = DVector::<C64>::zeros(col.len());
            for &s in sites {
                let mask = site_mask(s, n);
                for b in 0..col.len() {
                    if bit_of(b, s, n) == 1 {
                        continue;
                    }
                    let (x0, x1) = (col[b], col[b | mask]);
                    if x0 == 0.0 && x1 == 0.0 {
                        continue;
                    }
                    out[b] += (p[0][0] * x0 + p[0][1] * x1) * w;
                    out[b | mask] += (p[1][0] * x0 + p[1][1] * x1) * w;
                }
            }
            out
        });

        let e = spec.eigenvalues();
        let rows: Vec<(f64, Vec<Term>)> = crate::par::map_range(live.len(), |ip| {
            let p_idx = live[ip];
            let vp = v.column(p_idx);
            let mut constant = 0.0;
            let mut terms = Vec::new();
            for (iq, &q_idx) in live.iter().enumerate().skip(ip) {
                let o_pq: C64 = vp.iter().zip(ov[iq].iter()).map(|(&x, &y)| y * x).sum();
                if iq == ip {
                    constant += a[p_idx].norm_sqr() * o_pq.re;
                    continue;
                }
                let c = a[p_idx].conj() * a[q_idx] * o_pq * 2.0;
                if c.norm() > DROP_TOL {
                    terms.push(Term { c, de: e[p_idx] - e[q_idx], dm: m[p_idx] - m[q_idx] });
                }
            }
            (constant, terms)
        });
        let mut constant = 0.0;
        let mut terms = Vec::new();
        for (c0, t) in rows {
            constant += c0;
            terms.extend(t);
        }
        Ok(Self::merged(constant, terms))
    }

    /// Canonicalize to non-negative `dm` (then non-negative `de`), fold
    /// static terms into the constant and merge equal frequencies.
    fn merged(mut constant: f64, terms: Vec<Term>) -> Self {
        let mut canon: Vec<Term> = terms
            .into_iter()
            .map(|t| {
                if t.dm < 0.0 || (t.dm == 0.0 && t.de < 0.0) {
                    Term { c: t.c.conj(), de: -t.de, dm: -t.dm }
                } else {
                    t
                }
            })
            .collect();
        canon.sort_by(|x, y| x.dm.total_cmp(&y.dm).then(x.de.total_cmp(&y.de)));
        let mut out: Vec<Term> = Vec::new();
        for t in canon {
            match out.last_mut() {
                Some(last) if last.dm == t.dm && (t.de - last.de).abs() <= MERGE_TOL => last.c += t.c,
                _ => out.push(t),
            }
        }
        out.retain(|t| {
            if t.dm == 0.0 && t.de.abs() <= MERGE_TOL {
                constant += t.c.re;
                false
            } else {
                t.c.norm() > DROP_TOL
            }
        });
        Self { constant, terms: out }
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Time-averaged fidelity.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    fn frequency(t: &Term, b: f64) -> f64 {
        t.de + 0.5 * b * t.dm
    }

    pub fn eval(&self, b: f64, t: f64) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|term| (term.c * C64::from_polar(1.0, Self::frequency(term, b) * t)).re)
                .sum::<f64>()
    }

    /// Visit `F(b, t0 + i dt)` for `i = 0..n` in order; stop early when the
    /// visitor returns `false`. Phases advance by rotation with periodic
    /// exact resynchronization.
    pub fn for_each_time(&self, b: f64, t0: f64, dt: f64, n: usize, mut visit: impl FnMut(usize, f64) -> bool) {
        let freqs: Vec<f64> = self.terms.iter().map(|t| Self::frequency(t, b)).collect();
        let rot: Vec<C64> = freqs.iter().map(|&f| C64::from_polar(1.0, f * dt)).collect();
        let mut w: Vec<C64> = Vec::with_capacity(self.terms.len());
        for i in 0..n {
            if i % RESYNC == 0 {
                let t = t0 + i as f64 * dt;
                w.clear();
                w.extend(self.terms.iter().zip(&freqs).map(|(term, &f)| term.c * C64::from_polar(1.0, f * t)));
            }
            let f = self.constant + w.iter().map(|z| z.re).sum::<f64>();
            if !visit(i, f) {
                return;
            }
            for (z, r) in w.iter_mut().zip(&rot) {
                *z *= r;
            }
        }
    }

    /// `F(b, t)` on a uniform time grid.
    pub fn values(&self, b: f64, t0: f64, dt: f64, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        self.for_each_time(b, t0, dt, n, |_, f| {
            out.push(f);
            true
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloner::clone_fidelity;
    use crate::hilbert::BlochInput;
    use crate::network::Topology;
    use proptest::prelude::*;

    fn tasks() -> Vec<CloneTask> {
        vec![
            CloneTask::equatorial(Topology::Star { m: 2 }, 0.0),
            CloneTask::new(Topology::Star { m: 3 }, 1.0, BlochInput::new(0.7, 2.0).unwrap()),
            CloneTask::equatorial(Topology::BipartiteStar { n: 2, m: 3 }, 0.0),
            CloneTask::new(Topology::Tree { k: 2, j: 0 }, 0.5, BlochInput::new(2.2, 0.3).unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn series_matches_direct_route(b in 0.0..4.0f64, t in 0.0..200.0f64) {
            for task in tasks() {
                let s = FidelitySeries::new(&task).unwrap();
                let direct = clone_fidelity(&task, b, t).unwrap().mean;
                prop_assert!((s.eval(b, t) - direct).abs() < 1e-11, "{:?}", task.topology);
            }
        }
    }

    #[test]
    fn recurrence_matches_direct_evaluation() {
        let task = CloneTask::equatorial(Topology::BipartiteStar { n: 2, m: 3 }, 0.0);
        let s = FidelitySeries::new(&task).unwrap();
        let (b, dt) = (0.37, 0.05);
        let vals = s.values(b, 1000.0, dt, 20_000);
        for (i, v) in vals.iter().enumerate().step_by(997) {
            assert!((v - s.eval(b, 1000.0 + i as f64 * dt)).abs() < 1e-11);
        }
    }

    #[test]
    fn per_site_series() {
        let task = CloneTask::new(Topology::Star { m: 2 }, 0.0, BlochInput::new(1.0, 0.0).unwrap());
        let blanks = task.blanks().unwrap();
        let s = FidelitySeries::for_sites(&task, &blanks[..1]).unwrap();
        let direct = clone_fidelity(&task, 0.4, 3.0).unwrap();
        assert!((s.eval(0.4, 3.0) - direct.per_site[0]).abs() < 1e-12);
        assert!(FidelitySeries::for_sites(&task, &[9]).is_err());
    }
}
