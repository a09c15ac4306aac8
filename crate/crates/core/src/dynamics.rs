//! Exact evolution through a dense eigendecomposition, split into blocks of
//! fixed excitation number, and the closed-form star coefficients.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::hilbert::QuantumState;
use crate::network::sz_commutator_norm;
use crate::{Error, Result, C64};

const BLOCK_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Block {
    /// Computational basis indices spanned by the block.
    indices: Vec<usize>,
    /// Offset of the block's first eigenpair in the flat eigenvalue list.
    offset: usize,
    /// Columns are eigenvectors expressed on `indices`.
    vectors: DMatrix<f64>,
}

/// Eigenpairs of a real symmetric Hamiltonian.
///
/// When `H` conserves `sum Z` the decomposition is carried out sector by
/// sector and each eigenpair also carries its magnetization, which lets a
/// uniform field be added afterwards as a pure phase. A spectrum can cover
/// only some sectors; evolving a state that populates any other sector is an
/// error.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n_sites: usize,
    energies: Vec<f64>,
    magnetization: Option<Vec<f64>>,
    blocks: Vec<Block>,
}

impl Spectrum {
    /// Full decomposition.
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        let n = check_square(h)?;
        Self::build(h, n, None)
    }

    /// Decomposition of the listed excitation sectors only. `H` must
    /// conserve `sum Z`.
    pub fn for_sectors(h: &DMatrix<f64>, sectors: &[usize]) -> Result<Self> {
        let n = check_square(h)?;
        Self::build(h, n, Some(sectors))
    }

    /// Decomposition of the sectors populated by `state` (all sectors if `H`
    /// does not conserve `sum Z`).
    pub fn for_state(h: &DMatrix<f64>, state: &QuantumState) -> Result<Self> {
        let n = check_square(h)?;
        if n != state.n_sites() {
            return Err(Error::DimensionMismatch { expected: h.nrows(), found: state.dim() });
        }
        if !conserves_sz(h) {
            return Self::build(h, n, None);
        }
        Self::build(h, n, Some(&populated_sectors(state)))
    }

    fn build(h: &DMatrix<f64>, n: usize, sectors: Option<&[usize]>) -> Result<Self> {
        let asym = (h - h.transpose()).amax();
        if asym > BLOCK_TOL * h.amax().max(1.0) {
            return Err(Error::InvalidParameter(format!("Hamiltonian not symmetric ({asym:e})")));
        }
        let blocked = conserves_sz(h);
        let groups: Vec<(Option<usize>, Vec<usize>)> = if blocked {
            let wanted: Vec<usize> = match sectors {
                Some(s) => {
                    let mut s = s.to_vec();
                    s.sort_unstable();
                    s.dedup();
                    if let Some(&bad) = s.iter().find(|&&k| k > n) {
                        return Err(Error::InvalidParameter(format!("sector {bad} exceeds {n} sites")));
                    }
                    s
                }
                None => (0..=n).collect(),
            };
            let mut by_sector: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
            for b in 0..1usize << n {
                by_sector[b.count_ones() as usize].push(b);
            }
            wanted.into_iter().map(|k| (Some(k), std::mem::take(&mut by_sector[k]))).collect()
        } else {
            if sectors.is_some() {
                return Err(Error::InvalidParameter(
                    "sector restriction requires a Hamiltonian that conserves sum Z".into(),
                ));
            }
            vec![(None, (0..1usize << n).collect())]
        };

        let decomposed: Vec<(Option<usize>, Vec<usize>, SymmetricEigen<f64, nalgebra::Dyn>)> =
            crate::par::map(&groups, |(k, idx)| {
                let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| h[(idx[r], idx[c])]);
                (*k, idx.clone(), sub.symmetric_eigen())
            });

        let mut energies = Vec::new();
        let mut magnetization = blocked.then(Vec::new);
        let mut blocks = Vec::with_capacity(decomposed.len());
        for (k, indices, eig) in decomposed {
            let offset = energies.len();
            energies.extend(eig.eigenvalues.iter().copied());
            if let (Some(m), Some(k)) = (magnetization.as_mut(), k) {
                m.extend(std::iter::repeat(n as f64 - 2.0 * k as f64).take(indices.len()));
            }
            blocks.push(Block { indices, offset, vectors: eig.eigenvectors });
        }
        Ok(Self { n_sites: n, energies, magnetization, blocks })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// Number of eigenpairs held.
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.energies
    }

    /// `sum Z` of each eigenvector, if `H` conserves it.
    pub fn magnetizations(&self) -> Option<&[f64]> {
        self.magnetization.as_deref()
    }

    /// Eigenvectors as columns of a `dim x len` matrix.
    pub fn eigenvectors(&self) -> DMatrix<f64> {
        let mut v = DMatrix::zeros(self.dim(), self.len());
        for blk in &self.blocks {
            for (c, col) in blk.vectors.column_iter().enumerate() {
                for (r, &idx) in blk.indices.iter().enumerate() {
                    v[(idx, blk.offset + c)] = col[r];
                }
            }
        }
        v
    }

    /// `V diag(E) V^T`, for auditing.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let v = self.eigenvectors();
        let e = DMatrix::from_diagonal(&DVector::from_column_slice(&self.energies));
        &v * e * v.transpose()
    }

    /// Energies shifted by a uniform extra field `b`: `E + (b / 2) m`.
    pub fn shifted_energies(&self, b: f64) -> Result<Vec<f64>> {
        if b == 0.0 {
            return Ok(self.energies.clone());
        }
        let m = self.magnetization.as_ref().ok_or_else(|| {
            Error::InvalidParameter("field shift needs a sum-Z conserving Hamiltonian".into())
        })?;
        Ok(self.energies.iter().zip(m).map(|(e, m)| e + 0.5 * b * m).collect())
    }

    /// Expansion coefficients `<k|psi>` of a pure state, checking that no
    /// weight falls outside the covered sectors.
    pub fn coefficients(&self, psi: &DVector<C64>) -> Result<DVector<C64>> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.len() });
        }
        let mut covered = 0.0;
        let mut a = DVector::zeros(self.len());
        for blk in &self.blocks {
            let local = DVector::from_iterator(blk.indices.len(), blk.indices.iter().map(|&i| psi[i]));
            covered += local.norm_squared();
            for (c, col) in blk.vectors.column_iter().enumerate() {
                a[blk.offset + c] = col.iter().zip(local.iter()).map(|(&v, &p)| p * v).sum();
            }
        }
        let outside = psi.norm_squared() - covered;
        if outside > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "state has weight {outside:e} outside the decomposed sectors"
            )));
        }
        Ok(a)
    }

    /// `e^{-i (H + (b/2) sum Z) t} psi`.
    pub fn evolve_pure(&self, psi: &DVector<C64>, t: f64, b: f64) -> Result<DVector<C64>> {
        let a = self.coefficients(psi)?;
        let e = self.shifted_energies(b)?;
        let mut out = DVector::zeros(self.dim());
        for blk in &self.blocks {
            let phased: Vec<C64> = (0..blk.vectors.ncols())
                .map(|c| a[blk.offset + c] * C64::from_polar(1.0, -e[blk.offset + c] * t))
                .collect();
            for (r, &idx) in blk.indices.iter().enumerate() {
                out[idx] = (0..phased.len()).map(|c| phased[c] * blk.vectors[(r, c)]).sum();
            }
        }
        Ok(out)
    }

    /// Propagator on the covered sectors (zero elsewhere).
    pub fn propagator(&self, t: f64, b: f64) -> Result<DMatrix<C64>> {
        let e = self.shifted_energies(b)?;
        let mut u = DMatrix::zeros(self.dim(), self.dim());
        for blk in &self.blocks {
            let k = blk.vectors.ncols();
            let v = blk.vectors.map(|x| C64::new(x, 0.0));
            let ph = DMatrix::from_diagonal(&DVector::from_iterator(
                k,
                (0..k).map(|c| C64::from_polar(1.0, -e[blk.offset + c] * t)),
            ));
            let local = &v * ph * v.transpose();
            for (r, &ri) in blk.indices.iter().enumerate() {
                for (c, &ci) in blk.indices.iter().enumerate() {
                    u[(ri, ci)] = local[(r, c)];
                }
            }
        }
        Ok(u)
    }

    /// Evolve a pure or mixed state by `t` under `H + (b/2) sum Z`.
    pub fn evolve(&self, state: &QuantumState, t: f64, b: f64) -> Result<QuantumState> {
        if state.n_sites() != self.n_sites {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: state.dim() });
        }
        if let Some(psi) = state.amplitudes() {
            return Ok(QuantumState::pure_unchecked(self.evolve_pure(psi, t, b)?));
        }
        let rho = state.mixed_matrix().expect("mixed state");
        let weight: f64 = self.blocks.iter().flat_map(|blk| blk.indices.iter()).map(|&i| rho[(i, i)].re).sum();
        if (rho.trace().re - weight).abs() > 1e-12 {
            return Err(Error::InvalidParameter("density matrix populates undecomposed sectors".into()));
        }
        let u = self.propagator(t, b)?;
        Ok(QuantumState::mixed_unchecked(&u * rho * u.adjoint()))
    }
}

fn check_square(h: &DMatrix<f64>) -> Result<usize> {
    if h.nrows() != h.ncols() {
        return Err(Error::InvalidParameter("Hamiltonian is not square".into()));
    }
    let dim = h.nrows();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("Hamiltonian dimension {dim} is not 2^n")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > crate::hilbert::MAX_SITES {
        return Err(Error::TooManySites(n));
    }
    Ok(n)
}

fn conserves_sz(h: &DMatrix<f64>) -> bool {
    sz_commutator_norm(h) <= BLOCK_TOL * h.amax().max(1.0)
}

/// Excitation numbers with nonzero weight in `state`.
pub fn populated_sectors(state: &QuantumState) -> Vec<usize> {
    let mut hit = vec![false; state.n_sites() + 1];
    match state.amplitudes() {
        Some(psi) => {
            for (b, a) in psi.iter().enumerate() {
                if a.norm_sqr() > 0.0 {
                    hit[b.count_ones() as usize] = true;
                }
            }
        }
        None => {
            let rho = state.mixed_matrix().expect("mixed state");
            for b in 0..rho.nrows() {
                if rho[(b, b)].norm() > 0.0 {
                    hit[b.count_ones() as usize] = true;
                }
            }
        }
    }
    (0..hit.len()).filter(|&k| hit[k]).collect()
}

/// `e^{-iHt}` applied to `state`, decomposing `H` on the fly.
pub fn evolve(h: &DMatrix<f64>, state: &QuantumState, t: f64) -> Result<QuantumState> {
    Spectrum::for_state(h, state)?.evolve(state, t, 0.0)
}

/// One-excitation amplitudes of a star: `beta1` on the hub and `beta2` on
/// the symmetric blank combination (each blank carries `beta2 / sqrt M`),
/// measured relative to the phase of the all-up component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarCoefficients {
    pub beta1: C64,
    pub beta2: C64,
}

/// Heisenberg star at zero field.
pub fn star_coeffs_heisenberg(m: usize, beta: C64, t: f64) -> StarCoefficients {
    let s = m as f64 / 2.0;
    let ph = C64::from_polar(1.0, (0.5 + s) * t);
    let norm = 1.0 + 2.0 * s;
    StarCoefficients {
        beta1: beta * (ph * (2.0 * s) + 1.0) / norm,
        beta2: beta * (2.0 * s).sqrt() * (C64::new(1.0, 0.0) - ph) / norm,
    }
}

/// XY star in a uniform field `b`.
pub fn star_coeffs_xy(m: usize, beta: C64, b: f64, t: f64) -> StarCoefficients {
    let (sn, cs) = ((m as f64).sqrt() * t / 2.0).sin_cos();
    let ph = beta * C64::from_polar(1.0, b * t);
    StarCoefficients { beta1: ph * cs, beta2: ph * C64::new(0.0, -sn) }
}
