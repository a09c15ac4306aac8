//! Tensor-product states and operators on qubit registers.
//!
//! Basis convention: site 0 is the most significant bit of the computational
//! index. Every routine in the crate that maps between sites and bits goes
//! through [`bit_of`] / [`site_mask`] so the convention lives in one place.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};

use crate::{Error, Result, C64};

/// Largest register accepted anywhere in the crate.
pub const MAX_SITES: usize = 24;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;
/// Eigenvalue positivity is only audited up to this dimension.
const POSITIVITY_AUDIT_MAX_DIM: usize = 256;

/// Largest entry modulus of a complex matrix.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Bit mask selecting `site` in an `n_sites` register.
#[inline]
pub fn site_mask(site: usize, n_sites: usize) -> usize {
    1 << (n_sites - 1 - site)
}

/// Value (0 or 1) of `site` in basis index `index`.
#[inline]
pub fn bit_of(index: usize, site: usize, n_sites: usize) -> usize {
    (index >> (n_sites - 1 - site)) & 1
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites > MAX_SITES {
        return Err(Error::TooManySites(n_sites));
    }
    Ok(())
}

fn sites_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    check_sites(n)?;
    Ok(n)
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

/// Pure state vector or density matrix over `n_sites` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_sites: usize,
    repr: Repr,
}

impl QuantumState {
    /// Pure state from amplitudes; must be normalized to 1e-12.
    pub fn pure(amplitudes: DVector<C64>) -> Result<Self> {
        let n_sites = sites_for_dim(amplitudes.len())?;
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n_sites, repr: Repr::Pure(amplitudes) })
    }

    /// Density matrix; must be Hermitian, unit trace and positive
    /// semidefinite (the latter audited for dimensions up to 256).
    pub fn mixed(rho: DMatrix<C64>) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::InvalidDensityMatrix("matrix is not square".into()));
        }
        let n_sites = sites_for_dim(rho.nrows())?;
        let herm_err = max_abs(&(&rho - rho.adjoint()));
        if herm_err > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (max deviation {herm_err:e})"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        if rho.nrows() <= POSITIVITY_AUDIT_MAX_DIM {
            let min_eig = rho
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if min_eig < -POSITIVITY_TOL {
                return Err(Error::InvalidDensityMatrix(format!(
                    "negative eigenvalue {min_eig:e}"
                )));
            }
        }
        Ok(Self { n_sites, repr: Repr::Mixed(rho) })
    }

    /// Skips validation; for states produced by norm-preserving numerics.
    pub(crate) fn pure_unchecked(amplitudes: DVector<C64>) -> Self {
        let n_sites = amplitudes.len().trailing_zeros() as usize;
        Self { n_sites, repr: Repr::Pure(amplitudes) }
    }

    pub(crate) fn mixed_unchecked(rho: DMatrix<C64>) -> Self {
        let n_sites = rho.nrows().trailing_zeros() as usize;
        Self { n_sites, repr: Repr::Mixed(rho) }
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {n_sites} sites"
            )));
        }
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self::pure_unchecked(v))
    }

    /// Single-qubit state `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    pub fn qubit(input: BlochInput) -> Self {
        let [a, b] = input.amplitudes();
        Self::pure_unchecked(DVector::from_vec(vec![a, b]))
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        let rho = DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0);
        Ok(Self::mixed_unchecked(rho))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&DVector<C64>> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Mixed(_) => None,
        }
    }

    /// Density matrix (computed as `|psi><psi|` for pure states).
    pub fn density_matrix(&self) -> DMatrix<C64> {
        match &self.repr {
            Repr::Pure(v) => v * v.adjoint(),
            Repr::Mixed(m) => m.clone(),
        }
    }

    pub fn into_mixed(self) -> Self {
        match self.repr {
            Repr::Pure(ref v) => Self::mixed_unchecked(v * v.adjoint()),
            Repr::Mixed(_) => self,
        }
    }

    pub(crate) fn mixed_matrix(&self) -> Option<&DMatrix<C64>> {
        match &self.repr {
            Repr::Mixed(m) => Some(m),
            Repr::Pure(_) => None,
        }
    }

    /// `<psi|psi>` or `Tr rho`.
    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Pure(v) => v.norm_squared(),
            Repr::Mixed(m) => m.trace().re,
        }
    }

    /// Expectation value of an operator on the full register.
    pub fn expectation(&self, op: &DMatrix<C64>) -> Result<C64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.nrows() });
        }
        Ok(match &self.repr {
            Repr::Pure(v) => v.dotc(&(op * v)),
            Repr::Mixed(m) => (op * m).trace(),
        })
    }
}

/// Input qubit direction on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BlochInput {
    pub theta: f64,
    pub phi: f64,
}

impl BlochInput {
    /// `theta` in `[0, pi]`, `phi` in `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        use std::f64::consts::{PI, TAU};
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!("theta = {theta} outside [0, pi]")));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::InvalidParameter(format!("phi = {phi} outside [0, 2 pi)")));
        }
        Ok(Self { theta, phi })
    }

    pub fn equatorial(phi: f64) -> Self {
        Self { theta: std::f64::consts::FRAC_PI_2, phi: phi.rem_euclid(std::f64::consts::TAU) }
    }

    pub fn is_equatorial(&self) -> bool {
        (self.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-15
    }

    /// `[cos(theta/2), e^{i phi} sin(theta/2)]`.
    pub fn amplitudes(&self) -> [C64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [C64::new(c, 0.0), C64::from_polar(s, self.phi)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
    /// `sigma_+ = |0><1|`, raises `sigma_z`.
    Plus,
    /// `sigma_- = |1><0|`.
    Minus,
}

impl Axis {
    pub fn matrix(self) -> Matrix2<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Axis::X => Matrix2::new(o, l, l, o),
            Axis::Y => Matrix2::new(o, -i, i, o),
            Axis::Z => Matrix2::new(l, o, o, -l),
            Axis::Plus => Matrix2::new(o, l, o, o),
            Axis::Minus => Matrix2::new(o, o, l, o),
        }
    }
}

/// Pauli (or ladder) operator acting on one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteOperator {
    pub site: usize,
    pub axis: Axis,
}

impl SiteOperator {
    pub fn new(site: usize, axis: Axis) -> Self {
        Self { site, axis }
    }

    /// Dense matrix on the full register.
    pub fn to_dense(&self, n_sites: usize) -> Result<DMatrix<C64>> {
        if self.site >= n_sites {
            return Err(Error::SiteOutOfRange { site: self.site, n_sites });
        }
        check_sites(n_sites)?;
        Ok(embed_one(&self.axis.matrix(), self.site, n_sites))
    }
}

/// Embed a single-site operator into an `n_sites` register.
pub fn embed_one(u: &Matrix2<C64>, site: usize, n_sites: usize) -> DMatrix<C64> {
    let dim = 1usize << n_sites;
    let mask = site_mask(site, n_sites);
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let b = bit_of(col, site, n_sites);
        let base = col & !mask;
        for out in 0..2 {
            let v = u[(out, b)];
            if v != C64::new(0.0, 0.0) {
                let row = if out == 1 { base | mask } else { base };
                m[(row, col)] += v;
            }
        }
    }
    m
}

/// Embed a two-site operator into an `n_sites` register. `u` is indexed by
/// `2 * bit(a) + bit(b)`.
pub fn embed_two(u: &Matrix4<C64>, a: usize, b: usize, n_sites: usize) -> DMatrix<C64> {
    let dim = 1usize << n_sites;
    let (ma, mb) = (site_mask(a, n_sites), site_mask(b, n_sites));
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let local_in = 2 * bit_of(col, a, n_sites) + bit_of(col, b, n_sites);
        let base = col & !(ma | mb);
        for local_out in 0..4 {
            let v = u[(local_out, local_in)];
            if v != C64::new(0.0, 0.0) {
                let mut row = base;
                if local_out & 2 != 0 {
                    row |= ma;
                }
                if local_out & 1 != 0 {
                    row |= mb;
                }
                m[(row, col)] += v;
            }
        }
    }
    m
}

/// Tensor product in listed order (first factor holds the lowest site
/// indices). Pure stays pure; any mixed factor makes the result mixed.
pub fn compose(states: &[QuantumState]) -> Result<QuantumState> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidParameter("compose of an empty list".into()))?;
    let total: usize = states.iter().map(|s| s.n_sites).sum();
    check_sites(total)?;
    if states.iter().all(QuantumState::is_pure) {
        let mut v = first.amplitudes().unwrap().clone();
        for s in &states[1..] {
            v = v.kronecker(s.amplitudes().unwrap());
        }
        Ok(QuantumState::pure_unchecked(v))
    } else {
        let mut m = first.density_matrix();
        for s in &states[1..] {
            m = m.kronecker(&s.density_matrix());
        }
        Ok(QuantumState::mixed_unchecked(m))
    }
}

/// Split every basis index into (kept, traced) sub-indices, each packed in
/// site order.
fn index_split(n_sites: usize, keep: &[usize]) -> Vec<(usize, usize)> {
    let traced: Vec<usize> = (0..n_sites).filter(|s| !keep.contains(s)).collect();
    (0..1usize << n_sites)
        .map(|idx| {
            let pack = |sites: &[usize]| {
                sites.iter().fold(0usize, |acc, &s| (acc << 1) | bit_of(idx, s, n_sites))
            };
            (pack(keep), pack(&traced))
        })
        .collect()
}

/// Reduced density matrix on `keep`. Kept sites appear in ascending order in
/// the result regardless of the order given.
pub fn partial_trace(state: &QuantumState, keep: &[usize]) -> Result<QuantumState> {
    let n = state.n_sites;
    if keep.is_empty() {
        return Err(Error::InvalidParameter("partial trace must keep at least one site".into()));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&s) = keep.iter().find(|&&s| s >= n) {
        return Err(Error::SiteOutOfRange { site: s, n_sites: n });
    }
    let kd = 1usize << keep.len();
    let rd = 1usize << (n - keep.len());
    let split = index_split(n, &keep);
    let rho = match &state.repr {
        Repr::Pure(v) => {
            let mut a = DMatrix::<C64>::zeros(kd, rd);
            for (idx, &(k, r)) in split.iter().enumerate() {
                a[(k, r)] = v[idx];
            }
            &a * a.adjoint()
        }
        Repr::Mixed(m) => {
            let mut out = DMatrix::<C64>::zeros(kd, kd);
            // group full indices by traced sub-index
            let mut by_r: Vec<Vec<(usize, usize)>> = vec![Vec::new(); rd];
            for (idx, &(k, r)) in split.iter().enumerate() {
                by_r[r].push((idx, k));
            }
            for group in &by_r {
                for &(i, ki) in group {
                    for &(j, kj) in group {
                        out[(ki, kj)] += m[(i, j)];
                    }
                }
            }
            out
        }
    };
    Ok(QuantumState::mixed_unchecked(rho))
}

/// `<psi|rho|psi>` for pure `psi`; `rho` may be pure or mixed.
pub fn fidelity(rho: &QuantumState, psi: &QuantumState) -> Result<f64> {
    let v = psi
        .amplitudes()
        .ok_or_else(|| Error::InvalidParameter("fidelity reference must be a pure state".into()))?;
    if rho.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), found: rho.dim() });
    }
    let f = match &rho.repr {
        Repr::Pure(u) => u.dotc(v).norm_sqr(),
        Repr::Mixed(m) => v.dotc(&(m * v)).re,
    };
    Ok(f)
}

/// One-hot embedding of a qudit into `d` qubits: level `i` becomes the basis
/// state with qubit `d - 1 - i` excited, so `|0>_L = |0..01>`.
pub fn embed_qudit(d: usize, amplitudes: &[C64]) -> Result<QuantumState> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("qudit dimension {d} < 2")));
    }
    check_sites(d)?;
    if amplitudes.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: amplitudes.len() });
    }
    let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let mut v = DVector::zeros(1 << d);
    for (level, &a) in amplitudes.iter().enumerate() {
        v[one_hot_index(level)] = a;
    }
    Ok(QuantumState::pure_unchecked(v))
}

/// Basis index (within one encoded block) of logical level `level`.
#[inline]
pub fn one_hot_index(level: usize) -> usize {
    1 << level
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ket(v: &[f64]) -> QuantumState {
        QuantumState::pure(DVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0)))).unwrap()
    }

    #[test]
    fn compose_basis_product() {
        let zero = QuantumState::basis(1, 0).unwrap();
        let s = compose(&[zero.clone(), zero]).unwrap();
        assert_eq!(s.amplitudes().unwrap().as_slice(), &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
    }

    #[test]
    fn compose_equatorial_with_blanks() {
        let psi = QuantumState::qubit(BlochInput::new(FRAC_PI_2, 0.0).unwrap());
        let zero = QuantumState::basis(1, 0).unwrap();
        let s = compose(&[psi, zero.clone(), zero]).unwrap();
        let v = s.amplitudes().unwrap();
        assert_eq!(v.len(), 8);
        for (i, a) in v.iter().enumerate() {
            let expected = if i == 0b000 || i == 0b100 { FRAC_1_SQRT_2 } else { 0.0 };
            assert_relative_eq!(a.re, expected, epsilon = 1e-15);
            assert_relative_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn compose_with_mixed_factor() {
        let psi = QuantumState::qubit(BlochInput::new(1.1, 0.4).unwrap());
        let s = compose(&[psi, QuantumState::maximally_mixed(2).unwrap()]).unwrap();
        assert!(!s.is_pure());
        assert_eq!(s.dim(), 8);
        assert_relative_eq!(s.trace(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn compose_rejects_oversized_register() {
        let big = QuantumState::basis(13, 0).unwrap();
        assert!(matches!(compose(&[big.clone(), big]), Err(Error::TooManySites(26))));
    }

    #[test]
    fn partial_trace_product_state() {
        let s = QuantumState::basis(2, 0).unwrap();
        let r = partial_trace(&s, &[0]).unwrap().density_matrix();
        assert_eq!(r[(0, 0)], c(1.0, 0.0));
        assert_eq!(r[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn partial_trace_bell_is_maximally_mixed() {
        let s = ket(&[0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
        let r = partial_trace(&s, &[0]).unwrap().density_matrix();
        assert_relative_eq!(r[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(r[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(r[(0, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    /// Star state alpha|000> + beta1|100> + beta2 (|010>+|001>)/sqrt2 with
    /// alpha = 1/sqrt2, beta1 = beta2 = 1/2; blank-site reduced matrix worked
    /// out by hand from the amplitudes.
    #[test]
    fn partial_trace_star_state_blank_site() {
        let (a, b1, b2) = (FRAC_1_SQRT_2, 0.5, 0.5 * FRAC_1_SQRT_2);
        let mut v = vec![0.0; 8];
        v[0b000] = a;
        v[0b100] = b1;
        v[0b010] = b2;
        v[0b001] = b2;
        let s = ket(&v);
        let r = partial_trace(&s, &[2]).unwrap().density_matrix();
        // rho_00 = a^2 + b1^2 + b2^2 (site 2 empty), rho_11 = b2^2,
        // rho_01 = a * b2 (|000> pairs with |001>).
        assert_relative_eq!(r[(0, 0)].re, 0.875, epsilon = 1e-15);
        assert_relative_eq!(r[(1, 1)].re, 0.125, epsilon = 1e-15);
        assert_relative_eq!(r[(0, 1)].re, 0.25, epsilon = 1e-15);
        assert_relative_eq!(r[(1, 0)].re, 0.25, epsilon = 1e-15);
        // Closed-form one-site matrix for M = 2: [[|a|^2+|b1|^2+(1-1/M)|b2'|^2, a b2'^*/sqrt M], ...]
        // with b2' = sqrt(M) * b2 the symmetric-state coefficient.
        let m: f64 = 2.0;
        let b2s = b2 * m.sqrt();
        assert_relative_eq!(r[(0, 0)].re, a * a + b1 * b1 + (1.0 - 1.0 / m) * b2s * b2s, epsilon = 1e-15);
        assert_relative_eq!(r[(0, 1)].re, a * b2s / m.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(r[(1, 1)].re, b2s * b2s / m, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_of_mixed_matches_pure_route() {
        let v = [0.1, 0.3, -0.2, 0.5, 0.25, -0.4, 0.6, 0.1];
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let s = ket(&v.iter().map(|x| x / norm).collect::<Vec<_>>());
        let a = partial_trace(&s, &[0, 2]).unwrap().density_matrix();
        let b = partial_trace(&s.clone().into_mixed(), &[2, 0]).unwrap().density_matrix();
        assert!(max_abs(&(a - b)) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_keep() {
        let s = QuantumState::basis(2, 0).unwrap();
        assert!(partial_trace(&s, &[]).is_err());
        assert!(matches!(partial_trace(&s, &[2]), Err(Error::SiteOutOfRange { .. })));
    }

    #[test]
    fn fidelity_examples() {
        let psi = ket(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert_relative_eq!(fidelity(&psi.clone().into_mixed(), &psi).unwrap(), 1.0, epsilon = 1e-15);
        let half = QuantumState::maximally_mixed(1).unwrap();
        assert_relative_eq!(fidelity(&half, &psi).unwrap(), 0.5, epsilon = 1e-15);
        // [[3/4, (1-i)/4], [(1+i)/4, 1/4]] against |+>: (3/4 + 1/4 + 2 Re((1-i)/4)) / 2 = 3/4
        let rho = DMatrix::from_row_slice(2, 2, &[c(0.75, 0.0), c(0.25, -0.25), c(0.25, 0.25), c(0.25, 0.0)]);
        let rho = QuantumState::mixed(rho).unwrap();
        assert_relative_eq!(fidelity(&rho, &psi).unwrap(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let psi = ket(&[1.0, 0.0]);
        let rho = QuantumState::maximally_mixed(2).unwrap();
        assert!(matches!(fidelity(&rho, &psi), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn qutrit_embedding() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let s = embed_qudit(3, &[one, zero, zero]).unwrap();
        assert_eq!(s.amplitudes().unwrap()[0b001], one);
        let s = embed_qudit(3, &[zero, zero, one]).unwrap();
        assert_eq!(s.amplitudes().unwrap()[0b100], one);
        let r = c(1.0 / 3f64.sqrt(), 0.0);
        let s = embed_qudit(3, &[r, r, r]).unwrap();
        let v = s.amplitudes().unwrap();
        for idx in 0..8 {
            let expected = if [0b001, 0b010, 0b100].contains(&idx) { r } else { zero };
            assert_eq!(v[idx], expected);
        }
        assert!(matches!(embed_qudit(3, &[one, one, zero]), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn mixed_validation() {
        let bad = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.6, 0.0), c(0.6, 0.0), c(0.5, 0.0)]);
        assert!(QuantumState::mixed(bad).is_err());
        let nonherm = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(QuantumState::mixed(nonherm).is_err());
    }

    #[test]
    fn bloch_ranges() {
        assert!(BlochInput::new(-0.1, 0.0).is_err());
        assert!(BlochInput::new(0.5, std::f64::consts::TAU).is_err());
        assert!(BlochInput::equatorial(1.0).is_equatorial());
    }

    #[test]
    fn site_operator_embedding_matches_kronecker() {
        let x = SiteOperator::new(1, Axis::X).to_dense(3).unwrap();
        let id = DMatrix::<C64>::identity(2, 2);
        let xm = DMatrix::from_iterator(2, 2, Axis::X.matrix().iter().copied());
        let expected = id.kronecker(&xm).kronecker(&id);
        assert_eq!(x, expected);
    }
}
