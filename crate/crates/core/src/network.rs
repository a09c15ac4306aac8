//! Coupling graphs and the XXZ Hamiltonian
//! `H = 1/4 sum J_ij (XX + YY + lambda ZZ) + 1/2 sum B_i Z`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::hilbert::{bit_of, site_mask, MAX_SITES};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Source,
    Blank,
    Ancilla,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub coupling: f64,
}

/// Sites, weighted undirected edges, per-site fields and role labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinGraph {
    n_sites: usize,
    edges: Vec<Edge>,
    fields: Vec<f64>,
    roles: Vec<Role>,
}

impl SpinGraph {
    pub fn new(n_sites: usize, edges: Vec<Edge>, fields: Vec<f64>, roles: Vec<Role>) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidParameter("graph without sites".into()));
        }
        if n_sites > MAX_SITES {
            return Err(Error::TooManySites(n_sites));
        }
        if fields.len() != n_sites {
            return Err(Error::DimensionMismatch { expected: n_sites, found: fields.len() });
        }
        if roles.len() != n_sites {
            return Err(Error::DimensionMismatch { expected: n_sites, found: roles.len() });
        }
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if e.i == e.j {
                return Err(Error::InvalidParameter(format!("self-loop on site {}", e.i)));
            }
            for s in [e.i, e.j] {
                if s >= n_sites {
                    return Err(Error::SiteOutOfRange { site: s, n_sites });
                }
            }
            if !seen.insert((e.i.min(e.j), e.i.max(e.j))) {
                return Err(Error::InvalidParameter(format!("duplicate edge ({}, {})", e.i, e.j)));
            }
        }
        Ok(Self { n_sites, edges, fields, roles })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn sites_with(&self, role: Role) -> Vec<usize> {
        (0..self.n_sites).filter(|&s| self.roles[s] == role).collect()
    }

    pub fn sources(&self) -> Vec<usize> {
        self.sites_with(Role::Source)
    }

    pub fn blanks(&self) -> Vec<usize> {
        self.sites_with(Role::Blank)
    }

    /// Same graph with every site field set to `b`.
    pub fn with_uniform_field(mut self, b: f64) -> Self {
        self.fields.iter_mut().for_each(|f| *f = b);
        self
    }

    pub fn with_fields(mut self, fields: Vec<f64>) -> Result<Self> {
        if fields.len() != self.n_sites {
            return Err(Error::DimensionMismatch { expected: self.n_sites, found: fields.len() });
        }
        self.fields = fields;
        Ok(self)
    }

    /// Same graph with couplings replaced edge by edge (in edge order).
    pub fn with_couplings(mut self, couplings: &[f64]) -> Result<Self> {
        if couplings.len() != self.edges.len() {
            return Err(Error::DimensionMismatch { expected: self.edges.len(), found: couplings.len() });
        }
        for (e, &c) in self.edges.iter_mut().zip(couplings) {
            e.coupling = c;
        }
        Ok(self)
    }

    /// Graph with sites relabelled: site `s` becomes `perm[s]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_sites;
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidParameter("not a permutation of the sites".into()));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { i: perm[e.i], j: perm[e.j], coupling: e.coupling })
            .collect();
        let mut fields = vec![0.0; n];
        let mut roles = vec![Role::Ancilla; n];
        for s in 0..n {
            fields[perm[s]] = self.fields[s];
            roles[perm[s]] = self.roles[s];
        }
        Self::new(n, edges, fields, roles)
    }
}

/// Named network families. Every coupling is 1 and every field 0 on
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    /// Hub (site 0, the source) coupled to `m` blanks.
    Star { m: usize },
    /// Rooted tree in which every interior node has `k` children and the
    /// leaves sit `j + 1` levels below the root, so there are `k^(j+1)`
    /// blanks. Sites are numbered breadth-first from the root.
    Tree { k: usize, j: usize },
    /// `n` sources each coupled to every one of `m` blanks.
    BipartiteStar { n: usize, m: usize },
    /// Four fully connected sites; site 0 is the source.
    Tetrahedron,
    /// `n` fully connected sites; site 0 is the source.
    Complete { n: usize },
    Custom { n_sites: usize, edges: Vec<Edge>, roles: Vec<Role> },
}

impl Topology {
    pub fn n_sites(&self) -> usize {
        match *self {
            Topology::Star { m } => m + 1,
            Topology::Tree { k, j } => (0..=j + 1).map(|l| k.pow(l as u32)).sum(),
            Topology::BipartiteStar { n, m } => n + m,
            Topology::Tetrahedron => 4,
            Topology::Complete { n } => n,
            Topology::Custom { n_sites, .. } => n_sites,
        }
    }
}

pub fn build_topology(kind: &Topology) -> Result<SpinGraph> {
    let unit = |i, j| Edge { i, j, coupling: 1.0 };
    let (n, edges, roles) = match kind {
        &Topology::Star { m } => {
            if m < 1 {
                return Err(Error::InvalidParameter("star needs M >= 1".into()));
            }
            let mut roles = vec![Role::Blank; m + 1];
            roles[0] = Role::Source;
            (m + 1, (1..=m).map(|b| unit(0, b)).collect(), roles)
        }
        &Topology::Tree { k, j } => {
            if k < 1 {
                return Err(Error::InvalidParameter("tree needs k >= 1".into()));
            }
            let n = kind.n_sites();
            if n > MAX_SITES {
                return Err(Error::TooManySites(n));
            }
            let mut edges = Vec::new();
            let mut roles = vec![Role::Ancilla; n];
            roles[0] = Role::Source;
            let mut level_start = 0;
            let mut level_len = 1;
            for _ in 0..=j {
                let next_start = level_start + level_len;
                for p in 0..level_len {
                    for c in 0..k {
                        edges.push(unit(level_start + p, next_start + p * k + c));
                    }
                }
                level_start = next_start;
                level_len *= k;
            }
            for r in roles.iter_mut().skip(level_start) {
                *r = Role::Blank;
            }
            (n, edges, roles)
        }
        &Topology::BipartiteStar { n, m } => {
            if n < 1 || m < 1 {
                return Err(Error::InvalidParameter("bipartite star needs N, M >= 1".into()));
            }
            let mut edges = Vec::with_capacity(n * m);
            for s in 0..n {
                for b in n..n + m {
                    edges.push(unit(s, b));
                }
            }
            let roles = (0..n + m).map(|s| if s < n { Role::Source } else { Role::Blank }).collect();
            (n + m, edges, roles)
        }
        Topology::Tetrahedron => return build_topology(&Topology::Complete { n: 4 }),
        &Topology::Complete { n } => {
            if n < 2 {
                return Err(Error::InvalidParameter("complete graph needs n >= 2".into()));
            }
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    edges.push(unit(i, j));
                }
            }
            let roles = (0..n).map(|s| if s == 0 { Role::Source } else { Role::Blank }).collect();
            (n, edges, roles)
        }
        Topology::Custom { n_sites, edges, roles } => (*n_sites, edges.clone(), roles.clone()),
    };
    if n > MAX_SITES {
        return Err(Error::TooManySites(n));
    }
    SpinGraph::new(n, edges, vec![0.0; n], roles)
}

/// Graph plus anisotropy `lambda` (0 = XY, 1 = Heisenberg).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub graph: SpinGraph,
    pub lambda: f64,
}

impl HamiltonianSpec {
    pub fn new(graph: SpinGraph, lambda: f64) -> Self {
        Self { graph, lambda }
    }
}

/// Dense real symmetric matrix of the XXZ Hamiltonian. All terms are real
/// in the computational basis, so the matrix is stored as `f64`.
pub fn assemble_hamiltonian(spec: &HamiltonianSpec) -> DMatrix<f64> {
    let g = &spec.graph;
    let n = g.n_sites;
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for e in &g.edges {
        add_xxz(&mut h, n, e.i, e.j, e.coupling / 4.0, spec.lambda * e.coupling / 4.0);
    }
    add_fields(&mut h, n, &g.fields);
    h
}

/// Adds `jxy (XX + YY) + jz ZZ` on the pair `(i, j)`.
pub(crate) fn add_xxz(h: &mut DMatrix<f64>, n: usize, i: usize, j: usize, jxy: f64, jz: f64) {
    let (mi, mj) = (site_mask(i, n), site_mask(j, n));
    for b in 0..1usize << n {
        let (bi, bj) = (bit_of(b, i, n), bit_of(b, j, n));
        h[(b, b)] += if bi == bj { jz } else { -jz };
        if bi != bj {
            // XX + YY = 2 (s+ s- + s- s+)
            h[(b ^ mi ^ mj, b)] += 2.0 * jxy;
        }
    }
}

/// Adds `sum_i (fields[i] / 2) Z_i`.
pub(crate) fn add_fields(h: &mut DMatrix<f64>, n: usize, fields: &[f64]) {
    if fields.iter().all(|&f| f == 0.0) {
        return;
    }
    for b in 0..1usize << n {
        let z: f64 = (0..n)
            .map(|s| if bit_of(b, s, n) == 0 { fields[s] } else { -fields[s] })
            .sum();
        h[(b, b)] += z / 2.0;
    }
}

/// Diagonal of the total magnetization `sum_i Z_i`.
pub fn total_sz(n_sites: usize) -> Vec<f64> {
    (0..1usize << n_sites).map(|b| n_sites as f64 - 2.0 * b.count_ones() as f64).collect()
}

/// `max |[H, sum Z]|`; zero for every Hamiltonian built here.
pub fn sz_commutator_norm(h: &DMatrix<f64>) -> f64 {
    let n = h.nrows().trailing_zeros() as usize;
    let sz = total_sz(n);
    let mut worst: f64 = 0.0;
    for c in 0..h.ncols() {
        for r in 0..h.nrows() {
            worst = worst.max((h[(r, c)] * (sz[c] - sz[r])).abs());
        }
    }
    worst
}

/// Couplings of the three-qubit charge-qubit device during cloning: centre
/// site 0 linked to blanks 1 and 2 by
/// `E_K Z_c Z_i - (J_K / 2)(s+ s- + s- s+)`. The single-qubit terms are
/// carried for bookkeeping only; they are switched off during evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JosephsonSpec {
    pub e_k: f64,
    pub j_k: f64,
    pub delta_e_c: f64,
    pub e_j: f64,
}

impl JosephsonSpec {
    pub fn new(e_k: f64, j_k: f64) -> Result<Self> {
        if !(j_k > 0.0) {
            return Err(Error::InvalidParameter(format!("J_K = {j_k} must be positive")));
        }
        Ok(Self { e_k, j_k, delta_e_c: 0.0, e_j: 0.0 })
    }

    /// Same operator in the XXZ parametrization: `(J, lambda)` with
    /// `J = -J_K` and `lambda = -4 E_K / J_K`.
    pub fn as_xxz(&self) -> (f64, f64) {
        (-self.j_k, -4.0 * self.e_k / self.j_k)
    }
}

/// Coupling Hamiltonian plus an optional uniform bias `(bias / 2) sum Z`.
pub fn assemble_josephson(spec: &JosephsonSpec, bias: f64) -> DMatrix<f64> {
    let n = 3;
    let mut h = DMatrix::<f64>::zeros(8, 8);
    for blank in [1, 2] {
        add_xxz(&mut h, n, 0, blank, -spec.j_k / 4.0, spec.e_k);
    }
    add_fields(&mut h, n, &[bias; 3]);
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single_edge(lambda: f64) -> DMatrix<f64> {
        let g = SpinGraph::new(2, vec![Edge { i: 0, j: 1, coupling: 1.0 }], vec![0.0; 2], vec![Role::Source, Role::Blank])
            .unwrap();
        assemble_hamiltonian(&HamiltonianSpec::new(g, lambda))
    }

    #[test]
    fn star_edges() {
        let g = build_topology(&Topology::Star { m: 2 }).unwrap();
        assert_eq!(g.n_sites(), 3);
        let e: Vec<_> = g.edges().iter().map(|e| (e.i, e.j)).collect();
        assert_eq!(e, vec![(0, 1), (0, 2)]);
        assert_eq!(g.sources(), vec![0]);
        assert_eq!(g.blanks(), vec![1, 2]);
    }

    #[test]
    fn tree_sizes() {
        let g = build_topology(&Topology::Tree { k: 2, j: 1 }).unwrap();
        assert_eq!(g.n_sites(), 7);
        assert_eq!(g.blanks().len(), 4);
        assert_eq!(g.sites_with(Role::Ancilla), vec![1, 2]);
        assert_eq!(g.edges().len(), 6);
        let g = build_topology(&Topology::Tree { k: 3, j: 0 }).unwrap();
        assert_eq!(g.blanks().len(), 3);
        assert!(build_topology(&Topology::Tree { k: 0, j: 1 }).is_err());
    }

    #[test]
    fn bipartite_star_edges() {
        let g = build_topology(&Topology::BipartiteStar { n: 2, m: 3 }).unwrap();
        assert_eq!(g.n_sites(), 5);
        assert_eq!(g.edges().len(), 6);
        for e in g.edges() {
            assert!(e.i < 2 && e.j >= 2);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(build_topology(&Topology::Star { m: 0 }).is_err());
        assert!(build_topology(&Topology::BipartiteStar { n: 0, m: 3 }).is_err());
        let dup = vec![Edge { i: 0, j: 1, coupling: 1.0 }, Edge { i: 1, j: 0, coupling: 1.0 }];
        assert!(SpinGraph::new(2, dup, vec![0.0; 2], vec![Role::Source, Role::Blank]).is_err());
    }

    #[test]
    fn single_edge_xy() {
        let h = single_edge(0.0);
        for r in 0..4 {
            for c in 0..4 {
                let expected = if (r, c) == (1, 2) || (r, c) == (2, 1) { 0.5 } else { 0.0 };
                assert_eq!(h[(r, c)], expected);
            }
        }
    }

    #[test]
    fn single_edge_heisenberg_diagonal() {
        let h = single_edge(1.0);
        let d: Vec<f64> = (0..4).map(|i| h[(i, i)]).collect();
        assert_eq!(d, vec![0.25, -0.25, -0.25, 0.25]);
        assert_eq!(h[(1, 2)], 0.5);
    }

    #[test]
    fn star_with_field_conserves_sz() {
        let g = build_topology(&Topology::Star { m: 2 }).unwrap().with_uniform_field(0.5f64.sqrt());
        let h = assemble_hamiltonian(&HamiltonianSpec::new(g, 0.0));
        assert!(sz_commutator_norm(&h) < 1e-12);
        assert_eq!(h.transpose(), h);
    }

    #[test]
    fn josephson_reduces_to_negated_xy_star() {
        let spec = JosephsonSpec::new(0.0, 1.0).unwrap();
        let hj = assemble_josephson(&spec, 0.0);
        let g = build_topology(&Topology::Star { m: 2 }).unwrap();
        let hxy = assemble_hamiltonian(&HamiltonianSpec::new(g, 0.0));
        assert_eq!(hj, -hxy);
    }

    #[test]
    fn josephson_matches_xxz_parametrization() {
        let spec = JosephsonSpec::new(0.1, 1.0).unwrap();
        let hj = assemble_josephson(&spec, 0.0);
        assert!(sz_commutator_norm(&hj) < 1e-12);
        assert_eq!(hj.transpose(), hj);
        let (j, lambda) = spec.as_xxz();
        let g = build_topology(&Topology::Star { m: 2 }).unwrap().with_couplings(&[j, j]).unwrap();
        let h = assemble_hamiltonian(&HamiltonianSpec::new(g, lambda));
        assert!((h - hj).amax() < 1e-15);
        let spec = JosephsonSpec::new(0.025, 1.0).unwrap();
        assert!(spec.j_k >= 4.0 * spec.e_k);
        assert!(JosephsonSpec::new(0.1, 0.0).is_err());
    }

    fn permutation_matrix(perm: &[usize]) -> DMatrix<f64> {
        let n = perm.len();
        let dim = 1 << n;
        let mut p = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let mut image = 0;
            for s in 0..n {
                if bit_of(b, s, n) == 1 {
                    image |= site_mask(perm[s], n);
                }
            }
            p[(image, b)] = 1.0;
        }
        p
    }

    proptest! {
        #[test]
        fn linear_in_couplings_and_field(
            j1 in -2.0..2.0f64, j2 in -2.0..2.0f64, b in -2.0..2.0f64, lambda in 0.0..1.0f64, s in -3.0..3.0f64,
        ) {
            let g = build_topology(&Topology::Star { m: 2 }).unwrap();
            let h = |a: f64, c: f64, f: f64| {
                let g = g.clone().with_couplings(&[a, c]).unwrap().with_uniform_field(f);
                assemble_hamiltonian(&HamiltonianSpec::new(g, lambda))
            };
            let lhs = h(s * j1, s * j2, s * b);
            let rhs = h(j1, j2, b) * s;
            prop_assert!((lhs - rhs).amax() < 1e-12);
            let sum = h(j1 + 0.3, j2, b) - h(j1, j2, b) - h(0.3, 0.0, 0.0);
            prop_assert!(sum.amax() < 1e-12);
        }

        #[test]
        fn sz_conserved_on_random_graphs(
            couplings in proptest::collection::vec(-2.0..2.0f64, 6),
            fields in proptest::collection::vec(-2.0..2.0f64, 4),
            lambda in -1.5..1.5f64,
        ) {
            let g = build_topology(&Topology::Tetrahedron).unwrap()
                .with_couplings(&couplings).unwrap()
                .with_fields(fields).unwrap();
            let h = assemble_hamiltonian(&HamiltonianSpec::new(g, lambda));
            prop_assert!(sz_commutator_norm(&h) < 1e-12);
            prop_assert!((&h - h.transpose()).amax() < 1e-12);
        }

        #[test]
        fn relabelling_conjugates(
            couplings in proptest::collection::vec(-2.0..2.0f64, 6),
            fields in proptest::collection::vec(-2.0..2.0f64, 4),
            perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
        ) {
            let g = build_topology(&Topology::Tetrahedron).unwrap()
                .with_couplings(&couplings).unwrap()
                .with_fields(fields).unwrap();
            let h = assemble_hamiltonian(&HamiltonianSpec::new(g.clone(), 0.4));
            let hp = assemble_hamiltonian(&HamiltonianSpec::new(g.permuted(&perm).unwrap(), 0.4));
            let p = permutation_matrix(&perm);
            prop_assert!((hp - &p * h * p.transpose()).amax() < 1e-12);
        }
    }
}
