//! 1 -> 3 cloning on a fully connected four-spin network with independent
//! couplings and fields, searched by multi-start Nelder-Mead.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{clone_fidelity, optimal_parameters, CloneTask, Model};
use crate::network::Topology;
use crate::optim::nelder_mead_max;
use crate::Result;

/// Couplings are listed in edge order `(0,1), (0,2), (0,3)` for the hub
/// links and `(1,2), (1,3), (2,3)` for the blank links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TetrahedronParams {
    pub hub_blank: [f64; 3],
    pub blank_blank: [f64; 3],
    pub fields: [f64; 4],
    pub lambda: f64,
    pub t: f64,
}

impl TetrahedronParams {
    const DIM: usize = 12;

    fn to_vec(self) -> Vec<f64> {
        let mut v = Vec::with_capacity(Self::DIM);
        v.extend(self.hub_blank);
        v.extend(self.blank_blank);
        v.extend(self.fields);
        v.push(self.lambda);
        v.push(self.t);
        v
    }

    fn from_slice(x: &[f64]) -> Self {
        Self {
            hub_blank: [x[0], x[1], x[2]],
            blank_blank: [x[3], x[4], x[5]],
            fields: [x[6], x[7], x[8], x[9]],
            lambda: x[10],
            t: x[11],
        }
    }

    /// The 1 -> 3 XY star optimum embedded in the family.
    pub fn star_optimum() -> Self {
        let (b, t) = optimal_parameters(Model::Xy, 3);
        Self { hub_blank: [1.0; 3], blank_blank: [0.0; 3], fields: [b; 4], lambda: 0.0, t }
    }
}

/// Mean blank fidelity for an equatorial input.
pub fn tetrahedron_fidelity(p: &TetrahedronParams) -> Result<f64> {
    let mut couplings = p.hub_blank.to_vec();
    couplings.extend(p.blank_blank);
    let task = CloneTask::equatorial(Topology::Tetrahedron, p.lambda)
        .with_couplings(couplings)
        .with_base_fields(p.fields.to_vec());
    Ok(clone_fidelity(&task, 0.0, p.t)?.mean)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TetrahedronSearch {
    pub best: TetrahedronParams,
    pub fidelity: f64,
    /// Best value reached from each start, in start order.
    pub per_start: Vec<f64>,
    pub seed: u64,
}

fn random_start(rng: &mut ChaCha8Rng) -> TetrahedronParams {
    let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
    TetrahedronParams {
        hub_blank: [u(-1.5, 1.5), u(-1.5, 1.5), u(-1.5, 1.5)],
        blank_blank: [u(-1.5, 1.5), u(-1.5, 1.5), u(-1.5, 1.5)],
        fields: [u(-1.5, 1.5), u(-1.5, 1.5), u(-1.5, 1.5), u(-1.5, 1.5)],
        lambda: u(-1.0, 1.0),
        t: u(0.5, 6.0),
    }
}

/// Nelder-Mead from `n_starts` random points (stream `i` seeded from
/// `(seed, i)`), each followed by one restart from its own optimum.
pub fn tetrahedron_search(n_starts: usize, seed: u64, max_evals: usize) -> Result<TetrahedronSearch> {
    let starts: Vec<TetrahedronParams> = (0..n_starts)
        .map(|i| random_start(&mut ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))))
        .collect();
    let results = crate::par::map(&starts, |s| -> Result<(Vec<f64>, f64)> {
        let objective = |x: &[f64]| tetrahedron_fidelity(&TetrahedronParams::from_slice(x)).unwrap_or(f64::NEG_INFINITY);
        let step = [0.3; TetrahedronParams::DIM];
        let (x, _) = nelder_mead_max(objective, &s.to_vec(), &step, 1e-13, max_evals);
        let small = [0.02; TetrahedronParams::DIM];
        let (x, f) = nelder_mead_max(objective, &x, &small, 1e-15, max_evals);
        Ok((x, f))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (best_i, _) = results
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(b.0.cmp(&a.0)))
        .ok_or(crate::Error::EmptyGrid("starts"))?;
    Ok(TetrahedronSearch {
        best: TetrahedronParams::from_slice(&results[best_i].0),
        fidelity: results[best_i].1,
        per_start: results.iter().map(|r| r.1).collect(),
        seed,
    })
}
