//! Static coupling disorder and quenched classical parameter noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cloner::{clone_fidelity, CloneTask, FidelitySeries};
use crate::{Error, Result};

/// Uniform coupling spread with correlated signs.
///
/// Each coupling becomes `1 + s_i u_i` with `u_i` uniform on `[0, epsilon]`.
/// The first sign is a fair coin; every later sign repeats the previous one
/// with probability `(1 + mu) / 2`. Couplings are taken in edge order, which
/// for stars and bipartite stars runs over the blanks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub epsilon: f64,
    pub mu: f64,
    pub n_realizations: usize,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn new(epsilon: f64, mu: f64, n_realizations: usize, seed: u64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("disorder amplitude {epsilon} must be >= 0")));
        }
        if !(-1.0..=1.0).contains(&mu) {
            return Err(Error::InvalidParameter(format!("sign correlation {mu} outside [-1, 1]")));
        }
        if n_realizations == 0 {
            return Err(Error::InvalidParameter("need at least one realization".into()));
        }
        Ok(Self { epsilon, mu, n_realizations, seed })
    }
}

/// Independent stream for realization `index`.
fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Coupling offsets `J_i - 1` for one realization.
///
/// Magnitudes are drawn before the sign uniforms and the number of draws does
/// not depend on `mu`, so ensembles with the same seed but different `mu`
/// share their random numbers.
pub fn sample_offsets(n_links: usize, spec: &DisorderSpec, index: u64) -> Vec<f64> {
    let mut rng = stream(spec.seed, index);
    let p_same = 0.5 * (1.0 + spec.mu);
    let mags: Vec<f64> = (0..n_links).map(|_| spec.epsilon * rng.random::<f64>()).collect();
    let mut sign = if rng.random::<f64>() < 0.5 { 1.0 } else { -1.0 };
    mags.into_iter()
        .enumerate()
        .map(|(i, m)| {
            let u = rng.random::<f64>();
            if i > 0 && u >= p_same {
                sign = -sign;
            }
            sign * m
        })
        .collect()
}

/// Perturbed couplings (one per edge of the task's graph) for realization
/// `index`.
pub fn sample_couplings(task: &CloneTask, spec: &DisorderSpec, index: u64) -> Result<Vec<f64>> {
    let g = task.graph()?;
    let offsets = sample_offsets(g.edges().len(), spec, index);
    Ok(g.edges().iter().zip(offsets).map(|(e, o)| e.coupling + o).collect())
}

/// Mean and standard error of a sample.
fn mean_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub mean: f64,
    pub stderr: f64,
    /// Site-averaged fidelity of every realization, in index order.
    pub trace: Vec<f64>,
    pub spec: DisorderSpec,
}

/// Site- and ensemble-averaged fidelity at fixed `(b, t)`.
pub fn disorder_ensemble(task: &CloneTask, b: f64, t: f64, spec: &DisorderSpec) -> Result<EnsembleReport> {
    let trace = crate::par::map_range(spec.n_realizations, |i| -> Result<f64> {
        let couplings = sample_couplings(task, spec, i as u64)?;
        Ok(clone_fidelity(&task.clone().with_couplings(couplings), b, t)?.mean)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (mean, stderr) = mean_stderr(&trace);
    Ok(EnsembleReport { mean, stderr, trace, spec: *spec })
}

/// Parameter carrying the quenched offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseTarget {
    /// Every coupling shifts by the same offset.
    J,
    /// The uniform field shifts.
    B,
}

/// Gaussian offset of standard deviation `delta`, frozen during one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalNoiseSpec {
    pub target: NoiseTarget,
    pub delta: f64,
    pub n_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePoint {
    pub delta: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// Standard normal draws shared by every `delta`, so curves over `delta`
/// use common random numbers.
fn normals(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, 0);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Average fidelity at `(b, t)` with offset `delta * z` on the target
/// parameter.
pub fn classical_noise_average(task: &CloneTask, b: f64, t: f64, spec: &ClassicalNoiseSpec) -> Result<NoisePoint> {
    let grid = classical_noise_curve(task, b, t, spec.target, &[spec.delta], spec.n_samples, spec.seed)?;
    Ok(grid[0])
}

/// [`classical_noise_average`] over a grid of `delta` values.
pub fn classical_noise_curve(
    task: &CloneTask,
    b: f64,
    t: f64,
    target: NoiseTarget,
    deltas: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<NoisePoint>> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("need at least one noise sample".into()));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d >= 0.0)) {
        return Err(Error::InvalidParameter(format!("noise strength {d} must be >= 0")));
    }
    let z = normals(n_samples, seed);
    let base: Vec<f64> = task.graph()?.edges().iter().map(|e| e.coupling).collect();
    let series = match target {
        NoiseTarget::B => Some(FidelitySeries::new(task)?),
        NoiseTarget::J => None,
    };
    deltas
        .iter()
        .map(|&delta| {
            let f = crate::par::map(&z, |&zk| -> Result<f64> {
                let x = delta * zk;
                match &series {
                    Some(s) => Ok(s.eval(b + x, t)),
                    None => {
                        let c = base.iter().map(|j| j + x).collect();
                        Ok(clone_fidelity(&task.clone().with_couplings(c), b, t)?.mean)
                    }
                }
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let (mean, stderr) = mean_stderr(&f);
            Ok(NoisePoint { delta, mean, stderr })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloner::{optimal_parameters, Model};
    use crate::network::Topology;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn star(m: usize) -> (CloneTask, f64, f64) {
        let (b, t) = optimal_parameters(Model::Xy, m);
        (CloneTask::equatorial(Topology::Star { m }, 0.0), b, t)
    }

    #[test]
    fn zero_amplitude_is_ideal() {
        let (task, b, t) = star(3);
        let spec = DisorderSpec::new(0.0, 0.3, 5, 1).unwrap();
        assert!(sample_couplings(&task, &spec, 2).unwrap().iter().all(|&j| j == 1.0));
        let r = disorder_ensemble(&task, b, t, &spec).unwrap();
        assert_relative_eq!(r.mean, 0.5 * (1.0 + 1.0 / 3f64.sqrt()), epsilon = 1e-12);
        assert_eq!(r.stderr, 0.0);
    }

    #[test]
    fn uncorrelated_signs_agree_half_the_time() {
        let spec = DisorderSpec::new(0.1, 0.0, 1, 5).unwrap();
        let (mut same, mut total) = (0usize, 0usize);
        for i in 0..10_000 {
            let o = sample_offsets(2, &spec, i);
            same += usize::from(o[0].signum() == o[1].signum());
            total += 1;
        }
        let freq = same as f64 / total as f64;
        assert!((freq - 0.5).abs() < 0.02, "{freq}");
    }

    #[test]
    fn full_correlation_shares_sign() {
        let spec = DisorderSpec::new(0.1, 1.0, 1, 8).unwrap();
        for i in 0..200 {
            let o = sample_offsets(6, &spec, i);
            assert!(o.iter().all(|x| x.signum() == o[0].signum()));
        }
    }

    #[test]
    fn classical_noise_at_zero_is_ideal() {
        let (task, b, t) = star(2);
        for target in [NoiseTarget::J, NoiseTarget::B] {
            let spec = ClassicalNoiseSpec { target, delta: 0.0, n_samples: 10, seed: 3 };
            let p = classical_noise_average(&task, b, t, &spec).unwrap();
            assert_relative_eq!(p.mean, 0.5 + 1.0 / 8f64.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(DisorderSpec::new(-0.1, 0.0, 1, 0).is_err());
        assert!(DisorderSpec::new(0.1, 1.5, 1, 0).is_err());
        assert!(DisorderSpec::new(0.1, 0.0, 0, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn offsets_bounded_and_reproducible(eps in 0.0..1.0f64, mu in -1.0..1.0f64, seed: u64, idx in 0u64..1000) {
            let spec = DisorderSpec::new(eps, mu, 1, seed).unwrap();
            let a = sample_offsets(5, &spec, idx);
            prop_assert_eq!(&a, &sample_offsets(5, &spec, idx));
            prop_assert!(a.iter().all(|x| x.abs() <= eps));
        }
    }
}
