//! Parallel versus sequential cost of the two data-parallel workloads: the
//! field/time optimization and the disorder ensemble.
//!
//! With the default `parallel` feature each workload runs on the global
//! rayon pool and on a one-thread pool. Build with `--no-default-features`
//! to time the plain sequential code path.

use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spinclone::cloner::{optimize, ScanGrid};
use spinclone::disorder::{disorder_ensemble, DisorderSpec};
use spinclone::{CloneTask, Topology};

/// Execution mode: the default pool, or a dedicated one-thread pool.
struct Mode {
    name: &'static str,
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Mode {
    fn run<R: Send>(&self, job: impl FnOnce() -> R + Send) -> R {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.install(job);
        }
        job()
    }
}

fn modes() -> Vec<Mode> {
    #[cfg(feature = "parallel")]
    {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        vec![Mode { name: "parallel", pool: None }, Mode { name: "one_worker", pool: Some(one) }]
    }
    #[cfg(not(feature = "parallel"))]
    {
        vec![Mode { name: "sequential" }]
    }
}

fn optimize_bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimize");
    group.sample_size(10);
    for m in [2usize, 4] {
        let task = CloneTask::equatorial(Topology::Star { m }, 0.0);
        let grid = ScanGrid::standard(20.0).unwrap();
        for mode in modes() {
            group.bench_with_input(BenchmarkId::new(mode.name, m), &m, |b, _| {
                b.iter(|| mode.run(|| std::hint::black_box(optimize(&task, &grid, 1e-8).unwrap())))
            });
        }
    }
    group.finish();
}

fn disorder_bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("disorder");
    group.sample_size(10);
    let m = 3usize;
    let task = CloneTask::equatorial(Topology::Star { m }, 0.0);
    let (b, t) = ((m as f64).sqrt() / 2.0, PI / (m as f64).sqrt());
    let spec = DisorderSpec::new(0.1, 0.5, 400, 7).unwrap();
    for mode in modes() {
        group.bench_function(BenchmarkId::new(mode.name, spec.n_realizations), |bch| {
            bch.iter(|| mode.run(|| std::hint::black_box(disorder_ensemble(&task, b, t, &spec).unwrap())))
        });
    }
    group.finish();
}

criterion_group!(benches, optimize_bench, disorder_bench);
criterion_main!(benches);
