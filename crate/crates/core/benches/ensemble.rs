use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use nispdg::exec::Execution;
use nispdg::models::profile::{InitialProfile, SineComponent};
use nispdg::pipeline::Experiment;

fn experiment(cells: usize, exec: Execution) -> Experiment {
    let profile = InitialProfile::scalar(SineComponent {
        offset: 1.0,
        amplitude: 0.5,
        amplitude_y: 0.1,
        ..SineComponent::constant(0.0)
    });
    Experiment {
        ref_max_mode: 6,
        ref_order: 12,
        t_final: 0.5,
        alias_check: false,
        exec,
        ..Experiment::burgers(profile, cells, 1, 3, 8)
    }
}

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for cells in [16, 32] {
        for (name, exec) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
            let e = experiment(cells, exec);
            group.bench_with_input(BenchmarkId::new(name, cells), &e, |b, e| b.iter(|| e.run().unwrap()));
        }
    }
    group.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
