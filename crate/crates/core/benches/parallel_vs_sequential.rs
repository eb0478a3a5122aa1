use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use homsim::coherence::{density_map, g2_hom_map, HomPair, TransverseGrid};
use homsim::exec::Exec;
use homsim::fockstate::Port;
use homsim::interference::{linspace, scan, ScenarioKind, ScenarioSpec};
use homsim::masks::PhaseMask;
use homsim::pulses::BesselGaussEnvelope;

fn strategies() -> Vec<(&'static str, Exec)> {
    vec![
        ("sequential", Exec::Sequential),
        #[cfg(feature = "parallel")]
        ("parallel", Exec::Parallel),
    ]
}

fn sweeps(c: &mut Criterion) {
    let env = Arc::new(BesselGaussEnvelope::reference().normalized().unwrap());
    let spec = ScenarioSpec::new(ScenarioKind::DovePrism, env.clone()).with_m(2).with_phi0(0.3);
    let z0 = linspace(-4.0 * env.sigma_z, 4.0 * env.sigma_z, 161);
    let pair = HomPair::new(env.clone(), PhaseMask::helical(2), PhaseMask::sector_b(4, 0.4).unwrap());
    let output = pair.output_state().unwrap();
    let map_grid = TransverseGrid::around(&env, 128).unwrap();
    let density_grid = TransverseGrid::around(&env, 24).unwrap();
    let rp = (0.3 * env.main_lobe_radius(), 0.1 * env.main_lobe_radius());

    let mut group = c.benchmark_group("sweeps");
    group.sample_size(10);
    for (name, exec) in strategies() {
        group.bench_with_input(BenchmarkId::new("scan-161", name), &exec, |b, &exec| {
            b.iter(|| scan(black_box(&spec), &z0, exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("g2-map-128", name), &exec, |b, &exec| {
            b.iter(|| g2_hom_map(black_box(&pair), map_grid, rp, exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("density-map-24", name), &exec, |b, &exec| {
            b.iter(|| density_map(black_box(&output), Port::C, density_grid, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
