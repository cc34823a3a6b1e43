use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use presorted_core::harness::{Family, Generated, GeneratorSpec};
use presorted_core::{convex_hull, pareto_front, truncated_quicksort, CostMeter};

fn gen(family: Family, n: usize) -> Generated {
    GeneratorSpec { family, n, seed: 1 }.generate().expect("generator")
}

fn bench_sort(c: &mut Criterion) {
    let mut g = c.benchmark_group("sort");
    for n in [1 << 10, 1 << 14] {
        for family in [Family::Sorted, Family::EvensThenOdds, Family::Runs { k: 16 }] {
            let Generated::Scalars(values) = gen(family.clone(), n) else { unreachable!() };
            g.bench_with_input(
                BenchmarkId::new(family.label(), n),
                &values,
                |b, values| {
                    b.iter(|| truncated_quicksort(values, &mut CostMeter::new()));
                },
            );
        }
    }
    g.finish();
}

fn bench_geometry(c: &mut Criterion) {
    let mut g = c.benchmark_group("geometry");
    for n in [1 << 10, 1 << 14] {
        let Generated::Geometric { instance, .. } = gen(Family::ParetoRegions { k: 4 }, n) else {
            unreachable!()
        };
        g.bench_with_input(BenchmarkId::new("pareto-regions(4)", n), &instance, |b, inst| {
            b.iter(|| pareto_front(inst, &mut CostMeter::new()).expect("front"));
        });
        let Generated::Geometric { instance, .. } = gen(Family::HullRegions { k: 4 }, n) else {
            unreachable!()
        };
        g.bench_with_input(BenchmarkId::new("hull-regions(4)", n), &instance, |b, inst| {
            b.iter(|| convex_hull(inst, &mut CostMeter::new()).expect("hull"));
        });
    }
    g.finish();
}

criterion_group!(benches, bench_sort, bench_geometry);
criterion_main!(benches);
