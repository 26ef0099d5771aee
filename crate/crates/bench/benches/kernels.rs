use criterion::{black_box, criterion_group, criterion_main, Criterion};
use thetacut::exact::exact_alpha_with_limit;
use thetacut::generators::{gen_cycle, gen_queen, gen_torus};
use thetacut::graph::{enumerate_chordless_cycles, enumerate_cliques};
use thetacut::separation::separate_family;
use thetacut::{solve, CandidateConfig, Candidates, CutFamily, Problem, SdpModel, SolverConfig};

fn theta(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("theta");
    group.sample_size(10);
    for (name, g, problem) in [
        ("cycle_11", gen_cycle(11).unwrap(), Problem::Stable),
        ("torus_5", gen_torus(5).unwrap(), Problem::Stable),
        ("queen_6_coloring", gen_queen(6).unwrap(), Problem::Coloring),
    ] {
        let model = SdpModel::for_problem(&g, problem);
        group.bench_function(name, |b| b.iter(|| solve(black_box(&model), &cfg)));
    }
    group.finish();
}

fn separation(c: &mut Criterion) {
    let g = gen_torus(7).unwrap();
    let cands = Candidates::build(&g, &CandidateConfig::default());
    let mut group = c.benchmark_group("separation_torus_7");
    for problem in [Problem::Stable, Problem::Coloring] {
        let y = solve(
            &SdpModel::for_problem(&g, problem),
            &SolverConfig::default(),
        )
        .y;
        for family in CutFamily::ALL.into_iter().filter(|f| f.applies_to(problem)) {
            group.bench_function(family.name(), |b| {
                b.iter(|| separate_family(family, black_box(&y), &g, &cands, 0.0, 0))
            });
        }
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let queen = gen_queen(8).unwrap();
    let torus = gen_torus(7).unwrap();
    let mut group = c.benchmark_group("enumeration");
    group.bench_function("cliques_queen_8", |b| {
        b.iter(|| enumerate_cliques(black_box(&queen), 5))
    });
    group.bench_function("chordless_5_cycles_torus_7", |b| {
        b.iter(|| enumerate_chordless_cycles(black_box(&torus), 5, usize::MAX))
    });
    group.bench_function("exact_alpha_torus_7", |b| {
        b.iter(|| exact_alpha_with_limit(black_box(&torus), 256))
    });
    group.finish();
}

criterion_group!(benches, theta, separation, enumeration);
criterion_main!(benches);
