//! Global assembly and error integration with the parallel element loops
//! against the strict sequential fallback.

use criterion::{criterion_group, criterion_main, Criterion};
use scatter::analytic::{MaterialParams, Pulsation};
use scatter::assembly::*;
use scatter::nurbs::make_fluid_shell;
use scatter::par;
use scatter::postprocess::fluid_error_integrals;
use scatter::specfun::C64;
use std::hint::black_box;

const SOURCE: [f64; 3] = [0.25, 0.25, 0.25];

fn setup(level: usize) -> (ScatterProblem, Discretization, IeContext) {
    let k = 2.0;
    let r_a = 1.217_724_603_847_938_1;
    let fluid = benchmark_mesh(&make_fluid_shell(1.0, r_a).unwrap(), &MeshSpec::iga(level, 2)).unwrap();
    let prob = ScatterProblem::new(
        ProblemKind::Manufactured { source: SOURCE },
        k,
        C64::new(1.0, 0.0),
        [0.0, 0.0, 1.0],
        MaterialParams::ihlenburg(),
    )
    .unwrap();
    let ie = IeContext::new(Formulation::Bgu, 3, RadialBasis::Lagrange, k, r_a, 0.0, None).unwrap();
    (prob, Discretization { fluid, solid: None, interior: None }, ie)
}

fn assembly(c: &mut Criterion) {
    let (prob, disc, ie) = setup(3);
    let mut group = c.benchmark_group("assemble_system_level3");
    group.sample_size(10);
    for (name, sequential) in [("parallel", false), ("sequential", true)] {
        group.bench_function(name, |b| {
            par::set_sequential(sequential);
            b.iter(|| black_box(assemble_system(&prob, &disc, &ie).unwrap()));
        });
    }
    par::set_sequential(false);
    group.finish();
}

fn error_norms(c: &mut Criterion) {
    let (prob, disc, ie) = setup(3);
    let sol = solve_system(assemble_system(&prob, &disc, &ie).unwrap()).unwrap();
    let quad = gauss_rule(3).unwrap();
    let src = Pulsation { k: prob.k, y: SOURCE };
    let exact = |x: [f64; 3]| src.field(x);
    let mut group = c.benchmark_group("energy_error_level3");
    group.sample_size(10);
    for (name, sequential) in [("parallel", false), ("sequential", true)] {
        group.bench_function(name, |b| {
            par::set_sequential(sequential);
            b.iter(|| black_box(fluid_error_integrals(&disc.fluid, sol.fluid(), prob.k, &quad, Some(&exact)).unwrap()));
        });
    }
    par::set_sequential(false);
    group.finish();
}

criterion_group!(benches, assembly, error_norms);
criterion_main!(benches);
