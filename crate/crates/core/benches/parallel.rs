use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cw_core::catalog::{enumerate_si, CatalogOptions};
use cw_core::centrality::center;
use cw_core::congruence::congruence_lattice;
use cw_core::corpus;
use cw_core::formulas::{build_phi, verify_dpsc, PsiConfig};
use cw_core::free::absorbing_catalog;
use cw_core::{par, Budget};

fn both<R>(c: &mut Criterion, group: &str, f: impl Fn() -> R) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10).measurement_time(Duration::from_secs(3));
    g.bench_function(BenchmarkId::new("parallel", ""), |b| b.iter(&f));
    g.bench_function(BenchmarkId::new("sequential", ""), |b| {
        b.iter(|| par::sequential(&f))
    });
    g.finish();
}

fn benches(c: &mut Criterion) {
    let budget = Budget::default();
    let z2x2sq = corpus::z2x2().power(2, &budget).unwrap();
    both(c, "center Z2xZ2^2", || center(&z2x2sq).unwrap());
    both(c, "congruence lattice Z2xZ2^2", || {
        congruence_lattice(&z2x2sq, &budget).unwrap()
    });

    let d4 = corpus::d4();
    both(c, "commutator words D4 arity 2", || {
        absorbing_catalog(&d4, 2, &budget).unwrap()
    });

    let z4 = corpus::z4();
    let phi = build_phi(&z4, &budget).unwrap();
    let members = enumerate_si(&z4, &CatalogOptions::default())
        .unwrap()
        .si_algebras();
    let cfg = PsiConfig::new(3).unwrap().with_maltsev(phi.maltsev.clone());
    both(c, "dpsc Z4", || {
        verify_dpsc(&z4, &phi, &members, &cfg).unwrap()
    });
}

criterion_group!(parallel, benches);
criterion_main!(parallel);
