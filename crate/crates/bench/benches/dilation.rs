use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pauli_dilate::collision::{convergence_report, default_initial_state};
use pauli_dilate::dilation::{dilation_from_kraus, solve_env_rep, solve_su2_generators};
use pauli_dilate::pauli::pauli_commutant;
use pauli_dilate::physdil::{krylov_subspace, symmetrize_full};
use pauli_dilate::{CollisionConfig, GroupRep, PauliChannel, PauliString, PhysicalDilation};

fn env_rep(c: &mut Criterion) {
    let v = dilation_from_kraus(&PauliChannel::new([0.4, 0.3, 0.2, 0.1]).unwrap().kraus_ops(), None).unwrap();
    let sys = GroupRep::pauli_defining();
    c.bench_function("solve_env_rep/pauli3", |b| b.iter(|| solve_env_rep(black_box(&v), &sys).unwrap()));
    let dep = dilation_from_kraus(&PauliChannel::depolarizing(0.3).unwrap().kraus_ops(), None).unwrap();
    c.bench_function("solve_su2_generators", |b| b.iter(|| solve_su2_generators(black_box(&dep)).unwrap()));
}

fn evolution(c: &mut Criterion) {
    let pd = PhysicalDilation::generic([0.5, -0.3, 0.6]);
    c.bench_function("channel_at_time/generic", |b| b.iter(|| pd.channel_at_time(black_box(1.3)).unwrap()));
    let dep = PhysicalDilation::depolarizing();
    c.bench_function("symmetrize_full/depolarizing", |b| {
        b.iter(|| symmetrize_full(&dep, &krylov_subspace(black_box(&dep))).unwrap())
    });
}

fn commutant(c: &mut Criterion) {
    let gens: Vec<PauliString> = ["ZZZ", "XZI", "YIZ"].iter().map(|s| s.parse().unwrap()).collect();
    c.bench_function("pauli_commutant/3q", |b| b.iter(|| pauli_commutant(black_box(&gens), 3).unwrap()));
}

fn collision(c: &mut Criterion) {
    let cfg = CollisionConfig { a: [1.0, 1.0, 1.0], zeta: 1.0, dt: 0.1, n: 10 };
    let rho0 = default_initial_state();
    c.bench_function("convergence_report/depolarizing", |b| {
        b.iter(|| convergence_report(&cfg, black_box(&[0.1, 0.05, 0.025, 0.0125]), 1.0, &rho0).unwrap())
    });
}

criterion_group!(benches, env_rep, evolution, commutant, collision);
criterion_main!(benches);
