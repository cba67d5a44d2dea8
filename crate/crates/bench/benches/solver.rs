use atropos_bench::positions;
use atropos_core::lattice::lattice_distance;
use atropos_core::{make_board, solve, solve_parallel, SolveLimits};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    for (size, fill) in [(4, 0.4), (5, 0.5), (6, 0.6)] {
        let states = positions(size, 2, fill, 8, 17);
        g.bench_with_input(BenchmarkId::new("sequential", size), &states, |b, states| {
            b.iter(|| {
                for s in states {
                    black_box(solve(s, SolveLimits::default()).unwrap());
                }
            })
        });
        g.bench_with_input(BenchmarkId::new("no_table", size), &states, |b, states| {
            let limits = SolveLimits::new(u64::MAX, 0).unwrap();
            b.iter(|| {
                for s in states {
                    black_box(solve(s, limits).unwrap());
                }
            })
        });
    }
    let states = positions(5, 2, 0.5, 8, 17);
    g.bench_function("parallel_4/5", |b| {
        b.iter(|| {
            for s in &states {
                black_box(solve_parallel(s, SolveLimits::default(), 4).unwrap());
            }
        })
    });
    g.finish();
}

fn lattice(c: &mut Criterion) {
    let board = make_board(30).unwrap();
    let nodes: Vec<_> = board.coords().step_by(7).collect();
    c.bench_function("lattice_distance/all_pairs_sampled", |b| {
        b.iter(|| {
            let mut acc = 0u64;
            for &u in &nodes {
                for &v in &nodes {
                    acc += lattice_distance(u, v) as u64;
                }
            }
            black_box(acc)
        })
    });
    c.bench_function("ball/radius_3", |b| b.iter(|| black_box(board.ball(nodes[nodes.len() / 2], 3))));
}

criterion_group!(benches, solver, lattice);
criterion_main!(benches);
