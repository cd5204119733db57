use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lamina_bench::{pattern_matrix, presentation, schottky_group, transvected_word};
use lamina_core::group::enumerate_ball;
use lamina_core::hyperbolic::axis;
use lamina_core::lamination::{Laminations, Params};
use lamina_core::markov::{perron, to_f64};
use lamina_core::render::{render_svg, Layer, RenderStyle};

fn word_evaluation(c: &mut Criterion) {
    let group = schottky_group();
    let mut g = c.benchmark_group("evaluate");
    for n in [8usize, 64, 512] {
        let w = transvected_word(&group, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &w, |b, w| {
            b.iter(|| axis(&group.evaluate(black_box(w)).unwrap()).unwrap())
        });
    }
    g.finish();
}

fn ball_enumeration(c: &mut Criterion) {
    let group = schottky_group();
    let mut g = c.benchmark_group("ball");
    for k in [3usize, 5, 7] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| enumerate_ball(&group, black_box(k)).unwrap().len())
        });
    }
    g.finish();
}

fn lamination_pipeline(c: &mut Criterion) {
    let (pres, junctures) = presentation();
    let mut g = c.benchmark_group("laminations");
    g.sample_size(20);
    for (horizon, ball) in [(8u32, 2usize), (12, 3)] {
        let params = Params {
            horizon,
            ball,
            ..Params::default()
        };
        g.bench_function(format!("h{horizon}_b{ball}"), |b| {
            b.iter(|| Laminations::build(&pres, &junctures, black_box(&params)).unwrap())
        });
    }
    g.finish();
}

fn perron_iteration(c: &mut Criterion) {
    let mut g = c.benchmark_group("perron");
    for n in [2usize, 8, 32] {
        let m = to_f64(&pattern_matrix(n));
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| perron(black_box(m), 1e-12, 100_000).unwrap().kappa)
        });
    }
    g.finish();
}

fn rendering(c: &mut Criterion) {
    let (pres, junctures) = presentation();
    let lams = Laminations::build(&pres, &junctures, &Params::default()).unwrap();
    let layers = vec![
        Layer::from_family("x-plus", &lams.x_plus),
        Layer::from_lamination("lambda-plus", &lams.plus),
    ];
    let style = RenderStyle::default();
    c.bench_function("render_svg", |b| {
        b.iter(|| render_svg(black_box(&layers), &style).unwrap().len())
    });
}

criterion_group!(
    benches,
    word_evaluation,
    ball_enumeration,
    lamination_pipeline,
    perron_iteration,
    rendering
);
criterion_main!(benches);
