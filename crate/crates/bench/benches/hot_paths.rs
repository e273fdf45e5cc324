use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mccle_core::eval::{heatmap, DEFAULT_GRID_SPACING};
use mccle_core::rfsim::{generate_dataset, simulate_measurement};
use mccle_core::scene::{stream_rng, Stream};
use mccle_core::train::{sample_candidates, sampled_cel};
use mccle_core::{Model, ModelKind, Point2, Pose2D, Region, SimConfig};

fn scoring(c: &mut Criterion) {
    let region = Region::default();
    let sample = generate_dataset(1, 1, &region, &SimConfig::default()).unwrap()[0];
    let mut rng = stream_rng(1, Stream::TrainCandidates, 0);
    let set = sample_candidates(&mut rng, sample.tx, 128, &region).unwrap();
    for kind in ModelKind::ALL {
        let model = Model::init(kind, 1);
        c.bench_function(&format!("score_128/{kind}"), |b| {
            b.iter(|| model.score_points(black_box(&sample.obs), black_box(&set.points)).unwrap())
        });
    }
}

fn training_step(c: &mut Criterion) {
    let region = Region::default();
    let data = generate_dataset(64, 2, &region, &SimConfig::default()).unwrap();
    let batch: Vec<_> = data
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rng = stream_rng(2, Stream::TrainCandidates, i as u64);
            (*s, sample_candidates(&mut rng, s.tx, 128, &region).unwrap())
        })
        .collect();
    for kind in ModelKind::ALL {
        let model = Model::init(kind, 2);
        c.bench_function(&format!("sampled_cel_64x128/{kind}"), |b| {
            b.iter(|| sampled_cel(black_box(&model), black_box(&batch)).unwrap())
        });
    }
}

fn simulator(c: &mut Criterion) {
    let cfg = SimConfig::default();
    let rx = Pose2D::new(Point2::new(20.0, 30.0), 0.4);
    let tx = Point2::new(70.0, 55.0);
    let mut rng = stream_rng(3, Stream::Scenario, 0);
    c.bench_function("simulate_measurement", |b| {
        b.iter(|| simulate_measurement(black_box(tx), &rx, &mut rng, &cfg).unwrap())
    });
}

fn posterior_grid(c: &mut Criterion) {
    let region = Region::default();
    let sample = generate_dataset(1, 4, &region, &SimConfig::default()).unwrap()[0];
    let model = Model::init(ModelKind::Mccle, 4);
    c.bench_function("heatmap_961/mccle", |b| {
        b.iter(|| heatmap(&model, black_box(&sample.obs), &region, DEFAULT_GRID_SPACING).unwrap())
    });
}

criterion_group!(benches, scoring, training_step, simulator, posterior_grid);
criterion_main!(benches);
