use std::f64::consts::PI;

use mccle_core::dataset::{read_dataset, write_dataset, DatasetHeader};
use mccle_core::eval::{entropy, heatmap, metrics, posterior_from_scores};
use mccle_core::models::{deserialize_params, serialize_params, GaussianHeadParams};
use mccle_core::rfsim::{array_response, element_gain, generate_dataset, ArrayConfig, ElementPattern};
use mccle_core::scene::{prior_density, stream_rng, wrap_angle, Stream};
use mccle_core::train::{sample_candidates, sampled_cel_value};
use mccle_core::{
    featurize, Checkpoint, CoordinateMode, Model, ModelKind, Observation, Point2, Pose2D, Region, Sample, SimConfig,
};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    0.0..100.0f64
}

fn angle() -> impl Strategy<Value = f64> {
    -PI..PI
}

fn observation() -> impl Strategy<Value = Observation> {
    (coord(), coord(), angle(), angle(), 0.0..1e6f64).prop_map(|(x, y, h, a, s)| Observation {
        rx: Pose2D::new(Point2::new(x, y), h),
        aoa_hat: a,
        snr_hat: s,
    })
}

fn kind() -> impl Strategy<Value = ModelKind> {
    prop_oneof![Just(ModelKind::Mccle), Just(ModelKind::GaussCart), Just(ModelKind::GaussPolar)]
}

proptest! {
    #[test]
    fn wrap_angle_range(a in -1e4..1e4f64) {
        let w = wrap_angle(a);
        prop_assert!((-PI..PI).contains(&w));
        let turns = (a - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn pose_heading_normalized(h in -100.0..100.0f64) {
        let p = Pose2D::new(Point2::new(0.0, 0.0), h);
        prop_assert!((-PI..PI).contains(&p.heading()));
    }

    #[test]
    fn prior_support(x in -50.0..150.0f64, y in -50.0..150.0f64) {
        let r = Region::default();
        let p = prior_density(Point2::new(x, y), &r);
        if r.contains(Point2::new(x, y)) {
            prop_assert_eq!(p, 1e-4);
        } else {
            prop_assert_eq!(p, 0.0);
        }
    }

    #[test]
    fn features_translation_invariant(obs in observation(), cx in coord(), cy in coord(), tx in -1e3..1e3f64, ty in -1e3..1e3f64) {
        let c = Point2::new(cx, cy);
        prop_assume!(c.distance(obs.rx.position) > 1e-3);
        let t = Point2::new(tx, ty);
        let mut shifted = obs;
        shifted.rx = Pose2D::new(obs.rx.position + t, obs.rx.heading());
        let a = featurize(c, &obs, 60.0).unwrap().to_array();
        let b = featurize(c + t, &shifted, 60.0).unwrap().to_array();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-9, "{:?} vs {:?}", a, b);
        }
    }

    #[test]
    fn features_periodic(obs in observation(), cx in coord(), cy in coord(), turns in -3i32..3) {
        let c = Point2::new(cx, cy);
        prop_assume!(c.distance(obs.rx.position) > 1e-3);
        let shift = 2.0 * PI * turns as f64;
        let mut moved = obs;
        moved.rx = Pose2D::new(obs.rx.position, obs.rx.heading() + shift);
        moved.aoa_hat += shift;
        let a = featurize(c, &obs, 60.0).unwrap().to_array();
        let b = featurize(c, &moved, 60.0).unwrap().to_array();
        prop_assert_eq!(a.len(), 8);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn steering_unit_norm(phi in -10.0..10.0f64) {
        let a = array_response(phi, &ArrayConfig::default());
        let n: f64 = a.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((n.sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pattern_even_and_bounded(phi in angle()) {
        let p = ElementPattern::default();
        let g = element_gain(phi, &p);
        prop_assert_eq!(g, element_gain(-phi, &p));
        prop_assert!(g <= 1.0 && g >= 10f64.powf(-1.5) - 1e-15);
    }

    #[test]
    fn score_determinism(k in kind(), seed in any::<u64>(), obs in observation(), cx in coord(), cy in coord()) {
        let m = Model::init(k, seed);
        let c = Point2::new(cx, cy);
        prop_assume!(c.distance(obs.rx.position) > 1e-3);
        prop_assert_eq!(m.score(c, &obs).unwrap().to_bits(), m.score(c, &obs).unwrap().to_bits());
    }

    #[test]
    fn gaussian_precision_psd(seed in any::<u64>(), obs in observation(), polar in any::<bool>()) {
        let mode = if polar { CoordinateMode::Polar } else { CoordinateMode::Cartesian };
        let g = GaussianHeadParams::init(mode, &mut stream_rng(seed, Stream::Init, 0));
        let q = g.moments(&obs).unwrap().precision();
        let tr = q[0][0] + q[1][1];
        let det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
        prop_assert!((q[0][1] - q[1][0]).abs() < 1e-12);
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        prop_assert!(tr / 2.0 - disc >= -1e-12 * tr.abs().max(1.0));
    }

    #[test]
    fn polar_bearing_wraps(seed in any::<u64>(), obs in observation(), cx in coord(), cy in coord(), turns in -2i32..3) {
        let c = Point2::new(cx, cy);
        prop_assume!(c.distance(obs.rx.position) > 1e-3);
        let base = Model::init(ModelKind::GaussPolar, seed);
        let mut shifted = base.clone();
        // Output 1 is the bearing mean; moving it by whole turns must not matter.
        let n = shifted.params().len();
        shifted.params_mut()[n - 4] += 2.0 * PI * turns as f64;
        let a = base.score(c, &obs).unwrap();
        let b = shifted.score(c, &obs).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn posterior_normalized(scores in prop::collection::vec(-50.0..50.0f64, 1..200)) {
        let prior = vec![0.0; scores.len()];
        let p = posterior_from_scores(&scores, &prior).unwrap();
        let s: f64 = p.iter().sum();
        prop_assert!((s - 1.0).abs() < 1e-9);
        let h = entropy(&p).unwrap();
        prop_assert!(h >= -1e-12 && h <= (scores.len() as f64).ln() + 1e-9);
    }

    #[test]
    fn metrics_consistent(l in -7.0..0.0f64, k in 2usize..5000) {
        let (g, r) = metrics(l, k);
        prop_assert!((g - (-l).exp()).abs() < 1e-9 * g);
        prop_assert!((r + 100.0 * l / (k as f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn checkpoint_roundtrip(k in kind(), seed in any::<u64>()) {
        let ckpt = Checkpoint { model: Model::init(k, seed), seed, train_config_hash: "00ff".into() };
        let bytes = serialize_params(&ckpt).unwrap();
        let back = deserialize_params(&bytes, Some(k)).unwrap();
        prop_assert_eq!(&back, &ckpt);
        prop_assert_eq!(serialize_params(&back).unwrap(), bytes);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cel_lower_bound(k in kind(), seed in any::<u64>(), n in 1usize..4, kc in 2usize..40, scale in 0.1..20.0f64) {
        let mut model = Model::init(k, seed);
        if k == ModelKind::Mccle {
            model.params_mut().iter_mut().for_each(|p| *p *= scale);
        }
        let region = Region::default();
        let mut rng = stream_rng(seed, Stream::TrainCandidates, 0);
        let batch: Vec<_> = (0..n)
            .map(|i| {
                let tx = region.sample_uniform(&mut rng);
                let obs = Observation {
                    rx: Pose2D::new(region.sample_uniform(&mut rng), i as f64),
                    aoa_hat: 0.3 * i as f64,
                    snr_hat: 100.0,
                };
                (Sample { tx, obs }, sample_candidates(&mut rng, tx, kc, &region).unwrap())
            })
            .collect();
        let l = sampled_cel_value(&model, &batch).unwrap();
        prop_assert!(l >= -(kc as f64).ln() - 1e-12, "{} < -ln {}", l, kc);
        let flat = sampled_cel_value(&Model::constant(scale), &batch).unwrap();
        prop_assert!(flat.abs() < 1e-12);
    }
}

#[test]
fn heatmaps_normalize_for_random_models() {
    let region = Region::default();
    for (i, k) in ModelKind::ALL.into_iter().enumerate() {
        let m = Model::init(k, i as u64);
        let obs = Observation {
            rx: Pose2D::new(Point2::new(33.3, 71.0), -1.0),
            aoa_hat: 2.0,
            snr_hat: 5e3,
        };
        let h = heatmap(&m, &obs, &region, 4.0).unwrap();
        let s: f64 = h.log_relative.iter().map(|l| l.exp()).sum::<f64>() / h.k() as f64;
        assert!((s - 1.0).abs() < 1e-9);
    }
}

#[test]
fn dataset_roundtrip_is_exact() {
    let region = Region::default();
    let sim = SimConfig::default();
    let data = generate_dataset(50, 12, &region, &sim).unwrap();
    let header = DatasetHeader::new(12, data.len(), region, sim);
    let mut buf = Vec::new();
    write_dataset(&mut buf, &header, &data).unwrap();
    let (h, back) = read_dataset(buf.as_slice()).unwrap();
    assert_eq!(h, header);
    assert_eq!(back, data);
    let mut again = Vec::new();
    write_dataset(&mut again, &h, &back).unwrap();
    assert_eq!(again, buf);
}
