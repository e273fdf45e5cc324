use std::path::Path;

use mccle_core::dataset::{write_dataset, DatasetHeader};
use mccle_core::eval::{evaluate, reference_cases, scenario_suite, EvalScheme, MetricsReport, ScenarioCase};
use mccle_core::hashing::config_hash;
use mccle_core::models::serialize_params;
use mccle_core::rfsim::generate_dataset;
use mccle_core::train::{history_csv, train as fit};
use mccle_core::{Checkpoint, Model, Region, SimConfig, TrainConfig};
use serde::Serialize;

use crate::failure::{CliResult, Failure};
use crate::io::{ensure_dir, ensure_writable, load_checkpoint, load_dataset, sidecar, write_bytes, write_json};
use crate::{EvalArgs, GenArgs, HeatmapArgs, TrainArgs};

#[derive(Serialize)]
struct GenMeta<'a> {
    seed: u64,
    n: usize,
    config_hash: &'a str,
    generator_version: &'a str,
    region: Region,
    sim: SimConfig,
}

pub fn gen(args: &GenArgs, seed: u64) -> CliResult<()> {
    let meta_path = sidecar(&args.out, ".meta.json");
    ensure_writable(&args.out)?;
    ensure_writable(&meta_path)?;
    let region = Region::default();
    let sim = SimConfig::default();
    let samples = generate_dataset(args.n, seed, &region, &sim)?;
    let header = DatasetHeader::new(seed, samples.len(), region, sim);

    let mut buf = Vec::new();
    write_dataset(&mut buf, &header, &samples)?;
    write_bytes(&args.out, &buf)?;
    write_json(
        &meta_path,
        &GenMeta {
            seed,
            n: header.n,
            config_hash: &header.config_hash,
            generator_version: &header.generator_version,
            region,
            sim,
        },
    )
}

pub fn train(args: &TrainArgs, seed: u64) -> CliResult<()> {
    let history_path = sidecar(&args.out, ".history.csv");
    ensure_writable(&args.out)?;
    ensure_writable(&history_path)?;
    let (header, samples) = load_dataset(&args.dataset)?;

    let mut cfg = TrainConfig::for_kind(args.model);
    cfg.epochs = args.epochs;
    cfg.k_candidates = args.k_candidates;
    cfg.seed = seed;
    if let Some(lr) = args.lr {
        cfg.learning_rate = lr;
    }
    if let Some(b) = args.batch_size {
        cfg.batch_size = b;
    }
    if let Some(wd) = args.weight_decay {
        cfg.weight_decay = wd;
    }
    let hash = config_hash(&(args.model, &cfg, &header.config_hash));
    let outcome = fit(&samples, args.model, &cfg, &header.region)?;

    let ckpt = Checkpoint {
        model: outcome.best,
        seed,
        train_config_hash: hash.clone(),
    };
    write_bytes(&args.out, &serialize_params(&ckpt)?)?;
    write_bytes(&history_path, history_csv(&outcome.history, seed, &hash).as_bytes())
}

#[derive(Serialize)]
struct EvalOutput {
    seed: u64,
    config_hash: String,
    model: String,
    checkpoint_config_hash: Option<String>,
    dataset_config_hash: String,
    reports: Vec<MetricsReport>,
}

pub fn eval(args: &EvalArgs, seed: u64) -> CliResult<()> {
    ensure_writable(&args.out)?;
    let (model, ckpt_hash) = if args.uniform {
        (Model::constant(0.0), None)
    } else {
        let path = args.checkpoint.as_deref().expect("clap enforces checkpoint or --uniform");
        let ckpt = load_checkpoint(path, args.model)?;
        (ckpt.model, Some(ckpt.train_config_hash))
    };
    let (header, samples) = load_dataset(&args.dataset)?;
    let schemes = [
        EvalScheme::Grid { spacing: args.spacing },
        EvalScheme::Random { k: args.random_k },
    ];
    let reports = schemes
        .iter()
        .map(|s| evaluate(&model, &samples, s, &header.region, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let label = if args.uniform { "uniform".to_string() } else { model.kind().to_string() };
    let out = EvalOutput {
        seed,
        config_hash: config_hash(&(&schemes, &ckpt_hash, &header.config_hash)),
        model: label,
        checkpoint_config_hash: ckpt_hash,
        dataset_config_hash: header.config_hash,
        reports,
    };
    write_json(&args.out, &out)
}

pub fn heatmap(args: &HeatmapArgs, seed: u64) -> CliResult<()> {
    let cases = match &args.geometry {
        Some(g) => vec![ScenarioCase::parse(g).map_err(Failure::geometry)?],
        None => reference_cases(),
    };
    let region = Region::default();
    for case in &cases {
        case.geometry(&region).map_err(Failure::geometry)?;
    }
    ensure_dir(&args.out)?;

    let mut models: Vec<(String, Model, String)> = Vec::new();
    if args.uniform {
        models.push(("uniform".into(), Model::constant(0.0), "-".into()));
    }
    for path in &args.checkpoints {
        let ckpt = load_checkpoint(path, args.model)?;
        let label = label_for(path);
        if models.iter().any(|(l, _, _)| *l == label) {
            return Err(Failure::new(1, "input", format!("two models would both write '{label}_*' files")));
        }
        models.push((label, ckpt.model, ckpt.train_config_hash));
    }

    let sim = SimConfig::default();
    for (label, model, ckpt_hash) in &models {
        let results = scenario_suite(model, &cases, &region, args.spacing, &sim, seed)?;
        for r in results {
            let hash = config_hash(&(&r.case, args.spacing, &sim, ckpt_hash));
            let c = &r.case;
            let meta = [
                ("seed", seed.to_string()),
                ("config_hash", hash),
                ("model", label.clone()),
                ("dx", c.dx.to_string()),
                ("dy", c.dy.to_string()),
                ("heading_deg", c.heading_deg.to_string()),
                ("tx_x", r.tx.x.to_string()),
                ("tx_y", r.tx.y.to_string()),
                ("rx_x", r.obs.rx.position.x.to_string()),
                ("rx_y", r.obs.rx.position.y.to_string()),
                ("aoa_hat_deg", r.obs.aoa_hat.to_degrees().to_string()),
                ("snr_hat", r.obs.snr_hat.to_string()),
            ];
            let stem = format!("{label}_{}", c.file_stem());
            write_bytes(&args.out.join(format!("{stem}.csv")), r.grid.to_csv(&meta).as_bytes())?;
            if args.ppm {
                write_bytes(&args.out.join(format!("{stem}.ppm")), &r.grid.to_ppm())?;
            }
        }
    }
    Ok(())
}

fn label_for(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".into())
}
