//! JSON-lines dataset files.
//!
//! The first line is a header object carrying the generator settings, seed
//! and config hash; each following line is one sample:
//! `{"tx":[x,y],"rx":[x,y],"heading":r,"aoa":r,"snr":γ}`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::config_hash;
use crate::rfsim::{Observation, SimConfig};
use crate::scene::{Point2, Pose2D, Region, Sample};

pub const DATASET_FORMAT: &str = "mccle-dataset";
pub const DATASET_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub format: String,
    pub version: u32,
    pub generator_version: String,
    pub seed: u64,
    pub n: usize,
    pub config_hash: String,
    pub region: Region,
    pub sim: SimConfig,
}

impl DatasetHeader {
    pub fn new(seed: u64, n: usize, region: Region, sim: SimConfig) -> Self {
        Self {
            format: DATASET_FORMAT.into(),
            version: DATASET_VERSION,
            generator_version: env!("CARGO_PKG_VERSION").into(),
            seed,
            n,
            config_hash: config_hash(&(region, sim)),
            region,
            sim,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub tx: [f64; 2],
    pub rx: [f64; 2],
    pub heading: f64,
    pub aoa: f64,
    pub snr: f64,
}

impl From<&Sample> for SampleRecord {
    fn from(s: &Sample) -> Self {
        Self {
            tx: s.tx.into(),
            rx: s.obs.rx.position.into(),
            heading: s.obs.rx.heading(),
            aoa: s.obs.aoa_hat,
            snr: s.obs.snr_hat,
        }
    }
}

impl SampleRecord {
    pub fn to_sample(&self) -> std::result::Result<Sample, String> {
        let all = [self.tx[0], self.tx[1], self.rx[0], self.rx[1], self.heading, self.aoa, self.snr];
        if all.iter().any(|v| !v.is_finite()) {
            return Err("non-finite field".into());
        }
        if self.snr < 0.0 {
            return Err("negative snr".into());
        }
        Ok(Sample {
            tx: Point2::from(self.tx),
            obs: Observation {
                rx: Pose2D::new(Point2::from(self.rx), self.heading),
                aoa_hat: self.aoa,
                snr_hat: self.snr,
            },
        })
    }
}

pub fn write_dataset<W: Write>(mut w: W, header: &DatasetHeader, samples: &[Sample]) -> Result<()> {
    serde_json::to_writer(&mut w, header)?;
    w.write_all(b"\n")?;
    for s in samples {
        serde_json::to_writer(&mut w, &SampleRecord::from(s))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dataset; errors name the 1-based line that failed.
pub fn read_dataset<R: BufRead>(r: R) -> Result<(DatasetHeader, Vec<Sample>)> {
    let mut lines = r.lines();
    let first = lines.next().ok_or(Error::DatasetLine {
        line: 1,
        msg: "missing header".into(),
    })??;
    let header: DatasetHeader = serde_json::from_str(&first).map_err(|e| Error::DatasetLine {
        line: 1,
        msg: format!("bad header: {e}"),
    })?;
    if header.format != DATASET_FORMAT || header.version != DATASET_VERSION {
        return Err(Error::DatasetLine {
            line: 1,
            msg: format!("unsupported dataset {} v{}", header.format, header.version),
        });
    }
    let mut samples = Vec::with_capacity(header.n);
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SampleRecord = serde_json::from_str(&line).map_err(|e| Error::DatasetLine {
            line: line_no,
            msg: e.to_string(),
        })?;
        samples.push(rec.to_sample().map_err(|msg| Error::DatasetLine { line: line_no, msg })?);
    }
    Ok((header, samples))
}
