//! CSV and JSON persistence. Every float is written with 17 significant
//! digits so that a value read back is bit-identical to the one written.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::InterpolationCheck;
use crate::envelope::Envelope;
use crate::error::{Error, Result};
use crate::harness::fmt17;
use crate::quadrature::unit_node;
use crate::simulate::{Point, PppSample};
use crate::testing::TestRecord;

/// Sidecar metadata stored next to a sample CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub n: u64,
    pub y_cap: f64,
    pub seed: u64,
    pub cap_valid: bool,
    pub boundary: Option<String>,
    pub beta: Option<f64>,
    pub radius: Option<f64>,
    /// Resolved configuration of the run that produced the sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl SampleMeta {
    pub fn of(sample: &PppSample) -> Self {
        Self {
            n: sample.n(),
            y_cap: sample.y_cap(),
            seed: sample.seed(),
            cap_valid: sample.cap_valid(),
            boundary: None,
            beta: None,
            radius: None,
            config: None,
        }
    }
}

/// `data.csv` → `data.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_points<W: Write>(points: &[Point], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y"])?;
    for p in points {
        w.write_record([fmt17(p.x), fmt17(p.y)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_points<R: Read>(input: R) -> Result<Vec<Point>> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(Error::Parse("sample CSV must have the header x,y".into()));
    }
    let mut points = Vec::new();
    for record in rd.deserialize() {
        let p: Point = record?;
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::NonFinite(format!("sample point ({}, {})", p.x, p.y)));
        }
        if !(0.0..=1.0).contains(&p.x) {
            return Err(Error::Parse(format!("x = {} lies outside [0, 1]", p.x)));
        }
        points.push(p);
    }
    Ok(points)
}

pub fn write_json<T: Serialize, W: Write>(value: &T, out: W) -> Result<()> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Writes `path` (points) and its sidecar.
pub fn save_sample(path: &Path, sample: &PppSample, meta: &SampleMeta) -> Result<()> {
    write_points(sample.points(), BufWriter::new(File::create(path)?))?;
    write_json(meta, BufWriter::new(File::create(sidecar_path(path))?))
}

/// Reads a sample and its sidecar. `radius` recomputes `cap_valid` from the
/// points; the sidecar flag is kept when it already says invalid.
pub fn load_sample(path: &Path, radius: f64) -> Result<(PppSample, SampleMeta)> {
    let points = read_points(BufReader::new(File::open(path)?))?;
    let side = sidecar_path(path);
    let meta: SampleMeta = serde_json::from_reader(BufReader::new(File::open(&side).map_err(|e| {
        Error::Parse(format!("cannot open sidecar {}: {e}", side.display()))
    })?))?;
    let sample = PppSample::from_points(points, meta.n, meta.y_cap, radius, meta.seed);
    let valid = sample.cap_valid() && meta.cap_valid;
    let sample = PppSample::with_validity(sample.points().to_vec(), meta.n, meta.y_cap, valid, meta.seed);
    Ok((sample, meta))
}

/// `x,ghat` on the uniform grid of `nodes` nodes.
pub fn write_envelope<W: Write>(env: &Envelope<'_>, nodes: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "ghat"])?;
    for i in 0..nodes {
        let x = unit_node(i, nodes);
        w.write_record([fmt17(x), fmt17(env.evaluate(x))])?;
    }
    w.flush()?;
    Ok(())
}

/// `hypothesis,rep,statistic,decision` with decisions as 0/1.
pub fn write_test_records<W: Write>(records: &[TestRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["hypothesis", "rep", "statistic", "decision"])?;
    for r in records {
        w.write_record([
            r.hypothesis.clone(),
            r.rep.to_string(),
            fmt17(r.statistic),
            (r.decision as u8).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `case,lhs,rhs,holds`.
pub fn write_interp_checks<W: Write>(checks: &[InterpolationCheck], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["case", "lhs", "rhs", "holds"])?;
    for (i, c) in checks.iter().enumerate() {
        w.write_record([i.to_string(), fmt17(c.lhs), fmt17(c.rhs), c.holds.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
