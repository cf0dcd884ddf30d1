use std::fs::OpenOptions;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::selection::{Direction, Objective};

pub const CSV_HEADER: &str = "run_id,dataset,algorithm,objective,direction,k_step,seed,mse,polarization,bias_sq,theta_hat,theta_hat_star,elapsed_ms,evaluations,stooges";

/// One results row: the state of one run after `k_step` stooges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub run_id: String,
    pub dataset: String,
    pub algorithm: String,
    pub objective: Objective,
    pub direction: Direction,
    pub k_step: usize,
    pub seed: u64,
    #[serde(serialize_with = "sig12")]
    pub mse: f64,
    #[serde(serialize_with = "sig12")]
    pub polarization: f64,
    #[serde(serialize_with = "sig12")]
    pub bias_sq: f64,
    #[serde(serialize_with = "sig12")]
    pub theta_hat: f64,
    #[serde(serialize_with = "sig12")]
    pub theta_hat_star: f64,
    #[serde(serialize_with = "sig12")]
    pub elapsed_ms: f64,
    pub evaluations: usize,
    /// `node:beta` pairs joined by `;`.
    pub stooges: String,
}

/// Rounds to 12 significant digits and prints the shortest decimal that
/// reads back to the rounded value, in exponent form for very small or large
/// magnitudes.
pub fn format_float(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded != 0.0 && !(1e-5..1e16).contains(&rounded.abs()) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

fn sig12<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return Err(serde::ser::Error::custom(format!("non-finite value {x} in results row")));
    }
    s.serialize_str(&format_float(*x))
}

fn write_to<W: std::io::Write>(records: &[ExperimentRecord], writer: W, header: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    if header {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes `records` to a fresh file with header.
pub fn write_records(records: &[ExperimentRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_to(records, file, true)
}

/// Appends `records`, writing the header first if the file is new or empty.
/// Rows go out in a single write per call.
pub fn append_records(records: &[ExperimentRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let needs_header = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut buf = Vec::new();
    write_to(records, &mut buf, needs_header)?;
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    std::io::Write::write_all(&mut file, &buf).map_err(|e| Error::io(path, e))
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<ExperimentRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::parse(path, 1, format!("unexpected header {:?}", header.join(","))));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
