//! CSV records and JSON summaries.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::stats::{CellKey, Observation, SummaryStats};
use crate::error::{Error, Result};
use crate::instance::{Goal, HeightMode, InstanceRef};
use crate::record::RunRecord;

/// One CSV line. Column order is fixed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordRow {
    #[serde(rename = "instance_L")]
    pub instance_l: usize,
    pub instance_n: usize,
    pub height_mode: HeightMode,
    pub instance_seed: u64,
    pub algorithm: String,
    pub goal: Goal,
    pub run_index: u64,
    pub run_seed: u64,
    pub evals: u64,
    pub restarts_or_generations: u64,
    pub success: bool,
    pub peaks_found_count: usize,
}

pub const CSV_HEADER: [&str; 12] = [
    "instance_L",
    "instance_n",
    "height_mode",
    "instance_seed",
    "algorithm",
    "goal",
    "run_index",
    "run_seed",
    "evals",
    "restarts_or_generations",
    "success",
    "peaks_found_count",
];

impl From<&RunRecord> for RecordRow {
    fn from(r: &RunRecord) -> Self {
        RecordRow {
            instance_l: r.instance.length,
            instance_n: r.instance.n,
            height_mode: r.instance.height_mode,
            instance_seed: r.instance.seed,
            algorithm: r.algorithm_id.clone(),
            goal: r.goal,
            run_index: r.run_index,
            run_seed: r.run_seed,
            evals: r.evals,
            restarts_or_generations: r.restarts_or_generations,
            success: r.success,
            peaks_found_count: r.peaks_found.len(),
        }
    }
}

impl Observation for RecordRow {
    fn cell(&self) -> CellKey {
        CellKey {
            instance: InstanceRef {
                length: self.instance_l,
                n: self.instance_n,
                height_mode: self.height_mode,
                seed: self.instance_seed,
            },
            algorithm: self.algorithm.clone(),
            goal: self.goal,
        }
    }

    fn evals(&self) -> u64 {
        self.evals
    }

    fn success(&self) -> bool {
        self.success
    }

    fn restarts_or_generations(&self) -> u64 {
        self.restarts_or_generations
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.serialize(RecordRow::from(r)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RecordRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Format(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

pub fn save_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(records, std::io::BufWriter::new(file)).map_err(|e| match e {
        Error::Format(msg) => Error::io(path, std::io::Error::other(msg)),
        other => other,
    })
}

pub fn load_csv(path: &Path) -> Result<Vec<RecordRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(std::io::BufReader::new(file))
}

pub fn summaries_to_json(summaries: &[SummaryStats]) -> String {
    serde_json::to_string_pretty(summaries).expect("summaries serialize")
}

pub fn save_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("value serializes");
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
