//! File formats: JSON configs and reports, the dataset CSV interchange,
//! per-epoch metric logs and IDX files on disk.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use berlu_core::data::{dataset_from_idx, Split};
use berlu_core::trainer::{EpochMetrics, RunReport};
use berlu_core::{Dataset, Matrix, PiecewiseLinear, TrainConfig};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Shortest round-trip decimal for `v`, switching to exponent notation
/// outside `[1e-5, 1e16)` and printing negative zero as `0`.
pub fn num(v: f64) -> String {
    let v = v + 0.0;
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// One CSV row of per-epoch metrics, epochs counted from 1.
pub fn metrics_row(epoch: usize, m: &EpochMetrics) -> String {
    format!(
        "{epoch},{},{},{},{}",
        num(m.train_loss),
        num(m.train_acc),
        num(m.val_acc),
        num(m.lr)
    )
}

/// Header of the per-epoch metrics log.
pub const METRICS_HEADER: &str = "epoch,train_loss,train_acc,val_acc,lr";

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_train_config(path: &Path) -> Result<TrainConfig> {
    let cfg: TrainConfig = read_json(path)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn read_pwl(path: &Path) -> Result<PiecewiseLinear> {
    read_json(path)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_report(report: &RunReport, out: &mut dyn Write) -> Result<()> {
    out.write_all(to_json(report)?.as_bytes())?;
    Ok(())
}

/// Appends one row per epoch to `path`, writing the header first if the file is new or empty.
pub fn append_metrics_csv(path: &Path, report: &RunReport) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut buf = String::new();
    if fresh {
        buf.push_str(METRICS_HEADER);
        buf.push('\n');
    }
    for (i, m) in report.per_epoch.iter().enumerate() {
        buf.push_str(&metrics_row(i + 1, m));
        buf.push('\n');
    }
    file.write_all(buf.as_bytes())
        .map_err(|e| Error::io(path, e))
}

/// Writes the dataset as CSV with header `y,x0,x1,...`.
pub fn write_dataset_csv(ds: &Dataset, out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["y".to_string()];
    header.extend((0..ds.dim()).map(|j| format!("x{j}")));
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..ds.len() {
        let mut row = vec![ds.labels[i].to_string()];
        row.extend(ds.features.row(i).iter().map(|&v| num(v)));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the CSV interchange format. Every sample lands in the training split.
pub fn read_dataset_csv(input: impl std::io::Read) -> Result<Dataset> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    let expected: Vec<String> = std::iter::once("y".to_string())
        .chain((0..header.len().saturating_sub(1)).map(|j| format!("x{j}")))
        .collect();
    if header.len() < 2 || header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Csv(format!(
            "expected header y,x0,x1,..., got {}",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let dim = header.len() - 1;
    let mut labels = Vec::new();
    let mut data = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let bad = |field: &str| Error::Csv(format!("row {}: cannot parse '{field}'", line + 1));
        labels.push(record[0].parse::<usize>().map_err(|_| bad(&record[0]))?);
        for field in record.iter().skip(1) {
            data.push(field.parse::<f64>().map_err(|_| bad(field))?);
        }
    }
    let n = labels.len();
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let split = Split {
        train_idx: (0..n).collect(),
        val_idx: Vec::new(),
    };
    Ok(Dataset::new(
        Matrix::from_vec(n, dim, data)?,
        labels,
        classes,
        split,
    )?)
}

pub fn load_dataset_csv(path: &Path) -> Result<Dataset> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset_csv(file)
}

/// Loads an IDX image/label pair from disk.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let images = fs::read(images_path).map_err(|e| Error::io(images_path, e))?;
    let labels = fs::read(labels_path).map_err(|e| Error::io(labels_path, e))?;
    Ok(dataset_from_idx(&images, &labels)?)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}
