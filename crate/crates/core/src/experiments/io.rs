//! CSV results and JSON run manifests.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentSpec, PointResult, SweepResult};
use crate::error::{Error, Result};

/// Run record written next to a results CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub spec: ExperimentSpec,
    pub csv: String,
    pub rows: usize,
}

pub fn write_csv(path: &Path, points: &[PointResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for p in points {
        w.serialize(p).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<PointResult>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let mut out = Vec::new();
    for (i, row) in r.deserialize().enumerate() {
        let row: PointResult = row.map_err(|e| Error::Parse(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        out.push(row);
    }
    Ok(out)
}

pub fn write_manifest(path: &Path, result: &SweepResult, csv_name: &str) -> Result<()> {
    let m = Manifest {
        version: result.version.clone(),
        spec: result.spec.clone(),
        csv: csv_name.to_string(),
        rows: result.points.len(),
    };
    serde_json::to_writer_pretty(File::create(path)?, &m)?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}
