use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Utc};
use serde::Serialize;

/// Rows of angles from a headerless or single-header CSV, converted to
/// radians. Every row must have the same number of columns.
pub fn read_angle_rows(path: &Path, degrees: bool) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(if degrees { v.into_iter().map(f64::to_radians).collect() } else { v }),
            Err(_) if i == 0 => continue,
            Err(e) => bail!("{}: row {}: {e}", path.display(), i + 1),
        }
    }
    if rows.is_empty() {
        bail!("{}: no angles found", path.display());
    }
    let k = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != k) {
        bail!("{}: row {} has {} columns, expected {k}", path.display(), i + 1, rows[i].len());
    }
    Ok(rows)
}

/// Writes through a sibling temp file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).with_context(|| format!("cannot write {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("cannot move {} into place", path.display()))?;
    Ok(())
}

pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner()?)
}

#[derive(Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub workers: Option<usize>,
    pub started: DateTime<Utc>,
    pub finished: DateTime<Utc>,
    pub outputs: Vec<PathBuf>,
    pub version: &'static str,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)
    }
}
