//! CSV and JSON writers.

use crate::error::CliResult;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// `t` (in T_B) followed by one column per photon number.
pub fn write_heatmap<'a>(
    path: &Path,
    offset: i64,
    len: usize,
    rows: impl IntoIterator<Item = (f64, &'a [f64])>,
) -> CliResult<PathBuf> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = Vec::with_capacity(len + 1);
    header.push("t_over_TB".to_string());
    header.extend((0..len as i64).map(|i| (offset + i).to_string()));
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(len + 1);
    for (t, p) in rows {
        record.clear();
        record.push(t.to_string());
        record.extend(p.iter().map(f64::to_string));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

/// One CSV row per item, header from the field names.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<PathBuf> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(path.to_path_buf())
}
