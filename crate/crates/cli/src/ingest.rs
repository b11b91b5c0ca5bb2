use std::path::Path;

use anyhow::{bail, Context, Result};
use log::warn;
use trendstat::TimeSeries;

/// Minimum series length accepted by the `test` command.
pub const MIN_TEST_LEN: usize = 20;

/// Reads one numeric value per row. A non-numeric first row is treated as a
/// header; extra columns are ignored with a warning.
pub fn ingest_csv(path: &Path, min_len: usize) -> Result<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;

    let mut values = Vec::new();
    let mut warned = false;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.with_context(|| format!("row {row}: unreadable record"))?;
        let Some(cell) = record.get(0) else { continue };
        if cell.is_empty() && record.len() == 1 {
            continue;
        }
        if record.len() > 1 && !warned {
            warn!("{}: ignoring columns after the first", path.display());
            warned = true;
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => bail!("row {row}: non-finite value {cell:?}"),
            Err(_) if row == 1 => continue,
            Err(_) => bail!("row {row}: non-numeric value {cell:?}"),
        }
    }
    if values.len() < min_len {
        bail!("series too short: {} rows, need at least {min_len}", values.len());
    }
    Ok(TimeSeries::with_source(values, path.display().to_string()))
}
