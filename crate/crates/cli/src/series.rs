use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

/// Reads the time column and one named value column of a series CSV.
pub fn read_column(path: &Path, column: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading series file {}", path.display()))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| anyhow!("{} is empty", path.display()))?
        .split(',')
        .collect();
    let idx = header.iter().position(|h| *h == column).ok_or_else(|| {
        anyhow!(
            "{} has no column {column:?} (columns: {})",
            path.display(),
            header.join(", ")
        )
    })?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            bail!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                n + 2,
                fields.len(),
                header.len()
            );
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().with_context(|| {
                format!("{}: row {}: {s:?} is not a number", path.display(), n + 2)
            })
        };
        times.push(parse(fields[0])?);
        values.push(parse(fields[idx])?);
    }
    Ok((times, values))
}
