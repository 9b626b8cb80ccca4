//! Dataset and label file formats.
//!
//! Datasets are headerless text, one point per line, coordinates separated
//! by commas; ragged rows are rejected. Labels are one integer per line in
//! input order (-1 for noise), optionally followed by a class column.

use std::fs;
use std::path::Path;

use grit_dbscan::points::{Clustering, Dataset, PointClass};

use crate::CmdError;

pub fn read_dataset(path: &Path) -> Result<Dataset, CmdError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CmdError::validation(format!("cannot read {}: {e}", path.display()))
    })?;
    parse_dataset(&text).map_err(|msg| {
        CmdError::validation(format!("{}: {msg}", path.display()))
    })
}

pub fn parse_dataset(text: &str) -> Result<Dataset, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| format!("line {}: malformed coordinate {field:?}", lineno + 1))?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(format!(
                    "line {}: expected {} fields, found {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        // Empty input is allowed; the dimension is immaterial.
        return Dataset::empty(2).map_err(|e| e.to_string());
    }
    let d = rows[0].len();
    Dataset::from_rows(d, &rows).map_err(|e| e.to_string())
}

pub fn write_dataset(path: &Path, data: &Dataset) -> Result<(), CmdError> {
    let mut out = String::new();
    for p in data.iter() {
        let fields: Vec<String> = p.iter().map(|c| format!("{c}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out)
        .map_err(|e| CmdError::validation(format!("cannot write {}: {e}", path.display())))
}

pub fn write_labels(
    path: &Path,
    clustering: &Clustering,
    with_classes: bool,
) -> Result<(), CmdError> {
    let mut out = String::new();
    for i in 0..clustering.len() {
        if with_classes {
            let class = match clustering.classes[i] {
                PointClass::Core => 'C',
                PointClass::Border => 'B',
                PointClass::Noise => 'N',
            };
            out.push_str(&format!("{} {}\n", clustering.labels[i], class));
        } else {
            out.push_str(&format!("{}\n", clustering.labels[i]));
        }
    }
    fs::write(path, out)
        .map_err(|e| CmdError::validation(format!("cannot write {}: {e}", path.display())))
}
