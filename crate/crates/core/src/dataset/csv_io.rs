use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{FeatureCatalog, Label, LabeledDataset, SourceSet};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Column roles of an ingestion CSV. Every column other than the id and label
/// columns is a numeric feature, kept in header order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsvSchema {
    pub id_column: String,
    pub label_column: String,
    /// Label strings meaning Control. The first one is used when writing.
    pub control_labels: Vec<String>,
    /// Label strings meaning AD. The first one is used when writing.
    pub ad_labels: Vec<String>,
    /// Feature set recorded in the catalog for every feature column.
    pub source_set: SourceSet,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            id_column: "id".into(),
            label_column: "label".into(),
            control_labels: vec!["cc".into(), "Control".into()],
            ad_labels: vec!["cd".into(), "AD".into()],
            source_set: SourceSet::Other,
        }
    }
}

impl CsvSchema {
    fn parse_label(&self, s: &str) -> Option<Label> {
        if self.control_labels.iter().any(|l| l == s) {
            Some(Label::Control)
        } else if self.ad_labels.iter().any(|l| l == s) {
            Some(Label::Ad)
        } else {
            None
        }
    }

    fn label_text(&self, l: Label) -> String {
        let list = match l {
            Label::Control => &self.control_labels,
            Label::Ad => &self.ad_labels,
        };
        list.first().cloned().unwrap_or_else(|| l.to_string())
    }
}

pub fn load_csv<T: Scalar>(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<LabeledDataset<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_csv(file, schema)
}

/// Parses an ingestion CSV. Positions in errors are 1-based file lines
/// (the header is line 1).
pub fn read_csv<T: Scalar, R: Read>(reader: R, schema: &CsvSchema) -> Result<LabeledDataset<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Header(e.to_string()))?
        .clone();

    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, name) in header.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::Header(format!("empty column name at position {}", i + 1)));
        }
        if let Some(first) = seen.insert(name, i) {
            return Err(Error::Header(format!(
                "duplicate column {name:?} at positions {} and {}",
                first + 1,
                i + 1
            )));
        }
    }
    let id_col = *seen
        .get(schema.id_column.as_str())
        .ok_or_else(|| Error::Header(format!("missing id column {:?}", schema.id_column)))?;
    let label_col = *seen.get(schema.label_column.as_str()).ok_or_else(|| {
        Error::Header(format!("missing label column {:?}", schema.label_column))
    })?;
    if id_col == label_col {
        return Err(Error::Header("id and label columns coincide".into()));
    }
    let feature_cols: Vec<usize> = (0..header.len())
        .filter(|&i| i != id_col && i != label_col)
        .collect();
    let catalog = FeatureCatalog::from_names(
        feature_cols.iter().map(|&i| header[i].to_string()),
        schema.source_set,
    )?;

    let mut subjects = Vec::new();
    let mut labels = Vec::new();
    let mut values: Vec<T> = Vec::new();
    let mut first_row: HashMap<String, usize> = HashMap::new();
    for (r, record) in rdr.records().enumerate() {
        let line = r + 2;
        let record = record.map_err(|e| Error::Csv {
            row: line,
            column: String::new(),
            message: e.to_string(),
        })?;
        let id = record[id_col].to_string();
        if let Some(prev) = first_row.insert(id.clone(), line) {
            return Err(Error::Csv {
                row: line,
                column: schema.id_column.clone(),
                message: format!("duplicate subject id {id:?} (first seen on line {prev})"),
            });
        }
        let label = schema.parse_label(&record[label_col]).ok_or_else(|| Error::Csv {
            row: line,
            column: schema.label_column.clone(),
            message: format!("unknown label {:?}", &record[label_col]),
        })?;
        for &c in &feature_cols {
            let cell = &record[c];
            let v: T = cell.parse().map_err(|_| Error::Csv {
                row: line,
                column: header[c].to_string(),
                message: format!("non-numeric value {cell:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Csv {
                    row: line,
                    column: header[c].to_string(),
                    message: format!("non-finite value {cell:?}"),
                });
            }
            values.push(v);
        }
        subjects.push(id);
        labels.push(label);
    }
    let x = Array2::from_shape_vec((subjects.len(), feature_cols.len()), values)
        .expect("row-major buffer matches shape");
    LabeledDataset::new(subjects, x, labels, catalog)
}

/// Writes the dataset in the ingestion schema (id, label, features...).
pub fn write_csv<T: Scalar, W: Write>(
    ds: &LabeledDataset<T>,
    writer: W,
    schema: &CsvSchema,
) -> Result<()> {
    let io = |e: csv::Error| Error::Io {
        path: "<csv writer>".into(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![schema.id_column.clone(), schema.label_column.clone()];
    header.extend(ds.catalog().names().map(str::to_string));
    w.write_record(&header).map_err(io)?;
    let mut row = Vec::with_capacity(header.len());
    for (i, subject) in ds.subjects().iter().enumerate() {
        row.clear();
        row.push(subject.clone());
        row.push(schema.label_text(ds.labels()[i]));
        row.extend(ds.x().row(i).iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "<csv writer>".into(),
        message: e.to_string(),
    })
}
