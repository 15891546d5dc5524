//! CSV ingestion and emission for score tables, fused scores, and ROC curves.
//!
//! Score-table schema: header `probe_id,gallery_id[,label],<modality...>`,
//! one row per comparison, missing scores written as empty cells. On input an
//! empty cell or the token `NaN` (any case) is missing. When no label column
//! is present, a row is genuine iff its probe and gallery IDs are equal.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, ScoreDataset, ScoreVector};
use crate::error::{Error, Result};
use crate::metrics::RocCurve;

/// Column mapping for [`load_csv`]. The default expects `probe_id` and
/// `gallery_id` columns, treats a `label` column as optional, and reads every
/// remaining column as a modality in header order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CsvSchema {
    pub probe_col: String,
    pub gallery_col: String,
    /// Used when present in the header; otherwise labels derive from ID
    /// equality.
    pub label_col: String,
    /// Explicit modality columns; `None` means every column not claimed
    /// above.
    pub modality_cols: Option<Vec<String>>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            probe_col: "probe_id".into(),
            gallery_col: "gallery_id".into(),
            label_col: "label".into(),
            modality_cols: None,
        }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn cell_is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t.eq_ignore_ascii_case("nan")
}

/// Load a score table. Empty cells and `NaN` become missing; rows whose
/// scores are all missing are rejected with their line number.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<ScoreDataset> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();

    let col = |name: &str| headers.iter().position(|h| h == name);
    let probe_idx = col(&schema.probe_col).ok_or_else(|| Error::Parse {
        line: 1,
        msg: format!("missing column `{}`", schema.probe_col),
    })?;
    let gallery_idx = col(&schema.gallery_col).ok_or_else(|| Error::Parse {
        line: 1,
        msg: format!("missing column `{}`", schema.gallery_col),
    })?;
    let label_idx = col(&schema.label_col);

    let modality_idx: Vec<(String, usize)> = match &schema.modality_cols {
        Some(names) => names
            .iter()
            .map(|n| {
                col(n)
                    .map(|i| (n.clone(), i))
                    .ok_or_else(|| Error::Parse {
                        line: 1,
                        msg: format!("missing modality column `{n}`"),
                    })
            })
            .collect::<Result<_>>()?,
        None => headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != probe_idx && *i != gallery_idx && Some(*i) != label_idx)
            .map(|(i, h)| (h.clone(), i))
            .collect(),
    };
    if modality_idx.len() < 2 {
        return Err(Error::Parse {
            line: 1,
            msg: format!(
                "need at least 2 modality columns, found {}",
                modality_idx.len()
            ),
        });
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<&str> {
            record.get(i).ok_or_else(|| Error::Parse {
                line,
                msg: format!("row has {} fields, expected {}", record.len(), headers.len()),
            })
        };

        let probe_id = field(probe_idx)?.to_string();
        let gallery_id = field(gallery_idx)?.to_string();
        let label = match label_idx {
            Some(i) => {
                let raw = field(i)?;
                Label::parse(raw).ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("bad label `{raw}` (expected genuine/imposter)"),
                })?
            }
            None => {
                if probe_id == gallery_id {
                    Label::Genuine
                } else {
                    Label::Imposter
                }
            }
        };

        let mut scores = Vec::with_capacity(modality_idx.len());
        for (name, i) in &modality_idx {
            let cell = field(*i)?;
            if cell_is_missing(cell) {
                scores.push(None);
            } else {
                let value: f64 = cell.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("non-numeric score `{cell}` in column `{name}`"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Parse {
                        line,
                        msg: format!("non-finite score `{cell}` in column `{name}`"),
                    });
                }
                scores.push(Some(value));
            }
        }
        if scores.iter().all(Option::is_none) {
            return Err(Error::AllMissingRow {
                line,
                probe_id,
                gallery_id,
            });
        }
        rows.push(ScoreVector {
            probe_id,
            gallery_id,
            label,
            scores,
        });
    }

    ScoreDataset::from_parts(
        modality_idx.into_iter().map(|(n, _)| n).collect(),
        rows,
        path.display().to_string(),
    )
}

/// Write a score table. Missing cells are written empty; observed scores use
/// the shortest decimal form that parses back to the same value, so a
/// save/load round trip is exact.
pub fn save_csv(dataset: &ScoreDataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));

    let mut header = vec!["probe_id".to_string(), "gallery_id".to_string(), "label".to_string()];
    header.extend(dataset.modalities().iter().cloned());
    writer
        .write_record(&header)
        .map_err(|e| io_err(path, std::io::Error::other(e)))?;

    for row in dataset.rows() {
        let mut record = vec![
            row.probe_id.clone(),
            row.gallery_id.clone(),
            row.label.as_str().to_string(),
        ];
        for slot in &row.scores {
            record.push(slot.map_or_else(String::new, |v| v.to_string()));
        }
        writer
            .write_record(&record)
            .map_err(|e| io_err(path, std::io::Error::other(e)))?;
    }
    writer.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

/// One fused comparison score, as exchanged between the `fuse` and
/// `evaluate` commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusedRow {
    pub probe_id: String,
    pub gallery_id: String,
    pub label: Label,
    pub fused: f64,
}

/// Write fused scores as `probe_id,gallery_id,label,fused`.
pub fn save_fused_csv(rows: &[FusedRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    writer
        .write_record(["probe_id", "gallery_id", "label", "fused"])
        .map_err(|e| io_err(path, std::io::Error::other(e)))?;
    for row in rows {
        writer
            .write_record([
                row.probe_id.as_str(),
                row.gallery_id.as_str(),
                row.label.as_str(),
                &row.fused.to_string(),
            ])
            .map_err(|e| io_err(path, std::io::Error::other(e)))?;
    }
    writer.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

pub fn load_fused_csv(path: &Path) -> Result<Vec<FusedRow>> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let mut rows = Vec::new();
    for record in reader.deserialize::<FusedRow>() {
        let row = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            msg: e.to_string(),
        })?;
        if !row.fused.is_finite() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("non-finite fused score for {} vs {}", row.probe_id, row.gallery_id),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Export an ROC curve as `threshold,fmr,tmr` for external plotting.
pub fn save_roc_csv(curve: &RocCurve, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "threshold,fmr,tmr").map_err(|e| io_err(path, e))?;
    for p in &curve.points {
        writeln!(out, "{},{},{}", p.threshold, p.fmr, p.tmr).map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}
