//! Dataset loaders (IDX, CIFAR-10 binary, numeric CSV) and the one-shot
//! statistics pipeline producing (n, r, m_hat, delta_hat).

use crate::estimators::{self, EvtMarginEstimate, LabeledDataset};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

/// Pixel handling applied on load.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PixelScale {
    /// Divide byte values by 255 into [0, 1].
    Unit,
    /// Keep raw byte values 0..255.
    Raw,
}

impl std::str::FromStr for PixelScale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(PixelScale::Unit),
            "raw" => Ok(PixelScale::Raw),
            other => Err(Error::InvalidSpec(format!("unknown scale {other}"))),
        }
    }
}

impl PixelScale {
    fn apply(self, byte: u8) -> f64 {
        match self {
            PixelScale::Unit => byte as f64 / 255.0,
            PixelScale::Raw => byte as f64,
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn be_u32(bytes: &[u8], offset: usize, path: &Path) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            needed: end,
            found: bytes.len(),
        });
    }
    Ok(u32::from_be_bytes(bytes[offset..end].try_into().unwrap()))
}

/// Reads an IDX image/label pair (the MNIST distribution format):
/// big-endian magic 0x00000803 for images, 0x00000801 for labels.
pub fn read_idx(images_path: &Path, labels_path: &Path, scale: PixelScale) -> Result<LabeledDataset> {
    let img = read_file(images_path)?;
    let magic = be_u32(&img, 0, images_path)?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::BadMagic {
            path: images_path.to_path_buf(),
            found: magic,
            expected: IDX_IMAGES_MAGIC,
        });
    }
    let count = be_u32(&img, 4, images_path)? as usize;
    let rows = be_u32(&img, 8, images_path)? as usize;
    let cols = be_u32(&img, 12, images_path)? as usize;
    let dim = rows * cols;
    let needed = 16 + count * dim;
    if img.len() < needed {
        return Err(Error::Truncated {
            path: images_path.to_path_buf(),
            needed,
            found: img.len(),
        });
    }

    let lab = read_file(labels_path)?;
    let magic = be_u32(&lab, 0, labels_path)?;
    if magic != IDX_LABELS_MAGIC {
        return Err(Error::BadMagic {
            path: labels_path.to_path_buf(),
            found: magic,
            expected: IDX_LABELS_MAGIC,
        });
    }
    let label_count = be_u32(&lab, 4, labels_path)? as usize;
    if label_count != count {
        return Err(Error::CountMismatch {
            images: count,
            labels: label_count,
        });
    }
    let needed = 8 + label_count;
    if lab.len() < needed {
        return Err(Error::Truncated {
            path: labels_path.to_path_buf(),
            needed,
            found: lab.len(),
        });
    }

    // flattened row-major pixels
    let vectors: Vec<Vec<f64>> = (0..count)
        .map(|i| {
            img[16 + i * dim..16 + (i + 1) * dim]
                .iter()
                .map(|&b| scale.apply(b))
                .collect()
        })
        .collect();
    let labels: Vec<usize> = lab[8..8 + count].iter().map(|&b| b as usize).collect();
    LabeledDataset::labeled(vectors, labels)
}

/// CIFAR-10 binary batches: each record is 1 label byte plus 3072 pixel
/// bytes. Multiple batch files concatenate in order.
pub fn read_cifar10_bin(paths: &[impl AsRef<Path>], scale: PixelScale) -> Result<LabeledDataset> {
    const RECORD: usize = 3073;
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let bytes = read_file(path)?;
        if bytes.is_empty() || bytes.len() % RECORD != 0 {
            return Err(Error::RecordSize {
                path: path.to_path_buf(),
                size: bytes.len() as u64,
                record: RECORD,
            });
        }
        for rec in bytes.chunks_exact(RECORD) {
            labels.push(rec[0] as usize);
            vectors.push(rec[1..].iter().map(|&b| scale.apply(b)).collect());
        }
    }
    LabeledDataset::labeled(vectors, labels)
}

/// Which CSV column holds the label.
#[derive(Clone, Debug)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

impl std::str::FromStr for LabelColumn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

/// Rectangular numeric CSV. A non-numeric first row is treated as a header.
/// With a label column, labels are remapped to contiguous ids in their
/// sorted order; without one the dataset is unlabeled (margins unavailable).
pub fn read_csv_matrix(path: &Path, label_column: Option<&LabelColumn>) -> Result<LabeledDataset> {
    let raw = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(raw.as_bytes());

    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        rows.push(rec.map_err(|e| Error::Csv {
            row: i + 1,
            message: e.to_string(),
        })?);
    }
    if rows.is_empty() {
        return Err(Error::Csv {
            row: 0,
            message: "empty file".into(),
        });
    }

    // header detection: any non-numeric cell in the first row
    let first_numeric = rows[0]
        .iter()
        .all(|cell| cell.trim().parse::<f64>().is_ok());
    let header: Option<Vec<String>> = if first_numeric {
        None
    } else {
        Some(rows[0].iter().map(|s| s.trim().to_string()).collect())
    };
    let data_rows = if header.is_some() { &rows[1..] } else { &rows[..] };
    if data_rows.is_empty() {
        return Err(Error::Csv {
            row: 1,
            message: "no data rows after header".into(),
        });
    }

    let width = data_rows[0].len();
    let label_idx: Option<usize> = match label_column {
        None => None,
        Some(LabelColumn::Index(i)) => {
            if *i >= width {
                return Err(Error::Csv {
                    row: 0,
                    message: format!("label column index {i} out of range (width {width})"),
                });
            }
            Some(*i)
        }
        Some(LabelColumn::Name(name)) => {
            let header = header.as_ref().ok_or_else(|| Error::Csv {
                row: 0,
                message: format!("label column '{name}' needs a header row"),
            })?;
            let idx = header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Csv {
                    row: 0,
                    message: format!("label column '{name}' not found in header"),
                })?;
            if idx >= width {
                return Err(Error::Csv {
                    row: 0,
                    message: format!(
                        "label column '{name}' (index {idx}) is outside the data width {width}"
                    ),
                });
            }
            Some(idx)
        }
    };

    let header_offset = if header.is_some() { 2 } else { 1 };
    let mut vectors = Vec::with_capacity(data_rows.len());
    let mut raw_labels: Vec<i64> = Vec::new();
    for (r, rec) in data_rows.iter().enumerate() {
        let row_no = r + header_offset;
        if rec.len() != width {
            return Err(Error::Csv {
                row: row_no,
                message: format!("ragged row: {} cells, expected {width}", rec.len()),
            });
        }
        let mut v = Vec::with_capacity(width - label_idx.map_or(0, |_| 1));
        for (c, cell) in rec.iter().enumerate() {
            let parsed = cell.trim().parse::<f64>().map_err(|_| Error::Csv {
                row: row_no,
                message: format!("non-numeric cell '{cell}' in column {c}"),
            })?;
            if Some(c) == label_idx {
                if parsed.fract() != 0.0 || parsed < 0.0 {
                    return Err(Error::Csv {
                        row: row_no,
                        message: format!("label '{cell}' is not a nonnegative integer"),
                    });
                }
                raw_labels.push(parsed as i64);
            } else {
                v.push(parsed);
            }
        }
        vectors.push(v);
    }

    match label_idx {
        None => LabeledDataset::unlabeled(vectors),
        Some(_) => {
            // remap distinct raw labels to contiguous [0, C)
            let mut distinct: Vec<i64> = raw_labels.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let labels: Vec<usize> = raw_labels
                .iter()
                .map(|l| distinct.binary_search(l).unwrap())
                .collect();
            LabeledDataset::labeled(vectors, labels)
        }
    }
}

/// How the margin should be obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    /// Exact scan when the cross-class pair count is at most 1e8, else EVT.
    Auto,
    Exact,
    Evt,
}

impl std::str::FromStr for DeltaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(DeltaMode::Auto),
            "exact" => Ok(DeltaMode::Exact),
            "evt" => Ok(DeltaMode::Evt),
            other => Err(Error::InvalidSpec(format!("unknown delta mode {other}"))),
        }
    }
}

/// Pair-count threshold above which `auto` switches from the exact margin
/// scan to tail extrapolation.
pub const EXACT_MARGIN_PAIR_LIMIT: u128 = 100_000_000;

/// Tail-estimation defaults (sampled pairs, order statistics, trials).
pub const EVT_DEFAULT_N_SUB: usize = 40_000;
pub const EVT_DEFAULT_K: usize = 200;
pub const EVT_DEFAULT_TRIALS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMethod {
    Exact,
    Evt,
}

/// Record of preprocessing applied before estimation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub pixel_scale: Option<PixelScale>,
    pub notes: Vec<String>,
}

/// One-shot dataset statistics: everything the difficulty formulas need.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n: usize,
    pub ambient_dim: usize,
    pub r: f64,
    pub m_hat: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta_method: Option<DeltaMethod>,
    pub scaling: ScalingRecord,
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub evt_detail: Option<EvtMarginEstimate>,
}

/// Runs the estimation pipeline: `r` from the max norm, `m_hat` from the
/// neighbor MLE, `delta_hat` exact or tail-extrapolated per `delta_mode`
/// (unlabeled data yields no margin and a flag).
pub fn dataset_stats(
    data: &LabeledDataset,
    delta_mode: DeltaMode,
    dim_k: usize,
    anchors: Option<usize>,
    seed: u64,
    scaling: ScalingRecord,
) -> Result<DatasetStats> {
    let r = estimators::max_norm_r(data.vectors());
    let mut flags = Vec::new();
    if r == 0.0 {
        flags.push("zero_radius: all vectors are zero; frequency cutoff M = 0".into());
    }
    let dim_est = estimators::intrinsic_dim_mle(data.vectors(), dim_k, anchors, seed)?;
    flags.extend(dim_est.warnings.iter().cloned());

    let mut delta_hat = None;
    let mut delta_method = None;
    let mut evt_detail = None;
    match data.cross_class_pairs() {
        None => flags.push("unlabeled: margin unavailable".into()),
        Some(pairs) => {
            let use_exact = match delta_mode {
                DeltaMode::Exact => true,
                DeltaMode::Evt => false,
                DeltaMode::Auto => pairs <= EXACT_MARGIN_PAIR_LIMIT,
            };
            if use_exact {
                let est = estimators::margin_exact(data)?;
                if est.zero_margin {
                    flags.push(
                        "zero_margin: coincident cross-class points; cutoff would be infinite"
                            .into(),
                    );
                }
                delta_hat = Some(est.delta);
                delta_method = Some(DeltaMethod::Exact);
            } else {
                let n_sub = EVT_DEFAULT_N_SUB.min(pairs.min(u128::from(u64::MAX)) as usize / 2)
                    .max(EVT_DEFAULT_K + 1);
                let est =
                    estimators::evt_margin(data, n_sub, EVT_DEFAULT_K, EVT_DEFAULT_TRIALS, seed)?;
                if est.evt_fallback {
                    flags.push("evt_fallback: gamma_hat <= 0 in at least one trial".into());
                }
                delta_hat = Some(est.delta_hat);
                delta_method = Some(DeltaMethod::Evt);
                evt_detail = Some(est);
            }
        }
    }

    Ok(DatasetStats {
        n: data.len(),
        ambient_dim: data.dim(),
        r,
        m_hat: dim_est.m_hat,
        delta_hat,
        delta_method,
        scaling,
        flags,
        evt_detail,
    })
}
