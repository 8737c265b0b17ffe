//! One file per fingerprint.
//!
//! ```text
//! # mbcl-cache format 1
//! # fingerprint = <sha256 hex>
//! # param n = 10
//! # param c = 7/3
//! ...
//! record = N,c,C,alpha1,alpha2,alpha3,beta1,beta2,breakdown,fingerprint
//! width_over_dx = 2.1
//! ```
//!
//! Files are written to a temporary name and renamed into place. A file
//! that fails validation is renamed with a `.bad` suffix and treated as a
//! miss.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use log::warn;

use crate::correlation::{CorrelationRecord, Fingerprint, Tridiag3};
use crate::error::{Error, Result};
use crate::number::Exact;
use crate::pipeline::fingerprint_of;

const MAGIC: &str = "# mbcl-cache format 1";

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Cache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, fp: &Fingerprint) -> PathBuf {
        self.dir.join(format!("{fp}.rec"))
    }

    /// Cached record for `params`, or `None` on a miss. Corrupt entries are
    /// quarantined.
    pub fn load(&self, params: &[(String, String)]) -> Option<CorrelationRecord> {
        let fp = fingerprint_of(params);
        let path = self.path_for(&fp);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(_) => return None,
        };
        match parse_entry(&text, &fp, params) {
            Ok(rec) => Some(rec),
            Err(reason) => {
                let err = Error::CacheCorrupt { path: path.clone(), reason };
                warn!("{err}; recomputing");
                let mut bad = path.clone().into_os_string();
                bad.push(".bad");
                if let Err(e) = fs::rename(&path, &bad) {
                    warn!("could not quarantine {}: {e}", path.display());
                }
                None
            }
        }
    }

    pub fn store(&self, record: &CorrelationRecord, params: &[(String, String)]) -> Result<PathBuf> {
        let fp = fingerprint_of(params);
        let path = self.path_for(&fp);
        let mut text = format!("{MAGIC}\n# fingerprint = {fp}\n");
        for (k, v) in params {
            text.push_str(&format!("# param {k} = {v}\n"));
        }
        text.push_str(&format!("record = {}\n", record.csv_row()));
        text.push_str(&format!("width_over_dx = {}\n", record.barrier_width_over_dx));

        let tmp = self.dir.join(format!(
            ".{fp}.{}.{}.tmp",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }
}

fn parse_entry(
    text: &str,
    expected_fp: &Fingerprint,
    expected_params: &[(String, String)],
) -> std::result::Result<CorrelationRecord, String> {
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err("missing or unknown format header".into());
    }
    let mut fp_line = None;
    let mut params = Vec::new();
    let mut record_line = None;
    let mut width = None;
    for line in lines {
        if let Some(rest) = line.strip_prefix("# fingerprint = ") {
            fp_line = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("# param ") {
            let (k, v) = rest.split_once(" = ").ok_or("malformed param line")?;
            params.push((k.to_string(), v.to_string()));
        } else if let Some(rest) = line.strip_prefix("record = ") {
            record_line = Some(rest.to_string());
        } else if let Some(rest) = line.strip_prefix("width_over_dx = ") {
            width = Some(rest.trim().parse::<f64>().map_err(|e| e.to_string())?);
        } else if !line.trim().is_empty() {
            return Err(format!("unexpected line {line:?}"));
        }
    }
    if fp_line.as_deref() != Some(expected_fp.0.as_str()) {
        return Err("fingerprint header does not match file name".into());
    }
    if fingerprint_of(&params) != *expected_fp {
        return Err("parameters do not hash to the fingerprint".into());
    }
    if params != expected_params {
        return Err("parameters differ from the requested task".into());
    }
    let record = parse_record_row(record_line.as_deref().ok_or("missing record line")?, width.ok_or("missing width line")?)?;
    if record.fingerprint != *expected_fp {
        return Err("record fingerprint mismatch".into());
    }
    Ok(record)
}

/// Inverse of [`CorrelationRecord::csv_row`].
pub fn parse_record_row(row: &str, width_over_dx: f64) -> std::result::Result<CorrelationRecord, String> {
    let cols: Vec<&str> = row.split(',').collect();
    if cols.len() != 10 {
        return Err(format!("expected 10 columns, got {}", cols.len()));
    }
    let num = |i: usize| cols[i].parse::<f64>().map_err(|e| format!("column {i}: {e}"));
    let n_barriers: usize = cols[0].parse().map_err(|e| format!("N: {e}"))?;
    let c: Exact = cols[1].parse().map_err(|e: Error| e.to_string())?;
    let c_value = num(2)?;
    let alpha = [num(3)?, num(4)?, num(5)?];
    let beta = [num(6)?, num(7)?];
    let breakdown: bool = cols[8].parse().map_err(|e| format!("breakdown: {e}"))?;
    if c_value.to_bits() != alpha[2].to_bits() {
        return Err("C differs from alpha3".into());
    }
    let order = match (breakdown, beta[0] == 0.0) {
        (false, _) => 3,
        (true, true) => 1,
        (true, false) => 2,
    };
    Ok(CorrelationRecord {
        n_barriers,
        c,
        matrix: Tridiag3 { alpha, beta, order },
        fingerprint: Fingerprint(cols[9].to_string()),
        barrier_width_over_dx: width_over_dx,
    })
}
