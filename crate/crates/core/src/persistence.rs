//! File formats: map JSON, ensemble CSV and run manifests.
//!
//! Floating-point columns are written with 17 significant digits in a fixed
//! layout, so equal data always produce identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::maps::RootedMap;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// `{:.16e}`, with non-finite values spelled `nan`, `inf`, `-inf`.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_f64(s: &str) -> Result<f64> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| Error::Schema(format!("bad number {s:?}"))),
    }
}

pub fn save_map(path: &Path, m: &RootedMap) -> Result<()> {
    write_file(path, &(m.to_json() + "\n"))
}

pub fn load_map(path: &Path) -> Result<RootedMap> {
    RootedMap::from_json(&read_file(path)?)
}

/// Weighted rows with named columns; the CSV header is
/// `replicate,weight,<columns…>`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleTable {
    pub columns: Vec<String>,
    pub weights: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl EnsembleTable {
    pub fn new(columns: &[&str]) -> Self {
        EnsembleTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            weights: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, weight: f64, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.weights.push(weight);
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("replicate,weight");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (r, (w, row)) in self.weights.iter().zip(&self.rows).enumerate() {
            write!(out, "{r},{}", format_f64(*w)).unwrap();
            for x in row {
                out.push(',');
                out.push_str(&format_f64(*x));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Schema("empty ensemble file".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 2 || cols[0] != "replicate" || cols[1] != "weight" {
            return Err(Error::Schema(format!("unexpected ensemble header {header:?}")));
        }
        let mut table = EnsembleTable::new(&cols[2..]);
        for (r, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols.len() {
                return Err(Error::Schema(format!("row {r} has {} fields, expected {}", fields.len(), cols.len())));
            }
            if fields[0].parse::<usize>().ok() != Some(r) {
                return Err(Error::Schema(format!("row {r} is labelled {:?}", fields[0])));
            }
            let w = parse_f64(fields[1])?;
            let row = fields[2..].iter().map(|f| parse_f64(f)).collect::<Result<Vec<f64>>>()?;
            table.push(w, row);
        }
        Ok(table)
    }
}

pub fn save_ensemble(path: &Path, t: &EnsembleTable) -> Result<()> {
    write_file(path, &t.to_csv())
}

pub fn load_ensemble(path: &Path) -> Result<EnsembleTable> {
    EnsembleTable::from_csv(&read_file(path)?)
}

/// What a run did and what it wrote.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    /// Arguments after the program name.
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    /// Output file name (relative to the manifest) to SHA-256 hex digest.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, argv: Vec<String>, seed: Option<u64>) -> Self {
        let now = unix_now();
        RunManifest {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            argv,
            seed,
            parameters: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").into(),
            started_unix: now,
            finished_unix: now,
            outputs: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters
            .insert(key.into(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    /// Records the digest of `dir/name`.
    pub fn record_output(&mut self, dir: &Path, name: &str) -> Result<()> {
        let digest = sha256_file(&dir.join(name))?;
        self.outputs.insert(name.into(), digest);
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, &(serde_json::to_string_pretty(self)? + "\n"))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => return Err(Error::Schema(format!("manifest schema {v} is not supported"))),
            None => return Err(Error::Schema("manifest has no schema_version".into())),
        }
        Ok(serde_json::from_value(value)?)
    }

    /// Compares the recorded digests with the files in `dir`.
    pub fn verify_outputs(&self, dir: &Path) -> Result<()> {
        for (name, expected) in &self.outputs {
            let actual = sha256_file(&dir.join(name))?;
            if &actual != expected {
                return Err(Error::DigestMismatch {
                    path: name.clone(),
                    expected: expected.clone(),
                    actual,
                });
            }
        }
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        write!(s, "{b:02x}").unwrap();
    }
    s
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(sha256_hex(&bytes))
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

/// `path` if it names a file, otherwise `path/manifest.json`.
pub fn manifest_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    }
}

pub fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = EnsembleTable::new(&["a", "b"]);
        t.push(1.0, vec![0.1, -2.5e-300]);
        t.push(0.0, vec![f64::NAN, 1.0 / 3.0]);
        let text = t.to_csv();
        let back = EnsembleTable::from_csv(&text).unwrap();
        assert_eq!(back.to_csv(), text);
        assert_eq!(back.rows[1][1], 1.0 / 3.0);
        assert!(EnsembleTable::from_csv("x,y\n").is_err());
    }

    #[test]
    fn digest_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_schema_checked() {
        let dir = std::env::temp_dir().join(format!("surplus-lab-manifest-{}", std::process::id()));
        let path = dir.join("m.json");
        let m = RunManifest::new("sample", vec!["sample".into()], Some(3));
        m.save(&path).unwrap();
        assert_eq!(RunManifest::load(&path).unwrap(), m);
        write_file(&path, "{\"schema_version\": 99}").unwrap();
        assert!(matches!(RunManifest::load(&path), Err(Error::Schema(_))));
        let _ = fs::remove_dir_all(&dir);
    }
}
