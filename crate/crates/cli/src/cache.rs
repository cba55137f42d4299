//! Persistent store of per-n orbit records.
//!
//! Everything numeric is kept as a decimal string; command output is always
//! rendered from an entry, so a cached and a fresh run print the same bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};
use sm_core::num::{digits_for_bits, float_to_decimal, parse_float};
use sm_core::recognize::OrbitRecord;
use sm_core::{AppComplex, Error, Result};

pub const CACHE_VERSION: u32 = 1;

const RESIDUAL_DIGITS: usize = 6;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CacheFile {
    pub version: u32,
    pub entries: Vec<CacheEntry>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CacheEntry {
    pub n: u64,
    pub working_bits: u32,
    pub achieved_bits: u32,
    pub created_unix: u64,
    pub discriminant: String,
    pub forms: Vec<[i64; 3]>,
    pub pn: String,
    pub scaled_poly: Vec<String>,
    pub trace_residual: String,
    pub poly_residual: String,
    pub p_values: Vec<[String; 2]>,
}

impl CacheEntry {
    pub fn from_record(rec: &OrbitRecord, working_bits: u32) -> Result<Self> {
        let digits = digits_for_bits(rec.achieved_bits);
        let forms = rec
            .forms
            .iter()
            .map(|q| {
                q.to_i64_triple()
                    .map(|(a, b, c)| [a, b, c])
                    .ok_or(Error::Overflow("form coefficients"))
            })
            .collect::<Result<_>>()?;
        Ok(CacheEntry {
            n: rec.n,
            working_bits,
            achieved_bits: rec.achieved_bits,
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            discriminant: rec.discriminant.to_string(),
            forms,
            pn: rec.pn.to_string(),
            scaled_poly: rec.scaled_poly.iter().map(|c| c.to_string()).collect(),
            trace_residual: float_to_decimal(&rec.trace_residual, RESIDUAL_DIGITS),
            poly_residual: float_to_decimal(&rec.poly_residual, RESIDUAL_DIGITS),
            p_values: rec
                .p_values
                .iter()
                .map(|v| {
                    let (re, im) = v.to_decimal_pair(digits);
                    [re, im]
                })
                .collect(),
        })
    }

    /// Precision at which the stored decimals are read back.
    pub fn read_bits(&self) -> u32 {
        self.achieved_bits.max(self.working_bits) + 32
    }

    pub fn p_values(&self) -> Result<Vec<AppComplex>> {
        let prec = self.read_bits();
        self.p_values
            .iter()
            .map(|[re, im]| Ok(AppComplex::new(parse_float(re, prec)?, parse_float(im, prec)?)))
            .collect()
    }

    pub fn max_residual(&self) -> Result<Float> {
        let a = parse_float(&self.trace_residual, 64)?;
        let b = parse_float(&self.poly_residual, 64)?;
        Ok(a.max(&b))
    }

    pub fn pn(&self) -> Result<Integer> {
        Integer::parse(&self.pn)
            .map(Integer::from)
            .map_err(|e| Error::Parse(format!("cached p(n): {e}")))
    }
}

#[derive(Debug)]
pub struct Cache {
    path: Option<PathBuf>,
    file: CacheFile,
    /// Set when an unreadable file was found; the file is then left untouched.
    pub warning: Option<String>,
}

impl Cache {
    pub fn disabled() -> Self {
        Cache {
            path: None,
            file: CacheFile { version: CACHE_VERSION, entries: vec![] },
            warning: None,
        }
    }

    /// A missing file is an empty cache; a malformed one or a version mismatch is bypassed.
    pub fn open(path: &Path) -> Self {
        let empty = CacheFile { version: CACHE_VERSION, entries: vec![] };
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Cache { path: Some(path.to_path_buf()), file: empty, warning: None };
            }
            Err(e) => return Self::bypassed(format!("cache {} unreadable: {e}", path.display())),
        };
        match serde_json::from_str::<CacheFile>(&text) {
            Ok(f) if f.version == CACHE_VERSION => Cache { path: Some(path.to_path_buf()), file: f, warning: None },
            Ok(f) => Self::bypassed(format!(
                "cache {} has version {}, expected {CACHE_VERSION}; ignored",
                path.display(),
                f.version
            )),
            Err(e) => Self::bypassed(format!("cache {} is malformed ({e}); ignored", path.display())),
        }
    }

    fn bypassed(warning: String) -> Self {
        Cache { warning: Some(warning), ..Self::disabled() }
    }

    pub fn is_active(&self) -> bool {
        self.path.is_some()
    }

    pub fn entries(&self) -> &[CacheEntry] {
        &self.file.entries
    }

    /// The highest-precision entry for n computed at no fewer than `working_bits` bits.
    pub fn lookup(&self, n: u64, working_bits: u32) -> Option<&CacheEntry> {
        self.file
            .entries
            .iter()
            .filter(|e| e.n == n && e.working_bits >= working_bits)
            .max_by_key(|e| e.working_bits)
    }

    pub fn store(&mut self, entry: CacheEntry) -> Result<()> {
        let Some(path) = self.path.clone() else {
            return Ok(());
        };
        let entries = &mut self.file.entries;
        entries.retain(|e| !(e.n == entry.n && e.working_bits == entry.working_bits));
        entries.push(entry);
        entries.sort_by_key(|e| (e.n, e.working_bits));
        write_atomic(&path, &self.file)
    }

    pub fn clear(&mut self) -> Result<bool> {
        self.file.entries.clear();
        match &self.path {
            Some(p) if p.exists() => {
                fs::remove_file(p).map_err(|e| io_error(p, e))?;
                Ok(true)
            }
            _ => Ok(false),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("cache {}: {e}", path.display()))
}

/// Write-temp-then-rename in the target directory.
fn write_atomic(path: &Path, file: &CacheFile) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let text = render(file);
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(text.as_bytes()).map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

/// Canonical text of a cache file.
pub fn render(file: &CacheFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("cache serializes");
    s.push('\n');
    s
}
