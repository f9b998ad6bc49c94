//! On-disk memo of evaluated values: `values.jsonl`, one entry per line.
//!
//! Floats are stored as `prec:significand_hex p exponent`, so a reload is
//! bit-identical. The file is rewritten through a temporary file and a
//! rename, so readers never see a half-written file.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::enclosure::Enclosure;
use crate::error::{Result, ZstarError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub mid_hex: String,
    pub rad_hex: String,
    pub created_at: u64,
}

/// `prefix|tail|precision|truncation`.
pub fn cache_key(prefix: &[u32], tail: &str, precision: u32, truncation: u64) -> String {
    let p: Vec<String> = prefix.iter().map(|d| d.to_string()).collect();
    format!("{}|{}|{}|{}", p.join(","), tail, precision, truncation)
}

pub fn encode_float(f: &Float) -> String {
    let prec = f.prec();
    if f.is_infinite() {
        return format!("{prec}:{}inf", if f.is_sign_negative() { "-" } else { "+" });
    }
    match f.to_integer_exp() {
        Some((m, e)) => format!("{prec}:{}p{}", m.to_string_radix(16), e),
        None => format!("{prec}:nan"),
    }
}

pub fn decode_float(s: &str) -> Result<Float> {
    let bad = || ZstarError::CorruptCache(format!("bad float encoding '{s}'"));
    let (prec, body) = s.split_once(':').ok_or_else(bad)?;
    let prec: u32 = prec.parse().map_err(|_| bad())?;
    if !(rug::float::prec_min()..=rug::float::prec_max()).contains(&prec) {
        return Err(bad());
    }
    match body {
        "+inf" => return Ok(Float::with_val(prec, rug::float::Special::Infinity)),
        "-inf" => return Ok(Float::with_val(prec, rug::float::Special::NegInfinity)),
        _ => {}
    }
    let (m, e) = body.split_once('p').ok_or_else(bad)?;
    let m = Integer::from_str_radix(m, 16).map_err(|_| bad())?;
    let e: i32 = e.parse().map_err(|_| bad())?;
    if m.significant_bits() > prec {
        return Err(bad());
    }
    Ok(Float::with_val(prec, m) << e)
}

pub fn encode(key: String, e: &Enclosure) -> CacheEntry {
    let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    CacheEntry {
        key,
        mid_hex: encode_float(e.mid()),
        rad_hex: encode_float(e.rad()),
        created_at,
    }
}

pub fn decode(entry: &CacheEntry) -> Result<Enclosure> {
    let mid = decode_float(&entry.mid_hex)?;
    let rad = decode_float(&entry.rad_hex)?;
    if rad.is_sign_negative() && !rad.is_zero() {
        return Err(ZstarError::CorruptCache("negative radius".into()));
    }
    let inf = mid.is_infinite();
    Ok(Enclosure::from_parts(mid, rad, inf))
}

pub struct Cache {
    path: PathBuf,
    entries: BTreeMap<String, CacheEntry>,
    /// Problems found while loading; each bad line is dropped.
    pub warnings: Vec<ZstarError>,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Cache> {
        let path = dir.join("values.jsonl");
        let mut cache = Cache {
            path,
            entries: BTreeMap::new(),
            warnings: vec![],
        };
        let text = match fs::read_to_string(&cache.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e.into()),
        };
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed: std::result::Result<CacheEntry, _> = serde_json::from_str(line);
            match parsed
                .map_err(|e| e.to_string())
                .and_then(|en| decode(&en).map(|_| en).map_err(|e| e.to_string()))
            {
                Ok(en) => {
                    cache.entries.insert(en.key.clone(), en);
                }
                Err(msg) => cache
                    .warnings
                    .push(ZstarError::CorruptCache(format!("line {}: {msg}", i + 1))),
            }
        }
        Ok(cache)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<Enclosure> {
        self.entries.get(key).and_then(|e| decode(e).ok())
    }

    /// Adds an entry and rewrites the file.
    pub fn put(&mut self, key: String, value: &Enclosure) -> Result<()> {
        let entry = encode(key, value);
        self.entries.insert(entry.key.clone(), entry);
        self.flush()
    }

    fn flush(&self) -> Result<()> {
        let dir = self.path.parent().unwrap_or(Path::new("."));
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".values.jsonl.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            for e in self.entries.values() {
                let line = serde_json::to_string(e).map_err(|e| ZstarError::Io(e.to_string()))?;
                writeln!(f, "{line}")?;
            }
            f.sync_all()?;
        }
        fs::rename(&tmp, &self.path)?;
        Ok(())
    }

    pub fn clear(&mut self) -> Result<()> {
        self.entries.clear();
        match fs::remove_file(&self.path) {
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(e.into()),
            _ => Ok(()),
        }
    }
}
