//! Persistent Bessel-zero cache: a versioned JSON file seeding the
//! in-process zero tables. The cache is advisory; anything malformed is
//! silently ignored and rebuilt on save.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format_version: u32,
    entries: Vec<CacheEntry>,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    nu: f64,
    n: usize,
    zero: f64,
}

/// Seeds the in-process tables from `path`. Corrupt or mismatched files
/// are ignored.
pub fn load(path: &Path) {
    let Ok(text) = fs::read_to_string(path) else { return };
    let Ok(file) = serde_json::from_str::<CacheFile>(&text) else { return };
    if file.format_version != FORMAT_VERSION {
        return;
    }
    let mut by_nu: BTreeMap<u64, Vec<(usize, f64)>> = BTreeMap::new();
    for e in file.entries {
        if e.nu.is_finite() && e.n >= 1 {
            by_nu.entry(e.nu.to_bits()).or_default().push((e.n, e.zero));
        }
    }
    for (bits, mut list) in by_nu {
        list.sort_by_key(|(n, _)| *n);
        // contiguous prefix starting at n = 1
        let mut zeros = Vec::with_capacity(list.len());
        for (i, (n, z)) in list.into_iter().enumerate() {
            if n != i + 1 {
                break;
            }
            zeros.push(z);
        }
        if !zeros.is_empty() {
            debranges::specialfn::seed_zero_cache(f64::from_bits(bits), &zeros);
        }
    }
}

/// Writes the current tables to `path` atomically (temp file + rename).
pub fn save(path: &Path) -> io::Result<()> {
    let mut snapshot = debranges::specialfn::zero_cache_snapshot();
    snapshot.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut entries = Vec::new();
    for (nu, zeros) in snapshot {
        for (i, z) in zeros.into_iter().enumerate() {
            entries.push(CacheEntry { nu, n: i + 1, zero: z });
        }
    }
    let file = CacheFile { format_version: FORMAT_VERSION, entries };
    let text = serde_json::to_string(&file).expect("cache serialization cannot fail");
    let tmp = path.with_extension("tmp");
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}
