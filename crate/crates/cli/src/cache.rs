//! On-disk records in a canonical text format.
//!
//! A record is a header followed by `---` and the payload:
//!
//! ```text
//! l2residue-cache v1
//! kind blocks
//! fingerprint <sha256 of the root system>
//! key j=2;lambda1=-1,4,-1,-1,-1,-1
//! payload-sha256 <hex>
//! ---
//! ...
//! ```
//!
//! Records from another format version are ignored. Records that fail any
//! other check are moved to `quarantine/` and reported on stderr.

use std::fs;
use std::path::{Path, PathBuf};

use l2residue::cfactor::FactorKey;
use l2residue::constantterm::{InversionClass, MuBlock};
use l2residue::RootSystem;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MAGIC: &str = "l2residue-cache v";
pub const FORMAT_VERSION: u32 = 1;
const QUARANTINE: &str = "quarantine";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Blocks,
    Factors,
    Results,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::Blocks, Kind::Factors, Kind::Results];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Blocks => "blocks",
            Kind::Factors => "factors",
            Kind::Results => "results",
        }
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// Identifies the root datum a record was computed for.
pub fn fingerprint(rs: &RootSystem) -> String {
    let mut text = format!("{}\n", rs.type_label);
    for row in &rs.cartan_matrix {
        let cells: Vec<String> = row.iter().map(i64::to_string).collect();
        text.push_str(&cells.join(" "));
        text.push('\n');
    }
    sha256_hex(text.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordInfo {
    pub kind: Kind,
    pub key: String,
    pub bytes: u64,
}

/// Why a stored record was not used.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Rejection {
    OtherVersion(String),
    Corrupt(String),
}

struct Parsed {
    kind: String,
    fingerprint: String,
    key: String,
    payload: String,
}

fn parse_record(text: &str) -> Result<Parsed, Rejection> {
    let corrupt = |m: &str| Rejection::Corrupt(m.to_string());
    let (head, payload) = text.split_once("\n---\n").ok_or_else(|| corrupt("missing header separator"))?;
    let mut lines = head.lines();
    let magic = lines.next().unwrap_or("");
    let version = magic.strip_prefix(MAGIC).ok_or_else(|| corrupt("bad magic line"))?;
    if version != FORMAT_VERSION.to_string() {
        return Err(Rejection::OtherVersion(version.to_string()));
    }
    let mut field = |name: &str| -> Result<String, Rejection> {
        lines
            .next()
            .and_then(|l| l.strip_prefix(name))
            .and_then(|l| l.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| Rejection::Corrupt(format!("missing {name} field")))
    };
    let kind = field("kind")?;
    let fingerprint = field("fingerprint")?;
    let key = field("key")?;
    let digest = field("payload-sha256")?;
    if sha256_hex(payload.as_bytes()) != digest {
        return Err(corrupt("payload checksum mismatch"));
    }
    Ok(Parsed { kind, fingerprint, key, payload: payload.to_string() })
}

#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn open(root: &Path) -> Result<Cache, CliError> {
        for k in Kind::ALL {
            let d = root.join(k.name());
            fs::create_dir_all(&d).map_err(|e| CliError::io(&d, e))?;
        }
        Ok(Cache { root: root.to_path_buf() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, kind: Kind, fingerprint: &str, key: &str) -> PathBuf {
        let name = sha256_hex(format!("{fingerprint}\n{key}").as_bytes());
        self.root.join(kind.name()).join(format!("{}.rec", &name[..32]))
    }

    fn quarantine(&self, path: &Path, reason: &str) {
        let dir = self.root.join(QUARANTINE);
        let target = dir.join(path.file_name().unwrap_or_default());
        let moved = fs::create_dir_all(&dir).and_then(|_| fs::rename(path, &target));
        match moved {
            Ok(()) => eprintln!("cache: quarantined corrupt record {} ({reason})", target.display()),
            Err(e) => eprintln!("cache: corrupt record {} ({reason}); could not quarantine: {e}", path.display()),
        }
    }

    fn check(&self, path: &Path, kind: Kind) -> Option<Parsed> {
        let text = match fs::read(path) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(t) => t,
                Err(_) => {
                    self.quarantine(path, "not utf-8");
                    return None;
                }
            },
            Err(_) => return None,
        };
        match parse_record(&text) {
            Ok(p) if p.kind == kind.name() => Some(p),
            Ok(p) => {
                self.quarantine(path, &format!("kind {} stored under {}", p.kind, kind.name()));
                None
            }
            Err(Rejection::OtherVersion(v)) => {
                eprintln!("cache: ignoring record {} from format version {v}", path.display());
                None
            }
            Err(Rejection::Corrupt(reason)) => {
                self.quarantine(path, &reason);
                None
            }
        }
    }

    /// The payload stored under `key`, if a valid record exists.
    pub fn load(&self, kind: Kind, fingerprint: &str, key: &str) -> Option<String> {
        let path = self.path(kind, fingerprint, key);
        if !path.exists() {
            return None;
        }
        let p = self.check(&path, kind)?;
        if p.fingerprint != fingerprint || p.key != key {
            self.quarantine(&path, "header does not match its file name");
            return None;
        }
        Some(p.payload)
    }

    /// Quarantines a record whose payload could not be used.
    pub fn discard(&self, kind: Kind, fingerprint: &str, key: &str, reason: &str) {
        let path = self.path(kind, fingerprint, key);
        if path.exists() {
            self.quarantine(&path, reason);
        }
    }

    pub fn store(&self, kind: Kind, fingerprint: &str, key: &str, payload: &str) -> Result<(), CliError> {
        let path = self.path(kind, fingerprint, key);
        let text = format!(
            "{MAGIC}{FORMAT_VERSION}\nkind {}\nfingerprint {fingerprint}\nkey {key}\npayload-sha256 {}\n---\n{payload}",
            kind.name(),
            sha256_hex(payload.as_bytes())
        );
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, text).map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))
    }

    /// Valid records, sorted by kind and key. Corrupt ones are quarantined.
    pub fn list(&self) -> Result<Vec<RecordInfo>, CliError> {
        let mut out = Vec::new();
        for kind in Kind::ALL {
            let dir = self.root.join(kind.name());
            let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|e| CliError::io(&dir, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "rec"))
                .collect();
            paths.sort();
            for path in paths {
                if let Some(p) = self.check(&path, kind) {
                    let bytes = fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
                    out.push(RecordInfo { kind, key: p.key, bytes });
                }
            }
        }
        out.sort_by(|a, b| (a.kind.name(), &a.key).cmp(&(b.kind.name(), &b.key)));
        Ok(out)
    }

    pub fn quarantined(&self) -> usize {
        fs::read_dir(self.root.join(QUARANTINE)).map(|d| d.count()).unwrap_or(0)
    }

    /// Removes every record, including quarantined ones. Returns the count.
    pub fn clear(&self) -> Result<usize, CliError> {
        let mut removed = 0;
        for name in Kind::ALL.iter().map(|k| k.name()).chain([QUARANTINE]) {
            let dir = self.root.join(name);
            let Ok(entries) = fs::read_dir(&dir) else { continue };
            for e in entries.flatten() {
                let p = e.path();
                if p.is_file() {
                    fs::remove_file(&p).map_err(|err| CliError::io(&p, err))?;
                    removed += 1;
                }
            }
        }
        Ok(removed)
    }
}

fn join_ints(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    parts.join(",")
}

fn split_ints(s: &str) -> Option<Vec<i64>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|x| x.parse().ok()).collect()
}

/// Text form of a line's blocks.
///
/// ```text
/// block <mu> <region> <eps power> <class count>
/// class <k>:<t>^<mult> ... | <member count>
/// w <w lambda2>
/// ```
pub fn encode_blocks(blocks: &[MuBlock]) -> String {
    let mut s = format!("blocks {}\n", blocks.len());
    for b in blocks {
        s.push_str(&format!("block {} {} {} {}\n", join_ints(&b.mu), b.region, b.eps_power, b.classes.len()));
        for c in &b.classes {
            let f: Vec<String> = c.factors.iter().map(|(k, m)| format!("{}:{}^{m}", k.k, k.t)).collect();
            s.push_str(&format!("class {} | {}\n", f.join(" "), c.members.len()));
            for w in &c.members {
                s.push_str(&format!("w {}\n", join_ints(w)));
            }
        }
    }
    s
}

fn parse_factor(f: &str) -> Option<(FactorKey, u32)> {
    let (kt, m) = f.split_once('^')?;
    let (k, t) = kt.split_once(':')?;
    Some((FactorKey::new(k.parse().ok()?, t.parse().ok()?), m.parse().ok()?))
}

pub fn decode_blocks(text: &str) -> Option<Vec<MuBlock>> {
    let mut lines = text.lines();
    let n: usize = lines.next()?.strip_prefix("blocks ")?.parse().ok()?;
    let mut blocks = Vec::with_capacity(n);
    for _ in 0..n {
        let f: Vec<&str> = lines.next()?.strip_prefix("block ")?.split(' ').collect();
        if f.len() != 4 {
            return None;
        }
        let mu = split_ints(f[0])?;
        let region = f[1].parse().ok()?;
        let eps_power = f[2].parse().ok()?;
        let nclasses: usize = f[3].parse().ok()?;
        let mut classes = Vec::with_capacity(nclasses);
        for _ in 0..nclasses {
            let (facs, count) = lines.next()?.strip_prefix("class ")?.split_once(" | ")?;
            let factors = if facs.is_empty() {
                Vec::new()
            } else {
                facs.split(' ').map(parse_factor).collect::<Option<Vec<_>>>()?
            };
            let count: usize = count.parse().ok()?;
            let members = (0..count)
                .map(|_| lines.next().and_then(|l| l.strip_prefix("w ")).and_then(split_ints))
                .map(|w| w.filter(|w| w.len() == mu.len()))
                .collect::<Option<Vec<_>>>()?;
            classes.push(InversionClass { factors, members });
        }
        blocks.push(MuBlock { mu, region, eps_power, classes });
    }
    lines.next().is_none().then_some(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use l2residue::constantterm::{build_blocks, LineAnalysis};
    use l2residue::orbits::{entry_line, find_entry};
    use l2residue::TypeLabel;

    #[test]
    fn blocks_round_trip() {
        let rs = RootSystem::new(TypeLabel::F4);
        let entry = find_entry(TypeLabel::F4, "0020").unwrap();
        let ctx = LineAnalysis::new(&rs, entry_line(&rs, &entry).unwrap(), 4).unwrap();
        let blocks = build_blocks(&ctx).unwrap();
        let text = encode_blocks(&blocks);
        assert_eq!(decode_blocks(&text).unwrap(), blocks);
        assert!(decode_blocks(&text[..text.len() - 3]).is_none());
    }

    #[test]
    fn records_validate() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        cache.store(Kind::Results, "fp", "k1", "hello\n").unwrap();
        assert_eq!(cache.load(Kind::Results, "fp", "k1").as_deref(), Some("hello\n"));
        assert_eq!(cache.load(Kind::Results, "other", "k1"), None);

        let path = cache.path(Kind::Results, "fp", "k1");
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replace("hello", "hellO")).unwrap();
        assert_eq!(cache.load(Kind::Results, "fp", "k1"), None);
        assert!(!path.exists());
        assert_eq!(cache.quarantined(), 1);

        cache.store(Kind::Results, "fp", "k2", "x").unwrap();
        let p2 = cache.path(Kind::Results, "fp", "k2");
        let t2 = fs::read_to_string(&p2).unwrap();
        fs::write(&p2, t2.replace("cache v1", "cache v0")).unwrap();
        assert_eq!(cache.load(Kind::Results, "fp", "k2"), None);
        assert!(p2.exists());
        assert_eq!(cache.clear().unwrap(), 2);
    }
}
