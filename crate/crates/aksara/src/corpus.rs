//! Manifest-driven corpus ingestion and the shingle cache.
//!
//! A manifest is a JSON file:
//!
//! ```json
//! {
//!   "name": "sample",
//!   "normalize": ["strip-avagraha", "degeminate"],
//!   "documents": [
//!     { "id": "JEd", "path": "texts/jed.txt", "title": "…", "language": "Sanskrit",
//!       "century": 10, "notes": "…", "group": "north" }
//!   ]
//! }
//! ```
//!
//! `path` is relative to the manifest. `normalize` is optional and defaults to
//! every rule except `merge-b-v`. Each witness is its own record.
//!
//! The on-disk cache holds one directory per parameter bundle,
//! `<cache>/<bundle-hash>/<id>.shingles`, each file listing the sorted keys of
//! one document with the positions they were read from.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use aksara_core::scanner::tokenize_aksaras;
use aksara_core::{
    shingle_text, NormalizationProfile, ShingleParams, ShingleSet, TokenStream, Unit,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub id: String,
    pub path: PathBuf,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub language: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub century: Option<i32>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
    /// Display group for the explorer; falls back to `language`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

impl DocumentRecord {
    pub fn display_group(&self) -> Option<&str> {
        self.group
            .as_deref()
            .or((!self.language.is_empty()).then_some(self.language.as_str()))
    }
}

#[derive(Debug, Deserialize)]
struct RawManifest {
    #[serde(default)]
    name: String,
    #[serde(default)]
    normalize: Option<NormalizationProfile>,
    documents: Vec<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestWarning {
    pub id: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Document {
    pub record: DocumentRecord,
    pub text: String,
    /// Un-normalized akṣaras, read once at ingest.
    pub stream: TokenStream,
    pub source_hash: String,
}

type CacheKey = (String, ShingleParams, NormalizationProfile);

/// Documents are immutable after load; only the shingle cache fills in.
#[derive(Debug)]
pub struct CorpusIndex {
    pub name: String,
    pub profile: NormalizationProfile,
    documents: Vec<Document>,
    warnings: Vec<IngestWarning>,
    cache: RwLock<HashMap<CacheKey, Arc<ShingleSet>>>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

impl CorpusIndex {
    /// Reads the manifest and every document it lists. Unreadable or
    /// malformed entries are skipped with a warning.
    pub fn ingest(manifest_path: impl AsRef<Path>) -> Result<Self> {
        let manifest_path = manifest_path.as_ref();
        let raw = fs::read_to_string(manifest_path).map_err(|source| Error::ManifestIo {
            path: manifest_path.to_path_buf(),
            source,
        })?;
        let manifest: RawManifest =
            serde_json::from_str(&raw).map_err(|source| Error::ManifestParse {
                path: manifest_path.to_path_buf(),
                source,
            })?;
        let root = manifest_path.parent().unwrap_or(Path::new("."));

        let mut warnings = Vec::new();
        let mut loaded = Vec::new();
        for (position, entry) in manifest.documents.into_iter().enumerate() {
            let id = entry.get("id").and_then(|v| v.as_str()).map(String::from);
            let record: DocumentRecord = match serde_json::from_value(entry) {
                Ok(r) => r,
                Err(e) => {
                    warnings.push(IngestWarning {
                        id,
                        message: format!("entry {position} is malformed: {e}"),
                    });
                    continue;
                }
            };
            let path = root.join(&record.path);
            match fs::read_to_string(&path) {
                Ok(text) => loaded.push((record, text)),
                Err(e) => warnings.push(IngestWarning {
                    id: Some(record.id.clone()),
                    message: format!("cannot read {}: {e}", path.display()),
                }),
            }
        }

        let mut index = Self::from_texts(
            manifest.name,
            manifest.normalize.unwrap_or_default(),
            loaded,
        );
        warnings.append(&mut index.warnings);
        index.warnings = warnings;
        Ok(index)
    }

    /// Builds an index from in-memory texts.
    pub fn from_texts(
        name: impl Into<String>,
        profile: NormalizationProfile,
        texts: impl IntoIterator<Item = (DocumentRecord, String)>,
    ) -> Self {
        let mut warnings = Vec::new();
        let mut documents: Vec<Document> = Vec::new();
        for (record, text) in texts {
            if !valid_id(&record.id) {
                warnings.push(IngestWarning {
                    id: Some(record.id.clone()),
                    message: "ids may only use ASCII letters, digits, '-', '_' and '.'".into(),
                });
                continue;
            }
            if documents.iter().any(|d| d.record.id == record.id) {
                warnings.push(IngestWarning {
                    id: Some(record.id.clone()),
                    message: "duplicate id; later entry skipped".into(),
                });
                continue;
            }
            documents.push(Document {
                stream: tokenize_aksaras(&record.id, &text),
                source_hash: sha256_hex(text.as_bytes()),
                record,
                text,
            });
        }
        CorpusIndex {
            name: name.into(),
            profile,
            documents,
            warnings,
            cache: RwLock::default(),
        }
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn warnings(&self) -> &[IngestWarning] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn document(&self, id: &str) -> Result<&Document> {
        self.documents
            .iter()
            .find(|d| d.record.id == id)
            .ok_or_else(|| Error::UnknownDocument(id.into()))
    }

    fn cache_key(id: &str, params: &ShingleParams, profile: &NormalizationProfile) -> CacheKey {
        // character shingles never see the normalizer
        let profile = match params.unit {
            Unit::Aksara => profile.clone(),
            Unit::Character => NormalizationProfile::none(),
        };
        (id.into(), *params, profile)
    }

    /// Shingle set of one document, computed on first use.
    pub fn shingles(
        &self,
        id: &str,
        params: &ShingleParams,
        profile: &NormalizationProfile,
    ) -> Result<Arc<ShingleSet>> {
        let doc = self.document(id)?;
        let key = Self::cache_key(id, params, profile);
        if let Some(hit) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let fresh = Arc::new(shingle_text(id, &doc.text, params, profile));
        let mut cache = self.cache.write().expect("cache lock");
        Ok(Arc::clone(cache.entry(key).or_insert(fresh)))
    }

    pub fn is_cached(
        &self,
        id: &str,
        params: &ShingleParams,
        profile: &NormalizationProfile,
    ) -> bool {
        let key = Self::cache_key(id, params, profile);
        self.cache.read().expect("cache lock").contains_key(&key)
    }

    pub fn cached_len(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    /// Writes every document's shingles for each bundle under `dir`.
    pub fn precompute(
        &self,
        dir: impl AsRef<Path>,
        bundles: &[(ShingleParams, NormalizationProfile)],
    ) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        for (params, profile) in bundles {
            let bundle_dir = dir.as_ref().join(bundle_hash(params, profile));
            fs::create_dir_all(&bundle_dir).map_err(|e| Error::io(&bundle_dir, e))?;
            let about = bundle_dir.join("bundle.txt");
            let profile = Self::cache_key("", params, profile).2;
            fs::write(&about, format!("params {params}\nprofile {profile}\n"))
                .map_err(|e| Error::io(&about, e))?;
            for doc in &self.documents {
                let set = self.shingles(&doc.record.id, params, &profile)?;
                let path = bundle_dir.join(format!("{}.shingles", doc.record.id));
                fs::write(&path, encode_shingles(&set, &doc.source_hash))
                    .map_err(|e| Error::io(&path, e))?;
                written.push(path);
            }
        }
        Ok(written)
    }

    /// Loads every cache file under `dir` whose document still has the same
    /// source text. Files for unknown ids or changed texts are skipped.
    pub fn load_cache(&self, dir: impl AsRef<Path>) -> Result<CacheLoad> {
        let dir = dir.as_ref();
        let mut stats = CacheLoad::default();
        let mut bundles: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        bundles.sort();
        for bundle in bundles {
            let mut files: Vec<PathBuf> = fs::read_dir(&bundle)
                .map_err(|e| Error::io(&bundle, e))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "shingles"))
                .collect();
            files.sort();
            for path in files {
                let raw = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                let (source_hash, set) = decode_shingles(&raw).map_err(|message| Error::Cache {
                    path: path.clone(),
                    message,
                })?;
                let fresh = self
                    .document(&set.document_id)
                    .is_ok_and(|d| d.source_hash == source_hash);
                if !fresh {
                    stats.stale += 1;
                    continue;
                }
                let key = Self::cache_key(&set.document_id, &set.params, &set.profile);
                self.cache
                    .write()
                    .expect("cache lock")
                    .insert(key, Arc::new(set));
                stats.loaded += 1;
            }
        }
        Ok(stats)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CacheLoad {
    pub loaded: usize,
    pub stale: usize,
}

/// Directory name for one parameter bundle.
pub fn bundle_hash(params: &ShingleParams, profile: &NormalizationProfile) -> String {
    sha256_hex(format!("{params};{profile}").as_bytes())[..16].to_string()
}

const HEADER: &str = "# aksara shingles v1";

/// `key<TAB>i,j,k;i,j,k` per line under a `#` header, keys sorted.
pub fn encode_shingles(set: &ShingleSet, source_hash: &str) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "# document {}", set.document_id).unwrap();
    writeln!(out, "# source-sha256 {source_hash}").unwrap();
    writeln!(out, "# params {}", set.params).unwrap();
    writeln!(out, "# profile {}", set.profile).unwrap();
    for (key, occurrences) in &set.occurrences {
        out.push_str(key);
        out.push('\t');
        for (i, positions) in occurrences.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            for (j, p) in positions.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{p}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// Inverse of [`encode_shingles`]; returns the recorded source hash too.
pub fn decode_shingles(raw: &str) -> std::result::Result<(String, ShingleSet), String> {
    let mut lines = raw.lines();
    if lines.next() != Some(HEADER) {
        return Err("missing header".into());
    }
    let mut field = |name: &str| -> std::result::Result<String, String> {
        lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .and_then(|l| l.strip_prefix(name))
            .and_then(|l| l.strip_prefix(' '))
            .map(String::from)
            .ok_or_else(|| format!("missing `{name}` header"))
    };
    let id = field("document")?;
    let source_hash = field("source-sha256")?;
    let params: ShingleParams = field("params")?.parse().map_err(|e| format!("{e}"))?;
    let profile: NormalizationProfile = field("profile")?.parse().map_err(|e| format!("{e}"))?;

    let mut set = ShingleSet::new(&id, params, profile);
    for line in lines {
        let (key, occurrences) = line
            .split_once('\t')
            .ok_or_else(|| format!("malformed line `{line}`"))?;
        let parsed = occurrences
            .split(';')
            .map(|tuple| {
                tuple
                    .split(',')
                    .map(|p| {
                        p.parse::<usize>()
                            .map_err(|e| format!("bad position `{p}`: {e}"))
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        set.occurrences.insert(key.to_string(), parsed);
    }
    Ok((source_hash, set))
}
