//! Content-addressed verdict cache. Entries are bucketed by an
//! isomorphism-invariant profile of the matroidal; within a bucket, reuse
//! requires an explicit matroidal isomorphism, through which witnesses are
//! relabeled. Disk persistence is optional, append-only, and idempotent.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::biased::{BiasedGraph, BiasedGraphDoc};
use crate::matroid::{self, Matroid, MatroidDoc};
use crate::subset::{self, Mask};

pub const CACHE_FORMAT: &str = "framekit-cache-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CachedStatus {
    Frame,
    NotFrame,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    pub kind: String,
    pub matroid: MatroidDoc,
    pub l: Vec<String>,
    pub status: CachedStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<BiasedGraphDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CacheFile {
    version: String,
    entries: Vec<CacheEntry>,
}

/// In-memory store keyed by profile hash, optionally mirrored to a
/// directory of JSON bucket files.
pub struct Cache {
    buckets: Mutex<HashMap<String, Vec<CacheEntry>>>,
    dir: Option<PathBuf>,
}

impl Default for Cache {
    fn default() -> Self {
        Cache::in_memory()
    }
}

impl Cache {
    pub fn in_memory() -> Cache {
        Cache {
            buckets: Mutex::new(HashMap::new()),
            dir: None,
        }
    }

    pub fn on_disk(dir: PathBuf) -> std::io::Result<Cache> {
        std::fs::create_dir_all(&dir)?;
        Ok(Cache {
            buckets: Mutex::new(HashMap::new()),
            dir: Some(dir),
        })
    }

    /// Isomorphism-invariant bucket key: element count, rank, circuit-size
    /// multiset, sorted per-element circuit profiles, and the l-degree
    /// profile, hashed.
    pub fn profile_key(kind: &str, m: &Matroid, l: Mask) -> String {
        let mut sizes: Vec<u32> = m.circuits().iter().map(|c| c.count_ones()).collect();
        sizes.sort_unstable();
        let mut profiles: Vec<(bool, Vec<u32>)> = (0..m.n())
            .map(|e| {
                let mut per_size = vec![0u32; 20];
                for &c in m.circuits() {
                    if subset::contains(c, e) {
                        let s = (c.count_ones() as usize).min(19);
                        per_size[s] += 1;
                    }
                }
                (subset::contains(l, e), per_size)
            })
            .collect();
        profiles.sort();
        let blob = format!(
            "{kind}|n={}|r={}|sizes={sizes:?}|profiles={profiles:?}",
            m.n(),
            m.rank_full()
        );
        let mut h = Sha256::new();
        h.update(blob.as_bytes());
        format!("{kind}-{:x}", h.finalize())
    }

    pub fn lookup(
        &self,
        kind: &str,
        m: &Matroid,
        l: Mask,
    ) -> Option<(CachedStatus, Option<BiasedGraph>)> {
        let key = Self::profile_key(kind, m, l);
        let mut buckets = self.buckets.lock().unwrap();
        if !buckets.contains_key(&key) {
            if let Some(entries) = self.load_bucket(&key) {
                buckets.insert(key.clone(), entries);
            }
        }
        let entries = buckets.get(&key)?;
        for entry in entries {
            if entry.kind != kind {
                continue;
            }
            let em = Matroid::from_doc(&entry.matroid).ok()?;
            let el: Mask = entry
                .l
                .iter()
                .map(|name| subset::bit(em.element_index(name).expect("cache entry consistent")))
                .fold(0, |a, b| a | b);
            if let Some(map) = matroid::is_matroidal_isomorphic(m, l, &em, el) {
                let witness = entry.witness.as_ref().map(|doc| {
                    let w = BiasedGraph::from_doc(doc).expect("cached witnesses parse");
                    relabel_witness(&w, &em, m, &map)
                });
                return Some((entry.status, witness));
            }
        }
        None
    }

    pub fn store(
        &self,
        kind: &str,
        m: &Matroid,
        l: Mask,
        status: CachedStatus,
        witness: Option<&BiasedGraph>,
    ) {
        let key = Self::profile_key(kind, m, l);
        let entry = CacheEntry {
            kind: kind.to_string(),
            matroid: m.to_doc(),
            l: m.names_of(l),
            status,
            witness: witness.map(|w| w.to_doc()),
        };
        let mut buckets = self.buckets.lock().unwrap();
        let entries = buckets.entry(key.clone()).or_default();
        // idempotent append: skip if an isomorphic entry already exists
        for existing in entries.iter() {
            if existing.kind != kind {
                continue;
            }
            if let Ok(em) = Matroid::from_doc(&existing.matroid) {
                let el: Mask = existing
                    .l
                    .iter()
                    .map(|name| subset::bit(em.element_index(name).unwrap()))
                    .fold(0, |a, b| a | b);
                if matroid::is_matroidal_isomorphic(m, l, &em, el).is_some() {
                    return;
                }
            }
        }
        entries.push(entry);
        if self.dir.is_some() {
            self.write_bucket(&key, entries);
        }
    }

    fn bucket_path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    fn load_bucket(&self, key: &str) -> Option<Vec<CacheEntry>> {
        let path = self.bucket_path(key)?;
        let text = std::fs::read_to_string(path).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        if file.version != CACHE_FORMAT {
            return None;
        }
        Some(file.entries)
    }

    fn write_bucket(&self, key: &str, entries: &[CacheEntry]) {
        let Some(path) = self.bucket_path(key) else {
            return;
        };
        let file = CacheFile {
            version: CACHE_FORMAT.to_string(),
            entries: entries.to_vec(),
        };
        let tmp = path.with_extension("json.tmp");
        if let Ok(text) = serde_json::to_string_pretty(&file) {
            let _ = std::fs::write(&tmp, text);
            let _ = std::fs::rename(&tmp, &path);
        }
    }
}

/// Translate a witness for the cached matroid into a witness for the query:
/// `map` sends query element indices to cached element indices.
fn relabel_witness(w: &BiasedGraph, cached: &Matroid, query: &Matroid, map: &[usize]) -> BiasedGraph {
    let mut inverse = vec![usize::MAX; cached.n()];
    for (q, &c) in map.iter().enumerate() {
        inverse[c] = q;
    }
    let g = w.graph();
    let edges: Vec<(String, String, String)> = g
        .edges()
        .iter()
        .map(|e| {
            let ci = cached.element_index(&e.id).expect("witness labeled by cache entry");
            let new_id = query.ground()[inverse[ci]].clone();
            (
                new_id,
                g.vertex_name(e.u).to_string(),
                g.vertex_name(e.v).to_string(),
            )
        })
        .collect();
    let graph = crate::graph::Multigraph::new(g.vertex_names().to_vec(), edges)
        .expect("relabeled witness graph is well-formed");
    // balanced cycles carry over by position: edge order is unchanged
    let balanced: std::collections::BTreeSet<Mask> = w.balanced_cycles().collect();
    BiasedGraph::explicit_masks(graph, &balanced).expect("relabeled witness stays theta-valid")
}
