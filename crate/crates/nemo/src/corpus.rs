//! On-disk corpus: JSON Lines record files, a manifest and a PNG image store.
//!
//! ```text
//! corpus/
//!   identities.jsonl  posts.jsonl  edges.jsonl  pages.jsonl
//!   groundtruth.jsonl  manifest.json  images/<key>.png
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nemo_core::similarity::Raster;
use nemo_core::{EntityClass, Identity, IdentityRef, ImageKey, NetworkKind, Post};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::generate::CorpusConfig;

pub const IDENTITIES: &str = "identities.jsonl";
pub const POSTS: &str = "posts.jsonl";
pub const EDGES: &str = "edges.jsonl";
pub const PAGES: &str = "pages.jsonl";
pub const GROUNDTRUTH: &str = "groundtruth.jsonl";
pub const MANIFEST: &str = "manifest.json";
pub const IMAGES: &str = "images";

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("image {key}: {message}")]
    Image { key: String, message: String },
    #[error("invalid corpus: {0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, CorpusError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub network: String,
    pub user_id: String,
    pub username: String,
    pub display_name: String,
    pub location: Option<String>,
    pub image_key: Option<String>,
    pub url_field: Option<String>,
    pub searchable: bool,
    pub posts_public: bool,
    pub friendlist_public: bool,
    pub entity_class: EntityClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostRecord {
    pub author: String,
    pub network: String,
    pub text: String,
    pub timestamp: u64,
    pub source_app: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// Directed: `from` follows `to`.
    Follow,
    /// Undirected friendship.
    Friend,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub network: String,
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageRecord {
    pub url: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub redirects_to: Option<String>,
    #[serde(default)]
    pub links: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthRecord {
    pub source_id: String,
    pub target_id: String,
    pub leak_labels: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Hash of every other corpus file; identifies the corpus in reports.
    pub corpus_id: String,
    pub source_network: String,
    pub target_network: String,
    pub config: Option<CorpusConfig>,
    pub planted: BTreeMap<String, u64>,
}

/// A whole corpus in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub source: NetworkKind,
    pub target: NetworkKind,
    pub identities: Vec<Identity>,
    pub posts: Vec<Post>,
    pub edges: Vec<EdgeRecord>,
    pub pages: Vec<PageRecord>,
    pub groundtruth: Vec<GroundTruthRecord>,
    pub images: BTreeMap<ImageKey, Raster>,
    pub config: Option<CorpusConfig>,
    pub planted: BTreeMap<String, u64>,
}

impl Corpus {
    pub fn empty(source: NetworkKind, target: NetworkKind) -> Self {
        Self {
            source,
            target,
            identities: Vec::new(),
            posts: Vec::new(),
            edges: Vec::new(),
            pages: Vec::new(),
            groundtruth: Vec::new(),
            images: BTreeMap::new(),
            config: None,
            planted: BTreeMap::new(),
        }
    }

    /// Adds `raster` to the image store under its content hash.
    pub fn add_image(&mut self, raster: Raster) -> ImageKey {
        let key = image_key(&raster);
        self.images.entry(key.clone()).or_insert(raster);
        key
    }

    pub fn source_ref(&self, user_id: &str) -> IdentityRef {
        IdentityRef::new(self.source.clone(), user_id)
    }

    pub fn target_ref(&self, user_id: &str) -> IdentityRef {
        IdentityRef::new(self.target.clone(), user_id)
    }

    /// `(source, truth)` references of every ground-truth pair, file order.
    pub fn pairs(&self) -> Vec<(IdentityRef, IdentityRef)> {
        self.groundtruth
            .iter()
            .map(|g| (self.source_ref(&g.source_id), self.target_ref(&g.target_id)))
            .collect()
    }

    /// Record-level and cross-record checks: unique ids per network, known
    /// networks, post authors and edge endpoints exist, image keys resolve.
    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for i in &self.identities {
            i.validate()
                .map_err(|e| CorpusError::Invalid(e.to_string()))?;
            if i.network != self.source && i.network != self.target {
                return Err(CorpusError::Invalid(format!("unknown network {}", i.network)));
            }
            if !ids.insert(i.id()) {
                return Err(CorpusError::Invalid(format!("duplicate identity {}", i.id())));
            }
            if let Some(k) = &i.profile_image {
                if !self.images.contains_key(k) {
                    return Err(CorpusError::Invalid(format!("{} has unknown image {}", i.id(), k.0)));
                }
            }
        }
        for p in &self.posts {
            if !ids.contains(&p.author) {
                return Err(CorpusError::Invalid(format!("post by unknown {}", p.author)));
            }
        }
        for e in &self.edges {
            let net = NetworkKind::new(e.network.clone())
                .map_err(|e| CorpusError::Invalid(e.to_string()))?;
            for end in [&e.from, &e.to] {
                if !ids.contains(&IdentityRef::new(net.clone(), end.clone())) {
                    return Err(CorpusError::Invalid(format!("edge to unknown {net}:{end}")));
                }
            }
        }
        for g in &self.groundtruth {
            if !ids.contains(&self.source_ref(&g.source_id))
                || !ids.contains(&self.target_ref(&g.target_id))
            {
                return Err(CorpusError::Invalid(format!(
                    "ground truth {} -> {} names an unknown identity",
                    g.source_id, g.target_id
                )));
            }
        }
        Ok(())
    }

    fn identity_records(&self) -> Vec<IdentityRecord> {
        self.identities
            .iter()
            .map(|i| IdentityRecord {
                network: i.network.as_str().to_owned(),
                user_id: i.user_id.clone(),
                username: i.username.clone(),
                display_name: i.display_name.clone(),
                location: i.location.clone(),
                image_key: i.profile_image.as_ref().map(|k| k.0.clone()),
                url_field: i.url_field.clone(),
                searchable: i.searchable,
                posts_public: i.posts_public,
                friendlist_public: i.friendlist_public,
                entity_class: i.entity_class,
            })
            .collect()
    }

    fn post_records(&self) -> Vec<PostRecord> {
        self.posts
            .iter()
            .map(|p| PostRecord {
                author: p.author.user_id.clone(),
                network: p.author.network.as_str().to_owned(),
                text: p.text.clone(),
                timestamp: p.timestamp,
                source_app: p.source_app.clone(),
            })
            .collect()
    }

    /// Serialized record files, in the fixed order they are hashed in.
    fn record_files(&self) -> Vec<(&'static str, Vec<u8>)> {
        vec![
            (IDENTITIES, jsonl(&self.identity_records())),
            (POSTS, jsonl(&self.post_records())),
            (EDGES, jsonl(&self.edges)),
            (PAGES, jsonl(&self.pages)),
            (GROUNDTRUTH, jsonl(&self.groundtruth)),
        ]
    }

    /// Content hash of the record files and image store.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for (name, bytes) in self.record_files() {
            h.update(name.as_bytes());
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(&bytes);
        }
        for (key, raster) in &self.images {
            h.update(key.0.as_bytes());
            h.update(raster.to_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            corpus_id: self.fingerprint(),
            source_network: self.source.as_str().to_owned(),
            target_network: self.target.as_str().to_owned(),
            config: self.config.clone(),
            planted: self.planted.clone(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        for (name, bytes) in self.record_files() {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(io_err(&path))?;
        }
        let path = dir.join(MANIFEST);
        let mut manifest = serde_json::to_vec_pretty(&self.manifest()).expect("manifest serializes");
        manifest.push(b'\n');
        fs::write(&path, manifest).map_err(io_err(&path))?;

        let images = dir.join(IMAGES);
        fs::create_dir_all(&images).map_err(io_err(&images))?;
        for (key, raster) in &self.images {
            let path = images.join(format!("{}.png", key.0));
            let buf = image::RgbImage::from_raw(raster.width(), raster.height(), raster.to_bytes())
                .ok_or_else(|| CorpusError::Image {
                    key: key.0.clone(),
                    message: "raster size mismatch".into(),
                })?;
            buf.save_with_format(&path, image::ImageFormat::Png)
                .map_err(|e| CorpusError::Image {
                    key: key.0.clone(),
                    message: e.to_string(),
                })?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let manifest_path = dir.join(MANIFEST);
        let manifest: Manifest = {
            let bytes = fs::read(&manifest_path).map_err(io_err(&manifest_path))?;
            serde_json::from_slice(&bytes).map_err(|e| CorpusError::Parse {
                file: MANIFEST.into(),
                line: e.line(),
                message: e.to_string(),
            })?
        };
        let net = |s: &str| NetworkKind::new(s).map_err(|e| CorpusError::Invalid(e.to_string()));
        let source = net(&manifest.source_network)?;
        let target = net(&manifest.target_network)?;

        let identities = read_jsonl::<IdentityRecord>(dir, IDENTITIES)?
            .into_iter()
            .map(|r| {
                Ok(Identity {
                    network: net(&r.network)?,
                    user_id: r.user_id,
                    username: r.username,
                    display_name: r.display_name,
                    location: r.location,
                    profile_image: r.image_key.map(ImageKey),
                    url_field: r.url_field,
                    searchable: r.searchable,
                    posts_public: r.posts_public,
                    friendlist_public: r.friendlist_public,
                    entity_class: r.entity_class,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let posts = read_jsonl::<PostRecord>(dir, POSTS)?
            .into_iter()
            .map(|r| {
                let author = IdentityRef::new(net(&r.network)?, r.author);
                Ok(Post::new(author, r.text, r.timestamp, r.source_app))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut images = BTreeMap::new();
        let keys: BTreeSet<&ImageKey> = identities.iter().filter_map(|i| i.profile_image.as_ref()).collect();
        for key in keys {
            let path = dir.join(IMAGES).join(format!("{}.png", key.0));
            let img = image::open(&path)
                .map_err(|e| CorpusError::Image {
                    key: key.0.clone(),
                    message: e.to_string(),
                })?
                .to_rgb8();
            let pixels = img.pixels().map(|p| p.0).collect();
            let raster = Raster::new(img.width(), img.height(), pixels).map_err(|e| CorpusError::Image {
                key: key.0.clone(),
                message: e.to_string(),
            })?;
            images.insert(key.clone(), raster);
        }

        let corpus = Corpus {
            source,
            target,
            identities,
            posts,
            edges: read_jsonl(dir, EDGES)?,
            pages: read_jsonl(dir, PAGES)?,
            groundtruth: read_jsonl(dir, GROUNDTRUTH)?,
            images,
            config: manifest.config,
            planted: manifest.planted,
        };
        corpus.validate()?;
        Ok(corpus)
    }
}

/// Content-hash key of a raster.
pub fn image_key(raster: &Raster) -> ImageKey {
    let mut h = Sha256::new();
    h.update(raster.width().to_le_bytes());
    h.update(raster.height().to_le_bytes());
    h.update(raster.to_bytes());
    ImageKey(hex::encode(&h.finalize()[..12]))
}

fn jsonl<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("record serializes");
        out.write_all(b"\n").expect("write to Vec");
    }
    out
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(dir: &Path, name: &str) -> Result<Vec<T>> {
    let path = dir.join(name);
    let file = fs::File::open(&path).map_err(io_err(&path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(&path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            file: name.into(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Corpus {
        let mut c = Corpus::empty(NetworkKind::new("source").unwrap(), NetworkKind::new("target").unwrap());
        let img = c.add_image(Raster::from_fn(2, 1, |x, _| if x == 0 { [255, 0, 0] } else { [0, 0, 255] }).unwrap());
        for (net, id) in [(c.source.clone(), "s1"), (c.target.clone(), "t1")] {
            c.identities.push(Identity {
                network: net,
                user_id: id.into(),
                username: format!("user_{id}"),
                display_name: "Ann Lee".into(),
                location: Some("Fairview".into()),
                profile_image: Some(img.clone()),
                url_field: None,
                searchable: true,
                posts_public: true,
                friendlist_public: true,
                entity_class: EntityClass::Person,
            });
        }
        c.posts.push(Post::new(c.source_ref("s1"), "hello https://target.net/user_t1", 5, Some("web".into())));
        c.pages.push(PageRecord { url: "https://blog.example/a".into(), redirects_to: None, links: vec![] });
        c.groundtruth.push(GroundTruthRecord {
            source_id: "s1".into(),
            target_id: "t1".into(),
            leak_labels: ["image_reuse".to_string()].into(),
        });
        c
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = tiny();
        c.write(dir.path()).unwrap();
        let back = Corpus::load(dir.path()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.posts[0].urls, ["https://target.net/user_t1"]);
        assert_eq!(back.fingerprint(), c.fingerprint());
    }

    #[test]
    fn page_record_omits_missing_redirect() {
        let p = PageRecord { url: "u".into(), redirects_to: None, links: vec![] };
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"url":"u","links":[]}"#);
        let q: PageRecord = serde_json::from_str(r#"{"url":"u"}"#).unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn validation_catches_dangling_references() {
        let mut c = tiny();
        c.groundtruth[0].target_id = "nope".into();
        assert!(c.validate().is_err());
        let mut c = tiny();
        c.identities.push(c.identities[0].clone());
        assert!(c.validate().is_err());
    }

    #[test]
    fn malformed_line_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        tiny().write(dir.path()).unwrap();
        fs::write(dir.path().join(EDGES), "{\"network\":\"source\"}\n").unwrap();
        match Corpus::load(dir.path()) {
            Err(CorpusError::Parse { file, line, .. }) => {
                assert_eq!(file, EDGES);
                assert_eq!(line, 1);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
