use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use sha2::{Digest, Sha256};

use super::{IngestError, PageHit};

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// On-disk OCR cache: `<root>/<lccn>/<date>-ed-<e>-seq-<n>.txt` with a
/// `.sha256` sidecar holding the hex digest of the text.
///
/// Writes go through a temporary file and a rename, so concurrent writers of
/// the same page leave one complete entry (last writer wins).
#[derive(Debug, Clone)]
pub struct PageCache {
    root: PathBuf,
}

impl PageCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn text_path(&self, hit: &PageHit) -> PathBuf {
        self.root.join(&hit.lccn).join(format!(
            "{}-ed-{}-seq-{}.txt",
            hit.issue_date.format("%Y-%m-%d"),
            hit.edition,
            hit.page_seq
        ))
    }

    pub fn checksum_path(&self, hit: &PageHit) -> PathBuf {
        let mut p = self.text_path(hit).into_os_string();
        p.push(".sha256");
        PathBuf::from(p)
    }

    /// Returns the cached text, `None` on a miss, or `CacheCorrupt` when the
    /// entry does not match its sidecar.
    pub fn get(&self, hit: &PageHit) -> Result<Option<String>, IngestError> {
        let path = self.text_path(hit);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let corrupt = || IngestError::CacheCorrupt { path: path.display().to_string() };
        let stored = fs::read_to_string(self.checksum_path(hit)).map_err(|_| corrupt())?;
        if stored.trim() != sha256_hex(&bytes) {
            return Err(corrupt());
        }
        String::from_utf8(bytes).map(Some).map_err(|_| corrupt())
    }

    pub fn put(&self, hit: &PageHit, text: &str) -> Result<(), IngestError> {
        let path = self.text_path(hit);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        atomic_write(&path, text.as_bytes())?;
        atomic_write(&self.checksum_path(hit), sha256_hex(text.as_bytes()).as_bytes())?;
        Ok(())
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let n = TMP_COUNTER.fetch_add(1, Ordering::Relaxed);
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}-{n}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}
