use std::path::{Path, PathBuf};
use std::time::Duration;

/// Status and body of a completed request. Non-2xx statuses are returned
/// here rather than as errors so the client can decide what to retry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
}

/// Connection-level failure (DNS, TLS, reset, timeout).
#[derive(Debug, Clone, thiserror::Error)]
#[error("{0}")]
pub struct TransportError(pub String);

pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError>;
}

/// Blocking HTTP transport.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .user_agent(concat!("newslens/", env!("CARGO_PKG_VERSION")))
            .build();
        Self { agent: ureq::Agent::new_with_config(config) }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(60))
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        let mut resp = self.agent.get(url).call().map_err(|e| TransportError(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .with_config()
            .limit(64 * 1024 * 1024)
            .read_to_vec()
            .map_err(|e| TransportError(e.to_string()))?;
        Ok(HttpResponse { status, body })
    }
}

/// Serves recorded response bodies from a directory.
///
/// A request for `<base>/<path>?<query>` is answered with the file
/// `<root>/<path>/<query>`; a request without a query maps to `<root>/<path>`.
/// Missing files answer 404.
pub struct FixtureTransport {
    root: PathBuf,
    base_url: String,
}

impl FixtureTransport {
    pub fn new(root: impl Into<PathBuf>, base_url: impl Into<String>) -> Self {
        Self { root: root.into(), base_url: base_url.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// File that answers `url`, or `None` if the url is outside the base.
    pub fn fixture_path(&self, url: &str) -> Option<PathBuf> {
        let rel = url.strip_prefix(self.base_url.trim_end_matches('/'))?;
        let rel = rel.trim_start_matches('/');
        let (path, query) = match rel.split_once('?') {
            Some((p, q)) => (p, Some(q)),
            None => (rel, None),
        };
        let mut out = self.root.clone();
        for seg in path.split('/').filter(|s| !s.is_empty()) {
            if seg == ".." || seg == "." {
                return None;
            }
            out.push(seg);
        }
        if let Some(q) = query {
            if q.contains('/') {
                return None;
            }
            out.push(q);
        }
        Some(out)
    }
}

impl Transport for FixtureTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        let Some(path) = self.fixture_path(url) else {
            return Ok(HttpResponse { status: 404, body: Vec::new() });
        };
        match std::fs::read(&path) {
            Ok(body) => Ok(HttpResponse { status: 200, body }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(HttpResponse { status: 404, body: Vec::new() }),
            Err(e) => Err(TransportError(format!("{}: {e}", path.display()))),
        }
    }
}
