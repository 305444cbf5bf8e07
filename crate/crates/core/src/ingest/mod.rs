//! Chronicling America page search and OCR text retrieval.
//!
//! The client talks to the archive through a [`Transport`], which is either a
//! real HTTP agent or a directory of recorded response bodies. OCR text is
//! cached on disk with a SHA-256 sidecar per page.

mod cache;
mod client;
mod transport;
mod types;

pub use cache::PageCache;
pub use client::{ChroniclingAmerica, RetryPolicy, SearchPage, DEFAULT_BASE_URL};
pub use transport::{FixtureTransport, HttpResponse, HttpTransport, Transport, TransportError};
pub use types::{PageHit, SearchQuery, MAX_ROWS_PER_PAGE};

/// Environment variable that switches the client into offline fixture mode.
pub const FIXTURE_DIR_ENV: &str = "NEWSLENS_FIXTURE_DIR";

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("search keyword is empty")]
    EmptyKeyword,
    #[error("invalid search query: {0}")]
    InvalidQuery(String),
    #[error("request to {url} failed after {attempts} attempt(s): {reason}")]
    HttpFailure { url: String, attempts: u32, reason: String },
    #[error("retry budget exhausted for {url} after {attempts} attempt(s): {reason}")]
    RetryExceeded { url: String, attempts: u32, reason: String },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("cache entry {path} failed its checksum")]
    CacheCorrupt { path: String },
    #[error("cache i/o error: {0}")]
    Io(#[from] std::io::Error),
}
