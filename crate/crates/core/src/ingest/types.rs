use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::IngestError;

/// Largest `rows` value the search endpoint accepts.
pub const MAX_ROWS_PER_PAGE: u32 = 100;

/// One newspaper page returned by a keyword search.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PageHit {
    pub lccn: String,
    pub issue_date: NaiveDate,
    pub edition: u32,
    pub page_seq: u32,
    pub state: String,
    pub title: String,
    pub ocr_url: String,
}

impl PageHit {
    /// `<lccn>/<date>/ed-<edition>/seq-<n>`, the archive's page path.
    pub fn page_id(&self) -> String {
        format!("{}/{}/ed-{}/seq-{}", self.lccn, self.issue_date.format("%Y-%m-%d"), self.edition, self.page_seq)
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.lccn.trim().is_empty() {
            return Err(IngestError::MalformedResponse("page hit without lccn".into()));
        }
        if self.page_seq == 0 {
            return Err(IngestError::MalformedResponse(format!("page {} has sequence 0", self.page_id())));
        }
        if self.state.trim().is_empty() {
            return Err(IngestError::MalformedResponse(format!("page {} has no state", self.page_id())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchQuery {
    pub keyword: String,
    pub rows_per_page: u32,
    pub page_cursor: u32,
}

impl SearchQuery {
    pub fn new(keyword: impl Into<String>, rows_per_page: u32, page_cursor: u32) -> Self {
        Self { keyword: keyword.into(), rows_per_page, page_cursor }
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.keyword.is_empty() {
            return Err(IngestError::EmptyKeyword);
        }
        if self.keyword.chars().any(char::is_whitespace) {
            return Err(IngestError::InvalidQuery(format!("keyword {:?} contains whitespace", self.keyword)));
        }
        if self.keyword.chars().any(char::is_uppercase) {
            return Err(IngestError::InvalidQuery(format!("keyword {:?} is not lowercase", self.keyword)));
        }
        if self.rows_per_page == 0 || self.rows_per_page > MAX_ROWS_PER_PAGE {
            return Err(IngestError::InvalidQuery(format!(
                "rows_per_page must be in 1..={MAX_ROWS_PER_PAGE}, got {}",
                self.rows_per_page
            )));
        }
        if self.page_cursor == 0 {
            return Err(IngestError::InvalidQuery("page_cursor starts at 1".into()));
        }
        Ok(())
    }

    /// Path and query of the search request, relative to the archive root.
    pub fn request_path(&self) -> String {
        format!(
            "search/pages/results/?andtext={}&format=json&page={}&rows={}",
            percent_encode(&self.keyword),
            self.page_cursor,
            self.rows_per_page
        )
    }
}

fn percent_encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.' | b'~') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}
