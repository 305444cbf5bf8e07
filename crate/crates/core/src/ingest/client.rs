use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use serde_json::Value;

use super::{IngestError, PageCache, PageHit, SearchQuery, Transport};

pub const DEFAULT_BASE_URL: &str = "https://chroniclingamerica.loc.gov";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    /// Retries after the first attempt.
    pub max_retries: u32,
    /// Delay before the first retry; doubled for each further retry.
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self { max_retries: 3, base_delay: Duration::from_millis(500) }
    }
}

/// One page of search results.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchPage {
    pub total_items: u64,
    pub hits: Vec<PageHit>,
}

struct RateLimiter {
    interval: Duration,
    next: Mutex<Option<Instant>>,
}

impl RateLimiter {
    fn acquire(&self) {
        let wait = {
            let mut next = self.next.lock().unwrap_or_else(|e| e.into_inner());
            let now = Instant::now();
            let slot = match *next {
                Some(t) if t > now => t,
                _ => now,
            };
            *next = Some(slot + self.interval);
            slot - now
        };
        if !wait.is_zero() {
            thread::sleep(wait);
        }
    }
}

enum Failure {
    NotFound,
    Fatal(String),
    Exhausted(u32, String),
}

/// Client for the page search and OCR text endpoints.
pub struct ChroniclingAmerica {
    transport: Box<dyn Transport>,
    base_url: String,
    retry: RetryPolicy,
    limiter: Option<RateLimiter>,
    cache: Option<PageCache>,
    requests: AtomicUsize,
}

impl ChroniclingAmerica {
    pub fn new(transport: Box<dyn Transport>, base_url: impl Into<String>) -> Self {
        Self {
            transport,
            base_url: base_url.into().trim_end_matches('/').to_string(),
            retry: RetryPolicy::default(),
            limiter: None,
            cache: None,
            requests: AtomicUsize::new(0),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    /// Caps request starts at `per_second`. Zero or negative disables the cap.
    pub fn with_rate_limit(mut self, per_second: f64) -> Self {
        self.limiter = (per_second > 0.0)
            .then(|| RateLimiter { interval: Duration::from_secs_f64(1.0 / per_second), next: Mutex::new(None) });
        self
    }

    pub fn with_cache(mut self, cache: PageCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    /// Number of requests handed to the transport so far, retries included.
    pub fn requests_made(&self) -> usize {
        self.requests.load(Ordering::Relaxed)
    }

    pub fn search_pages(&self, query: &SearchQuery) -> Result<SearchPage, IngestError> {
        query.validate()?;
        let url = format!("{}/{}", self.base_url, query.request_path());
        let body = match self.get_with_retry(&url) {
            Ok(b) => b,
            Err(Failure::NotFound) => return Err(IngestError::NotFound(url)),
            Err(Failure::Fatal(reason)) => return Err(IngestError::HttpFailure { url, attempts: 1, reason }),
            Err(Failure::Exhausted(attempts, reason)) => {
                return Err(IngestError::HttpFailure { url, attempts, reason })
            }
        };
        let page = parse_search_response(&body, &self.base_url)?;
        if page.hits.len() > query.rows_per_page as usize {
            return Err(IngestError::MalformedResponse(format!(
                "{} hits returned for rows={}",
                page.hits.len(),
                query.rows_per_page
            )));
        }
        Ok(page)
    }

    /// Walks the page cursor from 1 until a short page comes back (or
    /// `max_pages` pages were read). Returns the reported total and all hits.
    pub fn search_all(
        &self,
        keyword: &str,
        rows_per_page: u32,
        max_pages: Option<u32>,
    ) -> Result<(u64, Vec<PageHit>), IngestError> {
        let mut cursor = 1;
        let mut hits = Vec::new();
        loop {
            let page = self.search_pages(&SearchQuery::new(keyword, rows_per_page, cursor))?;
            let total = page.total_items;
            let short = page.hits.len() < rows_per_page as usize;
            hits.extend(page.hits);
            if short || max_pages.is_some_and(|m| cursor >= m) {
                return Ok((total, hits));
            }
            cursor += 1;
        }
    }

    /// Raw OCR text for a page, served from the cache when present.
    pub fn fetch_page_text(&self, hit: &PageHit) -> Result<String, IngestError> {
        if let Some(cache) = &self.cache {
            if let Some(text) = cache.get(hit)? {
                return Ok(text);
            }
        }
        if !hit.ocr_url.starts_with("http://") && !hit.ocr_url.starts_with("https://") {
            return Err(IngestError::MalformedResponse(format!("page {} has no usable ocr_url", hit.page_id())));
        }
        let url = hit.ocr_url.clone();
        let body = match self.get_with_retry(&url) {
            Ok(b) => b,
            Err(Failure::NotFound) => return Err(IngestError::NotFound(url)),
            Err(Failure::Fatal(reason)) => return Err(IngestError::HttpFailure { url, attempts: 1, reason }),
            Err(Failure::Exhausted(attempts, reason)) => {
                return Err(IngestError::RetryExceeded { url, attempts, reason })
            }
        };
        let text = String::from_utf8(body)
            .map_err(|_| IngestError::MalformedResponse(format!("{url}: OCR text is not UTF-8")))?;
        if let Some(cache) = &self.cache {
            cache.put(hit, &text)?;
        }
        Ok(text)
    }

    fn get_with_retry(&self, url: &str) -> Result<Vec<u8>, Failure> {
        let attempts = self.retry.max_retries + 1;
        let mut last = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                let delay = self.retry.base_delay.saturating_mul(1 << (attempt - 1).min(16));
                if !delay.is_zero() {
                    thread::sleep(delay);
                }
            }
            if let Some(l) = &self.limiter {
                l.acquire();
            }
            self.requests.fetch_add(1, Ordering::Relaxed);
            match self.transport.get(url) {
                Ok(resp) if (200..300).contains(&resp.status) => return Ok(resp.body),
                Ok(resp) if resp.status == 404 => return Err(Failure::NotFound),
                Ok(resp) if resp.status == 429 || resp.status >= 500 => {
                    last = format!("http status {}", resp.status);
                }
                Ok(resp) => return Err(Failure::Fatal(format!("http status {}", resp.status))),
                Err(e) => last = e.0,
            }
            log::debug!("attempt {} for {url} failed: {last}", attempt + 1);
        }
        Err(Failure::Exhausted(attempts, last))
    }
}

/// Parses the JSON body of the search endpoint.
pub(crate) fn parse_search_response(body: &[u8], base_url: &str) -> Result<SearchPage, IngestError> {
    let malformed = |m: String| IngestError::MalformedResponse(m);
    let v: Value = serde_json::from_slice(body).map_err(|e| malformed(format!("search json: {e}")))?;
    let total_items =
        v.get("totalItems").and_then(Value::as_u64).ok_or_else(|| malformed("missing totalItems".into()))?;
    let items = v.get("items").and_then(Value::as_array).ok_or_else(|| malformed("missing items".into()))?;
    let hits = items
        .iter()
        .enumerate()
        .map(|(i, item)| parse_item(item, base_url).map_err(|m| malformed(format!("item {i}: {m}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SearchPage { total_items, hits })
}

fn parse_item(item: &Value, base_url: &str) -> Result<PageHit, String> {
    // The page path `/lccn/<lccn>/<date>/ed-<e>/seq-<n>/` carries every key.
    let id = item.get("id").and_then(Value::as_str).ok_or("missing id")?;
    let parts: Vec<&str> = id.trim_matches('/').split('/').collect();
    let [kind, lccn, date, ed, seq] = parts[..] else {
        return Err(format!("unrecognised page id {id:?}"));
    };
    if kind != "lccn" {
        return Err(format!("unrecognised page id {id:?}"));
    }
    if let Some(field) = item.get("lccn").and_then(Value::as_str) {
        if field != lccn {
            return Err(format!("lccn {field:?} disagrees with id {id:?}"));
        }
    }
    let issue_date = NaiveDate::parse_from_str(date, "%Y-%m-%d").map_err(|_| format!("bad issue date {date:?}"))?;
    let edition =
        ed.strip_prefix("ed-").and_then(|s| s.parse::<u32>().ok()).ok_or_else(|| format!("bad edition {ed:?}"))?;
    let page_seq = seq
        .strip_prefix("seq-")
        .and_then(|s| s.parse::<u32>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("bad sequence {seq:?}"))?;
    let state = match item.get("state") {
        Some(Value::Array(a)) => a.first().and_then(Value::as_str),
        Some(Value::String(s)) => Some(s.as_str()),
        _ => None,
    }
    .filter(|s| !s.trim().is_empty())
    .ok_or("missing state")?
    .to_string();
    let title = item.get("title").and_then(Value::as_str).ok_or("missing title")?.to_string();
    let hit = PageHit {
        lccn: lccn.to_string(),
        issue_date,
        edition,
        page_seq,
        state,
        title,
        ocr_url: format!("{base_url}/lccn/{lccn}/{date}/ed-{edition}/seq-{page_seq}/ocr.txt"),
    };
    hit.validate().map_err(|e| e.to_string())?;
    Ok(hit)
}
