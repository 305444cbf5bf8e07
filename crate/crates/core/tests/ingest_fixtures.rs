use std::path::PathBuf;

use newslens::ingest::{
    ChroniclingAmerica, FixtureTransport, IngestError, PageCache, PageHit, RetryPolicy, SearchQuery, DEFAULT_BASE_URL,
};

fn fixture_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/ingest")
}

fn client() -> ChroniclingAmerica {
    ChroniclingAmerica::new(Box::new(FixtureTransport::new(fixture_root(), DEFAULT_BASE_URL)), DEFAULT_BASE_URL)
        .with_retry(RetryPolicy { max_retries: 3, base_delay: std::time::Duration::ZERO })
}

const EXPECTED_LCCNS: [&str; 12] = [
    "sn83030213",
    "sn84026749",
    "sn82015483",
    "sn85066387",
    "sn83016209",
    "sn86053573",
    "sn84022374",
    "sn83045462",
    "sn84026847",
    "sn86063034",
    "sn83035143",
    "sn84020422",
];

#[test]
fn search_returns_fixture_hits_in_order() {
    let page = client().search_pages(&SearchQuery::new("coolie", 50, 1)).unwrap();
    assert_eq!(page.total_items, 124_511);
    let lccns: Vec<&str> = page.hits.iter().map(|h| h.lccn.as_str()).collect();
    assert_eq!(lccns, EXPECTED_LCCNS);
    let first = &page.hits[0];
    assert_eq!(first.page_id(), "sn83030213/1862-08-05/ed-1/seq-4");
    assert_eq!(first.state, "New York");
    assert_eq!(first.ocr_url, format!("{DEFAULT_BASE_URL}/lccn/sn83030213/1862-08-05/ed-1/seq-4/ocr.txt"));
    for h in &page.hits {
        h.validate().unwrap();
        assert!(h.page_seq >= 1);
    }
}

#[test]
fn empty_keyword_is_rejected_before_any_request() {
    let c = client();
    let err = c.search_pages(&SearchQuery::new("", 50, 1)).unwrap_err();
    assert!(matches!(err, IngestError::EmptyKeyword));
    assert_eq!(c.requests_made(), 0);
}

#[test]
fn pagination_visits_every_hit_once() {
    let c = client();
    let (total, hits) = c.search_all("coolie", 5, None).unwrap();
    assert_eq!(total, 124_511);
    assert_eq!(c.requests_made(), 3);
    let ids: Vec<String> = hits.iter().map(PageHit::page_id).collect();
    let mut unique = ids.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(unique.len(), 12);
    let lccns: Vec<&str> = hits.iter().map(|h| h.lccn.as_str()).collect();
    assert_eq!(lccns, EXPECTED_LCCNS);
}

#[test]
fn fetch_is_verbatim_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let c = client().with_cache(PageCache::new(dir.path()));
    let hit = c.search_pages(&SearchQuery::new("coolie", 50, 1)).unwrap().hits.remove(0);
    let before = c.requests_made();

    let text = c.fetch_page_text(&hit).unwrap();
    let expected = std::fs::read(fixture_root().join("lccn/sn83030213/1862-08-05/ed-1/seq-4/ocr.txt")).unwrap();
    assert_eq!(text.as_bytes(), expected.as_slice());
    assert_eq!(c.requests_made(), before + 1);

    let again = c.fetch_page_text(&hit).unwrap();
    assert_eq!(again, text);
    assert_eq!(c.requests_made(), before + 1, "second fetch must come from the cache");

    let cached = dir.path().join("sn83030213/1862-08-05-ed-1-seq-4.txt");
    assert!(cached.exists());
    std::fs::write(&cached, "tampered").unwrap();
    assert!(matches!(c.fetch_page_text(&hit), Err(IngestError::CacheCorrupt { .. })));
}

#[test]
fn unknown_page_is_not_found() {
    let c = client();
    let mut hit = c.search_pages(&SearchQuery::new("coolie", 50, 1)).unwrap().hits.remove(1);
    hit.page_seq = 99;
    hit.ocr_url = hit.ocr_url.replace("seq-2", "seq-99");
    let before = c.requests_made();
    assert!(matches!(c.fetch_page_text(&hit), Err(IngestError::NotFound(_))));
    assert_eq!(c.requests_made(), before + 1, "404 is not retried");
}
