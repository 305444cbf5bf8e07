use chrono::NaiveDate;
use newslens::ingest::PageHit;
use newslens::snippet::{extract_snippets, tokenize, DEFAULT_RADIUS};
use proptest::prelude::*;

fn hit() -> PageHit {
    PageHit {
        lccn: "sn84026749".into(),
        issue_date: NaiveDate::from_ymd_opt(1882, 5, 6).unwrap(),
        edition: 1,
        page_seq: 3,
        state: "California".into(),
        title: "The daily alta California".into(),
        ocr_url: "https://chroniclingamerica.loc.gov/lccn/sn84026749/1882-05-06/ed-1/seq-3/ocr.txt".into(),
    }
}

fn raw_token() -> impl Strategy<Value = String> {
    prop_oneof![
        3 => Just("coolie".to_string()),
        1 => Just("COOLIE.".to_string()),
        1 => Just("\"Coolie,\"".to_string()),
        2 => prop::sample::select(vec!["cooli", "coolies", "coolie-ship", "c00lie", "oolie"]).prop_map(String::from),
        1 => Just("--".to_string()),
        10 => "[a-zA-Z0-9]{1,8}[.,;]?",
    ]
}

fn document() -> impl Strategy<Value = String> {
    prop::collection::vec((raw_token(), prop::sample::select(vec![" ", "  ", "\n", "\t"])), 0..120)
        .prop_map(|parts| parts.into_iter().map(|(t, sep)| t + sep).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn one_snippet_per_exact_match(text in document(), radius in 1usize..15) {
        let h = hit();
        let snippets = extract_snippets(&h, &text, "coolie", radius);
        let matches = tokenize(&text).iter().filter(|t| *t == "coolie").count();
        prop_assert_eq!(snippets.len(), matches);
        for (k, s) in snippets.iter().enumerate() {
            prop_assert_eq!(&s.tokens[s.keyword_index], "coolie");
            prop_assert!(!s.tokens.is_empty() && s.tokens.len() <= 2 * radius + 1);
            prop_assert!(s.keyword_index <= radius && s.tokens.len() - s.keyword_index - 1 <= radius);
            prop_assert_eq!(s.state.as_str(), "California");
            prop_assert_eq!(s.issue_date, h.issue_date);
            prop_assert_eq!(&s.lccn, &h.lccn);
            let suffix = format!("_m{}", k);
            prop_assert!(s.snippet_id.ends_with(&suffix));
        }
        prop_assert_eq!(extract_snippets(&h, &text, "coolie", radius), snippets);
    }

    #[test]
    fn windows_are_maximal(text in document()) {
        // A window is cut short only by the ends of the text.
        let tokens = tokenize(&text);
        let snippets = extract_snippets(&hit(), &text, "coolie", DEFAULT_RADIUS);
        let positions: Vec<usize> = (0..tokens.len()).filter(|&i| tokens[i] == "coolie").collect();
        for (s, &i) in snippets.iter().zip(&positions) {
            prop_assert_eq!(s.keyword_index, i.min(DEFAULT_RADIUS));
            prop_assert_eq!(s.tokens.len() - s.keyword_index - 1, (tokens.len() - 1 - i).min(DEFAULT_RADIUS));
        }
    }
}

#[test]
fn empty_and_near_miss_documents() {
    assert!(extract_snippets(&hit(), "", "coolie", 10).is_empty());
    assert!(extract_snippets(&hit(), "cooli coolies c00lie coolie's", "coolie", 10).is_empty());
}
