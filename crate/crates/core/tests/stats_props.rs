use std::collections::BTreeMap;

use chrono::NaiveDate;
use newslens::snippet::Snippet;
use newslens::stats::{compute_log_odds, partition_by_group, GroupCounts, GroupingMode, GroupingPolicy, PriorCounts};
use proptest::prelude::*;

fn corpus() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(prop_oneof![1 => Just(0u64), 3 => 0u64..=100], 2..=50)
}

fn counts(label: &str, ys: &[u64]) -> GroupCounts {
    let mut c = GroupCounts::new(label);
    for (w, &y) in ys.iter().enumerate() {
        c.add(&format!("w{w:02}"), y);
    }
    c
}

/// Two corpora over a shared vocabulary with at least two pooled words.
fn pair() -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    corpus()
        .prop_flat_map(|a| {
            let n = a.len();
            (Just(a), prop::collection::vec(0u64..=100, n))
        })
        .prop_filter("both corpora need tokens and two pooled words", |(a, b)| {
            a.iter().sum::<u64>() > 0
                && b.iter().sum::<u64>() > 0
                && a.iter().zip(b).filter(|(x, y)| *x + *y > 0).count() >= 2
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn swap_negates_exactly((a, b) in pair()) {
        let (ci, cj) = (counts("i", &a), counts("j", &b));
        let fwd = compute_log_odds(&ci, &cj, &PriorCounts::pooled(&[&ci, &cj], 1.0).unwrap(), usize::MAX).unwrap();
        let back = compute_log_odds(&cj, &ci, &PriorCounts::pooled(&[&cj, &ci], 1.0).unwrap(), usize::MAX).unwrap();
        let back: BTreeMap<&str, (f64, f64)> = back.iter().map(|r| (r.word.as_str(), (r.delta, r.z))).collect();
        for r in &fwd {
            prop_assert_eq!(back[r.word.as_str()], (-r.delta, -r.z));
        }
    }

    #[test]
    fn rows_are_consistent((a, b) in pair(), strength in 0.01f64..10.0) {
        let (ci, cj) = (counts("i", &a), counts("j", &b));
        let prior = PriorCounts::pooled(&[&ci, &cj], strength).unwrap();
        let rows = compute_log_odds(&ci, &cj, &prior, usize::MAX).unwrap();
        for r in &rows {
            prop_assert!(r.z.is_finite() && r.delta.is_finite());
            prop_assert_eq!(r.z.signum() == r.delta.signum() || r.delta == 0.0, true);
            prop_assert_eq!(r.count_i, ci.get(&r.word));
            prop_assert_eq!(r.count_j, cj.get(&r.word));
        }
        prop_assert!(rows.windows(2).all(|w| w[0].z >= w[1].z));
    }

    #[test]
    fn prior_total_is_sum_of_word_priors((a, b) in pair()) {
        let (ci, cj) = (counts("i", &a), counts("j", &b));
        let prior = PriorCounts::pooled(&[&ci, &cj], 1.0).unwrap();
        let pooled: u64 = a.iter().chain(&b).sum();
        prop_assert_eq!(prior.a0, pooled as f64);
        prop_assert_eq!(prior.a0, prior.aw.values().sum::<f64>());
        prop_assert!(prior.aw.values().all(|&v| v > 0.0));
    }

    #[test]
    fn identical_corpora_score_zero(a in corpus().prop_filter("two words", |a| a.iter().filter(|&&y| y > 0).count() >= 2)) {
        let c = counts("i", &a);
        let rows = compute_log_odds(&c, &c, &PriorCounts::pooled(&[&c, &c], 1.0).unwrap(), usize::MAX).unwrap();
        prop_assert!(rows.iter().all(|r| r.delta == 0.0 && r.z == 0.0));
    }

    #[test]
    fn more_occurrences_raise_delta((a, b) in pair(), pick in any::<prop::sample::Index>()) {
        let (ci, cj) = (counts("i", &a), counts("j", &b));
        // The prior stays fixed while one count in corpus i grows.
        let prior = PriorCounts::pooled(&[&ci, &cj], 1.0).unwrap();
        let scored: Vec<String> = prior.aw.keys().cloned().collect();
        let word = pick.get(&scored).clone();
        let delta = |c: &GroupCounts| {
            compute_log_odds(c, &cj, &prior, usize::MAX).unwrap().into_iter().find(|r| r.word == word).unwrap().delta
        };
        let mut more = ci.clone();
        more.add(&word, 1);
        prop_assert!(delta(&more) > delta(&ci));
    }

    #[test]
    fn partition_covers_every_snippet(states in prop::collection::vec(
        prop::sample::select(vec!["Alabama", "Maine", "Puerto Rico", "Utah", "Hawaii", "ohio", "Virgin Islands"]), 0..40),
        rest in any::<bool>())
    {
        let mode = if rest { GroupingMode::RestOfUs } else { GroupingMode::ListedUnion };
        let snippets: Vec<Snippet> = states.iter().enumerate().map(|(i, s)| Snippet {
            snippet_id: format!("s{i}"),
            lccn: "x".into(),
            issue_date: NaiveDate::from_ymd_opt(1880, 1, 1).unwrap(),
            state: s.to_string(),
            keyword_index: 0,
            tokens: vec!["coolie".into()],
        }).collect();
        let p = partition_by_group(&snippets, &GroupingPolicy::standard(mode));
        prop_assert_eq!(p.confederate.len() + p.union.len() + p.excluded.len(), snippets.len());
        let allowed: &[&str] = if rest {
            &["Puerto Rico", "Virgin Islands"]
        } else {
            &["Puerto Rico", "Virgin Islands", "Utah", "Hawaii"]
        };
        prop_assert!(p.excluded.iter().all(|s| allowed.contains(&s.state.as_str())));
    }
}
