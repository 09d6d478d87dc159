mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use scale_bench::chunking::{build_chunks, ChunkConfig, ExternalCounts};
use scale_bench::Manifesto;

/// Independent greedy packer: each chunk is the longest prefix of the
/// remaining statements that fits the budget, or a lone oversized statement.
fn reference(counts: &[usize], cfg: ChunkConfig) -> Vec<(usize, usize, usize, bool)> {
    let mut out = Vec::new();
    let mut s = 0;
    while s < counts.len() {
        if counts[s] > cfg.max_tokens {
            out.push((s, s + 1, counts[s], true));
            s += 1;
            continue;
        }
        let (mut e, mut t) = (s, 0);
        while e < counts.len() && counts[e] <= cfg.max_tokens && t + counts[e] <= cfg.max_tokens {
            t += counts[e];
            e += 1;
        }
        out.push((s, e, t, false));
        s = e;
    }
    out.retain(|c| c.2 >= cfg.min_tokens);
    out
}

fn fixture(counts: &[usize]) -> (Manifesto, ExternalCounts) {
    let codes = vec!["104"; counts.len()];
    let m = common::manifesto("m", "X", 2000, &codes);
    let map: HashMap<String, usize> = m.statements.iter().zip(counts).map(|(s, &c)| (s.id.clone(), c)).collect();
    (m, ExternalCounts::new("fixed", map))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matches_reference(counts in prop::collection::vec(prop_oneof![8 => 0usize..1500, 1 => 1500usize..6000], 0..60)) {
        let cfg = ChunkConfig::default();
        let (m, counter) = fixture(&counts);
        let chunks = build_chunks::<f64>(&m, &counter, cfg).unwrap();
        let expected = reference(&counts, cfg);
        prop_assert_eq!(chunks.len(), expected.len());
        for (k, (c, &(s, e, t, over))) in chunks.iter().zip(&expected).enumerate() {
            prop_assert_eq!(c.index, k);
            prop_assert_eq!(c.token_count, t);
            prop_assert_eq!(c.oversized, over);
            let ids: Vec<&str> = m.statements[s..e].iter().map(|s| s.id.as_str()).collect();
            prop_assert_eq!(c.statement_ids.iter().map(String::as_str).collect::<Vec<_>>(), ids);
            prop_assert!(c.token_count >= cfg.min_tokens);
            prop_assert!(c.oversized || c.token_count <= cfg.max_tokens);
            prop_assert!(!c.oversized || c.statement_ids.len() == 1);
        }
    }

    #[test]
    fn small_bounds_behave(counts in prop::collection::vec(0usize..20, 0..40), min in 1usize..10, extra in 1usize..20) {
        let cfg = ChunkConfig { max_tokens: min + extra, min_tokens: min };
        let (m, counter) = fixture(&counts);
        let chunks = build_chunks::<f64>(&m, &counter, cfg).unwrap();
        prop_assert_eq!(chunks.len(), reference(&counts, cfg).len());
        let mut last = None;
        for c in &chunks {
            let first: usize = c.statement_ids[0].rsplit('-').next().unwrap().parse().unwrap();
            prop_assert!(last.is_none_or(|l| first > l));
            last = Some(c.statement_ids.last().unwrap().rsplit('-').next().unwrap().parse::<usize>().unwrap());
        }
    }
}
