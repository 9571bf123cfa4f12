//! Ranking and fractional-counting properties checked against brute-force
//! oracles.

use proptest::prelude::*;

use citerank::corpus::{rank_global, PaperRecord, RankPolicy, RankedCorpus, GLOBAL};
use citerank::percentile::{indicator_set, percentile_threshold, top_percentile_count};

fn records(citations: &[u64], groups: &[u8]) -> Vec<PaperRecord> {
    citations
        .iter()
        .zip(groups)
        .enumerate()
        .map(|(i, (&c, &g))| PaperRecord::new(format!("p{i:05}"), c).with_group(format!("g{g}")))
        .collect()
}

/// Mean-of-ties rank of every citation value, by counting.
fn oracle_mean_rank(citations: &[u64], c: u64) -> f64 {
    let above = citations.iter().filter(|&&x| x > c).count() as f64;
    let equal = citations.iter().filter(|&&x| x == c).count() as f64;
    above + (equal + 1.0) / 2.0
}

/// Fractional top-x weight of one paper, by counting.
fn oracle_weight(citations: &[u64], c: u64, x: f64) -> f64 {
    let mass = x / 100.0 * citations.len() as f64;
    let above = citations.iter().filter(|&&v| v > c).count() as f64;
    let equal = citations.iter().filter(|&&v| v == c).count() as f64;
    ((mass - above) / equal).clamp(0.0, 1.0)
}

fn ranked(citations: &[u64], groups: &[u8], policy: RankPolicy) -> RankedCorpus {
    rank_global(records(citations, groups), policy).unwrap()
}

#[test]
fn distinct_citations_rank_as_a_permutation() {
    let n = 10_000u64;
    // a fixed odd multiplier permutes 0..n
    let citations: Vec<u64> = (0..n).map(|i| (i * 7_919) % n).collect();
    let groups = vec![0u8; citations.len()];
    let mean = ranked(&citations, &groups, RankPolicy::Mean);
    let min = ranked(&citations, &groups, RankPolicy::Min);
    assert_eq!(mean.ranks(), min.ranks());

    let mut expected: Vec<(u64, f64)> = citations.iter().map(|&c| (c, (n - c) as f64)).collect();
    expected.sort_by_key(|e| std::cmp::Reverse(e.0));
    for (pos, (c, rank)) in expected.iter().enumerate() {
        assert_eq!(mean.citations(pos), *c);
        assert_eq!(mean.rank(pos), *rank);
    }
    let mut seen: Vec<f64> = mean.ranks().to_vec();
    seen.sort_by(f64::total_cmp);
    assert!(seen.iter().enumerate().all(|(i, &r)| r == (i + 1) as f64));
}

fn corpus_strategy(
    max_len: usize,
    max_citation: u64,
) -> impl Strategy<Value = (Vec<u64>, Vec<u8>)> {
    (1..=max_len).prop_flat_map(move |n| {
        (
            prop::collection::vec(0..=max_citation, n),
            prop::collection::vec(0u8..3, n),
        )
    })
}

proptest! {
    #[test]
    fn mean_ranks_sum_to_triangular_number((cites, groups) in corpus_strategy(400, 15)) {
        let c = ranked(&cites, &groups, RankPolicy::Mean);
        let g = cites.len() as f64;
        let sum: f64 = c.ranks().iter().sum();
        prop_assert!((sum - g * (g + 1.0) / 2.0).abs() < 1e-6);
    }

    #[test]
    fn ranks_match_counting_oracle((cites, groups) in corpus_strategy(300, 10)) {
        let c = ranked(&cites, &groups, RankPolicy::Mean);
        for pos in 0..c.global_size() {
            prop_assert_eq!(c.rank(pos), oracle_mean_rank(&cites, c.citations(pos)));
        }
        let m = ranked(&cites, &groups, RankPolicy::Min);
        for pos in 0..m.global_size() {
            let above = cites.iter().filter(|&&x| x > m.citations(pos)).count();
            prop_assert_eq!(m.rank(pos), (above + 1) as f64);
        }
    }

    #[test]
    fn ranking_is_idempotent((cites, groups) in corpus_strategy(300, 10)) {
        let once = ranked(&cites, &groups, RankPolicy::Mean);
        let ranks = once.ranks().to_vec();
        let twice = rank_global(once.into_records(), RankPolicy::Mean).unwrap();
        prop_assert_eq!(twice.ranks(), &ranks[..]);
    }

    #[test]
    fn more_citations_never_rank_worse((cites, groups) in corpus_strategy(300, 20)) {
        let c = ranked(&cites, &groups, RankPolicy::Mean);
        for pos in 1..c.global_size() {
            prop_assert!(c.citations(pos - 1) >= c.citations(pos));
            prop_assert!(c.rank(pos - 1) <= c.rank(pos));
        }
    }

    #[test]
    fn group_counts_match_weight_oracle((cites, groups) in corpus_strategy(300, 8)) {
        let c = ranked(&cites, &groups, RankPolicy::Mean);
        for x in [50.0, 10.0, 5.0, 1.0] {
            for label in ["g0", "g1", "g2"] {
                if !c.has_group(label) {
                    continue;
                }
                let expected: f64 = cites
                    .iter()
                    .zip(&groups)
                    .filter(|(_, &g)| format!("g{g}") == label)
                    .map(|(&v, _)| oracle_weight(&cites, v, x))
                    .sum();
                let got = top_percentile_count(&c, label, x).unwrap();
                prop_assert!((got - expected).abs() < 1e-9, "{label} x={x}: {got} vs {expected}");
            }
        }
    }

    #[test]
    fn counts_are_scale_free((cites, groups) in corpus_strategy(200, 12), k in 2u64..50) {
        let base = ranked(&cites, &groups, RankPolicy::Mean);
        let scaled_cites: Vec<u64> = cites.iter().map(|c| c * k).collect();
        let scaled = ranked(&scaled_cites, &groups, RankPolicy::Mean);
        for x in [50.0, 10.0, 1.0] {
            for label in base.groups() {
                let a = top_percentile_count(&base, label, x).unwrap();
                let b = top_percentile_count(&scaled, label, x).unwrap();
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn adding_an_uncited_paper_never_lowers_group_counts(
        (cites, groups) in corpus_strategy(200, 12)
    ) {
        let base = ranked(&cites, &groups, RankPolicy::Mean);
        let mut more = records(&cites, &groups);
        more.push(PaperRecord::new("extra", 0));
        let grown = rank_global(more, RankPolicy::Mean).unwrap();
        let t = percentile_threshold(&grown, 10.0).unwrap();
        prop_assert!((t.mass - 0.1 * (cites.len() + 1) as f64).abs() < 1e-9);
        // the global top-10% mass grows by 0.1 and no group can lose weight
        for label in base.groups() {
            let before = top_percentile_count(&base, label, 10.0).unwrap();
            let after = top_percentile_count(&grown, label, 10.0).unwrap();
            prop_assert!(after + 1e-9 >= before);
        }
    }

    #[test]
    fn global_set_has_exact_tenths((cites, groups) in corpus_strategy(300, 6)) {
        let c = ranked(&cites, &groups, RankPolicy::Mean);
        let ps = indicator_set(&c, GLOBAL).unwrap();
        let g = cites.len() as f64;
        prop_assert!((ps.p_top.top10 - 0.1 * g).abs() < 1e-9);
        prop_assert!((ps.p_top.top50 - 0.5 * g).abs() < 1e-9);
        prop_assert!(ps.p_top.is_monotone());
    }
}
