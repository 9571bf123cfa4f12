//! Generators, injectors and lower-tail diagnostics on synthetic corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use citerank::corpus::{load_corpus, write_corpus, CorpusSchema, RankPolicy};
use citerank::doublerank::double_rank_series;
use citerank::percentile::indicator_set;
use citerank::synth::{
    inject_deflated_lower_tail, inject_inflated_lower_tail, make_lognormal_group_corpus,
    make_power_law_corpus, InjectionScope, SyntheticSpec, SYNTH_GROUP,
};
use citerank::tails::{
    estimate_lognormal, log_binned_histogram, lower_tail_excess, synth_lognormal, LogBinSpec,
    LognormalParams,
};

fn spec(global_size: usize, group_size: usize, alpha: f64, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        global_size,
        group_size,
        alpha,
        lognormal: LognormalParams::new(3.0, 1.1).unwrap(),
        seed,
    }
}

#[test]
fn double_rank_points_stay_within_one_local_rank_of_the_curve() {
    for alpha in [0.7, 1.0, 1.3, 1.8] {
        let s = spec(50_000, 800, alpha, 5);
        let corpus = make_power_law_corpus(&s, RankPolicy::Mean).unwrap();
        let positions = corpus.group_positions(SYNTH_GROUP).unwrap();
        let c = s.group_size as f64 / (s.global_size as f64).powf(alpha);
        for (i, &pos) in positions.iter().enumerate() {
            let g = (pos + 1) as f64;
            let l = (i + 1) as f64;
            assert!(
                (l - c * g.powf(alpha)).abs() <= 1.0 + 1e-9,
                "alpha {alpha}: g {g}, l {l}"
            );
        }
        let series = double_rank_series(&corpus, SYNTH_GROUP).unwrap();
        assert_eq!(series.points.last().unwrap().local_rank, positions.len());
    }
}

#[test]
fn generators_are_seed_deterministic() {
    let s = spec(20_000, 300, 1.2, 9);
    let a = make_power_law_corpus(&s, RankPolicy::Mean).unwrap();
    let b = make_power_law_corpus(&s, RankPolicy::Mean).unwrap();
    assert_eq!(a.papers(), b.papers());
    let c = make_lognormal_group_corpus(&s, 0.4, RankPolicy::Mean).unwrap();
    let d = make_lognormal_group_corpus(&s, 0.4, RankPolicy::Mean).unwrap();
    assert_eq!(c.papers(), d.papers());
}

#[test]
fn shifted_lognormal_group_outperforms_the_pool() {
    let s = spec(50_000, 2_000, 1.0, 17);
    let corpus = make_lognormal_group_corpus(&s, 0.5, RankPolicy::Mean).unwrap();
    let ps = indicator_set(&corpus, SYNTH_GROUP).unwrap();
    assert!(ps.r1.value().unwrap() > 0.1);
}

#[test]
fn synthetic_corpus_round_trips_through_csv() {
    let corpus = make_power_law_corpus(&spec(5_000, 200, 1.1, 3), RankPolicy::Mean).unwrap();
    let schema = CorpusSchema::default();
    let mut buf = Vec::new();
    write_corpus(corpus.papers(), &schema, &mut buf).unwrap();
    let back = load_corpus(buf.as_slice(), &schema).unwrap();
    assert_eq!(back.len(), corpus.global_size());
    let mut original = corpus.papers().to_vec();
    let mut reread = back;
    original.sort_by(|a, b| a.id.cmp(&b.id));
    reread.sort_by(|a, b| a.id.cmp(&b.id));
    assert_eq!(original, reread);
}

#[test]
fn group_only_inflation_leaves_counts_unchanged() {
    let base = make_power_law_corpus(&spec(50_000, 500, 1.0, 21), RankPolicy::Mean).unwrap();
    let before = indicator_set(&base, SYNTH_GROUP).unwrap();
    let inj =
        inject_inflated_lower_tail(&base, SYNTH_GROUP, 500, 4, InjectionScope::GroupOnly).unwrap();
    assert_eq!(inj.corpus.global_size(), base.global_size());
    let after = indicator_set(&inj.corpus, SYNTH_GROUP).unwrap();
    assert_eq!(after.papers, 1_000);
    assert_eq!(after.p_top, before.p_top);
}

#[test]
fn deflation_only_touches_group_membership() {
    let base = make_power_law_corpus(&spec(50_000, 500, 1.0, 22), RankPolicy::Mean).unwrap();
    let inj = inject_deflated_lower_tail(&base, SYNTH_GROUP, 0.5, 8).unwrap();
    assert_eq!(inj.corpus.global_size(), base.global_size());
    let before = indicator_set(&base, SYNTH_GROUP).unwrap();
    let after = indicator_set(&inj.corpus, SYNTH_GROUP).unwrap();
    assert_eq!(after.papers, before.papers - inj.affected);
    assert!((after.p_top.top10 - before.p_top.top10).abs() < 1e-9);
}

#[test]
fn lognormal_round_trip_at_mu_two() {
    let params = LognormalParams::new(2.0, 1.1).unwrap();
    for seed in 0..5 {
        let draws = synth_lognormal(100_000, &params, seed).unwrap();
        let est = estimate_lognormal(&draws).unwrap();
        assert!(
            (est.params.mu - 2.0).abs() <= 0.05,
            "seed {seed}: mu {}",
            est.params.mu
        );
        assert!(
            (est.params.sigma - 1.1).abs() <= 0.05,
            "seed {seed}: sigma {}",
            est.params.sigma
        );
        assert_eq!(est.n + est.zeros_excluded, draws.len());
    }
}

fn model() -> LognormalParams {
    LognormalParams::new(2.0, 1.1).unwrap()
}

#[test]
fn model_sample_shows_no_lower_tail_excess() {
    let spec = LogBinSpec::default();
    for seed in 0..5 {
        let draws = synth_lognormal(100_000, &model(), seed).unwrap();
        let hist = log_binned_histogram(&draws, &spec).unwrap();
        let report = lower_tail_excess(&hist, &model()).unwrap();
        assert!(!report.mode_undefined);
        assert!(
            report.total_excess_fraction.abs() <= 0.02,
            "seed {seed}: {}",
            report.total_excess_fraction
        );
    }
}

#[test]
fn injected_low_citation_mass_is_recovered() {
    let n = 100_000;
    let extra = 30_000;
    let mut draws = synth_lognormal(n, &model(), 12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    draws.extend((0..extra).map(|_| rng.random_range(0..=2u64)));
    let hist = log_binned_histogram(&draws, &LogBinSpec::default()).unwrap();
    let report = lower_tail_excess(&hist, &model()).unwrap();
    let injected = extra as f64 / (n + extra) as f64;
    assert!(
        (report.total_excess_fraction - injected).abs() <= 0.02,
        "excess {} vs injected {injected}",
        report.total_excess_fraction
    );
    for label in ["0", "1", "2"] {
        let bin = report.bins.iter().find(|b| b.label == label).unwrap();
        assert!(bin.excess > 0.0, "bin {label}: {}", bin.excess);
    }
}
