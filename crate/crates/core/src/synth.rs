//! Synthetic corpora with known structure, and injectors for the three
//! deviation families.
//!
//! [`make_power_law_corpus`] draws a lognormal global list and selects group
//! members by position so that the group's local rank tracks `C · g^α`
//! exactly (up to flooring). The injectors then distort a group in a
//! controlled way.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{rank_global, PaperRecord, RankPolicy, RankedCorpus, GLOBAL};
use crate::error::{Error, Result};
use crate::percentile::percentile_threshold;
use crate::tails::{draw_lognormal, LognormalParams};

/// Label given to the synthetic group.
pub const SYNTH_GROUP: &str = "SYN";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub global_size: usize,
    pub group_size: usize,
    pub alpha: f64,
    pub lognormal: LognormalParams,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.group_size == 0 || self.group_size > self.global_size {
            return Err(Error::Domain(format!(
                "group size {} must lie in [1, {}]",
                self.group_size, self.global_size
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Domain(format!(
                "alpha {} must be positive",
                self.alpha
            )));
        }
        LognormalParams::new(self.lognormal.mu, self.lognormal.sigma)?;
        Ok(())
    }
}

fn paper_id(prefix: &str, i: usize) -> String {
    format!("{prefix}{i:07}")
}

/// Cumulative group count at global position `g` (1-based).
fn target_local_rank(group_size: usize, global_size: usize, alpha: f64, g: usize) -> usize {
    let frac = g as f64 / global_size as f64;
    (group_size as f64 * frac.powf(alpha) + 1e-9).floor() as usize
}

/// Builds a corpus whose group (labelled [`SYNTH_GROUP`]) lies on
/// `l = C · g^α`, `C = group_size / G^α`, with `g` the sorted position.
pub fn make_power_law_corpus(spec: &SyntheticSpec, policy: RankPolicy) -> Result<RankedCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let citations = draw_lognormal(&mut rng, spec.global_size, &spec.lognormal);
    let mut sorted: Vec<PaperRecord> = citations
        .into_iter()
        .enumerate()
        .map(|(i, c)| PaperRecord::new(paper_id("s", i), c))
        .collect();
    sorted.sort_by_key(|p| std::cmp::Reverse(p.citations));

    let mut members = 0;
    let mut previous = 0;
    for (i, paper) in sorted.iter_mut().enumerate() {
        let level = target_local_rank(spec.group_size, spec.global_size, spec.alpha, i + 1);
        if level > previous {
            paper.groups.insert(SYNTH_GROUP.to_string());
            members += 1;
            previous = level;
        }
    }
    if members == 0 {
        return Err(Error::Domain("parameters produce an empty group".into()));
    }
    // already sorted, so ranking keeps this order
    rank_global(sorted, policy)
}

/// A corpus whose group draws from a lognormal shifted by `mu_shift` in log
/// space relative to the rest of the global list.
pub fn make_lognormal_group_corpus(
    spec: &SyntheticSpec,
    mu_shift: f64,
    policy: RankPolicy,
) -> Result<RankedCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let others = draw_lognormal(
        &mut rng,
        spec.global_size - spec.group_size,
        &spec.lognormal,
    );
    let shifted = LognormalParams::new(spec.lognormal.mu + mu_shift, spec.lognormal.sigma)?;
    let group = draw_lognormal(&mut rng, spec.group_size, &shifted);
    let mut records: Vec<PaperRecord> = others
        .into_iter()
        .enumerate()
        .map(|(i, c)| PaperRecord::new(paper_id("s", i), c))
        .collect();
    records.extend(
        group
            .into_iter()
            .enumerate()
            .map(|(i, c)| PaperRecord::new(paper_id("g", i), c).with_group(SYNTH_GROUP)),
    );
    rank_global(records, policy)
}

/// Whether an injector may touch the global list or only group membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InjectionScope {
    /// New papers join both the group and the global list.
    #[default]
    GroupAndGlobal,
    /// The global list is left as is; only membership changes.
    GroupOnly,
}

#[derive(Debug, Clone)]
pub struct Injection {
    pub corpus: RankedCorpus,
    /// Papers added, removed or modified.
    pub affected: usize,
    pub warning: Option<String>,
}

fn check_group(corpus: &RankedCorpus, group: &str) -> Result<()> {
    if group == GLOBAL {
        return Err(Error::Domain(format!(
            "injectors act on a named group, not `{GLOBAL}`"
        )));
    }
    corpus.group_size(group).map(|_| ())
}

fn unique_prefix(corpus: &RankedCorpus, base: &str) -> String {
    let ids: BTreeSet<&str> = corpus.papers().iter().map(|p| p.id.as_str()).collect();
    let mut prefix = base.to_string();
    while ids
        .range(prefix.as_str()..)
        .next()
        .is_some_and(|id| id.starts_with(&prefix))
    {
        prefix.push('_');
    }
    prefix
}

/// Adds `extra` lowly cited papers (0, 1 or 2 citations, uniform) to a group.
///
/// Under [`InjectionScope::GroupOnly`] existing non-member papers at the drawn
/// citation level are relabelled instead, leaving the global list untouched.
pub fn inject_inflated_lower_tail(
    corpus: &RankedCorpus,
    group: &str,
    extra: usize,
    seed: u64,
    scope: InjectionScope,
) -> Result<Injection> {
    check_group(corpus, group)?;
    if extra == 0 {
        return Err(Error::Domain("extra must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = corpus.papers().to_vec();
    match scope {
        InjectionScope::GroupAndGlobal => {
            let prefix = unique_prefix(corpus, "lt");
            for i in 0..extra {
                let c = rng.random_range(0..=2u64);
                records.push(PaperRecord::new(paper_id(&prefix, i), c).with_group(group));
            }
        }
        InjectionScope::GroupOnly => {
            let mut pools: [Vec<usize>; 3] = Default::default();
            for (pos, p) in records.iter().enumerate() {
                if p.citations <= 2 && !p.groups.contains(group) {
                    pools[p.citations as usize].push(pos);
                }
            }
            for pool in pools.iter_mut() {
                pool.shuffle(&mut rng);
            }
            for _ in 0..extra {
                let level = rng.random_range(0..3usize);
                let pos = pools[level]
                    .pop()
                    .or_else(|| pools.iter_mut().find_map(|p| p.pop()))
                    .ok_or_else(|| {
                        Error::InsufficientData(format!(
                            "not enough non-member papers with 0-2 citations to add {extra}"
                        ))
                    })?;
                records[pos].groups.insert(group.to_string());
            }
        }
    }
    Ok(Injection {
        corpus: rank_global(records, corpus.policy())?,
        affected: extra,
        warning: None,
    })
}

/// Drops `remove_fraction` of the group's papers below the global median from
/// the group. The papers stay in the global list.
pub fn inject_deflated_lower_tail(
    corpus: &RankedCorpus,
    group: &str,
    remove_fraction: f64,
    seed: u64,
) -> Result<Injection> {
    check_group(corpus, group)?;
    if !(remove_fraction > 0.0 && remove_fraction < 1.0) {
        return Err(Error::Domain(format!(
            "remove fraction {remove_fraction} must lie in (0, 1)"
        )));
    }
    let median = percentile_threshold(corpus, 50.0)?;
    let mut below: Vec<usize> = corpus
        .group_positions(group)?
        .iter()
        .copied()
        .filter(|&pos| corpus.citations(pos) < median.c_star)
        .collect();
    let remove = (remove_fraction * below.len() as f64).round() as usize;
    if remove == 0 {
        let warning = format!(
            "group `{group}` has no removable papers below the global median ({} citations)",
            median.c_star
        );
        log::warn!("{warning}");
        return Ok(Injection {
            corpus: corpus.clone(),
            affected: 0,
            warning: Some(warning),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    below.shuffle(&mut rng);
    let mut records = corpus.papers().to_vec();
    for &pos in &below[..remove] {
        records[pos].groups.remove(group);
    }
    Ok(Injection {
        corpus: rank_global(records, corpus.policy())?,
        affected: remove,
        warning: None,
    })
}

/// Multiplies the citations of the group's `top_m` most cited papers by
/// `factor` (rounded) and re-ranks the global list.
pub fn inject_upper_tail_shift(
    corpus: &RankedCorpus,
    group: &str,
    top_m: usize,
    factor: f64,
) -> Result<Injection> {
    check_group(corpus, group)?;
    let positions = corpus.group_positions(group)?;
    if top_m > positions.len() {
        return Err(Error::Domain(format!(
            "top_m {top_m} exceeds group size {}",
            positions.len()
        )));
    }
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::Domain(format!("factor {factor} must be positive")));
    }
    let mut records = corpus.papers().to_vec();
    for &pos in &positions[..top_m] {
        let c = records[pos].citations as f64 * factor;
        records[pos].citations = c.round() as u64;
    }
    Ok(Injection {
        corpus: rank_global(records, corpus.policy())?,
        affected: top_m,
        warning: None,
    })
}
