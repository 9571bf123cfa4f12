//! Fractional top-percentile indicators.
//!
//! The global list is cut at `x/100 · G` papers. Papers strictly above the
//! boundary citation count weigh 1; papers sitting exactly on it share the
//! leftover mass equally, so the global top-x% mass is exactly `x/100 · G`
//! whatever the ties. Group counts are sums of these weights.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{RankedCorpus, GLOBAL};
use crate::error::{Error, Result};

/// Percentile levels used by the indicator set, in percent.
pub const STANDARD_LEVELS: [f64; 4] = [50.0, 10.0, 5.0, 1.0];

/// Default minimum `P_top1%` below which `P_top1%/P_top10%` is not reported.
pub const DEFAULT_MIN_TOP1_FOR_R3: f64 = 1.0;

/// Global boundary for one percentile level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PercentileThreshold {
    pub level: f64,
    /// Citation count of the boundary tie block.
    pub c_star: u64,
    /// Papers with citations strictly above `c_star`.
    pub full_weight_above: usize,
    /// Papers with citations equal to `c_star`.
    pub at_threshold: usize,
    /// Weight given to each paper at `c_star`.
    pub tie_fraction: f64,
    /// Target mass `level/100 · G`.
    pub mass: f64,
}

impl PercentileThreshold {
    pub fn weight(&self, citations: u64, mode: TieMode) -> f64 {
        match citations.cmp(&self.c_star) {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Less => 0.0,
            std::cmp::Ordering::Equal => match mode {
                TieMode::Fractional => self.tie_fraction,
                TieMode::Strict => 1.0,
            },
        }
    }
}

/// Treatment of papers tied at the boundary citation count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieMode {
    /// Boundary papers share the leftover mass.
    #[default]
    Fractional,
    /// Boundary papers count fully; the global mass may exceed `x/100 · G`.
    Strict,
}

fn check_level(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 100.0) {
        return Err(Error::Domain(format!(
            "percentile level {x} must lie strictly between 0 and 100"
        )));
    }
    Ok(())
}

/// Finds the boundary citation count and tie weight for the global top `x`%.
///
/// `c_star` is the citation count of the paper at position `ceil(x/100 · G)`,
/// so when the mass ends exactly on a block boundary the last block is taken
/// whole (`tie_fraction = 1`).
pub fn percentile_threshold(corpus: &RankedCorpus, x: f64) -> Result<PercentileThreshold> {
    check_level(x)?;
    let g = corpus.global_size();
    if g == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mass = x / 100.0 * g as f64;
    // Snap masses that are integral up to rounding noise, e.g. 0.1 * 70.
    let snapped = mass.round();
    let k = if (mass - snapped).abs() < 1e-9 * mass.max(1.0) {
        snapped as usize
    } else {
        mass.ceil() as usize
    }
    .clamp(1, g);
    let c_star = corpus.citations(k - 1);
    let (start, end) = corpus.tie_block(c_star);
    let at = end - start;
    let tie_fraction = ((mass - start as f64) / at as f64).clamp(0.0, 1.0);
    Ok(PercentileThreshold {
        level: x,
        c_star,
        full_weight_above: start,
        at_threshold: at,
        tie_fraction,
        mass,
    })
}

/// Weighted count of a group's papers that fall in the global top `x`%.
pub fn top_percentile_count(corpus: &RankedCorpus, group: &str, x: f64) -> Result<f64> {
    top_percentile_count_with(corpus, group, x, TieMode::Fractional)
}

pub fn top_percentile_count_with(
    corpus: &RankedCorpus,
    group: &str,
    x: f64,
    mode: TieMode,
) -> Result<f64> {
    let threshold = percentile_threshold(corpus, x)?;
    count_with_threshold(corpus, group, &threshold, mode)
}

fn count_with_threshold(
    corpus: &RankedCorpus,
    group: &str,
    t: &PercentileThreshold,
    mode: TieMode,
) -> Result<f64> {
    if group == GLOBAL {
        return Ok(match mode {
            TieMode::Fractional => t.mass,
            TieMode::Strict => (t.full_weight_above + t.at_threshold) as f64,
        });
    }
    let positions = corpus.group_positions(group)?;
    let mut above = 0usize;
    let mut at = 0usize;
    for &pos in positions.iter() {
        let c = corpus.citations(pos);
        if c > t.c_star {
            above += 1;
        } else if c == t.c_star {
            at += 1;
        } else {
            // positions are sorted by citations descending
            break;
        }
    }
    Ok(match mode {
        TieMode::Fractional => {
            above as f64 + at as f64 * (t.mass - t.full_weight_above as f64) / t.at_threshold as f64
        }
        TieMode::Strict => (above + at) as f64,
    })
}

/// A ratio that may be unavailable, rendered `N/C` in tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Ratio {
    Value(f64),
    NotCalculable,
}

impl Ratio {
    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Value(v) => Some(v),
            Ratio::NotCalculable => None,
        }
    }

    pub fn is_calculable(self) -> bool {
        matches!(self, Ratio::Value(_))
    }

    fn of(num: f64, den: f64) -> Self {
        if den > 0.0 {
            Ratio::Value(num / den)
        } else {
            Ratio::NotCalculable
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Value(v) => match f.precision() {
                Some(p) => write!(f, "{v:.p$}"),
                None => write!(f, "{v}"),
            },
            Ratio::NotCalculable => f.write_str("N/C"),
        }
    }
}

/// Fractional counts at the four standard levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopCounts {
    pub top50: f64,
    pub top10: f64,
    pub top5: f64,
    pub top1: f64,
}

impl TopCounts {
    pub fn get(&self, level: f64) -> Option<f64> {
        [
            (50.0, self.top50),
            (10.0, self.top10),
            (5.0, self.top5),
            (1.0, self.top1),
        ]
        .into_iter()
        .find(|&(l, _)| l == level)
        .map(|(_, v)| v)
    }

    /// Counts must shrink as the level narrows.
    pub fn is_monotone(&self) -> bool {
        self.top1 <= self.top5 && self.top5 <= self.top10 && self.top10 <= self.top50
    }
}

/// Indicator options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorOptions {
    pub tie_mode: TieMode,
    /// `P_top1%/P_top10%` is flagged not-calculable below this `P_top1%`.
    pub min_top1_for_r3: f64,
}

impl Default for IndicatorOptions {
    fn default() -> Self {
        Self {
            tie_mode: TieMode::Fractional,
            min_top1_for_r3: DEFAULT_MIN_TOP1_FOR_R3,
        }
    }
}

/// `P`, the fractional top counts and the three diagnostic ratios of a group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercentileSet {
    pub group: String,
    /// Number of papers in the group.
    pub papers: usize,
    pub p_top: TopCounts,
    /// `P_top10%/P`
    pub r1: Ratio,
    /// `P_top5%/P_top50%`
    pub r2: Ratio,
    /// `P_top1%/P_top10%`
    pub r3: Ratio,
    pub flags: Vec<String>,
}

impl PercentileSet {
    /// Assembles a set from precomputed counts, e.g. a published table row.
    pub fn from_counts(
        group: impl Into<String>,
        papers: usize,
        p_top: TopCounts,
        options: &IndicatorOptions,
    ) -> Self {
        let mut flags = Vec::new();
        let r1 = Ratio::of(p_top.top10, papers as f64);
        let r2 = Ratio::of(p_top.top5, p_top.top50);
        if !r2.is_calculable() {
            flags.push("R2:N/C (P_top50 = 0)".to_string());
        }
        let r3 = if p_top.top10 <= 0.0 {
            flags.push("R3:N/C (P_top10 = 0)".to_string());
            Ratio::NotCalculable
        } else if p_top.top1 < options.min_top1_for_r3 {
            flags.push(format!("R3:N/C (P_top1 < {})", options.min_top1_for_r3));
            Ratio::NotCalculable
        } else {
            Ratio::of(p_top.top1, p_top.top10)
        };
        if options.tie_mode == TieMode::Strict {
            flags.push("strict-ties".to_string());
        }
        Self {
            group: group.into(),
            papers,
            p_top,
            r1,
            r2,
            r3,
            flags,
        }
    }
}

/// Global thresholds at the four standard levels, computed once per corpus.
#[derive(Debug, Clone)]
pub struct StandardThresholds {
    pub top50: PercentileThreshold,
    pub top10: PercentileThreshold,
    pub top5: PercentileThreshold,
    pub top1: PercentileThreshold,
}

impl StandardThresholds {
    pub fn new(corpus: &RankedCorpus) -> Result<Self> {
        Ok(Self {
            top50: percentile_threshold(corpus, 50.0)?,
            top10: percentile_threshold(corpus, 10.0)?,
            top5: percentile_threshold(corpus, 5.0)?,
            top1: percentile_threshold(corpus, 1.0)?,
        })
    }

    pub fn all(&self) -> [&PercentileThreshold; 4] {
        [&self.top50, &self.top10, &self.top5, &self.top1]
    }
}

/// Computes the indicator set of `group` with default options.
pub fn indicator_set(corpus: &RankedCorpus, group: &str) -> Result<PercentileSet> {
    let thresholds = StandardThresholds::new(corpus)?;
    indicator_set_with(corpus, group, &thresholds, &IndicatorOptions::default())
}

pub fn indicator_set_with(
    corpus: &RankedCorpus,
    group: &str,
    thresholds: &StandardThresholds,
    options: &IndicatorOptions,
) -> Result<PercentileSet> {
    let papers = corpus.group_size(group)?;
    if papers == 0 {
        return Err(Error::InsufficientData(format!(
            "group `{group}` has no papers"
        )));
    }
    let count = |t: &PercentileThreshold| count_with_threshold(corpus, group, t, options.tie_mode);
    let p_top = TopCounts {
        top50: count(&thresholds.top50)?,
        top10: count(&thresholds.top10)?,
        top5: count(&thresholds.top5)?,
        top1: count(&thresholds.top1)?,
    };
    Ok(PercentileSet::from_counts(group, papers, p_top, options))
}
