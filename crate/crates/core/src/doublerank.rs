//! Double-rank analysis: group (local) ranks against global ranks.
//!
//! Under the ideal model the local rank `l` of a group's papers follows a power
//! law of their global rank, `l = C · g^α`. Two percentile anchors fix the
//! curve; departures of the group's most cited papers from it are measured in
//! log space on the global-rank axis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::RankedCorpus;
use crate::error::{Error, Result};
use crate::percentile::{PercentileSet, Ratio};

/// Default top fraction of global ranks examined for upper-tail deviations.
pub const DEFAULT_WINDOW: f64 = 0.02;
/// Default tolerance on the mean log residual.
pub const DEFAULT_TOLERANCE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleRankPoint {
    pub global_rank: f64,
    pub local_rank: usize,
}

/// Global rank of each group paper against its rank inside the group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubleRankSeries {
    pub group: String,
    pub global_size: usize,
    pub points: Vec<DoubleRankPoint>,
}

impl DoubleRankSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn double_rank_series(corpus: &RankedCorpus, group: &str) -> Result<DoubleRankSeries> {
    let positions = corpus.group_positions(group)?;
    if positions.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "group `{group}` has {} papers; a double-rank series needs at least 2",
            positions.len()
        )));
    }
    let points = positions
        .iter()
        .enumerate()
        .map(|(i, &pos)| DoubleRankPoint {
            global_rank: corpus.rank(pos),
            local_rank: i + 1,
        })
        .collect();
    Ok(DoubleRankSeries {
        group: group.to_string(),
        global_size: corpus.global_size(),
        points,
    })
}

/// A point fixing the reference curve: the group holds `count` papers in the
/// global top `fraction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub fraction: f64,
    pub count: f64,
}

impl Anchor {
    pub fn new(fraction: f64, count: f64) -> Self {
        Self { fraction, count }
    }
}

/// `l(g) = coeff · g^alpha` through two anchors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawReference {
    pub alpha: f64,
    pub coeff: f64,
    pub anchor_hi: Anchor,
    pub anchor_lo: Anchor,
    pub global_size: usize,
}

pub fn power_law_reference(
    anchor_hi: Anchor,
    anchor_lo: Anchor,
    global_size: usize,
) -> Result<PowerLawReference> {
    if global_size == 0 {
        return Err(Error::EmptyCorpus);
    }
    let (hi, lo) = (anchor_hi, anchor_lo);
    if !(hi.count > 0.0 && lo.count > 0.0) || !hi.count.is_finite() || !lo.count.is_finite() {
        return Err(Error::Domain(format!(
            "anchor counts must be positive (got {} and {})",
            hi.count, lo.count
        )));
    }
    if hi.fraction == lo.fraction {
        return Err(Error::Domain(format!(
            "degenerate anchors: both at fraction {}",
            hi.fraction
        )));
    }
    if !(lo.fraction > 0.0 && lo.fraction < hi.fraction && hi.fraction <= 1.0) {
        return Err(Error::Domain(format!(
            "anchor fractions must satisfy 0 < lo < hi <= 1 (got lo = {}, hi = {})",
            lo.fraction, hi.fraction
        )));
    }
    if lo.count >= hi.count {
        return Err(Error::Domain(format!(
            "the narrower anchor must hold fewer papers ({} >= {})",
            lo.count, hi.count
        )));
    }
    let alpha = (hi.count / lo.count).ln() / (hi.fraction / lo.fraction).ln();
    let coeff = hi.count / (hi.fraction * global_size as f64).powf(alpha);
    Ok(PowerLawReference {
        alpha,
        coeff,
        anchor_hi: hi,
        anchor_lo: lo,
        global_size,
    })
}

impl PowerLawReference {
    /// The reference of the global list against itself.
    pub fn identity(global_size: usize) -> Self {
        let g = global_size as f64;
        Self {
            alpha: 1.0,
            coeff: 1.0,
            anchor_hi: Anchor::new(1.0, g),
            anchor_lo: Anchor::new(0.1, 0.1 * g),
            global_size,
        }
    }

    pub fn expected_local_rank(&self, global_rank: f64) -> Result<f64> {
        if !(global_rank >= 1.0 && global_rank <= self.global_size as f64) {
            return Err(Error::Domain(format!(
                "global rank {global_rank} outside [1, {}]",
                self.global_size
            )));
        }
        Ok(self.eval(global_rank))
    }

    fn eval(&self, global_rank: f64) -> f64 {
        self.coeff * global_rank.powf(self.alpha)
    }

    /// Global rank at which the curve reaches `local_rank`.
    pub fn expected_global_rank(&self, local_rank: f64) -> f64 {
        (local_rank / self.coeff).powf(1.0 / self.alpha)
    }

    /// Expected number of group papers in the global top `fraction`, beyond
    /// the narrower anchor.
    pub fn extrapolate_breakthrough(&self, fraction: f64) -> Result<Extrapolation> {
        if !(fraction > 0.0 && fraction < self.anchor_lo.fraction) {
            return Err(Error::Domain(format!(
                "breakthrough fraction {fraction} must lie in (0, {})",
                self.anchor_lo.fraction
            )));
        }
        Ok(Extrapolation {
            fraction,
            expected_count: self.eval(fraction * self.global_size as f64),
            extrapolated: true,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrapolation {
    pub fraction: f64,
    pub expected_count: f64,
    /// Always set: the value lies outside the anchored range.
    pub extrapolated: bool,
}

/// Which two group counts anchor the reference curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorPair {
    pub hi: AnchorLevel,
    pub lo: AnchorLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorLevel {
    P,
    Top50,
    Top10,
    Top5,
    Top1,
}

impl AnchorLevel {
    pub fn fraction(self) -> f64 {
        match self {
            AnchorLevel::P => 1.0,
            AnchorLevel::Top50 => 0.5,
            AnchorLevel::Top10 => 0.1,
            AnchorLevel::Top5 => 0.05,
            AnchorLevel::Top1 => 0.01,
        }
    }

    pub fn count(self, ps: &PercentileSet) -> f64 {
        match self {
            AnchorLevel::P => ps.papers as f64,
            AnchorLevel::Top50 => ps.p_top.top50,
            AnchorLevel::Top10 => ps.p_top.top10,
            AnchorLevel::Top5 => ps.p_top.top5,
            AnchorLevel::Top1 => ps.p_top.top1,
        }
    }
}

impl fmt::Display for AnchorLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnchorLevel::P => "P",
            AnchorLevel::Top50 => "top50",
            AnchorLevel::Top10 => "top10",
            AnchorLevel::Top5 => "top5",
            AnchorLevel::Top1 => "top1",
        })
    }
}

impl FromStr for AnchorLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p" => Ok(AnchorLevel::P),
            "top50" => Ok(AnchorLevel::Top50),
            "top10" => Ok(AnchorLevel::Top10),
            "top5" => Ok(AnchorLevel::Top5),
            "top1" => Ok(AnchorLevel::Top1),
            other => Err(Error::Usage(format!("unknown anchor level `{other}`"))),
        }
    }
}

impl AnchorPair {
    /// `P` and `P_top10%`.
    pub const P_TOP10: AnchorPair = AnchorPair {
        hi: AnchorLevel::P,
        lo: AnchorLevel::Top10,
    };
    /// `P_top10%` and `P_top1%`.
    pub const TOP10_TOP1: AnchorPair = AnchorPair {
        hi: AnchorLevel::Top10,
        lo: AnchorLevel::Top1,
    };

    pub fn reference(&self, ps: &PercentileSet, global_size: usize) -> Result<PowerLawReference> {
        power_law_reference(
            Anchor::new(self.hi.fraction(), self.hi.count(ps)),
            Anchor::new(self.lo.fraction(), self.lo.count(ps)),
            global_size,
        )
    }
}

impl Default for AnchorPair {
    fn default() -> Self {
        AnchorPair::P_TOP10
    }
}

impl fmt::Display for AnchorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.hi, self.lo)
    }
}

impl FromStr for AnchorPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (hi, lo) = s
            .split_once(':')
            .ok_or_else(|| Error::Usage(format!("anchors `{s}` must look like `P:top10`")))?;
        let pair = AnchorPair {
            hi: hi.parse()?,
            lo: lo.parse()?,
        };
        if pair.hi >= pair.lo {
            return Err(Error::Usage(format!(
                "anchors `{s}`: the first level must be the wider one"
            )));
        }
        Ok(pair)
    }
}

/// Signed relative gaps between `P_top10%/P` and the other two ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioGaps {
    /// `(R1 − R2)/R1`
    pub gap_12: Ratio,
    /// `(R1 − R3)/R1`
    pub gap_13: Ratio,
}

/// Departure from the ratio equality that holds on an exact power law.
pub fn ratio_equality_gap(ps: &PercentileSet) -> RatioGaps {
    ratio_gaps(ps.r1, ps.r2, ps.r3)
}

pub fn ratio_gaps(r1: Ratio, r2: Ratio, r3: Ratio) -> RatioGaps {
    let gap = |other: Ratio| match (r1, other) {
        (Ratio::Value(a), Ratio::Value(b)) if a > 0.0 => Ratio::Value((a - b) / a),
        _ => Ratio::NotCalculable,
    };
    RatioGaps {
        gap_12: gap(r2),
        gap_13: gap(r3),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Conforming,
    /// The group's top papers sit at smaller global ranks than the reference.
    Undervalued,
    /// The group's top papers sit at larger global ranks than the reference.
    Overvalued,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Conforming => "conforming",
            Verdict::Undervalued => "undervalued",
            Verdict::Overvalued => "overvalued",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub group: String,
    pub window: f64,
    pub tolerance: f64,
    pub points_in_window: usize,
    /// Mean of `ln g_actual − ln g_reference(l)`; negative means undervalued.
    pub mean_log_residual: f64,
    pub max_abs_log_residual: f64,
    pub verdict: Verdict,
}

/// Compares the group's most cited papers with the reference curve.
///
/// For each point with `g ≤ window · G` the residual is the log ratio of the
/// actual global rank to the global rank at which the reference reaches the
/// same local rank.
pub fn upper_tail_deviation(
    series: &DoubleRankSeries,
    reference: &PowerLawReference,
    window: f64,
    tolerance: f64,
) -> Result<DeviationReport> {
    if !(window > 0.0 && window <= reference.anchor_lo.fraction) {
        return Err(Error::Domain(format!(
            "window {window} must lie in (0, {}]",
            reference.anchor_lo.fraction
        )));
    }
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::Domain(format!(
            "tolerance {tolerance} must be non-negative"
        )));
    }
    let limit = window * series.global_size as f64;
    let residuals: Vec<f64> = series
        .points
        .iter()
        .take_while(|p| p.global_rank <= limit)
        .map(|p| p.global_rank.ln() - reference.expected_global_rank(p.local_rank as f64).ln())
        .collect();
    if residuals.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} points of `{}` inside the top {window} window; at least 3 needed",
            residuals.len(),
            series.group
        )));
    }
    let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
    let max_abs = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let verdict = if mean < -tolerance {
        Verdict::Undervalued
    } else if mean > tolerance {
        Verdict::Overvalued
    } else {
        Verdict::Conforming
    };
    Ok(DeviationReport {
        group: series.group.clone(),
        window,
        tolerance,
        points_in_window: residuals.len(),
        mean_log_residual: mean,
        max_abs_log_residual: max_abs,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{rank_global, PaperRecord, RankPolicy, GLOBAL};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn hand_enumerated_series() {
        let recs = [9u64, 7, 5, 3, 1]
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let p = PaperRecord::new(format!("p{i}"), c);
                if c == 9 || c == 3 {
                    p.with_group("JP")
                } else {
                    p
                }
            })
            .collect();
        let c = rank_global(recs, RankPolicy::Mean).unwrap();
        let s = double_rank_series(&c, "JP").unwrap();
        let pts: Vec<_> = s
            .points
            .iter()
            .map(|p| (p.global_rank, p.local_rank))
            .collect();
        assert_eq!(pts, vec![(1.0, 1), (4.0, 2)]);

        let g = double_rank_series(&c, GLOBAL).unwrap();
        assert!(g
            .points
            .iter()
            .all(|p| p.global_rank == p.local_rank as f64));
        assert_eq!(g.points.last().unwrap().local_rank, 5);
    }

    #[test]
    fn single_paper_group_is_insufficient() {
        let recs = vec![
            PaperRecord::new("a", 1).with_group("X"),
            PaperRecord::new("b", 2),
        ];
        let c = rank_global(recs, RankPolicy::Mean).unwrap();
        assert!(matches!(
            double_rank_series(&c, "X"),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn one_decade_one_order() {
        let r =
            power_law_reference(Anchor::new(1.0, 1000.0), Anchor::new(0.1, 100.0), 50_000).unwrap();
        assert_relative_eq!(r.alpha, 1.0, max_relative = 1e-12);
        assert_relative_eq!(
            r.expected_local_rank(25_000.0).unwrap(),
            500.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn global_anchors_give_identity() {
        let g = 61_202usize;
        let r = power_law_reference(
            Anchor::new(1.0, g as f64),
            Anchor::new(0.1, 0.1 * g as f64),
            g,
        )
        .unwrap();
        assert_relative_eq!(r.alpha, 1.0, max_relative = 1e-12);
        assert_relative_eq!(r.coeff, 1.0, max_relative = 1e-12);
        assert_relative_eq!(
            PowerLawReference::identity(g)
                .expected_local_rank(42.0)
                .unwrap(),
            42.0
        );
    }

    #[test]
    fn anchor_errors() {
        assert!(matches!(
            power_law_reference(Anchor::new(1.0, 0.0), Anchor::new(0.1, 1.0), 10),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            power_law_reference(Anchor::new(0.1, 10.0), Anchor::new(0.1, 1.0), 10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn expected_rank_out_of_range() {
        let r = PowerLawReference::identity(100);
        assert!(r.expected_local_rank(0.5).is_err());
        assert!(r.expected_local_rank(101.0).is_err());
    }

    #[test]
    fn linear_breakthrough() {
        let r = power_law_reference(Anchor::new(1.0, 1000.0), Anchor::new(0.1, 100.0), 1_000_000)
            .unwrap();
        let e = r.extrapolate_breakthrough(0.0002).unwrap();
        assert_relative_eq!(e.expected_count, 0.2, max_relative = 1e-9);
        assert!(e.extrapolated);
        assert!(r.extrapolate_breakthrough(0.1).is_err());
        let id = PowerLawReference::identity(1_000_000);
        assert_relative_eq!(
            id.extrapolate_breakthrough(0.0001).unwrap().expected_count,
            100.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn gaps_from_table_rows() {
        let gaps = ratio_gaps(Ratio::Value(0.057), Ratio::Value(0.06), Ratio::Value(0.106));
        assert_abs_diff_eq!(gaps.gap_13.value().unwrap(), -0.86, epsilon = 0.005);
        let gaps = ratio_gaps(
            Ratio::Value(0.254),
            Ratio::Value(0.221),
            Ratio::Value(0.170),
        );
        assert_abs_diff_eq!(gaps.gap_13.value().unwrap(), 0.33, epsilon = 0.005);
        let gaps = ratio_gaps(Ratio::Value(0.1), Ratio::Value(0.1), Ratio::Value(0.1));
        assert_eq!(gaps.gap_12, Ratio::Value(0.0));
        assert_eq!(gaps.gap_13, Ratio::Value(0.0));
        let gaps = ratio_gaps(
            Ratio::Value(0.021),
            Ratio::Value(0.02),
            Ratio::NotCalculable,
        );
        assert_eq!(gaps.gap_13, Ratio::NotCalculable);
    }

    #[test]
    fn anchor_pair_parsing() {
        assert_eq!(
            "P:top10".parse::<AnchorPair>().unwrap(),
            AnchorPair::P_TOP10
        );
        assert_eq!(
            "top10:top1".parse::<AnchorPair>().unwrap(),
            AnchorPair::TOP10_TOP1
        );
        assert!("top1:top10".parse::<AnchorPair>().is_err());
        assert!("top10".parse::<AnchorPair>().is_err());
        assert_eq!(AnchorPair::TOP10_TOP1.to_string(), "top10:top1");
    }

    #[test]
    fn on_curve_series_conforms() {
        let reference = power_law_reference(
            Anchor::new(1.0, 1000.0),
            Anchor::new(0.1, 1000.0 * 0.1f64.powf(1.3)),
            100_000,
        )
        .unwrap();
        let points = (1..=200)
            .map(|l| DoubleRankPoint {
                global_rank: reference.expected_global_rank(l as f64),
                local_rank: l,
            })
            .collect();
        let series = DoubleRankSeries {
            group: "X".into(),
            global_size: 100_000,
            points,
        };
        let rep = upper_tail_deviation(&series, &reference, 0.02, 0.1).unwrap();
        assert_eq!(rep.verdict, Verdict::Conforming);
        assert!(rep.max_abs_log_residual < 1e-9);
        assert!(rep.points_in_window >= 3);
    }

    #[test]
    fn window_must_sit_inside_anchor() {
        let reference = PowerLawReference::identity(1000);
        let series = DoubleRankSeries {
            group: "X".into(),
            global_size: 1000,
            points: vec![],
        };
        assert!(matches!(
            upper_tail_deviation(&series, &reference, 0.5, 0.1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            upper_tail_deviation(&series, &reference, 0.02, 0.1),
            Err(Error::InsufficientData(_))
        ));
    }
}
