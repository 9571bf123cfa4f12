//! Institution tables: eligibility, period averaging and Type A/B/C labels.
//!
//! Type A institutions have stable `P_top10%/P`, `P_top5%/P_top50%` and
//! `P_top1%/P_top10%` ratios. Type B ratios fall from the first to the last,
//! Type C ratios rise.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::percentile::TopCounts;

/// Default relative spread up to which ratios count as stable.
pub const DEFAULT_STABILITY: f64 = 0.15;
/// Default minimum `P_top1%` per period for eligibility.
pub const DEFAULT_MIN_TOP1: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Counting {
    Fractional,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstitutionPeriodRow {
    pub institution: String,
    pub country: String,
    pub field: String,
    pub period: String,
    pub counting: Counting,
    pub papers: f64,
    pub p_top: TopCounts,
}

/// Maps table columns onto row fields.
///
/// Defaults follow the column names of the public Leiden Ranking CSV export;
/// other exports only need a different mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMapping {
    pub institution: String,
    pub country: String,
    pub field: String,
    pub period: String,
    pub counting: String,
    pub papers: String,
    pub p_top50: String,
    pub p_top10: String,
    pub p_top5: String,
    pub p_top1: String,
    /// Cell values (case-insensitive) meaning fractional counting.
    pub fractional_values: Vec<String>,
    /// Cell values (case-insensitive) meaning full counting.
    pub full_values: Vec<String>,
    pub delimiter: char,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            institution: "University".into(),
            country: "Country".into(),
            field: "Field".into(),
            period: "Period".into(),
            counting: "Frac_counting".into(),
            papers: "impact_P".into(),
            p_top50: "P_top50".into(),
            p_top10: "P_top10".into(),
            p_top5: "P_top5".into(),
            p_top1: "P_top1".into(),
            fractional_values: vec!["1".into(), "fractional".into(), "true".into()],
            full_values: vec!["0".into(), "full".into(), "false".into()],
            delimiter: ',',
        }
    }
}

impl ColumnMapping {
    fn required(&self) -> [(&'static str, &str); 10] {
        [
            ("institution", &self.institution),
            ("country", &self.country),
            ("field", &self.field),
            ("period", &self.period),
            ("counting", &self.counting),
            ("P", &self.papers),
            ("P_top50", &self.p_top50),
            ("P_top10", &self.p_top10),
            ("P_top5", &self.p_top5),
            ("P_top1", &self.p_top1),
        ]
    }

    fn counting_of(&self, raw: &str, row: usize) -> Result<Counting> {
        let raw = raw.trim();
        let matches = |vals: &[String]| vals.iter().any(|v| v.eq_ignore_ascii_case(raw));
        if matches(&self.fractional_values) {
            Ok(Counting::Fractional)
        } else if matches(&self.full_values) {
            Ok(Counting::Full)
        } else {
            Err(Error::row(
                row,
                format!("unrecognised counting method `{raw}`"),
            ))
        }
    }
}

fn parse_count(raw: &str, column: &str, row: usize) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::row(row, format!("column `{column}`: `{raw}` is not a number")))?;
    if !v.is_finite() || v < 0.0 {
        return Err(Error::row(
            row,
            format!("column `{column}`: count {v} must be non-negative"),
        ));
    }
    Ok(v)
}

/// Reads an institution table.
pub fn load_institution_table<R: Read>(
    source: R,
    mapping: &ColumnMapping,
) -> Result<Vec<InstitutionPeriodRow>> {
    if !mapping.delimiter.is_ascii() {
        return Err(Error::Schema("delimiter must be ASCII".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(mapping.delimiter as u8)
        .comment(Some(b'#'))
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let mut idx = BTreeMap::new();
    for (role, name) in mapping.required() {
        if name.is_empty() {
            return Err(Error::Schema(format!("no column mapped for `{role}`")));
        }
        let i = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        idx.insert(role, i);
    }

    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(i + 2);
        let cell = |role: &str| rec.get(idx[role]).unwrap_or("").trim();
        let num = |role: &str| parse_count(cell(role), role, line);
        let p_top = TopCounts {
            top50: num("P_top50")?,
            top10: num("P_top10")?,
            top5: num("P_top5")?,
            top1: num("P_top1")?,
        };
        rows.push(InstitutionPeriodRow {
            institution: cell("institution").to_string(),
            country: cell("country").to_string(),
            field: cell("field").to_string(),
            period: cell("period").to_string(),
            counting: mapping.counting_of(cell("counting"), line)?,
            papers: num("P")?,
            p_top,
        });
    }
    Ok(rows)
}

/// Institution identity within one field.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct InstitutionKey {
    pub institution: String,
    pub country: String,
    pub field: String,
}

impl InstitutionKey {
    fn of(row: &InstitutionPeriodRow) -> Self {
        Self {
            institution: row.institution.clone(),
            country: row.country.clone(),
            field: row.field.clone(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Eligibility {
    /// Fractional-counting rows of each kept institution, one per required period.
    pub eligible: BTreeMap<InstitutionKey, Vec<InstitutionPeriodRow>>,
    /// Institutions lacking at least one required period.
    pub missing_period: Vec<InstitutionKey>,
    /// Institutions below the `P_top1%` floor in some period.
    pub below_floor: Vec<InstitutionKey>,
}

impl Eligibility {
    pub fn countries(&self) -> BTreeSet<&str> {
        self.eligible.keys().map(|k| k.country.as_str()).collect()
    }
}

/// Keeps institutions with `P_top1% ≥ min_top1` in every required period
/// (fractional counting only).
pub fn filter_eligible(
    rows: &[InstitutionPeriodRow],
    min_top1: f64,
    required_periods: &[String],
) -> Result<Eligibility> {
    if required_periods.is_empty() {
        return Err(Error::Usage("no required periods given".into()));
    }
    let required: BTreeSet<&str> = required_periods.iter().map(String::as_str).collect();
    let mut by_inst: BTreeMap<InstitutionKey, BTreeMap<String, InstitutionPeriodRow>> =
        BTreeMap::new();
    for row in rows {
        if row.counting != Counting::Fractional || !required.contains(row.period.as_str()) {
            continue;
        }
        by_inst
            .entry(InstitutionKey::of(row))
            .or_default()
            .insert(row.period.clone(), row.clone());
    }
    let mut out = Eligibility::default();
    for (key, periods) in by_inst {
        if periods.len() < required.len() {
            log::info!(
                "excluding {} ({}): {} of {} periods present",
                key.institution,
                key.field,
                periods.len(),
                required.len()
            );
            out.missing_period.push(key);
            continue;
        }
        if periods.values().any(|r| r.p_top.top1 < min_top1) {
            out.below_floor.push(key);
            continue;
        }
        out.eligible.insert(key, periods.into_values().collect());
    }
    Ok(out)
}

/// The latest `n` distinct periods in the rows, by label order.
pub fn latest_periods(rows: &[InstitutionPeriodRow], n: usize) -> Vec<String> {
    let all: BTreeSet<&str> = rows.iter().map(|r| r.period.as_str()).collect();
    let skip = all.len().saturating_sub(n);
    all.into_iter().skip(skip).map(str::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRatios {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub periods_used: usize,
    pub dropped_periods: Vec<String>,
}

/// Per-period ratios averaged across periods. Periods with a zero
/// denominator are dropped.
pub fn mean_ratios(rows: &[InstitutionPeriodRow]) -> Result<MeanRatios> {
    let mut sums = [0.0; 3];
    let mut used = 0;
    let mut dropped = Vec::new();
    for r in rows {
        if !(r.papers > 0.0 && r.p_top.top50 > 0.0 && r.p_top.top10 > 0.0) {
            log::warn!(
                "{} {}: zero denominator, period dropped",
                r.institution,
                r.period
            );
            dropped.push(r.period.clone());
            continue;
        }
        sums[0] += r.p_top.top10 / r.papers;
        sums[1] += r.p_top.top5 / r.p_top.top50;
        sums[2] += r.p_top.top1 / r.p_top.top10;
        used += 1;
    }
    if used == 0 {
        return Err(Error::InsufficientData(
            "no period with positive denominators".into(),
        ));
    }
    let n = used as f64;
    Ok(MeanRatios {
        r1: sums[0] / n,
        r2: sums[1] / n,
        r3: sums[2] / n,
        periods_used: used,
        dropped_periods: dropped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InstitutionType {
    A,
    B,
    C,
}

impl fmt::Display for InstitutionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstitutionType::A => "A",
            InstitutionType::B => "B",
            InstitutionType::C => "C",
        })
    }
}

impl FromStr for InstitutionType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(InstitutionType::A),
            "B" | "b" => Ok(InstitutionType::B),
            "C" | "c" => Ok(InstitutionType::C),
            other => Err(Error::Usage(format!("unknown type `{other}`"))),
        }
    }
}

/// Denominator of the relative spread `(max − min) / d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpreadDenominator {
    #[default]
    Min,
    Max,
    Mean,
}

impl fmt::Display for SpreadDenominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpreadDenominator::Min => "min",
            SpreadDenominator::Max => "max",
            SpreadDenominator::Mean => "mean",
        })
    }
}

impl FromStr for SpreadDenominator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(SpreadDenominator::Min),
            "max" => Ok(SpreadDenominator::Max),
            "mean" => Ok(SpreadDenominator::Mean),
            other => Err(Error::Usage(format!(
                "unknown spread denominator `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyOptions {
    pub stability: f64,
    pub denominator: SpreadDenominator,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            stability: DEFAULT_STABILITY,
            denominator: SpreadDenominator::Min,
        }
    }
}

pub fn spread(r1: f64, r2: f64, r3: f64, denominator: SpreadDenominator) -> f64 {
    let max = r1.max(r2).max(r3);
    let min = r1.min(r2).min(r3);
    let d = match denominator {
        SpreadDenominator::Min => min,
        SpreadDenominator::Max => max,
        SpreadDenominator::Mean => (r1 + r2 + r3) / 3.0,
    };
    (max - min) / d
}

/// A if the spread is within the stability threshold, else B when
/// `R1 > R3` and C otherwise.
pub fn classify(r1: f64, r2: f64, r3: f64, options: &ClassifyOptions) -> Result<InstitutionType> {
    for r in [r1, r2, r3] {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("ratio {r} must be positive")));
        }
    }
    if spread(r1, r2, r3, options.denominator) <= options.stability {
        Ok(InstitutionType::A)
    } else if r1 > r3 {
        Ok(InstitutionType::B)
    } else {
        Ok(InstitutionType::C)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstitutionAssessment {
    pub institution: String,
    pub country: String,
    pub field: String,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub spread: f64,
    #[serde(rename = "type")]
    pub kind: InstitutionType,
    pub periods_used: usize,
}

impl InstitutionAssessment {
    pub fn from_ratios(
        key: InstitutionKey,
        r1: f64,
        r2: f64,
        r3: f64,
        periods_used: usize,
        options: &ClassifyOptions,
    ) -> Result<Self> {
        let kind = classify(r1, r2, r3, options)?;
        Ok(Self {
            institution: key.institution,
            country: key.country,
            field: key.field,
            r1,
            r2,
            r3,
            spread: spread(r1, r2, r3, options.denominator),
            kind,
            periods_used,
        })
    }
}

/// Averages and classifies every eligible institution.
pub fn assess(
    eligibility: &Eligibility,
    options: &ClassifyOptions,
) -> Result<Vec<InstitutionAssessment>> {
    eligibility
        .eligible
        .iter()
        .map(|(key, rows)| {
            let m = mean_ratios(rows)?;
            InstitutionAssessment::from_ratios(
                key.clone(),
                m.r1,
                m.r2,
                m.r3,
                m.periods_used,
                options,
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TypeCounts {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl TypeCounts {
    fn add(&mut self, t: InstitutionType) {
        match t {
            InstitutionType::A => self.a += 1,
            InstitutionType::B => self.b += 1,
            InstitutionType::C => self.c += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.a + self.b + self.c
    }
}

/// Type counts per field and country, plus per-field totals.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CountrySummary {
    pub rows: BTreeMap<String, BTreeMap<String, TypeCounts>>,
    pub totals: BTreeMap<String, TypeCounts>,
}

impl CountrySummary {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, field: &str, country: &str) -> Option<TypeCounts> {
        self.rows.get(field)?.get(country).copied()
    }
}

pub fn country_summary(assessments: &[InstitutionAssessment]) -> CountrySummary {
    let mut s = CountrySummary::default();
    for a in assessments {
        s.rows
            .entry(a.field.clone())
            .or_default()
            .entry(a.country.clone())
            .or_default()
            .add(a.kind);
        s.totals.entry(a.field.clone()).or_default().add(a.kind);
    }
    s
}
