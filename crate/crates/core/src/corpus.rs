//! Citation corpus ingestion and tie-aware global ranking.
//!
//! A corpus is a flat list of papers, each carrying a citation count and a
//! (possibly empty) set of group labels such as a country or an institution.
//! [`rank_global`] sorts it once, by citations descending, and every other
//! analysis reads positions and ranks from the resulting [`RankedCorpus`].

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reserved label addressing the whole corpus.
pub const GLOBAL: &str = "GLOBAL";

/// One publication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub id: String,
    pub citations: u64,
    pub groups: BTreeSet<String>,
}

impl PaperRecord {
    pub fn new(id: impl Into<String>, citations: u64) -> Self {
        Self {
            id: id.into(),
            citations,
            groups: BTreeSet::new(),
        }
    }

    pub fn with_group(mut self, group: impl Into<String>) -> Self {
        self.groups.insert(group.into());
        self
    }

    pub fn in_group(&self, group: &str) -> bool {
        group == GLOBAL || self.groups.contains(group)
    }
}

/// How papers with equal citation counts share global ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankPolicy {
    /// Tied papers share the arithmetic mean of the rank range they occupy.
    #[default]
    Mean,
    /// Tied papers share the smallest rank of the range (competition ranking).
    Min,
}

impl fmt::Display for RankPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankPolicy::Mean => f.write_str("mean"),
            RankPolicy::Min => f.write_str("min"),
        }
    }
}

impl FromStr for RankPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" | "mean-of-ties" => Ok(RankPolicy::Mean),
            "min" | "min-of-ties" => Ok(RankPolicy::Min),
            other => Err(Error::Usage(format!("unknown tie policy `{other}`"))),
        }
    }
}

/// Column mapping for corpus CSV files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusSchema {
    pub id_column: String,
    pub citations_column: String,
    pub group_columns: Vec<String>,
    pub delimiter: char,
}

impl Default for CorpusSchema {
    fn default() -> Self {
        Self {
            id_column: "id".to_string(),
            citations_column: "citations".to_string(),
            group_columns: vec!["group".to_string()],
            delimiter: ',',
        }
    }
}

impl CorpusSchema {
    pub fn validate(&self) -> Result<()> {
        if !self.delimiter.is_ascii() {
            return Err(Error::Schema(format!(
                "delimiter `{}` must be a single ASCII character",
                self.delimiter
            )));
        }
        let mut seen = HashSet::new();
        for name in std::iter::once(&self.id_column)
            .chain(std::iter::once(&self.citations_column))
            .chain(self.group_columns.iter())
        {
            if name.is_empty() {
                return Err(Error::Schema("column names must be non-empty".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("column `{name}` is named twice")));
            }
        }
        Ok(())
    }

    fn delimiter_byte(&self) -> u8 {
        self.delimiter as u8
    }
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn(name.to_string()))
}

/// Parses a citation cell. Only non-negative integers are accepted.
pub(crate) fn parse_citations(raw: &str, row: usize) -> Result<u64> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(Error::row(row, "empty citation value"));
    }
    if raw.starts_with('-') {
        return Err(Error::row(row, format!("negative citation count `{raw}`")));
    }
    raw.parse::<u64>().map_err(|_| {
        if raw.parse::<f64>().is_ok() {
            Error::row(row, format!("citation count `{raw}` is not an integer"))
        } else {
            Error::row(row, format!("citation count `{raw}` is not a number"))
        }
    })
}

/// Reads a delimiter-separated corpus with a header row.
///
/// Lines starting with `#` are treated as comments, so files written by this
/// crate (which carry a metadata header) can be read back directly.
pub fn load_corpus<R: Read>(source: R, schema: &CorpusSchema) -> Result<Vec<PaperRecord>> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter_byte())
        .comment(Some(b'#'))
        .flexible(false)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let id_idx = column_index(&headers, &schema.id_column)?;
    let cit_idx = column_index(&headers, &schema.citations_column)?;
    let group_idx = schema
        .group_columns
        .iter()
        .map(|c| column_index(&headers, c))
        .collect::<Result<Vec<_>>>()?;

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(i + 2);
        let id = row.get(id_idx).unwrap_or("").trim();
        if id.is_empty() {
            return Err(Error::row(line, "empty paper id"));
        }
        let citations = parse_citations(row.get(cit_idx).unwrap_or(""), line)?;
        let mut groups = BTreeSet::new();
        for &g in &group_idx {
            let label = row.get(g).unwrap_or("").trim();
            if label.is_empty() {
                continue;
            }
            if label == GLOBAL {
                return Err(Error::row(
                    line,
                    format!("group label `{GLOBAL}` is reserved"),
                ));
            }
            groups.insert(label.to_string());
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::Ingestion(format!(
                "duplicate paper id `{id}` at row {line}"
            )));
        }
        records.push(PaperRecord {
            id: id.to_string(),
            citations,
            groups,
        });
    }
    Ok(records)
}

/// Writes records using `schema`'s columns. Each paper may carry at most as
/// many groups as there are group columns.
pub fn write_corpus<W: Write>(
    records: &[PaperRecord],
    schema: &CorpusSchema,
    sink: W,
) -> Result<()> {
    schema.validate()?;
    let mut writer = csv::WriterBuilder::new()
        .delimiter(schema.delimiter_byte())
        .from_writer(sink);
    let mut header = vec![schema.id_column.as_str(), schema.citations_column.as_str()];
    header.extend(schema.group_columns.iter().map(String::as_str));
    writer.write_record(&header)?;
    for paper in records {
        if paper.groups.len() > schema.group_columns.len() {
            return Err(Error::Schema(format!(
                "paper `{}` has {} groups but the schema has {} group columns",
                paper.id,
                paper.groups.len(),
                schema.group_columns.len()
            )));
        }
        let citations = paper.citations.to_string();
        let mut row = vec![paper.id.as_str(), citations.as_str()];
        let mut groups = paper.groups.iter().map(String::as_str);
        for _ in &schema.group_columns {
            row.push(groups.next().unwrap_or(""));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// A corpus sorted by citations descending, with global ranks and group indexes.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct RankedCorpus {
    papers: Vec<PaperRecord>,
    ranks: Vec<f64>,
    policy: RankPolicy,
    group_index: BTreeMap<String, Vec<usize>>,
}

/// Sorts records by citations descending and assigns global ranks.
///
/// The sort is stable, so papers with equal citations keep their input order.
pub fn rank_global(records: Vec<PaperRecord>, policy: RankPolicy) -> Result<RankedCorpus> {
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut seen = HashSet::with_capacity(records.len());
    for r in &records {
        if r.id.is_empty() {
            return Err(Error::Ingestion("empty paper id".into()));
        }
        if !seen.insert(r.id.as_str()) {
            return Err(Error::Ingestion(format!("duplicate paper id `{}`", r.id)));
        }
        if r.groups.contains(GLOBAL) {
            return Err(Error::Ingestion(format!(
                "paper `{}` uses the reserved group label `{GLOBAL}`",
                r.id
            )));
        }
    }
    drop(seen);

    let mut papers = records;
    papers.sort_by_key(|p| std::cmp::Reverse(p.citations));

    let mut ranks = vec![0.0; papers.len()];
    let mut start = 0;
    while start < papers.len() {
        let c = papers[start].citations;
        let end = start + papers[start..].partition_point(|p| p.citations == c);
        let rank = match policy {
            RankPolicy::Min => (start + 1) as f64,
            RankPolicy::Mean => (start + 1 + end) as f64 / 2.0,
        };
        ranks[start..end].fill(rank);
        start = end;
    }

    let mut group_index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (pos, paper) in papers.iter().enumerate() {
        for g in &paper.groups {
            group_index.entry(g.clone()).or_default().push(pos);
        }
    }

    Ok(RankedCorpus {
        papers,
        ranks,
        policy,
        group_index,
    })
}

impl RankedCorpus {
    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    /// Number of papers in the global list, `G`.
    pub fn global_size(&self) -> usize {
        self.papers.len()
    }

    pub fn policy(&self) -> RankPolicy {
        self.policy
    }

    /// Global rank of the paper at sorted position `pos` (0-based).
    pub fn rank(&self, pos: usize) -> f64 {
        self.ranks[pos]
    }

    pub fn ranks(&self) -> &[f64] {
        &self.ranks
    }

    pub fn citations(&self, pos: usize) -> u64 {
        self.papers[pos].citations
    }

    /// Labels of every group present, excluding [`GLOBAL`].
    pub fn groups(&self) -> impl Iterator<Item = &str> {
        self.group_index.keys().map(String::as_str)
    }

    pub fn has_group(&self, group: &str) -> bool {
        group == GLOBAL || self.group_index.contains_key(group)
    }

    /// Sorted positions of a group's papers, in order of decreasing citations.
    pub fn group_positions(&self, group: &str) -> Result<Cow<'_, [usize]>> {
        if group == GLOBAL {
            return Ok(Cow::Owned((0..self.papers.len()).collect()));
        }
        self.group_index
            .get(group)
            .map(|v| Cow::Borrowed(v.as_slice()))
            .ok_or_else(|| Error::UnknownGroup(group.to_string()))
    }

    pub fn group_size(&self, group: &str) -> Result<usize> {
        if group == GLOBAL {
            return Ok(self.papers.len());
        }
        self.group_index
            .get(group)
            .map(Vec::len)
            .ok_or_else(|| Error::UnknownGroup(group.to_string()))
    }

    /// Half-open position range `[start, end)` of papers with exactly `citations`.
    pub fn tie_block(&self, citations: u64) -> (usize, usize) {
        let start = self.papers.partition_point(|p| p.citations > citations);
        let end = self.papers.partition_point(|p| p.citations >= citations);
        (start, end)
    }

    pub fn into_records(self) -> Vec<PaperRecord> {
        self.papers
    }
}
