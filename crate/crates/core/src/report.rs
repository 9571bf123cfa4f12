//! Output files: metadata headers and table writers.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Provenance attached to every emitted file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_digest: String,
    pub tie_policy: String,
    pub settings: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
}

impl Metadata {
    pub fn new<C: Serialize>(command: &str, config: &C, tie_policy: &str) -> Result<Self> {
        let canonical = serde_json::to_vec(config)?;
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_digest: hex::encode(Sha256::digest(&canonical)),
            tie_policy: tie_policy.to_string(),
            settings: BTreeMap::new(),
            generated_at: None,
        })
    }

    pub fn setting(mut self, key: &str, value: impl ToString) -> Self {
        self.settings.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_timestamp(mut self, enabled: bool) -> Self {
        self.generated_at =
            enabled.then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
        self
    }

    /// `# key: value` lines placed above a CSV header.
    pub fn write_comment_header<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "# tool: {} {}", self.tool, self.version)?;
        writeln!(w, "# command: {}", self.command)?;
        writeln!(w, "# config_digest: {}", self.config_digest)?;
        writeln!(w, "# tie_policy: {}", self.tie_policy)?;
        for (k, v) in &self.settings {
            writeln!(w, "# {k}: {v}")?;
        }
        if let Some(ts) = &self.generated_at {
            writeln!(w, "# generated_at: {ts}")?;
        }
        Ok(())
    }
}

/// Writes `rows` as CSV under a metadata comment header.
pub fn write_csv(
    path: &Path,
    meta: &Metadata,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    meta.write_comment_header(&mut file)?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    metadata: &'a Metadata,
    data: &'a T,
}

/// Writes `data` as pretty JSON wrapped with its metadata.
pub fn write_json<T: Serialize>(path: &Path, meta: &Metadata, data: &T) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(
        &mut file,
        &Envelope {
            metadata: meta,
            data,
        },
    )?;
    writeln!(file)?;
    file.flush()?;
    Ok(())
}

/// File-name-safe form of a group label.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn output_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

pub fn fmt_count(v: f64) -> String {
    format!("{v:.3}")
}

pub fn fmt_ratio(v: f64) -> String {
    format!("{v:.4}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_depends_on_config_only() {
        let a = Metadata::new("x", &("a", 1), "mean").unwrap();
        let b = Metadata::new("x", &("a", 1), "mean").unwrap();
        let c = Metadata::new("x", &("a", 2), "mean").unwrap();
        assert_eq!(a.config_digest, b.config_digest);
        assert_ne!(a.config_digest, c.config_digest);
        assert_eq!(a.config_digest.len(), 64);
    }

    #[test]
    fn comment_header_lines() {
        let m = Metadata::new("synth", &1, "min")
            .unwrap()
            .setting("seed", 7);
        let mut buf = Vec::new();
        m.write_comment_header(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().all(|l| l.starts_with("# ")));
        assert!(text.contains("# seed: 7"));
        assert!(!text.contains("generated_at"));
    }

    #[test]
    fn stems() {
        assert_eq!(file_stem("South Korea/KR"), "South_Korea_KR");
    }
}
