//! Command-line front end.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::classify::{
    assess, country_summary, filter_eligible, latest_periods, load_institution_table,
    ClassifyOptions, ColumnMapping, CountrySummary, InstitutionAssessment, InstitutionKey,
    SpreadDenominator, DEFAULT_MIN_TOP1, DEFAULT_STABILITY,
};
use crate::corpus::{
    load_corpus, rank_global, write_corpus, CorpusSchema, RankPolicy, RankedCorpus, GLOBAL,
};
use crate::doublerank::{
    double_rank_series, ratio_equality_gap, upper_tail_deviation, AnchorPair, DEFAULT_TOLERANCE,
    DEFAULT_WINDOW,
};
use crate::error::{Error, Result};
use crate::percentile::{
    indicator_set_with, top_percentile_count_with, IndicatorOptions, PercentileSet,
    StandardThresholds, TieMode, DEFAULT_MIN_TOP1_FOR_R3,
};
use crate::report::{file_stem, fmt_count, fmt_ratio, write_csv, write_json, Metadata};
use crate::synth::{
    inject_deflated_lower_tail, inject_inflated_lower_tail, inject_upper_tail_shift,
    make_power_law_corpus, InjectionScope, SyntheticSpec, SYNTH_GROUP,
};
use crate::tails::{
    bottom50_share, estimate_lognormal, log_binned_histogram, lower_tail_excess,
    scale_to_reference, LogBinSpec, LognormalParams,
};

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "citerank",
    version,
    about = "Top-percentile citation indicators and double-rank diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output directory.
    #[arg(long, global = true, env = "CITERANK_OUT", default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Omit the generation timestamp from output metadata.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// P, fractional P_top x% counts and ratios per group.
    Indicators(IndicatorsArgs),
    /// Double-rank series, power-law reference and upper-tail verdict for a group.
    Doublerank(DoubleRankArgs),
    /// Log-binned citation histogram, optional lognormal fit and scaling.
    Histogram(HistogramArgs),
    /// Type A/B/C classification of institutions.
    Classify(ClassifyArgs),
    /// Per-country type counts from an assessments file.
    Summary(SummaryArgs),
    /// Generate a synthetic power-law corpus, optionally with an injected deviation.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorpusInput {
    /// Corpus CSV.
    #[arg(long)]
    pub input: PathBuf,

    /// TOML file with `[corpus]` and `[institutions]` column mappings.
    #[arg(long)]
    pub schema: Option<PathBuf>,

    #[arg(long, value_parser = parse_policy, default_value = "mean")]
    pub tie_policy: RankPolicy,
}

fn parse_policy(s: &str) -> std::result::Result<RankPolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_anchors(s: &str) -> std::result::Result<AnchorPair, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_denominator(s: &str) -> std::result::Result<SpreadDenominator, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IndicatorsArgs {
    #[command(flatten)]
    pub corpus: CorpusInput,

    /// Groups to report (default: every group). GLOBAL is always included.
    #[arg(long)]
    pub group: Vec<String>,

    /// Percentile levels emitted as P_top columns.
    #[arg(long, value_delimiter = ',', default_value = "50,10,5,1")]
    pub percentiles: Vec<f64>,

    /// Count boundary ties fully instead of fractionally.
    #[arg(long)]
    pub strict_ties: bool,

    /// P_top1% below which P_top1%/P_top10% is reported N/C.
    #[arg(long, default_value_t = DEFAULT_MIN_TOP1_FOR_R3)]
    pub min_top1: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DoubleRankArgs {
    #[command(flatten)]
    pub corpus: CorpusInput,

    #[arg(long)]
    pub group: String,

    /// Anchor levels of the reference power law.
    #[arg(long, value_parser = parse_anchors, default_value = "P:top10")]
    pub anchors: AnchorPair,

    /// Top fraction of global ranks examined for deviations.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: f64,

    /// Tolerance on the mean log residual.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    /// Breakthrough fractions for extrapolation.
    #[arg(long, value_delimiter = ',', default_value = "0.0001,0.0002")]
    pub breakthrough: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HistogramArgs {
    #[command(flatten)]
    pub corpus: CorpusInput,

    /// Group to histogram (default GLOBAL).
    #[arg(long, default_value = GLOBAL)]
    pub group: String,

    /// Scale the histogram to this group's level in the anchor bin.
    #[arg(long)]
    pub reference_group: Option<String>,

    #[arg(long, default_value = "32-49")]
    pub anchor_bin: String,

    /// Fit a lognormal and report lower-tail excess.
    #[arg(long)]
    pub fit: bool,

    /// Use these lognormal parameters instead of fitting (`mu,sigma`).
    #[arg(long, value_delimiter = ',')]
    pub model: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    /// Institution table, or an assessments/ratios file with `--ratios`.
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long)]
    pub schema: Option<PathBuf>,

    /// Input holds precomputed ratios (institution,country,field,R1,R2,R3).
    #[arg(long)]
    pub ratios: bool,

    /// Fields to keep (default: all).
    #[arg(long)]
    pub field: Vec<String>,

    /// Required periods (default: the latest four in the table).
    #[arg(long, value_delimiter = ',')]
    pub periods: Vec<String>,

    #[arg(long, default_value_t = DEFAULT_MIN_TOP1)]
    pub min_top1: f64,

    #[arg(long, default_value_t = DEFAULT_STABILITY)]
    pub stability: f64,

    #[arg(long, value_parser = parse_denominator, default_value = "min")]
    pub denominator: SpreadDenominator,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SummaryArgs {
    /// Assessments CSV written by `classify`.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 100_000)]
    pub global_size: usize,

    #[arg(long, default_value_t = 1_000)]
    pub group_size: usize,

    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    #[arg(long, default_value_t = 3.0)]
    pub mu: f64,

    #[arg(long, default_value_t = 1.1)]
    pub sigma: f64,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// `inflate:EXTRA`, `deflate:FRACTION` or `shift:TOP_M:FACTOR`.
    #[arg(long)]
    pub inject: Option<String>,

    /// Let injections touch only group membership.
    #[arg(long)]
    pub group_only: bool,

    #[arg(long, value_parser = parse_policy, default_value = "mean")]
    pub tie_policy: RankPolicy,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default)]
struct SchemaConfig {
    corpus: CorpusSchema,
    institutions: ColumnMapping,
}

fn read_schema(path: Option<&Path>) -> Result<SchemaConfig> {
    match path {
        None => Ok(SchemaConfig::default()),
        Some(p) => Ok(toml::from_str(&fs::read_to_string(p)?)?),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot open {}: {e}", path.display()),
        ))
    })
}

fn load_ranked(input: &CorpusInput) -> Result<RankedCorpus> {
    let schema = read_schema(input.schema.as_deref())?;
    let records = load_corpus(open(&input.input)?, &schema.corpus)?;
    rank_global(records, input.tie_policy)
}

/// Files written by a command.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

struct Ctx<'a> {
    cli: &'a Cli,
    out: RunOutput,
}

impl Ctx<'_> {
    fn meta(&self, command: &str, tie_policy: &str) -> Result<Metadata> {
        Ok(Metadata::new(command, self.cli, tie_policy)?.with_timestamp(!self.cli.no_timestamp))
    }

    fn path(&mut self, stem: &str) -> PathBuf {
        let ext = match self.cli.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let p = self.cli.out.join(format!("{stem}.{ext}"));
        self.out.files.push(p.clone());
        p
    }

    fn json_path(&mut self, stem: &str) -> PathBuf {
        let p = self.cli.out.join(format!("{stem}.json"));
        self.out.files.push(p.clone());
        p
    }
}

/// Runs one command and writes its outputs.
pub fn run(cli: &Cli) -> Result<RunOutput> {
    fs::create_dir_all(&cli.out)?;
    let mut ctx = Ctx {
        cli,
        out: RunOutput::default(),
    };
    match &cli.command {
        Command::Indicators(a) => indicators(&mut ctx, a)?,
        Command::Doublerank(a) => doublerank(&mut ctx, a)?,
        Command::Histogram(a) => histogram(&mut ctx, a)?,
        Command::Classify(a) => classify_cmd(&mut ctx, a)?,
        Command::Summary(a) => summary(&mut ctx, a)?,
        Command::Synth(a) => synth(&mut ctx, a)?,
    }
    Ok(ctx.out)
}

fn check_set(ps: &PercentileSet) -> Result<()> {
    let p = ps.papers as f64 + 1e-9;
    let t = &ps.p_top;
    let in_range = [t.top50, t.top10, t.top5, t.top1]
        .iter()
        .all(|&v| (-1e-9..=p).contains(&v));
    if !in_range || !t.is_monotone() {
        return Err(Error::Invariant(format!(
            "inconsistent top counts for `{}`: {t:?}",
            ps.group
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct IndicatorRow {
    #[serde(flatten)]
    set: PercentileSet,
    levels: Vec<(f64, f64)>,
    bottom50_share: f64,
}

fn indicators(ctx: &mut Ctx, a: &IndicatorsArgs) -> Result<()> {
    for &x in &a.percentiles {
        percentile_threshold_check(x)?;
    }
    let corpus = load_ranked(&a.corpus)?;
    let mode = if a.strict_ties {
        TieMode::Strict
    } else {
        TieMode::Fractional
    };
    let options = IndicatorOptions {
        tie_mode: mode,
        min_top1_for_r3: a.min_top1,
    };
    let thresholds = StandardThresholds::new(&corpus)?;
    let mut groups = vec![GLOBAL.to_string()];
    if a.group.is_empty() {
        groups.extend(corpus.groups().map(str::to_string));
    } else {
        groups.extend(a.group.iter().filter(|g| *g != GLOBAL).cloned());
    }

    let mut rows = Vec::new();
    for g in &groups {
        let set = indicator_set_with(&corpus, g, &thresholds, &options)?;
        check_set(&set)?;
        let levels = a
            .percentiles
            .iter()
            .map(|&x| Ok((x, top_percentile_count_with(&corpus, g, x, mode)?)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(IndicatorRow {
            bottom50_share: bottom50_share(&set)?,
            set,
            levels,
        });
    }

    let mut meta = ctx
        .meta("indicators", &corpus.policy().to_string())?
        .setting("tie_mode", format!("{mode:?}").to_lowercase())
        .setting("min_top1_for_r3", a.min_top1)
        .setting("global_size", corpus.global_size());
    for t in thresholds.all() {
        meta = meta.setting(
            &format!("c_star_top{}", t.level),
            format!("{} (tie_fraction {:.6})", t.c_star, t.tie_fraction),
        );
    }
    let path = ctx.path("indicators");
    match ctx.cli.format {
        Format::Json => write_json(&path, &meta, &rows)?,
        Format::Csv => {
            let level_cols: Vec<String> =
                a.percentiles.iter().map(|x| format!("P_top{x}")).collect();
            let mut header = vec!["group", "P"];
            header.extend(level_cols.iter().map(String::as_str));
            header.extend(["R1", "R2", "R3", "bottom50_share", "flags"]);
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut v = vec![r.set.group.clone(), r.set.papers.to_string()];
                    v.extend(r.levels.iter().map(|&(_, c)| fmt_count(c)));
                    v.extend([r.set.r1, r.set.r2, r.set.r3].map(|x| format!("{x:.4}")));
                    v.push(fmt_ratio(r.bottom50_share));
                    v.push(r.set.flags.join("; "));
                    v
                })
                .collect();
            write_csv(&path, &meta, &header, &body)?;
        }
    }
    Ok(())
}

fn percentile_threshold_check(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 100.0) {
        return Err(Error::Usage(format!("percentile {x} outside (0, 100)")));
    }
    Ok(())
}

fn doublerank(ctx: &mut Ctx, a: &DoubleRankArgs) -> Result<()> {
    let corpus = load_ranked(&a.corpus)?;
    let thresholds = StandardThresholds::new(&corpus)?;
    let set = indicator_set_with(&corpus, &a.group, &thresholds, &IndicatorOptions::default())?;
    let series = double_rank_series(&corpus, &a.group)?;
    let reference = a.anchors.reference(&set, corpus.global_size())?;
    let deviation = upper_tail_deviation(&series, &reference, a.window, a.tolerance)?;
    let extrapolations = a
        .breakthrough
        .iter()
        .map(|&x| reference.extrapolate_breakthrough(x))
        .collect::<Result<Vec<_>>>()?;

    let meta = ctx
        .meta("doublerank", &corpus.policy().to_string())?
        .setting("anchors", a.anchors)
        .setting("window", a.window)
        .setting("tolerance", a.tolerance)
        .setting("group", &a.group)
        .setting("global_size", corpus.global_size());

    let stem = file_stem(&a.group);
    let series_path = ctx.path(&format!("doublerank_{stem}"));
    let rows: Vec<[f64; 4]> = series
        .points
        .iter()
        .map(|p| {
            let l = p.local_rank as f64;
            [
                p.global_rank,
                l,
                reference.coeff * p.global_rank.powf(reference.alpha),
                reference.expected_global_rank(l),
            ]
        })
        .collect();
    match ctx.cli.format {
        Format::Json => write_json(&series_path, &meta, &rows)?,
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r[0].to_string(),
                        (r[1] as usize).to_string(),
                        format!("{:.6}", r[2]),
                        format!("{:.6}", r[3]),
                    ]
                })
                .collect();
            write_csv(
                &series_path,
                &meta,
                &["g", "l_actual", "l_reference", "g_reference"],
                &body,
            )?;
        }
    }

    #[derive(Serialize)]
    struct Report<'a> {
        indicators: &'a PercentileSet,
        reference: &'a crate::doublerank::PowerLawReference,
        deviation: &'a crate::doublerank::DeviationReport,
        ratio_gaps: crate::doublerank::RatioGaps,
        breakthrough: &'a [crate::doublerank::Extrapolation],
    }
    let report_path = ctx.json_path(&format!("deviation_{stem}"));
    write_json(
        &report_path,
        &meta,
        &Report {
            indicators: &set,
            reference: &reference,
            deviation: &deviation,
            ratio_gaps: ratio_equality_gap(&set),
            breakthrough: &extrapolations,
        },
    )?;
    Ok(())
}

fn group_citations(corpus: &RankedCorpus, group: &str) -> Result<Vec<u64>> {
    Ok(corpus
        .group_positions(group)?
        .iter()
        .map(|&p| corpus.citations(p))
        .collect())
}

fn histogram(ctx: &mut Ctx, a: &HistogramArgs) -> Result<()> {
    let corpus = load_ranked(&a.corpus)?;
    let spec = LogBinSpec::default();
    let citations = group_citations(&corpus, &a.group)?;
    let mut hist = log_binned_histogram(&citations, &spec)?;
    if let Some(reference_group) = &a.reference_group {
        let reference = log_binned_histogram(&group_citations(&corpus, reference_group)?, &spec)?;
        hist = scale_to_reference(&hist, &reference, &a.anchor_bin)?;
    }

    let model = match (&a.model, a.fit) {
        (Some(m), _) => match m.as_slice() {
            &[mu, sigma] => Some(LognormalParams::new(mu, sigma)?),
            _ => {
                return Err(Error::Usage(format!(
                    "--model takes `mu,sigma`, got {} values",
                    m.len()
                )))
            }
        },
        (None, true) => Some(estimate_lognormal(&citations)?.params),
        (None, false) => None,
    };
    let excess = model
        .as_ref()
        .map(|m| lower_tail_excess(&hist, m))
        .transpose()?;

    let mut meta = ctx
        .meta("histogram", &corpus.policy().to_string())?
        .setting("group", &a.group)
        .setting(
            "bins",
            format!("round(10^({} + {}k))", spec.start_exponent, spec.step),
        );
    if let Some(r) = &a.reference_group {
        meta = meta
            .setting("scaled_to", r)
            .setting("anchor_bin", &a.anchor_bin);
    }
    if let Some(m) = &model {
        meta = meta
            .setting("model_mu", format!("{:.6}", m.mu))
            .setting("model_sigma", format!("{:.6}", m.sigma));
    }

    let stem = file_stem(&a.group);
    let path = ctx.path(&format!("histogram_{stem}"));
    match ctx.cli.format {
        Format::Json => write_json(&path, &meta, &(&hist, &excess))?,
        Format::Csv => {
            let mut header = vec!["bin_label", "lower", "upper", "weight"];
            if excess.is_some() {
                header.push("expected_weight");
            }
            let body: Vec<Vec<String>> = hist
                .bins
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let mut v = vec![
                        b.bin.label.clone(),
                        b.bin.lower.to_string(),
                        b.bin.upper.to_string(),
                        fmt_count(b.weight),
                    ];
                    if let Some(e) = &excess {
                        v.push(fmt_count(e.expected[i]));
                    }
                    v
                })
                .collect();
            write_csv(&path, &meta, &header, &body)?;
            if let Some(e) = &excess {
                let p = ctx.json_path(&format!("lower_tail_{stem}"));
                write_json(&p, &meta, e)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct RatioRow {
    institution: String,
    country: String,
    field: String,
    #[serde(rename = "R1")]
    r1: f64,
    #[serde(rename = "R2")]
    r2: f64,
    #[serde(rename = "R3")]
    r3: f64,
    #[serde(default)]
    periods_used: Option<usize>,
}

fn read_ratio_rows(path: &Path) -> Result<Vec<RatioRow>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(open(path)?);
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Row {
                row: i + 2,
                message: e.to_string(),
            })
        })
        .collect()
}

fn classify_cmd(ctx: &mut Ctx, a: &ClassifyArgs) -> Result<()> {
    let options = ClassifyOptions {
        stability: a.stability,
        denominator: a.denominator,
    };
    let keep_field = |f: &str| a.field.is_empty() || a.field.iter().any(|x| x == f);
    let mut meta_settings = vec![
        ("stability", a.stability.to_string()),
        ("denominator", a.denominator.to_string()),
    ];
    let mut eligibility_report = None;
    let assessments: Vec<InstitutionAssessment> = if a.ratios {
        read_ratio_rows(&a.input)?
            .into_iter()
            .filter(|r| keep_field(&r.field))
            .map(|r| {
                InstitutionAssessment::from_ratios(
                    InstitutionKey {
                        institution: r.institution,
                        country: r.country,
                        field: r.field,
                    },
                    r.r1,
                    r.r2,
                    r.r3,
                    r.periods_used.unwrap_or(1),
                    &options,
                )
            })
            .collect::<Result<_>>()?
    } else {
        let schema = read_schema(a.schema.as_deref())?;
        let rows: Vec<_> = load_institution_table(open(&a.input)?, &schema.institutions)?
            .into_iter()
            .filter(|r| keep_field(&r.field))
            .collect();
        let periods = if a.periods.is_empty() {
            latest_periods(&rows, 4)
        } else {
            a.periods.clone()
        };
        meta_settings.push(("periods", periods.join(",")));
        meta_settings.push(("min_top1", a.min_top1.to_string()));
        let eligibility = filter_eligible(&rows, a.min_top1, &periods)?;
        eligibility_report = Some(serde_json::json!({
            "eligible": eligibility.eligible.len(),
            "countries": eligibility.countries().len(),
            "missing_period": eligibility.missing_period.len(),
            "below_floor": eligibility.below_floor.len(),
        }));
        assess(&eligibility, &options)?
    };

    let mut meta = ctx.meta("classify", "n/a")?;
    for (k, v) in meta_settings {
        meta = meta.setting(k, v);
    }
    if let Some(e) = &eligibility_report {
        meta = meta
            .setting("eligible", &e["eligible"])
            .setting("countries", &e["countries"]);
    }
    write_assessments(ctx, &meta, &assessments)?;
    let summary = country_summary(&assessments);
    write_summary(ctx, &meta, &summary)?;
    Ok(())
}

fn write_assessments(ctx: &mut Ctx, meta: &Metadata, rows: &[InstitutionAssessment]) -> Result<()> {
    let path = ctx.path("assessments");
    match ctx.cli.format {
        Format::Json => write_json(&path, meta, &rows),
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.institution.clone(),
                        r.country.clone(),
                        r.field.clone(),
                        fmt_ratio(r.r1),
                        fmt_ratio(r.r2),
                        fmt_ratio(r.r3),
                        fmt_ratio(r.spread),
                        r.kind.to_string(),
                        r.periods_used.to_string(),
                    ]
                })
                .collect();
            write_csv(
                &path,
                meta,
                &[
                    "institution",
                    "country",
                    "field",
                    "R1",
                    "R2",
                    "R3",
                    "spread",
                    "type",
                    "periods_used",
                ],
                &body,
            )
        }
    }
}

fn write_summary(ctx: &mut Ctx, meta: &Metadata, s: &CountrySummary) -> Result<()> {
    let path = ctx.path("country_summary");
    match ctx.cli.format {
        Format::Json => write_json(&path, meta, s),
        Format::Csv => {
            let mut body = Vec::new();
            for (field, countries) in &s.rows {
                for (country, c) in countries {
                    body.push(vec![
                        field.clone(),
                        country.clone(),
                        c.a.to_string(),
                        c.b.to_string(),
                        c.c.to_string(),
                    ]);
                }
                let t = s.totals[field];
                body.push(vec![
                    field.clone(),
                    "Total".into(),
                    t.a.to_string(),
                    t.b.to_string(),
                    t.c.to_string(),
                ]);
            }
            write_csv(
                &path,
                meta,
                &["field", "country", "type_a", "type_b", "type_c"],
                &body,
            )
        }
    }
}

#[derive(Debug, Deserialize)]
struct AssessmentRow {
    institution: String,
    country: String,
    field: String,
    #[serde(rename = "R1")]
    r1: f64,
    #[serde(rename = "R2")]
    r2: f64,
    #[serde(rename = "R3")]
    r3: f64,
    #[serde(default)]
    spread: f64,
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    periods_used: usize,
}

fn summary(ctx: &mut Ctx, a: &SummaryArgs) -> Result<()> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(open(&a.input)?);
    let mut rows = Vec::new();
    for (i, rec) in r.deserialize::<AssessmentRow>().enumerate() {
        let rec = rec.map_err(|e| Error::Row {
            row: i + 2,
            message: e.to_string(),
        })?;
        rows.push(InstitutionAssessment {
            institution: rec.institution,
            country: rec.country,
            field: rec.field,
            r1: rec.r1,
            r2: rec.r2,
            r3: rec.r3,
            spread: rec.spread,
            kind: rec.kind.parse()?,
            periods_used: rec.periods_used,
        });
    }
    let meta = ctx.meta("summary", "n/a")?;
    write_summary(ctx, &meta, &country_summary(&rows))
}

fn synth(ctx: &mut Ctx, a: &SynthArgs) -> Result<()> {
    let spec = SyntheticSpec {
        global_size: a.global_size,
        group_size: a.group_size,
        alpha: a.alpha,
        lognormal: LognormalParams::new(a.mu, a.sigma)?,
        seed: a.seed,
    };
    let mut corpus = make_power_law_corpus(&spec, a.tie_policy)?;
    let scope = if a.group_only {
        InjectionScope::GroupOnly
    } else {
        InjectionScope::GroupAndGlobal
    };
    if let Some(inject) = &a.inject {
        let parts: Vec<&str> = inject.split(':').collect();
        let bad = || Error::Usage(format!("cannot parse injection `{inject}`"));
        let injection = match parts.as_slice() {
            ["inflate", n] => {
                let extra = n.parse().map_err(|_| bad())?;
                inject_inflated_lower_tail(&corpus, SYNTH_GROUP, extra, a.seed, scope)?
            }
            ["deflate", f] => {
                let frac = f.parse().map_err(|_| bad())?;
                inject_deflated_lower_tail(&corpus, SYNTH_GROUP, frac, a.seed)?
            }
            ["shift", m, f] => {
                let top_m = m.parse().map_err(|_| bad())?;
                let factor = f.parse().map_err(|_| bad())?;
                inject_upper_tail_shift(&corpus, SYNTH_GROUP, top_m, factor)?
            }
            _ => return Err(bad()),
        };
        if let Some(w) = injection.warning {
            ctx.out.warnings.push(w);
        }
        corpus = injection.corpus;
    }

    let meta = ctx
        .meta("synth", &a.tie_policy.to_string())?
        .setting("seed", a.seed)
        .setting("alpha", a.alpha)
        .setting("group", SYNTH_GROUP)
        .setting("inject", a.inject.as_deref().unwrap_or("none"));
    let path = ctx.path("corpus");
    match ctx.cli.format {
        Format::Json => write_json(&path, &meta, &corpus.papers())?,
        Format::Csv => {
            let mut file = std::io::BufWriter::new(File::create(&path)?);
            meta.write_comment_header(&mut file)?;
            write_corpus(corpus.papers(), &CorpusSchema::default(), &mut file)?;
        }
    }
    Ok(())
}
