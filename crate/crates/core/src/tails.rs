//! Lower-tail diagnostics: logarithmic binning, lognormal fits and excess mass.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::percentile::PercentileSet;

/// Bin layout: singleton bins for 0, 1 and 2 citations, then integer bins
/// `[b_k, b_{k+1} − 1]` with `b_k = round(10^(start_exponent + step · k))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogBinSpec {
    pub start_exponent: f64,
    pub step: f64,
}

impl Default for LogBinSpec {
    /// Five bins per decade, the first geometric bin starting at 3.
    fn default() -> Self {
        Self {
            start_exponent: 0.5,
            step: 0.2,
        }
    }
}

/// Number of singleton bins (0, 1 and 2 citations).
pub const SPECIAL_BINS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bin {
    pub label: String,
    pub lower: u64,
    pub upper: u64,
}

impl Bin {
    fn new(lower: u64, upper: u64) -> Self {
        let label = if lower == upper {
            lower.to_string()
        } else {
            format!("{lower}-{upper}")
        };
        Self {
            label,
            lower,
            upper,
        }
    }

    pub fn contains(&self, citations: u64) -> bool {
        (self.lower..=self.upper).contains(&citations)
    }
}

impl LogBinSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite() && self.start_exponent.is_finite()) {
            return Err(Error::Domain(format!(
                "bin step {} must be positive and finite",
                self.step
            )));
        }
        if self.boundary(0) != 3 {
            return Err(Error::Domain(format!(
                "first geometric bin must start at 3, got {}",
                self.boundary(0)
            )));
        }
        Ok(())
    }

    /// Lower edge of geometric bin `k`.
    pub fn boundary(&self, k: usize) -> u64 {
        10f64
            .powf(self.start_exponent + self.step * k as f64)
            .round() as u64
    }

    /// Bins covering `0..=max_citations`.
    pub fn bins_upto(&self, max_citations: u64) -> Result<Vec<Bin>> {
        self.validate()?;
        let mut bins: Vec<Bin> = (0..SPECIAL_BINS as u64).map(|c| Bin::new(c, c)).collect();
        let mut k = 0;
        let mut lower = self.boundary(0);
        while lower <= max_citations {
            let next = self.boundary(k + 1);
            if next <= lower {
                return Err(Error::Domain(format!(
                    "bin boundaries not strictly increasing at {lower}; increase the step"
                )));
            }
            bins.push(Bin::new(lower, next - 1));
            lower = next;
            k += 1;
        }
        Ok(bins)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinWeight {
    pub bin: Bin,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogBinHistogram {
    pub spec: LogBinSpec,
    pub bins: Vec<BinWeight>,
    pub total: f64,
}

impl LogBinHistogram {
    pub fn weight(&self, label: &str) -> Option<f64> {
        self.bins
            .iter()
            .find(|b| b.bin.label == label)
            .map(|b| b.weight)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.bins.iter().map(|b| b.bin.label.as_str())
    }
}

/// Rejects negative counts from signed sources.
pub fn checked_counts(values: &[i64]) -> Result<Vec<u64>> {
    values
        .iter()
        .map(|&v| {
            u64::try_from(v).map_err(|_| Error::Domain(format!("negative citation count {v}")))
        })
        .collect()
}

pub fn log_binned_histogram(citations: &[u64], spec: &LogBinSpec) -> Result<LogBinHistogram> {
    let max = *citations
        .iter()
        .max()
        .ok_or_else(|| Error::InsufficientData("empty citation sample".into()))?;
    let bins = spec.bins_upto(max.max(SPECIAL_BINS as u64))?;
    let mut weights = vec![0.0; bins.len()];
    for &c in citations {
        let idx = if c < SPECIAL_BINS as u64 {
            c as usize
        } else {
            // bins are sorted by lower edge
            bins.partition_point(|b| b.lower <= c) - 1
        };
        debug_assert!(bins[idx].contains(c));
        weights[idx] += 1.0;
    }
    Ok(LogBinHistogram {
        spec: *spec,
        total: citations.len() as f64,
        bins: bins
            .into_iter()
            .zip(weights)
            .map(|(bin, weight)| BinWeight { bin, weight })
            .collect(),
    })
}

/// Rescales `hist` so its weight in `anchor_bin` equals the reference's.
pub fn scale_to_reference(
    hist: &LogBinHistogram,
    reference: &LogBinHistogram,
    anchor_bin: &str,
) -> Result<LogBinHistogram> {
    if hist.spec != reference.spec {
        return Err(Error::Scaling("histograms use different bin specs".into()));
    }
    let target = reference
        .weight(anchor_bin)
        .ok_or_else(|| Error::Scaling(format!("reference has no bin `{anchor_bin}`")))?;
    let current = hist
        .weight(anchor_bin)
        .ok_or_else(|| Error::Scaling(format!("histogram has no bin `{anchor_bin}`")))?;
    if !(target > 0.0 && current > 0.0) {
        return Err(Error::Scaling(format!(
            "anchor bin `{anchor_bin}` has zero weight"
        )));
    }
    let factor = target / current;
    let bins: Vec<BinWeight> = hist
        .bins
        .iter()
        .map(|b| BinWeight {
            bin: b.bin.clone(),
            weight: if b.bin.label == anchor_bin {
                target
            } else {
                b.weight * factor
            },
        })
        .collect();
    Ok(LogBinHistogram {
        spec: hist.spec,
        total: bins.iter().map(|b| b.weight).sum(),
        bins,
    })
}

/// Location and scale of `ln(citations)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalParams {
    pub mu: f64,
    pub sigma: f64,
}

impl LognormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
            return Err(Error::Domain(format!(
                "lognormal needs finite mu and sigma > 0 (got mu = {mu}, sigma = {sigma})"
            )));
        }
        Ok(Self { mu, sigma })
    }

    /// Probability that a rounded draw lands in `[lower, upper]`.
    pub fn bin_probability(&self, lower: u64, upper: u64) -> f64 {
        let normal = Normal::new(self.mu, self.sigma).expect("validated parameters");
        let cdf = |edge: f64| {
            if edge <= 0.0 {
                0.0
            } else {
                normal.cdf(edge.ln())
            }
        };
        cdf(upper as f64 + 0.5) - cdf(lower as f64 - 0.5)
    }
}

/// Draws `n` citation counts `round(exp(mu + sigma · Z))`, seeded.
pub fn synth_lognormal(n: usize, params: &LognormalParams, seed: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::Domain("sample size must be at least 1".into()));
    }
    let params = LognormalParams::new(params.mu, params.sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw_lognormal(&mut rng, n, &params))
}

pub(crate) fn draw_lognormal<R: rand::Rng>(
    rng: &mut R,
    n: usize,
    params: &LognormalParams,
) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            let v = (params.mu + params.sigma * z).exp().round();
            if v >= u64::MAX as f64 {
                u64::MAX
            } else {
                v.max(0.0) as u64
            }
        })
        .collect()
}

/// Minimum number of positive values for [`estimate_lognormal`].
pub const MIN_POSITIVE_SAMPLE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LognormalEstimate {
    pub params: LognormalParams,
    /// Positive values used.
    pub n: usize,
    /// Zero values left out of the fit.
    pub zeros_excluded: usize,
}

/// Sample mean and standard deviation of `ln c` over `c ≥ 1`.
pub fn estimate_lognormal(citations: &[u64]) -> Result<LognormalEstimate> {
    let logs: Vec<f64> = citations
        .iter()
        .filter(|&&c| c >= 1)
        .map(|&c| (c as f64).ln())
        .collect();
    let zeros = citations.len() - logs.len();
    if logs.len() < MIN_POSITIVE_SAMPLE {
        return Err(Error::InsufficientData(format!(
            "{} positive values; at least {MIN_POSITIVE_SAMPLE} needed",
            logs.len()
        )));
    }
    let n = logs.len() as f64;
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / (n - 1.0);
    let sigma = var.sqrt();
    // summation noise on a constant sample leaves sigma around 1e-16
    if sigma.is_nan() || sigma <= 1e-12 * mu.abs().max(1.0) {
        return Err(Error::InsufficientData(
            "zero variance in ln(citations); sigma undefined".into(),
        ));
    }
    Ok(LognormalEstimate {
        params: LognormalParams { mu, sigma },
        n: logs.len(),
        zeros_excluded: zeros,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinExcess {
    pub label: String,
    pub observed: f64,
    pub expected: f64,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcessReport {
    /// Bin holding the model's mode.
    pub mode_bin: String,
    /// Set when the model's binned shape has no interior mode.
    pub mode_undefined: bool,
    /// Factor mapping model probabilities to observed weights.
    pub scale: f64,
    /// Expected weight of every histogram bin.
    pub expected: Vec<f64>,
    /// Bins left of the mode.
    pub bins: Vec<BinExcess>,
    pub total_excess: f64,
    pub total_excess_fraction: f64,
}

/// Excess of observed papers over the fitted lognormal left of its mode.
///
/// Model bin probabilities are scaled so that the model matches the observed
/// weight from the mode bin rightwards; lower-tail mass therefore cannot
/// leak into the baseline.
pub fn lower_tail_excess(
    observed: &LogBinHistogram,
    model: &LognormalParams,
) -> Result<ExcessReport> {
    if observed.bins.is_empty() || observed.total.is_nan() || observed.total <= 0.0 {
        return Err(Error::InsufficientData("empty histogram".into()));
    }
    let model = LognormalParams::new(model.mu, model.sigma)?;
    let probs: Vec<f64> = observed
        .bins
        .iter()
        .map(|b| model.bin_probability(b.bin.lower, b.bin.upper))
        .collect();
    let argmax = probs
        .iter()
        .enumerate()
        .fold(0, |best, (i, &p)| if p > probs[best] { i } else { best });
    let last = probs.len() - 1;
    let mut mode = argmax;
    let mut mode_undefined = false;
    if argmax == last && last > 0 {
        mode_undefined = true;
        mode = SPECIAL_BINS.min(last);
    }
    let norm_obs: f64 = observed.bins[mode..].iter().map(|b| b.weight).sum();
    let norm_exp: f64 = probs[mode..].iter().sum();
    if !(norm_obs > 0.0 && norm_exp > 0.0) {
        return Err(Error::InsufficientData(
            "no observed or expected weight at or right of the mode".into(),
        ));
    }
    let scale = norm_obs / norm_exp;
    let expected: Vec<f64> = probs.iter().map(|p| p * scale).collect();
    let bins: Vec<BinExcess> = observed.bins[..mode]
        .iter()
        .zip(&expected)
        .map(|(b, &e)| BinExcess {
            label: b.bin.label.clone(),
            observed: b.weight,
            expected: e,
            excess: b.weight - e,
        })
        .collect();
    let total_excess: f64 = bins.iter().map(|b| b.excess).sum();
    Ok(ExcessReport {
        mode_bin: observed.bins[mode].bin.label.clone(),
        mode_undefined,
        scale,
        expected,
        bins,
        total_excess,
        total_excess_fraction: total_excess / observed.total,
    })
}

/// Share of a group's papers in the global bottom 50%: `1 − P_top50%/P`.
pub fn bottom50_share(ps: &PercentileSet) -> Result<f64> {
    if ps.papers == 0 {
        return Err(Error::InsufficientData(format!(
            "group `{}` is empty",
            ps.group
        )));
    }
    Ok(1.0 - ps.p_top.top50 / ps.papers as f64)
}
