//! Weight-distribution collapse and exponent estimation.
//!
//! Link weights across snapshots follow a log-normal law whose scale `w0`
//! and shape `sigma` drift over time. Rescaling each snapshot by its own
//! moments collapses every weight histogram onto the single parabola
//! `y = x^2`, where `x = ln(w/w0)` and
//! `y = -2 sigma^2 * ln[ Prob{ln w} * sqrt(2 pi sigma^2) ]`.
//!
//! The module also estimates the slope-style exponents used throughout the
//! analysis — strength–GDP elasticity, the endpoint-strength correlation
//! exponent, and the strength–degree exponent — all as ordinary least
//! squares on log-transformed data, matching how the exponents are read off
//! log-log plots.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{GdpSeries, YearNetworkSet};
use crate::network::WeightedNetwork;

/// Default bin count for uniform-in-`ln` histograms.
pub const DEFAULT_LOG_BINS: usize = 40;
/// Default minimum samples per surviving collapse-histogram bin.
pub const DEFAULT_MIN_COUNT: usize = 10;
/// Default abscissa span (in decades of weight) for the endpoint-strength
/// correlation fit; the power-law bound concerns the large-weight limit.
pub const DEFAULT_FIT_DECADES: f64 = 3.0;

#[derive(Debug, Error, PartialEq)]
pub enum ScalingError {
    #[error("samples must be strictly positive, got {0}")]
    NonPositiveSample(f64),
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("log-weights have zero spread; collapse undefined")]
    DegenerateSigma,
    #[error("need at least {need} populated bins, got {got}")]
    TooFewBins { got: usize, need: usize },
    #[error("need at least {need} overlapping positive observations, got {got}")]
    InsufficientOverlap { got: usize, need: usize },
    #[error("abscissa spans fewer than 3 distinct values; slope undefined")]
    DegenerateAbscissa,
    #[error("need at least {need} edges, got {got}")]
    TooFewEdges { got: usize, need: usize },
    #[error("need at least {need} distinct degree classes, got {got}")]
    TooFewDegreeClasses { got: usize, need: usize },
}

/// Moment estimates of a log-normal weight distribution:
/// `w0 = exp(<ln w>)` and `sigma = sqrt(<(ln w)^2> - <ln w>^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogNormalParams {
    pub w0: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollapsePoint {
    /// `ln(w / w0)` at the bin centre.
    pub x: f64,
    /// `-2 sigma^2 * ln[ Prob{ln w} * sqrt(2 pi sigma^2) ]`.
    pub y: f64,
    /// Samples in the bin; 0 marks an analytically evaluated point.
    pub samples: usize,
}

/// Rescaled weight histogram; on log-normal data the points lie on `y = x^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseCurve {
    pub params: LogNormalParams,
    pub points: Vec<CollapsePoint>,
}

impl CollapseCurve {
    /// Keep only points with `|x| <= max_abs_x`, e.g. the well-populated
    /// core of a sampled histogram.
    pub fn restricted(&self, max_abs_x: f64) -> CollapseCurve {
        CollapseCurve {
            params: self.params,
            points: self
                .points
                .iter()
                .copied()
                .filter(|p| p.x.abs() <= max_abs_x)
                .collect(),
        }
    }
}

/// Least-squares slope on log-transformed data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    /// Intercept in log space: `ln y = exponent * ln x + intercept`.
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    /// Abscissa range actually used, in original (un-logged) units.
    pub range: (f64, f64),
}

fn checked_log_samples(samples: &[f64], need: usize) -> Result<Vec<f64>, ScalingError> {
    if samples.len() < need {
        return Err(ScalingError::TooFewSamples {
            got: samples.len(),
            need,
        });
    }
    samples
        .iter()
        .map(|&w| {
            if w > 0.0 && w.is_finite() {
                Ok(w.ln())
            } else {
                Err(ScalingError::NonPositiveSample(w))
            }
        })
        .collect()
}

/// Moment-based scale and shape of the log-normal weight law.
pub fn lognormal_params(weights: &[f64]) -> Result<LogNormalParams, ScalingError> {
    let logs = checked_log_samples(weights, 2)?;
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    // Identical samples must give sigma exactly zero; the accumulated mean
    // alone would leave rounding residue behind.
    let var = if logs.iter().all(|&l| l == logs[0]) {
        0.0
    } else {
        logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / n
    };
    Ok(LogNormalParams {
        w0: mean.exp(),
        sigma: var.sqrt(),
    })
}

/// The Fig.-style collapse transform applied to one density value.
fn collapse_y(density: f64, sigma: f64) -> f64 {
    -2.0 * sigma * sigma * (density * (2.0 * std::f64::consts::PI * sigma * sigma).sqrt()).ln()
}

/// Histogram `ln w` on `n_bins` uniform bins, normalize to a density, and
/// apply the collapse transform. Bins with fewer than `min_count` samples
/// are dropped (they carry large relative noise and break the `ln`).
pub fn collapse_curve(
    weights: &[f64],
    n_bins: usize,
    min_count: usize,
) -> Result<CollapseCurve, ScalingError> {
    assert!(n_bins > 0, "n_bins must be positive");
    let params = lognormal_params(weights)?;
    if params.sigma == 0.0 {
        return Err(ScalingError::DegenerateSigma);
    }
    let logs: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
    let (lo, hi) = logs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| {
            (lo.min(l), hi.max(l))
        });
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &l in &logs {
        let idx = (((l - lo) / width) as usize).min(n_bins - 1);
        counts[idx] += 1;
    }

    let n = logs.len() as f64;
    let ln_w0 = params.w0.ln();
    let points = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c >= min_count.max(1))
        .map(|(i, &c)| {
            let centre = lo + (i as f64 + 0.5) * width;
            let density = c as f64 / (n * width);
            CollapsePoint {
                x: centre - ln_w0,
                y: collapse_y(density, params.sigma),
                samples: c,
            }
        })
        .collect();
    Ok(CollapseCurve { params, points })
}

/// Collapse curve of the exact log-normal density evaluated at the given
/// rescaled abscissas. Substituting the closed-form density into the
/// transform gives `y = x^2` identically, so this is the zero-noise
/// reference the sampled curve is judged against.
pub fn analytic_collapse_curve(params: &LogNormalParams, xs: &[f64]) -> CollapseCurve {
    let sigma = params.sigma;
    let norm = (2.0 * std::f64::consts::PI * sigma * sigma).sqrt();
    let points = xs
        .iter()
        .map(|&x| {
            let density = (-x * x / (2.0 * sigma * sigma)).exp() / norm;
            CollapsePoint {
                x,
                y: collapse_y(density, sigma),
                samples: 0,
            }
        })
        .collect();
    CollapseCurve {
        params: *params,
        points,
    }
}

/// Mean squared residual of the curve against the reference parabola
/// `y = x^2`; zero for a perfect collapse.
pub fn parabola_gof(curve: &CollapseCurve) -> Result<f64, ScalingError> {
    if curve.points.len() < 3 {
        return Err(ScalingError::TooFewBins {
            got: curve.points.len(),
            need: 3,
        });
    }
    let ssr: f64 = curve
        .points
        .iter()
        .map(|p| (p.y - p.x * p.x).powi(2))
        .sum();
    Ok(ssr / curve.points.len() as f64)
}

/// Ordinary least squares of y on x over log-space points. Callers
/// guarantee at least 3 points; a zero-variance abscissa is rejected.
fn ols_loglog(points: &[(f64, f64)]) -> Result<PowerLawFit, ScalingError> {
    if points.len() < 3 {
        return Err(ScalingError::DegenerateAbscissa);
    }
    let (x_min, x_max) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    if x_min == x_max {
        return Err(ScalingError::DegenerateAbscissa);
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ScalingError::DegenerateAbscissa);
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = points
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(PowerLawFit {
        exponent: slope,
        intercept,
        stderr,
        range: (x_min.exp(), x_max.exp()),
    })
}

/// Strength–GDP elasticity: the slope of `ln s` against `ln G` over the
/// years where both series are positive. Unit elasticity means a country's
/// trade strength tracks its GDP proportionally.
pub fn elasticity_gamma(
    s_series: &BTreeMap<i32, f64>,
    g_series: &BTreeMap<i32, f64>,
) -> Result<PowerLawFit, ScalingError> {
    let points: Vec<(f64, f64)> = s_series
        .iter()
        .filter_map(|(year, &s)| {
            let &g = g_series.get(year)?;
            (s > 0.0 && g > 0.0).then(|| (g.ln(), s.ln()))
        })
        .collect();
    if points.len() < 3 {
        return Err(ScalingError::InsufficientOverlap {
            got: points.len(),
            need: 3,
        });
    }
    ols_loglog(&points)
}

#[derive(Debug, Clone, Serialize)]
pub struct CountryElasticity {
    pub country: String,
    pub fit: PowerLawFit,
}

/// Per-country elasticities over a year panel. Countries without enough
/// overlapping strength/GDP years (or with a degenerate GDP series) are
/// skipped rather than failing the whole panel.
pub fn elasticity_panel(networks: &YearNetworkSet, gdp: &[GdpSeries]) -> Vec<CountryElasticity> {
    gdp.iter()
        .filter_map(|series| {
            let strengths = networks.strength_series(&series.country);
            elasticity_gamma(&strengths, &series.entries)
                .ok()
                .map(|fit| CountryElasticity {
                    country: series.country.clone(),
                    fit,
                })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaBin {
    pub center: f64,
    pub count: usize,
    pub density: f64,
}

/// Distribution of per-country elasticities with an outlier-robust summary:
/// a handful of small economies fit implausibly steep slopes, so the mean
/// is reported both with and without values above `outlier_threshold`.
#[derive(Debug, Clone, Serialize)]
pub struct GammaDistribution {
    pub bins: Vec<GammaBin>,
    pub mean: f64,
    pub mean_excluding_outliers: f64,
    pub n_above_threshold: usize,
    pub outlier_threshold: f64,
}

pub fn gamma_distribution(
    gammas: &[f64],
    outlier_threshold: f64,
    n_bins: usize,
) -> GammaDistribution {
    assert!(!gammas.is_empty(), "need at least one elasticity");
    assert!(n_bins > 0, "n_bins must be positive");
    let n = gammas.len() as f64;
    let mean = gammas.iter().sum::<f64>() / n;
    let kept: Vec<f64> = gammas
        .iter()
        .copied()
        .filter(|&g| g <= outlier_threshold)
        .collect();
    let mean_excluding_outliers = if kept.is_empty() {
        f64::NAN
    } else {
        kept.iter().sum::<f64>() / kept.len() as f64
    };

    let (lo, hi) = gammas
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| {
            (lo.min(g), hi.max(g))
        });
    // Degenerate spread still deserves a histogram: use a unit-width bin.
    let (lo, hi) = if lo == hi { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &g in gammas {
        let idx = (((g - lo) / width) as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    let bins = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| GammaBin {
            center: lo + (i as f64 + 0.5) * width,
            count: c,
            density: c as f64 / (n * width),
        })
        .collect();

    GammaDistribution {
        bins,
        mean,
        mean_excluding_outliers,
        n_above_threshold: gammas.len() - kept.len(),
        outlier_threshold,
    }
}

/// Average a quantity within uniform `ln`-bins of an abscissa and return
/// per-bin `(mean ln abscissa, ln mean quantity)` fit points.
fn binned_loglog_points(
    pairs: &[(f64, f64)], // (abscissa > 0, quantity > 0)
    lo: f64,
    hi: f64,
    n_bins: usize,
) -> Vec<(f64, f64)> {
    let width = (hi - lo) / n_bins as f64;
    let mut sum_ln_x = vec![0.0; n_bins];
    let mut sum_q = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    for &(x, q) in pairs {
        let lx = x.ln();
        if lx < lo {
            continue;
        }
        let idx = (((lx - lo) / width) as usize).min(n_bins - 1);
        sum_ln_x[idx] += lx;
        sum_q[idx] += q;
        counts[idx] += 1;
    }
    (0..n_bins)
        .filter(|&i| counts[i] > 0)
        .map(|i| {
            let c = counts[i] as f64;
            (sum_ln_x[i] / c, (sum_q[i] / c).ln())
        })
        .collect()
}

/// Endpoint-strength correlation exponent: bin the per-edge products
/// `s_i * s_j` logarithmically in the link weight and fit the bin averages
/// against `w`. Only the top `DEFAULT_FIT_DECADES` decades of weight enter
/// the fit — the scaling claim concerns large weights.
pub fn strength_correlation_exponent(
    net: &WeightedNetwork,
    n_bins: usize,
) -> Result<PowerLawFit, ScalingError> {
    assert!(n_bins > 0, "n_bins must be positive");
    if net.n_edges() < n_bins {
        return Err(ScalingError::TooFewEdges {
            got: net.n_edges(),
            need: n_bins,
        });
    }
    let strengths = net.strengths();
    let pairs: Vec<(f64, f64)> = net
        .edges()
        .iter()
        .map(|&(i, j, w)| (w, strengths[i] * strengths[j]))
        .collect();
    let (ln_min, ln_max) = pairs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0.ln()), hi.max(p.0.ln()))
        });
    if ln_min == ln_max {
        return Err(ScalingError::DegenerateAbscissa);
    }
    let lo = ln_min.max(ln_max - DEFAULT_FIT_DECADES * std::f64::consts::LN_10);
    let points = binned_loglog_points(&pairs, lo, ln_max, n_bins);
    ols_loglog(&points)
}

/// Tail exponent of a sample distribution, estimated from the empirical
/// complementary CDF restricted to the top `decades` of the sample range.
/// The CCDF of a density `~ x^-a` falls as `x^(1-a)`, so the returned
/// `exponent` is `1 - slope` of the log-log CCDF fit — the density
/// exponent `a` itself. Rank-based CCDF values avoid histogram binning
/// noise in the sparse tail.
pub fn tail_exponent_ccdf(samples: &[f64], decades: f64) -> Result<PowerLawFit, ScalingError> {
    let mut sorted = checked_log_samples(samples, 3)?;
    sorted.sort_by(f64::total_cmp);
    let ln_max = *sorted.last().unwrap();
    let cutoff = ln_max - decades * std::f64::consts::LN_10;
    let n = sorted.len() as f64;
    // Descending rank i+1 at the i-th largest sample: CCDF = rank / n.
    let points: Vec<(f64, f64)> = sorted
        .iter()
        .rev()
        .enumerate()
        .filter(|&(_, &ln_x)| ln_x >= cutoff)
        .map(|(i, &ln_x)| (ln_x, ((i + 1) as f64 / n).ln()))
        .collect();
    let ccdf = ols_loglog(&points)?;
    Ok(PowerLawFit {
        exponent: 1.0 - ccdf.exponent,
        intercept: ccdf.intercept,
        stderr: ccdf.stderr,
        range: ccdf.range,
    })
}

/// Strength–degree exponent: fit the average strength of degree-`k` nodes
/// against `k`. Exact degree classes are used whenever they fit in
/// `n_bins`; heavier-tailed degree sequences fall back to uniform `ln k`
/// bins. Isolated nodes carry no strength signal and are skipped.
pub fn strength_degree_exponent(
    net: &WeightedNetwork,
    n_bins: usize,
) -> Result<PowerLawFit, ScalingError> {
    assert!(n_bins > 0, "n_bins must be positive");
    let strengths = net.strengths();
    let mut by_degree: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for i in 0..net.n_nodes() {
        let k = net.degree(i);
        if k == 0 {
            continue;
        }
        let entry = by_degree.entry(k).or_insert((0.0, 0));
        entry.0 += strengths[i];
        entry.1 += 1;
    }
    if by_degree.len() < 3 {
        return Err(ScalingError::TooFewDegreeClasses {
            got: by_degree.len(),
            need: 3,
        });
    }

    let points: Vec<(f64, f64)> = if by_degree.len() <= n_bins {
        by_degree
            .iter()
            .map(|(&k, &(sum_s, c))| ((k as f64).ln(), (sum_s / c as f64).ln()))
            .collect()
    } else {
        let pairs: Vec<(f64, f64)> = (0..net.n_nodes())
            .filter(|&i| net.degree(i) > 0)
            .map(|i| (net.degree(i) as f64, strengths[i]))
            .collect();
        let (lo, hi) = pairs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.0.ln()), hi.max(p.0.ln()))
            });
        binned_loglog_points(&pairs, lo, hi, n_bins)
    };
    ols_loglog(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::{Distribution, LogNormal};

    fn seeded_lognormal(n: usize, mu: f64, sigma: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let dist = LogNormal::new(mu, sigma).unwrap();
        (0..n).map(|_| dist.sample(&mut rng)).collect()
    }

    #[test]
    fn params_of_constant_weights() {
        let p = lognormal_params(&[7.0; 50]).unwrap();
        assert_relative_eq!(p.w0, 7.0, max_relative = 1e-12);
        assert_eq!(p.sigma, 0.0);
    }

    #[test]
    fn params_two_point_moments() {
        let p = lognormal_params(&[1.0_f64.exp(), 3.0_f64.exp()]).unwrap();
        assert_relative_eq!(p.w0, 2.0_f64.exp(), max_relative = 1e-12);
        assert_relative_eq!(p.sigma, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn params_recover_generator_parameters() {
        let n = 100_000;
        let samples = seeded_lognormal(n, 10.0_f64.ln(), 2.0, 42);
        let p = lognormal_params(&samples).unwrap();
        // Standard error of the log-mean is sigma/sqrt(n); allow 4 of them.
        let tol = 4.0 * 2.0 / (n as f64).sqrt();
        assert!((p.w0.ln() - 10.0_f64.ln()).abs() < tol);
        assert!((p.sigma - 2.0).abs() < tol);
    }

    #[test]
    fn params_reject_bad_input() {
        assert_eq!(
            lognormal_params(&[3.0]),
            Err(ScalingError::TooFewSamples { got: 1, need: 2 })
        );
        assert_eq!(
            lognormal_params(&[1.0, 0.0]),
            Err(ScalingError::NonPositiveSample(0.0))
        );
        assert_eq!(
            lognormal_params(&[1.0, -2.0]),
            Err(ScalingError::NonPositiveSample(-2.0))
        );
    }

    #[test]
    fn params_scale_covariance() {
        let samples = seeded_lognormal(5_000, 1.3, 0.7, 7);
        let base = lognormal_params(&samples).unwrap();
        let scaled: Vec<f64> = samples.iter().map(|w| w * 100.0).collect();
        let p = lognormal_params(&scaled).unwrap();
        assert_relative_eq!(p.w0, base.w0 * 100.0, max_relative = 1e-9);
        assert_relative_eq!(p.sigma, base.sigma, max_relative = 1e-9);
    }

    #[test]
    fn analytic_curve_is_exact_parabola() {
        let params = LogNormalParams { w0: 3.0, sigma: 0.8 };
        let xs: Vec<f64> = (0..41).map(|i| -1.6 + 0.08 * i as f64).collect();
        let curve = analytic_collapse_curve(&params, &xs);
        for p in &curve.points {
            assert!((p.y - p.x * p.x).abs() < 1e-12);
        }
        assert!(parabola_gof(&curve).unwrap() < 1e-18);
    }

    #[test]
    fn sampled_curve_falls_on_parabola() {
        let samples = seeded_lognormal(100_000, 2.0, 1.5, 99);
        let curve = collapse_curve(&samples, DEFAULT_LOG_BINS, DEFAULT_MIN_COUNT).unwrap();
        let core = curve.restricted(2.0 * curve.params.sigma);
        assert!(core.points.len() >= 10);
        assert!(parabola_gof(&core).unwrap() < 0.1);
    }

    #[test]
    fn collapse_is_invariant_under_rescaling() {
        let samples = seeded_lognormal(20_000, 0.5, 1.1, 3);
        let scaled: Vec<f64> = samples.iter().map(|w| w * 1e4).collect();
        let a = collapse_curve(&samples, 30, 10).unwrap();
        let b = collapse_curve(&scaled, 30, 10).unwrap();
        assert_eq!(a.points.len(), b.points.len());
        for (pa, pb) in a.points.iter().zip(&b.points) {
            assert_relative_eq!(pa.x, pb.x, epsilon = 1e-9);
            assert_relative_eq!(pa.y, pb.y, epsilon = 1e-9);
            assert_eq!(pa.samples, pb.samples);
        }
    }

    #[test]
    fn collapse_rejects_zero_spread() {
        assert_eq!(
            collapse_curve(&[5.0; 100], 10, 1),
            Err(ScalingError::DegenerateSigma)
        );
    }

    #[test]
    fn gof_of_exact_and_offset_parabola() {
        let params = LogNormalParams { w0: 1.0, sigma: 1.0 };
        let mk = |offset: f64| CollapseCurve {
            params,
            points: (-5..=5)
                .map(|i| {
                    let x = i as f64 / 2.0;
                    CollapsePoint {
                        x,
                        y: x * x + offset,
                        samples: 10,
                    }
                })
                .collect(),
        };
        assert_eq!(parabola_gof(&mk(0.0)).unwrap(), 0.0);
        assert_relative_eq!(parabola_gof(&mk(1.0)).unwrap(), 1.0);
    }

    #[test]
    fn gof_needs_three_bins() {
        let curve = CollapseCurve {
            params: LogNormalParams { w0: 1.0, sigma: 1.0 },
            points: vec![
                CollapsePoint { x: 0.0, y: 0.0, samples: 5 },
                CollapsePoint { x: 1.0, y: 1.0, samples: 5 },
            ],
        };
        assert_eq!(
            parabola_gof(&curve),
            Err(ScalingError::TooFewBins { got: 2, need: 3 })
        );
    }

    fn series(points: &[(i32, f64)]) -> BTreeMap<i32, f64> {
        points.iter().copied().collect()
    }

    #[test]
    fn unit_elasticity_for_proportional_series() {
        let g = series(&[(1990, 100.0), (1991, 150.0), (1992, 130.0), (1993, 210.0)]);
        let s: BTreeMap<i32, f64> = g.iter().map(|(&y, &v)| (y, 0.3 * v)).collect();
        let fit = elasticity_gamma(&s, &g).unwrap();
        assert_relative_eq!(fit.exponent, 1.0, epsilon = 1e-12);
        assert!(fit.stderr < 1e-12);
    }

    #[test]
    fn quadratic_elasticity() {
        let g = series(&[(1990, 10.0), (1991, 20.0), (1992, 40.0), (1993, 35.0)]);
        let s: BTreeMap<i32, f64> = g.iter().map(|(&y, &v)| (y, 2.0 * v * v)).collect();
        let fit = elasticity_gamma(&s, &g).unwrap();
        assert_relative_eq!(fit.exponent, 2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.range.0, 10.0, max_relative = 1e-12);
        assert_relative_eq!(fit.range.1, 40.0, max_relative = 1e-12);
    }

    #[test]
    fn elasticity_is_scale_invariant() {
        let g = series(&[(1990, 100.0), (1991, 150.0), (1992, 210.0)]);
        let s = series(&[(1990, 5.0), (1991, 9.0), (1992, 11.0)]);
        let base = elasticity_gamma(&s, &g).unwrap().exponent;
        let s_scaled: BTreeMap<i32, f64> = s.iter().map(|(&y, &v)| (y, v * 7.5)).collect();
        let g_scaled: BTreeMap<i32, f64> = g.iter().map(|(&y, &v)| (y, v * 0.01)).collect();
        let fit = elasticity_gamma(&s_scaled, &g_scaled).unwrap();
        assert_relative_eq!(fit.exponent, base, epsilon = 1e-12);
    }

    #[test]
    fn elasticity_needs_overlap_and_spread() {
        let g = series(&[(1990, 100.0), (1991, 150.0)]);
        let s = series(&[(1990, 5.0), (1991, 9.0)]);
        assert_eq!(
            elasticity_gamma(&s, &g),
            Err(ScalingError::InsufficientOverlap { got: 2, need: 3 })
        );
        let g_flat = series(&[(1990, 100.0), (1991, 100.0), (1992, 100.0)]);
        let s3 = series(&[(1990, 5.0), (1991, 9.0), (1992, 11.0)]);
        assert_eq!(
            elasticity_gamma(&s3, &g_flat),
            Err(ScalingError::DegenerateAbscissa)
        );
    }

    #[test]
    fn gamma_summary_no_outliers() {
        let d = gamma_distribution(&[1.0, 1.0, 1.0], 2.0, 4);
        assert_relative_eq!(d.mean, 1.0);
        assert_relative_eq!(d.mean_excluding_outliers, 1.0);
        assert_eq!(d.n_above_threshold, 0);
    }

    #[test]
    fn gamma_summary_with_outliers() {
        let d = gamma_distribution(&[0.5, 2.5], 2.0, 2);
        assert_relative_eq!(d.mean, 1.5);
        assert_relative_eq!(d.mean_excluding_outliers, 0.5);
        assert_eq!(d.n_above_threshold, 1);
        assert_eq!(d.bins.iter().map(|b| b.count).sum::<usize>(), 2);
        // Density integrates to one over the binned range.
        let width = d.bins[1].center - d.bins[0].center;
        let mass: f64 = d.bins.iter().map(|b| b.density * width).sum();
        assert_relative_eq!(mass, 1.0, epsilon = 1e-12);
    }

    /// Independent check on a tiny fixed dataset: slope computed from the
    /// closed-form two-point formula on the extreme points of an exact
    /// power law must match the OLS result.
    #[test]
    fn ols_matches_two_point_slope_on_exact_power_law() {
        let points: Vec<(f64, f64)> = [1.0_f64, 2.0, 4.0, 8.0]
            .iter()
            .map(|&x| (x.ln(), (5.0 * x.powf(1.7)).ln()))
            .collect();
        let fit = ols_loglog(&points).unwrap();
        let two_point =
            (points[3].1 - points[0].1) / (points[3].0 - points[0].0);
        assert_relative_eq!(fit.exponent, two_point, epsilon = 1e-12);
        assert_relative_eq!(fit.exponent, 1.7, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, 5.0_f64.ln(), epsilon = 1e-12);
        assert!(fit.stderr < 1e-12);
    }

    /// Weights fixed to products of node scales: the endpoint-strength
    /// products then track the weight almost linearly.
    #[test]
    fn correlation_exponent_near_one_for_product_weights() {
        let n = 60;
        let scales: Vec<f64> = (0..n)
            .map(|i| 10f64.powf(i as f64 * 2.0 / (n - 1) as f64))
            .collect();
        let total: f64 = scales.iter().sum();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j, scales[i] * scales[j] / total));
            }
        }
        let net = WeightedNetwork::build(n, &edges).unwrap();
        let fit = strength_correlation_exponent(&net, 40).unwrap();
        assert!(
            (fit.exponent - 1.0).abs() < 0.05,
            "exponent {} too far from 1",
            fit.exponent
        );
    }

    #[test]
    fn correlation_exponent_rejects_flat_star() {
        let edges: Vec<(usize, usize, f64)> = (1..6).map(|j| (0, j, 1.0)).collect();
        let net = WeightedNetwork::build(6, &edges).unwrap();
        assert_eq!(
            strength_correlation_exponent(&net, 5),
            Err(ScalingError::DegenerateAbscissa)
        );
    }

    #[test]
    fn correlation_exponent_needs_edges() {
        let net = WeightedNetwork::build(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        assert_eq!(
            strength_correlation_exponent(&net, 40),
            Err(ScalingError::TooFewEdges { got: 2, need: 40 })
        );
    }

    #[test]
    fn unit_weights_give_unit_strength_degree_exponent() {
        // Triangle with a two-edge tail: degrees {1, 2, 3} and s = k.
        let edges = [
            (0, 1, 1.0),
            (1, 2, 1.0),
            (0, 2, 1.0),
            (2, 3, 1.0),
            (3, 4, 1.0),
        ];
        let net = WeightedNetwork::build(5, &edges).unwrap();
        let fit = strength_degree_exponent(&net, 40).unwrap();
        assert_relative_eq!(fit.exponent, 1.0, epsilon = 1e-12);
    }

    /// Disjoint complete graphs K_{k+1} with uniform weight k^2 put every
    /// node in degree class k with strength exactly k^3.
    #[test]
    fn cubic_strength_degree_exponent() {
        let mut edges = Vec::new();
        let mut base = 0;
        for k in [1usize, 2, 4, 8] {
            let size = k + 1;
            let w = (k * k) as f64;
            for a in 0..size {
                for b in (a + 1)..size {
                    edges.push((base + a, base + b, w));
                }
            }
            base += size;
        }
        let net = WeightedNetwork::build(base, &edges).unwrap();
        let fit = strength_degree_exponent(&net, 40).unwrap();
        assert!((fit.exponent - 3.0).abs() < 1e-9);
        assert_relative_eq!(fit.range.0, 1.0, max_relative = 1e-12);
        assert_relative_eq!(fit.range.1, 8.0, max_relative = 1e-12);
    }

    /// Samples placed so the empirical CCDF is exactly `m^-(a-1)`: the
    /// rank-based fit must return the density exponent `a` itself.
    #[test]
    fn tail_exponent_recovers_constructed_power_law() {
        let a = 2.5;
        let n = 1000;
        let samples: Vec<f64> = (1..=n)
            .map(|i| (i as f64 / n as f64).powf(-1.0 / (a - 1.0)))
            .collect();
        let fit = tail_exponent_ccdf(&samples, 1.0).unwrap();
        assert!((fit.exponent - a).abs() < 1e-9, "got {}", fit.exponent);
        assert!(fit.stderr < 1e-9);
    }

    #[test]
    fn tail_exponent_rejects_degenerate_input() {
        assert_eq!(
            tail_exponent_ccdf(&[1.0, 2.0], 1.0),
            Err(ScalingError::TooFewSamples { got: 2, need: 3 })
        );
        assert_eq!(
            tail_exponent_ccdf(&[3.0; 50], 1.0),
            Err(ScalingError::DegenerateAbscissa)
        );
    }

    #[test]
    fn strength_degree_needs_three_classes() {
        let k3 = WeightedNetwork::build(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        assert_eq!(
            strength_degree_exponent(&k3, 10),
            Err(ScalingError::TooFewDegreeClasses { got: 1, need: 3 })
        );
        let path = WeightedNetwork::build(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(
            strength_degree_exponent(&path, 10),
            Err(ScalingError::TooFewDegreeClasses { got: 2, need: 3 })
        );
    }
}
