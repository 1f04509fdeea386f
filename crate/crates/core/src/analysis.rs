//! Exponential scaling fits, prediction bands and solver crossover.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::graphs::gen_random_3regular;
use crate::maxsat::{brute_force_max2sat, reduce_to_max2sat};
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("times must be positive and finite, got {0}")]
    NonPositive(f64),
    #[error("all points share the same N")]
    DegenerateX,
    #[error("confidence level must lie in (0, 1)")]
    Level,
    #[error("timing csv: {0}")]
    Csv(String),
}

/// Least-squares line `log10 T = slope·N + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    pub x_mean: f64,
    /// `Σ (N − N̄)²`.
    pub sxx: f64,
    /// Residual standard error with `n − 2` degrees of freedom.
    pub residual_se: f64,
}

impl FitResult {
    pub fn predict(&self, n: f64) -> f64 {
        self.slope * n + self.intercept
    }

    /// Two-sided prediction interval for a new observation of `log10 T`
    /// at `n`.
    pub fn prediction_band(&self, n: f64, level: f64) -> Result<(f64, f64), AnalysisError> {
        if !(level > 0.0 && level < 1.0) {
            return Err(AnalysisError::Level);
        }
        let dof = (self.n_points - 2) as f64;
        let t = StudentsT::new(0.0, 1.0, dof)
            .expect("at least one degree of freedom")
            .inverse_cdf(0.5 + level / 2.0);
        let half = t
            * self.residual_se
            * (1.0 + 1.0 / self.n_points as f64 + (n - self.x_mean).powi(2) / self.sxx).sqrt();
        let y = self.predict(n);
        Ok((y - half, y + half))
    }
}

/// OLS of `log10 T` on `N`.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<FitResult, AnalysisError> {
    if points.len() < 3 {
        return Err(AnalysisError::TooFewPoints(points.len()));
    }
    if let Some(&(_, t)) = points.iter().find(|(_, t)| !(*t > 0.0 && t.is_finite())) {
        return Err(AnalysisError::NonPositive(t));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::DegenerateX);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        n_points: points.len(),
        x_mean,
        sxx,
        residual_se: (ss_res / (n - 2.0)).sqrt(),
    })
}

/// Size at which the two fitted lines meet; `None` for parallel lines.
pub fn crossover(quantum: &FitResult, classical: &FitResult) -> Option<f64> {
    let ds = quantum.slope - classical.slope;
    if ds == 0.0 || !ds.is_finite() {
        return None;
    }
    Some((classical.intercept - quantum.intercept) / ds)
}

/// Sizes at which the classical line crosses the lower and the upper edge
/// of the quantum prediction band, searched on `[0, n_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandCrossing {
    pub lower_edge: Option<f64>,
    pub upper_edge: Option<f64>,
}

pub fn band_crossover(
    quantum: &FitResult,
    classical: &FitResult,
    level: f64,
    n_max: f64,
) -> Result<BandCrossing, AnalysisError> {
    // validate the level once
    quantum.prediction_band(0.0, level)?;
    let edge = |n: f64, upper: bool| {
        let (lo, hi) = quantum.prediction_band(n, level).expect("level checked");
        (if upper { hi } else { lo }) - classical.predict(n)
    };
    let root = |upper: bool| {
        const STEPS: usize = 20_000;
        let h = n_max / STEPS as f64;
        let mut a = 0.0;
        let mut fa = edge(a, upper);
        for k in 1..=STEPS {
            let b = k as f64 * h;
            let fb = edge(b, upper);
            if fa == 0.0 {
                return Some(a);
            }
            if fa.signum() != fb.signum() {
                let (mut lo, mut hi, mut flo) = (a, b, fa);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    let fm = edge(mid, upper);
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
            a = b;
            fa = fb;
        }
        None
    };
    Ok(BandCrossing {
        lower_edge: root(false),
        upper_edge: root(true),
    })
}

/// One measured solve time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingPoint {
    #[serde(rename = "N")]
    pub n: f64,
    pub seconds: f64,
    pub label: String,
}

/// Reads a CSV with header `N,seconds,label`.
pub fn read_timing_csv(text: &str) -> Result<Vec<TimingPoint>, AnalysisError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| AnalysisError::Csv(e.to_string()))
}

pub fn write_timing_csv(points: &[TimingPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        w.serialize(p).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

/// Points grouped by label, in label order.
pub fn group_by_label(points: &[TimingPoint]) -> BTreeMap<String, Vec<(f64, f64)>> {
    let mut out: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for p in points {
        out.entry(p.label.clone()).or_default().push((p.n, p.seconds));
    }
    out
}

pub const BRUTE_FORCE_LABEL: &str = "brute-force-max2sat (not comparable to AKMAXSAT)";

/// Wall-clock seconds of the enumeration Max-2-SAT solver on random cubic
/// instances, averaged per size. A local stand-in when no external
/// classical timings are supplied; it scales as `2^N`, nothing like a
/// branch-and-bound solver.
pub fn brute_force_timings(sizes: &[usize], instances: usize, seed: u64) -> Vec<TimingPoint> {
    sizes
        .iter()
        .map(|&n| {
            let start = Instant::now();
            for i in 0..instances {
                let g = gen_random_3regular(n, derive_seed(seed, &[n as u64, i as u64]))
                    .expect("valid cubic size");
                std::hint::black_box(brute_force_max2sat(&reduce_to_max2sat(&g)).expect("small"));
            }
            TimingPoint {
                n: n as f64,
                seconds: start.elapsed().as_secs_f64() / instances.max(1) as f64,
                label: BRUTE_FORCE_LABEL.to_string(),
            }
        })
        .collect()
}

/// Data points of one solver with their fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub fit: FitResult,
}

impl Series {
    pub fn fit(label: &str, points: Vec<(f64, f64)>) -> Result<Self, AnalysisError> {
        let fit = fit_exponential(&points)?;
        Ok(Self {
            label: label.to_string(),
            points,
            fit,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Columns `series,kind,N,seconds,log10_seconds,fit_log10,band_low,band_high`.
    pub csv: String,
    pub json: String,
}

#[derive(Serialize)]
struct Summary<'a> {
    level: f64,
    series: Vec<SeriesSummary<'a>>,
    crossover: Option<CrossoverSummary<'a>>,
}

#[derive(Serialize)]
struct SeriesSummary<'a> {
    label: &'a str,
    n_points: usize,
    slope: f64,
    intercept: f64,
    r_squared: f64,
    residual_se: f64,
}

#[derive(Serialize)]
struct CrossoverSummary<'a> {
    quantum: &'a str,
    classical: &'a str,
    n_star: Option<f64>,
    band: BandCrossing,
}

/// Data, fitted curves on an integer grid up to `n_max`, the quantum
/// prediction band, and the crossover with the classical series when one
/// is given.
pub fn emit_report(
    quantum: &Series,
    classical: Option<&Series>,
    level: f64,
    n_max: f64,
) -> Result<Report, AnalysisError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| AnalysisError::Csv(e.to_string());
    w.write_record(["series", "kind", "N", "seconds", "log10_seconds", "fit_log10", "band_low", "band_high"])
        .map_err(csv_err)?;
    let series: Vec<&Series> = std::iter::once(quantum).chain(classical).collect();
    for s in &series {
        for &(n, t) in &s.points {
            let (lo, hi) = s.fit.prediction_band(n, level)?;
            w.write_record([
                s.label.clone(),
                "data".into(),
                n.to_string(),
                t.to_string(),
                t.log10().to_string(),
                s.fit.predict(n).to_string(),
                lo.to_string(),
                hi.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let steps = n_max.ceil().max(1.0) as usize;
        for k in 0..=steps {
            let n = k as f64;
            let (lo, hi) = s.fit.prediction_band(n, level)?;
            let y = s.fit.predict(n);
            w.write_record([
                s.label.clone(),
                "fit".into(),
                n.to_string(),
                10f64.powf(y).to_string(),
                y.to_string(),
                y.to_string(),
                lo.to_string(),
                hi.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| AnalysisError::Csv(e.to_string()))?)
        .expect("utf-8");

    let crossover = match classical {
        Some(c) => Some(CrossoverSummary {
            quantum: &quantum.label,
            classical: &c.label,
            n_star: crossover(&quantum.fit, &c.fit),
            band: band_crossover(&quantum.fit, &c.fit, level, n_max)?,
        }),
        None => None,
    };
    let summary = Summary {
        level,
        series: series
            .iter()
            .map(|s| SeriesSummary {
                label: &s.label,
                n_points: s.fit.n_points,
                slope: s.fit.slope,
                intercept: s.fit.intercept,
                r_squared: s.fit.r_squared,
                residual_se: s.fit.residual_se,
            })
            .collect(),
        crossover,
    };
    Ok(Report {
        csv,
        json: serde_json::to_string_pretty(&summary).expect("summary serializes"),
    })
}
