//! Zipf and Heap law fits by ordinary least squares in log2-log2 space.

use std::collections::HashSet;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::VocabTable;
use crate::tokenize::TokenStream;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("constant vocabulary: V(n) is the same at every sampled prefix")]
    ConstantVocabulary,
    #[error("non-positive value in log-log fit")]
    NonPositive,
    #[error("stream of {len} tokens cannot provide {points} sample points")]
    StreamTooShort { len: usize, points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ys` on `xs`.
pub fn ols(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    LineFit {
        slope,
        intercept,
        r_squared,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipfFit {
    pub alpha: f64,
    /// Frequency of the rank-1 type.
    #[serde(rename = "C")]
    pub top_frequency: f64,
    /// Regression intercept, log2 of the fitted F(1).
    pub intercept: f64,
    pub r_squared: f64,
    /// `(log2 rank, log2 frequency)`, rank ascending.
    pub points: Vec<(f64, f64)>,
}

impl ZipfFit {
    pub fn fitted(&self, rank: f64) -> f64 {
        (self.intercept - self.alpha * rank.log2()).exp2()
    }
}

/// Fits frequencies given in rank order (rank 1 first).
pub fn zipf_fit_frequencies(freqs: &[f64]) -> Result<ZipfFit, FitError> {
    if freqs.len() < 3 {
        return Err(FitError::TooFewPoints(freqs.len()));
    }
    if freqs.iter().any(|&f| f <= 0.0) {
        return Err(FitError::NonPositive);
    }
    let points: Vec<(f64, f64)> = freqs
        .iter()
        .enumerate()
        .map(|(i, &f)| (((i + 1) as f64).log2(), f.log2()))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let fit = ols(&xs, &ys);
    Ok(ZipfFit {
        alpha: -fit.slope,
        top_frequency: freqs[0],
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        points,
    })
}

/// Ranks follow the table order. Types with frequency below `min_freq` are
/// left out of the regression.
pub fn zipf_fit(vocab: &VocabTable, min_freq: Option<u64>) -> Result<ZipfFit, FitError> {
    let cutoff = min_freq.unwrap_or(0);
    let freqs: Vec<f64> = vocab
        .entries()
        .iter()
        .take_while(|(_, f)| *f >= cutoff)
        .map(|(_, f)| *f as f64)
        .collect();
    zipf_fit_frequencies(&freqs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeapFit {
    pub k: f64,
    pub beta: f64,
    pub r_squared: f64,
    /// `(log2 n, log2 V(n))`, n ascending.
    pub points: Vec<(f64, f64)>,
}

impl HeapFit {
    pub fn fitted(&self, n: f64) -> f64 {
        self.k * n.powf(self.beta)
    }
}

/// Fits `(n, V(n))` pairs.
pub fn heap_fit_points(samples: &[(f64, f64)]) -> Result<HeapFit, FitError> {
    if samples.len() < 3 {
        return Err(FitError::TooFewPoints(samples.len()));
    }
    if samples.iter().any(|&(n, v)| n <= 0.0 || v <= 0.0) {
        return Err(FitError::NonPositive);
    }
    if samples.iter().all(|&(_, v)| v == samples[0].1) {
        return Err(FitError::ConstantVocabulary);
    }
    let points: Vec<(f64, f64)> = samples.iter().map(|&(n, v)| (n.log2(), v.log2())).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let fit = ols(&xs, &ys);
    if !(0.0..=1.0).contains(&fit.slope) {
        log::warn!("Heap exponent {} outside (0, 1]", fit.slope);
    }
    Ok(HeapFit {
        k: fit.intercept.exp2(),
        beta: fit.slope,
        r_squared: fit.r_squared,
        points,
    })
}

/// Prefix lengths spaced uniformly in log n from 1 to `len`, deduplicated.
pub fn log_spaced_positions(len: usize, count: usize) -> Vec<usize> {
    let ln = (len as f64).ln();
    let mut out: Vec<usize> = (0..count)
        .map(|i| {
            let t = if count == 1 {
                1.0
            } else {
                i as f64 / (count - 1) as f64
            };
            ((ln * t).exp().round() as usize).clamp(1, len)
        })
        .collect();
    out.dedup();
    out
}

/// Measures V(n) at `sample_points` log-spaced prefixes of the stream and
/// fits `log2 V = log2 k + beta log2 n`.
pub fn heap_fit(stream: &TokenStream, sample_points: usize) -> Result<HeapFit, FitError> {
    if sample_points < 3 {
        return Err(FitError::TooFewPoints(sample_points));
    }
    if stream.len() < sample_points {
        return Err(FitError::StreamTooShort {
            len: stream.len(),
            points: sample_points,
        });
    }
    let positions = log_spaced_positions(stream.len(), sample_points);
    let mut seen: HashSet<&str> = HashSet::new();
    let mut samples = Vec::with_capacity(positions.len());
    let mut next = positions.iter().peekable();
    for (i, tok) in stream.iter().enumerate() {
        seen.insert(tok);
        while next.peek().is_some_and(|&&p| p == i + 1) {
            samples.push(((i + 1) as f64, seen.len() as f64));
            next.next();
        }
    }
    heap_fit_points(&samples)
}

fn write_rows<W: Write>(
    mut w: W,
    header: &str,
    rows: impl Iterator<Item = (f64, f64, f64)>,
) -> io::Result<()> {
    writeln!(w, "{header}")?;
    for (a, b, c) in rows {
        writeln!(w, "{a},{b},{c}")?;
    }
    Ok(())
}

/// CSV with columns `rank,freq,fit_freq`.
pub fn write_zipf_csv<W: Write>(fit: &ZipfFit, w: W) -> io::Result<()> {
    write_rows(
        w,
        "rank,freq,fit_freq",
        fit.points.iter().enumerate().map(|(i, &(_, lf))| {
            let rank = (i + 1) as f64;
            (rank, lf.exp2().round(), fit.fitted(rank))
        }),
    )
}

/// CSV with columns `n,V,fit_V`.
pub fn write_heap_csv<W: Write>(fit: &HeapFit, w: W) -> io::Result<()> {
    write_rows(
        w,
        "n,V,fit_V",
        fit.points.iter().map(|&(ln, lv)| {
            let n = ln.exp2().round();
            (n, lv.exp2().round(), fit.fitted(n))
        }),
    )
}
