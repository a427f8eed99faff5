//! Vocabulary tables and the descriptive statistics computed from them:
//! entropy, redundancy, type-length profiles and dotless/dotted vocabulary
//! ratios.

use std::collections::{HashMap, HashSet};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::script::UndotRule;
use crate::tokenize::{Scheme, TokenStream, SPACE_TOKEN};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empty token stream")]
    EmptyStream,
    #[error("empty vocabulary")]
    EmptyVocab,
    #[error("redundancy needs at least two types, got {0}")]
    TooFewTypes(usize),
    #[error("top fraction {0} not in (0, 1]")]
    BadFraction(f64),
    #[error("cannot compare {0} with {1}")]
    Mismatch(String, String),
    #[error("type `{token}` cannot be undotted: {reason}")]
    Undot { token: String, reason: String },
}

/// Counts accumulated token by token. Lookups borrow, so known tokens cost
/// no allocation.
#[derive(Debug, Clone, Default)]
pub struct VocabCounter {
    counts: HashMap<Box<str>, u64>,
    total: u64,
}

impl VocabCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, token: &str) {
        self.add_n(token, 1);
    }

    pub fn add_n(&mut self, token: &str, n: u64) {
        match self.counts.get_mut(token) {
            Some(c) => *c += n,
            None => {
                self.counts.insert(token.into(), n);
            }
        }
        self.total += n;
    }

    pub fn add_stream(&mut self, stream: &TokenStream) {
        for t in stream.iter() {
            self.add(t);
        }
    }

    pub fn merge(&mut self, other: &VocabCounter) {
        for (t, &n) in &other.counts {
            self.add_n(t, n);
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn finish(self, scheme: Scheme, dotted: bool) -> VocabTable {
        let mut entries: Vec<(String, u64)> = self
            .counts
            .into_iter()
            .map(|(t, n)| (t.into_string(), n))
            .collect();
        sort_entries(&mut entries);
        VocabTable {
            entries,
            total: self.total,
            scheme,
            dotted,
        }
    }
}

fn sort_entries(entries: &mut [(String, u64)]) {
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

/// Type frequencies of a token stream, ordered by frequency descending with
/// ties broken by code point order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabTable {
    entries: Vec<(String, u64)>,
    total: u64,
    pub scheme: Scheme,
    pub dotted: bool,
}

pub fn build_vocab(stream: &TokenStream, dotted: bool) -> Result<VocabTable, StatsError> {
    if stream.is_empty() {
        return Err(StatsError::EmptyStream);
    }
    let mut counter = VocabCounter::new();
    counter.add_stream(stream);
    Ok(counter.finish(stream.scheme(), dotted))
}

impl VocabTable {
    pub fn from_counts<I, S>(counts: I, scheme: Scheme, dotted: bool) -> VocabTable
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut c = VocabCounter::new();
        for (t, n) in counts {
            if n > 0 {
                c.add_n(t.as_ref(), n);
            }
        }
        c.finish(scheme, dotted)
    }

    /// Number of types, V.
    pub fn types(&self) -> usize {
        self.entries.len()
    }

    /// Running-text size, N.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn get(&self, token: &str) -> Option<u64> {
        self.entries
            .iter()
            .find(|(t, _)| t == token)
            .map(|(_, n)| *n)
    }

    pub fn token_set(&self) -> HashSet<&str> {
        self.entries.iter().map(|(t, _)| t.as_str()).collect()
    }

    /// Merges two tables of the same scheme.
    pub fn merge(&self, other: &VocabTable) -> VocabTable {
        let mut c = VocabCounter::new();
        for (t, n) in self.entries.iter().chain(&other.entries) {
            c.add_n(t, *n);
        }
        c.finish(self.scheme, self.dotted)
    }

    /// Table without one type (e.g. the character scheme's space token).
    pub fn without(&self, token: &str) -> VocabTable {
        let entries: Vec<_> = self
            .entries
            .iter()
            .filter(|(t, _)| t != token)
            .cloned()
            .collect();
        let total = entries.iter().map(|(_, n)| n).sum();
        VocabTable {
            entries,
            total,
            scheme: self.scheme,
            dotted: self.dotted,
        }
    }

    /// `id<TAB>token<TAB>frequency` rows; ids follow table order from 0.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "id\ttoken\tfrequency")?;
        for (id, (t, n)) in self.entries.iter().enumerate() {
            writeln!(w, "{id}\t{t}\t{n}")?;
        }
        Ok(())
    }
}

/// Unigram entropy in bits per token, summed in table order.
pub fn entropy(vocab: &VocabTable) -> f64 {
    let n = vocab.total as f64;
    if vocab.total == 0 {
        return 0.0;
    }
    vocab
        .entries
        .iter()
        .map(|&(_, f)| {
            let p = f as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0)
}

/// `1 - H / log2(V)`.
pub fn redundancy_from(entropy_bits: f64, types: usize) -> Result<f64, StatsError> {
    if types <= 1 {
        return Err(StatsError::TooFewTypes(types));
    }
    Ok(1.0 - entropy_bits / (types as f64).log2())
}

pub fn redundancy(vocab: &VocabTable) -> Result<f64, StatsError> {
    redundancy_from(entropy(vocab), vocab.types())
}

fn top_count(types: usize, fraction: f64) -> usize {
    // guard against 0.1 * 30 = 3.0000000000000004
    ((fraction * types as f64 - 1e-9).ceil() as usize).clamp(1, types)
}

/// Mean type length in code points over all types, and over the most
/// frequent `ceil(top_fraction * V)` types.
pub fn length_profile(vocab: &VocabTable, top_fraction: f64) -> Result<(f64, f64), StatsError> {
    if !(top_fraction > 0.0 && top_fraction <= 1.0) {
        return Err(StatsError::BadFraction(top_fraction));
    }
    if vocab.entries.is_empty() {
        return Err(StatsError::EmptyVocab);
    }
    let lens: Vec<usize> = vocab
        .entries
        .iter()
        .map(|(t, _)| t.chars().count())
        .collect();
    let mean = |xs: &[usize]| xs.iter().sum::<usize>() as f64 / xs.len() as f64;
    let k = top_count(lens.len(), top_fraction);
    Ok((mean(&lens), mean(&lens[..k])))
}

/// Undots a type as if it were a standalone word.
fn undot_type(rule: UndotRule, token: &str, buf: &mut String) -> Result<(), StatsError> {
    buf.clear();
    if token == SPACE_TOKEN {
        buf.push_str(token);
        return Ok(());
    }
    rule.undot_into(token, true, buf)
        .map_err(|e| StatsError::Undot {
            token: token.to_owned(),
            reason: e.to_string(),
        })
}

/// For each percent `p`, the number of distinct undotted images of the top
/// `p`% dotted types divided by the number of those types.
///
/// Each type is undotted as a standalone word. For word and disjoint-letter
/// types this is the same image the running text gets, so the value at 100%
/// equals V`/V of the undotted stream.
pub fn dotless_ratio_curve(
    vocab: &VocabTable,
    points: &[f64],
    rule: UndotRule,
) -> Result<Vec<(f64, f64)>, StatsError> {
    if vocab.entries.is_empty() {
        return Err(StatsError::EmptyVocab);
    }
    let v = vocab.types();
    let cutoffs: Vec<usize> = points
        .iter()
        .map(|&p| {
            if !(p > 0.0 && p <= 100.0) {
                return Err(StatsError::BadFraction(p / 100.0));
            }
            Ok(top_count(v, p / 100.0))
        })
        .collect::<Result<_, _>>()?;
    let deepest = cutoffs.iter().copied().max().unwrap_or(0);

    // distinct images among the first k types, for every k
    let mut images: HashSet<String> = HashSet::new();
    let mut distinct = Vec::with_capacity(deepest);
    let mut buf = String::new();
    for (token, _) in &vocab.entries[..deepest] {
        undot_type(rule, token, &mut buf)?;
        if !images.contains(buf.as_str()) {
            images.insert(buf.clone());
        }
        distinct.push(images.len());
    }
    Ok(points
        .iter()
        .zip(cutoffs)
        .map(|(&p, k)| (p, distinct[k - 1] as f64 / k as f64))
        .collect())
}

/// Percent points 1..=100.
pub fn default_curve_points() -> Vec<f64> {
    (1..=100).map(f64::from).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub corpus: String,
    pub scheme: Scheme,
    pub dotted: bool,
    #[serde(rename = "V")]
    pub types: usize,
    #[serde(rename = "N")]
    pub tokens: u64,
    /// V/N as a percentage.
    pub v_over_n: f64,
    /// Bits per token.
    pub entropy: f64,
    pub redundancy: Option<f64>,
    pub mean_length: f64,
    pub mean_length_top10: f64,
}

impl StatsReport {
    pub fn new(corpus: &str, vocab: &VocabTable) -> Result<Self, StatsError> {
        let (mean_length, mean_length_top10) = length_profile(vocab, 0.1)?;
        let h = entropy(vocab);
        Ok(Self {
            corpus: corpus.to_owned(),
            scheme: vocab.scheme,
            dotted: vocab.dotted,
            types: vocab.types(),
            tokens: vocab.total,
            v_over_n: 100.0 * vocab.types() as f64 / vocab.total as f64,
            entropy: h,
            redundancy: redundancy_from(h, vocab.types()).ok(),
            mean_length,
            mean_length_top10,
        })
    }
}

/// Dotted and dotless statistics side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub corpus: String,
    pub scheme: Scheme,
    #[serde(rename = "V")]
    pub dotted_types: usize,
    #[serde(rename = "V_dotless")]
    pub dotless_types: usize,
    /// V`/V as a percentage.
    pub vocab_ratio: f64,
    #[serde(rename = "N")]
    pub tokens: u64,
    #[serde(rename = "H")]
    pub dotted_entropy: f64,
    #[serde(rename = "H_dotless")]
    pub dotless_entropy: f64,
    /// H - H`.
    pub entropy_drop: f64,
    #[serde(rename = "S")]
    pub dotted_length: f64,
    #[serde(rename = "S_dotless")]
    pub dotless_length: f64,
    #[serde(rename = "S_top10")]
    pub dotted_length_top10: f64,
    #[serde(rename = "S_dotless_top10")]
    pub dotless_length_top10: f64,
}

pub fn compare_report(
    dotted: &StatsReport,
    dotless: &StatsReport,
) -> Result<ComparisonRow, StatsError> {
    if dotted.scheme != dotless.scheme || dotted.corpus != dotless.corpus {
        return Err(StatsError::Mismatch(
            format!("{}/{}", dotted.corpus, dotted.scheme),
            format!("{}/{}", dotless.corpus, dotless.scheme),
        ));
    }
    Ok(ComparisonRow {
        corpus: dotted.corpus.clone(),
        scheme: dotted.scheme,
        dotted_types: dotted.types,
        dotless_types: dotless.types,
        vocab_ratio: 100.0 * dotless.types as f64 / dotted.types as f64,
        tokens: dotted.tokens,
        dotted_entropy: dotted.entropy,
        dotless_entropy: dotless.entropy,
        entropy_drop: dotted.entropy - dotless.entropy,
        dotted_length: dotted.mean_length,
        dotless_length: dotless.mean_length,
        dotted_length_top10: dotted.mean_length_top10,
        dotless_length_top10: dotless.mean_length_top10,
    })
}
