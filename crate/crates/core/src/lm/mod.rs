//! N-gram language models: counting, interpolated Kneser-Ney estimation,
//! perplexity and out-of-vocabulary statistics.

mod arpa;
mod cache;
mod counts;
mod kn;
mod mle;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use arpa::{read_arpa, write_arpa, ArpaModel};
pub use cache::{read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};
pub use counts::{NgramCounts, Vocabulary, BOS, EOS, MAX_ORDER, MIN_ORDER, UNK};
pub use kn::{Discount, DiscountMode, KneserNey, FALLBACK_DISCOUNT};
pub use mle::mle_logprob;

use crate::stats::VocabTable;
use crate::tokenize::{Scheme, TokenStream};

#[derive(Debug, Error)]
pub enum LmError {
    #[error("n-gram order {0} outside {MIN_ORDER}..={MAX_ORDER} or above the counted order")]
    OrderOutOfRange(usize),
    #[error("cannot merge counts of order {0} and {1}")]
    OrderMismatch(usize, usize),
    #[error("fixed discount {0} not in (0, 1)")]
    BadDiscount(f64),
    #[error("empty token stream")]
    EmptyStream,
    #[error("empty sequence")]
    EmptySequence,
    #[error("n-gram `{}` never seen in training", .0.join(" "))]
    Unseen(Vec<String>),
    #[error("scheme mismatch: vocabulary is {vocab}, test stream is {test}")]
    SchemeMismatch { vocab: Scheme, test: Scheme },
    #[error("model file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("model cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Anything that assigns log-probabilities to samples.
pub trait LanguageModel {
    /// Natural-log probability of a sample, conditioned on `<s>`, optionally
    /// including the final `</s>`.
    fn sample_logprob(&self, tokens: &[&str], score_eos: bool) -> f64;

    /// Whether a token was part of the training vocabulary.
    fn in_vocab(&self, token: &str) -> bool;
}

/// Natural-log probability of a sequence scored as one sample with `</s>`.
pub fn logprob<M: LanguageModel + ?Sized>(model: &M, tokens: &[&str]) -> Result<f64, LmError> {
    if tokens.is_empty() {
        return Err(LmError::EmptySequence);
    }
    Ok(model.sample_logprob(tokens, true))
}

/// Assigns `1/V` to every token, for a vocabulary of `V` types.
#[derive(Debug, Clone)]
pub struct UniformModel {
    types: HashSet<String>,
}

impl UniformModel {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(types: I) -> Self {
        Self {
            types: types.into_iter().map(Into::into).collect(),
        }
    }
}

impl LanguageModel for UniformModel {
    fn sample_logprob(&self, tokens: &[&str], score_eos: bool) -> f64 {
        let n = tokens.len() + usize::from(score_eos);
        -(n as f64) * (self.types.len() as f64).ln()
    }

    fn in_vocab(&self, token: &str) -> bool {
        self.types.contains(token)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Score `</s>` at the end of every sample and count it in N.
    pub score_eos: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { score_eos: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub ppl: f64,
    /// Sum of natural-log probabilities.
    pub log_prob: f64,
    /// Scored tokens, N.
    pub token_count: u64,
    pub oov_tokens: u64,
    pub oov_types: u64,
}

/// `exp(-(1/N) sum log p)` over every scored token of the test stream.
pub fn perplexity<M: LanguageModel + ?Sized>(
    model: &M,
    test: &TokenStream,
    options: EvalOptions,
) -> Result<EvalReport, LmError> {
    if test.is_empty() {
        return Err(LmError::EmptyStream);
    }
    let mut log_prob = 0.0;
    let mut token_count = 0u64;
    let mut oov_tokens = 0u64;
    let mut oov_types: HashSet<&str> = HashSet::new();
    for sample in test.samples() {
        log_prob += model.sample_logprob(&sample, options.score_eos);
        token_count += sample.len() as u64 + u64::from(options.score_eos);
        for t in sample {
            if !model.in_vocab(t) {
                oov_tokens += 1;
                oov_types.insert(t);
            }
        }
    }
    Ok(EvalReport {
        ppl: (-log_prob / token_count as f64).exp(),
        log_prob,
        token_count,
        oov_tokens,
        oov_types: oov_types.len() as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OovStats {
    pub tokens: u64,
    pub types: u64,
    pub test_tokens: u64,
    pub test_types: u64,
}

pub fn oov_stats(train_vocab: &VocabTable, test: &TokenStream) -> Result<OovStats, LmError> {
    if train_vocab.scheme != test.scheme() {
        return Err(LmError::SchemeMismatch {
            vocab: train_vocab.scheme,
            test: test.scheme(),
        });
    }
    let known = train_vocab.token_set();
    let mut test_types: HashSet<&str> = HashSet::new();
    let mut oov_types: HashSet<&str> = HashSet::new();
    let mut tokens = 0;
    for t in test.iter() {
        test_types.insert(t);
        if !known.contains(t) {
            tokens += 1;
            oov_types.insert(t);
        }
    }
    Ok(OovStats {
        tokens,
        types: oov_types.len() as u64,
        test_tokens: test.len() as u64,
        test_types: test_types.len() as u64,
    })
}

/// Dotless OOV counts as a percentage of dotted ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OovComparison {
    pub dotted: OovStats,
    pub dotless: OovStats,
    pub token_ratio: Option<f64>,
    pub type_ratio: Option<f64>,
}

impl OovComparison {
    pub fn new(dotted: OovStats, dotless: OovStats) -> Self {
        let pct = |a: u64, b: u64| (b > 0).then(|| 100.0 * a as f64 / b as f64);
        Self {
            dotted,
            dotless,
            token_ratio: pct(dotless.tokens, dotted.tokens),
            type_ratio: pct(dotless.types, dotted.types),
        }
    }
}
