//! Unsmoothed maximum-likelihood scoring, used as a test oracle.

use crate::tokenize::TokenStream;

use super::counts::{NgramCounts, BOS_ID, EOS_ID};
use super::LmError;

/// Total natural-log MLE probability of `stream` under an order-`order`
/// model read from raw counts. Contexts are truncated at `<s>`, so the
/// first token of a sample is conditioned on `<s>` alone. Fails on any
/// n-gram the counts never saw.
pub fn mle_logprob(
    counts: &NgramCounts,
    order: usize,
    stream: &TokenStream,
) -> Result<f64, LmError> {
    if order == 0 || order > counts.order() {
        return Err(LmError::OrderOutOfRange(order));
    }
    let vocab = counts.vocab();
    let unigram_total: u64 = counts
        .table(1)
        .iter()
        .filter(|(g, _)| g[0] != BOS_ID)
        .map(|(_, &c)| c)
        .sum();

    let unseen = |gram: &[u32], missing: &str| {
        let mut words: Vec<String> = gram.iter().map(|&id| vocab.word(id).to_owned()).collect();
        if !missing.is_empty() {
            words.push(missing.to_owned());
        }
        LmError::Unseen(words)
    };

    let mut total = 0.0;
    let mut seq: Vec<u32> = Vec::new();
    for sample in stream.samples() {
        seq.clear();
        seq.push(BOS_ID);
        for t in &sample {
            match vocab.id(t) {
                Some(id) => seq.push(id),
                None => return Err(unseen(&seq[seq.len().saturating_sub(order - 1)..], t)),
            }
        }
        seq.push(EOS_ID);
        for j in 1..seq.len() {
            let start = j.saturating_sub(order - 1);
            let gram = &seq[start..=j];
            let numerator = counts.table(gram.len()).get(gram).copied().unwrap_or(0);
            if numerator == 0 {
                return Err(unseen(gram, ""));
            }
            let denominator = if gram.len() == 1 {
                unigram_total
            } else {
                let ctx = &gram[..gram.len() - 1];
                counts.table(ctx.len()).get(ctx).copied().unwrap_or(0)
            };
            total += (numerator as f64 / denominator as f64).ln();
        }
    }
    Ok(total)
}
