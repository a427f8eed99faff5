//! Adapter for corpora segmented by an external morphological analyzer.
//!
//! The segmented file holds one sample per line, words separated by
//! whitespace and morphemes inside a word separated by a delimiter
//! (`+` by default). It must align line for line with the preprocessed
//! corpus, and every word's pieces must concatenate back to that word.

use std::path::Path;

use super::{Scheme, TokenStream, TokenizeError};

pub const DEFAULT_MORPH_DELIMITER: &str = "+";

pub fn load_morph_segmentation<S: AsRef<str>>(
    path: &Path,
    delimiter: &str,
    corpus: &[S],
) -> Result<TokenStream, TokenizeError> {
    let text = std::fs::read_to_string(path)?;
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    parse_morph_segmentation(&lines, delimiter, corpus)
}

/// Builds a morpheme stream from segmented lines, validating each line
/// against the corresponding corpus sample. Line numbers in errors are
/// 1-based over the non-empty lines.
pub fn parse_morph_segmentation<L: AsRef<str>, S: AsRef<str>>(
    lines: &[L],
    delimiter: &str,
    corpus: &[S],
) -> Result<TokenStream, TokenizeError> {
    if lines.len() != corpus.len() {
        return Err(TokenizeError::LineCount {
            segmented: lines.len(),
            corpus: corpus.len(),
        });
    }
    let mut stream = TokenStream::new(Scheme::MorphAdapter);
    let mut bad = Vec::new();
    let mut pieces: Vec<&str> = Vec::new();
    let mut joined = String::new();

    for (lineno, (line, sample)) in lines.iter().zip(corpus).enumerate() {
        let mut expected = sample.as_ref().split(' ').filter(|w| !w.is_empty());
        let mut ok = true;
        for word in line.as_ref().split_whitespace() {
            pieces.clear();
            pieces.extend(word.split(delimiter).filter(|p| !p.is_empty()));
            joined.clear();
            pieces.iter().for_each(|p| joined.push_str(p));
            if expected.next() != Some(joined.as_str()) {
                ok = false;
            }
            if let Some((last, init)) = pieces.split_last() {
                for p in init {
                    stream.push(p, false);
                }
                stream.push(last, true);
            }
        }
        if expected.next().is_some() {
            ok = false;
        }
        if !ok {
            bad.push(lineno + 1);
        }
        stream.end_sample();
    }
    if bad.is_empty() {
        Ok(stream)
    } else {
        Err(TokenizeError::Reconstruction { lines: bad })
    }
}
