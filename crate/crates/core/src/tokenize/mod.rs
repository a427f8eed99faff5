//! Tokenization at four granularities: words, characters, disjoint-letter
//! subwords and externally produced morphological segments.

mod morph;
mod stream;

pub use morph::{load_morph_segmentation, parse_morph_segmentation, DEFAULT_MORPH_DELIMITER};
pub use stream::{Scheme, TokenStream, SPACE_TOKEN};

use thiserror::Error;

use crate::script::{alphabet::is_non_connector, UndotError, UndotRule};

#[derive(Debug, Error)]
pub enum TokenizeError {
    #[error("segmented file has {segmented} lines but the corpus has {corpus} samples")]
    LineCount { segmented: usize, corpus: usize },
    #[error("segmentation does not reconstruct the corpus on lines {}", format_lines(.lines))]
    Reconstruction { lines: Vec<usize> },
    #[error("token {token}: {source}")]
    Undot { token: usize, source: UndotError },
    #[error("scheme {0} needs a pre-segmented companion file")]
    MissingSegmentation(Scheme),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_lines(lines: &[usize]) -> String {
    const SHOWN: usize = 10;
    let mut s = lines
        .iter()
        .take(SHOWN)
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    if lines.len() > SHOWN {
        s.push_str(&format!(" (and {} more)", lines.len() - SHOWN));
    }
    s
}

pub fn push_words(stream: &mut TokenStream, text: &str) {
    for word in text.split(' ').filter(|w| !w.is_empty()) {
        stream.push(word, true);
    }
}

pub fn push_chars(stream: &mut TokenStream, text: &str) {
    let mut utf8 = [0u8; 4];
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c == ' ' {
            stream.push(SPACE_TOKEN, true);
        } else {
            let word_final = matches!(chars.peek(), None | Some(' '));
            stream.push(c.encode_utf8(&mut utf8), word_final);
        }
    }
}

/// Splits each word after every non-connecting letter.
pub fn push_disjoint(stream: &mut TokenStream, text: &str) {
    for word in text.split(' ').filter(|w| !w.is_empty()) {
        let mut start = 0;
        for (i, c) in word.char_indices() {
            let end = i + c.len_utf8();
            if is_non_connector(c) && end < word.len() {
                stream.push(&word[start..end], false);
                start = end;
            }
        }
        stream.push(&word[start..], true);
    }
}

fn single(scheme: Scheme, text: &str, f: fn(&mut TokenStream, &str)) -> TokenStream {
    let mut s = TokenStream::new(scheme);
    f(&mut s, text);
    s.end_sample();
    s
}

pub fn tokenize_word(text: &str) -> TokenStream {
    single(Scheme::Word, text, push_words)
}

pub fn tokenize_char(text: &str) -> TokenStream {
    single(Scheme::Character, text, push_chars)
}

pub fn tokenize_disjoint(text: &str) -> TokenStream {
    single(Scheme::Disjoint, text, push_disjoint)
}

/// Tokenizes preprocessed samples, one stream sample per input sample.
/// The morphological scheme cannot be produced here; see
/// [`parse_morph_segmentation`].
pub fn tokenize_samples<S: AsRef<str>>(
    scheme: Scheme,
    samples: &[S],
) -> Result<TokenStream, TokenizeError> {
    let push: fn(&mut TokenStream, &str) = match scheme {
        Scheme::Word => push_words,
        Scheme::Character => push_chars,
        Scheme::Disjoint => push_disjoint,
        Scheme::MorphAdapter => return Err(TokenizeError::MissingSegmentation(scheme)),
    };
    let mut stream = TokenStream::new(scheme);
    for sample in samples {
        push(&mut stream, sample.as_ref());
        stream.end_sample();
    }
    Ok(stream)
}

/// Undots every token. Letters take their positional form from their place
/// in the original word, so a subword that ends mid-word is undotted as
/// medial.
pub fn undot_stream(stream: &TokenStream, rule: UndotRule) -> Result<TokenStream, TokenizeError> {
    let mut out = TokenStream::new(stream.scheme());
    let mut buf = String::new();
    for range in stream.sample_ranges() {
        for i in range {
            let token = stream.token(i);
            let word_final = stream.is_word_final(i);
            if stream.scheme() == Scheme::Character && token == SPACE_TOKEN {
                out.push(token, word_final);
                continue;
            }
            buf.clear();
            rule.undot_into(token, word_final, &mut buf)
                .map_err(|source| TokenizeError::Undot { token: i, source })?;
            out.push(&buf, word_final);
        }
        out.end_sample();
    }
    Ok(out)
}
