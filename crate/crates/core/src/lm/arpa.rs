//! Sorted text model format in the ARPA layout.
//!
//! ```text
//! \data\
//! ngram 1=5
//! ngram 2=4
//!
//! \1-grams:
//! -0.69897 </s> -0.301
//! ...
//! \end\
//! ```
//!
//! Each entry is `log10 p<TAB>tokens[<TAB>log10 backoff]`; the example above
//! shows tabs as spaces. Probabilities are the fully interpolated values, so
//! standard backoff evaluation of the file reproduces the in-memory model.
//! Entries within an order are sorted by token string; `<s>` is listed with
//! probability -99.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::counts::{BOS, BOS_ID, EOS, UNK};
use super::kn::KneserNey;
use super::{LanguageModel, LmError};

const NO_PROB: f64 = -99.0;

/// Token strings, log10 probability and optional log10 backoff weight.
type Entry<'a> = (Vec<&'a str>, f64, Option<f64>);

pub fn write_arpa<W: Write>(model: &KneserNey, mut out: W) -> Result<(), LmError> {
    let vocab = model.vocab();
    let order = model.order();
    let mut sections: Vec<Vec<Entry>> = Vec::with_capacity(order);
    for k in 1..=order {
        let bow = |gram: &[u32]| {
            if k < order {
                model.backoff_weight(gram).map(f64::log10)
            } else {
                None
            }
        };
        let mut entries = Vec::new();
        if k == 1 {
            for id in 0..vocab.len() as u32 {
                let gram = [id];
                let p = if id == BOS_ID {
                    NO_PROB
                } else {
                    model.prob(&[], id).log10()
                };
                entries.push((vec![vocab.word(id)], p, bow(&gram)));
            }
        } else {
            for gram in model.levels()[k - 1].counts.keys() {
                let (ctx, w) = gram.split_at(k - 1);
                let p = model.prob(ctx, w[0]).log10();
                entries.push((
                    gram.iter().map(|&id| vocab.word(id)).collect(),
                    p,
                    bow(gram),
                ));
            }
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        sections.push(entries);
    }

    writeln!(out, "\\data\\")?;
    for (k, entries) in sections.iter().enumerate() {
        writeln!(out, "ngram {}={}", k + 1, entries.len())?;
    }
    for (k, entries) in sections.iter().enumerate() {
        writeln!(out, "\n\\{}-grams:", k + 1)?;
        for (gram, p, bow) in entries {
            write!(out, "{p}\t{}", gram.join(" "))?;
            if let Some(b) = bow {
                write!(out, "\t{b}")?;
            }
            writeln!(out)?;
        }
    }
    writeln!(out, "\n\\end\\")?;
    Ok(())
}

/// A model read back from the text format, evaluated with standard backoff.
#[derive(Debug, Clone)]
pub struct ArpaModel {
    order: usize,
    ids: HashMap<String, u32>,
    entries: HashMap<Box<[u32]>, (f64, f64)>,
    unk: u32,
}

impl ArpaModel {
    pub fn order(&self) -> usize {
        self.order
    }

    /// log10 p(word | context) by backing off from the longest context.
    pub fn log10_prob(&self, context: &[u32], word: u32) -> f64 {
        let mut backoff = 0.0;
        let mut gram: Vec<u32> = Vec::with_capacity(context.len() + 1);
        for start in 0..=context.len() {
            gram.clear();
            gram.extend_from_slice(&context[start..]);
            gram.push(word);
            if let Some(&(p, _)) = self.entries.get(gram.as_slice()) {
                return backoff + p;
            }
            if let Some(&(_, b)) = self.entries.get(&context[start..]) {
                backoff += b;
            }
        }
        backoff + NO_PROB
    }

    fn id(&self, token: &str) -> u32 {
        self.ids.get(token).copied().unwrap_or(self.unk)
    }
}

impl LanguageModel for ArpaModel {
    fn sample_logprob(&self, tokens: &[&str], score_eos: bool) -> f64 {
        let mut ctx = vec![self.id(BOS)];
        let mut total = 0.0;
        let words = tokens
            .iter()
            .map(|t| self.id(t))
            .chain(score_eos.then(|| self.id(EOS)));
        for w in words {
            let start = ctx.len().saturating_sub(self.order - 1);
            total += self.log10_prob(&ctx[start..], w);
            ctx.push(w);
        }
        total * std::f64::consts::LN_10
    }

    fn in_vocab(&self, token: &str) -> bool {
        !matches!(token, UNK | BOS | EOS) && self.ids.contains_key(token)
    }
}

pub fn read_arpa<R: BufRead>(input: R) -> Result<ArpaModel, LmError> {
    let format = |line: usize, message: String| LmError::Format { line, message };
    let mut declared: Vec<usize> = Vec::new();
    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut entries: HashMap<Box<[u32]>, (f64, f64)> = HashMap::new();
    let mut section = 0usize;
    let mut seen_data = false;
    let mut ended = false;

    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if line == "\\data\\" {
            seen_data = true;
            continue;
        }
        if line == "\\end\\" {
            ended = true;
            break;
        }
        if !seen_data {
            return Err(format(lineno, "expected \\data\\ header".into()));
        }
        if let Some(rest) = line.strip_prefix("ngram ") {
            let (k, n) = rest
                .split_once('=')
                .ok_or_else(|| format(lineno, "bad ngram count line".into()))?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| format(lineno, "bad order".into()))?;
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| format(lineno, "bad count".into()))?;
            if k != declared.len() + 1 {
                return Err(format(lineno, format!("ngram {k} out of sequence")));
            }
            declared.push(n);
            continue;
        }
        if let Some(k) = line
            .strip_prefix('\\')
            .and_then(|s| s.strip_suffix("-grams:"))
        {
            section = k
                .parse()
                .map_err(|_| format(lineno, "bad section header".into()))?;
            if section == 0 || section > declared.len() {
                return Err(format(lineno, format!("section {section} not declared")));
            }
            continue;
        }
        if section == 0 {
            return Err(format(lineno, "entry outside a section".into()));
        }
        let mut fields = line.split('\t');
        let p: f64 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| format(lineno, "bad probability".into()))?;
        let words: Vec<&str> = fields
            .next()
            .unwrap_or("")
            .split(' ')
            .filter(|w| !w.is_empty())
            .collect();
        if words.len() != section {
            return Err(format(
                lineno,
                format!("expected {section} tokens, found {}", words.len()),
            ));
        }
        let b: f64 = match fields.next() {
            Some(f) => f
                .parse()
                .map_err(|_| format(lineno, "bad backoff".into()))?,
            None => 0.0,
        };
        let gram: Box<[u32]> = words
            .iter()
            .map(|w| {
                let next = ids.len() as u32;
                *ids.entry((*w).to_owned()).or_insert(next)
            })
            .collect();
        entries.insert(gram, (p, b));
    }
    if !ended {
        return Err(format(0, "missing \\end\\".into()));
    }
    for (k, &n) in declared.iter().enumerate() {
        let found = entries.keys().filter(|g| g.len() == k + 1).count();
        if found != n {
            return Err(format(
                0,
                format!("declared {n} {}-grams, found {found}", k + 1),
            ));
        }
    }
    for reserved in [UNK, BOS, EOS] {
        if !ids.contains_key(reserved) {
            return Err(format(0, format!("missing {reserved} unigram")));
        }
    }
    let unk = ids[UNK];
    Ok(ArpaModel {
        order: declared.len(),
        ids,
        entries,
        unk,
    })
}
