//! Text normalization ahead of undotting and tokenization.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::alphabet::{hamza_carrier, is_diacritic, is_dotted_letter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LanguageMode {
    #[default]
    Arabic,
    Latin,
}

impl std::str::FromStr for LanguageMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arabic" => Ok(Self::Arabic),
            "latin" => Ok(Self::Latin),
            other => Err(format!("unknown language mode `{other}`")),
        }
    }
}

/// Counts of characters removed by [`preprocess_into`]. Diacritics are
/// removed by rule and are not recorded here.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DropHistogram {
    counts: BTreeMap<char, u64>,
}

impl DropHistogram {
    pub fn record(&mut self, c: char) {
        *self.counts.entry(c).or_insert(0) += 1;
    }

    pub fn merge(&mut self, other: &DropHistogram) {
        for (&c, &n) in &other.counts {
            *self.counts.entry(c).or_insert(0) += n;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (char, u64)> + '_ {
        self.counts.iter().map(|(&c, &n)| (c, n))
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

pub fn preprocess(text: &str, mode: LanguageMode) -> String {
    let mut dropped = DropHistogram::default();
    preprocess_into(text, mode, &mut dropped)
}

/// Arabic mode keeps dotted letters, replaces hamza-seated forms by their
/// carrier, removes diacritics and drops everything else. Latin mode
/// lowercases and keeps `a`..=`z`. In both modes whitespace runs collapse to
/// one space and the result is trimmed.
pub fn preprocess_into(text: &str, mode: LanguageMode, dropped: &mut DropHistogram) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    let push = |out: &mut String, c: char, pending: &mut bool| {
        if *pending && !out.is_empty() {
            out.push(' ');
        }
        *pending = false;
        out.push(c);
    };

    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = true;
            continue;
        }
        match mode {
            LanguageMode::Arabic => {
                if is_dotted_letter(c) {
                    push(&mut out, c, &mut pending_space);
                } else if let Some(carrier) = hamza_carrier(c) {
                    push(&mut out, carrier, &mut pending_space);
                } else if !is_diacritic(c) {
                    dropped.record(c);
                }
            }
            LanguageMode::Latin => {
                let mut kept = false;
                for lower in c.to_lowercase() {
                    if lower.is_ascii_lowercase() {
                        push(&mut out, lower, &mut pending_space);
                        kept = true;
                    }
                }
                if !kept {
                    dropped.record(c);
                }
            }
        }
    }
    out
}
