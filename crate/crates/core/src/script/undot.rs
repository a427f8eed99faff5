//! Dotted to dotless (rasm) mapping.

use serde::Serialize;
use thiserror::Error;

use super::alphabet::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot undot U+{:04X} `{ch}` at character offset {offset}", *ch as u32)]
pub struct UndotError {
    pub ch: char,
    /// Offset in code points from the start of the input.
    pub offset: usize,
}

/// Position of a letter inside its whitespace-delimited word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    /// Initial or medial.
    NonFinal,
    Final,
}

/// Undotting rule: a per-letter table plus positional overrides for noon,
/// yeh and qaf when they are not word-final.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UndotRule {
    positional: bool,
}

impl Default for UndotRule {
    fn default() -> Self {
        Self { positional: true }
    }
}

/// Table mapping, which is also the word-final form.
pub fn base_map(c: char) -> Option<char> {
    let mapped = match c {
        BEH | TEH | THEH => DOTLESS_BEH,
        JEEM | HAH | KHAH => HAH,
        DAL | THAL => DAL,
        REH | ZAIN => REH,
        SEEN | SHEEN => SEEN,
        SAD | DAD => SAD,
        TAH | ZAH => TAH,
        AIN | GHAIN => AIN,
        FEH => DOTLESS_FEH,
        QAF => DOTLESS_QAF,
        NOON => NOON_GHUNNA,
        YEH => ALEF_MAKSURA,
        TEH_MARBUTA => HEH,
        HAMZA | ALEF | KAF | LAM | MEEM | HEH | WAW | ALEF_MAKSURA => c,
        DOTLESS_BEH | DOTLESS_QAF | DOTLESS_FEH | NOON_GHUNNA => c,
        _ => return None,
    };
    Some(mapped)
}

/// Override for letters that change shape when not word-final.
pub fn positional_override(c: char) -> Option<char> {
    match c {
        NOON | YEH => Some(DOTLESS_BEH),
        QAF => Some(DOTLESS_FEH),
        _ => None,
    }
}

impl UndotRule {
    /// Table mapping only, without positional overrides.
    pub fn strict_table() -> Self {
        Self { positional: false }
    }

    pub fn with_positional_overrides(positional: bool) -> Self {
        Self { positional }
    }

    pub fn positional(&self) -> bool {
        self.positional
    }

    pub fn map_char(&self, c: char, position: Position) -> Option<char> {
        if self.positional && position == Position::NonFinal {
            if let Some(mapped) = positional_override(c) {
                return Some(mapped);
            }
        }
        base_map(c)
    }

    /// Undot preprocessed text. Spaces are preserved and every other
    /// character must be a dotted or dotless letter.
    pub fn undot(&self, text: &str) -> Result<String, UndotError> {
        let mut out = String::with_capacity(text.len() + text.len() / 2);
        self.undot_into(text, true, &mut out).map(|_| out)
    }

    /// Undot `text` into `out`. When `ends_word` is false the last letter is
    /// treated as word-medial, for pieces of a longer word.
    pub fn undot_into(
        &self,
        text: &str,
        ends_word: bool,
        out: &mut String,
    ) -> Result<(), UndotError> {
        let mut chars = text.chars().enumerate().peekable();
        while let Some((offset, c)) = chars.next() {
            if c == ' ' {
                out.push(c);
                continue;
            }
            let position = match chars.peek() {
                Some((_, ' ')) => Position::Final,
                Some(_) => Position::NonFinal,
                None if ends_word => Position::Final,
                None => Position::NonFinal,
            };
            match self.map_char(c, position) {
                Some(mapped) => out.push(mapped),
                None => return Err(UndotError { ch: c, offset }),
            }
        }
        Ok(())
    }
}

/// Undot with the default rule (positional overrides on).
pub fn undot(text: &str) -> Result<String, UndotError> {
    UndotRule::default().undot(text)
}

#[derive(Debug, Clone, Serialize)]
pub struct LetterEntry {
    pub letter: String,
    pub code_point: String,
    pub class: CharClass,
    pub non_connector: bool,
    /// Image in word-final position.
    #[serde(rename = "final")]
    pub final_form: String,
    /// Image in initial or medial position.
    pub non_final: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharEntry {
    pub letter: String,
    pub code_point: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CarrierEntry {
    pub form: String,
    pub code_point: String,
    pub carrier: String,
}

/// Reference description of the alphabet and the undot map, as emitted by
/// `rasm alphabet dump`.
#[derive(Debug, Clone, Serialize)]
pub struct AlphabetDump {
    pub positional_overrides: bool,
    pub dotted_count: usize,
    pub dotless_count: usize,
    pub dotted: Vec<LetterEntry>,
    pub dotless: Vec<CharEntry>,
    pub diacritics: Vec<CharEntry>,
    pub hamza_carriers: Vec<CarrierEntry>,
}

fn code_point(c: char) -> String {
    format!("U+{:04X}", c as u32)
}

fn char_entry(c: char) -> CharEntry {
    CharEntry {
        letter: c.to_string(),
        code_point: code_point(c),
    }
}

impl AlphabetDump {
    pub fn new(rule: UndotRule) -> Self {
        let dotted = DOTTED_LETTERS
            .iter()
            .map(|&c| LetterEntry {
                letter: c.to_string(),
                code_point: code_point(c),
                class: char_class(c),
                non_connector: is_non_connector(c),
                final_form: rule
                    .map_char(c, Position::Final)
                    .expect("total")
                    .to_string(),
                non_final: rule
                    .map_char(c, Position::NonFinal)
                    .expect("total")
                    .to_string(),
            })
            .collect();
        Self {
            positional_overrides: rule.positional(),
            dotted_count: DOTTED_LETTERS.len(),
            dotless_count: DOTLESS_LETTERS.len(),
            dotted,
            dotless: DOTLESS_LETTERS.iter().map(|&c| char_entry(c)).collect(),
            diacritics: DIACRITICS.iter().map(|&c| char_entry(c)).collect(),
            hamza_carriers: HAMZA_CARRIERS
                .iter()
                .map(|&(form, carrier)| CarrierEntry {
                    form: form.to_string(),
                    code_point: code_point(form),
                    carrier: carrier.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("alphabet dump serializes")
    }
}
