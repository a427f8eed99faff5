//! Arabic character inventory.
//!
//! The dotted alphabet is the 28 base letters plus standalone Hamza,
//! Teh-Marbuta and Alef-Maksura (31 code points). Its image under the undot
//! map is the 18 rasm letters plus standalone Hamza (19 code points).

use serde::Serialize;

pub const ALEF: char = '\u{0627}';
pub const BEH: char = '\u{0628}';
pub const TEH_MARBUTA: char = '\u{0629}';
pub const TEH: char = '\u{062A}';
pub const THEH: char = '\u{062B}';
pub const JEEM: char = '\u{062C}';
pub const HAH: char = '\u{062D}';
pub const KHAH: char = '\u{062E}';
pub const DAL: char = '\u{062F}';
pub const THAL: char = '\u{0630}';
pub const REH: char = '\u{0631}';
pub const ZAIN: char = '\u{0632}';
pub const SEEN: char = '\u{0633}';
pub const SHEEN: char = '\u{0634}';
pub const SAD: char = '\u{0635}';
pub const DAD: char = '\u{0636}';
pub const TAH: char = '\u{0637}';
pub const ZAH: char = '\u{0638}';
pub const AIN: char = '\u{0639}';
pub const GHAIN: char = '\u{063A}';
pub const FEH: char = '\u{0641}';
pub const QAF: char = '\u{0642}';
pub const KAF: char = '\u{0643}';
pub const LAM: char = '\u{0644}';
pub const MEEM: char = '\u{0645}';
pub const NOON: char = '\u{0646}';
pub const HEH: char = '\u{0647}';
pub const WAW: char = '\u{0648}';
pub const ALEF_MAKSURA: char = '\u{0649}';
pub const YEH: char = '\u{064A}';
pub const HAMZA: char = '\u{0621}';

/// Rasm of beh, teh, theh (and medial noon/yeh).
pub const DOTLESS_BEH: char = '\u{066E}';
/// Rasm of qaf in final position.
pub const DOTLESS_QAF: char = '\u{066F}';
/// Rasm of feh (and medial qaf).
pub const DOTLESS_FEH: char = '\u{06A1}';
/// Noon ghunna, the rasm of final noon.
pub const NOON_GHUNNA: char = '\u{06BA}';

pub const ALEF_MADDA: char = '\u{0622}';
pub const ALEF_HAMZA_ABOVE: char = '\u{0623}';
pub const WAW_HAMZA: char = '\u{0624}';
pub const ALEF_HAMZA_BELOW: char = '\u{0625}';
pub const YEH_HAMZA: char = '\u{0626}';

/// The 31 dotted letters, in code point order.
pub const DOTTED_LETTERS: [char; 31] = [
    HAMZA,
    ALEF,
    BEH,
    TEH_MARBUTA,
    TEH,
    THEH,
    JEEM,
    HAH,
    KHAH,
    DAL,
    THAL,
    REH,
    ZAIN,
    SEEN,
    SHEEN,
    SAD,
    DAD,
    TAH,
    ZAH,
    AIN,
    GHAIN,
    FEH,
    QAF,
    KAF,
    LAM,
    MEEM,
    NOON,
    HEH,
    WAW,
    ALEF_MAKSURA,
    YEH,
];

/// The 19 dotless letters, in code point order.
pub const DOTLESS_LETTERS: [char; 19] = [
    HAMZA,
    ALEF,
    HAH,
    DAL,
    REH,
    SEEN,
    SAD,
    TAH,
    AIN,
    KAF,
    LAM,
    MEEM,
    HEH,
    WAW,
    ALEF_MAKSURA,
    DOTLESS_BEH,
    DOTLESS_QAF,
    DOTLESS_FEH,
    NOON_GHUNNA,
];

/// Fathatan through sukun.
pub const DIACRITICS: [char; 8] = [
    '\u{064B}', '\u{064C}', '\u{064D}', '\u{064E}', '\u{064F}', '\u{0650}', '\u{0651}', '\u{0652}',
];

/// Hamza-seated forms and the letter each one keeps after the hamza is removed.
pub const HAMZA_CARRIERS: [(char, char); 5] = [
    (ALEF_MADDA, ALEF),
    (ALEF_HAMZA_ABOVE, ALEF),
    (WAW_HAMZA, WAW),
    (ALEF_HAMZA_BELOW, ALEF),
    (YEH_HAMZA, YEH),
];

/// Letters that never join to the following letter.
pub const NON_CONNECTORS: [char; 6] = [ALEF, DAL, THAL, REH, ZAIN, WAW];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CharClass {
    LetterDotted,
    LetterDotless,
    Diacritic,
    HamzaCarrierForm,
    Space,
    Other,
}

pub fn is_dotted_letter(c: char) -> bool {
    DOTTED_LETTERS.binary_search(&c).is_ok()
}

pub fn is_dotless_letter(c: char) -> bool {
    DOTLESS_LETTERS.contains(&c)
}

pub fn is_diacritic(c: char) -> bool {
    DIACRITICS.contains(&c)
}

/// Carrier letter for a hamza-seated form.
pub fn hamza_carrier(c: char) -> Option<char> {
    HAMZA_CARRIERS
        .iter()
        .find(|(form, _)| *form == c)
        .map(|(_, carrier)| *carrier)
}

/// True for non-connecting letters and their dotless images.
pub fn is_non_connector(c: char) -> bool {
    NON_CONNECTORS.contains(&c)
}

/// Letters present in both inventories (alef, lam, ...) classify as dotted.
pub fn char_class(c: char) -> CharClass {
    if is_dotted_letter(c) {
        CharClass::LetterDotted
    } else if is_dotless_letter(c) {
        CharClass::LetterDotless
    } else if is_diacritic(c) {
        CharClass::Diacritic
    } else if hamza_carrier(c).is_some() {
        CharClass::HamzaCarrierForm
    } else if c.is_whitespace() {
        CharClass::Space
    } else {
        CharClass::Other
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn cardinalities() {
        let dotted: HashSet<_> = DOTTED_LETTERS.iter().collect();
        let dotless: HashSet<_> = DOTLESS_LETTERS.iter().collect();
        assert_eq!(dotted.len(), 31);
        assert_eq!(dotless.len(), 19);
        assert_eq!(DIACRITICS.len(), 8);
    }

    #[test]
    fn dotted_table_is_sorted() {
        assert!(DOTTED_LETTERS.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn classes() {
        assert_eq!(char_class('\u{064E}'), CharClass::Diacritic);
        assert_eq!(char_class(BEH), CharClass::LetterDotted);
        assert_eq!(char_class('x'), CharClass::Other);
        assert_eq!(char_class(DOTLESS_BEH), CharClass::LetterDotless);
        assert_eq!(char_class(ALEF_HAMZA_BELOW), CharClass::HamzaCarrierForm);
        assert_eq!(char_class(' '), CharClass::Space);
        assert_eq!(char_class('\u{0640}'), CharClass::Other);
    }

    #[test]
    fn carriers_are_letters() {
        for (_, carrier) in HAMZA_CARRIERS {
            assert!(is_dotted_letter(carrier));
        }
    }
}
