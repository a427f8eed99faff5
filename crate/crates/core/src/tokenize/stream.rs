use serde::{Deserialize, Serialize};

/// Token emitted for a space by the character scheme.
pub const SPACE_TOKEN: &str = "<##>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Word,
    Character,
    Disjoint,
    #[serde(rename = "morph")]
    MorphAdapter,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Word,
        Scheme::Character,
        Scheme::Disjoint,
        Scheme::MorphAdapter,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Word => "word",
            Scheme::Character => "character",
            Scheme::Disjoint => "disjoint",
            Scheme::MorphAdapter => "morph",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "word" => Ok(Scheme::Word),
            "character" | "char" => Ok(Scheme::Character),
            "disjoint" => Ok(Scheme::Disjoint),
            "morph" | "morph_adapter" | "farasa" => Ok(Scheme::MorphAdapter),
            other => Err(format!("unknown tokenization scheme `{other}`")),
        }
    }
}

/// A tokenized corpus.
///
/// Tokens are stored back to back in one buffer. Each token carries a flag
/// telling whether it closes a whitespace-delimited word, which is the
/// context undotting needs for subword schemes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    scheme: Scheme,
    buf: String,
    ends: Vec<usize>,
    word_final: Vec<bool>,
    sample_ends: Vec<usize>,
}

impl TokenStream {
    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            buf: String::new(),
            ends: Vec::new(),
            word_final: Vec::new(),
            sample_ends: Vec::new(),
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    /// Appends a token to the current sample. Empty tokens are ignored.
    pub fn push(&mut self, token: &str, word_final: bool) {
        if token.is_empty() {
            return;
        }
        self.buf.push_str(token);
        self.ends.push(self.buf.len());
        self.word_final.push(word_final);
    }

    /// Closes the current sample.
    pub fn end_sample(&mut self) {
        self.sample_ends.push(self.ends.len());
    }

    pub fn token(&self, i: usize) -> &str {
        let start = if i == 0 { 0 } else { self.ends[i - 1] };
        &self.buf[start..self.ends[i]]
    }

    pub fn is_word_final(&self, i: usize) -> bool {
        self.word_final[i]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        (0..self.len()).map(move |i| self.token(i))
    }

    /// Token flags paired with their text.
    pub fn iter_with_flags(&self) -> impl Iterator<Item = (&str, bool)> + '_ {
        (0..self.len()).map(move |i| (self.token(i), self.word_final[i]))
    }

    pub fn sample_count(&self) -> usize {
        self.sample_ends.len()
    }

    /// Token index ranges of each sample. Tokens pushed after the last
    /// `end_sample` form a trailing open sample.
    pub fn sample_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut ranges = Vec::with_capacity(self.sample_ends.len() + 1);
        let mut start = 0;
        for &end in &self.sample_ends {
            ranges.push(start..end);
            start = end;
        }
        if start < self.len() {
            ranges.push(start..self.len());
        }
        ranges
    }

    pub fn samples(&self) -> impl Iterator<Item = Vec<&str>> + '_ {
        self.sample_ranges()
            .into_iter()
            .map(move |r| r.map(|i| self.token(i)).collect())
    }

    /// Concatenates streams of the same scheme in order.
    pub fn concat<'a>(
        scheme: Scheme,
        parts: impl IntoIterator<Item = &'a TokenStream>,
    ) -> TokenStream {
        let mut out = TokenStream::new(scheme);
        for part in parts {
            assert_eq!(
                part.scheme, scheme,
                "concatenating streams of different schemes"
            );
            let token_base = out.len();
            let byte_base = out.buf.len();
            out.buf.push_str(&part.buf);
            out.ends.extend(part.ends.iter().map(|e| e + byte_base));
            out.word_final.extend_from_slice(&part.word_final);
            out.sample_ends
                .extend(part.sample_ends.iter().map(|e| e + token_base));
        }
        out
    }

    /// Scheme-specific inverse: one line per sample.
    pub fn detokenize(&self) -> Vec<String> {
        self.sample_ranges()
            .into_iter()
            .map(|range| {
                let mut line = String::new();
                let last = range.end;
                for i in range {
                    let tok = self.token(i);
                    match self.scheme {
                        Scheme::Character => {
                            if tok == SPACE_TOKEN {
                                line.push(' ');
                            } else {
                                line.push_str(tok);
                            }
                        }
                        _ => {
                            line.push_str(tok);
                            if self.word_final[i] && i + 1 < last {
                                line.push(' ');
                            }
                        }
                    }
                }
                line
            })
            .collect()
    }

    /// Writes one token per line, with an empty line after each sample.
    pub fn write_tokens<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for range in self.sample_ranges() {
            for i in range {
                writeln!(w, "{}", self.token(i))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
