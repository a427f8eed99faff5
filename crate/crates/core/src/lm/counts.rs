use std::collections::{BTreeMap, HashMap};

use crate::tokenize::TokenStream;

use super::LmError;

pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

pub const UNK_ID: u32 = 0;
pub const BOS_ID: u32 = 1;
pub const EOS_ID: u32 = 2;

pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 6;

/// Token interning with the reserved `<unk>`, `<s>` and `</s>` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    ids: HashMap<String, u32>,
    words: Vec<String>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        let mut v = Self {
            ids: HashMap::new(),
            words: Vec::new(),
        };
        for w in [UNK, BOS, EOS] {
            v.intern(w);
        }
        v
    }
}

impl Vocabulary {
    pub fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.ids.insert(word.to_owned(), id);
        self.words.push(word.to_owned());
        id
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }

    /// Id of `word`, or `<unk>`.
    pub fn lookup(&self, word: &str) -> u32 {
        self.id(word).unwrap_or(UNK_ID)
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    /// Size including the reserved entries.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.len() <= 3
    }

    /// True for tokens seen in training, reserved entries excluded.
    pub fn contains_token(&self, word: &str) -> bool {
        self.id(word).is_some_and(|id| id > EOS_ID)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

pub(crate) type Table = HashMap<Box<[u32]>, u64>;

/// Raw counts of every k-gram, k = 1..=order, over samples padded with one
/// `<s>` and one `</s>`.
#[derive(Debug, Clone)]
pub struct NgramCounts {
    order: usize,
    vocab: Vocabulary,
    tables: Vec<Table>,
}

fn check_order(order: usize) -> Result<(), LmError> {
    if (MIN_ORDER..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(LmError::OrderOutOfRange(order))
    }
}

impl NgramCounts {
    pub fn new(order: usize) -> Result<Self, LmError> {
        check_order(order)?;
        Ok(Self {
            order,
            vocab: Vocabulary::default(),
            tables: vec![Table::new(); order],
        })
    }

    pub fn count(stream: &TokenStream, order: usize) -> Result<Self, LmError> {
        let mut counts = Self::new(order)?;
        if stream.is_empty() {
            return Err(LmError::EmptyStream);
        }
        counts.add_stream(stream);
        Ok(counts)
    }

    pub fn add_stream(&mut self, stream: &TokenStream) {
        let mut seq = Vec::new();
        for range in stream.sample_ranges() {
            seq.clear();
            seq.push(BOS_ID);
            for i in range {
                seq.push(self.vocab.intern(stream.token(i)));
            }
            seq.push(EOS_ID);
            self.add_sequence(&seq);
        }
    }

    /// Adds every k-gram of an already padded id sequence.
    pub(crate) fn add_sequence(&mut self, seq: &[u32]) {
        for start in 0..seq.len() {
            for k in 1..=self.order.min(seq.len() - start) {
                *self.tables[k - 1]
                    .entry(seq[start..start + k].into())
                    .or_insert(0) += 1;
            }
        }
    }

    pub(crate) fn insert_raw(&mut self, gram: &[u32], count: u64) {
        *self.tables[gram.len() - 1].entry(gram.into()).or_insert(0) += count;
    }

    pub(crate) fn vocab_mut(&mut self) -> &mut Vocabulary {
        &mut self.vocab
    }

    /// Adds another count set, remapping its token ids.
    pub fn merge(&mut self, other: &NgramCounts) -> Result<(), LmError> {
        if other.order != self.order {
            return Err(LmError::OrderMismatch(self.order, other.order));
        }
        let remap: Vec<u32> = other
            .vocab
            .words
            .iter()
            .map(|w| self.vocab.intern(w))
            .collect();
        for (k, table) in other.tables.iter().enumerate() {
            for (gram, &c) in table {
                let key: Box<[u32]> = gram.iter().map(|&id| remap[id as usize]).collect();
                *self.tables[k].entry(key).or_insert(0) += c;
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Raw k-gram table, k in 1..=order.
    pub(crate) fn table(&self, k: usize) -> &Table {
        &self.tables[k - 1]
    }

    pub fn get(&self, gram: &[&str]) -> u64 {
        if gram.is_empty() || gram.len() > self.order {
            return 0;
        }
        let ids: Option<Vec<u32>> = gram.iter().map(|w| self.vocab.id(w)).collect();
        ids.and_then(|ids| self.tables[gram.len() - 1].get(ids.as_slice()).copied())
            .unwrap_or(0)
    }

    /// Distinct k-grams for k = 1..=order.
    pub fn distinct(&self) -> Vec<usize> {
        self.tables.iter().map(|t| t.len()).collect()
    }

    /// Table k as sorted token strings.
    pub fn to_string_map(&self, k: usize) -> BTreeMap<Vec<String>, u64> {
        self.tables[k - 1]
            .iter()
            .map(|(g, &c)| {
                (
                    g.iter().map(|&id| self.vocab.word(id).to_owned()).collect(),
                    c,
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize::Scheme;

    fn stream(samples: &[&[&str]]) -> TokenStream {
        let mut s = TokenStream::new(Scheme::Word);
        for sample in samples {
            sample.iter().for_each(|t| s.push(t, true));
            s.end_sample();
        }
        s
    }

    fn bigrams(c: &NgramCounts) -> BTreeMap<Vec<String>, u64> {
        c.to_string_map(2)
    }

    fn key(a: &str, b: &str) -> Vec<String> {
        vec![a.to_owned(), b.to_owned()]
    }

    #[test]
    fn manual_enumeration() {
        let c = NgramCounts::count(&stream(&[&["a", "b", "a", "b"]]), 2).unwrap();
        let expected: BTreeMap<_, _> = [
            (key(BOS, "a"), 1),
            (key("a", "b"), 2),
            (key("b", "a"), 1),
            (key("b", EOS), 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(bigrams(&c), expected);
        assert_eq!(c.get(&["a"]), 2);
        assert_eq!(c.get(&[BOS]), 1);
    }

    #[test]
    fn single_token_sample() {
        let c = NgramCounts::count(&stream(&[&["x"]]), 2).unwrap();
        let expected: BTreeMap<_, _> = [(key(BOS, "x"), 1), (key("x", EOS), 1)]
            .into_iter()
            .collect();
        assert_eq!(bigrams(&c), expected);
    }

    #[test]
    fn order_range() {
        assert!(matches!(
            NgramCounts::new(7),
            Err(LmError::OrderOutOfRange(7))
        ));
        assert!(matches!(
            NgramCounts::new(1),
            Err(LmError::OrderOutOfRange(1))
        ));
        assert!(NgramCounts::count(&stream(&[]), 3).is_err());
    }

    #[test]
    fn shard_merge_equals_whole() {
        let a: &[&str] = &["x", "y", "z", "x"];
        let b: &[&str] = &["y", "y", "q"];
        let whole = NgramCounts::count(&stream(&[a, b, a]), 4).unwrap();
        let mut left = NgramCounts::count(&stream(&[a]), 4).unwrap();
        let right = NgramCounts::count(&stream(&[b, a]), 4).unwrap();
        left.merge(&right).unwrap();
        for k in 1..=4 {
            assert_eq!(left.to_string_map(k), whole.to_string_map(k));
        }
    }

    #[test]
    fn recount_oracle() {
        let samples: &[&[&str]] = &[&["a", "b", "c"], &["c", "b"], &["a"]];
        let c = NgramCounts::count(&stream(samples), 3).unwrap();
        let mut oracle: BTreeMap<Vec<String>, u64> = BTreeMap::new();
        for s in samples {
            let padded: Vec<String> = std::iter::once(BOS)
                .chain(s.iter().copied())
                .chain(std::iter::once(EOS))
                .map(String::from)
                .collect();
            for w in padded.windows(3) {
                *oracle.entry(w.to_vec()).or_insert(0) += 1;
            }
        }
        assert_eq!(c.to_string_map(3), oracle);
        assert_eq!(c.distinct()[2], oracle.len());
    }
}
