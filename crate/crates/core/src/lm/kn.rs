//! Interpolated Kneser-Ney estimation.
//!
//! The highest order uses raw counts; lower orders use continuation counts
//! (number of distinct left extensions), except n-grams that start with
//! `<s>`, which keep their raw count. Every order is interpolated with the
//! next lower one and the unigram level with a uniform distribution over the
//! vocabulary plus `<unk>`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::counts::{NgramCounts, Table, Vocabulary, BOS_ID, EOS_ID, MAX_ORDER, MIN_ORDER};
use super::{LanguageModel, LmError};

/// Discount used when count-of-counts cannot support the estimate.
pub const FALLBACK_DISCOUNT: f64 = 0.75;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscountMode {
    /// Three discounts per order estimated from count-of-counts.
    #[default]
    Modified,
    /// A single discount at every order and count.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discount {
    pub d1: f64,
    pub d2: f64,
    pub d3plus: f64,
    /// Set when the count-of-counts estimate was unusable.
    pub fallback: bool,
}

impl Discount {
    pub fn fixed(d: f64) -> Self {
        Self {
            d1: d,
            d2: d,
            d3plus: d,
            fallback: false,
        }
    }

    pub fn for_count(&self, count: u64) -> f64 {
        match count {
            0 => 0.0,
            1 => self.d1,
            2 => self.d2,
            _ => self.d3plus,
        }
    }

    /// `D_k = k - (k+1) Y n_{k+1} / n_k` with `Y = n1 / (n1 + 2 n2)`, where
    /// `n_k` is the number of n-grams seen exactly k times. Falls back to a
    /// fixed discount when some `n_k` is zero or a `D_k` leaves `[0, k)`.
    pub fn from_count_of_counts(n: [u64; 4]) -> Self {
        if n.contains(&0) {
            return Self {
                fallback: true,
                ..Self::fixed(FALLBACK_DISCOUNT)
            };
        }
        let [n1, n2, n3, n4] = n.map(|c| c as f64);
        let y = n1 / (n1 + 2.0 * n2);
        let d = [
            1.0 - 2.0 * y * n2 / n1,
            2.0 - 3.0 * y * n3 / n2,
            3.0 - 4.0 * y * n4 / n3,
        ];
        if d.iter()
            .enumerate()
            .any(|(i, &di)| !(0.0..(i + 1) as f64).contains(&di))
        {
            return Self {
                fallback: true,
                ..Self::fixed(FALLBACK_DISCOUNT)
            };
        }
        Self {
            d1: d[0],
            d2: d[1],
            d3plus: d[2],
            fallback: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ContextStats {
    pub total: u64,
    /// Interpolation weight given to the next lower order.
    pub gamma: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Level {
    pub counts: Table,
    pub contexts: HashMap<Box<[u32]>, ContextStats>,
}

#[derive(Debug, Clone)]
pub struct KneserNey {
    order: usize,
    mode: DiscountMode,
    vocab: Vocabulary,
    levels: Vec<Level>,
    discounts: Vec<Discount>,
    uniform: f64,
}

fn count_of_counts(table: &Table) -> [u64; 4] {
    let mut n = [0u64; 4];
    for &c in table.values() {
        if (1..=4).contains(&c) {
            n[c as usize - 1] += 1;
        }
    }
    n
}

/// Counts each order's model is estimated from.
fn adjusted_counts(counts: &NgramCounts, order: usize) -> Vec<Table> {
    let mut adjusted: Vec<Table> = Vec::with_capacity(order);
    for k in 1..=order {
        if k == order {
            adjusted.push(counts.table(k).clone());
            continue;
        }
        let mut t = Table::new();
        for gram in counts.table(k + 1).keys() {
            *t.entry(gram[1..].into()).or_insert(0) += 1;
        }
        for (gram, &c) in counts.table(k) {
            if gram[0] == BOS_ID {
                t.insert(gram.clone(), c);
            }
        }
        adjusted.push(t);
    }
    // <s> is context only, never predicted
    adjusted[0].remove(&[BOS_ID][..]);
    adjusted
}

impl KneserNey {
    pub fn estimate(
        counts: &NgramCounts,
        order: usize,
        mode: DiscountMode,
    ) -> Result<Self, LmError> {
        if !(MIN_ORDER..=MAX_ORDER).contains(&order) || order > counts.order() {
            return Err(LmError::OrderOutOfRange(order));
        }
        if let DiscountMode::Fixed(d) = mode {
            if !(d > 0.0 && d < 1.0) {
                return Err(LmError::BadDiscount(d));
            }
        }
        let adjusted = adjusted_counts(counts, order);
        let mut levels = Vec::with_capacity(order);
        let mut discounts = Vec::with_capacity(order);
        for (i, table) in adjusted.into_iter().enumerate() {
            let discount = match mode {
                DiscountMode::Fixed(d) => Discount::fixed(d),
                DiscountMode::Modified => {
                    let d = Discount::from_count_of_counts(count_of_counts(&table));
                    if d.fallback {
                        log::warn!("order {}: degenerate count-of-counts, using discount {FALLBACK_DISCOUNT}", i + 1);
                    }
                    d
                }
            };
            let mut bands: HashMap<Box<[u32]>, (u64, [u64; 3])> = HashMap::new();
            for (gram, &c) in &table {
                let entry = bands
                    .entry(gram[..gram.len() - 1].into())
                    .or_insert((0, [0; 3]));
                entry.0 += c;
                entry.1[(c.min(3) - 1) as usize] += 1;
            }
            let contexts = bands
                .into_iter()
                .map(|(ctx, (total, [n1, n2, n3]))| {
                    let mass = discount.d1 * n1 as f64
                        + discount.d2 * n2 as f64
                        + discount.d3plus * n3 as f64;
                    (
                        ctx,
                        ContextStats {
                            total,
                            gamma: mass / total as f64,
                        },
                    )
                })
                .collect();
            levels.push(Level {
                counts: table,
                contexts,
            });
            discounts.push(discount);
        }
        let vocab = counts.vocab().clone();
        // everything but <s>
        let uniform = 1.0 / (vocab.len() - 1) as f64;
        Ok(Self {
            order,
            mode,
            vocab,
            levels,
            discounts,
            uniform,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mode(&self) -> DiscountMode {
        self.mode
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Discounts for orders 1..=order.
    pub fn discounts(&self) -> &[Discount] {
        &self.discounts
    }

    pub(crate) fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Interpolation weight of a context at order `|context| + 1`, if the
    /// context was observed there.
    pub fn backoff_weight(&self, context: &[u32]) -> Option<f64> {
        self.levels
            .get(context.len())?
            .contexts
            .get(context)
            .map(|s| s.gamma)
    }

    /// Uniform base probability `1/(V+1)` mixed into the unigram level.
    pub fn uniform_mass(&self) -> f64 {
        self.uniform
    }

    /// `p(word | context)` using the longest observed suffix of `context`.
    pub fn prob(&self, context: &[u32], word: u32) -> f64 {
        if word == BOS_ID {
            return 0.0;
        }
        let mut key = [0u32; MAX_ORDER];
        let root = &self.levels[0];
        let stats = root.contexts[&[][..]];
        let discounted = |level: &Level, gram: &[u32], d: &Discount| {
            let a = level.counts.get(gram).copied().unwrap_or(0);
            (a as f64 - d.for_count(a)).max(0.0)
        };
        key[0] = word;
        let mut p = discounted(root, &key[..1], &self.discounts[0]) / stats.total as f64
            + stats.gamma * self.uniform;

        let max_k = self.order.min(context.len() + 1);
        for k in 2..=max_k {
            let h = &context[context.len() - (k - 1)..];
            let level = &self.levels[k - 1];
            let Some(stats) = level.contexts.get(h) else {
                break;
            };
            key[..k - 1].copy_from_slice(h);
            key[k - 1] = word;
            p = discounted(level, &key[..k], &self.discounts[k - 1]) / stats.total as f64
                + stats.gamma * p;
        }
        p
    }

    /// Probability with string tokens; unknown tokens map to `<unk>`.
    pub fn conditional(&self, context: &[&str], word: &str) -> f64 {
        let ctx: Vec<u32> = context.iter().map(|w| self.vocab.lookup(w)).collect();
        self.prob(&ctx, self.vocab.lookup(word))
    }

    /// Every context observed at some order, with that order.
    pub fn observed_contexts(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.levels
            .iter()
            .flat_map(|l| l.contexts.keys().map(|c| &c[..]))
    }

    /// Ids that can be predicted: the vocabulary without `<s>`.
    pub fn predictable(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.vocab.len() as u32).filter(|&id| id != BOS_ID)
    }
}

impl LanguageModel for KneserNey {
    fn sample_logprob(&self, tokens: &[&str], score_eos: bool) -> f64 {
        let mut ctx: Vec<u32> = Vec::with_capacity(tokens.len() + 2);
        ctx.push(BOS_ID);
        let tail = |ctx: &[u32]| -> std::ops::Range<usize> {
            ctx.len().saturating_sub(self.order - 1)..ctx.len()
        };
        let mut total = 0.0;
        for t in tokens {
            let w = self.vocab.lookup(t);
            total += self.prob(&ctx[tail(&ctx)], w).ln();
            ctx.push(w);
        }
        if score_eos {
            total += self.prob(&ctx[tail(&ctx)], EOS_ID).ln();
        }
        total
    }

    fn in_vocab(&self, token: &str) -> bool {
        self.vocab.contains_token(token)
    }
}
