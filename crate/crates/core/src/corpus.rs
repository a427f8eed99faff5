//! Corpus loading, sample filtering and train/validation/test splitting.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::script::{preprocess_into, DropHistogram, LanguageMode};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: invalid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { path: PathBuf, offset: usize },
    #[error("invalid split fractions: {0}")]
    InvalidSplit(String),
    #[error("corpus of {samples} samples is too small for split {spec}")]
    TooSmall { samples: usize, spec: String },
}

/// Full stops recognized by `split_on_sentence_dot`: ASCII period and
/// Arabic full stop.
pub const SENTENCE_DOTS: [char; 2] = ['.', '\u{06D4}'];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadOptions {
    /// Also break samples at full stops.
    pub split_on_sentence_dot: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub name: String,
    pub language_mode: LanguageMode,
    pub samples: Vec<String>,
}

/// What preprocessing did to a corpus.
#[derive(Debug, Clone, Default)]
pub struct PreprocessSummary {
    pub dropped_samples: usize,
    pub dropped_chars: DropHistogram,
}

impl Corpus {
    pub fn new(name: impl Into<String>, language_mode: LanguageMode, samples: Vec<String>) -> Self {
        Self {
            name: name.into(),
            language_mode,
            samples,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Normalizes every sample for the corpus language mode and drops samples
    /// that end up empty.
    pub fn preprocess(&self) -> (Corpus, PreprocessSummary) {
        let mut summary = PreprocessSummary::default();
        let mut samples = Vec::with_capacity(self.samples.len());
        for s in &self.samples {
            let p = preprocess_into(s, self.language_mode, &mut summary.dropped_chars);
            if p.is_empty() {
                summary.dropped_samples += 1;
            } else {
                samples.push(p);
            }
        }
        if summary.dropped_samples > 0 {
            log::info!(
                "{}: {} samples empty after preprocessing",
                self.name,
                summary.dropped_samples
            );
        }
        (
            Corpus::new(self.name.clone(), self.language_mode, samples),
            summary,
        )
    }

    /// Concatenates corpora in order.
    pub fn concat<'a>(name: &str, parts: impl IntoIterator<Item = &'a Corpus>) -> Corpus {
        let mut mode = None;
        let mut samples = Vec::new();
        for p in parts {
            mode.get_or_insert(p.language_mode);
            samples.extend(p.samples.iter().cloned());
        }
        Corpus::new(name, mode.unwrap_or_default(), samples)
    }

    pub fn write(&self, path: &Path) -> Result<(), CorpusError> {
        let io_err = |source| CorpusError::Io {
            path: path.to_owned(),
            source,
        };
        let mut f = io::BufWriter::new(fs::File::create(path).map_err(io_err)?);
        for s in &self.samples {
            writeln!(f, "{s}").map_err(io_err)?;
        }
        f.flush().map_err(io_err)
    }
}

pub fn load_corpus(path: &Path, language_mode: LanguageMode) -> Result<Corpus, CorpusError> {
    load_corpus_with(path, language_mode, LoadOptions::default())
}

/// Reads one sample per line. Lines are trimmed (which also strips a CR of a
/// CRLF ending) and empty lines are dropped.
pub fn load_corpus_with(
    path: &Path,
    language_mode: LanguageMode,
    options: LoadOptions,
) -> Result<Corpus, CorpusError> {
    let bytes = fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_owned(),
        source,
    })?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CorpusError::InvalidUtf8 {
        path: path.to_owned(),
        offset: e.valid_up_to(),
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let corpus = Corpus::new(name, language_mode, split_samples(text, options));
    if corpus.is_empty() {
        warn!("{}: corpus has no samples", path.display());
    }
    Ok(corpus)
}

pub fn split_samples(text: &str, options: LoadOptions) -> Vec<String> {
    let mut samples = Vec::new();
    for line in text.split('\n') {
        if options.split_on_sentence_dot {
            samples.extend(
                line.split(&SENTENCE_DOTS[..])
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from),
            );
        } else {
            let line = line.trim();
            if !line.is_empty() {
                samples.push(line.to_owned());
            }
        }
    }
    samples
}

fn word_count(s: &str) -> usize {
    s.split_whitespace().count()
}

/// Keeps samples whose whitespace word count lies in `[min_tokens, max_tokens]`.
pub fn filter_samples(corpus: &Corpus, min_tokens: usize, max_tokens: Option<usize>) -> Corpus {
    let max = max_tokens.unwrap_or(usize::MAX);
    let samples: Vec<String> = corpus
        .samples
        .iter()
        .filter(|s| (min_tokens..=max).contains(&word_count(s)))
        .cloned()
        .collect();
    log::info!(
        "{}: retained {} of {} samples",
        corpus.name,
        samples.len(),
        corpus.len()
    );
    Corpus::new(corpus.name.clone(), corpus.language_mode, samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
    pub seed: u64,
    /// Shuffle with a seeded permutation before assigning contiguous blocks.
    /// When false the split is a sequential prefix split.
    pub shuffle: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train: 0.9,
            validation: 0.0,
            test: 0.1,
            seed: 42,
            shuffle: true,
        }
    }
}

impl std::fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}/{}", self.train, self.validation, self.test)
    }
}

impl SplitSpec {
    pub fn new(train: f64, validation: f64, test: f64, seed: u64) -> Result<Self, CorpusError> {
        let spec = Self {
            train,
            validation,
            test,
            seed,
            shuffle: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if !(self.train > 0.0 && self.train < 1.0) {
            return Err(CorpusError::InvalidSplit(format!(
                "train fraction {} not in (0, 1)",
                self.train
            )));
        }
        for (name, v) in [("validation", self.validation), ("test", self.test)] {
            if !(0.0..1.0).contains(&v) {
                return Err(CorpusError::InvalidSplit(format!(
                    "{name} fraction {v} not in [0, 1)"
                )));
            }
        }
        let sum = self.train + self.validation + self.test;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(CorpusError::InvalidSplit(format!("fractions sum to {sum}")));
        }
        Ok(())
    }

    /// Sample counts for a corpus of `n` samples. Validation and test are
    /// rounded independently and train takes the remainder.
    pub fn counts(&self, n: usize) -> (usize, usize, usize) {
        let validation = (n as f64 * self.validation).round() as usize;
        let test = ((n as f64 * self.test).round() as usize).min(n - validation.min(n));
        let train = n.saturating_sub(validation + test);
        (train, validation, test)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splits {
    pub train: Corpus,
    pub validation: Corpus,
    pub test: Corpus,
}

impl Splits {
    /// Writes `<name>.train.txt`, `<name>.valid.txt` and `<name>.test.txt`.
    pub fn write(&self, dir: &Path, name: &str) -> Result<(), CorpusError> {
        self.train.write(&dir.join(format!("{name}.train.txt")))?;
        self.validation
            .write(&dir.join(format!("{name}.valid.txt")))?;
        self.test.write(&dir.join(format!("{name}.test.txt")))
    }
}

/// Index blocks of a split: train, validation, test. Indices in each block
/// are sorted, so samples keep their corpus order within a split.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<[Vec<usize>; 3], CorpusError> {
    spec.validate()?;
    let (n_train, n_valid, n_test) = spec.counts(n);
    let too_small = (n_train == 0)
        || (spec.validation > 0.0 && n_valid == 0)
        || (spec.test > 0.0 && n_test == 0);
    if too_small {
        return Err(CorpusError::TooSmall {
            samples: n,
            spec: spec.to_string(),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    if spec.shuffle {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        order.shuffle(&mut rng);
    }
    let mut blocks = [
        order[..n_train].to_vec(),
        order[n_train..n_train + n_valid].to_vec(),
        order[n_train + n_valid..].to_vec(),
    ];
    for b in &mut blocks {
        b.sort_unstable();
    }
    Ok(blocks)
}

pub fn split_corpus(corpus: &Corpus, spec: &SplitSpec) -> Result<Splits, CorpusError> {
    let [train, validation, test] = split_indices(corpus.len(), spec)?;
    let pick = |idx: &[usize], suffix: &str| {
        Corpus::new(
            format!("{}.{suffix}", corpus.name),
            corpus.language_mode,
            idx.iter().map(|&i| corpus.samples[i].clone()).collect(),
        )
    };
    Ok(Splits {
        train: pick(&train, "train"),
        validation: pick(&validation, "valid"),
        test: pick(&test, "test"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn corpus(n: usize) -> Corpus {
        Corpus::new(
            "c",
            LanguageMode::Arabic,
            (0..n).map(|i| format!("s{i}")).collect(),
        )
    }

    #[test]
    fn load_drops_empty_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        fs::write(&p, "ابجد\n\nهوز\n").unwrap();
        let c = load_corpus(&p, LanguageMode::Arabic).unwrap();
        assert_eq!(c.samples, ["ابجد", "هوز"]);
        assert_eq!(c.name, "a");
    }

    #[test]
    fn load_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.txt");
        fs::write(&p, "").unwrap();
        assert!(load_corpus(&p, LanguageMode::Arabic).unwrap().is_empty());
    }

    #[test]
    fn crlf_matches_lf() {
        let dir = tempfile::tempdir().unwrap();
        let lf = dir.path().join("lf.txt");
        let crlf = dir.path().join("crlf.txt");
        let text = "ابجد هوز\n\nحطي كلمن\nسعفص\n";
        fs::write(&lf, text).unwrap();
        fs::write(&crlf, text.replace('\n', "\r\n")).unwrap();
        let a = load_corpus(&lf, LanguageMode::Arabic).unwrap();
        let b = load_corpus(&crlf, LanguageMode::Arabic).unwrap();
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn invalid_utf8_reports_offset() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.txt");
        fs::write(&p, b"ab\xffcd").unwrap();
        match load_corpus(&p, LanguageMode::Arabic) {
            Err(CorpusError::InvalidUtf8 { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_corpus(Path::new("/nonexistent/x.txt"), LanguageMode::Arabic),
            Err(CorpusError::Io { .. })
        ));
    }

    #[test]
    fn sentence_dot_splitting() {
        let opts = LoadOptions {
            split_on_sentence_dot: true,
        };
        assert_eq!(
            split_samples("اب. جد\u{06D4}هو\n", opts),
            ["اب", "جد", "هو"]
        );
        assert_eq!(
            split_samples("اب. جد\n", LoadOptions::default()),
            ["اب. جد"]
        );
    }

    #[test]
    fn preprocess_drops_emptied_samples() {
        let c = Corpus::new("c", LanguageMode::Arabic, vec!["123".into(), "اب!".into()]);
        let (p, summary) = c.preprocess();
        assert_eq!(p.samples, ["اب"]);
        assert_eq!(summary.dropped_samples, 1);
        assert_eq!(summary.dropped_chars.total(), 4);
    }

    #[test]
    fn filter_by_length() {
        let words = |n: usize| vec!["و"; n].join(" ");
        let c = Corpus::new(
            "c",
            LanguageMode::Arabic,
            vec![words(5), words(30), words(40)],
        );
        assert_eq!(filter_samples(&c, 30, None).len(), 2);
        assert_eq!(filter_samples(&c, 0, None), c);
        assert_eq!(filter_samples(&c, 30, Some(35)).len(), 1);
    }

    #[test]
    fn filter_matches_brute_force_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<String> = (0..1000)
            .map(|_| {
                let n = rand::Rng::gen_range(&mut rng, 1..60);
                vec!["كلمة"; n].join(" ")
            })
            .collect();
        let mut expected = 0;
        for s in &samples {
            let mut words = 0;
            for w in s.split(' ') {
                if !w.is_empty() {
                    words += 1;
                }
            }
            if words >= 30 {
                expected += 1;
            }
        }
        let c = Corpus::new("c", LanguageMode::Arabic, samples);
        assert_eq!(filter_samples(&c, 30, None).len(), expected);
    }

    #[test]
    fn exact_fraction_split() {
        let s = split_corpus(&corpus(10), &SplitSpec::new(0.9, 0.0, 0.1, 42).unwrap()).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (9, 0, 1));
    }

    #[test]
    fn split_is_deterministic() {
        let spec = SplitSpec::default();
        let c = corpus(100);
        assert_eq!(
            split_corpus(&c, &spec).unwrap(),
            split_corpus(&c, &spec).unwrap()
        );
    }

    #[test]
    fn three_way_split_is_partition() {
        let c = corpus(1000);
        let s = split_corpus(&c, &SplitSpec::new(0.85, 0.05, 0.10, 42).unwrap()).unwrap();
        assert_eq!(
            (s.train.len(), s.validation.len(), s.test.len()),
            (850, 50, 100)
        );
        let mut all: Vec<_> = [&s.train, &s.validation, &s.test]
            .iter()
            .flat_map(|c| c.samples.clone())
            .collect();
        let mut orig = c.samples.clone();
        all.sort();
        orig.sort();
        assert_eq!(all, orig);
    }

    #[test]
    fn sequential_split() {
        let spec = SplitSpec {
            shuffle: false,
            ..SplitSpec::default()
        };
        let s = split_corpus(&corpus(10), &spec).unwrap();
        assert_eq!(s.test.samples, ["s9"]);
    }

    #[test]
    fn too_small_and_invalid() {
        assert!(matches!(
            split_corpus(&corpus(3), &SplitSpec::default()),
            Err(CorpusError::TooSmall { .. })
        ));
        assert!(matches!(
            SplitSpec::new(0.9, 0.0, 0.2, 1),
            Err(CorpusError::InvalidSplit(_))
        ));
        assert!(matches!(
            SplitSpec::new(1.0, 0.0, 0.0, 1),
            Err(CorpusError::InvalidSplit(_))
        ));
    }

    #[test]
    fn writes_split_files() {
        let dir = tempfile::tempdir().unwrap();
        let s = split_corpus(&corpus(20), &SplitSpec::default()).unwrap();
        s.write(dir.path(), "c").unwrap();
        for suffix in ["train", "valid", "test"] {
            assert!(dir.path().join(format!("c.{suffix}.txt")).exists());
        }
        let back = load_corpus(&dir.path().join("c.test.txt"), LanguageMode::Arabic).unwrap();
        assert_eq!(back.samples, s.test.samples);
    }

    proptest! {
        #[test]
        fn partition_and_count_bounds(n in 20usize..400, valid in 0u32..20, test in 1u32..30, seed: u64) {
            let (v, t) = (valid as f64 / 100.0, test as f64 / 100.0);
            let spec = SplitSpec { train: 1.0 - v - t, validation: v, test: t, seed, shuffle: true };
            if let Ok([a, b, c]) = split_indices(n, &spec) {
                let mut all: Vec<usize> = a.iter().chain(&b).chain(&c).copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
                for (got, frac) in [(a.len(), spec.train), (b.len(), v), (c.len(), t)] {
                    prop_assert!((got as f64 - frac * n as f64).abs() <= 1.0 + 1e-9);
                }
            }
        }

        #[test]
        fn filter_is_idempotent(lens in proptest::collection::vec(0usize..50, 0..60), min in 0usize..40) {
            let c = Corpus::new("c", LanguageMode::Arabic, lens.iter().map(|&n| vec!["ب"; n].join(" ")).collect());
            let once = filter_samples(&c, min, Some(45));
            prop_assert_eq!(filter_samples(&once, min, Some(45)), once);
        }
    }
}
