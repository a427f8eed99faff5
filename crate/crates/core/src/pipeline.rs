//! End-to-end runs over corpus files: the statistics, scaling-law and
//! language-model sweeps behind the command line tool.
//!
//! Every run resolves a [`RunConfig`], processes each (corpus, scheme)
//! combination in a worker pool and writes all results from one collector
//! into a staging directory next to the output directory. The staging
//! directory is moved into place only when the whole run succeeded.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{load_corpus_with, split_indices, CorpusError, LoadOptions, SplitSpec};
use crate::laws::{
    heap_fit_points, log_spaced_positions, write_heap_csv, write_zipf_csv, zipf_fit, FitError,
};
use crate::lm::{
    oov_stats, perplexity, read_arpa, read_cache, DiscountMode, EvalOptions, KneserNey,
    LanguageModel, LmError, NgramCounts, OovComparison, CACHE_MAGIC, MAX_ORDER, MIN_ORDER,
};
use crate::script::{preprocess, LanguageMode, UndotError, UndotRule};
use crate::stats::{
    build_vocab, compare_report, default_curve_points, dotless_ratio_curve, ComparisonRow,
    StatsError, StatsReport, VocabCounter, VocabTable,
};
use crate::tokenize::{
    parse_morph_segmentation, tokenize_samples, undot_stream, Scheme, TokenStream, TokenizeError,
    DEFAULT_MORPH_DELIMITER, SPACE_TOKEN,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Name of the extra combination built from all inputs when aggregating.
pub const AGGREGATED: &str = "aggregated";

/// Samples tokenized per batch when streaming a corpus.
const CHUNK_SAMPLES: usize = 4096;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Tokenize(#[from] TokenizeError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Lm(#[from] LmError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{corpus}/{scheme}: {source}")]
    Combination {
        corpus: String,
        scheme: Scheme,
        source: Box<PipelineError>,
    },
    #[error("line {line}: {source}")]
    UndotLine { line: usize, source: UndotError },
    #[error("invalid configuration: {0}")]
    Config(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_owned(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dottedness {
    Dotted,
    Dotless,
    #[default]
    Both,
}

impl Dottedness {
    /// The `dotted` flags this setting covers.
    pub fn flags(self) -> &'static [bool] {
        match self {
            Dottedness::Dotted => &[true],
            Dottedness::Dotless => &[false],
            Dottedness::Both => &[true, false],
        }
    }
}

impl std::str::FromStr for Dottedness {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dotted" => Ok(Self::Dotted),
            "dotless" => Ok(Self::Dotless),
            "both" => Ok(Self::Both),
            other => Err(format!("unknown dottedness `{other}`")),
        }
    }
}

fn label(dotted: bool) -> &'static str {
    if dotted {
        "dotted"
    } else {
        "dotless"
    }
}

/// Resolved settings of a run. Serialized into `run.json`; the output
/// directory and the worker count are left out since they do not change any
/// result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub tool_version: String,
    pub corpora: Vec<PathBuf>,
    /// Segmentation companions, one per corpus, required for the morph scheme.
    pub morph: Vec<PathBuf>,
    pub morph_delimiter: String,
    pub language_mode: LanguageMode,
    pub schemes: Vec<Scheme>,
    pub dottedness: Dottedness,
    pub positional_overrides: bool,
    pub split_on_sentence_dot: bool,
    /// Add a combination over all corpora concatenated in argument order.
    pub aggregate: bool,
    /// Zipf fits skip types rarer than this.
    pub min_freq: Option<u64>,
    /// Prefix positions sampled for Heap fits.
    pub heap_points: usize,
    pub split: SplitSpec,
    pub orders: Vec<usize>,
    /// Single fixed discount of 0.75 instead of modified Kneser-Ney.
    pub kn_simple: bool,
    /// Score `</s>` at the end of every test sample.
    pub score_eos: bool,
    #[serde(skip)]
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    #[serde(skip)]
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            tool_version: TOOL_VERSION.to_owned(),
            corpora: Vec::new(),
            morph: Vec::new(),
            morph_delimiter: DEFAULT_MORPH_DELIMITER.to_owned(),
            language_mode: LanguageMode::Arabic,
            schemes: Scheme::ALL.to_vec(),
            dottedness: Dottedness::Both,
            positional_overrides: true,
            split_on_sentence_dot: false,
            aggregate: false,
            min_freq: None,
            heap_points: 64,
            split: SplitSpec::default(),
            orders: (MIN_ORDER..=MAX_ORDER).collect(),
            kn_simple: false,
            score_eos: true,
            output_dir: PathBuf::from("out"),
            threads: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.corpora.is_empty() {
            return bad("no corpus given".into());
        }
        if self.schemes.is_empty() {
            return bad("no tokenization scheme selected".into());
        }
        if self.schemes.contains(&Scheme::MorphAdapter) && self.morph.len() != self.corpora.len() {
            return bad(format!(
                "scheme morph needs one segmentation companion per corpus ({} corpora, {} companions)",
                self.corpora.len(),
                self.morph.len()
            ));
        }
        if self.language_mode == LanguageMode::Latin && self.dottedness != Dottedness::Dotted {
            return bad("latin text has no dotless form; use dottedness dotted".into());
        }
        if self.orders.is_empty() {
            return bad("no n-gram order given".into());
        }
        if let Some(&o) = self
            .orders
            .iter()
            .find(|o| !(MIN_ORDER..=MAX_ORDER).contains(*o))
        {
            return bad(format!("order {o} outside {MIN_ORDER}..={MAX_ORDER}"));
        }
        if self.heap_points < 3 {
            return bad(format!(
                "heap_points must be at least 3, got {}",
                self.heap_points
            ));
        }
        if self.morph_delimiter.is_empty() {
            return bad("empty morph delimiter".into());
        }
        self.split.validate()?;
        Ok(())
    }

    pub fn rule(&self) -> UndotRule {
        UndotRule::with_positional_overrides(self.positional_overrides)
    }

    pub fn discount_mode(&self) -> DiscountMode {
        if self.kn_simple {
            DiscountMode::Fixed(0.75)
        } else {
            DiscountMode::Modified
        }
    }

    fn load_options(&self) -> LoadOptions {
        LoadOptions {
            split_on_sentence_dot: self.split_on_sentence_dot,
        }
    }
}

/// A preprocessed corpus with its optional morphological segmentation.
#[derive(Debug, Clone)]
struct Unit {
    name: String,
    samples: Vec<String>,
    morph: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessRow {
    pub corpus: String,
    pub samples: usize,
    pub dropped_samples: usize,
    pub dropped_chars: u64,
    /// Removed characters by code point, e.g. `"U+0041": 12`.
    pub dropped_by_char: BTreeMap<String, u64>,
}

fn read_lines(path: &Path) -> Result<Vec<String>, PipelineError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn load_units(cfg: &RunConfig) -> Result<(Vec<Unit>, Vec<PreprocessRow>), PipelineError> {
    let want_morph = cfg.schemes.contains(&Scheme::MorphAdapter);
    let mut units = Vec::with_capacity(cfg.corpora.len() + 1);
    let mut rows = Vec::with_capacity(cfg.corpora.len());
    let mut names: HashSet<String> = HashSet::new();
    for (i, path) in cfg.corpora.iter().enumerate() {
        let raw = load_corpus_with(path, cfg.language_mode, cfg.load_options())?;
        let (corpus, summary) = raw.preprocess();
        let mut name = corpus.name.clone();
        let mut n = 2;
        while names.contains(&name) || name == AGGREGATED {
            name = format!("{}-{n}", corpus.name);
            n += 1;
        }
        names.insert(name.clone());
        let morph = if want_morph {
            Some(read_lines(&cfg.morph[i])?)
        } else {
            None
        };
        rows.push(PreprocessRow {
            corpus: name.clone(),
            samples: corpus.len(),
            dropped_samples: summary.dropped_samples,
            dropped_chars: summary.dropped_chars.total(),
            dropped_by_char: summary
                .dropped_chars
                .iter()
                .map(|(c, n)| (format!("U+{:04X}", c as u32), n))
                .collect(),
        });
        units.push(Unit {
            name,
            samples: corpus.samples,
            morph,
        });
    }
    if cfg.aggregate {
        let samples = units
            .iter()
            .flat_map(|u| u.samples.iter().cloned())
            .collect();
        let morph = want_morph.then(|| {
            units
                .iter()
                .flat_map(|u| u.morph.iter().flatten().cloned())
                .collect()
        });
        units.push(Unit {
            name: AGGREGATED.to_owned(),
            samples,
            morph,
        });
    }
    Ok((units, rows))
}

fn stream_of(
    samples: &[String],
    morph: Option<&[String]>,
    scheme: Scheme,
    delimiter: &str,
) -> Result<TokenStream, PipelineError> {
    match (scheme, morph) {
        (Scheme::MorphAdapter, Some(lines)) => {
            Ok(parse_morph_segmentation(lines, delimiter, samples)?)
        }
        _ => Ok(tokenize_samples(scheme, samples)?),
    }
}

/// Feeds the unit to `f` in batches of samples. The morph scheme is
/// validated as a whole and comes as one batch.
fn for_each_chunk<F>(
    unit: &Unit,
    scheme: Scheme,
    delimiter: &str,
    mut f: F,
) -> Result<(), PipelineError>
where
    F: FnMut(&TokenStream) -> Result<(), PipelineError>,
{
    if scheme == Scheme::MorphAdapter {
        return f(&stream_of(
            &unit.samples,
            unit.morph.as_deref(),
            scheme,
            delimiter,
        )?);
    }
    for chunk in unit.samples.chunks(CHUNK_SAMPLES) {
        f(&tokenize_samples(scheme, chunk)?)?;
    }
    Ok(())
}

/// Dotted and dotless vocabularies of one combination. The character
/// scheme's space token is left out, so character statistics describe
/// letters only.
fn count_vocabs(
    unit: &Unit,
    scheme: Scheme,
    cfg: &RunConfig,
) -> Result<(VocabTable, Option<VocabTable>), PipelineError> {
    let rule = cfg.rule();
    let want_dotless = cfg.dottedness != Dottedness::Dotted;
    let mut dotted = VocabCounter::new();
    let mut dotless = VocabCounter::new();
    for_each_chunk(unit, scheme, &cfg.morph_delimiter, |chunk| {
        dotted.add_stream(chunk);
        if want_dotless {
            dotless.add_stream(&undot_stream(chunk, rule)?);
        }
        Ok(())
    })?;
    let finish = |c: VocabCounter, d: bool| {
        let v = c.finish(scheme, d);
        if scheme == Scheme::Character {
            v.without(SPACE_TOKEN)
        } else {
            v
        }
    };
    let dotless = want_dotless.then(|| finish(dotless, false));
    Ok((finish(dotted, true), dotless))
}

#[derive(Debug, Clone, Copy)]
struct Combo {
    unit: usize,
    scheme: Scheme,
}

fn combos(units: &[Unit], cfg: &RunConfig) -> Vec<Combo> {
    (0..units.len())
        .flat_map(|unit| {
            cfg.schemes
                .iter()
                .map(move |&scheme| Combo { unit, scheme })
        })
        .collect()
}

/// Runs `f` on every combination in a pool of `threads` workers, keeping
/// combination order in the result.
fn run_pool<T, F>(cfg: &RunConfig, units: &[Unit], f: F) -> Result<Vec<T>, PipelineError>
where
    T: Send,
    F: Fn(&Unit, Scheme) -> Result<T, PipelineError> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))?;
    let work = combos(units, cfg);
    pool.install(|| {
        work.par_iter()
            .map(|c| {
                let unit = &units[c.unit];
                f(unit, c.scheme).map_err(|e| PipelineError::Combination {
                    corpus: unit.name.clone(),
                    scheme: c.scheme,
                    source: Box::new(e),
                })
            })
            .collect()
    })
}

/// Output files written under a hidden sibling directory, then moved into
/// the output directory on [`Staging::commit`]. Dropping it uncommitted
/// removes everything written so far.
struct Staging {
    dir: tempfile::TempDir,
    dest: PathBuf,
}

impl Staging {
    fn new(dest: &Path) -> Result<Self, PipelineError> {
        let parent = match dest.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_owned(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent).map_err(io_err(&parent))?;
        let dir = tempfile::Builder::new()
            .prefix(".rasm-staging-")
            .tempdir_in(&parent)
            .map_err(io_err(&parent))?;
        Ok(Self {
            dir,
            dest: dest.to_owned(),
        })
    }

    fn create(&self, rel: &str) -> Result<BufWriter<File>, PipelineError> {
        let path = self.dir.path().join(rel);
        if let Some(p) = path.parent() {
            fs::create_dir_all(p).map_err(io_err(p))?;
        }
        Ok(BufWriter::new(File::create(&path).map_err(io_err(&path))?))
    }

    fn write_with<F>(&self, rel: &str, f: F) -> Result<(), PipelineError>
    where
        F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    {
        let path = self.dir.path().join(rel);
        let mut w = self.create(rel)?;
        f(&mut w).and_then(|_| w.flush()).map_err(io_err(&path))
    }

    fn json<T: Serialize>(&self, rel: &str, value: &T) -> Result<(), PipelineError> {
        self.write_with(rel, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }

    fn tsv<T: Serialize>(&self, rel: &str, rows: &[T]) -> Result<(), PipelineError> {
        self.delimited(rel, b'\t', rows)
    }

    fn csv<T: Serialize>(&self, rel: &str, rows: &[T]) -> Result<(), PipelineError> {
        self.delimited(rel, b',', rows)
    }

    fn delimited<T: Serialize>(
        &self,
        rel: &str,
        delimiter: u8,
        rows: &[T],
    ) -> Result<(), PipelineError> {
        self.write_with(rel, |w| {
            let mut out = csv::WriterBuilder::new()
                .delimiter(delimiter)
                .from_writer(w);
            for r in rows {
                out.serialize(r)?;
            }
            out.flush()
        })
    }

    fn commit(self) -> Result<(), PipelineError> {
        move_tree(self.dir.path(), &self.dest)
    }
}

fn move_tree(src: &Path, dest: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(dest).map_err(io_err(dest))?;
    let mut entries: Vec<_> = fs::read_dir(src)
        .map_err(io_err(src))?
        .collect::<Result<_, _>>()
        .map_err(io_err(src))?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let from = entry.path();
        let to = dest.join(entry.file_name());
        if from.is_dir() {
            move_tree(&from, &to)?;
        } else {
            fs::rename(&from, &to).map_err(io_err(&to))?;
        }
    }
    Ok(())
}

fn start(cfg: &RunConfig, command: &str) -> Result<(RunConfig, Staging), PipelineError> {
    cfg.validate()?;
    let mut resolved = cfg.clone();
    resolved.command = command.to_owned();
    resolved.tool_version = TOOL_VERSION.to_owned();
    let staging = Staging::new(&cfg.output_dir)?;
    staging.json("run.json", &resolved)?;
    Ok((resolved, staging))
}

fn file_stem(corpus: &str, scheme: Scheme) -> String {
    format!("{corpus}.{}", scheme.name())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRun {
    pub preprocessing: Vec<PreprocessRow>,
    pub stats: Vec<StatsReport>,
    pub comparisons: Vec<ComparisonRow>,
}

struct StatsCombo {
    reports: Vec<StatsReport>,
    comparison: Option<ComparisonRow>,
    curve: Vec<(f64, f64)>,
    curve_name: String,
}

/// Descriptive statistics for every (corpus, scheme, dottedness).
///
/// Writes `stats.tsv`, `comparison.tsv` (when both forms are requested),
/// `curves/<corpus>.<scheme>.csv` with the dotless/dotted vocabulary ratio
/// over the most frequent types, `report.json` and `run.json`.
pub fn run_stats(cfg: &RunConfig) -> Result<StatsRun, PipelineError> {
    let (cfg, staging) = start(cfg, "stats")?;
    let (units, preprocessing) = load_units(&cfg)?;
    let points = default_curve_points();
    let results = run_pool(&cfg, &units, |unit, scheme| {
        let (dotted, dotless) = count_vocabs(unit, scheme, &cfg)?;
        let mut reports = Vec::new();
        let dotted_report = StatsReport::new(&unit.name, &dotted)?;
        let dotless_report = dotless
            .as_ref()
            .map(|v| StatsReport::new(&unit.name, v))
            .transpose()?;
        if cfg.dottedness != Dottedness::Dotless {
            reports.push(dotted_report.clone());
        }
        if let Some(r) = &dotless_report {
            reports.push(r.clone());
        }
        let comparison = match (&dotless_report, cfg.dottedness) {
            (Some(d), Dottedness::Both) => Some(compare_report(&dotted_report, d)?),
            _ => None,
        };
        let curve = if cfg.language_mode == LanguageMode::Arabic {
            dotless_ratio_curve(&dotted, &points, cfg.rule())?
        } else {
            Vec::new()
        };
        Ok(StatsCombo {
            reports,
            comparison,
            curve,
            curve_name: file_stem(&unit.name, scheme),
        })
    })?;

    let mut run = StatsRun {
        preprocessing,
        stats: Vec::new(),
        comparisons: Vec::new(),
    };
    for r in results {
        if !r.curve.is_empty() {
            staging.write_with(&format!("curves/{}.csv", r.curve_name), |w| {
                writeln!(w, "percent,ratio")?;
                for (p, ratio) in &r.curve {
                    writeln!(w, "{p},{ratio}")?;
                }
                Ok(())
            })?;
        }
        run.stats.extend(r.reports);
        run.comparisons.extend(r.comparison);
    }
    staging.tsv("stats.tsv", &run.stats)?;
    if cfg.dottedness == Dottedness::Both {
        staging.tsv("comparison.tsv", &run.comparisons)?;
    }
    staging.json("report.json", &run)?;
    staging.commit()?;
    Ok(run)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawRow {
    pub corpus: String,
    pub scheme: Scheme,
    pub dotted: bool,
    pub alpha: f64,
    #[serde(rename = "C")]
    pub top_frequency: f64,
    pub zipf_r_squared: f64,
    pub zipf_points: usize,
    pub k: f64,
    pub beta: f64,
    pub heap_r_squared: f64,
    pub heap_points: usize,
}

/// `(n, V(n))` at log-spaced prefixes of the stream, counted batch by batch.
fn heap_samples(
    unit: &Unit,
    scheme: Scheme,
    dotted: bool,
    total: u64,
    cfg: &RunConfig,
) -> Result<Vec<(f64, f64)>, PipelineError> {
    if total < cfg.heap_points as u64 {
        return Err(FitError::StreamTooShort {
            len: total as usize,
            points: cfg.heap_points,
        }
        .into());
    }
    let positions = log_spaced_positions(total as usize, cfg.heap_points);
    let mut next = positions.iter().peekable();
    let mut seen: HashSet<Box<str>> = HashSet::new();
    let mut samples = Vec::with_capacity(positions.len());
    let mut n = 0usize;
    let rule = cfg.rule();
    for_each_chunk(unit, scheme, &cfg.morph_delimiter, |chunk| {
        let undotted;
        let stream = if dotted {
            chunk
        } else {
            undotted = undot_stream(chunk, rule)?;
            &undotted
        };
        for tok in stream.iter() {
            if scheme == Scheme::Character && tok == SPACE_TOKEN {
                continue;
            }
            n += 1;
            if !seen.contains(tok) {
                seen.insert(tok.into());
            }
            while next.peek().is_some_and(|&&p| p == n) {
                samples.push((n as f64, seen.len() as f64));
                next.next();
            }
        }
        Ok(())
    })?;
    Ok(samples)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawsRun {
    pub fits: Vec<LawRow>,
}

/// Zipf and Heap fits for every (corpus, scheme, dottedness).
///
/// Writes `laws.tsv`, `laws.json`, `run.json` and per combination
/// `laws/<corpus>.<scheme>.<dotted|dotless>.zipf.csv` and `.heap.csv`.
pub fn run_laws(cfg: &RunConfig) -> Result<LawsRun, PipelineError> {
    let (cfg, staging) = start(cfg, "laws")?;
    let (units, _) = load_units(&cfg)?;
    let results = run_pool(&cfg, &units, |unit, scheme| {
        let (dotted, dotless) = count_vocabs(unit, scheme, &cfg)?;
        let mut out = Vec::new();
        let vocabs = [Some(dotted), dotless];
        for vocab in vocabs.iter().flatten() {
            if !cfg.dottedness.flags().contains(&vocab.dotted) {
                continue;
            }
            let zipf = zipf_fit(vocab, cfg.min_freq)?;
            let heap = heap_fit_points(&heap_samples(
                unit,
                scheme,
                vocab.dotted,
                vocab.total(),
                &cfg,
            )?)?;
            let row = LawRow {
                corpus: unit.name.clone(),
                scheme,
                dotted: vocab.dotted,
                alpha: zipf.alpha,
                top_frequency: zipf.top_frequency,
                zipf_r_squared: zipf.r_squared,
                zipf_points: zipf.points.len(),
                k: heap.k,
                beta: heap.beta,
                heap_r_squared: heap.r_squared,
                heap_points: heap.points.len(),
            };
            out.push((row, zipf, heap));
        }
        Ok(out)
    })?;
    let mut run = LawsRun { fits: Vec::new() };
    for (row, zipf, heap) in results.into_iter().flatten() {
        let stem = format!(
            "laws/{}.{}",
            file_stem(&row.corpus, row.scheme),
            label(row.dotted)
        );
        staging.write_with(&format!("{stem}.zipf.csv"), |w| write_zipf_csv(&zipf, w))?;
        staging.write_with(&format!("{stem}.heap.csv"), |w| write_heap_csv(&heap, w))?;
        run.fits.push(row);
    }
    staging.tsv("laws.tsv", &run.fits)?;
    staging.json("laws.json", &run)?;
    staging.commit()?;
    Ok(run)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PplRow {
    pub corpus: String,
    pub scheme: Scheme,
    pub dotted: bool,
    pub order: usize,
    pub ppl: f64,
    pub log_prob: f64,
    pub tokens: u64,
    pub oov_tokens: u64,
    pub oov_types: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OovRow {
    pub corpus: String,
    pub scheme: Scheme,
    pub test_tokens: u64,
    pub dotted_oov_tokens: u64,
    pub dotless_oov_tokens: u64,
    /// Dotless over dotted OOV tokens, percent.
    pub token_ratio: Option<f64>,
    pub dotted_test_types: u64,
    pub dotless_test_types: u64,
    pub dotted_oov_types: u64,
    pub dotless_oov_types: u64,
    pub type_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramCountRow {
    pub corpus: String,
    pub scheme: Scheme,
    pub dotted: bool,
    pub order: usize,
    pub distinct: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmRun {
    pub perplexity: Vec<PplRow>,
    pub oov: Vec<OovRow>,
    pub ngram_counts: Vec<NgramCountRow>,
}

fn pick<T: Clone>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}

/// Dotted and dotless n-gram models for orders in `cfg.orders`.
///
/// Each corpus is split with `cfg.split`; models are trained on the train
/// block and evaluated on the test block. Writes `ppl.csv` (one row per
/// combination, dottedness and order), `oov.tsv`, `ngram_counts.csv`,
/// `lm.json` and `run.json`.
pub fn run_lm(cfg: &RunConfig) -> Result<LmRun, PipelineError> {
    let (cfg, staging) = start(cfg, "compare")?;
    let (units, _) = load_units(&cfg)?;
    let max_order = *cfg.orders.iter().max().expect("validated");
    let mut orders = cfg.orders.clone();
    orders.sort_unstable();
    orders.dedup();
    let rule = cfg.rule();
    let results = run_pool(&cfg, &units, |unit, scheme| {
        let [train_idx, _, test_idx] = split_indices(unit.samples.len(), &cfg.split)?;
        let part = |idx: &[usize]| {
            let morph = unit.morph.as_ref().map(|m| pick(m, idx));
            stream_of(
                &pick(&unit.samples, idx),
                morph.as_deref(),
                scheme,
                &cfg.morph_delimiter,
            )
        };
        let train = part(&train_idx)?;
        let test = part(&test_idx)?;
        let train_dotless = undot_stream(&train, rule)?;
        let test_dotless = undot_stream(&test, rule)?;

        let oov_d = oov_stats(&build_vocab(&train, true)?, &test)?;
        let oov_u = oov_stats(&build_vocab(&train_dotless, false)?, &test_dotless)?;
        let cmp = OovComparison::new(oov_d, oov_u);
        let oov = OovRow {
            corpus: unit.name.clone(),
            scheme,
            test_tokens: oov_d.test_tokens,
            dotted_oov_tokens: oov_d.tokens,
            dotless_oov_tokens: oov_u.tokens,
            token_ratio: cmp.token_ratio,
            dotted_test_types: oov_d.test_types,
            dotless_test_types: oov_u.test_types,
            dotted_oov_types: oov_d.types,
            dotless_oov_types: oov_u.types,
            type_ratio: cmp.type_ratio,
        };

        let mut ppl = Vec::new();
        let mut counts_rows = Vec::new();
        for &dotted in cfg.dottedness.flags() {
            let (tr, te) = if dotted {
                (&train, &test)
            } else {
                (&train_dotless, &test_dotless)
            };
            let counts = NgramCounts::count(tr, max_order)?;
            for (k, distinct) in counts.distinct().into_iter().enumerate() {
                counts_rows.push(NgramCountRow {
                    corpus: unit.name.clone(),
                    scheme,
                    dotted,
                    order: k + 1,
                    distinct,
                });
            }
            for &order in &orders {
                let model = KneserNey::estimate(&counts, order, cfg.discount_mode())?;
                let r = perplexity(
                    &model,
                    te,
                    EvalOptions {
                        score_eos: cfg.score_eos,
                    },
                )?;
                ppl.push(PplRow {
                    corpus: unit.name.clone(),
                    scheme,
                    dotted,
                    order,
                    ppl: r.ppl,
                    log_prob: r.log_prob,
                    tokens: r.token_count,
                    oov_tokens: r.oov_tokens,
                    oov_types: r.oov_types,
                });
            }
        }
        Ok((ppl, oov, counts_rows))
    })?;
    let mut run = LmRun {
        perplexity: Vec::new(),
        oov: Vec::new(),
        ngram_counts: Vec::new(),
    };
    for (p, o, c) in results {
        run.perplexity.extend(p);
        run.oov.push(o);
        run.ngram_counts.extend(c);
    }
    staging.csv("ppl.csv", &run.perplexity)?;
    staging.csv("ngram_counts.csv", &run.ngram_counts)?;
    staging.tsv("oov.tsv", &run.oov)?;
    staging.json("lm.json", &run)?;
    staging.commit()?;
    Ok(run)
}

/// How a single file becomes a token stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamOptions {
    pub language_mode: LanguageMode,
    pub scheme: Scheme,
    pub dotless: bool,
    pub positional_overrides: bool,
    pub morph_delimiter: String,
    pub split_on_sentence_dot: bool,
}

impl Default for StreamOptions {
    fn default() -> Self {
        Self {
            language_mode: LanguageMode::Arabic,
            scheme: Scheme::Word,
            dotless: false,
            positional_overrides: true,
            morph_delimiter: DEFAULT_MORPH_DELIMITER.to_owned(),
            split_on_sentence_dot: false,
        }
    }
}

/// Loads, preprocesses, tokenizes and optionally undots one corpus file.
pub fn load_stream(
    path: &Path,
    morph: Option<&Path>,
    opts: &StreamOptions,
) -> Result<TokenStream, PipelineError> {
    let load = LoadOptions {
        split_on_sentence_dot: opts.split_on_sentence_dot,
    };
    let (corpus, _) = load_corpus_with(path, opts.language_mode, load)?.preprocess();
    let lines = match (opts.scheme, morph) {
        (Scheme::MorphAdapter, Some(p)) => Some(read_lines(p)?),
        (Scheme::MorphAdapter, None) => {
            return Err(TokenizeError::MissingSegmentation(Scheme::MorphAdapter).into())
        }
        _ => None,
    };
    let stream = stream_of(
        &corpus.samples,
        lines.as_deref(),
        opts.scheme,
        &opts.morph_delimiter,
    )?;
    if opts.dotless {
        Ok(undot_stream(
            &stream,
            UndotRule::with_positional_overrides(opts.positional_overrides),
        )?)
    } else {
        Ok(stream)
    }
}

/// Line-aligned undotting: line i of the output is the undotted,
/// preprocessed line i of the input. Returns the number of lines.
pub fn undot_lines<R: BufRead, W: Write>(
    input: R,
    mut output: W,
    mode: LanguageMode,
    rule: UndotRule,
) -> Result<usize, PipelineError> {
    let stdout = Path::new("<output>");
    let stdin = Path::new("<input>");
    let mut n = 0;
    for line in input.lines() {
        let line = line.map_err(io_err(stdin))?;
        n += 1;
        let clean = preprocess(&line, mode);
        let undotted = rule
            .undot(&clean)
            .map_err(|source| PipelineError::UndotLine { line: n, source })?;
        writeln!(output, "{undotted}").map_err(io_err(stdout))?;
    }
    output.flush().map_err(io_err(stdout))?;
    Ok(n)
}

/// A trained model read from disk: a binary count cache or a text model.
pub enum LoadedModel {
    Cached(KneserNey),
    Text(crate::lm::ArpaModel),
}

impl LoadedModel {
    pub fn as_model(&self) -> &dyn LanguageModel {
        match self {
            LoadedModel::Cached(m) => m,
            LoadedModel::Text(m) => m,
        }
    }
}

pub fn load_model(path: &Path, order: Option<usize>) -> Result<LoadedModel, PipelineError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.starts_with(&CACHE_MAGIC) {
        let (counts, mode) = read_cache(bytes.as_slice())?;
        let order = order.unwrap_or(counts.order());
        Ok(LoadedModel::Cached(KneserNey::estimate(
            &counts, order, mode,
        )?))
    } else {
        Ok(LoadedModel::Text(read_arpa(bytes.as_slice())?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn config(dir: &Path, corpora: Vec<PathBuf>) -> RunConfig {
        RunConfig {
            corpora,
            schemes: vec![Scheme::Word, Scheme::Character, Scheme::Disjoint],
            output_dir: dir.join("out"),
            threads: 1,
            ..RunConfig::default()
        }
    }

    const A: &str = "ذهب الولد الى المدرسة\nقال المعلم درسا جديدا\nكتب الطالب الدرس في الدفتر\nشرب الولد الماء\n";
    const B: &str = "في البيت قطة صغيرة\nتلعب القطة في الحديقة\n";

    #[test]
    fn stats_cardinality_and_aggregate() {
        let dir = tempfile::tempdir().unwrap();
        let a = write(dir.path(), "a.txt", A);
        let b = write(dir.path(), "b.txt", B);
        let mut cfg = config(dir.path(), vec![a, b]);
        cfg.aggregate = true;
        let run = run_stats(&cfg).unwrap();
        // 3 units x 3 schemes x 2 forms
        assert_eq!(run.stats.len(), 18);
        assert_eq!(run.comparisons.len(), 9);
        for scheme in [Scheme::Word, Scheme::Character, Scheme::Disjoint] {
            let n = |c: &str| {
                run.stats
                    .iter()
                    .find(|r| r.corpus == c && r.scheme == scheme && r.dotted)
                    .unwrap()
                    .tokens
            };
            assert_eq!(n(AGGREGATED), n("a") + n("b"));
        }
        let out = dir.path().join("out");
        for f in [
            "run.json",
            "stats.tsv",
            "comparison.tsv",
            "report.json",
            "curves/a.word.csv",
        ] {
            assert!(out.join(f).is_file(), "{f}");
        }
        let leftovers: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().starts_with(".rasm-staging"))
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn output_independent_of_threads() {
        let dir = tempfile::tempdir().unwrap();
        let a = write(dir.path(), "a.txt", A);
        let b = write(dir.path(), "b.txt", B);
        let mut one = config(dir.path(), vec![a.clone(), b.clone()]);
        one.output_dir = dir.path().join("one");
        let mut many = config(dir.path(), vec![a, b]);
        many.output_dir = dir.path().join("many");
        many.threads = 4;
        run_stats(&one).unwrap();
        run_stats(&many).unwrap();
        for f in [
            "run.json",
            "stats.tsv",
            "comparison.tsv",
            "report.json",
            "curves/b.disjoint.csv",
        ] {
            assert_eq!(
                fs::read(one.output_dir.join(f)).unwrap(),
                fs::read(many.output_dir.join(f)).unwrap(),
                "{f}"
            );
        }
    }

    #[test]
    fn failure_leaves_no_output() {
        let dir = tempfile::tempdir().unwrap();
        let a = write(dir.path(), "a.txt", A);
        let mut cfg = config(dir.path(), vec![a]);
        cfg.schemes = vec![Scheme::MorphAdapter];
        cfg.morph = vec![write(dir.path(), "a.seg", "ذهب ال+ولد\n")];
        assert!(run_stats(&cfg).is_err());
        assert!(!cfg.output_dir.exists());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
    }

    #[test]
    fn missing_morph_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path(), vec![write(dir.path(), "a.txt", A)]);
        cfg.schemes = vec![Scheme::MorphAdapter];
        assert!(matches!(run_stats(&cfg), Err(PipelineError::Config(_))));
    }

    #[test]
    fn lm_sweep_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let text: String = (0..40)
            .map(|i| format!("{}\n", A.lines().nth(i % 4).unwrap()))
            .collect();
        let mut cfg = config(dir.path(), vec![write(dir.path(), "c.txt", &text)]);
        cfg.schemes = vec![Scheme::Word];
        let run = run_lm(&cfg).unwrap();
        assert_eq!(run.perplexity.len(), 10);
        assert_eq!(run.oov.len(), 1);
        assert!(run.oov[0].dotless_oov_tokens <= run.oov[0].dotted_oov_tokens);
        let again = run_lm(&RunConfig {
            output_dir: dir.path().join("again"),
            ..cfg.clone()
        })
        .unwrap();
        assert_eq!(run, again);
        assert_eq!(
            fs::read(cfg.output_dir.join("ppl.csv")).unwrap(),
            fs::read(dir.path().join("again/ppl.csv")).unwrap()
        );
    }

    #[test]
    fn undot_is_line_aligned() {
        let mut out = Vec::new();
        let n = undot_lines(
            "بيت\n\nنور ثابت\n".as_bytes(),
            &mut out,
            LanguageMode::Arabic,
            UndotRule::default(),
        )
        .unwrap();
        assert_eq!(n, 3);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().nth(1), Some(""));
        let mut again = Vec::new();
        undot_lines(
            "بيت\n\nنور ثابت\n".as_bytes(),
            &mut again,
            LanguageMode::Arabic,
            UndotRule::default(),
        )
        .unwrap();
        assert_eq!(String::from_utf8(again).unwrap(), text);
        let fixed = "احد ولد\nملك\n";
        let mut same = Vec::new();
        undot_lines(
            fixed.as_bytes(),
            &mut same,
            LanguageMode::Arabic,
            UndotRule::default(),
        )
        .unwrap();
        assert_eq!(String::from_utf8(same).unwrap(), fixed);
    }

    #[test]
    fn laws_run_writes_csvs() {
        let dir = tempfile::tempdir().unwrap();
        let text: String = (0..30)
            .map(|i| {
                format!(
                    "{} {}\n",
                    A.lines().nth(i % 4).unwrap(),
                    B.lines().nth(i % 2).unwrap()
                )
            })
            .collect();
        let mut cfg = config(dir.path(), vec![write(dir.path(), "c.txt", &text)]);
        cfg.schemes = vec![Scheme::Word];
        let run = run_laws(&cfg).unwrap();
        assert_eq!(run.fits.len(), 2);
        assert!(cfg
            .output_dir
            .join("laws/c.word.dotless.heap.csv")
            .is_file());
        assert!(run.fits.iter().all(|f| f.alpha > 0.0 && f.beta > 0.0));
    }
}
