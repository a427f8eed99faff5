use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rasm_core::corpus::SplitSpec;
use rasm_core::lm::{
    perplexity, write_arpa, write_cache, DiscountMode, EvalOptions, KneserNey, NgramCounts,
};
use rasm_core::pipeline::{
    load_model, load_stream, run_laws, run_lm, run_stats, undot_lines, Dottedness, RunConfig,
    StreamOptions,
};
use rasm_core::script::{AlphabetDump, LanguageMode, UndotRule};
use rasm_core::stats::build_vocab;
use rasm_core::tokenize::{Scheme, DEFAULT_MORPH_DELIMITER};

/// Dotted and dotless Arabic text analysis.
#[derive(Parser)]
#[command(name = "rasm", version, about)]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess and undot a file line by line.
    Undot(UndotArgs),
    /// Write a corpus as tokens or as a vocabulary table.
    Tokenize(TokenizeArgs),
    /// Vocabulary size, entropy and length statistics, dotted and dotless.
    Stats(RunArgs),
    /// Zipf and Heap law fits with plot data.
    Laws(LawsArgs),
    /// Train a Kneser-Ney n-gram model on a corpus.
    LmTrain(TrainArgs),
    /// Perplexity of a trained model on a test corpus.
    LmEval(EvalArgs),
    /// Dotted versus dotless n-gram models over a train/test split.
    Compare(CompareArgs),
    /// Reference tables.
    Alphabet {
        #[command(subcommand)]
        command: AlphabetCommand,
    },
}

#[derive(Subcommand)]
enum AlphabetCommand {
    /// Print the letter inventory and undotting table as JSON.
    Dump {
        #[arg(long)]
        no_positional_overrides: bool,
        /// Output file; standard output if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct UndotArgs {
    /// Input file, `-` for standard input.
    #[arg(default_value = "-")]
    input: PathBuf,
    /// Output file; standard output if omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "arabic")]
    language: LanguageMode,
    /// Map noon, yeh and qaf by the table alone, whatever their position.
    #[arg(long)]
    no_positional_overrides: bool,
}

#[derive(Args, Clone)]
struct StreamArgs {
    #[arg(long, default_value = "word")]
    scheme: Scheme,
    /// Segmentation companion of the corpus, for the morph scheme.
    #[arg(long)]
    morph: Option<PathBuf>,
    #[arg(long, default_value = DEFAULT_MORPH_DELIMITER)]
    morph_delimiter: String,
    /// Undot tokens after tokenization.
    #[arg(long)]
    dotless: bool,
    #[arg(long)]
    no_positional_overrides: bool,
    #[arg(long, default_value = "arabic")]
    language: LanguageMode,
    /// Also break samples at full stops.
    #[arg(long)]
    split_on_sentence_dot: bool,
}

impl StreamArgs {
    fn options(&self) -> StreamOptions {
        StreamOptions {
            language_mode: self.language,
            scheme: self.scheme,
            dotless: self.dotless,
            positional_overrides: !self.no_positional_overrides,
            morph_delimiter: self.morph_delimiter.clone(),
            split_on_sentence_dot: self.split_on_sentence_dot,
        }
    }

    fn load(&self, path: &Path) -> Result<rasm_core::tokenize::TokenStream> {
        load_stream(path, self.morph.as_deref(), &self.options())
            .with_context(|| format!("reading {}", path.display()))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum TokenFormat {
    /// One token per line, an empty line after each sample.
    Tokens,
    /// `id<TAB>token<TAB>frequency`, most frequent first.
    Vocab,
    /// One sample per line, detokenized.
    Lines,
}

#[derive(Args)]
struct TokenizeArgs {
    input: PathBuf,
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, value_enum, default_value = "tokens")]
    format: TokenFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Corpus files, one sample per line.
    #[arg(required = true)]
    corpora: Vec<PathBuf>,
    /// Output directory.
    #[arg(short, long, default_value = "out")]
    output: PathBuf,
    /// Schemes to run, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "word,character,disjoint")]
    schemes: Vec<Scheme>,
    /// Segmentation companions, one per corpus in the same order.
    #[arg(long, value_delimiter = ',')]
    morph: Vec<PathBuf>,
    #[arg(long, default_value = DEFAULT_MORPH_DELIMITER)]
    morph_delimiter: String,
    #[arg(long, default_value = "both")]
    dottedness: Dottedness,
    #[arg(long, default_value = "arabic")]
    language: LanguageMode,
    #[arg(long)]
    no_positional_overrides: bool,
    #[arg(long)]
    split_on_sentence_dot: bool,
    /// Also run on all corpora concatenated in argument order.
    #[arg(long)]
    aggregate: bool,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            corpora: self.corpora.clone(),
            morph: self.morph.clone(),
            morph_delimiter: self.morph_delimiter.clone(),
            language_mode: self.language,
            schemes: self.schemes.clone(),
            dottedness: self.dottedness,
            positional_overrides: !self.no_positional_overrides,
            split_on_sentence_dot: self.split_on_sentence_dot,
            aggregate: self.aggregate,
            output_dir: self.output.clone(),
            threads: self.threads,
            ..RunConfig::default()
        }
    }
}

#[derive(Args)]
struct LawsArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Leave types rarer than this out of the Zipf fit.
    #[arg(long)]
    min_freq: Option<u64>,
    /// Prefix positions sampled for the Heap fit.
    #[arg(long, default_value_t = 64)]
    heap_points: usize,
}

#[derive(Args)]
struct SplitArgs {
    /// Train, validation and test fractions.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.9, 0.0, 0.1])]
    split: Vec<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Split in corpus order instead of a seeded shuffle.
    #[arg(long)]
    no_shuffle: bool,
}

impl SplitArgs {
    fn spec(&self) -> Result<SplitSpec> {
        let mut spec = SplitSpec::new(self.split[0], self.split[1], self.split[2], self.seed)?;
        spec.shuffle = !self.no_shuffle;
        Ok(spec)
    }
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    split: SplitArgs,
    /// Highest n-gram order; models of order 2 up to it are trained.
    #[arg(long, default_value_t = 6)]
    max_order: usize,
    /// Single discount of 0.75 instead of modified Kneser-Ney.
    #[arg(long)]
    kn_simple: bool,
    /// Do not score the end-of-sample token.
    #[arg(long)]
    no_eos: bool,
}

#[derive(Args)]
struct TrainArgs {
    corpus: PathBuf,
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, default_value_t = 3)]
    order: usize,
    #[arg(long)]
    kn_simple: bool,
    /// Text model output.
    #[arg(short, long)]
    output: PathBuf,
    /// Also write a binary count cache.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Text model or binary cache.
    #[arg(long)]
    model: PathBuf,
    test: PathBuf,
    #[command(flatten)]
    stream: StreamArgs,
    /// Order to estimate when loading a cache; the cached order by default.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    no_eos: bool,
    /// Also write the report as a one-row TSV.
    #[arg(long)]
    tsv: Option<PathBuf>,
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn reader(path: &Path) -> Result<Box<dyn BufRead>> {
    Ok(if path == Path::new("-") {
        Box::new(io::stdin().lock())
    } else {
        Box::new(BufReader::new(
            File::open(path).with_context(|| format!("opening {}", path.display()))?,
        ))
    })
}

fn cmd_undot(args: UndotArgs) -> Result<()> {
    let rule = UndotRule::with_positional_overrides(!args.no_positional_overrides);
    let out = writer(args.output.as_deref())?;
    let n = undot_lines(reader(&args.input)?, out, args.language, rule)?;
    log::info!("undotted {n} lines");
    Ok(())
}

fn cmd_tokenize(args: TokenizeArgs) -> Result<()> {
    let stream = args.stream.load(&args.input)?;
    let mut out = writer(args.output.as_deref())?;
    match args.format {
        TokenFormat::Tokens => stream.write_tokens(&mut out)?,
        TokenFormat::Vocab => build_vocab(&stream, !args.stream.dotless)?.write_tsv(&mut out)?,
        TokenFormat::Lines => {
            for line in stream.detokenize() {
                writeln!(out, "{line}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let stream = args.stream.load(&args.corpus)?;
    let counts = NgramCounts::count(&stream, args.order)?;
    let mode = if args.kn_simple {
        DiscountMode::Fixed(0.75)
    } else {
        DiscountMode::Modified
    };
    let model = KneserNey::estimate(&counts, args.order, mode)?;
    let mut out = writer(Some(&args.output))?;
    write_arpa(&model, &mut out)?;
    out.flush()?;
    if let Some(path) = &args.cache {
        let mut w = writer(Some(path))?;
        write_cache(&counts, mode, &mut w)?;
        w.flush()?;
    }
    log::info!(
        "trained order-{} model on {} tokens, {} types",
        args.order,
        stream.len(),
        model.vocab().len() - 3
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let model = load_model(&args.model, args.order)
        .with_context(|| format!("loading {}", args.model.display()))?;
    let test = args.stream.load(&args.test)?;
    let report = perplexity(
        model.as_model(),
        &test,
        EvalOptions {
            score_eos: !args.no_eos,
        },
    )?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(path) = &args.tsv {
        let mut w = writer(Some(path))?;
        writeln!(w, "ppl\tlog_prob\ttokens\toov_tokens\toov_types")?;
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            report.ppl, report.log_prob, report.token_count, report.oov_tokens, report.oov_types
        )?;
        w.flush()?;
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    if !(2..=6).contains(&args.max_order) {
        bail!("--max-order must be between 2 and 6");
    }
    let cfg = RunConfig {
        split: args.split.spec()?,
        orders: (2..=args.max_order).collect(),
        kn_simple: args.kn_simple,
        score_eos: !args.no_eos,
        ..args.run.config()
    };
    let run = run_lm(&cfg)?;
    for r in &run.oov {
        let pct = |x: Option<f64>| x.map_or("n/a".to_owned(), |v| format!("{v:.2}%"));
        println!(
            "{}/{}: OOV tokens {} -> {} ({}), types {} -> {} ({})",
            r.corpus,
            r.scheme,
            r.dotted_oov_tokens,
            r.dotless_oov_tokens,
            pct(r.token_ratio),
            r.dotted_oov_types,
            r.dotless_oov_types,
            pct(r.type_ratio)
        );
    }
    println!("results in {}", cfg.output_dir.display());
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::new().parse_filters(level).init();

    match cli.command {
        Command::Undot(args) => cmd_undot(args),
        Command::Tokenize(args) => cmd_tokenize(args),
        Command::Stats(args) => {
            let cfg = args.config();
            let run = run_stats(&cfg)?;
            for c in &run.comparisons {
                println!(
                    "{}/{}: V {} -> {} ({:.2}%), H {:.3} -> {:.3} bits",
                    c.corpus,
                    c.scheme,
                    c.dotted_types,
                    c.dotless_types,
                    c.vocab_ratio,
                    c.dotted_entropy,
                    c.dotless_entropy
                );
            }
            println!("results in {}", cfg.output_dir.display());
            Ok(())
        }
        Command::Laws(args) => {
            let cfg = RunConfig {
                min_freq: args.min_freq,
                heap_points: args.heap_points,
                ..args.run.config()
            };
            let run = run_laws(&cfg)?;
            for f in &run.fits {
                let form = if f.dotted { "dotted" } else { "dotless" };
                println!(
                    "{}/{}/{form}: alpha {:.4}, beta {:.4}",
                    f.corpus, f.scheme, f.alpha, f.beta
                );
            }
            println!("results in {}", cfg.output_dir.display());
            Ok(())
        }
        Command::LmTrain(args) => cmd_train(args),
        Command::LmEval(args) => cmd_eval(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Alphabet {
            command:
                AlphabetCommand::Dump {
                    no_positional_overrides,
                    output,
                },
        } => {
            let dump = AlphabetDump::new(UndotRule::with_positional_overrides(
                !no_positional_overrides,
            ));
            let mut out = writer(output.as_deref())?;
            writeln!(out, "{}", dump.to_json())?;
            out.flush()?;
            Ok(())
        }
    }
}
