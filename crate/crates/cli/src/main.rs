//! Command-line front end: build the transform and LCP array of a string
//! collection on disk, verify a build against the in-memory reference, and
//! pretty-print the counters a build leaves behind.
//!
//! Exit codes: 0 success, 1 malformed user input, 2 internal or I/O
//! failure, 3 verification divergence, 4 collection too large for the
//! reference implementation.

use std::fs;
use std::io::{self, BufReader, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bwtlcp::ingest::{
    compute_columns, load_collection, Alphabet, InputFormat, StringCollection,
};
use bwtlcp::merge::{build_bwt_lcp, BuildOptions, BuildOutput};
use bwtlcp::oracle::oracle_bwt_lcp;
use bwtlcp::seqlist::{ListStore, Width, DEFAULT_BUFFER_BYTES};
use bwtlcp::stats::BuildStats;
use bwtlcp::Error;

#[derive(Parser)]
#[command(
    name = "bwtlcp",
    version,
    about = "External-memory BWT and LCP construction for equal-length strings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the transform and LCP array of a collection.
    Build(BuildArgs),
    /// Rebuild from the working directory and compare every output against
    /// the in-memory reference implementation.
    Verify(VerifyArgs),
    /// Pretty-print the counters written by a previous build.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    /// One string per line.
    Lines,
    /// FASTA: `>header` lines introduce records.
    Fasta,
}

impl From<FormatArg> for InputFormat {
    fn from(arg: FormatArg) -> InputFormat {
        match arg {
            FormatArg::Lines => InputFormat::Lines,
            FormatArg::Fasta => InputFormat::Fasta,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WidthArg {
    #[value(name = "1")]
    One,
    #[value(name = "4")]
    Four,
    #[value(name = "8")]
    Eight,
}

impl From<WidthArg> for Width {
    fn from(arg: WidthArg) -> Width {
        match arg {
            WidthArg::One => Width::W1,
            WidthArg::Four => Width::W4,
            WidthArg::Eight => Width::W8,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Input file holding the collection.
    #[arg(long)]
    input: PathBuf,

    /// How the input file is laid out.
    #[arg(long, value_enum, default_value_t = FormatArg::Lines)]
    format: FormatArg,

    /// Alphabet in ascending symbol order; the sentinel is implicit and
    /// smallest.
    #[arg(long, default_value = "ACGT")]
    alphabet: String,

    /// Directory for the disk-backed lists (created if missing).
    #[arg(long)]
    workdir: PathBuf,

    /// Buffer size per open list, in bytes.
    #[arg(long, default_value_t = DEFAULT_BUFFER_BYTES)]
    buffer_bytes: usize,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Also write bwt.txt and lcp.txt next to the binary outputs.
    #[arg(long)]
    text: bool,

    /// Copy the binary transform here after the build.
    #[arg(long)]
    out_bwt: Option<PathBuf>,

    /// Copy the binary LCP array here after the build.
    #[arg(long)]
    out_lcp: Option<PathBuf>,

    /// Bytes per string number in intermediate lists (default: picked from
    /// the collection size).
    #[arg(long, value_enum)]
    int_width: Option<WidthArg>,

    /// Keep the intermediate number lists and buckets after the build.
    #[arg(long)]
    keep_intermediates: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Refuse to run the quadratic reference above this many suffixes.
    #[arg(long, default_value_t = 100_000)]
    max_oracle_size: u64,
}

#[derive(Args)]
struct StatsArgs {
    /// Directory a previous build wrote its outputs to.
    #[arg(long)]
    workdir: PathBuf,
}

/// Write one line to stdout. A broken pipe (the reader hung up, as in
/// `bwtlcp stats | head`) ends the process quietly: all real work is done
/// before anything is printed.
fn say(args: std::fmt::Arguments<'_>) {
    let mut stdout = io::stdout().lock();
    let outcome = stdout.write_fmt(args).and_then(|()| stdout.write_all(b"\n"));
    if let Err(err) = outcome {
        if err.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {err}");
        std::process::exit(2);
    }
}

macro_rules! say {
    ($($arg:tt)*) => { say(format_args!($($arg)*)) };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Build(args) => run_build(args),
        Command::Verify(args) => run_verify(args),
        Command::Stats(args) => run_stats(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_user_input() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

/// Load the collection named by the shared input flags and open its store.
fn open_input(args: &InputArgs) -> Result<(StringCollection, Alphabet, ListStore), Error> {
    let alphabet = Alphabet::new(&args.alphabet)?;
    let file = fs::File::open(&args.input).map_err(|source| Error::InvalidInput {
        record: args.input.display().to_string(),
        detail: format!("cannot open input: {source}"),
    })?;
    let collection = load_collection(BufReader::new(file), args.format.into(), &alphabet)?;

    if let Ok(input_path) = args.input.canonicalize() {
        if let Ok(workdir) = args.workdir.canonicalize() {
            if input_path.starts_with(&workdir) {
                return Err(Error::InvalidInput {
                    record: args.input.display().to_string(),
                    detail: "input file lies inside the working directory, which the build overwrites"
                        .to_string(),
                });
            }
        }
    }
    fs::create_dir_all(&args.workdir).map_err(|source| Error::Io {
        path: args.workdir.clone(),
        source,
    })?;
    let store = ListStore::open(&args.workdir, args.buffer_bytes)?;
    Ok((collection, alphabet, store))
}

fn build_collection(
    collection: &StringCollection,
    alphabet: &Alphabet,
    store: &ListStore,
    options: &BuildOptions,
) -> Result<BuildOutput, Error> {
    let columns = compute_columns(collection, store)?;
    build_bwt_lcp(&columns, alphabet, store, options)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), Error> {
    let mut file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run_build(args: BuildArgs) -> Result<ExitCode, Error> {
    let (collection, alphabet, store) = open_input(&args.input)?;
    let options = BuildOptions {
        keep_intermediates: args.keep_intermediates,
        reuse_partial: false,
        index_width: args.int_width.map(Width::from),
    };
    let out = build_collection(&collection, &alphabet, &store, &options)?;

    let stats_path = args.input.workdir.join("stats.txt");
    write_file(&stats_path, out.stats.to_text().as_bytes())?;

    if args.text {
        let codes: Vec<u8> = out.bwt.read_all()?.iter().map(|&v| v as u8).collect();
        let mut text = alphabet.decode(&codes);
        text.push('\n');
        write_file(&args.input.workdir.join("bwt.txt"), text.as_bytes())?;

        let mut lcp_text = String::new();
        for value in out.lcp.read_all()? {
            lcp_text.push_str(&value.to_string());
            lcp_text.push('\n');
        }
        write_file(&args.input.workdir.join("lcp.txt"), lcp_text.as_bytes())?;
    }

    if let Some(dest) = &args.out_bwt {
        copy_list(out.bwt.path(), dest)?;
    }
    if let Some(dest) = &args.out_lcp {
        copy_list(out.lcp.path(), dest)?;
    }

    say!(
        "built: m={} k={} sigma={} passes={} max_lcp={} bytes_read={} bytes_written={}",
        out.stats.m,
        out.stats.k,
        out.stats.sigma,
        out.stats.passes,
        out.stats.max_lcp,
        out.stats.bytes_read,
        out.stats.bytes_written,
    );
    say!("outputs: {}", args.input.workdir.display());
    Ok(ExitCode::SUCCESS)
}

fn copy_list(from: &Path, to: &Path) -> Result<(), Error> {
    fs::copy(from, to).map_err(|source| Error::Io {
        path: to.to_path_buf(),
        source,
    })?;
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let (collection, alphabet, store) = open_input(&args.input)?;
    let suffixes = collection.total_suffixes();
    if suffixes > args.max_oracle_size {
        eprintln!(
            "refusing the quadratic reference: {suffixes} suffixes exceed --max-oracle-size {}",
            args.max_oracle_size,
        );
        return Ok(ExitCode::from(4));
    }

    // Reuse per-length transforms already in the working directory so that
    // verification exercises the data actually on disk.
    let options = BuildOptions {
        reuse_partial: true,
        ..Default::default()
    };
    let out = build_collection(&collection, &alphabet, &store, &options)?;
    let reference = oracle_bwt_lcp(&collection);

    let bwt: Vec<u8> = out.bwt.read_all()?.iter().map(|&v| v as u8).collect();
    if let Some(index) = first_divergence(&bwt, &reference.bwt) {
        eprintln!(
            "divergence in the transform at index {index}: built {:?}, reference {:?}",
            alphabet.char_of(bwt[index]) as char,
            alphabet.char_of(reference.bwt[index]) as char,
        );
        return Ok(ExitCode::from(3));
    }
    let lcp = out.lcp.read_all()?;
    if let Some(index) = first_divergence(&lcp, &reference.lcp) {
        eprintln!(
            "divergence in the LCP array at index {index}: built {}, reference {}",
            lcp[index], reference.lcp[index],
        );
        return Ok(ExitCode::from(3));
    }
    let encoding: Vec<u64> = out.encoding.read_all()?.iter().map(|&v| v as u64).collect();
    if let Some(index) = first_divergence(&encoding, &reference.encoding) {
        eprintln!(
            "divergence in the interleave encoding at index {index}: built {}, reference {}",
            encoding[index], reference.encoding[index],
        );
        return Ok(ExitCode::from(3));
    }

    say!(
        "verified: transform, LCP array, and encoding match the reference ({suffixes} suffixes)",
    );
    Ok(ExitCode::SUCCESS)
}

/// Index of the first difference, including a length mismatch.
fn first_divergence<T: PartialEq>(a: &[T], b: &[T]) -> Option<usize> {
    if a.len() != b.len() {
        return Some(a.len().min(b.len()));
    }
    (0..a.len()).find(|&i| a[i] != b[i])
}

fn run_stats(args: StatsArgs) -> Result<ExitCode, Error> {
    let path = args.workdir.join("stats.txt");
    let text = fs::read_to_string(&path).map_err(|source| Error::InvalidInput {
        record: path.display().to_string(),
        detail: format!("cannot read build counters: {source}"),
    })?;
    let stats = BuildStats::from_text(&text, &path)?;

    say!("strings (m):             {}", stats.m);
    say!("string length (k):       {}", stats.k);
    say!("alphabet size (sigma):   {}", stats.sigma);
    say!("merge passes:            {}", stats.passes);
    say!("max LCP:                 {}", stats.max_lcp);
    say!("bytes read:              {}", stats.bytes_read);
    say!("bytes written:           {}", stats.bytes_written);
    say!("peak resident elements:  {}", stats.peak_resident_elements);
    for (idx, pass) in stats.pass_details.iter().enumerate() {
        say!(
            "pass {}: reads {} (encoding {}, lcp {}, transform {}), writes {} (encoding {}, lcp {}), max LCP {}",
            idx + 1,
            pass.reads_total(),
            pass.reads_encoding,
            pass.reads_lcp,
            pass.reads_bwt,
            pass.writes_total(),
            pass.writes_encoding,
            pass.writes_lcp,
            pass.max_lcp,
        );
    }
    Ok(ExitCode::SUCCESS)
}
