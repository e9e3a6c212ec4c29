//! Command-line surface: the `.sft` spec format, subcommands printing CSV to
//! standard output, and the `verify` summary.
//!
//! Spec files list `alphabet:`, `group:`, `dimension:` and `forbidden:`
//! sections; `#` starts a comment. Each line after `forbidden:` is one
//! pattern written as space-separated `(coords)=symbol` cells:
//!
//! ```text
//! alphabet: 0 1
//! group: N
//! dimension: 1
//! forbidden:
//! (0)=1 (1)=1
//! ```
//!
//! Exit codes: 0 success, 1 usage, 2 spec parse or semantic error, 3
//! computation error or failed verification. Errors go to standard error as
//! a single `error: ...` line.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::catalog;
use crate::complexity::{
    check_limsup_bound, complexity_rate_series, complexity_rate_series_at, dyadic_schedule, ConstantPoint, FinitePoint,
    PointSource, ProxyCodec,
};
use crate::dimension::{
    decode_pattern, default_s_grid, dim_estimate, encode_pattern, hausdorff_sum, s_grid_with_step, vitali_pack,
    CylinderCover, Dictionary, GapSymbol, PackOutcome, Trend,
};
use crate::error::Error;
use crate::lattice::{GroupSpec, GroupVariant, Pattern};
use crate::measure::{measure_entropy, parry_measure, sample_point, smb_check, MarkovMeasure};
use crate::sft::{
    count_patterns, count_patterns_with, entropy_exact_1d, entropy_series_with, enumerate_patterns, log2_big,
    strip_entropy_bracket_2d, transfer_matrix_1d, Alphabet, SftSpec,
};

/// Fixed-point format for every real number in CSV output.
pub fn num(x: f64) -> String {
    // -0.0 prints with a sign
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.12}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecErrorKind {
    Parse,
    Semantic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub kind: SpecErrorKind,
    /// 1-based; 0 when the error concerns the file as a whole.
    pub line: usize,
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            SpecErrorKind::Parse => "parse error",
            SpecErrorKind::Semantic => "semantic error",
        };
        write!(f, "{kind} at line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for SpecError {}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> SpecError {
    SpecError { kind: SpecErrorKind::Parse, line, column, message: message.into() }
}

fn semantic_error(line: usize, column: usize, message: impl Into<String>) -> SpecError {
    SpecError { kind: SpecErrorKind::Semantic, line, column, message: message.into() }
}

/// One `(coords)=symbol` token with its 1-based column.
struct RawCell {
    column: usize,
    coords: Vec<i64>,
    symbol: String,
}

fn parse_cell(token: &str, line: usize, column: usize) -> Result<RawCell, SpecError> {
    let bad = |msg: &str| parse_error(line, column, format!("{msg} in {token:?}"));
    let rest = token.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
    let (coords, symbol) = rest.split_once(")=").ok_or_else(|| bad("expected ')='"))?;
    let coords = coords
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad("bad coordinate"))?;
    if symbol.is_empty() {
        return Err(bad("missing symbol"));
    }
    Ok(RawCell { column, coords, symbol: symbol.to_string() })
}

/// Byte offsets of whitespace-separated tokens, as 1-based character columns.
fn tokens(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &text[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out.into_iter().map(|(s, t)| (text[..s].chars().count() + 1, t)).collect()
}

/// Parses the text of a spec file.
pub fn parse_spec_str(text: &str) -> Result<SftSpec, SpecError> {
    let mut alphabet: Option<(usize, Vec<(usize, String)>)> = None;
    let mut variant: Option<GroupVariant> = None;
    let mut dimension: Option<(usize, usize, usize)> = None;
    let mut forbidden: Option<Vec<(usize, Vec<RawCell>)>> = None;
    let mut in_forbidden = false;
    let mut last_line = 0;

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let toks = tokens(content);
        let (first_col, first) = toks[0];
        if let Some(name) = first.strip_suffix(':').filter(|n| !n.contains('(')) {
            in_forbidden = false;
            let values = &toks[1..];
            let duplicate = || parse_error(line, first_col, format!("duplicate section {name:?}"));
            let single = |what: &str| -> Result<(usize, &str), SpecError> {
                match values {
                    [v] => Ok(*v),
                    _ => Err(parse_error(line, first_col, format!("section {what:?} takes exactly one value"))),
                }
            };
            match name {
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(duplicate());
                    }
                    if values.is_empty() {
                        return Err(parse_error(line, first_col, "alphabet has no symbols"));
                    }
                    alphabet = Some((line, values.iter().map(|&(c, v)| (c, v.to_string())).collect()));
                }
                "group" => {
                    if variant.is_some() {
                        return Err(duplicate());
                    }
                    let (col, v) = single("group")?;
                    variant = Some(match v {
                        "N" => GroupVariant::N,
                        "Z" => GroupVariant::Z,
                        _ => return Err(parse_error(line, col, format!("group must be N or Z, got {v:?}"))),
                    });
                }
                "dimension" => {
                    if dimension.is_some() {
                        return Err(duplicate());
                    }
                    let (col, v) = single("dimension")?;
                    let d = v
                        .parse::<usize>()
                        .ok()
                        .filter(|&d| d >= 1)
                        .ok_or_else(|| parse_error(line, col, format!("dimension must be a positive integer, got {v:?}")))?;
                    dimension = Some((d, line, col));
                }
                "forbidden" => {
                    if forbidden.is_some() {
                        return Err(duplicate());
                    }
                    if let Some(&(col, _)) = values.first() {
                        return Err(parse_error(line, col, "patterns start on the line after \"forbidden:\""));
                    }
                    forbidden = Some(Vec::new());
                    in_forbidden = true;
                }
                _ => return Err(parse_error(line, first_col, format!("unknown section {name:?}"))),
            }
            continue;
        }
        if !in_forbidden {
            return Err(parse_error(line, first_col, "expected a section header"));
        }
        let cells = toks.iter().map(|&(col, t)| parse_cell(t, line, col)).collect::<Result<Vec<_>, _>>()?;
        forbidden.as_mut().expect("inside forbidden section").push((line, cells));
    }

    let missing = |name: &str| parse_error(last_line, 0, format!("missing section {name:?}"));
    let (alphabet_line, symbols) = alphabet.ok_or_else(|| missing("alphabet"))?;
    let variant = variant.ok_or_else(|| missing("group"))?;
    let (dim, dim_line, dim_col) = dimension.ok_or_else(|| missing("dimension"))?;
    let forbidden = forbidden.ok_or_else(|| missing("forbidden"))?;

    let names: Vec<String> = symbols.iter().map(|(_, s)| s.clone()).collect();
    let alphabet = Alphabet::new(names).map_err(|e| {
        let col = symbols.first().map_or(0, |s| s.0);
        semantic_error(alphabet_line, col, e.to_string())
    })?;
    let group = GroupSpec::new(variant, dim).map_err(|e| semantic_error(dim_line, dim_col, e.to_string()))?;
    let mut patterns = Vec::with_capacity(forbidden.len());
    for (line, cells) in forbidden {
        let mut p = Pattern::new();
        for cell in cells {
            if cell.coords.len() != dim {
                return Err(semantic_error(
                    line,
                    cell.column,
                    format!("cell has {} coordinates, dimension is {dim}", cell.coords.len()),
                ));
            }
            let s = alphabet
                .index(&cell.symbol)
                .ok_or_else(|| semantic_error(line, cell.column, format!("symbol {:?} is not in the alphabet", cell.symbol)))?;
            if p.insert(cell.coords.clone(), s).is_some() {
                return Err(semantic_error(line, cell.column, format!("cell {:?} assigned twice", cell.coords)));
            }
        }
        patterns.push(p);
    }
    SftSpec::new(alphabet, group, patterns).map_err(|e| semantic_error(0, 0, e.to_string()))
}

#[derive(Debug)]
pub enum SpecFileError {
    Io(PathBuf, String),
    Spec(PathBuf, SpecError),
}

impl fmt::Display for SpecFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecFileError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            SpecFileError::Spec(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

impl std::error::Error for SpecFileError {}

pub fn parse_spec(path: &Path) -> Result<SftSpec, SpecFileError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecFileError::Io(path.to_path_buf(), e.to_string()))?;
    parse_spec_str(&text).map_err(|e| SpecFileError::Spec(path.to_path_buf(), e))
}

fn coords(p: &[i64]) -> String {
    p.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

/// Canonical spec text; `parse_spec_str(&emit_spec(s)) == Ok(s)`.
pub fn emit_spec(spec: &SftSpec) -> String {
    let a = spec.alphabet();
    let mut out = String::new();
    writeln!(out, "alphabet: {}", a.names().join(" ")).unwrap();
    writeln!(out, "group: {}", spec.group().variant()).unwrap();
    writeln!(out, "dimension: {}", spec.dim()).unwrap();
    writeln!(out, "forbidden:").unwrap();
    for p in spec.forbidden() {
        let cells: Vec<String> = p.cells().map(|(c, s)| format!("({})={}", coords(c), a.name(s))).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
    out
}

#[derive(Parser, Debug)]
#[command(name = "subshift", version, about = "Entropy, dimension and complexity rates of subshifts of finite type")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count admissible patterns on one box.
    Count(CountArgs),
    /// Entropy rate series, with the exact value (d = 1) or strip brackets (d = 2).
    Entropy(EntropyArgs),
    /// Trend of log2 C_n - s|F_n| over an s grid and the dimension estimate.
    Dim(DimArgs),
    /// Compression rate series of a sampled or constant point.
    Complexity(ComplexityArgs),
    /// A point sampled from the Parry measure.
    Sample(SampleArgs),
    /// Greedy packing of a sampled pattern by admissible words.
    Vitali(PackArgs),
    /// Gap-symbol encoding of a sampled pattern, with a decoding check.
    Encode(PackArgs),
    /// Cross-check entropy, dimension, measure and complexity estimators.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// Path to a .sft spec file.
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args, Debug)]
struct CountOptions {
    /// Extra layers a pattern must extend through.
    #[arg(long, default_value_t = 2)]
    margin: i64,
    /// Worker threads for counting; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    n: i64,
    #[command(flatten)]
    options: CountOptions,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Largest box index; defaults to 12 for d = 1 and 2 otherwise.
    #[arg(long)]
    nmax: Option<i64>,
    #[command(flatten)]
    options: CountOptions,
    /// Strip widths up to this value (d = 2).
    #[arg(long, default_value_t = 8)]
    max_width: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args, Debug)]
struct DimArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Largest box index; defaults to 18 for d = 1 and 2 otherwise.
    #[arg(long)]
    nmax: Option<i64>,
    #[arg(long, default_value_t = 2)]
    margin: i64,
    /// Grid step over [0, log2|A|]; defaults to 64 equally spaced points.
    #[arg(long)]
    step: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PointKind {
    /// Sampled from the Parry measure of the loaded SFT (d = 1).
    Parry,
    /// Every cell equal to the first alphabet symbol.
    Zero,
}

#[derive(Args, Debug)]
struct ComplexityArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 65535)]
    nmax: i64,
    /// lz78, ctw or ctwD for context depth D.
    #[arg(long, default_value = "ctw8")]
    codec: String,
    #[arg(long, value_enum, default_value_t = PointKind::Parry)]
    point: PointKind,
    /// Every n up to nmax instead of n = 2^j - 1.
    #[arg(long)]
    all: bool,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    length: usize,
}

#[derive(Args, Debug)]
struct PackArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target box index; the target has n + 1 symbols.
    #[arg(long, default_value_t = 15)]
    n: i64,
    /// Dictionary word length; the dictionary holds every admissible word of it.
    #[arg(long, default_value_t = 4)]
    word_len: usize,
    #[arg(long, default_value_t = 0.3)]
    epsilon: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Largest box index; defaults to 18 for d = 1 and 2 otherwise.
    #[arg(long)]
    nmax: Option<i64>,
    #[command(flatten)]
    options: CountOptions,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "ctw8")]
    codec: String,
    #[arg(long, default_value_t = 0.05)]
    slack: f64,
}

enum Failure {
    Usage(String),
    Spec(String),
    Compute(String),
    /// A completed report with failing checks.
    Rejected { output: String, message: String },
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Spec(_) => 2,
            Failure::Compute(_) | Failure::Rejected { .. } => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Spec(m) | Failure::Compute(m) => m,
            Failure::Rejected { message, .. } => message,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(err, "error: {first}");
            return 1;
        }
    };
    let result = match cli.command {
        Command::Count(a) => cmd_count(a),
        Command::Entropy(a) => cmd_entropy(a),
        Command::Dim(a) => cmd_dim(a),
        Command::Complexity(a) => cmd_complexity(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Vitali(a) => cmd_vitali(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(f) => {
            if let Failure::Rejected { output, .. } = &f {
                let _ = out.write_all(output.as_bytes());
            }
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn load(args: &SpecArgs) -> Result<SftSpec, Failure> {
    parse_spec(&args.spec).map_err(|e| Failure::Spec(e.to_string()))
}

fn codec(name: &str) -> Result<ProxyCodec, Failure> {
    name.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

fn default_nmax(spec: &SftSpec, one_dim: i64) -> i64 {
    if spec.dim() == 1 {
        one_dim
    } else {
        2
    }
}

fn word(spec: &SftSpec, p: &Pattern) -> String {
    p.symbols().map(|s| spec.alphabet().name(s)).collect::<Vec<_>>().join(" ")
}

fn parry(spec: &SftSpec, tol: f64) -> Result<MarkovMeasure, Failure> {
    Ok(parry_measure(&transfer_matrix_1d(spec)?, tol)?)
}

fn cmd_count(a: CountArgs) -> Outcome {
    let spec = load(&a.spec)?;
    let r = count_patterns_with(&spec, a.n, a.options.margin, a.options.threads)?;
    Ok(format!("n,box_size,count,rate\n{},{},{},{}\n", r.n, r.box_size, r.count, num(r.rate)))
}

fn cmd_entropy(a: EntropyArgs) -> Outcome {
    let spec = load(&a.spec)?;
    let nmax = a.nmax.unwrap_or(default_nmax(&spec, 12));
    let series = entropy_series_with(&spec, nmax, a.options.margin, a.options.threads)?;
    let mut out = String::from("n,box_size,count,rate\n");
    for r in &series.records {
        writeln!(out, "{},{},{},{}", r.n, r.box_size, r.count, num(r.rate)).unwrap();
    }
    writeln!(out, "\nquantity,value").unwrap();
    writeln!(out, "submultiplicativity_violations,{}", series.violations().count()).unwrap();
    if spec.dim() == 1 {
        writeln!(out, "exact,{}", num(entropy_exact_1d(&spec, a.tol)?)).unwrap();
    } else if spec.dim() == 2 {
        let min = crate::sft::min_strip_width(&spec);
        let widths: Vec<usize> = (min..=a.max_width.max(min)).collect();
        writeln!(out, "\nwidth,upper,lower").unwrap();
        for b in strip_entropy_bracket_2d(&spec, &widths, a.tol)? {
            writeln!(out, "{},{},{}", b.width, num(b.upper), b.lower.map(num).unwrap_or_default()).unwrap();
        }
    }
    Ok(out)
}

fn trend_name(t: Trend) -> &'static str {
    match t {
        Trend::Up => "up",
        Trend::Down => "down",
        Trend::Flat => "flat",
        Trend::Inconclusive => "inconclusive",
    }
}

fn cmd_dim(a: DimArgs) -> Outcome {
    let spec = load(&a.spec)?;
    let nmax = a.nmax.unwrap_or(default_nmax(&spec, 18));
    let k = spec.alphabet().len();
    let grid = match a.step {
        Some(step) if step > 0.0 => s_grid_with_step(0.0, (k as f64).log2(), step),
        Some(step) => return Err(Failure::Usage(format!("step must be positive, got {step}"))),
        None => default_s_grid(k),
    };
    let report = dim_estimate(&spec, nmax, &grid, a.margin)?;
    let mut out = String::from("s,tail_slope,last_slope,trend\n");
    for t in &report.trends {
        let slope = |x: f64| if x.is_nan() { String::new() } else { num(x) };
        writeln!(out, "{},{},{},{}", num(t.s), slope(t.tail_slope), slope(t.last_slope), trend_name(t.trend)).unwrap();
    }
    writeln!(out, "\nestimate,lower,upper").unwrap();
    writeln!(out, "{},{},{}", num(report.estimate), num(report.interval.0), num(report.interval.1)).unwrap();
    Ok(out)
}

fn cmd_complexity(a: ComplexityArgs) -> Outcome {
    let spec = load(&a.spec)?;
    let codec = codec(&a.codec)?;
    if a.nmax < 0 {
        return Err(Failure::Usage(format!("nmax must be nonnegative, got {}", a.nmax)));
    }
    let source: Box<dyn PointSource> = match a.point {
        PointKind::Zero => {
            Box::new(ConstantPoint { group: spec.group(), alphabet_size: spec.alphabet().len(), symbol: 0 })
        }
        PointKind::Parry => {
            let mu = parry(&spec, 1e-12)?;
            Box::new(FinitePoint::sampled(&mu, a.seed, a.nmax as usize + 1, spec.alphabet().len())?)
        }
    };
    let series = if a.all {
        complexity_rate_series(source.as_ref(), a.nmax, codec)?
    } else {
        complexity_rate_series_at(source.as_ref(), &dyadic_schedule(a.nmax), codec)?
    };
    let mut out = String::from("n,box_size,bits,rate\n");
    for r in &series.records {
        writeln!(out, "{},{},{},{}", r.n, r.box_size, r.bits, num(r.rate)).unwrap();
    }
    Ok(out)
}

fn cmd_sample(a: SampleArgs) -> Outcome {
    let spec = load(&a.spec)?;
    let p = sample_point(&parry(&spec, 1e-12)?, a.seed, a.length)?;
    Ok(format!("seed,length,point\n{},{},{}\n", a.seed, a.length, word(&spec, &p)))
}

struct PackSetup {
    spec: SftSpec,
    target: Pattern,
    dictionary: Dictionary,
    outcome: PackOutcome,
}

fn tiling_dictionary(spec: &SftSpec, word_len: usize) -> Result<Dictionary, Failure> {
    if word_len == 0 {
        return Err(Failure::Usage("word length must be positive".into()));
    }
    let words: Vec<Pattern> = enumerate_patterns(spec, word_len as i64 - 1, 0)?.collect();
    if words.is_empty() {
        return Err(Failure::Compute(format!("no admissible words of length {word_len}")));
    }
    Ok(Dictionary::single(words)?)
}

fn pack_setup(a: &PackArgs) -> Result<PackSetup, Failure> {
    let spec = load(&a.spec)?;
    if a.n < 0 {
        return Err(Failure::Usage(format!("n must be nonnegative, got {}", a.n)));
    }
    let target = sample_point(&parry(&spec, 1e-12)?, a.seed, a.n as usize + 1)?;
    let dictionary = tiling_dictionary(&spec, a.word_len)?;
    let outcome = vitali_pack(&target, spec.group(), &dictionary, a.epsilon)?;
    Ok(PackSetup { spec, target, dictionary, outcome })
}

fn cmd_vitali(a: PackArgs) -> Outcome {
    let setup = pack_setup(&a)?;
    let pack = setup.outcome.pack();
    let status = if setup.outcome.is_success() { "SUCCESS" } else { "SHORTFALL" };
    let mut out = String::from("n,box_size,pieces,covered_cells,coverage_bound,count_bound,status\n");
    writeln!(
        out,
        "{},{},{},{},{},{},{status}",
        pack.n,
        pack.box_size,
        pack.piece_count(),
        pack.covered_cells,
        pack.coverage_bound_met(a.epsilon),
        pack.count_bound_met(a.epsilon)
    )
    .unwrap();
    writeln!(out, "\nanchor,word").unwrap();
    for piece in &pack.pieces {
        let p = setup.dictionary.get(piece.pattern).expect("pieces reference the dictionary");
        writeln!(out, "{},{}", coords(&piece.anchor), word(&setup.spec, p)).unwrap();
    }
    Ok(out)
}

fn cmd_encode(a: PackArgs) -> Outcome {
    let setup = pack_setup(&a)?;
    let group = setup.spec.group();
    let enc = encode_pattern(&setup.target, group, &setup.dictionary, setup.outcome.pack(), a.epsilon)?;
    let round_trip = decode_pattern(&enc, &setup.dictionary, group)? == setup.target;
    let gaps: Vec<&str> = enc
        .gap_symbols
        .iter()
        .map(|g| match g {
            GapSymbol::Blank => "_",
            GapSymbol::Symbol(s) => setup.spec.alphabet().name(*s),
        })
        .collect();
    Ok(format!(
        "n,m,k,description_size,gaps,round_trip\n{},{},{},{},{},{round_trip}\n",
        enc.n,
        enc.gap_symbols.len(),
        enc.words.len(),
        enc.description_size(&setup.dictionary),
        gaps.join(" ")
    ))
}

struct Check {
    name: &'static str,
    value: String,
    target: String,
    /// `None` for informational rows.
    pass: Option<bool>,
}

fn info(name: &'static str, value: String) -> Check {
    Check { name, value, target: String::new(), pass: None }
}

fn check(name: &'static str, value: String, target: impl Into<String>, pass: bool) -> Check {
    Check { name, value, target: target.into(), pass: Some(pass) }
}

const COMPLEXITY_LENGTH: usize = 1 << 16;
const SMB_SEEDS: u64 = 100;
const SMB_N: i64 = 10_000;
const PACK_SAMPLES: u64 = 100;
const PACK_N: i64 = 15;
const PACK_WORD: usize = 4;
const PACK_EPSILON: f64 = 0.3;
const MAX_COVER: u64 = 1 << 16;

fn full_shift_identity() -> Result<Check, Failure> {
    let mut exact = true;
    for k in 2..=4usize {
        for (d, nmax) in [(1usize, 8i64), (2, 2)] {
            let spec = catalog::full_shift(k, GroupSpec::new(GroupVariant::N, d)?);
            let target = (k as f64).log2();
            for n in 0..=nmax {
                exact &= count_patterns(&spec, n, 0)?.rate == target;
            }
        }
    }
    Ok(check("full_shift_identity", exact.to_string(), "rate == log2|A|", exact))
}

fn reference_points(codec: ProxyCodec, seed: u64) -> Result<Vec<Check>, Failure> {
    let line = GroupSpec::new(GroupVariant::N, 1)?;
    let schedule = dyadic_schedule(COMPLEXITY_LENGTH as i64 - 1);
    let zero = ConstantPoint { group: line, alphabet_size: 2, symbol: 0 };
    let zero_rate = complexity_rate_series_at(&zero, &schedule, codec)?.last().expect("nonempty").rate;
    let coin = MarkovMeasure::bernoulli(&[0.5, 0.5])?;
    let coin_point = FinitePoint::sampled(&coin, seed, COMPLEXITY_LENGTH, 2)?;
    let coin_rate = complexity_rate_series_at(&coin_point, &schedule, codec)?.last().expect("nonempty").rate;
    Ok(vec![
        check("complexity_zero_point", num(zero_rate), "< 0.05", zero_rate < 0.05),
        check("complexity_fair_coin", num(coin_rate), "1 +- 0.05", (coin_rate - 1.0).abs() <= 0.05),
    ])
}

fn hausdorff_identity(spec: &SftSpec, nmax: i64, margin: i64, s_values: &[f64]) -> Result<Check, Failure> {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for n in 0..=nmax {
        let record = count_patterns(spec, n, margin)?;
        if record.count > MAX_COVER.into() {
            break;
        }
        let cover = CylinderCover::uniform(spec, n, margin)?;
        for &s in s_values {
            let direct = log2_big(&record.count) - s * record.box_size as f64;
            worst = worst.max((hausdorff_sum(&cover, s)? - direct).abs());
        }
        checked = n;
    }
    Ok(check("hausdorff_identity", num(worst), format!("<= 1e-9 for n <= {checked}"), worst <= 1e-9))
}

fn verify_1d(spec: &SftSpec, a: &VerifyArgs, codec: ProxyCodec, checks: &mut Vec<Check>) -> Result<(), Failure> {
    let nmax = a.nmax.unwrap_or(18);
    let margin = a.options.margin;
    let series = entropy_series_with(spec, nmax, margin, a.options.threads)?;
    let exact = entropy_exact_1d(spec, a.tol)?;
    checks.push(info("entropy_rate", num(series.last().rate)));
    checks.push(info("entropy_exact", num(exact)));
    let violations = series.violations().count();
    checks.push(check("submultiplicativity", violations.to_string(), "0 violations", violations == 0));

    let tm = transfer_matrix_1d(spec)?;
    let mut agree = true;
    for n in (tm.block_len as i64 - 1)..=nmax {
        agree &= count_patterns(spec, n, 0)?.count == tm.walk_count(n as usize + 1 - tm.block_len);
    }
    checks.push(check("transfer_counts", agree.to_string(), "counts == walks", agree));

    let k = spec.alphabet().len();
    let grid = s_grid_with_step(0.0, (k as f64).log2(), 0.01);
    let dim = dim_estimate(spec, nmax, &grid, margin)?;
    let (lo, hi) = dim.interval;
    checks.push(check(
        "dimension",
        num(dim.estimate),
        format!("[{};{}] contains entropy", num(lo), num(hi)),
        lo <= exact && exact <= hi,
    ));
    checks.push(hausdorff_identity(spec, nmax, margin, &[0.5, exact, 1.0])?);

    let mu = parry_measure(&tm, a.tol)?;
    let h = measure_entropy(&mu);
    checks.push(check("variational", num(h), "entropy +- 1e-9", (h - exact).abs() <= 1e-9));
    let seeds: Vec<u64> = (0..SMB_SEEDS).map(|i| a.seed.wrapping_add(i)).collect();
    let smb = smb_check(&mu, &seeds, SMB_N)?;
    checks.push(check("smb_mean", num(smb.mean), "entropy +- 0.01", (smb.mean - h).abs() <= 0.01));
    checks.push(check(
        "smb_max_deviation",
        num(smb.max_deviation),
        "<= 0.05",
        smb.max_deviation <= 0.05 && smb.support_violations == 0,
    ));

    let point = FinitePoint::sampled(&mu, a.seed, COMPLEXITY_LENGTH, k)?;
    let series = complexity_rate_series_at(&point, &dyadic_schedule(COMPLEXITY_LENGTH as i64 - 1), codec)?;
    let rate = series.last().expect("nonempty").rate;
    checks.push(check(
        "complexity_rate",
        num(rate),
        format!("entropy +- {}", a.slack),
        (rate - exact).abs() <= a.slack,
    ));
    let tail = series.records.iter().filter(|r| r.box_size >= 1 << 14).count();
    let limsup = check_limsup_bound(&series, exact, tail, a.slack)?;
    checks.push(check("complexity_limsup", num(limsup.max_rate), format!("<= {}", num(limsup.bound)), limsup.passed));

    let dictionary = tiling_dictionary(spec, PACK_WORD)?;
    let (mut met, mut round_trips) = (0, 0);
    for i in 0..PACK_SAMPLES {
        let target = sample_point(&mu, a.seed.wrapping_add(i), PACK_N as usize + 1)?;
        if let PackOutcome::Success(pack) = vitali_pack(&target, spec.group(), &dictionary, PACK_EPSILON)? {
            met += 1;
            let enc = encode_pattern(&target, spec.group(), &dictionary, &pack, PACK_EPSILON)?;
            round_trips += usize::from(decode_pattern(&enc, &dictionary, spec.group())? == target);
        }
    }
    checks.push(check("vitali_bounds", format!("{met}/{PACK_SAMPLES}"), "all", met == PACK_SAMPLES));
    checks.push(check(
        "encode_round_trip",
        format!("{round_trips}/{PACK_SAMPLES}"),
        "all",
        round_trips as u64 == PACK_SAMPLES,
    ));
    Ok(())
}

fn verify_2d(spec: &SftSpec, a: &VerifyArgs, checks: &mut Vec<Check>) -> Result<(), Failure> {
    let nmax = a.nmax.unwrap_or(2);
    let margin = a.options.margin;
    let series = entropy_series_with(spec, nmax, margin, a.options.threads)?;
    checks.push(info("entropy_rate", num(series.last().rate)));
    let violations = series.violations().count();
    checks.push(check("submultiplicativity", violations.to_string(), "0 violations", violations == 0));

    let min = crate::sft::min_strip_width(spec);
    let widths: Vec<usize> = (min..=8.max(min)).collect();
    let brackets = strip_entropy_bracket_2d(spec, &widths, a.tol)?;
    let nested = brackets.windows(2).all(|w| w[1].upper <= w[0].upper)
        && brackets.iter().all(|b| b.lower.is_none_or(|l| l <= b.upper));
    checks.push(check("bracket_nested", nested.to_string(), "upper non-increasing; lower <= upper", nested));
    let last = brackets.last().expect("nonempty widths");
    let width = last.lower.map_or(f64::INFINITY, |l| last.upper - l);
    checks.push(check("bracket_width", num(width), "<= 0.1", width <= 0.1));
    let max_rate = series.records.iter().map(|r| r.rate).fold(0.0, f64::max);
    let bound = last.upper + 0.02;
    checks.push(check("box_rates", num(max_rate), format!("<= {}", num(bound)), max_rate <= bound));

    let dim = dim_estimate(spec, nmax, &default_s_grid(spec.alphabet().len()), margin)?;
    checks.push(info("dimension", num(dim.estimate)));
    checks.push(hausdorff_identity(spec, nmax, margin, &[0.5, last.upper, 1.0])?);
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let spec = load(&a.spec)?;
    let codec = codec(&a.codec)?;
    if !(a.slack > 0.0) {
        return Err(Failure::Usage(format!("slack must be positive, got {}", a.slack)));
    }
    let mut checks = vec![full_shift_identity()?];
    match spec.dim() {
        1 => verify_1d(&spec, &a, codec, &mut checks)?,
        2 => verify_2d(&spec, &a, &mut checks)?,
        d => return Err(Failure::Compute(format!("verify supports d = 1 or 2, got d={d}"))),
    }
    checks.extend(reference_points(codec, a.seed)?);

    let mut out = String::from("check,value,target,status\n");
    for c in &checks {
        let status = match c.pass {
            None => "INFO",
            Some(true) => "PASS",
            Some(false) => "FAIL",
        };
        writeln!(out, "{},{},{},{status}", c.name, c.value, c.target).unwrap();
    }
    let failed: BTreeSet<&str> = checks.iter().filter(|c| c.pass == Some(false)).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(out)
    } else {
        let names: Vec<&str> = failed.into_iter().collect();
        Err(Failure::Rejected { output: out, message: format!("verification failed: {}", names.join(" ")) })
    }
}
