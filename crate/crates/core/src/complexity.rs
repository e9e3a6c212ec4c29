//! Compression-based upper-bound proxies for the Kolmogorov complexity of
//! box restrictions `x|F_n`, the resulting rate series, and the limsup check
//! against entropy.
//!
//! Two codecs are available. [`ProxyCodec::Lz78`] is the LZ78 phrase-cost
//! model and backs [`proxy_complexity`]. [`ProxyCodec::Ctw`] is a
//! context-tree-weighting code length, which reaches the entropy rate of a
//! Markov source at much shorter lengths and is the default for rate series.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{GroupSpec, GroupVariant, Pattern, Symbol};
use crate::measure::{self, MarkovMeasure};

pub const DEFAULT_CTW_DEPTH: usize = 8;

/// Symbols of a box pattern in lexicographic cell order (row-major in 2-D).
pub fn serialize_pattern(p: &Pattern, group: GroupSpec) -> Result<Vec<Symbol>> {
    p.box_index(group).ok_or(Error::NotABoxDomain)?;
    Ok(p.symbols().collect())
}

/// `⌈log2 i⌉`, with 0 for `i ≤ 1`.
pub fn ceil_log2(i: u64) -> u32 {
    if i <= 1 {
        0
    } else {
        64 - (i - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProxyCodec {
    /// Phrase `i` of the LZ78 parse costs `⌈log2 i⌉ + ⌈log2 |A|⌉` bits; an
    /// unfinished final phrase counts as a phrase.
    Lz78,
    /// `⌈-log2 P_w⌉ + 2` bits, where `P_w` is the context-tree-weighting
    /// probability with KT(1/2) leaf estimators over contexts of up to
    /// `depth` preceding symbols (history padded with symbol 0).
    Ctw { depth: usize },
}

impl Default for ProxyCodec {
    fn default() -> Self {
        ProxyCodec::Ctw { depth: DEFAULT_CTW_DEPTH }
    }
}

impl fmt::Display for ProxyCodec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProxyCodec::Lz78 => write!(f, "lz78"),
            ProxyCodec::Ctw { depth } => write!(f, "ctw{depth}"),
        }
    }
}

impl std::str::FromStr for ProxyCodec {
    type Err = Error;

    /// Accepts `lz78`, `ctw` (default depth) and `ctwD`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lz78" => Ok(ProxyCodec::Lz78),
            "ctw" => Ok(ProxyCodec::default()),
            _ => s
                .strip_prefix("ctw")
                .and_then(|d| d.parse().ok())
                .map(|depth| ProxyCodec::Ctw { depth })
                .ok_or_else(|| Error::InvalidArgument(format!("unknown codec {s:?}"))),
        }
    }
}

impl ProxyCodec {
    /// Compressed size of `seq` in bits; 0 for the empty sequence.
    pub fn bits(&self, seq: &[Symbol], alphabet_size: usize) -> u64 {
        *self.prefix_bits(seq, alphabet_size).last().expect("prefix_bits is never empty")
    }

    /// `out[t]` is the compressed size of `seq[..t]`, for `t = 0..=len`.
    pub fn prefix_bits(&self, seq: &[Symbol], alphabet_size: usize) -> Vec<u64> {
        match *self {
            ProxyCodec::Lz78 => lz78_prefix_bits(seq, alphabet_size),
            ProxyCodec::Ctw { depth } => ctw_prefix_bits(seq, alphabet_size, depth),
        }
    }
}

fn lz78_prefix_bits(seq: &[Symbol], alphabet_size: usize) -> Vec<u64> {
    let symbol_bits = ceil_log2(alphabet_size as u64) as u64;
    // cost[c] is the cost of the first c phrases
    let mut cost = vec![0u64];
    let charge = |c: usize, cost: &mut Vec<u64>| {
        while cost.len() <= c {
            let i = cost.len() as u64;
            cost.push(cost[cost.len() - 1] + ceil_log2(i) as u64 + symbol_bits);
        }
        cost[c]
    };
    let mut trie: HashMap<(u32, Symbol), u32> = HashMap::new();
    let mut next_id = 1u32;
    let mut node = 0u32;
    let mut phrases = 0usize;
    let mut out = Vec::with_capacity(seq.len() + 1);
    out.push(0);
    for &s in seq {
        match trie.get(&(node, s)) {
            Some(&child) => node = child,
            None => {
                trie.insert((node, s), next_id);
                next_id += 1;
                phrases += 1;
                node = 0;
            }
        }
        let pending = usize::from(node != 0);
        out.push(charge(phrases + pending, &mut cost));
    }
    out
}

/// `log2(2^a + 2^b) - 1`
fn log2_mean(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2 - 1.0
}

struct ContextTree {
    alphabet_size: usize,
    depth: usize,
    counts: Vec<u32>,
    totals: Vec<u32>,
    log_pe: Vec<f64>,
    log_children: Vec<f64>,
    log_pw: Vec<f64>,
    children: Vec<u32>,
}

impl ContextTree {
    const NONE: u32 = u32::MAX;

    fn new(alphabet_size: usize, depth: usize) -> Self {
        let mut tree = ContextTree {
            alphabet_size,
            depth,
            counts: Vec::new(),
            totals: Vec::new(),
            log_pe: Vec::new(),
            log_children: Vec::new(),
            log_pw: Vec::new(),
            children: Vec::new(),
        };
        tree.add_node();
        tree
    }

    fn add_node(&mut self) -> u32 {
        let id = self.totals.len() as u32;
        self.counts.extend(std::iter::repeat_n(0, self.alphabet_size));
        self.children.extend(std::iter::repeat_n(Self::NONE, self.alphabet_size));
        self.totals.push(0);
        self.log_pe.push(0.0);
        self.log_children.push(0.0);
        self.log_pw.push(0.0);
        id
    }

    fn child(&mut self, node: u32, s: Symbol) -> u32 {
        let slot = node as usize * self.alphabet_size + s as usize;
        if self.children[slot] == Self::NONE {
            let id = self.add_node();
            self.children[slot] = id;
        }
        self.children[slot]
    }

    /// Codes `s` after `context` (most recent symbol first, length `depth`).
    fn update(&mut self, context: &[Symbol], s: Symbol) {
        let mut path = Vec::with_capacity(self.depth + 1);
        let mut node = 0u32;
        path.push(node);
        for &c in context {
            node = self.child(node, c);
            path.push(node);
        }
        let half_m = self.alphabet_size as f64 / 2.0;
        let mut child_delta = 0.0;
        for (d, &node) in path.iter().enumerate().rev() {
            let i = node as usize;
            let slot = i * self.alphabet_size + s as usize;
            self.log_pe[i] += ((self.counts[slot] as f64 + 0.5) / (self.totals[i] as f64 + half_m)).log2();
            self.counts[slot] += 1;
            self.totals[i] += 1;
            let old = self.log_pw[i];
            self.log_pw[i] = if d == self.depth {
                self.log_pe[i]
            } else {
                self.log_children[i] += child_delta;
                log2_mean(self.log_pe[i], self.log_children[i])
            };
            child_delta = self.log_pw[i] - old;
        }
    }
}

fn ctw_prefix_bits(seq: &[Symbol], alphabet_size: usize, depth: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(seq.len() + 1);
    out.push(0);
    let mut tree = ContextTree::new(alphabet_size.max(1), depth);
    let mut context = vec![0 as Symbol; depth];
    for &s in seq {
        tree.update(&context, s);
        // an arithmetic coder realizes -log2 P within 2 bits
        out.push((-tree.log_pw[0]).max(0.0).ceil() as u64 + 2);
        if depth > 0 {
            context.rotate_right(1);
            context[0] = s;
        }
    }
    out
}

/// LZ78 cost of a box pattern over an alphabet of `alphabet_size` symbols.
pub fn proxy_complexity(p: &Pattern, group: GroupSpec, alphabet_size: usize) -> Result<u64> {
    Ok(ProxyCodec::Lz78.bits(&serialize_pattern(p, group)?, alphabet_size))
}

/// A configuration observed only through its box restrictions.
pub trait PointSource {
    fn group(&self) -> GroupSpec;
    fn alphabet_size(&self) -> usize;
    /// `x|F_n`
    fn restrict(&self, n: i64) -> Result<Pattern>;
}

/// A point known on a finite box; restrictions beyond it are errors.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePoint {
    group: GroupSpec,
    alphabet_size: usize,
    pattern: Pattern,
    n: i64,
}

impl FinitePoint {
    pub fn new(pattern: Pattern, group: GroupSpec, alphabet_size: usize) -> Result<Self> {
        let n = pattern.box_index(group).ok_or(Error::NotABoxDomain)?;
        if pattern.symbols().any(|s| s as usize >= alphabet_size) {
            return Err(Error::InvalidArgument("pattern uses a symbol outside the alphabet".into()));
        }
        Ok(FinitePoint { group, alphabet_size, pattern, n })
    }

    /// A one-dimensional point on `N` of `length` symbols sampled from `mu`.
    pub fn sampled(mu: &MarkovMeasure, seed: u64, length: usize, alphabet_size: usize) -> Result<Self> {
        let group = GroupSpec::new(GroupVariant::N, 1)?;
        FinitePoint::new(measure::sample_point(mu, seed, length)?, group, alphabet_size)
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }
}

impl PointSource for FinitePoint {
    fn group(&self) -> GroupSpec {
        self.group
    }

    fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    fn restrict(&self, n: i64) -> Result<Pattern> {
        if n > self.n {
            return Err(Error::InvalidArgument(format!("point is only known on F_{}", self.n)));
        }
        let b = self.group.box_domain(n);
        Ok(self.pattern.restrict(|p| b.contains(p)))
    }
}

/// The point with every cell equal to `symbol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantPoint {
    pub group: GroupSpec,
    pub alphabet_size: usize,
    pub symbol: Symbol,
}

impl PointSource for ConstantPoint {
    fn group(&self) -> GroupSpec {
        self.group
    }

    fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    fn restrict(&self, n: i64) -> Result<Pattern> {
        Ok(Pattern::from_cells(self.group.box_domain(n).points().map(|p| (p, self.symbol))))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityRecord {
    pub n: i64,
    pub box_size: u64,
    pub bits: u64,
    /// `bits / |F_n|`, and 0 on the empty box.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityRateSeries {
    pub codec: ProxyCodec,
    pub records: Vec<ComplexityRecord>,
}

impl ComplexityRateSeries {
    pub fn last(&self) -> Option<&ComplexityRecord> {
        self.records.last()
    }
}

/// Rates for every `n = 0..=n_max`. Each restriction is compressed on its
/// own, so the cost is quadratic in `|F_{n_max}|`; use
/// [`complexity_rate_series_at`] with a sparse schedule for large boxes.
pub fn complexity_rate_series(
    source: &dyn PointSource,
    n_max: i64,
    codec: ProxyCodec,
) -> Result<ComplexityRateSeries> {
    if n_max < 0 {
        return Err(Error::InvalidArgument(format!("n_max must be nonnegative, got {n_max}")));
    }
    complexity_rate_series_at(source, &(0..=n_max).collect::<Vec<_>>(), codec)
}

/// `n = 2^j - 1` for `j ≥ 0` up to `n_max`, then `n_max` itself.
pub fn dyadic_schedule(n_max: i64) -> Vec<i64> {
    let mut schedule: Vec<i64> = (0..63).map(|j| (1i64 << j) - 1).take_while(|&n| n < n_max).collect();
    if n_max >= 0 {
        schedule.push(n_max);
    }
    schedule
}

/// Rates at the strictly increasing `schedule`, checking that consecutive
/// restrictions are nested.
pub fn complexity_rate_series_at(
    source: &dyn PointSource,
    schedule: &[i64],
    codec: ProxyCodec,
) -> Result<ComplexityRateSeries> {
    if schedule.windows(2).any(|w| w[0] >= w[1]) || schedule.first().is_some_and(|&n| n < -1) {
        return Err(Error::InvalidArgument("schedule must be strictly increasing from n ≥ -1".into()));
    }
    let group = source.group();
    let mut records = Vec::with_capacity(schedule.len());
    let mut previous: Option<(i64, Pattern)> = None;
    for &n in schedule {
        let pattern = source.restrict(n)?;
        let inconsistent = pattern.box_index(group) != Some(n)
            || previous.as_ref().is_some_and(|(_, p)| !p.is_subpattern_of(&pattern));
        if inconsistent {
            let smaller = previous.as_ref().map_or(n, |(m, _)| *m);
            return Err(Error::InconsistentPointSource { smaller, larger: n });
        }
        let bits = codec.bits(&serialize_pattern(&pattern, group)?, source.alphabet_size());
        let box_size = pattern.len() as u64;
        let rate = if box_size == 0 { 0.0 } else { bits as f64 / box_size as f64 };
        records.push(ComplexityRecord { n, box_size, bits, rate });
        previous = Some((n, pattern));
    }
    Ok(ComplexityRateSeries { codec, records })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimsupReport {
    pub passed: bool,
    pub max_rate: f64,
    /// `entropy + slack`
    pub bound: f64,
    pub tail: usize,
}

/// Passes iff the largest rate among the last `tail` records is at most
/// `entropy + slack`.
pub fn check_limsup_bound(
    series: &ComplexityRateSeries,
    entropy: f64,
    tail: usize,
    slack: f64,
) -> Result<LimsupReport> {
    if tail == 0 || tail > series.records.len() {
        return Err(Error::InvalidArgument(format!(
            "tail must be in 1..={}, got {tail}",
            series.records.len()
        )));
    }
    if !(slack > 0.0) {
        return Err(Error::InvalidArgument(format!("slack must be positive, got {slack}")));
    }
    let max_rate = series.records[series.records.len() - tail..]
        .iter()
        .map(|r| r.rate)
        .fold(f64::NEG_INFINITY, f64::max);
    let bound = entropy + slack;
    Ok(LimsupReport { passed: max_rate <= bound, max_rate, bound, tail })
}
