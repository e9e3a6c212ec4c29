//! Subshifts of finite type: specification, admissible-pattern enumeration and
//! counting over boxes, entropy rate series, and transfer-matrix entropy for
//! one-dimensional shifts and two-dimensional strips.
//!
//! Counts are of *locally admissible* patterns: no translate of a forbidden
//! pattern fits inside the counted window. With a positive `margin` the window
//! must additionally extend to a locally admissible pattern on the box grown by
//! `margin`. For `d = 1` and a margin at least the forbidden extent these are
//! exactly the globally admissible counts; for `d >= 2` they are upper bounds.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{BoxDomain, GroupSpec, GroupVariant, Pattern, Point, Symbol};
use crate::spectral;

const RESERVED: &[char] = &[',', '=', '(', ')', '#', ':'];

/// Interned symbol names; indices are dense `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(symbols: I) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        if symbols.len() > usize::from(Symbol::MAX) {
            return Err(Error::InvalidAlphabet(format!("too many symbols ({})", symbols.len())));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c)) {
                return Err(Error::InvalidAlphabet(format!("bad symbol {s:?}")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// Symbols `"0"`, `"1"`, ... `"k-1"`.
    pub fn numeric(k: usize) -> Result<Self> {
        Alphabet::new((0..k).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.symbols[usize::from(s)]
    }

    pub fn index(&self, name: &str) -> Option<Symbol> {
        self.symbols.iter().position(|s| s == name).map(|i| i as Symbol)
    }

    pub fn names(&self) -> &[String] {
        &self.symbols
    }

    /// `ceil(log2 |A|)`
    pub fn bits_per_symbol(&self) -> u32 {
        (self.len() as u64).next_power_of_two().trailing_zeros()
    }
}

/// A subshift of finite type: the points of `A^G` avoiding every translate
/// of every forbidden pattern.
///
/// Forbidden patterns are stored translated so that their least corner is
/// the origin; only their shape matters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftSpec {
    alphabet: Alphabet,
    group: GroupSpec,
    forbidden: Vec<Pattern>,
}

impl SftSpec {
    pub fn new(alphabet: Alphabet, group: GroupSpec, forbidden: Vec<Pattern>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(forbidden.len());
        for (index, p) in forbidden.into_iter().enumerate() {
            let invalid = |reason: String| Error::InvalidForbidden { index, reason };
            let Some((lo, _)) = p.bounding_box() else {
                return Err(invalid("empty domain".into()));
            };
            if let Some((cell, _)) = p.cells().find(|(c, _)| c.len() != group.dim()) {
                return Err(invalid(format!("cell {cell:?} does not have {} coordinates", group.dim())));
            }
            if let Some(s) = p.symbols().find(|&s| usize::from(s) >= alphabet.len()) {
                return Err(invalid(format!("symbol index {s} outside alphabet")));
            }
            normalized.push(Pattern::from_cells(
                p.cells().map(|(c, s)| (c.iter().zip(&lo).map(|(a, b)| a - b).collect(), s)),
            ));
        }
        Ok(SftSpec { alphabet, group, forbidden: normalized })
    }

    pub fn full_shift(alphabet: Alphabet, group: GroupSpec) -> Self {
        SftSpec { alphabet, group, forbidden: Vec::new() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.group.dim()
    }

    pub fn forbidden(&self) -> &[Pattern] {
        &self.forbidden
    }

    /// Largest extent of a forbidden pattern along `axis` (0 when nothing is forbidden).
    pub fn extent(&self, axis: usize) -> usize {
        self.forbidden.iter().map(|p| pattern_extent(p, axis)).max().unwrap_or(0)
    }

    /// True when `p` contains no translate of a forbidden pattern.
    pub fn is_locally_admissible(&self, p: &Pattern) -> bool {
        let Some((lo, hi)) = p.bounding_box() else {
            return true;
        };
        !self.forbidden.iter().any(|f| {
            placements(f, &lo, &hi).any(|g| {
                f.cells().all(|(h, s)| {
                    let at: Point = h.iter().zip(&g).map(|(a, b)| a + b).collect();
                    p.get(&at) == Some(s)
                })
            })
        })
    }
}

fn pattern_extent(p: &Pattern, axis: usize) -> usize {
    p.bounding_box().map_or(0, |(lo, hi)| (hi[axis] - lo[axis] + 1) as usize)
}

/// Offsets `g` with `g + dom(f)` inside the window `[lo, hi]`, in lexicographic order.
/// `f` must be normalized to least corner 0.
fn placements<'a>(f: &Pattern, lo: &'a [i64], hi: &'a [i64]) -> impl Iterator<Item = Point> + 'a {
    let (_, fhi) = f.bounding_box().expect("forbidden patterns are nonempty");
    let upper: Vec<i64> = hi.iter().zip(&fhi).map(|(h, e)| h - e).collect();
    let empty = lo.iter().zip(&upper).any(|(l, u)| l > u);
    let mut next = (!empty).then(|| lo.to_vec());
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for axis in (0..succ.len()).rev() {
            if succ[axis] < upper[axis] {
                succ[axis] += 1;
                next = Some(succ);
                break;
            }
            succ[axis] = lo[axis];
        }
        Some(current)
    })
}

/// A rectangular region `[lo, hi]` (inclusive per axis).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub lo: Point,
    pub hi: Point,
}

impl Window {
    pub fn new(lo: Point, hi: Point) -> Self {
        assert_eq!(lo.len(), hi.len(), "window corners must share a dimension");
        Window { lo, hi }
    }

    fn of_box(b: &BoxDomain) -> Option<Self> {
        let (lo, hi) = b.bounds()?;
        let d = b.group().dim();
        Some(Window::new(vec![lo; d], vec![hi; d]))
    }

    fn grown(&self, margin: i64, variant: GroupVariant) -> Self {
        let floor = |c: i64| if variant == GroupVariant::N { c.max(0) } else { c };
        Window::new(
            self.lo.iter().map(|&c| floor(c - margin)).collect(),
            self.hi.iter().map(|&c| c + margin).collect(),
        )
    }

    pub fn size(&self) -> u64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l + 1).max(0) as u64).product()
    }

    fn contains(&self, p: &[i64]) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(c, (l, h))| l <= c && c <= h)
    }

    fn flat(&self, p: &[i64]) -> usize {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .fold(0usize, |acc, (c, (l, h))| acc * (h - l + 1) as usize + (c - l) as usize)
    }

    fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let empty = self.lo.iter().zip(&self.hi).any(|(l, h)| l > h);
        let mut next = (!empty).then(|| self.lo.clone());
        std::iter::from_fn(move || {
            let current = next.take()?;
            let mut succ = current.clone();
            for axis in (0..succ.len()).rev() {
                if succ[axis] < self.hi[axis] {
                    succ[axis] += 1;
                    next = Some(succ);
                    break;
                }
                succ[axis] = self.lo[axis];
            }
            Some(current)
        })
    }
}

type Placement = Box<[(u32, Symbol)]>;

/// Backtracking problem: cells of an inner window searched in lexicographic
/// order, followed by the remaining cells of an outer window that only need
/// to admit one completion.
struct Search {
    alphabet: usize,
    inner_len: usize,
    total_len: usize,
    /// Placements indexed by the search position of their last cell.
    checks: Vec<Vec<Placement>>,
    inner_points: Vec<Point>,
    /// Inner cells touched by no placement; each multiplies the count by `|A|`.
    free_inner: u64,
}

impl Search {
    fn new(spec: &SftSpec, inner: &Window, outer: &Window, factor_free: bool) -> Self {
        let mut raw: Vec<Vec<(usize, Symbol)>> = Vec::new();
        let mut touched = vec![false; outer.size() as usize];
        for f in &spec.forbidden {
            for g in placements(f, &outer.lo, &outer.hi) {
                let cells: Vec<(usize, Symbol)> = f
                    .cells()
                    .map(|(h, s)| {
                        let at: Point = h.iter().zip(&g).map(|(a, b)| a + b).collect();
                        (outer.flat(&at), s)
                    })
                    .collect();
                cells.iter().for_each(|&(c, _)| touched[c] = true);
                raw.push(cells);
            }
        }

        let mut position = vec![usize::MAX; touched.len()];
        let mut inner_points = Vec::new();
        let mut free_inner = 0u64;
        for p in inner.points() {
            let c = outer.flat(&p);
            if factor_free && !touched[c] {
                free_inner += 1;
            } else {
                position[c] = inner_points.len();
                inner_points.push(p);
            }
        }
        let inner_len = inner_points.len();
        let mut total_len = inner_len;
        for p in outer.points().filter(|p| !inner.contains(p)) {
            let c = outer.flat(&p);
            if touched[c] {
                position[c] = total_len;
                total_len += 1;
            }
        }

        let mut checks: Vec<Vec<Placement>> = vec![Vec::new(); total_len];
        for cells in raw {
            let mapped: Placement = cells.iter().map(|&(c, s)| (position[c] as u32, s)).collect();
            let last = mapped.iter().map(|&(q, _)| q as usize).max().expect("nonempty placement");
            checks[last].push(mapped);
        }
        Search {
            alphabet: spec.alphabet.len(),
            inner_len,
            total_len,
            checks,
            inner_points,
            free_inner,
        }
    }

    fn consistent(&self, assign: &[Symbol], pos: usize) -> bool {
        self.checks[pos].iter().all(|pl| pl.iter().any(|&(q, s)| assign[q as usize] != s))
    }

    /// Whether the outer cells admit at least one consistent completion.
    fn completes(&self, assign: &mut [Symbol], next: &mut [usize]) -> bool {
        let start = self.inner_len;
        if self.total_len == start {
            return true;
        }
        next[start..self.total_len].iter_mut().for_each(|x| *x = 0);
        let mut pos = start;
        loop {
            if next[pos] == self.alphabet {
                next[pos] = 0;
                if pos == start {
                    return false;
                }
                pos -= 1;
                continue;
            }
            assign[pos] = next[pos] as Symbol;
            next[pos] += 1;
            if self.consistent(assign, pos) {
                if pos + 1 == self.total_len {
                    return true;
                }
                pos += 1;
            }
        }
    }

    fn cursor(&self, prefix: &[Symbol], end: usize, complete: bool) -> Cursor {
        let mut assign = vec![0; self.total_len];
        assign[..prefix.len()].copy_from_slice(prefix);
        Cursor {
            assign,
            next: vec![0; self.total_len],
            base: prefix.len(),
            end,
            complete,
            pos: prefix.len(),
            started: false,
            done: false,
        }
    }

    fn count_from(&self, prefix: &[Symbol]) -> u64 {
        let mut cursor = self.cursor(prefix, self.inner_len, true);
        let mut leaves = 0u64;
        while cursor.advance(self) {
            leaves += 1;
        }
        leaves
    }

    fn prefixes(&self, depth: usize) -> Vec<Vec<Symbol>> {
        let depth = depth.min(self.inner_len);
        let mut cursor = self.cursor(&[], depth, false);
        let mut out = Vec::new();
        while cursor.advance(self) {
            out.push(cursor.assign[..depth].to_vec());
        }
        out
    }
}

/// Depth-first state over positions `base..end`.
struct Cursor {
    assign: Vec<Symbol>,
    next: Vec<usize>,
    base: usize,
    end: usize,
    complete: bool,
    pos: usize,
    started: bool,
    done: bool,
}

impl Cursor {
    /// Moves to the next consistent assignment of positions `< end`.
    fn advance(&mut self, s: &Search) -> bool {
        if self.done {
            return false;
        }
        if self.base == self.end {
            self.done = true;
            return !self.complete || s.completes(&mut self.assign, &mut self.next);
        }
        if self.started {
            self.pos = self.end - 1;
        } else {
            self.started = true;
            self.pos = self.base;
        }
        loop {
            let p = self.pos;
            if self.next[p] == s.alphabet {
                self.next[p] = 0;
                if p == self.base {
                    self.done = true;
                    return false;
                }
                self.pos -= 1;
                continue;
            }
            self.assign[p] = self.next[p] as Symbol;
            self.next[p] += 1;
            if s.consistent(&self.assign, p) {
                if p + 1 == self.end {
                    if !self.complete || s.completes(&mut self.assign, &mut self.next) {
                        return true;
                    }
                } else {
                    self.pos += 1;
                }
            }
        }
    }
}

fn check_box_index(n: i64) -> Result<()> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!("box index must be nonnegative, got {n}")));
    }
    Ok(())
}

fn check_margin(margin: i64) -> Result<()> {
    if margin < 0 {
        return Err(Error::InvalidArgument(format!("margin must be nonnegative, got {margin}")));
    }
    Ok(())
}

/// Streaming enumeration of admissible patterns on a window.
pub struct PatternIter {
    search: Search,
    cursor: Cursor,
}

impl Iterator for PatternIter {
    type Item = Pattern;

    fn next(&mut self) -> Option<Pattern> {
        if !self.cursor.advance(&self.search) {
            return None;
        }
        Some(Pattern::from_cells(
            self.search.inner_points.iter().cloned().zip(self.cursor.assign.iter().copied()),
        ))
    }
}

/// Patterns on `F_n` that are locally admissible and, for `margin > 0`, extend
/// to a locally admissible pattern on `F_{n+margin}`. Lexicographic order.
pub fn enumerate_patterns(spec: &SftSpec, n: i64, margin: i64) -> Result<PatternIter> {
    check_box_index(n)?;
    let inner = Window::of_box(&spec.group.box_domain(n)).expect("n >= 0");
    enumerate_window(spec, &inner, margin)
}

/// [`enumerate_patterns`] over an arbitrary rectangle.
pub fn enumerate_window(spec: &SftSpec, window: &Window, margin: i64) -> Result<PatternIter> {
    check_margin(margin)?;
    check_window(spec, window)?;
    let outer = window.grown(margin, spec.group.variant());
    let search = Search::new(spec, window, &outer, false);
    let cursor = search.cursor(&[], search.inner_len, true);
    Ok(PatternIter { search, cursor })
}

fn check_window(spec: &SftSpec, window: &Window) -> Result<()> {
    if window.lo.len() != spec.dim() {
        return Err(Error::Arity { expected: spec.dim(), found: window.lo.len() });
    }
    if spec.group.variant() == GroupVariant::N && window.lo.iter().any(|&c| c < 0) {
        return Err(Error::TranslateOutOfMonoid);
    }
    Ok(())
}

/// Number of admissible patterns on a rectangle, single-threaded.
pub fn count_window(spec: &SftSpec, window: &Window, margin: i64) -> Result<BigUint> {
    count_window_with(spec, window, margin, 1)
}

/// Number of admissible patterns on a rectangle, splitting the search over
/// `threads` workers. The result does not depend on `threads`.
pub fn count_window_with(spec: &SftSpec, window: &Window, margin: i64, threads: usize) -> Result<BigUint> {
    check_margin(margin)?;
    check_window(spec, window)?;
    let outer = window.grown(margin, spec.group.variant());
    let search = Search::new(spec, window, &outer, true);
    let leaves: BigUint = if threads <= 1 {
        BigUint::from(search.count_from(&[]))
    } else {
        // enough prefixes that workers stay busy
        let target = 8 * threads;
        let mut depth = 0;
        let mut width = 1usize;
        while depth < search.inner_len && width < target {
            width = width.saturating_mul(search.alphabet);
            depth += 1;
        }
        let prefixes = search.prefixes(depth);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        let partial: Vec<u64> =
            pool.install(|| prefixes.par_iter().map(|p| search.count_from(p)).collect());
        partial.into_iter().map(BigUint::from).sum()
    };
    Ok(leaves * BigUint::from(spec.alphabet.len()).pow(search.free_inner as u32))
}

/// One point of an entropy series.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    pub n: i64,
    pub box_size: u64,
    pub count: BigUint,
    /// `log2(count) / |F_n|`
    pub rate: f64,
}

/// `log2` of an arbitrary-precision integer, keeping the top 64 bits.
pub fn log2_big(x: &BigUint) -> f64 {
    if let Some(small) = x.to_u64() {
        return (small as f64).log2();
    }
    let shift = x.bits() - 64;
    let top = (x >> shift).to_u64().expect("64 bits remain");
    (top as f64).log2() + shift as f64
}

/// `log2(count) / size`. A count that is a perfect `size`-th power `b^size`
/// gets exactly `log2(b)`, so full-shift rates equal `log2 |A|` bit for bit.
pub fn rate_of(count: &BigUint, size: u64) -> f64 {
    if size == 0 {
        return 0.0;
    }
    if size <= 4096 {
        let root = count.nth_root(size as u32);
        if root.pow(size as u32) == *count {
            return log2_big(&root);
        }
    }
    log2_big(count) / size as f64
}

/// Admissible patterns on `F_n`; see [`enumerate_patterns`].
pub fn count_patterns(spec: &SftSpec, n: i64, margin: i64) -> Result<CountRecord> {
    count_patterns_with(spec, n, margin, 1)
}

/// [`count_patterns`] with the search split over `threads` workers.
pub fn count_patterns_with(spec: &SftSpec, n: i64, margin: i64, threads: usize) -> Result<CountRecord> {
    check_box_index(n)?;
    let b = spec.group.box_domain(n);
    let window = Window::of_box(&b).expect("n >= 0");
    let count = count_window_with(spec, &window, margin, threads)?;
    if count.is_zero() {
        return Err(Error::EmptySubshiftSuspected { n, margin });
    }
    let rate = rate_of(&count, b.size());
    Ok(CountRecord { n, box_size: b.size(), count, rate })
}

/// `C_{nk} <= C_n^{k^d}` for one pair of indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubmultiplicativityCheck {
    pub n: i64,
    pub k: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateSeries {
    pub records: Vec<CountRecord>,
    pub checks: Vec<SubmultiplicativityCheck>,
}

impl RateSeries {
    pub fn last(&self) -> &CountRecord {
        self.records.last().expect("series is nonempty")
    }

    pub fn violations(&self) -> impl Iterator<Item = &SubmultiplicativityCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Rates for `n = 0..=n_max` together with every submultiplicativity check in range.
pub fn entropy_series(spec: &SftSpec, n_max: i64, margin: i64) -> Result<RateSeries> {
    entropy_series_with(spec, n_max, margin, 1)
}

pub fn entropy_series_with(spec: &SftSpec, n_max: i64, margin: i64, threads: usize) -> Result<RateSeries> {
    check_box_index(n_max)?;
    let records = (0..=n_max)
        .map(|n| count_patterns_with(spec, n, margin, threads))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    for n in 1..=n_max {
        for k in 2..=n_max / n {
            let tiles = (k as u32).pow(spec.dim() as u32);
            let holds = records[(n * k) as usize].count <= records[n as usize].count.pow(tiles);
            checks.push(SubmultiplicativityCheck { n, k, holds });
        }
    }
    Ok(RateSeries { records, checks })
}

/// 0/1 matrix over admissible blocks; `matrix[i][j] = 1` iff block `j` may follow block `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferMatrix {
    /// Each state's symbols in lexicographic cell order.
    pub states: Vec<Vec<Symbol>>,
    pub matrix: Vec<Vec<u8>>,
    /// Number of columns (1-D: symbols) per state.
    pub block_len: usize,
}

impl TransferMatrix {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.matrix.iter().map(|row| row.iter().map(|&x| f64::from(x)).collect()).collect()
    }

    /// `1^T M^{steps} 1`, exactly.
    pub fn walk_count(&self, steps: usize) -> BigUint {
        let mut v: Vec<BigUint> = vec![BigUint::one(); self.len()];
        for _ in 0..steps {
            v = (0..self.len())
                .map(|i| {
                    self.matrix[i].iter().zip(&v).filter(|(&m, _)| m != 0).map(|(_, x)| x.clone()).sum()
                })
                .collect();
        }
        v.into_iter().sum()
    }
}

/// Transfer matrix over blocks of `k` consecutive columns, each column being
/// `column_height` cells tall (`None` for `d = 1`).
fn block_transfer_matrix(spec: &SftSpec, column_height: Option<usize>) -> Result<TransferMatrix> {
    let k = spec.extent(0).saturating_sub(1).max(1);
    let window = |cols: usize| match column_height {
        None => Window::new(vec![0], vec![cols as i64 - 1]),
        Some(h) => Window::new(vec![0, 0], vec![cols as i64 - 1, h as i64 - 1]),
    };
    let height = column_height.unwrap_or(1);
    let state_len = k * height;

    let mut states = Vec::new();
    let mut index = HashMap::new();
    for p in enumerate_window(spec, &window(k), 0)? {
        let s: Vec<Symbol> = p.symbols().collect();
        index.insert(s.clone(), states.len());
        states.push(s);
    }
    let mut matrix = vec![vec![0u8; states.len()]; states.len()];
    for p in enumerate_window(spec, &window(k + 1), 0)? {
        let s: Vec<Symbol> = p.symbols().collect();
        let from = index[&s[..state_len]];
        let to = index[&s[height..]];
        matrix[from][to] = 1;
    }
    Ok(TransferMatrix { states, matrix, block_len: k })
}

/// Transfer matrix of a one-dimensional SFT. States are the locally
/// admissible words of length `max(w - 1, 1)` for forbidden extent `w`.
pub fn transfer_matrix_1d(spec: &SftSpec) -> Result<TransferMatrix> {
    if spec.dim() != 1 {
        return Err(Error::NotOneDimensional(spec.dim()));
    }
    block_transfer_matrix(spec, None)
}

fn log2_radius(tm: &TransferMatrix, tol: f64) -> Result<f64> {
    if tm.is_empty() {
        return Err(Error::ZeroMatrix);
    }
    let radius = spectral::spectral_radius(&tm.to_f64(), tol)?;
    // a 0/1 matrix has spectral radius 0 or at least 1
    if radius < 0.5 {
        return Err(Error::ZeroMatrix);
    }
    Ok(radius.log2())
}

/// `log2` of the spectral radius of [`transfer_matrix_1d`].
pub fn entropy_exact_1d(spec: &SftSpec, tol: f64) -> Result<f64> {
    log2_radius(&transfer_matrix_1d(spec)?, tol)
}

/// Entropy bracket from a height-`width` horizontal strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripBracket {
    pub width: usize,
    /// `log2(λ_w) / w`
    pub upper: f64,
    /// `log2(λ_w) - log2(λ_{w-1})`, when the narrower strip is admissible.
    pub lower: Option<f64>,
}

/// Smallest strip width that can contain some forbidden pattern.
pub fn min_strip_width(spec: &SftSpec) -> usize {
    spec.forbidden.iter().map(|p| pattern_extent(p, 1)).min().unwrap_or(1).max(1)
}

/// Column transfer matrix of the strip `Z x {0..width-1}`.
pub fn strip_transfer_matrix(spec: &SftSpec, width: usize) -> Result<TransferMatrix> {
    if spec.dim() != 2 {
        return Err(Error::NotTwoDimensional(spec.dim()));
    }
    let min = min_strip_width(spec);
    if width < min {
        return Err(Error::StripTooNarrow { width, min });
    }
    block_transfer_matrix(spec, Some(width))
}

/// Strip brackets for a two-dimensional SFT. Free vertical boundaries make
/// every strip over-count, so `upper` bounds the entropy from above.
pub fn strip_entropy_bracket_2d(spec: &SftSpec, widths: &[usize], tol: f64) -> Result<Vec<StripBracket>> {
    if spec.dim() != 2 {
        return Err(Error::NotTwoDimensional(spec.dim()));
    }
    let mut cache: HashMap<usize, f64> = HashMap::new();
    let mut log_radius = |w: usize| -> Result<f64> {
        if let Some(&v) = cache.get(&w) {
            return Ok(v);
        }
        let v = log2_radius(&strip_transfer_matrix(spec, w)?, tol)?;
        cache.insert(w, v);
        Ok(v)
    };
    let min = min_strip_width(spec);
    widths
        .iter()
        .map(|&w| {
            let current = log_radius(w)?;
            let lower = if w > min { Some(current - log_radius(w - 1)?) } else { None };
            Ok(StripBracket { width: w, upper: current / w as f64, lower })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::*;

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a,b"]).is_err());
        assert!(Alphabet::new(["x y"]).is_err());
        let a = Alphabet::new(["a", "b", "c"]).unwrap();
        assert_eq!(a.index("c"), Some(2));
        assert_eq!(a.bits_per_symbol(), 2);
        assert_eq!(Alphabet::numeric(1).unwrap().bits_per_symbol(), 0);
    }

    #[test]
    fn spec_validation() {
        let a = Alphabet::numeric(2).unwrap();
        let g = group(GroupVariant::N, 1);
        let bad_symbol = Pattern::from_cells([(vec![0], 2)]);
        assert!(matches!(
            SftSpec::new(a.clone(), g, vec![bad_symbol]),
            Err(Error::InvalidForbidden { index: 0, .. })
        ));
        let bad_arity = Pattern::from_cells([(vec![0, 0], 1)]);
        assert!(SftSpec::new(a.clone(), g, vec![bad_arity]).is_err());
        assert!(SftSpec::new(a.clone(), g, vec![Pattern::new()]).is_err());
        let shifted = Pattern::from_cells([(vec![3], 1), (vec![4], 1)]);
        let spec = SftSpec::new(a, g, vec![shifted]).unwrap();
        assert_eq!(spec.forbidden()[0], Pattern::word(&[1, 1]));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_patterns(&full_shift(2, 1), 3, 0).unwrap().count(), 16);
        let golden: Vec<Pattern> = enumerate_patterns(&golden_mean(), 3, 0).unwrap().collect();
        assert_eq!(golden.len(), 8);
        assert!(golden.windows(2).all(|w| w[0] < w[1]), "lexicographic order");
        assert_eq!(golden[0], Pattern::word(&[0, 0, 0, 0]));
        assert_eq!(enumerate_patterns(&hard_squares(GroupVariant::N), 1, 0).unwrap().count(), 7);
    }

    #[test]
    fn counts_match_brute_force() {
        for spec in [golden_mean(), even_shift(), full_shift(3, 1)] {
            for n in 0..=8 {
                let expected = brute_force_count(&spec, n);
                assert_eq!(count_patterns(&spec, n, 0).unwrap().count, BigUint::from(expected));
            }
        }
        let hs = hard_squares(GroupVariant::N);
        assert_eq!(count_patterns(&hs, 1, 0).unwrap().count, BigUint::from(brute_force_count(&hs, 1)));
        assert_eq!(count_patterns(&hs, 2, 0).unwrap().count, BigUint::from(63u32));
        let hz = hard_squares(GroupVariant::Z);
        assert_eq!(count_patterns(&hz, 1, 0).unwrap().count, BigUint::from(63u32));
    }

    #[test]
    fn golden_fibonacci() {
        let record = count_patterns(&golden_mean(), 18, 0).unwrap();
        assert_eq!(record.count, BigUint::from(10946u32));
        assert_eq!(record.box_size, 19);
    }

    #[test]
    fn full_shift_rate_is_one() {
        let record = count_patterns(&full_shift(2, 1), 9, 2).unwrap();
        assert_eq!(record.count, BigUint::from(1024u32));
        assert_eq!(record.rate, 1.0);
    }

    #[test]
    fn perfect_power_rates_are_exact() {
        for k in 2u32..=5 {
            for size in 1..=30u64 {
                assert_eq!(rate_of(&BigUint::from(k).pow(size as u32), size), f64::from(k).log2());
            }
        }
        assert!((rate_of(&BigUint::from(10946u32), 19) - 10946f64.log2() / 19.0).abs() < 1e-15);
    }

    #[test]
    fn free_cells_factor_out() {
        // 4^25 patterns; only reachable by factoring
        let spec = full_shift(4, 2);
        let spec = SftSpec::full_shift(spec.alphabet().clone(), group(GroupVariant::Z, 2));
        let record = count_patterns(&spec, 2, 2).unwrap();
        assert_eq!(record.count, BigUint::from(4u32).pow(25));
        assert_eq!(record.rate, 2.0);
    }

    #[test]
    fn margin_prunes_dead_ends() {
        // only 0->0, 0->1, 1->2 are allowed, so 2 is a dead end
        let a = Alphabet::numeric(3).unwrap();
        let g = group(GroupVariant::N, 1);
        let forbid: Vec<Pattern> = [[0, 2], [1, 0], [1, 1], [2, 0], [2, 1], [2, 2]]
            .iter()
            .map(|w| Pattern::word(w))
            .collect();
        let spec = SftSpec::new(a, g, forbid).unwrap();
        let loose = count_patterns(&spec, 3, 0).unwrap().count;
        let tight = count_patterns(&spec, 3, 1).unwrap().count;
        assert!(tight < loose);
        // 0000, 0001, 0012 are locally admissible; 0012 cannot be extended
        assert_eq!(loose, BigUint::from(3u32));
        assert_eq!(tight, BigUint::from(2u32));
    }

    #[test]
    fn empty_subshift_reported() {
        assert!(matches!(
            count_patterns(&empty_shift(), 0, 0),
            Err(Error::EmptySubshiftSuspected { n: 0, margin: 0 })
        ));
        assert!(entropy_series(&empty_shift(), 3, 0).is_err());
        assert_eq!(entropy_exact_1d(&empty_shift(), 1e-12), Err(Error::ZeroMatrix));
    }

    #[test]
    fn parallel_counts_are_identical() {
        for spec in [golden_mean(), hard_squares(GroupVariant::N), even_shift()] {
            let n = if spec.dim() == 1 { 14 } else { 3 };
            let serial = count_patterns(&spec, n, 2).unwrap();
            for threads in [2, 3, 8] {
                assert_eq!(count_patterns_with(&spec, n, 2, threads).unwrap(), serial);
            }
        }
    }

    #[test]
    fn series_examples() {
        let single = SftSpec::full_shift(Alphabet::numeric(1).unwrap(), group(GroupVariant::N, 1));
        assert!(entropy_series(&single, 5, 0).unwrap().records.iter().all(|r| r.rate == 0.0));
        let full = entropy_series(&full_shift(2, 1), 5, 0).unwrap();
        assert!(full.records.iter().all(|r| r.rate == 1.0));
        let golden = entropy_series(&golden_mean(), 18, 2).unwrap();
        assert!((golden.last().rate - 10946f64.log2() / 19.0).abs() < 1e-15);
        assert!(golden.records.windows(2).skip(1).all(|w| w[1].rate < w[0].rate));
        assert!(!golden.checks.is_empty());
        assert_eq!(golden.violations().count(), 0);
    }

    #[test]
    fn transfer_matrix_examples() {
        let tm = transfer_matrix_1d(&golden_mean()).unwrap();
        assert_eq!(tm.states, vec![vec![0], vec![1]]);
        assert_eq!(tm.matrix, vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(transfer_matrix_1d(&full_shift(2, 1)).unwrap().matrix, vec![vec![1, 1], vec![1, 1]]);
        let single = SftSpec::full_shift(Alphabet::numeric(1).unwrap(), group(GroupVariant::N, 1));
        assert_eq!(transfer_matrix_1d(&single).unwrap().matrix, vec![vec![1]]);
        assert_eq!(transfer_matrix_1d(&hard_squares(GroupVariant::Z)), Err(Error::NotOneDimensional(2)));
    }

    #[test]
    fn transfer_powers_match_brute_force() {
        // includes a pattern of extent 3 so that states are words of length 2
        let a = Alphabet::numeric(2).unwrap();
        let spec = SftSpec::new(
            a,
            group(GroupVariant::N, 1),
            vec![Pattern::word(&[1, 0, 1]), Pattern::from_cells([(vec![0], 1), (vec![2], 1)])],
        )
        .unwrap();
        for spec in [golden_mean(), even_shift(), spec] {
            let tm = transfer_matrix_1d(&spec).unwrap();
            for len in tm.block_len..=12 {
                let words = brute_force_count(&spec, len as i64 - 1);
                assert_eq!(tm.walk_count(len - tm.block_len), BigUint::from(words), "length {len}");
            }
        }
    }

    #[test]
    fn exact_entropy_examples() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((entropy_exact_1d(&golden_mean(), 1e-12).unwrap() - phi.log2()).abs() < 1e-9);
        assert!((entropy_exact_1d(&full_shift(2, 1), 1e-12).unwrap() - 1.0).abs() < 1e-9);
        let single = SftSpec::full_shift(Alphabet::numeric(1).unwrap(), group(GroupVariant::N, 1));
        assert!(entropy_exact_1d(&single, 1e-12).unwrap().abs() < 1e-9);
        assert!((entropy_exact_1d(&even_shift(), 1e-12).unwrap() - phi.log2()).abs() < 1e-9);
    }

    #[test]
    fn strip_examples() {
        let hs = hard_squares(GroupVariant::Z);
        let one = strip_entropy_bracket_2d(&hs, &[1], 1e-12).unwrap();
        assert!((one[0].upper - 0.6942419136306174).abs() < 1e-9);
        assert_eq!(one[0].lower, None);
        let full = SftSpec::full_shift(Alphabet::numeric(2).unwrap(), group(GroupVariant::Z, 2));
        let b = strip_entropy_bracket_2d(&full, &[1, 2], 1e-12).unwrap();
        assert!((b[1].upper - 1.0).abs() < 1e-9);
        assert!((b[1].lower.unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(strip_entropy_bracket_2d(&hs, &[0], 1e-12), Err(Error::StripTooNarrow { width: 0, min: 1 }));
        assert_eq!(strip_entropy_bracket_2d(&golden_mean(), &[1], 1e-12), Err(Error::NotTwoDimensional(1)));
    }

    #[test]
    fn local_admissibility_predicate() {
        let spec = golden_mean();
        assert!(spec.is_locally_admissible(&Pattern::word(&[0, 1, 0, 1])));
        assert!(!spec.is_locally_admissible(&Pattern::word(&[0, 1, 1])));
        assert!(spec.is_locally_admissible(&Pattern::new()));
    }
}
