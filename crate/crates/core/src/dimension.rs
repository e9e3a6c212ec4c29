//! Hausdorff-dimension machinery under the standard metric: cylinder-cover
//! sums, the threshold estimator for the dimension, greedy Vitali packing of
//! a box by dictionary patterns, and the gap-symbol encoding built on a
//! packing.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::lattice::{cylinder_diameter, GroupSpec, Pattern, Point, Symbol};
use crate::sft::{count_patterns, enumerate_patterns, log2_big, SftSpec};

/// Flat-trend threshold for slopes of `log2 C_n - s|F_n|` per cell.
pub const FLAT_TOL: f64 = 1e-9;

/// Minimum size ratio between consecutive dictionary levels.
pub const LEVEL_SEPARATION: usize = 16;

/// `log2(Σ 2^{x_i})`, or `-inf` for an empty input.
fn log2_sum_exp2(values: impl IntoIterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp2()).sum::<f64>().log2()
}

/// A finite family of cylinders, each on a box `F_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderCover {
    group: GroupSpec,
    cylinders: Vec<Pattern>,
}

impl CylinderCover {
    pub fn new(group: GroupSpec, cylinders: Vec<Pattern>) -> Result<Self> {
        if cylinders.iter().any(|c| c.is_empty() || c.box_index(group).is_none()) {
            return Err(Error::NotABoxDomain);
        }
        Ok(CylinderCover { group, cylinders })
    }

    /// Every admissible pattern on `F_n`.
    pub fn uniform(spec: &SftSpec, n: i64, margin: i64) -> Result<Self> {
        CylinderCover::new(spec.group(), enumerate_patterns(spec, n, margin)?.collect())
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn cylinders(&self) -> &[Pattern] {
        &self.cylinders
    }

    /// True when every admissible pattern on `F_n` lies in some cylinder of the cover.
    pub fn covers_depth(&self, spec: &SftSpec, n: i64, margin: i64) -> Result<bool> {
        let depths: BTreeSet<i64> = self
            .cylinders
            .iter()
            .filter_map(|c| c.box_index(self.group))
            .filter(|&m| m <= n)
            .collect();
        let members: HashSet<&Pattern> = self.cylinders.iter().collect();
        for word in enumerate_patterns(spec, n, margin)? {
            let covered = depths.iter().any(|&m| {
                let b = self.group.box_domain(m);
                members.contains(&word.restrict(|p| b.contains(p)))
            });
            if !covered {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `log2 Σ_E diam(E)^s` over the cover, grouping cylinders of equal size.
pub fn hausdorff_sum(cover: &CylinderCover, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(format!("s must be nonnegative, got {s}")));
    }
    let mut by_exponent: BTreeMap<i64, u64> = BTreeMap::new();
    for c in &cover.cylinders {
        *by_exponent.entry(cylinder_diameter(c, cover.group)?.0).or_default() += 1;
    }
    Ok(log2_sum_exp2(by_exponent.iter().map(|(&e, &count)| (count as f64).log2() + s * e as f64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Up,
    Down,
    Flat,
    /// Too few boxes, or the two slopes disagree.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct STrend {
    pub s: f64,
    /// Per-cell slope of `log2 C_n - s|F_n|` from `⌊n_max/2⌋` to `n_max`.
    pub tail_slope: f64,
    /// The same slope from `n_max - 1` to `n_max`.
    pub last_slope: f64,
    pub trend: Trend,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimReport {
    pub n_max: i64,
    pub trends: Vec<STrend>,
    /// Largest `s` trending up and smallest `s` trending down, defaulting to
    /// `0` and `log2 |A|`.
    pub interval: (f64, f64),
    /// A flat `s` when one exists, otherwise the interval midpoint.
    pub estimate: f64,
}

/// 64 equally spaced points in `[0, log2 |A|]`.
pub fn default_s_grid(alphabet_size: usize) -> Vec<f64> {
    let top = (alphabet_size as f64).log2();
    (0..64).map(|i| top * i as f64 / 63.0).collect()
}

/// `s_grid` from `lo` to `hi` inclusive in steps of `step`.
pub fn s_grid_with_step(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| lo + step * i as f64).collect()
}

/// Classifies each `s` by the direction of `log2 C_n - s|F_n|` and reads the
/// dimension off as the transition point.
pub fn dim_estimate(spec: &SftSpec, n_max: i64, s_grid: &[f64], margin: i64) -> Result<DimReport> {
    let top = (spec.alphabet().len() as f64).log2();
    if n_max < 0 {
        return Err(Error::InvalidArgument(format!("n_max must be nonnegative, got {n_max}")));
    }
    if s_grid.is_empty()
        || s_grid.windows(2).any(|w| w[0] > w[1])
        || s_grid.iter().any(|&s| !(s >= 0.0 && s.is_finite()))
    {
        return Err(Error::InvalidArgument("s grid must be sorted, finite and nonnegative".into()));
    }
    let points: Vec<i64> = if n_max >= 1 {
        BTreeSet::from([n_max / 2, n_max - 1, n_max]).into_iter().collect()
    } else {
        vec![n_max]
    };
    let mut log_counts = BTreeMap::new();
    for &n in &points {
        let record = count_patterns(spec, n, margin)?;
        log_counts.insert(n, (log2_big(&record.count), record.box_size as f64));
    }
    let slope = |a: i64, b: i64, s: f64| {
        let (ca, sa) = log_counts[&a];
        let (cb, sb) = log_counts[&b];
        (cb - ca) / (sb - sa) - s
    };
    let trends: Vec<STrend> = s_grid
        .iter()
        .map(|&s| {
            if n_max < 1 {
                return STrend { s, tail_slope: f64::NAN, last_slope: f64::NAN, trend: Trend::Inconclusive };
            }
            let tail_slope = slope(n_max / 2, n_max, s);
            let last_slope = slope(n_max - 1, n_max, s);
            let trend = if tail_slope.abs() <= FLAT_TOL && last_slope.abs() <= FLAT_TOL {
                Trend::Flat
            } else if tail_slope > 0.0 && last_slope > 0.0 {
                Trend::Up
            } else if tail_slope < 0.0 && last_slope < 0.0 {
                Trend::Down
            } else {
                Trend::Inconclusive
            };
            STrend { s, tail_slope, last_slope, trend }
        })
        .collect();
    let hi = trends.iter().find(|t| t.trend == Trend::Down).map_or(top, |t| t.s);
    let lo = trends
        .iter()
        .filter(|t| t.trend == Trend::Up && t.s <= hi)
        .map(|t| t.s)
        .fold(0.0, f64::max);
    let estimate = trends
        .iter()
        .find(|t| t.trend == Trend::Flat)
        .map_or((lo + hi) / 2.0, |t| t.s);
    Ok(DimReport { n_max, trends, interval: (lo, hi), estimate })
}

/// Reference to a dictionary pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DictRef {
    pub level: usize,
    pub index: usize,
}

/// Levels of finite patterns, each translated so its bounding box starts at
/// the origin. Level `l + 1` patterns are at least [`LEVEL_SEPARATION`] times
/// larger than level `l` patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    dim: usize,
    levels: Vec<Vec<Pattern>>,
}

impl Dictionary {
    pub fn new(levels: Vec<Vec<Pattern>>) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidDictionary(msg));
        let Some(dim) = levels.iter().flatten().find_map(Pattern::dim) else {
            return invalid("no patterns".into());
        };
        let mut normalized = Vec::with_capacity(levels.len());
        for (l, level) in levels.into_iter().enumerate() {
            if level.is_empty() {
                return invalid(format!("level {l} is empty"));
            }
            let mut out = Vec::with_capacity(level.len());
            for p in level {
                let Some((lo, _)) = p.bounding_box() else {
                    return invalid(format!("level {l} contains an empty pattern"));
                };
                if lo.len() != dim {
                    return invalid(format!("level {l} mixes dimensions"));
                }
                out.push(Pattern::from_cells(p.cells().map(|(h, s)| {
                    (h.iter().zip(&lo).map(|(a, b)| a - b).collect(), s)
                })));
            }
            normalized.push(out);
        }
        let sizes = |level: &[Pattern]| {
            let min = level.iter().map(Pattern::len).min().unwrap();
            let max = level.iter().map(Pattern::len).max().unwrap();
            (min, max)
        };
        for l in 1..normalized.len() {
            let (_, below) = sizes(&normalized[l - 1]);
            let (above, _) = sizes(&normalized[l]);
            if above < LEVEL_SEPARATION * below {
                return invalid(format!(
                    "level {l} has a pattern of size {above}, less than {LEVEL_SEPARATION} x {below}"
                ));
            }
        }
        Ok(Dictionary { dim, levels: normalized })
    }

    /// One level.
    pub fn single(level: Vec<Pattern>) -> Result<Self> {
        Dictionary::new(vec![level])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> &[Vec<Pattern>] {
        &self.levels
    }

    pub fn get(&self, r: DictRef) -> Option<&Pattern> {
        self.levels.get(r.level)?.get(r.index)
    }

    fn max_extent(&self) -> i64 {
        self.levels
            .iter()
            .flatten()
            .filter_map(|p| p.bounding_box())
            .flat_map(|(_, hi)| hi)
            .max()
            .map_or(0, |h| h + 1)
    }
}

fn is_cube(p: &Pattern) -> bool {
    let Some((_, hi)) = p.bounding_box() else { return false };
    let side = hi[0] + 1;
    hi.iter().all(|&h| h + 1 == side) && p.len() as i64 == side.pow(hi.len() as u32)
}

fn shifted<'a>(p: &'a Pattern, g: &[i64]) -> impl Iterator<Item = (Point, Symbol)> + 'a {
    let g = g.to_vec();
    p.cells().map(move |(h, s)| (h.iter().zip(&g).map(|(a, b)| a + b).collect(), s))
}

/// A dictionary pattern translated by `offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub pattern: DictRef,
    pub offset: Point,
    /// Least cell of the translated piece.
    pub anchor: Point,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelDiagnostic {
    pub level: usize,
    /// Cells in the union of the level's matching candidates.
    pub candidate_cells: usize,
    pub selected: usize,
    pub selected_cells: usize,
    /// Every pattern at this level is a cube, so the greedy choice must
    /// cover at least `3^{-d}` of the candidate union.
    pub cubes: bool,
}

impl LevelDiagnostic {
    pub fn vitali_factor_holds(&self, dim: usize) -> bool {
        !self.cubes || self.selected_cells * 3usize.pow(dim as u32) >= self.candidate_cells
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackResult {
    pub n: i64,
    pub box_size: usize,
    /// Sorted by anchor.
    pub pieces: Vec<Piece>,
    pub covered_cells: usize,
    pub levels: Vec<LevelDiagnostic>,
}

impl PackResult {
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// `|⋃L| > (1 - ε)|F_n|`
    pub fn coverage_bound_met(&self, epsilon: f64) -> bool {
        self.covered_cells as f64 > (1.0 - epsilon) * self.box_size as f64
    }

    /// `|L| < ε|F_n|`
    pub fn count_bound_met(&self, epsilon: f64) -> bool {
        (self.pieces.len() as f64) < epsilon * self.box_size as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PackOutcome {
    Success(PackResult),
    /// The packing misses at least one bound; it is still a valid disjoint packing.
    Shortfall(PackResult),
}

impl PackOutcome {
    pub fn pack(&self) -> &PackResult {
        match self {
            PackOutcome::Success(p) | PackOutcome::Shortfall(p) => p,
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, PackOutcome::Success(_))
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")))
    }
}

/// Greedy disjoint packing of `target` (a pattern on `F_n`) by translates of
/// dictionary patterns agreeing with it, from the coarsest level down. Within
/// a level candidates are taken largest first, then by least anchor, then by
/// dictionary index.
pub fn vitali_pack(target: &Pattern, group: GroupSpec, dictionary: &Dictionary, epsilon: f64) -> Result<PackOutcome> {
    check_epsilon(epsilon)?;
    let n = target.box_index(group).ok_or(Error::NotABoxDomain)?;
    if dictionary.dim != group.dim() {
        return Err(Error::Arity { expected: group.dim(), found: dictionary.dim });
    }
    let b = group.box_domain(n);
    let extent = dictionary.max_extent();
    if extent as u64 > b.side() {
        return Err(Error::BoxTooSmall { n, extent });
    }
    let (lo, hi) = b.bounds().expect("n >= 0");
    let mut covered: HashSet<Point> = HashSet::new();
    let mut pieces = Vec::new();
    let mut levels = Vec::new();
    for (level, patterns) in dictionary.levels.iter().enumerate().rev() {
        let mut candidates = Vec::new();
        for (index, p) in patterns.iter().enumerate() {
            let (_, p_hi) = p.bounding_box().expect("nonempty");
            let ranges: Vec<(i64, i64)> = p_hi.iter().map(|&h| (lo, hi - h)).collect();
            let mut offset: Point = ranges.iter().map(|r| r.0).collect();
            'offsets: loop {
                let fits = shifted(p, &offset).all(|(q, s)| target.get(&q) == Some(s) && !covered.contains(&q));
                if fits {
                    let anchor = shifted(p, &offset).next().expect("nonempty").0;
                    let piece = Piece { pattern: DictRef { level, index }, offset: offset.clone(), anchor, size: p.len() };
                    candidates.push(piece);
                }
                for axis in (0..offset.len()).rev() {
                    if offset[axis] < ranges[axis].1 {
                        offset[axis] += 1;
                        continue 'offsets;
                    }
                    offset[axis] = ranges[axis].0;
                }
                break;
            }
        }
        let candidate_cells: HashSet<Point> = candidates
            .iter()
            .flat_map(|c| shifted(dictionary.get(c.pattern).unwrap(), &c.offset).map(|(q, _)| q).collect::<Vec<_>>())
            .collect();
        candidates.sort_by(|a, b| {
            b.size.cmp(&a.size).then_with(|| a.anchor.cmp(&b.anchor)).then_with(|| a.pattern.cmp(&b.pattern))
        });
        let (mut selected, mut selected_cells) = (0, 0);
        for c in candidates {
            let cells: Vec<Point> = shifted(dictionary.get(c.pattern).unwrap(), &c.offset).map(|(q, _)| q).collect();
            if cells.iter().any(|q| covered.contains(q)) {
                continue;
            }
            covered.extend(cells);
            selected += 1;
            selected_cells += c.size;
            pieces.push(c);
        }
        levels.push(LevelDiagnostic {
            level,
            candidate_cells: candidate_cells.len(),
            selected,
            selected_cells,
            cubes: patterns.iter().all(is_cube),
        });
    }
    pieces.sort_by(|a, b| a.anchor.cmp(&b.anchor));
    let pack = PackResult { n, box_size: b.size() as usize, pieces, covered_cells: covered.len(), levels };
    Ok(if pack.coverage_bound_met(epsilon) && pack.count_bound_met(epsilon) {
        PackOutcome::Success(pack)
    } else {
        PackOutcome::Shortfall(pack)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapSymbol {
    Blank,
    Symbol(Symbol),
}

/// A box pattern described by the symbols on its uncovered cells, blanks at
/// piece anchors and padding, and the dictionary patterns of its pieces in
/// anchor order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedPattern {
    pub n: i64,
    /// Length `m = 2⌊ε|F_n|⌋`.
    pub gap_symbols: Vec<GapSymbol>,
    pub words: Vec<DictRef>,
}

impl EncodedPattern {
    /// `m + Σ|σ_i|`, the description length in symbols.
    pub fn description_size(&self, dictionary: &Dictionary) -> usize {
        self.gap_symbols.len() + self.words.iter().filter_map(|&r| dictionary.get(r)).map(Pattern::len).sum::<usize>()
    }
}

/// `2⌊ε|F_n|⌋`
pub fn gap_length(epsilon: f64, box_size: usize) -> usize {
    2 * (epsilon * box_size as f64).floor() as usize
}

/// Encodes `target` through `pack`, which must meet both bounds for `epsilon`.
pub fn encode_pattern(
    target: &Pattern,
    group: GroupSpec,
    dictionary: &Dictionary,
    pack: &PackResult,
    epsilon: f64,
) -> Result<EncodedPattern> {
    check_epsilon(epsilon)?;
    let n = target.box_index(group).ok_or(Error::NotABoxDomain)?;
    if n != pack.n || !pack.coverage_bound_met(epsilon) || !pack.count_bound_met(epsilon) {
        return Err(Error::BoundsViolated);
    }
    let mut covered: HashSet<Point> = HashSet::new();
    let mut anchors = HashSet::new();
    for piece in &pack.pieces {
        let p = dictionary
            .get(piece.pattern)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown dictionary entry {:?}", piece.pattern)))?;
        for (q, s) in shifted(p, &piece.offset) {
            if target.get(&q) != Some(s) || !covered.insert(q) {
                return Err(Error::InvalidArgument("pack does not match the target".into()));
            }
        }
        anchors.insert(piece.anchor.clone());
    }
    let m = gap_length(epsilon, target.len());
    let mut gap_symbols = Vec::with_capacity(m);
    for (q, s) in target.cells() {
        if anchors.contains(q) {
            gap_symbols.push(GapSymbol::Blank);
        } else if !covered.contains(q) {
            gap_symbols.push(GapSymbol::Symbol(s));
        }
    }
    debug_assert!(gap_symbols.len() <= m, "|U| + k <= m follows from the bounds");
    gap_symbols.resize(m, GapSymbol::Blank);
    let words = pack.pieces.iter().map(|p| p.pattern).collect();
    Ok(EncodedPattern { n, gap_symbols, words })
}

/// Inverse of [`encode_pattern`]: walks `F_n` in lexicographic order, taking
/// the next gap symbol at each cell not yet filled and placing the next
/// dictionary word at each blank.
pub fn decode_pattern(enc: &EncodedPattern, dictionary: &Dictionary, group: GroupSpec) -> Result<Pattern> {
    let malformed = |msg: &str| Err(Error::MalformedEncoding(msg.to_string()));
    if enc.n < -1 {
        return malformed("box index below -1");
    }
    let b = group.box_domain(enc.n);
    let mut out = Pattern::new();
    let mut gaps = enc.gap_symbols.iter();
    let mut words = enc.words.iter();
    for q in b.points() {
        if out.get(&q).is_some() {
            continue;
        }
        match gaps.next() {
            None => return malformed("gap symbols run out before the box is filled"),
            Some(&GapSymbol::Symbol(s)) => {
                out.insert(q, s);
            }
            Some(GapSymbol::Blank) => {
                let Some(&r) = words.next() else {
                    return malformed("more anchors than dictionary words");
                };
                let Some(p) = dictionary.get(r) else {
                    return malformed("dictionary reference out of range");
                };
                let least = p.least_cell().expect("nonempty");
                let offset: Point = q.iter().zip(least).map(|(a, b)| a - b).collect();
                for (cell, s) in shifted(p, &offset) {
                    if !b.contains(&cell) || out.get(&cell).is_some() {
                        return malformed("dictionary word does not fit");
                    }
                    out.insert(cell, s);
                }
            }
        }
    }
    if words.next().is_some() {
        return malformed("unused dictionary words");
    }
    if gaps.any(|g| *g != GapSymbol::Blank) {
        return malformed("padding contains symbols");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GroupVariant;
    use crate::measure::{parry_measure, sample_symbols};
    use crate::sft::{entropy_exact_1d, entropy_series, transfer_matrix_1d};
    use crate::testing::*;
    use proptest::prelude::*;

    fn line() -> GroupSpec {
        group(GroupVariant::N, 1)
    }

    #[test]
    fn hausdorff_sum_examples() {
        let cover = CylinderCover::uniform(&full_shift(2, 1), 3, 0).unwrap();
        assert_eq!(cover.cylinders().len(), 16);
        assert_eq!(hausdorff_sum(&cover, 1.0).unwrap(), 0.0);
        assert_eq!(hausdorff_sum(&cover, 2.0).unwrap(), -4.0);
        let golden = CylinderCover::uniform(&golden_mean(), 18, 0).unwrap();
        let value = hausdorff_sum(&golden, 0.6942).unwrap().exp2();
        let oracle = 10946.0 * (-19.0 * 0.6942f64).exp2();
        assert!((value - oracle).abs() < 1e-9 && (value - 1.17).abs() < 0.01, "{value}");
        assert_eq!(hausdorff_sum(&CylinderCover::new(line(), vec![]).unwrap(), 1.0).unwrap(), f64::NEG_INFINITY);
        assert!(hausdorff_sum(&cover, -1.0).is_err());
    }

    #[test]
    fn hausdorff_sum_mixed_depths() {
        // [[0]] ∪ [[10]] ∪ [[11]] at s = 1: 1/2 + 1/4 + 1/4
        let cover = CylinderCover::new(
            line(),
            vec![Pattern::word(&[0]), Pattern::word(&[1, 0]), Pattern::word(&[1, 1])],
        )
        .unwrap();
        assert!(hausdorff_sum(&cover, 1.0).unwrap().abs() < 1e-15);
        let full = full_shift(2, 1);
        assert!(cover.covers_depth(&full, 4, 0).unwrap());
        let partial = CylinderCover::new(line(), vec![Pattern::word(&[0]), Pattern::word(&[1, 0])]).unwrap();
        assert!(!partial.covers_depth(&full, 4, 0).unwrap());
        assert!(CylinderCover::new(line(), vec![Pattern::from_cells([(vec![3], 0)])]).is_err());
    }

    #[test]
    fn dim_full_shift() {
        let report = dim_estimate(&full_shift(2, 1), 8, &[0.5, 1.0, 1.5], 0).unwrap();
        let trends: Vec<Trend> = report.trends.iter().map(|t| t.trend).collect();
        assert_eq!(trends, vec![Trend::Up, Trend::Flat, Trend::Down]);
        assert_eq!(report.estimate, 1.0);
        assert_eq!(report.interval, (0.5, 1.5));
    }

    #[test]
    fn dim_golden_mean_and_even_shift() {
        let grid = s_grid_with_step(0.0, 1.0, 0.01);
        for spec in [golden_mean(), even_shift()] {
            let report = dim_estimate(&spec, 18, &grid, 0).unwrap();
            let (lo, hi) = report.interval;
            assert!(lo >= 0.68 && hi <= 0.71 && hi - lo < 0.0101, "{lo} {hi}");
            let exact = entropy_exact_1d(&spec, 1e-12).unwrap();
            assert!(lo <= exact && exact <= hi);
            assert!((0.68..=0.71).contains(&report.estimate));
        }
    }

    #[test]
    fn dim_single_symbol_and_defaults() {
        let single = full_shift(1, 1);
        let report = dim_estimate(&single, 5, &default_s_grid(1), 0).unwrap();
        assert_eq!(report.estimate, 0.0);
        assert_eq!(default_s_grid(4).len(), 64);
        assert_eq!(default_s_grid(4)[63], 2.0);
        let report = dim_estimate(&golden_mean(), 0, &default_s_grid(2), 0).unwrap();
        assert!(report.trends.iter().all(|t| t.trend == Trend::Inconclusive));
        assert_eq!(report.interval, (0.0, 1.0));
        assert!(dim_estimate(&golden_mean(), 5, &[0.5, 0.2], 0).is_err());
        assert!(dim_estimate(&golden_mean(), 5, &[-0.5], 0).is_err());
    }

    #[test]
    fn dimension_never_exceeds_entropy_rate() {
        for spec in [golden_mean(), even_shift(), full_shift(3, 1)] {
            let grid = default_s_grid(spec.alphabet().len());
            let step = grid[1] - grid[0];
            let report = dim_estimate(&spec, 12, &grid, 0).unwrap();
            let rate = entropy_series(&spec, 12, 0).unwrap().last().rate;
            assert!(report.estimate <= rate + step);
        }
    }

    #[test]
    fn dictionary_validation() {
        assert!(Dictionary::new(vec![]).is_err());
        assert!(Dictionary::new(vec![vec![Pattern::word(&[0])], vec![]]).is_err());
        let small = vec![Pattern::word(&[0, 0])];
        let big = vec![Pattern::word(&[0; 31])];
        assert!(matches!(Dictionary::new(vec![small.clone(), big]), Err(Error::InvalidDictionary(_))));
        assert!(Dictionary::new(vec![small, vec![Pattern::word(&[0; 32])]]).is_ok());
        let shifted = Dictionary::single(vec![Pattern::from_cells([(vec![5], 1), (vec![6], 0)])]).unwrap();
        assert_eq!(shifted.levels()[0][0], Pattern::word(&[1, 0]));
    }

    fn subwords(target: &[Symbol], len: usize) -> Dictionary {
        let words: BTreeSet<Vec<Symbol>> = target.windows(len).map(<[Symbol]>::to_vec).collect();
        Dictionary::single(words.iter().map(|w| Pattern::word(w)).collect()).unwrap()
    }

    /// Maximum number of cells coverable by disjoint dictionary words, by
    /// trying every choice at every position.
    fn optimal_coverage(target: &[Symbol], dictionary: &Dictionary) -> usize {
        fn best(target: &[Symbol], words: &[Vec<Symbol>], start: usize) -> usize {
            if start >= target.len() {
                return 0;
            }
            let mut value = best(target, words, start + 1);
            for w in words {
                if target[start..].starts_with(w) {
                    value = value.max(w.len() + best(target, words, start + w.len()));
                }
            }
            value
        }
        let words: Vec<Vec<Symbol>> = dictionary.levels().iter().flatten().map(|p| p.symbols().collect()).collect();
        best(target, &words, 0)
    }

    #[test]
    fn pack_subwords_example() {
        for seed in 0..20 {
            let coin = crate::measure::MarkovMeasure::bernoulli(&[0.5, 0.5]).unwrap();
            let target = sample_symbols(&coin, seed, 10);
            let dictionary = subwords(&target, 2);
            let outcome = vitali_pack(&Pattern::word(&target), line(), &dictionary, 0.25).unwrap();
            let pack = outcome.pack();
            assert!(pack.covered_cells >= 8);
            assert_eq!(pack.covered_cells, optimal_coverage(&target, &dictionary));
            // five 2-cell pieces against ε|F_9| = 2.5
            assert!(!outcome.is_success() && !pack.count_bound_met(0.25));
        }
    }

    #[test]
    fn pack_whole_box() {
        let target = Pattern::word(&[1]);
        let outcome = vitali_pack(&target, line(), &Dictionary::single(vec![target.clone()]).unwrap(), 0.9).unwrap();
        let pack = outcome.pack();
        assert_eq!((pack.piece_count(), pack.covered_cells), (1, 1));
        // one piece is not fewer than ε|F_0| = 0.9
        assert!(pack.coverage_bound_met(0.9) && !pack.count_bound_met(0.9));
    }

    #[test]
    fn pack_zero_tiling_and_encoding() {
        let target = Pattern::word(&[0; 16]);
        let dictionary = Dictionary::single(vec![Pattern::word(&[0; 4])]).unwrap();
        let PackOutcome::Success(pack) = vitali_pack(&target, line(), &dictionary, 0.3).unwrap() else {
            panic!("exact tiling meets both bounds");
        };
        assert_eq!(pack.piece_count(), 4);
        assert_eq!(pack.covered_cells, 16);
        let anchors: Vec<Point> = pack.pieces.iter().map(|p| p.anchor.clone()).collect();
        assert_eq!(anchors, vec![vec![0], vec![4], vec![8], vec![12]]);

        let enc = encode_pattern(&target, line(), &dictionary, &pack, 0.3).unwrap();
        assert_eq!(enc.gap_symbols, vec![GapSymbol::Blank; 8]);
        assert_eq!(enc.words.len(), 4);
        assert_eq!(decode_pattern(&enc, &dictionary, line()).unwrap(), target);
        assert!(enc.description_size(&dictionary) as f64 <= 2.0 * 0.3 * 16.0 + 16.0);
    }

    #[test]
    fn empty_pack_rejected() {
        let target = Pattern::word(&[0, 1, 0, 1]);
        let dictionary = Dictionary::single(vec![Pattern::word(&[1, 1])]).unwrap();
        let outcome = vitali_pack(&target, line(), &dictionary, 0.3).unwrap();
        assert_eq!(outcome.pack().covered_cells, 0);
        assert!(!outcome.is_success());
        assert_eq!(
            encode_pattern(&target, line(), &dictionary, outcome.pack(), 0.3),
            Err(Error::BoundsViolated)
        );
    }

    #[test]
    fn pack_errors() {
        let dictionary = Dictionary::single(vec![Pattern::word(&[0; 4])]).unwrap();
        assert_eq!(
            vitali_pack(&Pattern::word(&[0; 3]), line(), &dictionary, 0.3),
            Err(Error::BoxTooSmall { n: 2, extent: 4 })
        );
        assert!(vitali_pack(&Pattern::word(&[0; 8]), line(), &dictionary, 1.0).is_err());
        let off_box = Pattern::from_cells([(vec![1], 0)]);
        assert_eq!(vitali_pack(&off_box, line(), &dictionary, 0.3), Err(Error::NotABoxDomain));
    }

    #[test]
    fn two_level_pack_in_the_plane() {
        let square = group(GroupVariant::Z, 2);
        let b = square.box_domain(4);
        let target = Pattern::on_box(&b, &[0; 81]);
        let cube = |side: i64| {
            Pattern::from_cells((0..side).flat_map(|x| (0..side).map(move |y| (vec![x, y], 0))))
        };
        let dictionary = Dictionary::new(vec![vec![cube(1)], vec![cube(4)]]).unwrap();
        let outcome = vitali_pack(&target, square, &dictionary, 0.5).unwrap();
        let pack = outcome.pack();
        assert_eq!(pack.covered_cells, 81);
        assert_eq!(pack.levels[0].selected, 4);
        assert!(pack.levels.iter().all(|l| l.vitali_factor_holds(2)));
        let pack = pack.clone();
        if pack.count_bound_met(0.5) {
            let enc = encode_pattern(&target, square, &dictionary, &pack, 0.5).unwrap();
            assert_eq!(decode_pattern(&enc, &dictionary, square).unwrap(), target);
        }
    }

    #[test]
    fn malformed_encodings() {
        let dictionary = Dictionary::single(vec![Pattern::word(&[0; 4])]).unwrap();
        let mut enc = EncodedPattern { n: 3, gap_symbols: vec![GapSymbol::Blank; 2], words: vec![DictRef { level: 0, index: 0 }] };
        assert!(decode_pattern(&enc, &dictionary, line()).is_ok());
        enc.words.push(DictRef { level: 0, index: 0 });
        assert!(matches!(decode_pattern(&enc, &dictionary, line()), Err(Error::MalformedEncoding(_))));
        enc.words = vec![DictRef { level: 0, index: 3 }];
        assert!(matches!(decode_pattern(&enc, &dictionary, line()), Err(Error::MalformedEncoding(_))));
        enc = EncodedPattern { n: 5, gap_symbols: vec![GapSymbol::Blank], words: vec![DictRef { level: 0, index: 0 }] };
        assert!(matches!(decode_pattern(&enc, &dictionary, line()), Err(Error::MalformedEncoding(_))));
        enc = EncodedPattern { n: 3, gap_symbols: vec![GapSymbol::Symbol(1), GapSymbol::Blank], words: vec![] };
        assert!(matches!(decode_pattern(&enc, &dictionary, line()), Err(Error::MalformedEncoding(_))));
    }

    fn golden_words_of_length(len: usize) -> Vec<Pattern> {
        enumerate_patterns(&golden_mean(), len as i64 - 1, 0).unwrap().collect()
    }

    proptest! {
        #[test]
        fn golden_round_trip(seed in any::<u64>()) {
            let mu = parry_measure(&transfer_matrix_1d(&golden_mean()).unwrap(), 1e-12).unwrap();
            let target = Pattern::word(&sample_symbols(&mu, seed, 16));
            let dictionary = Dictionary::single(golden_words_of_length(4)).unwrap();
            let PackOutcome::Success(pack) = vitali_pack(&target, line(), &dictionary, 0.3).unwrap() else {
                return Err(TestCaseError::fail("tiling dictionary must succeed"));
            };
            let enc = encode_pattern(&target, line(), &dictionary, &pack, 0.3).unwrap();
            prop_assert_eq!(decode_pattern(&enc, &dictionary, line()).unwrap(), target);
        }

        #[test]
        fn packs_are_disjoint_and_faithful(target in prop::collection::vec(0u16..2, 12..40), len in 2usize..5) {
            let dictionary = subwords(&target[..target.len() / 2], len);
            let pattern = Pattern::word(&target);
            let outcome = vitali_pack(&pattern, line(), &dictionary, 0.5).unwrap();
            let pack = outcome.pack();
            let mut seen = HashSet::new();
            for piece in &pack.pieces {
                for (q, s) in shifted(dictionary.get(piece.pattern).unwrap(), &piece.offset) {
                    prop_assert_eq!(pattern.get(&q), Some(s));
                    prop_assert!(seen.insert(q));
                }
            }
            prop_assert_eq!(seen.len(), pack.covered_cells);
            prop_assert!(pack.levels.iter().all(|l| l.vitali_factor_holds(1)));
            if pack.coverage_bound_met(0.5) && pack.count_bound_met(0.5) {
                let enc = encode_pattern(&pattern, line(), &dictionary, pack, 0.5).unwrap();
                prop_assert_eq!(decode_pattern(&enc, &dictionary, line()).unwrap(), pattern);
                prop_assert!(enc.description_size(&dictionary) as f64 <= target.len() as f64 * 2.0);
            }
        }
    }
}
