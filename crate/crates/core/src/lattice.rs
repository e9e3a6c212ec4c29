//! Lattice geometry shared by every other module: the group `N^d` or `Z^d`,
//! the exhausting boxes `F_n`, finite patterns and their translates, and
//! cylinder diameters under the standard metric.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A lattice point. Coordinates compare lexicographically, which is the
/// order every enumeration in this crate uses.
pub type Point = Vec<i64>;

/// Dense index of a symbol in its alphabet.
pub type Symbol = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupVariant {
    /// The additive monoid `N^d`.
    N,
    /// The additive group `Z^d`.
    Z,
}

impl fmt::Display for GroupVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupVariant::N => f.write_str("N"),
            GroupVariant::Z => f.write_str("Z"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    variant: GroupVariant,
    dim: usize,
}

impl GroupSpec {
    pub fn new(variant: GroupVariant, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(GroupSpec { variant, dim })
    }

    pub fn variant(&self) -> GroupVariant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The box `F_n`.
    pub fn box_domain(&self, n: i64) -> BoxDomain {
        BoxDomain::new(*self, n)
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.dim && (self.variant == GroupVariant::Z || p.iter().all(|&c| c >= 0))
    }

    fn check_arity(&self, p: &[i64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::Arity { expected: self.dim, found: p.len() });
        }
        Ok(())
    }
}

/// The box `F_n`: `{0..n}^d` over `N^d`, `{-n..n}^d` over `Z^d`, empty for `n = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoxDomain {
    group: GroupSpec,
    n: i64,
}

impl BoxDomain {
    /// # Panics
    /// Panics if `n < -1`.
    pub fn new(group: GroupSpec, n: i64) -> Self {
        assert!(n >= -1, "box index must be at least -1, got {n}");
        BoxDomain { group, n }
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// Inclusive coordinate range shared by every axis; `None` for `F_{-1}`.
    pub fn bounds(&self) -> Option<(i64, i64)> {
        if self.n < 0 {
            return None;
        }
        Some(match self.group.variant {
            GroupVariant::N => (0, self.n),
            GroupVariant::Z => (-self.n, self.n),
        })
    }

    /// Number of points per axis.
    pub fn side(&self) -> u64 {
        match self.bounds() {
            None => 0,
            Some((lo, hi)) => (hi - lo + 1) as u64,
        }
    }

    /// `|F_n|`, saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        let side = self.side();
        (0..self.group.dim).fold(1u64, |acc, _| acc.saturating_mul(side)) * u64::from(side > 0)
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        match self.bounds() {
            None => false,
            Some((lo, hi)) => p.len() == self.group.dim && p.iter().all(|&c| lo <= c && c <= hi),
        }
    }

    /// Points of the box in lexicographic order, streamed.
    pub fn points(&self) -> BoxPoints {
        BoxPoints::new(self.bounds(), self.group.dim)
    }
}

/// Streaming lexicographic iterator over a cube; memory is `O(d)`.
#[derive(Debug, Clone)]
pub struct BoxPoints {
    lo: i64,
    hi: i64,
    next: Option<Point>,
}

impl BoxPoints {
    fn new(bounds: Option<(i64, i64)>, dim: usize) -> Self {
        match bounds {
            None => BoxPoints { lo: 0, hi: -1, next: None },
            Some((lo, hi)) => BoxPoints { lo, hi, next: Some(vec![lo; dim]) },
        }
    }
}

impl Iterator for BoxPoints {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for axis in (0..succ.len()).rev() {
            if succ[axis] < self.hi {
                succ[axis] += 1;
                self.next = Some(succ);
                break;
            }
            succ[axis] = self.lo;
        }
        Some(current)
    }
}

/// Convenience wrapper for [`BoxDomain::points`].
pub fn box_points(b: &BoxDomain) -> Vec<Point> {
    b.points().collect()
}

/// A finite partial configuration: lattice points mapped to symbol indices.
///
/// The alphabet lives with the owning [`crate::sft::SftSpec`]; a bare pattern
/// only knows symbol indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    cells: BTreeMap<Point, Symbol>,
}

impl Pattern {
    pub fn new() -> Self {
        Pattern::default()
    }

    pub fn from_cells<I: IntoIterator<Item = (Point, Symbol)>>(cells: I) -> Self {
        Pattern { cells: cells.into_iter().collect() }
    }

    /// A one-dimensional word placed on `{0..len-1}`.
    pub fn word(symbols: &[Symbol]) -> Self {
        Pattern::from_cells(symbols.iter().enumerate().map(|(i, &s)| (vec![i as i64], s)))
    }

    /// Fills `b` with `symbols` in lexicographic cell order.
    ///
    /// # Panics
    /// Panics if `symbols.len()` differs from `|b|`.
    pub fn on_box(b: &BoxDomain, symbols: &[Symbol]) -> Self {
        assert_eq!(symbols.len() as u64, b.size(), "symbol count does not match box size");
        Pattern::from_cells(b.points().zip(symbols.iter().copied()))
    }

    pub fn insert(&mut self, p: Point, s: Symbol) -> Option<Symbol> {
        self.cells.insert(p, s)
    }

    pub fn get(&self, p: &[i64]) -> Option<Symbol> {
        self.cells.get(p).copied()
    }

    /// `|σ|`
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells in lexicographic order.
    pub fn cells(&self) -> impl Iterator<Item = (&Point, Symbol)> + '_ {
        self.cells.iter().map(|(p, &s)| (p, s))
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.cells.values().copied()
    }

    pub fn dim(&self) -> Option<usize> {
        self.cells.keys().next().map(Vec::len)
    }

    /// Least cell under the lexicographic order.
    pub fn least_cell(&self) -> Option<&Point> {
        self.cells.keys().next()
    }

    /// Per-axis minimum and maximum coordinates.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let mut iter = self.cells.keys();
        let first = iter.next()?;
        let (mut lo, mut hi) = (first.clone(), first.clone());
        for p in iter {
            for (axis, &c) in p.iter().enumerate() {
                lo[axis] = lo[axis].min(c);
                hi[axis] = hi[axis].max(c);
            }
        }
        Some((lo, hi))
    }

    /// Restriction to the cells accepted by `keep`.
    pub fn restrict<F: Fn(&[i64]) -> bool>(&self, keep: F) -> Pattern {
        Pattern::from_cells(self.cells.iter().filter(|(p, _)| keep(p)).map(|(p, &s)| (p.clone(), s)))
    }

    /// True when every cell of `self` is present in `other` with the same symbol.
    pub fn is_subpattern_of(&self, other: &Pattern) -> bool {
        self.cells.iter().all(|(p, s)| other.cells.get(p) == Some(s))
    }

    /// The `n` for which the domain is exactly `F_n`, if any. The empty pattern is `F_{-1}`.
    pub fn box_index(&self, group: GroupSpec) -> Option<i64> {
        let Some((lo, hi)) = self.bounding_box() else {
            return Some(-1);
        };
        if lo.len() != group.dim() {
            return None;
        }
        let n = match group.variant() {
            GroupVariant::N => {
                if lo.iter().any(|&c| c != 0) || hi.iter().any(|&c| c != hi[0]) {
                    return None;
                }
                hi[0]
            }
            GroupVariant::Z => {
                let n = hi[0];
                if hi.iter().any(|&c| c != n) || lo.iter().any(|&c| c != -n) {
                    return None;
                }
                n
            }
        };
        let b = BoxDomain::new(group, n);
        (b.size() == self.len() as u64).then_some(n)
    }
}

/// The `g`-translate of `p`: domain `{g + h}`, value `p(h)` at `g + h`.
pub fn translate(p: &Pattern, g: &[i64], group: GroupSpec) -> Result<Pattern> {
    group.check_arity(g)?;
    let mut out = Pattern::new();
    for (h, s) in p.cells() {
        group.check_arity(h)?;
        let moved: Point = h.iter().zip(g).map(|(a, b)| a + b).collect();
        if !group.contains(&moved) {
            return Err(Error::TranslateOutOfMonoid);
        }
        out.insert(moved, s);
    }
    Ok(out)
}

/// Exact diameter of a cylinder, kept as its base-2 exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiameterExponent(pub i64);

impl DiameterExponent {
    pub fn log2(self) -> f64 {
        self.0 as f64
    }
}

/// `diam([[σ]]) = 2^{-|F_n|}` for a pattern on `F_n`.
pub fn cylinder_diameter(p: &Pattern, group: GroupSpec) -> Result<DiameterExponent> {
    p.box_index(group).ok_or(Error::NotABoxDomain)?;
    Ok(DiameterExponent(-(p.len() as i64)))
}
