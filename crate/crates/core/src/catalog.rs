//! Standard example shifts, mirrored by the `.sft` files under `specs/`.

use crate::lattice::{GroupSpec, GroupVariant, Pattern};
use crate::sft::{Alphabet, SftSpec};

fn group(variant: GroupVariant, dim: usize) -> GroupSpec {
    GroupSpec::new(variant, dim).expect("positive dimension")
}

fn words(alphabet: &Alphabet, forbidden: &[&[&str]]) -> Vec<Pattern> {
    forbidden
        .iter()
        .map(|w| {
            let symbols: Vec<u16> = w.iter().map(|s| alphabet.index(s).expect("known symbol")).collect();
            Pattern::word(&symbols)
        })
        .collect()
}

/// Full shift on `k` symbols named `0..k-1`.
pub fn full_shift(k: usize, group: GroupSpec) -> SftSpec {
    SftSpec::full_shift(Alphabet::numeric(k).expect("k >= 1"), group)
}

/// Binary sequences over `N` without two consecutive 1s.
pub fn golden_mean() -> SftSpec {
    let a = Alphabet::numeric(2).unwrap();
    let forbidden = words(&a, &[&["1", "1"]]);
    SftSpec::new(a, group(GroupVariant::N, 1), forbidden).unwrap()
}

/// Vertex-shift presentation of the even shift: `a` stands for a 1 and the
/// pair `b c` for two consecutive 0s, so 0-runs between 1s have even length.
pub fn even_shift() -> SftSpec {
    let a = Alphabet::new(["a", "b", "c"]).unwrap();
    let forbidden = words(&a, &[&["a", "c"], &["b", "a"], &["b", "b"], &["c", "c"]]);
    SftSpec::new(a, group(GroupVariant::N, 1), forbidden).unwrap()
}

/// No two 1s horizontally or vertically adjacent.
pub fn hard_squares(variant: GroupVariant) -> SftSpec {
    let a = Alphabet::numeric(2).unwrap();
    let horizontal = Pattern::from_cells([(vec![0, 0], 1), (vec![1, 0], 1)]);
    let vertical = Pattern::from_cells([(vec![0, 0], 1), (vec![0, 1], 1)]);
    SftSpec::new(a, group(variant, 2), vec![horizontal, vertical]).unwrap()
}

/// Both binary symbols forbidden; no point survives.
pub fn empty_shift() -> SftSpec {
    let a = Alphabet::numeric(2).unwrap();
    let forbidden = words(&a, &[&["0"], &["1"]]);
    SftSpec::new(a, group(GroupVariant::N, 1), forbidden).unwrap()
}
