//! Test fixtures and brute-force oracles, independent of the search engine.

pub use crate::catalog::{empty_shift, even_shift, golden_mean, hard_squares};
use crate::lattice::{GroupSpec, GroupVariant, Point};
use crate::sft::SftSpec;

pub fn group(variant: GroupVariant, dim: usize) -> GroupSpec {
    GroupSpec::new(variant, dim).unwrap()
}

/// Full shift over `N^d`.
pub fn full_shift(k: usize, dim: usize) -> SftSpec {
    crate::catalog::full_shift(k, group(GroupVariant::N, dim))
}

/// Counts every assignment of `F_n` with no forbidden translate inside it by
/// trying all `|A|^{|F_n|}` assignments.
pub fn brute_force_count(spec: &SftSpec, n: i64) -> u64 {
    let points: Vec<Point> = spec.group().box_domain(n).points().collect();
    let k = spec.alphabet().len() as u64;
    let total = k.pow(points.len() as u32);
    let (lo, hi) = spec.group().box_domain(n).bounds().unwrap();
    let mut count = 0;
    for code in 0..total {
        let mut c = code;
        let values: Vec<u16> = points
            .iter()
            .map(|_| {
                let v = (c % k) as u16;
                c /= k;
                v
            })
            .collect();
        let at = |p: &[i64]| -> Option<u16> {
            if p.iter().any(|&x| x < lo || x > hi) {
                return None;
            }
            let idx = p.iter().fold(0i64, |acc, &x| acc * (hi - lo + 1) + (x - lo));
            Some(values[idx as usize])
        };
        let bad = spec.forbidden().iter().any(|f| {
            points.iter().any(|g| f.cells().all(|(h, s)| {
                let q: Vec<i64> = h.iter().zip(g).map(|(a, b)| a + b).collect();
                at(&q) == Some(s)
            }))
        });
        if !bad {
            count += 1;
        }
    }
    count
}
