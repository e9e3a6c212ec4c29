//! Perron–Frobenius data of nonnegative matrices by power iteration.

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200_000;

/// Dominant eigenvalue and a nonnegative eigenvector normalized to sum 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronPair {
    pub radius: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

fn mul_shifted(m: &[Vec<f64>], v: &[f64], out: &mut [f64]) {
    for (i, row) in m.iter().enumerate() {
        out[i] = v[i] + row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// Power iteration on `M + I`, which shares its Perron vector with `M` and is
/// aperiodic even when `M` is not. Stops once successive eigenvalue estimates
/// and iterates both move by less than `tol`.
pub fn perron(m: &[Vec<f64>], tol: f64) -> Result<PerronPair> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let size = m.len();
    if size == 0 {
        return Err(Error::ZeroMatrix);
    }
    assert!(m.iter().all(|row| row.len() == size), "matrix must be square");

    let mut v = vec![1.0 / size as f64; size];
    let mut next = vec![0.0; size];
    let mut estimate = f64::NAN;
    for iteration in 1..=MAX_ITERATIONS {
        mul_shifted(m, &v, &mut next);
        // sum(v) == 1, so the growth of the 1-norm is the eigenvalue estimate
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let moved = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let settled = (total - estimate).abs() < tol;
        estimate = total;
        std::mem::swap(&mut v, &mut next);
        if settled && moved < tol {
            return Ok(PerronPair { radius: estimate - 1.0, vector: v, iterations: iteration });
        }
    }
    Err(Error::NoConvergence(MAX_ITERATIONS))
}

pub fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..m.len()).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

fn reachable(adjacent: impl Fn(usize, usize) -> bool, size: usize) -> Vec<bool> {
    let mut seen = vec![false; size];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..size {
            if !seen[j] && adjacent(i, j) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

/// Strongly connected components of the support graph (Kosaraju).
pub fn strong_components(m: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let size = m.len();
    let mut order = Vec::with_capacity(size);
    let mut seen = vec![false; size];
    for root in 0..size {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some((i, j)) = stack.last_mut() {
            let i = *i;
            if *j == size {
                order.push(i);
                stack.pop();
                continue;
            }
            let next = *j;
            *j += 1;
            if !seen[next] && m[i][next] > 0.0 {
                seen[next] = true;
                stack.push((next, 0));
            }
        }
    }
    let mut component = vec![usize::MAX; size];
    let mut components = Vec::new();
    for &root in order.iter().rev() {
        if component[root] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![root];
        component[root] = id;
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            for j in 0..size {
                if component[j] == usize::MAX && m[j][i] > 0.0 {
                    component[j] = id;
                    members.push(j);
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

/// Spectral radius as the maximum over strongly connected components, each of
/// which is irreducible and therefore converges geometrically under [`perron`].
/// Zero when the support graph has no cycle.
pub fn spectral_radius(m: &[Vec<f64>], tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut radius = 0.0f64;
    for members in strong_components(m) {
        if members.len() == 1 && m[members[0]][members[0]] <= 0.0 {
            continue;
        }
        let sub: Vec<Vec<f64>> =
            members.iter().map(|&i| members.iter().map(|&j| m[i][j]).collect()).collect();
        radius = radius.max(perron(&sub, tol)?.radius);
    }
    Ok(radius)
}

/// Strong connectivity of the support graph.
pub fn is_irreducible(m: &[Vec<f64>]) -> bool {
    let size = m.len();
    if size == 0 {
        return false;
    }
    reachable(|i, j| m[i][j] > 0.0, size).into_iter().all(|x| x)
        && reachable(|i, j| m[j][i] > 0.0, size).into_iter().all(|x| x)
}
