//! Markov measures on one-dimensional SFTs: the Parry measure of maximal
//! entropy, cylinder probabilities, seeded sampling of generic points, and
//! the empirical Shannon–McMillan–Breiman check.

use std::collections::HashMap;

use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::error::{Error, Result};
use crate::lattice::{GroupSpec, GroupVariant, Pattern, Symbol};
use crate::sft::TransferMatrix;
use crate::spectral;

/// Invariant tolerance for stochasticity and stationarity.
pub const INVARIANT_TOL: f64 = 1e-12;

/// A stationary Markov chain on blocks of `block_len` symbols; consecutive
/// states overlap in `block_len - 1` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMeasure {
    states: Vec<Vec<Symbol>>,
    block_len: usize,
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    index: HashMap<Vec<Symbol>, usize>,
}

impl MarkovMeasure {
    pub fn new(
        states: Vec<Vec<Symbol>>,
        block_len: usize,
        transition: Vec<Vec<f64>>,
        stationary: Vec<f64>,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidMeasure(msg));
        let size = states.len();
        if size == 0 || block_len == 0 {
            return invalid("no states".into());
        }
        if states.iter().any(|s| s.len() != block_len) {
            return invalid(format!("every state must have {block_len} symbols"));
        }
        if transition.len() != size || transition.iter().any(|r| r.len() != size) || stationary.len() != size {
            return invalid("shape mismatch".into());
        }
        for (i, row) in transition.iter().enumerate() {
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return invalid(format!("row {i} has an entry outside [0, 1]"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > INVARIANT_TOL {
                return invalid(format!("row {i} sums to {sum}"));
            }
            for (j, &p) in row.iter().enumerate() {
                if p > 0.0 && states[i][1..] != states[j][..block_len - 1] {
                    return invalid(format!("transition {i}->{j} does not overlap"));
                }
            }
        }
        if stationary.iter().any(|&p| p < 0.0) || (stationary.iter().sum::<f64>() - 1.0).abs() > INVARIANT_TOL {
            return invalid("stationary vector is not a probability vector".into());
        }
        for j in 0..size {
            let flow: f64 = (0..size).map(|i| stationary[i] * transition[i][j]).sum();
            if (flow - stationary[j]).abs() > INVARIANT_TOL {
                return invalid(format!("stationary vector is not invariant at state {j}"));
            }
        }
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(MarkovMeasure { states, block_len, transition, stationary, index })
    }

    /// Symbols drawn independently with the given probabilities.
    pub fn bernoulli(probs: &[f64]) -> Result<Self> {
        let states = (0..probs.len()).map(|s| vec![s as Symbol]).collect();
        MarkovMeasure::new(states, 1, vec![probs.to_vec(); probs.len()], probs.to_vec())
    }

    /// Chain on single symbols with the stationary vector computed from `transition`.
    pub fn from_transition(transition: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let stationary = stationary_vector(&transition, tol)?;
        let states = (0..transition.len()).map(|s| vec![s as Symbol]).collect();
        MarkovMeasure::new(states, 1, transition, stationary)
    }

    pub fn states(&self) -> &[Vec<Symbol>] {
        &self.states
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// Stationary frequency of a single symbol.
    pub fn symbol_frequency(&self, symbol: Symbol) -> f64 {
        self.states.iter().zip(&self.stationary).filter(|(s, _)| s[0] == symbol).map(|(_, p)| p).sum()
    }
}

fn stationary_vector(transition: &[Vec<f64>], tol: f64) -> Result<Vec<f64>> {
    let pair = spectral::perron(&spectral::transpose(transition), tol.min(1e-14))?;
    Ok(pair.vector)
}

/// The Parry measure `P[i][j] = m[i][j] v[j] / (λ v[i])` of an irreducible transfer matrix.
pub fn parry_measure(tm: &TransferMatrix, tol: f64) -> Result<MarkovMeasure> {
    if tm.is_empty() {
        return Err(Error::ZeroMatrix);
    }
    let m = tm.to_f64();
    if !spectral::is_irreducible(&m) {
        return Err(Error::Reducible);
    }
    let pair = spectral::perron(&m, tol.clamp(f64::EPSILON, 1e-14))?;
    if pair.radius < 0.5 {
        return Err(Error::ZeroMatrix);
    }
    let (lambda, v) = (pair.radius, pair.vector);
    let transition: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let raw: Vec<f64> = row.iter().zip(&v).map(|(mij, vj)| mij * vj / (lambda * v[i])).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|p| p / sum).collect()
        })
        .collect();
    let stationary = stationary_vector(&transition, tol)?;
    MarkovMeasure::new(tm.states.clone(), tm.block_len, transition, stationary)
}

/// `-Σ_i π_i Σ_j P_ij log2 P_ij`, with `0 log 0 = 0`.
pub fn measure_entropy(mu: &MarkovMeasure) -> f64 {
    -mu.stationary
        .iter()
        .zip(&mu.transition)
        .map(|(pi, row)| pi * row.iter().filter(|&&p| p > 0.0).map(|p| p * p.log2()).sum::<f64>())
        .sum::<f64>()
}

fn word_symbols(word: &Pattern) -> Result<Vec<Symbol>> {
    let group = GroupSpec::new(GroupVariant::N, 1)?;
    word.box_index(group).ok_or(Error::NotABoxDomain)?;
    Ok(word.symbols().collect())
}

/// `log2 μ([[word]])` for a word on `{0..L-1}`; `-inf` when the word has
/// probability zero.
pub fn cylinder_probability(mu: &MarkovMeasure, word: &Pattern) -> Result<f64> {
    Ok(cylinder_log2(mu, &word_symbols(word)?))
}

/// [`cylinder_probability`] on a plain symbol slice.
pub fn cylinder_log2(mu: &MarkovMeasure, word: &[Symbol]) -> f64 {
    let k = mu.block_len;
    if word.len() < k {
        let mass: f64 = mu
            .states
            .iter()
            .zip(&mu.stationary)
            .filter(|(s, _)| s.starts_with(word))
            .map(|(_, p)| p)
            .sum();
        return if mass > 0.0 { mass.log2() } else { f64::NEG_INFINITY };
    }
    let Some(&first) = mu.index.get(&word[..k]) else {
        return f64::NEG_INFINITY;
    };
    let mut total = mu.stationary[first].log2();
    let mut current = first;
    for t in k..word.len() {
        let Some(&next) = mu.index.get(&word[t + 1 - k..=t]) else {
            return f64::NEG_INFINITY;
        };
        total += mu.transition[current][next].log2();
        current = next;
    }
    total
}

/// Uniform `[0, 1)` from the top 53 bits of a PCG-XSL-RR-128/64 output.
fn uniform(rng: &mut Pcg64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn draw(rng: &mut Pcg64, probs: &[f64]) -> usize {
    let u = uniform(rng);
    let mut cumulative = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return i;
        }
    }
    // rounding left u above the final partial sum
    probs.iter().rposition(|&p| p > 0.0).expect("probability vector has support")
}

/// A word of `length` symbols drawn from `mu` with `Pcg64::seed_from_u64(seed)`
/// and inverse-CDF sampling.
pub fn sample_symbols(mu: &MarkovMeasure, seed: u64, length: usize) -> Vec<Symbol> {
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut state = draw(&mut rng, &mu.stationary);
    let mut word = mu.states[state].clone();
    while word.len() < length {
        state = draw(&mut rng, &mu.transition[state]);
        word.push(*mu.states[state].last().expect("nonempty state"));
    }
    word.truncate(length);
    word
}

/// [`sample_symbols`] as a pattern on `F_{length-1}`.
pub fn sample_point(mu: &MarkovMeasure, seed: u64, length: usize) -> Result<Pattern> {
    if length == 0 {
        return Err(Error::InvalidArgument("sample length must be at least 1".into()));
    }
    Ok(Pattern::word(&sample_symbols(mu, seed, length)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmbSample {
    pub seed: u64,
    pub n: i64,
    /// `-log2 μ([[x|F_n]])`
    pub minus_log2_mu_cylinder: f64,
    /// `minus_log2_mu_cylinder / |F_n|`
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmbReport {
    pub samples: Vec<SmbSample>,
    pub entropy: f64,
    pub mean: f64,
    pub max_deviation: f64,
    /// Samples whose cylinder had probability zero; always 0 for a valid sampler.
    pub support_violations: usize,
}

/// Samples one point per seed and records its normalized cylinder information
/// on `F_n` (`n + 1` symbols). Results follow the order of `seeds`.
pub fn smb_check(mu: &MarkovMeasure, seeds: &[u64], n: i64) -> Result<SmbReport> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("n must be at least 1, got {n}")));
    }
    let len = (n + 1) as usize;
    let entropy = measure_entropy(mu);
    let samples: Vec<SmbSample> = seeds
        .iter()
        .map(|&seed| {
            let word = sample_symbols(mu, seed, len);
            let info = -cylinder_log2(mu, &word);
            SmbSample { seed, n, minus_log2_mu_cylinder: info, normalized: info / len as f64 }
        })
        .collect();
    let support_violations = samples.iter().filter(|s| s.normalized.is_infinite()).count();
    let finite: Vec<f64> = samples.iter().map(|s| s.normalized).filter(|v| v.is_finite()).collect();
    let mean = if finite.is_empty() { f64::NAN } else { finite.iter().sum::<f64>() / finite.len() as f64 };
    let max_deviation = finite.iter().map(|v| (v - entropy).abs()).fold(0.0, f64::max);
    Ok(SmbReport { samples, entropy, mean, max_deviation, support_violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::{entropy_exact_1d, transfer_matrix_1d};
    use crate::testing::*;

    fn phi() -> f64 {
        (1.0 + 5f64.sqrt()) / 2.0
    }

    fn golden_parry() -> MarkovMeasure {
        parry_measure(&transfer_matrix_1d(&golden_mean()).unwrap(), 1e-12).unwrap()
    }

    #[test]
    fn parry_golden_mean() {
        let mu = golden_parry();
        let p = mu.transition();
        assert!((p[0][0] - 1.0 / phi()).abs() < 1e-12);
        assert!((p[0][1] - 1.0 / (phi() * phi())).abs() < 1e-12);
        assert_eq!(p[1][0], 1.0);
        assert_eq!(p[1][1], 0.0);
        // π ∝ (φ², 1) for the symmetric golden matrix
        let pi1 = 1.0 / (phi() * phi() + 1.0);
        assert!((mu.stationary()[1] - pi1).abs() < 1e-12);
    }

    #[test]
    fn parry_trivial_cases() {
        let full = parry_measure(&transfer_matrix_1d(&full_shift(2, 1)).unwrap(), 1e-12).unwrap();
        assert!(full.transition().iter().flatten().all(|&p| (p - 0.5).abs() < 1e-15));
        assert!(full.stationary().iter().all(|&p| (p - 0.5).abs() < 1e-15));
        let single = parry_measure(&transfer_matrix_1d(&full_shift(1, 1)).unwrap(), 1e-12).unwrap();
        assert_eq!(single.transition(), &[vec![1.0]]);
        assert_eq!(single.stationary(), &[1.0]);
    }

    #[test]
    fn parry_rejects_reducible() {
        // 0 -> 1 allowed but never back
        let a = crate::sft::Alphabet::numeric(2).unwrap();
        let spec = crate::sft::SftSpec::new(a, group(GroupVariant::N, 1), vec![Pattern::word(&[1, 0])]).unwrap();
        let tm = transfer_matrix_1d(&spec).unwrap();
        assert_eq!(parry_measure(&tm, 1e-12), Err(Error::Reducible));
    }

    #[test]
    fn variational_principle() {
        for spec in [golden_mean(), even_shift(), full_shift(3, 1)] {
            let tm = transfer_matrix_1d(&spec).unwrap();
            let mu = parry_measure(&tm, 1e-12).unwrap();
            let exact = entropy_exact_1d(&spec, 1e-12).unwrap();
            assert!((measure_entropy(&mu) - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(measure_entropy(&MarkovMeasure::bernoulli(&[0.5, 0.5]).unwrap()), 1.0);
        let cycle = MarkovMeasure::from_transition(
            vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]],
            1e-12,
        )
        .unwrap();
        assert_eq!(measure_entropy(&cycle), 0.0);
    }

    #[test]
    fn invalid_measures_rejected() {
        assert!(MarkovMeasure::bernoulli(&[0.5, 0.6]).is_err());
        assert!(MarkovMeasure::new(vec![vec![0], vec![1]], 1, vec![vec![0.5, 0.5]; 2], vec![0.9, 0.1]).is_err());
    }

    #[test]
    fn cylinder_examples() {
        let fair = MarkovMeasure::bernoulli(&[0.5, 0.5]).unwrap();
        let word = Pattern::word(&[0, 1, 1, 0, 1, 0, 0, 0, 1, 1]);
        assert_eq!(cylinder_probability(&fair, &word).unwrap(), -10.0);
        let mu = golden_parry();
        let expected = (mu.stationary()[0] * mu.transition()[0][0]).log2();
        assert!((cylinder_probability(&mu, &Pattern::word(&[0, 0])).unwrap() - expected).abs() < 1e-12);
        assert_eq!(cylinder_probability(&mu, &Pattern::word(&[0, 1, 1])).unwrap(), f64::NEG_INFINITY);
        let shifted = Pattern::from_cells([(vec![1], 0)]);
        assert_eq!(cylinder_probability(&mu, &shifted), Err(Error::NotABoxDomain));
    }

    #[test]
    fn cylinders_normalize() {
        for spec in [golden_mean(), even_shift()] {
            let mu = parry_measure(&transfer_matrix_1d(&spec).unwrap(), 1e-12).unwrap();
            for len in 1..=12 {
                let total: f64 = crate::sft::enumerate_patterns(&spec, len - 1, 0)
                    .unwrap()
                    .map(|w| cylinder_probability(&mu, &w).unwrap().exp2())
                    .sum();
                assert!((total - 1.0).abs() < 1e-9, "length {len}: {total}");
            }
        }
    }

    #[test]
    fn sampling_examples() {
        let single = parry_measure(&transfer_matrix_1d(&full_shift(1, 1)).unwrap(), 1e-12).unwrap();
        assert_eq!(sample_symbols(&single, 3, 5), vec![0; 5]);

        let mu = golden_parry();
        let word = sample_symbols(&mu, 42, 10_000);
        assert!(word.windows(2).all(|w| w != [1, 1]));
        let ones = word.iter().filter(|&&s| s == 1).count() as f64 / 1e4;
        assert!((ones - 0.2764).abs() < 0.02, "{ones}");
        assert!(cylinder_log2(&mu, &word).is_finite());

        let fair = MarkovMeasure::bernoulli(&[0.5, 0.5]).unwrap();
        let word = sample_symbols(&fair, 7, 10_000);
        let ones = word.iter().filter(|&&s| s == 1).count() as f64 / 1e4;
        assert!((ones - 0.5).abs() < 0.02, "{ones}");
        assert_eq!(sample_symbols(&fair, 7, 100), sample_symbols(&fair, 7, 100));
        assert!(sample_point(&fair, 1, 0).is_err());
    }

    #[test]
    fn block_states_sample_admissibly() {
        let a = crate::sft::Alphabet::numeric(2).unwrap();
        let spec = crate::sft::SftSpec::new(
            a,
            group(GroupVariant::N, 1),
            vec![Pattern::word(&[1, 0, 1]), Pattern::word(&[1, 1, 1])],
        )
        .unwrap();
        let mu = parry_measure(&transfer_matrix_1d(&spec).unwrap(), 1e-12).unwrap();
        assert_eq!(mu.block_len(), 2);
        let word = sample_symbols(&mu, 9, 2000);
        assert!(spec.is_locally_admissible(&Pattern::word(&word)));
        assert!((measure_entropy(&mu) - entropy_exact_1d(&spec, 1e-12).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn smb_examples() {
        let fair = MarkovMeasure::bernoulli(&[0.5, 0.5]).unwrap();
        let report = smb_check(&fair, &[1, 2, 3], 50).unwrap();
        assert!(report.samples.iter().all(|s| s.normalized == 1.0));
        let single = MarkovMeasure::from_transition(vec![vec![1.0]], 1e-12).unwrap();
        assert!(smb_check(&single, &[4, 5], 20).unwrap().samples.iter().all(|s| s.normalized == 0.0));
        let report = smb_check(&golden_parry(), &(0..20).collect::<Vec<_>>(), 2000).unwrap();
        assert_eq!(report.support_violations, 0);
        assert!((report.mean - report.entropy).abs() < 0.02);
        assert_eq!(report.samples[3].seed, 3);
    }
}
