//! Recovering a full distance table on the line from a corrupted copy.
//!
//! If no vertex has more than `c n` corrupted distances with `c < 1/4`, a
//! pair's reported distance is correct exactly when it satisfies triangle
//! equality with more than `n / 2` third points. The surviving pairs share
//! many witnesses, so the line closure re-derives the discarded ones.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::determination::{closure, triangle_equality};
use crate::error::{Error, Result};
use crate::measurement::MeasurementSet;
use crate::numeric::{common_denominator, ExactValue, Lattice, Scalar};
use crate::rng::rng_from_seed;
use crate::space::{PointConfig, Space};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorrectionOutcome {
    /// The reconstructed table and how many reported values the vote rejected.
    Corrected { distances: MeasurementSet, rejected: usize },
    /// The closure of the accepted pairs left `undetermined` pairs open.
    Undetermined { undetermined: usize, rejected: usize },
    /// The accepted pairs contradict each other at `(i, j)`.
    Inconsistent { i: usize, j: usize, rejected: usize },
}

impl CorrectionOutcome {
    pub fn distances(&self) -> Option<&MeasurementSet> {
        match self {
            CorrectionOutcome::Corrected { distances, .. } => Some(distances),
            _ => None,
        }
    }

    pub fn is_corrected(&self) -> bool {
        matches!(self, CorrectionOutcome::Corrected { .. })
    }
}

fn dense<W: Clone>(m: &MeasurementSet, convert: impl Fn(&Scalar) -> W, zero: W) -> Vec<W> {
    let n = m.n();
    let mut table = vec![zero; n * n];
    for (i, j, w) in m.iter() {
        let v = convert(w);
        table[i * n + j] = v.clone();
        table[j * n + i] = v;
    }
    table
}

/// For each pair `(i, j)`, `i < j`, in lexicographic order: whether its value
/// satisfies triangle equality with more than `n / 2` third points.
fn vote<W: ExactValue>(n: usize, table: &[W]) -> Vec<bool> {
    (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n).map(move |j| {
                let dij = &table[i * n + j];
                let support = (0..n)
                    .filter(|&z| z != i && z != j && triangle_equality(dij, &table[i * n + z], &table[j * n + z]))
                    .count();
                2 * support > n
            })
        })
        .collect()
}

/// Which pairs of the full table `dp` pass the triangle-equality vote.
pub fn vote_pairs(dp: &MeasurementSet) -> Result<Vec<(usize, usize, bool)>> {
    let n = dp.n();
    if !dp.is_complete() {
        let missing = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !dp.contains(i, j));
        let (i, j) = missing.expect("incomplete table has a missing pair");
        return Err(Error::MissingPair(i, j));
    }
    let kept = match Lattice::fit(dp.weights(), 4) {
        Some(lat) => vote(n, &dense(dp, |w| lat.embed(w).expect("fitted"), 0i128)),
        None => vote(n, &dense(dp, Scalar::clone, Scalar::zero())),
    };
    Ok(dp.iter().zip(kept).map(|((i, j, _), k)| (i, j, k)).collect())
}

/// Vote out corrupted pairs of the full table `dp`, then re-derive them with
/// the line closure.
pub fn correct_distances(dp: &MeasurementSet) -> Result<CorrectionOutcome> {
    let votes = vote_pairs(dp)?;
    let rejected = votes.iter().filter(|v| !v.2).count();
    let mut accepted = MeasurementSet::new(dp.n());
    for (i, j, keep) in votes {
        if keep {
            accepted.insert(i, j, dp.get(i, j).expect("complete").clone())?;
        }
    }
    match closure(&accepted, Space::Line) {
        Ok(closed) => {
            let total = dp.n() * dp.n().saturating_sub(1) / 2;
            if closed.len() == total {
                Ok(CorrectionOutcome::Corrected { distances: closed.into_measurements(), rejected })
            } else {
                Ok(CorrectionOutcome::Undetermined { undetermined: total - closed.len(), rejected })
            }
        }
        Err(Error::InconsistentInput { i, j }) => Ok(CorrectionOutcome::Inconsistent { i, j, rejected }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorruptionKind {
    /// Up to `floor(c n)` pairs per vertex get uniformly random wrong values.
    RandomPerVertex,
    /// `n/4`-regular cross-half pattern reporting distances from the
    /// configuration with the first half shifted.
    AdversarialShift { shift: Scalar },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    pub c: Scalar,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn apply(&self, cfg: &PointConfig) -> Result<MeasurementSet> {
        match &self.kind {
            CorruptionKind::RandomPerVertex => make_random_corruption(cfg, &self.c, self.seed),
            CorruptionKind::AdversarialShift { shift } => make_adversarial_corruption(cfg, shift, self.seed),
        }
    }
}

/// Full distance table of `cfg` in which a random set of pairs, at most
/// `floor(c n)` per vertex, reports a wrong value drawn uniformly from
/// `(0, 2 * diameter]` on the configuration's common-denominator grid.
pub fn make_random_corruption(cfg: &PointConfig, c: &Scalar, seed: u64) -> Result<MeasurementSet> {
    if cfg.space() != Space::Line {
        return Err(Error::NotOnLine);
    }
    if c.is_negative() {
        return Err(Error::InvalidArgument(format!("corruption fraction {c} is negative")));
    }
    let n = cfg.len();
    let budget = (c * &Scalar::from_integer(n as i64)).as_rational().floor().to_integer();
    let budget: usize = budget.try_into().unwrap_or(usize::MAX);
    let mut rng = rng_from_seed(seed);
    let mut m = MeasurementSet::complete_from(cfg);
    if n < 2 {
        return Ok(m);
    }

    let denom = common_denominator(cfg.positions()).unwrap_or(1 << 32);
    let order = cfg.order();
    let diameter = cfg.position(order[n - 1]).clone() - cfg.position(order[0]);
    let grid = Scalar::from_bigints(BigInt::from(1), BigInt::from(denom));
    let steps = (&(&diameter * &Scalar::from(2)) / &grid).as_rational().floor().to_integer();
    let steps: u64 = steps.try_into().unwrap_or(u64::MAX).max(2);

    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs.shuffle(&mut rng);
    let mut load = vec![0usize; n];
    for (i, j) in pairs {
        if load[i] >= budget || load[j] >= budget {
            continue;
        }
        load[i] += 1;
        load[j] += 1;
        let truth = m.get(i, j).expect("complete").clone();
        let wrong = loop {
            let k = rng.gen_range(1..=steps);
            let candidate = &grid * &Scalar::from_bigints(BigInt::from(k), BigInt::from(1));
            if candidate != truth {
                break candidate;
            }
        };
        m.set(i, j, wrong)?;
    }
    Ok(m)
}

/// The configuration with its first half (vertices `0..n/2`) moved left by
/// `shift`.
pub fn shifted_configuration(cfg: &PointConfig, shift: &Scalar) -> Result<PointConfig> {
    let half = cfg.len() / 2;
    let positions =
        cfg.positions().iter().enumerate().map(|(v, x)| if v < half { x - shift } else { x.clone() }).collect();
    PointConfig::new(cfg.space(), positions)
}

/// Full distance table of `cfg` (`n = 4k` points on the line) in which the
/// pairs of `k` perfect matchings between `{0..2k}` and `{2k..4k}` report
/// distances from [`shifted_configuration`]. Each vertex has exactly `k`
/// corrupted pairs. Matchings are `i -> 2k + (i + r) mod 2k` for `k` offsets
/// `r` chosen by `seed`.
pub fn make_adversarial_corruption(cfg: &PointConfig, shift: &Scalar, seed: u64) -> Result<MeasurementSet> {
    if cfg.space() != Space::Line {
        return Err(Error::NotOnLine);
    }
    let n = cfg.len();
    if n == 0 || n % 4 != 0 {
        return Err(Error::NotMultipleOfFour(n));
    }
    let k = n / 4;
    let side = 2 * k;
    let mut offsets: Vec<usize> = (0..side).collect();
    offsets.shuffle(&mut rng_from_seed(seed));
    offsets.truncate(k);
    offsets.sort_unstable();

    let shifted = shifted_configuration(cfg, shift)?;
    let mut corrupted = vec![false; n * n];
    for &r in &offsets {
        for i in 0..side {
            let j = side + (i + r) % side;
            corrupted[i * n + j] = true;
        }
    }
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| {
        let source = if corrupted[i * n + j] { &shifted } else { cfg };
        (i, j, source.space().metric(source.position(i), source.position(j)))
    });
    MeasurementSet::from_edges(n, edges)
}

/// Per-vertex number of pairs where two full tables disagree.
pub fn disagreement_profile(a: &MeasurementSet, b: &MeasurementSet) -> Result<Vec<usize>> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch(a.n(), b.n()));
    }
    let mut load = vec![0usize; a.n()];
    for (i, j, w) in a.iter() {
        let other = b.get(i, j).ok_or(Error::MissingPair(i, j))?;
        if other != w {
            load[i] += 1;
            load[j] += 1;
        }
    }
    Ok(load)
}

/// Whether `cfg` explains the corrupted table `dp` under the hypothesis that
/// no vertex has more than `c n` corrupted pairs.
pub fn explains(cfg: &PointConfig, dp: &MeasurementSet, c: &Scalar) -> Result<bool> {
    let truth = MeasurementSet::complete_from(cfg);
    let profile = disagreement_profile(&truth, dp)?;
    let limit = c * &Scalar::from_integer(cfg.len() as i64);
    Ok(profile.iter().all(|&count| Scalar::from_integer(count as i64) <= limit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: i64) -> PointConfig {
        PointConfig::line_from_integers(&(0..n).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn no_corruption_is_identity() {
        let cfg = grid(30);
        let m = MeasurementSet::complete_from(&cfg);
        let out = correct_distances(&m).unwrap();
        assert_eq!(out, CorrectionOutcome::Corrected { distances: m, rejected: 0 });
    }

    #[test]
    fn small_random_corruption_is_repaired() {
        let xs: Vec<i64> = (0..120).map(|k| k * k + 3 * k).collect();
        let cfg = PointConfig::line_from_integers(&xs).unwrap();
        let dp = make_random_corruption(&cfg, &Scalar::ratio(1, 10), 5).unwrap();
        let truth = MeasurementSet::complete_from(&cfg);
        let profile = disagreement_profile(&truth, &dp).unwrap();
        assert!(profile.iter().all(|&c| c <= 12));
        assert!(profile.iter().any(|&c| c > 0));
        match correct_distances(&dp).unwrap() {
            CorrectionOutcome::Corrected { distances, rejected } => {
                assert_eq!(distances, truth);
                assert_eq!(rejected, profile.iter().sum::<usize>() / 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn incomplete_table_is_rejected() {
        let mut m = MeasurementSet::new(3);
        m.insert(0, 1, Scalar::one()).unwrap();
        assert_eq!(correct_distances(&m), Err(Error::MissingPair(0, 2)));
    }

    #[test]
    fn adversarial_small_example() {
        let cfg = grid(4);
        let dp = make_adversarial_corruption(&cfg, &Scalar::from(10), 0).unwrap();
        let truth = MeasurementSet::complete_from(&cfg);
        let profile = disagreement_profile(&truth, &dp).unwrap();
        assert_eq!(profile, vec![1, 1, 1, 1]);
        // whichever matching was chosen, corrupted values come from the
        // configuration (-10, -9, 2, 3)
        for (i, j, w) in dp.iter() {
            if truth.get(i, j) != Some(w) {
                let expected = [(0, 2, 12), (1, 3, 12), (0, 3, 13), (1, 2, 11)];
                assert!(expected.iter().any(|&(a, b, d)| (a, b) == (i, j) && *w == Scalar::from(d)));
            }
        }
        let zero = make_adversarial_corruption(&cfg, &Scalar::zero(), 0).unwrap();
        assert_eq!(zero, truth);
        assert_eq!(make_adversarial_corruption(&grid(6), &Scalar::one(), 0), Err(Error::NotMultipleOfFour(6)));
    }

    #[test]
    fn adversarial_regularity() {
        let cfg = grid(8);
        for seed in 0..5 {
            let dp = make_adversarial_corruption(&cfg, &Scalar::from(3), seed).unwrap();
            let profile = disagreement_profile(&MeasurementSet::complete_from(&cfg), &dp).unwrap();
            assert_eq!(profile, vec![2; 8]);
        }
    }

    #[test]
    fn adversarial_table_is_explained_by_both_configurations() {
        let cfg = grid(16);
        let shift = Scalar::from(100);
        let dp = make_adversarial_corruption(&cfg, &shift, 1).unwrap();
        let quarter = Scalar::ratio(1, 4);
        assert!(explains(&cfg, &dp, &quarter).unwrap());
        assert!(explains(&shifted_configuration(&cfg, &shift).unwrap(), &dp, &quarter).unwrap());
        assert!(!explains(&cfg, &dp, &Scalar::ratio(1, 5)).unwrap());
    }
}
