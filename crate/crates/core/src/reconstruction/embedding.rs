//! Linear-expected-time embedding of a randomly measured line configuration.
//!
//! Each round samples `u, v`, computes shortest-path estimates from both, and
//! collects the estimated interior `Int(u, v)`: vertices `x` with
//! `Est(u,x) + Est(x,v) = Est(u,v)`. When at least half the vertices are
//! interior, the estimate from `u` is trusted on the interior trimmed by
//! `ceil(n/8)` at each end, and every other vertex is placed from the two
//! middle vertices of that trimmed set.

use rand::Rng;

use crate::error::{Error, Result};
use crate::measurement::MeasurementSet;
use crate::numeric::{ExactValue, Scalar};
use crate::rng::rng_from_seed;

use super::est::{Csr, MeasurementGraph, Weights};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingStatus {
    Success,
    Failed,
}

/// Why a round of the embedding did not produce an answer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RoundDiagnostics {
    /// `|Int(u, v)| < n/2`.
    pub guard_rejected: usize,
    /// An estimate needed by the round was infinite.
    pub unreachable: usize,
    /// `Est(x_u, w) = Est(x_v, w)` for some placed vertex `w`.
    pub ties: usize,
    /// Trimmed interior had fewer than two vertices, or the result was not
    /// injective.
    pub degenerate: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingResult {
    pub status: EmbeddingStatus,
    /// Coordinates per vertex on success.
    pub emb: Option<Vec<Scalar>>,
    pub iterations_used: usize,
    pub diagnostics: RoundDiagnostics,
}

impl EmbeddingResult {
    pub fn is_success(&self) -> bool {
        self.status == EmbeddingStatus::Success
    }
}

/// Vertices `x ∉ {u, v}` with `est_u[x] + est_v[x] = duv`; infinite
/// estimates never qualify.
pub fn int_set<W: ExactValue>(u: usize, v: usize, est_u: &[Option<W>], est_v: &[Option<W>], duv: &W) -> Vec<usize> {
    (0..est_u.len())
        .filter(|&x| x != u && x != v)
        .filter(|&x| matches!((&est_u[x], &est_v[x]), (Some(a), Some(b)) if a.plus(b) == *duv))
        .collect()
}

/// `ceil(ln n)`, the default number of rounds.
pub fn default_rounds(n: usize) -> usize {
    (n.max(1) as f64).ln().ceil().max(1.0) as usize
}

enum Round<W> {
    Embedded(Vec<W>),
    GuardRejected,
    Unreachable,
    Tie,
    Degenerate,
}

fn run_round<W: ExactValue>(csr: &Csr<W>, u: usize, v: usize) -> Round<W> {
    let n = csr.n();
    let est_u = csr.shortest_paths(u);
    let est_v = csr.shortest_paths(v);
    let Some(duv) = est_u[v].clone() else { return Round::Unreachable };
    let interior = int_set(u, v, &est_u, &est_v, &duv);
    if 2 * interior.len() < n {
        return Round::GuardRejected;
    }

    let trim = n.div_ceil(8);
    let value = |est: &[Option<W>], x: usize| est[x].clone().expect("interior estimates are finite");
    let mut by_u = interior.clone();
    by_u.sort_by(|&a, &b| value(&est_u, a).cmp(&value(&est_u, b)).then(a.cmp(&b)));
    let mut by_v = interior;
    by_v.sort_by(|&a, &b| value(&est_v, a).cmp(&value(&est_v, b)).then(a.cmp(&b)));
    let mut drop = vec![false; n];
    for &x in by_u.iter().take(trim).chain(by_v.iter().take(trim)) {
        drop[x] = true;
    }
    let trimmed: Vec<usize> = by_u.into_iter().filter(|&x| !drop[x]).collect();
    let m = trimmed.len();
    if m < 2 {
        return Round::Degenerate;
    }

    let mut emb: Vec<Option<W>> = vec![None; n];
    emb[u] = Some(W::zero());
    let mut in_trimmed = vec![false; n];
    for &x in &trimmed {
        emb[x] = Some(value(&est_u, x));
        in_trimmed[x] = true;
    }
    // 1-based middle positions floor(m/2) and floor(m/2) + 1
    let (x_u, x_v) = (trimmed[m / 2 - 1], trimmed[m / 2]);
    let anchor = value(&est_u, x_u);
    let from_xu = csr.shortest_paths(x_u);
    let from_xv = csr.shortest_paths(x_v);
    for w in 0..n {
        if w == u || in_trimmed[w] {
            continue;
        }
        let (Some(a), Some(b)) = (&from_xu[w], &from_xv[w]) else { return Round::Unreachable };
        emb[w] = Some(match a.cmp(b) {
            std::cmp::Ordering::Greater => anchor.plus(a),
            std::cmp::Ordering::Less => anchor.minus(a),
            std::cmp::Ordering::Equal => return Round::Tie,
        });
    }
    let emb: Vec<W> = emb.into_iter().map(|x| x.expect("every vertex placed")).collect();
    let mut sorted = emb.clone();
    sorted.sort();
    if sorted.windows(2).any(|p| p[0] == p[1]) {
        return Round::Degenerate;
    }
    Round::Embedded(emb)
}

fn embed_generic<W: ExactValue>(csr: &Csr<W>, rounds: usize, seed: u64) -> (Option<Vec<W>>, usize, RoundDiagnostics) {
    let n = csr.n();
    let mut rng = rng_from_seed(seed);
    let mut diag = RoundDiagnostics::default();
    for round in 1..=rounds {
        let u = rng.gen_range(0..n);
        let v = loop {
            let v = rng.gen_range(0..n);
            if v != u {
                break v;
            }
        };
        match run_round(csr, u, v) {
            Round::Embedded(emb) => return (Some(emb), round, diag),
            Round::GuardRejected => diag.guard_rejected += 1,
            Round::Unreachable => diag.unreachable += 1,
            Round::Tie => diag.ties += 1,
            Round::Degenerate => diag.degenerate += 1,
        }
    }
    (None, rounds, diag)
}

/// Embeds the measured configuration on the line, up to isometry, using at
/// most `max_rounds` rounds (default `ceil(ln n)`). Requires `n >= 16`.
pub fn algorithm1_with_rounds(m: &MeasurementSet, seed: u64, max_rounds: Option<usize>) -> Result<EmbeddingResult> {
    let n = m.n();
    if n < 16 {
        return Err(Error::TooFewVertices { needed: 16, got: n });
    }
    let rounds = max_rounds.unwrap_or_else(|| default_rounds(n));
    let graph = MeasurementGraph::new(m)?;
    let (emb, iterations_used, diagnostics) = match &graph.inner {
        Weights::Small { csr, lattice } => {
            let (emb, used, diag) = embed_generic(csr, rounds, seed);
            (emb.map(|e| e.into_iter().map(|k| lattice.lift(k.into())).collect()), used, diag)
        }
        Weights::Lattice { csr, lattice } => {
            let (emb, used, diag) = embed_generic(csr, rounds, seed);
            (emb.map(|e| e.into_iter().map(|k| lattice.lift(k)).collect()), used, diag)
        }
        Weights::Exact(csr) => embed_generic(csr, rounds, seed),
    };
    let status = if emb.is_some() { EmbeddingStatus::Success } else { EmbeddingStatus::Failed };
    Ok(EmbeddingResult { status, emb, iterations_used, diagnostics })
}

pub fn algorithm1(m: &MeasurementSet, seed: u64) -> Result<EmbeddingResult> {
    algorithm1_with_rounds(m, seed, None)
}

/// True iff `b = ±a + t` for a single sign and translation.
pub fn isometry_match(a: &[Scalar], b: &[Scalar]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::TooFewVertices { needed: 2, got: a.len() });
    }
    let Some(j) = (1..a.len()).find(|&j| a[j] != a[0]) else {
        return Ok(b.iter().all(|x| *x == b[0]));
    };
    let da = &a[j] - &a[0];
    let db = &b[j] - &b[0];
    let sign = if db == da {
        Scalar::one()
    } else if db == -da.clone() {
        -Scalar::one()
    } else {
        return Ok(false);
    };
    let t = &b[0] - &(&sign * &a[0]);
    Ok(a.iter().zip(b).all(|(x, y)| *y == &(&sign * x) + &t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::PointConfig;

    fn ints(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::from(x)).collect()
    }

    #[test]
    fn int_set_examples() {
        let cfg = PointConfig::line_from_integers(&(0..10).collect::<Vec<_>>()).unwrap();
        let m = MeasurementSet::complete_from(&cfg);
        let g = MeasurementGraph::new(&m).unwrap();
        let (eu, ev) = (g.est_from(0).unwrap(), g.est_from(9).unwrap());
        assert_eq!(int_set(0, 9, &eu, &ev, eu[9].as_ref().unwrap()), (1..9).collect::<Vec<_>>());
        let e1 = g.est_from(1).unwrap();
        assert!(int_set(0, 1, &eu, &e1, eu[1].as_ref().unwrap()).is_empty());
    }

    #[test]
    fn int_set_with_inflated_estimate() {
        // u=0 at 0, v=1 at 10; the only u-v walk detours through 2 at 20
        let cfg = PointConfig::line_from_integers(&[0, 10, 20, 3, 5, 7]).unwrap();
        let pairs = [(0, 2), (2, 1), (0, 3), (3, 4), (4, 5)];
        let m = MeasurementSet::from_config_pairs(&cfg, pairs).unwrap();
        let g = MeasurementGraph::new(&m).unwrap();
        let (eu, ev) = (g.est_from(0).unwrap(), g.est_from(1).unwrap());
        let duv = eu[1].clone().unwrap();
        assert_eq!(duv, Scalar::from(30));
        assert_eq!(int_set(0, 1, &eu, &ev, &duv), vec![2]);
    }

    #[test]
    fn complete_measurements_embed_exactly() {
        let xs: Vec<i64> = (0..40).map(|k| (k * 37) % 101).collect();
        let cfg = PointConfig::line_from_integers(&xs).unwrap();
        let m = MeasurementSet::complete_from(&cfg);
        // guard fires once u and v have half the points between them
        let res = algorithm1_with_rounds(&m, 3, Some(200)).unwrap();
        assert!(res.is_success());
        assert!(isometry_match(cfg.positions(), res.emb.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn disconnected_measurements_fail() {
        let cfg = PointConfig::line_from_integers(&(0..20).collect::<Vec<_>>()).unwrap();
        let pairs = (0..10).flat_map(|i| (i + 1..10).map(move |j| (i, j)));
        let m = MeasurementSet::from_config_pairs(&cfg, pairs).unwrap();
        let res = algorithm1(&m, 1).unwrap();
        assert_eq!(res.status, EmbeddingStatus::Failed);
        assert_eq!(res.iterations_used, default_rounds(20));
        assert!(res.emb.is_none());
    }

    #[test]
    fn too_small_is_rejected() {
        assert!(algorithm1(&MeasurementSet::new(8), 0).is_err());
    }

    #[test]
    fn isometry_examples() {
        let a = ints(&[3, 9, -4, 0]);
        assert!(isometry_match(&a, &a).unwrap());
        let reflected: Vec<Scalar> = a.iter().map(|x| &Scalar::from(7) - x).collect();
        assert!(isometry_match(&a, &reflected).unwrap());
        let mut swapped = a.clone();
        swapped.swap(1, 2);
        assert!(!isometry_match(&a, &swapped).unwrap());
        assert!(isometry_match(&a[..1], &a[..1]).is_err());
        assert!(isometry_match(&a, &a[..3]).is_err());
    }
}
