//! Monotone paths in random graphs.
//!
//! A path is monotone when its vertex indices strictly increase. Everything
//! here is a single ascending sweep over the vertices, which is what makes the
//! threshold simulations at `n = 10^4` cheap.

use num_bigint::BigInt;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::Scalar;
use crate::rng::{derive_seed, for_each_random_pair, rng_from_seed};

fn check_vertex(g: &Graph, v: usize) -> Result<()> {
    if v >= g.n() {
        return Err(Error::IndexOutOfRange { index: v, n: g.n() });
    }
    Ok(())
}

/// Ascending-path reachability from `source`: entry `j` is true iff
/// `j == source` or some neighbour `i` of `j` with `source <= i < j` is.
fn reach_from(g: &Graph, source: usize, last: usize) -> Vec<bool> {
    let mut reach = vec![false; last + 1];
    reach[source] = true;
    for j in source + 1..=last {
        reach[j] = g.neighbors(j).iter().take_while(|&&i| i < j).any(|&i| i >= source && reach[i]);
    }
    reach
}

/// True iff `source` and `target` are joined by a path with strictly
/// increasing indices. The endpoints may be given in either order.
pub fn has_monotone_path(g: &Graph, source: usize, target: usize) -> Result<bool> {
    check_vertex(g, source)?;
    check_vertex(g, target)?;
    let (s, t) = (source.min(target), source.max(target));
    Ok(reach_from(g, s, t)[t])
}

/// Number of vertices `>= source` reachable from `source` by ascending paths,
/// the source included.
pub fn monotone_reach_count(g: &Graph, source: usize) -> Result<usize> {
    check_vertex(g, source)?;
    Ok(reach_from(g, source, g.n() - 1).into_iter().filter(|&r| r).count())
}

/// Number of distinct ascending paths from `source` to `target`.
pub fn count_monotone_paths(g: &Graph, source: usize, target: usize) -> Result<BigInt> {
    check_vertex(g, source)?;
    check_vertex(g, target)?;
    let (s, t) = (source.min(target), source.max(target));
    let mut count = vec![BigInt::from(0); t + 1];
    count[s] = BigInt::one();
    for j in s + 1..=t {
        let mut c = BigInt::from(0);
        for &i in g.neighbors(j).iter().take_while(|&&i| i < j) {
            if i >= s {
                c += &count[i];
            }
        }
        count[j] = c;
    }
    Ok(std::mem::take(&mut count[t]))
}

fn check_probability(p: &Scalar) -> Result<()> {
    if p.is_negative() || *p > Scalar::one() {
        return Err(Error::InvalidProbability(p.to_string()));
    }
    Ok(())
}

/// Expected number of ascending paths from the first to the last vertex of
/// `G(n, p)`: `p (1 + p)^(n - 2)`, exactly.
pub fn first_moment_bound(n: usize, p: &Scalar) -> Result<Scalar> {
    check_probability(p)?;
    if n < 2 {
        return Ok(Scalar::zero());
    }
    Ok(p * &(&Scalar::one() + p).pow((n - 2) as u32))
}

/// Floating-point counterpart of [`first_moment_bound`] for large `n`.
pub fn first_moment_bound_f64(n: usize, p: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    p * ((n - 2) as f64 * p.ln_1p()).exp()
}

/// Samples `G(n, p)` with a fixed seed.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut adj = vec![Vec::new(); n];
    let mut rng = rng_from_seed(seed);
    for_each_random_pair(n, p, &mut rng, |i, j| {
        adj[i].push(j);
        adj[j].push(i);
    });
    for list in &mut adj {
        list.sort_unstable();
    }
    Graph::from_raw_adjacency(adj)
}

/// Whether a fresh `G(n, p)` (with this seed) has an ascending path from the
/// first vertex to the last. Streams the pairs instead of storing the graph.
pub fn gnp_has_spanning_monotone_path(n: usize, p: f64, seed: u64) -> bool {
    if n < 2 {
        return n == 1;
    }
    let mut reach = vec![false; n];
    reach[0] = true;
    let mut rng = rng_from_seed(seed);
    // pairs arrive grouped by larger endpoint, so reach[i] is final for i < j
    for_each_random_pair(n, p, &mut rng, |i, j| {
        if reach[i] {
            reach[j] = true;
        }
    });
    reach[n - 1]
}

/// One row of a threshold sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub epsilon: Scalar,
    /// Edge probability actually used, after clipping to `[0, 1]`.
    pub p: f64,
    pub clipped: bool,
    pub successes: u64,
    pub trials: u64,
}

impl SweepPoint {
    pub fn fraction(&self) -> Scalar {
        Scalar::ratio(self.successes as i64, self.trials as i64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdSweep {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub points: Vec<SweepPoint>,
}

/// `(1 + eps) ln(n) / n`, clipped to `[0, 1]`; the flag reports clipping.
pub fn threshold_probability(n: usize, epsilon: &Scalar) -> (f64, bool) {
    let raw = (1.0 + epsilon.to_f64()) * (n as f64).ln() / n as f64;
    let p = raw.clamp(0.0, 1.0);
    (p, p != raw)
}

/// For each `eps`, the number of `trials` samples of `G(n, (1+eps) ln n / n)`
/// with an ascending path from the first vertex to the last. Trial `t` uses
/// seed `derive_seed(seed, t)` for every `eps`, and the result does not depend
/// on how trials are scheduled across threads.
pub fn threshold_sweep(n: usize, epsilons: &[Scalar], trials: u64, seed: u64) -> Result<ThresholdSweep> {
    if n < 10 {
        return Err(Error::TooFewVertices { needed: 10, got: n });
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let points = epsilons
        .iter()
        .map(|eps| {
            let (p, clipped) = threshold_probability(n, eps);
            let successes = (0..trials)
                .into_par_iter()
                .map(|t| u64::from(gnp_has_spanning_monotone_path(n, p, derive_seed(seed, t))))
                .sum();
            SweepPoint { epsilon: eps.clone(), p, clipped, successes, trials }
        })
        .collect();
    Ok(ThresholdSweep { n, trials, seed, points })
}

/// True iff every pair `i < j` with `8 (j - i) >= n` is joined by an
/// ascending path.
pub fn covers_far_pairs(g: &Graph) -> bool {
    let n = g.n();
    let gap = n.div_ceil(8).max(1);
    (0..n.saturating_sub(gap)).all(|s| {
        let reach = reach_from(g, s, n - 1);
        reach[s + gap..].iter().all(|&r| r)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageResult {
    pub p: f64,
    pub successes: u64,
    pub trials: u64,
}

impl CoverageResult {
    pub fn fraction(&self) -> Scalar {
        Scalar::ratio(self.successes as i64, self.trials as i64)
    }
}

/// Fraction of `G(n, C ln(n) / n)` samples in which all pairs at index
/// distance at least `n/8` are joined by ascending paths.
pub fn pair_coverage(n: usize, c: f64, trials: u64, seed: u64) -> Result<CoverageResult> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    if n < 2 || trials == 0 {
        return Err(Error::InvalidArgument("need n >= 2 and at least one trial".into()));
    }
    let p = (c * (n as f64).ln() / n as f64).min(1.0);
    let successes =
        (0..trials).into_par_iter().map(|t| u64::from(covers_far_pairs(&sample_gnp(n, p, derive_seed(seed, t))))).sum();
    Ok(CoverageResult { p, successes, trials })
}

/// A rooted tree given by a parent array; the root has no parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledTree {
    parent: Vec<Option<usize>>,
    root: usize,
    /// Vertices in breadth-first order from the root.
    bfs: Vec<usize>,
    depth: Vec<usize>,
}

impl LabelledTree {
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        let &[root] = roots.as_slice() else {
            return Err(Error::InvalidArgument(format!("a tree needs exactly one root, found {}", roots.len())));
        };
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::IndexOutOfRange { index: p, n });
                }
                children[p].push(v);
            }
        }
        let mut bfs = vec![root];
        let mut depth = vec![0; n];
        let mut head = 0;
        while head < bfs.len() {
            let v = bfs[head];
            head += 1;
            for &c in &children[v] {
                depth[c] = depth[v] + 1;
                bfs.push(c);
            }
        }
        if bfs.len() != n {
            return Err(Error::InvalidArgument("parent array contains a cycle".into()));
        }
        Ok(LabelledTree { parent, root, bfs, depth })
    }

    pub fn single() -> Self {
        Self::from_parents(vec![None]).expect("valid tree")
    }

    pub fn star(leaves: usize) -> Self {
        let parent = std::iter::once(None).chain(std::iter::repeat(Some(0)).take(leaves)).collect();
        Self::from_parents(parent).expect("valid tree")
    }

    /// Complete binary tree with `depth + 1` levels.
    pub fn complete_binary(depth: u32) -> Self {
        let n = (1usize << (depth + 1)) - 1;
        Self::from_parents((0..n).map(|v| v.checked_sub(1).map(|w| w / 2)).collect()).expect("valid tree")
    }

    /// Random recursive tree: vertex `v` attaches to a uniform earlier vertex.
    pub fn random_recursive(n: usize, seed: u64) -> Self {
        assert!(n >= 1, "a tree has at least one vertex");
        let mut rng = rng_from_seed(seed);
        let parent = (0..n).map(|v| (v > 0).then(|| rng.gen_range(0..v))).collect();
        Self::from_parents(parent).expect("valid tree")
    }

    /// Galton–Watson tree with Poisson(`mu`) offspring, cut at depth
    /// `max_depth`.
    pub fn galton_watson(mu: f64, max_depth: usize, seed: u64) -> Result<Self> {
        let offspring = Poisson::new(mu).map_err(|e| Error::InvalidArgument(format!("Poisson mean {mu}: {e}")))?;
        let mut rng = rng_from_seed(seed);
        let mut parent = vec![None];
        let mut frontier = vec![0usize];
        for _ in 0..max_depth {
            let mut next = Vec::new();
            for &v in &frontier {
                let k = offspring.sample(&mut rng) as usize;
                for _ in 0..k {
                    next.push(parent.len());
                    parent.push(Some(v));
                }
            }
            frontier = next;
        }
        Self::from_parents(parent)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// `r_i`: the number of vertices at distance `i` from the root.
    pub fn level_sizes(&self) -> Vec<usize> {
        let height = self.depth.iter().copied().max().unwrap_or(0);
        let mut r = vec![0; height + 1];
        for &d in &self.depth {
            r[d] += 1;
        }
        r
    }

    /// `sum_i r_i / i!`, the expected number of vertices whose root path has
    /// increasing labels.
    pub fn exact_monotone_mean(&self) -> Scalar {
        let mut factorial = BigInt::one();
        let mut total = Scalar::zero();
        for (i, &r) in self.level_sizes().iter().enumerate() {
            if i > 0 {
                factorial *= i;
            }
            total = total + Scalar::from_bigints(BigInt::from(r), factorial.clone());
        }
        total
    }

    /// `|M_pi|` for a labelling with the root's label minimal.
    pub fn increasing_count(&self, label: &[usize]) -> usize {
        let mut good = vec![false; self.len()];
        let mut count = 0;
        for &v in &self.bfs {
            good[v] = match self.parent[v] {
                None => true,
                Some(p) => good[p] && label[v] > label[p],
            };
            count += usize::from(good[v]);
        }
        count
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeMeanEstimate {
    /// Sample mean of `|M_pi|`.
    pub mean: Scalar,
    pub std_error: f64,
    pub exact: Scalar,
    pub samples: u64,
}

impl TreeMeanEstimate {
    /// `|mean - exact|` in units of the standard error; 0 when both the
    /// deviation and the error vanish.
    pub fn z_score(&self) -> f64 {
        let dev = (&self.mean - &self.exact).abs().to_f64();
        if dev == 0.0 {
            0.0
        } else {
            dev / self.std_error
        }
    }
}

/// Monte Carlo estimate of `E|M_pi|` over uniform labellings `pi` with
/// `pi(root) = 1`.
pub fn labelled_tree_monotone_mean(t: &LabelledTree, samples: u64, seed: u64) -> Result<TreeMeanEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let n = t.len();
    let mut rng = rng_from_seed(seed);
    let mut others: Vec<usize> = (1..n).collect();
    let mut label = vec![0usize; n];
    let (mut sum, mut sum_sq) = (0u128, 0u128);
    for _ in 0..samples {
        others.shuffle(&mut rng);
        let mut it = others.iter();
        for v in 0..n {
            label[v] = if v == t.root { 0 } else { *it.next().expect("n - 1 labels") };
        }
        let c = t.increasing_count(&label) as u128;
        sum += c;
        sum_sq += c * c;
    }
    let s = samples as f64;
    let mean_f = sum as f64 / s;
    let var = if samples > 1 { ((sum_sq as f64) - s * mean_f * mean_f).max(0.0) / (s - 1.0) } else { 0.0 };
    Ok(TreeMeanEstimate {
        mean: Scalar::from_bigints(BigInt::from(sum), BigInt::from(samples)),
        std_error: (var / s).sqrt(),
        exact: t.exact_monotone_mean(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_examples() {
        let g = Graph::path(3);
        assert!(has_monotone_path(&g, 0, 2).unwrap());
        // only route 0-2-1 climbs past the target
        let g = Graph::from_edges(3, [(0, 2), (2, 1)]).unwrap();
        assert!(!has_monotone_path(&g, 0, 1).unwrap());
        assert!(has_monotone_path(&g, 1, 2).unwrap());
        let k = Graph::complete(6);
        for i in 0..6 {
            for j in 0..6 {
                assert!(has_monotone_path(&k, i, j).unwrap());
            }
        }
        assert!(has_monotone_path(&k, 0, 6).is_err());
    }

    #[test]
    fn reach_counts() {
        assert_eq!(monotone_reach_count(&Graph::empty(5), 2).unwrap(), 1);
        assert_eq!(monotone_reach_count(&Graph::complete(7), 2).unwrap(), 5);
        assert_eq!(monotone_reach_count(&Graph::path(4), 0).unwrap(), 4);
    }

    #[test]
    fn path_counts_on_complete_graph() {
        // every subset of the interior gives one ascending path
        let g = Graph::complete(8);
        assert_eq!(count_monotone_paths(&g, 0, 7).unwrap(), BigInt::from(64));
    }

    #[test]
    fn first_moment_examples() {
        assert_eq!(first_moment_bound(10, &Scalar::zero()).unwrap(), Scalar::zero());
        assert_eq!(first_moment_bound(2, &Scalar::ratio(1, 3)).unwrap(), Scalar::ratio(1, 3));
        assert_eq!(first_moment_bound(4, &Scalar::half()).unwrap(), Scalar::ratio(9, 8));
        assert!(first_moment_bound(4, &Scalar::from(2)).is_err());
        assert!((first_moment_bound_f64(4, 0.5) - 1.125).abs() < 1e-12);
    }

    #[test]
    fn streaming_matches_stored_graph() {
        for seed in 0..30 {
            let g = sample_gnp(60, 0.08, seed);
            assert_eq!(gnp_has_spanning_monotone_path(60, 0.08, seed), has_monotone_path(&g, 0, 59).unwrap());
        }
    }

    #[test]
    fn sweep_extremes() {
        let eps = [Scalar::from(-1), Scalar::from(1000)];
        let sweep = threshold_sweep(50, &eps, 20, 4).unwrap();
        assert_eq!(sweep.points[0].successes, 0);
        assert_eq!(sweep.points[1].successes, 20);
        assert!(sweep.points[1].clipped);
        assert!(threshold_sweep(5, &eps, 1, 0).is_err());
    }

    #[test]
    fn coverage_extremes() {
        assert_eq!(pair_coverage(64, 1e6, 3, 1).unwrap().fraction(), Scalar::one());
        assert_eq!(pair_coverage(200, 0.1, 10, 1).unwrap().successes, 0);
    }

    #[test]
    fn tree_examples() {
        let single = LabelledTree::single();
        let est = labelled_tree_monotone_mean(&single, 10, 0).unwrap();
        assert_eq!((est.mean, est.exact), (Scalar::one(), Scalar::one()));

        let star = LabelledTree::star(3);
        assert_eq!(star.level_sizes(), vec![1, 3]);
        let est = labelled_tree_monotone_mean(&star, 100, 0).unwrap();
        assert_eq!((est.mean, est.exact), (Scalar::from(4), Scalar::from(4)));

        let bin = LabelledTree::complete_binary(2);
        assert_eq!(bin.level_sizes(), vec![1, 2, 4]);
        assert_eq!(bin.exact_monotone_mean(), Scalar::from(5));
    }

    #[test]
    fn tree_validation() {
        assert!(LabelledTree::from_parents(vec![None, None]).is_err());
        assert!(LabelledTree::from_parents(vec![None, Some(2), Some(1)]).is_err());
        assert!(LabelledTree::from_parents(vec![Some(1), None, Some(7)]).is_err());
        let t = LabelledTree::from_parents(vec![Some(1), None, Some(0)]).unwrap();
        assert_eq!((t.root(), t.level_sizes()), (1, vec![1, 1, 1]));
    }

    #[test]
    fn galton_watson_depth_is_bounded() {
        let t = LabelledTree::galton_watson(1.5, 3, 11).unwrap();
        assert!(t.level_sizes().len() <= 4);
        assert!(LabelledTree::galton_watson(-1.0, 3, 0).is_err());
    }
}
