//! Large cliques in graphs where non-adjacent pairs share few neighbours.
//!
//! The pipeline prunes low-degree vertices, finds an independent set that no
//! 1-for-2 swap can enlarge, and returns the largest `B_s ∪ {s}`, where `B_s`
//! is the set of vertices whose only neighbour in the independent set is `s`.
//! Swap-optimality makes every such set a clique: two non-adjacent members of
//! `B_s` could replace `s`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::determination::closure;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::measurement::MeasurementSet;
use crate::numeric::Scalar;
use crate::rng::rng_from_seed;
use crate::space::Space;

/// Seed used by [`reconstruct_dense`] for its independent-set search.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Vertices surviving repeated deletion of vertices whose current degree is
/// below `|E| / n`, half the original average degree. Sorted ascending.
///
/// The surviving set is the largest induced subgraph with minimum degree at
/// least the threshold, so it does not depend on deletion order.
pub fn prune_min_degree(g: &Graph) -> Vec<usize> {
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    let edges = g.edge_count();
    // degree < |E|/n  <=>  degree * n < |E|
    let below = |deg: usize| deg * n < edges;
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| below(degree[v])).collect();
    for &v in &stack {
        removed[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in g.neighbors(v) {
            if !removed[u] {
                degree[u] -= 1;
                if below(degree[u]) {
                    removed[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&v| !removed[v]).collect();
    assert!(edges == 0 || !kept.is_empty(), "pruning emptied a graph with edges");
    kept
}

/// Counts, for every vertex outside `members`, its neighbours inside, and
/// remembers one of them.
fn membership_counts(g: &Graph, in_set: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let n = g.n();
    let mut count = vec![0usize; n];
    let mut owner = vec![usize::MAX; n];
    for s in (0..n).filter(|&v| in_set[v]) {
        for &u in g.neighbors(s) {
            count[u] += 1;
            owner[u] = s;
        }
    }
    (count, owner)
}

/// Looks for two non-adjacent vertices in `candidates`.
fn non_adjacent_pair(g: &Graph, candidates: &[usize], mark: &mut [bool]) -> Option<(usize, usize)> {
    if candidates.len() < 2 {
        return None;
    }
    for &c in candidates {
        mark[c] = true;
    }
    let mut found = None;
    for &x in candidates {
        let inside = g.neighbors(x).iter().filter(|&&y| mark[y]).count();
        if inside + 1 < candidates.len() {
            let y = candidates.iter().copied().find(|&y| y != x && !g.has_edge(x, y)).expect("a non-neighbour exists");
            found = Some((x, y));
            break;
        }
    }
    for &c in candidates {
        mark[c] = false;
    }
    found
}

/// An independent set admitting no improving 1-for-2 swap.
///
/// Greedy maximal start in ascending-degree order (ties permuted by `seed`),
/// then repeated swaps `I ∪ {x, y} \ {s}` for non-adjacent `x, y` whose unique
/// neighbour in `I` is `s`, each followed by re-maximalisation. Every swap
/// grows the set, so at most `n` rounds run. Returned sorted.
pub fn swap_optimal_independent_set(g: &Graph, seed: u64) -> Vec<usize> {
    let n = g.n();
    let mut tie: Vec<usize> = (0..n).collect();
    tie.shuffle(&mut rng_from_seed(seed));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (g.degree(v), tie[v]));

    let mut in_set = vec![false; n];
    let mut blocked = vec![0usize; n];
    let add = |v: usize, in_set: &mut Vec<bool>, blocked: &mut Vec<usize>| {
        in_set[v] = true;
        for &u in g.neighbors(v) {
            blocked[u] += 1;
        }
    };
    for &v in &order {
        if !in_set[v] && blocked[v] == 0 {
            add(v, &mut in_set, &mut blocked);
        }
    }

    let mut mark = vec![false; n];
    loop {
        let (count, owner) = membership_counts(g, &in_set);
        let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for u in 0..n {
            if !in_set[u] && count[u] == 1 {
                buckets.entry(owner[u]).or_default().push(u);
            }
        }
        let swap = buckets.iter().find_map(|(&s, cands)| non_adjacent_pair(g, cands, &mut mark).map(|p| (s, p)));
        let Some((s, (x, y))) = swap else { break };
        in_set[s] = false;
        in_set[x] = true;
        in_set[y] = true;
        // re-maximalise in the original greedy order
        let (count, _) = membership_counts(g, &in_set);
        let mut blocked = count;
        for &v in &order {
            if !in_set[v] && blocked[v] == 0 {
                add(v, &mut in_set, &mut blocked);
            }
        }
    }
    (0..n).filter(|&v| in_set[v]).collect()
}

/// `B_s = { u : Γ(u) ∩ I = {s} }` for every `s` in the independent set `set`.
pub fn unique_neighbor_sets(g: &Graph, set: &[usize]) -> Result<BTreeMap<usize, Vec<usize>>> {
    let n = g.n();
    let mut in_set = vec![false; n];
    for &s in set {
        if s >= n {
            return Err(Error::IndexOutOfRange { index: s, n });
        }
        in_set[s] = true;
    }
    if let Some((a, b)) = g.find_internal_edge(set) {
        return Err(Error::NotIndependent(a, b));
    }
    let (count, owner) = membership_counts(g, &in_set);
    let mut out: BTreeMap<usize, Vec<usize>> = set.iter().map(|&s| (s, Vec::new())).collect();
    for u in 0..n {
        if !in_set[u] && count[u] == 1 {
            out.get_mut(&owner[u]).expect("owner is in the set").push(u);
        }
    }
    Ok(out)
}

/// Everything [`extract_clique`] computed, in the input graph's labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueCertificate {
    pub k: usize,
    pub pruned_vertices: Vec<usize>,
    /// Minimum degree of the pruned induced subgraph.
    pub pruned_min_degree: usize,
    pub independent_set: Vec<usize>,
    pub b_sets: BTreeMap<usize, Vec<usize>>,
    /// Sorted, verified complete in the input graph.
    pub clique: Vec<usize>,
}

impl CliqueCertificate {
    /// `|E| / (4n)`, the size promised when the input has at least
    /// `8 n sqrt(k n)` edges and non-adjacent pairs share at most `k`
    /// neighbours.
    pub fn promised_size(g: &Graph) -> Scalar {
        Scalar::ratio(g.edge_count() as i64, 4 * g.n().max(1) as i64)
    }
}

/// True iff `|E| >= 8 n sqrt(k n)`, decided exactly as `|E|^2 >= 64 k n^3`.
pub fn meets_edge_threshold(n: usize, edges: usize, k: usize) -> bool {
    let (n, e, k) = (n as u128, edges as u128, k as u128);
    e * e >= 64 * k * n * n * n
}

/// Largest number of common neighbours over non-adjacent pairs.
pub fn max_nonadjacent_codegree(g: &Graph) -> usize {
    let n = g.n();
    let mut best = 0;
    let mut mark = vec![false; n];
    for i in 0..n {
        for &z in g.neighbors(i) {
            mark[z] = true;
        }
        for j in i + 1..n {
            if !g.has_edge(i, j) {
                let c = g.neighbors(j).iter().filter(|&&z| mark[z]).count();
                best = best.max(c);
            }
        }
        for &z in g.neighbors(i) {
            mark[z] = false;
        }
    }
    best
}

/// Prune, find a swap-optimal independent set on the pruned graph, and
/// return the largest `B_s ∪ {s}` (ties to the smallest `s`).
pub fn extract_clique(g: &Graph, k: usize, seed: u64) -> CliqueCertificate {
    let pruned = prune_min_degree(g);
    let sub = g.induced(&pruned);
    let local_set = swap_optimal_independent_set(&sub, seed);
    let local_b = unique_neighbor_sets(&sub, &local_set).expect("swap search returns an independent set");

    let to_global = |v: usize| pruned[v];
    let independent_set: Vec<usize> = local_set.iter().map(|&v| to_global(v)).collect();
    let b_sets: BTreeMap<usize, Vec<usize>> = local_b
        .iter()
        .map(|(&s, b)| (to_global(s), b.iter().map(|&u| to_global(u)).collect()))
        .collect();

    let mut clique: Vec<usize> = b_sets
        .iter()
        .fold(None::<(usize, &Vec<usize>)>, |best, (&s, b)| match best {
            Some((_, bb)) if bb.len() >= b.len() => best,
            _ => Some((s, b)),
        })
        .map(|(s, b)| b.iter().copied().chain(std::iter::once(s)).collect())
        .unwrap_or_default();
    clique.sort_unstable();
    assert!(g.is_clique(&clique), "B_s ∪ {{s}} is not complete; swap search is not optimal");

    CliqueCertificate {
        k,
        pruned_min_degree: sub.min_degree().unwrap_or(0),
        pruned_vertices: pruned,
        independent_set,
        b_sets,
        clique,
    }
}

/// `r² N / (r + (N - 1) k)`: the least size of a union of `N` sets of size
/// `r` whose pairwise intersections have at most `k` elements.
pub fn corradi_bound(r: u64, count: u64, k: u64) -> Result<Scalar> {
    if r == 0 || count == 0 {
        return Err(Error::InvalidArgument("r and N must be at least 1".into()));
    }
    let (r, count, k) = (r as i64, count as i64, k as i64);
    Ok(Scalar::ratio(r * r * count, r + (count - 1) * k))
}

/// Necessary conditions for global rigidity on the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RigidityReport {
    pub min_degree_at_least_two: bool,
    pub degree_two_independent: bool,
    pub average_degree_at_least_12_5: bool,
}

impl RigidityReport {
    /// A graph failing either structural condition is not globally rigid.
    pub fn certified_not_rigid(&self) -> bool {
        !(self.min_degree_at_least_two && self.degree_two_independent)
    }

    pub fn passes_all(&self) -> bool {
        self.min_degree_at_least_two && self.degree_two_independent && self.average_degree_at_least_12_5
    }
}

pub fn check_rigidity_necessary(g: &Graph) -> Result<RigidityReport> {
    let n = g.n();
    if n < 4 {
        return Err(Error::TooFewVertices { needed: 4, got: n });
    }
    let degree_two: Vec<usize> = (0..n).filter(|&v| g.degree(v) == 2).collect();
    Ok(RigidityReport {
        min_degree_at_least_two: g.min_degree().unwrap_or(0) >= 2,
        degree_two_independent: degree_two.iter().all(|&v| g.neighbors(v).iter().all(|&u| g.degree(u) != 2)),
        // 2|E| / n >= 12/5
        average_degree_at_least_12_5: 10 * g.edge_count() >= 12 * n,
    })
}

/// A vertex subset with all of its pairwise distances determined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseReconstruction {
    pub vertices: Vec<usize>,
    pub distances: MeasurementSet,
    pub certificate: CliqueCertificate,
}

/// Closes `m` under local determination and extracts a clique of the
/// determined graph. In the closed graph, pairs with `locality` common
/// neighbours are edges, so non-adjacent pairs share at most `locality - 1`.
pub fn reconstruct_dense(m: &MeasurementSet, space: Space) -> Result<DenseReconstruction> {
    let closed = closure(m, space)?;
    let g = closed.graph();
    let certificate = extract_clique(&g, space.locality() - 1, DEFAULT_SEED);
    let vertices = certificate.clique.clone();
    let mut distances = MeasurementSet::new(m.n());
    for (a, &u) in vertices.iter().enumerate() {
        for &v in &vertices[a + 1..] {
            let d = closed.get(u, v).expect("clique pairs are determined").clone();
            distances.insert(u, v, d)?;
        }
    }
    Ok(DenseReconstruction { vertices, distances, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::PointConfig;

    #[test]
    fn prune_examples() {
        assert_eq!(prune_min_degree(&Graph::complete(5)), vec![0, 1, 2, 3, 4]);
        // K_{1,9}: |E|/n = 0.9, leaves have degree 1
        assert_eq!(prune_min_degree(&Graph::star(9)).len(), 10);
        // K_4 plus pendant: |E|/n = 7/5, pendant degree 1 < 1.4
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        assert_eq!(prune_min_degree(&g), vec![0, 1, 2, 3]);
    }

    #[test]
    fn independent_set_examples() {
        assert_eq!(swap_optimal_independent_set(&Graph::complete(6), 3).len(), 1);
        assert_eq!(swap_optimal_independent_set(&Graph::empty(7), 3), (0..7).collect::<Vec<_>>());
        let c5 = Graph::cycle(5);
        for seed in 0..10 {
            let set = swap_optimal_independent_set(&c5, seed);
            assert_eq!(set.len(), 2);
            assert!(c5.find_internal_edge(&set).is_none());
        }
    }

    #[test]
    fn b_set_examples() {
        let star = Graph::star(4);
        let b = unique_neighbor_sets(&star, &[1, 2, 3, 4]).unwrap();
        assert!(b.values().all(Vec::is_empty));

        let path = Graph::path(3);
        let b = unique_neighbor_sets(&path, &[0, 2]).unwrap();
        assert!(b[&0].is_empty() && b[&2].is_empty());

        let two = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let b = unique_neighbor_sets(&two, &[0, 2]).unwrap();
        assert_eq!((b[&0].clone(), b[&2].clone()), (vec![1], vec![3]));

        assert_eq!(unique_neighbor_sets(&path, &[0, 1]), Err(Error::NotIndependent(0, 1)));
    }

    #[test]
    fn extract_clique_small_cases() {
        let k5 = extract_clique(&Graph::complete(5), 0, 1);
        assert_eq!(k5.clique, vec![0, 1, 2, 3, 4]);
        let empty = extract_clique(&Graph::empty(6), 0, 1);
        assert_eq!(empty.clique.len(), 1);
    }

    #[test]
    fn corradi_examples() {
        assert_eq!(corradi_bound(2, 1, 0).unwrap(), Scalar::from(2));
        assert_eq!(corradi_bound(3, 3, 1).unwrap(), Scalar::ratio(27, 5));
        assert_eq!(corradi_bound(5, 2, 5).unwrap(), Scalar::from(5));
        assert!(corradi_bound(0, 2, 5).is_err());
    }

    #[test]
    fn rigidity_examples() {
        let c4 = check_rigidity_necessary(&Graph::cycle(4)).unwrap();
        assert!(c4.min_degree_at_least_two && !c4.degree_two_independent && c4.certified_not_rigid());
        assert!(check_rigidity_necessary(&Graph::complete(4)).unwrap().passes_all());
        assert!(check_rigidity_necessary(&Graph::complete(3)).is_err());
    }

    #[test]
    fn edge_threshold_is_exact() {
        // 8 * 1600 * sqrt(1600) = 512000
        assert!(meets_edge_threshold(1600, 512_000, 1));
        assert!(!meets_edge_threshold(1600, 511_999, 1));
    }

    #[test]
    fn dense_reconstruction_examples() {
        let cfg = PointConfig::line_from_integers(&(0..10).collect::<Vec<_>>()).unwrap();
        let full = reconstruct_dense(&MeasurementSet::complete_from(&cfg), Space::Line).unwrap();
        assert_eq!(full.vertices.len(), 10);

        let matching = MeasurementSet::from_config_pairs(&cfg, (0..5).map(|i| (2 * i, 2 * i + 1))).unwrap();
        let r = reconstruct_dense(&matching, Space::Line).unwrap();
        assert_eq!(r.vertices.len(), 2);
        assert_eq!(r.distances.len(), 1);
    }
}
