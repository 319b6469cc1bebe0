//! Shortest-path distance estimates over the weighted measurement graph.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::measurement::MeasurementSet;
use crate::numeric::{small_fraction, sums_fit_in_bits, ExactValue, Lattice, Scalar};

/// Compressed adjacency with one weight per arc.
#[derive(Clone, Debug)]
pub(crate) struct Csr<W> {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<W>,
}

impl<W: ExactValue> Csr<W> {
    fn build(n: usize, edges: Vec<(usize, usize, W)>) -> Self {
        let mut degree = vec![0usize; n + 1];
        for &(i, j, _) in &edges {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let total = offsets[n];
        let mut targets = vec![0u32; total];
        let mut weights = vec![W::zero(); total];
        for (i, j, w) in edges {
            targets[fill[i]] = j as u32;
            weights[fill[i]] = w.clone();
            fill[i] += 1;
            targets[fill[j]] = i as u32;
            weights[fill[j]] = w;
            fill[j] += 1;
        }
        Csr { offsets, targets, weights }
    }

    pub(crate) fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Single-source shortest paths (Dijkstra); `None` marks unreachable.
    pub(crate) fn shortest_paths(&self, source: usize) -> Vec<Option<W>> {
        let mut dist: Vec<Option<W>> = vec![None; self.n()];
        let mut done = vec![false; self.n()];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(W::zero());
        heap.push(Reverse((W::zero(), source)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for a in self.offsets[v]..self.offsets[v + 1] {
                let u = self.targets[a] as usize;
                if done[u] {
                    continue;
                }
                let cand = d.plus(&self.weights[a]);
                if dist[u].as_ref().map_or(true, |cur| cand < *cur) {
                    dist[u] = Some(cand.clone());
                    heap.push(Reverse((cand, u)));
                }
            }
        }
        dist
    }
}

/// The measurement graph prepared for repeated shortest-path queries.
///
/// When all weights share a denominator of at most 64 bits the search runs on
/// exact integer multiples of that denominator (in an `i64` when path lengths
/// stay small enough); otherwise on [`Scalar`]s.
#[derive(Clone, Debug)]
pub struct MeasurementGraph {
    pub(crate) inner: Weights,
}

#[derive(Clone, Debug)]
pub(crate) enum Weights {
    Small { csr: Csr<i64>, lattice: Lattice },
    Lattice { csr: Csr<i128>, lattice: Lattice },
    Exact(Csr<Scalar>),
}

impl MeasurementGraph {
    pub fn new(m: &MeasurementSet) -> Result<Self> {
        let n = m.n();
        if u32::try_from(n).is_err() {
            return Err(Error::InvalidArgument(format!("too many vertices: {n}")));
        }
        // any estimate, and any sum or difference of two, stays within
        // 2n edge weights
        let terms = 2 * n + 2;
        let fracs: Option<Vec<(i128, u64)>> = m.weights().map(small_fraction).collect();
        let negative = match &fracs {
            Some(f) => f.iter().any(|&(k, _)| k < 0),
            None => m.weights().any(|w| w.is_negative()),
        };
        if negative {
            let w = m.weights().find(|w| w.is_negative()).expect("negative weight present");
            return Err(Error::NegativeWeight(w.to_string()));
        }
        let inner = match fracs.and_then(|f| Lattice::fit_fractions(&f, terms)) {
            Some((lattice, coords)) => {
                let max_abs = coords.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0);
                let pairs = m.iter().map(|(i, j, _)| (i, j));
                if sums_fit_in_bits(max_abs, terms, 62) {
                    let edges = pairs.zip(coords).map(|((i, j), k)| (i, j, k as i64)).collect();
                    Weights::Small { csr: Csr::build(n, edges), lattice }
                } else {
                    let edges = pairs.zip(coords).map(|((i, j), k)| (i, j, k)).collect();
                    Weights::Lattice { csr: Csr::build(n, edges), lattice }
                }
            }
            None => Weights::Exact(Csr::build(n, m.iter().map(|(i, j, w)| (i, j, w.clone())).collect())),
        };
        Ok(MeasurementGraph { inner })
    }

    pub fn n(&self) -> usize {
        match &self.inner {
            Weights::Small { csr, .. } => csr.n(),
            Weights::Lattice { csr, .. } => csr.n(),
            Weights::Exact(csr) => csr.n(),
        }
    }

    pub fn is_lattice(&self) -> bool {
        !matches!(self.inner, Weights::Exact(_))
    }

    pub fn est_from(&self, source: usize) -> Result<Vec<Option<Scalar>>> {
        let n = self.n();
        if source >= n {
            return Err(Error::IndexOutOfRange { index: source, n });
        }
        Ok(match &self.inner {
            Weights::Small { csr, lattice } => {
                csr.shortest_paths(source).into_iter().map(|d| d.map(|k| lattice.lift(k.into()))).collect()
            }
            Weights::Lattice { csr, lattice } => {
                csr.shortest_paths(source).into_iter().map(|d| d.map(|k| lattice.lift(k))).collect()
            }
            Weights::Exact(csr) => csr.shortest_paths(source),
        })
    }

    pub fn est_table(&self, sources: &[usize]) -> Result<EstTable> {
        let rows = sources.iter().map(|&s| self.est_from(s)).collect::<Result<Vec<_>>>()?;
        Ok(EstTable { sources: sources.to_vec(), rows })
    }
}

/// Shortest-path estimates from a set of sources.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EstTable {
    sources: Vec<usize>,
    rows: Vec<Vec<Option<Scalar>>>,
}

impl EstTable {
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    /// Estimate from `source` to `v`; `None` if `source` is not a source of
    /// this table, `Some(None)` if `v` is unreachable.
    pub fn get(&self, source: usize, v: usize) -> Option<Option<&Scalar>> {
        let row = self.sources.iter().position(|&s| s == source)?;
        Some(self.rows[row][v].as_ref())
    }

    pub fn row(&self, source: usize) -> Option<&[Option<Scalar>]> {
        let row = self.sources.iter().position(|&s| s == source)?;
        Some(&self.rows[row])
    }
}

/// Shortest-path distances from `source` in the measurement graph of `m`.
pub fn est_from(m: &MeasurementSet, source: usize) -> Result<Vec<Option<Scalar>>> {
    MeasurementGraph::new(m)?.est_from(source)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::PointConfig;

    fn int(v: i64) -> Option<Scalar> {
        Some(Scalar::from(v))
    }

    #[test]
    fn path_graph() {
        let m = MeasurementSet::from_edges(3, [(0, 1, Scalar::from(1)), (1, 2, Scalar::from(2))]).unwrap();
        assert_eq!(est_from(&m, 0).unwrap(), vec![int(0), int(1), int(3)]);
    }

    #[test]
    fn unreachable_is_none() {
        let m = MeasurementSet::from_edges(3, [(0, 1, Scalar::from(1))]).unwrap();
        assert_eq!(est_from(&m, 0).unwrap()[2], None);
    }

    #[test]
    fn monotone_route_through_middle() {
        let cfg = PointConfig::line_from_integers(&[0, 5, 1]).unwrap();
        let m = MeasurementSet::from_config_pairs(&cfg, [(0, 2), (2, 1)]).unwrap();
        assert_eq!(est_from(&m, 0).unwrap()[1], int(5));
    }

    #[test]
    fn rejects_negative_weight_and_bad_source() {
        let m = MeasurementSet::from_edges(2, [(0, 1, Scalar::from(-1))]).unwrap();
        assert!(matches!(est_from(&m, 0), Err(Error::NegativeWeight(_))));
        let ok = MeasurementSet::new(2);
        assert!(est_from(&ok, 5).is_err());
    }

    #[test]
    fn exact_and_lattice_paths_agree() {
        let big = num_bigint::BigInt::from(1u8) << 80usize;
        let xs: Vec<Scalar> =
            (0..8i64).map(|k| Scalar::from_bigints(num_bigint::BigInt::from(k * k + 1), big.clone())).collect();
        let cfg = PointConfig::line(xs.clone()).unwrap();
        let pairs = [(0, 3), (3, 7), (0, 1), (1, 2), (2, 7), (4, 5), (5, 6), (6, 4)];
        let m = MeasurementSet::from_config_pairs(&cfg, pairs).unwrap();
        let exact = MeasurementGraph::new(&m).unwrap();
        assert!(!exact.is_lattice());

        let small: Vec<Scalar> = (0..8i64).map(|k| Scalar::from(k * k + 1)).collect();
        let cfg_small = PointConfig::line(small).unwrap();
        let m_small = MeasurementSet::from_config_pairs(&cfg_small, pairs).unwrap();
        let lattice = MeasurementGraph::new(&m_small).unwrap();
        assert!(lattice.is_lattice());

        let scale = Scalar::from_bigints(big, 1.into());
        for s in 0..8 {
            let a: Vec<Option<Scalar>> =
                exact.est_from(s).unwrap().into_iter().map(|d| d.map(|x| x * &scale)).collect();
            assert_eq!(a, lattice.est_from(s).unwrap());
        }
    }

    #[test]
    fn est_table_lookup() {
        let m = MeasurementSet::from_edges(3, [(0, 1, Scalar::from(1)), (1, 2, Scalar::from(2))]).unwrap();
        let table = MeasurementGraph::new(&m).unwrap().est_table(&[2, 0]).unwrap();
        assert_eq!(table.get(0, 2), Some(Some(&Scalar::from(3))));
        assert_eq!(table.get(2, 2), Some(Some(&Scalar::zero())));
        assert_eq!(table.get(1, 2), None);
    }
}
