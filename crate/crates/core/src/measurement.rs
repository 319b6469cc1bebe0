//! Measured distances: a weighted graph on `0..n`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::Scalar;
use crate::rng::{for_each_random_pair, rng_from_seed};
use crate::space::PointConfig;

fn ordered(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// A set of known pairs with their measured distances.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MeasurementSet {
    n: usize,
    edges: BTreeMap<(usize, usize), Scalar>,
}

impl MeasurementSet {
    pub fn new(n: usize) -> Self {
        MeasurementSet { n, edges: BTreeMap::new() }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let mut m = Self::new(n);
        for (i, j, w) in edges {
            m.insert(i, j, w)?;
        }
        Ok(m)
    }

    /// Every pair of `cfg`, with its true distance.
    pub fn complete_from(cfg: &PointConfig) -> Self {
        let n = cfg.len();
        let mut m = Self::new(n);
        for i in 0..n {
            for j in i + 1..n {
                m.edges.insert((i, j), cfg.space().metric(cfg.position(i), cfg.position(j)));
            }
        }
        m
    }

    /// The pairs of `cfg` listed in `pairs`, with their true distances.
    pub fn from_config_pairs<I>(cfg: &PointConfig, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut m = Self::new(cfg.len());
        for (i, j) in pairs {
            m.insert(i, j, cfg.distance(i, j)?)?;
        }
        Ok(m)
    }

    /// Adds a measurement. Re-inserting a pair with the same weight is a
    /// no-op; a different weight is an inconsistency.
    pub fn insert(&mut self, i: usize, j: usize, w: Scalar) -> Result<()> {
        for index in [i, j] {
            if index >= self.n {
                return Err(Error::IndexOutOfRange { index, n: self.n });
            }
        }
        if i == j {
            return Err(Error::SelfPair(i));
        }
        let key = ordered(i, j);
        match self.edges.get(&key) {
            Some(existing) if *existing != w => Err(Error::InconsistentInput { i: key.0, j: key.1 }),
            Some(_) => Ok(()),
            None => {
                self.edges.insert(key, w);
                Ok(())
            }
        }
    }

    /// Adds or overwrites a measurement, returning the previous value.
    pub fn set(&mut self, i: usize, j: usize, w: Scalar) -> Result<Option<Scalar>> {
        for index in [i, j] {
            if index >= self.n {
                return Err(Error::IndexOutOfRange { index, n: self.n });
            }
        }
        if i == j {
            return Err(Error::SelfPair(i));
        }
        Ok(self.edges.insert(ordered(i, j), w))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Scalar> {
        self.edges.get(&ordered(i, j))
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains_key(&ordered(i, j))
    }

    /// Measurements `(i, j, d)` with `i < j`, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + Clone + '_ {
        self.edges.iter().map(|(&(i, j), w)| (i, j, w))
    }

    pub fn weights(&self) -> impl Iterator<Item = &Scalar> + Clone + '_ {
        self.edges.values()
    }

    pub fn is_complete(&self) -> bool {
        self.n < 2 || self.edges.len() == self.n * (self.n - 1) / 2
    }

    /// The unweighted measurement graph.
    pub fn graph(&self) -> Graph {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in self.edges.keys() {
            adj[i].push(j);
            adj[j].push(i);
        }
        Graph::from_raw_adjacency(adj)
    }
}

/// Reveals each pair of `cfg` independently with probability `p`.
pub fn sample_measurements(cfg: &PointConfig, p: f64, seed: u64) -> Result<MeasurementSet> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p.to_string()));
    }
    let mut rng = rng_from_seed(seed);
    let mut m = MeasurementSet::new(cfg.len());
    let space = cfg.space();
    for_each_random_pair(cfg.len(), p, &mut rng, |i, j| {
        m.edges.insert((i, j), space.metric(cfg.position(i), cfg.position(j)));
    });
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: i64) -> PointConfig {
        PointConfig::line_from_integers(&(0..n).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn sampling_extremes() {
        let cfg = grid(20);
        assert!(sample_measurements(&cfg, 0.0, 1).unwrap().is_empty());
        let full = sample_measurements(&cfg, 1.0, 1).unwrap();
        assert_eq!(full.len(), 190);
        assert!(full.is_complete());
        assert!(sample_measurements(&cfg, 1.5, 1).is_err());
    }

    #[test]
    fn sampling_edge_count_is_binomial() {
        let m = sample_measurements(&grid(1000), 0.01, 42).unwrap();
        // Binomial(499500, 0.01): mean 4995, sd sqrt(4945.05) ~ 70.3
        let dev = (m.len() as f64 - 4995.0).abs();
        assert!(dev <= 4.0 * 4945.05f64.sqrt(), "edge count {}", m.len());
    }

    #[test]
    fn sampling_is_reproducible_and_weights_are_true_distances() {
        let cfg = grid(100);
        let a = sample_measurements(&cfg, 0.2, 9).unwrap();
        let b = sample_measurements(&cfg, 0.2, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_measurements(&cfg, 0.2, 10).unwrap());
        for (i, j, w) in a.iter() {
            assert_eq!(*w, cfg.distance(i, j).unwrap());
            assert!(w.is_positive());
        }
    }

    #[test]
    fn insert_validates() {
        let mut m = MeasurementSet::new(3);
        m.insert(2, 0, Scalar::one()).unwrap();
        assert_eq!(m.get(0, 2), Some(&Scalar::one()));
        m.insert(0, 2, Scalar::one()).unwrap();
        assert_eq!(m.insert(0, 2, Scalar::half()), Err(Error::InconsistentInput { i: 0, j: 2 }));
        assert_eq!(m.insert(1, 1, Scalar::one()), Err(Error::SelfPair(1)));
        assert!(m.insert(1, 3, Scalar::one()).is_err());
    }
}
