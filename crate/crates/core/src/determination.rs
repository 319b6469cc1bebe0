//! Local determination of distances from common witnesses, and the closure of
//! a measurement set under it.
//!
//! On the line a pair `(i, j)` with three common measured neighbours has a
//! forced distance; on the circle five are needed. With `f(z) = |d(i,z) -
//! d(z,j)|`, either every witness has the same `f` (and that is the
//! distance), or a witness minimising `f` sits between `i` and `j` and the
//! distance is `d(i,z) + d(z,j)` (on the circle, `1 - d(i,z) - d(z,j)` when
//! that sum reaches 1/2).

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::BuildHasherDefault;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::measurement::MeasurementSet;
use crate::numeric::{ExactValue, Lattice, Scalar};
use crate::space::Space;

type FixedState = BuildHasherDefault<DefaultHasher>;

/// A common neighbour `z` of the pair `(i, j)` with its two known distances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTriple {
    pub z: usize,
    pub d_iz: Scalar,
    pub d_zj: Scalar,
}

impl WitnessTriple {
    pub fn new(z: usize, d_iz: Scalar, d_zj: Scalar) -> Self {
        WitnessTriple { z, d_iz, d_zj }
    }
}

/// True iff the largest of the three values equals the sum of the other two.
pub fn triangle_equality<W: ExactValue>(a: &W, b: &W, c: &W) -> bool {
    let mut v = [a, b, c];
    v.sort();
    *v[2] == v[0].plus(v[1])
}

/// Core rule over sorted-by-`z` witnesses. Caller guarantees at least
/// `space.locality()` witnesses.
fn determine_sorted<W: ExactValue>(space: Space, witnesses: &[(usize, W, W)], one: &W, half: &W) -> W {
    let f = |w: &(usize, W, W)| w.1.abs_diff(&w.2);
    let first = f(&witnesses[0]);
    if witnesses.iter().all(|w| f(w) == first) {
        return first;
    }
    // min_by_key keeps the first minimum, i.e. the smallest z
    let best = witnesses.iter().min_by_key(|w| f(w)).expect("non-empty");
    let sum = best.1.plus(&best.2);
    match space {
        Space::Line => sum,
        Space::Circle if sum >= *half => one.minus(&sum),
        Space::Circle => sum,
    }
}

fn validate_witnesses(space: Space, witnesses: &[WitnessTriple]) -> Result<Vec<(usize, Scalar, Scalar)>> {
    let mut seen = HashSet::with_capacity(witnesses.len());
    let half = Scalar::half();
    let mut out = Vec::with_capacity(witnesses.len());
    for w in witnesses {
        if !seen.insert(w.z) {
            return Err(Error::DuplicateWitness(w.z));
        }
        for d in [&w.d_iz, &w.d_zj] {
            if !d.is_positive() {
                return Err(Error::NonPositiveDistance(d.to_string()));
            }
            if space == Space::Circle && *d > half {
                return Err(Error::DistanceExceedsHalf(d.to_string()));
            }
        }
        out.push((w.z, w.d_iz.clone(), w.d_zj.clone()));
    }
    out.sort_by_key(|w| w.0);
    Ok(out)
}

fn determine(space: Space, witnesses: &[WitnessTriple]) -> Result<Option<Scalar>> {
    let sorted = validate_witnesses(space, witnesses)?;
    if sorted.len() < space.locality() {
        return Ok(None);
    }
    Ok(Some(determine_sorted(space, &sorted, &Scalar::one(), &Scalar::half())))
}

/// Distance on the line from at least three witnesses; `None` below that.
pub fn determine_line(witnesses: &[WitnessTriple]) -> Result<Option<Scalar>> {
    determine(Space::Line, witnesses)
}

/// Distance on the unit circle from at least five witnesses; `None` below that.
pub fn determine_circle(witnesses: &[WitnessTriple]) -> Result<Option<Scalar>> {
    determine(Space::Circle, witnesses)
}

/// A measurement set together with every distance its closure forces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminedGraph {
    space: Space,
    base: MeasurementSet,
    determined: MeasurementSet,
}

impl DeterminedGraph {
    pub fn space(&self) -> Space {
        self.space
    }

    pub fn base(&self) -> &MeasurementSet {
        &self.base
    }

    /// All determined distances, base measurements included.
    pub fn determined(&self) -> &MeasurementSet {
        &self.determined
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Scalar> {
        self.determined.get(i, j)
    }

    pub fn len(&self) -> usize {
        self.determined.len()
    }

    pub fn is_empty(&self) -> bool {
        self.determined.is_empty()
    }

    /// Number of pairs added on top of the base measurements.
    pub fn added(&self) -> usize {
        self.determined.len() - self.base.len()
    }

    pub fn graph(&self) -> Graph {
        self.determined.graph()
    }

    pub fn into_measurements(self) -> MeasurementSet {
        self.determined
    }
}

struct ClosureEngine<W> {
    space: Space,
    adj: Vec<HashMap<usize, W, FixedState>>,
    one: W,
    half: W,
    /// Upper bound on any distance a consistent input can force.
    ceiling: W,
    queue: VecDeque<(usize, usize)>,
    queued: HashSet<(usize, usize), FixedState>,
}

impl<W: ExactValue> ClosureEngine<W> {
    fn new(space: Space, n: usize, edges: Vec<(usize, usize, W)>, one: W, half: W, ceiling: W) -> Self {
        let mut adj: Vec<HashMap<usize, W, FixedState>> = (0..n).map(|_| HashMap::default()).collect();
        for (i, j, w) in edges {
            adj[i].insert(j, w.clone());
            adj[j].insert(i, w);
        }
        ClosureEngine { space, adj, one, half, ceiling, queue: VecDeque::new(), queued: HashSet::default() }
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains_key(&j)
    }

    fn enqueue(&mut self, i: usize, j: usize) {
        let key = if i < j { (i, j) } else { (j, i) };
        if i != j && !self.adjacent(i, j) && self.queued.insert(key) {
            self.queue.push_back(key);
        }
    }

    /// Every non-adjacent pair with at least one common neighbour.
    fn seed(&mut self) {
        let n = self.adj.len();
        let wedge_cost: usize = self.adj.iter().map(|a| a.len() * a.len()).sum();
        if wedge_cost <= n * n {
            for z in 0..n {
                let mut nbrs: Vec<usize> = self.adj[z].keys().copied().collect();
                nbrs.sort_unstable();
                for (a, &x) in nbrs.iter().enumerate() {
                    for &y in &nbrs[a + 1..] {
                        self.enqueue(x, y);
                    }
                }
            }
        } else {
            for i in 0..n {
                for j in i + 1..n {
                    self.enqueue(i, j);
                }
            }
        }
    }

    fn witnesses(&self, i: usize, j: usize) -> Vec<(usize, W, W)> {
        let (small, large, flipped) =
            if self.adj[i].len() <= self.adj[j].len() { (i, j, false) } else { (j, i, true) };
        let mut out: Vec<(usize, W, W)> = self.adj[small]
            .iter()
            .filter_map(|(&z, ds)| {
                self.adj[large].get(&z).map(|dl| if flipped { (z, dl.clone(), ds.clone()) } else { (z, ds.clone(), dl.clone()) })
            })
            .collect();
        out.sort_by_key(|w| w.0);
        out
    }

    fn consistent(&self, d: &W, witnesses: &[(usize, W, W)]) -> bool {
        let zero = W::zero();
        match self.space {
            Space::Line => *d > zero && *d <= self.ceiling && witnesses.iter().all(|(_, a, b)| triangle_equality(d, a, b)),
            Space::Circle => {
                *d > zero
                    && *d <= self.half
                    && witnesses.iter().all(|(_, a, b)| {
                        let sum = a.plus(b);
                        *d == a.abs_diff(b) || *d == sum || (sum <= self.one && *d == self.one.minus(&sum))
                    })
            }
        }
    }

    fn run(&mut self) -> Result<Vec<(usize, usize, W)>> {
        self.seed();
        let k = self.space.locality();
        let mut added = Vec::new();
        while let Some((i, j)) = self.queue.pop_front() {
            self.queued.remove(&(i, j));
            if self.adjacent(i, j) {
                continue;
            }
            let witnesses = self.witnesses(i, j);
            if witnesses.len() < k {
                continue;
            }
            let d = determine_sorted(self.space, &witnesses, &self.one, &self.half);
            if !self.consistent(&d, &witnesses) {
                return Err(Error::InconsistentInput { i, j });
            }
            self.adj[i].insert(j, d.clone());
            self.adj[j].insert(i, d.clone());
            added.push((i, j, d));
            let mut ni: Vec<usize> = self.adj[i].keys().copied().collect();
            let mut nj: Vec<usize> = self.adj[j].keys().copied().collect();
            ni.sort_unstable();
            nj.sort_unstable();
            for x in ni {
                self.enqueue(j, x);
            }
            for x in nj {
                self.enqueue(i, x);
            }
        }
        Ok(added)
    }

    /// Checks each listed measured pair with enough witnesses in the closed
    /// graph against the value those witnesses force.
    fn verify_measured(&self, pairs: impl Iterator<Item = (usize, usize)>) -> Result<()> {
        let k = self.space.locality();
        for (i, j) in pairs {
            let witnesses = self.witnesses(i, j);
            if witnesses.len() < k {
                continue;
            }
            let d = determine_sorted(self.space, &witnesses, &self.one, &self.half);
            if self.adj[i][&j] != d {
                return Err(Error::InconsistentInput { i, j });
            }
        }
        Ok(())
    }
}

fn check_base(m: &MeasurementSet, space: Space) -> Result<()> {
    let half = Scalar::half();
    for (_, _, w) in m.iter() {
        if !w.is_positive() {
            return Err(Error::NonPositiveDistance(w.to_string()));
        }
        if space == Space::Circle && *w > half {
            return Err(Error::DistanceExceedsHalf(w.to_string()));
        }
    }
    Ok(())
}

/// Least fixpoint of the local determination rule over `m`.
///
/// Each pair is determined from all of its currently available witnesses.
/// Every derived value is checked against all of its witnesses, and every
/// measured value against the value its witnesses force once the fixpoint is
/// reached; a conflict is reported as [`Error::InconsistentInput`].
pub fn closure(m: &MeasurementSet, space: Space) -> Result<DeterminedGraph> {
    check_base(m, space)?;
    let n = m.n();
    let one = Scalar::one();
    let half = Scalar::half();
    let max_weight = m.weights().max().cloned().unwrap_or_else(Scalar::zero);
    // consistent line data never forces a distance above the sum of all
    // edge weights along a path, hence n * max_weight
    let ceiling = match space {
        Space::Line => &max_weight * &Scalar::from_integer(n.max(1) as i64),
        Space::Circle => half.clone(),
    };
    let anchors = [one.clone(), half.clone(), ceiling.clone()];
    let lattice = Lattice::fit(m.weights().chain(anchors.iter()), 4);

    let added: Vec<(usize, usize, Scalar)> = match lattice {
        Some(lat) => {
            let embed = |v: &Scalar| lat.embed(v).expect("fitted value");
            let edges = m.iter().map(|(i, j, w)| (i, j, embed(w))).collect();
            let mut engine = ClosureEngine::new(space, n, edges, embed(&one), embed(&half), embed(&ceiling));
            let added = engine.run()?;
            engine.verify_measured(m.iter().map(|(i, j, _)| (i, j)))?;
            added.into_iter().map(|(i, j, d)| (i, j, lat.lift(d))).collect()
        }
        None => {
            let edges = m.iter().map(|(i, j, w)| (i, j, w.clone())).collect();
            let mut engine = ClosureEngine::new(space, n, edges, one, half, ceiling);
            let added = engine.run()?;
            engine.verify_measured(m.iter().map(|(i, j, _)| (i, j)))?;
            added
        }
    };

    let mut determined = m.clone();
    for (i, j, d) in added {
        determined.insert(i, j, d)?;
    }
    Ok(DeterminedGraph { space, base: m.clone(), determined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::PointConfig;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    /// Witnesses for planted points `i`, `j` and witness coordinates, with
    /// distances taken straight from the metric.
    fn planted(space: Space, i: &str, j: &str, zs: &[&str]) -> Vec<WitnessTriple> {
        let (pi, pj) = (s(i), s(j));
        zs.iter()
            .enumerate()
            .map(|(k, z)| {
                let pz = s(z);
                WitnessTriple::new(k, space.metric(&pi, &pz), space.metric(&pz, &pj))
            })
            .collect()
    }

    #[test]
    fn line_all_outside() {
        let w = planted(Space::Line, "0", "4", &["-1", "5", "6"]);
        assert_eq!(determine_line(&w).unwrap(), Some(s("4")));
    }

    #[test]
    fn line_with_interior_witness() {
        let w = planted(Space::Line, "0", "4", &["1", "2", "6"]);
        let f: Vec<Scalar> = w.iter().map(|t| t.d_iz.abs_diff(&t.d_zj)).collect();
        assert_eq!(f, vec![s("2"), s("0"), s("4")]);
        assert_eq!(determine_line(&w).unwrap(), Some(s("4")));
    }

    #[test]
    fn line_needs_three() {
        let w = planted(Space::Line, "0", "4", &["1", "6"]);
        assert_eq!(determine_line(&w).unwrap(), None);
    }

    #[test]
    fn circle_regions() {
        let b = planted(Space::Circle, "0", "0.3", &["0.9", "0.5", "0.8", "0.95", "0.45"]);
        assert!(b.iter().all(|t| t.d_iz.abs_diff(&t.d_zj) == s("0.3")));
        assert_eq!(determine_circle(&b).unwrap(), Some(s("0.3")));

        let a = planted(Space::Circle, "0", "0.3", &["0.1", "0.9", "0.5", "0.8", "0.95"]);
        assert_eq!(determine_circle(&a).unwrap(), Some(s("0.3")));

        let c = planted(Space::Circle, "0", "0.3", &["0.65", "0.9", "0.5", "0.8", "0.95"]);
        assert_eq!(c[0].d_iz.clone() + c[0].d_zj.clone(), s("0.7"));
        assert_eq!(determine_circle(&c).unwrap(), Some(s("0.3")));

        assert_eq!(determine_circle(&c[..4]).unwrap(), None);
    }

    #[test]
    fn determiner_errors() {
        let dup = vec![WitnessTriple::new(1, s("1"), s("2")), WitnessTriple::new(1, s("2"), s("3"))];
        assert_eq!(determine_line(&dup), Err(Error::DuplicateWitness(1)));
        let zero = vec![WitnessTriple::new(1, s("0"), s("2"))];
        assert!(matches!(determine_line(&zero), Err(Error::NonPositiveDistance(_))));
        let far = vec![WitnessTriple::new(1, s("0.6"), s("0.2"))];
        assert!(matches!(determine_circle(&far), Err(Error::DistanceExceedsHalf(_))));
    }

    #[test]
    fn tie_break_prefers_smallest_index() {
        // witnesses 7 and 2 both have f = 0; whichever is used the answer is
        // the same, but the rule must not depend on input order
        let w = vec![
            WitnessTriple::new(7, s("2"), s("2")),
            WitnessTriple::new(2, s("1"), s("1")),
            WitnessTriple::new(5, s("9"), s("5")),
        ];
        let mut rev = w.clone();
        rev.reverse();
        assert_eq!(determine_line(&w).unwrap(), Some(s("2")));
        assert_eq!(determine_line(&rev).unwrap(), Some(s("2")));
    }

    #[test]
    fn triangle_equality_cases() {
        let t = |a: i64, b: i64, c: i64| triangle_equality(&Scalar::from(a), &Scalar::from(b), &Scalar::from(c));
        assert!(t(3, 1, 2));
        assert!(!t(3, 1, 1));
        assert!(t(0, 2, 2));
    }

    #[test]
    fn closure_fills_missing_line_pair() {
        let cfg = PointConfig::line_from_integers(&[0, 1, 2, 3, 4]).unwrap();
        let pairs = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).filter(|&p| p != (0, 4));
        let m = MeasurementSet::from_config_pairs(&cfg, pairs).unwrap();
        let closed = closure(&m, Space::Line).unwrap();
        assert_eq!(closed.added(), 1);
        assert_eq!(closed.get(0, 4), Some(&s("4")));
    }

    #[test]
    fn closure_of_complete_set_is_itself() {
        let cfg = PointConfig::line_from_integers(&[0, 3, 7, 8]).unwrap();
        let m = MeasurementSet::complete_from(&cfg);
        let closed = closure(&m, Space::Line).unwrap();
        assert_eq!(closed.determined(), &m);
    }

    #[test]
    fn star_never_triggers() {
        let cfg = PointConfig::line_from_integers(&[0, 1, 2, 3, 4]).unwrap();
        let m = MeasurementSet::from_config_pairs(&cfg, (1..5).map(|v| (0, v))).unwrap();
        assert_eq!(closure(&m, Space::Line).unwrap().added(), 0);
    }

    #[test]
    fn closure_reports_inconsistency() {
        // d(0,4) forced from three witnesses that disagree with each other
        let mut m = MeasurementSet::new(5);
        for (i, j, d) in [(0, 1, 1), (1, 4, 3), (0, 2, 2), (2, 4, 2), (0, 3, 5), (3, 4, 8)] {
            m.insert(i, j, Scalar::from(d)).unwrap();
        }
        assert!(matches!(closure(&m, Space::Line), Err(Error::InconsistentInput { .. })));
    }

    #[test]
    fn closure_rejects_invalid_circle_weights() {
        let m = MeasurementSet::from_edges(2, [(0, 1, s("0.7"))]).unwrap();
        assert!(matches!(closure(&m, Space::Circle), Err(Error::DistanceExceedsHalf(_))));
    }

    #[test]
    fn closure_without_lattice_matches() {
        // denominators too large for the lattice force the generic Scalar path
        let big: num_bigint::BigInt = num_bigint::BigInt::from(1u8) << 70usize;
        let xs: Vec<Scalar> = [0i64, 1, 2, 3, 4]
            .iter()
            .map(|&k| Scalar::from_bigints(num_bigint::BigInt::from(k) * 3 + 1, big.clone()))
            .collect();
        let cfg = PointConfig::line(xs).unwrap();
        let pairs = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).filter(|&p| p != (0, 4));
        let m = MeasurementSet::from_config_pairs(&cfg, pairs).unwrap();
        assert!(Lattice::fit(m.weights(), 4).is_none());
        let closed = closure(&m, Space::Line).unwrap();
        assert_eq!(closed.get(0, 4), Some(&cfg.distance(0, 4).unwrap()));
    }
}
