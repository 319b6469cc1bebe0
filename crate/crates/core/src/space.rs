//! The two ambient spaces (the real line and the unit-circumference circle),
//! their metrics, and injective point configurations.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::{ExactValue, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Line,
    Circle,
}

impl Space {
    /// Number of common witnesses that forces a distance in this space.
    pub fn locality(self) -> usize {
        match self {
            Space::Line => 3,
            Space::Circle => 5,
        }
    }

    /// Metric distance between two coordinates.
    pub fn metric(self, x: &Scalar, y: &Scalar) -> Scalar {
        let direct = x.abs_diff(y);
        match self {
            Space::Line => direct,
            Space::Circle => {
                let around = Scalar::one() - &direct;
                direct.min(around)
            }
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Line => "line",
            Space::Circle => "circle",
        })
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "line" => Ok(Space::Line),
            "circle" => Ok(Space::Circle),
            other => Err(Error::InvalidArgument(format!("unknown space {other:?}"))),
        }
    }
}

/// An injective placement of `n` labelled points into a [`Space`].
///
/// Circle coordinates live in `[0, 1)`; the circumference is normalised to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfig {
    space: Space,
    positions: Vec<Scalar>,
}

impl PointConfig {
    pub fn new(space: Space, positions: Vec<Scalar>) -> Result<Self> {
        if space == Space::Circle {
            if let Some(bad) = positions.iter().find(|x| x.is_negative() || **x >= Scalar::one()) {
                return Err(Error::CirclePositionOutOfRange(bad.to_string()));
            }
        }
        let mut seen = std::collections::HashMap::with_capacity(positions.len());
        for (i, x) in positions.iter().enumerate() {
            if let Some(j) = seen.insert(x, i) {
                return Err(Error::NotInjective(j, i));
            }
        }
        Ok(PointConfig { space, positions })
    }

    pub fn line(positions: Vec<Scalar>) -> Result<Self> {
        Self::new(Space::Line, positions)
    }

    pub fn circle(positions: Vec<Scalar>) -> Result<Self> {
        Self::new(Space::Circle, positions)
    }

    /// Line configuration from integer coordinates.
    pub fn line_from_integers(xs: &[i64]) -> Result<Self> {
        Self::line(xs.iter().map(|&x| Scalar::from_integer(x)).collect())
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Scalar] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> &Scalar {
        &self.positions[i]
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let n = self.len();
        for index in [i, j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        if i == j {
            return Err(Error::SelfPair(i));
        }
        Ok(())
    }

    /// Metric distance between points `i` and `j` (0-based).
    pub fn distance(&self, i: usize, j: usize) -> Result<Scalar> {
        self.check_pair(i, j)?;
        Ok(self.space.metric(&self.positions[i], &self.positions[j]))
    }

    /// Vertex indices sorted by coordinate; `order()[r]` is the vertex of rank `r`.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.positions[a].cmp(&self.positions[b]));
        idx
    }

    /// `rank()[v]` is the position of vertex `v` in coordinate order.
    pub fn rank(&self) -> Vec<usize> {
        let mut rank = vec![0; self.len()];
        for (r, v) in self.order().into_iter().enumerate() {
            rank[v] = r;
        }
        rank
    }

    /// Relabels the points: vertex `v` of the result sits where `perm[v]` sat.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() || perm.iter().copied().collect::<HashSet<_>>().len() != perm.len() {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
        let positions = perm.iter().map(|&p| self.positions[p].clone()).collect();
        Self::new(self.space, positions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn line_distance() {
        let cfg = PointConfig::line_from_integers(&[0, 1, 3]).unwrap();
        assert_eq!(cfg.distance(0, 2).unwrap(), Scalar::from_integer(3));
        assert_eq!(cfg.distance(1, 2).unwrap(), Scalar::from_integer(2));
    }

    #[test]
    fn circle_distance_takes_shorter_arc() {
        let cfg = PointConfig::circle(vec![s("0"), s("0.3"), s("0.65")]).unwrap();
        assert_eq!(cfg.distance(0, 2).unwrap(), s("0.35"));
        let wrap = PointConfig::circle(vec![s("0"), s("0.9")]).unwrap();
        assert_eq!(wrap.distance(0, 1).unwrap(), s("0.1"));
    }

    #[test]
    fn distance_errors() {
        let cfg = PointConfig::line_from_integers(&[0, 1]).unwrap();
        assert_eq!(cfg.distance(0, 0), Err(Error::SelfPair(0)));
        assert_eq!(cfg.distance(0, 2), Err(Error::IndexOutOfRange { index: 2, n: 2 }));
    }

    #[test]
    fn construction_rejects_bad_configs() {
        assert_eq!(PointConfig::line_from_integers(&[1, 2, 1]), Err(Error::NotInjective(0, 2)));
        assert!(PointConfig::circle(vec![s("1")]).is_err());
        assert!(PointConfig::circle(vec![s("-0.1")]).is_err());
    }

    #[test]
    fn rank_and_order_are_inverse() {
        let cfg = PointConfig::line_from_integers(&[5, -2, 9, 0]).unwrap();
        assert_eq!(cfg.order(), vec![1, 3, 0, 2]);
        assert_eq!(cfg.rank(), vec![2, 0, 3, 1]);
    }

    fn rational() -> impl Strategy<Value = Scalar> {
        (-1000i64..1000, 1i64..50).prop_map(|(a, b)| Scalar::ratio(a, b))
    }

    fn unit_rational() -> impl Strategy<Value = Scalar> {
        (1i64..200).prop_flat_map(|d| (0..d, Just(d))).prop_map(|(a, d)| Scalar::ratio(a, d))
    }

    fn check_metric_axioms(space: Space, xs: &[Scalar]) -> std::result::Result<(), TestCaseError> {
        let mut uniq = xs.to_vec();
        uniq.sort();
        uniq.dedup();
        let n = uniq.len();
        let d = |i: usize, j: usize| space.metric(&uniq[i], &uniq[j]);
        for i in 0..n {
            prop_assert!(d(i, i).is_zero());
            for j in 0..n {
                prop_assert_eq!(d(i, j), d(j, i));
                if i != j {
                    prop_assert!(d(i, j).is_positive());
                }
                if space == Space::Circle {
                    prop_assert!(d(i, j) <= Scalar::half());
                }
                for k in 0..n {
                    prop_assert!(d(i, k) <= d(i, j) + d(j, k));
                }
            }
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn line_metric_axioms(xs in prop::collection::vec(rational(), 1..30)) {
            check_metric_axioms(Space::Line, &xs)?;
        }

        #[test]
        fn circle_metric_axioms(xs in prop::collection::vec(unit_rational(), 1..30)) {
            check_metric_axioms(Space::Circle, &xs)?;
        }
    }
}
