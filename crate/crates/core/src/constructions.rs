//! Generators for the extremal graphs and planted configurations used to
//! exercise the rest of the crate.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::Scalar;
use crate::rng::rng_from_seed;
use crate::space::PointConfig;

fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

/// Canonical representatives of the points of PG(2, q): nonzero vectors of
/// F_q^3 whose first nonzero coordinate is 1.
fn projective_points(q: u64) -> Vec<[u64; 3]> {
    let mut pts = Vec::new();
    for a in 0..q {
        for b in 0..q {
            pts.push([1, a, b]);
        }
    }
    for b in 0..q {
        pts.push([0, 1, b]);
    }
    pts.push([0, 0, 1]);
    pts
}

/// Point-line incidence graph of the projective plane of prime order `q`.
/// Vertices `0..N` are points and `N..2N` are lines, `N = q^2 + q + 1`. Any
/// two vertices have at most one common neighbour.
pub fn gen_incidence_c4free(q: u64) -> Result<Graph> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let pts = projective_points(q);
    let n = pts.len();
    let mut edges = Vec::with_capacity(n * (q as usize + 1));
    for (i, p) in pts.iter().enumerate() {
        for (j, l) in pts.iter().enumerate() {
            if (p[0] * l[0] + p[1] * l[1] + p[2] * l[2]) % q == 0 {
                edges.push((i, n + j));
            }
        }
    }
    Graph::from_edges(2 * n, edges)
}

/// Replaces each vertex by a `k`-clique and each edge by a complete bipartite
/// bundle between the two cliques. Vertex `v` becomes `v*k .. v*k + k`.
pub fn blow_up(g: &Graph, k: usize) -> Result<Graph> {
    if k == 0 {
        return Err(Error::InvalidArgument("blow-up factor must be at least 1".into()));
    }
    let mut edges = Vec::with_capacity(g.edge_count() * k * k + g.n() * k * (k - 1) / 2);
    for v in 0..g.n() {
        for a in 0..k {
            for b in a + 1..k {
                edges.push((v * k + a, v * k + b));
            }
        }
    }
    for (u, v) in g.edges() {
        for a in 0..k {
            for b in 0..k {
                edges.push((u * k + a, v * k + b));
            }
        }
    }
    Graph::from_edges(g.n() * k, edges)
}

/// Replaces every edge `{u, v}` by three paths `u - w - v` through new
/// vertices. The `i`-th edge (in [`Graph::edges`] order) gets the new vertices
/// `n + 3i .. n + 3i + 3`.
pub fn gen_t(g: &Graph) -> Graph {
    let n = g.n();
    let mut edges = Vec::with_capacity(6 * g.edge_count());
    for (e, (u, v)) in g.edges().enumerate() {
        for i in 0..3 {
            let w = n + 3 * e + i;
            edges.push((u, w));
            edges.push((v, w));
        }
    }
    Graph::from_edges(n + 3 * g.edge_count(), edges).expect("subdivision is simple")
}

/// Edge-to-vertex ratio after one application of [`gen_t`] to a graph with
/// ratio `a`.
pub fn t_ratio_step(a: &Scalar) -> Scalar {
    &(&Scalar::from(6) * a) / &(&Scalar::one() + &(&Scalar::from(3) * a))
}

/// Two metrics on the same points that agree on every measured pair.
///
/// Points `0..s` and `s..2s` sit on the two sides of a deleted edge of the
/// 3-regular tree, at depth `3t` below it. In `r1` each side is drawn from
/// the leaves whose path starts with `2t` zero steps, so same-side points are
/// within `2t` of each other; in `r2` from the leaves whose path ends with
/// `2t` zero steps, so same-side points are at least `4t` apart. The
/// measured pairs are the cross pairs, all at distance `6t` in both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguityInstance {
    pub t: usize,
    pub per_side: usize,
    pub r1: Vec<Vec<u64>>,
    pub r2: Vec<Vec<u64>>,
    pub measured: Vec<(usize, usize)>,
}

impl AmbiguityInstance {
    pub fn n(&self) -> usize {
        2 * self.per_side
    }

    pub fn is_measured(&self, i: usize, j: usize) -> bool {
        (i < self.per_side) != (j < self.per_side)
    }

    pub fn agrees_on_measured(&self) -> bool {
        self.measured.iter().all(|&(i, j)| self.r1[i][j] == self.r2[i][j])
    }

    /// Unmeasured pairs `(i, j)`, `i < j`, on which the two metrics differ.
    pub fn differing_unmeasured(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.is_measured(i, j) && self.r1[i][j] != self.r2[i][j])
            .collect()
    }

    pub fn measurement_graph(&self) -> Graph {
        Graph::from_edges(self.n(), self.measured.iter().copied()).expect("cross pairs are valid")
    }
}

fn leaf_distance(a: &[u8], b: &[u8]) -> u64 {
    let lcp = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    2 * (a.len() - lcp) as u64
}

fn bits(k: usize, width: usize) -> impl Iterator<Item = u8> {
    (0..width).rev().map(move |b| ((k >> b) & 1) as u8)
}

/// Builds the tree ambiguity instance with `per_side` points on each side.
pub fn gen_tree_ambiguity(t: usize, per_side: usize) -> Result<AmbiguityInstance> {
    if t == 0 || per_side == 0 {
        return Err(Error::InvalidArgument("scale and points per side must be at least 1".into()));
    }
    if t < usize::BITS as usize && per_side > 1usize << t {
        return Err(Error::InvalidArgument(format!("at most 2^{t} points fit on a side, asked for {per_side}")));
    }
    let zeros = || std::iter::repeat(0u8).take(2 * t);
    let starts_with_zeros: Vec<Vec<u8>> = (0..per_side).map(|k| zeros().chain(bits(k, t)).collect()).collect();
    let ends_with_zeros: Vec<Vec<u8>> = (0..per_side).map(|k| bits(k, t).chain(zeros()).collect()).collect();
    let cross = 6 * t as u64;
    let matrix = |side: &[Vec<u8>]| {
        let n = 2 * per_side;
        let mut d = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                d[i][j] = if (i < per_side) != (j < per_side) {
                    cross
                } else {
                    leaf_distance(&side[i % per_side], &side[j % per_side])
                };
            }
        }
        d
    };
    let measured = (0..per_side).flat_map(|i| (per_side..2 * per_side).map(move |j| (i, j))).collect();
    Ok(AmbiguityInstance {
        t,
        per_side,
        r1: matrix(&starts_with_zeros),
        r2: matrix(&ends_with_zeros),
        measured,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlantedKind {
    /// Distinct multiples of `2^-32` in `[0, 1)`.
    UniformRational,
    /// Two clusters of width below `2^-12`, one near 0 and one near 1.
    Clustered,
    /// Positions `1..=n`.
    IntegerGrid,
}

impl fmt::Display for PlantedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlantedKind::UniformRational => "uniform",
            PlantedKind::Clustered => "clustered",
            PlantedKind::IntegerGrid => "grid",
        })
    }
}

impl FromStr for PlantedKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "uniformrational" | "uniform-rational" => Ok(PlantedKind::UniformRational),
            "clustered" => Ok(PlantedKind::Clustered),
            "grid" | "integergrid" | "integer-grid" => Ok(PlantedKind::IntegerGrid),
            other => Err(Error::InvalidArgument(format!("unknown planted kind `{other}`"))),
        }
    }
}

/// `n` distinct integers in `0..2^32`, in sampling order.
fn distinct_u32s<R: Rng>(n: usize, rng: &mut R) -> Vec<u64> {
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let k = rng.gen::<u32>() as u64;
        if seen.insert(k) {
            out.push(k);
        }
    }
    out
}

fn dyadic(k: u64, shift: u32) -> Scalar {
    Scalar::from_bigints(BigInt::from(k), BigInt::from(1u64) << shift)
}

pub fn gen_planted_line(n: usize, kind: PlantedKind, seed: u64) -> Result<PointConfig> {
    if n < 2 {
        return Err(Error::TooFewVertices { needed: 2, got: n });
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidArgument(format!("too many points: {n}")));
    }
    let mut rng = rng_from_seed(seed);
    let positions = match kind {
        PlantedKind::IntegerGrid => (1..=n as i64).map(Scalar::from).collect(),
        PlantedKind::UniformRational => distinct_u32s(n, &mut rng).into_iter().map(|k| dyadic(k, 32)).collect(),
        PlantedKind::Clustered => distinct_u32s(n, &mut rng)
            .into_iter()
            .enumerate()
            .map(|(i, k)| {
                let x = dyadic(k, 44);
                if i < n / 2 {
                    x
                } else {
                    x + Scalar::one()
                }
            })
            .collect(),
    };
    PointConfig::line(positions)
}

/// `n` distinct points of `[0, 1)` on the circle, multiples of `2^-32`.
pub fn gen_planted_circle(n: usize, seed: u64) -> Result<PointConfig> {
    if n < 2 {
        return Err(Error::TooFewVertices { needed: 2, got: n });
    }
    let mut rng = rng_from_seed(seed);
    PointConfig::circle(distinct_u32s(n, &mut rng).into_iter().map(|k| dyadic(k, 32)).collect())
}
