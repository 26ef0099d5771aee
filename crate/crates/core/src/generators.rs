//! Deterministic instance generators.
//!
//! Random families draw from [`Stream`], so a `(family, params, seed)`
//! triple names the same graph everywhere.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::rng::Stream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid parameters for {family}: {message}")]
    InvalidParams {
        family: &'static str,
        message: String,
    },
}

fn invalid(family: &'static str, message: impl Into<String>) -> GenError {
    GenError::InvalidParams {
        family,
        message: message.into(),
    }
}

/// One member of a generated family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GenSpec {
    NearRegular { n: usize, r: usize, seed: u64 },
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    Torus { d: usize },
    Queen { d: usize },
    Mycielski { levels: usize },
    Cycle { length: usize },
}

impl GenSpec {
    pub fn generate(&self) -> Result<Graph, GenError> {
        match *self {
            GenSpec::NearRegular { n, r, seed } => gen_near_regular(n, r, seed),
            GenSpec::ErdosRenyi { n, p, seed } => gen_erdos_renyi(n, p, seed),
            GenSpec::Torus { d } => gen_torus(d),
            GenSpec::Queen { d } => gen_queen(d),
            GenSpec::Mycielski { levels } => Ok(gen_mycielski(levels)),
            GenSpec::Cycle { length } => gen_cycle(length),
        }
    }

    /// Short instance name in the style of the benchmark tables.
    pub fn name(&self) -> String {
        match *self {
            GenSpec::NearRegular { n, r, seed } => format!("reg_n{n}_r{r}_s{seed}"),
            GenSpec::ErdosRenyi { n, p, seed } => format!("rand_n{n}_p{p}_s{seed}"),
            GenSpec::Torus { d } => format!("torus_{d}"),
            GenSpec::Queen { d } => format!("queen{d}_{d}"),
            GenSpec::Mycielski { levels } => format!("myciel{}", levels + 2),
            GenSpec::Cycle { length } => format!("cycle_{length}"),
        }
    }
}

/// G(n, p): each of the `n(n-1)/2` pairs, in lexicographic order, is kept
/// when its uniform draw is below `p`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph, GenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("erdos_renyi", format!("p = {p} outside [0, 1]")));
    }
    let mut rng = Stream::new(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.uniform() < p {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph::from_edges(n, edges).expect("generated edges are valid"))
}

/// Random perfect matching on `n*r` points, points `k*r .. (k+1)*r`
/// merged into vertex `k`, loops and parallel edges dropped.
pub fn gen_near_regular(n: usize, r: usize, seed: u64) -> Result<Graph, GenError> {
    if n < 2 || r < 2 {
        return Err(invalid(
            "near_regular",
            format!("need n >= 2 and r >= 2, got n={n}, r={r}"),
        ));
    }
    if (n * r) % 2 != 0 {
        return Err(invalid(
            "near_regular",
            format!("n*r = {} must be even", n * r),
        ));
    }
    let mut rng = Stream::new(seed);
    let mut points: Vec<usize> = (0..n * r).collect();
    for i in (1..points.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        points.swap(i, j);
    }
    let edges = points
        .chunks_exact(2)
        .map(|pair| (pair[0] / r, pair[1] / r))
        .filter(|(u, v)| u != v);
    Ok(Graph::from_edges(n, edges).expect("generated edges are valid"))
}

/// `d x d` torus: square `(i, j)` is vertex `i*d + j`, joined to its
/// row and column successors modulo `d`.
pub fn gen_torus(d: usize) -> Result<Graph, GenError> {
    if d < 3 {
        return Err(invalid("torus", format!("d = {d} must be at least 3")));
    }
    let idx = |i: usize, j: usize| (i % d) * d + (j % d);
    let edges = (0..d).flat_map(|i| {
        (0..d).flat_map(move |j| [(idx(i, j), idx(i + 1, j)), (idx(i, j), idx(i, j + 1))])
    });
    Ok(Graph::from_edges(d * d, edges).expect("generated edges are valid"))
}

/// Queen graph on a `d x d` board: squares attacking along a row, column
/// or diagonal are adjacent.
pub fn gen_queen(d: usize) -> Result<Graph, GenError> {
    if d < 1 {
        return Err(invalid("queen", "d must be at least 1"));
    }
    let mut edges = Vec::new();
    for a in 0..d * d {
        let (ra, ca) = (a / d, a % d);
        for b in a + 1..d * d {
            let (rb, cb) = (b / d, b % d);
            if ra == rb || ca == cb || ra.abs_diff(rb) == ca.abs_diff(cb) {
                edges.push((a, b));
            }
        }
    }
    Ok(Graph::from_edges(d * d, edges).expect("generated edges are valid"))
}

/// Mycielskian of `g`: vertices `0..n` copy `g`, `n + i` shadows vertex `i`
/// (adjacent to the neighbours of `i`), and `2n` is the apex joined to
/// every shadow.
pub fn mycielskian(g: &Graph) -> Graph {
    let n = g.n();
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    for (u, v) in g.edges() {
        edges.push((u, n + v));
        edges.push((v, n + u));
    }
    edges.extend((0..n).map(|i| (n + i, 2 * n)));
    Graph::from_edges(2 * n + 1, edges).expect("generated edges are valid")
}

/// DIMACS `myciel(levels + 2)`: `levels` Mycielskian steps applied to
/// `myciel2 = M(K2) = C5`. Level 1 is the Grötzsch graph, level 3 is
/// `myciel5` (47 vertices).
pub fn gen_mycielski(levels: usize) -> Graph {
    (0..=levels).fold(Graph::complete(2), |g, _| mycielskian(&g))
}

/// Plain cycle `1-2-...-length-1`.
pub fn gen_cycle(length: usize) -> Result<Graph, GenError> {
    if length < 3 {
        return Err(invalid(
            "cycle",
            format!("length = {length} must be at least 3"),
        ));
    }
    let edges = (0..length).map(|i| (i, (i + 1) % length));
    Ok(Graph::from_edges(length, edges).expect("generated edges are valid"))
}

/// The Petersen graph (outer 5-cycle, inner pentagram, spokes).
pub fn petersen() -> Graph {
    let edges = (0..5).flat_map(|i| [(i, (i + 1) % 5), (i, i + 5), (5 + i, 5 + (i + 2) % 5)]);
    Graph::from_edges(10, edges).expect("Petersen edges are valid")
}
