//! Exact ground truth for small graphs.
//!
//! Stability and chromatic numbers by exhaustive search, lazy enumeration
//! of the stable-set and coloring matrices that generate the integer hulls,
//! and cut validity against those hulls. Size guards are hard errors.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::Graph;
use crate::matrix::SymMatrix;
use crate::model::{Cut, Problem, BORDER};

pub const ALPHA_LIMIT: usize = 60;
pub const CHI_LIMIT: usize = 40;
pub const STABLE_ENUM_LIMIT: usize = 20;
pub const COLORING_ENUM_LIMIT: usize = 10;

/// Slack allowed when comparing an integer point against a cut.
const VALIDITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("{what} needs n <= {limit}, got n = {n}")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },
}

fn guard(what: &'static str, n: usize, limit: usize) -> Result<(), ExactError> {
    if n > limit {
        Err(ExactError::TooLarge { what, n, limit })
    } else {
        Ok(())
    }
}

fn row(g: &Graph, v: usize) -> u64 {
    g.bit_row(v)[0]
}

/// Largest `n` the clique search represents (four 64-bit words).
pub const CLIQUE_SEARCH_MAX: usize = 256;

/// Stability number by branch and bound (maximum clique in the complement,
/// bounded by a greedy partition of the candidates into cliques of `g`).
pub fn exact_alpha(g: &Graph) -> Result<usize, ExactError> {
    exact_alpha_with_limit(g, ALPHA_LIMIT)
}

/// [`exact_alpha`] under a caller-chosen size guard, itself capped at
/// [`CLIQUE_SEARCH_MAX`]. Larger guards trade the runtime bound for reach.
pub fn exact_alpha_with_limit(g: &Graph, limit: usize) -> Result<usize, ExactError> {
    guard("exact_alpha", g.n(), limit.min(CLIQUE_SEARCH_MAX))?;
    Ok(clique_number(g, true))
}

/// Clique number of `g` by the same search on its own adjacency.
pub fn exact_omega(g: &Graph) -> Result<usize, ExactError> {
    guard("exact_omega", g.n(), ALPHA_LIMIT)?;
    Ok(clique_number(g, false))
}

fn clique_number(g: &Graph, complement: bool) -> usize {
    match g.n().div_ceil(64) {
        0 => 0,
        1 => max_clique::<1>(g, complement),
        2 => max_clique::<2>(g, complement),
        3 => max_clique::<3>(g, complement),
        4 => max_clique::<4>(g, complement),
        _ => unreachable!("n is guarded by CLIQUE_SEARCH_MAX"),
    }
}

/// Fixed-width vertex set for the clique search.
#[derive(Clone, Copy)]
struct Bits<const W: usize>([u64; W]);

impl<const W: usize> Bits<W> {
    fn full(n: usize) -> Self {
        let mut b = [0u64; W];
        for (w, word) in b.iter_mut().enumerate() {
            let lo = 64 * w;
            *word = match n.saturating_sub(lo) {
                0 => 0,
                k if k >= 64 => u64::MAX,
                k => (1u64 << k) - 1,
            };
        }
        Bits(b)
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn first(&self) -> usize {
        let w = self.0.iter().position(|&w| w != 0).expect("nonempty set");
        64 * w + self.0[w].trailing_zeros() as usize
    }

    fn remove(&mut self, v: usize) {
        self.0[v / 64] &= !(1u64 << (v % 64));
    }

    fn and(mut self, other: &Self) -> Self {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= b);
        self
    }

    fn and_not(mut self, other: &Self) -> Self {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= !b);
        self
    }
}

fn max_clique<const W: usize>(g: &Graph, complement: bool) -> usize {
    let n = g.n();
    let all = Bits::<W>::full(n);
    let adj: Vec<Bits<W>> = (0..n)
        .map(|v| {
            let mut b = Bits::<W>([0; W]);
            b.0.copy_from_slice(&g.bit_row(v)[..W]);
            if complement {
                b = all.and_not(&b);
                b.remove(v);
            }
            b
        })
        .collect();
    let mut best = 0;
    expand(&adj, 0, all, &mut best);
    best
}

fn expand<const W: usize>(adj: &[Bits<W>], size: usize, mut cand: Bits<W>, best: &mut usize) {
    if cand.is_empty() {
        *best = (*best).max(size);
        return;
    }
    let (order, bounds) = greedy_color(adj, cand);
    for idx in (0..order.len()).rev() {
        if size + bounds[idx] <= *best {
            return;
        }
        let v = order[idx];
        expand(adj, size + 1, cand.and(&adj[v]), best);
        cand.remove(v);
    }
}

/// Colors `cand` greedily with independent sets of `adj`; returns vertices
/// in color order with the running color count as a clique bound.
fn greedy_color<const W: usize>(adj: &[Bits<W>], cand: Bits<W>) -> (Vec<usize>, Vec<usize>) {
    let mut order = Vec::new();
    let mut bounds = Vec::new();
    let mut rest = cand;
    let mut color = 0;
    while !rest.is_empty() {
        color += 1;
        let mut avail = rest;
        while !avail.is_empty() {
            let v = avail.first();
            avail.remove(v);
            avail = avail.and_not(&adj[v]);
            rest.remove(v);
            order.push(v);
            bounds.push(color);
        }
    }
    (order, bounds)
}

/// Chromatic number: iterative deepening from the clique number, each
/// level a DSATUR backtracking search that opens at most one new color
/// per step.
pub fn exact_chi(g: &Graph) -> Result<usize, ExactError> {
    guard("exact_chi", g.n(), CHI_LIMIT)?;
    if g.n() == 0 {
        return Ok(0);
    }
    let adj: Vec<u64> = (0..g.n()).map(|v| row(g, v)).collect();
    let mut k = clique_number(g, false).max(1);
    loop {
        let mut colors = vec![usize::MAX; g.n()];
        if color_with(&adj, k, &mut colors, 0) {
            return Ok(k);
        }
        k += 1;
    }
}

fn color_with(adj: &[u64], k: usize, colors: &mut [usize], used: usize) -> bool {
    let n = adj.len();
    let mut pick = None;
    let mut best = (0u32, 0u32);
    for v in (0..n).filter(|&v| colors[v] == usize::MAX) {
        let mut seen = 0u64;
        let mut uncolored = 0;
        for u in BitIter(adj[v]) {
            if colors[u] == usize::MAX {
                uncolored += 1;
            } else {
                seen |= 1u64 << colors[u];
            }
        }
        let key = (seen.count_ones(), uncolored);
        if pick.is_none() || key > best {
            pick = Some((v, seen));
            best = key;
        }
    }
    let Some((v, seen)) = pick else { return true };
    for c in 0..k.min(used + 1) {
        if seen & (1u64 << c) == 0 {
            colors[v] = c;
            if color_with(adj, k, colors, used.max(c + 1)) {
                return true;
            }
        }
    }
    colors[v] = usize::MAX;
    false
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }
}

/// `(1, s)(1, s)^T` for the incidence vector `s` of a stable set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableSetMatrix {
    n: usize,
    mask: u64,
}

impl StableSetMatrix {
    pub fn members(&self) -> Vec<usize> {
        BitIter(self.mask).collect()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask >> v & 1 == 1
    }

    /// Entry of the bordered matrix; index 0 is the border.
    pub fn entry(&self, r: usize, c: usize) -> f64 {
        let s = |idx: usize| {
            if idx == BORDER || self.contains(idx - 1) {
                1.0
            } else {
                0.0
            }
        };
        s(r) * s(c)
    }

    pub fn to_matrix(&self) -> SymMatrix {
        SymMatrix::from_fn(self.n + 1, |r, c| self.entry(r, c))
    }
}

/// Lazy stream over every stable set of `g` (including the empty one).
pub struct StableSetMatrices {
    adj: Vec<u64>,
    next: u64,
    end: u64,
}

impl Iterator for StableSetMatrices {
    type Item = StableSetMatrix;
    fn next(&mut self) -> Option<StableSetMatrix> {
        while self.next < self.end {
            let mask = self.next;
            self.next += 1;
            if BitIter(mask).all(|v| self.adj[v] & mask == 0) {
                return Some(StableSetMatrix {
                    n: self.adj.len(),
                    mask,
                });
            }
        }
        None
    }
}

pub fn enumerate_stable_set_matrices(g: &Graph) -> Result<StableSetMatrices, ExactError> {
    guard("enumerate_stable_set_matrices", g.n(), STABLE_ENUM_LIMIT)?;
    Ok(stable_sets_unchecked(g))
}

fn stable_sets_unchecked(g: &Graph) -> StableSetMatrices {
    let adj: Vec<u64> = (0..g.n()).map(|v| row(g, v)).collect();
    StableSetMatrices {
        end: 1u64 << g.n(),
        adj,
        next: 0,
    }
}

/// Partition of the vertices into stable classes, stored as a
/// restricted-growth string: `labels[0] = 0` and each label is at most one
/// more than every earlier label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringMatrix {
    labels: Vec<usize>,
    classes: usize,
}

impl ColoringMatrix {
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of color classes `k`.
    pub fn classes(&self) -> usize {
        self.classes
    }

    /// `X[i][j]`: 1 when `i` and `j` share a class.
    pub fn x(&self, i: usize, j: usize) -> f64 {
        if self.labels[i] == self.labels[j] {
            1.0
        } else {
            0.0
        }
    }

    /// Entry of the bordered matrix `[[k, e^T], [e, X]]`.
    pub fn entry(&self, r: usize, c: usize) -> f64 {
        match (r, c) {
            (BORDER, BORDER) => self.classes as f64,
            (BORDER, _) | (_, BORDER) => 1.0,
            _ => self.x(r - 1, c - 1),
        }
    }

    /// The `n x n` matrix `X`.
    pub fn to_matrix(&self) -> SymMatrix {
        SymMatrix::from_fn(self.labels.len(), |i, j| self.x(i, j))
    }

    /// The bordered `(n+1) x (n+1)` matrix, a feasible point of the
    /// coloring relaxation with objective `k`.
    pub fn to_bordered(&self) -> SymMatrix {
        SymMatrix::from_fn(self.labels.len() + 1, |r, c| self.entry(r, c))
    }
}

/// Lazy stream over every partition of the vertices into stable sets.
pub struct ColoringMatrices {
    adj: Vec<u64>,
    labels: Vec<usize>,
    started: bool,
    done: bool,
}

impl ColoringMatrices {
    /// Extends `labels` to a full proper labeling, trying `start` first at
    /// the current position and backtracking as needed.
    fn fill(&mut self, mut start: usize) -> bool {
        let n = self.adj.len();
        loop {
            let d = self.labels.len();
            if d == n {
                return true;
            }
            let limit = self.labels.iter().max().map_or(0, |m| m + 1);
            let found = (start..=limit)
                .find(|&c| (0..d).all(|u| self.labels[u] != c || self.adj[d] >> u & 1 == 0));
            match found {
                Some(c) => {
                    self.labels.push(c);
                    start = 0;
                }
                None => match self.labels.pop() {
                    Some(c) => start = c + 1,
                    None => return false,
                },
            }
        }
    }
}

impl Iterator for ColoringMatrices {
    type Item = ColoringMatrix;
    fn next(&mut self) -> Option<ColoringMatrix> {
        if self.done {
            return None;
        }
        let ok = if !self.started {
            self.started = true;
            self.fill(0)
        } else {
            match self.labels.pop() {
                Some(c) => self.fill(c + 1),
                None => false,
            }
        };
        if !ok {
            self.done = true;
            return None;
        }
        let classes = self.labels.iter().max().map_or(0, |m| m + 1);
        Some(ColoringMatrix {
            labels: self.labels.clone(),
            classes,
        })
    }
}

pub fn enumerate_coloring_matrices(g: &Graph) -> Result<ColoringMatrices, ExactError> {
    guard("enumerate_coloring_matrices", g.n(), COLORING_ENUM_LIMIT)?;
    Ok(colorings_unchecked(g))
}

fn colorings_unchecked(g: &Graph) -> ColoringMatrices {
    let adj: Vec<u64> = (0..g.n()).map(|v| row(g, v)).collect();
    ColoringMatrices {
        adj,
        labels: Vec::new(),
        started: false,
        done: false,
    }
}

/// True iff `cut` holds on every generator of the integer hull of `problem`
/// over the whole graph (no support reduction).
pub fn check_cut_validity_full(cut: &Cut, g: &Graph, problem: Problem) -> Result<bool, ExactError> {
    let holds = |entry: &dyn Fn(usize, usize) -> f64| {
        cut.coeffs.evaluate_with(entry) <= cut.rhs + VALIDITY_TOL
    };
    Ok(match problem {
        Problem::Stable => enumerate_stable_set_matrices(g)?.all(|s| holds(&|r, c| s.entry(r, c))),
        Problem::Coloring => enumerate_coloring_matrices(g)?.all(|x| holds(&|r, c| x.entry(r, c))),
    })
}

/// True iff `cut` holds on every stable-set matrix (stable) or coloring
/// matrix (coloring) of `g`.
///
/// Only the vertices in the cut's support matter: restricting stable sets
/// or stable partitions of `g` to a vertex subset `W` yields exactly the
/// stable sets or stable partitions of `g[W]`. The search therefore runs on
/// the induced subgraph, except for coloring cuts that read the corner
/// entry (the class count is not local), which use the full enumeration.
pub fn check_cut_validity(cut: &Cut, g: &Graph, problem: Problem) -> Result<bool, ExactError> {
    CutValidator::new(g, problem).check(cut)
}

/// Batch validity checks against one graph, caching the enumeration per
/// support set.
pub struct CutValidator<'g> {
    g: &'g Graph,
    problem: Problem,
    stable: HashMap<Vec<usize>, Vec<u64>>,
    coloring: HashMap<Vec<usize>, Vec<ColoringMatrix>>,
}

impl<'g> CutValidator<'g> {
    pub fn new(g: &'g Graph, problem: Problem) -> Self {
        CutValidator {
            g,
            problem,
            stable: HashMap::new(),
            coloring: HashMap::new(),
        }
    }

    pub fn check(&mut self, cut: &Cut) -> Result<bool, ExactError> {
        let mut support: Vec<usize> = Vec::new();
        let mut corner = false;
        for t in cut.coeffs.terms() {
            corner |= t.row == BORDER && t.col == BORDER;
            for idx in [t.row, t.col] {
                if idx != BORDER {
                    support.push(idx - 1);
                }
            }
        }
        support.sort_unstable();
        support.dedup();
        if support.last().is_some_and(|&v| v >= self.g.n()) {
            return Ok(false);
        }
        // Position of each original vertex in the support.
        let local = |v: usize| support.binary_search(&v).expect("vertex in support");
        let holds = |entry: &dyn Fn(usize, usize) -> f64| {
            cut.coeffs.evaluate_with(entry) <= cut.rhs + VALIDITY_TOL
        };
        match self.problem {
            Problem::Stable => {
                guard(
                    "check_cut_validity (support)",
                    support.len(),
                    STABLE_ENUM_LIMIT,
                )?;
                let sub = self.g.induced(&support);
                let masks = self
                    .stable
                    .entry(support.clone())
                    .or_insert_with(|| stable_sets_unchecked(&sub).map(|s| s.mask).collect());
                Ok(masks.iter().all(|&mask| {
                    let s = |idx: usize| {
                        if idx == BORDER || mask >> local(idx - 1) & 1 == 1 {
                            1.0
                        } else {
                            0.0
                        }
                    };
                    holds(&|r, c| s(r) * s(c))
                }))
            }
            Problem::Coloring if corner => check_cut_validity_full(cut, self.g, Problem::Coloring),
            Problem::Coloring => {
                guard(
                    "check_cut_validity (support)",
                    support.len(),
                    COLORING_ENUM_LIMIT,
                )?;
                let sub = self.g.induced(&support);
                let parts = self
                    .coloring
                    .entry(support.clone())
                    .or_insert_with(|| colorings_unchecked(&sub).collect());
                Ok(parts.iter().all(|p| {
                    holds(&|r, c| match (r, c) {
                        (BORDER, _) | (_, BORDER) => 1.0,
                        _ => p.x(local(r - 1), local(c - 1)),
                    })
                }))
            }
        }
    }
}
