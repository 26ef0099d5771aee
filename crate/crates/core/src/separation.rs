//! Separation oracles and cut selection.
//!
//! Every oracle reads only the primal matrix `Y` and scans its full
//! candidate space, emitting a [`Violation`] for each inequality whose
//! `lhs - rhs` exceeds `floor` (pass `0.0` to get every violated one).
//! Vertex `v` lives at index `v + 1`; `X[i][j]` below means `Y[i+1][j+1]`
//! and `x_k` is the diagonal entry `X[k][k]`.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::graph::{
    enumerate_chordless_cycles, enumerate_cliques, Graph, VertexSet, DEFAULT_CYCLE_CAP,
};
use crate::matrix::{LinearForm, SymMatrix};
use crate::model::{vidx, Cut, CutFamily, Witness};
use crate::rng::Stream;

/// Clique-join pairs beyond this count are sampled instead of enumerated.
pub const CLIQUE_JOIN_PAIR_LIMIT: usize = 1_000_000;

/// Largest `|Q| + |Q'|` considered for clique-join cuts.
pub const CLIQUE_JOIN_MAX_TOTAL: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub cut: Cut,
    /// `lhs - rhs` at the separated point; always positive.
    pub amount: f64,
}

fn push(
    out: &mut Vec<Violation>,
    family: CutFamily,
    witness: Witness,
    terms: Vec<(usize, usize, f64)>,
    rhs: f64,
    amount: f64,
) {
    out.push(Violation {
        cut: Cut::new(family, witness, LinearForm::new(terms), rhs),
        amount,
    });
}

/// `X[i][j]` accessor over vertex labels.
#[derive(Clone, Copy)]
struct Entries<'a>(&'a SymMatrix);

impl Entries<'_> {
    #[inline]
    fn x(&self, i: usize, j: usize) -> f64 {
        self.0.get(vidx(i), vidx(j))
    }
}

/// `X[i][j] >= 0` over non-edges `i < j` (edge entries are fixed at zero).
pub fn sep_nonneg(y: &SymMatrix, g: &Graph, floor: f64) -> Vec<Violation> {
    let e = Entries(y);
    let mut out = Vec::new();
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            if g.is_edge(i, j) {
                continue;
            }
            let amount = -e.x(i, j);
            if amount > floor {
                push(
                    &mut out,
                    CutFamily::Nonneg,
                    Witness::Entry { i, j },
                    vec![(vidx(i), vidx(j), -1.0)],
                    0.0,
                    amount,
                );
            }
        }
    }
    out
}

/// `X[i][k] + X[j][k] <= X[i][j] + x_k` over `i < j`, `k` distinct.
/// Witness `Triple { i, j, k }` with `k` the distinguished vertex.
pub fn sep_tri_stab_a(y: &SymMatrix, g: &Graph, floor: f64) -> Vec<Violation> {
    let e = Entries(y);
    let n = g.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let xij = e.x(i, j);
            for k in (0..n).filter(|&k| k != i && k != j) {
                let amount = e.x(i, k) + e.x(j, k) - xij - e.x(k, k);
                if amount > floor {
                    let (vi, vj, vk) = (vidx(i), vidx(j), vidx(k));
                    push(
                        &mut out,
                        CutFamily::TriStabA,
                        Witness::Triple { i, j, k },
                        vec![(vi, vk, 1.0), (vj, vk, 1.0), (vi, vj, -1.0), (vk, vk, -1.0)],
                        0.0,
                        amount,
                    );
                }
            }
        }
    }
    out
}

/// `x_i + x_j + x_k <= 1 + X[i][j] + X[i][k] + X[j][k]` over `i < j < k`.
pub fn sep_tri_stab_b(y: &SymMatrix, g: &Graph, floor: f64) -> Vec<Violation> {
    let e = Entries(y);
    let n = g.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let partial = e.x(i, i) + e.x(j, j) - e.x(i, j);
            for k in j + 1..n {
                let amount = partial + e.x(k, k) - e.x(i, k) - e.x(j, k) - 1.0;
                if amount > floor {
                    let (vi, vj, vk) = (vidx(i), vidx(j), vidx(k));
                    push(
                        &mut out,
                        CutFamily::TriStabB,
                        Witness::Triple { i, j, k },
                        vec![
                            (vi, vi, 1.0),
                            (vj, vj, 1.0),
                            (vk, vk, 1.0),
                            (vi, vj, -1.0),
                            (vi, vk, -1.0),
                            (vj, vk, -1.0),
                        ],
                        1.0,
                        amount,
                    );
                }
            }
        }
    }
    out
}

/// Both stable-set triangle families.
pub fn sep_triangle_stable(y: &SymMatrix, g: &Graph, floor: f64) -> Vec<Violation> {
    let mut out = sep_tri_stab_a(y, g, floor);
    out.extend(sep_tri_stab_b(y, g, floor));
    out
}

/// `X[i][j] + X[j][k] <= X[i][k] + 1` over `i < k` and a middle vertex `j`.
/// Witness `Triple { i, j, k }` with `j` the middle.
pub fn sep_triangle_coloring(y: &SymMatrix, g: &Graph, floor: f64) -> Vec<Violation> {
    let e = Entries(y);
    let n = g.n();
    let mut out = Vec::new();
    for i in 0..n {
        for k in i + 1..n {
            let xik = e.x(i, k);
            for j in (0..n).filter(|&j| j != i && j != k) {
                let amount = e.x(i, j) + e.x(j, k) - xik - 1.0;
                if amount > floor {
                    let (vi, vj, vk) = (vidx(i), vidx(j), vidx(k));
                    push(
                        &mut out,
                        CutFamily::TriCol,
                        Witness::Triple { i, j, k },
                        vec![(vi, vj, 1.0), (vj, vk, 1.0), (vi, vk, -1.0)],
                        1.0,
                        amount,
                    );
                }
            }
        }
    }
    out
}

fn outside<'a>(n: usize, members: &'a [usize]) -> impl Iterator<Item = usize> + 'a {
    (0..n).filter(move |v| !members.contains(v))
}

/// `sum_{i in Q} X[i][j] <= X[j][j]` for every clique `Q` and `j` outside it.
pub fn sep_clique_vertex(
    y: &SymMatrix,
    g: &Graph,
    cliques: &[VertexSet],
    floor: f64,
) -> Vec<Violation> {
    let e = Entries(y);
    let mut out = Vec::new();
    for q in cliques {
        for j in outside(g.n(), q) {
            let amount = q.iter().map(|&i| e.x(i, j)).sum::<f64>() - e.x(j, j);
            if amount > floor {
                let mut terms: Vec<_> = q.iter().map(|&i| (vidx(i), vidx(j), 1.0)).collect();
                terms.push((vidx(j), vidx(j), -1.0));
                push(
                    &mut out,
                    CutFamily::CliqueVertex,
                    Witness::CliqueVertex {
                        clique: q.clone(),
                        vertex: j,
                    },
                    terms,
                    0.0,
                    amount,
                );
            }
        }
    }
    out
}

/// `sum_{i in Q} X[i][k] <= 1` for every clique `Q` and `k` outside it.
pub fn sep_clique_vertex_coloring(
    y: &SymMatrix,
    g: &Graph,
    cliques: &[VertexSet],
    floor: f64,
) -> Vec<Violation> {
    let e = Entries(y);
    let mut out = Vec::new();
    for q in cliques {
        for k in outside(g.n(), q) {
            let amount = q.iter().map(|&i| e.x(i, k)).sum::<f64>() - 1.0;
            if amount > floor {
                push(
                    &mut out,
                    CutFamily::CliqueVertexCol,
                    Witness::CliqueVertex {
                        clique: q.clone(),
                        vertex: k,
                    },
                    q.iter().map(|&i| (vidx(i), vidx(k), 1.0)).collect(),
                    1.0,
                    amount,
                );
            }
        }
    }
    out
}

/// Unordered pairs of disjoint cliques with `|Q| + |Q'| <= 6`, as index
/// pairs `(a, b)` with `cliques[a] < cliques[b]`.
///
/// Enumerated in order while there are at most [`CLIQUE_JOIN_PAIR_LIMIT`]
/// of them; otherwise that many distinct pairs are drawn uniformly with
/// `seed` and returned sorted.
pub fn clique_join_pairs(cliques: &[VertexSet], seed: u64) -> Vec<(usize, usize)> {
    let admissible = |a: usize, b: usize| {
        cliques[a].len() + cliques[b].len() <= CLIQUE_JOIN_MAX_TOTAL
            && cliques[a].is_disjoint(&cliques[b])
    };
    let mut order: Vec<usize> = (0..cliques.len()).collect();
    order.sort_by(|&a, &b| cliques[a].cmp(&cliques[b]));
    let mut pairs = Vec::new();
    'outer: for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if admissible(a, b) {
                if pairs.len() == CLIQUE_JOIN_PAIR_LIMIT {
                    pairs.clear();
                    break 'outer;
                }
                pairs.push((a, b));
            }
        }
    }
    if !pairs.is_empty() || cliques.len() < 2 {
        return pairs;
    }
    log::info!("clique-join candidates exceed {CLIQUE_JOIN_PAIR_LIMIT}; sampling with seed {seed}");
    let rank: Vec<usize> = {
        let mut r = vec![0; cliques.len()];
        for (pos, &a) in order.iter().enumerate() {
            r[a] = pos;
        }
        r
    };
    let mut rng = Stream::new(seed);
    let mut seen = HashSet::with_capacity(CLIQUE_JOIN_PAIR_LIMIT);
    let budget = 50 * CLIQUE_JOIN_PAIR_LIMIT;
    let c = cliques.len() as u64;
    for _ in 0..budget {
        if seen.len() == CLIQUE_JOIN_PAIR_LIMIT {
            break;
        }
        let (a, b) = (rng.below(c) as usize, rng.below(c) as usize);
        if a == b || !admissible(a, b) {
            continue;
        }
        let pair = if rank[a] < rank[b] { (a, b) } else { (b, a) };
        seen.insert(pair);
    }
    let mut pairs: Vec<_> = seen.into_iter().collect();
    pairs.sort_by_key(|&(a, b)| (rank[a], rank[b]));
    pairs
}

/// `sum_{i in Q u Q'} x_i <= 1 + sum_{i in Q, j in Q'} X[i][j]` over the
/// given pairs of disjoint cliques.
pub fn sep_clique_join(
    y: &SymMatrix,
    cliques: &[VertexSet],
    pairs: &[(usize, usize)],
    floor: f64,
) -> Vec<Violation> {
    let e = Entries(y);
    let mut out = Vec::new();
    for &(a, b) in pairs {
        let (q, r) = (&cliques[a], &cliques[b]);
        let diag: f64 = q.iter().chain(r.iter()).map(|&i| e.x(i, i)).sum();
        let cross: f64 = q
            .iter()
            .flat_map(|&i| r.iter().map(move |&j| (i, j)))
            .map(|(i, j)| e.x(i, j))
            .sum();
        let amount = diag - cross - 1.0;
        if amount > floor {
            let mut terms: Vec<_> = q
                .iter()
                .chain(r.iter())
                .map(|&i| (vidx(i), vidx(i), 1.0))
                .collect();
            terms.extend(
                q.iter()
                    .flat_map(|&i| r.iter().map(move |&j| (vidx(i), vidx(j), -1.0))),
            );
            push(
                &mut out,
                CutFamily::CliqueJoin,
                Witness::CliquePair {
                    first: q.clone(),
                    second: r.clone(),
                },
                terms,
                1.0,
                amount,
            );
        }
    }
    out
}

fn pairsum(
    y: &SymMatrix,
    cycles: &[Vec<usize>],
    family: CutFamily,
    rhs: f64,
    floor: f64,
) -> Vec<Violation> {
    let e = Entries(y);
    let mut out = Vec::new();
    for c in cycles.iter().filter(|c| c.len() == 5) {
        let mut lhs = 0.0;
        for (a, &i) in c.iter().enumerate() {
            for &j in &c[a + 1..] {
                lhs += e.x(i, j);
            }
        }
        let amount = lhs - rhs;
        if amount > floor {
            let terms = c
                .iter()
                .enumerate()
                .flat_map(|(a, &i)| c[a + 1..].iter().map(move |&j| (vidx(i), vidx(j), 1.0)))
                .collect();
            push(
                &mut out,
                family,
                Witness::Cycle { cycle: c.clone() },
                terms,
                rhs,
                amount,
            );
        }
    }
    out
}

/// `sum_{i<j in C} X[i][j] <= 1` over 5-cycles (longer cycles are ignored).
pub fn sep_c5_pairsum_stable(y: &SymMatrix, cycles: &[Vec<usize>], floor: f64) -> Vec<Violation> {
    pairsum(y, cycles, CutFamily::C5PairsumStab, 1.0, floor)
}

/// `sum_{i<j in C} X[i][j] <= 2` over 5-cycles (longer cycles are ignored).
pub fn sep_c5_pairsum_coloring(y: &SymMatrix, cycles: &[Vec<usize>], floor: f64) -> Vec<Violation> {
    pairsum(y, cycles, CutFamily::C5PairsumCol, 2.0, floor)
}

fn half(c: &[usize]) -> f64 {
    ((c.len() - 1) / 2) as f64
}

/// For an odd cycle `C` and `k` outside it, with `h = (|C| - 1) / 2`:
/// `sum_{i in C} X[i][k] <= h x_k`.
pub fn sep_oddcycle_vertex_stab(
    y: &SymMatrix,
    g: &Graph,
    cycles: &[Vec<usize>],
    floor: f64,
) -> Vec<Violation> {
    let e = Entries(y);
    let mut out = Vec::new();
    for c in cycles {
        let h = half(c);
        for k in outside(g.n(), c) {
            let amount = c.iter().map(|&i| e.x(i, k)).sum::<f64>() - h * e.x(k, k);
            if amount > floor {
                let mut terms: Vec<_> = c.iter().map(|&i| (vidx(i), vidx(k), 1.0)).collect();
                terms.push((vidx(k), vidx(k), -h));
                push(
                    &mut out,
                    CutFamily::OddcycleVertexStab,
                    Witness::CycleVertex {
                        cycle: c.clone(),
                        vertex: k,
                    },
                    terms,
                    0.0,
                    amount,
                );
            }
        }
    }
    out
}

/// `sum_{i in C} x_i + h x_k <= h + sum_{i in C} X[i][k]`, `h = (|C| - 1) / 2`.
pub fn sep_oddcycle_vertex_stab_complement(
    y: &SymMatrix,
    g: &Graph,
    cycles: &[Vec<usize>],
    floor: f64,
) -> Vec<Violation> {
    let e = Entries(y);
    let mut out = Vec::new();
    for c in cycles {
        let h = half(c);
        let diag: f64 = c.iter().map(|&i| e.x(i, i)).sum();
        for k in outside(g.n(), c) {
            let amount = diag + h * e.x(k, k) - c.iter().map(|&i| e.x(i, k)).sum::<f64>() - h;
            if amount > floor {
                let mut terms: Vec<_> = c.iter().map(|&i| (vidx(i), vidx(i), 1.0)).collect();
                terms.push((vidx(k), vidx(k), h));
                terms.extend(c.iter().map(|&i| (vidx(i), vidx(k), -1.0)));
                push(
                    &mut out,
                    CutFamily::OddcycleVertexStabComplement,
                    Witness::CycleVertex {
                        cycle: c.clone(),
                        vertex: k,
                    },
                    terms,
                    h,
                    amount,
                );
            }
        }
    }
    out
}

/// Both stable-set odd-cycle/vertex families.
pub fn sep_oddcycle_vertex_stable(
    y: &SymMatrix,
    g: &Graph,
    cycles: &[Vec<usize>],
    floor: f64,
) -> Vec<Violation> {
    let mut out = sep_oddcycle_vertex_stab(y, g, cycles, floor);
    out.extend(sep_oddcycle_vertex_stab_complement(y, g, cycles, floor));
    out
}

/// `sum_{i in C} X[i][k] <= (|C| - 1) / 2` for `k` outside the odd cycle `C`.
pub fn sep_oddcycle_vertex_coloring(
    y: &SymMatrix,
    g: &Graph,
    cycles: &[Vec<usize>],
    floor: f64,
) -> Vec<Violation> {
    let e = Entries(y);
    let mut out = Vec::new();
    for c in cycles {
        let h = half(c);
        for k in outside(g.n(), c) {
            let amount = c.iter().map(|&i| e.x(i, k)).sum::<f64>() - h;
            if amount > floor {
                push(
                    &mut out,
                    CutFamily::OddcycleVertexCol,
                    Witness::CycleVertex {
                        cycle: c.clone(),
                        vertex: k,
                    },
                    c.iter().map(|&i| (vidx(i), vidx(k), 1.0)).collect(),
                    h,
                    amount,
                );
            }
        }
    }
    out
}

/// How candidate cliques and cycles are enumerated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateConfig {
    pub max_clique_size: usize,
    /// Keep only cliques that are maximal in the graph.
    pub maximal_only: bool,
    /// Odd chordless cycle lengths used by the odd-cycle/vertex families.
    pub cycle_lengths: Vec<usize>,
    /// Per-length cap on enumerated cycles.
    pub cycle_cap: usize,
}

impl Default for CandidateConfig {
    fn default() -> Self {
        CandidateConfig {
            max_clique_size: 5,
            maximal_only: false,
            cycle_lengths: vec![5],
            cycle_cap: DEFAULT_CYCLE_CAP,
        }
    }
}

/// Graph-dependent candidate sets, built once per graph.
#[derive(Debug, Clone, Default)]
pub struct Candidates {
    pub cliques: Vec<VertexSet>,
    pub cycles: Vec<Vec<usize>>,
}

impl Candidates {
    pub fn build(g: &Graph, cfg: &CandidateConfig) -> Self {
        let mut cliques = enumerate_cliques(g, cfg.max_clique_size.clamp(2, 5));
        if cfg.maximal_only {
            cliques.retain(|q| g.is_maximal_clique(q));
        }
        let mut cycles = Vec::new();
        for &len in &cfg.cycle_lengths {
            if len >= 5 && len % 2 == 1 {
                let found = enumerate_chordless_cycles(g, len, cfg.cycle_cap);
                if found.len() == cfg.cycle_cap {
                    log::warn!(
                        "chordless {len}-cycle enumeration hit the cap of {}",
                        cfg.cycle_cap
                    );
                }
                cycles.extend(found.into_iter().map(|c| c.vertices().to_vec()));
            }
        }
        Candidates { cliques, cycles }
    }
}

/// Runs the oracle for a single family.
pub fn separate_family(
    family: CutFamily,
    y: &SymMatrix,
    g: &Graph,
    cands: &Candidates,
    floor: f64,
    seed: u64,
) -> Vec<Violation> {
    match family {
        CutFamily::Nonneg => sep_nonneg(y, g, floor),
        CutFamily::TriStabA => sep_tri_stab_a(y, g, floor),
        CutFamily::TriStabB => sep_tri_stab_b(y, g, floor),
        CutFamily::TriCol => sep_triangle_coloring(y, g, floor),
        CutFamily::CliqueVertex => sep_clique_vertex(y, g, &cands.cliques, floor),
        CutFamily::CliqueJoin => {
            let pairs = clique_join_pairs(&cands.cliques, seed);
            sep_clique_join(y, &cands.cliques, &pairs, floor)
        }
        CutFamily::CliqueVertexCol => sep_clique_vertex_coloring(y, g, &cands.cliques, floor),
        CutFamily::C5PairsumStab => sep_c5_pairsum_stable(y, &cands.cycles, floor),
        CutFamily::OddcycleVertexStab => sep_oddcycle_vertex_stab(y, g, &cands.cycles, floor),
        CutFamily::OddcycleVertexStabComplement => {
            sep_oddcycle_vertex_stab_complement(y, g, &cands.cycles, floor)
        }
        CutFamily::C5PairsumCol => sep_c5_pairsum_coloring(y, &cands.cycles, floor),
        CutFamily::OddcycleVertexCol => sep_oddcycle_vertex_coloring(y, g, &cands.cycles, floor),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCount {
    /// Violations handed to selection.
    pub found: usize,
    /// Of those, how many exceed the threshold.
    pub above_threshold: usize,
    pub selected: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Selection {
    pub cuts: Vec<Cut>,
    pub counts: BTreeMap<CutFamily, FamilyCount>,
}

impl Selection {
    /// Above-threshold violations over all families, before capping.
    pub fn total_above_threshold(&self) -> usize {
        self.counts.values().map(|c| c.above_threshold).sum()
    }
}

/// Per-iteration cut selection.
///
/// Nonnegativity violations all pass. Every other family keeps the
/// violations above `threshold`, largest first (ties by witness order),
/// at most `cap` of them. Output is grouped by family in enum order.
pub fn select_cuts(violations: Vec<Violation>, threshold: f64, cap: usize) -> Selection {
    let mut by_family: BTreeMap<CutFamily, Vec<Violation>> = BTreeMap::new();
    for v in violations {
        by_family.entry(v.cut.family).or_default().push(v);
    }
    let mut sel = Selection::default();
    for (family, mut vs) in by_family {
        let found = vs.len();
        let above_threshold = vs.iter().filter(|v| v.amount > threshold).count();
        if family == CutFamily::Nonneg {
            vs.sort_by(|a, b| a.cut.witness.cmp(&b.cut.witness));
        } else {
            vs.retain(|v| v.amount > threshold);
            vs.sort_by(|a, b| {
                b.amount
                    .total_cmp(&a.amount)
                    .then_with(|| a.cut.witness.cmp(&b.cut.witness))
            });
            vs.truncate(cap);
        }
        sel.counts.insert(
            family,
            FamilyCount {
                found,
                above_threshold,
                selected: vs.len(),
            },
        );
        sel.cuts.extend(vs.into_iter().map(|v| v.cut));
    }
    sel
}
