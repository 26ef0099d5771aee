//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls the crate's enumeration or separation code: cliques,
//! cycles and inequality values are rebuilt from the definitions.

#![allow(dead_code)]

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use thetacut::generators::{gen_cycle, gen_erdos_renyi, petersen};
use thetacut::matrix::SymMatrix;
use thetacut::model::{CutFamily, Witness};
use thetacut::Graph;

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn uniform(r: &mut Xoshiro256PlusPlus) -> f64 {
    (r.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Symmetric matrix of order `n + 1` with entries uniform in `[lo, hi)`.
pub fn random_point(n: usize, seed: u64, lo: f64, hi: f64) -> SymMatrix {
    let mut r = rng(seed);
    let mut y = SymMatrix::zeros(n + 1);
    for i in 0..=n {
        for j in i..=n {
            y.set(i, j, lo + (hi - lo) * uniform(&mut r));
        }
    }
    y
}

fn subsets_of_size(n: usize, size: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n)
        .filter(move |m| m.count_ones() as usize == size)
        .map(move |m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
}

fn pairwise_adjacent(g: &Graph, s: &[usize]) -> bool {
    s.iter()
        .enumerate()
        .all(|(a, &u)| s[a + 1..].iter().all(|&v| g.is_edge(u, v)))
}

/// Every clique with 2 to `max` vertices, by subset scan.
pub fn brute_cliques(g: &Graph, max: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (2..=max)
        .flat_map(|k| subsets_of_size(g.n(), k))
        .filter(|s| pairwise_adjacent(g, s))
        .collect();
    out.sort();
    out
}

/// Vertex sets of size `len` inducing exactly a cycle of that length.
pub fn brute_cycle_sets(g: &Graph, len: usize) -> Vec<Vec<usize>> {
    let induces_cycle = |s: &Vec<usize>| {
        let deg = |u: usize| s.iter().filter(|&&v| g.is_edge(u, v)).count();
        if !s.iter().all(|&u| deg(u) == 2) {
            return false;
        }
        // Two-regular and connected means a single cycle through all of s.
        let mut seen = vec![s[0]];
        let mut frontier = vec![s[0]];
        while let Some(u) = frontier.pop() {
            for &v in s {
                if g.is_edge(u, v) && !seen.contains(&v) {
                    seen.push(v);
                    frontier.push(v);
                }
            }
        }
        seen.len() == s.len()
    };
    let mut out: Vec<Vec<usize>> = subsets_of_size(g.n(), len).filter(induces_cycle).collect();
    out.sort();
    out
}

fn list(vs: &[usize]) -> String {
    let mut v = vs.to_vec();
    v.sort_unstable();
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Family-specific identity of an inequality, independent of how the
/// crate stores witnesses.
pub fn witness_key(family: CutFamily, w: &Witness) -> String {
    match (family, w) {
        (CutFamily::Nonneg, Witness::Entry { i, j }) => list(&[*i, *j]),
        (CutFamily::TriStabA, Witness::Triple { i, j, k }) => format!("{}|{k}", list(&[*i, *j])),
        (CutFamily::TriStabB, Witness::Triple { i, j, k }) => list(&[*i, *j, *k]),
        (CutFamily::TriCol, Witness::Triple { i, j, k }) => format!("{}|{j}", list(&[*i, *k])),
        (_, Witness::CliqueVertex { clique, vertex }) => format!("{}|{vertex}", list(clique)),
        (_, Witness::CliquePair { first, second }) => {
            let (a, b) = (list(first), list(second));
            if first.as_slice() < second.as_slice() {
                format!("{a}|{b}")
            } else {
                format!("{b}|{a}")
            }
        }
        (_, Witness::Cycle { cycle }) => list(cycle),
        (_, Witness::CycleVertex { cycle, vertex }) => format!("{}|{vertex}", list(cycle)),
        (f, w) => panic!("unexpected witness {w:?} for {f}"),
    }
}

/// `lhs - rhs` of every inequality in the family's candidate space,
/// straight from the inequality definitions.
pub fn brute_scan(family: CutFamily, y: &SymMatrix, g: &Graph) -> Vec<(String, f64)> {
    let n = g.n();
    let x = |i: usize, j: usize| y.get(i + 1, j + 1);
    let cliques = brute_cliques(g, 5);
    let cycles = brute_cycle_sets(g, 5);
    let mut out = Vec::new();
    let mut put = |key: String, amount: f64| out.push((key, amount));
    match family {
        CutFamily::Nonneg => {
            for i in 0..n {
                for j in i + 1..n {
                    if !g.is_edge(i, j) {
                        put(list(&[i, j]), -x(i, j));
                    }
                }
            }
        }
        CutFamily::TriStabA => {
            for i in 0..n {
                for j in i + 1..n {
                    for k in (0..n).filter(|&k| k != i && k != j) {
                        put(
                            format!("{}|{k}", list(&[i, j])),
                            x(i, k) + x(j, k) - x(i, j) - x(k, k),
                        );
                    }
                }
            }
        }
        CutFamily::TriStabB => {
            for s in subsets_of_size(n, 3) {
                let (i, j, k) = (s[0], s[1], s[2]);
                put(
                    list(&s),
                    x(i, i) + x(j, j) + x(k, k) - 1.0 - x(i, j) - x(i, k) - x(j, k),
                );
            }
        }
        CutFamily::TriCol => {
            for i in 0..n {
                for k in i + 1..n {
                    for j in (0..n).filter(|&j| j != i && j != k) {
                        put(
                            format!("{}|{j}", list(&[i, k])),
                            x(i, j) + x(j, k) - x(i, k) - 1.0,
                        );
                    }
                }
            }
        }
        CutFamily::CliqueVertex | CutFamily::CliqueVertexCol => {
            for q in &cliques {
                for v in (0..n).filter(|v| !q.contains(v)) {
                    let s: f64 = q.iter().map(|&i| x(i, v)).sum();
                    let rhs = if family == CutFamily::CliqueVertex {
                        x(v, v)
                    } else {
                        1.0
                    };
                    put(format!("{}|{v}", list(q)), s - rhs);
                }
            }
        }
        CutFamily::CliqueJoin => {
            for (a, q) in cliques.iter().enumerate() {
                for r in &cliques[a + 1..] {
                    if q.len() + r.len() > 6 || q.iter().any(|v| r.contains(v)) {
                        continue;
                    }
                    let diag: f64 = q.iter().chain(r).map(|&i| x(i, i)).sum();
                    let cross: f64 = q
                        .iter()
                        .map(|&i| r.iter().map(|&j| x(i, j)).sum::<f64>())
                        .sum();
                    put(format!("{}|{}", list(q), list(r)), diag - 1.0 - cross);
                }
            }
        }
        CutFamily::C5PairsumStab | CutFamily::C5PairsumCol => {
            let rhs = if family == CutFamily::C5PairsumStab {
                1.0
            } else {
                2.0
            };
            for c in &cycles {
                let s: f64 = (0..5)
                    .flat_map(|a| (a + 1..5).map(move |b| (a, b)))
                    .map(|(a, b)| x(c[a], c[b]))
                    .sum();
                put(list(c), s - rhs);
            }
        }
        CutFamily::OddcycleVertexStab
        | CutFamily::OddcycleVertexStabComplement
        | CutFamily::OddcycleVertexCol => {
            for c in &cycles {
                for k in (0..n).filter(|k| !c.contains(k)) {
                    let s: f64 = c.iter().map(|&i| x(i, k)).sum();
                    let amount = match family {
                        CutFamily::OddcycleVertexStab => s - 2.0 * x(k, k),
                        CutFamily::OddcycleVertexStabComplement => {
                            c.iter().map(|&i| x(i, i)).sum::<f64>() + 2.0 * x(k, k) - 2.0 - s
                        }
                        _ => s - 2.0,
                    };
                    put(format!("{}|{k}", list(c)), amount);
                }
            }
        }
    }
    out
}

/// Seeded graphs with at most 12 vertices for the soundness sweep: G(n, p)
/// for p in {0.2, 0.5, 0.8}, the odd cycles C5 to C11 and Petersen.
pub fn sweep_graphs(count: usize) -> Vec<(String, Graph)> {
    let mut out: Vec<(String, Graph)> = Vec::new();
    for len in [5, 7, 9, 11] {
        out.push((format!("C{len}"), gen_cycle(len).unwrap()));
    }
    out.push(("petersen".into(), petersen()));
    let ps = [0.2, 0.5, 0.8];
    let mut seed = 0u64;
    while out.len() < count {
        let p = ps[seed as usize % 3];
        let n = 5 + (seed as usize / 3) % 8;
        out.push((
            format!("gnp_n{n}_p{p}_s{seed}"),
            gen_erdos_renyi(n, p, seed).unwrap(),
        ));
        seed += 1;
    }
    out
}

/// Runs every oracle on `(g, y)` and compares it with [`brute_scan`]:
/// identical key sets above `floor` and amounts within `tol`. Inequalities
/// within `tol` of the floor are ignored on both sides. Returns the number
/// of violations compared.
pub fn check_oracles(g: &Graph, y: &SymMatrix, floor: f64, tol: f64) -> Result<usize, String> {
    use std::collections::BTreeMap;
    use thetacut::separation::separate_family;
    use thetacut::{CandidateConfig, Candidates};

    let cands = Candidates::build(g, &CandidateConfig::default());
    let mut compared = 0;
    for family in CutFamily::ALL {
        let borderline = |a: f64| (a - floor).abs() <= tol;
        let expected: BTreeMap<String, f64> = brute_scan(family, y, g)
            .into_iter()
            .filter(|&(_, a)| a > floor && !borderline(a))
            .collect();
        let mut got = BTreeMap::new();
        for v in separate_family(family, y, g, &cands, floor, 0) {
            let key = witness_key(family, &v.cut.witness);
            let reeval = v.cut.violation(y);
            if (reeval - v.amount).abs() > tol {
                return Err(format!(
                    "{family} {key}: amount {} but coefficients give {reeval}",
                    v.amount
                ));
            }
            if v.cut.family != family {
                return Err(format!("{family} oracle emitted a {} cut", v.cut.family));
            }
            if !borderline(v.amount) && got.insert(key.clone(), v.amount).is_some() {
                return Err(format!("{family} {key}: emitted twice"));
            }
        }
        if got.len() != expected.len() {
            return Err(format!(
                "{family}: oracle found {}, brute force {}",
                got.len(),
                expected.len()
            ));
        }
        for (key, a) in &expected {
            match got.get(key) {
                Some(b) if (a - b).abs() <= tol => {}
                Some(b) => return Err(format!("{family} {key}: oracle {b}, brute force {a}")),
                None => return Err(format!("{family} {key}: missed (amount {a})")),
            }
        }
        compared += got.len();
    }
    Ok(compared)
}
