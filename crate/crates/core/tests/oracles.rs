//! Separation oracles against brute-force scans of their candidate spaces.

mod common;

use common::{brute_cliques, brute_cycle_sets, check_oracles, random_point};
use thetacut::generators::{gen_cycle, gen_erdos_renyi, gen_mycielski, petersen};
use thetacut::graph::{enumerate_chordless_cycles, enumerate_cliques};
use thetacut::model::vidx;
use thetacut::{run_phase1, CandidateConfig, Candidates, Graph, LoopConfig, Problem};

fn small_graphs() -> Vec<Graph> {
    let mut gs = vec![
        gen_cycle(5).unwrap(),
        gen_cycle(7).unwrap(),
        petersen(),
        Graph::complete(6),
        Graph::empty(4),
    ];
    for seed in 0..12 {
        let n = 6 + (seed as usize % 5);
        let p = [0.3, 0.5, 0.7][seed as usize % 3];
        gs.push(gen_erdos_renyi(n, p, seed).unwrap());
    }
    gs
}

#[test]
fn oracles_match_brute_force_on_random_points() {
    for (gi, g) in small_graphs().iter().enumerate() {
        for s in 0..3u64 {
            let y = random_point(g.n(), 100 * gi as u64 + s, -0.3, 1.0);
            check_oracles(g, &y, 0.0, 1e-12)
                .unwrap_or_else(|e| panic!("graph {gi}, point {s}: {e}"));
        }
    }
}

#[test]
fn oracles_match_brute_force_on_solver_iterates() {
    for g in [
        gen_cycle(5).unwrap(),
        petersen(),
        gen_erdos_renyi(9, 0.4, 3).unwrap(),
    ] {
        for problem in [Problem::Stable, Problem::Coloring] {
            let cfg = LoopConfig::new(problem);
            let cands = Candidates::build(&g, &cfg.candidates);
            let out = run_phase1(&g, &cfg, &cands).unwrap();
            check_oracles(&g, &out.solution.y, 1e-9, 1e-12).unwrap();
        }
    }
}

#[test]
fn thresholded_output_is_a_subset() {
    let g = gen_erdos_renyi(10, 0.5, 11).unwrap();
    let y = random_point(10, 5, -0.2, 1.0);
    let all = check_oracles(&g, &y, 0.0, 1e-12).unwrap();
    let above = check_oracles(&g, &y, 0.3, 1e-12).unwrap();
    assert!(above < all, "{above} vs {all}");
}

#[test]
fn clique_enumeration_matches_subsets() {
    for g in small_graphs() {
        let got: Vec<Vec<usize>> = enumerate_cliques(&g, 5)
            .into_iter()
            .map(|q| q.to_vec())
            .collect();
        assert_eq!(got, brute_cliques(&g, 5));
        for max in 2..5 {
            assert_eq!(
                enumerate_cliques(&g, max).len(),
                brute_cliques(&g, max).len()
            );
        }
    }
}

#[test]
fn chordless_cycles_match_subsets() {
    let mut gs = small_graphs();
    gs.push(gen_mycielski(1));
    for g in gs {
        for len in [5, 7] {
            let mut got: Vec<Vec<usize>> = enumerate_chordless_cycles(&g, len, usize::MAX)
                .into_iter()
                .map(|c| {
                    let mut v = c.vertices().to_vec();
                    v.sort_unstable();
                    v
                })
                .collect();
            got.sort();
            assert_eq!(got, brute_cycle_sets(&g, len));
        }
    }
}

#[test]
fn candidate_cycles_are_chordless_and_closed() {
    let g = gen_mycielski(2);
    let cands = Candidates::build(&g, &CandidateConfig::default());
    assert!(!cands.cycles.is_empty());
    for c in &cands.cycles {
        for (a, &u) in c.iter().enumerate() {
            for (b, &v) in c.iter().enumerate().skip(a + 1) {
                let consecutive = b == a + 1 || (a == 0 && b == c.len() - 1);
                assert_eq!(g.is_edge(u, v), consecutive, "{c:?}");
            }
        }
    }
    assert_eq!(vidx(0), 1);
}
