//! Two-phase cutting-plane driver.
//!
//! Each phase alternates solve, separate, select and add. Phase 1 uses the
//! nonnegativity and triangle families, phase 2 the clique and odd-cycle
//! families and starts from the phase 1 pool and solution.
//!
//! A round that finds fewer than `stop_below` (default `n`) above-threshold
//! violations is the last one: its cuts are added and solved, then the phase
//! ends. A phase also ends when a round finds nothing above the threshold,
//! after `max_iters` cut rounds, when a round adds no new cut, or when its
//! time budget is spent.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::model::{CutFamily, ModelError, Problem, SdpModel};
use crate::separation::{
    select_cuts, separate_family, CandidateConfig, Candidates, FamilyCount, Violation,
};
use crate::solver::{solve, PrimalSolution, SolveStatus, SolverConfig};

/// Version of the [`BoundReport`] JSON layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Margin used when rounding a bound to an integer.
pub const ROUNDING_TOL: f64 = 1e-6;

/// Family groups that can be switched off (`nonneg,tri,clique,c5,oddcycle`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyToggles {
    pub nonneg: bool,
    pub tri: bool,
    pub clique: bool,
    pub c5: bool,
    pub oddcycle: bool,
}

impl Default for FamilyToggles {
    fn default() -> Self {
        FamilyToggles {
            nonneg: true,
            tri: true,
            clique: true,
            c5: true,
            oddcycle: true,
        }
    }
}

impl FamilyToggles {
    pub fn none() -> Self {
        FamilyToggles {
            nonneg: false,
            tri: false,
            clique: false,
            c5: false,
            oddcycle: false,
        }
    }

    pub fn allows(&self, family: CutFamily) -> bool {
        use CutFamily::*;
        match family {
            Nonneg => self.nonneg,
            TriStabA | TriStabB | TriCol => self.tri,
            CliqueVertex | CliqueJoin | CliqueVertexCol => self.clique,
            C5PairsumStab | C5PairsumCol => self.c5,
            OddcycleVertexStab | OddcycleVertexStabComplement | OddcycleVertexCol => self.oddcycle,
        }
    }
}

impl FromStr for FamilyToggles {
    type Err = String;

    /// Comma-separated group names; `all` enables everything.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut t = FamilyToggles::none();
        for name in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match name {
                "all" => t = FamilyToggles::default(),
                "nonneg" => t.nonneg = true,
                "tri" => t.tri = true,
                "clique" => t.clique = true,
                "c5" => t.c5 = true,
                "oddcycle" => t.oddcycle = true,
                other => return Err(format!("unknown family group '{other}'")),
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Phase1,
    Phase2,
}

impl Phase {
    /// Families separated in this phase for `problem`, in enum order.
    pub fn families(self, problem: Problem) -> &'static [CutFamily] {
        use CutFamily::*;
        match (self, problem) {
            (Phase::Phase1, Problem::Stable) => &[Nonneg, TriStabA, TriStabB],
            (Phase::Phase1, Problem::Coloring) => &[Nonneg, TriCol],
            (Phase::Phase2, Problem::Stable) => &[
                CliqueVertex,
                CliqueJoin,
                C5PairsumStab,
                OddcycleVertexStab,
                OddcycleVertexStabComplement,
            ],
            (Phase::Phase2, Problem::Coloring) => {
                &[CliqueVertexCol, C5PairsumCol, OddcycleVertexCol]
            }
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Phase1 => "phase1",
            Phase::Phase2 => "phase2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopConfig {
    pub problem: Problem,
    /// Violations must exceed this to be counted or selected.
    pub threshold: f64,
    /// Per-family cap is `cap_factor * n`.
    pub cap_factor: usize,
    /// Stop once fewer violations than this are found; `None` means `n`.
    pub stop_below: Option<usize>,
    /// Cut rounds per phase.
    pub max_iters: usize,
    pub solver: SolverConfig,
    pub families: FamilyToggles,
    pub candidates: CandidateConfig,
    pub seed: u64,
    /// Nonnegativity cuts are added for entries below `-nonneg_floor`.
    pub nonneg_floor: f64,
    /// Drop pooled cuts whose slack exceeds this after every solve.
    pub purge_slack: Option<f64>,
    /// Wall-clock budget per phase, in seconds.
    pub time_limit: Option<f64>,
}

impl LoopConfig {
    pub fn new(problem: Problem) -> Self {
        LoopConfig {
            problem,
            threshold: 0.025,
            cap_factor: 2,
            stop_below: None,
            max_iters: 10,
            solver: SolverConfig::default(),
            families: FamilyToggles::default(),
            candidates: CandidateConfig::default(),
            seed: 0,
            nonneg_floor: 1e-6,
            purge_slack: None,
            time_limit: None,
        }
    }

    // Negated comparisons reject NaN as well.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), LoopError> {
        let bad = |m: &str| Err(LoopError::Config(m.to_string()));
        if !(self.threshold >= 0.0) {
            return bad("threshold must be nonnegative");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if !(self.nonneg_floor >= 0.0) {
            return bad("nonneg_floor must be nonnegative");
        }
        if self.time_limit.is_some_and(|t| !(t > 0.0)) {
            return bad("time_limit must be positive");
        }
        self.solver.validate().map_err(LoopError::Config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    FewViolations,
    MaxIters,
    NoNewCuts,
    TimeLimit,
}

/// One solve of the loop and the separation round that followed it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub phase: Phase,
    /// 0 for the phase's starting solve.
    pub iteration: usize,
    pub objective: f64,
    pub status: SolveStatus,
    pub solver_iterations: usize,
    pub solve_seconds: f64,
    /// Pool size at this solve.
    pub pool_size: usize,
    /// Per-family counts of the separation round after this solve.
    pub separation: BTreeMap<CutFamily, FamilyCount>,
    pub violations_above_threshold: usize,
    pub cuts_added: usize,
    pub separate_seconds: f64,
}

#[derive(Debug, Error)]
pub enum LoopError {
    #[error("invalid loop configuration: {0}")]
    Config(String),
    #[error("solver returned {status:?} in {phase} iteration {iteration}")]
    Solver {
        phase: Phase,
        iteration: usize,
        status: SolveStatus,
        trace: Vec<IterationRecord>,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone)]
pub struct PhaseOutcome {
    pub model: SdpModel,
    pub solution: PrimalSolution,
    pub trace: Vec<IterationRecord>,
    pub stop: StopReason,
    pub seconds: f64,
}

impl PhaseOutcome {
    pub fn bound(&self) -> f64 {
        self.solution.objective
    }
}

fn checked_solve(
    model: &SdpModel,
    cfg: &LoopConfig,
    phase: Phase,
    iteration: usize,
    trace: &[IterationRecord],
) -> Result<(PrimalSolution, f64), LoopError> {
    let start = Instant::now();
    let sol = solve(model, &cfg.solver);
    let secs = start.elapsed().as_secs_f64();
    match sol.status {
        SolveStatus::Optimal => {}
        SolveStatus::NearOptimal => {
            log::warn!(
                "{phase} iteration {iteration}: solver stopped near optimal (gap {:?})",
                sol.residuals.duality_gap
            )
        }
        status => {
            return Err(LoopError::Solver {
                phase,
                iteration,
                status,
                trace: trace.to_vec(),
            });
        }
    }
    Ok((sol, secs))
}

fn run_phase(
    g: &Graph,
    cfg: &LoopConfig,
    phase: Phase,
    mut model: SdpModel,
    start_solution: Option<(PrimalSolution, f64)>,
    cands: &Candidates,
    observe: &mut dyn FnMut(Phase, usize, &[Violation]),
) -> Result<PhaseOutcome, LoopError> {
    cfg.validate()?;
    let started = Instant::now();
    let n = g.n();
    let stop_below = cfg.stop_below.unwrap_or(n);
    let cap = cfg.cap_factor * n;
    let families: Vec<CutFamily> = phase
        .families(cfg.problem)
        .iter()
        .copied()
        .filter(|f| cfg.families.allows(*f))
        .collect();
    let mut trace: Vec<IterationRecord> = Vec::new();
    let (mut sol, mut solve_secs) = match start_solution {
        Some(s) => s,
        None => checked_solve(&model, cfg, phase, 0, &trace)?,
    };
    let mut iteration = 0;
    let mut last_round = false;
    let stop = loop {
        if let Some(slack) = cfg.purge_slack {
            let dropped = model.purge_slack(&sol.y, slack);
            if dropped > 0 {
                log::debug!("{phase} iteration {iteration}: purged {dropped} slack cuts");
            }
        }
        let sep_start = Instant::now();
        let mut violations = Vec::new();
        for &family in &families {
            let floor = if family == CutFamily::Nonneg {
                cfg.nonneg_floor.min(cfg.threshold)
            } else {
                cfg.threshold
            };
            let seed = cfg.seed.wrapping_add(iteration as u64);
            violations.extend(separate_family(family, &sol.y, g, cands, floor, seed));
        }
        observe(phase, iteration, &violations);
        let mut selection = select_cuts(violations, cfg.threshold, cap);
        let above = selection.total_above_threshold();
        let mut record = IterationRecord {
            phase,
            iteration,
            objective: sol.objective,
            status: sol.status,
            solver_iterations: sol.iterations,
            solve_seconds: solve_secs,
            pool_size: model.cuts().len(),
            separation: selection.counts.clone(),
            violations_above_threshold: above,
            cuts_added: 0,
            separate_seconds: 0.0,
        };
        let reason = if above == 0 || last_round {
            Some(StopReason::FewViolations)
        } else if iteration >= cfg.max_iters {
            Some(StopReason::MaxIters)
        } else if cfg
            .time_limit
            .is_some_and(|t| started.elapsed().as_secs_f64() >= t)
        {
            Some(StopReason::TimeLimit)
        } else {
            for cut in &mut selection.cuts {
                cut.birth_iteration = iteration + 1;
            }
            let summary = model.add_cuts(selection.cuts)?;
            record.cuts_added = summary.added;
            last_round = above < stop_below;
            (summary.added == 0).then_some(StopReason::NoNewCuts)
        };
        record.separate_seconds = sep_start.elapsed().as_secs_f64();
        log::info!(
            "{phase} it={iteration} obj={:.6} status={:?} pool={} above={} added={} solve={:.2}s",
            record.objective,
            record.status,
            record.pool_size,
            above,
            record.cuts_added,
            record.solve_seconds
        );
        trace.push(record);
        if let Some(reason) = reason {
            break reason;
        }
        iteration += 1;
        (sol, solve_secs) = checked_solve(&model, cfg, phase, iteration, &trace)?;
    };
    Ok(PhaseOutcome {
        model,
        solution: sol,
        trace,
        stop,
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Phase 1 from the plain theta relaxation; its first record is the theta solve.
pub fn run_phase1(
    g: &Graph,
    cfg: &LoopConfig,
    cands: &Candidates,
) -> Result<PhaseOutcome, LoopError> {
    run_phase(
        g,
        cfg,
        Phase::Phase1,
        SdpModel::for_problem(g, cfg.problem),
        None,
        cands,
        &mut |_, _, _| {},
    )
}

/// Phase 2 continuing from the final pool and solution of phase 1.
pub fn run_phase2(
    g: &Graph,
    cfg: &LoopConfig,
    phase1: PhaseOutcome,
    cands: &Candidates,
) -> Result<PhaseOutcome, LoopError> {
    let last_secs = phase1.trace.last().map_or(0.0, |r| r.solve_seconds);
    run_phase(
        g,
        cfg,
        Phase::Phase2,
        phase1.model,
        Some((phase1.solution, last_secs)),
        cands,
        &mut |_, _, _| {},
    )
}

/// Rounds a bound to the integer it certifies (floor for stable, ceil for coloring).
pub fn integer_bound(problem: Problem, bound: f64) -> i64 {
    match problem {
        Problem::Stable => (bound + ROUNDING_TOL).floor() as i64,
        Problem::Coloring => (bound - ROUNDING_TOL).ceil() as i64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInfo {
    pub id: String,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub theta_seconds: f64,
    pub phase1_seconds: f64,
    pub phase2_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub schema_version: u32,
    pub graph: GraphInfo,
    pub problem: Problem,
    pub theta: f64,
    pub bound1: f64,
    pub bound2: f64,
    /// Dual objectives of the final phase 1 and phase 2 solves. The dual
    /// iterate is feasible, so these are the values that certify the bounds.
    pub bound1_dual: f64,
    pub bound2_dual: f64,
    /// Integer bound certified after phase 1 (from `bound1_dual`).
    pub integer_bound1: i64,
    /// Integer bound certified after phase 2 (from `bound2_dual`).
    pub integer_bound: i64,
    /// Exact alpha or chi when known.
    pub exact: Option<usize>,
    pub phase1_stop: StopReason,
    pub phase2_stop: StopReason,
    pub pool_size: usize,
    pub iterations: Vec<IterationRecord>,
    pub timings: Timings,
    pub config: LoopConfig,
}

impl BoundReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Theta, phase 1 and phase 2 on `g`, deterministic given `(g, cfg)`.
pub fn compute_bounds(g: &Graph, id: &str, cfg: &LoopConfig) -> Result<BoundReport, LoopError> {
    compute_bounds_observed(g, id, cfg, &mut |_, _, _| {})
}

/// [`compute_bounds`], handing every separation round's violations (before
/// selection) to `observe`.
pub fn compute_bounds_observed(
    g: &Graph,
    id: &str,
    cfg: &LoopConfig,
    observe: &mut dyn FnMut(Phase, usize, &[Violation]),
) -> Result<BoundReport, LoopError> {
    cfg.validate()?;
    let start = Instant::now();
    let cands = Candidates::build(g, &cfg.candidates);
    let p1 = run_phase(
        g,
        cfg,
        Phase::Phase1,
        SdpModel::for_problem(g, cfg.problem),
        None,
        &cands,
        observe,
    )?;
    let theta = p1.trace[0].objective;
    let theta_seconds = p1.trace[0].solve_seconds;
    let bound1 = p1.bound();
    let bound1_dual = p1.solution.dual_objective;
    let (phase1_stop, phase1_seconds) = (p1.stop, p1.seconds);
    let mut iterations = p1.trace.clone();
    let last_secs = p1.trace.last().map_or(0.0, |r| r.solve_seconds);
    let p2 = run_phase(
        g,
        cfg,
        Phase::Phase2,
        p1.model,
        Some((p1.solution, last_secs)),
        &cands,
        observe,
    )?;
    iterations.extend(p2.trace.iter().cloned());
    Ok(BoundReport {
        schema_version: REPORT_SCHEMA_VERSION,
        graph: GraphInfo {
            id: id.to_string(),
            n: g.n(),
            m: g.m(),
        },
        problem: cfg.problem,
        theta,
        bound1,
        bound2: p2.bound(),
        bound1_dual,
        bound2_dual: p2.solution.dual_objective,
        integer_bound1: integer_bound(cfg.problem, bound1_dual),
        integer_bound: integer_bound(cfg.problem, p2.solution.dual_objective),
        exact: None,
        phase1_stop,
        phase2_stop: p2.stop,
        pool_size: p2.model.cuts().len(),
        iterations,
        timings: Timings {
            theta_seconds,
            phase1_seconds,
            phase2_seconds: p2.seconds,
            total_seconds: start.elapsed().as_secs_f64(),
        },
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_cycle;

    #[test]
    fn toggles_parse() {
        let t: FamilyToggles = "nonneg, tri".parse().unwrap();
        assert!(t.allows(CutFamily::Nonneg) && t.allows(CutFamily::TriCol));
        assert!(!t.allows(CutFamily::CliqueJoin));
        assert_eq!(
            "all".parse::<FamilyToggles>().unwrap(),
            FamilyToggles::default()
        );
        assert!("tri,webs".parse::<FamilyToggles>().is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(integer_bound(Problem::Stable, 9.9999999), 10);
        assert_eq!(integer_bound(Problem::Stable, 10.4), 10);
        assert_eq!(integer_bound(Problem::Coloring, 3.0000001), 3);
        assert_eq!(integer_bound(Problem::Coloring, 3.468), 4);
    }

    #[test]
    fn complete_graph_needs_no_cuts() {
        for problem in [Problem::Stable, Problem::Coloring] {
            let r = compute_bounds(&Graph::complete(5), "k5", &LoopConfig::new(problem)).unwrap();
            assert_eq!(r.pool_size, 0);
            let expect = if problem == Problem::Stable { 1.0 } else { 5.0 };
            assert!((r.bound2 - expect).abs() < 1e-6 && (r.theta - expect).abs() < 1e-6);
        }
    }

    #[test]
    fn c5_closes_to_two() {
        let r = compute_bounds(
            &gen_cycle(5).unwrap(),
            "c5",
            &LoopConfig::new(Problem::Stable),
        )
        .unwrap();
        assert!((r.theta - 5f64.sqrt()).abs() < 1e-6);
        assert!((r.bound2 - 2.0).abs() < 1e-3, "{}", r.bound2);
        assert_eq!(r.integer_bound, 2);
        let json = r.to_json();
        assert!(json.contains("\"schema_version\": 1"));
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = LoopConfig::new(Problem::Stable);
        cfg.max_iters = 0;
        assert!(compute_bounds(&Graph::complete(3), "k3", &cfg).is_err());
    }
}
