//! The two bordered theta relaxations and their growing cut pools.
//!
//! Both models live on a symmetric matrix `Y` of order `n + 1`. Index 0 is
//! the border; vertex `v` (0-based) sits at index `v + 1`.
//!
//! * stable set: maximize `sum_i Y[0][i]` subject to `Y[0][0] = 1`,
//!   `Y[0][i] = Y[i][i]`, `Y[i][j] = 0` on edges, `Y` PSD;
//! * coloring: minimize `Y[0][0]` subject to `Y[0][i] = 1`, `Y[i][i] = 1`,
//!   `Y[i][j] = 0` on edges, `Y` PSD.
//!
//! Cuts are `<=` inequalities over entries of `Y`.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexSet};
use crate::matrix::{LinearForm, SymMatrix};

/// Matrix index of the border row/column.
pub const BORDER: usize = 0;

/// Matrix index of vertex `v`.
#[inline]
pub fn vidx(v: usize) -> usize {
    v + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Stable,
    Coloring,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Stable => "stable",
            Problem::Coloring => "coloring",
        })
    }
}

impl std::str::FromStr for Problem {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "stable" => Ok(Problem::Stable),
            "coloring" => Ok(Problem::Coloring),
            other => Err(format!(
                "unknown problem '{other}' (expected stable|coloring)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Max,
    Min,
}

/// Inequality families. Each maps to exactly one inequality of the
/// stable-set or coloring relaxation hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutFamily {
    /// `X[i][j] >= 0` (either problem).
    Nonneg,
    /// `X[i][k] + X[j][k] <= X[i][j] + x_k`.
    TriStabA,
    /// `x_i + x_j + x_k <= 1 + X[i][j] + X[i][k] + X[j][k]`.
    TriStabB,
    /// `X[i][j] + X[j][k] <= X[i][k] + 1`.
    TriCol,
    /// `sum_{i in Q} X[i][j] <= X[j][j]`, `j` outside clique `Q`.
    CliqueVertex,
    /// `sum_{i in Q u Q'} X[i][i] <= 1 + sum_{i in Q, j in Q'} X[i][j]`.
    CliqueJoin,
    /// `sum_{i in Q} X[i][k] <= 1`, `k` outside clique `Q` (coloring).
    CliqueVertexCol,
    /// `sum_{i<j in C} X[i][j] <= 1` on a 5-cycle.
    C5PairsumStab,
    /// `sum_{i in C} X[i][k] <= (|C|-1)/2 X[k][k]`.
    OddcycleVertexStab,
    /// `sum_{i in C} X[i][i] + (|C|-1)/2 X[k][k] <= (|C|-1)/2 + sum_{i in C} X[i][k]`.
    OddcycleVertexStabComplement,
    /// `sum_{i<j in C} X[i][j] <= 2` on a 5-cycle.
    C5PairsumCol,
    /// `sum_{i in C} X[i][k] <= (|C|-1)/2`.
    OddcycleVertexCol,
}

impl CutFamily {
    pub const ALL: [CutFamily; 12] = [
        CutFamily::Nonneg,
        CutFamily::TriStabA,
        CutFamily::TriStabB,
        CutFamily::TriCol,
        CutFamily::CliqueVertex,
        CutFamily::CliqueJoin,
        CutFamily::CliqueVertexCol,
        CutFamily::C5PairsumStab,
        CutFamily::OddcycleVertexStab,
        CutFamily::OddcycleVertexStabComplement,
        CutFamily::C5PairsumCol,
        CutFamily::OddcycleVertexCol,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CutFamily::Nonneg => "nonneg",
            CutFamily::TriStabA => "tri_stab_a",
            CutFamily::TriStabB => "tri_stab_b",
            CutFamily::TriCol => "tri_col",
            CutFamily::CliqueVertex => "clique_vertex",
            CutFamily::CliqueJoin => "clique_join",
            CutFamily::CliqueVertexCol => "clique_vertex_col",
            CutFamily::C5PairsumStab => "c5_pairsum_stab",
            CutFamily::OddcycleVertexStab => "oddcycle_vertex_stab",
            CutFamily::OddcycleVertexStabComplement => "oddcycle_vertex_stab_complement",
            CutFamily::C5PairsumCol => "c5_pairsum_col",
            CutFamily::OddcycleVertexCol => "oddcycle_vertex_col",
        }
    }

    /// The problem this family is valid for; `None` means both.
    pub fn problem(self) -> Option<Problem> {
        match self {
            CutFamily::Nonneg => None,
            CutFamily::TriCol
            | CutFamily::CliqueVertexCol
            | CutFamily::C5PairsumCol
            | CutFamily::OddcycleVertexCol => Some(Problem::Coloring),
            _ => Some(Problem::Stable),
        }
    }

    pub fn applies_to(self, problem: Problem) -> bool {
        self.problem().map_or(true, |p| p == problem)
    }
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The combinatorial object that generated a cut. Vertices are 0-based.
///
/// Variant fields are canonical (sorted or canonically rotated), so
/// `(family, witness)` identifies a cut and the derived order is the
/// tie-break order used by cut selection.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Matrix entry `X[i][j]`, `i < j`.
    Entry {
        i: usize,
        j: usize,
    },
    /// Triangle `{i, j, k}`; which slot is distinguished depends on the family.
    Triple {
        i: usize,
        j: usize,
        k: usize,
    },
    CliqueVertex {
        clique: VertexSet,
        vertex: usize,
    },
    CliquePair {
        first: VertexSet,
        second: VertexSet,
    },
    Cycle {
        cycle: Vec<usize>,
    },
    CycleVertex {
        cycle: Vec<usize>,
        vertex: usize,
    },
}

impl Witness {
    /// Vertices touched by the witness, sorted.
    pub fn vertices(&self) -> VertexSet {
        match self {
            Witness::Entry { i, j } => VertexSet::new(vec![*i, *j]),
            Witness::Triple { i, j, k } => VertexSet::new(vec![*i, *j, *k]),
            Witness::CliqueVertex { clique, vertex } => {
                let mut v = clique.to_vec();
                v.push(*vertex);
                VertexSet::new(v)
            }
            Witness::CliquePair { first, second } => {
                VertexSet::new(first.iter().chain(second.iter()).copied().collect())
            }
            Witness::Cycle { cycle } => VertexSet::new(cycle.clone()),
            Witness::CycleVertex { cycle, vertex } => {
                let mut v = cycle.clone();
                v.push(*vertex);
                VertexSet::new(v)
            }
        }
    }

    /// Human-readable form with 1-based vertex labels.
    pub fn describe(&self) -> String {
        let list = |vs: &[usize]| {
            vs.iter()
                .map(|v| (v + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Witness::Entry { i, j } => format!("({},{})", i + 1, j + 1),
            Witness::Triple { i, j, k } => format!("({},{},{})", i + 1, j + 1, k + 1),
            Witness::CliqueVertex { clique, vertex } => {
                format!("Q={{{}}} v={}", list(clique), vertex + 1)
            }
            Witness::CliquePair { first, second } => {
                format!("Q={{{}}} Q'={{{}}}", list(first), list(second))
            }
            Witness::Cycle { cycle } => format!("C=[{}]", list(cycle)),
            Witness::CycleVertex { cycle, vertex } => {
                format!("C=[{}] v={}", list(cycle), vertex + 1)
            }
        }
    }
}

/// One linear inequality `coeffs . Y <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub coeffs: LinearForm,
    pub rhs: f64,
    pub family: CutFamily,
    pub witness: Witness,
    pub birth_iteration: usize,
}

impl Cut {
    pub fn new(family: CutFamily, witness: Witness, coeffs: LinearForm, rhs: f64) -> Self {
        debug_assert!(!coeffs.is_empty(), "cut without coefficients");
        Cut {
            coeffs,
            rhs,
            family,
            witness,
            birth_iteration: 0,
        }
    }

    /// `lhs - rhs` at `y`; positive means violated.
    pub fn violation(&self, y: &SymMatrix) -> f64 {
        self.coeffs.evaluate(y) - self.rhs
    }

    pub fn key(&self) -> (CutFamily, Witness) {
        (self.family, self.witness.clone())
    }
}

/// Which structural constraint an equality encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureTag {
    /// `Y[0][0] = 1`.
    CornerFixed,
    /// `Y[0][i] = 1`.
    BorderFixed,
    /// `Y[0][i] = Y[i][i]`.
    DiagonalBorderLink,
    /// `Y[i][i] = 1`.
    DiagonalFixed,
    /// `Y[i][j] = 0` for an edge.
    EdgeZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equality {
    pub form: LinearForm,
    pub rhs: f64,
    pub tag: StructureTag,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{family} cut references index {index} but the model has order {dim}")]
    IndexOutOfRange {
        family: CutFamily,
        index: usize,
        dim: usize,
    },
    #[error("{family} cut has no coefficients")]
    EmptyCut { family: CutFamily },
    #[error("{family} cut is not valid for the {problem} relaxation")]
    WrongProblem { family: CutFamily, problem: Problem },
}

/// Outcome of [`SdpModel::add_cuts`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AddSummary {
    pub added: usize,
    pub duplicates: usize,
}

#[derive(Debug, Clone)]
pub struct SdpModel {
    problem: Problem,
    dim: usize,
    sense: Sense,
    objective: LinearForm,
    equalities: Vec<Equality>,
    cuts: Vec<Cut>,
    keys: HashSet<(CutFamily, Witness)>,
    duplicates_skipped: usize,
}

impl SdpModel {
    /// Relaxation whose optimum is the theta number of `g`.
    pub fn theta_stable(g: &Graph) -> Self {
        let n = g.n();
        let mut eqs = Vec::with_capacity(1 + n + g.m());
        eqs.push(Equality {
            form: LinearForm::new([(BORDER, BORDER, 1.0)]),
            rhs: 1.0,
            tag: StructureTag::CornerFixed,
        });
        for v in 0..n {
            eqs.push(Equality {
                form: LinearForm::new([(BORDER, vidx(v), 1.0), (vidx(v), vidx(v), -1.0)]),
                rhs: 0.0,
                tag: StructureTag::DiagonalBorderLink,
            });
        }
        eqs.extend(edge_zeros(g));
        SdpModel::with_structure(
            Problem::Stable,
            n + 1,
            Sense::Max,
            LinearForm::new((0..n).map(|v| (BORDER, vidx(v), 1.0))),
            eqs,
        )
    }

    /// Relaxation whose optimum is the theta number of the complement of
    /// `g`, a lower bound on the chromatic number of `g`.
    pub fn theta_coloring(g: &Graph) -> Self {
        let n = g.n();
        let mut eqs = Vec::with_capacity(2 * n + g.m());
        for v in 0..n {
            eqs.push(Equality {
                form: LinearForm::new([(BORDER, vidx(v), 1.0)]),
                rhs: 1.0,
                tag: StructureTag::BorderFixed,
            });
        }
        for v in 0..n {
            eqs.push(Equality {
                form: LinearForm::new([(vidx(v), vidx(v), 1.0)]),
                rhs: 1.0,
                tag: StructureTag::DiagonalFixed,
            });
        }
        eqs.extend(edge_zeros(g));
        SdpModel::with_structure(
            Problem::Coloring,
            n + 1,
            Sense::Min,
            LinearForm::new([(BORDER, BORDER, 1.0)]),
            eqs,
        )
    }

    pub fn for_problem(g: &Graph, problem: Problem) -> Self {
        match problem {
            Problem::Stable => SdpModel::theta_stable(g),
            Problem::Coloring => SdpModel::theta_coloring(g),
        }
    }

    fn with_structure(
        problem: Problem,
        dim: usize,
        sense: Sense,
        objective: LinearForm,
        equalities: Vec<Equality>,
    ) -> Self {
        SdpModel {
            problem,
            dim,
            sense,
            objective,
            equalities,
            cuts: Vec::new(),
            keys: HashSet::new(),
            duplicates_skipped: 0,
        }
    }

    /// Appends cuts, skipping any whose `(family, witness)` is already pooled.
    pub fn add_cuts(
        &mut self,
        cuts: impl IntoIterator<Item = Cut>,
    ) -> Result<AddSummary, ModelError> {
        let cuts: Vec<Cut> = cuts.into_iter().collect();
        for cut in &cuts {
            self.check_cut(cut)?;
        }
        let mut summary = AddSummary::default();
        for cut in cuts {
            if self.keys.insert(cut.key()) {
                self.cuts.push(cut);
                summary.added += 1;
            } else {
                summary.duplicates += 1;
            }
        }
        self.duplicates_skipped += summary.duplicates;
        Ok(summary)
    }

    fn check_cut(&self, cut: &Cut) -> Result<(), ModelError> {
        match cut.coeffs.max_index() {
            None => Err(ModelError::EmptyCut { family: cut.family }),
            Some(index) if index >= self.dim => Err(ModelError::IndexOutOfRange {
                family: cut.family,
                index,
                dim: self.dim,
            }),
            Some(_) if !cut.family.applies_to(self.problem) => Err(ModelError::WrongProblem {
                family: cut.family,
                problem: self.problem,
            }),
            Some(_) => Ok(()),
        }
    }

    /// Drops cuts whose slack at `y` exceeds `slack`; returns how many went.
    pub fn purge_slack(&mut self, y: &SymMatrix, slack: f64) -> usize {
        let before = self.cuts.len();
        self.cuts.retain(|c| -c.violation(y) <= slack);
        self.keys = self.cuts.iter().map(Cut::key).collect();
        before - self.cuts.len()
    }

    pub fn problem(&self) -> Problem {
        self.problem
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &LinearForm {
        &self.objective
    }

    pub fn equalities(&self) -> &[Equality] {
        &self.equalities
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn duplicates_skipped(&self) -> usize {
        self.duplicates_skipped
    }

    pub fn contains_cut(&self, family: CutFamily, witness: &Witness) -> bool {
        self.keys.contains(&(family, witness.clone()))
    }

    /// Text dump, one constraint block per line group:
    ///
    /// ```text
    /// thetacut-model 1
    /// problem <stable|coloring>
    /// dim <d>
    /// sense <max|min>
    /// objective <nnz>
    /// <row> <col> <coef>          (repeated nnz times, 0-based, row <= col)
    /// equality <id> <tag> <rhs> <nnz>
    /// <row> <col> <coef> ...
    /// cut <id> <family> <rhs> <nnz>
    /// <row> <col> <coef> ...
    /// end
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let write_form = |out: &mut String, f: &LinearForm| {
            for t in f.terms() {
                let _ = writeln!(out, "{} {} {}", t.row, t.col, t.coef);
            }
        };
        let _ = writeln!(out, "thetacut-model 1");
        let _ = writeln!(out, "problem {}", self.problem);
        let _ = writeln!(out, "dim {}", self.dim);
        let _ = writeln!(
            out,
            "sense {}",
            if self.sense == Sense::Max {
                "max"
            } else {
                "min"
            }
        );
        let _ = writeln!(out, "objective {}", self.objective.terms().len());
        write_form(&mut out, &self.objective);
        for (id, eq) in self.equalities.iter().enumerate() {
            let tag = serde_json::to_value(eq.tag).expect("tag serializes");
            let _ = writeln!(
                out,
                "equality {id} {} {} {}",
                tag.as_str().unwrap_or("?"),
                eq.rhs,
                eq.form.terms().len()
            );
            write_form(&mut out, &eq.form);
        }
        for (id, cut) in self.cuts.iter().enumerate() {
            let _ = writeln!(
                out,
                "cut {id} {} {} {}",
                cut.family,
                cut.rhs,
                cut.coeffs.terms().len()
            );
            write_form(&mut out, &cut.coeffs);
        }
        out.push_str("end\n");
        out
    }
}

fn edge_zeros(g: &Graph) -> impl Iterator<Item = Equality> + '_ {
    g.edges().map(|(i, j)| Equality {
        form: LinearForm::new([(vidx(i), vidx(j), 1.0)]),
        rhs: 0.0,
        tag: StructureTag::EdgeZero,
    })
}
