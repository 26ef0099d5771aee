//! Numerical engine: an infeasible-start primal-dual interior-point method
//! for one PSD block plus the nonnegative slacks of the cut rows, and an
//! independent certificate check of whatever it returns.
//!
//! Internally every model is brought to
//!
//! ```text
//! min <C, Y>  s.t.  <A_i, Y> + s_i = b_i  (s_i present for cut rows only),
//!                   Y PSD, s >= 0
//! ```
//!
//! and solved with the HKM search direction and Mehrotra's
//! predictor-corrector. The Schur complement is dense and factored with a
//! Cholesky decomposition.

use std::time::Instant;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::{cholesky_in_place, cholesky_in_place_scratch};
use faer::linalg::triangular_solve::{
    solve_lower_triangular_in_place, solve_upper_triangular_in_place,
};
use faer::{Mat, MatRef, Par, Side};
use serde::{Deserialize, Serialize};

use crate::matrix::{LinearForm, SymMatrix};
use crate::model::{SdpModel, Sense};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Relative primal/dual infeasibility target.
    pub feastol: f64,
    /// Relative duality gap target.
    pub gaptol: f64,
    pub max_solver_iters: usize,
    /// 0 silent, 1 summary, 2 per-iteration (through `log`).
    pub verbosity: u8,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feastol: 1e-8,
            gaptol: 1e-8,
            max_solver_iters: 100,
            verbosity: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.feastol > 0.0 && self.gaptol > 0.0) {
            return Err("solver tolerances must be positive".into());
        }
        if self.max_solver_iters == 0 {
            return Err("max_solver_iters must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// Every residual within 100x the requested tolerances.
    NearOptimal,
    Infeasible,
    NumericalFailure,
}

impl SolveStatus {
    pub fn is_usable(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::NearOptimal)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Largest `|<A_i, Y> - b_i|` over the structural equalities.
    pub max_equality_violation: f64,
    /// Largest positive `<G_k, Y> - h_k` over the cut pool (0 if none).
    pub max_cut_violation: f64,
    pub min_eigenvalue: f64,
    /// Relative primal-dual objective gap of the final iterate.
    pub duality_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrimalSolution {
    pub y: SymMatrix,
    /// Objective in the model's own sense (the bound itself).
    pub objective: f64,
    pub dual_objective: f64,
    pub status: SolveStatus,
    pub residuals: Residuals,
    pub iterations: usize,
    pub seconds: f64,
}

/// Anything that can solve an [`SdpModel`] under the solve/certify contract.
pub trait SdpSolver {
    fn solve(&self, model: &SdpModel, cfg: &SolverConfig) -> PrimalSolution;
}

/// The built-in interior-point method.
#[derive(Debug, Clone, Copy, Default)]
pub struct InteriorPoint;

impl SdpSolver for InteriorPoint {
    fn solve(&self, model: &SdpModel, cfg: &SolverConfig) -> PrimalSolution {
        solve(model, cfg)
    }
}

/// Solves `model` with the interior-point method.
pub fn solve(model: &SdpModel, cfg: &SolverConfig) -> PrimalSolution {
    let start = Instant::now();
    let problem = StandardForm::from_model(model);
    let outcome = Ipm::new(&problem, cfg).run();
    let y = SymMatrix::from_faer(outcome.y.as_ref());
    let sign = if model.sense() == Sense::Max {
        -1.0
    } else {
        1.0
    };
    let residuals = Residuals {
        duality_gap: Some(outcome.rel_gap),
        ..measure(&y, model)
    };
    let sol = PrimalSolution {
        objective: model.objective().evaluate(&y),
        dual_objective: sign * outcome.dual_objective,
        y,
        status: outcome.status,
        residuals,
        iterations: outcome.iterations,
        seconds: start.elapsed().as_secs_f64(),
    };
    if cfg.verbosity >= 1 {
        log::info!(
            "solve: dim={} rows={} status={:?} obj={:.8} iters={} time={:.2}s",
            model.dim(),
            problem.rows.len(),
            sol.status,
            sol.objective,
            sol.iterations,
            sol.seconds
        );
    }
    sol
}

fn measure(y: &SymMatrix, model: &SdpModel) -> Residuals {
    let max_equality_violation = model
        .equalities()
        .iter()
        .map(|e| (e.form.evaluate(y) - e.rhs).abs())
        .fold(0.0, f64::max);
    let max_cut_violation = model
        .cuts()
        .iter()
        .map(|c| c.violation(y))
        .fold(0.0, f64::max);
    Residuals {
        max_equality_violation,
        max_cut_violation,
        min_eigenvalue: y.min_eigenvalue(),
        duality_gap: None,
    }
}

/// Solver-independent check of a claimed solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertifyReport {
    pub objective: f64,
    pub min_eigenvalue: f64,
    pub max_equality_violation: f64,
    pub max_cut_violation: f64,
    pub asymmetry: f64,
    /// One message per residual that exceeds the tolerance.
    pub breaches: Vec<String>,
}

impl CertifyReport {
    pub fn is_feasible(&self) -> bool {
        self.breaches.is_empty()
    }
}

/// Recomputes PSD-ness, equality residuals and cut residuals of `sol.y`
/// against `model` and flags every breach larger than `tol`.
pub fn certify(sol: &PrimalSolution, model: &SdpModel, tol: f64) -> CertifyReport {
    certify_matrix(&sol.y, model, tol)
}

/// [`certify`] for a bare matrix (e.g. a hand-built point).
pub fn certify_matrix(y: &SymMatrix, model: &SdpModel, tol: f64) -> CertifyReport {
    let mut breaches = Vec::new();
    if y.dim() != model.dim() {
        breaches.push(format!(
            "matrix order {} differs from model order {}",
            y.dim(),
            model.dim()
        ));
        return CertifyReport {
            objective: f64::NAN,
            min_eigenvalue: f64::NAN,
            max_equality_violation: f64::INFINITY,
            max_cut_violation: f64::INFINITY,
            asymmetry: f64::NAN,
            breaches,
        };
    }
    let d = y.dim();
    let asymmetry = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| (y.get(i, j) - y.get(j, i)).abs())
        .fold(0.0, f64::max);
    let r = measure(y, model);
    if r.min_eigenvalue < -tol {
        breaches.push(format!(
            "min eigenvalue {:.3e} below -{tol:.1e}",
            r.min_eigenvalue
        ));
    }
    if r.max_equality_violation > tol {
        breaches.push(format!(
            "equality violation {:.3e} above {tol:.1e}",
            r.max_equality_violation
        ));
    }
    if r.max_cut_violation > tol {
        breaches.push(format!(
            "cut violation {:.3e} above {tol:.1e}",
            r.max_cut_violation
        ));
    }
    if asymmetry > tol {
        breaches.push(format!("asymmetry {asymmetry:.3e} above {tol:.1e}"));
    }
    CertifyReport {
        objective: model.objective().evaluate(y),
        min_eigenvalue: r.min_eigenvalue,
        max_equality_violation: r.max_equality_violation,
        max_cut_violation: r.max_cut_violation,
        asymmetry,
        breaches,
    }
}

struct Row {
    terms: Vec<(usize, usize, f64)>,
}

struct StandardForm {
    dim: usize,
    c: Mat<f64>,
    rows: Vec<Row>,
    b: Vec<f64>,
    /// Indices of rows carrying a slack, in order.
    slack_rows: Vec<usize>,
}

impl StandardForm {
    fn from_model(model: &SdpModel) -> Self {
        let dim = model.dim();
        let sign = if model.sense() == Sense::Max {
            -1.0
        } else {
            1.0
        };
        let c = sym_of(model.objective(), dim, sign);
        let mut rows = Vec::with_capacity(model.equalities().len() + model.cuts().len());
        let mut b = Vec::with_capacity(rows.capacity());
        for eq in model.equalities() {
            rows.push(Row {
                terms: triples(&eq.form),
            });
            b.push(eq.rhs);
        }
        let mut slack_rows = Vec::with_capacity(model.cuts().len());
        for cut in model.cuts() {
            slack_rows.push(rows.len());
            rows.push(Row {
                terms: triples(&cut.coeffs),
            });
            b.push(cut.rhs);
        }
        StandardForm {
            dim,
            c,
            rows,
            b,
            slack_rows,
        }
    }

    /// `<A_i, G>` for every row, `G` not necessarily symmetric.
    fn apply(&self, g: MatRef<'_, f64>) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                row.terms
                    .iter()
                    .map(|&(r, c, v)| {
                        if r == c {
                            v * g[(r, r)]
                        } else {
                            0.5 * v * (g[(r, c)] + g[(c, r)])
                        }
                    })
                    .sum()
            })
            .collect()
    }

    /// `sum_i w_i A_i`.
    fn adjoint(&self, w: &[f64]) -> Mat<f64> {
        let mut out = Mat::<f64>::zeros(self.dim, self.dim);
        for (row, &wi) in self.rows.iter().zip(w) {
            if wi == 0.0 {
                continue;
            }
            for &(r, c, v) in &row.terms {
                if r == c {
                    out[(r, r)] += wi * v;
                } else {
                    out[(r, c)] += 0.5 * wi * v;
                    out[(c, r)] += 0.5 * wi * v;
                }
            }
        }
        out
    }

    fn frobenius_b(&self) -> f64 {
        self.b.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn triples(form: &LinearForm) -> Vec<(usize, usize, f64)> {
    form.terms()
        .iter()
        .map(|t| (t.row, t.col, t.coef))
        .collect()
}

fn sym_of(form: &LinearForm, dim: usize, scale: f64) -> Mat<f64> {
    let mut m = Mat::<f64>::zeros(dim, dim);
    for t in form.terms() {
        if t.row == t.col {
            m[(t.row, t.row)] += scale * t.coef;
        } else {
            m[(t.row, t.col)] += 0.5 * scale * t.coef;
            m[(t.col, t.row)] += 0.5 * scale * t.coef;
        }
    }
    m
}

fn frob(m: MatRef<'_, f64>) -> f64 {
    m.norm_l2()
}

fn inner(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)] * b[(i, j)];
        }
    }
    acc
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn symmetrize(m: &mut Mat<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in j + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// In-place lower Cholesky factor; `None` if the matrix is not numerically PD.
fn cholesky(mut a: Mat<f64>) -> Option<Mat<f64>> {
    let n = a.nrows();
    let mut buf = MemBuffer::new(cholesky_in_place_scratch::<f64>(
        n,
        Par::Seq,
        Default::default(),
    ));
    let stack = MemStack::new(&mut buf);
    cholesky_in_place(
        a.as_mut(),
        Default::default(),
        Par::Seq,
        stack,
        Default::default(),
    )
    .ok()?;
    for j in 0..n {
        for i in 0..j {
            a[(i, j)] = 0.0;
        }
    }
    Some(a)
}

fn chol_solve(l: MatRef<'_, f64>, rhs: &[f64]) -> Vec<f64> {
    let mut x = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
    solve_lower_triangular_in_place(l, x.as_mut(), Par::Seq);
    solve_upper_triangular_in_place(l.transpose(), x.as_mut(), Par::Seq);
    (0..rhs.len()).map(|i| x[(i, 0)]).collect()
}

/// Schur complement (lower triangle) with the factor of a diagonal shift of it.
struct SchurSystem {
    matrix: Mat<f64>,
    factor: Mat<f64>,
}

impl SchurSystem {
    /// Factors `matrix`, shifting the diagonal by a growing multiple of its
    /// largest entry until the factor exists and is finite.
    fn new(matrix: Mat<f64>) -> Option<Self> {
        let n = matrix.nrows();
        let max_diag = (0..n)
            .map(|i| matrix[(i, i)])
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let mut shift = 0.0;
        for _ in 0..8 {
            let mut shifted = matrix.clone();
            (0..n).for_each(|i| shifted[(i, i)] += shift);
            if let Some(factor) = cholesky(shifted).filter(|f| f.as_ref().is_all_finite()) {
                return Some(SchurSystem { matrix, factor });
            }
            shift = if shift == 0.0 {
                1e-14 * max_diag
            } else {
                shift * 100.0
            };
        }
        None
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut out = vec![0.0; n];
        for j in 0..n {
            out[j] += self.matrix[(j, j)] * x[j];
            for i in j + 1..n {
                let v = self.matrix[(i, j)];
                out[i] += v * x[j];
                out[j] += v * x[i];
            }
        }
        out
    }

    /// Conjugate gradients on the unshifted matrix, preconditioned by the
    /// shifted factor. Near a degenerate optimum the matrix is close
    /// to singular and plain refinement stalls; this keeps the best iterate
    /// and stops once the residual has not halved for three rounds.
    // Negated comparisons also stop on NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let target = 1e-15 * norm2(rhs);
        let mut x = chol_solve(self.factor.as_ref(), rhs);
        let residual =
            |x: &[f64]| -> Vec<f64> { rhs.iter().zip(self.apply(x)).map(|(b, a)| b - a).collect() };
        let mut r = residual(&x);
        let mut best = (norm2(&r), x.clone());
        let mut z = chol_solve(self.factor.as_ref(), &r);
        let mut d = z.clone();
        let mut rz = dot(&r, &z);
        let mut since_best = 0;
        for _ in 0..50 {
            if best.0 <= target || since_best >= 3 || !(rz > 0.0) {
                break;
            }
            let q = self.apply(&d);
            let dq = dot(&d, &q);
            if !(dq > 0.0) {
                break;
            }
            let step = rz / dq;
            x.iter_mut().zip(&d).for_each(|(xi, di)| *xi += step * di);
            r.iter_mut().zip(&q).for_each(|(ri, qi)| *ri -= step * qi);
            let norm = norm2(&r);
            if !norm.is_finite() {
                break;
            }
            if norm < 0.5 * best.0 {
                since_best = 0;
            } else {
                since_best += 1;
            }
            if norm < best.0 {
                best = (norm, x.clone());
            }
            z = chol_solve(self.factor.as_ref(), &r);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            d.iter_mut()
                .zip(&z)
                .for_each(|(di, zi)| *di = zi + beta * *di);
        }
        best.1
    }
}

fn spd_inverse(l: MatRef<'_, f64>) -> Mat<f64> {
    let n = l.nrows();
    let mut x = Mat::<f64>::identity(n, n);
    solve_lower_triangular_in_place(l, x.as_mut(), Par::Seq);
    solve_upper_triangular_in_place(l.transpose(), x.as_mut(), Par::Seq);
    symmetrize(&mut x);
    x
}

/// Largest `t` with `X + t dX` PSD, given the Cholesky factor of `X`.
fn psd_max_step(l: MatRef<'_, f64>, dx: MatRef<'_, f64>) -> f64 {
    let mut a = dx.to_owned();
    solve_lower_triangular_in_place(l, a.as_mut(), Par::Seq);
    let mut b = a.transpose().to_owned();
    solve_lower_triangular_in_place(l, b.as_mut(), Par::Seq);
    symmetrize(&mut b);
    let lambda_min = b
        .self_adjoint_eigenvalues(Side::Lower)
        .map(|ev| ev[0])
        .unwrap_or(f64::NEG_INFINITY);
    if lambda_min >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lambda_min
    }
}

fn lp_max_step(x: &[f64], dx: &[f64]) -> f64 {
    x.iter()
        .zip(dx)
        .filter(|(_, d)| **d < 0.0)
        .map(|(v, d)| -v / d)
        .fold(f64::INFINITY, f64::min)
}

struct Outcome {
    y: Mat<f64>,
    dual_objective: f64,
    rel_gap: f64,
    status: SolveStatus,
    iterations: usize,
}

struct Direction {
    dy: Vec<f64>,
    d_y: Mat<f64>,
    d_z: Mat<f64>,
    ds: Vec<f64>,
    dz: Vec<f64>,
}

struct Ipm<'a> {
    p: &'a StandardForm,
    cfg: &'a SolverConfig,
    y: Mat<f64>,
    z: Mat<f64>,
    mult: Vec<f64>,
    s: Vec<f64>,
    zs: Vec<f64>,
}

#[derive(Clone, Copy)]
struct Metrics {
    pobj: f64,
    dobj: f64,
    pinf: f64,
    dinf: f64,
    gap: f64,
    max_abs_pinf: f64,
}

impl<'a> Ipm<'a> {
    fn new(p: &'a StandardForm, cfg: &'a SolverConfig) -> Self {
        let d = p.dim as f64;
        let mut xi: f64 = 10f64.max(d.sqrt());
        let mut eta: f64 = 10f64.max(d.sqrt()).max(frob(p.c.as_ref()));
        for (row, &bi) in p.rows.iter().zip(&p.b) {
            let norm_a = row
                .terms
                .iter()
                .map(|t| {
                    if t.0 == t.1 {
                        t.2 * t.2
                    } else {
                        0.5 * t.2 * t.2
                    }
                })
                .sum::<f64>()
                .sqrt();
            xi = xi.max(d * (1.0 + bi.abs()) / (1.0 + norm_a));
            eta = eta.max(norm_a);
        }
        let k = p.slack_rows.len();
        Ipm {
            p,
            cfg,
            y: Mat::<f64>::identity(p.dim, p.dim) * xi,
            z: Mat::<f64>::identity(p.dim, p.dim) * eta,
            mult: vec![0.0; p.rows.len()],
            s: vec![xi; k],
            zs: vec![eta; k],
        }
    }

    fn primal_residual(&self) -> Vec<f64> {
        let ay = self.p.apply(self.y.as_ref());
        let mut r: Vec<f64> = self.p.b.iter().zip(&ay).map(|(b, a)| b - a).collect();
        for (k, &row) in self.p.slack_rows.iter().enumerate() {
            r[row] -= self.s[k];
        }
        r
    }

    fn dual_residual(&self) -> (Mat<f64>, Vec<f64>) {
        let rd = &self.p.c - self.p.adjoint(&self.mult) - &self.z;
        let r_lp = self
            .p
            .slack_rows
            .iter()
            .zip(&self.zs)
            .map(|(&row, &z)| -self.mult[row] - z)
            .collect();
        (rd, r_lp)
    }

    fn metrics(&self, rp: &[f64], rd: MatRef<'_, f64>, r_lp: &[f64]) -> Metrics {
        let pobj = inner(self.p.c.as_ref(), self.y.as_ref());
        let dobj = dot(&self.p.b, &self.mult);
        let pinf = norm2(rp) / (1.0 + self.p.frobenius_b());
        let dinf = (frob(rd).powi(2) + dot(r_lp, r_lp)).sqrt() / (1.0 + frob(self.p.c.as_ref()));
        let compl = inner(self.y.as_ref(), self.z.as_ref()) + dot(&self.s, &self.zs);
        let gap = (pobj - dobj).abs().max(compl.abs()) / (1.0 + pobj.abs() + dobj.abs());
        let max_abs_pinf = rp.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        Metrics {
            pobj,
            dobj,
            pinf,
            dinf,
            gap,
            max_abs_pinf,
        }
    }

    /// Dense Schur complement `tr(A_i Y A_j W) + [i = j slack] s/z`, lower triangle.
    fn schur(&self, w: MatRef<'_, f64>) -> Mat<f64> {
        let p = self.p;
        let d = p.dim;
        let m = p.rows.len();
        let ycols: Vec<f64> = (0..d)
            .flat_map(|j| (0..d).map(move |i| (i, j)))
            .map(|(i, j)| self.y[(i, j)])
            .collect();
        let wcols: Vec<f64> = (0..d)
            .flat_map(|j| (0..d).map(move |i| (i, j)))
            .map(|(i, j)| w[(i, j)])
            .collect();
        let mut schur = Mat::<f64>::zeros(m, m);
        // t holds T_j = Y A_j W in row-major order: t[a*d + b].
        let mut t = vec![0.0; d * d];
        for j in 0..m {
            t.iter_mut().for_each(|x| *x = 0.0);
            for &(r, c, v) in &p.rows[j].terms {
                let pairs: &[(usize, usize, f64)] = if r == c {
                    &[(r, r, 1.0)]
                } else {
                    &[(r, c, 0.5), (c, r, 0.5)]
                };
                for &(pr, ps, scale) in pairs {
                    let yr = &ycols[pr * d..(pr + 1) * d];
                    let ws = &wcols[ps * d..(ps + 1) * d];
                    let f = v * scale;
                    for (a, &ya) in yr.iter().enumerate() {
                        let coef = f * ya;
                        if coef == 0.0 {
                            continue;
                        }
                        let trow = &mut t[a * d..(a + 1) * d];
                        trow.iter_mut().zip(ws).for_each(|(x, &wv)| *x += coef * wv);
                    }
                }
            }
            for i in j..m {
                let mut acc = 0.0;
                for &(r, c, v) in &p.rows[i].terms {
                    acc += if r == c {
                        v * t[r * d + r]
                    } else {
                        0.5 * v * (t[c * d + r] + t[r * d + c])
                    };
                }
                schur[(i, j)] = acc;
            }
        }
        for (k, &row) in p.slack_rows.iter().enumerate() {
            schur[(row, row)] += self.s[k] / self.zs[k];
        }
        schur
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        schur: &SchurSystem,
        w: MatRef<'_, f64>,
        rp: &[f64],
        rd: MatRef<'_, f64>,
        r_lp: &[f64],
        rc: MatRef<'_, f64>,
        rc_lp: &[f64],
    ) -> Direction {
        let p = self.p;
        // G = Rc W - Y - Y Rd W
        let y_rd_w = &self.y * rd * w;
        let g = rc * w - &self.y - &y_rd_w;
        let ag = p.apply(g.as_ref());
        let mut rhs: Vec<f64> = rp.iter().zip(&ag).map(|(r, a)| r - a).collect();
        for (k, &row) in p.slack_rows.iter().enumerate() {
            let (s, z) = (self.s[k], self.zs[k]);
            rhs[row] -= rc_lp[k] / z - s - (s / z) * r_lp[k];
        }
        let dy = schur.solve(&rhs);
        let d_z = rd - p.adjoint(&dy);
        let mut d_y = rc * w - &self.y - &self.y * &d_z * w;
        symmetrize(&mut d_y);
        let dz: Vec<f64> = p
            .slack_rows
            .iter()
            .enumerate()
            .map(|(k, &row)| r_lp[k] - dy[row])
            .collect();
        let ds: Vec<f64> = (0..p.slack_rows.len())
            .map(|k| {
                let (s, z) = (self.s[k], self.zs[k]);
                rc_lp[k] / z - s - (s / z) * dz[k]
            })
            .collect();
        Direction {
            dy,
            d_y,
            d_z,
            ds,
            dz,
        }
    }

    fn step_lengths(
        &self,
        ly: MatRef<'_, f64>,
        lz: MatRef<'_, f64>,
        dir: &Direction,
    ) -> (f64, f64) {
        let ap = psd_max_step(ly, dir.d_y.as_ref()).min(lp_max_step(&self.s, &dir.ds));
        let ad = psd_max_step(lz, dir.d_z.as_ref()).min(lp_max_step(&self.zs, &dir.dz));
        (ap, ad)
    }

    fn score(&self, m: &Metrics) -> f64 {
        let f = self.cfg.feastol;
        let parts = [
            m.pinf / f,
            m.dinf / f,
            m.max_abs_pinf / f,
            m.gap / self.cfg.gaptol,
            m.pobj,
            m.dobj,
        ];
        if parts.iter().any(|v| !v.is_finite()) {
            return f64::NAN;
        }
        parts[..4].iter().fold(0.0, |a, &b| a.max(b))
    }

    /// Shrinks `alpha` until `base + alpha * dir` has a Cholesky factor and
    /// `lp + alpha * dlp` stays positive.
    fn safe_step(
        base: &Mat<f64>,
        dir: &Mat<f64>,
        lp: &[f64],
        dlp: &[f64],
        mut alpha: f64,
    ) -> Option<(f64, Mat<f64>)> {
        for _ in 0..30 {
            let mut trial = base + dir * alpha;
            symmetrize(&mut trial);
            let lp_ok = lp.iter().zip(dlp).all(|(v, d)| v + alpha * d > 0.0);
            if lp_ok && cholesky(trial.clone()).is_some() {
                return Some((alpha, trial));
            }
            alpha *= 0.8;
        }
        None
    }

    fn run(mut self) -> Outcome {
        let nu = (self.p.dim + self.p.slack_rows.len()) as f64;
        let k = self.p.slack_rows.len();
        let mut best: Option<(f64, Mat<f64>, Metrics)> = None;
        let mut since_best = 0;
        let mut iterations = 0;
        let mut infeasible = false;
        for iter in 0..=self.cfg.max_solver_iters {
            let rp = self.primal_residual();
            let (rd, r_lp) = self.dual_residual();
            let met = self.metrics(&rp, rd.as_ref(), &r_lp);
            if self.cfg.verbosity >= 2 {
                log::debug!(
                    "ipm {iter:3} pobj={:+.10e} dobj={:+.10e} pinf={:.2e} dinf={:.2e} gap={:.2e}",
                    met.pobj,
                    met.dobj,
                    met.pinf,
                    met.dinf,
                    met.gap
                );
            }
            let score = self.score(&met);
            if !score.is_finite() {
                break;
            }
            if best.as_ref().map_or(true, |(b, _, _)| score < *b) {
                best = Some((score, self.y.clone(), met));
                since_best = 0;
            } else {
                since_best += 1;
            }
            iterations = iter;
            if score <= 1.0 || since_best >= 8 || iter == self.cfg.max_solver_iters {
                break;
            }
            if self.mult.iter().any(|v| v.abs() > 1e13) && met.pinf > self.cfg.feastol {
                infeasible = true;
                break;
            }
            let Some(lz) = cholesky(self.z.clone()) else {
                log::debug!("ipm stop: Z not positive definite");
                break;
            };
            let Some(ly) = cholesky(self.y.clone()) else {
                log::debug!("ipm stop: Y not positive definite");
                break;
            };
            let w = spd_inverse(lz.as_ref());
            let Some(schur) = SchurSystem::new(self.schur(w.as_ref())) else {
                log::debug!("ipm stop: Schur factorization failed");
                break;
            };
            let mu = (inner(self.y.as_ref(), self.z.as_ref()) + dot(&self.s, &self.zs)) / nu;

            let zero = Mat::<f64>::zeros(self.p.dim, self.p.dim);
            let pred = self.direction(
                &schur,
                w.as_ref(),
                &rp,
                rd.as_ref(),
                &r_lp,
                zero.as_ref(),
                &vec![0.0; k],
            );
            let (ap, ad) = self.step_lengths(ly.as_ref(), lz.as_ref(), &pred);
            let (ap, ad) = (ap.min(1.0), ad.min(1.0));
            let y_aff = &self.y + &pred.d_y * ap;
            let z_aff = &self.z + &pred.d_z * ad;
            let lp_aff: f64 = (0..k)
                .map(|i| (self.s[i] + ap * pred.ds[i]) * (self.zs[i] + ad * pred.dz[i]))
                .sum();
            let mu_aff = (inner(y_aff.as_ref(), z_aff.as_ref()) + lp_aff) / nu;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            let rc =
                Mat::<f64>::identity(self.p.dim, self.p.dim) * (sigma * mu) - &pred.d_y * &pred.d_z;
            let rc_lp: Vec<f64> = (0..k)
                .map(|i| sigma * mu - pred.ds[i] * pred.dz[i])
                .collect();
            let dir = self.direction(
                &schur,
                w.as_ref(),
                &rp,
                rd.as_ref(),
                &r_lp,
                rc.as_ref(),
                &rc_lp,
            );
            let (ap_max, ad_max) = self.step_lengths(ly.as_ref(), lz.as_ref(), &dir);
            let gamma = 0.9 + 0.09 * ap.min(ad);
            let ap = (gamma * ap_max).min(1.0);
            let ad = (gamma * ad_max).min(1.0);
            let finite = dir
                .dy
                .iter()
                .chain(&dir.ds)
                .chain(&dir.dz)
                .all(|v| v.is_finite())
                && dir.d_y.as_ref().is_all_finite()
                && dir.d_z.as_ref().is_all_finite();
            if !(finite && ap.is_finite() && ad.is_finite()) {
                log::debug!("ipm stop: non-finite direction");
                break;
            }
            if self.cfg.verbosity >= 2 {
                log::debug!(
                    "ipm step ap={ap_max:.3e} ad={ad_max:.3e} sigma={sigma:.2e} mu={mu:.2e}"
                );
            }
            let Some((ap, y_new)) = Self::safe_step(&self.y, &dir.d_y, &self.s, &dir.ds, ap) else {
                log::debug!("ipm stop: no safe primal step");
                break;
            };
            let Some((ad, z_new)) = Self::safe_step(&self.z, &dir.d_z, &self.zs, &dir.dz, ad)
            else {
                log::debug!("ipm stop: no safe dual step");
                break;
            };
            if ap < 1e-10 && ad < 1e-10 {
                log::debug!("ipm stop: step lengths vanished");
                break;
            }

            self.y = y_new;
            self.s
                .iter_mut()
                .zip(&dir.ds)
                .for_each(|(s, d)| *s += ap * d);
            self.mult
                .iter_mut()
                .zip(&dir.dy)
                .for_each(|(m, d)| *m += ad * d);
            self.z = z_new;
            self.zs
                .iter_mut()
                .zip(&dir.dz)
                .for_each(|(z, d)| *z += ad * d);
        }
        let Some((score, y, met)) = best else {
            return Outcome {
                y: self.y,
                dual_objective: f64::NAN,
                rel_gap: f64::NAN,
                status: SolveStatus::NumericalFailure,
                iterations,
            };
        };
        let status = if infeasible {
            SolveStatus::Infeasible
        } else if score <= 1.0 {
            SolveStatus::Optimal
        } else if score <= 100.0 {
            SolveStatus::NearOptimal
        } else {
            SolveStatus::NumericalFailure
        };
        Outcome {
            y,
            dual_objective: met.dobj,
            rel_gap: met.gap,
            status,
            iterations,
        }
    }
}
