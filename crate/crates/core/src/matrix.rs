//! Dense symmetric matrices and sparse linear functionals over their entries.

use serde::{Deserialize, Serialize};

/// Dense symmetric matrix, stored in full row-major form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = SymMatrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    /// Builds from a closure evaluated on the upper triangle.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Symmetrizes a row-major square buffer.
    pub fn from_row_major(dim: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), dim * dim, "buffer is not dim x dim");
        SymMatrix::from_fn(dim, |i, j| 0.5 * (data[i * dim + j] + data[j * dim + i]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn to_faer(&self) -> faer::Mat<f64> {
        faer::Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    pub(crate) fn from_faer(m: faer::MatRef<'_, f64>) -> Self {
        let dim = m.nrows();
        SymMatrix::from_fn(dim, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    /// All eigenvalues in nondecreasing order; all NaN if the matrix has
    /// non-finite entries or the iteration fails.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim == 0 {
            return Vec::new();
        }
        if self.data.iter().any(|x| !x.is_finite()) {
            return vec![f64::NAN; self.dim];
        }
        self.to_faer()
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .unwrap_or_else(|_| vec![f64::NAN; self.dim])
    }

    /// Smallest eigenvalue: dense decomposition below order 300, Lanczos above.
    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim == 0 {
            0.0
        } else if self.dim < 300 {
            self.eigenvalues()[0]
        } else {
            lanczos_min_eigenvalue(self, 120.min(self.dim))
        }
    }
}

/// Lanczos with full reorthogonalization; the smallest Ritz value of the
/// `steps`-dimensional Krylov space.
pub fn lanczos_min_eigenvalue(a: &SymMatrix, steps: usize) -> f64 {
    let n = a.dim();
    let steps = steps.clamp(1, n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    // Deterministic, dense start vector.
    let mut q: Vec<f64> = (0..n)
        .map(|i| 1.0 + ((i * 7919) % 101) as f64 / 101.0)
        .collect();
    normalize(&mut q);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut w = vec![0.0; n];
        for (i, wi) in w.iter_mut().enumerate() {
            let row = &a.as_slice()[i * n..(i + 1) * n];
            *wi = row.iter().zip(&q).map(|(x, y)| x * y).sum();
        }
        let ak: f64 = w.iter().zip(&q).map(|(x, y)| x * y).sum();
        alpha.push(ak);
        basis.push(q.clone());
        for _ in 0..2 {
            for b in &basis {
                let proj: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let bk = norm(&w);
        if k + 1 == steps || bk < 1e-12 {
            break;
        }
        beta.push(bk);
        q = w.into_iter().map(|x| x / bk).collect();
    }
    let m = alpha.len();
    let t = faer::Mat::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i.abs_diff(j) == 1 {
            beta[i.min(j)]
        } else {
            0.0
        }
    });
    t.self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("tridiagonal eigenvalues converge")[0]
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) {
    let s = norm(v);
    v.iter_mut().for_each(|x| *x /= s);
}

/// One coefficient of a linear functional: `coef * Y[row][col]`, `row <= col`.
/// Off-diagonal entries are counted once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub row: usize,
    pub col: usize,
    pub coef: f64,
}

/// Sparse linear functional over the entries of a symmetric matrix.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LinearForm {
    terms: Vec<Term>,
}

impl LinearForm {
    /// Orients every term to `row <= col`, merges repeats and drops zeros.
    pub fn new(terms: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut terms: Vec<Term> = terms
            .into_iter()
            .map(|(r, c, coef)| Term {
                row: r.min(c),
                col: r.max(c),
                coef,
            })
            .collect();
        terms.sort_by_key(|t| (t.row, t.col));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.row == t.row && last.col == t.col => last.coef += t.coef,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coef != 0.0);
        LinearForm { terms: merged }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.col).max()
    }

    /// `sum coef * Y[row][col]`.
    pub fn evaluate(&self, y: &SymMatrix) -> f64 {
        self.evaluate_with(|r, c| y.get(r, c))
    }

    pub fn evaluate_with(&self, mut entry: impl FnMut(usize, usize) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * entry(t.row, t.col))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_form_normalizes() {
        let f = LinearForm::new([(2, 1, 1.0), (1, 2, 0.5), (0, 0, 0.0), (3, 3, -1.0)]);
        assert_eq!(f.terms().len(), 2);
        assert_eq!(
            f.terms()[0],
            Term {
                row: 1,
                col: 2,
                coef: 1.5
            }
        );
        let y = SymMatrix::from_fn(4, |i, j| (i + j) as f64);
        assert_eq!(f.evaluate(&y), 1.5 * 3.0 - 6.0);
    }

    #[test]
    fn eigenvalues_of_small_matrices() {
        let m = SymMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        let ev = m.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lanczos_matches_dense() {
        let m = SymMatrix::from_fn(40, |i, j| {
            ((i * 31 + j * 17) % 13) as f64 - 6.0 + if i == j { 3.0 } else { 0.0 }
        });
        let dense = m.eigenvalues()[0];
        let lanczos = lanczos_min_eigenvalue(&m, 40);
        assert!((dense - lanczos).abs() < 1e-8, "{dense} vs {lanczos}");
    }
}
