//! Compressed-row sparse matrices and the linear solver used by the Newton
//! iteration: restarted GMRES, right-preconditioned with ILU(0). ILU(0) is
//! well defined for the M-matrices the scheme assembles.

use crate::{Error, Real, Result};

/// Target relative residual (infinity norm) of [`solve_sparse`].
pub const SOLVE_RTOL: f64 = 1e-12;

const RESTART: usize = 60;
const MAX_CYCLES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    /// Builds a matrix from per-row `(column, value)` lists. Duplicate columns
    /// within a row are summed; columns are stored sorted.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, T)>>) -> Result<Self> {
        let n_rows = rows.len();
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            let start = col_idx.len();
            for (j, v) in row {
                if j >= n_cols {
                    return Err(Error::InvalidArgument(format!("row {i}: column {j} out of range")));
                }
                if col_idx.len() > start && *col_idx.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(T::zero(), |k| vals[k])
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n_rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }
}

/// Incomplete LU factorisation with the sparsity pattern of `A`; unit lower
/// factor and upper factor stored in one CSR value array.
struct Ilu0<'a, T> {
    a: &'a CsrMatrix<T>,
    lu: Vec<T>,
    diag: Vec<usize>,
}

impl<'a, T: Real> Ilu0<'a, T> {
    fn new(a: &'a CsrMatrix<T>) -> Result<Self> {
        let n = a.n_rows;
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let (cols, _) = a.row(i);
            let k = cols
                .binary_search(&i)
                .map_err(|_| Error::LinearSolve(format!("structurally zero diagonal in row {i}")))?;
            diag.push(a.row_ptr[i] + k);
        }
        let mut lu = a.values.clone();
        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            let (start, end) = (a.row_ptr[i], a.row_ptr[i + 1]);
            for kk in start..end {
                pos[a.col_idx[kk]] = kk;
            }
            for kk in start..diag[i] {
                let k = a.col_idx[kk];
                let pivot = lu[diag[k]];
                lu[kk] /= pivot;
                let lik = lu[kk];
                for kj in diag[k] + 1..a.row_ptr[k + 1] {
                    let p = pos[a.col_idx[kj]];
                    if p != usize::MAX {
                        let ukj = lu[kj];
                        lu[p] -= lik * ukj;
                    }
                }
            }
            let d = lu[diag[i]];
            if !(d.abs() > T::min_positive_value()) || !d.is_finite() {
                return Err(Error::LinearSolve(format!("zero pivot in row {i}")));
            }
            for kk in start..end {
                pos[a.col_idx[kk]] = usize::MAX;
            }
        }
        Ok(Self { a, lu, diag })
    }

    /// In place `x <- (LU)^{-1} x`.
    fn apply(&self, x: &mut [T]) {
        let a = self.a;
        let n = a.n_rows;
        for i in 0..n {
            let mut s = x[i];
            for kk in a.row_ptr[i]..self.diag[i] {
                s -= self.lu[kk] * x[a.col_idx[kk]];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for kk in self.diag[i] + 1..a.row_ptr[i + 1] {
                s -= self.lu[kk] * x[a.col_idx[kk]];
            }
            x[i] = s / self.lu[self.diag[i]];
        }
    }
}

fn norm2<T: Real>(x: &[T]) -> T {
    x.iter().map(|&v| v * v).sum::<T>().sqrt()
}

pub(crate) fn norm_inf<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
}

/// Solves `A x = b` to `||A x - b||_inf <= 1e-12 ||b||_inf` (or a few ulps for
/// narrow scalar types).
pub fn solve_sparse<T: Real>(a: &CsrMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.n_rows;
    if a.n_cols != n || b.len() != n {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: {}x{} matrix, rhs of length {}",
            a.n_rows,
            a.n_cols,
            b.len()
        )));
    }
    let bnorm = norm_inf(b);
    if bnorm == T::zero() {
        return Ok(vec![T::zero(); n]);
    }
    let target = T::tol(SOLVE_RTOL) * bnorm;
    let ilu = Ilu0::new(a)?;

    let m = RESTART.min(n);
    let mut x = vec![T::zero(); n];
    let mut r = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut z = vec![T::zero(); n];
    let mut basis: Vec<Vec<T>> = vec![vec![T::zero(); n]; m + 1];
    let mut hess = vec![vec![T::zero(); m]; m + 1];
    let mut cs = vec![T::zero(); m];
    let mut sn = vec![T::zero(); m];
    let mut g = vec![T::zero(); m + 1];

    for _ in 0..MAX_CYCLES {
        a.mul_vec_into(&x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        if norm_inf(&r) <= target {
            return Ok(x);
        }
        let beta = norm2(&r);
        // aim well below the target so the infinity-norm check passes
        let inner_tol = target * T::lit(0.05);
        for i in 0..n {
            basis[0][i] = r[i] / beta;
        }
        g.iter_mut().for_each(|v| *v = T::zero());
        g[0] = beta;
        let mut used = 0;
        for j in 0..m {
            z.copy_from_slice(&basis[j]);
            ilu.apply(&mut z);
            a.mul_vec_into(&z, &mut w);
            // modified Gram-Schmidt
            for i in 0..=j {
                let hij = w.iter().zip(&basis[i]).map(|(&p, &q)| p * q).sum::<T>();
                hess[i][j] = hij;
                for (wk, &vk) in w.iter_mut().zip(&basis[i]) {
                    *wk -= hij * vk;
                }
            }
            let hnext = norm2(&w);
            hess[j + 1][j] = hnext;
            for i in 0..j {
                let t = cs[i] * hess[i][j] + sn[i] * hess[i + 1][j];
                hess[i + 1][j] = -sn[i] * hess[i][j] + cs[i] * hess[i + 1][j];
                hess[i][j] = t;
            }
            let denom = hess[j][j].hypot(hess[j + 1][j]);
            if denom == T::zero() {
                used = j;
                break;
            }
            cs[j] = hess[j][j] / denom;
            sn[j] = hess[j + 1][j] / denom;
            hess[j][j] = denom;
            hess[j + 1][j] = T::zero();
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            used = j + 1;
            if g[j + 1].abs() <= inner_tol || hnext == T::zero() {
                break;
            }
            for i in 0..n {
                basis[j + 1][i] = w[i] / hnext;
            }
        }
        if used == 0 {
            break;
        }
        // back substitution for the Krylov coefficients
        let mut y = vec![T::zero(); used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for k in i + 1..used {
                s -= hess[i][k] * y[k];
            }
            y[i] = s / hess[i][i];
        }
        z.iter_mut().for_each(|v| *v = T::zero());
        for (k, &yk) in y.iter().enumerate() {
            for (zi, &vi) in z.iter_mut().zip(&basis[k]) {
                *zi += yk * vi;
            }
        }
        ilu.apply(&mut z);
        for (xi, &zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolve(
                "iteration diverged (numerically singular matrix?)".into(),
            ));
        }
    }
    a.mul_vec_into(&x, &mut r);
    let res = (0..n).map(|i| (b[i] - r[i]).abs()).fold(T::zero(), T::max);
    if res <= target {
        Ok(x)
    } else {
        Err(Error::LinearSolve(format!(
            "no convergence: relative residual {} after {MAX_CYCLES} restarts",
            res / bnorm
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix<f64> {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![(i, 2.0)];
                if i > 0 {
                    r.push((i - 1, -1.0));
                }
                if i + 1 < n {
                    r.push((i + 1, -1.0));
                }
                r
            })
            .collect();
        CsrMatrix::from_rows(n, rows).unwrap()
    }

    #[test]
    fn identity_returns_rhs() {
        let b = vec![1.0, -2.0, 3.5];
        assert_eq!(solve_sparse(&CsrMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn tridiagonal_laplacian() {
        let a = laplace_1d(100);
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin() + 0.1 * i as f64).collect();
        let b = a.mul_vec(&xs);
        let x = solve_sparse(&a, &b).unwrap();
        let err = x.iter().zip(&xs).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-10 * norm_inf(&xs), "err {err}");
    }

    #[test]
    fn nonsymmetric_m_matrix_2d() {
        // upwinded convection-diffusion on a 30x30 grid
        let k = 30;
        let n = k * k;
        let rows = (0..n)
            .map(|p| {
                let (i, j) = (p % k, p / k);
                let mut r = vec![(p, 4.5)];
                if i > 0 {
                    r.push((p - 1, -1.4));
                }
                if i + 1 < k {
                    r.push((p + 1, -0.6));
                }
                if j > 0 {
                    r.push((p - k, -1.0));
                }
                if j + 1 < k {
                    r.push((p + k, -1.0));
                }
                r
            })
            .collect();
        let a = CsrMatrix::from_rows(n, rows).unwrap();
        let b: Vec<f64> = (0..n).map(|p| ((p * 7919) % 13) as f64 - 6.0).collect();
        let x = solve_sparse(&a, &b).unwrap();
        let r = a.mul_vec(&x);
        let res = r.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(res <= 1e-12 * norm_inf(&b));
    }

    #[test]
    fn from_rows_merges_duplicates() {
        let a = CsrMatrix::from_rows(2, vec![vec![(1, 1.0), (0, 2.0), (1, 3.0)], vec![(1, 1.0)]]).unwrap();
        assert_eq!(a.get(0, 1), 4.0);
        assert_eq!(a.get(0, 0), 2.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.nnz(), 3);
        assert!(CsrMatrix::<f64>::from_rows(1, vec![vec![(3, 1.0)]]).is_err());
    }

    #[test]
    fn singular_and_mismatched_inputs_fail() {
        let a = CsrMatrix::from_rows(2, vec![vec![(0, 1.0)], vec![(0, 1.0)]]).unwrap();
        assert!(solve_sparse(&a, &[1.0, 2.0]).is_err());
        assert!(solve_sparse(&CsrMatrix::<f64>::identity(2), &[1.0]).is_err());
        let zero = CsrMatrix::from_rows(2, vec![vec![(0, 0.0)], vec![(1, 1.0)]]).unwrap();
        assert!(solve_sparse(&zero, &[1.0, 1.0]).is_err());
    }
}
