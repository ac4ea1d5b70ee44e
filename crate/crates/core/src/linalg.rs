//! Dense complex linear algebra: LU factorization with partial pivoting,
//! solves, inversion, and a 1-norm reciprocal condition number.
//!
//! The systems in this crate are small (a handful of sites up to a few
//! hundred lattice sites), so a straightforward O(n^3) factorization is
//! all that is needed.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::{Error, Result};

/// Max column sum of entry magnitudes.
pub fn one_norm(a: &Array2<Complex64>) -> f64 {
    let mut max_sum = 0.0_f64;
    for j in 0..a.ncols() {
        let col_sum: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        max_sum = max_sum.max(col_sum);
    }
    max_sum
}

/// n-by-n identity.
pub fn identity(n: usize) -> Array2<Complex64> {
    Array2::from_diag_elem(n, Complex64::new(1.0, 0.0))
}

/// LU factorization PA = LU with partial pivoting, stored compactly.
pub struct LuFactors {
    lu: Array2<Complex64>,
    perm: Vec<usize>,
}

/// Factor a square matrix. Fails with `SingularSystem` on an exactly zero
/// pivot column.
pub fn lu_factor(a: &Array2<Complex64>) -> Result<LuFactors> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "lu_factor needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = lu[[col, col]].norm();
        for row in (col + 1)..n {
            let mag = lu[[row, col]].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag == 0.0 {
            return Err(Error::SingularSystem { rcond: 0.0 });
        }
        if pivot_row != col {
            perm.swap(col, pivot_row);
            for j in 0..n {
                let tmp = lu[[col, j]];
                lu[[col, j]] = lu[[pivot_row, j]];
                lu[[pivot_row, j]] = tmp;
            }
        }
        let pivot = lu[[col, col]];
        for row in (col + 1)..n {
            let factor = lu[[row, col]] / pivot;
            lu[[row, col]] = factor;
            for j in (col + 1)..n {
                let upper = lu[[col, j]];
                lu[[row, j]] -= factor * upper;
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    /// Solve A x = b for a single right-hand side.
    pub fn solve_vec(&self, b: &Array1<Complex64>) -> Result<Array1<Complex64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs length {} does not match system size {}",
                b.len(),
                n
            )));
        }
        // Forward substitution on the permuted rhs (L has unit diagonal).
        let mut x = Array1::zeros(n);
        for i in 0..n {
            let mut sum = b[self.perm[i]];
            for k in 0..i {
                sum -= self.lu[[i, k]] * x[k];
            }
            x[i] = sum;
        }
        // Back substitution through U.
        for i in (0..n).rev() {
            let mut sum = x[i];
            for k in (i + 1)..n {
                sum -= self.lu[[i, k]] * x[k];
            }
            x[i] = sum / self.lu[[i, i]];
        }
        Ok(x)
    }

    /// Solve A X = B column by column.
    pub fn solve_mat(&self, b: &Array2<Complex64>) -> Result<Array2<Complex64>> {
        let n = self.dim();
        if b.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has {} rows, system size is {}",
                b.nrows(),
                n
            )));
        }
        let mut x = Array2::zeros((n, b.ncols()));
        for j in 0..b.ncols() {
            let col = self.solve_vec(&b.column(j).to_owned())?;
            x.column_mut(j).assign(&col);
        }
        Ok(x)
    }
}

/// Solve A X = B by LU factorization.
pub fn solve(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    lu_factor(a)?.solve_mat(b)
}

/// Solve A x = b by LU factorization.
pub fn solve_vec(a: &Array2<Complex64>, b: &Array1<Complex64>) -> Result<Array1<Complex64>> {
    lu_factor(a)?.solve_vec(b)
}

/// Matrix inverse by solving A X = I.
pub fn inverse(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    solve(a, &identity(a.nrows()))
}

/// Reciprocal condition number in the 1-norm, 1 / (||A||_1 ||A^-1||_1).
/// Returns 0 when the factorization hits an exactly zero pivot.
pub fn rcond(a: &Array2<Complex64>) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "rcond needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let factors = match lu_factor(a) {
        Ok(f) => f,
        Err(Error::SingularSystem { .. }) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let inv = factors.solve_mat(&identity(n))?;
    let denom = one_norm(a) * one_norm(&inv);
    if denom == 0.0 || !denom.is_finite() {
        return Ok(0.0);
    }
    Ok(1.0 / denom)
}
