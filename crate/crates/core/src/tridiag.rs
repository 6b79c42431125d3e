//! Thomas algorithm for the tridiagonal systems of the implicit schemes.
//!
//! No pivoting: every system the schemes assemble is strictly diagonally
//! dominant, so a vanishing pivot means a bug upstream and is reported, not
//! repaired.

use crate::{Error, Result};

/// `sub[i]·x[i−1] + diag[i]·x[i] + sup[i]·x[i+1] = rhs[i]`.
///
/// All four sequences have the system size; `sub[0]` and `sup[n−1]` are
/// ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::LengthMismatch { expected: 1, actual: 0 });
        }
        for len in [sub.len(), sup.len(), rhs.len()] {
            if len != n {
                return Err(Error::LengthMismatch { expected: n, actual: len });
            }
        }
        Ok(Self { sub, diag, sup, rhs })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// `A·x`.
    pub fn multiply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    pub fn solve(&self) -> Result<Vec<f64>> {
        solve_tridiagonal(self)
    }
}

pub fn solve_tridiagonal(system: &TridiagonalSystem) -> Result<Vec<f64>> {
    let mut x = system.rhs.clone();
    let mut scratch = vec![0.0; system.size()];
    solve_in_place(&system.sub, &system.diag, &system.sup, &mut x, &mut scratch)?;
    Ok(x)
}

/// Overwrites `rhs` with the solution. `scratch` must have the system size.
pub fn solve_in_place(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &mut [f64],
    scratch: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    debug_assert!(sub.len() == n && sup.len() == n && rhs.len() == n && scratch.len() == n);
    if n == 0 {
        return Ok(());
    }
    let mut pivot = diag[0];
    check_pivot(pivot, 0)?;
    scratch[0] = sup[0] / pivot;
    rhs[0] /= pivot;
    for i in 1..n {
        pivot = diag[i] - sub[i] * scratch[i - 1];
        check_pivot(pivot, i)?;
        scratch[i] = if i + 1 < n { sup[i] / pivot } else { 0.0 };
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
    Ok(())
}

#[inline]
fn check_pivot(pivot: f64, index: usize) -> Result<()> {
    if pivot.abs() < f64::MIN_POSITIVE || !pivot.is_finite() {
        Err(Error::SingularPivot { index })
    } else {
        Ok(())
    }
}
