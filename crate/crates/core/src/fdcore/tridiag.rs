use crate::error::{Error, Result};

/// Three-band matrix. Row `i` reads `lower[i-1], diag[i], upper[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::domain("diag", "tridiagonal system needs n >= 1"));
        }
        if lower.len() != n - 1 || upper.len() != n - 1 {
            return Err(Error::domain(
                "bands",
                format!("expected off-diagonals of length {}, got {} and {}", n - 1, lower.len(), upper.len()),
            ));
        }
        Ok(Tridiagonal { lower, diag, upper })
    }

    /// Constant bands `(sub, main, sup)` of order `n`.
    pub fn constant(n: usize, sub: f64, main: f64, sup: f64) -> Result<Self> {
        let off = n.saturating_sub(1);
        Self::new(vec![sub; off], vec![main; n], vec![sup; off])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::constant(n, 0.0, 1.0, 0.0)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Weak row diagonal dominance. Thomas without pivoting is stable for
    /// such matrices; anything else is solved but may lose accuracy.
    pub fn is_diagonally_dominant(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            let mut off = 0.0;
            if i > 0 {
                off += self.lower[i - 1].abs();
            }
            if i + 1 < n {
                off += self.upper[i].abs();
            }
            self.diag[i].abs() >= off
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(x.len(), n, "vector length must match matrix order");
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.upper[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        thomas_solve(self, rhs)
    }
}

/// Solves `m x = rhs` by the Thomas recursion in O(n), without pivoting.
///
/// A zero (or non-finite) pivot aborts with [`Error::SingularPivot`] naming
/// the row where elimination broke down.
pub fn thomas_solve(m: &Tridiagonal, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = m.len();
    if rhs.len() != n {
        return Err(Error::domain("rhs", format!("length {} does not match matrix order {n}", rhs.len())));
    }
    let mut c_prime = vec![0.0; n];
    let mut x = vec![0.0; n];

    let mut pivot = m.diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::SingularPivot { pivot: 0 });
    }
    if n > 1 {
        c_prime[0] = m.upper[0] / pivot;
    }
    x[0] = rhs[0] / pivot;

    for i in 1..n {
        let a = m.lower[i - 1];
        pivot = m.diag[i] - a * c_prime[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SingularPivot { pivot: i });
        }
        if i + 1 < n {
            c_prime[i] = m.upper[i] / pivot;
        }
        x[i] = (rhs[i] - a * x[i - 1]) / pivot;
    }

    for i in (0..n - 1).rev() {
        x[i] -= c_prime[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let m = Tridiagonal::identity(6).unwrap();
        let rhs = [1.0, -2.0, 3.5, 0.0, 7.0, 1e-3];
        assert_eq!(thomas_solve(&m, &rhs).unwrap(), rhs.to_vec());
    }

    #[test]
    fn three_by_three_laplacian() {
        let m = Tridiagonal::constant(3, -1.0, 2.0, -1.0).unwrap();
        let x = thomas_solve(&m, &[1.0, 0.0, 1.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn single_row() {
        let m = Tridiagonal::new(vec![], vec![4.0], vec![]).unwrap();
        assert_eq!(thomas_solve(&m, &[2.0]).unwrap(), vec![0.5]);
    }

    #[test]
    fn zero_pivot_is_reported() {
        let m = Tridiagonal::new(vec![1.0, 1.0], vec![1.0, 1.0, 1.0], vec![1.0, 1.0]).unwrap();
        // second pivot: 1 - 1*1 = 0
        match thomas_solve(&m, &[1.0, 1.0, 1.0]) {
            Err(Error::SingularPivot { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected singular pivot, got {other:?}"),
        }
        let z = Tridiagonal::constant(2, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(thomas_solve(&z, &[1.0, 1.0]), Err(Error::SingularPivot { pivot: 0 })));
        assert!(!m.is_diagonally_dominant());
    }

    #[test]
    fn band_length_mismatch() {
        assert!(Tridiagonal::new(vec![1.0], vec![1.0, 2.0, 3.0], vec![1.0, 1.0]).is_err());
        assert!(Tridiagonal::new(vec![], vec![], vec![]).is_err());
        let m = Tridiagonal::identity(3).unwrap();
        assert!(thomas_solve(&m, &[1.0, 2.0]).is_err());
    }
}
