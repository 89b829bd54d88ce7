//! Thin wrappers over the dense eigensolvers.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn eigh(a: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let e = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigensolver: {e:?}")))?;
    let s = e.S();
    let vals = (0..a.nrows()).map(|i| s[i]).collect();
    Ok((vals, e.U().to_owned()))
}

/// Largest absolute entry of A − Aᵀ.
pub fn asymmetry(a: MatRef<'_, f64>) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..j {
            m = m.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    m
}

/// Largest absolute entry of UᵀU − I.
pub fn orthonormality_defect(u: MatRef<'_, f64>) -> f64 {
    let g = u.transpose() * u;
    let mut m: f64 = 0.0;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            m = m.max((g[(i, j)] - target).abs());
        }
    }
    m
}

/// Vᵀ A V for a real symmetric A.
pub fn congruence(a: MatRef<'_, f64>, v: MatRef<'_, f64>) -> Mat<f64> {
    let av = a * v;
    v.transpose() * &av
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_reconstructs() {
        let n = 12;
        let a = Mat::<f64>::from_fn(n, n, |i, j| 1.0 / (1.0 + i as f64 + j as f64) + if i == j { i as f64 } else { 0.0 });
        let (w, u) = eigh(a.as_ref()).unwrap();
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
        assert!(orthonormality_defect(u.as_ref()) < 1e-12);
        let d = congruence(a.as_ref(), u.as_ref());
        for i in 0..n {
            assert!((d[(i, i)] - w[i]).abs() < 1e-12);
        }
        assert!(asymmetry(a.as_ref()) == 0.0);
    }
}
