//! Dense complex eigen-solves on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Eigen-decomposition of a general complex matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    /// Unit-norm eigenvectors as columns; `None` when the matrix is defective.
    pub vectors: Option<CMatrix>,
}

/// Ascending eigenvalues of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Eigenvalues and eigenvectors from a complex Schur form followed by
/// back-substitution on the triangular factor.
pub fn eigen(m: &CMatrix) -> Eigen {
    let n = m.nrows();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Eigen { values: vec![Complex64::new(f64::NAN, f64::NAN); n], vectors: None };
    }
    let (q, t) = m.clone().schur().unpack();
    let values: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();
    let small = 1e-13 * scale;
    let mut y = CMatrix::zeros(n, n);
    let mut defective = false;
    for k in 0..n {
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let d = t[(i, i)] - t[(k, k)];
            if d.norm() <= small {
                if s.norm() <= small * 1e-3 {
                    y[(i, k)] = Complex64::new(0.0, 0.0);
                } else {
                    defective = true;
                    y[(i, k)] = -s / Complex64::new(small, 0.0);
                }
            } else {
                y[(i, k)] = -s / d;
            }
        }
    }
    if defective {
        return Eigen { values, vectors: None };
    }
    let mut v = q * y;
    for mut c in v.column_iter_mut() {
        let nrm = c.norm();
        if nrm > 0.0 {
            c /= Complex64::new(nrm, 0.0);
        }
    }
    Eigen { values, vectors: Some(v) }
}

/// 2-norm condition number; +∞ for singular or non-finite input.
pub fn condition_number(m: &CMatrix) -> f64 {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return f64::INFINITY;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= max * 1e-300 || min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Condition number of the eigenvector matrix, +∞ when defective.
pub fn eigenvector_condition(e: &Eigen) -> f64 {
    match &e.vectors {
        Some(v) => condition_number(v),
        None => f64::INFINITY,
    }
}

pub fn determinant(m: &CMatrix) -> Complex64 {
    m.clone().lu().determinant()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn cvec(v: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn jordan_block_is_defective() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let e = eigen(&m);
        assert!(e.vectors.is_none());
        assert!(eigenvector_condition(&e).is_infinite());
    }

    #[test]
    fn identity_is_well_conditioned() {
        let m = CMatrix::identity(3, 3);
        let e = eigen(&m);
        assert!((eigenvector_condition(&e) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenpairs_satisfy_definition() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[c(1.0, 0.5), c(2.0, 0.0), c(0.0, -1.0), c(0.3, 0.0), c(-1.0, 0.2), c(0.4, 0.4), c(0.0, 1.0), c(1.5, 0.0), c(2.0, 0.0)],
        );
        let e = eigen(&m);
        let v = e.vectors.as_ref().unwrap();
        for k in 0..3 {
            let col = v.column(k).into_owned();
            let r = &m * &col - &col * e.values[k];
            assert!(r.norm() < 1e-12);
        }
    }
}
