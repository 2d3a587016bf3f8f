//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are `ndarray::Array2<C64>`; Hermitian eigendecompositions are
//! delegated to `faer`. Matrix exponentials of Hermitian generators are
//! always computed spectrally, so `expm_i` is unitary to eigensolver
//! accuracy.

use faer::{Mat, Side};
use ndarray::{Array1, Array2, ArrayView1, ArrayViewMut1};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Eigenvalues ascending, eigenvectors as the matching columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Array2<C64>,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> ArrayView1<'_, C64> {
        self.vectors.column(k)
    }

    /// Smallest gap between consecutive eigenvalues (infinite for 1x1).
    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Hermitian eigendecomposition. Only the lower triangle of `matrix` is read.
///
/// Every eigenvector is phase-fixed with [`fix_phase`].
pub fn eigh(matrix: &Array2<C64>) -> Result<HermitianEigen> {
    let n = square_dim(matrix)?;
    let m = Mat::<C64>::from_fn(n, n, |i, j| matrix[[i, j]]);
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let values = order.iter().map(|&k| s[k].re).collect();
    let mut vectors = Array2::from_shape_fn((n, n), |(i, c)| u[(i, order[c])]);
    for mut col in vectors.columns_mut() {
        fix_phase(&mut col);
    }
    Ok(HermitianEigen { values, vectors })
}

/// Real symmetric eigendecomposition (lower triangle read), eigenvalues
/// ascending. Eigenvectors are sign-fixed so the largest component is positive.
pub fn eigh_real(matrix: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: matrix.ncols() });
    }
    let m = Mat::<f64>::from_fn(n, n, |i, j| matrix[[i, j]]);
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let values = order.iter().map(|&k| s[k]).collect();
    let mut vectors = Array2::from_shape_fn((n, n), |(i, c)| u[(i, order[c])]);
    for mut col in vectors.columns_mut() {
        let k = leading_index(col.iter().map(|x| x.abs()));
        if col[k] < 0.0 {
            col.mapv_inplace(|x| -x);
        }
    }
    Ok((values, vectors))
}

/// Multiply `v` by a global phase so that its largest-magnitude component is
/// real and positive. Ties within a relative 1e-9 go to the lowest index.
pub fn fix_phase(v: &mut ArrayViewMut1<'_, C64>) {
    if v.is_empty() {
        return;
    }
    let k = leading_index(v.iter().map(|x| x.norm()));
    let a = v[k];
    if a.norm() == 0.0 {
        return;
    }
    let phase = a.conj() / a.norm();
    v.mapv_inplace(|x| x * phase);
}

fn leading_index(mags: impl Iterator<Item = f64> + Clone) -> usize {
    let max = mags.clone().fold(0.0_f64, f64::max);
    mags.into_iter()
        .position(|m| m >= max * (1.0 - 1e-9))
        .unwrap_or(0)
}

/// `exp(i t H)` for Hermitian `H`, via its spectral decomposition.
pub fn expm_i(generator: &Array2<C64>, t: f64) -> Result<Array2<C64>> {
    let eig = eigh(generator)?;
    let phases: Vec<C64> = eig.values.iter().map(|&w| C64::from_polar(1.0, t * w)).collect();
    Ok(spectral_apply(&eig.vectors, &phases))
}

/// `V diag(d) V^dagger`.
pub fn spectral_apply(vectors: &Array2<C64>, diag: &[C64]) -> Array2<C64> {
    let n = vectors.nrows();
    let mut scaled = vectors.clone();
    for (mut col, &d) in scaled.columns_mut().into_iter().zip(diag) {
        col.mapv_inplace(|x| x * d);
    }
    let vd = dagger(vectors);
    let out = scaled.dot(&vd);
    debug_assert_eq!(out.nrows(), n);
    out
}

pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|x| x.conj())
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { ONE } else { ZERO })
}

pub fn from_real(m: &Array2<f64>) -> Array2<C64> {
    m.mapv(|x| C64::new(x, 0.0))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| {
        a[[i / br, j / bc]] * b[[i % br, j % bc]]
    })
}

pub fn kron_vec(a: &Array1<C64>, b: &Array1<C64>) -> Array1<C64> {
    let nb = b.len();
    Array1::from_shape_fn(a.len() * nb, |i| a[i / nb] * b[i % nb])
}

/// Frobenius norm.
pub fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖U U† − I‖_F`.
pub fn unitarity_deviation(u: &Array2<C64>) -> f64 {
    let n = u.nrows();
    frobenius(&(u.dot(&dagger(u)) - identity(n)))
}

/// `‖A − A†‖_F`.
pub fn hermiticity_deviation(a: &Array2<C64>) -> f64 {
    frobenius(&(a - &dagger(a)))
}

pub fn commutator(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b) - b.dot(a)
}

/// `⟨u|v⟩`.
pub fn inner(u: ArrayView1<'_, C64>, v: ArrayView1<'_, C64>) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: ArrayView1<'_, C64>) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `min_φ ‖a − e^{iφ} b‖_F`, the distance between two operators up to a
/// global phase.
pub fn phase_insensitive_distance(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    frobenius(&(a - &b.mapv(|x| x * phase)))
}

/// LU factorization with partial pivoting, in place. Returns the row
/// permutation parity and the pivot order, or `Singular`.
fn lu_in_place(a: &mut Array2<C64>) -> Result<(bool, Vec<usize>)> {
    let n = a.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut odd = false;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| a[[x, k]].norm().total_cmp(&a[[y, k]].norm()))
            .unwrap_or(k);
        if a[[p, k]].norm() < 1e-300 {
            return Err(Error::Singular);
        }
        if p != k {
            for c in 0..n {
                a.swap([p, c], [k, c]);
            }
            perm.swap(p, k);
            odd = !odd;
        }
        let pivot = a[[k, k]];
        for r in k + 1..n {
            let f = a[[r, k]] / pivot;
            a[[r, k]] = f;
            for c in k + 1..n {
                let t = a[[k, c]];
                a[[r, c]] -= f * t;
            }
        }
    }
    Ok((odd, perm))
}

pub fn determinant(m: &Array2<C64>) -> Result<C64> {
    square_dim(m)?;
    let mut a = m.clone();
    match lu_in_place(&mut a) {
        Ok((odd, _)) => {
            let d: C64 = a.diag().iter().product();
            Ok(if odd { -d } else { d })
        }
        Err(Error::Singular) => Ok(ZERO),
        Err(e) => Err(e),
    }
}

pub fn inverse(m: &Array2<C64>) -> Result<Array2<C64>> {
    let n = square_dim(m)?;
    let mut lu = m.clone();
    let (_, perm) = lu_in_place(&mut lu)?;
    let mut inv = Array2::zeros((n, n));
    for col in 0..n {
        // forward substitution on the permuted unit vector
        let mut y = vec![ZERO; n];
        for r in 0..n {
            let mut s = if perm[r] == col { ONE } else { ZERO };
            for c in 0..r {
                s -= lu[[r, c]] * y[c];
            }
            y[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = y[r];
            for c in r + 1..n {
                s -= lu[[r, c]] * inv[[c, col]];
            }
            inv[[r, col]] = s / lu[[r, r]];
        }
    }
    Ok(inv)
}

fn square_dim(m: &Array2<C64>) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::DimensionMismatch { expected: r, found: c });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigh_pauli_y() {
        let sy = array![[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        let e = eigh(&sy).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        // phase convention: first of the tied components is real positive
        for k in 0..2 {
            assert!(e.vectors[[0, k]].im.abs() < 1e-14 && e.vectors[[0, k]].re > 0.0);
        }
        let back = spectral_apply(&e.vectors, &[c(-1.0, 0.0), c(1.0, 0.0)]);
        assert!(frobenius(&(back - &sy)) < 1e-13);
    }

    #[test]
    fn expm_i_of_diagonal() {
        let h = array![[c(0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-0.5, 0.0)]];
        let u = expm_i(&h, std::f64::consts::PI).unwrap();
        assert!((u[[0, 0]] - c(0.0, 1.0)).norm() < 1e-14);
        assert!((u[[1, 1]] - c(0.0, -1.0)).norm() < 1e-14);
        assert!(u[[0, 1]].norm() < 1e-14);
    }

    #[test]
    fn determinant_and_inverse() {
        let m = array![
            [c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0)],
            [c(0.0, 0.0), c(3.0, 0.5), c(1.0, 0.0)],
            [c(2.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)]
        ];
        let inv = inverse(&m).unwrap();
        assert!(frobenius(&(m.dot(&inv) - identity(3))) < 1e-12);
        // cofactor expansion along the first row
        let det = m[[0, 0]] * (m[[1, 1]] * m[[2, 2]] - m[[1, 2]] * m[[2, 1]])
            - m[[0, 1]] * (m[[1, 0]] * m[[2, 2]] - m[[1, 2]] * m[[2, 0]])
            + m[[0, 2]] * (m[[1, 0]] * m[[2, 1]] - m[[1, 1]] * m[[2, 0]]);
        assert!((determinant(&m).unwrap() - det).norm() < 1e-12);
    }

    #[test]
    fn singular_matrix_has_zero_determinant() {
        let m = array![[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        assert_eq!(determinant(&m).unwrap(), ZERO);
        assert_eq!(inverse(&m).unwrap_err(), Error::Singular);
    }

    #[test]
    fn kron_of_identities() {
        let k = kron(&identity(2), &identity(3));
        assert!(frobenius(&(k - identity(6))) < 1e-15);
    }

    #[test]
    fn eigh_real_matches_complex() {
        let m = array![[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]];
        let (vals, vecs) = eigh_real(&m).unwrap();
        let e = eigh(&from_real(&m)).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(vals[k], e.values[k], epsilon = 1e-12);
            for i in 0..3 {
                assert_abs_diff_eq!(vecs[[i, k]], e.vectors[[i, k]].re, epsilon = 1e-12);
            }
        }
    }
}
