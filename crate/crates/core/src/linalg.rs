//! Small dense complex matrices and a cyclic Jacobi eigensolver for
//! Hermitian matrices.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm, relative to the full Frobenius norm, at which
/// the Jacobi iteration stops.
pub const JACOBI_THRESHOLD: f64 = 1e-13;

const MAX_SWEEPS: usize = 100;

/// Row-major dense complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        CMatrix::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        CMatrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        let (p, q) = (self.dim, other.dim);
        CMatrix::from_fn(p * q, |i, j| self[(i / q, j / q)] * other[(i % q, j % q)])
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigen-decomposition `A = V diag(values) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector of `values[j]`.
    pub vectors: CMatrix,
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    jacobi(a, false).map(|e| e.values)
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: &CMatrix) -> Result<HermitianEigen> {
    jacobi(a, true)
}

/// Cyclic complex Jacobi. Each rotation `U = D·J` first removes the phase of
/// the pivot `a_pq` with `D = diag(1, …, e^{-iφ}, …)` at position `q`, then
/// annihilates the now real pivot with a real plane rotation `J`.
fn jacobi(input: &CMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    let n = input.dim;
    // work on the Hermitian part so round-off asymmetry cannot stall convergence
    let mut a = CMatrix::from_fn(n, |i, j| 0.5 * (input[(i, j)] + input[(j, i)].conj()));
    let mut v = if want_vectors { CMatrix::identity(n) } else { CMatrix::zeros(0) };
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut sweeps = 0;
    loop {
        let off = a.off_diagonal_norm();
        if off <= JACOBI_THRESHOLD * scale {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / r; // e^{iφ}
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let ph_conj = phase.conj();

                // columns: a'_kp = c a_kp - s e^{-iφ} a_kq, a'_kq = s a_kp + c e^{-iφ} a_kq
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let nkp = akp * c - ph_conj * akq * s;
                    let nkq = akp * s + ph_conj * akq * c;
                    a[(k, p)] = nkp;
                    a[(k, q)] = nkq;
                    a[(p, k)] = nkp.conj();
                    a[(q, k)] = nkq.conj();
                }
                a[(p, p)] = Complex64::new(app - t * r, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);

                if want_vectors {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - ph_conj * vkq * s;
                        v[(k, q)] = vkp * s + ph_conj * vkq * c;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = if want_vectors {
        CMatrix::from_fn(n, |row, col| v[(row, order[col])])
    } else {
        CMatrix::zeros(0)
    };
    Ok(HermitianEigen { values, vectors })
}
