//! Dense complex matrices sized for two-qubit problems.
//!
//! Storage is row-major. The eigensolver is a cyclic complex Jacobi method:
//! for matrices of order at most four it is both simple and accurate, and it
//! never touches an off-diagonal entry that is exactly zero, so block
//! structure in the input (X-shaped states, diagonal `M` matrices) survives
//! into the eigenvectors bit for bit.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);
pub const I: Complex = Complex::new(0.0, 1.0);

/// Largest tolerated `|a_ij - conj(a_ji)|` for inputs declared Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Absolute off-diagonal Frobenius norm accepted when the sweep cap is hit.
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting bad shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(k) = data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            data.iter().map(|&x| Complex::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (k, &v) in values.iter().enumerate() {
            m[(k, k)] = Complex::new(v, 0.0);
        }
        m
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[Complex]) -> Self {
        Self::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<Complex> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        matmul(self, other)
    }

    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }

    pub fn adjoint(&self) -> Self {
        adjoint(self)
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, k: Complex) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(Complex, Complex) -> Complex,
    ) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).sum()
    }

    pub fn mat_vec(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                op: "mat_vec",
                lhs: self.shape(),
                rhs: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
            .collect())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |a_ij - conj(a_ji)|`; infinite for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A^dag) / 2`. Entries that are zero in both triangles stay
    /// exactly zero.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            if r == c {
                Complex::new(self[(r, r)].re, 0.0)
            } else {
                (self[(r, c)] + self[(c, r)].conj()) * 0.5
            }
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    fn index(&self, (r, c): (usize, usize)) -> &Complex {
        assert!(
            r < self.rows && c < self.cols,
            "index ({r}, {c}) out of bounds"
        );
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex {
        assert!(
            r < self.rows && c < self.cols,
            "index ({r}, {c}) out of bounds"
        );
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            op: "matmul",
            lhs: a.shape(),
            rhs: b.shape(),
        });
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for r in 0..a.rows {
        for k in 0..a.cols {
            let x = a[(r, k)];
            if x == ZERO {
                continue;
            }
            for c in 0..b.cols {
                out[(r, c)] += x * b[(k, c)];
            }
        }
    }
    Ok(out)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.cols, a.rows, |r, c| a[(c, r)].conj())
}

/// `<u|v>` with the conjugate on the left argument.
pub fn inner(u: &[Complex], v: &[Complex]) -> Complex {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("static shape")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![ZERO, -I, I, ZERO]).expect("static shape")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("static shape")
}

/// The Pauli matrices in the order x, y, z.
pub fn paulis() -> [ComplexMatrix; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// Eigenvalues (descending) and matching orthonormal eigenvector columns of a
/// Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex> {
        self.eigenvectors.column(k)
    }

    /// `sum_k q_k |psi_k><psi_k|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvectors.rows();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |r, c| {
            self.eigenvalues
                .iter()
                .enumerate()
                .map(|(k, &q)| v[(r, k)] * v[(c, k)].conj() * q)
                .sum()
        })
    }

    /// `max |<psi_i|psi_j> - delta_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = matmul(&self.eigenvectors.adjoint(), &self.eigenvectors).expect("square");
        g.max_abs_diff(&ComplexMatrix::identity(g.rows()))
    }
}

/// Parameters of the unitary that annihilates the `(p, q)` entry of a
/// Hermitian 2x2 block `[[app, b], [conj(b), aqq]]`.
///
/// The rotation is `J = [[c, s*phase], [-s*conj(phase), c]]` and the new
/// diagonal is `(app - t|b|, aqq + t|b|)`.
#[derive(Debug, Clone, Copy)]
struct Rotation {
    c: f64,
    s: f64,
    t: f64,
    phase: Complex,
}

impl Rotation {
    fn annihilating(app: f64, aqq: f64, b: Complex) -> Self {
        let mag = b.norm();
        let phase = b / mag;
        let theta = (aqq - app) / (2.0 * mag);
        let t = if theta.abs() > 1e150 {
            0.5 / theta
        } else {
            theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
        };
        let c = 1.0 / (t * t + 1.0).sqrt();
        Rotation {
            c,
            s: t * c,
            t,
            phase,
        }
    }

    /// Applies `[x, y] <- [x, y] J` to a pair of column entries.
    fn mix(&self, x: Complex, y: Complex) -> (Complex, Complex) {
        (
            x * self.c - y * self.phase.conj() * self.s,
            x * self.phase * self.s + y * self.c,
        )
    }
}

fn off_diagonal_norm(w: &ComplexMatrix) -> f64 {
    let n = w.rows();
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += w[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Accepts square matrices of order 2, 3 or 4 that are Hermitian to within
/// [`HERMITIAN_TOL`]. Eigenvalues are returned in descending order with ties
/// kept in the order the solver produced them. Fails if the reconstruction
/// `sum q|psi><psi|` deviates from the input by more than `tol`.
///
/// A pair is skipped once `|a_pq| <= eps * sqrt(|a_pp a_qq|)`, a stricter
/// stop than an absolute off-diagonal norm: small eigenvalues of graded
/// matrices (nearly pure states) keep their relative accuracy.
pub fn eigh(a: &ComplexMatrix, tol: f64) -> Result<SpectralDecomposition> {
    let (rows, cols) = a.shape();
    if rows != cols || !(2..=4).contains(&rows) {
        return Err(Error::UnsupportedDimension { rows, cols });
    }
    let defect = a.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let n = rows;
    let mut w = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let b = w[(p, q)];
                if b == ZERO {
                    continue;
                }
                let app = w[(p, p)].re;
                let aqq = w[(q, q)].re;
                if b.norm() <= f64::EPSILON * (app * aqq).abs().sqrt() {
                    w[(p, q)] = ZERO;
                    w[(q, p)] = ZERO;
                    continue;
                }
                let rot = Rotation::annihilating(app, aqq, b);
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let (kp, kq) = rot.mix(w[(k, p)], w[(k, q)]);
                    w[(k, p)] = kp;
                    w[(k, q)] = kq;
                    w[(p, k)] = kp.conj();
                    w[(q, k)] = kq.conj();
                }
                w[(p, p)] = Complex::new(app - rot.t * b.norm(), 0.0);
                w[(q, q)] = Complex::new(aqq + rot.t * b.norm(), 0.0);
                w[(p, q)] = ZERO;
                w[(q, p)] = ZERO;
                for k in 0..n {
                    let (kp, kq) = rot.mix(v[(k, p)], v[(k, q)]);
                    v[(k, p)] = kp;
                    v[(k, q)] = kq;
                }
                rotated = true;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        let residual = off_diagonal_norm(&w);
        if residual >= OFF_DIAGONAL_TOL {
            return Err(Error::NoConvergence {
                sweeps: MAX_SWEEPS,
                residual,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].re.total_cmp(&w[(i, i)].re));
    let eigenvalues = order.iter().map(|&k| w[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    let decomposition = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    };

    let error = decomposition.reconstruct().max_abs_diff(a);
    if error > tol {
        return Err(Error::Reconstruction { error, tol });
    }
    Ok(decomposition)
}

/// Singular values (descending) by one-sided Jacobi orthogonalisation of the
/// columns. Small singular values come out with absolute error near
/// `eps * ||a||` instead of the `sqrt(eps) * ||a||` of routes through `a^dag a`.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let (rows, cols) = a.shape();
    let mut cols_data: Vec<Vec<Complex>> = (0..cols).map(|c| a.column(c)).collect();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols.saturating_sub(1) {
            for q in p + 1..cols {
                let alpha: f64 = cols_data[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols_data[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&cols_data[p], &cols_data[q]);
                if gamma == ZERO || gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                let rot = Rotation::annihilating(alpha, beta, gamma);
                for k in 0..rows {
                    let (x, y) = rot.mix(cols_data[p][k], cols_data[q][k]);
                    cols_data[p][k] = x;
                    cols_data[q][k] = y;
                }
                rotated = true;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        let mut residual = 0.0_f64;
        for p in 0..cols {
            for q in p + 1..cols {
                residual = residual.max(inner(&cols_data[p], &cols_data[q]).norm());
            }
        }
        if residual >= OFF_DIAGONAL_TOL {
            return Err(Error::NoConvergence {
                sweeps: MAX_SWEEPS,
                residual,
            });
        }
    }
    let mut sv: Vec<f64> = cols_data
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}
