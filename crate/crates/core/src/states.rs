//! Two-qubit density matrices and the two initial-state families.
//!
//! Basis order is `|00>, |01>, |10>, |11>`; the first tensor factor is
//! qubit A. Element `rho_ij` in 1-based notation is `rho.get(i - 1, j - 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, Complex, ComplexMatrix, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
/// Eigenvalues in `[-POSITIVITY_FLOOR, 0)` are clipped, anything lower is an error.
pub const POSITIVITY_FLOOR: f64 = 1e-10;

/// A validated two-qubit state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Zero-based element access.
    pub fn get(&self, r: usize, c: usize) -> Complex {
        self.0[(r, c)]
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(ComplexMatrix::diagonal(&[0.25; 4]))
    }

    /// `|psi><psi|` for a (not necessarily normalised) nonzero state vector.
    pub fn from_pure(psi: &[Complex]) -> Result<Self> {
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let scaled: Vec<Complex> = psi.iter().map(|z| z / norm_sqr.sqrt()).collect();
        validate(ComplexMatrix::outer(&scaled))
    }

    /// Largest modulus among entries off the diagonal and anti-diagonal.
    pub fn x_shape_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..4 {
            for c in 0..4 {
                if r != c && r + c != 3 {
                    worst = worst.max(self.0[(r, c)].norm());
                }
            }
        }
        worst
    }
}

/// Symmetrises, clips tiny negative eigenvalues and renormalises a candidate
/// state, rejecting anything outside the tolerance policy.
///
/// Clipping adds `|q| |psi><psi|` for each eigenvalue `q` in
/// `[-POSITIVITY_FLOOR, 0)`, so zero patterns that the eigenvectors respect
/// are left intact.
pub fn validate(m: ComplexMatrix) -> Result<DensityMatrix> {
    let (rows, cols) = m.shape();
    if (rows, cols) != (4, 4) {
        return Err(Error::NotTwoQubit { rows, cols });
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceDeviation {
            trace,
            tol: TRACE_TOL,
        });
    }

    let mut h = m.hermitian_part();
    let spectrum = eigh(&h, 1e-9)?;
    let lowest = spectrum.eigenvalues[3];
    if lowest < -POSITIVITY_FLOOR {
        return Err(Error::NegativeEigenvalue {
            value: lowest,
            floor: POSITIVITY_FLOOR,
        });
    }
    for (k, &q) in spectrum.eigenvalues.iter().enumerate() {
        if q < 0.0 {
            let psi = spectrum.eigenvector(k);
            for r in 0..4 {
                for c in 0..4 {
                    let add = psi[r] * psi[c].conj() * (-q);
                    if add != ZERO {
                        h[(r, c)] += add;
                    }
                }
            }
        }
    }

    let trace = h.trace().re;
    if trace != 1.0 {
        h = h.scale(Complex::new(1.0 / trace, 0.0));
    }
    Ok(DensityMatrix(h))
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { name, value })
    }
}

/// `(1 - alpha) I/4 + alpha |Psi-><Psi-|` with `|Psi-> = (|01> - |10>)/sqrt(2)`.
pub fn make_werner(alpha: f64) -> Result<DensityMatrix> {
    check_unit("alpha", alpha)?;
    let mixed = (1.0 - alpha) / 4.0;
    let mut m = ComplexMatrix::diagonal(&[mixed, mixed + alpha / 2.0, mixed + alpha / 2.0, mixed]);
    m[(1, 2)] = Complex::new(-alpha / 2.0, 0.0);
    m[(2, 1)] = Complex::new(-alpha / 2.0, 0.0);
    validate(m)
}

/// `|Phi><Phi|` with `|Phi> = sqrt(1 - alpha)|00> + sqrt(alpha)|11>`.
pub fn make_schmidt_pure(alpha: f64) -> Result<DensityMatrix> {
    check_unit("alpha", alpha)?;
    let coherence = (alpha * (1.0 - alpha)).sqrt();
    let mut m = ComplexMatrix::diagonal(&[1.0 - alpha, 0.0, 0.0, alpha]);
    m[(0, 3)] = Complex::new(coherence, 0.0);
    m[(3, 0)] = Complex::new(coherence, 0.0);
    validate(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    Werner,
    SchmidtPure,
}

/// An initial-state family together with its mixing parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateFamily {
    pub kind: FamilyKind,
    pub alpha: f64,
}

impl StateFamily {
    pub fn new(kind: FamilyKind, alpha: f64) -> Result<Self> {
        check_unit("alpha", alpha)?;
        Ok(Self { kind, alpha })
    }

    pub fn state(&self) -> Result<DensityMatrix> {
        match self.kind {
            FamilyKind::Werner => make_werner(self.alpha),
            FamilyKind::SchmidtPure => make_schmidt_pure(self.alpha),
        }
    }
}
