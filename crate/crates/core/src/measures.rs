//! Concurrence and interferometric power of two-qubit states.
//!
//! Interferometric power is the smallest eigenvalue of the 3x3 matrix
//!
//! ```text
//! M_mn = 1/2 sum_{i,l : q_i + q_l > 0} (q_i - q_l)^2 / (q_i + q_l)
//!        <psi_i|σ_m ⊗ 1|psi_l> <psi_l|σ_n ⊗ 1|psi_i>
//! ```
//!
//! built from the spectral decomposition `{q_i, |psi_i>}` of the state. The
//! quadratic form `n^T M n` is a quarter of the quantum Fisher information for
//! the local generator `(n·σ) ⊗ 1`, which gives an independent evaluation
//! route ([`qfi_directional`]) and a brute-force minimum over the sphere
//! ([`ip_sphere_oracle`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, inner, kron, paulis, singular_values, Complex, ComplexMatrix, SpectralDecomposition,
};
use crate::states::DensityMatrix;

/// Pairs with `q_i + q_l` at or below this are left out of the `M` sum.
pub const EIGENVALUE_SUM_CUTOFF: f64 = 1e-12;
/// Tolerance on entries outside the diagonal and anti-diagonal for
/// [`concurrence_x`].
pub const X_SHAPE_TOL: f64 = 1e-10;
/// Minimum sample count accepted by [`ip_sphere_oracle`].
pub const MIN_SPHERE_RESOLUTION: usize = 100;

const EIGH_TOL: f64 = 1e-10;
/// Relative gap under which two `M` eigenvalues count as tied for branch
/// selection.
const BRANCH_TIE_REL: f64 = 1e-9;

/// A measure value clipped at zero, with the signed quantity it was clipped
/// from.
///
/// `raw` is `λ1 - λ2 - λ3 - λ4` (or `2 max(Λ1, Λ2)`) for concurrence and the
/// unclipped smallest eigenvalue of `M` for interferometric power. `branch`
/// is the Pauli axis (1 = x, 2 = y, 3 = z) dominating the minimising
/// direction of `M`; for [`concurrence_x`] it is which of `Λ1`, `Λ2` is
/// larger, and 0 for [`concurrence_general`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: f64,
    pub raw: f64,
    pub branch: u8,
}

impl MeasureResult {
    fn clipped(raw: f64, branch: u8) -> Self {
        Self {
            value: raw.max(0.0),
            raw,
            branch,
        }
    }

    /// True when the value sits on its zero clip, i.e. the underlying signed
    /// quantity is not positive.
    pub fn is_clipped_zero(&self) -> bool {
        self.raw <= 0.0
    }
}

/// `σ_y ⊗ σ_y` in the computational basis.
fn spin_flip() -> ComplexMatrix {
    let y = &paulis()[1];
    kron(y, y)
}

/// Wootters concurrence of an arbitrary two-qubit state.
///
/// With `ρ = sum_k |v_k><v_k|`, `v_k = sqrt(q_k) psi_k`, the `λ_i` are the
/// singular values of the complex-symmetric matrix `τ_kl = v_k^T (σ_y⊗σ_y) v_l`;
/// their squares are the eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn concurrence_general(rho: &DensityMatrix) -> Result<MeasureResult> {
    let spectrum = eigh(rho.matrix(), EIGH_TOL)?;
    let flip = spin_flip();
    let scaled: Vec<Vec<Complex>> = (0..4)
        .map(|k| {
            let w = spectrum.eigenvalues[k].max(0.0).sqrt();
            spectrum.eigenvector(k).into_iter().map(|z| z * w).collect()
        })
        .collect();
    let flipped: Vec<Vec<Complex>> = scaled
        .iter()
        .map(|v| flip.mat_vec(v).expect("4-vector"))
        .collect();
    let tau = ComplexMatrix::from_fn(4, 4, |k, l| {
        scaled[k].iter().zip(&flipped[l]).map(|(a, b)| a * b).sum()
    });
    let lambda = singular_values(&tau)?;
    let raw = lambda[0] - lambda[1] - lambda[2] - lambda[3];
    Ok(MeasureResult::clipped(raw, 0))
}

/// Closed-form concurrence of an X-shaped state,
/// `C = 2 max{0, Λ1, Λ2}` with `Λ1 = |ρ14| - sqrt(ρ22 ρ33)` and
/// `Λ2 = |ρ23| - sqrt(ρ11 ρ44)`.
pub fn concurrence_x(rho: &DensityMatrix) -> Result<MeasureResult> {
    let magnitude = rho.x_shape_defect();
    if magnitude > X_SHAPE_TOL {
        return Err(Error::NotXShaped { magnitude });
    }
    let p = |k: usize| rho.get(k, k).re.max(0.0);
    let lambda1 = rho.get(0, 3).norm() - (p(1) * p(2)).sqrt();
    let lambda2 = rho.get(1, 2).norm() - (p(0) * p(3)).sqrt();
    let (best, branch) = if lambda2 > lambda1 {
        (lambda2, 2)
    } else {
        (lambda1, 1)
    };
    Ok(MeasureResult::clipped(2.0 * best, branch))
}

/// The real symmetric 3x3 matrix whose smallest eigenvalue is the
/// interferometric power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MMatrix {
    pub m: [[f64; 3]; 3],
    /// The diagonal, filled in when `M` is diagonal so that its eigenvalues
    /// are just these candidates (the X-state case).
    pub branch_values: Option<[f64; 3]>,
}

impl MMatrix {
    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(3, 3, |r, c| Complex::new(self.m[r][c], 0.0))
    }

    pub fn quadratic_form(&self, n: [f64; 3]) -> f64 {
        let mut acc = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                acc += n[r] * self.m[r][c] * n[c];
            }
        }
        acc
    }

    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..3 {
            for c in 0..3 {
                worst = worst.max((self.m[r][c] - self.m[c][r]).abs());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &MMatrix) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..3 {
            for c in 0..3 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).abs());
            }
        }
        worst
    }
}

/// Fisher-information weight `(q_i - q_l)^2 / (q_i + q_l)`, zero for pairs
/// at or below the cutoff.
fn pair_weight(qi: f64, ql: f64) -> f64 {
    let (qi, ql) = (qi.max(0.0), ql.max(0.0));
    let sum = qi + ql;
    if sum <= EIGENVALUE_SUM_CUTOFF {
        0.0
    } else {
        (qi - ql) * (qi - ql) / sum
    }
}

pub fn build_m_matrix(rho: &DensityMatrix) -> Result<MMatrix> {
    let spectrum = eigh(rho.matrix(), EIGH_TOL)?;
    Ok(m_matrix_from_spectrum(&spectrum))
}

/// Assembles `M` from any eigendecomposition of the state. Within a
/// degenerate eigenspace the weight `(q_i - q_l)^2` vanishes, so the choice of
/// basis there does not matter.
pub fn m_matrix_from_spectrum(spectrum: &SpectralDecomposition) -> MMatrix {
    let n = spectrum.len();
    let vectors: Vec<Vec<Complex>> = (0..n).map(|k| spectrum.eigenvector(k)).collect();
    let id = ComplexMatrix::identity(2);
    // elements[m][i][l] = <psi_i| σ_m ⊗ 1 |psi_l>
    let elements: Vec<Vec<Vec<Complex>>> = paulis()
        .iter()
        .map(|s| {
            let op = kron(s, &id);
            let images: Vec<Vec<Complex>> = vectors
                .iter()
                .map(|v| op.mat_vec(v).expect("4-vector"))
                .collect();
            vectors
                .iter()
                .map(|vi| images.iter().map(|img| inner(vi, img)).collect())
                .collect()
        })
        .collect();

    let mut m = [[0.0; 3]; 3];
    for i in 0..n {
        for l in 0..n {
            let w = pair_weight(spectrum.eigenvalues[i], spectrum.eigenvalues[l]);
            if w == 0.0 {
                continue;
            }
            for a in 0..3 {
                for b in a..3 {
                    let term = elements[a][i][l] * elements[b][i][l].conj();
                    m[a][b] += 0.5 * w * term.re;
                }
            }
        }
    }
    for a in 0..3 {
        for b in 0..a {
            m[a][b] = m[b][a];
        }
    }
    let diagonal = m[0][1] == 0.0 && m[0][2] == 0.0 && m[1][2] == 0.0;
    MMatrix {
        m,
        branch_values: diagonal.then(|| [m[0][0], m[1][1], m[2][2]]),
    }
}

/// Smallest eigenvalue of `M` with its branch label.
pub fn ip_from_m(m: &MMatrix) -> Result<MeasureResult> {
    Ok(ip_with_tied_axes(m)?.0)
}

/// Like [`ip_from_m`], also returning the dominant axes of every eigenvector
/// whose eigenvalue ties with the minimum. The branch is the lowest of them.
pub fn ip_with_tied_axes(m: &MMatrix) -> Result<(MeasureResult, Vec<u8>)> {
    let spectrum = eigh(&m.to_matrix(), EIGH_TOL)?;
    let lowest = spectrum.eigenvalues[2];
    let scale = spectrum.eigenvalues[0].abs().max(lowest.abs());
    let mut tied: Vec<u8> = (0..3)
        .filter(|&k| spectrum.eigenvalues[k] - lowest <= BRANCH_TIE_REL * scale)
        .map(|k| dominant_axis(&spectrum.eigenvector(k)))
        .collect();
    tied.sort_unstable();
    tied.dedup();
    Ok((MeasureResult::clipped(lowest, tied[0]), tied))
}

/// 1-based index of the largest-modulus component; ties go to the lower axis.
pub fn dominant_axis(v: &[Complex]) -> u8 {
    let mut best = 0;
    for k in 1..v.len() {
        if v[k].norm() > v[best].norm() {
            best = k;
        }
    }
    best as u8 + 1
}

pub fn interferometric_power(rho: &DensityMatrix) -> Result<MeasureResult> {
    ip_from_m(&build_m_matrix(rho)?)
}

fn check_direction(n: [f64; 3]) -> Result<()> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitDirection { norm });
    }
    Ok(())
}

/// A quarter of the quantum Fisher information of `ρ` for the generator
/// `(n·σ) ⊗ 1`, evaluated directly from the spectrum without forming `M`.
pub fn qfi_directional(rho: &DensityMatrix, n: [f64; 3]) -> Result<f64> {
    check_direction(n)?;
    let spectrum = eigh(rho.matrix(), EIGH_TOL)?;
    Ok(qfi_from_spectrum(&spectrum, n))
}

fn qfi_from_spectrum(spectrum: &SpectralDecomposition, n: [f64; 3]) -> f64 {
    let [x, y, z] = paulis();
    let local = x
        .scale(Complex::new(n[0], 0.0))
        .add(&y.scale(Complex::new(n[1], 0.0)))
        .and_then(|s| s.add(&z.scale(Complex::new(n[2], 0.0))))
        .expect("2x2");
    let generator = kron(&local, &ComplexMatrix::identity(2));
    let dim = spectrum.len();
    let mut acc = 0.0;
    for l in 0..dim {
        let image = generator
            .mat_vec(&spectrum.eigenvector(l))
            .expect("4-vector");
        for i in 0..dim {
            let w = pair_weight(spectrum.eigenvalues[i], spectrum.eigenvalues[l]);
            if w != 0.0 {
                acc += w * inner(&spectrum.eigenvector(i), &image).norm_sqr();
            }
        }
    }
    0.5 * acc
}

/// `resolution` points spread over the unit sphere on a Fibonacci lattice.
pub fn fibonacci_sphere(resolution: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..resolution)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / resolution as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            let v = [r * phi.cos(), r * phi.sin(), z];
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / norm, v[1] / norm, v[2] / norm]
        })
        .collect()
}

/// Brute-force minimum of [`qfi_directional`] over Fibonacci-lattice
/// directions. Never below the true interferometric power; approaches it as
/// `resolution` grows.
pub fn ip_sphere_oracle(rho: &DensityMatrix, resolution: usize) -> Result<f64> {
    if resolution < MIN_SPHERE_RESOLUTION {
        return Err(Error::TooFewSamples {
            what: "sphere oracle resolution",
            min: MIN_SPHERE_RESOLUTION,
            got: resolution,
        });
    }
    let spectrum = eigh(rho.matrix(), EIGH_TOL)?;
    Ok(fibonacci_sphere(resolution)
        .into_iter()
        .map(|n| qfi_from_spectrum(&spectrum, n))
        .fold(f64::INFINITY, f64::min))
}
