//! Seeded random states, local unitaries and directions for property checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{kron, matmul, Complex, ComplexMatrix};
use crate::states::{validate, DensityMatrix};

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A Haar-random pure state vector on two qubits.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R) -> Vec<Complex> {
    let v: Vec<Complex> = (0..4).map(|_| gaussian_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// A random mixture of one to four random pure states.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> Result<DensityMatrix> {
    let terms = rng.random_range(1..=4);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut m = ComplexMatrix::zeros(4, 4);
    for w in weights {
        let psi = random_pure(rng);
        m = m.add(&ComplexMatrix::outer(&psi).scale(Complex::new(w / total, 0.0)))?;
    }
    validate(m)
}

/// Keeps only the diagonal and anti-diagonal. This equals twirling with
/// `diag(1, e^{iθ}, e^{iθ}, 1)` over θ, so the result is again a state.
pub fn x_projection(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let m = ComplexMatrix::from_fn(4, 4, |r, c| {
        if r == c || r + c == 3 {
            rho.get(r, c)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    validate(m)
}

/// A Haar-random element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let q: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
    let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = [q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm];
    ComplexMatrix::new(
        2,
        2,
        vec![
            Complex::new(a, b),
            Complex::new(c, d),
            Complex::new(-c, d),
            Complex::new(a, -b),
        ],
    )
    .expect("2x2")
}

/// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)^dag`.
pub fn apply_local_unitary(
    rho: &DensityMatrix,
    ua: &ComplexMatrix,
    ub: &ComplexMatrix,
) -> Result<DensityMatrix> {
    let u = kron(ua, ub);
    validate(matmul(&matmul(&u, rho.matrix())?, &u.adjoint())?)
}

pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-6 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}
