//! Single-qubit Kraus channels and their local action on two qubits.
//!
//! Every scenario applies the same channel to both qubits, `Λ ⊗ Λ`: a
//! coherence `|01><10|` then decays with one factor per qubit, e.g. `1 - γ`
//! under dephasing.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{kron, matmul, paulis, Complex, ComplexMatrix, ZERO};
use crate::states::{validate, DensityMatrix};

/// Completeness tolerance `max |sum E^dag E - I|` for constructed channels.
pub const COMPLETENESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    name: String,
    operators: Vec<ComplexMatrix>,
    params: BTreeMap<String, f64>,
}

impl KrausChannel {
    /// Builds a channel, checking operator shapes and completeness.
    pub fn new(
        name: impl Into<String>,
        operators: Vec<ComplexMatrix>,
        params: BTreeMap<String, f64>,
    ) -> Result<Self> {
        let channel = Self::new_unchecked(name, operators, params)?;
        let defect = channel.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus {
                channel: channel.name,
                defect,
            });
        }
        Ok(channel)
    }

    /// Shape-checked only. Completeness is left to the caller; used for
    /// fixtures that deliberately break it.
    pub fn new_unchecked(
        name: impl Into<String>,
        operators: Vec<ComplexMatrix>,
        params: BTreeMap<String, f64>,
    ) -> Result<Self> {
        let name = name.into();
        for (index, op) in operators.iter().enumerate() {
            if op.shape() != (2, 2) {
                return Err(Error::KrausShape {
                    channel: name,
                    index,
                    rows: op.rows(),
                    cols: op.cols(),
                });
            }
        }
        Ok(Self {
            name,
            operators,
            params,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    /// `max |sum_i E_i^dag E_i - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(2, 2);
        for e in &self.operators {
            let term = matmul(&e.adjoint(), e).expect("2x2 operators");
            sum = sum.add(&term).expect("2x2 operators");
        }
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }

    pub fn identity() -> Self {
        Self::new(
            "identity",
            vec![ComplexMatrix::identity(2)],
            BTreeMap::new(),
        )
        .expect("identity is complete")
    }

    /// Phase damping: `E0 = diag(1, sqrt(1-γ))`, `E1 = diag(0, sqrt(γ))`.
    pub fn dephasing(gamma: f64) -> Result<Self> {
        check_unit("gamma", gamma)?;
        let ops = vec![
            ComplexMatrix::diagonal(&[1.0, (1.0 - gamma).sqrt()]),
            ComplexMatrix::diagonal(&[0.0, gamma.sqrt()]),
        ];
        Self::new("dephasing", ops, params(&[("gamma", gamma)]))
    }

    /// Generalized amplitude damping. `q` is the weight of the `|1> -> |0>`
    /// branch, so `q = 1` relaxes every qubit to `|0>`.
    pub fn gad(gamma: f64, q: f64) -> Result<Self> {
        check_unit("gamma", gamma)?;
        check_unit("q", q)?;
        let (sq, sp) = (q.sqrt(), (1.0 - q).sqrt());
        let (damp, keep) = (gamma.sqrt(), (1.0 - gamma).sqrt());
        let real = |v: [f64; 4]| ComplexMatrix::from_real(2, 2, &v).expect("2x2");
        let ops = vec![
            real([sq, 0.0, 0.0, sq * keep]),
            real([0.0, sq * damp, 0.0, 0.0]),
            real([sp * keep, 0.0, 0.0, sp]),
            real([0.0, 0.0, sp * damp, 0.0]),
        ];
        Self::new("gad", ops, params(&[("gamma", gamma), ("q", q)]))
    }

    /// `E0 = sqrt(1 - 3γ/4) I`, `E_k = sqrt(γ/4) σ_k`.
    pub fn depolarizing(gamma: f64) -> Result<Self> {
        check_unit("gamma", gamma)?;
        let w0 = Complex::new((1.0 - 0.75 * gamma).sqrt(), 0.0);
        let wk = Complex::new((gamma / 4.0).sqrt(), 0.0);
        let mut ops = vec![ComplexMatrix::identity(2).scale(w0)];
        ops.extend(paulis().iter().map(|s| s.scale(wk)));
        Self::new("depolarizing", ops, params(&[("gamma", gamma)]))
    }
}

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { name, value })
    }
}

/// `ρ' = sum_ij (E_i ⊗ F_j) ρ (E_i ⊗ F_j)^dag` with `E` from `on_a` acting on
/// qubit A and `F` from `on_b` on qubit B. The result is re-validated.
pub fn apply_local_pair(
    rho: &DensityMatrix,
    on_a: &KrausChannel,
    on_b: &KrausChannel,
) -> Result<DensityMatrix> {
    validate(apply_local_pair_raw(rho.matrix(), on_a, on_b)?)
}

/// The Kraus sum of [`apply_local_pair`] without validation, for checking
/// trace and positivity preservation directly.
pub fn apply_local_pair_raw(
    m: &ComplexMatrix,
    on_a: &KrausChannel,
    on_b: &KrausChannel,
) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(4, 4);
    for e in on_a.operators() {
        for f in on_b.operators() {
            let k = kron(e, f);
            if k.as_slice().iter().all(|&z| z == ZERO) {
                continue;
            }
            let term = matmul(&matmul(&k, m)?, &k.adjoint())?;
            out = out.add(&term)?;
        }
    }
    Ok(out)
}

/// The same channel on both qubits.
pub fn apply_both(rho: &DensityMatrix, channel: &KrausChannel) -> Result<DensityMatrix> {
    apply_local_pair(rho, channel, channel)
}

/// `first ⊗ first`, then `second ⊗ second`.
pub fn compose(
    rho: &DensityMatrix,
    first: &KrausChannel,
    second: &KrausChannel,
) -> Result<DensityMatrix> {
    apply_both(&apply_both(rho, first)?, second)
}

/// Converts a decay rate and elapsed time into the damping parameter
/// `γ = 1 - exp(-Γ t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeParams {
    pub rate: f64,
    pub time: f64,
}

impl TimeParams {
    pub fn new(rate: f64, time: f64) -> Self {
        Self { rate, time }
    }

    pub fn gamma(&self) -> f64 {
        -(-self.rate * self.time).exp_m1()
    }

    /// Time at which `γ` is reached for this rate.
    pub fn time_for_gamma(rate: f64, gamma: f64) -> f64 {
        -(-gamma).ln_1p() / rate
    }
}
