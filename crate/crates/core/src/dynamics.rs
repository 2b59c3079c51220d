//! Decoherence scenarios, (α, γ) sweeps, death classification and branch
//! switches of the interferometric power.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_both, compose, KrausChannel};
use crate::error::{Error, Result};
use crate::measures::{
    build_m_matrix, concurrence_general, interferometric_power, ip_with_tied_axes, MeasureResult,
};
use crate::states::{DensityMatrix, FamilyKind, StateFamily};

pub const DEFAULT_EPS_DEATH: f64 = 1e-10;
pub const DEFAULT_DEATH_GRID: usize = 10_000;
/// Largest γ considered by death classification; γ = 1 itself is excluded.
pub const ASYMPTOTIC_GUARD: f64 = 1.0 - 1e-6;
pub const DEATH_BISECTION_TOL: f64 = 1e-8;
pub const MIN_SWITCH_GRID: usize = 1_000;
pub const SWITCH_BISECTION_TOL: f64 = 1e-6;
/// Closed-form `M` entries need `|ρ14|` above this; `a` and `b` blow up below.
pub const CLOSED_FORM_RHO14_MIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "dephasing-werner")]
    DephasingWerner,
    #[serde(rename = "gad-q1")]
    GadQ1,
    #[serde(rename = "gad-q23")]
    GadQ2of3,
    #[serde(rename = "depolarizing")]
    Depolarizing,
    #[serde(rename = "dephasing+gad")]
    DephasingPlusGad,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::DephasingWerner,
        Scenario::GadQ1,
        Scenario::GadQ2of3,
        Scenario::Depolarizing,
        Scenario::DephasingPlusGad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::DephasingWerner => "dephasing-werner",
            Scenario::GadQ1 => "gad-q1",
            Scenario::GadQ2of3 => "gad-q23",
            Scenario::Depolarizing => "depolarizing",
            Scenario::DephasingPlusGad => "dephasing+gad",
        }
    }

    pub fn family(self) -> FamilyKind {
        match self {
            Scenario::DephasingWerner => FamilyKind::Werner,
            _ => FamilyKind::SchmidtPure,
        }
    }

    pub fn initial(self, alpha: f64) -> Result<StateFamily> {
        StateFamily::new(self.family(), alpha)
    }

    /// Channel stages at damping `gamma`, applied in order to both qubits.
    pub fn channels(self, gamma: f64) -> Result<Vec<KrausChannel>> {
        Ok(match self {
            Scenario::DephasingWerner => vec![KrausChannel::dephasing(gamma)?],
            Scenario::GadQ1 => vec![KrausChannel::gad(gamma, 1.0)?],
            Scenario::GadQ2of3 => vec![KrausChannel::gad(gamma, 2.0 / 3.0)?],
            Scenario::Depolarizing => vec![KrausChannel::depolarizing(gamma)?],
            Scenario::DephasingPlusGad => vec![
                KrausChannel::dephasing(gamma)?,
                KrausChannel::gad(gamma, 1.0)?,
            ],
        })
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

pub fn evolve(scenario: Scenario, alpha: f64, gamma: f64) -> Result<DensityMatrix> {
    let rho = scenario.initial(alpha)?.state()?;
    match scenario.channels(gamma)?.as_slice() {
        [single] => apply_both(&rho, single),
        [first, second] => compose(&rho, first, second),
        _ => unreachable!("scenarios have one or two stages"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub scenario: Scenario,
    pub alpha: f64,
    pub gamma: f64,
    pub concurrence: f64,
    pub ip: f64,
    pub ip_branch: u8,
}

pub fn evaluate(scenario: Scenario, alpha: f64, gamma: f64) -> Result<SweepRecord> {
    let rho = evolve(scenario, alpha, gamma)?;
    let c = concurrence_general(&rho)?;
    let ip = interferometric_power(&rho)?;
    Ok(SweepRecord {
        scenario,
        alpha,
        gamma,
        concurrence: c.value,
        ip: ip.value,
        ip_branch: ip.branch,
    })
}

/// `k / (steps - 1)` for `k = 0..steps`, hitting both endpoints exactly.
pub fn unit_grid(steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps).map(|k| k as f64 / last).collect()
}

/// Uniform grid over `[0, 1]^2`, α-major. Points are evaluated in parallel;
/// the output order does not depend on scheduling.
pub fn sweep(
    scenario: Scenario,
    alpha_steps: usize,
    gamma_steps: usize,
) -> Result<Vec<SweepRecord>> {
    for (what, got) in [("alpha steps", alpha_steps), ("gamma steps", gamma_steps)] {
        if got < 2 {
            return Err(Error::TooFewSamples { what, min: 2, got });
        }
    }
    let alphas = unit_grid(alpha_steps);
    let gammas = unit_grid(gamma_steps);
    (0..alpha_steps * gamma_steps)
        .into_par_iter()
        .map(|k| evaluate(scenario, alphas[k / gamma_steps], gammas[k % gamma_steps]))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Concurrence,
    #[serde(rename = "ip")]
    InterferometricPower,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Concurrence => "concurrence",
            Measure::InterferometricPower => "ip",
        })
    }
}

pub fn measure_at(
    scenario: Scenario,
    alpha: f64,
    gamma: f64,
    measure: Measure,
) -> Result<MeasureResult> {
    let rho = evolve(scenario, alpha, gamma)?;
    match measure {
        Measure::Concurrence => concurrence_general(&rho),
        Measure::InterferometricPower => interferometric_power(&rho),
    }
}

/// When a sample counts as dead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeathRule {
    /// Below `eps` and sitting on the zero clip of the measure. This is the
    /// default: measures that decay as a power of `1 - γ` drop below any fixed
    /// threshold well before γ = 1 without ever reaching zero.
    ClippedZero { eps: f64 },
    /// Below `eps`, nothing else.
    Threshold { eps: f64 },
}

impl DeathRule {
    pub fn is_dead(&self, r: &MeasureResult) -> bool {
        match *self {
            DeathRule::ClippedZero { eps } => r.value < eps && r.is_clipped_zero(),
            DeathRule::Threshold { eps } => r.value < eps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeathPoint {
    Finite(f64),
    Asymptotic,
}

impl DeathPoint {
    pub fn is_finite(&self) -> bool {
        matches!(self, DeathPoint::Finite(_))
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            DeathPoint::Finite(g) => Some(g),
            DeathPoint::Asymptotic => None,
        }
    }
}

impl fmt::Display for DeathPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeathPoint::Finite(g) => write!(f, "{g:.12}"),
            DeathPoint::Asymptotic => f.write_str("asymptotic"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeathReport {
    pub alpha: f64,
    pub measure: Measure,
    pub gamma_star: DeathPoint,
    /// Smallest measure value over the sampled γ.
    pub min_sampled: f64,
}

/// Sample points `k / grid` below the guard, followed by the guard itself.
fn guarded_grid(grid: usize) -> Vec<f64> {
    let mut gammas: Vec<f64> = (0..=grid)
        .map(|k| k as f64 / grid as f64)
        .take_while(|&g| g < ASYMPTOTIC_GUARD)
        .collect();
    gammas.push(ASYMPTOTIC_GUARD);
    gammas
}

/// Classifies a measure curve `f(γ)` on `[0, 1 - 1e-6]`.
///
/// Asymptotic when the last sample is alive. Otherwise the last alive sample
/// and its dead neighbour bracket γ*, which is bisected down to
/// [`DEATH_BISECTION_TOL`]; the dead end of the final bracket is reported.
/// Every sample is dead → γ* = 0.
pub fn classify_death<F>(f: F, rule: DeathRule, grid: usize) -> Result<(DeathPoint, f64)>
where
    F: Fn(f64) -> Result<MeasureResult> + Sync,
{
    if grid < 2 {
        return Err(Error::TooFewSamples {
            what: "death grid",
            min: 2,
            got: grid,
        });
    }
    let gammas = guarded_grid(grid);
    let samples: Vec<MeasureResult> = gammas.par_iter().map(|&g| f(g)).collect::<Result<_>>()?;
    let min_sampled = samples
        .iter()
        .map(|r| r.value)
        .fold(f64::INFINITY, f64::min);
    let dead: Vec<bool> = samples.iter().map(|r| rule.is_dead(r)).collect();

    if !dead[dead.len() - 1] {
        return Ok((DeathPoint::Asymptotic, min_sampled));
    }
    let Some(last_alive) = dead.iter().rposition(|d| !d) else {
        return Ok((DeathPoint::Finite(0.0), min_sampled));
    };
    let (mut lo, mut hi) = (gammas[last_alive], gammas[last_alive + 1]);
    while hi - lo > DEATH_BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if rule.is_dead(&f(mid)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((DeathPoint::Finite(hi), min_sampled))
}

pub fn find_death_with_rule(
    scenario: Scenario,
    alpha: f64,
    measure: Measure,
    rule: DeathRule,
    grid: usize,
) -> Result<DeathReport> {
    scenario.initial(alpha)?;
    let (gamma_star, min_sampled) =
        classify_death(|g| measure_at(scenario, alpha, g, measure), rule, grid)?;
    Ok(DeathReport {
        alpha,
        measure,
        gamma_star,
        min_sampled,
    })
}

pub fn find_death(
    scenario: Scenario,
    alpha: f64,
    measure: Measure,
    eps_death: f64,
    grid: usize,
) -> Result<DeathReport> {
    find_death_with_rule(
        scenario,
        alpha,
        measure,
        DeathRule::ClippedZero { eps: eps_death },
        grid,
    )
}

fn ip_branches(scenario: Scenario, alpha: f64, gamma: f64) -> Result<(u8, Vec<u8>)> {
    let m = build_m_matrix(&evolve(scenario, alpha, gamma)?)?;
    let (r, tied) = ip_with_tied_axes(&m)?;
    Ok((r.branch, tied))
}

/// γ values in `[0, 1]` where the minimising axis of `M` switches, each
/// bisected to [`SWITCH_BISECTION_TOL`].
///
/// A change between neighbouring samples only counts when neither sample
/// has the other's axis among its tied minima, so degenerate points (the
/// isotropic `M` of a Bell state, or `M = 0`) do not register as switches.
pub fn find_ip_sudden_change(scenario: Scenario, alpha: f64, grid: usize) -> Result<Vec<f64>> {
    if grid < MIN_SWITCH_GRID {
        return Err(Error::TooFewSamples {
            what: "sudden-change grid",
            min: MIN_SWITCH_GRID,
            got: grid,
        });
    }
    scenario.initial(alpha)?;
    let gammas: Vec<f64> = (0..=grid).map(|k| k as f64 / grid as f64).collect();
    let profile: Vec<(u8, Vec<u8>)> = gammas
        .par_iter()
        .map(|&g| ip_branches(scenario, alpha, g))
        .collect::<Result<_>>()?;

    let mut switches = Vec::new();
    for k in 0..grid {
        let (ba, tied_a) = &profile[k];
        let (bb, tied_b) = &profile[k + 1];
        if ba == bb || tied_a.contains(bb) || tied_b.contains(ba) {
            continue;
        }
        let (mut lo, mut hi) = (gammas[k], gammas[k + 1]);
        while hi - lo > SWITCH_BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if ip_branches(scenario, alpha, mid)?.0 == *ba {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        switches.push(0.5 * (lo + hi));
    }
    Ok(switches)
}

/// Printed closed-form expressions for a scenario, evaluated as written.
/// `None` where no expression exists or it cannot be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClosedForm {
    pub concurrence: Option<f64>,
    pub ip: Option<f64>,
    /// General-q `Λ1(γ)` for amplitude damping.
    pub lambda1: Option<f64>,
    /// The `q = 1` specialisation of `Λ1(γ)` as printed.
    pub lambda1_q1: Option<f64>,
    /// `(M11, M22, M33)` for amplitude damping.
    pub m_diagonal: Option<[f64; 3]>,
}

/// Element formulas `(ρ11, ρ22, ρ44, ρ14)` of amplitude damping applied to
/// the Schmidt family.
pub fn gad_elements(alpha: f64, gamma: f64, q: f64) -> [f64; 4] {
    let r11 = (1.0 - alpha) * (1.0 - gamma * (2.0 * (1.0 - q) - gamma * (1.0 - 2.0 * q)))
        + gamma * gamma * q * q;
    let r22 = gamma * ((1.0 - alpha) * (1.0 - 2.0 * q) * (1.0 - gamma) + q * (1.0 - gamma * q));
    let r44 = 1.0 - r11 - 2.0 * r22;
    let r14 = (1.0 - gamma) * (alpha * (1.0 - alpha)).sqrt();
    [r11, r22, r44, r14]
}

/// Element formulas `(ρ11, ρ22, ρ44, ρ14)` of depolarizing noise applied to
/// the Schmidt family.
pub fn depolarizing_elements(alpha: f64, gamma: f64) -> [f64; 4] {
    let r11 = (1.0 - alpha) * (1.0 - gamma) + gamma * gamma / 4.0;
    let r22 = (2.0 - gamma) * gamma / 4.0;
    let r44 = 1.0 - r11 - 2.0 * r22;
    let r14 = (alpha * (1.0 - alpha)).sqrt() * (1.0 - gamma) * (1.0 - gamma);
    [r11, r22, r44, r14]
}

fn gad_m_diagonal(alpha: f64, gamma: f64, q: f64) -> Option<[f64; 3]> {
    let [r11, r22, r44, r14] = gad_elements(alpha, gamma, q);
    if r14.abs() <= CLOSED_FORM_RHO14_MIN {
        return None;
    }
    let s = ((r11 - r44) * (r11 - r44) + 4.0 * r14 * r14).sqrt();
    let (l1, l2) = (r22, r22);
    let l3 = (r11 + r44 + s) / 2.0;
    let l4 = (r11 + r44 - s) / 2.0;
    let a = (r11 - r44 - s) / (2.0 * r14);
    let b = (r11 - r44 + s) / (2.0 * r14);
    let m11 = ((l1 - l3).powi(2) * (l2 + l3) + a * a * (l2 - l3).powi(2) * (l1 + l3))
        / ((l1 + l3) * (l2 + l3) * (1.0 + a * a))
        + ((l1 - l4).powi(2) * (l2 + l4) + b * b * (l2 - l4).powi(2) * (l1 + l4))
            / ((l1 + l4) * (l2 + l4) * (1.0 + b * b));
    let m33 =
        (l3 - l4).powi(2) / (l3 + l4) * (a * b - 1.0).powi(2) / ((1.0 + a * a) * (1.0 + b * b));
    [m11, m33]
        .iter()
        .all(|x| x.is_finite())
        .then_some([m11, m11, m33])
}

fn gad_lambda1(alpha: f64, gamma: f64, q: f64) -> f64 {
    (1.0 - gamma) * (alpha * (1.0 - alpha)).sqrt()
        - gamma * ((1.0 - alpha) * (1.0 - 2.0 * q) * (1.0 - gamma) + q * (1.0 - gamma * q))
}

fn gad_lambda1_q1(alpha: f64, gamma: f64) -> f64 {
    2.0 * (1.0 - gamma) * ((alpha * (1.0 - alpha)).sqrt() - alpha * gamma)
}

pub fn closed_form_reference(scenario: Scenario, alpha: f64, gamma: f64) -> Result<ClosedForm> {
    scenario.initial(alpha)?;
    scenario.channels(gamma)?;
    let (a, g) = (alpha, gamma);
    Ok(match scenario {
        Scenario::DephasingWerner => {
            let c = (a * (1.5 - g) - 0.5).max(0.0);
            let first = a * a * (2.0 + g).powi(2) / (2.0 * (1.0 + a - a * g))
                + a * a * g * g / (2.0 * (1.0 - a + a * g));
            let second = 2.0 * a * a * (1.0 - g).powi(2) / (1.0 + a);
            ClosedForm {
                concurrence: Some(c),
                ip: Some(first.min(second)),
                ..ClosedForm::default()
            }
        }
        Scenario::GadQ1 => {
            let m = gad_m_diagonal(a, g, 1.0);
            ClosedForm {
                concurrence: Some(2.0 * gad_lambda1_q1(a, g).max(0.0)),
                ip: m.map(|d| d[0].min(d[2])),
                lambda1: Some(gad_lambda1(a, g, 1.0)),
                lambda1_q1: Some(gad_lambda1_q1(a, g)),
                m_diagonal: m,
            }
        }
        Scenario::GadQ2of3 => {
            let q = 2.0 / 3.0;
            let m = gad_m_diagonal(a, g, q);
            let l1 = gad_lambda1(a, g, q);
            ClosedForm {
                concurrence: Some(2.0 * l1.max(0.0)),
                ip: m.map(|d| d[0].min(d[2])),
                lambda1: Some(l1),
                m_diagonal: m,
                ..ClosedForm::default()
            }
        }
        Scenario::Depolarizing => ClosedForm {
            concurrence: Some(2.0 * (a * (1.0 - g) - (2.0 - g) * g / 4.0).max(0.0)),
            ..ClosedForm::default()
        },
        Scenario::DephasingPlusGad => ClosedForm::default(),
    })
}

/// `Λ1 = |ρ14| - sqrt(ρ22 ρ33)` of the evolved state.
pub fn pipeline_lambda1(scenario: Scenario, alpha: f64, gamma: f64) -> Result<f64> {
    let rho = evolve(scenario, alpha, gamma)?;
    Ok(rho.get(0, 3).norm() - (rho.get(1, 1).re.max(0.0) * rho.get(2, 2).re.max(0.0)).sqrt())
}

/// Increases of the IP along a γ grid at fixed α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub scenario: Scenario,
    pub alpha: f64,
    pub violations: usize,
    pub worst_increase: f64,
    pub first_violation: Option<f64>,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.violations == 0
    }
}

/// Counts steps where the IP rises by more than `1e-12` between
/// consecutive points of a `gamma_steps` grid.
pub fn ip_monotonicity(
    scenario: Scenario,
    alpha: f64,
    gamma_steps: usize,
) -> Result<MonotonicityReport> {
    let records = sweep_row(scenario, alpha, gamma_steps)?;
    let mut report = MonotonicityReport {
        scenario,
        alpha,
        violations: 0,
        worst_increase: 0.0,
        first_violation: None,
    };
    for pair in records.windows(2) {
        let rise = pair[1].ip - pair[0].ip;
        if rise > 1e-12 {
            report.violations += 1;
            report.worst_increase = report.worst_increase.max(rise);
            report.first_violation.get_or_insert(pair[1].gamma);
        }
    }
    Ok(report)
}

/// One α row of [`sweep`].
pub fn sweep_row(scenario: Scenario, alpha: f64, gamma_steps: usize) -> Result<Vec<SweepRecord>> {
    if gamma_steps < 2 {
        return Err(Error::TooFewSamples {
            what: "gamma steps",
            min: 2,
            got: gamma_steps,
        });
    }
    unit_grid(gamma_steps)
        .into_par_iter()
        .map(|g| evaluate(scenario, alpha, g))
        .collect()
}
