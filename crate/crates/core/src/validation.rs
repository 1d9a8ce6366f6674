//! Independent oracles and cross-checks.
//!
//! These ship in the library (not only in tests) so `ncq-thermo validate`
//! can exercise the full stack end to end: brute-force summation against the
//! adaptive partition sum, central differences against the internal energy,
//! and closed-form harmonic references against the cycle evaluators.

use crate::cycles::{self, CycleSpec, ScalingMode};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::spectra::SubstanceParams;
use crate::statmech::{self, ThermalState};

/// Stirling engine efficiency of the undeformed oscillator at the default
/// operating point (baths 20/10, frequencies 2/1), frozen from a fixed
/// 10^6-level corner evaluation.
pub const HO_STIRLING_ENGINE_EFFICIENCY: f64 = 0.29048709408056186;

/// Stirling refrigerator COP of the undeformed oscillator at the default
/// operating point, frozen from the same corner evaluation.
pub const HO_STIRLING_FRIDGE_COP: f64 = 2.4424937299371596;

/// Below this magnitude a reference value counts as zero and the check
/// falls back to absolute error.
pub const NEAR_ZERO_REFERENCE: f64 = 1e-12;

/// One oracle comparison. `rel_diff` is the relative difference, except
/// against near-zero references where it holds the absolute difference, so
/// that `pass == (rel_diff <= tolerance_used)` in both regimes.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub quantity: String,
    pub primary_value: f64,
    pub oracle_value: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub tolerance_used: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn evaluate(quantity: &str, primary: f64, oracle: f64, tolerance: f64) -> Self {
        let abs_diff = (primary - oracle).abs();
        let rel_diff = if oracle.abs() > NEAR_ZERO_REFERENCE {
            abs_diff / oracle.abs()
        } else {
            abs_diff
        };
        Self {
            quantity: quantity.to_string(),
            primary_value: primary,
            oracle_value: oracle,
            abs_diff,
            rel_diff,
            tolerance_used: tolerance,
            pass: rel_diff <= tolerance,
        }
    }
}

/// Naive fixed-N Boltzmann sum `sum_{n=0}^{n_levels} exp(-beta E_n)`.
///
/// No adaptivity, no certification: this is the oracle the adaptive sum is
/// judged against, so it stays a separate code path.
pub fn brute_force_partition(state: &ThermalState, n_levels: u64) -> f64 {
    let params = state.params();
    let beta = state.beta();
    let mut sum = NeumaierSum::new();
    for n in 0..=n_levels {
        sum.add((-beta * params.energy_level(n)).exp());
    }
    sum.value()
}

/// Central difference `-(ln Z(beta+h) - ln Z(beta-h)) / (2h)` for the
/// internal energy, with both partition values taken from
/// [`brute_force_partition`] at a truncation index certified by the adaptive
/// tail bound (at the shallower of the two inverse temperatures).
pub fn finite_difference_energy(state: &ThermalState, h: f64) -> Result<f64> {
    let beta = state.beta();
    if !h.is_finite() || h <= 0.0 || h >= beta / 10.0 {
        return Err(Error::InvalidStep(format!(
            "need 0 < h < beta/10, got h = {h} at beta = {beta}"
        )));
    }
    let minus = ThermalState::new(state.params(), beta - h)?;
    let plus = ThermalState::new(state.params(), beta + h)?;
    // beta - h has the slowest-decaying terms, so its certified index covers
    // both evaluations.
    let levels = statmech::partition_sum(&minus, statmech::DEFAULT_REL_TOL)?.levels_used;
    let ln_plus = brute_force_partition(&plus, levels).ln();
    let ln_minus = brute_force_partition(&minus, levels).ln();
    Ok(-(ln_plus - ln_minus) / (2.0 * h))
}

/// Otto-refrigerator COP of the undeformed oscillator:
/// `omega_low / (omega_high - omega_low)`.
pub fn ho_otto_cop_reference(omega_high: f64, omega_low: f64) -> Result<f64> {
    if !(omega_high > omega_low && omega_low > 0.0) {
        return Err(Error::InvalidParams(format!(
            "need omega_high > omega_low > 0, got {omega_high}, {omega_low}"
        )));
    }
    Ok(omega_low / (omega_high - omega_low))
}

fn state(omega: f64, gamma: f64, beta: f64) -> Result<ThermalState> {
    ThermalState::new(SubstanceParams::new(omega, gamma)?, beta)
}

/// The fixed cross-check battery behind `ncq-thermo validate`.
pub fn run_validation_suite(rel_tol: f64) -> Result<Vec<OracleReport>> {
    let mut reports = Vec::new();

    // adaptive partition sum vs geometric closed form at gamma = 0
    let s = state(1.0, 0.0, std::f64::consts::LN_2)?;
    reports.push(OracleReport::evaluate(
        "partition_sum vs geometric series (gamma=0, beta*omega=ln 2)",
        statmech::partition_sum(&s, rel_tol)?.value,
        2.0,
        1e-12,
    ));

    // adaptive vs brute force at a generic deformed state
    let s = state(1.0, 0.1, 1.0)?;
    let adaptive = statmech::partition_sum(&s, rel_tol)?.value;
    reports.push(OracleReport::evaluate(
        "partition_sum vs brute force 10^6 levels (gamma=0.1, beta=1, omega=1)",
        adaptive,
        brute_force_partition(&s, 1_000_000),
        rel_tol,
    ));

    // closed form must sit within [Z - 1, Z]; report the bracket slack
    // (Z_sum - Z_cf) against the mid-bracket reference 0.5 with tolerance 1,
    // which passes exactly when the slack lies in [0, 1].
    let closed = statmech::partition_closed_form(&s)?;
    reports.push(OracleReport::evaluate(
        "closed-form bracket slack Z_sum - Z_cf in [0, 1] (gamma=0.1)",
        adaptive - closed,
        0.5,
        1.0,
    ));

    // internal energy vs central difference
    let u = statmech::thermo_point(&s, rel_tol)?.internal_energy;
    reports.push(OracleReport::evaluate(
        "internal energy vs finite difference (gamma=0.1, beta=1, omega=1)",
        u,
        finite_difference_energy(&s, 1e-5)?,
        1e-6,
    ));
    let bose = state(1.0, 0.0, std::f64::consts::LN_2)?;
    reports.push(OracleReport::evaluate(
        "internal energy vs Bose formula (gamma=0, beta*omega=ln 2)",
        statmech::thermo_point(&bose, rel_tol)?.internal_energy,
        1.0,
        1e-12,
    ));
    reports.push(OracleReport::evaluate(
        "entropy vs 2 ln 2 (gamma=0, beta*omega=ln 2)",
        statmech::thermo_point(&bose, rel_tol)?.entropy,
        2.0 * std::f64::consts::LN_2,
        1e-12,
    ));

    // occupation normalization over the certified truncation
    let s = state(1.0, 0.2, 0.5)?;
    let z = statmech::partition_sum(&s, rel_tol)?;
    let mut total = NeumaierSum::new();
    for n in 0..=z.levels_used {
        total.add(statmech::occupation_probability(&s, n, rel_tol)?);
    }
    reports.push(OracleReport::evaluate(
        "occupation probabilities sum to 1 (gamma=0.2, beta=0.5)",
        total.value(),
        1.0,
        1e-10,
    ));

    // cycle evaluators vs harmonic references
    let ho = CycleSpec::new(20.0, 10.0, 2.0, 1.0, 0.0, ScalingMode::FixedGammaTilde)?;
    reports.push(OracleReport::evaluate(
        "Stirling engine efficiency vs frozen harmonic value",
        cycles::stirling_engine(&ho, rel_tol)?.merit,
        HO_STIRLING_ENGINE_EFFICIENCY,
        1e-9,
    ));
    reports.push(OracleReport::evaluate(
        "Stirling fridge COP vs frozen harmonic value",
        cycles::stirling_refrigerator(&ho, rel_tol)?.merit,
        HO_STIRLING_FRIDGE_COP,
        1e-9,
    ));
    let otto = CycleSpec::new(20.0, 10.0, 1.5, 1.0, 0.0, ScalingMode::FixedGamma)?;
    reports.push(OracleReport::evaluate(
        "Otto fridge COP vs frequency-ratio identity (omega 1.5/1)",
        cycles::otto_refrigerator(&otto, rel_tol)?.merit,
        ho_otto_cop_reference(1.5, 1.0)?,
        1e-9,
    ));

    // special functions
    reports.push(OracleReport::evaluate(
        "erfc(1) vs high-precision reference",
        statmech::erfc(1.0),
        0.15729920705028513,
        1e-12,
    ));
    reports.push(OracleReport::evaluate(
        "erfc reflection erfc(3) + erfc(-3) = 2",
        statmech::erfc(3.0) + statmech::erfc(-3.0),
        2.0,
        1e-12,
    ));

    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln2_state() -> ThermalState {
        state(1.0, 0.0, std::f64::consts::LN_2).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        // 1 + e^{-ln 2} = 1.5
        assert!((brute_force_partition(&ln2_state(), 1) - 1.5).abs() < 1e-15);
        // the full geometric sum: every term is a power of two, so the
        // compensated accumulator telescopes to the correctly rounded 2.0
        assert!((brute_force_partition(&ln2_state(), 1_000_000) - 2.0).abs() < 1e-300);
        let s = state(1.0, 0.3, 0.7).unwrap();
        assert!(brute_force_partition(&s, 10) <= brute_force_partition(&s, 100));
    }

    #[test]
    fn finite_difference_matches_bose_energy() {
        let fd = finite_difference_energy(&ln2_state(), 1e-5).unwrap();
        assert!((fd - 1.0).abs() < 1e-6);
    }

    #[test]
    fn finite_difference_matches_thermo_point() {
        let s = state(1.0, 0.1, 1.0).unwrap();
        let u = statmech::thermo_point(&s, 1e-12).unwrap().internal_energy;
        let fd = finite_difference_energy(&s, 1e-5).unwrap();
        assert!((fd - u).abs() / u < 1e-6);
    }

    #[test]
    fn finite_difference_is_second_order() {
        // halving h shrinks the truncation error ~4x once it dominates noise
        let s = ln2_state();
        let u = statmech::thermo_point(&s, 1e-12).unwrap().internal_energy;
        let err = |h: f64| (finite_difference_energy(&s, h).unwrap() - u).abs();
        let ratio = err(2e-2) / err(1e-2);
        assert!(
            (2.5..6.0).contains(&ratio),
            "convergence ratio {ratio} not ~4"
        );
    }

    #[test]
    fn finite_difference_rejects_bad_steps() {
        let s = ln2_state();
        assert!(finite_difference_energy(&s, 0.0).is_err());
        assert!(finite_difference_energy(&s, s.beta()).is_err());
        assert!(finite_difference_energy(&s, -1e-5).is_err());
    }

    #[test]
    fn otto_reference_values() {
        assert_eq!(ho_otto_cop_reference(2.0, 1.0).unwrap(), 1.0);
        assert_eq!(ho_otto_cop_reference(1.5, 1.0).unwrap(), 2.0);
        assert!(ho_otto_cop_reference(1.0, 1.0).is_err());
        assert!(ho_otto_cop_reference(1.0, 2.0).is_err());
    }

    #[test]
    fn report_near_zero_uses_absolute_difference() {
        let r = OracleReport::evaluate("zero ref", 5e-13, 0.0, 1e-12);
        assert!(r.pass);
        assert_eq!(r.rel_diff, r.abs_diff);
        let r = OracleReport::evaluate("zero ref", 5e-12, 0.0, 1e-12);
        assert!(!r.pass);
    }

    #[test]
    fn suite_is_all_green() {
        let reports = run_validation_suite(statmech::DEFAULT_REL_TOL).unwrap();
        assert!(reports.len() >= 10);
        for r in &reports {
            assert!(r.pass, "{}: {:?}", r.quantity, r);
        }
    }
}
