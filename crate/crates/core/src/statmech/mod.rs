//! Canonical-ensemble quantities of the working substance.
//!
//! The ground truth for everything downstream is the truncated Boltzmann sum
//! `Z = sum_n exp(-beta E_n)` with a certified bound on the discarded tail.
//! The erfc closed form is also provided; it is the integral
//! `int_0^inf exp(-beta omega (A n + B n^2)) dn` and therefore brackets the
//! sum from below with a gap of at most one (the summand is positive,
//! decreasing, and equals 1 at n = 0), which is how it is validated.

mod special;

pub use special::{erfc, erfcx};

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::spectra::SubstanceParams;
use std::f64::consts::PI;

/// Default relative tolerance for tail certification.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Tolerances are only accepted in (0, 1e-3].
pub const MAX_REL_TOL: f64 = 1e-3;

/// Hard cap on the truncation index; hitting it reports divergence instead
/// of looping until the u64 overflows.
pub const LEVEL_CAP: u64 = 10_000_000;

const INITIAL_LEVELS: u64 = 32;

/// Substance parameters plus inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalState {
    params: SubstanceParams,
    beta: f64,
}

impl ThermalState {
    /// Requires finite `beta > 0`.
    pub fn new(params: SubstanceParams, beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidState(format!(
                "beta must be finite and positive, got {beta}"
            )));
        }
        Ok(Self { params, beta })
    }

    pub fn params(&self) -> SubstanceParams {
        self.params
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }
}

/// Truncated partition sum with its certification metadata.
#[derive(Debug, Clone, Copy)]
pub struct PartitionResult {
    /// `sum_{n=0}^{levels_used} exp(-beta E_n)`; at least 1 because E_0 = 0.
    pub value: f64,
    /// Truncation index N (the last level included).
    pub levels_used: u64,
    /// Certified upper bound on the discarded tail `sum_{n>N}`.
    pub tail_bound: f64,
    /// `value - 1`, kept separately so ln(Z) stays accurate when Z -> 1.
    value_minus_one: f64,
}

impl PartitionResult {
    /// `ln Z`, exact even deep in the low-temperature regime where
    /// `Z = 1 + epsilon` rounds to 1.
    pub fn ln_value(&self) -> f64 {
        self.value_minus_one.ln_1p()
    }
}

/// One equilibrium point: partition function, internal energy, entropy and
/// free energy, tied together by `S = ln Z + beta U` and `F = -ln Z / beta`.
#[derive(Debug, Clone, Copy)]
pub struct ThermoPoint {
    pub partition: f64,
    pub ln_partition: f64,
    pub internal_energy: f64,
    pub entropy: f64,
    pub free_energy: f64,
    pub levels_used: u64,
}

struct CertifiedSums {
    z: f64,
    z_minus_one: f64,
    energy_weighted: f64,
    levels_used: u64,
    tail_bound: f64,
}

/// Doubling-then-certifying Boltzmann sums. Extends the truncation index
/// until the stated tail bound drops under `rel_tol * Z`.
fn certified_sums(state: &ThermalState, rel_tol: f64, min_levels: u64) -> Result<CertifiedSums> {
    let params = state.params();
    let beta = state.beta();
    let (a, b) = params.spectrum_coefficients();
    let beta_omega = beta * params.omega();

    let mut z = NeumaierSum::new();
    let mut z_minus_one = NeumaierSum::new();
    let mut energy_weighted = NeumaierSum::new();
    z.add(1.0); // n = 0 term: E_0 = 0

    let mut summed: u64 = 0;
    let mut target = INITIAL_LEVELS.max(min_levels).min(LEVEL_CAP);
    loop {
        for n in summed + 1..=target {
            let e = params.energy_level(n);
            let t = (-beta * e).exp();
            z.add(t);
            z_minus_one.add(t);
            energy_weighted.add(e * t);
        }
        summed = target;

        let tail = tail_bound(a, b, beta_omega, summed);
        let value = z.value();
        if tail <= rel_tol * value {
            return Ok(CertifiedSums {
                z: value,
                z_minus_one: z_minus_one.value(),
                energy_weighted: energy_weighted.value(),
                levels_used: summed,
                tail_bound: tail,
            });
        }
        if summed >= LEVEL_CAP {
            return Err(Error::Divergence { cap: LEVEL_CAP });
        }
        target = (summed * 2).min(LEVEL_CAP);
    }
}

/// Upper bound on `sum_{n>N} exp(-beta omega (A n + B n^2))`.
///
/// For b > 0 every term past N is dominated by the geometric sequence with
/// ratio `exp(-beta omega (A + B(2N+1)))` starting from the term at N; for
/// b = 0 the tail is exactly geometric.
fn tail_bound(a: f64, b: f64, beta_omega: f64, n: u64) -> f64 {
    let nf = n as f64;
    if b > 0.0 {
        let last_term = (-beta_omega * (a * nf + b * nf * nf)).exp();
        let denom = -(-beta_omega * (a + b * (2.0 * nf + 1.0))).exp_m1();
        last_term / denom
    } else {
        (-beta_omega * (nf + 1.0)).exp() / -(-beta_omega).exp_m1()
    }
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !rel_tol.is_finite() || rel_tol <= 0.0 || rel_tol > MAX_REL_TOL {
        return Err(Error::InvalidTolerance(rel_tol));
    }
    Ok(())
}

/// Truncated partition sum with a certified relative tail bound.
pub fn partition_sum(state: &ThermalState, rel_tol: f64) -> Result<PartitionResult> {
    check_rel_tol(rel_tol)?;
    let sums = certified_sums(state, rel_tol, 0)?;
    Ok(PartitionResult {
        value: sums.z,
        levels_used: sums.levels_used,
        tail_bound: sums.tail_bound,
        value_minus_one: sums.z_minus_one,
    })
}

/// Same as [`partition_sum`] but never truncates below `min_levels`; used
/// where two states must share one truncation index.
pub(crate) fn partition_sum_with_min_levels(
    state: &ThermalState,
    rel_tol: f64,
    min_levels: u64,
) -> Result<PartitionResult> {
    check_rel_tol(rel_tol)?;
    let sums = certified_sums(state, rel_tol, min_levels)?;
    Ok(PartitionResult {
        value: sums.z,
        levels_used: sums.levels_used,
        tail_bound: sums.tail_bound,
        value_minus_one: sums.z_minus_one,
    })
}

/// Closed-form partition function
/// `exp(beta (2+g)^2 w / (8g)) * sqrt(pi/2) * erfc(beta (2+g) w / (2 sqrt(2 beta g w))) / sqrt(beta g w)`,
/// which is exactly the integral `int_0^inf exp(-beta w (A n + B n^2)) dn`.
///
/// Undefined at `gamma = 0`. The exponent equals the square of the erfc
/// argument, so the catastrophic product `exp(huge) * erfc(huge)` collapses
/// to a single well-scaled `erfcx` evaluation.
pub fn partition_closed_form(state: &ThermalState) -> Result<f64> {
    let gamma = state.params().gamma();
    if gamma == 0.0 {
        return Err(Error::ClosedFormRequiresNoncommutative);
    }
    let beta_omega = state.beta() * state.params().omega();
    let arg = (2.0 + gamma) * (beta_omega / (8.0 * gamma)).sqrt();
    Ok((PI / (2.0 * beta_omega * gamma)).sqrt() * erfcx(arg))
}

/// Z, U, S and F from one certified truncation.
///
/// U is the ratio of the energy-weighted sum to Z over the same levels, so
/// it inherits the tail certificate; S and F follow algebraically.
pub fn thermo_point(state: &ThermalState, rel_tol: f64) -> Result<ThermoPoint> {
    check_rel_tol(rel_tol)?;
    let sums = certified_sums(state, rel_tol, 0)?;
    let internal_energy = sums.energy_weighted / sums.z;
    let ln_partition = sums.z_minus_one.ln_1p();
    let entropy = ln_partition + state.beta() * internal_energy;
    let free_energy = -ln_partition / state.beta();
    debug_assert!(internal_energy >= 0.0);
    debug_assert!(entropy >= 0.0);
    Ok(ThermoPoint {
        partition: sums.z,
        ln_partition,
        internal_energy,
        entropy,
        free_energy,
        levels_used: sums.levels_used,
    })
}

/// Boltzmann occupation probability `P_n = exp(-beta E_n) / Z`.
pub fn occupation_probability(state: &ThermalState, n: u64, rel_tol: f64) -> Result<f64> {
    let z = partition_sum(state, rel_tol)?;
    let weight = (-state.beta() * state.params().energy_level(n)).exp();
    Ok(weight / z.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(omega: f64, gamma: f64, beta: f64) -> ThermalState {
        ThermalState::new(SubstanceParams::new(omega, gamma).unwrap(), beta).unwrap()
    }

    #[test]
    fn rejects_nonpositive_beta() {
        let p = SubstanceParams::new(1.0, 0.1).unwrap();
        assert!(ThermalState::new(p, 0.0).is_err());
        assert!(ThermalState::new(p, -1.0).is_err());
        assert!(ThermalState::new(p, f64::NAN).is_err());
    }

    #[test]
    fn rejects_out_of_range_tolerance() {
        let s = state(1.0, 0.1, 1.0);
        assert!(matches!(
            partition_sum(&s, 0.0),
            Err(Error::InvalidTolerance(_))
        ));
        assert!(partition_sum(&s, 1e-2).is_err());
        assert!(partition_sum(&s, -1e-9).is_err());
        assert!(partition_sum(&s, 1e-3).is_ok());
    }

    #[test]
    fn geometric_limit_is_exact() {
        // gamma = 0, beta*omega = ln 2: Z = 1/(1 - 1/2) = 2
        let s = state(1.0, 0.0, std::f64::consts::LN_2);
        let r = partition_sum(&s, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.tail_bound <= 1e-12 * r.value);
        assert!(r.value >= 1.0);
    }

    #[test]
    fn deep_cold_limit_keeps_only_the_ground_term() {
        let s = state(1.0, 0.1, 50.0);
        let r = partition_sum(&s, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-20);
    }

    #[test]
    fn adaptive_matches_frozen_brute_force_value() {
        // Independent fixed-N (10^6) reference for beta=1, omega=1,
        // gamma=0.1, computed before the adaptive loop existed.
        let s = state(1.0, 0.1, 1.0);
        let r = partition_sum(&s, 1e-12).unwrap();
        assert!((r.value - 1.4690647748989954).abs() / 1.4690647748989954 < 1e-12);
    }

    #[test]
    fn closed_form_brackets_the_sum() {
        let s = state(1.0, 0.1, 1.0);
        let z = partition_sum(&s, 1e-12).unwrap().value;
        let cf = partition_closed_form(&s).unwrap();
        assert!(cf <= z, "closed form {cf} above sum {z}");
        assert!(
            z <= cf + 1.0,
            "sum {z} above closed form + 1 = {}",
            cf + 1.0
        );
    }

    #[test]
    fn closed_form_requires_positive_gamma() {
        let s = state(1.0, 0.0, 1.0);
        assert!(matches!(
            partition_closed_form(&s),
            Err(Error::ClosedFormRequiresNoncommutative)
        ));
    }

    #[test]
    fn closed_form_ratio_tends_to_one_from_above() {
        // sum -> integral as beta -> 0; mpmath gives the frozen ratios.
        let expected = [
            1.021_523_151_075_89,
            1.005_997_735_738_732_6,
            1.001_819_318_387_311_9,
        ];
        let mut previous = f64::INFINITY;
        for (i, beta) in [1e-2, 1e-3, 1e-4].iter().enumerate() {
            let s = state(1.0, 0.2, *beta);
            let ratio =
                partition_sum(&s, 1e-12).unwrap().value / partition_closed_form(&s).unwrap();
            assert!((ratio - expected[i]).abs() < 1e-9);
            assert!(ratio > 1.0 && ratio < previous);
            previous = ratio;
        }
    }

    #[test]
    fn bose_internal_energy_and_entropy() {
        // gamma = 0, beta*omega = ln 2: U = omega/(e^{beta omega} - 1) = 1,
        // S = ln Z + beta U = 2 ln 2.
        let s = state(1.0, 0.0, std::f64::consts::LN_2);
        let t = thermo_point(&s, 1e-12).unwrap();
        assert!((t.internal_energy - 1.0).abs() < 1e-12);
        assert!((t.entropy - 1.386_294_361_119_890_6).abs() < 1e-12);
        assert!((t.free_energy + t.ln_partition / s.beta()).abs() < 1e-15);
        assert!((t.entropy - (t.ln_partition + s.beta() * t.internal_energy)).abs() < 1e-15);
    }

    #[test]
    fn third_law_entropy_vanishes() {
        for gamma in [0.0, 0.1, 0.3] {
            let s = state(1.0, gamma, 1e3);
            let t = thermo_point(&s, 1e-12).unwrap();
            assert!(t.entropy >= 0.0);
            assert!(t.entropy < 1e-18, "S = {} at gamma = {gamma}", t.entropy);
        }
        // already vanishing at beta*omega = 50
        let t = thermo_point(&state(1.0, 0.1, 50.0), 1e-12).unwrap();
        assert!(t.entropy < 1e-18);
    }

    #[test]
    fn ln_value_resolves_tiny_excess_over_one() {
        let s = state(1.0, 0.1, 60.0);
        let r = partition_sum(&s, 1e-12).unwrap();
        assert_eq!(r.value, 1.0); // rounds to 1 in f64
        let expected = (-60.0 * s.params().energy_level(1)).exp();
        assert!(r.ln_value() > 0.0);
        assert!((r.ln_value() - expected).abs() / expected < 1e-9);
    }

    #[test]
    fn occupation_probability_examples() {
        let s = state(1.0, 0.0, std::f64::consts::LN_2);
        let p0 = occupation_probability(&s, 0, 1e-12).unwrap();
        let p1 = occupation_probability(&s, 1, 1e-12).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12);
        assert!((p1 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn occupations_sum_to_one_and_decrease() {
        let s = state(0.7, 0.3, 0.4);
        let r = partition_sum(&s, 1e-12).unwrap();
        let mut total = NeumaierSum::new();
        let mut previous = f64::INFINITY;
        for n in 0..=r.levels_used {
            let p = occupation_probability(&s, n, 1e-12).unwrap();
            assert!((0.0..=1.0).contains(&p));
            assert!(p <= previous);
            previous = p;
            total.add(p);
        }
        assert!((total.value() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn divergence_guard_trips_on_absurdly_hot_states() {
        // beta so small that certification cannot be reached within the cap
        let s = state(1e-6, 0.0, 1e-6);
        assert!(matches!(
            partition_sum(&s, 1e-12),
            Err(Error::Divergence { .. })
        ));
    }
}
