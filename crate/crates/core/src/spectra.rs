//! Energy spectrum of the working substance: a harmonic oscillator perturbed
//! by a momentum-dependent deformation of the canonical commutator.
//!
//! To first order in the deformation strength `gamma`, the level ladder picks
//! up a quadratic term,
//!
//! ```text
//! E_n = omega * (A*n + B*n^2),   A = 1 + gamma/2,   B = gamma/2,
//! ```
//!
//! in units with hbar = k_B = m = 1, normalized so that E_0 = 0. The
//! perturbed eigenstates mix levels four rungs apart with amplitudes built
//! from rising factorials.

use crate::error::{Error, Result};

/// Deformation strength beyond which the first-order spectrum is no longer
/// trustworthy; constructors log a warning past this point.
pub const PERTURBATIVE_GAMMA_LIMIT: f64 = 0.5;

/// Oscillator frequency plus dimensionless deformation strength.
///
/// `gamma = 0` is exactly the standard harmonic oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubstanceParams {
    omega: f64,
    gamma: f64,
}

impl SubstanceParams {
    /// Requires `omega > 0` and `gamma >= 0`, both finite. Values of
    /// `gamma > 0.5` are accepted but logged as outside the perturbative
    /// comfort zone.
    pub fn new(omega: f64, gamma: f64) -> Result<Self> {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega must be finite and positive, got {omega}"
            )));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParams(format!(
                "gamma must be finite and nonnegative, got {gamma}"
            )));
        }
        let params = Self { omega, gamma };
        if params.exceeds_perturbative_range() {
            log::warn!(
                "gamma = {gamma} exceeds {PERTURBATIVE_GAMMA_LIMIT}; \
                 the first-order spectrum may be unreliable"
            );
        }
        Ok(params)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// True when `gamma` is past [`PERTURBATIVE_GAMMA_LIMIT`].
    pub fn exceeds_perturbative_range(&self) -> bool {
        self.gamma > PERTURBATIVE_GAMMA_LIMIT
    }

    /// The dimensionless ladder coefficients `(A, B)` with
    /// `A = 1 + gamma/2` and `B = gamma/2`.
    pub fn spectrum_coefficients(&self) -> (f64, f64) {
        (1.0 + 0.5 * self.gamma, 0.5 * self.gamma)
    }

    /// Energy of level `n`: `omega * (A*n + B*n^2)`.
    ///
    /// Strictly increasing in `n`; `energy_level(0) == 0`.
    pub fn energy_level(&self, n: u64) -> f64 {
        let (a, b) = self.spectrum_coefficients();
        let nf = n as f64;
        self.omega * (a * nf + b * nf * nf)
    }

    /// First-order mixing amplitudes of eigenstate `n` onto `n - 4` and
    /// `n + 4`.
    pub fn eigenstate_correction(&self, n: u64) -> EigenstateCorrection {
        let scale = self.gamma / 16.0;
        let nf = n as f64;
        // (n-3)^(4) contains a zero factor for every n < 4; branch anyway so
        // the vanishing amplitude is +0 rather than a sign-carrying zero.
        let c_minus4 = if n < 4 {
            0.0
        } else {
            -scale * pochhammer_rising(nf - 3.0, 4).sqrt()
        };
        let c_plus4 = scale * pochhammer_rising(nf + 1.0, 4).sqrt();
        EigenstateCorrection {
            n,
            c_minus4,
            c_plus4,
        }
    }
}

/// Mixing amplitudes of a perturbed eigenstate onto the levels four rungs
/// below and above it. Both are dimensionless and scale linearly in `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenstateCorrection {
    pub n: u64,
    /// Amplitude on level `n - 4`; zero for `n < 4`.
    pub c_minus4: f64,
    /// Amplitude on level `n + 4`.
    pub c_plus4: f64,
}

/// Rising factorial `x^(k) = x (x+1) ... (x+k-1)`, with the empty product
/// `x^(0) = 1`.
pub fn pochhammer_rising(x: f64, k: u32) -> f64 {
    let mut product = 1.0;
    for j in 0..k {
        product *= x + j as f64;
    }
    product
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(SubstanceParams::new(0.0, 0.1).is_err());
        assert!(SubstanceParams::new(-1.0, 0.1).is_err());
        assert!(SubstanceParams::new(1.0, -0.1).is_err());
        assert!(SubstanceParams::new(f64::NAN, 0.1).is_err());
        assert!(SubstanceParams::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn gamma_above_half_is_accepted_but_flagged() {
        let p = SubstanceParams::new(1.0, 0.6).unwrap();
        assert!(p.exceeds_perturbative_range());
        let p = SubstanceParams::new(1.0, 0.5).unwrap();
        assert!(!p.exceeds_perturbative_range());
    }

    #[test]
    fn spectrum_coefficients_examples() {
        let c = |g: f64| {
            SubstanceParams::new(1.0, g)
                .unwrap()
                .spectrum_coefficients()
        };
        assert_eq!(c(0.0), (1.0, 0.0));
        assert_eq!(c(0.1), (1.05, 0.05));
        assert_eq!(c(0.5), (1.25, 0.25));
    }

    #[test]
    fn energy_level_examples() {
        let e = |w: f64, g: f64, n: u64| SubstanceParams::new(w, g).unwrap().energy_level(n);
        assert_eq!(e(1.0, 0.0, 3), 3.0);
        assert!((e(1.0, 0.1, 1) - 1.1).abs() < 1e-15);
        assert_eq!(e(2.0, 0.2, 0), 0.0);
    }

    #[test]
    fn commutative_limit_is_the_plain_ladder() {
        let p = SubstanceParams::new(1.7, 0.0).unwrap();
        for n in 0..200 {
            assert_eq!(p.energy_level(n), 1.7 * n as f64);
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer_rising(1.0, 4), 24.0);
        assert_eq!(pochhammer_rising(-1.0, 4), 0.0);
        assert_eq!(pochhammer_rising(5.0, 0), 1.0);
        assert_eq!(pochhammer_rising(2.5, 2), 2.5 * 3.5);
    }

    #[test]
    fn eigenstate_correction_examples() {
        let p = SubstanceParams::new(1.0, 0.16).unwrap();

        let c0 = p.eigenstate_correction(0);
        assert_eq!(c0.c_minus4, 0.0);
        assert!((c0.c_plus4 - 0.048989794855663562).abs() < 1e-15);

        let c4 = p.eigenstate_correction(4);
        assert!((c4.c_minus4 - -0.048989794855663562).abs() < 1e-15);
        // (0.16/16) * sqrt(5*6*7*8)
        assert!((c4.c_plus4 - 0.409_878_030_638_383_96).abs() < 1e-15);

        let p = SubstanceParams::new(1.0, 0.3).unwrap();
        assert_eq!(p.eigenstate_correction(2).c_minus4, 0.0);
    }

    #[test]
    fn lower_amplitude_vanishes_below_four() {
        let p = SubstanceParams::new(1.0, 0.4).unwrap();
        for n in 0..4 {
            assert_eq!(p.eigenstate_correction(n).c_minus4, 0.0);
        }
        assert!(p.eigenstate_correction(4).c_minus4 < 0.0);
    }
}
