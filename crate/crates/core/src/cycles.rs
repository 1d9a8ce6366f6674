//! The three thermodynamic cycles, evaluated corner by corner.
//!
//! Heats are signed with "positive = absorbed by the working substance" and
//! the net work is the plain sum of the four stroke heats. Refrigerator
//! merits divide by |W| so both coefficients of performance come out
//! positive and comparable.

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::spectra::SubstanceParams;
use crate::statmech::{self, ThermalState, ThermoPoint};

/// |W| (or heat input) below this fraction of the largest stroke magnitude
/// counts as a degenerate cycle rather than a figure of merit.
pub const DEGENERACY_FLOOR: f64 = 1e-14;

/// How the deformation strength responds when the cycle modulates the
/// oscillator frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingMode {
    /// The dimensionless gamma rides along unchanged.
    FixedGamma,
    /// The dimensionful deformation gamma/(m omega hbar) is a property of
    /// space and stays put, so the dimensionless gamma rescales
    /// proportionally to omega (anchored at `omega_high`).
    FixedGammaTilde,
}

impl std::fmt::Display for ScalingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalingMode::FixedGamma => write!(f, "fixed-gamma"),
            ScalingMode::FixedGammaTilde => write!(f, "fixed-gamma-tilde"),
        }
    }
}

impl std::str::FromStr for ScalingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fixed-gamma" => Ok(ScalingMode::FixedGamma),
            "fixed-gamma-tilde" => Ok(ScalingMode::FixedGammaTilde),
            other => Err(format!(
                "unknown scaling mode '{other}' (expected fixed-gamma or fixed-gamma-tilde)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleMode {
    StirlingEngine,
    StirlingFridge,
    OttoFridge,
}

impl std::fmt::Display for CycleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CycleMode::StirlingEngine => write!(f, "stirling-engine"),
            CycleMode::StirlingFridge => write!(f, "stirling-fridge"),
            CycleMode::OttoFridge => write!(f, "otto-fridge"),
        }
    }
}

impl std::str::FromStr for CycleMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "stirling-engine" => Ok(CycleMode::StirlingEngine),
            "stirling-fridge" => Ok(CycleMode::StirlingFridge),
            "otto-fridge" => Ok(CycleMode::OttoFridge),
            other => Err(format!(
                "unknown cycle '{other}' (expected stirling-engine, stirling-fridge or otto-fridge)"
            )),
        }
    }
}

/// Bath temperatures, stroke frequencies, deformation strength (defined at
/// `omega_high`) and the scaling convention.
///
/// Construction accepts the degenerate boundaries `t_hot == t_cold` and
/// `omega_high == omega_low`; cycle evaluation then reports zero work or a
/// degenerate-cycle error instead of refusing the input. Sweep validation
/// demands the strict orderings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSpec {
    t_hot: f64,
    t_cold: f64,
    omega_high: f64,
    omega_low: f64,
    gamma: f64,
    scaling_mode: ScalingMode,
}

impl CycleSpec {
    pub fn new(
        t_hot: f64,
        t_cold: f64,
        omega_high: f64,
        omega_low: f64,
        gamma: f64,
        scaling_mode: ScalingMode,
    ) -> Result<Self> {
        for (name, v) in [
            ("t_hot", t_hot),
            ("t_cold", t_cold),
            ("omega_high", omega_high),
            ("omega_low", omega_low),
            ("gamma", gamma),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidCycleSpec(format!("{name} must be finite")));
            }
        }
        if t_cold <= 0.0 || t_hot < t_cold {
            return Err(Error::InvalidCycleSpec(format!(
                "need t_hot >= t_cold > 0, got t_hot = {t_hot}, t_cold = {t_cold}"
            )));
        }
        if omega_low <= 0.0 || omega_high < omega_low {
            return Err(Error::InvalidCycleSpec(format!(
                "need omega_high >= omega_low > 0, got omega_high = {omega_high}, \
                 omega_low = {omega_low}"
            )));
        }
        if gamma < 0.0 {
            return Err(Error::InvalidCycleSpec(format!(
                "gamma must be nonnegative, got {gamma}"
            )));
        }
        Ok(Self {
            t_hot,
            t_cold,
            omega_high,
            omega_low,
            gamma,
            scaling_mode,
        })
    }

    /// The strict orderings `t_hot > t_cold` and `omega_high > omega_low`
    /// required of sweep grid points.
    pub fn validate_strict(&self) -> Result<()> {
        if self.t_hot <= self.t_cold {
            return Err(Error::InvalidCycleSpec(format!(
                "need t_hot > t_cold, got t_hot = {}, t_cold = {}",
                self.t_hot, self.t_cold
            )));
        }
        if self.omega_high <= self.omega_low {
            return Err(Error::InvalidCycleSpec(format!(
                "need omega_high > omega_low, got omega_high = {}, omega_low = {}",
                self.omega_high, self.omega_low
            )));
        }
        Ok(())
    }

    pub fn t_hot(&self) -> f64 {
        self.t_hot
    }

    pub fn t_cold(&self) -> f64 {
        self.t_cold
    }

    pub fn omega_high(&self) -> f64 {
        self.omega_high
    }

    pub fn omega_low(&self) -> f64 {
        self.omega_low
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn scaling_mode(&self) -> ScalingMode {
        self.scaling_mode
    }

    /// Deformation strength seen by the substance while running at `omega`.
    pub fn effective_gamma(&self, omega: f64) -> f64 {
        match self.scaling_mode {
            ScalingMode::FixedGamma => self.gamma,
            ScalingMode::FixedGammaTilde => self.gamma * omega / self.omega_high,
        }
    }

    /// The same cycle with a different deformation strength.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(
            self.t_hot,
            self.t_cold,
            self.omega_high,
            self.omega_low,
            gamma,
            self.scaling_mode,
        )
    }

    fn corner(&self, temperature: f64, omega: f64, rel_tol: f64) -> Result<(Corner, ThermoPoint)> {
        let gamma_effective = self.effective_gamma(omega);
        let params = SubstanceParams::new(omega, gamma_effective)?;
        let state = ThermalState::new(params, 1.0 / temperature)?;
        let point = statmech::thermo_point(&state, rel_tol)?;
        Ok((
            Corner {
                temperature,
                omega,
                gamma_effective,
            },
            point,
        ))
    }
}

/// A labelled corner of the cycle: bath temperature, frequency and the
/// deformation strength in force there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corner {
    pub temperature: f64,
    pub omega: f64,
    pub gamma_effective: f64,
}

/// The four signed stroke heats, net work and figure of merit of one cycle.
#[derive(Debug, Clone, Copy)]
pub struct CycleResult {
    pub mode: CycleMode,
    /// Stroke heats in traversal order A->B, B->C, C->D, D->A.
    pub heats: [f64; 4],
    /// `Q1 + Q2 + Q3 + Q4`.
    pub w_total: f64,
    /// Efficiency for the engine, COP for the refrigerators.
    pub merit: f64,
    pub corners: [Corner; 4],
}

fn max_heat_scale(heats: &[f64; 4]) -> f64 {
    heats.iter().fold(0.0, |m, q| m.max(q.abs()))
}

/// Stirling engine: hot isotherm A->B (omega_high -> omega_low), cold
/// isochore B->C, cold isotherm C->D (omega_low -> omega_high), hot
/// isochore D->A. Efficiency `1 + (Q_BC + Q_CD)/(Q_DA + Q_AB)`.
pub fn stirling_engine(spec: &CycleSpec, rel_tol: f64) -> Result<CycleResult> {
    let (ca, a) = spec.corner(spec.t_hot, spec.omega_high, rel_tol)?;
    let (cb, b) = spec.corner(spec.t_hot, spec.omega_low, rel_tol)?;
    let (cc, c) = spec.corner(spec.t_cold, spec.omega_low, rel_tol)?;
    let (cd, d) = spec.corner(spec.t_cold, spec.omega_high, rel_tol)?;

    let q_ab =
        (b.internal_energy - a.internal_energy) + spec.t_hot * (b.ln_partition - a.ln_partition);
    let q_bc = c.internal_energy - b.internal_energy;
    let q_cd =
        (d.internal_energy - c.internal_energy) + spec.t_cold * (d.ln_partition - c.ln_partition);
    let q_da = a.internal_energy - d.internal_energy;

    let heats = [q_ab, q_bc, q_cd, q_da];
    let w_total = q_ab + q_bc + q_cd + q_da;
    let heat_in = q_da + q_ab;
    if heat_in.abs() <= DEGENERACY_FLOOR * max_heat_scale(&heats) {
        return Err(Error::DegenerateCycle {
            reason: "no resolvable heat input (Q_DA + Q_AB = 0)".into(),
            heats,
            w_total,
        });
    }
    Ok(CycleResult {
        mode: CycleMode::StirlingEngine,
        heats,
        w_total,
        merit: 1.0 + (q_bc + q_cd) / heat_in,
        corners: [ca, cb, cc, cd],
    })
}

/// Stirling refrigerator: the reversed traversal, with the isothermal heats
/// written as `T dS`. COP `(Q_AB + Q_BC)/|W|`.
pub fn stirling_refrigerator(spec: &CycleSpec, rel_tol: f64) -> Result<CycleResult> {
    let (ca, a) = spec.corner(spec.t_cold, spec.omega_high, rel_tol)?;
    let (cb, b) = spec.corner(spec.t_cold, spec.omega_low, rel_tol)?;
    let (cc, c) = spec.corner(spec.t_hot, spec.omega_low, rel_tol)?;
    let (cd, d) = spec.corner(spec.t_hot, spec.omega_high, rel_tol)?;

    let q_ab = spec.t_cold * (b.entropy - a.entropy);
    let q_bc = c.internal_energy - b.internal_energy;
    let q_cd = spec.t_hot * (d.entropy - c.entropy);
    let q_da = a.internal_energy - d.internal_energy;

    let heats = [q_ab, q_bc, q_cd, q_da];
    let w_total = q_ab + q_bc + q_cd + q_da;
    if w_total.abs() <= DEGENERACY_FLOOR * max_heat_scale(&heats) {
        return Err(Error::DegenerateCycle {
            reason: "no resolvable net work over the closed cycle".into(),
            heats,
            w_total,
        });
    }
    Ok(CycleResult {
        mode: CycleMode::StirlingFridge,
        heats,
        w_total,
        merit: (q_ab + q_bc) / w_total.abs(),
        corners: [ca, cb, cc, cd],
    })
}

/// Otto refrigerator: cold isochore at `omega_low`, adiabat, hot isochore at
/// `omega_high`, adiabat. The two heats are population-difference sums over
/// a truncation index certified for both thermal distributions, and the COP
/// is `Q_cold / |W|`.
pub fn otto_refrigerator(spec: &CycleSpec, rel_tol: f64) -> Result<CycleResult> {
    let gamma_low = spec.effective_gamma(spec.omega_low);
    let gamma_high = spec.effective_gamma(spec.omega_high);
    let params_cold = SubstanceParams::new(spec.omega_low, gamma_low)?;
    let params_hot = SubstanceParams::new(spec.omega_high, gamma_high)?;
    let beta_cold = 1.0 / spec.t_cold;
    let beta_hot = 1.0 / spec.t_hot;
    let cold = ThermalState::new(params_cold, beta_cold)?;
    let hot = ThermalState::new(params_hot, beta_hot)?;

    // Shared truncation: certify each distribution separately, then extend
    // both partition sums to the larger index.
    let n_cold = statmech::partition_sum(&cold, rel_tol)?.levels_used;
    let n_hot = statmech::partition_sum(&hot, rel_tol)?.levels_used;
    let levels = n_cold.max(n_hot);
    let z_cold = statmech::partition_sum_with_min_levels(&cold, rel_tol, levels)?.value;
    let z_hot = statmech::partition_sum_with_min_levels(&hot, rel_tol, levels)?.value;

    let mut q_cold_sum = NeumaierSum::new();
    let mut q_hot_sum = NeumaierSum::new();
    for n in 0..=levels {
        let e_cold = params_cold.energy_level(n);
        let e_hot = params_hot.energy_level(n);
        let p_cold = (-beta_cold * e_cold).exp() / z_cold;
        let p_hot = (-beta_hot * e_hot).exp() / z_hot;
        let population_shift = p_hot - p_cold;
        q_cold_sum.add(e_cold * population_shift);
        q_hot_sum.add(-e_hot * population_shift);
    }
    let q_cold = q_cold_sum.value();
    let q_hot = q_hot_sum.value();
    let w_total = q_hot + q_cold;
    let heats = [q_cold, 0.0, q_hot, 0.0];

    if w_total.abs() <= DEGENERACY_FLOOR * q_hot.abs().max(q_cold.abs()) {
        return Err(Error::DegenerateCycle {
            reason: "net work below resolution (identical corner spectra?)".into(),
            heats,
            w_total,
        });
    }
    if q_cold <= 0.0 {
        return Err(Error::NotARefrigerator {
            q_cold,
            heats,
            w_total,
        });
    }
    Ok(CycleResult {
        mode: CycleMode::OttoFridge,
        heats,
        w_total,
        merit: q_cold / w_total.abs(),
        corners: [
            // A and C are the non-equilibrium arrivals after the adiabats;
            // they carry the other bath's populations at the local frequency.
            Corner {
                temperature: spec.t_hot,
                omega: spec.omega_low,
                gamma_effective: gamma_low,
            },
            Corner {
                temperature: spec.t_cold,
                omega: spec.omega_low,
                gamma_effective: gamma_low,
            },
            Corner {
                temperature: spec.t_cold,
                omega: spec.omega_high,
                gamma_effective: gamma_high,
            },
            Corner {
                temperature: spec.t_hot,
                omega: spec.omega_high,
                gamma_effective: gamma_high,
            },
        ],
    })
}

/// Dispatch by cycle mode.
pub fn evaluate(mode: CycleMode, spec: &CycleSpec, rel_tol: f64) -> Result<CycleResult> {
    match mode {
        CycleMode::StirlingEngine => stirling_engine(spec, rel_tol),
        CycleMode::StirlingFridge => stirling_refrigerator(spec, rel_tol),
        CycleMode::OttoFridge => otto_refrigerator(spec, rel_tol),
    }
}
