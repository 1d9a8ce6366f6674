//! Thermodynamics of quantum heat cycles whose working substance is a
//! harmonic oscillator living in a deformed (non-commutative) phase space.
//!
//! The deformation adds a quadratic term to the level ladder,
//! `E_n = omega (A n + B n^2)` with `A = 1 + gamma/2`, `B = gamma/2`, and
//! everything else follows from the canonical partition function of that
//! spectrum: internal energy, entropy, occupation probabilities, and the
//! stroke heats of three cycles (Stirling engine, Stirling refrigerator,
//! Otto refrigerator). Parameter sweeps, CSV/SVG emission and a battery of
//! independent numerical oracles round out the toolkit.
//!
//! Units: hbar = k_B = m = 1 throughout, so frequencies and temperatures
//! share one energy scale and every figure of merit is dimensionless.

pub mod cycles;
pub mod error;
pub mod numeric;
pub mod spectra;
pub mod statmech;
pub mod sweep;
pub mod validation;

pub use cycles::{Corner, CycleMode, CycleResult, CycleSpec, ScalingMode};
pub use error::{Error, Result};
pub use spectra::{pochhammer_rising, EigenstateCorrection, SubstanceParams};
pub use statmech::{
    erfc, erfcx, occupation_probability, partition_closed_form, partition_sum, thermo_point,
    PartitionResult, ThermalState, ThermoPoint, DEFAULT_REL_TOL,
};
pub use sweep::{PlotConfig, RowStatus, SweepRow, SweepSpec, SweptParameter};
pub use validation::OracleReport;
