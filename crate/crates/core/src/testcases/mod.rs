//! Benchmark configurations, their initial states and diagnostics.

pub mod diagnostics;
pub mod init;
pub mod spec;

pub use diagnostics::{compute as compute_diagnostics, front_location, perturbation_extrema, Diagnostics};
pub use init::Setup;
pub use spec::{Absorbing, BubbleDensity, CaseName, Orography, Perturbation, Stratification, TestcaseSpec};

/// Initial state of the nonhydrostatic (`hydrostatic = false`) or hydrostatic gravity wave.
pub fn init_gravity_wave(hydrostatic: bool) -> crate::Result<Setup> {
    TestcaseSpec::new(if hydrostatic { CaseName::GwH } else { CaseName::GwNh }).initialize()
}

/// Density current at the default 800 m resolution.
pub fn init_density_current() -> crate::Result<Setup> {
    TestcaseSpec::new(CaseName::Straka).initialize()
}

/// Agnesi mountain in the nonhydrostatic or hydrostatic regime.
pub fn init_mountain(hydrostatic: bool) -> crate::Result<Setup> {
    TestcaseSpec::new(if hydrostatic { CaseName::MtnH } else { CaseName::MtnNh }).initialize()
}

pub fn init_schar() -> crate::Result<Setup> {
    TestcaseSpec::new(CaseName::Schar).initialize()
}
