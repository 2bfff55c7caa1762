//! Estimation of a finite-population mean when the study variable suffers
//! non-response, using Hansen-Hurwitz sub-sampling of non-respondents and
//! an auxiliary variable, in single-phase and two-phase designs.

pub mod design;
pub mod error;
pub mod estimators;
pub mod montecarlo;
pub mod population;
pub mod theory;

pub use design::{realize, Design, DrawnSample, NonResponseMode, Phase};
pub use error::{Error, Result};
pub use estimators::{ClassParams, ClassShape, EstimatorKind};
pub use montecarlo::{compare_theory, run_simulation, ClassChoice, SimulationReport, SimulationSpec};
pub use population::{compute_params, load_population, synthesize_population, FinitePopulation, PopulationParams};
