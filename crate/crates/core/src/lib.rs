//! Equilibria, local stability and simulation for a retrovirus dynamics
//! model in which infected cells keep reproducing.
//!
//! Stability of the inner equilibrium is decided two ways: by Routh–Hurwitz
//! on the linearization ([`stability`]) and by a Volterra-type Lyapunov
//! functional whose derivative is written as a state-dependent quadratic
//! form checked with Sylvester's criterion ([`lyapunov`]).

pub mod cli;
pub mod equilibria;
pub mod error;
pub mod integrator;
pub mod lyapunov;
pub mod model;
pub mod stability;
pub mod sweep;

pub use equilibria::{Equilibrium, EquilibriumKind};
pub use error::{Error, Result};
pub use lyapunov::{Condition4Variant, LyapunovCoeffs, OmegaForm};
pub use model::{CubicCoeffs, Derivative, ModelParams, State};
pub use stability::{StabilityReport, Verdict};
