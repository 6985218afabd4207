//! Physics-informed multi-output Gaussian process for static Timoshenko
//! beams.
//!
//! Deflections, rotations, strains, bending moments, shear forces and loads
//! share one latent GP through the beam differential operators, so data of
//! any of them informs all others. On top of the GP sit Metropolis-Hastings
//! identification of the bending and shear stiffness, mixture prediction over
//! posterior draws, and entropy-driven greedy sensor placement.

pub mod beam;
pub mod error;
pub mod gp;
pub mod io;
pub mod kernels;
pub mod mcmc;
pub mod placement;

pub use beam::{BeamConfig, NoiseLevel, NoiseSpec};
pub use error::{Error, Result};
pub use gp::{BoundaryCondition, CovarianceModel, Dataset, NoiseModel, Prediction, Theta};
pub use kernels::{KernelParams, QuantityKind};
pub use mcmc::{McmcConfig, PosteriorChain, Prior, PriorSpec};
pub use placement::{Criterion, PlacementProblem, PlacementResult};
