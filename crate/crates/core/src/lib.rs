//! Inference for the stress-strength reliability `R = P(Y < X)` of two
//! independent two-parameter Rayleigh samples observed under progressive
//! Type-II censoring.

pub mod analysis;
pub mod asymptotic;
pub mod bayes;
pub mod bootstrap;
pub mod data;
pub mod error;
pub mod exact;
pub mod gof;
pub mod interval;
pub mod point;
pub mod quadrature;
pub mod rayleigh;
pub mod rng;
pub mod special;
pub mod study;

pub use error::{Error, Result};
pub use interval::Interval;
pub use point::{mle_joint, mle_known_mu, mle_single, sufficient_stats, umvue_r, JointFit, MleOptions, SufficientStats};
pub use rayleigh::{r_true, sample_progressive, CensoringScheme, ProgressiveSample, RayleighParams};
pub use rng::RngStream;
