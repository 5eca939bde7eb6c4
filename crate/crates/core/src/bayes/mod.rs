//! Bayesian inference on `R`: Gibbs sampling when the location is unknown
//! and closed-form posterior results when it is known.

pub mod ars;
pub mod gibbs;
pub mod known_mu;

pub use gibbs::{
    credible_interval, gibbs_chain, posterior_summary, CredibleMode, Draw, GibbsOptions, MuConditional,
    PosteriorDraws, PosteriorSummary, PriorSpec,
};
pub use known_mu::{bayes_interval_known_mu, lindley_estimate, posterior_cdf_r, posterior_pdf_r_known_mu};
