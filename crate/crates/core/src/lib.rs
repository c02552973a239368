//! Wavelet-domain multi-scale generative modeling at desk scale.
//!
//! The crate decomposes images into Haar pyramids, runs score-based
//! diffusion on the coarsest low-frequency band, and synthesizes the
//! high-frequency detail bands with a conditional adversarial model shared
//! across scales. Alongside the generative pipeline it carries the exact
//! Gaussian analysis used to check the diffusion discretization: analytic
//! OU scores, closed-form chain propagation, condition-number step bounds,
//! and the spatial/wavelet duality of the reverse process.
//!
//! Data-parallel batch work (chain ensembles, corpus transforms, batch
//! gradients) fans out over rayon when the default `parallel` feature is
//! enabled and degrades to identical sequential loops without it; results
//! are bitwise independent of thread count either way.

pub mod autodiff;
pub mod config;
pub mod diffusion;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod msal;
pub mod nn;
pub mod optim;
pub mod par;
pub mod pipeline;
pub mod rng;
pub mod synth;
pub mod tensor;
pub mod wavelet;

pub use error::{Error, Result};
pub use tensor::Tensor;
