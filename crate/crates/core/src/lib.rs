//! Weakly-supervised multi-label text classification over precomputed
//! sentence embeddings: flow (or whitening) calibration, a topic-guided
//! VAE, and a multi-label evaluation suite.

pub mod calib;
pub mod diffcore;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod synth;
pub mod vae;
pub mod error;
pub mod guidance;

pub use error::{Error, Result};
