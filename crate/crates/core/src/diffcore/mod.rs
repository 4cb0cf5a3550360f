//! Minimal dense reverse-mode differentiation with the layers and optimizer
//! used by the flow and the VAE.

pub mod gradcheck;
pub mod graph;
pub mod nn;
pub mod optim;
pub mod tensor;

pub use gradcheck::{numeric_grad_check, numeric_gradient, relative_error};
pub use graph::{log_sigmoid, Gradients, Graph, NodeId, LAYER_NORM_EPS};
pub use nn::{mlp_block_forward, ParamSet, PRELU_INIT};
pub use optim::{adamw_step, AdamWConfig, AdamWState};
pub use tensor::Tensor;

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
