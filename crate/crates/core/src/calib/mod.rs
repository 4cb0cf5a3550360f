//! Embedding calibration toward an isotropic Gaussian: a trainable flow, a
//! closed-form whitening transform, or nothing.

pub mod flow;
pub mod whiten;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use flow::{
    flow_apply, flow_forward, flow_init, flow_inverse, flow_nll, flow_train, read_flow, write_flow,
    FlowModel, FlowTrainConfig,
};
pub use whiten::{whiten_apply, whiten_fit, WhiteningTransform};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Calibration {
    #[default]
    Flow,
    Whiten,
    None,
}

impl fmt::Display for Calibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Calibration::Flow => "flow",
            Calibration::Whiten => "whiten",
            Calibration::None => "none",
        })
    }
}

impl std::str::FromStr for Calibration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "flow" => Ok(Calibration::Flow),
            "whiten" => Ok(Calibration::Whiten),
            "none" => Ok(Calibration::None),
            other => Err(Error::Config(format!("unknown calibration mode {other:?}"))),
        }
    }
}
