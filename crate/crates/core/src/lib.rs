pub mod app;
pub mod corpus;
mod error;
pub mod eval;
pub mod features;
pub mod models;
pub mod pipeline;
mod scalar;
pub mod textprep;

pub use error::{Error, Result};
pub use scalar::{argmax, log_sum_exp, softmax, Real};

pub type FeatureVector64 = features::FeatureVector<f64>;
pub type FeatureVector32 = features::FeatureVector<f32>;
pub type MnbModel64 = models::MnbModel<f64>;
pub type MnbModel32 = models::MnbModel<f32>;
pub type LogRegModel64 = models::LogRegModel<f64>;
pub type LogRegModel32 = models::LogRegModel<f32>;
