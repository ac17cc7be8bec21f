//! A small fully connected network with a single sigmoid output.

mod mlp;

pub use mlp::{backward, init_mlp, train_mlp, Activation, Layer, MlpArchitecture, MlpModel, MlpParams};
