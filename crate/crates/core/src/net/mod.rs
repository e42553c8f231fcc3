//! Dual-head residual network with explicit forward and gradient passes,
//! AdamW optimization, and the checkpoint archive format.

pub mod checkpoint;
pub mod model;
pub mod ops;
pub mod optim;
pub mod params;
pub mod tensor;

pub use checkpoint::{load, load_with_config, save, Checkpoint, CheckpointError, CheckpointHeader};
pub use model::{
    forward, gradients, loss, loss_and_gradients, masked_log_softmax, select_head, LossTerms,
    NetError, NetOutput, TrainBatch,
};
pub use optim::{adamw_update, lr_at, OptHyper, OptState};
pub use params::{init_params, NetConfig, Params};
pub use tensor::{Scalar, Tensor};
