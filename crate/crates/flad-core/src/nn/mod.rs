//! From-scratch dense neural-network core.
//!
//! Tensors, MLP classifiers, autoencoders, losses, SGD/Adam, exact
//! backpropagation and the finite-difference oracle that certifies it.

pub mod autoencoder;
pub mod fd;
pub mod gradcheck;
pub mod loss;
pub mod model;
pub mod optim;
pub mod params;
pub mod tensor;
pub mod train;

pub use autoencoder::Autoencoder;
pub use fd::{finite_diff_gradient, max_relative_error};
pub use gradcheck::{run_gradcheck, GradCheckReport};
pub use loss::{cross_entropy_loss, mse_loss, softmax_rows, LossKind, LossTarget};
pub use model::{backward, loss_value, Activation, Model, MlpConfig, OutputHead};
pub use optim::{optimizer_step, OptimizerKind, OptimizerState};
pub use params::{l2_norm, ParamVector};
pub use tensor::Tensor;
pub use train::{class_gradient, class_loss, train_autoencoder, train_local};
