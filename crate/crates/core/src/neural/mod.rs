//! Small dense networks with explicit backpropagation, Adam and a binary
//! checkpoint format.

mod adam;
mod checkpoint;
mod mlp;

pub use adam::Adam;
pub use checkpoint::{Checkpoint, MAGIC as CHECKPOINT_MAGIC, VERSION as CHECKPOINT_VERSION};
pub use mlp::{soft_update, Activation, Dense, ForwardCache, Gradients, Mlp};
