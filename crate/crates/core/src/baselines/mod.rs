//! Reference algorithms PRECISION is measured against.

mod hashparallel;
mod hashpipe;
mod rap;
mod space_saving;
mod summary;

pub use hashparallel::HashParallel;
pub use hashpipe::HashPipe;
pub use rap::{Rap, RapMode};
pub use space_saving::SpaceSaving;
