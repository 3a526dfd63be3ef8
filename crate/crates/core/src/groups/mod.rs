//! Concrete group instantiations: rotations, planar rigid motions, and the
//! abelian plane used as a test reference.

mod r2;
mod se2;
mod so3;

pub use r2::{R2, R2Element};
pub use se2::{se2_distance, Se2, Se2Element};
pub use so3::{So3, So3Element};
