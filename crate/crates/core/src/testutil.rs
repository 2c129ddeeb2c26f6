pub use crate::linalg::PureState;
pub use crate::sampling::*;
pub use crate::states::*;
